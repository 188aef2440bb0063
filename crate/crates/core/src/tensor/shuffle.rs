use crate::error::{check_len, Result};

/// Perfect shuffle exchanging the time and space slots of a tensor vector.
///
/// Forward application maps time-outer ordering (`j * n_s + i`) to
/// space-outer ordering (`i * n_t + j`), i.e. transposes the `n_s x n_t`
/// matricization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShufflePermutation {
    n_t: usize,
    n_s: usize,
    /// `map[dst] = src` for the forward shuffle.
    map: Vec<usize>,
}

impl ShufflePermutation {
    pub fn new(n_t: usize, n_s: usize) -> Self {
        let mut map = vec![0; n_t * n_s];
        for i in 0..n_s {
            for j in 0..n_t {
                map[i * n_t + j] = j * n_s + i;
            }
        }
        Self { n_t, n_s, map }
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn n_s(&self) -> usize {
        self.n_s
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// The shuffle with the roles of time and space exchanged; equals the
    /// inverse of `self`.
    pub fn transposed(&self) -> Self {
        Self::new(self.n_s, self.n_t)
    }

    /// Returns `S x`, or `S^T x` when `inverse` is set.
    pub fn apply<T: Copy>(&self, x: &[T], inverse: bool) -> Result<Vec<T>> {
        check_len(self.map.len(), x.len())?;
        if inverse {
            let mut out = x.to_vec();
            for (dst, &src) in self.map.iter().enumerate() {
                out[src] = x[dst];
            }
            Ok(out)
        } else {
            Ok(self.map.iter().map(|&src| x[src]).collect())
        }
    }
}
