use crate::error::{Error, Result};

/// Which end-point functions are removed from the open-knot B-spline basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constraint {
    None,
    /// Drops the first function; every remaining function vanishes at the left end.
    ZeroAtLeft,
    /// Drops the first and last function (homogeneous Dirichlet).
    ZeroAtBothEnds,
}

/// Maximal-smoothness spline space with an open, uniform knot vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineSpace {
    degree: usize,
    knots: Vec<f64>,
    constraint: Constraint,
}

/// Values and derivatives of the basis functions supported on one knot span.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisValues {
    /// Index, in the unconstrained basis, of the first function of the span.
    pub first: usize,
    /// `ders[k][r]` is the `k`-th derivative of function `first + r`.
    pub ders: Vec<Vec<f64>>,
}

impl SplineSpace {
    /// Uniform open knot vector on `[a, b]` with `n_elements` spans.
    pub fn uniform(degree: usize, n_elements: usize, a: f64, b: f64, constraint: Constraint) -> Result<Self> {
        if degree < 1 || n_elements < 1 || b <= a {
            return Err(Error::InvalidInput(format!(
                "spline space needs degree >= 1, elements >= 1 and a < b (got p={degree}, n={n_elements}, [{a}, {b}])"
            )));
        }
        let mut knots = vec![a; degree + 1];
        for k in 1..n_elements {
            knots.push(a + (b - a) * k as f64 / n_elements as f64);
        }
        knots.extend(std::iter::repeat_n(b, degree + 1));
        let space = Self {
            degree,
            knots,
            constraint,
        };
        if space.n_funcs() == 0 {
            return Err(Error::InvalidInput("constrained spline space is empty".into()));
        }
        Ok(space)
    }

    /// Uniform space on `[a, b]` with exactly `n_funcs` functions after the
    /// constraint is applied.
    pub fn with_dofs(degree: usize, n_funcs: usize, a: f64, b: f64, constraint: Constraint) -> Result<Self> {
        let removed = removed_count(constraint);
        let total = n_funcs + removed;
        if total < degree + 1 {
            return Err(Error::InvalidInput(format!(
                "{n_funcs} functions are too few for degree {degree}"
            )));
        }
        Self::uniform(degree, total - degree, a, b, constraint)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn constraint(&self) -> Constraint {
        self.constraint
    }

    /// Same knots, different constraint.
    pub fn with_constraint(&self, constraint: Constraint) -> Self {
        Self {
            constraint,
            ..self.clone()
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }

    /// Functions in the unconstrained basis.
    pub fn n_full(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    /// Functions after the constraint is applied.
    pub fn n_funcs(&self) -> usize {
        self.n_full().saturating_sub(removed_count(self.constraint))
    }

    pub fn n_elements(&self) -> usize {
        self.breakpoints().len() - 1
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.knots.clone();
        b.dedup();
        b
    }

    /// Maps an unconstrained index to its constrained index, if kept.
    pub fn constrained_index(&self, full: usize) -> Option<usize> {
        let offset = match self.constraint {
            Constraint::None => 0,
            _ => 1,
        };
        let last_removed = self.constraint == Constraint::ZeroAtBothEnds && full + 1 == self.n_full();
        if full < offset || last_removed || full >= self.n_full() {
            None
        } else {
            Some(full - offset)
        }
    }

    /// Greville abscissae of the unconstrained basis.
    pub fn greville(&self) -> Vec<f64> {
        let p = self.degree;
        (0..self.n_full())
            .map(|i| self.knots[i + 1..=i + p].iter().sum::<f64>() / p as f64)
            .collect()
    }

    fn find_span(&self, x: f64) -> usize {
        let p = self.degree;
        let n = self.n_full();
        if x >= self.knots[n] {
            return n - 1;
        }
        // last index with knots[idx] <= x, within [p, n-1]
        let mut lo = p;
        let mut hi = n;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if x < self.knots[mid] {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    }

    /// Nonzero unconstrained basis functions at `x` with derivatives up to `max_der`.
    pub fn eval_full(&self, x: f64, max_der: usize) -> Result<BasisValues> {
        let (lo, hi) = self.domain();
        if !(x >= lo && x <= hi) {
            return Err(Error::OutsideDomain { x, lo, hi });
        }
        let span = self.find_span(x);
        let ders = ders_basis_funs(span, x, self.degree, max_der, &self.knots);
        Ok(BasisValues {
            first: span - self.degree,
            ders,
        })
    }
}

fn removed_count(c: Constraint) -> usize {
    match c {
        Constraint::None => 0,
        Constraint::ZeroAtLeft => 1,
        Constraint::ZeroAtBothEnds => 2,
    }
}

/// Values and derivatives of the `p + 1` functions nonzero on `span`
/// (Cox–de Boor triangle with derivative recurrences).
fn ders_basis_funs(span: usize, x: f64, p: usize, n_der: usize, knots: &[f64]) -> Vec<Vec<f64>> {
    let mut ndu = vec![vec![0.0; p + 1]; p + 1];
    let mut left = vec![0.0; p + 1];
    let mut right = vec![0.0; p + 1];
    ndu[0][0] = 1.0;
    for j in 1..=p {
        left[j] = x - knots[span + 1 - j];
        right[j] = knots[span + j] - x;
        let mut saved = 0.0;
        for r in 0..j {
            ndu[j][r] = right[r + 1] + left[j - r];
            let temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    let mut ders = vec![vec![0.0; p + 1]; n_der + 1];
    for j in 0..=p {
        ders[0][j] = ndu[j][p];
    }
    let mut a = vec![vec![0.0; p + 1]; 2];
    for r in 0..=p {
        let (mut s1, mut s2) = (0usize, 1usize);
        a[0][0] = 1.0;
        for k in 1..=n_der.min(p) {
            let mut d = 0.0;
            let rk = r as isize - k as isize;
            let pk = p - k;
            if r >= k {
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk as usize];
                d = a[s2][0] * ndu[rk as usize][pk];
            }
            let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
            let j2 = if r as isize - 1 <= pk as isize { k - 1 } else { p - r };
            for j in j1..=j2 {
                let idx = (rk + j as isize) as usize;
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][idx];
                d += a[s2][j] * ndu[idx][pk];
            }
            if r <= pk {
                a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                d += a[s2][k] * ndu[r][pk];
            }
            ders[k][r] = d;
            std::mem::swap(&mut s1, &mut s2);
        }
    }
    let mut factor = p as f64;
    for k in 1..=n_der.min(p) {
        for v in ders[k].iter_mut() {
            *v *= factor;
        }
        factor *= (p - k) as f64;
    }
    ders
}

/// Basis functions of `space` supported at `x`, as `(constrained index,
/// [value, d/dx, …])` pairs. Functions removed by the constraint are skipped.
pub fn bspline_eval(space: &SplineSpace, x: f64, max_der: usize) -> Result<Vec<(usize, Vec<f64>)>> {
    let b = space.eval_full(x, max_der)?;
    Ok((0..=space.degree)
        .filter_map(|r| {
            space
                .constrained_index(b.first + r)
                .map(|idx| (idx, b.ders.iter().map(|d| d[r]).collect()))
        })
        .collect())
}
