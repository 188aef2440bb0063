use super::{gauss_legendre, SplineSpace};
use crate::tensor::BandedMatrix;

/// Bilinear forms assembled by [`assemble_1d`]. Row `i` is the test function,
/// column `j` the trial function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    /// `∫ b_j b_i`
    Mass,
    /// `∫ b_j' b_i'`
    Stiffness,
    /// `∫ b_j' b_i`
    Advection,
}

/// Calls `f(x, weight, basis)` at every Gauss point, `degree + 1 + extra`
/// points per nonempty knot span.
pub(crate) fn for_each_quad_point<F>(space: &SplineSpace, extra: usize, max_der: usize, mut f: F)
where
    F: FnMut(f64, f64, &super::BasisValues),
{
    let (nodes, weights) = gauss_legendre(space.degree() + 1 + extra).expect("quadrature order in range");
    let bp = space.breakpoints();
    for el in bp.windows(2) {
        let (a, b) = (el[0], el[1]);
        let half = 0.5 * (b - a);
        for (xi, w) in nodes.iter().zip(&weights) {
            let x = a + half * (xi + 1.0);
            // evaluate strictly inside the span so the right span is picked
            let basis = space.eval_full(x, max_der).expect("quadrature point inside domain");
            f(x, w * half, &basis);
        }
    }
}

/// Assembles a one-dimensional Galerkin matrix on the constrained basis.
/// The result has `degree` sub- and super-diagonals.
pub fn assemble_1d(space: &SplineSpace, kind: MatrixKind) -> BandedMatrix {
    let p = space.degree();
    let n = space.n_funcs();
    let mut m = BandedMatrix::zeros(n, p, p);
    for_each_quad_point(space, 0, 1, |_, w, basis| {
        for r in 0..=p {
            let Some(i) = space.constrained_index(basis.first + r) else { continue };
            for c in 0..=p {
                let Some(j) = space.constrained_index(basis.first + c) else { continue };
                let v = match kind {
                    MatrixKind::Mass => basis.ders[0][c] * basis.ders[0][r],
                    MatrixKind::Stiffness => basis.ders[1][c] * basis.ders[1][r],
                    MatrixKind::Advection => basis.ders[1][c] * basis.ders[0][r],
                };
                m.add_to(i, j, w * v);
            }
        }
    });
    m
}

/// Load vector `∫ f b_i` on the constrained basis, with `extra` additional
/// quadrature points per span for non-polynomial `f`.
pub fn assemble_load<F: Fn(f64) -> f64>(space: &SplineSpace, f: F, extra: usize) -> Vec<f64> {
    let p = space.degree();
    let mut out = vec![0.0; space.n_funcs()];
    for_each_quad_point(space, extra, 0, |x, w, basis| {
        let fx = f(x);
        for r in 0..=p {
            if let Some(i) = space.constrained_index(basis.first + r) {
                out[i] += w * fx * basis.ders[0][r];
            }
        }
    });
    out
}
