use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tensor::DenseMatrix;

/// Analytic maps from the parametric unit square or cube to the physical domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeometryMap {
    UnitSquare,
    UnitCube,
    /// `(ξ, η) ↦ ((1+ξ) cos(πη/2), (1+ξ) sin(πη/2))`: radii 1 to 2, first quadrant.
    QuarterAnnulus2d,
    /// The quarter annulus in the `(x₁, x₂)` plane swept by `πζ/2` about the
    /// line `{(x₁, -1, 0)}`.
    RotatedQuarterAnnulus3d,
}

impl GeometryMap {
    pub const ALL: [GeometryMap; 4] = [
        GeometryMap::UnitSquare,
        GeometryMap::UnitCube,
        GeometryMap::QuarterAnnulus2d,
        GeometryMap::RotatedQuarterAnnulus3d,
    ];

    pub fn dim(self) -> usize {
        match self {
            GeometryMap::UnitSquare | GeometryMap::QuarterAnnulus2d => 2,
            GeometryMap::UnitCube | GeometryMap::RotatedQuarterAnnulus3d => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GeometryMap::UnitSquare => "unit-square",
            GeometryMap::UnitCube => "unit-cube",
            GeometryMap::QuarterAnnulus2d => "quarter-annulus-2d",
            GeometryMap::RotatedQuarterAnnulus3d => "rotated-quarter-annulus-3d",
        }
    }

    /// Whether the map is the identity.
    pub fn is_cartesian(self) -> bool {
        matches!(self, GeometryMap::UnitSquare | GeometryMap::UnitCube)
    }

    /// Physical point and Jacobian `J[(i, j)] = ∂x_i/∂ξ_j` at a parametric point.
    pub fn eval(self, xi: &[f64]) -> (Vec<f64>, DenseMatrix) {
        assert_eq!(xi.len(), self.dim(), "parametric point has wrong dimension");
        match self {
            GeometryMap::UnitSquare | GeometryMap::UnitCube => (xi.to_vec(), DenseMatrix::identity(xi.len(), xi.len())),
            GeometryMap::QuarterAnnulus2d => {
                let (x, j) = annulus(xi[0], xi[1]);
                (x.to_vec(), DenseMatrix::from_row_slice(2, 2, &[j[0][0], j[0][1], j[1][0], j[1][1]]))
            }
            GeometryMap::RotatedQuarterAnnulus3d => {
                let ([a, b], ja) = annulus(xi[0], xi[1]);
                let th = FRAC_PI_2 * xi[2];
                let (s, c) = th.sin_cos();
                let x = vec![a, -1.0 + (b + 1.0) * c, (b + 1.0) * s];
                let jac = DenseMatrix::from_row_slice(
                    3,
                    3,
                    &[
                        ja[0][0],
                        ja[0][1],
                        0.0,
                        ja[1][0] * c,
                        ja[1][1] * c,
                        -(b + 1.0) * FRAC_PI_2 * s,
                        ja[1][0] * s,
                        ja[1][1] * s,
                        (b + 1.0) * FRAC_PI_2 * c,
                    ],
                );
                (x, jac)
            }
        }
    }

    /// Exact measure of the physical domain.
    pub fn measure(self) -> f64 {
        let area = 3.0 * std::f64::consts::PI / 4.0;
        match self {
            GeometryMap::UnitSquare | GeometryMap::UnitCube => 1.0,
            GeometryMap::QuarterAnnulus2d => area,
            GeometryMap::RotatedQuarterAnnulus3d => {
                // Pappus: centroid height 28/(9π) above x₂ = 0, one unit from the axis.
                let radius = 1.0 + 28.0 / (9.0 * std::f64::consts::PI);
                area * radius * FRAC_PI_2
            }
        }
    }
}

fn annulus(xi: f64, eta: f64) -> ([f64; 2], [[f64; 2]; 2]) {
    let r = 1.0 + xi;
    let (s, c) = (FRAC_PI_2 * eta).sin_cos();
    ([r * c, r * s], [[c, -r * FRAC_PI_2 * s], [s, r * FRAC_PI_2 * c]])
}

impl fmt::Display for GeometryMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeometryMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GeometryMap::ALL
            .into_iter()
            .find(|g| g.name() == s.trim())
            .ok_or_else(|| Error::InvalidInput(format!("unknown geometry `{s}`")))
    }
}
