use rayon::prelude::*;

use super::GeometryMap;
use crate::error::{Error, Result};
use crate::spline::{Constraint, SplineSpace};
use crate::tensor::CsrMatrix;

struct Point1d {
    x: f64,
    w: f64,
    first: usize,
    vals: Vec<f64>,
    ders: Vec<f64>,
}

/// Quadrature point of one element with the local basis in physical terms.
pub(crate) struct ElementPoint {
    pub phys: Vec<f64>,
    /// Gauss weight times `|det J|`.
    pub weight: f64,
    pub values: Vec<f64>,
    pub grads: Vec<[f64; 3]>,
}

/// Local unconstrained dofs of one element and its quadrature points.
pub(crate) struct ElementData {
    pub dofs: Vec<usize>,
    pub points: Vec<ElementPoint>,
}

/// Tensor Gauss quadrature on the elements of a mapped spline space.
pub(crate) struct MappedQuadrature {
    geometry: GeometryMap,
    tabs: Vec<Vec<Vec<Point1d>>>,
    full_sizes: Vec<usize>,
}

impl MappedQuadrature {
    /// `degree + 1 + extra` Gauss points per element and direction.
    pub fn new(geometry: GeometryMap, spaces: &[SplineSpace], extra: usize) -> Result<Self> {
        if spaces.len() != geometry.dim() {
            return Err(Error::InvalidInput(format!(
                "{} needs {} spline spaces, got {}",
                geometry,
                geometry.dim(),
                spaces.len()
            )));
        }
        let mut tabs = Vec::with_capacity(spaces.len());
        for s in spaces {
            if s.domain() != (0.0, 1.0) {
                return Err(Error::InvalidInput("parametric spaces must live on [0, 1]".into()));
            }
            let full = s.with_constraint(Constraint::None);
            let q = full.degree() + 1 + extra;
            let mut pts = Vec::new();
            crate::spline::assembly::for_each_quad_point(&full, extra, 1, |x, w, b| {
                pts.push(Point1d { x, w, first: b.first, vals: b.ders[0].clone(), ders: b.ders[1].clone() });
            });
            let mut elems = Vec::new();
            let mut it = pts.into_iter().peekable();
            while it.peek().is_some() {
                elems.push(it.by_ref().take(q).collect::<Vec<_>>());
            }
            tabs.push(elems);
        }
        let full_sizes = spaces.iter().map(|s| s.n_full()).collect();
        Ok(Self { geometry, tabs, full_sizes })
    }

    pub fn n_elements(&self) -> usize {
        self.tabs.iter().map(|t| t.len()).product()
    }

    pub fn full_sizes(&self) -> &[usize] {
        &self.full_sizes
    }

    pub fn element(&self, e: usize) -> Result<ElementData> {
        let d = self.tabs.len();
        let mut rest = e;
        let mut elems = Vec::with_capacity(d);
        for t in &self.tabs {
            elems.push(&t[rest % t.len()]);
            rest /= t.len();
        }
        let nloc: Vec<usize> = elems.iter().map(|pts| pts[0].vals.len()).collect();
        let nq: Vec<usize> = elems.iter().map(|pts| pts.len()).collect();
        let n_local: usize = nloc.iter().product();

        let mut dofs = Vec::with_capacity(n_local);
        let mut local_idx = vec![vec![0usize; d]; n_local];
        for (a, li) in local_idx.iter_mut().enumerate() {
            let mut r = a;
            let mut global = 0;
            let mut stride = 1;
            for l in 0..d {
                li[l] = r % nloc[l];
                r /= nloc[l];
                global += (elems[l][0].first + li[l]) * stride;
                stride *= self.full_sizes[l];
            }
            dofs.push(global);
        }

        let total_q: usize = nq.iter().product();
        let mut points = Vec::with_capacity(total_q);
        let mut qi = vec![0usize; d];
        let mut xi = vec![0.0; d];
        for q in 0..total_q {
            let mut r = q;
            let mut w = 1.0;
            for l in 0..d {
                qi[l] = r % nq[l];
                r /= nq[l];
                let p = &elems[l][qi[l]];
                xi[l] = p.x;
                w *= p.w;
            }
            let (phys, jac) = self.geometry.eval(&xi);
            let det = jac.determinant();
            if !(det > 0.0) {
                return Err(Error::Geometry { point: xi.clone(), det });
            }
            let jinv = jac.try_inverse().ok_or(Error::Geometry { point: xi.clone(), det })?;
            let mut values = Vec::with_capacity(n_local);
            let mut grads = Vec::with_capacity(n_local);
            for li in &local_idx {
                let mut v = 1.0;
                let mut gh = [1.0; 3];
                for l in 0..d {
                    let p = &elems[l][qi[l]];
                    v *= p.vals[li[l]];
                    for (k, g) in gh.iter_mut().enumerate().take(d) {
                        *g *= if k == l { p.ders[li[l]] } else { p.vals[li[l]] };
                    }
                }
                let mut g = [0.0; 3];
                for (i, gi) in g.iter_mut().enumerate().take(d) {
                    *gi = (0..d).map(|k| jinv[(k, i)] * gh[k]).sum();
                }
                values.push(v);
                grads.push(g);
            }
            points.push(ElementPoint { phys, weight: w * det, values, grads });
        }
        Ok(ElementData { dofs, points })
    }
}

/// Stiffness and mass on the unconstrained tensor basis of a mapped domain.
pub fn assemble_mapped_full(geometry: GeometryMap, spaces: &[SplineSpace]) -> Result<(CsrMatrix, CsrMatrix)> {
    let quad = MappedQuadrature::new(geometry, spaces, 0)?;
    let n: usize = quad.full_sizes().iter().product();
    let parts = (0..quad.n_elements())
        .into_par_iter()
        .map(|e| {
            let el = quad.element(e)?;
            let k = el.dofs.len();
            let mut stiff = vec![0.0; k * k];
            let mut mass = vec![0.0; k * k];
            for p in &el.points {
                for a in 0..k {
                    for b in 0..k {
                        let ga = p.grads[a];
                        let gb = p.grads[b];
                        stiff[a * k + b] += p.weight * (ga[0] * gb[0] + ga[1] * gb[1] + ga[2] * gb[2]);
                        mass[a * k + b] += p.weight * p.values[a] * p.values[b];
                    }
                }
            }
            let mut ts = Vec::with_capacity(k * k);
            let mut tm = Vec::with_capacity(k * k);
            for a in 0..k {
                for b in 0..k {
                    ts.push((el.dofs[a], el.dofs[b], stiff[a * k + b]));
                    tm.push((el.dofs[a], el.dofs[b], mass[a * k + b]));
                }
            }
            Ok((ts, tm))
        })
        .collect::<Result<Vec<_>>>()?;
    let (ts, tm): (Vec<_>, Vec<_>) = parts.into_iter().unzip();
    Ok((
        CsrMatrix::from_triplets(n, n, ts.into_iter().flatten().collect()),
        CsrMatrix::from_triplets(n, n, tm.into_iter().flatten().collect()),
    ))
}

/// Space matrices of a mapped domain split into interior (constrained) and
/// boundary dofs.
#[derive(Debug, Clone)]
pub struct MappedSpaceMatrices {
    /// Interior-interior stiffness, in the tensor ordering of the constrained spaces.
    pub a: CsrMatrix,
    pub m: CsrMatrix,
    /// Interior-boundary couplings.
    pub a_boundary: CsrMatrix,
    pub m_boundary: CsrMatrix,
    /// Unconstrained index of every interior dof.
    pub interior: Vec<usize>,
    /// Unconstrained index of every boundary dof.
    pub boundary: Vec<usize>,
}

impl MappedSpaceMatrices {
    pub fn dim(&self) -> usize {
        self.interior.len()
    }
}

/// Splits the unconstrained tensor indices into interior and boundary lists.
pub(crate) fn partition_dofs(spaces: &[SplineSpace]) -> (Vec<usize>, Vec<usize>) {
    let sizes: Vec<usize> = spaces.iter().map(|s| s.n_full()).collect();
    let n: usize = sizes.iter().product();
    let n_int: usize = spaces.iter().map(|s| s.n_funcs()).product();
    let mut interior = vec![usize::MAX; n_int];
    let mut boundary = Vec::new();
    for full in 0..n {
        let mut r = full;
        let mut c = 0;
        let mut stride = 1;
        let mut inside = true;
        for s in spaces {
            match s.constrained_index(r % s.n_full()) {
                Some(ci) => c += ci * stride,
                None => inside = false,
            }
            stride *= s.n_funcs();
            r /= s.n_full();
        }
        if inside {
            interior[c] = full;
        } else {
            boundary.push(full);
        }
    }
    (interior, boundary)
}

/// Isoparametric assembly of `∫ ∇B_j·∇B_i` and `∫ B_j B_i` over
/// `G([0,1]^d)`, with `degree + 1` Gauss points per element and direction.
pub fn assemble_mapped(geometry: GeometryMap, spaces: &[SplineSpace]) -> Result<MappedSpaceMatrices> {
    let (a_full, m_full) = assemble_mapped_full(geometry, spaces)?;
    let (interior, boundary) = partition_dofs(spaces);
    Ok(MappedSpaceMatrices {
        a: a_full.select(&interior, &interior),
        m: m_full.select(&interior, &interior),
        a_boundary: a_full.select(&interior, &boundary),
        m_boundary: m_full.select(&interior, &boundary),
        interior,
        boundary,
    })
}
