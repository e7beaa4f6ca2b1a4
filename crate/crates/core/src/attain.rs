//! Norm attainment sets `M_T = {x in S_X : ||Tx|| = ||T||}`, the two-condition
//! membership test for operators between inner-product spaces, and the
//! orthogonality-preservation check at a point.

use nalgebra::DVector;
use serde::Serialize;

use crate::bjorth;
use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::Operator;
use crate::opnorm::{self, Method, NormStrategy};
use crate::rng::{self, stream};
use crate::space::{ExtremePoints, Space};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Face {
    #[serde(serialize_with = "linalg::ser::vector")]
    pub start: DVector<f64>,
    #[serde(serialize_with = "linalg::ser::vector")]
    pub end: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttainmentSet {
    pub op_norm: f64,
    #[serde(serialize_with = "linalg::ser::vectors")]
    pub points: Vec<DVector<f64>>,
    /// Orthonormal basis of the top singular subspace (inner-product case).
    #[serde(serialize_with = "linalg::ser::opt_vectors")]
    pub euclidean_subspace: Option<Vec<DVector<f64>>>,
    /// Edges of a planar unit polygon lying entirely in `M_T`.
    pub faces: Vec<Face>,
    pub exhaustive: bool,
    /// Zero operator: `M_T` is the whole sphere.
    pub degenerate: bool,
    pub method: &'static str,
}

fn basis_vectors(space: &Space) -> Vec<DVector<f64>> {
    (0..space.dim())
        .map(|i| {
            let mut e = DVector::zeros(space.dim());
            e[i] = 1.0;
            let n = space.norm_of(&e);
            e / n
        })
        .collect()
}

fn with_negatives(points: Vec<DVector<f64>>) -> Vec<DVector<f64>> {
    let neg: Vec<_> = points.iter().map(|p| -p).collect();
    points.into_iter().chain(neg).collect()
}

pub fn norm_attainment_set(op: &Operator, tol: f64, seed: u64) -> Result<AttainmentSet> {
    let degenerate = op.is_zero();
    if op.is_hilbert() {
        return hilbert_attainment(op, tol, degenerate);
    }
    if opnorm::VertexEnumeration.supports(op) {
        return vertex_attainment(op, tol, degenerate);
    }
    if degenerate {
        return Ok(AttainmentSet {
            op_norm: 0.0,
            points: with_negatives(basis_vectors(op.domain())),
            euclidean_subspace: None,
            faces: Vec::new(),
            exhaustive: true,
            degenerate,
            method: "multistart",
        });
    }
    let runs = opnorm::multistart_runs(op, seed, opnorm::DEFAULT_RESTARTS);
    let (best, _) = opnorm::reduce_max(&runs);
    if best <= 0.0 {
        return Err(Error::Numerical("multistart ascent found no positive value".into()));
    }
    let mut points: Vec<DVector<f64>> = Vec::new();
    for (val, x) in runs {
        if val >= best - tol && !points.iter().any(|p| (p - &x).amax() < 1e-6 || (p + &x).amax() < 1e-6) {
            points.push(x);
        }
    }
    Ok(AttainmentSet {
        op_norm: best,
        points: with_negatives(points),
        euclidean_subspace: None,
        faces: Vec::new(),
        exhaustive: false,
        degenerate,
        method: "multistart",
    })
}

fn hilbert_attainment(op: &Operator, tol: f64, degenerate: bool) -> Result<AttainmentSet> {
    let m = op.require_hilbert("spectral attainment")?;
    let ip = op.domain().inner_product().expect("hilbert domain");
    let (sigma, v) = linalg::right_singular(&m);
    let top = sigma[0];
    let k = sigma.iter().take_while(|&&s| s >= top - tol).count();
    let subspace: Vec<DVector<f64>> =
        (0..k).map(|j| linalg::sign_normalize(ip.unwhiten(&v.column(j).into_owned()))).collect();
    Ok(AttainmentSet {
        op_norm: top,
        points: with_negatives(subspace.clone()),
        euclidean_subspace: Some(subspace),
        faces: Vec::new(),
        exhaustive: true,
        degenerate,
        method: "spectral",
    })
}

fn vertex_attainment(op: &Operator, tol: f64, degenerate: bool) -> Result<AttainmentSet> {
    let ExtremePoints::Finite(vertices) = op.domain().unit_ball_extreme_points()? else {
        unreachable!("vertex strategy applies only to finitely many extreme points");
    };
    let cod = op.codomain();
    let values: Vec<f64> = vertices.iter().map(|v| cod.norm_of(&op.apply(v))).collect();
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let attains: Vec<bool> = values.iter().map(|&val| val >= best - tol).collect();
    let points = vertices
        .iter()
        .zip(&attains)
        .filter(|(_, &a)| a)
        .map(|(v, _)| v.clone())
        .collect();
    let mut faces = Vec::new();
    let planar = op.domain().polygon().is_some();
    if planar {
        // a convex function equal to its maximum at both ends and at the
        // midpoint of an edge is constant on that edge
        let n = vertices.len();
        for i in 0..n {
            let j = (i + 1) % n;
            if attains[i] && attains[j] {
                let mid = (&vertices[i] + &vertices[j]) * 0.5;
                if cod.norm_of(&op.apply(&mid)) >= best - tol {
                    faces.push(Face { start: vertices[i].clone(), end: vertices[j].clone() });
                }
            }
        }
    }
    Ok(AttainmentSet {
        op_norm: best,
        points,
        euclidean_subspace: None,
        faces,
        exhaustive: planar,
        degenerate,
        method: "vertex",
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Thm21Report {
    pub cond_i_holds: bool,
    pub cond_i_max_violation: f64,
    pub cond_ii_holds: bool,
    pub complement_sup: f64,
    pub image_norm: f64,
    pub op_norm: f64,
    /// `cond_i_holds && cond_ii_holds`.
    pub member: bool,
}

/// Membership of the unit vector `x` in `M_T` through the two conditions:
/// (i) `T` keeps `x` orthogonal to its orthogonal complement, checked on an
/// orthonormal basis of that complement; (ii) the norm of `T` restricted to
/// the complement does not exceed `||Tx||`.
pub fn check_theorem21(op: &Operator, x: &DVector<f64>, tol: f64) -> Result<Thm21Report> {
    let m = op.require_hilbert("the two-condition membership test")?;
    let dom = op.domain();
    let nx = dom.norm(x)?;
    if (nx - 1.0).abs() > tol {
        return Err(Error::NotUnit(nx));
    }
    let u = dom.inner_product().expect("hilbert domain").whiten(x);
    let u = &u / u.norm();
    let h = linalg::orthonormal_complement(&u);
    let mu = &m * &u;
    let mh = &m * &h;
    let image_norm = mu.norm();
    let max_mh = mh.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    let max_dot = mh.column_iter().map(|c| c.dot(&mu).abs()).fold(0.0, f64::max);
    let cond_i_max_violation = max_dot / (image_norm * max_mh + f64::EPSILON);
    let complement_sup = linalg::spectral_norm(&mh);
    let cond_i_holds = cond_i_max_violation <= tol;
    let cond_ii_holds = complement_sup <= image_norm + tol;
    Ok(Thm21Report {
        cond_i_holds,
        cond_i_max_violation,
        cond_ii_holds,
        complement_sup,
        image_norm,
        op_norm: linalg::spectral_norm(&m),
        member: cond_i_holds && cond_ii_holds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrthogonalityPreservation {
    pub holds: bool,
    pub forward_checked: usize,
    pub forward_failures: usize,
    pub backward_checked: usize,
    pub backward_failures: usize,
}

/// Sampled check that `x ⊥_B y <=> Tx ⊥_B Ty`. In smooth spaces
/// `x ⊥_B y` exactly when the supporting functional at `x` vanishes on `y`,
/// so both directions are sampled from the kernels of those functionals.
pub fn preserves_orthogonality_at(
    op: &Operator,
    x: &DVector<f64>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<OrthogonalityPreservation> {
    let (dom, cod) = (op.domain(), op.codomain());
    if !dom.is_smooth() || !cod.is_smooth() {
        return Err(Error::Hypothesis(
            "orthogonality preservation needs smooth domain and codomain".into(),
        ));
    }
    let nx = dom.norm(x)?;
    if (nx - 1.0).abs() > tol {
        return Err(Error::NotUnit(nx));
    }
    let n = dom.dim();
    let mut rng = rng::rng_for(seed, stream::ORTHOGONALITY);
    let tx = op.apply(x);
    let tx_zero = cod.norm_of(&tx) == 0.0;
    let gx = dom.subgradient(x);
    let c = op.matrix().transpose() * cod.subgradient(&tx);
    let orthogonal = |space: &Space, a: &DVector<f64>, b: &DVector<f64>| -> Result<bool> {
        if space.norm_of(a) == 0.0 || space.norm_of(b) == 0.0 {
            return Ok(true);
        }
        Ok(bjorth::bj_orthogonal(space, a, b, tol)?.orthogonal)
    };

    let mut report = OrthogonalityPreservation {
        holds: true,
        forward_checked: 0,
        forward_failures: 0,
        backward_checked: 0,
        backward_failures: 0,
    };
    let mut attempts = 0;
    while report.forward_checked < samples && attempts < 10 * samples {
        attempts += 1;
        let r = rng::gaussian_vector(&mut rng, n);
        let y = &r - x * (gx.dot(&r) / gx.dot(x));
        if dom.norm_of(&y) < 1e-9 {
            continue;
        }
        report.forward_checked += 1;
        if !orthogonal(cod, &tx, &op.apply(&y))? {
            report.forward_failures += 1;
        }
    }
    attempts = 0;
    while report.backward_checked < samples && attempts < 10 * samples {
        attempts += 1;
        let r = rng::gaussian_vector(&mut rng, n);
        let cc = c.dot(&c);
        let y = if tx_zero || cc == 0.0 { r } else { &r - &c * (c.dot(&r) / cc) };
        if dom.norm_of(&y) < 1e-9 {
            continue;
        }
        report.backward_checked += 1;
        if !orthogonal(dom, x, &y)? {
            report.backward_failures += 1;
        }
    }
    report.holds = report.forward_failures == 0 && report.backward_failures == 0;
    Ok(report)
}

/// Convenience: norm of `T` by the automatically selected strategy.
pub fn op_norm(op: &Operator, seed: u64) -> Result<f64> {
    Ok(opnorm::operator_norm(op, Method::Auto, seed)?.value)
}

#[cfg(test)]
pub(crate) fn diag(values: &[f64]) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::from_diagonal(&DVector::from_column_slice(values))
}
