//! Extreme contractions.
//!
//! An operator of norm at most one is an extreme contraction when it is not
//! the midpoint of two distinct operators of norm at most one. This module
//! produces evidence either way:
//!
//! * [`sufficient_extreme_check`]: `n` independent attaining vectors whose
//!   images are extreme points of the codomain ball certify extremeness.
//! * [`nonextreme_witness`]: for inner-product spaces, a non-isometry of norm
//!   one is split as `T = (T1 + T2) / 2` with `||T1|| = ||T2|| = 1`.
//! * [`lemma21_construct`]: on a plane whose sphere contains a segment, an
//!   extreme contraction that is not an isometry.
//! * [`search_extreme_nonisometry`]: the same kind of operator on strictly
//!   convex, non-Euclidean planes, found by randomized search.

mod certificate;
mod lemma;
mod search;
mod witness;

pub use certificate::{sufficient_extreme_check, verify_certificate, CertificateRule, ExtremeCertificate};
pub use lemma::{lemma21_construct, Lemma21Construction};
pub use search::{search_extreme_nonisometry, FoundExtreme, SearchOutcome};
pub use witness::{classify, hilbert_extreme_classify, nonextreme_witness, WitnessCase, WitnessPair};

use serde::Serialize;

use crate::error::Result;
use crate::linalg;
use crate::operator::Operator;
use crate::rng::{self, stream};
use crate::space::ExtremePoints;

/// Samples used when isometry can only be checked probabilistically.
pub const ISOMETRY_SAMPLES: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExtremeProof {
    /// `max |M^T M - I|` for the whitened matrix.
    Isometry { residual: f64 },
    Certificate(ExtremeCertificate),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ExtremenessVerdict {
    Extreme { proof: ExtremeProof },
    NotExtreme(WitnessPair),
    Inconclusive { reason: String },
}

impl ExtremenessVerdict {
    pub fn is_extreme(&self) -> bool {
        matches!(self, ExtremenessVerdict::Extreme { .. })
    }

    pub fn witness(&self) -> Option<&WitnessPair> {
        match self {
            ExtremenessVerdict::NotExtreme(w) => Some(w),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsometryCheck {
    pub is_isometry: bool,
    /// `false` when the answer rests on sampled sphere points.
    pub exact: bool,
    pub residual: f64,
}

/// Whether `||Tx|| = ||x||` for all `x`, within `tol`.
///
/// Inner-product spaces compare `M^T M` with the identity. When both balls
/// have finitely many extreme points and `T` is square, checking `T` on the
/// domain vertices and `T^{-1}` on the codomain vertices is exact. Other
/// combinations add a sampled check on the domain sphere.
pub fn is_isometry(op: &Operator, tol: f64) -> Result<IsometryCheck> {
    if let Some(m) = op.whitened() {
        let n = m.ncols();
        let residual = (m.transpose() * &m - nalgebra::DMatrix::identity(n, n)).amax();
        return Ok(IsometryCheck { is_isometry: residual <= tol, exact: true, residual });
    }
    let (dom, cod) = (op.domain(), op.codomain());
    if dom.dim() > cod.dim() || linalg::min_singular_value(op.matrix()) <= 1e-12 * op.matrix().amax() {
        return Ok(IsometryCheck { is_isometry: false, exact: true, residual: 1.0 });
    }
    let mut residual: f64 = 0.0;
    let dom_pts = dom.unit_ball_extreme_points()?;
    if let ExtremePoints::Finite(pts) = &dom_pts {
        for v in pts {
            residual = residual.max((cod.norm_of(&op.apply(v)) - dom.norm_of(v)).abs());
        }
    }
    let cod_pts = cod.unit_ball_extreme_points()?;
    let exact = match (&dom_pts, &cod_pts, op.is_square()) {
        (ExtremePoints::Finite(_), ExtremePoints::Finite(zs), true) => {
            let inv = op
                .matrix()
                .clone()
                .try_inverse()
                .expect("nonsingular by the singular value check");
            for z in zs {
                residual = residual.max((dom.norm_of(&(&inv * z)) - cod.norm_of(z)).abs());
            }
            true
        }
        _ => {
            let mut r = rng::rng_for(0, stream::ISOMETRY);
            for x in dom.sample_with(&mut r, ISOMETRY_SAMPLES) {
                residual = residual.max((cod.norm_of(&op.apply(&x)) - 1.0).abs());
            }
            false
        }
    };
    Ok(IsometryCheck { is_isometry: residual <= tol, exact, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Space;
    use nalgebra::DMatrix;

    #[test]
    fn isometry_examples() {
        let e2 = Space::euclidean(2).unwrap();
        let t = 0.4f64;
        let rot = Operator::on(e2.clone(), DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()])).unwrap();
        assert!(is_isometry(&rot, 1e-8).unwrap().is_isometry);
        let d = Operator::on(e2, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.5])).unwrap();
        assert!(!is_isometry(&d, 1e-8).unwrap().is_isometry);
        let swap = Operator::on(Space::lp(1.0, 2).unwrap(), DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        let c = is_isometry(&swap, 1e-8).unwrap();
        assert!(c.is_isometry && c.exact);
    }

    #[test]
    fn vertex_preserving_singular_map_is_not_an_isometry() {
        // every vertex of the square keeps norm one, but (0, 1) goes to zero
        let op = Operator::on(Space::lp(f64::INFINITY, 2).unwrap(), DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 0.0])).unwrap();
        assert!(!is_isometry(&op, 1e-8).unwrap().is_isometry);
    }

    #[test]
    fn shear_of_the_square_is_caught_by_the_inverse_check() {
        // vertices keep norm one: (1,1) -> (1,1), (1,-1) -> (1,0); but (0,1) -> (0,0.5)
        let op = Operator::on(Space::lp(f64::INFINITY, 2).unwrap(), DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.5, 0.5])).unwrap();
        let c = is_isometry(&op, 1e-8).unwrap();
        assert!(c.exact);
        assert!(!c.is_isometry);
    }

    #[test]
    fn smooth_lp_signed_permutation_is_isometry() {
        let op = Operator::on(Space::lp(3.0, 2).unwrap(), DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])).unwrap();
        let c = is_isometry(&op, 1e-8).unwrap();
        assert!(c.is_isometry && !c.exact);
    }
}
