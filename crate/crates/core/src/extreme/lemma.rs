use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::certificate::ExtremeCertificate;
use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::Operator;
use crate::opnorm::{operator_norm, Method};
use crate::space::{ExtremePoints, SegmentDescriptor, Space};

/// Extreme contraction of a plane with a flat piece of sphere that is not an
/// isometry: `T` collapses a maximal segment `[v1, v2]` onto one extreme
/// point `w`, so `T y = 0` for the segment direction `y`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma21Construction {
    pub operator: Operator,
    pub segment: SegmentDescriptor,
    #[serde(serialize_with = "linalg::ser::vector")]
    pub w: DVector<f64>,
    pub certificate: ExtremeCertificate,
    /// Unit vector sent to zero.
    #[serde(serialize_with = "linalg::ser::vector")]
    pub not_isometry_proof: DVector<f64>,
    pub y_norm: f64,
    pub ty_norm: f64,
    pub vertex_norm: f64,
    pub note: String,
}

pub fn lemma21_construct(space: &Space) -> Result<Lemma21Construction> {
    if space.dim() != 2 {
        return Err(Error::Hypothesis(format!(
            "the construction needs a plane, got dimension {}",
            space.dim()
        )));
    }
    if space.is_strictly_convex() {
        return Err(Error::StrictlyConvex);
    }
    let segment = space.find_flat_segment()?.ok_or(Error::StrictlyConvex)?;
    let ExtremePoints::Finite(pts) = space.unit_ball_extreme_points()? else {
        return Err(Error::StrictlyConvex);
    };
    let w = pts[0].clone();
    let basis = DMatrix::from_columns(&[segment.x.clone(), segment.y.clone()]);
    let inv = basis
        .try_inverse()
        .ok_or_else(|| Error::Numerical("segment midpoint and direction are dependent".into()))?;
    let image = DMatrix::from_columns(&[w.clone(), DVector::zeros(2)]);
    let op = Operator::on(space.clone(), image * inv)?;
    let vertex_norm = operator_norm(&op, Method::Vertex, 0)?.value;
    if (vertex_norm - 1.0).abs() > 1e-12 {
        return Err(Error::Numerical(format!("constructed operator has norm {vertex_norm}")));
    }
    let (v1, v2) = segment.endpoints();
    let certificate = ExtremeCertificate::build(&op, vec![v1, v2], 1e-9)?;
    let y = segment.y.clone();
    Ok(Lemma21Construction {
        y_norm: space.norm(&y)?,
        ty_norm: space.norm(&op.apply(&y))?,
        operator: op,
        segment,
        w,
        certificate,
        not_isometry_proof: y,
        vertex_norm,
        note: "non-isometry witness: ||y|| = 1 while ||Ty|| = 0".into(),
    })
}
