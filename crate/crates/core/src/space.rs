//! Finite-dimensional real normed spaces: Euclidean (optionally with a Gram
//! matrix), `l_p` for `1 <= p <= inf`, and planar spaces whose unit ball is a
//! symmetric convex polygon.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rng::{self, stream};

/// Tolerance for unit-sphere membership checks.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Vertex lists must contain the negation of every vertex to this accuracy.
const SYMMETRY_TOL: f64 = 1e-9;

/// `l_inf` extreme points are enumerated explicitly, so cap the dimension.
const MAX_SIGN_VECTOR_DIM: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn from_f64(p: f64) -> Self {
        if p.is_infinite() && p > 0.0 {
            Exponent::Infinity
        } else {
            Exponent::Finite(p)
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpaceKind {
    Euclidean { gram: Option<DMatrix<f64>> },
    Lp { p: Exponent },
    Polyhedral2D { vertices: Vec<[f64; 2]> },
}

/// A validated normed space. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpaceJson", into = "SpaceJson")]
pub struct Space {
    kind: SpaceKind,
    dim: usize,
    inner: Option<InnerProduct>,
    polygon: Option<Polygon>,
}

/// Whitening data for inner-product norms: `||v|| = |L^T v|_2` where
/// `G = L L^T` is the Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerProduct {
    gram: DMatrix<f64>,
    l_t: DMatrix<f64>,
    l_t_inv: DMatrix<f64>,
}

impl InnerProduct {
    fn identity(n: usize) -> Self {
        let id = DMatrix::identity(n, n);
        InnerProduct { gram: id.clone(), l_t: id.clone(), l_t_inv: id }
    }

    /// Standard coordinates of `v`: `L^T v`.
    pub fn whiten(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.l_t * v
    }

    /// Inverse of [`whiten`](Self::whiten): `L^{-T} u`.
    pub fn unwhiten(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.l_t_inv * u
    }

    pub fn l_t(&self) -> &DMatrix<f64> {
        &self.l_t
    }

    pub fn l_t_inv(&self) -> &DMatrix<f64> {
        &self.l_t_inv
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn dot(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        a.dot(&(&self.gram * b))
    }
}

/// Symmetric convex polygon, counterclockwise, rotated so the first vertex
/// has the smallest polar angle in `[0, 2pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<[f64; 2]>,
    /// `normals[i]` satisfies `normals[i] . v = 1` on edge `i -> i+1`.
    normals: Vec<[f64; 2]>,
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn polar_angle(v: [f64; 2]) -> f64 {
    v[1].atan2(v[0]).rem_euclid(TAU)
}

impl Polygon {
    fn new(raw: &[[f64; 2]]) -> Result<Self> {
        let n = raw.len();
        if n < 4 {
            return Err(Error::InvalidSpace(format!(
                "a symmetric polygon needs at least 4 vertices, got {n}"
            )));
        }
        if raw.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSpace("vertices must be finite".into()));
        }
        for v in raw {
            let mirrored = raw
                .iter()
                .any(|u| (u[0] + v[0]).abs() <= SYMMETRY_TOL && (u[1] + v[1]).abs() <= SYMMETRY_TOL);
            if !mirrored {
                return Err(Error::InvalidSpace(format!(
                    "vertex ({}, {}) has no negation in the list",
                    v[0], v[1]
                )));
            }
        }
        let scale = raw.iter().map(|v| v[0].hypot(v[1])).fold(0.0, f64::max);
        if scale == 0.0 {
            return Err(Error::InvalidSpace("degenerate polygon".into()));
        }
        let mut winding = 0.0;
        for i in 0..n {
            let a = raw[i];
            let b = raw[(i + 1) % n];
            let c = raw[(i + 2) % n];
            if cross(a, b) <= 1e-12 * scale * scale {
                return Err(Error::InvalidSpace(
                    "vertices must be in counterclockwise order around the origin".into(),
                ));
            }
            let turn = cross([b[0] - a[0], b[1] - a[1]], [c[0] - b[0], c[1] - b[1]]);
            if turn <= 1e-12 * scale * scale {
                return Err(Error::InvalidSpace(
                    "vertices must form a strictly convex polygon".into(),
                ));
            }
            winding += (polar_angle(b) - polar_angle(a)).rem_euclid(TAU);
        }
        if (winding - TAU).abs() > 1e-6 {
            return Err(Error::InvalidSpace("vertex list winds more than once".into()));
        }
        let first = (0..n)
            .min_by(|&i, &j| polar_angle(raw[i]).total_cmp(&polar_angle(raw[j])))
            .unwrap_or(0);
        let vertices: Vec<[f64; 2]> = (0..n).map(|i| raw[(first + i) % n]).collect();
        let normals = (0..n)
            .map(|i| {
                let a = vertices[i];
                let b = vertices[(i + 1) % n];
                let d = cross(a, b);
                [(b[1] - a[1]) / d, -(b[0] - a[0]) / d]
            })
            .collect();
        Ok(Polygon { vertices, normals })
    }

    fn gauge(&self, v: &DVector<f64>) -> f64 {
        self.normals
            .iter()
            .map(|n| n[0] * v[0] + n[1] * v[1])
            .fold(0.0, f64::max)
    }

    fn active_normal(&self, v: &DVector<f64>) -> [f64; 2] {
        let mut best = self.normals[0];
        let mut best_val = f64::NEG_INFINITY;
        for n in &self.normals {
            let val = n[0] * v[0] + n[1] * v[1];
            if val > best_val {
                best_val = val;
                best = *n;
            }
        }
        best
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    /// Edge crossed by the positive x-axis (half-open in the angle).
    fn edge_on_positive_axis(&self) -> usize {
        let n = self.vertices.len();
        (0..n)
            .find(|&i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % n];
                a[1] <= 0.0 && b[1] > 0.0 && (a[0] > 0.0 || b[0] > 0.0)
            })
            .unwrap_or(0)
    }
}

/// Extreme points of a unit ball.
#[derive(Debug, Clone, PartialEq)]
pub enum ExtremePoints {
    AllOfSphere,
    Finite(Vec<DVector<f64>>),
}

/// A segment `{x + lambda y : lambda1 <= lambda <= lambda2}` lying on the
/// unit sphere with extreme endpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentDescriptor {
    #[serde(serialize_with = "linalg::ser::vector")]
    pub x: DVector<f64>,
    #[serde(serialize_with = "linalg::ser::vector")]
    pub y: DVector<f64>,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl SegmentDescriptor {
    pub fn endpoints(&self) -> (DVector<f64>, DVector<f64>) {
        (&self.x + &self.y * self.lambda1, &self.x + &self.y * self.lambda2)
    }

    pub fn point(&self, lambda: f64) -> DVector<f64> {
        &self.x + &self.y * lambda
    }
}

impl Space {
    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::build(SpaceKind::Euclidean { gram: None }, dim)
    }

    pub fn euclidean_with_gram(gram: DMatrix<f64>) -> Result<Self> {
        let dim = gram.nrows();
        Self::build(SpaceKind::Euclidean { gram: Some(gram) }, dim)
    }

    /// `p = f64::INFINITY` selects the max norm.
    pub fn lp(p: f64, dim: usize) -> Result<Self> {
        Self::build(SpaceKind::Lp { p: Exponent::from_f64(p) }, dim)
    }

    pub fn polyhedral(vertices: Vec<[f64; 2]>) -> Result<Self> {
        Self::build(SpaceKind::Polyhedral2D { vertices }, 2)
    }

    pub fn build(kind: SpaceKind, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpace("dimension must be positive".into()));
        }
        let mut inner = None;
        let mut polygon = None;
        match &kind {
            SpaceKind::Euclidean { gram: None } => inner = Some(InnerProduct::identity(dim)),
            SpaceKind::Euclidean { gram: Some(g) } => {
                if g.nrows() != dim || g.ncols() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: g.nrows() });
                }
                if g.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidSpace("Gram matrix must be finite".into()));
                }
                let asym = (g - g.transpose()).amax();
                if asym > 1e-12 * g.amax().max(1.0) {
                    return Err(Error::InvalidSpace("Gram matrix is not symmetric".into()));
                }
                let eig = g.clone().symmetric_eigen();
                if eig.eigenvalues.min() <= DEFAULT_TOL {
                    return Err(Error::InvalidSpace(
                        "Gram matrix is not positive definite".into(),
                    ));
                }
                let chol = g
                    .clone()
                    .cholesky()
                    .ok_or_else(|| Error::InvalidSpace("Cholesky factorization failed".into()))?;
                let l_t = chol.l().transpose();
                let l_t_inv = l_t
                    .clone()
                    .try_inverse()
                    .ok_or_else(|| Error::InvalidSpace("singular Cholesky factor".into()))?;
                inner = Some(InnerProduct { gram: g.clone(), l_t, l_t_inv });
            }
            SpaceKind::Lp { p } => {
                match *p {
                    Exponent::Finite(p) if p.is_nan() || p < 1.0 => {
                        return Err(Error::InvalidSpace(format!("exponent must satisfy p >= 1, got {p}")));
                    }
                    Exponent::Finite(2.0) => inner = Some(InnerProduct::identity(dim)),
                    _ => {}
                }
                if dim == 2 {
                    match *p {
                        Exponent::Infinity => {
                            polygon = Some(Polygon::new(&[[1.0, -1.0], [1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0]])?)
                        }
                        Exponent::Finite(1.0) => {
                            polygon = Some(Polygon::new(&[[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])?)
                        }
                        _ => {}
                    }
                }
            }
            SpaceKind::Polyhedral2D { vertices } => {
                if dim != 2 {
                    return Err(Error::InvalidSpace("polyhedral spaces are two-dimensional".into()));
                }
                polygon = Some(Polygon::new(vertices)?);
            }
        }
        Ok(Space { kind, dim, inner, polygon })
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Whitening data when the norm comes from an inner product
    /// (Euclidean kind, or `l_2`).
    pub fn inner_product(&self) -> Option<&InnerProduct> {
        self.inner.as_ref()
    }

    pub fn is_euclidean(&self) -> bool {
        self.inner.is_some()
    }

    pub fn polygon(&self) -> Option<&Polygon> {
        self.polygon.as_ref()
    }

    pub fn exponent(&self) -> Option<Exponent> {
        match self.kind {
            SpaceKind::Lp { p } => Some(p),
            _ => None,
        }
    }

    pub fn check_dim(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        Ok(())
    }

    pub fn norm(&self, v: &DVector<f64>) -> Result<f64> {
        self.check_dim(v)?;
        Ok(self.norm_of(v))
    }

    /// Norm without the dimension check.
    pub(crate) fn norm_of(&self, v: &DVector<f64>) -> f64 {
        if let Some(poly) = &self.polygon {
            return poly.gauge(v);
        }
        if let Some(ip) = &self.inner {
            return ip.whiten(v).norm();
        }
        match self.kind {
            SpaceKind::Lp { p: Exponent::Infinity } => v.amax(),
            SpaceKind::Lp { p: Exponent::Finite(1.0) } => v.lp_norm(1),
            SpaceKind::Lp { p: Exponent::Finite(p) } => {
                let m = v.amax();
                if m == 0.0 {
                    return 0.0;
                }
                m * v.iter().map(|x| (x.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
            }
            _ => unreachable!("remaining kinds carry a polygon or an inner product"),
        }
    }

    pub fn is_strictly_convex(&self) -> bool {
        match self.kind {
            SpaceKind::Euclidean { .. } => true,
            SpaceKind::Lp { p: Exponent::Finite(p) } => p > 1.0 || self.dim == 1,
            SpaceKind::Lp { p: Exponent::Infinity } => self.dim == 1,
            SpaceKind::Polyhedral2D { .. } => false,
        }
    }

    /// Unique supporting functional at every nonzero point.
    pub fn is_smooth(&self) -> bool {
        match self.kind {
            SpaceKind::Euclidean { .. } => true,
            SpaceKind::Lp { p: Exponent::Finite(p) } => p > 1.0 || self.dim == 1,
            SpaceKind::Lp { p: Exponent::Infinity } => self.dim == 1,
            SpaceKind::Polyhedral2D { .. } => false,
        }
    }

    /// A subgradient of the norm at `v` (the supporting functional when the
    /// space is smooth and `v != 0`). Satisfies `g . v = ||v||`.
    pub fn subgradient(&self, v: &DVector<f64>) -> DVector<f64> {
        let n = self.dim;
        let nv = self.norm_of(v);
        if nv == 0.0 {
            return DVector::zeros(n);
        }
        if let Some(poly) = &self.polygon {
            let a = poly.active_normal(v);
            return DVector::from_vec(vec![a[0], a[1]]);
        }
        if let Some(ip) = &self.inner {
            return ip.gram() * v / nv;
        }
        match self.kind {
            SpaceKind::Lp { p: Exponent::Infinity } => {
                let k = v.iamax();
                let mut g = DVector::zeros(n);
                g[k] = v[k].signum();
                g
            }
            SpaceKind::Lp { p: Exponent::Finite(1.0) } => {
                v.map(|x| if x == 0.0 { 0.0 } else { x.signum() })
            }
            SpaceKind::Lp { p: Exponent::Finite(p) } => {
                v.map(|x| x.signum() * (x.abs() / nv).powf(p - 1.0))
            }
            _ => unreachable!(),
        }
    }

    pub fn unit_ball_extreme_points(&self) -> Result<ExtremePoints> {
        if self.is_strictly_convex() && self.dim > 1 {
            return Ok(ExtremePoints::AllOfSphere);
        }
        if let Some(poly) = &self.polygon {
            return Ok(ExtremePoints::Finite(
                poly.vertices.iter().map(|v| DVector::from_vec(v.to_vec())).collect(),
            ));
        }
        let n = self.dim;
        match self.kind {
            SpaceKind::Lp { p: Exponent::Infinity } => {
                if n > MAX_SIGN_VECTOR_DIM {
                    return Err(Error::Unsupported(format!(
                        "enumerating 2^{n} sign vectors of l_inf"
                    )));
                }
                Ok(ExtremePoints::Finite(
                    (0..1u64 << n)
                        .map(|mask| {
                            DVector::from_fn(n, |i, _| if mask >> i & 1 == 1 { -1.0 } else { 1.0 })
                        })
                        .collect(),
                ))
            }
            // l_1, and the interval [-1, 1] in dimension one
            _ => {
                let mut pts = Vec::with_capacity(2 * n);
                for sign in [1.0, -1.0] {
                    for i in 0..n {
                        let mut e = DVector::zeros(n);
                        e[i] = sign;
                        pts.push(e);
                    }
                }
                Ok(ExtremePoints::Finite(pts))
            }
        }
    }

    /// Whether the unit vector `v` is an extreme point of the unit ball, up
    /// to `tol` in the max-coordinate distance to the nearest extreme point.
    pub fn is_extreme_point(&self, v: &DVector<f64>, tol: f64) -> Result<bool> {
        let nv = self.norm(v)?;
        if (nv - 1.0).abs() > tol {
            return Err(Error::NotUnit(nv));
        }
        if self.is_strictly_convex() {
            return Ok(true);
        }
        if let Some(poly) = &self.polygon {
            return Ok(poly
                .vertices
                .iter()
                .any(|w| (w[0] - v[0]).abs() <= tol && (w[1] - v[1]).abs() <= tol));
        }
        match self.kind {
            SpaceKind::Lp { p: Exponent::Infinity } => {
                Ok(v.iter().all(|x| (1.0 - x.abs()).abs() <= tol))
            }
            _ => {
                let k = v.iamax();
                let off = v
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != k)
                    .map(|(_, x)| x.abs())
                    .fold(0.0, f64::max);
                Ok((1.0 - v[k].abs()).abs() <= tol && off <= tol)
            }
        }
    }

    /// A maximal segment on the unit sphere, or `None` for strictly convex
    /// planes. The segment is the edge of the unit polygon crossed by the
    /// positive x-axis, parametrized from its midpoint.
    pub fn find_flat_segment(&self) -> Result<Option<SegmentDescriptor>> {
        if self.dim != 2 {
            return Err(Error::Hypothesis(format!(
                "flat-segment detection needs a plane, got dimension {}",
                self.dim
            )));
        }
        let Some(poly) = &self.polygon else {
            return Ok(None);
        };
        let n = poly.vertices.len();
        let i = poly.edge_on_positive_axis();
        let a = DVector::from_vec(poly.vertices[i].to_vec());
        let b = DVector::from_vec(poly.vertices[(i + 1) % n].to_vec());
        let d = &b - &a;
        let len = self.norm_of(&d);
        Ok(Some(SegmentDescriptor {
            x: (&a + &b) * 0.5,
            y: d / len,
            lambda1: -0.5 * len,
            lambda2: 0.5 * len,
        }))
    }

    /// `count` unit vectors from normalized Gaussian directions. Deterministic
    /// in `seed`.
    pub fn sphere_sample(&self, seed: u64, count: usize) -> Vec<DVector<f64>> {
        let mut rng = rng::rng_for(seed, stream::SPHERE);
        self.sample_with(&mut rng, count)
    }

    pub(crate) fn sample_with(&self, rng: &mut rng::Rng, count: usize) -> Vec<DVector<f64>> {
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let g = rng::gaussian_vector(rng, self.dim);
            let nv = self.norm_of(&g);
            if nv > 1e-12 {
                out.push(g / nv);
            }
        }
        out
    }
}

/// Wire format of a space: `{"kind", "dim", "p", "gram", "vertices"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceJson {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<ExponentJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExponentJson {
    Number(f64),
    Text(String),
}

impl TryFrom<SpaceJson> for Space {
    type Error = Error;

    fn try_from(j: SpaceJson) -> Result<Self> {
        match j.kind.as_str() {
            "euclidean" => match j.gram {
                Some(rows) => {
                    let g = linalg::rows_to_matrix(&rows)?;
                    if let Some(d) = j.dim {
                        if d != g.nrows() {
                            return Err(Error::DimensionMismatch { expected: d, found: g.nrows() });
                        }
                    }
                    Space::euclidean_with_gram(g)
                }
                None => Space::euclidean(j.dim.unwrap_or(2)),
            },
            "lp" => {
                let p = match j.p {
                    None => Exponent::Finite(2.0),
                    Some(ExponentJson::Number(p)) => Exponent::Finite(p),
                    Some(ExponentJson::Text(s)) => match s.to_ascii_lowercase().as_str() {
                        "inf" | "infinity" => Exponent::Infinity,
                        other => other.parse::<f64>().map(Exponent::from_f64).map_err(|_| {
                            Error::InvalidSpace(format!("unrecognized exponent {s:?}"))
                        })?,
                    },
                };
                Space::build(SpaceKind::Lp { p }, j.dim.unwrap_or(2))
            }
            "polyhedral2d" => {
                let vertices = j
                    .vertices
                    .ok_or_else(|| Error::InvalidSpace("polyhedral2d requires vertices".into()))?;
                if let Some(d) = j.dim {
                    if d != 2 {
                        return Err(Error::DimensionMismatch { expected: 2, found: d });
                    }
                }
                Space::polyhedral(vertices)
            }
            other => Err(Error::InvalidSpace(format!("unknown kind {other:?}"))),
        }
    }
}

impl From<Space> for SpaceJson {
    fn from(s: Space) -> Self {
        match s.kind {
            SpaceKind::Euclidean { gram } => SpaceJson {
                kind: "euclidean".into(),
                dim: Some(s.dim),
                p: None,
                gram: gram.as_ref().map(linalg::matrix_to_rows),
                vertices: None,
            },
            SpaceKind::Lp { p } => SpaceJson {
                kind: "lp".into(),
                dim: Some(s.dim),
                p: Some(match p {
                    Exponent::Finite(p) => ExponentJson::Number(p),
                    Exponent::Infinity => ExponentJson::Text("inf".into()),
                }),
                gram: None,
                vertices: None,
            },
            SpaceKind::Polyhedral2D { vertices } => SpaceJson {
                kind: "polyhedral2d".into(),
                dim: Some(2),
                p: None,
                gram: None,
                vertices: Some(vertices),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_vec(x.to_vec())
    }

    fn square() -> Space {
        Space::polyhedral(vec![[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]]).unwrap()
    }

    fn hexagon() -> Space {
        let h = 3f64.sqrt() / 2.0;
        Space::polyhedral(vec![
            [1.0, 0.0],
            [0.5, h],
            [-0.5, h],
            [-1.0, 0.0],
            [-0.5, -h],
            [0.5, -h],
        ])
        .unwrap()
    }

    #[test]
    fn norm_examples() {
        let l3 = Space::lp(3.0, 2).unwrap();
        assert!((l3.norm(&v(&[1.0, 1.0])).unwrap() - 2f64.powf(1.0 / 3.0)).abs() < 1e-15);
        let e2 = Space::euclidean(2).unwrap();
        assert_eq!(e2.norm(&v(&[3.0, 4.0])).unwrap(), 5.0);
        assert!((square().norm(&v(&[0.5, -0.25])).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn norm_rejects_wrong_dimension() {
        let e2 = Space::euclidean(2).unwrap();
        assert_eq!(
            e2.norm(&v(&[1.0, 2.0, 3.0])),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        );
    }

    #[test]
    fn gram_weighted_norm() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 4.0]);
        let s = Space::euclidean_with_gram(g).unwrap();
        assert!((s.norm(&v(&[0.0, 1.0])).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_spaces_are_rejected() {
        assert!(Space::lp(0.5, 2).is_err());
        assert!(Space::lp(f64::NAN, 2).is_err());
        assert!(Space::euclidean(0).is_err());
        let indefinite = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(Space::euclidean_with_gram(indefinite).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(Space::euclidean_with_gram(asym).is_err());
        // not symmetric under negation
        assert!(Space::polyhedral(vec![[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -2.0]]).is_err());
        // clockwise
        assert!(Space::polyhedral(vec![[1.0, 1.0], [1.0, -1.0], [-1.0, -1.0], [-1.0, 1.0]]).is_err());
        // collinear vertex
        assert!(Space::polyhedral(vec![
            [1.0, 0.0],
            [1.0, 1.0],
            [-1.0, 1.0],
            [-1.0, 0.0],
            [-1.0, -1.0],
            [1.0, -1.0]
        ])
        .is_err());
    }

    #[test]
    fn strict_convexity_flags() {
        assert!(Space::euclidean(3).unwrap().is_strictly_convex());
        assert!(!Space::lp(1.0, 2).unwrap().is_strictly_convex());
        assert!(!Space::lp(f64::INFINITY, 2).unwrap().is_strictly_convex());
        assert!(Space::lp(1.5, 2).unwrap().is_strictly_convex());
        assert!(!hexagon().is_strictly_convex());
    }

    #[test]
    fn extreme_point_lists() {
        let ExtremePoints::Finite(sq) = square().unit_ball_extreme_points().unwrap() else {
            panic!("square has finitely many extreme points");
        };
        assert_eq!(sq.len(), 4);
        for p in [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]] {
            assert!(sq.contains(&v(&p)));
        }
        assert_eq!(
            Space::lp(2.0, 2).unwrap().unit_ball_extreme_points().unwrap(),
            ExtremePoints::AllOfSphere
        );
        let ExtremePoints::Finite(l1) = Space::lp(1.0, 2).unwrap().unit_ball_extreme_points().unwrap()
        else {
            panic!()
        };
        assert_eq!(l1[0], v(&[1.0, 0.0]));
        assert_eq!(l1.len(), 4);
        let ExtremePoints::Finite(linf3) =
            Space::lp(f64::INFINITY, 3).unwrap().unit_ball_extreme_points().unwrap()
        else {
            panic!()
        };
        assert_eq!(linf3.len(), 8);
    }

    #[test]
    fn extreme_point_queries() {
        let linf = Space::lp(f64::INFINITY, 2).unwrap();
        assert!(!linf.is_extreme_point(&v(&[1.0, 0.3]), DEFAULT_TOL).unwrap());
        assert!(linf.is_extreme_point(&v(&[1.0, 1.0]), DEFAULT_TOL).unwrap());
        let e2 = Space::euclidean(2).unwrap();
        assert!(e2.is_extreme_point(&v(&[0.6, 0.8]), DEFAULT_TOL).unwrap());
        assert!(matches!(
            e2.is_extreme_point(&v(&[1.0, 1.0]), DEFAULT_TOL),
            Err(Error::NotUnit(_))
        ));
        let l1_3 = Space::lp(1.0, 3).unwrap();
        assert!(l1_3.is_extreme_point(&v(&[0.0, -1.0, 0.0]), DEFAULT_TOL).unwrap());
        assert!(!l1_3.is_extreme_point(&v(&[0.5, -0.5, 0.0]), DEFAULT_TOL).unwrap());
    }

    #[test]
    fn flat_segment_of_the_square_is_its_right_face() {
        let seg = Space::lp(f64::INFINITY, 2).unwrap().find_flat_segment().unwrap().unwrap();
        assert_eq!(seg.x, v(&[1.0, 0.0]));
        assert_eq!(seg.y, v(&[0.0, 1.0]));
        assert_eq!((seg.lambda1, seg.lambda2), (-1.0, 1.0));
    }

    #[test]
    fn flat_segment_of_the_hexagon_is_the_first_edge() {
        let seg = hexagon().find_flat_segment().unwrap().unwrap();
        let (a, b) = seg.endpoints();
        let h = 3f64.sqrt() / 2.0;
        assert!((a - v(&[1.0, 0.0])).amax() < 1e-14);
        assert!((b - v(&[0.5, h])).amax() < 1e-14);
        assert!((&seg.x - v(&[0.75, h / 2.0])).amax() < 1e-14);
    }

    #[test]
    fn strictly_convex_planes_have_no_segment() {
        assert!(Space::lp(1.5, 2).unwrap().find_flat_segment().unwrap().is_none());
        assert!(Space::euclidean(2).unwrap().find_flat_segment().unwrap().is_none());
        assert!(matches!(
            Space::lp(1.0, 3).unwrap().find_flat_segment(),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn sphere_samples_are_unit_and_reproducible() {
        let e2 = Space::euclidean(2).unwrap();
        let a = e2.sphere_sample(7, 3);
        assert_eq!(a, e2.sphere_sample(7, 3));
        let l1 = Space::lp(1.0, 2).unwrap();
        let s = l1.sphere_sample(1, 1);
        assert!((s[0][0].abs() + s[0][1].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn subgradient_satisfies_euler_identity() {
        let x = v(&[0.3, -1.2]);
        for s in [
            Space::lp(1.0, 2).unwrap(),
            Space::lp(3.0, 2).unwrap(),
            Space::lp(f64::INFINITY, 2).unwrap(),
            hexagon(),
            Space::euclidean_with_gram(DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0])).unwrap(),
        ] {
            let g = s.subgradient(&x);
            assert!((g.dot(&x) - s.norm(&x).unwrap()).abs() < 1e-12, "{:?}", s.kind());
        }
    }

    #[test]
    fn json_round_trip_and_defaults() {
        let s: Space = serde_json::from_str(r#"{"kind":"lp","p":"inf"}"#).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.exponent(), Some(Exponent::Infinity));
        let back: Space = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        let e: Space = serde_json::from_str(r#"{"kind":"euclidean","gram":[[1,0],[0,4]]}"#).unwrap();
        assert_eq!(e.dim(), 2);
        assert!(serde_json::from_str::<Space>(r#"{"kind":"cube"}"#).is_err());
    }
}
