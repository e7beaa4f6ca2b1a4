use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::attain::norm_attainment_set;
use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::Operator;
use crate::opnorm::{operator_norm, Method};

/// Smallest singular value required of the matrix of attaining vectors.
pub const MIN_INDEPENDENCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateRule {
    /// Every unit vector of a strictly convex codomain is extreme.
    StrictlyConvexCodomain,
    /// Each image was checked to be an extreme point of the codomain ball.
    ExtremeImages,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremeCertificate {
    #[serde(serialize_with = "linalg::ser::vectors")]
    pub attainment_vectors: Vec<DVector<f64>>,
    #[serde(serialize_with = "linalg::ser::vectors")]
    pub images: Vec<DVector<f64>>,
    pub image_extreme_flags: Vec<bool>,
    pub basis_condition_number: f64,
    /// Smallest singular value of the matrix whose columns are the
    /// attaining vectors.
    pub independence_margin: f64,
    pub rule: CertificateRule,
}

impl ExtremeCertificate {
    pub(crate) fn build(op: &Operator, vectors: Vec<DVector<f64>>, tol: f64) -> Result<Self> {
        let cod = op.codomain();
        let images: Vec<DVector<f64>> = vectors.iter().map(|v| op.apply(v)).collect();
        let (rule, image_extreme_flags) = if cod.is_strictly_convex() {
            (CertificateRule::StrictlyConvexCodomain, vec![true; images.len()])
        } else {
            let flags = images
                .iter()
                .map(|img| {
                    let n = cod.norm_of(img);
                    if n == 0.0 {
                        return Ok(false);
                    }
                    cod.is_extreme_point(&(img / n), tol)
                })
                .collect::<Result<Vec<bool>>>()?;
            (CertificateRule::ExtremeImages, flags)
        };
        let mat = DMatrix::from_columns(&vectors);
        let s = linalg::singular_values(&mat);
        let smin = if s.len() < vectors.len() { 0.0 } else { *s.last().unwrap_or(&0.0) };
        let smax = s.first().copied().unwrap_or(0.0);
        Ok(ExtremeCertificate {
            attainment_vectors: vectors,
            images,
            image_extreme_flags,
            basis_condition_number: if smin > 0.0 { smax / smin } else { f64::INFINITY },
            independence_margin: smin,
            rule,
        })
    }
}

/// Greedy pick of `n` linearly independent vectors: repeatedly take the
/// candidate with the largest component outside the span chosen so far.
fn independent_subset(candidates: &[DVector<f64>], n: usize) -> Option<Vec<DVector<f64>>> {
    let mut chosen: Vec<DVector<f64>> = Vec::new();
    let mut ortho: Vec<DVector<f64>> = Vec::new();
    while chosen.len() < n {
        let mut best: Option<(f64, usize, DVector<f64>)> = None;
        for (i, c) in candidates.iter().enumerate() {
            let mut r = c.clone();
            for q in &ortho {
                r -= q * q.dot(&r);
            }
            let rel = r.norm() / c.norm();
            if best.as_ref().is_none_or(|b| rel > b.0) {
                best = Some((rel, i, r));
            }
        }
        let (rel, i, r) = best?;
        if rel < MIN_INDEPENDENCE {
            return None;
        }
        ortho.push(&r / r.norm());
        chosen.push(candidates[i].clone());
    }
    Some(chosen)
}

/// Look for `n = dim X` linearly independent vectors at which `T` attains its
/// norm and whose images are extreme points of the codomain ball. `None`
/// means no certificate was found, not that `T` is not extreme.
pub fn sufficient_extreme_check(op: &Operator, tol: f64, seed: u64) -> Result<Option<ExtremeCertificate>> {
    let norm = operator_norm(op, Method::Auto, seed)?.value;
    if (norm - 1.0).abs() > tol {
        return Err(Error::NormNotOne(norm));
    }
    let set = norm_attainment_set(op, tol, seed)?;
    let mut candidates: Vec<DVector<f64>> = Vec::new();
    for p in set.euclidean_subspace.iter().flatten().chain(&set.points) {
        let p = linalg::sign_normalize(p.clone());
        if !candidates.iter().any(|c| (c - &p).amax() < 1e-9) {
            candidates.push(p);
        }
    }
    let cod = op.codomain();
    if !cod.is_strictly_convex() {
        candidates.retain(|v| {
            let img = op.apply(v);
            let n = cod.norm_of(&img);
            n > 0.0 && cod.is_extreme_point(&(img / n), tol).unwrap_or(false)
        });
    }
    let Some(vectors) = independent_subset(&candidates, op.domain().dim()) else {
        return Ok(None);
    };
    let cert = ExtremeCertificate::build(op, vectors, tol)?;
    Ok(cert.image_extreme_flags.iter().all(|&f| f).then_some(cert))
}

/// Re-check every claim of a certificate against the operator.
pub fn verify_certificate(op: &Operator, cert: &ExtremeCertificate, tol: f64, seed: u64) -> Result<bool> {
    let (dom, cod) = (op.domain(), op.codomain());
    if cert.attainment_vectors.len() != dom.dim() {
        return Ok(false);
    }
    let norm = operator_norm(op, Method::Auto, seed)?.value;
    if (norm - 1.0).abs() > tol {
        return Ok(false);
    }
    for v in &cert.attainment_vectors {
        let nv = dom.norm(v)?;
        if (nv - 1.0).abs() > tol || cod.norm_of(&op.apply(v)) < norm - tol {
            return Ok(false);
        }
    }
    let fresh = ExtremeCertificate::build(op, cert.attainment_vectors.clone(), tol)?;
    Ok(fresh.independence_margin >= MIN_INDEPENDENCE && fresh.image_extreme_flags.iter().all(|&f| f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Space;

    #[test]
    fn identity_is_certified() {
        let op = Operator::on(Space::euclidean(2).unwrap(), DMatrix::identity(2, 2)).unwrap();
        let c = sufficient_extreme_check(&op, 1e-8, 0).unwrap().unwrap();
        assert_eq!(c.rule, CertificateRule::StrictlyConvexCodomain);
        assert!((c.independence_margin - 1.0).abs() < 1e-12);
        assert!(verify_certificate(&op, &c, 1e-8, 0).unwrap());
    }

    #[test]
    fn one_dimensional_attainment_gives_no_certificate() {
        let op = Operator::on(Space::euclidean(2).unwrap(), crate::attain::diag(&[1.0, 0.5])).unwrap();
        assert_eq!(sufficient_extreme_check(&op, 1e-8, 0).unwrap(), None);
    }

    #[test]
    fn square_flat_segment_operator_is_certified() {
        let op = Operator::on(
            Space::lp(f64::INFINITY, 2).unwrap(),
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 0.0]),
        )
        .unwrap();
        let c = sufficient_extreme_check(&op, 1e-8, 0).unwrap().unwrap();
        assert_eq!(c.rule, CertificateRule::ExtremeImages);
        let mut got: Vec<Vec<f64>> = c.attainment_vectors.iter().map(|v| v.iter().copied().collect()).collect();
        got.sort_by(|a, b| a[1].total_cmp(&b[1]));
        assert_eq!(got, vec![vec![1.0, -1.0], vec![1.0, 1.0]]);
        for img in &c.images {
            assert_eq!(img.abs(), DVector::from_vec(vec![1.0, 1.0]));
        }
    }

    #[test]
    fn norm_other_than_one_is_refused() {
        let op = Operator::on(Space::euclidean(2).unwrap(), crate::attain::diag(&[2.0, 1.0])).unwrap();
        assert_eq!(sufficient_extreme_check(&op, 1e-8, 0), Err(Error::NormNotOne(2.0)));
    }

    #[test]
    fn tampered_certificate_fails_verification() {
        let op = Operator::on(Space::euclidean(2).unwrap(), DMatrix::identity(2, 2)).unwrap();
        let mut c = sufficient_extreme_check(&op, 1e-8, 0).unwrap().unwrap();
        c.attainment_vectors[1] = c.attainment_vectors[0].clone();
        assert!(!verify_certificate(&op, &c, 1e-8, 0).unwrap());
    }
}
