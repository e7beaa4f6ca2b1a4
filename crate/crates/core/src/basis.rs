//! Greedy deflation: pick `x_1` maximizing `||Tx||` on the unit sphere, then
//! `x_{i+1}` maximizing it on the unit sphere of the orthogonal complement of
//! `x_1..x_i`. The resulting orthonormal basis has pairwise orthogonal images.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::Operator;

/// Singular values closer than this (relative to the largest) count as tied
/// when choosing the deterministic maximizer.
const TIE_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisResult {
    #[serde(serialize_with = "linalg::ser::vectors")]
    pub vectors: Vec<DVector<f64>>,
    pub image_norms: Vec<f64>,
    #[serde(serialize_with = "linalg::ser::matrix")]
    pub image_gram: DMatrix<f64>,
}

/// Basis in whitened coordinates plus the whitened matrix it came from.
pub(crate) struct WhitenedBasis {
    pub m: DMatrix<f64>,
    /// Columns are the orthonormal basis vectors `u_1..u_n`.
    pub u: DMatrix<f64>,
}

pub(crate) fn deflate(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.ncols();
    let mut u = DMatrix::zeros(n, n);
    // columns of q: orthonormal basis of the current complement
    let mut q = DMatrix::<f64>::identity(n, n);
    for i in 0..n {
        let b = m * &q;
        let (sigma, v) = linalg::right_singular(&b);
        let top = linalg::equal_blocks(&sigma, TIE_REL_TOL)[0].clone();
        let block = &q * v.columns(top.start, top.len());
        let x = linalg::canonical_unit(&block);
        u.set_column(i, &x);
        if i + 1 < n {
            let z = q.transpose() * &x;
            let z = &z / z.norm();
            q = &q * linalg::orthonormal_complement(&z);
        }
    }
    u
}

pub(crate) fn whitened_basis(op: &Operator) -> Result<WhitenedBasis> {
    let m = op.require_hilbert("greedy orthogonal basis")?;
    let u = deflate(&m);
    // Ties and kernel directions can come out of order by a rounding error;
    // a stable sort makes the norms exactly non-increasing without touching
    // orthogonality.
    let norms: Vec<f64> = (&m * &u).column_iter().map(|c| c.norm()).collect();
    let mut order: Vec<usize> = (0..u.ncols()).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let u = u.select_columns(&order);
    Ok(WhitenedBasis { m, u })
}

impl WhitenedBasis {
    pub(crate) fn to_result(&self, op: &Operator) -> BasisResult {
        let ip = op.domain().inner_product().expect("hilbert domain");
        let images = &self.m * &self.u;
        BasisResult {
            vectors: self.u.column_iter().map(|c| ip.unwhiten(&c.into_owned())).collect(),
            image_norms: images.column_iter().map(|c| c.norm()).collect(),
            image_gram: images.transpose() * &images,
        }
    }
}

pub fn greedy_orthogonal_basis(op: &Operator) -> Result<BasisResult> {
    Ok(whitened_basis(op)?.to_result(op))
}

/// Gram matrix of the images `<Tx_i, Tx_j>` in the codomain inner product.
fn image_gram(op: &Operator, vectors: &[DVector<f64>]) -> Result<DMatrix<f64>> {
    let cod = op
        .codomain()
        .inner_product()
        .ok_or_else(|| Error::Hypothesis("image Gram matrix needs an inner-product codomain".into()))?;
    let images: Vec<DVector<f64>> = vectors.iter().map(|x| op.apply(x)).collect();
    let k = images.len();
    Ok(DMatrix::from_fn(k, k, |i, j| cod.dot(&images[i], &images[j])))
}

/// All off-diagonal `|<Tx_i, Tx_j>|` are at most
/// `tol * (max_i ||Tx_i||^2 + eps)`. The Gram matrix is recomputed from the
/// operator rather than read from `result`.
pub fn verify_orthogonality_on_basis(op: &Operator, result: &BasisResult, tol: f64) -> Result<bool> {
    let n = op.domain().dim();
    if result.vectors.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: result.vectors.len() });
    }
    for x in &result.vectors {
        op.domain().check_dim(x)?;
    }
    let g = image_gram(op, &result.vectors)?;
    let scale = (0..n).map(|i| g[(i, i)]).fold(0.0, f64::max) + f64::EPSILON;
    Ok((0..n).all(|i| (0..n).all(|j| i == j || g[(i, j)].abs() <= tol * scale)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SvdComparison {
    pub singular_values: Vec<f64>,
    pub max_value_gap: f64,
    /// Largest principal angle between the greedy vectors and the right
    /// singular vectors, one entry per group of equal singular values.
    pub subspace_angles: Vec<f64>,
    pub rank: usize,
    /// Whether `T` maps the basis onto a basis of the codomain.
    pub images_form_basis: bool,
}

pub fn compare_with_svd(op: &Operator) -> Result<SvdComparison> {
    let wb = whitened_basis(op)?;
    let result = wb.to_result(op);
    let (sigma, v) = linalg::right_singular(&wb.m);
    let max_value_gap = result
        .image_norms
        .iter()
        .zip(&sigma)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let scale = sigma.first().copied().unwrap_or(0.0);
    let rank = sigma.iter().filter(|&&s| s > 1e-10 * scale.max(f64::MIN_POSITIVE)).count();
    let subspace_angles = linalg::equal_blocks(&sigma, 1e-8)
        .into_iter()
        .map(|blk| {
            let vb = v.columns(blk.start, blk.len());
            let ub = wb.u.columns(blk.start, blk.len());
            let cos_min = linalg::singular_values(&(vb.transpose() * ub))
                .last()
                .copied()
                .unwrap_or(1.0)
                .min(1.0);
            cos_min.acos()
        })
        .collect();
    Ok(SvdComparison {
        singular_values: sigma,
        max_value_gap,
        subspace_angles,
        rank,
        images_form_basis: op.is_square() && rank == op.domain().dim(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attain::diag;
    use crate::space::Space;

    fn euclid(m: DMatrix<f64>) -> Operator {
        let (r, c) = m.shape();
        Operator::new(m, Space::euclidean(c).unwrap(), Space::euclidean(r).unwrap()).unwrap()
    }

    #[test]
    fn diagonal_basis_is_canonical() {
        let r = greedy_orthogonal_basis(&euclid(diag(&[3.0, 2.0, 1.0]))).unwrap();
        assert_eq!(r.image_norms, vec![3.0, 2.0, 1.0]);
        for (i, x) in r.vectors.iter().enumerate() {
            assert!((x[i].abs() - 1.0).abs() < 1e-15);
        }
        assert!((r.image_gram.clone() - diag(&[9.0, 4.0, 1.0])).amax() < 1e-13);
    }

    #[test]
    fn rotation_gives_unit_image_norms() {
        let t = 0.7f64;
        let r = greedy_orthogonal_basis(&euclid(DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()])))
            .unwrap();
        for s in r.image_norms {
            assert!((s - 1.0).abs() < 1e-14);
        }
        assert!(r.vectors[0].dot(&r.vectors[1]).abs() < 1e-14);
    }

    #[test]
    fn identity_yields_standard_basis() {
        let r = greedy_orthogonal_basis(&euclid(DMatrix::identity(3, 3))).unwrap();
        for (i, x) in r.vectors.iter().enumerate() {
            let mut e = DVector::zeros(3);
            e[i] = 1.0;
            assert!((x - e).amax() < 1e-14);
        }
    }

    #[test]
    fn verification_examples() {
        let op = euclid(diag(&[3.0, 2.0, 1.0]));
        let r = greedy_orthogonal_basis(&op).unwrap();
        assert!(verify_orthogonality_on_basis(&op, &r, 1e-8).unwrap());
        let s = 0.5f64.sqrt();
        let skew = BasisResult {
            vectors: vec![
                DVector::from_vec(vec![s, s, 0.0]),
                DVector::from_vec(vec![s, -s, 0.0]),
                DVector::from_vec(vec![0.0, 0.0, 1.0]),
            ],
            image_norms: vec![],
            image_gram: DMatrix::zeros(0, 0),
        };
        assert!(!verify_orthogonality_on_basis(&op, &skew, 1e-8).unwrap());
        let g = image_gram(&op, &skew.vectors).unwrap();
        assert!((g[(0, 1)] - 2.5).abs() < 1e-13);
    }

    #[test]
    fn rank_one_with_kernel_basis_verifies() {
        let op = euclid(DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
        let s = 0.5f64.sqrt();
        let basis = BasisResult {
            vectors: vec![
                DVector::from_vec(vec![s, s, 0.0]),
                DVector::from_vec(vec![s, -s, 0.0]),
                DVector::from_vec(vec![0.0, 0.0, 1.0]),
            ],
            image_norms: vec![],
            image_gram: DMatrix::zeros(0, 0),
        };
        assert!(verify_orthogonality_on_basis(&op, &basis, 1e-8).unwrap());
    }

    #[test]
    fn svd_comparison_flags_rank_deficiency() {
        let op = euclid(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
        let c = compare_with_svd(&op).unwrap();
        assert_eq!(c.singular_values, vec![1.0, 0.0]);
        assert_eq!(c.rank, 1);
        assert!(!c.images_form_basis);
        let r = greedy_orthogonal_basis(&op).unwrap();
        assert!(op.apply(&r.vectors[1]).norm() < 1e-15);
        let d = compare_with_svd(&euclid(diag(&[3.0, 2.0, 1.0]))).unwrap();
        assert_eq!(d.max_value_gap, 0.0);
        assert!(d.subspace_angles.iter().all(|&a| a < 1e-7));
        assert!(d.images_form_basis);
    }

    #[test]
    fn rectangular_operators_loop_over_domain() {
        let op = euclid(DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 0.0, 0.0, 1.0, 1.0]));
        let r = greedy_orthogonal_basis(&op).unwrap();
        assert_eq!(r.vectors.len(), 3);
        assert!(r.image_norms[2] < 1e-12);
        assert!(verify_orthogonality_on_basis(&op, &r, 1e-8).unwrap());
    }

    #[test]
    fn gram_weighted_basis_is_orthonormal_in_that_inner_product() {
        let g = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let s = Space::euclidean_with_gram(g.clone()).unwrap();
        let op = Operator::on(s, DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0])).unwrap();
        let r = greedy_orthogonal_basis(&op).unwrap();
        let (a, b) = (&r.vectors[0], &r.vectors[1]);
        assert!((a.dot(&(&g * a)) - 1.0).abs() < 1e-12);
        assert!(a.dot(&(&g * b)).abs() < 1e-12);
        assert!(verify_orthogonality_on_basis(&op, &r, 1e-8).unwrap());
    }

    #[test]
    fn non_euclidean_is_rejected() {
        let op = Operator::on(Space::lp(1.0, 2).unwrap(), DMatrix::identity(2, 2)).unwrap();
        assert!(matches!(greedy_orthogonal_basis(&op), Err(Error::Hypothesis(_))));
    }
}
