//! Reference computations written independently of the library code paths:
//! singular values from the symmetric eigenproblem of `A^T A`, and the
//! `l_p` norms by their textbook formulas.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng as _;

use opgeom::rng::{self, Rng};

/// Singular values, descending, as square roots of the eigenvalues of `A^T A`.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let eig = SymmetricEigen::new(a.transpose() * a);
    let mut s: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

pub fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    singular_values(a)[0]
}

/// Unit eigenvectors of `A^T A` for the eigenvalues within `rel` of the top.
pub fn top_right_singular_space(a: &DMatrix<f64>, rel: f64) -> Vec<DVector<f64>> {
    let eig = SymmetricEigen::new(a.transpose() * a);
    let top = eig.eigenvalues.max();
    (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i] >= top * (1.0 - rel))
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect()
}

pub fn lp_norm(v: &DVector<f64>, p: f64) -> f64 {
    if p.is_infinite() {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    } else {
        v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

pub fn unit(v: DVector<f64>) -> DVector<f64> {
    let n = v.norm();
    v / n
}

pub fn random_unit(r: &mut Rng, n: usize) -> DVector<f64> {
    unit(rng::gaussian_vector(r, n))
}

/// `U diag(s) V^T` with Haar orthogonal `U`, `V`.
pub fn with_singular_values(r: &mut Rng, s: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = s.len();
    let u = rng::random_orthogonal(r, n);
    let v = rng::random_orthogonal(r, n);
    let d = DMatrix::from_diagonal(&DVector::from_column_slice(s));
    (u * d * v.transpose(), v)
}

pub fn uniform(r: &mut Rng, lo: f64, hi: f64) -> f64 {
    r.random_range(lo..hi)
}

pub fn index(r: &mut Rng, lo: usize, hi_inclusive: usize) -> usize {
    r.random_range(lo..=hi_inclusive)
}
