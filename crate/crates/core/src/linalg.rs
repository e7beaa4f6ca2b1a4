//! Dense helpers on top of nalgebra: sorted SVDs, orthonormal complements
//! and the deterministic choice of a unit vector inside a subspace.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Singular values in descending order together with a full set of right
/// singular vectors (columns of an `n x n` matrix, `n = m.ncols()`).
/// Short-and-wide inputs are padded with zero rows so the kernel directions
/// are returned as well.
pub fn right_singular(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.ncols();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let padded = if m.nrows() < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma = order.iter().map(|&i| svd.singular_values[i]).collect();
    let v = DMatrix::from_fn(n, n, |r, c| v_t[(order[c], r)]);
    (sigma, v)
}

/// Full SVD of a square matrix, sorted descending: `m = u * diag(s) * v^T`.
pub fn square_svd(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>, DMatrix<f64>) {
    let n = m.ncols();
    debug_assert_eq!(m.nrows(), n);
    let svd = m.clone().svd(true, true);
    let u_raw = svd.u.expect("requested left singular vectors");
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u = DMatrix::from_fn(n, n, |r, c| u_raw[(r, order[c])]);
    let v = DMatrix::from_fn(n, n, |r, c| v_t[(order[c], r)]);
    (sigma, u, v)
}

pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn min_singular_value(m: &DMatrix<f64>) -> f64 {
    let s = singular_values(m);
    if s.len() < m.ncols() {
        return 0.0;
    }
    s.last().copied().unwrap_or(0.0)
}

/// Orthonormal basis (as columns) of the Euclidean orthogonal complement of
/// the unit vector `u`, taken from a Householder reflector.
pub fn orthonormal_complement(u: &DVector<f64>) -> DMatrix<f64> {
    let n = u.len();
    if n <= 1 {
        return DMatrix::zeros(n, 0);
    }
    let s = if u[0] >= 0.0 { 1.0 } else { -1.0 };
    let mut v = u.clone();
    v[0] += s;
    let vv = v.dot(&v);
    let h = DMatrix::identity(n, n) - (&v * v.transpose()) * (2.0 / vv);
    h.columns(1, n - 1).into_owned()
}

/// Flip `v` so its first non-negligible coordinate is positive.
pub fn sign_normalize(mut v: DVector<f64>) -> DVector<f64> {
    let scale = v.amax();
    if let Some(x) = v.iter().find(|x| x.abs() > 1e-12 * scale) {
        if *x < 0.0 {
            v.neg_mut();
        }
    }
    v
}

/// Deterministic unit vector inside the span of the orthonormal columns of
/// `basis`: the vector maximizing coordinate `j`, where `j` is the first
/// coordinate the subspace reaches. Its coordinate `j` is positive.
pub fn canonical_unit(basis: &DMatrix<f64>) -> DVector<f64> {
    debug_assert!(basis.ncols() >= 1);
    if basis.ncols() == 1 {
        return sign_normalize(basis.column(0).into_owned());
    }
    for j in 0..basis.nrows() {
        let row = basis.row(j).transpose();
        if row.norm() > 1e-8 {
            let v = basis * row;
            return v.normalize();
        }
    }
    sign_normalize(basis.column(0).into_owned())
}

/// Split a descending list of singular values into runs of (relatively)
/// equal values. Returns half-open index ranges.
pub fn equal_blocks(sigma: &[f64], rel_tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut blocks = Vec::new();
    let scale = sigma.first().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    let mut start = 0;
    for i in 1..=sigma.len() {
        if i == sigma.len() || (sigma[start] - sigma[i]).abs() > rel_tol * scale {
            blocks.push(start..i);
            start = i;
        }
    }
    blocks
}

pub fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let nrows = rows.len();
    let ncols = rows.first().map(Vec::len).unwrap_or(0);
    for r in rows {
        if r.len() != ncols {
            return Err(Error::DimensionMismatch { expected: ncols, found: r.len() });
        }
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidOperator("matrix entries must be finite".into()));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// `serialize_with` adapters so domain types can keep nalgebra values while
/// emitting plain JSON arrays.
pub mod ser {
    use nalgebra::{DMatrix, DVector};
    use serde::ser::SerializeSeq;
    use serde::Serializer;

    pub fn matrix<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq((0..m.nrows()).map(|i| m.row(i).iter().copied().collect::<Vec<_>>()))
    }

    pub fn vector<S: Serializer>(v: &DVector<f64>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter())
    }

    pub fn vectors<S: Serializer>(vs: &[DVector<f64>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(vs.len()))?;
        for v in vs {
            seq.serialize_element(v.as_slice())?;
        }
        seq.end()
    }

    pub fn opt_vector<S: Serializer>(v: &Option<DVector<f64>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => vector(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn opt_vectors<S: Serializer>(
        v: &Option<Vec<DVector<f64>>>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => vectors(v, s),
            None => s.serialize_none(),
        }
    }
}
