use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{is_isometry, ExtremeProof, ExtremenessVerdict};
use crate::basis::{whitened_basis, BasisResult};
use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::Operator;
use crate::opnorm::{operator_norm, Method};

use super::certificate::sufficient_extreme_check;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WitnessCase {
    /// Some image norm below one is bounded away from zero: scale those
    /// directions up and down.
    #[serde(rename = "I")]
    I,
    /// `T` (nearly) kills a basis vector: send it to a free direction.
    #[serde(rename = "II")]
    II,
    /// `||T|| < 1`.
    #[serde(rename = "interior")]
    Interior,
}

/// `T = (T1 + T2) / 2` with `T1 != T2` and both of norm at most one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessPair {
    pub case: WitnessCase,
    pub epsilon: Option<f64>,
    /// Number of greedy basis vectors whose image has norm one.
    pub k: usize,
    #[serde(serialize_with = "linalg::ser::opt_vector")]
    pub w: Option<DVector<f64>>,
    #[serde(rename = "T1", serialize_with = "linalg::ser::matrix")]
    pub t1: DMatrix<f64>,
    #[serde(rename = "T2", serialize_with = "linalg::ser::matrix")]
    pub t2: DMatrix<f64>,
    pub t1_norm: f64,
    pub t2_norm: f64,
    pub basis_used: Option<BasisResult>,
}

impl WitnessPair {
    fn from_perturbation(op: &Operator, d: &DMatrix<f64>, case: WitnessCase, seed: u64) -> Result<Self> {
        let t1 = op.matrix() + d;
        let t2 = op.matrix() - d;
        let norm = |m: &DMatrix<f64>| -> Result<f64> {
            match op.with_matrix(m.clone())?.whitened() {
                Some(w) => Ok(linalg::spectral_norm(&w)),
                None => operator_norm(&op.with_matrix(m.clone())?, Method::Auto, seed).map(|e| e.value),
            }
        };
        Ok(WitnessPair {
            case,
            epsilon: None,
            k: 0,
            w: None,
            t1_norm: norm(&t1)?,
            t2_norm: norm(&t2)?,
            t1,
            t2,
            basis_used: None,
        })
    }
}

fn require_square_hilbert(op: &Operator, what: &str) -> Result<DMatrix<f64>> {
    let m = op.require_hilbert(what)?;
    if !op.is_square() {
        return Err(Error::Hypothesis(format!("{what} needs a square operator")));
    }
    Ok(m)
}

/// Split a norm-one non-isometry between inner-product spaces into two
/// distinct norm-one operators with midpoint `T`.
pub fn nonextreme_witness(op: &Operator, tol: f64, seed: u64) -> Result<WitnessPair> {
    let wb = whitened_basis(op)?;
    require_square_hilbert(op, "non-extremeness witness")?;
    let m = &wb.m;
    let sigma1 = linalg::spectral_norm(m);
    if (sigma1 - 1.0).abs() > tol {
        return Err(Error::NormNotOne(sigma1));
    }
    let basis = wb.to_result(op);
    let s = &basis.image_norms;
    let n = s.len();
    let k = s.iter().filter(|&&v| v >= 1.0 - tol).count();
    if k == n {
        return Err(Error::IsometryHasNoWitness);
    }
    let images = m * &wb.u;
    let (case, epsilon, w, d_w) = if s[k] > tol {
        let eps = (0.5 * (1.0 / s[k] - 1.0)).min(0.5);
        let mut d = DMatrix::zeros(n, n);
        for i in k..n {
            d += images.column(i) * wb.u.column(i).transpose() * eps;
        }
        (WitnessCase::I, Some(eps), None, d)
    } else {
        // unit vector orthogonal to every image except the k-th
        let others = DMatrix::from_rows(
            &(0..n)
                .filter(|&i| i != k)
                .map(|i| images.column(i).transpose())
                .collect::<Vec<_>>(),
        );
        let (sv, v) = linalg::right_singular(&others);
        let smallest = *sv.last().expect("nonempty");
        let scale = sv[0].max(1.0);
        let free: Vec<usize> = (0..n).filter(|&j| sv[j] <= smallest + 1e-12 * scale).collect();
        let block = v.select_columns(&free);
        let w = linalg::canonical_unit(&block);
        let d = &w * wb.u.column(k).transpose() * 0.5;
        (WitnessCase::II, None, Some(w), d)
    };
    let d = op.unwhiten_matrix(&d_w).expect("hilbert operator");
    let mut pair = WitnessPair::from_perturbation(op, &d, case, seed)?;
    for nv in [pair.t1_norm, pair.t2_norm] {
        if (nv - 1.0).abs() > tol + 1e-10 {
            return Err(Error::Numerical(format!("witness operator has norm {nv}")));
        }
    }
    pair.epsilon = epsilon;
    pair.k = k;
    pair.w = w.map(|w| op.codomain().inner_product().expect("hilbert").unwhiten(&w));
    pair.basis_used = Some(basis);
    Ok(pair)
}

/// Complete answer for square operators between inner-product spaces: a
/// contraction is extreme exactly when it is an isometry.
pub fn hilbert_extreme_classify(op: &Operator, tol: f64, seed: u64) -> Result<ExtremenessVerdict> {
    let m = require_square_hilbert(op, "extreme-point classification")?;
    let (sigma, u, v) = linalg::square_svd(&m);
    let sigma1 = sigma[0];
    if sigma1 > 1.0 + tol {
        return Err(Error::NotContraction(sigma1));
    }
    if sigma1 < 1.0 - tol {
        let n = sigma.len();
        let mut delta = DMatrix::zeros(n, n);
        delta[(0, 0)] = 1.0 - sigma1;
        if n >= 2 {
            delta[(n - 1, n - 1)] = sigma[n - 1] - 1.0;
        }
        let d_w = &u * delta * v.transpose();
        let d = op.unwhiten_matrix(&d_w).expect("hilbert operator");
        let pair = WitnessPair::from_perturbation(op, &d, WitnessCase::Interior, seed)?;
        return Ok(ExtremenessVerdict::NotExtreme(pair));
    }
    let iso = is_isometry(op, tol)?;
    if iso.is_isometry {
        return Ok(ExtremenessVerdict::Extreme { proof: ExtremeProof::Isometry { residual: iso.residual } });
    }
    Ok(ExtremenessVerdict::NotExtreme(nonextreme_witness(op, tol, seed)?))
}

/// Classify `T` as extreme, not extreme, or undecided. Square operators
/// between inner-product spaces get a complete answer; elsewhere a norm below
/// one gives a witness, and a norm of one is settled only by a certificate.
pub fn classify(op: &Operator, tol: f64, seed: u64) -> Result<ExtremenessVerdict> {
    if op.is_hilbert() && op.is_square() {
        return hilbert_extreme_classify(op, tol, seed);
    }
    let norm = operator_norm(op, Method::Auto, seed)?.value;
    if norm > 1.0 + tol {
        return Err(Error::NotContraction(norm));
    }
    if norm < 1.0 - tol {
        let (dom, cod) = (op.domain(), op.codomain());
        let mut x = DVector::zeros(dom.dim());
        x[0] = 1.0;
        let g = dom.subgradient(&(&x / dom.norm_of(&x)));
        let mut y = DVector::zeros(cod.dim());
        y[0] = 1.0;
        let y = &y / cod.norm_of(&y);
        // rank one, norm one: y g^T
        let d = y * g.transpose() * (1.0 - norm);
        let pair = WitnessPair::from_perturbation(op, &d, WitnessCase::Interior, seed)?;
        return Ok(ExtremenessVerdict::NotExtreme(pair));
    }
    match sufficient_extreme_check(op, tol, seed)? {
        Some(cert) => Ok(ExtremenessVerdict::Extreme { proof: ExtremeProof::Certificate(cert) }),
        None => Ok(ExtremenessVerdict::Inconclusive {
            reason: "no certificate of independent attaining vectors with extreme images".into(),
        }),
    }
}
