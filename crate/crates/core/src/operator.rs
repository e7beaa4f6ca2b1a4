use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::space::{Space, SpaceJson};

/// A real matrix acting from `domain` to `codomain`
/// (`codomain.dim() x domain.dim()`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorJson", into = "OperatorJson")]
pub struct Operator {
    matrix: DMatrix<f64>,
    domain: Space,
    codomain: Space,
}

impl Operator {
    pub fn new(matrix: DMatrix<f64>, domain: Space, codomain: Space) -> Result<Self> {
        if matrix.ncols() != domain.dim() {
            return Err(Error::DimensionMismatch { expected: domain.dim(), found: matrix.ncols() });
        }
        if matrix.nrows() != codomain.dim() {
            return Err(Error::DimensionMismatch { expected: codomain.dim(), found: matrix.nrows() });
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidOperator("matrix entries must be finite".into()));
        }
        Ok(Operator { matrix, domain, codomain })
    }

    /// Endomorphism of `space`.
    pub fn on(space: Space, matrix: DMatrix<f64>) -> Result<Self> {
        Self::new(matrix, space.clone(), space)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn domain(&self) -> &Space {
        &self.domain
    }

    pub fn codomain(&self) -> &Space {
        &self.codomain
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.matrix * x
    }

    pub fn with_matrix(&self, matrix: DMatrix<f64>) -> Result<Self> {
        Self::new(matrix, self.domain.clone(), self.codomain.clone())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Operator { matrix: &self.matrix * c, ..self.clone() }
    }

    pub fn is_square(&self) -> bool {
        self.domain.dim() == self.codomain.dim()
    }

    /// Both spaces carry an inner product.
    pub fn is_hilbert(&self) -> bool {
        self.domain.is_euclidean() && self.codomain.is_euclidean()
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(|&x| x == 0.0)
    }

    /// Matrix in orthonormal coordinates of both spaces:
    /// `M = L_Y^T T L_X^{-T}`.
    pub fn whitened(&self) -> Option<DMatrix<f64>> {
        let dx = self.domain.inner_product()?;
        let dy = self.codomain.inner_product()?;
        Some(dy.l_t() * &self.matrix * dx.l_t_inv())
    }

    /// Inverse of [`whitened`](Self::whitened) for a matrix of the same shape.
    pub fn unwhiten_matrix(&self, m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
        let dx = self.domain.inner_product()?;
        let dy = self.codomain.inner_product()?;
        Some(dy.l_t_inv() * m * dx.l_t())
    }

    pub(crate) fn require_hilbert(&self, what: &str) -> Result<DMatrix<f64>> {
        self.whitened().ok_or_else(|| {
            Error::Hypothesis(format!("{what} needs inner-product domain and codomain"))
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorJson {
    pub matrix: Vec<Vec<f64>>,
    pub domain: SpaceJson,
    pub codomain: SpaceJson,
}

impl TryFrom<OperatorJson> for Operator {
    type Error = Error;

    fn try_from(j: OperatorJson) -> Result<Self> {
        let matrix = linalg::rows_to_matrix(&j.matrix)?;
        Operator::new(matrix, Space::try_from(j.domain)?, Space::try_from(j.codomain)?)
    }
}

impl From<Operator> for OperatorJson {
    fn from(op: Operator) -> Self {
        OperatorJson {
            matrix: linalg::matrix_to_rows(&op.matrix),
            domain: op.domain.into(),
            codomain: op.codomain.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_is_checked() {
        let e2 = Space::euclidean(2).unwrap();
        let e3 = Space::euclidean(3).unwrap();
        assert!(Operator::new(DMatrix::zeros(3, 2), e2.clone(), e3.clone()).is_ok());
        assert_eq!(
            Operator::new(DMatrix::zeros(2, 3), e2, e3).unwrap_err(),
            Error::DimensionMismatch { expected: 2, found: 3 }
        );
    }

    #[test]
    fn ragged_json_matrix_is_a_dimension_mismatch() {
        let j = r#"{"matrix":[[1,0],[1]],"domain":{"kind":"euclidean"},"codomain":{"kind":"euclidean"}}"#;
        let err = serde_json::from_str::<Operator>(j).unwrap_err();
        assert!(err.to_string().contains("dimension mismatch"));
    }

    #[test]
    fn whitening_round_trips() {
        let g = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]);
        let s = Space::euclidean_with_gram(g).unwrap();
        let t = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, -0.5, 0.7]);
        let op = Operator::on(s, t.clone()).unwrap();
        let m = op.whitened().unwrap();
        assert!((op.unwhiten_matrix(&m).unwrap() - t).amax() < 1e-14);
    }
}
