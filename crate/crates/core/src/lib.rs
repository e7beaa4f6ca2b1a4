//! Geometry of operators between finite-dimensional real normed spaces:
//! Birkhoff-James orthogonality, operator norms and where they are attained,
//! orthogonality-preserving bases, and extreme contractions.

pub mod attain;
pub mod basis;
pub mod bjorth;
pub mod error;
pub mod extreme;
pub mod linalg;
pub mod operator;
pub mod opnorm;
pub mod rng;
pub mod space;

pub use attain::{check_theorem21, norm_attainment_set, preserves_orthogonality_at, AttainmentSet, Thm21Report};
pub use basis::{compare_with_svd, greedy_orthogonal_basis, verify_orthogonality_on_basis, BasisResult};
pub use bjorth::{bj_orthogonal, bj_orthogonal_exact_hilbert, bj_orthogonal_numerical, min_over_lambda, BjVerdict};
pub use error::{Error, Result};
pub use extreme::{
    classify, is_isometry, lemma21_construct, nonextreme_witness, search_extreme_nonisometry,
    sufficient_extreme_check, verify_certificate, ExtremenessVerdict,
};
pub use operator::Operator;
pub use opnorm::{operator_norm, Method, NormEstimate, NormRegistry, NormStrategy};
pub use space::{Exponent, Space, SpaceKind};
