//! Which planes admit an extreme contraction that is not an isometry?
//!
//! Flat spheres get the explicit segment-collapsing construction, strictly
//! convex non-Euclidean planes get the randomized search, and inner-product
//! planes get a negative protocol: classify many random contractions and
//! confirm every extreme one is an isometry.

use nalgebra::DMatrix;
use serde::Serialize;

use opgeom::extreme::{self, ExtremeCertificate, ExtremenessVerdict};
use opgeom::linalg;
use opgeom::rng::{self, stream};
use opgeom::space::SpaceJson;
use opgeom::{Error, Operator, Result, Space};

/// Random contractions classified per inner-product plane.
pub const EUCLIDEAN_TRIALS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Lemma21,
    Search,
    EuclideanNegative,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub space: SpaceJson,
    pub protocol: Protocol,
    pub found_extreme_nonisometry: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operator: Option<Operator>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<ExtremeCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restarts_used: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classified: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extreme_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extreme_isometry_count: Option<usize>,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub seed: u64,
    pub budget: usize,
    pub rows: Vec<Row>,
}

impl Row {
    fn new(space: &Space, protocol: Protocol, note: impl Into<String>) -> Self {
        Row {
            space: space.clone().into(),
            protocol,
            found_extreme_nonisometry: false,
            operator: None,
            certificate: None,
            restarts_used: None,
            classified: None,
            extreme_count: None,
            extreme_isometry_count: None,
            note: note.into(),
        }
    }
}

pub fn default_spaces() -> Vec<Space> {
    vec![
        Space::lp(f64::INFINITY, 2).expect("valid"),
        Space::lp(1.0, 2).expect("valid"),
        Space::lp(4.0, 2).expect("valid"),
        Space::lp(1.5, 2).expect("valid"),
        Space::euclidean(2).expect("valid"),
    ]
}

/// Whitened matrix of norm at most one. Cycles through isometries, norm-one
/// operators, interior points and rank-deficient norm-one operators.
fn random_contraction(r: &mut rng::Rng, i: usize) -> DMatrix<f64> {
    let normalize = |m: DMatrix<f64>| {
        let s = linalg::spectral_norm(&m);
        m / s
    };
    match i % 4 {
        0 => rng::random_orthogonal(r, 2),
        1 => normalize(rng::gaussian_matrix(r, 2, 2)),
        2 => normalize(rng::gaussian_matrix(r, 2, 2)) * 0.9,
        _ => {
            let a = rng::gaussian_vector(r, 2);
            let b = rng::gaussian_vector(r, 2);
            normalize(a * b.transpose())
        }
    }
}

fn euclidean_row(space: &Space, seed: u64, tol: f64) -> Result<Row> {
    let mut r = rng::rng_for(seed, stream::EXPERIMENT);
    let probe = Operator::on(space.clone(), DMatrix::identity(2, 2))?;
    let (mut extreme_count, mut iso_count, mut bad) = (0, 0, None);
    for i in 0..EUCLIDEAN_TRIALS {
        let m = random_contraction(&mut r, i);
        let op = probe.with_matrix(probe.unwhiten_matrix(&m).expect("inner-product plane"))?;
        if let ExtremenessVerdict::Extreme { .. } = extreme::classify(&op, tol, seed)? {
            extreme_count += 1;
            if extreme::is_isometry(&op, tol)?.is_isometry {
                iso_count += 1;
            } else if bad.is_none() {
                bad = Some(op);
            }
        }
    }
    let mut row = Row::new(
        space,
        Protocol::EuclideanNegative,
        "every extreme contraction among the samples is an isometry",
    );
    row.classified = Some(EUCLIDEAN_TRIALS);
    row.extreme_count = Some(extreme_count);
    row.extreme_isometry_count = Some(iso_count);
    if let Some(op) = bad {
        row.found_extreme_nonisometry = true;
        row.operator = Some(op);
        row.note = "an extreme contraction failed the isometry check".into();
    }
    Ok(row)
}

fn space_row(space: &Space, seed: u64, budget: usize, tol: f64) -> Result<Row> {
    if space.dim() != 2 {
        return Ok(Row::new(space, Protocol::Skipped, format!("dimension {} is not a plane", space.dim())));
    }
    if space.inner_product().is_some() {
        return euclidean_row(space, seed, tol);
    }
    if !space.is_strictly_convex() {
        let c = extreme::lemma21_construct(space)?;
        let mut row = Row::new(space, Protocol::Lemma21, c.note.clone());
        row.found_extreme_nonisometry = true;
        row.operator = Some(c.operator);
        row.certificate = Some(c.certificate);
        return Ok(row);
    }
    let out = extreme::search_extreme_nonisometry(space, seed, budget)?;
    let mut row = Row::new(space, Protocol::Search, out.note);
    row.restarts_used = Some(out.restarts_used);
    if let Some(f) = out.found {
        row.found_extreme_nonisometry = true;
        row.operator = Some(f.operator);
        row.certificate = Some(f.certificate);
    }
    Ok(row)
}

/// One row per space. A failure on one space becomes that row's note rather
/// than aborting the run, except for internal numerical failures.
pub fn theorem27_experiment(spaces: &[Space], seed: u64, budget: usize, tol: f64) -> Result<Report> {
    let mut rows = Vec::with_capacity(spaces.len());
    for space in spaces {
        match space_row(space, seed, budget, tol) {
            Ok(row) => rows.push(row),
            Err(e @ Error::Numerical(_)) => return Err(e),
            Err(e) => rows.push(Row::new(space, Protocol::Skipped, e.to_string())),
        }
    }
    Ok(Report { seed, budget, rows })
}
