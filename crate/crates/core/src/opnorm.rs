//! Operator norm strategies.
//!
//! Each way of computing `||T|| = max ||Tx||` over the unit sphere is a
//! [`NormStrategy`] registered by name in a [`NormRegistry`]. `auto` picks the
//! first registered strategy that supports the operator, so the default order
//! (spectral, vertex, multistart) prefers exact methods.

use std::str::FromStr;
use std::sync::OnceLock;

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::Operator;
use crate::rng::{self, stream};
use crate::space::ExtremePoints;

pub const DEFAULT_RESTARTS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    #[serde(serialize_with = "linalg::ser::vector")]
    pub argmax: DVector<f64>,
    pub method: &'static str,
    /// `false` when `value` is only a lower bound.
    pub certified: bool,
}

pub trait NormStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn supports(&self, op: &Operator) -> bool;
    fn estimate(&self, op: &Operator, seed: u64) -> Result<NormEstimate>;
}

/// Largest singular value of the whitened matrix.
pub struct Spectral;

impl NormStrategy for Spectral {
    fn name(&self) -> &'static str {
        "spectral"
    }

    fn supports(&self, op: &Operator) -> bool {
        op.is_hilbert()
    }

    fn estimate(&self, op: &Operator, _seed: u64) -> Result<NormEstimate> {
        let m = op.require_hilbert("spectral norm")?;
        let (sigma, v) = linalg::right_singular(&m);
        let top = linalg::equal_blocks(&sigma, 1e-12)[0].clone();
        let u = linalg::canonical_unit(&v.columns(top.start, top.len()).into_owned());
        let ip = op.domain().inner_product().expect("hilbert domain");
        Ok(NormEstimate {
            value: sigma[0],
            argmax: linalg::sign_normalize(ip.unwhiten(&u)),
            method: self.name(),
            certified: true,
        })
    }
}

/// Exact maximum over the finitely many extreme points of the domain ball.
pub struct VertexEnumeration;

impl NormStrategy for VertexEnumeration {
    fn name(&self) -> &'static str {
        "vertex"
    }

    fn supports(&self, op: &Operator) -> bool {
        matches!(op.domain().unit_ball_extreme_points(), Ok(ExtremePoints::Finite(_)))
    }

    fn estimate(&self, op: &Operator, _seed: u64) -> Result<NormEstimate> {
        let ExtremePoints::Finite(points) = op.domain().unit_ball_extreme_points()? else {
            return Err(Error::Hypothesis(
                "vertex enumeration needs a domain ball with finitely many extreme points".into(),
            ));
        };
        let mut best = (f64::NEG_INFINITY, points[0].clone());
        for p in points {
            let val = op.codomain().norm_of(&op.apply(&p));
            if val > best.0 {
                best = (val, p);
            }
        }
        Ok(NormEstimate {
            value: best.0,
            argmax: linalg::sign_normalize(best.1),
            method: self.name(),
            certified: true,
        })
    }
}

/// Lower bound from restarted ascent on the unit sphere.
pub struct Multistart {
    pub restarts: usize,
}

impl Default for Multistart {
    fn default() -> Self {
        Multistart { restarts: DEFAULT_RESTARTS }
    }
}

impl NormStrategy for Multistart {
    fn name(&self) -> &'static str {
        "multistart"
    }

    fn supports(&self, _op: &Operator) -> bool {
        true
    }

    fn estimate(&self, op: &Operator, seed: u64) -> Result<NormEstimate> {
        let runs = multistart_runs(op, seed, self.restarts);
        let (value, argmax) = reduce_max(&runs);
        if value <= 0.0 && !op.is_zero() {
            return Err(Error::Numerical(format!(
                "multistart ascent found no positive value after {} restarts",
                self.restarts
            )));
        }
        Ok(NormEstimate { value, argmax, method: self.name(), certified: false })
    }
}

/// Max by value; exact ties go to the lexicographically smallest argmax so
/// the result does not depend on the order runs finished in.
pub(crate) fn reduce_max(runs: &[(f64, DVector<f64>)]) -> (f64, DVector<f64>) {
    let mut best: Option<&(f64, DVector<f64>)> = None;
    for r in runs {
        best = match best {
            None => Some(r),
            Some(b) if r.0 > b.0 => Some(r),
            Some(b) if r.0 == b.0 && lex_less(&r.1, &b.1) => Some(r),
            keep => keep,
        };
    }
    let b = best.expect("at least one run");
    (b.0, b.1.clone())
}

fn lex_less(a: &DVector<f64>, b: &DVector<f64>) -> bool {
    for (x, y) in a.iter().zip(b.iter()) {
        if x != y {
            return x < y;
        }
    }
    false
}

/// `||Tx|| / ||x||`.
fn ratio(op: &Operator, x: &DVector<f64>) -> f64 {
    let nx = op.domain().norm_of(x);
    if nx == 0.0 {
        return 0.0;
    }
    op.codomain().norm_of(&op.apply(x)) / nx
}

/// Ascent of `||Tx|| / ||x||` from `start`, retracting to the unit sphere
/// after each step. Tries the normalized (sub)gradient first and the signed
/// coordinate directions as a fallback for kinks; halves the step when
/// nothing improves.
pub fn ascend(op: &Operator, start: &DVector<f64>) -> (f64, DVector<f64>) {
    let dom = op.domain();
    let n = dom.dim();
    let mut x = start / dom.norm_of(start);
    let mut fx = ratio(op, &x);
    let mut step = 0.5;
    let mut iters = 0;
    while step > 1e-13 && iters < 20_000 {
        iters += 1;
        let tx = op.apply(&x);
        let g = op.matrix().transpose() * op.codomain().subgradient(&tx) - dom.subgradient(&x) * fx;
        let gn = g.norm();
        let mut moved = false;
        let grad_dir = (gn > 0.0).then(|| g / gn);
        let axes = (0..2 * n).map(|k| {
            let mut e = DVector::zeros(n);
            e[k % n] = if k < n { 1.0 } else { -1.0 };
            e
        });
        for d in grad_dir.into_iter().chain(axes) {
            let cand = &x + d * step;
            let nc = dom.norm_of(&cand);
            if nc == 0.0 {
                continue;
            }
            let cand = cand / nc;
            let fc = ratio(op, &cand);
            if fc > fx {
                x = cand;
                fx = fc;
                moved = true;
                break;
            }
        }
        step = if moved { (step * 2.0).min(1.0) } else { step * 0.5 };
    }
    (fx, linalg::sign_normalize(x))
}

/// Endpoints of `restarts` seeded ascents. The coordinate axes are used as
/// the first starts, then normalized Gaussian directions.
pub fn multistart_runs(op: &Operator, seed: u64, restarts: usize) -> Vec<(f64, DVector<f64>)> {
    let dom = op.domain();
    let n = dom.dim();
    let mut rng = rng::rng_for(seed, stream::MULTISTART);
    let mut starts: Vec<DVector<f64>> = (0..n.min(restarts))
        .map(|i| {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            e
        })
        .collect();
    let extra = restarts.saturating_sub(starts.len());
    starts.extend(dom.sample_with(&mut rng, extra));
    starts.iter().map(|s| ascend(op, s)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Auto,
    Spectral,
    Vertex,
    Multistart,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Auto => "auto",
            Method::Spectral => "spectral",
            Method::Vertex => "vertex",
            Method::Multistart => "multistart",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Method::Auto),
            "spectral" => Ok(Method::Spectral),
            "vertex" => Ok(Method::Vertex),
            "multistart" => Ok(Method::Multistart),
            other => Err(Error::Unsupported(format!("unknown norm method {other:?}"))),
        }
    }
}

pub struct NormRegistry {
    strategies: Vec<Box<dyn NormStrategy>>,
}

impl Default for NormRegistry {
    fn default() -> Self {
        let mut r = NormRegistry { strategies: Vec::new() };
        r.register(Box::new(Spectral));
        r.register(Box::new(VertexEnumeration));
        r.register(Box::new(Multistart::default()));
        r
    }
}

impl NormRegistry {
    pub fn empty() -> Self {
        NormRegistry { strategies: Vec::new() }
    }

    /// Registering a name twice replaces the earlier strategy in place.
    pub fn register(&mut self, strategy: Box<dyn NormStrategy>) {
        match self.strategies.iter().position(|s| s.name() == strategy.name()) {
            Some(i) => self.strategies[i] = strategy,
            None => self.strategies.push(strategy),
        }
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.strategies.iter().map(|s| s.name()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&dyn NormStrategy> {
        self.strategies.iter().find(|s| s.name() == name).map(|s| s.as_ref())
    }

    pub fn select(&self, name: &str, op: &Operator) -> Result<&dyn NormStrategy> {
        if name == "auto" {
            return self
                .strategies
                .iter()
                .find(|s| s.supports(op))
                .map(|s| s.as_ref())
                .ok_or_else(|| Error::Unsupported("no registered norm strategy applies".into()));
        }
        let s = self
            .get(name)
            .ok_or_else(|| Error::Unsupported(format!("unknown norm method {name:?}")))?;
        if !s.supports(op) {
            return Err(Error::Hypothesis(format!(
                "norm method {name:?} does not apply to this operator"
            )));
        }
        Ok(s)
    }

    pub fn estimate(&self, name: &str, op: &Operator, seed: u64) -> Result<NormEstimate> {
        self.select(name, op)?.estimate(op, seed)
    }
}

pub fn default_registry() -> &'static NormRegistry {
    static REGISTRY: OnceLock<NormRegistry> = OnceLock::new();
    REGISTRY.get_or_init(NormRegistry::default)
}

pub fn operator_norm(op: &Operator, method: Method, seed: u64) -> Result<NormEstimate> {
    default_registry().estimate(method.name(), op, seed)
}
