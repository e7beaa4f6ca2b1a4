//! Birkhoff-James orthogonality: `x` is orthogonal to `y` when
//! `||x + lambda y|| >= ||x||` for every real `lambda`.
//!
//! The function `lambda -> ||x + lambda y||` is convex for every norm, so a
//! golden-section search over a bracket whose ends are no better than
//! `lambda = 0` finds the global minimum value. Inner-product spaces also get
//! the exact test `<x, y> = 0`.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::Space;

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const MAX_GOLDEN_ITERS: usize = 200;
const MAX_BRACKET_DOUBLINGS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaMin {
    pub lambda: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BjVerdict {
    pub orthogonal: bool,
    pub minimizer_lambda: f64,
    pub min_value: f64,
    /// `min_value - ||x||`; never positive.
    pub margin: f64,
    /// Answer of the inner-product test, when the space has one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<bool>,
}

/// Golden-section minimization of a convex function on `[lo, hi]`.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> LambdaMin {
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..MAX_GOLDEN_ITERS {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-12 * (1.0 + mid.abs()) {
            break;
        }
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    let mid = 0.5 * (lo + hi);
    let fm = f(mid);
    [(c, fc), (d, fd), (mid, fm)]
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(lambda, value)| LambdaMin { lambda, value })
        .expect("three candidates")
}

/// Global minimizer of `lambda -> ||x + lambda y||`.
pub fn min_over_lambda(space: &Space, x: &DVector<f64>, y: &DVector<f64>) -> Result<LambdaMin> {
    space.check_dim(x)?;
    space.check_dim(y)?;
    let ny = space.norm_of(y);
    if ny == 0.0 {
        return Err(Error::ZeroVector("y"));
    }
    let nx = space.norm_of(x);
    let phi = |l: f64| space.norm_of(&(x + y * l));
    let phi0 = nx;
    let mut half = nx / ny + 1.0;
    let mut doublings = 0;
    while (phi(half) < phi0 || phi(-half) < phi0) && doublings < MAX_BRACKET_DOUBLINGS {
        half *= 2.0;
        doublings += 1;
    }
    let best = golden_section_min(phi, -half, half);
    if best.value <= phi0 {
        Ok(best)
    } else {
        Ok(LambdaMin { lambda: 0.0, value: phi0 })
    }
}

/// Exact inner-product test `|<x, y>| <= tol ||x|| ||y||`.
pub fn bj_orthogonal_exact_hilbert(
    space: &Space,
    x: &DVector<f64>,
    y: &DVector<f64>,
    tol: f64,
) -> Result<bool> {
    let ip = space
        .inner_product()
        .ok_or_else(|| Error::Hypothesis("exact orthogonality test needs an inner-product space".into()))?;
    space.check_dim(x)?;
    space.check_dim(y)?;
    let (wx, wy) = (ip.whiten(x), ip.whiten(y));
    Ok(wx.dot(&wy).abs() <= tol * wx.norm() * wy.norm())
}

/// Decide `x ⊥_B y`. The verdict compares the minimum with `||x||` at a
/// tolerance relative to `||x||`; inner-product spaces answer with the exact
/// test and still report the numerical minimum.
pub fn bj_orthogonal(space: &Space, x: &DVector<f64>, y: &DVector<f64>, tol: f64) -> Result<BjVerdict> {
    space.check_dim(x)?;
    space.check_dim(y)?;
    let nx = space.norm_of(x);
    if nx == 0.0 {
        return Err(Error::ZeroVector("x"));
    }
    let m = min_over_lambda(space, x, y)?;
    let margin = m.value - nx;
    let numerical = margin >= -tol * nx;
    let exact = match space.inner_product() {
        Some(_) => Some(bj_orthogonal_exact_hilbert(space, x, y, tol)?),
        None => None,
    };
    Ok(BjVerdict {
        orthogonal: exact.unwrap_or(numerical),
        minimizer_lambda: m.lambda,
        min_value: m.value,
        margin,
        exact,
    })
}

/// Numerical verdict only, ignoring any inner product.
pub fn bj_orthogonal_numerical(space: &Space, x: &DVector<f64>, y: &DVector<f64>, tol: f64) -> Result<bool> {
    let v = bj_orthogonal(space, x, y, tol)?;
    Ok(v.margin >= -tol * space.norm_of(x))
}
