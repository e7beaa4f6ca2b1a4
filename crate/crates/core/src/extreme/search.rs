//! Randomized search for an extreme contraction that is not an isometry on a
//! strictly convex, non-Euclidean plane.
//!
//! On such a plane every unit vector is extreme, so a norm-one operator that
//! attains its norm at two independent directions is extreme. The search
//! takes a random `T0`, finds the direction `theta1` where
//! `f(theta) = ||T d(theta)|| / ||d(theta)||` peaks, and stretches `T0` along
//! the Euclidean perpendicular `u2` until a second peak, away from `theta1`,
//! reaches the same height.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::certificate::{ExtremeCertificate, CertificateRule};
use super::is_isometry;
use crate::bjorth::golden_section_min;
use crate::error::{Error, Result};
use crate::operator::Operator;
use crate::opnorm::{operator_norm, Method};
use crate::rng::{self, stream};
use crate::space::Space;

const GRID: usize = 1440;
const PEAK_TOL: f64 = 1e-9;
const MIN_SEPARATION: f64 = 1e-3;
const MAX_STRETCH_DOUBLINGS: usize = 40;
const BISECTION_STEPS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoundExtreme {
    pub operator: Operator,
    pub certificate: ExtremeCertificate,
    pub multistart_norm: f64,
    /// Zero-based index of the successful restart.
    pub restart: usize,
    /// Sampled `max | ||Tx|| - 1 |` over the unit sphere.
    pub isometry_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub found: Option<FoundExtreme>,
    pub restarts_used: usize,
    pub budget: usize,
    pub note: String,
}

fn direction(theta: f64) -> DVector<f64> {
    DVector::from_vec(vec![theta.cos(), theta.sin()])
}

struct Profile<'a> {
    space: &'a Space,
    m: DMatrix<f64>,
}

impl Profile<'_> {
    fn at(&self, theta: f64) -> f64 {
        let d = direction(theta);
        self.space.norm_of(&(&self.m * &d)) / self.space.norm_of(&d)
    }

    /// Maximum over `[lo, hi]`: grid scan, then golden refinement around
    /// the best grid point.
    fn max_on(&self, lo: f64, hi: f64) -> (f64, f64) {
        let steps = ((hi - lo) / PI * GRID as f64).ceil().max(2.0) as usize;
        let h = (hi - lo) / steps as f64;
        let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
        for i in 0..=steps {
            let v = self.at(lo + h * i as f64);
            if v > best {
                best = v;
                best_i = i;
            }
        }
        let a = (lo + h * (best_i as f64 - 1.0)).max(lo);
        let b = (lo + h * (best_i as f64 + 1.0)).min(hi);
        let r = golden_section_min(|t| -self.at(t), a, b);
        if -r.value > best {
            (r.lambda, -r.value)
        } else {
            (lo + h * best_i as f64, best)
        }
    }

    /// Refined local maxima of the `pi`-periodic profile.
    fn peaks(&self) -> Vec<(f64, f64)> {
        let h = PI / GRID as f64;
        let vals: Vec<f64> = (0..GRID).map(|i| self.at(h * i as f64)).collect();
        (0..GRID)
            .filter(|&i| {
                let prev = vals[(i + GRID - 1) % GRID];
                let next = vals[(i + 1) % GRID];
                vals[i] >= prev && vals[i] > next
            })
            .map(|i| {
                let c = h * i as f64;
                let r = golden_section_min(|t| -self.at(t), c - h, c + h);
                if -r.value > vals[i] {
                    (r.lambda, -r.value)
                } else {
                    (c, vals[i])
                }
            })
            .collect()
    }
}

/// Two peaks of equal height, or `None` when the stretch never produces one.
fn balance(space: &Space, t0: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let base = Profile { space, m: t0.clone() };
    let (theta1, _) = base.max_on(0.0, PI);
    let u2 = direction(theta1 + FRAC_PI_2);
    let stretched = |t: f64| t0 * (DMatrix::identity(2, 2) + &u2 * u2.transpose() * t);
    let gap = |t: f64| {
        let p = Profile { space, m: stretched(t) };
        let near = p.max_on(theta1 - FRAC_PI_4, theta1 + FRAC_PI_4).1;
        let far = p.max_on(theta1 + FRAC_PI_4, theta1 + 3.0 * FRAC_PI_4).1;
        far - near
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut doublings = 0;
    while gap(hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_STRETCH_DOUBLINGS {
            return None;
        }
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g = gap(mid);
        if g == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if g < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(stretched(0.5 * (lo + hi)))
}

/// Normalize to norm one and check the two-peak certificate.
fn validate(space: &Space, m: DMatrix<f64>, seed: u64, restart: usize) -> Result<Option<FoundExtreme>> {
    let raw = Profile { space, m };
    let top = raw.peaks().iter().map(|p| p.1).fold(0.0, f64::max);
    if top <= 0.0 {
        return Ok(None);
    }
    let prof = Profile { space, m: raw.m / top };
    let high: Vec<f64> = prof
        .peaks()
        .into_iter()
        .filter(|p| p.1 >= 1.0 - PEAK_TOL)
        .map(|p| p.0)
        .collect();
    let mut pair = None;
    'outer: for (i, &a) in high.iter().enumerate() {
        for &b in &high[i + 1..] {
            if (a - b).sin().abs() >= MIN_SEPARATION {
                pair = Some((a, b));
                break 'outer;
            }
        }
    }
    let Some((a, b)) = pair else {
        return Ok(None);
    };
    let op = Operator::on(space.clone(), prof.m)?;
    let unit = |t: f64| {
        let d = direction(t);
        let n = space.norm_of(&d);
        d / n
    };
    let certificate = ExtremeCertificate::build(&op, vec![unit(a), unit(b)], PEAK_TOL)?;
    debug_assert_eq!(certificate.rule, CertificateRule::StrictlyConvexCodomain);
    if certificate.independence_margin < MIN_SEPARATION {
        return Ok(None);
    }
    let multistart_norm = operator_norm(&op, Method::Multistart, seed)?.value;
    if (multistart_norm - 1.0).abs() > 1e-6 {
        return Ok(None);
    }
    let iso = is_isometry(&op, 1e-6)?;
    if iso.is_isometry {
        return Ok(None);
    }
    Ok(Some(FoundExtreme {
        operator: op,
        certificate,
        multistart_norm,
        restart,
        isometry_residual: iso.residual,
    }))
}

/// Search up to `budget` random starting operators.
pub fn search_extreme_nonisometry(space: &Space, seed: u64, budget: usize) -> Result<SearchOutcome> {
    if space.dim() != 2 {
        return Err(Error::Hypothesis(format!("the search needs a plane, got dimension {}", space.dim())));
    }
    if space.inner_product().is_some() {
        return Err(Error::Refused(
            "inner-product planes have no extreme contraction that is not an isometry".into(),
        ));
    }
    if !space.is_strictly_convex() {
        return Err(Error::Hypothesis(
            "the search is for strictly convex planes; use the flat-segment construction".into(),
        ));
    }
    let mut rng = rng::rng_for(seed, stream::SEARCH);
    for restart in 0..budget {
        let t0 = rng::gaussian_matrix(&mut rng, 2, 2);
        if t0.determinant().abs() < 1e-6 {
            continue;
        }
        let Some(m) = balance(space, &t0) else {
            continue;
        };
        if let Some(found) = validate(space, m, seed, restart)? {
            return Ok(SearchOutcome {
                found: Some(found),
                restarts_used: restart + 1,
                budget,
                note: "norm attained at two independent directions of a strictly convex plane".into(),
            });
        }
    }
    Ok(SearchOutcome {
        found: None,
        restarts_used: budget,
        budget,
        note: "budget exhausted; this is not evidence that no such operator exists".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extreme::verify_certificate;

    #[test]
    fn finds_one_on_l4_and_l1_5() {
        for p in [4.0, 1.5] {
            let s = Space::lp(p, 2).unwrap();
            let out = search_extreme_nonisometry(&s, 0, 100).unwrap();
            let f = out.found.expect("found");
            assert!(f.restart < 5);
            assert!((f.multistart_norm - 1.0).abs() <= 1e-6);
            assert!(f.isometry_residual > 1e-6);
            assert!(verify_certificate(&f.operator, &f.certificate, 1e-8, 0).unwrap());
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let s = Space::lp(3.0, 2).unwrap();
        let a = search_extreme_nonisometry(&s, 7, 20).unwrap();
        let b = search_extreme_nonisometry(&s, 7, 20).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn refusals() {
        assert!(matches!(search_extreme_nonisometry(&Space::euclidean(2).unwrap(), 0, 10), Err(Error::Refused(_))));
        assert!(matches!(search_extreme_nonisometry(&Space::lp(2.0, 2).unwrap(), 0, 10), Err(Error::Refused(_))));
        assert!(matches!(search_extreme_nonisometry(&Space::lp(1.0, 2).unwrap(), 0, 10), Err(Error::Hypothesis(_))));
        assert!(matches!(search_extreme_nonisometry(&Space::lp(4.0, 3).unwrap(), 0, 10), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn zero_budget_finds_nothing() {
        let out = search_extreme_nonisometry(&Space::lp(4.0, 2).unwrap(), 0, 0).unwrap();
        assert!(out.found.is_none());
        assert_eq!(out.restarts_used, 0);
    }
}
