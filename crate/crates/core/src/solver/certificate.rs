//! Sufficient conditions for a solution, checked by finding a ball
//! `B(0, R)` in C^1 that the operator maps into itself.
//!
//! Two modes are supported:
//!
//! * `PaperLiteral` reproduces the published arithmetic: `G2 = |alpha| L^2`,
//!   the ball inequality `G2 (R^2 + 2aR + a) + |b| <= R`, and the closed-form
//!   conditions on `G2` and `|b|` that make its discriminant positive.
//! * `CorrectedRigorous` uses the exact kernel constants, bounds
//!   `(z' + a)^2 exp(-z/H)` on the ball by `(R + a)^2 exp(R/H)` and measures
//!   `b` in the C^1 norm. The ball inequality is then solved numerically.

use serde::Serialize;

use crate::error::Result;
use crate::green::{GreenConstants, Interval};
use crate::model::{chord_shift, ScenarioConfig};
use crate::operator::{build_coefficients_on, Grid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateMode {
    PaperLiteral,
    CorrectedRigorous,
}

/// The closed-form part of the certificate, as a function of `a`, `G2` and
/// the bound `|b|` only.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadraticTest {
    /// Endpoints `(a ∓ √a) / (2a(a-1))` of the admissible `G2` set
    /// `(0, lo) ∪ (hi, ∞)`; `None` when `a <= 1`.
    pub aest_interval: Option<(f64, f64)>,
    pub verdict_aest: bool,
    /// Upper bound on `|b|`; `None` when `G2 = 0`.
    pub best_bound: Option<f64>,
    pub verdict_best: bool,
    /// `(2aG2 - 1)^2 - 4 G2 (G2 a + |b|)`.
    pub delta: f64,
    /// Smaller root of `G2 R^2 + (2aG2 - 1) R + (G2 a + |b|)`, when it is positive.
    pub radius: Option<f64>,
}

pub fn quadratic_test(a: f64, g2: f64, b_norm: f64) -> QuadraticTest {
    let aest_interval = (a > 1.0).then(|| {
        let root = a.sqrt();
        let denom = 2.0 * a * (a - 1.0);
        ((a - root) / denom, (a + root) / denom)
    });
    let verdict_aest = match aest_interval {
        Some((lo, hi)) => g2 > 0.0 && (g2 < lo || g2 > hi),
        None => false,
    };
    let best_bound = (g2 > 0.0).then(|| (4.0 * a * (a - 1.0) * g2 * g2 - 4.0 * a * g2 + 1.0) / (4.0 * g2));
    let verdict_best = best_bound.is_some_and(|bound| b_norm < bound);

    let lin = 2.0 * a * g2 - 1.0;
    let delta = lin * lin - 4.0 * g2 * (g2 * a + b_norm);
    // For G2 above the upper endpoint both roots are negative: no ball exists.
    let radius = (g2 > 0.0 && delta > 0.0 && lin < 0.0).then(|| (-lin - delta.sqrt()) / (2.0 * g2));
    QuadraticTest {
        aest_interval,
        verdict_aest,
        best_bound,
        verdict_best,
        delta,
        radius,
    }
}

/// Smallest `R >= 0` with `g2 (R + a)^2 exp(R/H) + b_norm <= R`, if any.
///
/// The left side minus `R` is convex in `R`, so it is minimised at the
/// unique zero of its derivative; a root exists only if that minimum is
/// non-positive.
pub fn rigorous_radius(g2: f64, a: f64, scale_height: f64, b_norm: f64) -> Option<f64> {
    if g2 == 0.0 {
        return Some(b_norm);
    }
    let gap = |r: f64| g2 * (r + a).powi(2) * (r / scale_height).exp() + b_norm - r;
    let slope = |r: f64| g2 * (r / scale_height).exp() * ((r + a).powi(2) / scale_height + 2.0 * (r + a)) - 1.0;

    if slope(0.0) >= 0.0 {
        return None;
    }
    let mut hi = 1.0f64.max(a);
    while slope(hi) < 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return None;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let argmin = lo;
    if gap(argmin) > 0.0 {
        return None;
    }
    let (mut lo, mut hi) = (0.0, argmin);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(hi)
}

/// Estimated suprema of `|alpha|`, `|b|`, `|b'|` over `[t0, t1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SampledSups {
    pub alpha: f64,
    pub b: f64,
    pub bprime: f64,
}

/// Samples on the grid refined 10x and 20x and pads the larger estimate by
/// the change between the two, which dominates the h^2 sampling error.
pub fn sampled_sups(config: &ScenarioConfig) -> Result<SampledSups> {
    let base = Grid::for_config(config)?;
    let coarse = sups_on(config, &base.refined(10))?;
    let fine = sups_on(config, &base.refined(20))?;
    let pad = |c: f64, f: f64| c.max(f) + (f - c).abs();
    Ok(SampledSups {
        alpha: pad(coarse.alpha, fine.alpha),
        b: pad(coarse.b, fine.b),
        bprime: pad(coarse.bprime, fine.bprime),
    })
}

fn sups_on(config: &ScenarioConfig, grid: &Grid) -> Result<SampledSups> {
    let c = build_coefficients_on(config, grid)?;
    let sup = |xs: &[f64]| xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    Ok(SampledSups {
        alpha: sup(&c.alpha),
        b: sup(&c.b),
        bprime: sup(&c.bprime),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExistenceCertificate {
    pub mode: CertificateMode,
    /// Chord slope [m/s].
    pub a: f64,
    pub sup_alpha: f64,
    pub sup_b: f64,
    pub sup_bprime: f64,
    /// Size of `b` entering the conditions: `sup|b|` in `PaperLiteral` mode,
    /// `max(sup|b|, sup|b'|)` in rigorous mode.
    pub b_norm: f64,
    pub g0: f64,
    pub g1: f64,
    pub g2: f64,
    pub aest_interval: Option<(f64, f64)>,
    pub best_bound: Option<f64>,
    pub delta: f64,
    /// Radius of an invariant ball, present iff `verdict_overall`.
    pub radius: Option<f64>,
    pub verdict_aest: bool,
    pub verdict_best: bool,
    /// `PaperLiteral`: both closed-form conditions hold and the quadratic has a
    /// positive root. `CorrectedRigorous`: the exact ball inequality has a solution.
    pub verdict_overall: bool,
    pub linear: bool,
    pub reason: Option<String>,
}

pub fn certificate(config: &ScenarioConfig, mode: CertificateMode) -> Result<ExistenceCertificate> {
    config.validate()?;
    let a = chord_shift(config)?.slope;
    let iv = Interval::new(config.t0, config.t1)?;
    let sups = sampled_sups(config)?;
    let constants = match mode {
        CertificateMode::PaperLiteral => GreenConstants::literal(&iv),
        CertificateMode::CorrectedRigorous => GreenConstants::exact(&iv),
    };
    let b_norm = match mode {
        CertificateMode::PaperLiteral => sups.b,
        CertificateMode::CorrectedRigorous => sups.b.max(sups.bprime),
    };
    let linear = config.is_linear();
    let g2 = if linear {
        0.0
    } else {
        sups.alpha * constants.g0.max(constants.g1)
    };
    let quad = quadratic_test(a, g2, b_norm);

    let mut cert = ExistenceCertificate {
        mode,
        a,
        sup_alpha: sups.alpha,
        sup_b: sups.b,
        sup_bprime: sups.bprime,
        b_norm,
        g0: constants.g0,
        g1: constants.g1,
        g2,
        aest_interval: quad.aest_interval,
        best_bound: quad.best_bound,
        delta: quad.delta,
        radius: None,
        verdict_aest: quad.verdict_aest,
        verdict_best: quad.verdict_best,
        verdict_overall: false,
        linear,
        reason: None,
    };

    if linear {
        cert.verdict_aest = true;
        cert.verdict_best = true;
        cert.verdict_overall = true;
        cert.radius = Some(b_norm);
        cert.reason = Some("linear case: no drag, the solution is b".into());
        return Ok(cert);
    }
    if a <= 1.0 {
        cert.reason = Some("a ≤ 1 (the existence conditions require a > 1)".into());
        return Ok(cert);
    }
    match mode {
        CertificateMode::PaperLiteral => {
            cert.verdict_overall = quad.verdict_aest && quad.verdict_best && quad.radius.is_some();
            if cert.verdict_overall {
                cert.radius = quad.radius;
            } else {
                cert.reason = Some(
                    match (quad.verdict_aest, quad.verdict_best) {
                        (false, _) => "G2 outside the admissible set",
                        (true, false) => "|b| exceeds the admissible bound",
                        (true, true) => "no positive ball radius",
                    }
                    .into(),
                );
            }
        }
        CertificateMode::CorrectedRigorous => {
            cert.radius = rigorous_radius(g2, a, config.scale_height, b_norm);
            cert.verdict_overall = cert.radius.is_some();
            if !cert.verdict_overall {
                cert.reason = Some("no radius satisfies the ball inequality".into());
            }
        }
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ExhaustProfile, MassProfile};

    #[test]
    fn reference_arithmetic() {
        let q = quadratic_test(4.0, 0.05, 1.0);
        let (lo, hi) = q.aest_interval.unwrap();
        assert!((lo - 1.0 / 12.0).abs() < 1e-15);
        assert!((hi - 0.25).abs() < 1e-15);
        assert!(q.verdict_aest);
        assert!((q.best_bound.unwrap() - 1.6).abs() < 1e-12);
        assert!(q.verdict_best);
        assert!((q.delta - 0.12).abs() < 1e-12);
        let r = q.radius.unwrap();
        assert!((r - (0.6 - 0.12f64.sqrt()) / 0.1).abs() < 1e-12);
        assert!((r - 2.5359).abs() < 1e-4);
    }

    #[test]
    fn upper_branch_has_no_positive_radius() {
        let q = quadratic_test(4.0, 0.5, 0.01);
        assert!(q.verdict_aest);
        assert!(q.radius.is_none());
    }

    #[test]
    fn small_chord_slope_fails_aest() {
        let q = quadratic_test(0.5, 0.01, 0.1);
        assert!(q.aest_interval.is_none());
        assert!(!q.verdict_aest);
    }

    #[test]
    fn rigorous_radius_solves_the_inequality() {
        let r = rigorous_radius(1e-3, 2.0, 8000.0, 9.81).unwrap();
        let lhs = 1e-3 * (r + 2.0f64).powi(2) * (r / 8000.0).exp() + 9.81;
        assert!(lhs <= r);
        assert!(lhs > r - 1e-9);
        assert_eq!(rigorous_radius(0.0, 2.0, 8000.0, 3.0), Some(3.0));
        assert!(rigorous_radius(1.0, 2.0, 8000.0, 9.81).is_none());
    }

    fn hop(x1: f64) -> ScenarioConfig {
        let mass = MassProfile::linear_burn(1000.0, 100.0, 1.0, 0.0, None).unwrap();
        let exhaust = ExhaustProfile::constant(-3000.0).unwrap();
        ScenarioConfig::new(0.0, 2.0, 0.0, x1, mass, exhaust).with_drag(1.0, 0.75)
    }

    #[test]
    fn small_hop_is_certified_in_both_modes() {
        for mode in [CertificateMode::PaperLiteral, CertificateMode::CorrectedRigorous] {
            let c = certificate(&hop(4.0), mode).unwrap();
            assert!(c.verdict_overall, "{mode:?}: {c:?}");
            assert!(c.radius.unwrap() > 0.0);
            assert!(c.g2 > 0.0);
        }
    }

    #[test]
    fn slow_chord_is_refused() {
        let c = certificate(&hop(1.0), CertificateMode::CorrectedRigorous).unwrap();
        assert!(!c.verdict_overall);
        assert!(c.reason.unwrap().contains("a ≤ 1"));
    }

    #[test]
    fn drag_free_is_linear() {
        let cfg = hop(1.0).with_drag(0.0, 0.75);
        let c = certificate(&cfg, CertificateMode::PaperLiteral).unwrap();
        assert!(c.linear && c.verdict_overall);
        assert_eq!(c.g2, 0.0);
    }
}
