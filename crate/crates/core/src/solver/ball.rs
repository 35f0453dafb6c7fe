use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{certificate, CertificateMode};
use crate::error::{Error, Result};
use crate::model::chord_shift;
use crate::operator::{apply_S, build_coefficients, c1_norm, Grid, GridFunction};
use crate::ScenarioConfig;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BallCheckReport {
    pub radius: f64,
    pub mode: CertificateMode,
    /// `G2 (R^2 + 2aR + a) + |b|` with the published constants.
    pub paper_lhs: f64,
    /// `G2 (R + a)^2 exp(R/H) + max(|b|, |b'|)` with the exact constants.
    pub rigorous_lhs: f64,
    pub paper_holds: bool,
    pub rigorous_holds: bool,
    pub samples: usize,
    /// Largest `||S z|| / R` seen, or the largest `||S z||` when `R = 0`.
    pub worst_norm: f64,
    pub violations: usize,
}

impl BallCheckReport {
    /// The analytic verdict of the requested mode.
    pub fn analytic_holds(&self) -> bool {
        match self.mode {
            CertificateMode::PaperLiteral => self.paper_holds,
            CertificateMode::CorrectedRigorous => self.rigorous_holds,
        }
    }
}

/// Evaluates both analytic ball inequalities at `radius` and pushes
/// `n_samples` random C^1 functions of norm at most `radius` through `S`.
///
/// Samples are `tau (1 - tau) P(tau)` with `P` a random cubic and
/// `tau = (t - t0)/L`, rescaled to a random norm in `(0, radius]`.
pub fn ball_check(
    radius: f64,
    config: &ScenarioConfig,
    n_samples: usize,
    mode: CertificateMode,
    seed: u64,
) -> Result<BallCheckReport> {
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::Domain(format!("ball radius must be non-negative, got {radius}")));
    }
    let coeffs = build_coefficients(config)?;
    let a = chord_shift(config)?.slope;
    let paper = certificate(config, CertificateMode::PaperLiteral)?;
    let rigorous = certificate(config, CertificateMode::CorrectedRigorous)?;

    let paper_lhs = paper.g2 * (radius * radius + 2.0 * a * radius + a) + paper.b_norm;
    let rigorous_lhs =
        rigorous.g2 * (radius + a).powi(2) * (radius / config.scale_height).exp() + rigorous.b_norm;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut violations = 0;
    for _ in 0..n_samples {
        let z = random_candidate(&coeffs.grid, radius, &mut rng);
        let image = apply_S(&z, &coeffs, config)?;
        let norm = c1_norm(&image);
        if norm > radius {
            violations += 1;
        }
        worst = worst.max(if radius > 0.0 { norm / radius } else { norm });
    }

    Ok(BallCheckReport {
        radius,
        mode,
        paper_lhs,
        rigorous_lhs,
        paper_holds: paper_lhs <= radius,
        rigorous_holds: rigorous_lhs <= radius,
        samples: n_samples,
        worst_norm: worst,
        violations,
    })
}

fn random_candidate(grid: &Grid, radius: f64, rng: &mut impl Rng) -> GridFunction {
    let coef: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..=1.0));
    let len = grid.length();
    let poly = |x: f64| coef[0] + x * (coef[1] + x * (coef[2] + x * coef[3]));
    let dpoly = |x: f64| coef[1] + x * (2.0 * coef[2] + x * 3.0 * coef[3]);
    let t0 = grid.t0;
    let mut z = GridFunction::from_fn(
        *grid,
        |t| {
            let x = (t - t0) / len;
            x * (1.0 - x) * poly(x)
        },
        |t| {
            let x = (t - t0) / len;
            ((1.0 - 2.0 * x) * poly(x) + x * (1.0 - x) * dpoly(x)) / len
        },
    );
    let n = grid.n;
    z.values[0] = 0.0;
    z.values[n - 1] = 0.0;

    let norm = c1_norm(&z);
    let target = radius * (1.0 - rng.gen::<f64>());
    let scale = if norm > 0.0 { target / norm } else { 0.0 };
    z.values.iter_mut().chain(z.derivs.iter_mut()).for_each(|v| *v *= scale);
    z
}
