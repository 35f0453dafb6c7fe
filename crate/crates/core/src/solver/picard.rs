use serde::Serialize;

use super::ExistenceCertificate;
use crate::error::{Error, Result};
use crate::operator::{apply_S, build_coefficients, c1_norm, ode_residual, GridFunction};
use crate::ScenarioConfig;

/// Divergence controls for [`picard_solve_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PicardOptions {
    /// Abort once an iterate's C^1 norm exceeds this.
    pub norm_guard: f64,
    /// Abort when the fixed-point residual grew by more than `growth_factor`
    /// over `growth_window` consecutive increasing steps.
    pub growth_factor: f64,
    pub growth_window: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            norm_guard: 1e12,
            growth_factor: 10.0,
            growth_window: 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    /// Number of operator applications.
    pub iterations: usize,
    /// `||S z_k - z_k||` in the C^1 norm, one entry per iteration.
    pub delta_history: Vec<f64>,
    /// Residual of the returned iterate; `None` on grids too coarse to
    /// difference or when the iterate is not finite.
    pub final_residual: Option<f64>,
    pub converged: bool,
    pub damping: f64,
    pub tol: f64,
    pub certificate: Option<ExistenceCertificate>,
}

/// Damped Picard iteration `z <- (1 - w) z + w S z` from `z = 0`.
pub fn picard_solve(config: &ScenarioConfig) -> Result<(GridFunction, SolveReport)> {
    picard_solve_with(config, &PicardOptions::default())
}

/// Iterates until `||S z - z|| <= tol` and returns `S z` for that iterate.
pub fn picard_solve_with(config: &ScenarioConfig, opts: &PicardOptions) -> Result<(GridFunction, SolveReport)> {
    let coeffs = build_coefficients(config)?;
    let mut z = GridFunction::zeros(coeffs.grid);
    let mut report = SolveReport {
        iterations: 0,
        delta_history: Vec::new(),
        final_residual: None,
        converged: false,
        damping: config.damping,
        tol: config.tol,
        certificate: None,
    };
    let residual_of = |z: &GridFunction| {
        ode_residual(z, config).ok().filter(|r| r.is_finite())
    };

    for _ in 0..config.max_iter {
        let image = apply_S(&z, &coeffs, config)?;
        let delta = image.distance(&z)?;
        report.iterations += 1;
        report.delta_history.push(delta);

        if !delta.is_finite() || c1_norm(&image) > opts.norm_guard {
            report.final_residual = residual_of(&z);
            return Err(Error::Diverged(Box::new(report)));
        }
        if delta <= config.tol {
            report.converged = true;
            report.final_residual = residual_of(&image);
            return Ok((image, report));
        }
        if growing(&report.delta_history, opts) {
            report.final_residual = residual_of(&image);
            return Err(Error::Diverged(Box::new(report)));
        }
        z = z.relax_towards(&image, config.damping)?;
    }
    report.final_residual = residual_of(&z);
    Err(Error::NotConverged(Box::new(report)))
}

fn growing(history: &[f64], opts: &PicardOptions) -> bool {
    let w = opts.growth_window;
    if history.len() <= w {
        return false;
    }
    let tail = &history[history.len() - w - 1..];
    tail.windows(2).all(|p| p[1] > p[0]) && tail[w] > opts.growth_factor * tail[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ExhaustProfile, MassProfile};

    fn linear() -> ScenarioConfig {
        let mass = MassProfile::linear_burn(1000.0, 9000.0, 25.0, 0.0, None).unwrap();
        let exhaust = ExhaustProfile::constant(-3000.0).unwrap();
        let mut cfg = ScenarioConfig::new(0.0, 60.0, 0.0, 15000.0, mass, exhaust);
        cfg.damping = 1.0;
        cfg
    }

    #[test]
    fn linear_case_converges_immediately() {
        let cfg = linear();
        let (z, report) = picard_solve(&cfg).unwrap();
        assert!(report.converged);
        assert_eq!(report.iterations, 2);
        assert_eq!(report.delta_history[1], 0.0);
        let coeffs = build_coefficients(&cfg).unwrap();
        assert_eq!(z.values, coeffs.b);
        assert_eq!(z.derivs, coeffs.bprime);
    }

    #[test]
    fn iteration_cap_reports_partial_history() {
        let mut cfg = linear().with_drag(1.0, 0.75);
        cfg.damping = 0.5;
        cfg.max_iter = 3;
        match picard_solve(&cfg) {
            Err(Error::NotConverged(report)) => {
                assert_eq!(report.iterations, 3);
                assert_eq!(report.delta_history.len(), 3);
                assert!(!report.converged);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn growth_detector() {
        let opts = PicardOptions::default();
        assert!(!growing(&[1.0, 2.0, 4.0, 8.0, 16.0], &opts));
        assert!(growing(&[1.0, 2.0, 4.0, 8.0, 16.0, 32.0], &opts));
        assert!(!growing(&[1.0, 2.0, 4.0, 3.0, 16.0, 32.0], &opts));
    }

    #[test]
    fn norm_guard_trips() {
        let mut cfg = linear().with_drag(1.0, 0.75);
        cfg.damping = 0.5;
        let opts = PicardOptions {
            norm_guard: 1.0,
            ..PicardOptions::default()
        };
        assert!(matches!(picard_solve_with(&cfg, &opts), Err(Error::Diverged(_))));
    }
}
