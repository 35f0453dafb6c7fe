//! Independent solvers used to cross-check the fixed-point solution.
//!
//! * Shooting: RK4 on the unshifted problem `x'' = full_rhs(t, x, x')`,
//!   root-finding on the launch velocity until `x(t1) = x1`.
//! * Finite differences: Newton's method on the centred three-point
//!   discretisation of the shifted problem, with a tridiagonal Jacobian.
//!
//! Neither path touches the kernel or the integral operator.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{self, chord_shift, ScenarioConfig, Side};
use crate::operator::{Grid, GridFunction};

/// Altitude and velocity of the rocket on the solver grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

impl Trajectory {
    /// `z = x - y`, `z' = v - a`.
    pub fn to_grid_function(&self, config: &ScenarioConfig) -> Result<GridFunction> {
        let shift = chord_shift(config)?;
        let grid = Grid::new(config.t0, config.t1, self.times.len())?;
        let values = self.times.iter().zip(&self.x).map(|(&t, &x)| x - shift.at(t)).collect();
        let derivs = self.v.iter().map(|&v| v - shift.slope).collect();
        GridFunction::new(grid, values, derivs)
    }

    pub fn from_grid_function(z: &GridFunction, config: &ScenarioConfig) -> Result<Self> {
        let shift = chord_shift(config)?;
        let times = z.grid.nodes();
        let x = times.iter().zip(&z.values).map(|(&t, &v)| v + shift.at(t)).collect();
        let v = z.derivs.iter().map(|&d| d + shift.slope).collect();
        Ok(Self { times, x, v })
    }
}

/// Classical RK4 from `(x0, v_init)` with one step per grid interval.
///
/// Schedule breakpoints sit on nodes, so each step sees one smooth piece:
/// the stage at the step's start takes right limits, the stage at its end
/// left limits.
pub fn ivp_integrate(config: &ScenarioConfig, v_init: f64) -> Result<Trajectory> {
    config.validate()?;
    let grid = Grid::for_config(config)?;
    let times = grid.nodes();
    let n = grid.n;
    let mut x = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    x.push(config.x0);
    v.push(v_init);

    let accel = |t: f64, x: f64, v: f64, side: Side| model::full_rhs_sided(t, x, v, config, side);
    for i in 0..n - 1 {
        let (t, t_next) = (times[i], times[i + 1]);
        let h = t_next - t;
        let mid = t + 0.5 * h;
        let (xi, vi) = (x[i], v[i]);

        let k1x = vi;
        let k1v = accel(t, xi, vi, Side::Right);
        let k2x = vi + 0.5 * h * k1v;
        let k2v = accel(mid, xi + 0.5 * h * k1x, k2x, Side::Right);
        let k3x = vi + 0.5 * h * k2v;
        let k3v = accel(mid, xi + 0.5 * h * k2x, k3x, Side::Right);
        let k4x = vi + h * k3v;
        let k4v = accel(t_next, xi + h * k3x, k4x, Side::Left);

        let xn = xi + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        let vn = vi + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if !(xn.is_finite() && vn.is_finite()) {
            return Err(Error::Integration { time: t_next });
        }
        x.push(xn);
        v.push(vn);
    }
    Ok(Trajectory { times, x, v })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShootingOptions {
    /// Launch velocities are scanned over `a ± half_width`; defaults to
    /// `10 g (t1 - t0)`.
    pub half_width: Option<f64>,
    pub scan_steps: usize,
    /// When several launch velocities hit the target, keep the one closest
    /// to this; defaults to the drag-free value `a + g (t1 - t0) / 2`.
    pub prefer: Option<f64>,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self {
            half_width: None,
            scan_steps: 64,
            prefer: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShootingSolution {
    /// Every launch velocity found, ascending.
    pub roots: Vec<f64>,
    pub v_init: f64,
    pub trajectory: Trajectory,
}

pub fn shooting_solve(config: &ScenarioConfig) -> Result<ShootingSolution> {
    shooting_solve_with(config, &ShootingOptions::default())
}

pub fn shooting_solve_with(config: &ScenarioConfig, opts: &ShootingOptions) -> Result<ShootingSolution> {
    config.validate()?;
    let a = chord_shift(config)?.slope;
    let span = config.duration();
    let half = match opts.half_width {
        Some(w) => w,
        None if config.g > 0.0 => 10.0 * config.g * span,
        None => 10.0 * (a.abs() + 1.0),
    };
    let (lo, hi) = (a - half, a + half);
    let steps = opts.scan_steps.max(1);
    let target_tol = 1e-9 * config.x1.abs().max(1.0);

    let miss = |v: f64| -> Option<f64> {
        ivp_integrate(config, v)
            .ok()
            .and_then(|tr| tr.x.last().copied())
            .map(|x| x - config.x1)
            .filter(|m| m.is_finite())
    };

    let scan: Vec<(f64, Option<f64>)> = (0..=steps)
        .map(|k| {
            let v = lo + (hi - lo) * k as f64 / steps as f64;
            (v, miss(v))
        })
        .collect();

    let mut roots: Vec<f64> = Vec::new();
    for pair in scan.windows(2) {
        let ((va, ma), (vb, mb)) = (pair[0], pair[1]);
        let (Some(ma), Some(mb)) = (ma, mb) else { continue };
        let root = if ma == 0.0 {
            Some(va)
        } else if ma.signum() != mb.signum() && mb != 0.0 {
            refine_root(&miss, (va, ma), (vb, mb), target_tol)
        } else {
            None
        };
        if let Some(r) = root {
            if roots.last().is_none_or(|&last| (r - last).abs() > 1e-9 * (1.0 + r.abs())) {
                roots.push(r);
            }
        }
    }
    if let Some(&(v, Some(m))) = scan.last() {
        if m == 0.0 {
            roots.push(v);
        }
    }
    if roots.is_empty() {
        return Err(Error::NoBracket { lo, hi });
    }

    let prefer = opts.prefer.unwrap_or(a + 0.5 * config.g * span);
    let v_init = roots
        .iter()
        .copied()
        .min_by(|p, q| (p - prefer).abs().total_cmp(&(q - prefer).abs()))
        .expect("non-empty");
    let trajectory = ivp_integrate(config, v_init)?;
    let hit = trajectory.x.last().copied().unwrap_or(f64::NAN) - config.x1;
    if !(hit.abs() <= target_tol) {
        return Err(Error::OracleFailure(format!(
            "shooting missed x1 by {hit} m (tolerance {target_tol})"
        )));
    }
    Ok(ShootingSolution {
        roots,
        v_init,
        trajectory,
    })
}

/// Bisection down to a small bracket, then secant steps kept inside it.
fn refine_root(
    miss: &impl Fn(f64) -> Option<f64>,
    (mut a, mut fa): (f64, f64),
    (mut b, mut fb): (f64, f64),
    tol: f64,
) -> Option<f64> {
    for _ in 0..60 {
        if (b - a).abs() <= 1e-6 * (1.0 + a.abs()) {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = miss(m)?;
        if fm.abs() <= tol {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            (a, fa) = (m, fm);
        } else {
            (b, fb) = (m, fm);
        }
    }
    for _ in 0..50 {
        let (best, fbest) = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
        if fbest.abs() <= tol {
            return Some(best);
        }
        let mut c = b - fb * (b - a) / (fb - fa);
        if !(c > a.min(b) && c < a.max(b)) {
            c = 0.5 * (a + b);
        }
        let fc = miss(c)?;
        if fc.signum() == fa.signum() {
            (a, fa) = (c, fc);
        } else {
            (b, fb) = (c, fc);
        }
        if a == b {
            break;
        }
    }
    let (best, fbest) = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
    (fbest.abs() <= tol).then_some(best)
}

const NEWTON_MAX_STEPS: usize = 50;

/// Newton's method on
/// `(z[i-1] - 2 z[i] + z[i+1]) / h^2 = F(t_i, z_i, (z[i+1] - z[i-1]) / 2h) + beta_i`
/// with `z_0 = z_{n-1} = 0`, starting from zero.
pub fn fd_newton_solve(config: &ScenarioConfig) -> Result<GridFunction> {
    config.validate()?;
    let grid = Grid::for_config(config)?;
    let n = grid.n;
    if n < 5 {
        return Err(Error::Domain(format!("finite differences need at least 5 nodes, got {n}")));
    }
    let a = chord_shift(config)?.slope;
    let hgt = config.scale_height;
    let h = grid.step();
    let h2 = h * h;

    // beta at a jump enters as the mean of its one-sided limits
    let mut alpha = vec![0.0; n];
    let mut beta = vec![0.0; n];
    for i in 1..n - 1 {
        let t = grid.node(i);
        let (al, bl) = model::alpha_beta_at_sided(config, t, Side::Left);
        let (_, br) = model::alpha_beta_at_sided(config, t, Side::Right);
        alpha[i] = al;
        beta[i] = 0.5 * (bl + br);
    }

    let m = n - 2;
    let mut z = vec![0.0; n];
    let mut sub = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut sup = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    for _ in 0..NEWTON_MAX_STEPS {
        for k in 0..m {
            let i = k + 1;
            let p = (z[i + 1] - z[i - 1]) / (2.0 * h);
            let f = model::nonlinearity(alpha[i], a, hgt, z[i], p);
            let (fz, fp) = model::nonlinearity_partials(alpha[i], a, hgt, z[i], p);
            rhs[k] = -((z[i - 1] - 2.0 * z[i] + z[i + 1]) / h2 - f - beta[i]);
            sub[k] = 1.0 / h2 + fp / (2.0 * h);
            diag[k] = -2.0 / h2 - fz;
            sup[k] = 1.0 / h2 - fp / (2.0 * h);
        }
        let step = solve_tridiagonal(&sub, &diag, &sup, &rhs)?;
        let mut step_norm = 0.0f64;
        for (k, dz) in step.iter().enumerate() {
            z[k + 1] += dz;
            step_norm = step_norm.max(dz.abs());
        }
        if !step_norm.is_finite() {
            break;
        }
        let z_norm = z.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if step_norm <= 1e-10 * (1.0 + z_norm) {
            let derivs = fd_derivatives(&z, h);
            return GridFunction::new(grid, z, derivs);
        }
    }
    Err(Error::OracleFailure(format!(
        "finite-difference Newton did not converge in {NEWTON_MAX_STEPS} steps"
    )))
}

/// Centred differences inside, second-order one-sided at the ends.
fn fd_derivatives(z: &[f64], h: f64) -> Vec<f64> {
    let n = z.len();
    let mut d = vec![0.0; n];
    d[0] = (-3.0 * z[0] + 4.0 * z[1] - z[2]) / (2.0 * h);
    d[n - 1] = (3.0 * z[n - 1] - 4.0 * z[n - 2] + z[n - 3]) / (2.0 * h);
    for i in 1..n - 1 {
        d[i] = (z[i + 1] - z[i - 1]) / (2.0 * h);
    }
    d
}

/// Thomas algorithm; `sub[0]` and `sup[m-1]` are ignored.
fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let m = diag.len();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    let mut pivot = diag[0];
    for k in 0..m {
        if k > 0 {
            pivot = diag[k] - sub[k] * c[k - 1];
        }
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::OracleFailure(format!("singular Jacobian at row {k}")));
        }
        c[k] = if k + 1 < m { sup[k] / pivot } else { 0.0 };
        d[k] = if k == 0 {
            rhs[0] / pivot
        } else {
            (rhs[k] - sub[k] * d[k - 1]) / pivot
        };
    }
    for k in (0..m - 1).rev() {
        d[k] -= c[k] * d[k + 1];
    }
    Ok(d)
}

/// Nodewise differences between two grid functions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CompareMetrics {
    pub sup_value: f64,
    pub rms_value: f64,
    pub sup_deriv: f64,
    pub rms_deriv: f64,
}

pub fn compare(za: &GridFunction, zb: &GridFunction) -> Result<CompareMetrics> {
    za.same_grid(zb)?;
    let stats = |a: &[f64], b: &[f64]| {
        let (sup, sq) = a.iter().zip(b).fold((0.0f64, 0.0), |(s, q), (x, y)| {
            let d = (x - y).abs();
            (s.max(d), q + d * d)
        });
        (sup, (sq / a.len() as f64).sqrt())
    };
    let (sup_value, rms_value) = stats(&za.values, &zb.values);
    let (sup_deriv, rms_deriv) = stats(&za.derivs, &zb.derivs);
    Ok(CompareMetrics {
        sup_value,
        rms_value,
        sup_deriv,
        rms_deriv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ExhaustProfile, MassProfile};

    fn ballistic(n: usize) -> ScenarioConfig {
        let mass = MassProfile::constant(1000.0).unwrap();
        let exhaust = ExhaustProfile::constant(-3000.0).unwrap();
        ScenarioConfig::new(0.0, 10.0, 100.0, 600.0, mass, exhaust).with_grid(n)
    }

    #[test]
    fn free_fall_is_reproduced() {
        let cfg = ballistic(21);
        let tr = ivp_integrate(&cfg, 0.0).unwrap();
        for (i, &t) in tr.times.iter().enumerate() {
            let exact = 100.0 - 0.5 * 9.81 * t * t;
            assert!((tr.x[i] - exact).abs() < 1e-10);
        }
        assert_eq!(tr.x[0], 100.0);
    }

    #[test]
    fn blow_up_is_reported() {
        let mut cfg = ballistic(21).with_drag(1.0, 1.0);
        cfg.scale_height = 1e-3;
        cfg.x0 = -1.0;
        assert!(matches!(ivp_integrate(&cfg, 10.0), Err(Error::Integration { .. })));
    }

    #[test]
    fn shooting_recovers_ballistic_launch_speed() {
        let cfg = ballistic(101);
        let sol = shooting_solve(&cfg).unwrap();
        let exact = 50.0 + 9.81 * 10.0 / 2.0;
        assert!((sol.v_init - exact).abs() < 1e-9 * exact, "{}", sol.v_init);
        assert_eq!(sol.roots.len(), 1);
    }

    #[test]
    fn shooting_without_bracket() {
        let cfg = ballistic(41);
        let opts = ShootingOptions {
            half_width: Some(1.0),
            ..ShootingOptions::default()
        };
        assert!(matches!(shooting_solve_with(&cfg, &opts), Err(Error::NoBracket { .. })));
    }

    #[test]
    fn fd_linear_case_is_exact_for_constant_beta() {
        let cfg = ballistic(41);
        let z = fd_newton_solve(&cfg).unwrap();
        for (i, t) in z.grid.nodes().into_iter().enumerate() {
            let exact = 9.81 * t * (10.0 - t) / 2.0;
            assert!((z.values[i] - exact).abs() < 1e-9);
            assert!((z.derivs[i] - 9.81 * (5.0 - t)).abs() < 1e-9);
        }
    }

    #[test]
    fn tridiagonal_matches_dense_solution() {
        let sub = [0.0, 1.0, 2.0];
        let diag = [4.0, 5.0, 6.0];
        let sup = [1.0, 1.0, 0.0];
        let rhs = [5.0, 8.0, 14.0];
        let x = solve_tridiagonal(&sub, &diag, &sup, &rhs).unwrap();
        for (xi, e) in x.iter().zip([1.0, 1.0, 2.0]) {
            assert!((xi - e).abs() < 1e-14, "{x:?}");
        }
    }

    #[test]
    fn compare_metrics() {
        let grid = Grid::new(0.0, 1.0, 5).unwrap();
        let za = GridFunction::from_fn(grid, |t| t * (1.0 - t), |t| 1.0 - 2.0 * t);
        let m = compare(&za, &za).unwrap();
        assert_eq!((m.sup_value, m.rms_value, m.sup_deriv, m.rms_deriv), (0.0, 0.0, 0.0, 0.0));
        let mut zb = za.clone();
        for v in &mut zb.values[1..4] {
            *v += 1.0;
        }
        assert_eq!(compare(&za, &zb).unwrap().sup_value, 1.0);
        let other = GridFunction::zeros(Grid::new(0.0, 1.0, 7).unwrap());
        assert!(compare(&za, &other).is_err());
    }
}
