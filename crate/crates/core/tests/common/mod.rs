#![allow(dead_code)]

use rocketbvp::{ExhaustProfile, MassProfile, ScenarioConfig};

pub const EXHAUST: f64 = -3000.0;

/// Drag-free climb with a burn lasting the whole flight.
pub fn linear_climb(n_grid: usize) -> ScenarioConfig {
    let mass = MassProfile::linear_burn(1000.0, 9000.0, 25.0, 0.0, None).unwrap();
    let exhaust = ExhaustProfile::constant(EXHAUST).unwrap();
    ScenarioConfig::new(0.0, 60.0, 0.0, 15_000.0, mass, exhaust).with_grid(n_grid)
}

/// Climb to 15 km in a minute against drag.
pub fn desk_drag(n_grid: usize) -> ScenarioConfig {
    let mass = MassProfile::linear_burn(1000.0, 9000.0, 50.0, 0.0, None).unwrap();
    let exhaust = ExhaustProfile::constant(EXHAUST).unwrap();
    ScenarioConfig::new(0.0, 60.0, 0.0, 15_000.0, mass, exhaust)
        .with_drag(1.0, 0.75)
        .with_grid(n_grid)
}

/// Short hop with thrust below gravity; small enough to be certified.
pub fn small_hop(n_grid: usize) -> ScenarioConfig {
    let mass = MassProfile::linear_burn(1000.0, 100.0, 1.0, 0.0, None).unwrap();
    let exhaust = ExhaustProfile::constant(EXHAUST).unwrap();
    ScenarioConfig::new(0.0, 2.0, 0.0, 4.0, mass, exhaust)
        .with_drag(1.0, 0.75)
        .with_grid(n_grid)
}

/// Exact drag-free solution `(x, v)` of a constant-rate burn active on the
/// whole interval, from integrating the rocket equation twice.
pub struct DragFreeExact {
    pub t0: f64,
    pub x0: f64,
    pub m_init: f64,
    pub rate: f64,
    pub c: f64,
    pub g: f64,
    pub v_init: f64,
}

impl DragFreeExact {
    pub fn for_config(cfg: &ScenarioConfig) -> Self {
        let (m_init, mdot) = cfg.mass.eval(cfg.t0);
        let mut e = Self {
            t0: cfg.t0,
            x0: cfg.x0,
            m_init,
            rate: -mdot,
            c: cfg.exhaust.eval(cfg.t0),
            g: cfg.g,
            v_init: 0.0,
        };
        let tau = cfg.t1 - cfg.t0;
        // x(t1) is affine in v_init with unit slope per second of flight
        e.v_init = (cfg.x1 - e.x(cfg.t1)) / tau;
        e
    }

    fn log_integral(&self, tau: f64) -> f64 {
        if self.rate == 0.0 {
            return 0.0;
        }
        let u = (self.m_init - self.rate * tau) / self.m_init;
        -(self.m_init / self.rate) * (u * u.ln() - u + 1.0)
    }

    pub fn x(&self, t: f64) -> f64 {
        let tau = t - self.t0;
        self.x0 + self.v_init * tau - 0.5 * self.g * tau * tau + self.c * self.log_integral(tau)
    }

    pub fn v(&self, t: f64) -> f64 {
        let tau = t - self.t0;
        let m = self.m_init - self.rate * tau;
        self.v_init - self.g * tau + self.c * (m / self.m_init).ln()
    }
}

pub fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Observed order from errors on successively halved grids.
pub fn orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}
