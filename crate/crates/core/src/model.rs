//! Rocket physics: mass and exhaust schedules, the exponential atmosphere,
//! the chord shift to a homogeneous Dirichlet problem and the coefficient
//! functions of the reduced equation
//!
//! ```text
//! z'' = alpha(t) (z' + a)^2 exp(-z/H) + beta(t),   z(t0) = z(t1) = 0
//! alpha(t) = -A C_D rho0 exp(-y(t)/H) / (2 m(t))
//! beta(t)  = c(t) m'(t) / m(t) - g
//! ```
//!
//! where `y` is the straight line joining the two prescribed endpoints.
//!
//! Mass and exhaust schedules are piecewise smooth. At a breakpoint the
//! derivative-carrying quantities (`m'`, `c`) have distinct one-sided limits,
//! so every evaluation that can see a jump takes a [`Side`].

use serde::Serialize;

use crate::error::{Error, Result};

/// Standard sea-level air density [kg/m^3].
pub const DEFAULT_RHO0: f64 = 1.225;
/// Atmospheric scale height [m].
pub const DEFAULT_SCALE_HEIGHT: f64 = 8000.0;
pub const DEFAULT_GRAVITY: f64 = 9.81;
pub const DEFAULT_N_GRID: usize = 201;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 500;
pub const DEFAULT_DAMPING: f64 = 0.5;

/// Relative tolerance used when checking that a schedule breakpoint sits on a grid node.
const ALIGN_TOL: f64 = 1e-9;

/// Which one-sided limit to take at a point where a schedule jumps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Rocket mass `m(t) = m_dry + m1(t)`, with `m1` a linear burn that starts at
/// `ignition` and stops at `burnout`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MassProfile {
    m_dry: f64,
    propellant: f64,
    burn_rate: f64,
    ignition: f64,
    burnout: f64,
}

impl MassProfile {
    /// No emission: `m(t) = mass` throughout.
    pub fn constant(mass: f64) -> Result<Self> {
        Self::linear_burn(mass, 0.0, 0.0, 0.0, None)
    }

    /// Linear burn at `burn_rate` kg/s from `ignition` until `burnout`.
    ///
    /// When `burnout` is `None` the burn runs until the propellant is gone.
    /// A burnout later than that is rejected, since it would push the mass
    /// below `m_dry`.
    pub fn linear_burn(
        m_dry: f64,
        propellant: f64,
        burn_rate: f64,
        ignition: f64,
        burnout: Option<f64>,
    ) -> Result<Self> {
        if !(m_dry.is_finite() && m_dry > 0.0) {
            return Err(Error::InvalidProfile(format!("dry mass must be positive, got {m_dry}")));
        }
        if !(propellant.is_finite() && propellant >= 0.0) {
            return Err(Error::InvalidProfile(format!(
                "propellant mass must be non-negative, got {propellant}"
            )));
        }
        if !(burn_rate.is_finite() && burn_rate >= 0.0) {
            return Err(Error::InvalidProfile(format!(
                "burn rate must be non-negative, got {burn_rate}"
            )));
        }
        if !ignition.is_finite() {
            return Err(Error::InvalidProfile("ignition time must be finite".into()));
        }
        let burnout = match burnout {
            Some(tb) => tb,
            None if burn_rate > 0.0 => ignition + propellant / burn_rate,
            None => ignition,
        };
        if !burnout.is_finite() || burnout < ignition {
            return Err(Error::InvalidProfile(format!(
                "burnout time {burnout} precedes ignition {ignition}"
            )));
        }
        let burned = burn_rate * (burnout - ignition);
        if burned > propellant * (1.0 + 1e-12) {
            return Err(Error::InvalidProfile(format!(
                "burning {burned} kg exceeds the {propellant} kg of propellant; m(t) would drop below m_dry"
            )));
        }
        Ok(Self {
            m_dry,
            propellant,
            burn_rate,
            ignition,
            burnout,
        })
    }

    pub fn m_dry(&self) -> f64 {
        self.m_dry
    }

    pub fn propellant(&self) -> f64 {
        self.propellant
    }

    pub fn burn_rate(&self) -> f64 {
        self.burn_rate
    }

    pub fn ignition(&self) -> f64 {
        self.ignition
    }

    pub fn burnout(&self) -> f64 {
        self.burnout
    }

    /// `(m, m')` with `m'` right-continuous.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        self.eval_sided(t, Side::Right)
    }

    pub fn eval_sided(&self, t: f64, side: Side) -> (f64, f64) {
        let elapsed = (t - self.ignition).clamp(0.0, self.burnout - self.ignition);
        // `max` guards the last ulp of a full burn.
        let m = (self.m_dry + self.propellant - self.burn_rate * elapsed).max(self.m_dry);
        let burning = match side {
            Side::Right => self.ignition <= t && t < self.burnout,
            Side::Left => self.ignition < t && t <= self.burnout,
        };
        let mdot = if burning { -self.burn_rate } else { 0.0 };
        (m, mdot)
    }

    /// Times at which `m'` may jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        if self.burn_rate > 0.0 && self.burnout > self.ignition {
            vec![self.ignition, self.burnout]
        } else {
            Vec::new()
        }
    }

    /// Interval on which `m' < 0`, if any.
    fn burn_window(&self) -> Option<(f64, f64)> {
        (self.burn_rate > 0.0 && self.burnout > self.ignition).then_some((self.ignition, self.burnout))
    }
}

/// Exhaust velocity relative to the rocket, `c(t) = w(t) - v(t)`.
///
/// Stored as segments `(start, c)`, sorted by start; a segment holds until
/// the next one begins. A constant profile is a single segment starting at
/// `-inf`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExhaustProfile {
    segments: Vec<(f64, f64)>,
}

impl ExhaustProfile {
    pub fn constant(c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::InvalidScenario(format!("exhaust velocity must be finite, got {c}")));
        }
        Ok(Self {
            segments: vec![(f64::NEG_INFINITY, c)],
        })
    }

    /// Piecewise-constant schedule. The first segment is extended backwards
    /// to `-inf`.
    pub fn piecewise(segments: Vec<(f64, f64)>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidScenario("exhaust schedule has no segments".into()));
        }
        for (start, c) in &segments {
            if !start.is_finite() || !c.is_finite() {
                return Err(Error::InvalidScenario("exhaust schedule entries must be finite".into()));
            }
        }
        if segments.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidScenario(
                "exhaust schedule start times must be strictly increasing".into(),
            ));
        }
        let mut segments = segments;
        segments[0].0 = f64::NEG_INFINITY;
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[(f64, f64)] {
        &self.segments
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_sided(t, Side::Right)
    }

    pub fn eval_sided(&self, t: f64, side: Side) -> f64 {
        let idx = match side {
            Side::Right => self.segments.partition_point(|&(start, _)| start <= t),
            Side::Left => self.segments.partition_point(|&(start, _)| start < t),
        };
        self.segments[idx.saturating_sub(1)].1
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        self.segments.iter().skip(1).map(|&(start, _)| start).collect()
    }

    /// Largest `c` on `[lo, hi]`.
    fn max_on(&self, lo: f64, hi: f64) -> f64 {
        let mut worst = self.eval(lo);
        for &(start, c) in self.segments.iter().skip(1) {
            if start < hi {
                worst = worst.max(c);
            }
        }
        worst
    }
}

/// Full problem statement: flight window, endpoints, atmosphere, vehicle and
/// the numerical controls of the solvers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub t0: f64,
    pub t1: f64,
    pub x0: f64,
    pub x1: f64,
    pub g: f64,
    /// Cross-sectional area `A` [m^2].
    pub area: f64,
    /// Drag coefficient `C_D`.
    pub drag_coefficient: f64,
    pub rho0: f64,
    /// Scale height `H` [m].
    pub scale_height: f64,
    pub mass: MassProfile,
    pub exhaust: ExhaustProfile,
    pub n_grid: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Relaxation weight of the Picard update, in `(0, 1]`.
    pub damping: f64,
}

impl ScenarioConfig {
    /// Drag-free scenario with the default atmosphere and numerics.
    pub fn new(t0: f64, t1: f64, x0: f64, x1: f64, mass: MassProfile, exhaust: ExhaustProfile) -> Self {
        Self {
            t0,
            t1,
            x0,
            x1,
            g: DEFAULT_GRAVITY,
            area: 0.0,
            drag_coefficient: 0.0,
            rho0: DEFAULT_RHO0,
            scale_height: DEFAULT_SCALE_HEIGHT,
            mass,
            exhaust,
            n_grid: DEFAULT_N_GRID,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            damping: DEFAULT_DAMPING,
        }
    }

    pub fn with_drag(mut self, area: f64, drag_coefficient: f64) -> Self {
        self.area = area;
        self.drag_coefficient = drag_coefficient;
        self
    }

    pub fn with_grid(mut self, n_grid: usize) -> Self {
        self.n_grid = n_grid;
        self
    }

    /// `A C_D rho0`; zero means the problem is linear.
    pub fn drag_factor(&self) -> f64 {
        self.area * self.drag_coefficient * self.rho0
    }

    pub fn is_linear(&self) -> bool {
        self.drag_factor() == 0.0
    }

    pub fn duration(&self) -> f64 {
        self.t1 - self.t0
    }

    pub fn step(&self) -> f64 {
        self.duration() / (self.n_grid - 1) as f64
    }

    /// Checks every invariant of the scenario, including that each schedule
    /// breakpoint strictly inside `(t0, t1)` lands on a grid node.
    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidScenario(msg));
        let scalars = [
            ("t0", self.t0),
            ("t1", self.t1),
            ("x0", self.x0),
            ("x1", self.x1),
            ("g", self.g),
            ("A", self.area),
            ("C_D", self.drag_coefficient),
            ("rho0", self.rho0),
            ("H", self.scale_height),
            ("tol", self.tol),
            ("damping", self.damping),
        ];
        if let Some((name, _)) = scalars.iter().find(|(_, v)| !v.is_finite()) {
            return invalid(format!("{name} must be finite"));
        }
        if self.t1 <= self.t0 {
            return invalid(format!("t1 = {} must exceed t0 = {}", self.t1, self.t0));
        }
        if self.x1 <= self.x0 {
            return invalid(format!(
                "only ascending flights are supported: x1 = {} must exceed x0 = {}",
                self.x1, self.x0
            ));
        }
        if self.scale_height <= 0.0 {
            return invalid("H must be positive".into());
        }
        for (name, v) in [("rho0", self.rho0), ("A", self.area), ("C_D", self.drag_coefficient), ("g", self.g)] {
            if v < 0.0 {
                return invalid(format!("{name} must be non-negative, got {v}"));
            }
        }
        if self.n_grid < 3 {
            return invalid(format!("n_grid must be at least 3, got {}", self.n_grid));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return invalid(format!("damping must lie in (0, 1], got {}", self.damping));
        }
        if self.tol <= 0.0 {
            return invalid("tol must be positive".into());
        }
        if self.max_iter == 0 {
            return invalid("max_iter must be at least 1".into());
        }

        if let Some((lo, hi)) = self.mass.burn_window() {
            let (lo, hi) = (lo.max(self.t0), hi.min(self.t1));
            if lo < hi && self.exhaust.max_on(lo, hi) >= 0.0 {
                return invalid("exhaust velocity must be negative while propellant is burning".into());
            }
        }

        let h = self.step();
        for bp in self.mass.breakpoints().into_iter().chain(self.exhaust.breakpoints()) {
            if bp <= self.t0 || bp >= self.t1 {
                continue;
            }
            let k = (bp - self.t0) / h;
            if (k - k.round()).abs() > ALIGN_TOL * k.max(1.0) {
                return invalid(format!(
                    "schedule breakpoint t = {bp} is not a grid node (spacing {h}); adjust n_grid"
                ));
            }
        }
        Ok(())
    }
}

/// The straight line `y(t) = a (t - t0) + x0` through both endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChordShift {
    /// Chord slope `a` [m/s].
    pub slope: f64,
    pub t0: f64,
    pub x0: f64,
}

impl ChordShift {
    pub fn at(&self, t: f64) -> f64 {
        self.slope * (t - self.t0) + self.x0
    }
}

pub fn chord_shift(config: &ScenarioConfig) -> Result<ChordShift> {
    let span = config.t1 - config.t0;
    if !(span > 0.0) {
        return Err(Error::InvalidScenario(format!(
            "degenerate time interval [{}, {}]",
            config.t0, config.t1
        )));
    }
    Ok(ChordShift {
        slope: (config.x1 - config.x0) / span,
        t0: config.t0,
        x0: config.x0,
    })
}

pub fn mass_eval(profile: &MassProfile, t: f64) -> (f64, f64) {
    profile.eval(t)
}

/// `rho0 exp(-x/H)`.
pub fn air_density(config: &ScenarioConfig, x: f64) -> f64 {
    config.rho0 * (-x / config.scale_height).exp()
}

/// `(alpha(t), beta(t))` of the reduced equation, right-continuous in `t`.
pub fn alpha_beta_at(config: &ScenarioConfig, t: f64) -> (f64, f64) {
    alpha_beta_at_sided(config, t, Side::Right)
}

pub fn alpha_beta_at_sided(config: &ScenarioConfig, t: f64, side: Side) -> (f64, f64) {
    let slope = (config.x1 - config.x0) / (config.t1 - config.t0);
    let y = slope * (t - config.t0) + config.x0;
    let (m, mdot) = config.mass.eval_sided(t, side);
    let c = config.exhaust.eval_sided(t, side);
    let alpha = -config.drag_factor() * (-y / config.scale_height).exp() / (2.0 * m);
    let beta = c * mdot / m - config.g;
    (alpha, beta)
}

/// `F(z, p) = alpha (p + a)^2 exp(-z/H)` where `p` stands for `z'`.
pub fn nonlinearity(alpha: f64, a: f64, scale_height: f64, z: f64, p: f64) -> f64 {
    let u = p + a;
    alpha * u * u * (-z / scale_height).exp()
}

/// `(dF/dz, dF/dp)`.
pub fn nonlinearity_partials(alpha: f64, a: f64, scale_height: f64, z: f64, p: f64) -> (f64, f64) {
    let decay = (-z / scale_height).exp();
    let u = p + a;
    (-alpha * u * u * decay / scale_height, 2.0 * alpha * u * decay)
}

/// Closed-form velocity of a rocket with constant exhaust velocity `c` in a
/// uniform field `g` and no drag: `v = v_init - g dt + c ln(m / m_init)`.
pub fn tsiolkovsky_velocity(v_init: f64, c: f64, m_init: f64, m: f64, g: f64, dt: f64) -> Result<f64> {
    if !(m > 0.0 && m_init > 0.0) {
        return Err(Error::Domain(format!("masses must be positive, got m = {m}, m_init = {m_init}")));
    }
    Ok(v_init - g * dt + c * (m / m_init).ln())
}

/// Acceleration of the unshifted problem, `x'' = c m'/m - g - A C_D rho(x) v^2 / (2m)`.
pub fn full_rhs(t: f64, x: f64, v: f64, config: &ScenarioConfig) -> f64 {
    full_rhs_sided(t, x, v, config, Side::Right)
}

pub fn full_rhs_sided(t: f64, x: f64, v: f64, config: &ScenarioConfig, side: Side) -> f64 {
    let (m, mdot) = config.mass.eval_sided(t, side);
    let c = config.exhaust.eval_sided(t, side);
    let drag = config.drag_factor() * v * v * (-x / config.scale_height).exp() / (2.0 * m);
    c * mdot / m - config.g - drag
}
