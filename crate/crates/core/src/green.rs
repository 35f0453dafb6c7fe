//! Green's function of `u'' = f` with homogeneous Dirichlet conditions on
//! `[t0, t1]`:
//!
//! ```text
//! G(t, s) = (t - t0)(t1 - s) / (t1 - t0)   for t <= s
//!         = (s - t0)(t1 - t) / (t1 - t0)   for t >  s
//! ```
//!
//! With this kernel `u(t) = ∫ G(t, s) f(s) ds` satisfies `u'' = -f`; the
//! operator module carries the compensating sign.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Side;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub t0: f64,
    pub t1: f64,
}

impl Interval {
    pub fn new(t0: f64, t1: f64) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
            return Err(Error::Domain(format!("invalid interval [{t0}, {t1}]")));
        }
        Ok(Self { t0, t1 })
    }

    pub fn length(&self) -> f64 {
        self.t1 - self.t0
    }

    pub fn contains(&self, t: f64) -> bool {
        self.t0 <= t && t <= self.t1
    }

    fn check(&self, t: f64, s: f64) -> Result<()> {
        if self.contains(t) && self.contains(s) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "kernel arguments ({t}, {s}) outside [{}, {}]",
                self.t0, self.t1
            )))
        }
    }
}

/// Kernel value; continuous across the diagonal.
pub fn green_paper(t: f64, s: f64, iv: &Interval) -> Result<f64> {
    iv.check(t, s)?;
    let len = iv.length();
    Ok(if t <= s {
        (t - iv.t0) * (iv.t1 - s) / len
    } else {
        (s - iv.t0) * (iv.t1 - t) / len
    })
}

/// `dG/dt` off the diagonal. On the diagonal the derivative jumps and
/// [`green_dt_sided`] must be used.
pub fn green_dt(t: f64, s: f64, iv: &Interval) -> Result<f64> {
    if t == s {
        return Err(Error::Domain(format!(
            "dG/dt is discontinuous at t = s = {t}; pick a side"
        )));
    }
    iv.check(t, s)?;
    Ok(dt_branch(t, s, iv, if t < s { Side::Left } else { Side::Right }))
}

/// `dG/dt` on a chosen branch: `Side::Left` is the `t < s` formula,
/// `Side::Right` the `t > s` one. At `t == s` this yields the one-sided limits.
pub fn green_dt_sided(t: f64, s: f64, iv: &Interval, side: Side) -> Result<f64> {
    iv.check(t, s)?;
    Ok(dt_branch(t, s, iv, side))
}

fn dt_branch(_t: f64, s: f64, iv: &Interval, side: Side) -> f64 {
    match side {
        Side::Left => (iv.t1 - s) / iv.length(),
        Side::Right => (iv.t0 - s) / iv.length(),
    }
}

/// `G0 = sup_t ∫ G(t, s) ds` and `G1 = sup_t ∫ |dG/dt (t, s)| ds`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GreenConstants {
    pub g0: f64,
    pub g1: f64,
}

impl GreenConstants {
    /// Exact suprema: `∫ G ds = (t - t0)(t1 - t)/2` peaks at the midpoint with
    /// `L^2 / 8`; `∫ |dG/dt| ds = ((t - t0)^2 + (t1 - t)^2) / (2L)` peaks at
    /// either endpoint with `L / 2`.
    pub fn exact(iv: &Interval) -> Self {
        let len = iv.length();
        Self {
            g0: len * len / 8.0,
            g1: len / 2.0,
        }
    }

    /// The published values `3/8 L^2` and `L^2`, kept for reproducing the
    /// original existence arithmetic.
    pub fn literal(iv: &Interval) -> Self {
        let len = iv.length();
        Self {
            g0: 3.0 * len * len / 8.0,
            g1: len * len,
        }
    }
}

pub fn green_constants(iv: &Interval) -> GreenConstants {
    GreenConstants::exact(iv)
}

/// Side-by-side comparison of the exact and published constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConstantsComparison {
    pub exact: GreenConstants,
    pub literal: GreenConstants,
    /// `literal.g0 / exact.g0`, always 3.
    pub g0_ratio: f64,
    /// `literal.g1 / exact.g1 = 2L`; not scale free.
    pub g1_ratio: f64,
}

impl ConstantsComparison {
    pub fn new(iv: &Interval) -> Self {
        let exact = GreenConstants::exact(iv);
        let literal = GreenConstants::literal(iv);
        Self {
            exact,
            literal,
            g0_ratio: literal.g0 / exact.g0,
            g1_ratio: literal.g1 / exact.g1,
        }
    }

    pub fn deviates(&self) -> bool {
        self.g0_ratio != 1.0 || self.g1_ratio != 1.0
    }
}
