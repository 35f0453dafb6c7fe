//! Grid functions and the fixed-point operator
//!
//! ```text
//! (Sz)(t)  = -∫ G(t, s)     F(s, z(s), z'(s)) ds + b(t)
//! (Sz)'(t) = -∫ dG/dt(t, s) F(s, z(s), z'(s)) ds + b'(t)
//! b(t)     = -∫ G(t, s) beta(s) ds
//! ```
//!
//! Fixed points of `S` solve `z'' = F + beta` with `z(t0) = z(t1) = 0`.
//!
//! Integrals use the composite trapezoid rule on the solver grid. The kernel
//! kink sits on a node, so each subinterval sees one smooth branch of `G`.
//! Splitting `G` into its two branches turns every node integral into a
//! prefix or suffix sum, which makes one application of `S` O(n).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{self, ScenarioConfig, Side};

/// Uniform grid of `n` nodes on `[t0, t1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub t0: f64,
    pub t1: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(t0: f64, t1: f64, n: usize) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
            return Err(Error::Domain(format!("invalid grid interval [{t0}, {t1}]")));
        }
        if n < 3 {
            return Err(Error::Domain(format!("a grid needs at least 3 nodes, got {n}")));
        }
        Ok(Self { t0, t1, n })
    }

    pub fn for_config(config: &ScenarioConfig) -> Result<Self> {
        Self::new(config.t0, config.t1, config.n_grid)
    }

    pub fn length(&self) -> f64 {
        self.t1 - self.t0
    }

    pub fn step(&self) -> f64 {
        self.length() / (self.n - 1) as f64
    }

    /// Node `i`; the last node is `t1` exactly.
    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.t1
        } else {
            self.t0 + i as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Grid with `factor` times as many subintervals; every old node survives.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            n: (self.n - 1) * factor + 1,
            ..*self
        }
    }

    fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                expected: self.n,
                found: other.n,
                t0: self.t0,
                t1: self.t1,
            })
        }
    }
}

/// A C^1 candidate on a grid: node values and node derivatives, carried
/// independently.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridFunction {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>, derivs: Vec<f64>) -> Result<Self> {
        for len in [values.len(), derivs.len()] {
            if len != grid.n {
                return Err(Error::ShapeMismatch {
                    expected: grid.n,
                    found: len,
                    t0: grid.t0,
                    t1: grid.t1,
                });
            }
        }
        Ok(Self { grid, values, derivs })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.n],
            derivs: vec![0.0; grid.n],
        }
    }

    /// Samples `f` and its derivative `df` at the nodes.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64) -> Self {
        let nodes = grid.nodes();
        Self {
            grid,
            values: nodes.iter().map(|&t| f(t)).collect(),
            derivs: nodes.iter().map(|&t| df(t)).collect(),
        }
    }

    pub fn same_grid(&self, other: &GridFunction) -> Result<()> {
        self.grid.ensure_same(&other.grid)
    }

    /// `self + weight * (other - self)`.
    pub fn relax_towards(&self, other: &GridFunction, weight: f64) -> Result<GridFunction> {
        self.same_grid(other)?;
        let mix = |a: &[f64], b: &[f64]| -> Vec<f64> {
            a.iter().zip(b).map(|(x, y)| (1.0 - weight) * x + weight * y).collect()
        };
        Ok(GridFunction {
            grid: self.grid,
            values: mix(&self.values, &other.values),
            derivs: mix(&self.derivs, &other.derivs),
        })
    }

    /// C^1 norm of `self - other`.
    pub fn distance(&self, other: &GridFunction) -> Result<f64> {
        self.same_grid(other)?;
        let sup = |a: &[f64], b: &[f64]| a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        Ok(sup(&self.values, &other.values).max(sup(&self.derivs, &other.derivs)))
    }

    pub fn max_abs_value(&self) -> f64 {
        sup_abs(&self.values)
    }

    pub fn max_abs_deriv(&self) -> f64 {
        sup_abs(&self.derivs)
    }
}

fn sup_abs(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// `max{ sup|z|, sup|z'| }` over the nodes.
pub fn c1_norm(z: &GridFunction) -> f64 {
    z.max_abs_value().max(z.max_abs_deriv())
}

/// Coefficients of the reduced equation sampled on a grid, together with
/// the inhomogeneous term `b` and its derivative.
///
/// `beta` jumps wherever the burn starts or stops or the exhaust schedule
/// switches, so both one-sided limits are kept: `beta_minus[i]` is the limit
/// from the left of node `i`, `beta_plus[i]` from the right. `beta` holds the
/// nodal representative (their mean in the interior).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Coefficients {
    pub grid: Grid,
    /// Chord slope `a`.
    pub slope: f64,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub beta_minus: Vec<f64>,
    pub beta_plus: Vec<f64>,
    pub b: Vec<f64>,
    pub bprime: Vec<f64>,
}

pub(crate) struct NodalSamples {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub beta_minus: Vec<f64>,
    pub beta_plus: Vec<f64>,
}

pub(crate) fn sample_coefficients(config: &ScenarioConfig, grid: &Grid) -> NodalSamples {
    let n = grid.n;
    let mut out = NodalSamples {
        alpha: Vec::with_capacity(n),
        beta: Vec::with_capacity(n),
        beta_minus: Vec::with_capacity(n),
        beta_plus: Vec::with_capacity(n),
    };
    for i in 0..n {
        let t = grid.node(i);
        let (alpha, minus) = model::alpha_beta_at_sided(config, t, Side::Left);
        let (_, plus) = model::alpha_beta_at_sided(config, t, Side::Right);
        let nodal = match i {
            0 => plus,
            _ if i + 1 == n => minus,
            _ => 0.5 * (minus + plus),
        };
        out.alpha.push(alpha);
        out.beta.push(nodal);
        out.beta_minus.push(minus);
        out.beta_plus.push(plus);
    }
    out
}

/// Trapezoid approximations of `∫ G(t_i, s) f(s) ds` and
/// `∫ dG/dt(t_i, s) f(s) ds` at every node.
///
/// On subinterval `[t_j, t_{j+1}]` the integrand uses `f_plus[j]` and
/// `f_minus[j + 1]`. Writing `G = ((t1 - t) P(t) + (t - t0) Q(t)) / L` with
/// `P(t) = ∫_{t0}^{t} (s - t0) f ds` and `Q(t) = ∫_{t}^{t1} (t1 - s) f ds`
/// gives the derivative as `(Q - P) / L`.
pub(crate) fn kernel_integrals(grid: &Grid, f_minus: &[f64], f_plus: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = grid.n;
    let h = grid.step();
    let len = grid.length();
    let last = (n - 1) as f64;

    let mut prefix = vec![0.0; n];
    for j in 0..n - 1 {
        let left = j as f64 * h * f_plus[j];
        let right = (j + 1) as f64 * h * f_minus[j + 1];
        prefix[j + 1] = prefix[j] + 0.5 * h * (left + right);
    }
    let mut suffix = vec![0.0; n];
    for j in (0..n - 1).rev() {
        let left = (last - j as f64) * h * f_plus[j];
        let right = (last - (j + 1) as f64) * h * f_minus[j + 1];
        suffix[j] = suffix[j + 1] + 0.5 * h * (left + right);
    }

    let mut value = Vec::with_capacity(n);
    let mut deriv = Vec::with_capacity(n);
    for i in 0..n {
        let before = i as f64 * h;
        let after = (last - i as f64) * h;
        value.push((after * prefix[i] + before * suffix[i]) / len);
        deriv.push((suffix[i] - prefix[i]) / len);
    }
    value[0] = 0.0;
    value[n - 1] = 0.0;
    (value, deriv)
}

/// Samples `alpha`, `beta` on the scenario grid and integrates `b`, `b'`.
pub fn build_coefficients(config: &ScenarioConfig) -> Result<Coefficients> {
    config.validate()?;
    build_coefficients_on(config, &Grid::for_config(config)?)
}

/// As [`build_coefficients`] on an arbitrary grid over `[t0, t1]`.
pub fn build_coefficients_on(config: &ScenarioConfig, grid: &Grid) -> Result<Coefficients> {
    let slope = model::chord_shift(config)?.slope;
    let samples = sample_coefficients(config, grid);
    let (int_b, int_db) = kernel_integrals(grid, &samples.beta_minus, &samples.beta_plus);
    Ok(Coefficients {
        grid: *grid,
        slope,
        alpha: samples.alpha,
        beta: samples.beta,
        beta_minus: samples.beta_minus,
        beta_plus: samples.beta_plus,
        b: int_b.into_iter().map(|v| -v).collect(),
        bprime: int_db.into_iter().map(|v| -v).collect(),
    })
}

/// Nodal values of `F(t_i, z_i, z'_i)`.
pub fn nonlinearity_on(z: &GridFunction, coeffs: &Coefficients, scale_height: f64) -> Vec<f64> {
    coeffs
        .alpha
        .iter()
        .zip(z.values.iter().zip(&z.derivs))
        .map(|(&alpha, (&v, &d))| model::nonlinearity(alpha, coeffs.slope, scale_height, v, d))
        .collect()
}

/// One application of the fixed-point operator.
#[allow(non_snake_case)]
pub fn apply_S(z: &GridFunction, coeffs: &Coefficients, config: &ScenarioConfig) -> Result<GridFunction> {
    z.grid.ensure_same(&coeffs.grid)?;
    let forcing = nonlinearity_on(z, coeffs, config.scale_height);
    let (int_f, int_df) = kernel_integrals(&z.grid, &forcing, &forcing);
    let mut values: Vec<f64> = int_f.iter().zip(&coeffs.b).map(|(i, b)| b - i).collect();
    let derivs = int_df.iter().zip(&coeffs.bprime).map(|(i, b)| b - i).collect();
    let n = values.len();
    values[0] = 0.0;
    values[n - 1] = 0.0;
    Ok(GridFunction {
        grid: z.grid,
        values,
        derivs,
    })
}

/// Sup over interior nodes of `|D2 z - F(t, z, z') - beta|`, with `D2` the
/// three-point second difference of the values.
pub fn ode_residual(z: &GridFunction, config: &ScenarioConfig) -> Result<f64> {
    Ok(ode_residuals(z, config)?.into_iter().fold(0.0, f64::max))
}

/// Nodewise residuals behind [`ode_residual`]; the two boundary entries are 0.
pub fn ode_residuals(z: &GridFunction, config: &ScenarioConfig) -> Result<Vec<f64>> {
    let grid = z.grid;
    if grid.n < 5 {
        return Err(Error::Domain(format!(
            "residual needs at least 5 nodes, got {}",
            grid.n
        )));
    }
    let slope = model::chord_shift(config)?.slope;
    let samples = sample_coefficients(config, &grid);
    let h2 = grid.step() * grid.step();
    let zv = &z.values;
    let mut out = vec![0.0; grid.n];
    for i in 1..grid.n - 1 {
        let second = (zv[i - 1] - 2.0 * zv[i] + zv[i + 1]) / h2;
        let rhs = model::nonlinearity(samples.alpha[i], slope, config.scale_height, zv[i], z.derivs[i])
            + samples.beta[i];
        out[i] = (second - rhs).abs();
    }
    Ok(out)
}
