//! One-parameter sweeps over a base scenario.

use std::str::FromStr;

use anyhow::{bail, Context};
use rayon::prelude::*;
use serde::Serialize;

use crate::run::{run_scenario, EXIT_INPUT};
use crate::scenario::{ExhaustSpec, MassSpec, ScenarioFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    Area,
    DragCoefficient,
    BurnRate,
    /// Magnitude of a constant exhaust velocity; the sign stays negative.
    ExhaustSpeed,
    X1,
}

impl FromStr for SweepParam {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        Ok(match s {
            "A" => Self::Area,
            "C_D" => Self::DragCoefficient,
            "burn_rate" => Self::BurnRate,
            "c" | "|c|" => Self::ExhaustSpeed,
            "x1" => Self::X1,
            _ => bail!("unknown sweep parameter {s:?}; expected one of A, C_D, burn_rate, c, x1"),
        })
    }
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            Self::Area => "A",
            Self::DragCoefficient => "C_D",
            Self::BurnRate => "burn_rate",
            Self::ExhaustSpeed => "c",
            Self::X1 => "x1",
        }
    }

    pub fn set(self, file: &mut ScenarioFile, value: f64) -> anyhow::Result<()> {
        match self {
            Self::Area => file.area = value,
            Self::DragCoefficient => file.drag_coefficient = value,
            Self::BurnRate => match &mut file.mass {
                MassSpec::LinearBurn { burn_rate, .. } => *burn_rate = value,
                MassSpec::Constant { .. } => bail!("burn_rate sweep needs a linear_burn mass profile"),
            },
            Self::ExhaustSpeed => file.exhaust = ExhaustSpec::Constant { c: -value.abs() },
            Self::X1 => file.x1 = value,
        }
        Ok(())
    }
}

/// Parses `LO:HI`.
pub fn parse_range(s: &str) -> anyhow::Result<(f64, f64)> {
    let (lo, hi) = s.split_once(':').with_context(|| format!("range {s:?} is not LO:HI"))?;
    let lo: f64 = lo.trim().parse().with_context(|| format!("bad range start {lo:?}"))?;
    let hi: f64 = hi.trim().parse().with_context(|| format!("bad range end {hi:?}"))?;
    if !(lo.is_finite() && hi.is_finite()) {
        bail!("range bounds must be finite");
    }
    Ok((lo, hi))
}

/// `steps` evenly spaced values from `lo` to `hi`; a single step is `lo`.
pub fn sweep_values(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..steps)
            .map(|k| lo + (hi - lo) * k as f64 / (steps - 1) as f64)
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: &'static str,
    pub value: f64,
    pub exit_code: i32,
    pub converged: bool,
    pub iterations: usize,
    pub max_abs_z: Option<f64>,
    pub linear: bool,
    pub certified_paper: bool,
    pub certified_rigorous: bool,
    pub drag_gravity_impulse_ratio: Option<f64>,
    pub error: Option<String>,
}

fn run_one(base: &ScenarioFile, param: SweepParam, value: f64) -> SweepRow {
    let failed = |error: String| SweepRow {
        param: param.name(),
        value,
        exit_code: EXIT_INPUT,
        converged: false,
        iterations: 0,
        max_abs_z: None,
        linear: false,
        certified_paper: false,
        certified_rigorous: false,
        drag_gravity_impulse_ratio: None,
        error: Some(error),
    };
    let mut file = base.clone();
    if let Err(e) = param.set(&mut file, value) {
        return failed(format!("{e:#}"));
    }
    match run_scenario(file, String::new()) {
        Ok(outcome) => {
            let r = &outcome.report;
            let diag = r.diagnostics.as_ref();
            SweepRow {
                param: param.name(),
                value,
                exit_code: r.exit_code,
                converged: r.solve.converged,
                iterations: r.solve.iterations,
                max_abs_z: diag.map(|d| d.max_abs_z),
                linear: r.certificates.corrected_rigorous.linear,
                certified_paper: r.certificates.paper_literal.verdict_overall,
                certified_rigorous: r.certificates.corrected_rigorous.verdict_overall,
                drag_gravity_impulse_ratio: diag.and_then(|d| d.drag_gravity_impulse_ratio),
                error: None,
            }
        }
        Err(e) => failed(format!("{e:#}")),
    }
}

/// Solves every point of the sweep in parallel; rows come back in order.
pub fn run_sweep(base: &ScenarioFile, param: SweepParam, values: &[f64]) -> Vec<SweepRow> {
    values.par_iter().map(|&v| run_one(base, param, v)).collect()
}

pub fn write_rows<W: std::io::Write>(out: W, rows: &[SweepRow]) -> anyhow::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}
