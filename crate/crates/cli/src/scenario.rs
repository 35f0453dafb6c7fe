//! Scenario files: JSON documents mirroring `ScenarioConfig`.

use std::path::Path;

use anyhow::{anyhow, Context};
use rocketbvp::model::{
    DEFAULT_DAMPING, DEFAULT_GRAVITY, DEFAULT_MAX_ITER, DEFAULT_N_GRID, DEFAULT_RHO0, DEFAULT_SCALE_HEIGHT,
    DEFAULT_TOL,
};
use rocketbvp::{ExhaustProfile, MassProfile, ScenarioConfig};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub t0: f64,
    pub t1: f64,
    pub x0: f64,
    pub x1: f64,
    #[serde(default = "default_g")]
    pub g: f64,
    #[serde(rename = "A")]
    pub area: f64,
    #[serde(rename = "C_D")]
    pub drag_coefficient: f64,
    #[serde(default = "default_rho0")]
    pub rho0: f64,
    #[serde(rename = "H", default = "default_h")]
    pub scale_height: f64,
    pub mass: MassSpec,
    pub exhaust: ExhaustSpec,
    #[serde(default = "default_n_grid")]
    pub n_grid: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_damping")]
    pub damping: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MassSpec {
    Constant {
        mass: f64,
    },
    LinearBurn {
        m_dry: f64,
        propellant: f64,
        burn_rate: f64,
        /// Defaults to `t0`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ignition: Option<f64>,
        /// Defaults to the time the propellant runs out.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        burnout: Option<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExhaustSpec {
    Constant { c: f64 },
    Piecewise { segments: Vec<Segment> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub from: f64,
    pub c: f64,
}

fn default_g() -> f64 {
    DEFAULT_GRAVITY
}
fn default_rho0() -> f64 {
    DEFAULT_RHO0
}
fn default_h() -> f64 {
    DEFAULT_SCALE_HEIGHT
}
fn default_n_grid() -> usize {
    DEFAULT_N_GRID
}
fn default_tol() -> f64 {
    DEFAULT_TOL
}
fn default_max_iter() -> usize {
    DEFAULT_MAX_ITER
}
fn default_damping() -> f64 {
    DEFAULT_DAMPING
}

impl ScenarioFile {
    pub fn parse(text: &str, origin: &str) -> anyhow::Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| anyhow!("{origin}:{}:{}: {e}", e.line(), e.column()))
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// The explicit label, else the file stem.
    pub fn label_or(&self, path: &Path) -> String {
        let raw = self.label.clone().unwrap_or_else(|| {
            path.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "scenario".into())
        });
        raw.chars()
            .map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' })
            .collect()
    }

    pub fn to_config(&self) -> anyhow::Result<ScenarioConfig> {
        let mass = match &self.mass {
            MassSpec::Constant { mass } => MassProfile::constant(*mass)?,
            MassSpec::LinearBurn {
                m_dry,
                propellant,
                burn_rate,
                ignition,
                burnout,
            } => MassProfile::linear_burn(*m_dry, *propellant, *burn_rate, ignition.unwrap_or(self.t0), *burnout)?,
        };
        let exhaust = match &self.exhaust {
            ExhaustSpec::Constant { c } => ExhaustProfile::constant(*c)?,
            ExhaustSpec::Piecewise { segments } => {
                ExhaustProfile::piecewise(segments.iter().map(|s| (s.from, s.c)).collect())?
            }
        };
        let config = ScenarioConfig {
            t0: self.t0,
            t1: self.t1,
            x0: self.x0,
            x1: self.x1,
            g: self.g,
            area: self.area,
            drag_coefficient: self.drag_coefficient,
            rho0: self.rho0,
            scale_height: self.scale_height,
            mass,
            exhaust,
            n_grid: self.n_grid,
            tol: self.tol,
            max_iter: self.max_iter,
            damping: self.damping,
        };
        config.validate()?;
        Ok(config)
    }
}
