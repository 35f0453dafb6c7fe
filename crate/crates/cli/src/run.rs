//! The `solve` pipeline: certificates, fixed-point solve, oracle cross-check
//! and the files written for a run.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use rocketbvp::model::chord_shift;
use rocketbvp::operator::{build_coefficients, nonlinearity_on, ode_residuals};
use rocketbvp::oracle::{compare, fd_newton_solve, shooting_solve_with, CompareMetrics, ShootingOptions};
use rocketbvp::solver::{certificate, picard_solve, CertificateMode, ExistenceCertificate, SolveReport};
use rocketbvp::{GridFunction, ScenarioConfig};
use serde::Serialize;

use crate::scenario::ScenarioFile;

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_DISAGREEMENT: i32 = 3;
pub const EXIT_NOT_CERTIFIED: i32 = 4;

pub const CSV_HEADER: [&str; 6] = ["t", "z", "zdot", "x", "v", "residual"];

/// Command-line overrides applied on top of the scenario file.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub damping: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, file: &mut ScenarioFile) {
        if let Some(n) = self.grid {
            file.n_grid = n;
        }
        if let Some(tol) = self.tol {
            file.tol = tol;
        }
        if let Some(w) = self.damping {
            file.damping = w;
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificates {
    pub paper_literal: ExistenceCertificate,
    pub corrected_rigorous: ExistenceCertificate,
}

impl Certificates {
    pub fn compute(config: &ScenarioConfig) -> rocketbvp::Result<Self> {
        Ok(Self {
            paper_literal: certificate(config, CertificateMode::PaperLiteral)?,
            corrected_rigorous: certificate(config, CertificateMode::CorrectedRigorous)?,
        })
    }

    pub fn get(&self, mode: CertificateMode) -> &ExistenceCertificate {
        match mode {
            CertificateMode::PaperLiteral => &self.paper_literal,
            CertificateMode::CorrectedRigorous => &self.corrected_rigorous,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleResult {
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Launch velocity chosen by shooting.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_init: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vs_picard: Option<CompareMetrics>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleSection {
    /// Agreement threshold on sup differences of `z`.
    pub tolerance: f64,
    pub shooting: OracleResult,
    pub fd_newton: OracleResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shooting_vs_fd_newton: Option<CompareMetrics>,
    pub agree: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    pub max_abs_z: f64,
    pub max_abs_zdot: f64,
    /// Integral of the drag acceleration over the flight divided by
    /// `g (t1 - t0)`; `null` without gravity.
    pub drag_gravity_impulse_ratio: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub label: String,
    pub scenario: ScenarioFile,
    pub certificates: Certificates,
    pub solve: SolveReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracles: Option<OracleSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at_unix: Option<u64>,
}

/// Everything produced by one run, before anything touches the disk.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub report: RunReport,
    pub solution: Option<GridFunction>,
    pub config: ScenarioConfig,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        self.report.exit_code
    }
}

pub fn agreement_tolerance(max_abs_z: f64) -> f64 {
    (1e-3 * max_abs_z).max(1e-6)
}

/// Trapezoid rule for the drag acceleration along `z`, relative to gravity.
pub fn drag_gravity_ratio(z: &GridFunction, config: &ScenarioConfig) -> anyhow::Result<Option<f64>> {
    if config.g == 0.0 {
        return Ok(None);
    }
    let coeffs = build_coefficients(config)?;
    let drag = nonlinearity_on(z, &coeffs, config.scale_height);
    let h = z.grid.step();
    let n = drag.len();
    let inner: f64 = drag[1..n - 1].iter().map(|f| f.abs()).sum();
    let integral = h * (inner + 0.5 * (drag[0].abs() + drag[n - 1].abs()));
    Ok(Some(integral / (config.g * config.duration())))
}

/// Runs the full solve pipeline on an already validated scenario.
pub fn run_scenario(file: ScenarioFile, label: String) -> anyhow::Result<RunOutcome> {
    let config = file.to_config()?;
    let certificates = Certificates::compute(&config)?;

    let (z, solve) = match picard_solve(&config) {
        Ok(pair) => pair,
        Err(e) => {
            let Some(partial) = e.solve_report().cloned() else {
                return Err(e.into());
            };
            let report = RunReport {
                schema_version: SCHEMA_VERSION,
                label,
                scenario: file,
                certificates,
                solve: partial,
                oracles: None,
                diagnostics: None,
                exit_code: EXIT_NOT_CONVERGED,
                generated_at_unix: None,
            };
            return Ok(RunOutcome {
                report,
                solution: None,
                config,
            });
        }
    };

    let max_abs_z = z.max_abs_value();
    let tolerance = agreement_tolerance(max_abs_z);
    let a = chord_shift(&config)?.slope;

    let opts = ShootingOptions {
        prefer: Some(z.derivs[0] + a),
        ..ShootingOptions::default()
    };
    let shooting = shooting_solve_with(&config, &opts)
        .and_then(|s| Ok((s.v_init, s.trajectory.to_grid_function(&config)?)));
    let fd = fd_newton_solve(&config);

    let mut section = OracleSection {
        tolerance,
        shooting: oracle_result(&z, shooting.as_ref().map(|(_, g)| g), shooting.as_ref().ok().map(|(v, _)| *v))?,
        fd_newton: oracle_result(&z, fd.as_ref(), None)?,
        shooting_vs_fd_newton: None,
        agree: false,
    };
    if let (Ok((_, zs)), Ok(zf)) = (&shooting, &fd) {
        section.shooting_vs_fd_newton = Some(compare(zs, zf)?);
    }
    let pair_ok = |m: &Option<CompareMetrics>| m.is_some_and(|m| m.sup_value <= tolerance);
    section.agree = section.shooting.ok
        && section.fd_newton.ok
        && pair_ok(&section.shooting.vs_picard)
        && pair_ok(&section.fd_newton.vs_picard)
        && pair_ok(&section.shooting_vs_fd_newton);

    let diagnostics = Diagnostics {
        max_abs_z,
        max_abs_zdot: z.max_abs_deriv(),
        drag_gravity_impulse_ratio: drag_gravity_ratio(&z, &config)?,
    };
    let exit_code = if section.agree { EXIT_OK } else { EXIT_DISAGREEMENT };
    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        label,
        scenario: file,
        certificates,
        solve,
        oracles: Some(section),
        diagnostics: Some(diagnostics),
        exit_code,
        generated_at_unix: None,
    };
    Ok(RunOutcome {
        report,
        solution: Some(z),
        config,
    })
}

fn oracle_result(
    z: &GridFunction,
    candidate: Result<&GridFunction, &rocketbvp::Error>,
    v_init: Option<f64>,
) -> anyhow::Result<OracleResult> {
    Ok(match candidate {
        Ok(other) => OracleResult {
            ok: true,
            error: None,
            v_init,
            vs_picard: Some(compare(z, other)?),
        },
        Err(e) => OracleResult {
            ok: false,
            error: Some(e.to_string()),
            v_init: None,
            vs_picard: None,
        },
    })
}

/// `--out`, else `ROCKETBVP_OUT`, else the working directory.
pub fn output_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("ROCKETBVP_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_trajectory(path: &Path, z: &GridFunction, config: &ScenarioConfig) -> anyhow::Result<()> {
    let shift = chord_shift(config)?;
    let residuals = ode_residuals(z, config).unwrap_or_else(|_| vec![f64::NAN; z.grid.n]);
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut out = csv::Writer::from_writer(BufWriter::new(file));
    out.write_record(CSV_HEADER)?;
    for (i, t) in z.grid.nodes().into_iter().enumerate() {
        let (zi, di) = (z.values[i], z.derivs[i]);
        let row = [t, zi, di, zi + shift.at(t), di + shift.slope, residuals[i]];
        out.write_record(row.map(format_number))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_report(path: &Path, report: &RunReport) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, report)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

/// Writes `<label>.trajectory.csv` (when a solution exists) and
/// `<label>.report.json` into `dir`.
pub fn write_outputs(dir: &Path, outcome: &RunOutcome) -> anyhow::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let label = &outcome.report.label;
    let mut written = Vec::new();
    if let Some(z) = &outcome.solution {
        let path = dir.join(format!("{label}.trajectory.csv"));
        write_trajectory(&path, z, &outcome.config)?;
        written.push(path);
    }
    let path = dir.join(format!("{label}.report.json"));
    write_report(&path, &outcome.report)?;
    written.push(path);
    Ok(written)
}

/// Reads a trajectory file back as its header and numeric rows.
pub fn read_trajectory(path: &Path) -> anyhow::Result<(Vec<String>, Vec<[f64; 6]>)> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("cannot read {}", path.display()))?;
    let header = reader.headers()?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let mut row = [0.0; 6];
        for (slot, field) in row.iter_mut().zip(record.iter()) {
            *slot = field.parse()?;
        }
        rows.push(row);
    }
    Ok((header, rows))
}
