//! Run orchestration and on-disk artifacts: envelope CSV, metrics JSON,
//! SVG plot and a checksummed manifest.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{check_path, with_override, SimulationConfig};
use crate::doppler::doppler_average_envelope;
use crate::error::{Error, Result};
use crate::plot::render_svg;
use crate::propagation::{intensity_profile, train_metrics, EnvelopeField, TrainMetrics};

pub const TOOL: &str = "qscomb";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Envelope plus its train metrics (or why they could not be formed).
#[derive(Debug, Clone)]
pub struct SimulationOutput {
    pub config: SimulationConfig,
    pub field: EnvelopeField,
    pub metrics: std::result::Result<TrainMetrics, String>,
}

/// Computes the envelope described by `cfg`, velocity-averaged when v_sigma > 0.
pub fn simulate(cfg: &SimulationConfig) -> Result<SimulationOutput> {
    let opts = cfg.envelope_options();
    let field = if cfg.doppler.v_sigma > 0.0 {
        doppler_average_envelope(&cfg.grid, &cfg.pump, &cfg.probe, &cfg.medium, &cfg.doppler, &opts)?
    } else {
        intensity_profile(&cfg.grid, &cfg.pump, &cfg.probe, &cfg.medium, &opts)?
    };
    if field.any_saturated() {
        log::warn!(
            "{} samples hit the saturation cap",
            field.saturated.iter().filter(|&&s| s).count()
        );
    }
    let metrics = train_metrics(&field).map_err(|e| e.to_string());
    Ok(SimulationOutput {
        config: cfg.clone(),
        field,
        metrics,
    })
}

fn fmt(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn envelope_csv(field: &EnvelopeField) -> Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record([
        "tau_s",
        "re_eps",
        "im_eps",
        "intensity",
        "incident_intensity",
        "saturated",
    ])
    .map_err(csv_err)?;
    for i in 0..field.tau.len() {
        w.write_record([
            fmt(field.tau[i]),
            fmt(field.values[i].re),
            fmt(field.values[i].im),
            fmt(field.values[i].norm_sqr()),
            fmt(field.incident[i].norm_sqr()),
            (field.saturated[i] as u8).to_string(),
        ])
        .map_err(csv_err)?;
    }
    into_string(w)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Output description written next to the artifacts. Contains no timing, so
/// identical inputs give an identical manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub mode: String,
    pub config: serde_json::Value,
    /// File name → SHA-256 of its bytes.
    pub files: BTreeMap<String, String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn pretty<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

/// Writes files in order and returns the manifest describing them.
fn write_all(dir: &Path, files: Vec<(&str, String)>, command: &str, cfg: &SimulationConfig) -> Result<RunManifest> {
    std::fs::create_dir_all(dir)?;
    let mut sums = BTreeMap::new();
    for (name, body) in files {
        std::fs::write(dir.join(name), &body)?;
        sums.insert(name.to_string(), sha256_hex(body.as_bytes()));
    }
    let manifest = RunManifest {
        tool: TOOL.into(),
        version: VERSION.into(),
        command: command.into(),
        mode: cfg.mode.to_string(),
        config: cfg.canonical_value(),
        files: sums,
    };
    std::fs::write(dir.join("manifest.json"), pretty(&manifest)?)?;
    Ok(manifest)
}

#[derive(Serialize)]
struct MetricsFile<'a> {
    metrics: Option<&'a TrainMetrics>,
    error: Option<&'a str>,
    rabi_period_s: f64,
    saturated_samples: usize,
}

/// config.json, envelope.csv, metrics.json, envelope.svg and manifest.json.
pub fn write_simulation(out: &SimulationOutput, dir: &Path) -> Result<RunManifest> {
    let metrics = MetricsFile {
        metrics: out.metrics.as_ref().ok(),
        error: out.metrics.as_ref().err().map(String::as_str),
        rabi_period_s: std::f64::consts::TAU / out.config.pump.rabi(),
        saturated_samples: out.field.saturated.iter().filter(|&&s| s).count(),
    };
    let files = vec![
        ("config.json", out.config.canonical_json()),
        ("envelope.csv", envelope_csv(&out.field)?),
        ("metrics.json", pretty(&metrics)?),
        ("envelope.svg", render_svg(&out.field)?),
    ];
    write_all(dir, files, "simulate", &out.config)
}

/// One sweep row; failures are kept, not propagated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub metrics: Option<TrainMetrics>,
    pub error: Option<String>,
}

/// Sets `path` to each value and simulates concurrently. An unknown path is
/// a config error; failures of individual rows are recorded in the row.
pub fn run_sweep(cfg: &SimulationConfig, path: &str, values: &[f64]) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::config("sweep.values", "at least one value", "none"));
    }
    check_path(cfg, path)?;
    Ok(values
        .par_iter()
        .map(|&v| {
            let row = with_override(cfg, path, v).and_then(|c| simulate(&c));
            match row {
                Ok(out) => match out.metrics {
                    Ok(m) => SweepRow {
                        value: v,
                        metrics: Some(m),
                        error: None,
                    },
                    Err(e) => SweepRow {
                        value: v,
                        metrics: None,
                        error: Some(e),
                    },
                },
                Err(e) => SweepRow {
                    value: v,
                    metrics: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect())
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record([
        "param_value",
        "period_s",
        "fwhm_s",
        "contrast",
        "mean_gain",
        "n_peaks",
        "error",
    ])
    .map_err(csv_err)?;
    for r in rows {
        let rec = match &r.metrics {
            Some(m) => [
                fmt(r.value),
                fmt(m.repetition_period),
                fmt(m.peak_fwhm),
                fmt(m.contrast),
                fmt(m.mean_gain),
                m.n_peaks.to_string(),
                String::new(),
            ],
            None => [
                fmt(r.value),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                r.error.clone().unwrap_or_default(),
            ],
        };
        w.write_record(rec).map_err(csv_err)?;
    }
    into_string(w)
}

/// sweep.csv and manifest.json.
pub fn write_sweep(cfg: &SimulationConfig, path: &str, rows: &[SweepRow], dir: &Path) -> Result<RunManifest> {
    write_all(
        dir,
        vec![("sweep.csv", sweep_csv(rows)?)],
        &format!("sweep {path}"),
        cfg,
    )
}
