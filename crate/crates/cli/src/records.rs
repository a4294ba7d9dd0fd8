//! CSV row types. Every output table is a header line followed by one row
//! per record; floats are written in shortest round-trip form so reading a
//! file back reproduces the rows exactly. Empty fields mean "not
//! applicable" (e.g. `n_mc` on a GA row, or performance of a point where the
//! circuit model failed).

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tiaopt_core::{AlgorithmConfig, DesignPoint, MeritBreakdown, PerformanceVariables};

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    r.deserialize()
        .collect::<Result<Vec<T>, _>>()
        .with_context(|| format!("reading {}", path.display()))
}

/// Algorithm parameters spread over fixed columns.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AlgoColumns {
    pub kind: &'static str,
    pub n_mc: Option<u64>,
    pub n_c: Option<usize>,
    pub gen: Option<usize>,
    pub mut_percent: Option<f64>,
}

impl From<&AlgorithmConfig> for AlgoColumns {
    fn from(a: &AlgorithmConfig) -> Self {
        match a {
            AlgorithmConfig::Systematic => AlgoColumns {
                kind: "systematic",
                ..Default::default()
            },
            AlgorithmConfig::MonteCarlo(c) => AlgoColumns {
                kind: "montecarlo",
                n_mc: Some(c.n_mc),
                ..Default::default()
            },
            AlgorithmConfig::Genetic(c) => AlgoColumns {
                kind: "ga",
                n_c: Some(c.n_c),
                gen: Some(c.gen),
                mut_percent: Some(c.mut_percent),
                ..Default::default()
            },
        }
    }
}

/// One grid point with its performance and merits. Used for the full grid,
/// the projection tables and the systematic optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRow {
    pub rf: f64,
    pub cf: f64,
    pub vd: f64,
    pub snr_db: Option<f64>,
    pub bandwidth_hz: Option<f64>,
    pub phase_margin_deg: Option<f64>,
    pub m_snr: f64,
    pub m_bandwidth: f64,
    pub m_phase: f64,
    pub global: f64,
}

impl PointRow {
    pub fn new(p: &DesignPoint, perf: Option<&PerformanceVariables>, m: &MeritBreakdown) -> Self {
        PointRow {
            rf: p.rf,
            cf: p.cf,
            vd: p.vd,
            snr_db: perf.map(|v| v.snr_db),
            bandwidth_hz: perf.map(|v| v.bandwidth_hz),
            phase_margin_deg: perf.map(|v| v.phase_margin_deg),
            m_snr: m.m_snr,
            m_bandwidth: m.m_bandwidth,
            m_phase: m.m_phase,
            global: m.global,
        }
    }
}

/// Result of a single search run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchRow {
    pub kind: String,
    pub seed: Option<u64>,
    pub n_mc: Option<u64>,
    pub n_c: Option<usize>,
    pub gen: Option<usize>,
    pub mut_percent: Option<f64>,
    pub rf: f64,
    pub cf: f64,
    pub vd: f64,
    pub m_snr: f64,
    pub m_bandwidth: f64,
    pub m_phase: f64,
    pub global: f64,
    pub evaluations: u64,
    pub nominal_evaluations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryRow {
    pub generation: usize,
    pub population_best: f64,
    pub best_so_far: f64,
}

/// One run of an experiment. Design values are empty for runs that never
/// produced a valid first generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub sweep_index: usize,
    pub run_index: u64,
    pub seed: u64,
    pub epsilon: f64,
    pub best_merit: f64,
    pub evaluations: u64,
    pub nominal_evaluations: u64,
    pub rf: Option<f64>,
    pub cf: Option<f64>,
    pub vd: Option<f64>,
}

/// One sweep entry of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub sweep_index: usize,
    pub kind: String,
    pub n_mc: Option<u64>,
    pub n_c: Option<usize>,
    pub gen: Option<usize>,
    pub mut_percent: Option<f64>,
    pub n_runs: u64,
    pub nominal_evaluations: u64,
    pub mean_evaluations: f64,
    pub eps95: f64,
    /// The percentile fell on a run with zero merit; the true value is >= 100.
    pub censored: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfRow {
    pub sweep_index: usize,
    pub epsilon: f64,
    pub f: f64,
}

/// Power-law fit of eps95 against the sweep variable (`n_mc` for Monte
/// Carlo, `n_c` for GA families sharing `gen` and `mut_percent`). Fit
/// columns are empty when fewer than three usable points exist.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub kind: String,
    pub variable: String,
    pub gen: Option<usize>,
    pub mut_percent: Option<f64>,
    pub n_points: usize,
    pub beta: Option<f64>,
    pub log_intercept: Option<f64>,
    pub r_squared: Option<f64>,
}

/// A run whose error is within its sweep entry's eps95.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloudRow {
    pub sweep_index: usize,
    pub run_index: u64,
    pub rf: f64,
    pub cf: f64,
    pub vd: f64,
    pub merit: f64,
    pub epsilon: f64,
}
