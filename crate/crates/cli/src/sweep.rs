//! Sweep execution and result tables.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use uavcov::analytic::{cellfree_coverage, downlink_coverage, jensen_bound};
use uavcov::montecarlo::{estimate_cellfree, estimate_downlink};

use crate::config::{apply, Format, Metric, RunConfig};

pub const CSV_COLUMNS: [&str; 10] = [
    "sweep_var",
    "sweep_value",
    "p_analytic",
    "p_mc",
    "mc_stderr",
    "z_score",
    "n_samples",
    "seed",
    "wall_ms",
    "error",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub sweep_var: String,
    /// In the sweep's display unit (degrees, dB, ...).
    pub sweep_value: f64,
    pub p_analytic: Option<f64>,
    pub p_mc: Option<f64>,
    pub mc_stderr: Option<f64>,
    /// (p_analytic − p_mc) / mc_stderr.
    pub z_score: Option<f64>,
    pub n_samples: Option<u64>,
    pub seed: Option<u64>,
    pub wall_ms: f64,
    /// Set when this point failed; the other columns hold what was computed.
    pub error: Option<String>,
}

fn evaluate(cfg: &RunConfig, x: f64) -> Row {
    let start = Instant::now();
    let mut row = Row {
        sweep_var: cfg.sweep.var.name().to_string(),
        sweep_value: x,
        p_analytic: None,
        p_mc: None,
        mc_stderr: None,
        z_score: None,
        n_samples: None,
        seed: None,
        wall_ms: 0.0,
        error: None,
    };
    let mut errors = Vec::new();
    match apply(cfg, &cfg.sweep, x) {
        Err(e) => errors.push(e),
        Ok((params, elev)) => {
            if cfg.mode.analytic() {
                let r = match cfg.metric {
                    Metric::Downlink => downlink_coverage(&params, &elev),
                    Metric::Cellfree => cellfree_coverage(&params, &elev),
                    Metric::Jensen => jensen_bound(&params, &elev),
                };
                match r {
                    Ok(r) => row.p_analytic = Some(r.value),
                    Err(e) => errors.push(format!("analytic: {e}")),
                }
            }
            if cfg.mode.montecarlo() {
                let r = match cfg.metric {
                    Metric::Downlink | Metric::Jensen => estimate_downlink(&params, &elev, &cfg.mc),
                    Metric::Cellfree => estimate_cellfree(&params, &elev, &cfg.mc),
                };
                match r {
                    Ok(est) => {
                        row.p_mc = Some(est.mean);
                        row.mc_stderr = Some(est.std_error);
                        row.n_samples = Some(est.n_samples);
                        row.seed = Some(est.seed);
                    }
                    Err(e) => errors.push(format!("montecarlo: {e}")),
                }
            }
        }
    }
    if let (Some(a), Some(m), Some(se)) = (row.p_analytic, row.p_mc, row.mc_stderr) {
        row.z_score = Some(if se > 0.0 {
            (a - m) / se
        } else if a == m {
            0.0
        } else {
            (a - m).signum() * f64::INFINITY
        });
    }
    if !errors.is_empty() {
        row.error = Some(errors.join("; "));
    }
    row.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    row
}

/// Evaluates every sweep point, in parallel, returning rows in sweep order.
/// A failing point keeps its row with the `error` column set.
pub fn run_sweep(cfg: &RunConfig) -> Vec<Row> {
    cfg.sweep
        .display_values()
        .into_par_iter()
        .map(|x| evaluate(cfg, x))
        .collect()
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.sweep_var.clone(),
            r.sweep_value.to_string(),
            opt(r.p_analytic),
            opt(r.p_mc),
            opt(r.mc_stderr),
            opt(r.z_score),
            opt(r.n_samples),
            opt(r.seed),
            format!("{:.3}", r.wall_ms),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(rows: &[Row], out: W) -> serde_json::Result<()> {
    serde_json::to_writer_pretty(out, rows)
}

pub fn write_rows<W: Write>(rows: &[Row], format: Format, mut out: W) -> std::io::Result<()> {
    match format {
        Format::Csv => write_csv(rows, &mut out).map_err(std::io::Error::other),
        Format::Json => {
            write_json(rows, &mut out).map_err(std::io::Error::other)?;
            writeln!(out)
        }
    }
}
