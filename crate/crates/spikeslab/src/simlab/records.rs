//! Result records and persistence.
//!
//! Records go to CSV with a fixed header; per-experiment summaries go to
//! JSON keyed by cell. Both carry the master seed. Wall-clock time is kept
//! on the in-memory record but never written to the CSV: reruns of the same
//! configuration must reproduce the records byte for byte.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::error::Result;

/// Outcome of one replicate under one cell (n, case, setting).
#[derive(Debug, Clone)]
pub struct ResultRecord {
    pub n: usize,
    pub p: usize,
    pub setting_label: String,
    pub case_label: String,
    pub replicate_id: usize,
    /// Master seed of the experiment; replicate streams derive from it and
    /// the cell labels.
    pub seed: u64,
    pub true_model_prob: f64,
    /// Whether the (exact or empirical) MAP model equals γ⁰.
    pub map_hit: bool,
    /// Exact for the enumeration engine; a directed lower bound for Gibbs.
    pub max_incorrect_odds: f64,
    /// Present only for the Gibbs engine with at least two chains.
    pub psrf: Option<f64>,
    pub engine_used: &'static str,
    /// Seconds spent evaluating this record; diagnostic only.
    pub wall_time: f64,
}

impl ResultRecord {
    /// Cell key used in summaries.
    pub fn cell_key(&self) -> String {
        format!(
            "n={}/p={}/case={}/setting={}",
            self.n, self.p, self.case_label, self.setting_label
        )
    }

    /// Whether this record passes the convergence gate (records without a
    /// PSRF always pass).
    pub fn converged(&self, gate: f64) -> bool {
        match self.psrf {
            None => true,
            Some(v) => v < gate,
        }
    }
}

pub const RECORDS_HEADER: &str =
    "n,p,setting,case,replicate,seed,true_model_prob,map_hit,max_incorrect_odds,psrf,engine";

/// Fixed-header CSV of records.
pub fn write_records_csv<W: Write>(records: &[ResultRecord], mut out: W) -> Result<()> {
    writeln!(out, "{RECORDS_HEADER}")?;
    for r in records {
        let psrf = r.psrf.map_or(String::new(), |v| v.to_string());
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.p,
            r.setting_label,
            r.case_label,
            r.replicate_id,
            r.seed,
            r.true_model_prob,
            r.map_hit,
            r.max_incorrect_odds,
            psrf,
            r.engine_used
        )?;
    }
    Ok(())
}

/// Aggregates for one cell, over the gate-passing records.
#[derive(Debug, Clone, Serialize)]
pub struct CellSummary {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
    /// Records dropped by the PSRF gate.
    pub excluded: usize,
}

/// Per-experiment JSON summary: cell key → aggregates.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSummary {
    pub master_seed: u64,
    pub psrf_gate: f64,
    pub cells: BTreeMap<String, CellSummary>,
}

/// Summarize true-model probabilities per cell; gate failures are counted
/// and excluded.
pub fn summarize(records: &[ResultRecord], psrf_gate: f64, master_seed: u64) -> ExperimentSummary {
    let mut grouped: BTreeMap<String, (Vec<f64>, usize)> = BTreeMap::new();
    for r in records {
        let slot = grouped.entry(r.cell_key()).or_default();
        if r.converged(psrf_gate) {
            slot.0.push(r.true_model_prob);
        } else {
            slot.1 += 1;
        }
    }
    let cells = grouped
        .into_iter()
        .map(|(key, (values, excluded))| {
            let count = values.len();
            let mean = if count == 0 {
                f64::NAN
            } else {
                values.iter().sum::<f64>() / count as f64
            };
            let std = if count > 1 {
                (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                    / (count as f64 - 1.0))
                    .sqrt()
            } else {
                0.0
            };
            (
                key,
                CellSummary {
                    mean,
                    std,
                    count,
                    excluded,
                },
            )
        })
        .collect();
    ExperimentSummary {
        master_seed,
        psrf_gate,
        cells,
    }
}
