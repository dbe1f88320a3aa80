//! Consistency sweeps: track the true model's posterior mass and the
//! dominance statistic across a growing sample-size grid, on one fixed
//! scenario family. Supports the null-truth mode (β⁰ = 0, target model ∅).

use rayon::prelude::*;

use crate::error::Result;
use crate::simlab::config::ExperimentConfig;
use crate::simlab::records::ResultRecord;
use crate::simlab::table1::{run_replicate, summarize_cells};

/// Per-(n, setting) aggregates of a sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub n: usize,
    pub p: usize,
    pub setting_label: String,
    pub mean_true_model_prob: f64,
    pub mean_max_incorrect_odds: f64,
    pub count: usize,
    pub excluded: usize,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub records: Vec<ResultRecord>,
    pub rows: Vec<SweepRow>,
}

/// Run the scenario family over the n grid.
pub fn run_consistency_sweep(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = cfg
        .n_grid
        .iter()
        .flat_map(|&n| (0..cfg.replicates).map(move |m| (n, m)))
        .collect();
    let nested: Result<Vec<Vec<ResultRecord>>> = jobs
        .par_iter()
        .map(|&(n, m)| run_replicate(cfg, n, m))
        .collect();
    let records: Vec<ResultRecord> = nested?.into_iter().flatten().collect();

    let rows = summarize_cells(cfg, &records)
        .into_iter()
        .map(|row| {
            let odds_mean = {
                let included: Vec<f64> = records
                    .iter()
                    .filter(|r| {
                        r.n == row.n
                            && r.setting_label == row.setting_label
                            && r.converged(cfg.psrf_gate)
                    })
                    .map(|r| r.max_incorrect_odds)
                    .collect();
                if included.is_empty() {
                    f64::NAN
                } else {
                    included.iter().sum::<f64>() / included.len() as f64
                }
            };
            SweepRow {
                n: row.n,
                p: row.p,
                setting_label: row.setting_label,
                mean_true_model_prob: row.mean,
                mean_max_incorrect_odds: odds_mean,
                count: row.count,
                excluded: row.excluded,
            }
        })
        .collect();
    Ok(SweepOutput { records, rows })
}
