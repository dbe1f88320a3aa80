//! The frequentist replication protocol: many independent datasets per
//! cell (sample size × prior case × slab setting), each scored for the true
//! model's posterior probability, then aggregated to per-cell means and
//! standard deviations.
//!
//! Datasets are shared across settings within a cell — each replicate's
//! design and noise streams depend only on (n, p, replicate) — so setting
//! comparisons are paired. Replicates run in parallel; every random draw
//! comes from a label-derived stream, so the records are identical for any
//! worker count.

use rayon::prelude::*;

use crate::error::Result;
use crate::model::TruthSpec;
use crate::simlab::cell::evaluate_instance;
use crate::simlab::config::ExperimentConfig;
use crate::simlab::datagen::{gen_dataset, gen_orthonormal_design};
use crate::simlab::records::ResultRecord;
use crate::simlab::rng::substream_seed;

/// Mean/std of the true-model posterior probability for one cell.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub n: usize,
    pub p: usize,
    pub case_label: String,
    pub setting_label: String,
    pub mean: f64,
    pub std: f64,
    pub count: usize,
    pub excluded: usize,
}

#[derive(Debug, Clone)]
pub struct Table1Output {
    pub records: Vec<ResultRecord>,
    pub summary: Vec<SummaryRow>,
}

/// Truth vector for dimension p: the configured nonzero coefficients on the
/// leading coordinates, zero elsewhere.
pub(crate) fn truth_at(cfg: &ExperimentConfig, p: usize) -> Result<TruthSpec> {
    let mut beta = vec![0.0; p];
    if !cfg.null_truth {
        beta[..cfg.beta_nonzero.len()].copy_from_slice(&cfg.beta_nonzero);
    }
    TruthSpec::new(beta, cfg.sigma0)
}

/// One replicate of one (n, p) point: generate the dataset and score it
/// under every setting.
pub(crate) fn run_replicate(
    cfg: &ExperimentConfig,
    n: usize,
    replicate: usize,
) -> Result<Vec<ResultRecord>> {
    let p = cfg.dimension_at(n);
    let truth = truth_at(cfg, p)?;
    let gamma0 = truth.gamma0();
    let prior = cfg.prior_case.build(p, truth.true_size())?;

    let design_label = if cfg.fixed_design {
        format!("n={n}/p={p}/design")
    } else {
        format!("n={n}/p={p}/rep={replicate}/design")
    };
    let x = gen_orthonormal_design(n, p, substream_seed(cfg.seed, &design_label))?;
    let noise_label = format!("n={n}/p={p}/rep={replicate}/noise");
    let data = gen_dataset(&x, &truth, substream_seed(cfg.seed, &noise_label))?;

    let case_label = cfg.prior_case.label().to_string();
    let mut records = Vec::with_capacity(cfg.settings.len());
    for setting in &cfg.settings {
        let gibbs_label = format!(
            "n={n}/p={p}/case={case_label}/setting={}/rep={replicate}/gibbs",
            setting.label()
        );
        let start = std::time::Instant::now();
        let eval = evaluate_instance(
            &data,
            setting,
            cfg.nu,
            &prior,
            &gamma0,
            cfg.engine,
            &cfg.gibbs,
            substream_seed(cfg.seed, &gibbs_label),
            cfg.p_limit,
        )?;
        records.push(ResultRecord {
            n,
            p,
            setting_label: setting.label(),
            case_label: case_label.clone(),
            replicate_id: replicate,
            seed: cfg.seed,
            true_model_prob: eval.true_model_prob,
            map_hit: eval.map_hit,
            max_incorrect_odds: eval.max_incorrect_odds,
            psrf: eval.psrf,
            engine_used: eval.engine_used,
            wall_time: start.elapsed().as_secs_f64(),
        });
    }
    Ok(records)
}

/// Run the full grid: every n, every replicate, every setting.
pub fn run_table1(cfg: &ExperimentConfig) -> Result<Table1Output> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = cfg
        .n_grid
        .iter()
        .flat_map(|&n| (0..cfg.replicates).map(move |m| (n, m)))
        .collect();
    // Indexed parallel collect preserves job order, so the record layout is
    // independent of the worker count.
    let nested: Result<Vec<Vec<ResultRecord>>> = jobs
        .par_iter()
        .map(|&(n, m)| run_replicate(cfg, n, m))
        .collect();
    let records: Vec<ResultRecord> = nested?.into_iter().flatten().collect();
    let summary = summarize_cells(cfg, &records);
    Ok(Table1Output { records, summary })
}

/// Group records into cells in first-seen order and aggregate the
/// gate-passing true-model probabilities.
pub(crate) fn summarize_cells(cfg: &ExperimentConfig, records: &[ResultRecord]) -> Vec<SummaryRow> {
    let mut order: Vec<String> = Vec::new();
    let mut groups: std::collections::HashMap<String, Vec<&ResultRecord>> =
        std::collections::HashMap::new();
    for r in records {
        let key = r.cell_key();
        groups.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            Vec::new()
        });
        groups.get_mut(&r.cell_key()).unwrap().push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let rs = &groups[&key];
            let included: Vec<f64> = rs
                .iter()
                .filter(|r| r.converged(cfg.psrf_gate))
                .map(|r| r.true_model_prob)
                .collect();
            let excluded = rs.len() - included.len();
            let count = included.len();
            let mean = if count == 0 {
                f64::NAN
            } else {
                included.iter().sum::<f64>() / count as f64
            };
            let std = if count > 1 {
                (included.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                    / (count as f64 - 1.0))
                    .sqrt()
            } else {
                0.0
            };
            let first = rs[0];
            SummaryRow {
                n: first.n,
                p: first.p,
                case_label: first.case_label.clone(),
                setting_label: first.setting_label.clone(),
                mean,
                std,
                count,
                excluded,
            }
        })
        .collect()
}
