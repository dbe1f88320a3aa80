//! Command-line front end for the spikeslab engine: dataset generation,
//! exact enumeration, Gibbs sampling, slab-scale priors, assumption checks,
//! and the simulation experiments.

mod dataio;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use spikeslab::simlab::{
    self, run_consistency_sweep, run_regimes, run_table1, summarize, write_records_csv,
    ExperimentConfig, RegimeParams, ResultRecord,
};
use spikeslab::{
    check_assumptions, enumerate_posterior, gprior_posterior, pmc_summary, run_chains,
    CheckOptions, Error, GPriorDensity, GibbsConfig, ModelPrior, RateConfig, Result, SlabSpec,
    StateVector, TruthSpec,
};

#[derive(Parser)]
#[command(
    name = "spikeslab",
    about = "Bayesian variable selection with spike-and-slab priors",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SlabArgs {
    /// Shared slab scale for every coordinate.
    #[arg(long, conflicts_with = "c")]
    phi: Option<f64>,
    /// Comma-separated per-coordinate slab scales.
    #[arg(long)]
    c: Option<String>,
    /// Degrees of freedom of the noise-precision prior.
    #[arg(long, default_value_t = 4)]
    nu: u32,
}

impl SlabArgs {
    fn build(&self, p: usize) -> Result<SlabSpec> {
        match (&self.phi, &self.c) {
            (Some(phi), None) => SlabSpec::constant(p, *phi, self.nu),
            (None, Some(list)) => SlabSpec::new(parse_f64_list(list)?, self.nu),
            _ => Err(Error::Config(
                "provide exactly one of --phi or --c".into(),
            )),
        }
    }
}

#[derive(Args)]
struct PriorArgs {
    /// Comma-separated inclusion weights w_1..w_p; omitted means the flat
    /// prior.
    #[arg(long)]
    weights: Option<String>,
}

impl PriorArgs {
    fn build(&self) -> Result<ModelPrior> {
        match &self.weights {
            None => Ok(ModelPrior::Flat),
            Some(list) => ModelPrior::bernoulli(parse_f64_list(list)?),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate an orthonormal-design dataset y = Xβ⁰ + ε.
    Datagen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        /// Nonzero true coefficients, placed on the leading coordinates.
        #[arg(long, default_value = "2,2")]
        beta: String,
        #[arg(long, default_value_t = 1.0)]
        sigma0: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV path (header y,x1,...,xp).
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact posterior over all 2^p models.
    Enumerate {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        slab: SlabArgs,
        #[command(flatten)]
        prior: PriorArgs,
        #[arg(long, default_value_t = spikeslab::DEFAULT_P_LIMIT)]
        p_limit: usize,
        /// Optional table CSV output (gamma_bits,log_score,probability).
        #[arg(long)]
        out: Option<PathBuf>,
        /// True model bits for a dominance summary, e.g. 1100.
        #[arg(long)]
        gamma0: Option<String>,
    },
    /// Collapsed Gibbs sampling of the model posterior.
    Gibbs {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        slab: SlabArgs,
        #[command(flatten)]
        prior: PriorArgs,
        #[arg(long, default_value_t = 20000)]
        sweeps: usize,
        #[arg(long, default_value_t = 10000)]
        burnin: usize,
        #[arg(long, default_value_t = 5)]
        chains: usize,
        #[arg(long, default_value_t = 1)]
        thin: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for per-chain CSVs (sweep,gamma_bits,sigma,log_score).
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        gamma0: Option<String>,
    },
    /// Posterior table under a prior on the shared slab scale.
    Gprior {
        #[arg(long)]
        data: PathBuf,
        /// Scale prior: point:<c> or uniform:<lo>:<hi>.
        #[arg(long)]
        g: String,
        #[arg(long, default_value_t = 4)]
        nu: u32,
        #[arg(long, default_value_t = 64)]
        nodes: usize,
        #[command(flatten)]
        prior: PriorArgs,
        #[arg(long, default_value_t = spikeslab::DEFAULT_P_LIMIT)]
        p_limit: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        gamma0: Option<String>,
    },
    /// Numerical report over the consistency assumptions.
    Check {
        #[arg(long)]
        data: PathBuf,
        /// Full true coefficient vector β⁰, e.g. 2,2,0.
        #[arg(long)]
        beta0: String,
        #[arg(long, default_value_t = 1.0)]
        sigma0: f64,
        #[command(flatten)]
        slab: SlabArgs,
        #[command(flatten)]
        prior: PriorArgs,
        /// Shared slab scale φ_n for the growth-rate conditions; enables the
        /// A9 flags.
        #[arg(long)]
        rate_phi: Option<f64>,
        #[arg(long, default_value_t = 2.0)]
        zeta: f64,
        /// Output JSON path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replicated frequentist protocol over (n, case, setting) cells.
    Table1 {
        /// Experiment config file (key = value lines).
        #[arg(long)]
        config: PathBuf,
        /// Master seed override.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Slab-scale regime experiments on square orthonormal designs.
    Regimes {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.5)]
        delta1: f64,
        #[arg(long, default_value_t = 1.25)]
        delta2: f64,
        #[arg(long, default_value_t = 1.0)]
        c1: f64,
        #[arg(long, default_value_t = 1.0)]
        c2: f64,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[arg(long, default_value_t = 2)]
        s: usize,
        #[arg(long, default_value_t = 20)]
        replicates: usize,
        #[arg(long, default_value_t = 2000)]
        sweeps: usize,
        #[arg(long, default_value_t = 1000)]
        burnin: usize,
        #[arg(long, default_value_t = 5)]
        chains: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Consistency sweep across the sample-size grid.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Datagen {
            n,
            p,
            beta,
            sigma0,
            seed,
            out,
        } => {
            let nonzero = parse_f64_list(&beta)?;
            if nonzero.len() > p {
                return Err(Error::Config(format!(
                    "{} nonzero coefficients but p = {p}",
                    nonzero.len()
                )));
            }
            let mut beta0 = vec![0.0; p];
            beta0[..nonzero.len()].copy_from_slice(&nonzero);
            let truth = TruthSpec::new(beta0, sigma0)?;
            let x = simlab::gen_orthonormal_design(n, p, seed)?;
            let data = simlab::gen_dataset(&x, &truth, seed.wrapping_add(1))?;
            dataio::write_dataset_csv(&data, &out)?;
            println!(
                "wrote {} ({n} rows, {p} columns, gamma0 = {})",
                out.display(),
                truth.gamma0()
            );
        }
        Command::Enumerate {
            data,
            slab,
            prior,
            p_limit,
            out,
            gamma0,
        } => {
            let data = dataio::read_dataset_csv(&data)?;
            let slab = slab.build(data.p())?;
            let prior = prior.build()?;
            let table = enumerate_posterior(&data, &slab, &prior, p_limit)?;
            report_table(&table, gamma0.as_deref())?;
            if let Some(path) = out {
                write_with(&path, |w| table.write_csv(w))?;
                println!("wrote {}", path.display());
            }
        }
        Command::Gibbs {
            data,
            slab,
            prior,
            sweeps,
            burnin,
            chains,
            thin,
            seed,
            out_dir,
            gamma0,
        } => {
            let data = dataio::read_dataset_csv(&data)?;
            let slab = slab.build(data.p())?;
            let prior = prior.build()?;
            let cfg = GibbsConfig {
                sweeps,
                burnin,
                chains,
                seed,
                thin,
            };
            let outputs = run_chains(&data, &slab, &prior, &cfg)?;
            if outputs.len() >= 2 {
                let scores: Vec<Vec<f64>> =
                    outputs.iter().map(|c| c.log_scores.clone()).collect();
                println!("PSRF(log score) = {}", spikeslab::gelman_rubin(&scores)?);
            }
            let pooled: Vec<StateVector> = outputs
                .iter()
                .flat_map(|c| c.gamma_samples.iter().cloned())
                .collect();
            if let Some(bits) = gamma0 {
                let g0: StateVector = bits.parse()?;
                println!(
                    "estimated p(gamma0 | data) = {}",
                    spikeslab::estimate_model_prob(&pooled, &g0)?
                );
            }
            let mode = spikeslab::sampler::empirical_mode(&pooled)?;
            println!(
                "most frequent model: {mode} ({} retained samples per chain)",
                outputs[0].len()
            );
            if let Some(dir) = out_dir {
                fs::create_dir_all(&dir)?;
                for (id, chain) in outputs.iter().enumerate() {
                    let path = dir.join(format!("chain_{id}.csv"));
                    write_with(&path, |w| chain.write_csv(w))?;
                }
                println!("wrote {} chain files to {}", outputs.len(), dir.display());
            }
        }
        Command::Gprior {
            data,
            g,
            nu,
            nodes,
            prior,
            p_limit,
            out,
            gamma0,
        } => {
            let data = dataio::read_dataset_csv(&data)?;
            let g = parse_gprior(&g)?;
            let prior = prior.build()?;
            let table = gprior_posterior(&data, nu, &prior, &g, p_limit, nodes)?;
            report_table(&table, gamma0.as_deref())?;
            if let Some(path) = out {
                write_with(&path, |w| table.write_csv(w))?;
                println!("wrote {}", path.display());
            }
        }
        Command::Check {
            data,
            beta0,
            sigma0,
            slab,
            prior,
            rate_phi,
            zeta,
            out,
        } => {
            let data = dataio::read_dataset_csv(&data)?;
            let truth = TruthSpec::new(parse_f64_list(&beta0)?, sigma0)?;
            let slab = slab.build(data.p())?;
            let prior = prior.build()?;
            let rate = rate_phi
                .map(|phi| RateConfig::new(data.n(), truth.k_n(), sigma0, phi, zeta))
                .transpose()?;
            let report = check_assumptions(
                &data,
                &truth,
                &slab,
                &prior,
                rate.as_ref(),
                &CheckOptions::default(),
            )?;
            let json = serde_json::to_string_pretty(&report)
                .map_err(|e| Error::Config(format!("serialize report: {e}")))?;
            match out {
                Some(path) => {
                    fs::write(&path, json)?;
                    println!("wrote {}", path.display());
                }
                None => println!("{json}"),
            }
        }
        Command::Table1 {
            config,
            seed,
            out_dir,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let out = run_table1(&cfg)?;
            persist_records(&out.records, &cfg, &out_dir)?;
            for row in &out.summary {
                println!(
                    "n={} p={} {} {}: mean {:.4} std {:.4} (count {}, excluded {})",
                    row.n,
                    row.p,
                    row.case_label,
                    row.setting_label,
                    row.mean,
                    row.std,
                    row.count,
                    row.excluded
                );
            }
        }
        Command::Regimes {
            n,
            delta1,
            delta2,
            c1,
            c2,
            eta,
            s,
            replicates,
            sweeps,
            burnin,
            chains,
            seed,
            out_dir,
        } => {
            let params = RegimeParams {
                delta1,
                delta2,
                c1,
                c2,
                eta,
                s,
                gibbs: GibbsConfig {
                    sweeps,
                    burnin,
                    chains,
                    seed: 0,
                    thin: 1,
                },
            };
            let records = run_regimes(n, &params, replicates, seed)?;
            fs::create_dir_all(&out_dir)?;
            let csv_path = out_dir.join("records.csv");
            write_with(&csv_path, |w| write_records_csv(&records, w))?;
            let summary = summarize(&records, 1.1, seed);
            let json_path = out_dir.join("summary.json");
            fs::write(
                &json_path,
                serde_json::to_string_pretty(&summary)
                    .map_err(|e| Error::Config(format!("serialize summary: {e}")))?,
            )?;
            println!(
                "wrote {} and {} ({} records)",
                csv_path.display(),
                json_path.display(),
                records.len()
            );
        }
        Command::Sweep {
            config,
            seed,
            out_dir,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let out = run_consistency_sweep(&cfg)?;
            persist_records(&out.records, &cfg, &out_dir)?;
            for row in &out.rows {
                println!(
                    "n={} p={} {}: mean p(gamma0|Z) {:.4}, mean max odds {:.4e} (count {}, excluded {})",
                    row.n,
                    row.p,
                    row.setting_label,
                    row.mean_true_model_prob,
                    row.mean_max_incorrect_odds,
                    row.count,
                    row.excluded
                );
            }
        }
    }
    Ok(())
}

fn report_table(table: &spikeslab::PosteriorTable, gamma0: Option<&str>) -> Result<()> {
    let map = spikeslab::map_model(table)?;
    println!(
        "models: {}  MAP: {} (probability {})",
        table.len(),
        map,
        table.probability(&map)?
    );
    if let Some(bits) = gamma0 {
        let g0: StateVector = bits.parse()?;
        let s = pmc_summary(table, &g0)?;
        println!(
            "gamma0 = {g0}: probability {}, max incorrect odds {}",
            s.true_model_prob, s.max_incorrect_odds
        );
    }
    Ok(())
}

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)?;
    ExperimentConfig::from_text(&text)
}

fn persist_records(records: &[ResultRecord], cfg: &ExperimentConfig, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join("records.csv");
    write_with(&csv_path, |w| write_records_csv(records, w))?;
    let summary = summarize(records, cfg.psrf_gate, cfg.seed);
    let json_path = dir.join("summary.json");
    fs::write(
        &json_path,
        serde_json::to_string_pretty(&summary)
            .map_err(|e| Error::Config(format!("serialize summary: {e}")))?,
    )?;
    println!(
        "wrote {} and {} ({} records)",
        csv_path.display(),
        json_path.display(),
        records.len()
    );
    Ok(())
}

fn write_with<F>(path: &Path, f: F) -> Result<()>
where
    F: FnOnce(&mut Vec<u8>) -> Result<()>,
{
    let mut buf = Vec::new();
    f(&mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

fn parse_f64_list(list: &str) -> Result<Vec<f64>> {
    list.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| {
            v.parse()
                .map_err(|_| Error::Config(format!("bad number '{v}'")))
        })
        .collect()
}

fn parse_gprior(spec: &str) -> Result<GPriorDensity> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["point", c] => GPriorDensity::point_mass(
            c.parse()
                .map_err(|_| Error::Config(format!("bad scale '{c}'")))?,
        ),
        ["uniform", lo, hi] => GPriorDensity::uniform(
            lo.parse()
                .map_err(|_| Error::Config(format!("bad bound '{lo}'")))?,
            hi.parse()
                .map_err(|_| Error::Config(format!("bad bound '{hi}'")))?,
        ),
        _ => Err(Error::Config(format!(
            "unknown g-prior '{spec}' (use point:<c> or uniform:<lo>:<hi>)"
        ))),
    }
}
