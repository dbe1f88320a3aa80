//! Simulation laboratory: data generation, experiment orchestration, and
//! result persistence.
//!
//! Experiments are driven by an [`ExperimentConfig`] (parse one from the
//! key-value text format or build it in code), run replicates in parallel,
//! and emit [`ResultRecord`]s plus per-cell summaries. All randomness flows
//! through label-derived substreams of one master seed, so outputs are
//! byte-identical across reruns and worker counts.

mod cell;
pub mod config;
pub mod datagen;
pub mod records;
pub mod regimes;
pub mod rng;
pub mod sweep;
pub mod table1;

pub use cell::{directed_odds, DirectedOdds};
pub use config::{Engine, ExperimentConfig, PriorCase, SlabSetting};
pub use datagen::{gen_dataset, gen_orthonormal_design};
pub use records::{
    summarize, write_records_csv, CellSummary, ExperimentSummary, ResultRecord, RECORDS_HEADER,
};
pub use regimes::{run_regimes, RegimeParams};
pub use sweep::{run_consistency_sweep, SweepOutput, SweepRow};
pub use table1::{run_table1, SummaryRow, Table1Output};
