//! Bayesian variable selection for linear models with spike-and-slab
//! priors.
//!
//! Each of the 2^p submodels of y = Xβ + ε is identified by a binary
//! [`StateVector`]; with the coefficients and the noise variance integrated
//! out analytically, every model gets an exact log-domain score
//! ([`kernel`]). On top of that sit:
//!
//! - exact normalized posteriors over the full model space for small p
//!   ([`enumerate`]),
//! - a collapsed Gibbs sampler with convergence diagnostics for large p
//!   ([`sampler`]),
//! - scores integrated over a prior on the shared slab scale ([`gprior`]),
//! - numerical checkers for the eigenvalue and growth-rate conditions that
//!   govern when the true model's posterior mass goes to one
//!   ([`assumptions`]),
//! - and a simulation laboratory that reproduces the replicated selection
//!   experiments and slab-scale regime studies ([`simlab`]).
//!
//! Everything is deterministic under a master seed, including parallel
//! experiment runs.

pub mod assumptions;
pub mod enumerate;
pub mod error;
pub mod gprior;
pub mod kernel;
pub mod model;
pub mod sampler;
pub mod simlab;
pub mod state;

pub use nalgebra;

pub use assumptions::{
    check_assumptions, odds_decomposition, phi_min_max, schur_min_eig, AssumptionReport,
    CheckOptions, OddsDecomposition, PhiBounds, RateConfig, RateFlag, ScanMode,
};
pub use enumerate::{
    enumerate_posterior, map_model, pmc_summary, ModelEntry, PmcSummary, PosteriorTable,
    DEFAULT_P_LIMIT,
};
pub use error::{Error, Result};
pub use gprior::{gprior_log_score, gprior_posterior, GPriorDensity};
pub use kernel::{
    log_bayes_factor, log_posterior_odds, posterior_kernel, PosteriorKernel,
    PosteriorKernelResult,
};
pub use model::{DesignData, ModelPrior, SlabSpec, TruthSpec};
pub use sampler::{
    conditional_inclusion_prob, estimate_model_prob, gelman_rubin, run_chain, run_chains,
    ChainOutput, GibbsConfig, SparseVector,
};
pub use state::StateVector;
