//! Model scores under a prior g(c) on a shared slab scale.
//!
//! Here every included coefficient uses the same slab scale c, and c itself
//! carries a proper prior g. The integrated score is
//! log ∫ exp(ℓ(γ; c)) g(c) dc, evaluated by fixed-node Gauss-Legendre
//! quadrature in log-c with log-sum-exp accumulation: the fixed-c scores
//! vary smoothly and slowly in log c, while their linear-domain values span
//! thousands of log units.
//!
//! Unbounded densities are handled by truncation: the caller supplies
//! support bounds (quantiles of g), and the leftover tail mass — 1e-4 per
//! tail by default — is tolerated by the normalization check.

use std::fmt;
use std::sync::Arc;

use crate::enumerate::PosteriorTable;
use crate::error::{Error, Result};
use crate::kernel::PosteriorKernel;
use crate::model::{DesignData, ModelPrior, SlabSpec};
use crate::state::StateVector;

/// Default quadrature node count.
pub const DEFAULT_NODES: usize = 64;

/// Default tolerated tail mass outside a generic density's support, per tail.
pub const DEFAULT_TAIL_MASS: f64 = 1e-4;

/// Node count used to validate that a generic density is normalized.
const VALIDATION_NODES: usize = 256;

/// A prior on the shared slab scale c.
#[derive(Clone)]
pub enum GPriorDensity {
    /// All mass at a single scale.
    PointMass { atom: f64 },
    /// Uniform on [lo, hi].
    Uniform { lo: f64, hi: f64 },
    /// Arbitrary density on [lo, hi] (truncated there if unbounded).
    Generic {
        lo: f64,
        hi: f64,
        density: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for GPriorDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PointMass { atom } => write!(f, "PointMass {{ atom: {atom} }}"),
            Self::Uniform { lo, hi } => write!(f, "Uniform {{ lo: {lo}, hi: {hi} }}"),
            Self::Generic { lo, hi, .. } => write!(f, "Generic {{ lo: {lo}, hi: {hi} }}"),
        }
    }
}

impl GPriorDensity {
    pub fn point_mass(atom: f64) -> Result<Self> {
        if atom <= 0.0 || !atom.is_finite() {
            return Err(Error::InvalidArgument(
                "point mass must sit at a positive finite scale".into(),
            ));
        }
        Ok(Self::PointMass { atom })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        check_support(lo, hi)?;
        Ok(Self::Uniform { lo, hi })
    }

    /// A caller-supplied density truncated to [lo, hi]. The density must
    /// integrate to one over the support up to the default tail allowance.
    pub fn generic<F>(lo: f64, hi: f64, density: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::generic_with_tail_mass(lo, hi, density, DEFAULT_TAIL_MASS)
    }

    /// As [`GPriorDensity::generic`], declaring how much mass per tail was
    /// cut off by the truncation (at most 0.1).
    pub fn generic_with_tail_mass<F>(lo: f64, hi: f64, density: F, tail_mass: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_support(lo, hi)?;
        if !(0.0..=0.1).contains(&tail_mass) {
            return Err(Error::InvalidArgument(
                "tail mass must lie in [0, 0.1]".into(),
            ));
        }
        let g = Self::Generic {
            lo,
            hi,
            density: Arc::new(density),
        };
        let mass = g.support_mass(VALIDATION_NODES);
        let tol = 1e-6 + 2.0 * tail_mass;
        if !mass.is_finite() || (mass - 1.0).abs() > tol {
            return Err(Error::InvalidArgument(format!(
                "density integrates to {mass} over [{lo}, {hi}]; expected 1 within {tol}"
            )));
        }
        Ok(g)
    }

    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::PointMass { atom } => (atom, atom),
            Self::Uniform { lo, hi } | Self::Generic { lo, hi, .. } => (lo, hi),
        }
    }

    fn log_density(&self, c: f64) -> f64 {
        match self {
            Self::PointMass { .. } => 0.0,
            Self::Uniform { lo, hi } => -(hi - lo).ln(),
            Self::Generic { density, .. } => density(c).ln(),
        }
    }

    /// ∫ g(c) dc over the support, by the module's own quadrature in log-c.
    pub fn support_mass(&self, nodes: usize) -> f64 {
        let (lo, hi) = self.support();
        match self {
            Self::PointMass { .. } => 1.0,
            _ => {
                let (us, ws) = gauss_legendre_on(nodes, lo.ln(), hi.ln());
                us.iter()
                    .zip(&ws)
                    .map(|(&u, &w)| {
                        let c = u.exp();
                        w * c * self.density_at(c)
                    })
                    .sum()
            }
        }
    }

    fn density_at(&self, c: f64) -> f64 {
        match self {
            Self::PointMass { .. } => 0.0,
            Self::Uniform { lo, hi } => 1.0 / (hi - lo),
            Self::Generic { density, .. } => density(c),
        }
    }
}

fn check_support(lo: f64, hi: f64) -> Result<()> {
    if !lo.is_finite() || !hi.is_finite() || lo <= 0.0 || hi <= lo {
        return Err(Error::InvalidArgument(format!(
            "support must satisfy 0 < lo < hi < inf (got [{lo}, {hi}])"
        )));
    }
    Ok(())
}

/// log ∫ exp(ℓ(γ; c)) g(c) dc, with ℓ the fixed-c kernel score sharing the
/// scale c across all coordinates. A point mass returns ℓ(γ; atom) directly.
pub fn gprior_log_score(
    gamma: &StateVector,
    data: &DesignData,
    nu: u32,
    prior: &ModelPrior,
    g: &GPriorDensity,
    nodes: usize,
) -> Result<f64> {
    let scores = gprior_log_scores(std::slice::from_ref(gamma), data, nu, prior, g, nodes)?;
    Ok(scores[0])
}

/// Integrated scores for a batch of models (shared quadrature nodes).
fn gprior_log_scores(
    gammas: &[StateVector],
    data: &DesignData,
    nu: u32,
    prior: &ModelPrior,
    g: &GPriorDensity,
    nodes: usize,
) -> Result<Vec<f64>> {
    let p = data.p();
    if let GPriorDensity::PointMass { atom } = *g {
        let slab = SlabSpec::constant(p, atom, nu)?;
        let kernel = PosteriorKernel::new(data, &slab, prior)?;
        return gammas.iter().map(|gm| kernel.log_score(gm)).collect();
    }
    if nodes < 2 {
        return Err(Error::InvalidArgument(
            "quadrature needs at least 2 nodes for a non-atomic g".into(),
        ));
    }
    let (lo, hi) = g.support();
    let (us, ws) = gauss_legendre_on(nodes, lo.ln(), hi.ln());
    // terms[k][i]: log of w_i · exp(ℓ(γ_k; c_i)) · g(c_i) · c_i
    let mut terms = vec![Vec::with_capacity(nodes); gammas.len()];
    for (&u, &w) in us.iter().zip(&ws) {
        let c = u.exp();
        let log_weight = w.ln() + g.log_density(c) + u;
        let slab = SlabSpec::constant(p, c, nu)?;
        let kernel = PosteriorKernel::new(data, &slab, prior)?;
        for (k, gm) in gammas.iter().enumerate() {
            terms[k].push(kernel.log_score(gm)? + log_weight);
        }
    }
    let out: Vec<f64> = terms.iter().map(|t| log_sum_exp(t)).collect();
    // The weights are finite, so a -inf result with a prior-supported model
    // means g vanished at every node.
    if out.iter().zip(gammas).any(|(&s, gm)| {
        s == f64::NEG_INFINITY && prior.log_prob(gm) > f64::NEG_INFINITY
    }) {
        return Err(Error::InvalidArgument(
            "g has zero mass at every quadrature node on its support".into(),
        ));
    }
    Ok(out)
}

/// Enumerate all 2^p models under the integrated score and normalize.
pub fn gprior_posterior(
    data: &DesignData,
    nu: u32,
    prior: &ModelPrior,
    g: &GPriorDensity,
    p_limit: usize,
    nodes: usize,
) -> Result<PosteriorTable> {
    let p = data.p();
    if p > p_limit.min(62) {
        return Err(Error::Capacity {
            p,
            limit: p_limit.min(62),
        });
    }
    let size = 1u64 << p;
    let gammas: Vec<StateVector> = (0..size).map(|idx| StateVector::from_index(p, idx)).collect();
    let scores = gprior_log_scores(&gammas, data, nu, prior, g, nodes)?;
    PosteriorTable::from_scores(p, scores)
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Gauss-Legendre nodes and weights mapped to [lo, hi].
fn gauss_legendre_on(n: usize, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let (xs, ws) = gauss_legendre(n);
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    (
        xs.iter().map(|x| mid + half * x).collect(),
        ws.iter().map(|w| half * w).collect(),
    )
}

/// Nodes and weights on [-1, 1] via Newton iteration on the Legendre
/// recurrence.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
