//! Data and prior specifications for the hierarchical selection model.
//!
//! The observation model is y = Xβ + ε with ε ~ N(0, σ²Iₙ). Each coefficient
//! carries a spike-and-slab prior: β_j is exactly zero when excluded and
//! N(0, c_j σ²) when included, the noise precision has a χ²_ν prior, and the
//! inclusion vector γ carries its own prior p(γ).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::state::StateVector;

/// Response vector and design matrix.
#[derive(Debug, Clone)]
pub struct DesignData {
    y: DVector<f64>,
    x: DMatrix<f64>,
}

impl DesignData {
    pub fn new(y: DVector<f64>, x: DMatrix<f64>) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::DimensionMismatch {
                context: "response length vs design rows",
                expected: x.nrows(),
                actual: y.len(),
            });
        }
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(Error::InvalidArgument(
                "design must have at least one row and one column".into(),
            ));
        }
        if y.iter().any(|v| !v.is_finite()) || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "design data must be finite".into(),
            ));
        }
        Ok(Self { y, x })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }
}

/// Slab variance scales c_1..c_p and prior degrees of freedom ν for 1/σ² ~ χ²_ν.
#[derive(Debug, Clone)]
pub struct SlabSpec {
    c: Vec<f64>,
    nu: u32,
}

impl SlabSpec {
    pub fn new(c: Vec<f64>, nu: u32) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::EmptyInput("slab scale vector"));
        }
        if c.iter().any(|&v| v <= 0.0 || !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "slab scales must be positive and finite".into(),
            ));
        }
        if nu == 0 {
            return Err(Error::InvalidArgument("nu must be at least 1".into()));
        }
        Ok(Self { c, nu })
    }

    /// All coordinates share the same scale φ.
    pub fn constant(p: usize, phi: f64, nu: u32) -> Result<Self> {
        Self::new(vec![phi; p], nu)
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    pub fn p(&self) -> usize {
        self.c.len()
    }
}

/// Prior over the 2^p inclusion vectors.
///
/// `Flat` weighs every model equally (log p(γ) = −p·log 2). `Bernoulli`
/// includes coordinate j independently with probability w_j; a weight of
/// exactly 0 or 1 forces the coordinate out of or into every supported model,
/// which surfaces as a −∞ log prior on contradicting states rather than a
/// rejection.
#[derive(Debug, Clone)]
pub enum ModelPrior {
    Flat,
    Bernoulli { weights: Vec<f64> },
}

impl ModelPrior {
    pub fn bernoulli(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyInput("prior weight vector"));
        }
        if weights.iter().any(|&w| !(0.0..=1.0).contains(&w)) {
            return Err(Error::InvalidArgument(
                "inclusion weights must lie in [0, 1]".into(),
            ));
        }
        Ok(Self::Bernoulli { weights })
    }

    /// log p(γ). Returns −∞ when the prior excludes γ.
    pub fn log_prob(&self, gamma: &StateVector) -> f64 {
        match self {
            ModelPrior::Flat => -(gamma.len() as f64) * std::f64::consts::LN_2,
            ModelPrior::Bernoulli { weights } => {
                debug_assert_eq!(weights.len(), gamma.len());
                let mut total = 0.0;
                for (j, &w) in weights.iter().enumerate() {
                    let term = if gamma.get(j) == 1 { w.ln() } else { (1.0 - w).ln() };
                    if term == f64::NEG_INFINITY {
                        return f64::NEG_INFINITY;
                    }
                    total += term;
                }
                total
            }
        }
    }

    /// Expected dimension p, when the prior pins one down.
    pub fn p(&self) -> Option<usize> {
        match self {
            ModelPrior::Flat => None,
            ModelPrior::Bernoulli { weights } => Some(weights.len()),
        }
    }
}

/// Ground truth for simulated data: β⁰ and the noise scale σ₀.
#[derive(Debug, Clone)]
pub struct TruthSpec {
    beta0: Vec<f64>,
    sigma0: f64,
}

impl TruthSpec {
    pub fn new(beta0: Vec<f64>, sigma0: f64) -> Result<Self> {
        if beta0.is_empty() {
            return Err(Error::EmptyInput("true coefficient vector"));
        }
        if sigma0 < 0.0 || !sigma0.is_finite() {
            return Err(Error::InvalidArgument(
                "sigma0 must be finite and nonnegative".into(),
            ));
        }
        Ok(Self { beta0, sigma0 })
    }

    pub fn beta0(&self) -> &[f64] {
        &self.beta0
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }

    pub fn p(&self) -> usize {
        self.beta0.len()
    }

    /// The true model γ⁰ = I(β⁰_j ≠ 0).
    pub fn gamma0(&self) -> StateVector {
        let bits = self.beta0.iter().map(|&b| u8::from(b != 0.0)).collect();
        StateVector::new(bits).expect("bits are 0/1 by construction")
    }

    /// s_n = |γ⁰|.
    pub fn true_size(&self) -> usize {
        self.beta0.iter().filter(|&&b| b != 0.0).count()
    }

    /// k_n = ‖β⁰_{γ⁰}‖².
    pub fn k_n(&self) -> f64 {
        self.beta0.iter().map(|b| b * b).sum()
    }

    /// ψ_n = min_{j∈γ⁰} |β⁰_j|; `None` for the null truth.
    pub fn psi_n(&self) -> Option<f64> {
        self.beta0
            .iter()
            .filter(|&&b| b != 0.0)
            .map(|b| b.abs())
            .fold(None, |acc, v| Some(acc.map_or(v, |m: f64| m.min(v))))
    }
}
