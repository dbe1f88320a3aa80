//! Numerical checkers for the identifiability conditions behind posterior
//! model consistency: extremal eigenvalue functionals over the incorrect
//! models, Schur-complement lower bounds, the five-term decomposition of the
//! log posterior odds, and a finite-n report over the named rate conditions.
//!
//! The rate conditions are asymptotic statements; at a single n they can
//! only be evaluated as inequalities with margins, against constants the
//! caller chooses. The checker therefore reports values and margins and
//! never aborts.

use std::collections::BTreeMap;

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::PosteriorKernel;
use crate::model::{DesignData, ModelPrior, SlabSpec, TruthSpec};
use crate::state::StateVector;

/// Exact scans over the model classes are capped here; |S₂| grows as 2^p.
pub const EXACT_SCAN_LIMIT: usize = 15;

/// How to traverse S₂ when computing the φ functionals.
#[derive(Debug, Clone, Copy)]
pub enum ScanMode {
    /// Visit every member (requires p ≤ [`EXACT_SCAN_LIMIT`]).
    Exact,
    /// Visit a uniform random subset of the given size, drawn without
    /// replacement from the seed.
    Sampled { count: usize, seed: u64 },
}

/// φ_min(n) and φ_max(n) over the scanned part of S₂.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhiBounds {
    pub phi_min: f64,
    pub phi_max: f64,
    /// False when the scan was a random subset, making both values estimates.
    pub exact: bool,
    /// Number of S₂ members visited.
    pub scanned: usize,
}

/// λ₋((1/n) X_Dᵀ (I − P_γ) X_D) via the Schur complement
/// (1/n)(X_DᵀX_D − X_DᵀX_γ (X_γᵀX_γ)⁻¹ X_γᵀX_D), with P_∅ = 0.
fn projected_min_eig(gram: &DMatrix<f64>, n: usize, proj: &[usize], target: &[usize]) -> Result<f64> {
    Ok(projected_matrix(gram, n, proj, target)?
        .map(|m| SymmetricEigen::new(m).eigenvalues.min())
        .unwrap_or(f64::INFINITY))
}

/// The projected Gram block itself; `None` when the target set is empty.
fn projected_matrix(
    gram: &DMatrix<f64>,
    n: usize,
    proj: &[usize],
    target: &[usize],
) -> Result<Option<DMatrix<f64>>> {
    let d = target.len();
    if d == 0 {
        return Ok(None);
    }
    let mut m = DMatrix::from_fn(d, d, |a, b| gram[(target[a], target[b])]);
    if !proj.is_empty() {
        let q = proj.len();
        let a = DMatrix::from_fn(q, q, |i, j| gram[(proj[i], proj[j])]);
        let b = DMatrix::from_fn(q, d, |i, j| gram[(proj[i], target[j])]);
        let chol = Cholesky::new(a).ok_or_else(|| {
            Error::Numerical(format!(
                "X_gamma'X_gamma singular for |gamma| = {q}; projection undefined"
            ))
        })?;
        let solved = chol.solve(&b);
        m -= b.transpose() * solved;
    }
    m /= n as f64;
    Ok(Some(m))
}

/// λ₊((1/n) X_DᵀX_D).
fn block_max_eig(gram: &DMatrix<f64>, n: usize, target: &[usize]) -> f64 {
    let d = target.len();
    let m = DMatrix::from_fn(d, d, |a, b| gram[(target[a], target[b])] / n as f64);
    SymmetricEigen::new(m).eigenvalues.max()
}

fn mask_support(p: usize, mask: u64) -> Vec<usize> {
    (0..p).filter(|&j| (mask >> (p - 1 - j)) & 1 == 1).collect()
}

/// φ_min(n) = min over γ ∈ S₂ of λ₋((1/n)X_{γ⁰∖γ}ᵀ(I−P_γ)X_{γ⁰∖γ}) and
/// φ_max(n) = max over γ ∈ S₂ of λ₊((1/n)X_{γ⁰∖γ}ᵀX_{γ⁰∖γ}), where S₂ is
/// the class of models that do not contain γ⁰.
pub fn phi_min_max(data: &DesignData, gamma0: &StateVector, mode: ScanMode) -> Result<PhiBounds> {
    let p = data.p();
    if gamma0.len() != p {
        return Err(Error::DimensionMismatch {
            context: "gamma0 vs design columns",
            expected: p,
            actual: gamma0.len(),
        });
    }
    if gamma0.is_null() {
        return Err(Error::InvalidArgument(
            "gamma0 is null: S2 is empty and both phi functionals are meaningless".into(),
        ));
    }
    if p > 62 {
        // Scans index the model space through u64 masks.
        return Err(Error::Capacity { p, limit: 62 });
    }
    let gram = data.x().transpose() * data.x();
    let n = data.n();
    let m0 = gamma0.to_index();
    let full = 1u64 << p;

    let visit = |idx: u64, lo: &mut f64, hi: &mut f64| -> Result<()> {
        let diff_mask = m0 & !idx;
        debug_assert_ne!(diff_mask, 0);
        let proj = mask_support(p, idx);
        let target = mask_support(p, diff_mask);
        *lo = lo.min(projected_min_eig(&gram, n, &proj, &target)?);
        *hi = hi.max(block_max_eig(&gram, n, &target));
        Ok(())
    };

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    match mode {
        ScanMode::Exact => {
            if p > EXACT_SCAN_LIMIT {
                return Err(Error::Capacity {
                    p,
                    limit: EXACT_SCAN_LIMIT,
                });
            }
            let mut scanned = 0;
            for idx in 0..full {
                if m0 & !idx != 0 {
                    visit(idx, &mut lo, &mut hi)?;
                    scanned += 1;
                }
            }
            Ok(PhiBounds {
                phi_min: lo,
                phi_max: hi,
                exact: true,
                scanned,
            })
        }
        ScanMode::Sampled { count, seed } => {
            if count == 0 {
                return Err(Error::InvalidArgument("sample count must be positive".into()));
            }
            // |S₂| = 2^p − 2^(p − s): supersets of γ⁰ fix s bits.
            let s = gamma0.count();
            let s2_size = if p <= 62 {
                full - (1u64 << (p - s))
            } else {
                u64::MAX
            };
            let want = (count as u64).min(s2_size) as usize;
            let mut seen = std::collections::HashSet::with_capacity(want);
            let mut rng = crate::simlab::rng::substream(seed, "phi-scan");
            use rand::Rng;
            while seen.len() < want {
                let idx = rng.random_range(0..full);
                if m0 & !idx != 0 {
                    seen.insert(idx);
                }
            }
            let mut members: Vec<u64> = seen.into_iter().collect();
            members.sort_unstable();
            for idx in members {
                visit(idx, &mut lo, &mut hi)?;
            }
            Ok(PhiBounds {
                phi_min: lo,
                phi_max: hi,
                exact: want as u64 == s2_size,
                scanned: want,
            })
        }
    }
}

/// λ₋((1/n) X_{γ̄∖γ}ᵀ (I − P_γ) X_{γ̄∖γ}) for a properly nested pair
/// γ ⊂ γ̄, γ ≠ γ̄, with the convention P_∅ = 0.
pub fn schur_min_eig(x: &DMatrix<f64>, gamma: &StateVector, gamma_bar: &StateVector) -> Result<f64> {
    if gamma.len() != x.ncols() || gamma_bar.len() != x.ncols() {
        return Err(Error::DimensionMismatch {
            context: "state vectors vs design columns",
            expected: x.ncols(),
            actual: gamma.len().max(gamma_bar.len()),
        });
    }
    if !gamma.is_nested_in(gamma_bar)? || gamma == gamma_bar {
        return Err(Error::InvalidArgument(
            "need gamma properly nested in gamma_bar".into(),
        ));
    }
    let gram = x.transpose() * x;
    let target = gamma_bar.difference(gamma)?.support();
    projected_min_eig(&gram, x.nrows(), &gamma.support(), &target)
}

/// The five summands of −log(p(γ|Z)/p(γ⁰|Z)): prior odds, determinant
/// ratio, the two shrinkage corrections against the pure projections, and
/// the projection residual ratio.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OddsDecomposition {
    /// −log(p(γ)/p(γ⁰))
    pub t1: f64,
    /// ½ log(det W_γ / det W_{γ⁰})
    pub t2: f64,
    /// ((n+ν)/2) log[(1+S_γ)/(1+R_γ)] with R the OLS residual sum of
    /// squares; nonnegative because U_γ ⪰ X_γᵀX_γ.
    pub t3: f64,
    /// −((n+ν)/2) log[(1+S_{γ⁰})/(1+R_{γ⁰})]
    pub t4: f64,
    /// ((n+ν)/2) log[(1+R_γ)/(1+R_{γ⁰})]
    pub t5: f64,
}

impl OddsDecomposition {
    pub fn sum(&self) -> f64 {
        self.t1 + self.t2 + self.t3 + self.t4 + self.t5
    }
}

/// yᵀ(I − P_γ)y: the OLS residual sum of squares, with R_∅ = yᵀy.
fn projection_rss(kernel: &PosteriorKernel, gamma: &StateVector) -> Result<f64> {
    let support = gamma.support();
    if support.is_empty() {
        return Ok(kernel.yty());
    }
    let q = support.len();
    let x = kernel.data().x();
    let xg = DMatrix::from_fn(x.nrows(), q, |i, k| x[(i, support[k])]);
    let a = xg.transpose() * &xg;
    let b = xg.transpose() * kernel.data().y();
    let chol = Cholesky::new(a).ok_or_else(|| {
        Error::Numerical(format!(
            "X_gamma'X_gamma singular for |gamma| = {q}; projection undefined"
        ))
    })?;
    Ok((kernel.yty() - b.dot(&chol.solve(&b))).max(0.0))
}

/// Decompose −log posterior odds of γ against γ⁰ into T1..T5. The sum
/// equals −(ℓ(γ) − ℓ(γ⁰)) up to roundoff.
pub fn odds_decomposition(
    gamma: &StateVector,
    gamma0: &StateVector,
    data: &DesignData,
    slab: &SlabSpec,
    prior: &ModelPrior,
) -> Result<OddsDecomposition> {
    let kernel = PosteriorKernel::new(data, slab, prior)?;
    let out = kernel.evaluate(gamma)?;
    let out0 = kernel.evaluate(gamma0)?;
    let half_df = (data.n() as f64 + slab.nu() as f64) / 2.0;
    let r = projection_rss(&kernel, gamma)?;
    let r0 = projection_rss(&kernel, gamma0)?;
    Ok(OddsDecomposition {
        t1: -(prior.log_prob(gamma) - prior.log_prob(gamma0)),
        t2: 0.5 * (out.log_det_w - out0.log_det_w),
        t3: half_df * (out.s_gamma.ln_1p() - r.ln_1p()),
        t4: -half_df * (out0.s_gamma.ln_1p() - r0.ln_1p()),
        t5: half_df * (r.ln_1p() - r0.ln_1p()),
    })
}

/// Constants for the rate conditions of Assumption 9 under a shared slab
/// scale φ_n: a_n = n + σ₀⁻² k_n / (n⁻¹ + φ_n) and the margin constant
/// ζ > 1 in n ψ_n² > σ₀² ζ a_n.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RateConfig {
    pub a_n: f64,
    pub zeta: f64,
    pub sigma0: f64,
    pub phi_n: f64,
}

impl RateConfig {
    pub fn new(n: usize, k_n: f64, sigma0: f64, phi_n: f64, zeta: f64) -> Result<Self> {
        if !zeta.is_finite() || zeta <= 1.0 {
            return Err(Error::InvalidArgument("zeta must exceed 1".into()));
        }
        if sigma0 <= 0.0 || phi_n <= 0.0 || !sigma0.is_finite() || !phi_n.is_finite() {
            return Err(Error::InvalidArgument(
                "sigma0 and phi_n must be positive".into(),
            ));
        }
        let nf = n as f64;
        let a_n = nf + k_n / (sigma0 * sigma0 * (1.0 / nf + phi_n));
        debug_assert!(a_n >= nf);
        Ok(Self {
            a_n,
            zeta,
            sigma0,
            phi_n,
        })
    }
}

/// Caller-chosen constants for the finite-n checks. The defaults take every
/// abstract constant to be 1 (δ = 0) and derive the slab-scale envelope
/// [φ̲, φ̄] from the slab itself.
#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub delta: f64,
    /// Multiplier in the A7 check k_n ≤ tol · φ̲.
    pub k_tolerance: f64,
    pub phi_bar: Option<f64>,
    pub phi_lower: Option<f64>,
    /// Scan policy for the φ functionals when p exceeds the exact cap.
    pub sampled_scan: ScanMode,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            c0: 1.0,
            c1: 1.0,
            c2: 1.0,
            c3: 1.0,
            delta: 0.0,
            k_tolerance: 1.0,
            phi_bar: None,
            phi_lower: None,
            sampled_scan: ScanMode::Sampled {
                count: 1024,
                seed: 0,
            },
        }
    }
}

/// One finite-n inequality: satisfied ⇔ lhs ≤ rhs; margin = rhs − lhs.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RateFlag {
    pub satisfied: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

fn flag(lhs: f64, rhs: f64) -> RateFlag {
    RateFlag {
        satisfied: lhs <= rhs,
        lhs,
        rhs,
        margin: rhs - lhs,
    }
}

/// Everything the checker measured, serializable to JSON.
#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    pub n: usize,
    pub p: usize,
    pub s_n: usize,
    /// max over all γ of p(γ)/p(γ⁰); exact for flat and independent-weight
    /// priors.
    pub prior_odds_bound: f64,
    pub phi_min: Option<f64>,
    pub phi_max: Option<f64>,
    /// Present when the φ functionals came from a scan; false means a
    /// sampled (estimated) scan.
    pub phi_scan_exact: Option<bool>,
    pub psi_n: Option<f64>,
    pub k_n: f64,
    /// inf over γ ∈ S₁ of λ₋((1/n)X_{γ∖γ⁰}ᵀ(I−P_{γ⁰})X_{γ∖γ⁰}); the
    /// infimum is attained at the full complement by eigenvalue
    /// interlacing, so no model scan is needed. `None` when S₁ is empty.
    pub schur_min: Option<f64>,
    /// True when γ⁰ is null, which empties S₂.
    pub s2_empty: bool,
    pub rate_flags: BTreeMap<String, RateFlag>,
}

/// Evaluate every assumption at the given finite n. Rate conditions that
/// need the Assumption-9 constants are only checked when `rate` is supplied.
pub fn check_assumptions(
    data: &DesignData,
    truth: &TruthSpec,
    slab: &SlabSpec,
    prior: &ModelPrior,
    rate: Option<&RateConfig>,
    opts: &CheckOptions,
) -> Result<AssumptionReport> {
    let n = data.n();
    let p = data.p();
    if truth.p() != p {
        return Err(Error::DimensionMismatch {
            context: "truth coefficients vs design columns",
            expected: p,
            actual: truth.p(),
        });
    }
    let gamma0 = truth.gamma0();
    let s_n = gamma0.count();
    let nf = n as f64;
    let pf = p as f64;

    let prior_odds_bound = prior_odds_bound(prior, &gamma0);

    let (phi_min, phi_max, phi_scan_exact, s2_empty) = if gamma0.is_null() {
        (None, None, None, true)
    } else {
        let mode = if p <= EXACT_SCAN_LIMIT {
            ScanMode::Exact
        } else {
            opts.sampled_scan
        };
        let bounds = phi_min_max(data, &gamma0, mode)?;
        (
            Some(bounds.phi_min),
            Some(bounds.phi_max),
            Some(bounds.exact),
            false,
        )
    };

    // A8 left-hand side over S₁: with P_{γ⁰} fixed, the candidate matrices
    // for all supermodels are principal submatrices of the full-complement
    // block, so the smallest eigenvalue over S₁ is the full block's.
    let schur_min = if s_n == p {
        None
    } else {
        let gram = data.x().transpose() * data.x();
        let complement: Vec<usize> = (0..p).filter(|&j| gamma0.get(j) == 0).collect();
        Some(projected_min_eig(&gram, n, &gamma0.support(), &complement)?)
    };

    let psi_n = truth.psi_n();
    let k_n = truth.k_n();
    let phi_bar = opts
        .phi_bar
        .unwrap_or_else(|| slab.c().iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    let phi_lower = opts
        .phi_lower
        .unwrap_or_else(|| slab.c().iter().cloned().fold(f64::INFINITY, f64::min));

    let mut flags = BTreeMap::new();
    if let Some(psi) = psi_n {
        flags.insert(
            "A4".to_string(),
            flag(pf * nf.ln(), nf * (1.0 + (psi * psi).min(1.0)).ln()),
        );
    }
    flags.insert("A5".to_string(), flag(pf * pf.ln(), nf));
    flags.insert(
        "A6".to_string(),
        flag(
            slab.c().iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            phi_bar,
        ),
    );
    flags.insert(
        "A7".to_string(),
        flag(k_n, opts.k_tolerance * phi_lower),
    );
    if let Some(schur) = schur_min {
        flags.insert(
            "A8".to_string(),
            flag(opts.c3 * nf.powf(-opts.delta), schur),
        );
    }
    if let (Some(rate), Some(psi)) = (rate, psi_n) {
        let sig2 = rate.sigma0 * rate.sigma0;
        let arg = nf * psi * psi / (sig2 * rate.zeta * rate.a_n);
        let nu = slab.nu() as f64;
        let first = if arg > 1.0 {
            (nf + nu) * arg.ln() / (1.0 + nf * rate.phi_n).ln()
        } else {
            // The margin condition nψ² > σ₀²ζaₙ already fails.
            f64::NEG_INFINITY
        };
        let bound = first.min(nf * psi * psi).min(nf);
        flags.insert("A9i".to_string(), flag(s_n as f64, bound));
        flags.insert("A9ii".to_string(), flag(pf * pf.ln(), rate.a_n));
    }

    Ok(AssumptionReport {
        n,
        p,
        s_n,
        prior_odds_bound,
        phi_min,
        phi_max,
        phi_scan_exact,
        psi_n,
        k_n,
        schur_min,
        s2_empty,
        rate_flags: flags,
    })
}

/// max over every γ of p(γ)/p(γ⁰), exact for the supported priors: the
/// maximizer picks each coordinate's larger weight independently.
fn prior_odds_bound(prior: &ModelPrior, gamma0: &StateVector) -> f64 {
    match prior {
        ModelPrior::Flat => 1.0,
        ModelPrior::Bernoulli { weights } => {
            let log_max: f64 = weights
                .iter()
                .map(|&w| w.ln().max((1.0 - w).ln()))
                .sum();
            (log_max - prior.log_prob(gamma0)).exp()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::log_posterior_odds;
    use crate::simlab::{gen_dataset, gen_orthonormal_design};
    use nalgebra::DVector;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sv(s: &str) -> StateVector {
        s.parse().unwrap()
    }

    fn random_design(seed: u64, n: usize, p: usize) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal))
    }

    fn data_from(x: DMatrix<f64>, seed: u64) -> DesignData {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = DVector::from_fn(x.nrows(), |_, _| {
            rng.sample::<f64, _>(rand_distr::StandardNormal)
        });
        DesignData::new(y, x).unwrap()
    }

    #[test]
    fn orthonormal_phi_bounds_are_one() {
        let x = gen_orthonormal_design(40, 6, 3).unwrap();
        let data = data_from(x, 4);
        let bounds = phi_min_max(&data, &sv("110000"), ScanMode::Exact).unwrap();
        assert!((bounds.phi_min - 1.0).abs() < 1e-8);
        assert!((bounds.phi_max - 1.0).abs() < 1e-8);
        assert!(bounds.exact);
        assert_eq!(bounds.scanned, 48); // 2^6 − 2^4
    }

    #[test]
    fn scaling_design_scales_phi_quadratically() {
        let x = random_design(5, 20, 5);
        let data = data_from(x.clone(), 6);
        let scaled = data_from(x * std::f64::consts::SQRT_2, 6);
        let gamma0 = sv("10100");
        let base = phi_min_max(&data, &gamma0, ScanMode::Exact).unwrap();
        let twice = phi_min_max(&scaled, &gamma0, ScanMode::Exact).unwrap();
        assert!((twice.phi_min - 2.0 * base.phi_min).abs() < 1e-9 * base.phi_min.abs().max(1.0));
        assert!((twice.phi_max - 2.0 * base.phi_max).abs() < 1e-9 * base.phi_max);
    }

    #[test]
    fn exhaustive_sampling_equals_exact_scan() {
        let x = random_design(7, 18, 6);
        let data = data_from(x, 8);
        let gamma0 = sv("110000");
        let exact = phi_min_max(&data, &gamma0, ScanMode::Exact).unwrap();
        let sampled = phi_min_max(
            &data,
            &gamma0,
            ScanMode::Sampled {
                count: 10_000,
                seed: 1,
            },
        )
        .unwrap();
        assert_eq!(sampled.scanned, exact.scanned);
        assert!(sampled.exact);
        assert_eq!(sampled.phi_min, exact.phi_min);
        assert_eq!(sampled.phi_max, exact.phi_max);
    }

    #[test]
    fn sampled_scan_on_a_large_space_is_flagged_as_estimate() {
        let x = random_design(8, 40, 20);
        let data = data_from(x, 9);
        let gamma0 = StateVector::from_support(20, &[0, 1]).unwrap();
        assert!(phi_min_max(&data, &gamma0, ScanMode::Exact).is_err());
        let bounds = phi_min_max(
            &data,
            &gamma0,
            ScanMode::Sampled {
                count: 50,
                seed: 2,
            },
        )
        .unwrap();
        assert!(!bounds.exact);
        assert_eq!(bounds.scanned, 50);
        assert!(bounds.phi_min.is_finite() && bounds.phi_max.is_finite());
        assert!(bounds.phi_min <= bounds.phi_max);
    }

    #[test]
    fn null_gamma0_is_rejected() {
        let data = data_from(random_design(9, 10, 3), 10);
        assert!(phi_min_max(&data, &sv("000"), ScanMode::Exact).is_err());
    }

    #[test]
    fn schur_conventions_and_orthonormal_value() {
        let x = gen_orthonormal_design(30, 5, 11).unwrap();
        // γ = ∅ reduces to the raw block eigenvalue.
        let v = schur_min_eig(&x, &sv("00000"), &sv("01100")).unwrap();
        assert!((v - 1.0).abs() < 1e-8);
        // Any proper nested pair on an orthonormal design gives 1.
        let v = schur_min_eig(&x, &sv("10000"), &sv("10110")).unwrap();
        assert!((v - 1.0).abs() < 1e-8);
        // Nesting violations are errors.
        assert!(schur_min_eig(&x, &sv("11000"), &sv("10110")).is_err());
        assert!(schur_min_eig(&x, &sv("10110"), &sv("10110")).is_err());
    }

    #[test]
    fn schur_bound_holds_on_random_nested_pairs() {
        // Well-conditioned designs keep the projected blocks above
        // λ₋(XᵀX/n); the acceptance suite runs the 1000-case version.
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for trial in 0..50 {
            let n = 25;
            let p = 6;
            let x = random_design(100 + trial, n, p);
            let gram_min = SymmetricEigen::new(x.transpose() * &x / n as f64)
                .eigenvalues
                .min();
            let mask: u64 = rng.random_range(1..63);
            let sub: u64 = {
                let mut s = rng.random_range(0..64u64) & mask;
                if s == mask {
                    s = 0; // keep the nesting proper
                }
                s
            };
            let gamma_bar = StateVector::from_index(p, mask);
            let gamma = StateVector::from_index(p, sub);
            let v = schur_min_eig(&x, &gamma, &gamma_bar).unwrap();
            assert!(
                v >= gram_min - 1e-8,
                "trial {trial}: {v} < {gram_min}"
            );
        }
    }

    #[test]
    fn decomposition_vanishes_at_the_true_model() {
        let x = random_design(13, 15, 4);
        let data = data_from(x, 14);
        let slab = SlabSpec::constant(4, 5.0, 4).unwrap();
        let g = sv("1010");
        let d = odds_decomposition(&g, &g, &data, &slab, &ModelPrior::Flat).unwrap();
        assert_eq!(d.t1, 0.0);
        assert_eq!(d.t2, 0.0);
        assert_eq!(d.t3 - d.t3, 0.0); // finite
        assert_eq!(d.sum(), 0.0);
    }

    #[test]
    fn decomposition_sums_to_negative_log_odds() {
        for seed in 0..30u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(2000 + seed);
            let n = rng.random_range(8..25usize);
            let p = rng.random_range(2..6usize);
            let x = random_design(3000 + seed, n, p);
            let data = data_from(x, 4000 + seed);
            let c: Vec<f64> = (0..p).map(|_| (rng.random::<f64>() * 4.0).exp()).collect();
            let slab = SlabSpec::new(c, rng.random_range(1..6)).unwrap();
            let w: Vec<f64> = (0..p).map(|_| 0.1 + 0.8 * rng.random::<f64>()).collect();
            let prior = ModelPrior::bernoulli(w).unwrap();
            let full = 1u64 << p;
            let gamma = StateVector::from_index(p, rng.random_range(0..full));
            let gamma0 = StateVector::from_index(p, rng.random_range(0..full));
            let d = odds_decomposition(&gamma, &gamma0, &data, &slab, &prior).unwrap();
            let odds = log_posterior_odds(&gamma, &gamma0, &data, &slab, &prior).unwrap();
            assert!(
                (d.sum() + odds).abs() < 1e-9,
                "seed {seed}: sum {} vs -odds {}",
                d.sum(),
                -odds
            );
            assert!(d.t3 >= -1e-12, "T3 = {} negative", d.t3);
        }
    }

    #[test]
    fn orthonormal_supermodel_t_bounds() {
        // On an orthonormal design with equal scales φ and a flat prior,
        // T1 = 0 and for supermodels of γ⁰ the determinant term achieves its
        // lower bound ½(|γ|−s) log(1+nφ).
        let n = 50;
        let p = 6;
        let x = gen_orthonormal_design(n, p, 15).unwrap();
        let truth = TruthSpec::new(vec![2.0, 2.0, 0.0, 0.0, 0.0, 0.0], 1.0).unwrap();
        let data = gen_dataset(&x, &truth, 16).unwrap();
        let phi = 25.0;
        let slab = SlabSpec::constant(p, phi, 4).unwrap();
        let gamma0 = truth.gamma0();
        for bits in ["111000", "110110", "111111"] {
            let gamma = sv(bits);
            assert!(gamma0.is_nested_in(&gamma).unwrap() && gamma != gamma0);
            let d =
                odds_decomposition(&gamma, &gamma0, &data, &slab, &ModelPrior::Flat).unwrap();
            assert_eq!(d.t1, 0.0);
            let extra = (gamma.count() - gamma0.count()) as f64;
            let bound = 0.5 * extra * (1.0 + n as f64 * phi).ln();
            assert!(
                d.t2 >= bound - 1e-9,
                "{bits}: T2 = {} below bound {bound}",
                d.t2
            );
            // Orthonormal designs achieve the bound exactly.
            assert!((d.t2 - bound).abs() < 1e-6, "{bits}: T2 = {} vs {bound}", d.t2);
        }
    }

    #[test]
    fn schur_min_matches_brute_force_over_s1() {
        // The full-complement shortcut for the A8 infimum agrees with an
        // explicit scan of every supermodel.
        let n = 20;
        let p = 7;
        let x = random_design(17, n, p);
        let data = data_from(x.clone(), 18);
        let truth = TruthSpec::new(vec![1.5, -2.0, 0.0, 0.0, 0.0, 0.0, 0.0], 1.0).unwrap();
        let slab = SlabSpec::constant(p, 10.0, 4).unwrap();
        let report = check_assumptions(
            &data,
            &truth,
            &slab,
            &ModelPrior::Flat,
            None,
            &CheckOptions::default(),
        )
        .unwrap();
        let shortcut = report.schur_min.unwrap();

        let gamma0 = truth.gamma0();
        let m0 = gamma0.to_index();
        let mut brute = f64::INFINITY;
        for idx in 0..(1u64 << p) {
            if idx & m0 == m0 && idx != m0 {
                let gamma = StateVector::from_index(p, idx);
                brute = brute.min(schur_min_eig(&x, &gamma0, &gamma).unwrap());
            }
        }
        assert!((shortcut - brute).abs() < 1e-9, "{shortcut} vs {brute}");
    }

    #[test]
    fn fixed_hyperparameter_scaling_regime_passes_all_checks() {
        // Bounded k_n, ψ_n ∝ n^{-1/4}√log n, p ∝ n^r with r < 1/4, fixed
        // equal slab scales, orthonormal design: every checked flag holds at
        // n = 400.
        let n = 400usize;
        let r = 0.2;
        let p = (400f64.powf(r)).round() as usize; // 3
        let x = gen_orthonormal_design(n, p, 19).unwrap();
        let psi = (n as f64).powf(-0.25) * (n as f64).ln().sqrt();
        let mut beta = vec![0.0; p];
        beta[0] = psi;
        beta[1] = psi;
        let truth = TruthSpec::new(beta, 1.0).unwrap();
        let data = gen_dataset(&x, &truth, 20).unwrap();
        let slab = SlabSpec::constant(p, 10.0, 4).unwrap();
        let opts = CheckOptions {
            c3: 0.9,
            ..CheckOptions::default()
        };
        let report = check_assumptions(&data, &truth, &slab, &ModelPrior::Flat, None, &opts)
            .unwrap();
        assert!(report.prior_odds_bound <= opts.c0 + 1e-12);
        for (name, f) in &report.rate_flags {
            assert!(f.satisfied, "{name} failed: {f:?}");
        }
        assert!(report.rate_flags.contains_key("A4"));
        assert!(report.rate_flags.contains_key("A8"));
        assert!(!report.rate_flags.contains_key("A9i"));
    }

    #[test]
    fn orthonormal_margins_are_exact() {
        let n = 60;
        let p = 5;
        let x = gen_orthonormal_design(n, p, 21).unwrap();
        let truth = TruthSpec::new(vec![2.0, 2.0, 0.0, 0.0, 0.0], 1.0).unwrap();
        let data = gen_dataset(&x, &truth, 22).unwrap();
        let slab = SlabSpec::constant(p, 10.0, 4).unwrap();
        let report = check_assumptions(
            &data,
            &truth,
            &slab,
            &ModelPrior::Flat,
            None,
            &CheckOptions::default(),
        )
        .unwrap();
        // With C₁ = C₂ = C₃ = 1, the orthonormal design sits exactly on the
        // boundary: φ bounds and the Schur infimum all equal 1.
        assert!((report.phi_min.unwrap() - 1.0).abs() < 1e-8);
        assert!((report.phi_max.unwrap() - 1.0).abs() < 1e-8);
        assert!((report.schur_min.unwrap() - 1.0).abs() < 1e-8);
        let a8 = &report.rate_flags["A8"];
        assert!(a8.margin.abs() < 1e-8);
    }

    #[test]
    fn null_truth_reports_not_applicable_fields() {
        let x = random_design(23, 12, 4);
        let data = data_from(x, 24);
        let truth = TruthSpec::new(vec![0.0; 4], 1.0).unwrap();
        let slab = SlabSpec::constant(4, 5.0, 4).unwrap();
        let report = check_assumptions(
            &data,
            &truth,
            &slab,
            &ModelPrior::Flat,
            None,
            &CheckOptions::default(),
        )
        .unwrap();
        assert!(report.s2_empty);
        assert!(report.psi_n.is_none());
        assert!(report.phi_min.is_none());
        assert!(report.phi_max.is_none());
        assert!(!report.rate_flags.contains_key("A4"));
        // JSON serialization is part of the report's contract.
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"s2_empty\":true"));
    }

    #[test]
    fn a9_flags_track_the_supplied_rate_config() {
        // Strong growing signal: ψ² = n with one true coordinate.
        let n = 100usize;
        let p = 10;
        let x = gen_orthonormal_design(n, p, 25).unwrap();
        let psi = (n as f64).sqrt();
        let mut beta = vec![0.0; p];
        beta[0] = psi;
        let truth = TruthSpec::new(beta, 1.0).unwrap();
        let data = gen_dataset(&x, &truth, 26).unwrap();
        let phi = 10.0;
        let slab = SlabSpec::constant(p, phi, 4).unwrap();
        let rate = RateConfig::new(n, truth.k_n(), 1.0, phi, 2.0).unwrap();
        // a_n = n + k/(σ²(1/n + φ))
        let expect_a = 100.0 + 100.0 / (0.01 + 10.0);
        assert!((rate.a_n - expect_a).abs() < 1e-9);
        let report = check_assumptions(
            &data,
            &truth,
            &slab,
            &ModelPrior::Flat,
            Some(&rate),
            &CheckOptions::default(),
        )
        .unwrap();
        assert!(report.rate_flags["A9i"].satisfied, "{:?}", report.rate_flags["A9i"]);
        assert!(report.rate_flags["A9ii"].satisfied);
        // A shrinking signal violates the ζ margin, so A9i must fail.
        let weak = TruthSpec::new(
            {
                let mut b = vec![0.0; p];
                b[0] = 0.05;
                b
            },
            1.0,
        )
        .unwrap();
        let weak_data = gen_dataset(&x, &weak, 27).unwrap();
        let weak_rate = RateConfig::new(n, weak.k_n(), 1.0, phi, 2.0).unwrap();
        let weak_report = check_assumptions(
            &weak_data,
            &weak,
            &slab,
            &ModelPrior::Flat,
            Some(&weak_rate),
            &CheckOptions::default(),
        )
        .unwrap();
        assert!(!weak_report.rate_flags["A9i"].satisfied);
    }

    #[test]
    fn rate_config_validation() {
        assert!(RateConfig::new(10, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(RateConfig::new(10, 1.0, 0.0, 1.0, 2.0).is_err());
        assert!(RateConfig::new(10, 1.0, 1.0, -1.0, 2.0).is_err());
        assert!(RateConfig::new(10, 1.0, 1.0, 1.0, 2.0).is_ok());
    }

    #[test]
    fn bernoulli_prior_odds_bound_is_exact() {
        let prior = ModelPrior::bernoulli(vec![0.3, 0.7, 0.5]).unwrap();
        let gamma0 = sv("100");
        // Best model picks max(w, 1-w) per coordinate: 0.7 · 0.7 · 0.5;
        // p(γ⁰) = 0.3 · 0.3 · 0.5.
        let expect = (0.7 * 0.7 * 0.5) / (0.3 * 0.3 * 0.5);
        let bound = super::prior_odds_bound(&prior, &gamma0);
        assert!((bound - expect).abs() < 1e-12);
    }
}
