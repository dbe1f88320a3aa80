//! Shared test oracles: brute-force quadrature for model marginal
//! likelihoods, a Monte Carlo integral for slab-scale priors, and seeded
//! random instance generators.
//!
//! The quadrature oracle integrates the raw hierarchical density over
//! (β_γ, log σ²) with Gauss-Legendre grids. It never touches the collapsed
//! closed form (no U_γ, W_γ, or S_γ); the implementation under test is
//! checked against it through marginal-likelihood ratios.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spikeslab::{DesignData, ModelPrior, SlabSpec, StateVector};

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-based initial guess.
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

/// Gauss-Legendre rule mapped to [lo, hi].
pub fn gauss_legendre_on(n: usize, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    let (xs, ws) = gauss_legendre(n);
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    (
        xs.iter().map(|x| mid + half * x).collect(),
        ws.iter().map(|w| half * w).collect(),
    )
}

pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// ln Γ(k/2) for integer k ≥ 1, exact via factorial identities.
fn ln_gamma_half(k: u32) -> f64 {
    assert!(k >= 1);
    if k.is_multiple_of(2) {
        // Γ(m) = (m-1)!
        let m = k / 2;
        (1..m).map(|i| (i as f64).ln()).sum()
    } else {
        // Γ(m + 1/2) = (2m)! √π / (4^m m!)
        let m = (k - 1) / 2;
        let mut ln = 0.5 * std::f64::consts::PI.ln();
        for i in 1..=m {
            // multiply by (i - 1/2)
            ln += (i as f64 - 0.5).ln();
        }
        ln
    }
}

/// log density of τ ~ χ²_ν at τ > 0.
fn chi2_log_density(tau: f64, nu: u32) -> f64 {
    let half_nu = nu as f64 / 2.0;
    (half_nu - 1.0) * tau.ln() - tau / 2.0
        - half_nu * std::f64::consts::LN_2
        - ln_gamma_half(nu)
}

/// log N(v; 0, var) for a scalar.
fn log_normal_scalar(v: f64, var: f64) -> f64 {
    -0.5 * ((2.0 * std::f64::consts::PI * var).ln() + v * v / var)
}

/// Log marginal likelihood log p(y | γ) of a submodel, computed by
/// brute-force nested quadrature over (β_γ, log σ²).
///
/// The integrand is the literal hierarchical density
///   N(y; X_γ β, σ² Iₙ) · ∏_{j∈γ} N(β_j; 0, c_j σ²) · π(σ²),
/// with 1/σ² ~ χ²_ν. Only supports |γ| ≤ 2 (tensor grids).
///
/// The β grid per σ node is centered on the conditional mode with a 12
/// standard-deviation half-width; the mode/curvature are recomputed here from
/// the normal equations (LU solves), used solely to place nodes.
pub fn quadrature_log_marginal(
    data: &DesignData,
    gamma: &StateVector,
    slab: &SlabSpec,
    t_nodes: usize,
    beta_nodes: usize,
) -> f64 {
    let n = data.n();
    let y = data.y();
    let support = gamma.support();
    let m = support.len();
    assert!(m <= 2, "oracle supports |γ| ≤ 2");

    let yty: f64 = y.dot(y);
    let (ts, tws) = gauss_legendre_on(t_nodes, -9.0, 9.0);

    // Submatrix and slab scales for the included coordinates.
    let xg = DMatrix::from_fn(n, m, |i, k| data.x()[(i, support[k])]);
    let cg: Vec<f64> = support.iter().map(|&j| slab.c()[j]).collect();

    let mut terms = Vec::with_capacity(t_nodes * beta_nodes.pow(m as u32).max(1));
    for (ti, &t) in ts.iter().enumerate() {
        let sigma2 = t.exp();
        let tau = (-t).exp();
        // Measure for σ² = e^t: π_{σ²}(e^t) e^t dt = f_τ(e^{-t}) e^{-t} dt.
        let log_measure = chi2_log_density(tau, slab.nu()) - t + tws[ti].ln();
        let log_norm_const = -(n as f64 / 2.0) * (2.0 * std::f64::consts::PI * sigma2).ln();

        if m == 0 {
            terms.push(log_norm_const - 0.5 * yty / sigma2 + log_measure);
            continue;
        }

        // Conditional mode and diagonal curvature, for node placement only.
        let mut h = &xg.transpose() * &xg;
        for k in 0..m {
            h[(k, k)] += 1.0 / cg[k];
        }
        let xty = xg.transpose() * y;
        let mode = h
            .clone()
            .lu()
            .solve(&xty)
            .expect("normal equations solvable");
        let h_inv = h.try_inverse().expect("H invertible");

        let grids: Vec<(Vec<f64>, Vec<f64>)> = (0..m)
            .map(|k| {
                let std_k = (sigma2 * h_inv[(k, k)]).sqrt();
                gauss_legendre_on(beta_nodes, mode[k] - 12.0 * std_k, mode[k] + 12.0 * std_k)
            })
            .collect();

        let mut eval = |beta: &[f64], log_w: f64| {
            let mut resid2 = 0.0;
            for i in 0..n {
                let mut fit = 0.0;
                for k in 0..m {
                    fit += xg[(i, k)] * beta[k];
                }
                let r = y[i] - fit;
                resid2 += r * r;
            }
            let mut log_prior_beta = 0.0;
            for k in 0..m {
                log_prior_beta += log_normal_scalar(beta[k], cg[k] * sigma2);
            }
            terms.push(
                log_norm_const - 0.5 * resid2 / sigma2 + log_prior_beta + log_measure + log_w,
            );
        };

        match m {
            1 => {
                let (xs, ws) = &grids[0];
                for (b, w) in xs.iter().zip(ws) {
                    eval(&[*b], w.ln());
                }
            }
            2 => {
                let (xs0, ws0) = &grids[0];
                let (xs1, ws1) = &grids[1];
                for (b0, w0) in xs0.iter().zip(ws0) {
                    for (b1, w1) in xs1.iter().zip(ws1) {
                        eval(&[*b0, *b1], w0.ln() + w1.ln());
                    }
                }
            }
            _ => unreachable!(),
        }
    }
    log_sum_exp(&terms)
}

/// Monte Carlo estimate of log ∫ exp(score(c)) g(c) dc for g uniform on
/// [lo, hi], using `draws` seeded uniform samples.
pub fn mc_uniform_g_log_integral(
    mut score: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    draws: usize,
    seed: u64,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(draws);
    for _ in 0..draws {
        let c = lo + (hi - lo) * rng.random::<f64>();
        values.push(score(c));
    }
    // Uniform density 1/(hi-lo) cancels the interval length in the average.
    log_sum_exp(&values) - (draws as f64).ln()
}

/// A random small problem instance: N(0,1) design entries, N(0, scale²)
/// response, log-uniform slab scales.
pub struct RandomInstance {
    pub data: DesignData,
    pub slab: SlabSpec,
    pub prior: ModelPrior,
}

pub fn random_instance(
    seed: u64,
    n_range: std::ops::RangeInclusive<usize>,
    p_range: std::ops::RangeInclusive<usize>,
    c_range: std::ops::RangeInclusive<f64>,
) -> RandomInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(n_range);
    let p = rng.random_range(p_range);
    let x = DMatrix::from_fn(n, p, |_, _| standard_normal(&mut rng));
    let y = DVector::from_fn(n, |_, _| 2.0 * standard_normal(&mut rng));
    let (c_lo, c_hi) = (*c_range.start(), *c_range.end());
    let c: Vec<f64> = (0..p)
        .map(|_| (c_lo.ln() + (c_hi.ln() - c_lo.ln()) * rng.random::<f64>()).exp())
        .collect();
    let nu = rng.random_range(1..=8);
    let prior = if rng.random::<bool>() {
        ModelPrior::Flat
    } else {
        ModelPrior::bernoulli((0..p).map(|_| 0.05 + 0.9 * rng.random::<f64>()).collect()).unwrap()
    };
    RandomInstance {
        data: DesignData::new(y, x).unwrap(),
        slab: SlabSpec::new(c, nu).unwrap(),
        prior,
    }
}

/// Draw a random state vector with each bit Bernoulli(density).
pub fn random_state(rng: &mut ChaCha8Rng, p: usize, density: f64) -> StateVector {
    let bits = (0..p)
        .map(|_| u8::from(rng.random::<f64>() < density))
        .collect();
    StateVector::new(bits).unwrap()
}

pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample::<f64, _>(rand_distr::StandardNormal)
}

#[cfg(test)]
mod sanity {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        // Degree-7 polynomial is exact for a 4-point rule.
        let (xs, ws) = gauss_legendre(4);
        let integral: f64 = xs
            .iter()
            .zip(&ws)
            .map(|(x, w)| w * (5.0 * x.powi(7) + x.powi(2) - 3.0))
            .sum();
        // ∫_{-1}^{1} (5x^7 + x^2 - 3) dx = 2/3 - 6
        assert!((integral - (2.0 / 3.0 - 6.0)).abs() < 1e-12);
    }

    #[test]
    fn ln_gamma_half_matches_known_values() {
        assert!((ln_gamma_half(2) - 0.0).abs() < 1e-15); // Γ(1) = 1
        assert!((ln_gamma_half(4) - 0.0).abs() < 1e-15); // Γ(2) = 1
        assert!((ln_gamma_half(6) - 2f64.ln()).abs() < 1e-14); // Γ(3) = 2
        // Γ(1/2) = √π
        assert!((ln_gamma_half(1) - 0.5 * std::f64::consts::PI.ln()).abs() < 1e-14);
        // Γ(5/2) = 3√π/4
        let expect = (3.0 / 4.0) * std::f64::consts::PI.sqrt();
        assert!((ln_gamma_half(5) - expect.ln()).abs() < 1e-14);
    }
}
