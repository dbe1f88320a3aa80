//! Simulated data: orthonormalized Gaussian designs and linear-model
//! responses.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{DesignData, TruthSpec};
use crate::simlab::rng::substream;

/// Draw an n×p design with X = √n · U (UᵀU)^{-1/2}, where the rows of U are
/// iid standard normal. The result satisfies XᵀX = n·Iₚ up to roundoff
/// (within 1e−8 relative). Requires p ≤ n; beyond that UᵀU is singular.
pub fn gen_orthonormal_design(n: usize, p: usize, seed: u64) -> Result<DMatrix<f64>> {
    if p > n {
        return Err(Error::InvalidArgument(format!(
            "orthonormal design needs p <= n (got n = {n}, p = {p})"
        )));
    }
    if n == 0 || p == 0 {
        return Err(Error::InvalidArgument("n and p must be positive".into()));
    }
    let mut rng = substream(seed, "orthonormal-design");
    let u = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
    let gram = u.transpose() * &u;
    let eig = SymmetricEigen::new(gram);
    if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
        return Err(Error::Numerical(
            "UᵀU not positive definite; cannot orthonormalize".into(),
        ));
    }
    // (UᵀU)^{-1/2} = Q Λ^{-1/2} Qᵀ
    let inv_sqrt_vals = DVector::from_iterator(p, eig.eigenvalues.iter().map(|l| 1.0 / l.sqrt()));
    let q = eig.eigenvectors;
    let inv_sqrt = &q * DMatrix::from_diagonal(&inv_sqrt_vals) * q.transpose();
    Ok((n as f64).sqrt() * u * inv_sqrt)
}

/// Draw y = Xβ⁰ + ε with ε ~ N(0, σ₀² Iₙ), deterministically per seed.
pub fn gen_dataset(x: &DMatrix<f64>, truth: &TruthSpec, seed: u64) -> Result<DesignData> {
    if truth.p() != x.ncols() {
        return Err(Error::DimensionMismatch {
            context: "truth coefficients vs design columns",
            expected: x.ncols(),
            actual: truth.p(),
        });
    }
    let beta = DVector::from_column_slice(truth.beta0());
    let mut rng = substream(seed, "dataset-noise");
    let noise = DVector::from_fn(x.nrows(), |_, _| {
        truth.sigma0() * rng.sample::<f64, _>(StandardNormal)
    });
    let y = x * beta + noise;
    DesignData::new(y, x.clone())
}
