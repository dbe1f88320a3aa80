//! Binary state vectors identifying submodels.
//!
//! A state vector γ is a length-p 0/1 vector; γ_j = 1 means covariate j
//! enters the model. The difference γ∖γ′ marks coordinates present in γ but
//! absent in γ′, and γ is nested in γ′ when that difference is empty.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Inclusion indicator vector for a submodel of a p-covariate design.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateVector {
    bits: Vec<u8>,
}

impl StateVector {
    /// Build from raw 0/1 entries.
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidArgument(
                "state vector entries must be 0 or 1".into(),
            ));
        }
        Ok(Self { bits })
    }

    /// The null model on p covariates (all zeros).
    pub fn null(p: usize) -> Self {
        Self { bits: vec![0; p] }
    }

    /// The full model on p covariates (all ones).
    pub fn full(p: usize) -> Self {
        Self { bits: vec![1; p] }
    }

    /// Model containing exactly the given 0-based coordinates.
    pub fn from_support(p: usize, support: &[usize]) -> Result<Self> {
        let mut bits = vec![0u8; p];
        for &j in support {
            if j >= p {
                return Err(Error::InvalidArgument(format!(
                    "support index {j} out of range for p = {p}"
                )));
            }
            bits[j] = 1;
        }
        Ok(Self { bits })
    }

    /// Decode a model index, reading γ_1 as the most significant bit.
    ///
    /// This is the inverse of [`StateVector::to_index`]; enumeration iterates
    /// models in this index order.
    pub fn from_index(p: usize, index: u64) -> Self {
        debug_assert!(p <= 63 && index < (1u64 << p));
        let bits = (0..p).map(|j| ((index >> (p - 1 - j)) & 1) as u8).collect();
        Self { bits }
    }

    /// Binary value of the bits with γ_1 most significant. Requires p ≤ 63.
    pub fn to_index(&self) -> u64 {
        debug_assert!(self.len() <= 63);
        self.bits
            .iter()
            .fold(0u64, |acc, &b| (acc << 1) | u64::from(b))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// |γ|: number of included coordinates.
    pub fn count(&self) -> usize {
        self.bits.iter().map(|&b| b as usize).sum()
    }

    /// True for the null model.
    pub fn is_null(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    pub fn get(&self, j: usize) -> u8 {
        self.bits[j]
    }

    pub fn set(&mut self, j: usize, value: bool) {
        self.bits[j] = u8::from(value);
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// 0-based indices of the included coordinates, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .map(|(j, _)| j)
            .collect()
    }

    /// With-bit-flipped copy.
    pub fn with_bit(&self, j: usize, value: bool) -> Self {
        let mut out = self.clone();
        out.set(j, value);
        out
    }

    /// The difference γ∖γ′: coordinates present here but absent in `other`.
    pub fn difference(&self, other: &StateVector) -> Result<StateVector> {
        self.check_len(other)?;
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(&a, &b)| u8::from(a == 1 && b == 0))
            .collect();
        Ok(StateVector { bits })
    }

    /// Whether self is nested in `other` (every included coordinate of self
    /// is also included in `other`). Reflexive.
    pub fn is_nested_in(&self, other: &StateVector) -> Result<bool> {
        Ok(self.difference(other)?.is_null())
    }

    /// Coordinate-wise maximum γ ∨ γ′.
    pub fn union(&self, other: &StateVector) -> Result<StateVector> {
        self.check_len(other)?;
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(&a, &b)| a.max(b))
            .collect();
        Ok(StateVector { bits })
    }

    fn check_len(&self, other: &StateVector) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                context: "state vector pair",
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for StateVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits: Result<Vec<u8>> = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::InvalidArgument(format!(
                    "invalid state vector character '{c}'"
                ))),
            })
            .collect();
        Ok(Self { bits: bits? })
    }
}
