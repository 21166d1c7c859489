//! Points of the probability simplex used as sampling proportions.

use crate::error::{Error, Result};

/// How far Σω_k may drift from 1.
pub const SIMPLEX_SUM_TOLERANCE: f64 = 1e-12;

/// A vector ω of K nonnegative reals summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights(Vec<f64>);

impl Weights {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidWeights("empty weight vector".into()));
        }
        if values.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidWeights(format!(
                "weights must be finite and nonnegative: {values:?}"
            )));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_SUM_TOLERANCE {
            return Err(Error::InvalidWeights(format!(
                "weights sum to {sum}, expected 1"
            )));
        }
        Ok(Weights(values))
    }

    /// Normalize an arbitrary nonnegative vector onto the simplex.
    pub fn normalized(values: Vec<f64>) -> Result<Self> {
        let sum: f64 = values.iter().sum();
        if !(sum.is_finite() && sum > 0.0) {
            return Err(Error::InvalidWeights(format!(
                "cannot normalize a vector with total mass {sum}"
            )));
        }
        Weights::new(values.iter().map(|w| w / sum).collect())
    }

    pub fn uniform(k: usize) -> Self {
        Weights(vec![1.0 / k as f64; k])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn min_weight(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Whether ω lies in the open simplex (all coordinates positive).
    pub fn is_interior(&self) -> bool {
        self.min_weight() > 0.0
    }
}

impl std::ops::Index<usize> for Weights {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        &self.0[k]
    }
}

impl AsRef<[f64]> for Weights {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}
