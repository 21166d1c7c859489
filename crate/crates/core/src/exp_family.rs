//! One-parameter canonical exponential families.
//!
//! A family is described by its log-partition function φ. The natural
//! parameter ξ and the mean x are linked by x = φ'(ξ), and the
//! Kullback-Leibler divergence between distributions with means x and y is
//! the Bregman divergence of φ with swapped natural parameters:
//! KL(x, y) = d(ξ_y, ξ_x) with d(a, b) = φ(a) − φ(b) − (a − b) φ'(b).
//!
//! Two families are implemented:
//!
//! * Gaussian with known variance σ²: φ(a) = σ²a²/2, mean domain (−∞, ∞),
//!   KL(x, y) = (x − y)²/(2σ²).
//! * Bernoulli: φ(a) = log(1 + eᵃ), mean domain (0, 1),
//!   KL(x, y) = x log(x/y) + (1 − x) log((1−x)/(1−y)).

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// One-parameter canonical exponential family of a single arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// Gaussian distributions with a known, fixed variance σ² > 0.
    GaussianKnownVariance { variance: f64 },
    /// Bernoulli distributions with mean in (0, 1).
    Bernoulli,
}

impl Family {
    /// Gaussian family with the given known variance.
    pub fn gaussian(variance: f64) -> Result<Self> {
        let family = Family::GaussianKnownVariance { variance };
        family.validate()?;
        Ok(family)
    }

    /// Standard Gaussian family (σ² = 1).
    pub fn standard_gaussian() -> Self {
        Family::GaussianKnownVariance { variance: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Family::GaussianKnownVariance { variance } => {
                if !(variance.is_finite() && variance > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "Gaussian variance must be positive and finite, got {variance}"
                    )));
                }
            }
            Family::Bernoulli => {}
        }
        Ok(())
    }

    /// Standard deviation of one observation.
    pub fn std_dev(&self, mean: f64) -> f64 {
        match *self {
            Family::GaussianKnownVariance { variance } => variance.sqrt(),
            Family::Bernoulli => (mean * (1.0 - mean)).sqrt(),
        }
    }

    /// Whether `x` lies in the open mean domain.
    pub fn contains_mean(&self, x: f64) -> bool {
        match *self {
            Family::GaussianKnownVariance { .. } => x.is_finite(),
            Family::Bernoulli => x > 0.0 && x < 1.0,
        }
    }

    /// Whether `x` lies in the closure of the mean domain. Empirical means
    /// can touch the boundary even though instance means cannot.
    pub fn closure_contains_mean(&self, x: f64) -> bool {
        match *self {
            Family::GaussianKnownVariance { .. } => x.is_finite(),
            Family::Bernoulli => (0.0..=1.0).contains(&x),
        }
    }

    /// Clamp a derived mean into the open domain, keeping a machine-epsilon
    /// distance from the Bernoulli boundary. Used before feeding values that
    /// may have rounded onto {0, 1} into logarithms.
    pub fn clamp_to_mean_domain(&self, x: f64) -> f64 {
        match *self {
            Family::GaussianKnownVariance { .. } => x,
            Family::Bernoulli => x.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0),
        }
    }

    /// Kullback-Leibler divergence between the distributions with means `x`
    /// and `y`.
    ///
    /// `x` may lie on the closure of the mean domain (Bernoulli KL at
    /// x ∈ {0, 1} uses the 0·log 0 = 0 convention, needed because empirical
    /// means can hit the boundary); `y` must be interior.
    pub fn kl(&self, x: f64, y: f64) -> Result<f64> {
        if !self.closure_contains_mean(x) {
            return Err(Error::InvalidParameter(format!(
                "first KL argument {x} outside the closed mean domain"
            )));
        }
        if !self.contains_mean(y) {
            return Err(Error::InvalidParameter(format!(
                "second KL argument {y} outside the open mean domain"
            )));
        }
        let value = match *self {
            Family::GaussianKnownVariance { variance } => {
                let d = x - y;
                0.5 * d * d / variance
            }
            Family::Bernoulli => {
                // log(x/y) = log1p((x-y)/y) keeps full relative precision
                // when x ≈ y, where the two terms nearly cancel.
                let t1 = if x == 0.0 {
                    0.0
                } else {
                    x * ((x - y) / y).ln_1p()
                };
                let t2 = if x == 1.0 {
                    0.0
                } else {
                    (1.0 - x) * ((y - x) / (1.0 - y)).ln_1p()
                };
                t1 + t2
            }
        };
        // Rounding can push a mathematically nonnegative value a few ulp
        // below zero when x and y are almost equal.
        Ok(value.max(0.0))
    }

    /// Natural parameter ξ of the distribution with mean `x` (the inverse
    /// map φ'⁻¹).
    pub fn natural_of_mean(&self, x: f64) -> Result<f64> {
        self.phi_prime_inv(x)
    }

    /// Mean of the distribution with natural parameter `xi` (the map φ').
    pub fn mean_of_natural(&self, xi: f64) -> f64 {
        self.phi_prime(xi)
    }

    /// Log-partition function φ.
    pub fn phi(&self, xi: f64) -> f64 {
        match *self {
            Family::GaussianKnownVariance { variance } => 0.5 * variance * xi * xi,
            // softplus, stable on both tails
            Family::Bernoulli => {
                if xi > 0.0 {
                    xi + (-xi).exp().ln_1p()
                } else {
                    xi.exp().ln_1p()
                }
            }
        }
    }

    /// φ', mapping natural parameters to means.
    pub fn phi_prime(&self, xi: f64) -> f64 {
        match *self {
            Family::GaussianKnownVariance { variance } => variance * xi,
            // logistic, stable on both tails
            Family::Bernoulli => {
                if xi >= 0.0 {
                    1.0 / (1.0 + (-xi).exp())
                } else {
                    let e = xi.exp();
                    e / (1.0 + e)
                }
            }
        }
    }

    /// φ'⁻¹, mapping means to natural parameters.
    pub fn phi_prime_inv(&self, x: f64) -> Result<f64> {
        if !self.contains_mean(x) {
            return Err(Error::InvalidParameter(format!(
                "mean {x} outside the open mean domain"
            )));
        }
        Ok(match *self {
            Family::GaussianKnownVariance { variance } => x / variance,
            // log-odds; log1p form keeps precision for x close to 1
            Family::Bernoulli => x.ln() - (-x).ln_1p(),
        })
    }

    /// Bregman divergence of φ: d(a, b) = φ(a) − φ(b) − (a − b) φ'(b).
    ///
    /// Satisfies KL(μ₁, μ₂) = d(ξ₂, ξ₁) under the parameter correspondence.
    pub fn bregman(&self, a: f64, b: f64) -> f64 {
        match *self {
            Family::GaussianKnownVariance { variance } => {
                let d = a - b;
                0.5 * variance * d * d
            }
            Family::Bernoulli => (self.phi(a) - self.phi(b) - (a - b) * self.phi_prime(b)).max(0.0),
        }
    }

    /// Draw one observation from the distribution with the given mean.
    /// Deterministic given the generator state.
    pub fn sample<R: Rng + ?Sized>(&self, mean: f64, rng: &mut R) -> f64 {
        match *self {
            Family::GaussianKnownVariance { variance } => {
                let z: f64 = rng.sample(StandardNormal);
                mean + variance.sqrt() * z
            }
            Family::Bernoulli => {
                if rng.gen::<f64>() < mean {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}
