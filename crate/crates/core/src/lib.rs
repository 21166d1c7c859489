//! Fixed-budget bandit identification toolkit.
//!
//! This crate computes oracle difficulties of static-proportions sampling,
//! evaluates lower bounds on the difficulty ratio of fixed-budget
//! identification algorithms, and estimates error probabilities and empirical
//! rates by Monte Carlo simulation.
//!
//! The main pieces:
//!
//! * [`exp_family`]: one-parameter canonical exponential families
//!   (Gaussian with known variance, Bernoulli) with mean/natural
//!   parametrizations, KL and Bregman divergences, and sampling.
//! * [`tasks`]: identification tasks (best arm, thresholding, positivity,
//!   half-space), their correct-answer functions and alternative sets.
//! * [`difficulty`]: the static-proportions oracle difficulty
//!   `H(μ) = (max_ω inf_{λ∈Alt(μ)} Σ_k ω_k KL(λ_k, μ_k))⁻¹`, per-ω rates,
//!   closed forms, the gap-based Gaussian difficulty, and a brute-force
//!   grid oracle for verification.
//! * [`bounds`]: evaluators for lower bounds on the difficulty ratio
//!   (finite-horizon inequality, limsup maximin bound, corner construction)
//!   and the explicit hard-instance constructions for Gaussian BAI,
//!   two-arm Bernoulli BAI, and positivity.
//! * [`simulator`]: fixed-budget algorithm families (static proportions,
//!   uniform, successive rejects, successive halving) with reproducible
//!   parallel Monte Carlo estimation of the error probability.

pub mod bounds;
pub mod difficulty;
pub mod error;
pub mod exp_family;
pub mod simulator;
pub mod tasks;
pub mod weights;

pub use error::{Error, Result};
pub use exp_family::Family;
pub use tasks::{Answer, BanditInstance, TaskSpec};
pub use weights::Weights;
