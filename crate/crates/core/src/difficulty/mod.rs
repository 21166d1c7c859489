//! Oracle difficulty of static-proportions sampling.
//!
//! The central quantity is
//!
//! ```text
//! H(μ) = ( max_{ω ∈ Δ_K⁰} inf_{λ ∈ Alt(μ)} Σ_k ω_k KL(λ_k, μ_k) )⁻¹ ,
//! ```
//!
//! the inverse of the best large-deviation error rate attainable by a
//! static-proportions algorithm at μ. The inner infimum (the best response
//! of the alternative) reduces per task to a small closed-form or
//! one-dimensional problem; the outer maximum is solved in closed form where
//! available and by an equalization solver otherwise. A brute-force grid
//! oracle ([`grid_oracle`]) provides independent verification.

mod grid;
mod optimizer;

pub use grid::grid_oracle;
pub use optimizer::MwOptions;

use crate::error::{Error, Result};
use crate::exp_family::Family;
use crate::tasks::{self, dot, Answer, BanditInstance, TaskSpec};
use crate::weights::Weights;

/// Which computation produced a difficulty value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Optimizer,
    GridOracle,
}

/// A difficulty value together with the optimizing proportions and the
/// worst-case alternative.
#[derive(Debug, Clone)]
pub struct DifficultyResult {
    /// The oracle difficulty H.
    pub difficulty: f64,
    /// The max-min value H⁻¹.
    pub inverse_rate: f64,
    /// Optimal sampling proportions ω*.
    pub omega_star: Weights,
    /// Worst-case alternative λ* (may lie on the closure of the domain).
    pub lambda_star: Vec<f64>,
    pub method: Method,
}

impl DifficultyResult {
    fn new(inverse_rate: f64, omega_star: Weights, lambda_star: Vec<f64>, method: Method) -> Self {
        DifficultyResult {
            difficulty: 1.0 / inverse_rate,
            inverse_rate,
            omega_star,
            lambda_star,
            method,
        }
    }
}

/// Options for [`oracle_difficulty_sp`].
#[derive(Debug, Clone, Copy)]
pub struct DifficultyOptions {
    /// Restrict the maximization to {ω : min_k ω_k ≥ min_weight}. Zero means
    /// the full simplex.
    pub min_weight: f64,
}

impl Default for DifficultyOptions {
    fn default() -> Self {
        DifficultyOptions { min_weight: 0.0 }
    }
}

/// One candidate of the inner infimum: a specific alternative λ and the
/// linear-in-ω cost it induces.
#[derive(Debug, Clone)]
pub(crate) struct Piece {
    pub value: f64,
    pub lambda: Vec<f64>,
    /// Coefficients of the cost as a linear function of ω:
    /// gradient[k] = KL(λ_k, μ_k).
    pub gradient: Vec<f64>,
}

/// Value and minimizer of the best response of the alternative.
#[derive(Debug, Clone)]
pub struct BestResponse {
    /// inf_{λ ∈ Alt(μ)} Σ_k ω_k KL(λ_k, μ_k)
    pub value: f64,
    /// The minimizing alternative (possibly on the closure of the domain).
    pub lambda_star: Vec<f64>,
}

/// Exact best response of the alternative for interior weights.
///
/// Per-task reductions: best arm moves the leader and one challenger to a
/// common mean, thresholding and positivity move arms to the threshold, and
/// the Gaussian half-space projects onto the boundary in the ω-weighted
/// norm.
pub fn best_response(
    task: &TaskSpec,
    instance: &BanditInstance,
    omega: &Weights,
) -> Result<BestResponse> {
    let pieces = best_response_pieces(task, instance, omega)?;
    let best = pieces
        .into_iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("at least one piece");
    Ok(BestResponse {
        value: best.value,
        lambda_star: best.lambda,
    })
}

/// The asymptotic rate of the static-proportions algorithm with
/// proportions ω: the reciprocal of the best-response value.
pub fn sp_rate(task: &TaskSpec, instance: &BanditInstance, omega: &Weights) -> Result<f64> {
    Ok(1.0 / best_response(task, instance, omega)?.value)
}

pub(crate) fn best_response_pieces(
    task: &TaskSpec,
    instance: &BanditInstance,
    omega: &Weights,
) -> Result<Vec<Piece>> {
    if omega.len() != instance.num_arms() {
        return Err(Error::InvalidWeights(format!(
            "{} weights for {} arms",
            omega.len(),
            instance.num_arms()
        )));
    }
    if !omega.is_interior() {
        return Err(Error::InvalidWeights(
            "best response requires interior weights".into(),
        ));
    }
    let answer = tasks::correct_answer(task, instance)?;
    let means = instance.means();
    let k_arms = instance.num_arms();

    let piece_from_lambda = |lambda: Vec<f64>| -> Result<Piece> {
        let mut gradient = vec![0.0; k_arms];
        let mut value = 0.0;
        for k in 0..k_arms {
            let g = if lambda[k] == means[k] {
                0.0
            } else {
                instance.arm(k).family.kl(lambda[k], means[k])?
            };
            gradient[k] = g;
            value += omega[k] * g;
        }
        Ok(Piece { value, lambda, gradient })
    };

    match task {
        TaskSpec::BestArm => {
            let Answer::BestArm(leader) = answer else { unreachable!() };
            let mut pieces = Vec::with_capacity(k_arms - 1);
            for challenger in 0..k_arms {
                if challenger == leader {
                    continue;
                }
                let x = pair_mixture_argmin(
                    instance.arm(leader).family,
                    means[leader],
                    omega[leader],
                    instance.arm(challenger).family,
                    means[challenger],
                    omega[challenger],
                )?;
                let mut lambda = means.clone();
                lambda[leader] = x;
                lambda[challenger] = x;
                pieces.push(piece_from_lambda(lambda)?);
            }
            Ok(pieces)
        }
        TaskSpec::Thresholding { threshold } => {
            // flip any single arm to the threshold; the others stay put
            (0..k_arms)
                .map(|k| {
                    let mut lambda = means.clone();
                    lambda[k] = *threshold;
                    piece_from_lambda(lambda)
                })
                .collect()
        }
        TaskSpec::Positivity { threshold } => match answer {
            // any single arm dropping to the threshold flips the answer
            Answer::AllAbove => (0..k_arms)
                .map(|k| {
                    let mut lambda = means.clone();
                    lambda[k] = *threshold;
                    piece_from_lambda(lambda)
                })
                .collect(),
            // every below-threshold arm must be raised to the threshold
            Answer::ExistsBelow => {
                let mut lambda = means.clone();
                for k in 0..k_arms {
                    if means[k] < *threshold {
                        lambda[k] = *threshold;
                    }
                }
                Ok(vec![piece_from_lambda(lambda)?])
            }
            _ => unreachable!(),
        },
        TaskSpec::HalfSpace { direction, offset } => {
            let sigmas = instance.gaussian_std_devs().ok_or_else(|| {
                Error::UnsupportedCombination(
                    "half-space best response requires Gaussian arms".into(),
                )
            })?;
            // minimize Σ ω_k σ_k⁻² (λ_k − μ_k)² / 2 over the boundary
            // λᵀu = c; the minimizer is an ω-weighted projection.
            let residual = offset - dot(&means, direction);
            let norm_sq: f64 = direction
                .iter()
                .zip(&sigmas)
                .zip(omega.as_slice())
                .map(|((u, s), w)| u * u * s * s / w)
                .sum();
            let lambda: Vec<f64> = (0..k_arms)
                .map(|k| {
                    means[k] + residual * direction[k] * sigmas[k] * sigmas[k]
                        / (omega[k] * norm_sq)
                })
                .collect();
            Ok(vec![piece_from_lambda(lambda)?])
        }
    }
}

/// Minimizer of x ↦ w₁ KL₁(x, μ₁) + w₂ KL₂(x, μ₂) for positive (not
/// necessarily normalized) weights.
///
/// For a common family the minimizer is the mean of the weighted average of
/// the natural parameters; for mixed families the stationarity condition
/// w₁(ξ₁(x) − ξ₁(μ₁)) + w₂(ξ₂(x) − ξ₂(μ₂)) = 0 is monotone in x and is
/// solved by bisection.
pub(crate) fn pair_mixture_argmin(
    f1: Family,
    m1: f64,
    w1: f64,
    f2: Family,
    m2: f64,
    w2: f64,
) -> Result<f64> {
    if f1 == f2 {
        let xi1 = f1.natural_of_mean(m1)?;
        let xi2 = f1.natural_of_mean(m2)?;
        return Ok(f1.mean_of_natural((w1 * xi1 + w2 * xi2) / (w1 + w2)));
    }
    if let (
        Family::GaussianKnownVariance { variance: v1 },
        Family::GaussianKnownVariance { variance: v2 },
    ) = (f1, f2)
    {
        // weighted precision mean
        let (p1, p2) = (w1 / v1, w2 / v2);
        return Ok((p1 * m1 + p2 * m2) / (p1 + p2));
    }
    // Mixed Gaussian/Bernoulli pair: the common mean lives in (0, 1).
    let xi1_mu = f1.natural_of_mean(m1)?;
    let xi2_mu = f2.natural_of_mean(m2)?;
    let h = |x: f64| -> f64 {
        let xi1 = f1.phi_prime_inv(x).expect("x interior");
        let xi2 = f2.phi_prime_inv(x).expect("x interior");
        w1 * (xi1 - xi1_mu) + w2 * (xi2 - xi2_mu)
    };
    let (mut lo, mut hi) = (f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
    debug_assert!(h(lo) < 0.0 && h(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Oracle static-proportions difficulty.
///
/// Dispatches to closed forms (two-arm best arm in a common family,
/// thresholding, positivity, half-space) and to the equalization optimizer
/// for best arm identification with K ≥ 3, mixed families, or a restricted
/// simplex.
pub fn oracle_difficulty_sp(
    task: &TaskSpec,
    instance: &BanditInstance,
    options: &DifficultyOptions,
) -> Result<DifficultyResult> {
    validate_min_weight(options.min_weight, instance.num_arms())?;
    let answer = tasks::correct_answer(task, instance)?;
    match task {
        TaskSpec::BestArm => {
            if options.min_weight == 0.0
                && instance.num_arms() == 2
                && instance.common_family().is_some()
            {
                closed_form_expfam_bai_2(instance)
            } else {
                optimizer::solve_best_arm(instance, options.min_weight)
            }
        }
        TaskSpec::Thresholding { threshold } => {
            threshold_style_difficulty(task, instance, *threshold, options.min_weight)
        }
        TaskSpec::Positivity { threshold } => match answer {
            Answer::AllAbove => {
                threshold_style_difficulty(task, instance, *threshold, options.min_weight)
            }
            Answer::ExistsBelow => {
                positivity_exists_below_difficulty(task, instance, *threshold, options.min_weight)
            }
            _ => unreachable!(),
        },
        TaskSpec::HalfSpace { direction, offset } => {
            half_space_difficulty(instance, direction, *offset, options.min_weight)
        }
    }
}

/// Force the numeric optimizer route (multiplicative-weights ascent plus an
/// equalization refinement with a certified duality gap), even where a
/// closed form exists. Useful for cross-checking the closed forms.
pub fn optimize_difficulty(
    task: &TaskSpec,
    instance: &BanditInstance,
    options: &DifficultyOptions,
) -> Result<DifficultyResult> {
    validate_min_weight(options.min_weight, instance.num_arms())?;
    tasks::correct_answer(task, instance)?;
    match task {
        TaskSpec::BestArm => optimizer::solve_best_arm(instance, options.min_weight),
        _ => optimizer::solve_generic(task, instance, options.min_weight),
    }
}

fn validate_min_weight(min_weight: f64, k_arms: usize) -> Result<()> {
    if !(min_weight.is_finite() && min_weight >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "min_weight must be a nonnegative real, got {min_weight}"
        )));
    }
    if min_weight * k_arms as f64 >= 1.0 {
        return Err(Error::InvalidInput(format!(
            "min_weight {min_weight} leaves no feasible point of the simplex for {k_arms} arms"
        )));
    }
    Ok(())
}

/// max_ω min_k ω_k c_k over {ω ≥ w₀}, by equalization with water-filling of
/// the floor constraint. Covers thresholding and the all-above side of
/// positivity, where c_k = KL(θ, μ_k).
fn threshold_style_difficulty(
    task: &TaskSpec,
    instance: &BanditInstance,
    threshold: f64,
    min_weight: f64,
) -> Result<DifficultyResult> {
    let k_arms = instance.num_arms();
    let costs: Vec<f64> = (0..k_arms)
        .map(|k| instance.arm(k).family.kl(threshold, instance.arm(k).mean))
        .collect::<Result<_>>()?;
    // water-filling: arms whose equalizing weight would fall below the floor
    // are clamped at it
    let mut clamped = vec![false; k_arms];
    let omega = loop {
        let free_mass = 1.0 - min_weight * clamped.iter().filter(|&&c| c).count() as f64;
        let inv_sum: f64 = costs
            .iter()
            .zip(&clamped)
            .filter(|(_, &c)| !c)
            .map(|(c, _)| 1.0 / c)
            .sum();
        let level = free_mass / inv_sum;
        let mut changed = false;
        for k in 0..k_arms {
            if !clamped[k] && level / costs[k] < min_weight {
                clamped[k] = true;
                changed = true;
            }
        }
        if !changed {
            let omega: Vec<f64> = (0..k_arms)
                .map(|k| if clamped[k] { min_weight } else { level / costs[k] })
                .collect();
            break Weights::normalized(omega)?;
        }
    };
    let response = best_response(task, instance, &omega)?;
    Ok(DifficultyResult::new(
        response.value,
        omega,
        response.lambda_star,
        Method::ClosedForm,
    ))
}

/// Positivity at an exists-below instance: the single best-response piece is
/// linear in ω, so the maximum sits at a vertex of the (floored) simplex.
fn positivity_exists_below_difficulty(
    task: &TaskSpec,
    instance: &BanditInstance,
    threshold: f64,
    min_weight: f64,
) -> Result<DifficultyResult> {
    let k_arms = instance.num_arms();
    let mut best_arm = None;
    let mut best_cost = f64::NEG_INFINITY;
    for k in 0..k_arms {
        let arm = instance.arm(k);
        if arm.mean < threshold {
            let cost = arm.family.kl(threshold, arm.mean)?;
            if cost > best_cost {
                best_cost = cost;
                best_arm = Some(k);
            }
        }
    }
    let best_arm = best_arm.expect("exists-below answer implies a below arm");
    let slack = 1.0 - min_weight * k_arms as f64;
    let omega = Weights::new(
        (0..k_arms)
            .map(|k| min_weight + if k == best_arm { slack } else { 0.0 })
            .collect(),
    )?;
    // The maximum over the open simplex is a supremum attained on the
    // closure; report the closure point and evaluate the value there.
    let mut lambda = instance.means();
    let mut value = 0.0;
    for k in 0..k_arms {
        if instance.arm(k).mean < threshold {
            lambda[k] = threshold;
            value += omega[k] * instance.arm(k).family.kl(threshold, instance.arm(k).mean)?;
        }
    }
    Ok(DifficultyResult::new(value, omega, lambda, Method::ClosedForm))
}

/// Gaussian half-space difficulty: H⁻¹ = (μᵀu − c)²/2 with
/// ω*_k ∝ |u_k| σ_k, water-filled against the floor when restricted.
fn half_space_difficulty(
    instance: &BanditInstance,
    direction: &[f64],
    offset: f64,
    min_weight: f64,
) -> Result<DifficultyResult> {
    let sigmas = instance.gaussian_std_devs().ok_or_else(|| {
        Error::UnsupportedCombination("half-space difficulty requires Gaussian arms".into())
    })?;
    let k_arms = instance.num_arms();
    let scores: Vec<f64> = direction
        .iter()
        .zip(&sigmas)
        .map(|(u, s)| u.abs() * s)
        .collect();
    // minimize Σ u_k²σ_k²/ω_k: unconstrained solution ω_k ∝ |u_k|σ_k
    let mut clamped: Vec<bool> = scores.iter().map(|&s| s == 0.0).collect();
    let omega = loop {
        let clamped_mass: f64 = min_weight * clamped.iter().filter(|&&c| c).count() as f64;
        let free_mass = 1.0 - clamped_mass;
        let score_sum: f64 = scores
            .iter()
            .zip(&clamped)
            .filter(|(_, &c)| !c)
            .map(|(s, _)| s)
            .sum();
        let mut changed = false;
        for k in 0..k_arms {
            if !clamped[k] && free_mass * scores[k] / score_sum < min_weight {
                clamped[k] = true;
                changed = true;
            }
        }
        if !changed {
            let omega: Vec<f64> = (0..k_arms)
                .map(|k| {
                    if clamped[k] {
                        min_weight
                    } else {
                        free_mass * scores[k] / score_sum
                    }
                })
                .collect();
            break omega;
        }
    };
    // Coordinates with u_k = 0 get no weight in the unrestricted problem;
    // the supremum is attained in the closure. Evaluate the value directly.
    let norm_sq: f64 = (0..k_arms)
        .filter(|&k| direction[k] != 0.0)
        .map(|k| {
            let u = direction[k] * sigmas[k];
            u * u / omega[k]
        })
        .sum();
    let residual = dot(&instance.means(), direction) - offset;
    let value = 0.5 * residual * residual / norm_sq;
    let lambda: Vec<f64> = (0..k_arms)
        .map(|k| {
            if direction[k] == 0.0 {
                instance.arm(k).mean
            } else {
                instance.arm(k).mean
                    - residual * direction[k] * sigmas[k] * sigmas[k] / (omega[k] * norm_sq)
            }
        })
        .collect();
    Ok(DifficultyResult::new(
        value,
        Weights::normalized(omega)?,
        lambda,
        Method::ClosedForm,
    ))
}

/// Two-arm best-arm difficulty in a common exponential family.
///
/// With natural parameters ξ₁, ξ₂ of the two means,
/// H⁻¹ = KL(x*, μ₁) = KL(x*, μ₂) where x* = (φ(ξ₁) − φ(ξ₂))/(ξ₁ − ξ₂),
/// and ω*₁ = (φ'⁻¹(x*) − ξ₂)/(ξ₁ − ξ₂).
pub fn closed_form_expfam_bai_2(instance: &BanditInstance) -> Result<DifficultyResult> {
    if instance.num_arms() != 2 {
        return Err(Error::UnsupportedCombination(format!(
            "two-arm closed form called with {} arms",
            instance.num_arms()
        )));
    }
    let family = instance.common_family().ok_or_else(|| {
        Error::UnsupportedCombination("two-arm closed form requires a common family".into())
    })?;
    tasks::correct_answer(&TaskSpec::BestArm, instance)?;
    let (m1, m2) = (instance.arm(0).mean, instance.arm(1).mean);
    let xi1 = family.natural_of_mean(m1)?;
    let xi2 = family.natural_of_mean(m2)?;
    let x_star = family.clamp_to_mean_domain((family.phi(xi1) - family.phi(xi2)) / (xi1 - xi2));
    let omega1 = (family.natural_of_mean(x_star)? - xi2) / (xi1 - xi2);
    let inverse_rate = family.kl(x_star, m1)?;
    Ok(DifficultyResult::new(
        inverse_rate,
        Weights::new(vec![omega1, 1.0 - omega1])?,
        vec![x_star, x_star],
        Method::ClosedForm,
    ))
}

/// Two-arm Bernoulli best-arm difficulty:
/// H⁻¹ = KL( log((1−μ₂)/(1−μ₁)) / log(μ₁(1−μ₂)/((1−μ₁)μ₂)), μ₁ ).
pub fn closed_form_bernoulli_bai(instance: &BanditInstance) -> Result<DifficultyResult> {
    if instance.num_arms() != 2 || instance.common_family() != Some(Family::Bernoulli) {
        return Err(Error::UnsupportedCombination(
            "Bernoulli closed form requires two Bernoulli arms".into(),
        ));
    }
    tasks::correct_answer(&TaskSpec::BestArm, instance)?;
    let (m1, m2) = (instance.arm(0).mean, instance.arm(1).mean);
    let family = Family::Bernoulli;
    // log((1−μ₂)/(1−μ₁)) and the log-odds difference; log1p keeps precision
    // for means close to 0 or 1
    let numerator = (-m2).ln_1p() - (-m1).ln_1p();
    let denominator = family.natural_of_mean(m1)? - family.natural_of_mean(m2)?;
    let x_star = family.clamp_to_mean_domain(numerator / denominator);
    let inverse_rate = family.kl(x_star, m1)?;
    let omega1 = (family.natural_of_mean(x_star)? - family.natural_of_mean(m2)?) / denominator;
    Ok(DifficultyResult::new(
        inverse_rate,
        Weights::new(vec![omega1, 1.0 - omega1])?,
        vec![x_star, x_star],
        Method::ClosedForm,
    ))
}

/// Gap-based difficulty for unit-variance Gaussian best-arm identification:
/// H_Δ(μ) = 2/min_{Δ_k>0} Δ_k² + Σ_{Δ_k>0} 2/Δ_k².
pub fn h_delta(instance: &BanditInstance) -> Result<f64> {
    for arm in instance.arms() {
        match arm.family {
            Family::GaussianKnownVariance { variance } if variance == 1.0 => {}
            _ => {
                return Err(Error::UnsupportedCombination(
                    "the gap-based difficulty assumes unit-variance Gaussian arms".into(),
                ))
            }
        }
    }
    let means = instance.means();
    let best = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut min_gap_sq = f64::INFINITY;
    let mut sum = 0.0;
    for &m in &means {
        let gap = best - m;
        if gap > 0.0 {
            min_gap_sq = min_gap_sq.min(gap * gap);
            sum += 2.0 / (gap * gap);
        }
    }
    if !min_gap_sq.is_finite() {
        return Err(Error::DegenerateInstance(
            "all arms share the maximal mean".into(),
        ));
    }
    Ok(2.0 / min_gap_sq + sum)
}

/// Output of [`ball_restricted_difficulty`].
#[derive(Debug, Clone)]
pub struct BallRestrictedDifficulty {
    /// max_ω inf over the ball-restricted alternative of
    /// Σ_k ω_k σ_k⁻² (λ_k − μ_k)², equal to ((μ − η)ᵀu)².
    pub value: f64,
    /// The witness alternative λ_u(μ) = μ − ((μ − η)ᵀu)(sign(u_k) σ_k)_k.
    pub witness: Vec<f64>,
    /// ‖λ_u(μ) − η‖ in the σ⁻²-weighted norm.
    pub witness_distance: f64,
    /// Ball radius r the witness must stay inside.
    pub radius: f64,
    /// (λ_u(μ) − η)ᵀu, which vanishes under the normalization Σ|u_k|σ_k = 1.
    pub boundary_residual: f64,
}

impl BallRestrictedDifficulty {
    pub fn witness_in_ball(&self) -> bool {
        self.witness_distance <= self.radius
    }
}

/// Ball-restricted Gaussian half-space difficulty.
///
/// For μ in the shrunken ball B(η, r/(√K + 1)) with μᵀu < ηᵀu, restricting
/// the alternative to B(η, r) does not change the half-space value
/// ((μ − η)ᵀu)²; the witness lies in the ball and on the boundary
/// hyperplane.
pub fn ball_restricted_difficulty(
    instance: &BanditInstance,
    eta: &[f64],
    direction: &[f64],
    offset: f64,
    radius: f64,
    mu: &[f64],
) -> Result<BallRestrictedDifficulty> {
    let sigmas = instance.gaussian_std_devs().ok_or_else(|| {
        Error::UnsupportedCombination("ball-restricted difficulty requires Gaussian arms".into())
    })?;
    let k_arms = instance.num_arms();
    if eta.len() != k_arms || direction.len() != k_arms || mu.len() != k_arms {
        return Err(Error::InvalidInput(
            "eta, direction and mu must all have one coordinate per arm".into(),
        ));
    }
    let task = TaskSpec::HalfSpace {
        direction: direction.to_vec(),
        offset,
    };
    tasks::validate_task(&task, instance)?;
    if (dot(eta, direction) - offset).abs() > 1e-12 * offset.abs().max(1.0) {
        return Err(Error::PreconditionViolated(
            "the ball center must lie on the boundary hyperplane".into(),
        ));
    }
    let projection = dot(mu, direction) - offset;
    if projection == 0.0 {
        return Err(Error::DegenerateInstance(
            "mu lies exactly on the boundary hyperplane".into(),
        ));
    }
    if projection > 0.0 {
        return Err(Error::PreconditionViolated(
            "the lemma requires μᵀu < ηᵀu".into(),
        ));
    }
    let mu_distance = weighted_distance(mu, eta, &sigmas);
    let shrunken = radius / ((k_arms as f64).sqrt() + 1.0);
    if mu_distance > shrunken {
        return Err(Error::PreconditionViolated(format!(
            "μ at σ⁻²-distance {mu_distance} from η, outside the shrunken ball of radius {shrunken}"
        )));
    }
    let witness: Vec<f64> = (0..k_arms)
        .map(|k| mu[k] - projection * direction[k].signum() * sigmas[k])
        .collect();
    Ok(BallRestrictedDifficulty {
        value: projection * projection,
        witness_distance: weighted_distance(&witness, eta, &sigmas),
        boundary_residual: dot(&witness, direction) - offset,
        witness,
        radius,
    })
}

fn weighted_distance(a: &[f64], b: &[f64], sigmas: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(sigmas)
        .map(|((x, y), s)| {
            let d = (x - y) / s;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}
