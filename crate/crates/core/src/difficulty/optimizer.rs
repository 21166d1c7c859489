//! Outer maximization over the simplex.
//!
//! The map ω ↦ inf_λ Σ_k ω_k KL(λ_k, μ_k) is concave (an infimum of linear
//! functions), so a certified global maximum is available: any point ω̂
//! together with an aggregated supergradient ĝ gives the bound
//! max f ≤ max over the feasible simplex of ⟨ĝ, ω'⟩, and the difference to
//! f(ω̂) is a duality gap.
//!
//! Three engines cooperate:
//! * multiplicative-weights ascent with averaged iterates (generic, slow
//!   tail convergence, used for globalization and as the documented
//!   fallback),
//! * an equalization solver for best-arm identification (all active
//!   challengers share the optimal value; a scalar bisection on that value
//!   reaches machine precision),
//! * closed-form refinements for the remaining tasks.
//!
//! Every returned result is certified: the relative duality gap at the
//! final point must be at most [`RELATIVE_GAP_TOLERANCE`], otherwise the
//! solve fails with an optimizer-failure error.

use crate::error::{Error, Result};
use crate::tasks::{BanditInstance, TaskSpec};
use crate::weights::Weights;

use super::{
    best_response_pieces, oracle_difficulty_sp, pair_mixture_argmin, DifficultyOptions,
    DifficultyResult, Method, Piece,
};

/// Relative duality gap below which a solve counts as converged.
pub const RELATIVE_GAP_TOLERANCE: f64 = 1e-9;

/// Iteration cap for the multiplicative-weights ascent.
pub const MW_ITERATION_CAP: usize = 1_000_000;

/// Options for the multiplicative-weights ascent.
#[derive(Debug, Clone, Copy)]
pub struct MwOptions {
    pub max_iters: usize,
    pub rel_gap_tol: f64,
}

impl Default for MwOptions {
    fn default() -> Self {
        MwOptions {
            max_iters: MW_ITERATION_CAP,
            rel_gap_tol: RELATIVE_GAP_TOLERANCE,
        }
    }
}

pub(crate) struct MwOutcome {
    pub omega: Weights,
    pub value: f64,
    pub rel_gap: f64,
}

/// Multiplicative-weights ascent with averaged iterates on the floored
/// simplex {ω : ω ≥ w₀}, reparametrized as ω = w₀ + (1 − K w₀) ψ with ψ in
/// the plain simplex. Returns the best point seen, with its certified gap.
pub(crate) fn mw_ascent(
    task: &TaskSpec,
    instance: &BanditInstance,
    min_weight: f64,
    options: &MwOptions,
) -> Result<MwOutcome> {
    let k_arms = instance.num_arms();
    let scale = 1.0 - min_weight * k_arms as f64;
    let to_omega = |psi: &[f64]| -> Result<Weights> {
        Weights::normalized(psi.iter().map(|p| min_weight + scale * p).collect())
    };
    let mut psi = vec![1.0 / k_arms as f64; k_arms];
    let mut psi_sum = vec![0.0; k_arms];
    let mut best: Option<(Weights, f64)> = None;
    let mut grad_scale = f64::MIN_POSITIVE;

    let consider = |omega: Weights, pieces: &[Piece], best: &mut Option<(Weights, f64)>| {
        let value = pieces.iter().map(|p| p.value).fold(f64::INFINITY, f64::min);
        if best.as_ref().map_or(true, |(_, v)| value > *v) {
            *best = Some((omega, value));
        }
        value
    };

    for t in 0..options.max_iters {
        let omega = to_omega(&psi)?;
        let pieces = best_response_pieces(task, instance, &omega)?;
        let (min_idx, _) = pieces
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.value.total_cmp(&b.1.value))
            .expect("nonempty pieces");
        consider(omega, &pieces, &mut best);
        let gradient = &pieces[min_idx].gradient;
        for g in gradient {
            grad_scale = grad_scale.max(*g);
        }
        // anytime step size for entropic ascent
        let step = (8.0 * (k_arms as f64).ln().max(1.0) / (t as f64 + 1.0)).sqrt() / grad_scale;
        let max_g = gradient.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for (p, g) in psi.iter_mut().zip(gradient) {
            *p *= (step * scale * (g - max_g)).exp();
            total += *p;
        }
        for (p, s) in psi.iter_mut().zip(psi_sum.iter_mut()) {
            *p /= total;
            *s += *p;
        }
        // periodically check the averaged iterate and the certificate
        if (t + 1) % 512 == 0 || t + 1 == options.max_iters {
            let avg: Vec<f64> = psi_sum.iter().map(|s| s / (t as f64 + 1.0)).collect();
            let omega_avg = to_omega(&avg)?;
            let pieces_avg = best_response_pieces(task, instance, &omega_avg)?;
            consider(omega_avg, &pieces_avg, &mut best);
            let (omega_best, value_best) = best.clone().expect("seen at least one point");
            let gap = certified_gap(task, instance, &omega_best, min_weight)?;
            if gap <= options.rel_gap_tol * value_best.abs() {
                return Ok(MwOutcome {
                    omega: omega_best,
                    value: value_best,
                    rel_gap: gap / value_best.abs(),
                });
            }
        }
    }
    let (omega, value) = best.expect("at least one iteration");
    let gap = certified_gap(task, instance, &omega, min_weight)?;
    Ok(MwOutcome {
        omega,
        value,
        rel_gap: gap / value.abs().max(f64::MIN_POSITIVE),
    })
}

/// Upper bound max_{ω' feasible} ⟨ĝ, ω'⟩ − f(ω) for the best available
/// aggregated supergradient ĝ at ω. Nonnegative; zero exactly at an optimum.
pub(crate) fn certified_gap(
    task: &TaskSpec,
    instance: &BanditInstance,
    omega: &Weights,
    min_weight: f64,
) -> Result<f64> {
    let pieces = best_response_pieces(task, instance, omega)?;
    let value = pieces.iter().map(|p| p.value).fold(f64::INFINITY, f64::min);
    let k_arms = instance.num_arms();
    let linear_max = |g: &[f64]| -> f64 {
        let top = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let floor_mass: f64 = g.iter().sum::<f64>() * min_weight;
        floor_mass + (1.0 - min_weight * k_arms as f64) * top
    };

    // candidate 1: each active piece alone
    let active: Vec<&Piece> = pieces
        .iter()
        .filter(|p| p.value <= value * (1.0 + 1e-7) + 1e-300)
        .collect();
    let mut upper = active
        .iter()
        .map(|p| linear_max(&p.gradient))
        .fold(f64::INFINITY, f64::min);

    // candidate 2: equalization-weighted aggregation. Each active piece gets
    // mass inversely proportional to the gradient on its distinguishing
    // coordinate (the coordinate no other active piece touches).
    if active.len() > 1 {
        let mut counts = vec![0usize; k_arms];
        for p in &active {
            for (k, g) in p.gradient.iter().enumerate() {
                if *g > 0.0 {
                    counts[k] += 1;
                }
            }
        }
        let mut pi = Vec::with_capacity(active.len());
        let mut ok = true;
        for p in &active {
            let own = (0..k_arms)
                .filter(|&k| counts[k] == 1 && p.gradient[k] > 0.0)
                .max_by(|&a, &b| p.gradient[a].total_cmp(&p.gradient[b]));
            match own {
                Some(k) => pi.push(1.0 / p.gradient[k]),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let total: f64 = pi.iter().sum();
            let mut aggregated = vec![0.0; k_arms];
            for (p, weight) in active.iter().zip(&pi) {
                for (k, g) in p.gradient.iter().enumerate() {
                    aggregated[k] += weight / total * g;
                }
            }
            upper = upper.min(linear_max(&aggregated));
        }
    }
    Ok((upper - value).max(0.0))
}

fn certify(
    task: &TaskSpec,
    instance: &BanditInstance,
    omega: Weights,
    min_weight: f64,
) -> Result<DifficultyResult> {
    let pieces = best_response_pieces(task, instance, &omega)?;
    let best = pieces
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("nonempty pieces");
    let gap = certified_gap(task, instance, &omega, min_weight)?;
    if gap > RELATIVE_GAP_TOLERANCE * best.value {
        return Err(Error::OptimizerFailure(format!(
            "duality gap {gap:.3e} above {RELATIVE_GAP_TOLERANCE:.0e} relative at value {:.6e}",
            best.value
        )));
    }
    Ok(DifficultyResult::new(
        best.value,
        omega,
        best.lambda.clone(),
        Method::Optimizer,
    ))
}

/// Best-arm difficulty by equalization.
///
/// At the optimum every challenger's pairwise value is equal; with
/// unnormalized weights (1 for the leader, c_a for challenger a) the common
/// value y satisfies Σ_a KL(x_a, μ_leader)/KL(x_a, μ_a) = 1, a monotone
/// scalar equation solved by bisection. A floor on the weights is handled by
/// clamping challengers whose equalizing weight falls below it.
pub(crate) fn solve_best_arm(
    instance: &BanditInstance,
    min_weight: f64,
) -> Result<DifficultyResult> {
    let means = instance.means();
    let k_arms = instance.num_arms();
    let leader = (0..k_arms)
        .max_by(|&a, &b| means[a].total_cmp(&means[b]))
        .expect("nonempty instance");

    let mut clamped = vec![false; k_arms];
    for _round in 0..k_arms {
        let free: Vec<usize> = (0..k_arms)
            .filter(|&a| a != leader && !clamped[a])
            .collect();
        if free.is_empty() {
            break;
        }
        let weights = equalize_challengers(instance, leader, &free, &clamped, min_weight)?;
        let violators: Vec<usize> = free
            .iter()
            .copied()
            .filter(|&a| weights[a] < min_weight * (1.0 - 1e-12))
            .collect();
        if weights[leader] < min_weight * (1.0 - 1e-12) {
            let omega = equalize_with_clamped_leader(instance, leader, min_weight)?;
            return certify(&TaskSpec::BestArm, instance, omega, min_weight);
        }
        if violators.is_empty() {
            let omega = Weights::normalized(weights)?;
            return certify(&TaskSpec::BestArm, instance, omega, min_weight);
        }
        for a in violators {
            clamped[a] = true;
        }
    }
    // Everything clamped except the leader.
    let omega = Weights::new(
        (0..k_arms)
            .map(|k| {
                if k == leader {
                    1.0 - min_weight * (k_arms - 1) as f64
                } else {
                    min_weight
                }
            })
            .collect(),
    )?;
    certify(&TaskSpec::BestArm, instance, omega, min_weight)
}

/// Value of the pairwise objective with unnormalized weights (w_l, w_c).
fn pair_value(
    instance: &BanditInstance,
    leader: usize,
    challenger: usize,
    w_leader: f64,
    w_challenger: f64,
) -> Result<(f64, f64)> {
    let (al, ac) = (instance.arm(leader), instance.arm(challenger));
    let x = pair_mixture_argmin(al.family, al.mean, w_leader, ac.family, ac.mean, w_challenger)?;
    let value =
        w_leader * al.family.kl(x, al.mean)? + w_challenger * ac.family.kl(x, ac.mean)?;
    Ok((x, value))
}

/// Unnormalized challenger weight c solving pair_value(1, c) = y.
fn challenger_weight_for_value(
    instance: &BanditInstance,
    leader: usize,
    challenger: usize,
    y: f64,
) -> Result<f64> {
    let mut hi = 1.0;
    for _ in 0..200 {
        if pair_value(instance, leader, challenger, 1.0, hi)?.1 >= y {
            break;
        }
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..120 {
        let mid = 0.5 * (lo + hi);
        if pair_value(instance, leader, challenger, 1.0, mid)?.1 < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn equalize_challengers(
    instance: &BanditInstance,
    leader: usize,
    free: &[usize],
    clamped: &[bool],
    min_weight: f64,
) -> Result<Vec<f64>> {
    let means = instance.means();
    let k_arms = instance.num_arms();
    // y must stay below every free challenger's limiting value KL(μ_a, μ_l)
    let mut y_max = f64::INFINITY;
    for &a in free {
        let cap = instance
            .arm(a)
            .family
            .kl(means[a], means[leader])
            .or_else(|_| instance.arm(leader).family.kl(means[a], means[leader]))?;
        y_max = y_max.min(cap);
    }
    let ratio_sum = |y: f64| -> Result<f64> {
        let mut total = 0.0;
        for &a in free {
            let c = challenger_weight_for_value(instance, leader, a, y)?;
            let (x, _) = pair_value(instance, leader, a, 1.0, c)?;
            let num = instance.arm(leader).family.kl(x, means[leader])?;
            let den = instance.arm(a).family.kl(x, means[a])?;
            total += num / den.max(f64::MIN_POSITIVE);
        }
        Ok(total)
    };
    let (mut lo, mut hi) = (y_max * 1e-12, y_max * (1.0 - 1e-13));
    for _ in 0..90 {
        let mid = 0.5 * (lo + hi);
        if ratio_sum(mid)? < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let y = 0.5 * (lo + hi);
    let mut unnormalized = vec![0.0; k_arms];
    unnormalized[leader] = 1.0;
    let mut total = 1.0;
    for &a in free {
        let c = challenger_weight_for_value(instance, leader, a, y)?;
        unnormalized[a] = c;
        total += c;
    }
    let clamped_mass = min_weight * clamped.iter().filter(|&&c| c).count() as f64;
    let scale = (1.0 - clamped_mass) / total;
    Ok((0..k_arms)
        .map(|k| {
            if clamped[k] {
                min_weight
            } else {
                unnormalized[k] * scale
            }
        })
        .collect())
}

/// Degenerate restricted case in which even the leader sits at the floor:
/// equalize the challengers' values G_a(w₀, ω_a) by bisection on the common
/// value.
fn equalize_with_clamped_leader(
    instance: &BanditInstance,
    leader: usize,
    min_weight: f64,
) -> Result<Weights> {
    let k_arms = instance.num_arms();
    let challengers: Vec<usize> = (0..k_arms).filter(|&a| a != leader).collect();
    let budget = 1.0 - min_weight;
    let total_for = |v: f64| -> Result<f64> {
        let mut total = 0.0;
        for &a in &challengers {
            // invert G_a(w₀, ·) = v, flooring at the minimum weight
            let mut hi = 1.0;
            for _ in 0..200 {
                if pair_value(instance, leader, a, min_weight, hi)?.1 >= v {
                    break;
                }
                hi *= 2.0;
                if hi > 1e12 {
                    break;
                }
            }
            let mut lo = 0.0;
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if pair_value(instance, leader, a, min_weight, mid)?.1 < v {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            total += (0.5 * (lo + hi)).max(min_weight);
        }
        Ok(total)
    };
    let mut v_hi = 1.0;
    for _ in 0..200 {
        if total_for(v_hi)? <= budget {
            break;
        }
        v_hi *= 0.5;
    }
    let mut v_lo = v_hi;
    for _ in 0..200 {
        if total_for(v_lo)? >= budget {
            break;
        }
        v_lo *= 2.0;
    }
    let (mut lo, mut hi) = (v_hi.min(v_lo), v_hi.max(v_lo));
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if total_for(mid)? >= budget {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let v = 0.5 * (lo + hi);
    let mut omega = vec![min_weight; k_arms];
    let mut assigned = min_weight;
    for &a in &challengers {
        let mut hi = 1.0;
        for _ in 0..200 {
            if pair_value(instance, leader, a, min_weight, hi)?.1 >= v {
                break;
            }
            hi *= 2.0;
            if hi > 1e12 {
                break;
            }
        }
        let mut lo = 0.0;
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if pair_value(instance, leader, a, min_weight, mid)?.1 < v {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        omega[a] = (0.5 * (lo + hi)).max(min_weight);
        assigned += omega[a];
    }
    // absorb rounding into the largest challenger
    if let Some(&a) = challengers
        .iter()
        .max_by(|&&a, &&b| omega[a].total_cmp(&omega[b]))
    {
        omega[a] += 1.0 - assigned;
    }
    Weights::new(omega)
}

/// Numeric route for tasks with closed-form outer solutions: a bounded
/// multiplicative-weights ascent for globalization, refined by the
/// closed-form point, then certified.
pub(crate) fn solve_generic(
    task: &TaskSpec,
    instance: &BanditInstance,
    min_weight: f64,
) -> Result<DifficultyResult> {
    let mw = mw_ascent(
        task,
        instance,
        min_weight,
        &MwOptions {
            max_iters: 20_000,
            rel_gap_tol: RELATIVE_GAP_TOLERANCE,
        },
    )?;
    if mw.rel_gap <= RELATIVE_GAP_TOLERANCE {
        return certify(task, instance, mw.omega, min_weight);
    }
    let closed = oracle_difficulty_sp(task, instance, &DifficultyOptions { min_weight })?;
    let omega = if closed.inverse_rate >= mw.value {
        closed.omega_star
    } else {
        mw.omega
    };
    certify(task, instance, omega, min_weight)
}
