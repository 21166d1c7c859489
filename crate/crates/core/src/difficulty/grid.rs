//! Brute-force grid verification oracle for the oracle difficulty.
//!
//! Maximizes over an ω-grid of the simplex the exact minimum over a λ-grid
//! restricted to the alternative. The minimum over the product λ-grid is
//! computed without approximation: the objective is separable across arms,
//! so per-arm prefix minima (best arm) and per-side minima (thresholding,
//! positivity, half-space) enumerate the full grid implicitly. The result
//! differs from the true difficulty by O(1/resolution).
//!
//! Deliberately independent of the closed forms and the equalization
//! optimizer; intentionally expensive, hence the K ≤ 3 guard.

use crate::error::{Error, Result};
use crate::exp_family::Family;
use crate::tasks::{self, Answer, BanditInstance, TaskSpec};
use crate::weights::Weights;

use super::{DifficultyResult, Method};

/// Largest instance the grid oracle accepts.
pub const GRID_MAX_ARMS: usize = 3;

/// Gaussian λ-grids span μ_k ± this many standard deviations.
const GAUSSIAN_SPAN_SIGMAS: f64 = 8.0;
/// Bernoulli λ-grids span [ε, 1 − ε] with this ε.
const BERNOULLI_GRID_MARGIN: f64 = 1e-6;

pub fn grid_oracle(
    task: &TaskSpec,
    instance: &BanditInstance,
    resolution: usize,
) -> Result<DifficultyResult> {
    let k_arms = instance.num_arms();
    if k_arms > GRID_MAX_ARMS {
        return Err(Error::UnsupportedCombination(format!(
            "grid oracle supports at most {GRID_MAX_ARMS} arms, got {k_arms}"
        )));
    }
    if matches!(task, TaskSpec::HalfSpace { .. }) && k_arms > 2 {
        return Err(Error::UnsupportedCombination(
            "grid oracle supports half-space tasks only for 2 arms".into(),
        ));
    }
    if resolution < 16 {
        return Err(Error::InvalidInput(format!(
            "grid resolution must be at least 16, got {resolution}"
        )));
    }
    let answer = tasks::correct_answer(task, instance)?;
    let lambda_grid = lambda_grid(instance, resolution)?;
    let kl_table = kl_table(instance, &lambda_grid)?;

    let mut best: Option<(f64, Vec<f64>, Vec<usize>)> = None;
    for omega in simplex_grid(k_arms, resolution) {
        let inner = match task {
            TaskSpec::BestArm => best_arm_inner(&omega, instance, &lambda_grid, &kl_table),
            TaskSpec::Thresholding { threshold } => flip_one_arm_inner(
                &omega,
                instance,
                &lambda_grid,
                &kl_table,
                *threshold,
                FlipSide::Anywhere,
            ),
            TaskSpec::Positivity { threshold } => match answer {
                Answer::AllAbove => flip_one_arm_inner(
                    &omega,
                    instance,
                    &lambda_grid,
                    &kl_table,
                    *threshold,
                    FlipSide::BelowOnly,
                ),
                Answer::ExistsBelow => {
                    raise_all_inner(&omega, &lambda_grid, &kl_table, *threshold)
                }
                _ => unreachable!(),
            },
            TaskSpec::HalfSpace { direction, offset } => half_space_inner(
                &omega,
                &lambda_grid,
                &kl_table,
                direction,
                *offset,
                answer == Answer::PositiveSide,
            ),
        };
        if let Some((value, lambda_idx)) = inner {
            if best.as_ref().map_or(true, |(v, _, _)| value > *v) {
                best = Some((value, omega, lambda_idx));
            }
        }
    }
    let (value, omega, lambda_idx) = best.ok_or_else(|| {
        Error::InvalidInput("the λ grid does not intersect the alternative set".into())
    })?;
    let lambda: Vec<f64> = lambda_idx.iter().map(|&i| lambda_grid[i]).collect();
    Ok(DifficultyResult::new(
        value,
        Weights::new(omega)?,
        lambda,
        Method::GridOracle,
    ))
}

/// A shared λ-grid covering every arm's plausible minimizers.
fn lambda_grid(instance: &BanditInstance, resolution: usize) -> Result<Vec<f64>> {
    let common_kind_gaussian = instance
        .arms()
        .iter()
        .all(|a| matches!(a.family, Family::GaussianKnownVariance { .. }));
    let common_kind_bernoulli = instance
        .arms()
        .iter()
        .all(|a| a.family == Family::Bernoulli);
    let (lo, hi) = if common_kind_gaussian {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for arm in instance.arms() {
            let sigma = arm.family.std_dev(arm.mean);
            lo = lo.min(arm.mean - GAUSSIAN_SPAN_SIGMAS * sigma);
            hi = hi.max(arm.mean + GAUSSIAN_SPAN_SIGMAS * sigma);
        }
        (lo, hi)
    } else if common_kind_bernoulli {
        (BERNOULLI_GRID_MARGIN, 1.0 - BERNOULLI_GRID_MARGIN)
    } else {
        return Err(Error::UnsupportedCombination(
            "grid oracle requires all arms Gaussian or all arms Bernoulli".into(),
        ));
    };
    let n = resolution;
    Ok((0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect())
}

fn kl_table(instance: &BanditInstance, grid: &[f64]) -> Result<Vec<Vec<f64>>> {
    instance
        .arms()
        .iter()
        .map(|arm| grid.iter().map(|&x| arm.family.kl(x, arm.mean)).collect())
        .collect()
}

/// All points of the simplex with coordinates i/resolution.
fn simplex_grid(k_arms: usize, resolution: usize) -> Vec<Vec<f64>> {
    let r = resolution;
    let mut out = Vec::new();
    match k_arms {
        2 => {
            for i in 0..=r {
                out.push(vec![i as f64 / r as f64, (r - i) as f64 / r as f64]);
            }
        }
        3 => {
            for i in 0..=r {
                for j in 0..=(r - i) {
                    out.push(vec![
                        i as f64 / r as f64,
                        j as f64 / r as f64,
                        (r - i - j) as f64 / r as f64,
                    ]);
                }
            }
        }
        _ => unreachable!("guarded by GRID_MAX_ARMS"),
    }
    out
}

/// Exact min over the λ-grid of configurations whose extended argmax is a
/// given challenger. Ties go to the lowest index, so arms with an index
/// below the challenger must sit strictly below its value on the grid.
fn best_arm_inner(
    omega: &[f64],
    instance: &BanditInstance,
    grid: &[f64],
    kl: &[Vec<f64>],
) -> Option<(f64, Vec<usize>)> {
    let k_arms = omega.len();
    let n = grid.len();
    let leader = {
        let means = instance.means();
        (0..k_arms)
            .max_by(|&a, &b| means[a].total_cmp(&means[b]))
            .unwrap()
    };
    // prefix minima of each arm's KL column, with argmins
    let mut prefix_min = vec![vec![0.0; n]; k_arms];
    let mut prefix_arg = vec![vec![0usize; n]; k_arms];
    for k in 0..k_arms {
        let mut best = f64::INFINITY;
        let mut arg = 0;
        for i in 0..n {
            if kl[k][i] < best {
                best = kl[k][i];
                arg = i;
            }
            prefix_min[k][i] = best;
            prefix_arg[k][i] = arg;
        }
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for challenger in 0..k_arms {
        if challenger == leader {
            continue;
        }
        for v in 0..n {
            let mut cost = omega[challenger] * kl[challenger][v];
            let mut feasible = true;
            for k in 0..k_arms {
                if k == challenger {
                    continue;
                }
                // k < challenger loses ties, so it must sit strictly lower
                let bound = if k < challenger {
                    if v == 0 {
                        feasible = false;
                        break;
                    }
                    v - 1
                } else {
                    v
                };
                cost += omega[k] * prefix_min[k][bound];
            }
            if !feasible {
                continue;
            }
            if best.as_ref().map_or(true, |(c, _)| cost < *c) {
                let mut lambda_idx = vec![0usize; k_arms];
                for k in 0..k_arms {
                    lambda_idx[k] = if k == challenger {
                        v
                    } else if k < challenger {
                        prefix_arg[k][v - 1]
                    } else {
                        prefix_arg[k][v]
                    };
                }
                best = Some((cost, lambda_idx));
            }
        }
    }
    best
}

#[derive(Clone, Copy, PartialEq)]
enum FlipSide {
    /// Thresholding: flipping any arm to the other side changes the answer.
    Anywhere,
    /// Positivity at an all-above instance: only a drop below flips it.
    BelowOnly,
}

/// Exact min over configurations in which at least one arm crossed the
/// threshold; the remaining arms are unconstrained, so they sit at their
/// free grid minima.
fn flip_one_arm_inner(
    omega: &[f64],
    instance: &BanditInstance,
    grid: &[f64],
    kl: &[Vec<f64>],
    threshold: f64,
    side: FlipSide,
) -> Option<(f64, Vec<usize>)> {
    let k_arms = omega.len();
    let n = grid.len();
    let mut free = vec![(f64::INFINITY, 0usize); k_arms];
    let mut wrong = vec![(f64::INFINITY, 0usize); k_arms];
    for k in 0..k_arms {
        let above = instance.arm(k).mean > threshold;
        for i in 0..n {
            if kl[k][i] < free[k].0 {
                free[k] = (kl[k][i], i);
            }
            // a grid value exactly at the threshold counts as above
            let is_wrong = match side {
                FlipSide::Anywhere => {
                    if above {
                        grid[i] < threshold
                    } else {
                        grid[i] >= threshold
                    }
                }
                FlipSide::BelowOnly => grid[i] < threshold,
            };
            if is_wrong && kl[k][i] < wrong[k].0 {
                wrong[k] = (kl[k][i], i);
            }
        }
    }
    let free_total: f64 = (0..k_arms).map(|k| omega[k] * free[k].0).sum();
    let mut best: Option<(f64, usize)> = None;
    for k in 0..k_arms {
        if wrong[k].0.is_infinite() {
            continue;
        }
        let cost = free_total - omega[k] * free[k].0 + omega[k] * wrong[k].0;
        if best.map_or(true, |(c, _)| cost < c) {
            best = Some((cost, k));
        }
    }
    best.map(|(cost, flip)| {
        let lambda_idx: Vec<usize> = (0..k_arms)
            .map(|k| if k == flip { wrong[k].1 } else { free[k].1 })
            .collect();
        (cost, lambda_idx)
    })
}

/// Positivity at an exists-below instance: the alternative raises every arm
/// to (at least) the threshold.
fn raise_all_inner(
    omega: &[f64],
    grid: &[f64],
    kl: &[Vec<f64>],
    threshold: f64,
) -> Option<(f64, Vec<usize>)> {
    let k_arms = omega.len();
    let n = grid.len();
    let mut cost = 0.0;
    let mut lambda_idx = vec![0usize; k_arms];
    for k in 0..k_arms {
        let mut best = f64::INFINITY;
        let mut arg = None;
        for i in 0..n {
            if grid[i] >= threshold && kl[k][i] < best {
                best = kl[k][i];
                arg = Some(i);
            }
        }
        cost += omega[k] * best;
        lambda_idx[k] = arg?;
    }
    Some((cost, lambda_idx))
}

/// Two-arm half-space: for each value of λ₁ the feasible λ₂ form a
/// contiguous range of the grid, so a prefix or suffix minimum of the second
/// arm's KL column enumerates the product grid exactly.
fn half_space_inner(
    omega: &[f64],
    grid: &[f64],
    kl: &[Vec<f64>],
    direction: &[f64],
    offset: f64,
    mu_on_positive_side: bool,
) -> Option<(f64, Vec<usize>)> {
    let n = grid.len();
    let (u0, u1) = (direction[0], direction[1]);
    debug_assert!(u1 != 0.0 || u0 != 0.0);
    if u1 == 0.0 {
        // only arm 0 matters: λ₀ u₀ on the wrong side, arm 1 free
        let mut best: Option<(f64, Vec<usize>)> = None;
        let mut free1 = (f64::INFINITY, 0usize);
        for j in 0..n {
            if kl[1][j] < free1.0 {
                free1 = (kl[1][j], j);
            }
        }
        for i in 0..n {
            let s = grid[i] * u0;
            let wrong = if mu_on_positive_side { s < offset } else { s >= offset };
            if !wrong {
                continue;
            }
            let cost = omega[0] * kl[0][i] + omega[1] * free1.0;
            if best.as_ref().map_or(true, |(c, _)| cost < *c) {
                best = Some((cost, vec![i, free1.1]));
            }
        }
        return best;
    }
    // prefix and suffix minima of arm 1's KL column
    let mut prefix = vec![(f64::INFINITY, 0usize); n];
    let mut suffix = vec![(f64::INFINITY, 0usize); n];
    let mut run = (f64::INFINITY, 0usize);
    for j in 0..n {
        if kl[1][j] < run.0 {
            run = (kl[1][j], j);
        }
        prefix[j] = run;
    }
    run = (f64::INFINITY, 0usize);
    for j in (0..n).rev() {
        if kl[1][j] < run.0 {
            run = (kl[1][j], j);
        }
        suffix[j] = run;
    }
    // wrong side of the boundary for λ given the answer at μ; a point
    // exactly on the hyperplane counts as the positive side
    let wrong = |l0: f64, l1: f64| -> bool {
        let s = l0 * u0 + l1 * u1;
        if mu_on_positive_side {
            s < offset
        } else {
            s >= offset
        }
    };
    // s is monotone in λ₂ with the sign of u₁, so the wrong set is a prefix
    // or a suffix of the grid
    let wrong_is_low = mu_on_positive_side == (u1 > 0.0);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for i in 0..n {
        let candidate = if wrong_is_low {
            let j_cut = grid.partition_point(|&g| wrong(grid[i], g));
            if j_cut == 0 {
                None
            } else {
                Some(prefix[j_cut - 1])
            }
        } else {
            let j_start = grid.partition_point(|&g| !wrong(grid[i], g));
            if j_start >= n {
                None
            } else {
                Some(suffix[j_start])
            }
        };
        if let Some((kl1, j)) = candidate {
            let cost = omega[0] * kl[0][i] + omega[1] * kl1;
            if best.as_ref().map_or(true, |(c, _)| cost < *c) {
                best = Some((cost, vec![i, j]));
            }
        }
    }
    best
}
