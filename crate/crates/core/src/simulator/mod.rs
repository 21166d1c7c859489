//! Monte Carlo execution of fixed-budget identification algorithms.
//!
//! Algorithms run for a known horizon T and recommend an answer; the error
//! probability p is estimated over independent replications, each on its own
//! counter-based random stream so that results do not depend on the degree
//! of parallelism. The empirical rate is ĥ = T / log(1/p̂) and the ratio
//! to a supplied difficulty H is ĥ/H.

mod rng;

pub use rng::replication_rng;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tasks::{self, Answer, BanditInstance, TaskSpec};
use crate::weights::Weights;

/// A fixed-budget algorithm family: one algorithm per horizon.
#[derive(Debug, Clone)]
pub enum AlgorithmFamily {
    /// Track the proportions ω: at every step pull
    /// argmin_k (N_k − ω_k t), ties to the lowest index. Keeps
    /// |N_{t,k} − ω_k t| ≤ K at every prefix.
    StaticProportions(Weights),
    /// Static proportions at ω = (1/K, …, 1/K).
    Uniform,
    /// Phase-based elimination with the harmonic schedule; best-arm only.
    SuccessiveRejects,
    /// ceil(log₂ K) halving rounds of equal budget; best-arm only.
    SuccessiveHalving,
}

/// Per-arm pull counts after a run; the total always equals the horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PullCounts(Vec<u64>);

impl PullCounts {
    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }
}

/// z quantile of the standard normal at 0.995, for 99% Wilson intervals.
pub const WILSON_Z_99: f64 = 2.5758293035489004;

/// Monte Carlo estimate of the error probability at one horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub replications: u64,
    pub errors: u64,
    pub p_hat: f64,
    /// 99% Wilson score interval for p.
    pub ci: (f64, f64),
    /// Empirical rate T / log(1/p̂); undefined when p̂ ∈ {0, 1}.
    pub h_hat: Option<f64>,
    /// p̂ ≥ 1/2 makes log(1/p̂) < log 2 and the rate meaningless.
    pub pre_asymptotic: bool,
    /// ĥ / H for the supplied difficulty H.
    pub ratio_hat: Option<f64>,
}

impl SimResult {
    fn from_counts(errors: u64, replications: u64, horizon: u64, h: Option<f64>) -> SimResult {
        let p_hat = errors as f64 / replications as f64;
        let h_hat = if errors == 0 || errors == replications {
            None
        } else {
            Some(horizon as f64 / (1.0 / p_hat).ln())
        };
        SimResult {
            replications,
            errors,
            p_hat,
            ci: wilson_99(errors, replications),
            h_hat,
            pre_asymptotic: p_hat >= 0.5,
            ratio_hat: match (h_hat, h) {
                (Some(rate), Some(h)) => Some(rate / h),
                _ => None,
            },
        }
    }
}

fn wilson_99(errors: u64, n: u64) -> (f64, f64) {
    let z = WILSON_Z_99;
    let n = n as f64;
    let p = errors as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / denom;
    let half = z * ((p * (1.0 - p) + z * z / (4.0 * n)) / n).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// The arm the tracking rule pulls at step `t` (1-based) given the counts
/// after t − 1 steps.
pub fn tracking_pull(counts: &[u64], omega: &Weights, t: u64) -> usize {
    let mut best = 0;
    let mut best_score = f64::INFINITY;
    for (k, &n) in counts.iter().enumerate() {
        let score = n as f64 - omega[k] * t as f64;
        if score < best_score {
            best_score = score;
            best = k;
        }
    }
    best
}

/// Run one replication. Deterministic given the generator state.
pub fn run_once<R: Rng + ?Sized>(
    algorithm: &AlgorithmFamily,
    task: &TaskSpec,
    instance: &BanditInstance,
    horizon: u64,
    rng: &mut R,
) -> Result<(Answer, PullCounts)> {
    validate_run(algorithm, task, instance, horizon)?;
    let (answer, counts) = match algorithm {
        AlgorithmFamily::StaticProportions(omega) => {
            run_tracking(task, instance, horizon, omega, rng)
        }
        AlgorithmFamily::Uniform => run_tracking(
            task,
            instance,
            horizon,
            &Weights::uniform(instance.num_arms()),
            rng,
        ),
        AlgorithmFamily::SuccessiveRejects => run_successive_rejects(instance, horizon, rng)?,
        AlgorithmFamily::SuccessiveHalving => run_successive_halving(instance, horizon, rng),
    };
    debug_assert_eq!(counts.total(), horizon);
    Ok((answer, counts))
}

/// Check an algorithm/task/horizon combination without running it.
pub fn validate_run(
    algorithm: &AlgorithmFamily,
    task: &TaskSpec,
    instance: &BanditInstance,
    horizon: u64,
) -> Result<()> {
    let k_arms = instance.num_arms();
    if horizon < k_arms as u64 {
        return Err(Error::InvalidInput(format!(
            "horizon {horizon} below the number of arms {k_arms}"
        )));
    }
    match algorithm {
        AlgorithmFamily::StaticProportions(omega) => {
            if omega.len() != k_arms {
                return Err(Error::InvalidWeights(format!(
                    "{} proportions for {k_arms} arms",
                    omega.len()
                )));
            }
            if !omega.is_interior() {
                return Err(Error::InvalidWeights(
                    "static proportions must be interior".into(),
                ));
            }
        }
        AlgorithmFamily::Uniform => {}
        AlgorithmFamily::SuccessiveRejects => {
            if *task != TaskSpec::BestArm {
                return Err(Error::UnsupportedCombination(
                    "successive rejects answers best-arm queries only".into(),
                ));
            }
            successive_rejects_schedule(k_arms, horizon)?;
        }
        AlgorithmFamily::SuccessiveHalving => {
            if *task != TaskSpec::BestArm {
                return Err(Error::UnsupportedCombination(
                    "successive halving answers best-arm queries only".into(),
                ));
            }
            let rounds = halving_rounds(k_arms);
            if horizon / rounds < k_arms as u64 {
                return Err(Error::UnsupportedCombination(format!(
                    "horizon {horizon} cannot fund {rounds} halving rounds over {k_arms} arms"
                )));
            }
        }
    }
    Ok(())
}

fn run_tracking<R: Rng + ?Sized>(
    task: &TaskSpec,
    instance: &BanditInstance,
    horizon: u64,
    omega: &Weights,
    rng: &mut R,
) -> (Answer, PullCounts) {
    let k_arms = instance.num_arms();
    let mut counts = vec![0u64; k_arms];
    let mut sums = vec![0.0f64; k_arms];
    for t in 1..=horizon {
        let k = tracking_pull(&counts, omega, t);
        let arm = instance.arm(k);
        sums[k] += arm.family.sample(arm.mean, rng);
        counts[k] += 1;
        #[cfg(debug_assertions)]
        for (j, &n) in counts.iter().enumerate() {
            debug_assert!(
                (n as f64 - omega[j] * t as f64).abs() <= k_arms as f64 + 1e-9,
                "tracking deviation at t={t}, arm {j}"
            );
        }
    }
    // An arm the tracker never reached reports an empirical mean of 0;
    // only possible when ω_k T < K.
    let means: Vec<f64> = (0..k_arms)
        .map(|k| if counts[k] > 0 { sums[k] / counts[k] as f64 } else { 0.0 })
        .collect();
    (tasks::empirical_answer(task, &means), PullCounts(counts))
}

/// The successive-rejects pull schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct SrSchedule {
    /// Per-arm pulls in each of the K − 1 phases.
    pub phase_pulls: Vec<u64>,
    /// Leftover budget, spent on the two finalists (the extra odd pull goes
    /// to the lower-indexed one).
    pub final_phase_bonus: u64,
    /// loḡ(K) = 1/2 + Σ_{i=2}^K 1/i.
    pub log_bar: f64,
}

/// Cumulative targets n_k = ceil((T − K)/(loḡ(K)(K + 1 − k))); phase k
/// pulls each surviving arm n_k − n_{k−1} times and then dismisses the
/// empirically worst arm. The total never exceeds T and the remainder is
/// assigned to the final phase.
pub fn successive_rejects_schedule(k_arms: usize, horizon: u64) -> Result<SrSchedule> {
    if k_arms < 2 {
        return Err(Error::InvalidInput("need at least two arms".into()));
    }
    if horizon < k_arms as u64 {
        return Err(Error::UnsupportedCombination(format!(
            "horizon {horizon} below the number of arms {k_arms}"
        )));
    }
    let log_bar = 0.5 + (2..=k_arms).map(|i| 1.0 / i as f64).sum::<f64>();
    let budget = (horizon - k_arms as u64) as f64;
    let mut cumulative = vec![0u64; k_arms];
    for k in 1..k_arms {
        cumulative[k] = (budget / (log_bar * (k_arms + 1 - k) as f64)).ceil() as u64;
    }
    if cumulative[1] == 0 {
        return Err(Error::UnsupportedCombination(format!(
            "horizon {horizon} too small for a successive-rejects schedule over {k_arms} arms"
        )));
    }
    let mut phase_pulls = Vec::with_capacity(k_arms - 1);
    let mut total = 0u64;
    for k in 1..k_arms {
        let pulls = cumulative[k] - cumulative[k - 1];
        total += pulls * (k_arms + 1 - k) as u64;
        phase_pulls.push(pulls);
    }
    debug_assert!(total <= horizon);
    Ok(SrSchedule {
        phase_pulls,
        final_phase_bonus: horizon - total,
        log_bar,
    })
}

fn run_successive_rejects<R: Rng + ?Sized>(
    instance: &BanditInstance,
    horizon: u64,
    rng: &mut R,
) -> Result<(Answer, PullCounts)> {
    let k_arms = instance.num_arms();
    let schedule = successive_rejects_schedule(k_arms, horizon)?;
    let mut active: Vec<usize> = (0..k_arms).collect();
    let mut counts = vec![0u64; k_arms];
    let mut sums = vec![0.0f64; k_arms];
    let phases = schedule.phase_pulls.len();
    for (phase, &pulls) in schedule.phase_pulls.iter().enumerate() {
        let is_final = phase + 1 == phases;
        let bonus_each = if is_final { schedule.final_phase_bonus / 2 } else { 0 };
        let bonus_odd = if is_final { schedule.final_phase_bonus % 2 } else { 0 };
        for (position, &arm_index) in active.iter().enumerate() {
            let arm = instance.arm(arm_index);
            let extra = bonus_each + if position == 0 { bonus_odd } else { 0 };
            for _ in 0..(pulls + extra) {
                sums[arm_index] += arm.family.sample(arm.mean, rng);
                counts[arm_index] += 1;
            }
        }
        // dismiss the empirically worst arm, lowest index on ties
        let worst_position = active
            .iter()
            .enumerate()
            .min_by(|(_, &a), (_, &b)| {
                (sums[a] / counts[a] as f64).total_cmp(&(sums[b] / counts[b] as f64))
            })
            .map(|(position, _)| position)
            .expect("active set is nonempty");
        active.remove(worst_position);
    }
    debug_assert_eq!(active.len(), 1);
    Ok((Answer::BestArm(active[0]), PullCounts(counts)))
}

fn halving_rounds(k_arms: usize) -> u64 {
    (usize::BITS - (k_arms - 1).leading_zeros()) as u64
}

fn run_successive_halving<R: Rng + ?Sized>(
    instance: &BanditInstance,
    horizon: u64,
    rng: &mut R,
) -> (Answer, PullCounts) {
    let k_arms = instance.num_arms();
    let rounds = halving_rounds(k_arms);
    let mut active: Vec<usize> = (0..k_arms).collect();
    let mut counts = vec![0u64; k_arms];
    let mut sums = vec![0.0f64; k_arms];
    let base_budget = horizon / rounds;
    for round in 0..rounds {
        // the last round absorbs the rounding remainder of T / rounds
        let budget = if round + 1 == rounds {
            horizon - base_budget * (rounds - 1)
        } else {
            base_budget
        };
        let survivors = active.len() as u64;
        let per_arm = budget / survivors;
        let leftover = (budget - per_arm * survivors) as usize;
        for (position, &arm_index) in active.iter().enumerate() {
            let arm = instance.arm(arm_index);
            let pulls = per_arm + u64::from(position < leftover);
            for _ in 0..pulls {
                sums[arm_index] += arm.family.sample(arm.mean, rng);
                counts[arm_index] += 1;
            }
        }
        // drop the bottom half, eliminating the worst (lowest index on
        // ties) one at a time
        for _ in 0..active.len() / 2 {
            let worst_position = active
                .iter()
                .enumerate()
                .min_by(|(_, &a), (_, &b)| {
                    (sums[a] / counts[a] as f64).total_cmp(&(sums[b] / counts[b] as f64))
                })
                .map(|(position, _)| position)
                .expect("active set is nonempty");
            active.remove(worst_position);
        }
    }
    debug_assert_eq!(active.len(), 1);
    (Answer::BestArm(active[0]), PullCounts(counts))
}

/// Monte Carlo estimate of p_{μ,T} over independent replications.
///
/// Replication r draws from the stream keyed by (master_seed, r), so the
/// estimate is a pure function of the arguments, independent of the number
/// of worker threads. The optional difficulty turns the empirical rate into
/// a difficulty ratio.
pub fn estimate_error(
    algorithm: &AlgorithmFamily,
    task: &TaskSpec,
    instance: &BanditInstance,
    horizon: u64,
    n_reps: u64,
    master_seed: u64,
    h_for_ratio: Option<f64>,
) -> Result<SimResult> {
    if n_reps == 0 {
        return Err(Error::InvalidInput("need at least one replication".into()));
    }
    let correct = tasks::correct_answer(task, instance)?;
    validate_run(algorithm, task, instance, horizon)?;
    let errors: u64 = (0..n_reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replication_rng(master_seed, rep);
            let (answer, _) = run_once(algorithm, task, instance, horizon, &mut rng)
                .expect("validated before the replication loop");
            u64::from(answer != correct)
        })
        .sum();
    Ok(SimResult::from_counts(errors, n_reps, horizon, h_for_ratio))
}

/// Error estimates along a horizon grid, sharing the master seed across
/// points (common random numbers).
pub fn rate_curve(
    algorithm: &AlgorithmFamily,
    task: &TaskSpec,
    instance: &BanditInstance,
    horizons: &[u64],
    n_reps: u64,
    master_seed: u64,
    h_for_ratio: f64,
) -> Result<Vec<(u64, SimResult)>> {
    if horizons.is_empty() {
        return Err(Error::InvalidInput("empty horizon list".into()));
    }
    if horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(
            "horizons must be strictly increasing".into(),
        ));
    }
    horizons
        .iter()
        .map(|&horizon| {
            estimate_error(
                algorithm,
                task,
                instance,
                horizon,
                n_reps,
                master_seed,
                Some(h_for_ratio),
            )
            .map(|result| (horizon, result))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exp_family::Family;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bernoulli(means: &[f64]) -> BanditInstance {
        BanditInstance::homogeneous(Family::Bernoulli, means).unwrap()
    }

    fn gaussian(means: &[f64]) -> BanditInstance {
        BanditInstance::homogeneous(Family::standard_gaussian(), means).unwrap()
    }

    #[test]
    fn tracking_exact_divisibility() {
        let inst = bernoulli(&[0.6, 0.4]);
        let omega = Weights::new(vec![0.5, 0.5]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (_, counts) = run_once(
            &AlgorithmFamily::StaticProportions(omega),
            &TaskSpec::BestArm,
            &inst,
            10,
            &mut rng,
        )
        .unwrap();
        assert_eq!(counts.as_slice(), &[5, 5]);
    }

    #[test]
    fn tracking_prefix_deviation_is_bounded() {
        let omega = Weights::new(vec![0.3, 0.7]).unwrap();
        let mut counts = vec![0u64; 2];
        for t in 1..=100_000u64 {
            let k = tracking_pull(&counts, &omega, t);
            counts[k] += 1;
            for (j, &n) in counts.iter().enumerate() {
                let deviation = (n as f64 - omega[j] * t as f64).abs();
                assert!(deviation <= 2.0 + 1e-9, "t={t} arm={j} dev={deviation}");
            }
        }
    }

    #[test]
    fn near_degenerate_bernoulli_is_reliably_solved() {
        let inst = bernoulli(&[1.0 - 1e-12, 1e-12]);
        let correct = Answer::BestArm(0);
        let mut failures = 0;
        for rep in 0..10_000u64 {
            let mut rng = replication_rng(5, rep);
            let (answer, _) = run_once(
                &AlgorithmFamily::Uniform,
                &TaskSpec::BestArm,
                &inst,
                100,
                &mut rng,
            )
            .unwrap();
            failures += u64::from(answer != correct);
        }
        assert!(failures as f64 / 10_000.0 <= 0.001, "{failures} failures");
    }

    #[test]
    fn sr_schedule_k2_reduces_to_uniform() {
        let schedule = successive_rejects_schedule(2, 10).unwrap();
        assert_eq!(schedule.phase_pulls.len(), 1);
        assert_eq!(schedule.phase_pulls[0], 4);
        assert_eq!(schedule.final_phase_bonus, 2);
        // each arm ends up with 5 pulls
        let inst = bernoulli(&[0.6, 0.4]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (_, counts) = run_once(
            &AlgorithmFamily::SuccessiveRejects,
            &TaskSpec::BestArm,
            &inst,
            10,
            &mut rng,
        )
        .unwrap();
        assert_eq!(counts.as_slice(), &[5, 5]);
    }

    #[test]
    fn sr_schedule_regression_k3_t300() {
        // frozen after the first evaluation of the declared formula
        let schedule = successive_rejects_schedule(3, 300).unwrap();
        assert_eq!(schedule.phase_pulls, vec![75, 37]);
        assert_eq!(schedule.final_phase_bonus, 1);
        assert_abs_diff_eq!(schedule.log_bar, 0.5 + 0.5 + 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn sr_budget_feasibility_random_configurations() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let k = rng.gen_range(2..=8usize);
            let t = rng.gen_range((k as u64 * 8)..5_000);
            let Ok(schedule) = successive_rejects_schedule(k, t) else {
                continue;
            };
            let mut total = 0u64;
            for (phase, pulls) in schedule.phase_pulls.iter().enumerate() {
                total += pulls * (k - phase) as u64;
            }
            assert!(total <= t, "K={k} T={t}: scheduled {total}");
            assert!(total + schedule.final_phase_bonus == t);
        }
    }

    #[test]
    fn sr_and_sh_reject_non_best_arm_tasks() {
        let inst = bernoulli(&[0.6, 0.4]);
        let task = TaskSpec::Thresholding { threshold: 0.5 };
        for algorithm in [
            AlgorithmFamily::SuccessiveRejects,
            AlgorithmFamily::SuccessiveHalving,
        ] {
            let mut rng = ChaCha8Rng::seed_from_u64(2);
            assert!(matches!(
                run_once(&algorithm, &task, &inst, 100, &mut rng),
                Err(Error::UnsupportedCombination(_))
            ));
        }
    }

    #[test]
    fn successive_halving_spends_the_whole_budget() {
        let inst = gaussian(&[1.0, 0.5, 0.2, 0.0, -0.4]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (answer, counts) = run_once(
            &AlgorithmFamily::SuccessiveHalving,
            &TaskSpec::BestArm,
            &inst,
            1000,
            &mut rng,
        )
        .unwrap();
        assert_eq!(counts.total(), 1000);
        assert!(matches!(answer, Answer::BestArm(_)));
    }

    #[test]
    fn estimate_error_is_deterministic_and_h_undefined_at_zero_errors() {
        let inst = bernoulli(&[0.9, 0.1]);
        let a = estimate_error(
            &AlgorithmFamily::Uniform,
            &TaskSpec::BestArm,
            &inst,
            200,
            2_000,
            42,
            None,
        )
        .unwrap();
        let b = estimate_error(
            &AlgorithmFamily::Uniform,
            &TaskSpec::BestArm,
            &inst,
            200,
            2_000,
            42,
            None,
        )
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.errors, 0);
        assert_eq!(a.h_hat, None);
        assert!(!a.pre_asymptotic);
    }

    #[test]
    fn ratio_hat_is_h_hat_over_h() {
        let inst = bernoulli(&[0.55, 0.45]);
        let result = estimate_error(
            &AlgorithmFamily::Uniform,
            &TaskSpec::BestArm,
            &inst,
            50,
            20_000,
            7,
            Some(10.0),
        )
        .unwrap();
        let h_hat = result.h_hat.unwrap();
        assert_eq!(result.ratio_hat.unwrap(), h_hat / 10.0);
        assert!(result.ci.0 <= result.p_hat && result.p_hat <= result.ci.1);
    }

    #[test]
    fn wilson_interval_against_statrs_quantile() {
        use statrs::distribution::ContinuousCDF;
        let normal = statrs::distribution::Normal::new(0.0, 1.0).unwrap();
        assert_abs_diff_eq!(normal.inverse_cdf(0.995), WILSON_Z_99, epsilon = 1e-9);
    }

    /// Exact error probability of uniform sampling on a two-arm Bernoulli
    /// instance with an even horizon: P(X₂ > X₁) over independent binomials
    /// (ties recommend arm 0, the correct answer).
    pub(super) fn exact_two_arm_bernoulli_error(m0: f64, m1: f64, pulls: u64) -> f64 {
        let pmf = |mean: f64| -> Vec<f64> {
            let n = pulls as usize;
            let mut values = vec![0.0; n + 1];
            // multiplicative recurrence over the binomial pmf
            let mut current = (1.0 - mean).powi(n as i32);
            for (k, v) in values.iter_mut().enumerate() {
                *v = current;
                current *= (n - k) as f64 / (k + 1) as f64 * mean / (1.0 - mean);
            }
            values
        };
        let p0 = pmf(m0);
        let p1 = pmf(m1);
        let mut cdf0 = vec![0.0; p0.len() + 1];
        for (k, v) in p0.iter().enumerate() {
            cdf0[k + 1] = cdf0[k] + v;
        }
        p1.iter().enumerate().map(|(b, v)| v * cdf0[b]).sum()
    }

    #[test]
    fn estimate_error_matches_the_binomial_oracle() {
        let inst = bernoulli(&[0.6, 0.4]);
        let result = estimate_error(
            &AlgorithmFamily::Uniform,
            &TaskSpec::BestArm,
            &inst,
            200,
            100_000,
            11,
            None,
        )
        .unwrap();
        let exact = exact_two_arm_bernoulli_error(0.6, 0.4, 100);
        let halfwidth = (result.ci.1 - result.ci.0) / 2.0;
        assert!(
            (result.p_hat - exact).abs() <= 4.0 * halfwidth,
            "p̂ {} vs exact {exact}",
            result.p_hat
        );
    }

    #[test]
    fn error_counts_pass_a_binomial_chi_square_check() {
        // split replications into groups and compare against the exact p
        let inst = bernoulli(&[0.6, 0.4]);
        let exact = exact_two_arm_bernoulli_error(0.6, 0.4, 100);
        let groups = 20u64;
        let per_group = 20_000u64;
        let mut statistic = 0.0;
        for g in 0..groups {
            let result = estimate_error(
                &AlgorithmFamily::Uniform,
                &TaskSpec::BestArm,
                &inst,
                200,
                per_group,
                1000 + g,
                None,
            )
            .unwrap();
            let expected = per_group as f64 * exact;
            let variance = expected * (1.0 - exact);
            let d = result.errors as f64 - expected;
            statistic += d * d / variance;
        }
        // χ²₍₂₀₎ between the 0.0005 and 0.9995 quantiles
        assert!(
            (3.0..=52.0).contains(&statistic),
            "chi-square statistic {statistic}"
        );
    }

    #[test]
    fn rate_curve_matches_the_gaussian_tail_oracle() {
        use statrs::distribution::ContinuousCDF;
        let inst = gaussian(&[1.0, 0.0]);
        let curve = rate_curve(
            &AlgorithmFamily::StaticProportions(Weights::new(vec![0.5, 0.5]).unwrap()),
            &TaskSpec::BestArm,
            &inst,
            &[64],
            400_000,
            21,
            8.0,
        )
        .unwrap();
        let (_, result) = &curve[0];
        // difference of empirical means is Gaussian with variance 1/16
        let normal = statrs::distribution::Normal::new(0.0, 1.0).unwrap();
        let exact = normal.cdf(-1.0 / (1.0f64 / 16.0).sqrt());
        let halfwidth = (result.ci.1 - result.ci.0) / 2.0;
        assert!(
            (result.p_hat - exact).abs() <= 4.0 * halfwidth,
            "p̂ {} vs exact {exact}",
            result.p_hat
        );
    }

    #[test]
    fn sr_error_is_nonincreasing_along_the_curve() {
        let inst = gaussian(&[1.0, 0.5, 0.0]);
        let curve = rate_curve(
            &AlgorithmFamily::SuccessiveRejects,
            &TaskSpec::BestArm,
            &inst,
            &[30, 60, 120],
            40_000,
            3,
            6.0,
        )
        .unwrap();
        for window in curve.windows(2) {
            let (_, a) = &window[0];
            let (_, b) = &window[1];
            // allow confidence-interval overlap
            assert!(
                b.p_hat <= a.ci.1 + (a.ci.1 - a.ci.0),
                "p̂ grew from {} to {}",
                a.p_hat,
                b.p_hat
            );
        }
    }
}
