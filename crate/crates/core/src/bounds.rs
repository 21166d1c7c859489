//! Lower bounds on the difficulty ratio and the explicit hard-instance
//! constructions.
//!
//! The finite-horizon inequality bounds the inverse ratio of any algorithm
//! through the expected pull fractions at a nearby instance. Its asymptotic
//! form turns a finite set D of alternatives with difficulty values H(λ)
//! into the bound
//!
//! ```text
//! sup_{λ ∈ D} R_{H,∞}(A, λ) ≥ ( max_ω inf_{λ ∈ D} H(λ) Σ_k ω_k KL(μ_k, λ_k) )⁻¹ ,
//! ```
//!
//! and the corner construction (perturbing one coordinate at a time) makes
//! the maximin explicit: the bound is Σ_j (H(λ^(j)) KL(μ_j, λ_j^(j)))⁻¹.
//! On top of these sit the constructions showing that uniform sampling is
//! K-optimal for positivity, that Gaussian best-arm identification costs a
//! log K factor, and that two-arm Bernoulli best arm already has no
//! complexity.

use crate::difficulty::{closed_form_bernoulli_bai, h_delta};
use crate::error::{Error, Result};
use crate::exp_family::Family;
use crate::tasks::{self, BanditInstance, TaskSpec};
use crate::weights::Weights;

/// A lower bound on the maximal difficulty ratio.
#[derive(Debug, Clone)]
pub struct RatioResult {
    pub lower_bound: f64,
    /// The equalizing / maximin proportions, when the solve produces them.
    pub equalizing_omega: Option<Weights>,
    /// Per-term contributions whose sum (corner bound) or reciprocal maximin
    /// value (limsup bound) is the lower bound.
    pub contributions: Vec<f64>,
}

/// Outcome of the finite-horizon inequality.
#[derive(Debug, Clone, Copy)]
pub struct FiniteTCheck {
    /// R_{H,T}(A,λ)⁻¹ (1 − p_{μ,T}) − log 2 / √T
    pub lhs: f64,
    /// H(λ) Σ_k E[N_{T,k}/T] KL(μ_k, λ_k)
    pub rhs: f64,
    pub satisfied: bool,
}

/// Inputs of [`finite_t_check`].
#[derive(Debug, Clone)]
pub struct FiniteTArgs<'a> {
    pub task: &'a TaskSpec,
    /// The instance μ at which the pull fractions and error probability were
    /// measured.
    pub instance: &'a BanditInstance,
    /// An alternative λ with a different correct answer.
    pub lambda: &'a [f64],
    /// The difficulty H(λ) of the chosen difficulty function at λ.
    pub h_lambda: f64,
    pub horizon: u64,
    /// E[N_{T,k}/T] under μ.
    pub expected_pull_fractions: &'a [f64],
    /// p_{μ,T}(A).
    pub p_error_at_mu: f64,
    /// R_{H,T}(A, λ) = h_{λ,T}(A)/H(λ).
    pub ratio_at_lambda: f64,
}

/// Evaluate both sides of the finite-horizon inequality. Requires
/// H(λ) ≤ √T and i*(λ) ≠ i*(μ).
pub fn finite_t_check(args: &FiniteTArgs) -> Result<FiniteTCheck> {
    let t = args.horizon as f64;
    if args.h_lambda > t.sqrt() {
        return Err(Error::PreconditionViolated(format!(
            "H(λ) = {} exceeds √T = {}",
            args.h_lambda,
            t.sqrt()
        )));
    }
    if !tasks::is_alternative(args.task, args.instance, args.lambda)? {
        return Err(Error::InvalidInput(
            "λ has the same correct answer as μ".into(),
        ));
    }
    let k_arms = args.instance.num_arms();
    if args.expected_pull_fractions.len() != k_arms {
        return Err(Error::InvalidInput(
            "one pull fraction per arm is required".into(),
        ));
    }
    let frac_sum: f64 = args.expected_pull_fractions.iter().sum();
    if args.expected_pull_fractions.iter().any(|f| *f < 0.0) || frac_sum > 1.0 + 1e-9 {
        return Err(Error::InvalidInput(format!(
            "pull fractions must be nonnegative with total ≤ 1, got total {frac_sum}"
        )));
    }
    if !(0.0..=1.0).contains(&args.p_error_at_mu) {
        return Err(Error::InvalidInput(format!(
            "p_error must lie in [0,1], got {}",
            args.p_error_at_mu
        )));
    }
    let mut rhs = 0.0;
    for k in 0..k_arms {
        let arm = args.instance.arm(k);
        rhs += args.expected_pull_fractions[k] * arm.family.kl(arm.mean, args.lambda[k])?;
    }
    rhs *= args.h_lambda;
    let lhs = (1.0 - args.p_error_at_mu) / args.ratio_at_lambda - 2f64.ln() / t.sqrt();
    Ok(FiniteTCheck {
        lhs,
        rhs,
        satisfied: lhs <= rhs + 1e-12,
    })
}

/// Limsup lower bound on sup_{λ∈D} R_{H,∞} from a finite set of
/// alternatives: the reciprocal of max_ω inf_{λ∈D} H(λ) Σ_k ω_k KL(μ_k, λ_k).
///
/// Corner-structured sets (each λ differing from μ in its own single
/// coordinate) are solved by the closed-form equalization; other sets go
/// through an exact small-support matrix-game solve seeded by
/// multiplicative-weights self-play.
pub fn limsup_ratio_lb(
    task: &TaskSpec,
    instance: &BanditInstance,
    alternatives: &[Vec<f64>],
    h_values: &[f64],
) -> Result<RatioResult> {
    if alternatives.is_empty() {
        return Err(Error::InvalidInput("empty alternative set".into()));
    }
    if alternatives.len() != h_values.len() {
        return Err(Error::InvalidInput(
            "one difficulty value per alternative is required".into(),
        ));
    }
    let k_arms = instance.num_arms();
    let means = instance.means();
    for (lambda, h) in alternatives.iter().zip(h_values) {
        if lambda.len() != k_arms {
            return Err(Error::InvalidInput(
                "alternative dimension mismatch".into(),
            ));
        }
        if !(h.is_finite() && *h > 0.0) {
            return Err(Error::InvalidInput(format!(
                "difficulty values must lie in (0, ∞), got {h}"
            )));
        }
        if !tasks::is_alternative(task, instance, lambda)? {
            return Err(Error::InvalidInput(
                "every element of D must be an alternative of μ".into(),
            ));
        }
    }
    // payoff matrix: row p, column k ↦ H(λ^p) KL(μ_k, λ^p_k)
    let mut payoff = Vec::with_capacity(alternatives.len());
    for (lambda, h) in alternatives.iter().zip(h_values) {
        let mut row = vec![0.0; k_arms];
        for k in 0..k_arms {
            let arm = instance.arm(k);
            row[k] = if lambda[k] == means[k] {
                0.0
            } else {
                h * arm.family.kl(means[k], lambda[k])?
            };
        }
        payoff.push(row);
    }
    let (value, omega) = if let Some(coords) = corner_coordinates(&payoff) {
        corner_maximin(&payoff, &coords)
    } else {
        matrix_game_maximin(&payoff)?
    };
    let contributions: Vec<f64> = payoff.iter().map(|row| tasks::dot(row, &omega)).collect();
    Ok(RatioResult {
        lower_bound: 1.0 / value,
        equalizing_omega: Some(Weights::new(omega)?),
        contributions,
    })
}

/// Detect corner structure: every row has exactly one positive entry, on its
/// own distinct coordinate.
fn corner_coordinates(payoff: &[Vec<f64>]) -> Option<Vec<usize>> {
    let mut seen = vec![false; payoff[0].len()];
    let mut coords = Vec::with_capacity(payoff.len());
    for row in payoff {
        let positives: Vec<usize> = (0..row.len()).filter(|&k| row[k] > 0.0).collect();
        let [k] = positives[..] else { return None };
        if seen[k] {
            return None;
        }
        seen[k] = true;
        coords.push(k);
    }
    Some(coords)
}

/// Closed-form equalization for corner sets: piece p is ω_{j_p} A_p[j_p], so
/// the maximin equalizes and the value is (Σ_p A_p[j_p]⁻¹)⁻¹.
fn corner_maximin(payoff: &[Vec<f64>], coords: &[usize]) -> (f64, Vec<f64>) {
    let inv_sum: f64 = neumaier_sum(
        payoff
            .iter()
            .zip(coords)
            .map(|(row, &k)| 1.0 / row[k]),
    );
    let value = 1.0 / inv_sum;
    let mut omega = vec![0.0; payoff[0].len()];
    for (row, &k) in payoff.iter().zip(coords) {
        omega[k] = value / row[k];
    }
    // absorb rounding so the weights pass simplex validation
    let total: f64 = omega.iter().sum();
    for w in &mut omega {
        *w /= total;
    }
    (value, omega)
}

/// Exact maximin of min_p ⟨A_p, ω⟩ over the simplex.
///
/// Multiplicative-weights self-play locates the supports; the equalization
/// system on those supports is then solved exactly and certified by LP
/// duality (gap ≤ 1e-10 relative), so the reported value is exact up to
/// rounding.
fn matrix_game_maximin(payoff: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
    let n_pieces = payoff.len();
    let k = payoff[0].len();
    let scale = payoff
        .iter()
        .flat_map(|r| r.iter())
        .fold(f64::MIN_POSITIVE, |a, &b| a.max(b));

    let mut omega = vec![1.0 / k as f64; k];
    let mut pi = vec![1.0 / n_pieces as f64; n_pieces];
    let mut omega_avg = vec![0.0; k];
    let mut pi_avg = vec![0.0; n_pieces];
    let mut best: Option<(f64, Vec<f64>)> = None;

    for t in 0..200_000usize {
        // payoffs of the two players at the current strategies
        let row_values: Vec<f64> = payoff.iter().map(|r| tasks::dot(r, &omega)).collect();
        let mut col_values = vec![0.0; k];
        for (p, row) in payoff.iter().enumerate() {
            for (c, a) in col_values.iter_mut().zip(row) {
                *c += pi[p] * a;
            }
        }
        let step = (8.0 * (n_pieces.max(k) as f64).ln() / (t as f64 + 1.0)).sqrt() / scale;
        mw_step(&mut omega, &col_values, step, 1.0);
        mw_step(&mut pi, &row_values, step, -1.0);
        for (a, w) in omega_avg.iter_mut().zip(&omega) {
            *a += w;
        }
        for (a, w) in pi_avg.iter_mut().zip(&pi) {
            *a += w;
        }
        if (t + 1) % 2048 == 0 || t == 0 {
            let denom = (t + 1) as f64;
            let omega_bar: Vec<f64> = omega_avg.iter().map(|a| a / denom).collect();
            let pi_bar: Vec<f64> = pi_avg.iter().map(|a| a / denom).collect();
            if let Some(result) = refine_and_certify(payoff, &omega_bar, &pi_bar)? {
                return Ok(result);
            }
            let value = payoff
                .iter()
                .map(|r| tasks::dot(r, &omega_bar))
                .fold(f64::INFINITY, f64::min);
            if best.as_ref().map_or(true, |(v, _)| value > *v) {
                best = Some((value, omega_bar));
            }
        }
    }
    Err(Error::OptimizerFailure(
        "matrix game solve did not certify the 1e-10 duality gap".into(),
    ))
}

fn mw_step(weights: &mut [f64], payoffs: &[f64], step: f64, sign: f64) {
    let top = payoffs
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for (w, g) in weights.iter_mut().zip(payoffs) {
        *w = (*w * (sign * step * (g - top)).exp()).max( 1e-300);
        total += *w;
    }
    for w in weights.iter_mut() {
        *w /= total;
    }
}

/// Read the active supports off the averaged strategies, solve the
/// equalization system exactly, and accept if LP duality certifies it.
fn refine_and_certify(
    payoff: &[Vec<f64>],
    omega_bar: &[f64],
    pi_bar: &[f64],
) -> Result<Option<(f64, Vec<f64>)>> {
    let n_pieces = payoff.len();
    let k = payoff[0].len();
    let row_values: Vec<f64> = payoff.iter().map(|r| tasks::dot(r, omega_bar)).collect();
    let value_bar = row_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut col_values = vec![0.0; k];
    for (p, row) in payoff.iter().enumerate() {
        for (c, a) in col_values.iter_mut().zip(row) {
            *c += pi_bar[p] * a;
        }
    }
    let col_top = col_values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    for tol in [1e-6, 1e-4, 1e-2] {
        let piece_support: Vec<usize> = (0..n_pieces)
            .filter(|&p| row_values[p] <= value_bar * (1.0 + tol) + 1e-300)
            .collect();
        let mut coord_support: Vec<usize> = (0..k)
            .filter(|&c| col_values[c] >= col_top * (1.0 - tol) - 1e-300)
            .collect();
        // square system: keep the heaviest coordinates if oversized
        if coord_support.len() > piece_support.len() {
            coord_support.sort_by(|&a, &b| omega_bar[b].total_cmp(&omega_bar[a]));
            coord_support.truncate(piece_support.len());
            coord_support.sort_unstable();
        }
        let piece_support = if piece_support.len() > coord_support.len() {
            let mut by_mass = piece_support.clone();
            by_mass.sort_by(|&a, &b| pi_bar[b].total_cmp(&pi_bar[a]));
            by_mass.truncate(coord_support.len());
            by_mass.sort_unstable();
            by_mass
        } else {
            piece_support
        };
        if piece_support.len() != coord_support.len() || piece_support.is_empty() {
            continue;
        }
        if let Some(result) = solve_supports(payoff, &piece_support, &coord_support) {
            return Ok(Some(result));
        }
    }
    Ok(None)
}

/// Solve the equalization system on the given supports and certify by
/// strong duality; `None` when infeasible or not optimal.
fn solve_supports(
    payoff: &[Vec<f64>],
    pieces: &[usize],
    coords: &[usize],
) -> Option<(f64, Vec<f64>)> {
    let n = pieces.len();
    let k = payoff[0].len();
    // [A_{S,T} | -1; 1ᵀ | 0] (ω_T, v) = (0, 1)
    let mut matrix = vec![vec![0.0; n + 1]; n + 1];
    let mut rhs = vec![0.0; n + 1];
    for (i, &p) in pieces.iter().enumerate() {
        for (j, &c) in coords.iter().enumerate() {
            matrix[i][j] = payoff[p][c];
        }
        matrix[i][n] = -1.0;
    }
    for j in 0..n {
        matrix[n][j] = 1.0;
    }
    rhs[n] = 1.0;
    let primal = solve_linear(&matrix, &rhs)?;
    let (omega_t, value) = (&primal[..n], primal[n]);
    if omega_t.iter().any(|w| *w < -1e-12) || !value.is_finite() {
        return None;
    }
    // dual: π_S ≥ 0 with Σπ A_{S,c} = v on the coordinate support
    let mut dual_matrix = vec![vec![0.0; n + 1]; n + 1];
    let mut dual_rhs = vec![0.0; n + 1];
    for (j, &c) in coords.iter().enumerate() {
        for (i, &p) in pieces.iter().enumerate() {
            dual_matrix[j][i] = payoff[p][c];
        }
        dual_matrix[j][n] = -1.0;
    }
    for i in 0..n {
        dual_matrix[n][i] = 1.0;
    }
    dual_rhs[n] = 1.0;
    let dual = solve_linear(&dual_matrix, &dual_rhs)?;
    let pi_s = &dual[..n];
    if pi_s.iter().any(|p| *p < -1e-12) {
        return None;
    }
    // assemble full vectors and check global optimality
    let mut omega = vec![0.0; k];
    for (j, &c) in coords.iter().enumerate() {
        omega[c] = omega_t[j].max(0.0);
    }
    let total: f64 = omega.iter().sum();
    for w in &mut omega {
        *w /= total;
    }
    let primal_value = payoff
        .iter()
        .map(|r| tasks::dot(r, &omega))
        .fold(f64::INFINITY, f64::min);
    let mut dual_cols = vec![0.0; k];
    for (i, &p) in pieces.iter().enumerate() {
        for (c, a) in dual_cols.iter_mut().zip(&payoff[p]) {
            *c += pi_s[i].max(0.0) * a;
        }
    }
    let dual_value = dual_cols.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let gap = dual_value - primal_value;
    if gap.abs() <= 1e-10 * primal_value.abs().max(1e-300) {
        Some((primal_value, omega))
    } else {
        None
    }
}

/// Gaussian elimination with partial pivoting.
fn solve_linear(matrix: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut b = rhs.to_vec();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..n {
            let factor = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= factor * a[col][c];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in (row + 1)..n {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
        if !x[row].is_finite() {
            return None;
        }
    }
    Some(x)
}

/// One single-coordinate perturbation of the base instance.
#[derive(Debug, Clone, Copy)]
pub struct CornerPerturbation {
    pub coordinate: usize,
    pub new_mean: f64,
}

/// A base instance plus per-coordinate perturbations λ^(j), as used by the
/// corner lower bound.
#[derive(Debug, Clone)]
pub struct CornerConstruction {
    pub base: BanditInstance,
    pub perturbations: Vec<CornerPerturbation>,
}

impl CornerConstruction {
    /// Materialize the j-th perturbed instance.
    pub fn perturbed(&self, index: usize) -> Result<BanditInstance> {
        let p = self.perturbations[index];
        let mut means = self.base.means();
        means[p.coordinate] = p.new_mean;
        self.base.with_means(&means)
    }
}

/// The corner lower bound: with a difficulty evaluator H,
/// sup_j R_{H,∞}(A, λ^(j)) ≥ Σ_j (H(λ^(j)) KL(μ_j, λ_j^(j)))⁻¹, with the
/// equalizing ω_j proportional to the j-th term.
pub fn corner_lb(
    task: &TaskSpec,
    construction: &CornerConstruction,
    difficulty: impl Fn(&BanditInstance) -> Result<f64>,
) -> Result<RatioResult> {
    let base_answer = tasks::correct_answer(task, &construction.base)?;
    let k_arms = construction.base.num_arms();
    if construction.perturbations.is_empty() {
        return Err(Error::InvalidConstruction("no perturbations".into()));
    }
    let mut seen = vec![false; k_arms];
    let mut contributions = Vec::with_capacity(construction.perturbations.len());
    let mut omega = vec![0.0; k_arms];
    for (index, p) in construction.perturbations.iter().enumerate() {
        if p.coordinate >= k_arms {
            return Err(Error::InvalidConstruction(format!(
                "perturbed coordinate {} out of range",
                p.coordinate
            )));
        }
        if seen[p.coordinate] {
            return Err(Error::InvalidConstruction(format!(
                "coordinate {} perturbed twice",
                p.coordinate
            )));
        }
        seen[p.coordinate] = true;
        let perturbed = construction.perturbed(index)?;
        if tasks::correct_answer(task, &perturbed)? == base_answer {
            return Err(Error::InvalidConstruction(format!(
                "perturbation {index} does not change the correct answer"
            )));
        }
        let h = difficulty(&perturbed)?;
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidConstruction(format!(
                "difficulty at perturbation {index} must be positive, got {h}"
            )));
        }
        let arm = construction.base.arm(p.coordinate);
        let kl = arm.family.kl(arm.mean, p.new_mean)?;
        let term = 1.0 / (h * kl);
        contributions.push(term);
        omega[p.coordinate] = term;
    }
    let lower_bound = neumaier_sum(contributions.iter().copied());
    Ok(RatioResult {
        lower_bound,
        equalizing_omega: Some(Weights::normalized(omega)?),
        contributions,
    })
}

/// The two-arm Bernoulli construction μ(x) = (x(1+x), x) with
/// λ⁽¹⁾ = (x/2, x) and λ⁽²⁾ = (x(1+x), 1/2), evaluated with the Bernoulli
/// closed-form difficulty. The bound tends to ≈ 1.22 as x → 0 and first
/// exceeds 1 around x = 10⁻⁹.
pub fn bernoulli_two_arm_bound(x: f64) -> Result<RatioResult> {
    if !(x > 0.0 && x < 0.5) {
        return Err(Error::InvalidInput(format!(
            "the construction needs x in (0, 1/2), got {x}"
        )));
    }
    if x < 1e-300 {
        return Err(Error::InvalidInput(format!(
            "x = {x} underflows the small-x evaluation path"
        )));
    }
    let (term_small_gap, term_half) = if x < SMALL_X_SWITCH {
        bernoulli_terms_small_x(x)
    } else {
        bernoulli_terms_generic(x)?
    };
    let lower_bound = term_small_gap + term_half;
    Ok(RatioResult {
        lower_bound,
        equalizing_omega: Some(Weights::normalized(vec![term_small_gap, term_half])?),
        contributions: vec![term_small_gap, term_half],
    })
}

/// Below this the means x(1+x) and x/2 are evaluated symbolically in x; the
/// instance-based path would lose the x² separation to rounding.
pub const SMALL_X_SWITCH: f64 = 1e-8;

/// Analytic x → 0 limits of the two contributions: the half-arm term tends
/// to 1 and the small-gap term to (1 − (1 + log(2 log 2)) / (2 log 2)) /
/// (log 2 − 1/2) ≈ 0.22, for a total of ≈ 1.22.
pub fn bernoulli_two_arm_limit() -> (f64, f64) {
    let l2 = 2f64.ln();
    let small_gap = (1.0 - (1.0 + (2.0 * l2).ln()) / (2.0 * l2)) / (l2 - 0.5);
    (small_gap, 1.0)
}

/// Library route: materialize the instances and reuse the closed form.
fn bernoulli_terms_generic(x: f64) -> Result<(f64, f64)> {
    let f = Family::Bernoulli;
    let mu = [x * (1.0 + x), x];
    let lambda1 = BanditInstance::homogeneous(f, &[x / 2.0, x])?;
    let lambda2 = BanditInstance::homogeneous(f, &[x * (1.0 + x), 0.5])?;
    let h1 = closed_form_bernoulli_bai(&lambda1)?.difficulty;
    let h2 = closed_form_bernoulli_bai(&lambda2)?.difficulty;
    let term1 = 1.0 / (h1 * f.kl(mu[0], x / 2.0)?);
    let term2 = 1.0 / (h2 * f.kl(mu[1], 0.5)?);
    Ok((term1, term2))
}

/// Small-x route: every logarithm is taken of an O(1) ratio expressed
/// directly in x, so the evaluation stays exact down to x = 1e-300.
fn bernoulli_terms_small_x(x: f64) -> (f64, f64) {
    let ln2 = 2f64.ln();
    let m = x + x * x; // x(1+x)
    let ln_m = x.ln() + x.ln_1p(); // log(x(1+x))
    let ln1p_neg_m = (-m).ln_1p();

    // term 1: H((x/2, x))⁻¹ / KL(x(1+x), x/2)
    let l_num = (-x).ln_1p() - (-x / 2.0).ln_1p(); // log((1−x)/(1−x/2))
    let x_tilde_1 = l_num / (l_num - ln2);
    let kl_tilde_1 = neumaier_sum(
        [
            x_tilde_1 * (x_tilde_1 / (0.5 * x)).ln(),
            (1.0 - x_tilde_1) * ((-x_tilde_1).ln_1p() - (-x / 2.0).ln_1p()),
        ]
        .into_iter(),
    );
    let kl_mu_lambda_1 = neumaier_sum(
        [
            m * (ln2 + x.ln_1p()), // m log(m/(x/2)) with the ratio 2(1+x) exact
            (1.0 - m) * (ln1p_neg_m - (-x / 2.0).ln_1p()),
        ]
        .into_iter(),
    );
    let term1 = kl_tilde_1 / kl_mu_lambda_1;

    // term 2: H((x(1+x), 1/2))⁻¹ / KL(x, 1/2)
    let x_tilde_2 = (-ln2 - ln1p_neg_m) / (ln_m - ln1p_neg_m);
    let kl_tilde_2 = neumaier_sum(
        [
            x_tilde_2 * (x_tilde_2.ln() - ln_m),
            (1.0 - x_tilde_2) * ((-x_tilde_2).ln_1p() - ln1p_neg_m),
        ]
        .into_iter(),
    );
    let kl_x_half = neumaier_sum(
        [x * (2.0 * x).ln(), (1.0 - x) * (ln2 + (-x).ln_1p())].into_iter(),
    );
    let term2 = kl_tilde_2 / kl_x_half;
    (term1, term2)
}

/// The Gaussian log K construction and its corner bound.
#[derive(Debug, Clone)]
pub struct GaussianBaiBound {
    /// The corner bound with respect to the gap-based difficulty.
    pub corner: RatioResult,
    /// (1/8)(log(K+1) − log 2), the analytic floor of the bound.
    pub analytic_floor: f64,
    /// The same bound stated against the oracle difficulty, worth half of
    /// the gap-based bound through H_Δ ≤ H ≤ 2 H_Δ.
    pub h_csp_ratio_bound: f64,
}

/// Corner bound for the Gaussian instance μ_1 = 0, μ_j = −jΔ (j = 2..K)
/// with λ^(j) flipping arm j to +jΔ, evaluated with the gap-based
/// difficulty. Grows like (log K)/8 and is scale invariant in Δ.
pub fn gaussian_bai_bound(k_arms: usize, delta: f64) -> Result<GaussianBaiBound> {
    if k_arms < 2 {
        return Err(Error::InvalidInput(format!(
            "the construction needs at least 2 arms, got {k_arms}"
        )));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidInput(format!(
            "the gap Δ must be positive, got {delta}"
        )));
    }
    let family = Family::standard_gaussian();
    let mut means = vec![0.0; k_arms];
    for (j, m) in means.iter_mut().enumerate().skip(1) {
        *m = -((j + 1) as f64) * delta;
    }
    let base = BanditInstance::homogeneous(family, &means)?;
    let perturbations: Vec<CornerPerturbation> = (1..k_arms)
        .map(|j| CornerPerturbation {
            coordinate: j,
            new_mean: -means[j],
        })
        .collect();
    let construction = CornerConstruction { base, perturbations };
    let corner = corner_lb(&TaskSpec::BestArm, &construction, h_delta)?;
    let analytic_floor = 0.125 * (((k_arms + 1) as f64).ln() - 2f64.ln());
    Ok(GaussianBaiBound {
        h_csp_ratio_bound: corner.lower_bound / 2.0,
        corner,
        analytic_floor,
    })
}

/// The positivity construction: K arms at mean m > θ, each λ^(j) dropping
/// arm j to ℓ < θ.
#[derive(Debug, Clone, Copy)]
pub struct PositivityBound {
    pub k_arms: usize,
    /// K · KL(θ, ℓ)/KL(m, ℓ)
    pub lower_bound: f64,
    pub kl_ratio: f64,
    pub kl_theta_ell: f64,
    pub kl_m_ell: f64,
}

/// Evaluate the positivity corner bound K · KL(θ, ℓ)/KL(m, ℓ), valid for
/// ℓ < θ < m inside the family's mean domain.
pub fn positivity_bound(
    family: Family,
    k_arms: usize,
    m: f64,
    ell: f64,
    theta: f64,
) -> Result<PositivityBound> {
    if k_arms == 0 {
        return Err(Error::InvalidInput("need at least one arm".into()));
    }
    if !(ell < theta && theta < m) {
        return Err(Error::InvalidInput(format!(
            "the construction needs ℓ < θ < m, got ℓ={ell}, θ={theta}, m={m}"
        )));
    }
    if !family.contains_mean(ell) || !family.contains_mean(m) {
        return Err(Error::InvalidInput(
            "ℓ and m must lie in the open mean domain".into(),
        ));
    }
    let kl_theta_ell = family.kl(theta, ell)?;
    let kl_m_ell = family.kl(m, ell)?;
    let kl_ratio = kl_theta_ell / kl_m_ell;
    Ok(PositivityBound {
        k_arms,
        lower_bound: k_arms as f64 * kl_ratio,
        kl_ratio,
        kl_theta_ell,
        kl_m_ell,
    })
}

/// Kahan–Neumaier compensated summation.
pub(crate) fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut compensation = 0.0;
    for v in values {
        let t = sum + v;
        compensation += if sum.abs() >= v.abs() {
            (sum - t) + v
        } else {
            (v - t) + sum
        };
        sum = t;
    }
    sum + compensation
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::difficulty::{oracle_difficulty_sp, sp_rate, DifficultyOptions};
    use approx::assert_abs_diff_eq;

    fn bernoulli(means: &[f64]) -> BanditInstance {
        BanditInstance::homogeneous(Family::Bernoulli, means).unwrap()
    }

    fn gaussian(means: &[f64]) -> BanditInstance {
        BanditInstance::homogeneous(Family::standard_gaussian(), means).unwrap()
    }

    #[test]
    fn corner_lb_positivity_matches_theorem_value() {
        // K arms at m, drop one to ℓ: the bound is K·KL(θ,ℓ)/KL(m,ℓ)
        let (k, m, ell, theta) = (5usize, 0.6, 0.01, 0.5);
        let base = bernoulli(&vec![m; k]);
        let construction = CornerConstruction {
            base,
            perturbations: (0..k)
                .map(|j| CornerPerturbation { coordinate: j, new_mean: ell })
                .collect(),
        };
        let task = TaskSpec::Positivity { threshold: theta };
        let result = corner_lb(&task, &construction, |inst| {
            Ok(oracle_difficulty_sp(&task, inst, &DifficultyOptions::default())?.difficulty)
        })
        .unwrap();
        let expected = positivity_bound(Family::Bernoulli, k, m, ell, theta).unwrap();
        assert_abs_diff_eq!(result.lower_bound, expected.lower_bound, epsilon = 1e-10);
        // equal terms ⇒ uniform equalizing weights
        let omega = result.equalizing_omega.unwrap();
        for j in 0..k {
            assert_abs_diff_eq!(omega[j], 1.0 / k as f64, epsilon = 1e-12);
        }
    }

    #[test]
    fn corner_lb_agrees_with_limsup_solver_on_corner_sets() {
        let base = gaussian(&[1.0, 0.0, -0.5]);
        let task = TaskSpec::BestArm;
        let construction = CornerConstruction {
            base: base.clone(),
            perturbations: vec![
                CornerPerturbation { coordinate: 1, new_mean: 1.5 },
                CornerPerturbation { coordinate: 2, new_mean: 2.0 },
            ],
        };
        let h = |inst: &BanditInstance| {
            Ok(oracle_difficulty_sp(&task, inst, &DifficultyOptions::default())?.difficulty)
        };
        let corner = corner_lb(&task, &construction, h).unwrap();
        let alternatives: Vec<Vec<f64>> = (0..2)
            .map(|i| construction.perturbed(i).unwrap().means())
            .collect();
        let h_values: Vec<f64> = (0..2)
            .map(|i| h(&construction.perturbed(i).unwrap()).unwrap())
            .collect();
        let limsup = limsup_ratio_lb(&task, &base, &alternatives, &h_values).unwrap();
        let rel = (corner.lower_bound - limsup.lower_bound).abs() / corner.lower_bound;
        assert!(rel <= 1e-8, "corner {} vs limsup {}", corner.lower_bound, limsup.lower_bound);
    }

    #[test]
    fn corner_lb_symmetric_two_terms_gives_half_half() {
        let base = gaussian(&[0.5, -0.5]);
        let construction = CornerConstruction {
            base,
            perturbations: vec![
                CornerPerturbation { coordinate: 0, new_mean: -1.5 },
                CornerPerturbation { coordinate: 1, new_mean: 1.5 },
            ],
        };
        let result = corner_lb(&TaskSpec::BestArm, &construction, |_| Ok(1.0)).unwrap();
        let omega = result.equalizing_omega.unwrap();
        assert_abs_diff_eq!(omega[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(omega[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn corner_lb_rejects_bad_constructions() {
        let base = gaussian(&[1.0, 0.0]);
        // perturbation that does not flip the answer
        let construction = CornerConstruction {
            base: base.clone(),
            perturbations: vec![CornerPerturbation { coordinate: 1, new_mean: 0.5 }],
        };
        assert!(matches!(
            corner_lb(&TaskSpec::BestArm, &construction, |_| Ok(1.0)),
            Err(Error::InvalidConstruction(_))
        ));
        // nonpositive difficulty
        let construction = CornerConstruction {
            base,
            perturbations: vec![CornerPerturbation { coordinate: 1, new_mean: 2.0 }],
        };
        assert!(matches!(
            corner_lb(&TaskSpec::BestArm, &construction, |_| Ok(0.0)),
            Err(Error::InvalidConstruction(_))
        ));
    }

    #[test]
    fn gaussian_half_space_corner_bound_approaches_one_half() {
        // far single-coordinate flips approach the 1/2 ceiling of the
        // corner bound for the two-arm half-space task
        let task = TaskSpec::HalfSpace {
            direction: vec![0.5, -0.5],
            offset: 0.0,
        };
        let base = gaussian(&[-0.2, 0.2]);
        let far = 2000.0;
        let construction = CornerConstruction {
            base,
            perturbations: vec![
                CornerPerturbation { coordinate: 0, new_mean: far },
                CornerPerturbation { coordinate: 1, new_mean: -far },
            ],
        };
        let result = corner_lb(&task, &construction, |inst| {
            Ok(oracle_difficulty_sp(&task, inst, &DifficultyOptions::default())?.difficulty)
        })
        .unwrap();
        assert!(result.lower_bound <= 0.5 + 1e-9);
        assert!(result.lower_bound > 0.499, "bound {}", result.lower_bound);
    }

    #[test]
    fn limsup_single_alternative_concentrates_on_best_coordinate() {
        let base = gaussian(&[1.0, 0.0]);
        let lambda = vec![-0.5, 0.8];
        let h = 3.0;
        let result =
            limsup_ratio_lb(&TaskSpec::BestArm, &base, &[lambda.clone()], &[h]).unwrap();
        let f = Family::standard_gaussian();
        let best_coord = f.kl(1.0, -0.5).unwrap().max(f.kl(0.0, 0.8).unwrap());
        assert_abs_diff_eq!(result.lower_bound, 1.0 / (h * best_coord), epsilon = 1e-10);
    }

    #[test]
    fn limsup_rejects_bad_inputs() {
        let base = gaussian(&[1.0, 0.0]);
        assert!(limsup_ratio_lb(&TaskSpec::BestArm, &base, &[], &[]).is_err());
        // not an alternative
        assert!(
            limsup_ratio_lb(&TaskSpec::BestArm, &base, &[vec![2.0, 0.0]], &[1.0]).is_err()
        );
    }

    #[test]
    fn bernoulli_two_arm_bound_regression_and_limits() {
        // frozen from an independent 60-digit evaluation
        let at_3 = bernoulli_two_arm_bound(1e-3).unwrap();
        assert_abs_diff_eq!(at_3.lower_bound, 0.758440413212, epsilon = 1e-9);
        let at_12 = bernoulli_two_arm_bound(1e-12).unwrap();
        assert_abs_diff_eq!(at_12.lower_bound, 1.05369843446, epsilon = 1e-9);
        let (small_gap, half) = bernoulli_two_arm_limit();
        assert_abs_diff_eq!(small_gap, 0.22281280991627, epsilon = 1e-12);
        assert_abs_diff_eq!(small_gap + half, 1.22281280991627, epsilon = 1e-12);
    }

    #[test]
    fn bernoulli_two_arm_paths_agree_in_the_overlap() {
        for &x in &[1e-7, 1e-6, 1e-5, 1e-4, 1e-3] {
            let (g1, g2) = bernoulli_terms_generic(x).unwrap();
            let (s1, s2) = bernoulli_terms_small_x(x);
            assert!((g1 - s1).abs() <= 1e-9 * s1, "x={x}: {g1} vs {s1}");
            assert!((g2 - s2).abs() <= 1e-9 * s2, "x={x}: {g2} vs {s2}");
        }
    }

    #[test]
    fn bernoulli_two_arm_component_limits() {
        // 1/(H((x(1+x),1/2))·KL(x,1/2)) → 1 and the other term → ≈0.22
        let r = bernoulli_two_arm_bound(1e-250).unwrap();
        let (limit_small_gap, _) = bernoulli_two_arm_limit();
        assert!((r.contributions[0] - limit_small_gap).abs() < 1e-6);
        assert!((r.contributions[1] - 1.0).abs() < 0.02, "term {}", r.contributions[1]);
        assert!(r.lower_bound < 1.0 + limit_small_gap + 1e-9);
    }

    #[test]
    fn bernoulli_two_arm_bound_range_checks() {
        assert!(bernoulli_two_arm_bound(0.0).is_err());
        assert!(bernoulli_two_arm_bound(0.5).is_err());
        assert!(bernoulli_two_arm_bound(-1e-3).is_err());
    }

    #[test]
    fn gaussian_bai_bound_floor_and_scale_invariance() {
        let k = 100;
        let result = gaussian_bai_bound(k, 1.0).unwrap();
        assert!(result.corner.lower_bound >= result.analytic_floor);
        for delta in [0.1, 10.0] {
            let other = gaussian_bai_bound(k, delta).unwrap();
            let rel = (other.corner.lower_bound - result.corner.lower_bound).abs()
                / result.corner.lower_bound;
            assert!(rel <= 1e-8, "Δ={delta}: rel {rel}");
        }
        assert_abs_diff_eq!(
            result.h_csp_ratio_bound,
            result.corner.lower_bound / 2.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn positivity_bound_values_and_ordering() {
        let b = positivity_bound(Family::Bernoulli, 5, 0.6, 0.01, 0.5).unwrap();
        assert!(b.lower_bound > 0.0 && b.lower_bound < 5.0);
        // K = 1 degenerate case is at most 1
        let one = positivity_bound(Family::Bernoulli, 1, 0.6, 0.01, 0.5).unwrap();
        assert!(one.lower_bound <= 1.0);
        // ordering violations
        assert!(positivity_bound(Family::Bernoulli, 5, 0.4, 0.01, 0.5).is_err());
        assert!(positivity_bound(Family::Bernoulli, 5, 0.6, 0.55, 0.5).is_err());
    }

    #[test]
    fn positivity_uniform_sampling_is_within_factor_k() {
        // sp_rate at uniform ≤ K · H on the construction's instances
        let (k, m, ell, theta) = (5usize, 0.6, 0.01, 0.5);
        let task = TaskSpec::Positivity { threshold: theta };
        for j in 0..k {
            let mut means = vec![m; k];
            means[j] = ell;
            let inst = bernoulli(&means);
            let rate = sp_rate(&task, &inst, &Weights::uniform(k)).unwrap();
            let h = oracle_difficulty_sp(&task, &inst, &DifficultyOptions::default())
                .unwrap()
                .difficulty;
            assert!(rate <= k as f64 * h * (1.0 + 1e-8), "arm {j}: {rate} vs K·H {}", k as f64 * h);
        }
    }

    #[test]
    fn finite_t_check_trivial_and_precondition_cases() {
        let inst = bernoulli(&[0.6, 0.4]);
        let task = TaskSpec::BestArm;
        // p = 1 makes the left side nonpositive
        let check = finite_t_check(&FiniteTArgs {
            task: &task,
            instance: &inst,
            lambda: &[0.4, 0.6],
            h_lambda: 10.0,
            horizon: 10_000,
            expected_pull_fractions: &[0.5, 0.5],
            p_error_at_mu: 1.0,
            ratio_at_lambda: 1.0,
        })
        .unwrap();
        assert!(check.lhs <= 0.0 && check.satisfied);
        // H(λ) > √T violates the hypothesis
        let err = finite_t_check(&FiniteTArgs {
            task: &task,
            instance: &inst,
            lambda: &[0.4, 0.6],
            h_lambda: 101.0,
            horizon: 10_000,
            expected_pull_fractions: &[0.5, 0.5],
            p_error_at_mu: 0.1,
            ratio_at_lambda: 1.0,
        });
        assert!(matches!(err, Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn matrix_game_solver_handles_non_corner_sets() {
        // two-arm game with overlapping coordinates; compare against a fine
        // scan over ω₁
        let base = gaussian(&[-0.05, 0.05]);
        let task = TaskSpec::HalfSpace {
            direction: vec![0.5, -0.5],
            offset: 0.0,
        };
        let alternatives = vec![
            vec![0.3, 0.1],
            vec![0.5, -0.3],
            vec![0.2, -0.1],
        ];
        let h_values: Vec<f64> = alternatives
            .iter()
            .map(|l| {
                let inst = base.with_means(l).unwrap();
                oracle_difficulty_sp(&task, &inst, &DifficultyOptions::default())
                    .unwrap()
                    .difficulty
            })
            .collect();
        let result = limsup_ratio_lb(&task, &base, &alternatives, &h_values).unwrap();
        // brute scan
        let f = Family::standard_gaussian();
        let payoff: Vec<[f64; 2]> = alternatives
            .iter()
            .zip(&h_values)
            .map(|(l, h)| {
                [
                    h * f.kl(-0.05, l[0]).unwrap(),
                    h * f.kl(0.05, l[1]).unwrap(),
                ]
            })
            .collect();
        let mut best = f64::NEG_INFINITY;
        for i in 0..=100_000 {
            let w = i as f64 / 100_000.0;
            let v = payoff
                .iter()
                .map(|row| row[0] * w + row[1] * (1.0 - w))
                .fold(f64::INFINITY, f64::min);
            best = best.max(v);
        }
        let rel = (1.0 / result.lower_bound - best).abs() / best;
        assert!(rel <= 1e-6, "maximin {} vs scan {}", 1.0 / result.lower_bound, best);
    }
}
