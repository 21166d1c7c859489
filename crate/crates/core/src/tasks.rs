//! Identification tasks: correct-answer functions, alternative sets, and
//! degeneracy validation.
//!
//! A task is a pair (answer set, correct-answer function i*). The instance
//! set D is implicitly the set of instances whose answer is unique; ties and
//! boundary cases are degenerate. The alternative set of μ is
//! Alt(μ) = {λ ∈ D | i*(λ) ≠ i*(μ)}.

use crate::error::{Error, Result};
use crate::exp_family::Family;

/// Margin below which a legal instance is flagged as nearly degenerate.
pub const NEAR_DEGENERACY_MARGIN: f64 = 1e-12;

/// One arm: an exponential family together with its mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arm {
    pub family: Family,
    pub mean: f64,
}

/// A bandit problem, identified with its mean vector inside per-arm
/// exponential families.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditInstance {
    arms: Vec<Arm>,
}

impl BanditInstance {
    /// Build an instance, checking K ≥ 2 and that every mean lies in the
    /// open mean domain of its family.
    pub fn new(arms: Vec<Arm>) -> Result<Self> {
        if arms.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "an instance needs at least 2 arms, got {}",
                arms.len()
            )));
        }
        for (k, arm) in arms.iter().enumerate() {
            arm.family.validate()?;
            if !arm.family.contains_mean(arm.mean) {
                return Err(Error::InvalidParameter(format!(
                    "mean {} of arm {k} is outside the open mean domain",
                    arm.mean
                )));
            }
        }
        Ok(BanditInstance { arms })
    }

    /// Instance in which every arm belongs to the same family.
    pub fn homogeneous(family: Family, means: &[f64]) -> Result<Self> {
        Self::new(means.iter().map(|&mean| Arm { family, mean }).collect())
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn arms(&self) -> &[Arm] {
        &self.arms
    }

    pub fn arm(&self, k: usize) -> Arm {
        self.arms[k]
    }

    pub fn means(&self) -> Vec<f64> {
        self.arms.iter().map(|a| a.mean).collect()
    }

    /// Same families, new means. Used to materialize alternatives.
    pub fn with_means(&self, means: &[f64]) -> Result<Self> {
        if means.len() != self.arms.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} means, got {}",
                self.arms.len(),
                means.len()
            )));
        }
        Self::new(
            self.arms
                .iter()
                .zip(means)
                .map(|(a, &mean)| Arm { family: a.family, mean })
                .collect(),
        )
    }

    /// The common family if all arms share one, `None` otherwise.
    pub fn common_family(&self) -> Option<Family> {
        let first = self.arms[0].family;
        self.arms.iter().all(|a| a.family == first).then_some(first)
    }

    /// Per-arm standard deviations if every arm is Gaussian.
    pub fn gaussian_std_devs(&self) -> Option<Vec<f64>> {
        self.arms
            .iter()
            .map(|a| match a.family {
                Family::GaussianKnownVariance { variance } => Some(variance.sqrt()),
                Family::Bernoulli => None,
            })
            .collect()
    }
}

/// Which identification question is asked.
#[derive(Debug, Clone, PartialEq)]
pub enum TaskSpec {
    /// Find the arm with the highest mean.
    BestArm,
    /// Report for every arm whether its mean is above or below `threshold`.
    Thresholding { threshold: f64 },
    /// Decide whether all means exceed `threshold` or at least one is below.
    Positivity { threshold: f64 },
    /// Decide on which side of the hyperplane {x : xᵀu = offset} the mean
    /// vector lies. When all arms are Gaussian, `direction` must be
    /// normalized so that Σ_k |u_k| σ_k = 1.
    HalfSpace { direction: Vec<f64>, offset: f64 },
}

/// Sign of one arm relative to the threshold in a thresholding task.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Above,
    Below,
}

/// An element of the answer set of a task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Answer {
    /// Index (0-based) of the best arm.
    BestArm(usize),
    /// Per-arm signs for thresholding.
    Signs(Vec<Sign>),
    /// Positivity: every arm is above the threshold.
    AllAbove,
    /// Positivity: at least one arm is below the threshold.
    ExistsBelow,
    /// Half-space: μᵀu > offset.
    PositiveSide,
    /// Half-space: μᵀu < offset.
    NegativeSide,
}

/// Outcome of degeneracy validation, with the margin to degeneracy.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// Reason the instance is exactly degenerate, if it is.
    pub degenerate: Option<String>,
    /// Distance to the nearest degenerate configuration (top-two gap,
    /// smallest |μ_k − θ|, or |μᵀu − c|).
    pub margin: f64,
    /// Legal but within [`NEAR_DEGENERACY_MARGIN`] of degeneracy.
    pub near_degenerate: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.degenerate.is_none()
    }

    fn from_margin(margin: f64, reason: impl FnOnce() -> String) -> Self {
        if margin == 0.0 {
            ValidationReport {
                degenerate: Some(reason()),
                margin,
                near_degenerate: false,
            }
        } else {
            ValidationReport {
                degenerate: None,
                margin,
                near_degenerate: margin < NEAR_DEGENERACY_MARGIN,
            }
        }
    }
}

/// Check that the task itself is well formed for the instance: matching
/// dimensions and the half-space normalization Σ_k |u_k| σ_k = 1 when all
/// arms are Gaussian.
pub fn validate_task(task: &TaskSpec, instance: &BanditInstance) -> Result<()> {
    if let TaskSpec::HalfSpace { direction, .. } = task {
        if direction.len() != instance.num_arms() {
            return Err(Error::InvalidParameter(format!(
                "half-space direction has {} coordinates for {} arms",
                direction.len(),
                instance.num_arms()
            )));
        }
        if direction.iter().all(|&u| u == 0.0) {
            return Err(Error::InvalidParameter(
                "half-space direction must be nonzero".into(),
            ));
        }
        if let Some(sigmas) = instance.gaussian_std_devs() {
            let norm: f64 = direction
                .iter()
                .zip(&sigmas)
                .map(|(u, s)| u.abs() * s)
                .sum();
            if (norm - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "half-space direction must satisfy Σ|u_k|σ_k = 1, got {norm}"
                )));
            }
        }
    }
    Ok(())
}

/// Degeneracy validation. Structural problems (dimension mismatch, bad
/// normalization) are hard errors; degeneracy and near-degeneracy are
/// reported, not raised.
///
/// Exactly degenerate are: a tied argmax (best arm), any mean equal to the
/// threshold (thresholding, positivity), and μᵀu = c (half-space). Equality
/// is exact; nearly degenerate instances are legal but flagged.
pub fn validate_instance(task: &TaskSpec, instance: &BanditInstance) -> Result<ValidationReport> {
    validate_task(task, instance)?;
    let means = instance.means();
    let report = match task {
        TaskSpec::BestArm => {
            let (best, second) = top_two(&means);
            ValidationReport::from_margin(best - second, || {
                format!("tied argmax at mean {best}")
            })
        }
        TaskSpec::Thresholding { threshold } | TaskSpec::Positivity { threshold } => {
            let margin = means
                .iter()
                .map(|m| (m - threshold).abs())
                .fold(f64::INFINITY, f64::min);
            ValidationReport::from_margin(margin, || {
                format!("an arm mean equals the threshold {threshold}")
            })
        }
        TaskSpec::HalfSpace { direction, offset } => {
            let margin = (dot(&means, direction) - offset).abs();
            ValidationReport::from_margin(margin, || {
                "mean vector lies exactly on the half-space boundary".into()
            })
        }
    };
    Ok(report)
}

/// The correct answer i*(μ). Fails on degenerate instances.
pub fn correct_answer(task: &TaskSpec, instance: &BanditInstance) -> Result<Answer> {
    let report = validate_instance(task, instance)?;
    if let Some(reason) = report.degenerate {
        return Err(Error::DegenerateInstance(reason));
    }
    Ok(empirical_answer(task, &instance.means()))
}

/// The extended correct-answer function, total on the closure of the mean
/// domain. Used to turn empirical means into recommendations; it never
/// fails. Ties are broken towards the lowest index and a mean exactly at the
/// threshold (or a mean vector exactly on the half-space boundary) counts as
/// above / positive side.
pub fn empirical_answer(task: &TaskSpec, means: &[f64]) -> Answer {
    match task {
        TaskSpec::BestArm => {
            let mut best = 0;
            for (k, &m) in means.iter().enumerate() {
                if m > means[best] {
                    best = k;
                }
            }
            Answer::BestArm(best)
        }
        TaskSpec::Thresholding { threshold } => Answer::Signs(
            means
                .iter()
                .map(|&m| if m >= *threshold { Sign::Above } else { Sign::Below })
                .collect(),
        ),
        TaskSpec::Positivity { threshold } => {
            if means.iter().all(|&m| m >= *threshold) {
                Answer::AllAbove
            } else {
                Answer::ExistsBelow
            }
        }
        TaskSpec::HalfSpace { direction, offset } => {
            if dot(means, direction) >= *offset {
                Answer::PositiveSide
            } else {
                Answer::NegativeSide
            }
        }
    }
}

/// Whether `candidate` (a mean vector over the same families as `instance`)
/// is an alternative of `instance`: both are valid and their correct answers
/// differ.
pub fn is_alternative(
    task: &TaskSpec,
    instance: &BanditInstance,
    candidate: &[f64],
) -> Result<bool> {
    let reference = correct_answer(task, instance)?;
    let candidate = instance.with_means(candidate)?;
    let answer = correct_answer(task, &candidate)?;
    Ok(answer != reference)
}

fn top_two(means: &[f64]) -> (f64, f64) {
    let mut best = f64::NEG_INFINITY;
    let mut second = f64::NEG_INFINITY;
    for &m in means {
        if m > best {
            second = best;
            best = m;
        } else if m > second {
            second = m;
        }
    }
    (best, second)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bernoulli(means: &[f64]) -> BanditInstance {
        BanditInstance::homogeneous(Family::Bernoulli, means).unwrap()
    }

    fn gaussian(means: &[f64]) -> BanditInstance {
        BanditInstance::homogeneous(Family::standard_gaussian(), means).unwrap()
    }

    #[test]
    fn best_arm_answer() {
        let inst = bernoulli(&[0.5, 0.3]);
        assert_eq!(
            correct_answer(&TaskSpec::BestArm, &inst).unwrap(),
            Answer::BestArm(0)
        );
    }

    #[test]
    fn thresholding_answer() {
        let inst = bernoulli(&[0.6, 0.4]);
        let task = TaskSpec::Thresholding { threshold: 0.5 };
        assert_eq!(
            correct_answer(&task, &inst).unwrap(),
            Answer::Signs(vec![Sign::Above, Sign::Below])
        );
    }

    #[test]
    fn positivity_answer() {
        let inst = gaussian(&[1.0, -1.0]);
        let task = TaskSpec::Positivity { threshold: 0.0 };
        assert_eq!(correct_answer(&task, &inst).unwrap(), Answer::ExistsBelow);
        let inst = gaussian(&[1.0, 2.0]);
        assert_eq!(correct_answer(&task, &inst).unwrap(), Answer::AllAbove);
    }

    #[test]
    fn half_space_answer_and_normalization() {
        let task = TaskSpec::HalfSpace {
            direction: vec![0.5, -0.5],
            offset: 0.0,
        };
        let inst = gaussian(&[1.0, 0.0]);
        assert_eq!(correct_answer(&task, &inst).unwrap(), Answer::PositiveSide);

        let bad = TaskSpec::HalfSpace {
            direction: vec![1.0, -1.0],
            offset: 0.0,
        };
        assert!(matches!(
            correct_answer(&bad, &inst),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn alternatives_best_arm() {
        let inst = bernoulli(&[0.5, 0.3]);
        assert!(is_alternative(&TaskSpec::BestArm, &inst, &[0.3, 0.5]).unwrap());
        assert!(!is_alternative(&TaskSpec::BestArm, &inst, &[0.9, 0.1]).unwrap());
    }

    #[test]
    fn alternatives_positivity() {
        let inst = gaussian(&[1.0, 1.0]);
        let task = TaskSpec::Positivity { threshold: 0.0 };
        assert!(is_alternative(&task, &inst, &[1.0, -1.0]).unwrap());
    }

    #[test]
    fn self_is_never_an_alternative() {
        let cases = [
            (TaskSpec::BestArm, bernoulli(&[0.7, 0.2, 0.4])),
            (TaskSpec::Thresholding { threshold: 0.5 }, bernoulli(&[0.7, 0.2])),
            (TaskSpec::Positivity { threshold: 0.0 }, gaussian(&[0.5, -0.5])),
        ];
        for (task, inst) in cases {
            assert!(!is_alternative(&task, &inst, &inst.means()).unwrap());
        }
    }

    #[test]
    fn degenerate_instances_are_rejected() {
        let tied = bernoulli(&[0.4, 0.4]);
        let report = validate_instance(&TaskSpec::BestArm, &tied).unwrap();
        assert!(!report.is_valid());
        assert!(correct_answer(&TaskSpec::BestArm, &tied).is_err());

        let at_threshold = bernoulli(&[0.5, 0.7]);
        let report =
            validate_instance(&TaskSpec::Thresholding { threshold: 0.5 }, &at_threshold).unwrap();
        assert!(!report.is_valid());
    }

    #[test]
    fn near_degenerate_is_legal_but_flagged() {
        let inst = bernoulli(&[0.4, 0.4 + 1e-15]);
        let report = validate_instance(&TaskSpec::BestArm, &inst).unwrap();
        assert!(report.is_valid());
        assert!(report.near_degenerate);
        assert!(correct_answer(&TaskSpec::BestArm, &inst).is_ok());

        let comfortable = bernoulli(&[0.4, 0.6]);
        let report = validate_instance(&TaskSpec::BestArm, &comfortable).unwrap();
        assert!(!report.near_degenerate);
    }

    #[test]
    fn empirical_answer_is_total_on_the_closure() {
        // ties and boundary values never abort
        assert_eq!(empirical_answer(&TaskSpec::BestArm, &[0.4, 0.4]), Answer::BestArm(0));
        assert_eq!(
            empirical_answer(&TaskSpec::Thresholding { threshold: 0.5 }, &[0.5, 0.2]),
            Answer::Signs(vec![Sign::Above, Sign::Below])
        );
        assert_eq!(
            empirical_answer(&TaskSpec::Positivity { threshold: 0.0 }, &[0.0, 1.0]),
            Answer::AllAbove
        );
    }

    #[test]
    fn best_arm_answer_is_permutation_equivariant() {
        let means = [0.2, 0.8, 0.5, 0.1];
        let perms: [[usize; 4]; 3] = [[3, 1, 0, 2], [1, 0, 3, 2], [2, 3, 1, 0]];
        for perm in perms {
            let permuted: Vec<f64> = perm.iter().map(|&i| means[i]).collect();
            let inst = bernoulli(&permuted);
            let Answer::BestArm(k) = correct_answer(&TaskSpec::BestArm, &inst).unwrap() else {
                panic!("expected a best-arm answer")
            };
            assert_eq!(permuted[k], 0.8);
        }
    }

    #[test]
    fn too_few_arms_is_rejected() {
        assert!(BanditInstance::homogeneous(Family::Bernoulli, &[0.5]).is_err());
    }
}
