use rand::Rng;

use super::kl::kl_ucb_index;
use super::state::PolicyState;
use crate::error::Result;

/// Mode-selection policies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Policy {
    KlUcb,
    /// KL-UCB on the discounted mean. With `canonical = false` the exploration budget is
    /// `ln(t) / N[i]` on raw counts; with `canonical = true` it is
    /// `ln(sum of discounted counts) / discounted count`.
    DiscountedKlUcb { gamma: f64, canonical: bool },
    Ucb,
    /// Discounted mean plus `sqrt(2 ln t / discounted count)`.
    DiscountedUcb { gamma: f64 },
    /// Round-robin for `m` pulls per arm, then commit to the best empirical arm.
    ExploreThenCommit { m: u64 },
    Random,
    /// Plays the arm with the highest true mean in the current round.
    Oracle,
}

impl Policy {
    pub fn name(&self) -> &'static str {
        match self {
            Policy::KlUcb => "kl_ucb",
            Policy::DiscountedKlUcb { .. } => "discounted_kl_ucb",
            Policy::Ucb => "ucb",
            Policy::DiscountedUcb { .. } => "discounted_ucb",
            Policy::ExploreThenCommit { .. } => "etc",
            Policy::Random => "random",
            Policy::Oracle => "oracle",
        }
    }

    /// Discount applied to this policy's counters (1 for undiscounted policies).
    pub fn gamma(&self) -> f64 {
        match *self {
            Policy::DiscountedKlUcb { gamma, .. } | Policy::DiscountedUcb { gamma } => gamma,
            _ => 1.0,
        }
    }

    pub fn new_state(&self, arms: usize) -> Result<PolicyState> {
        PolicyState::new(arms, self.gamma())
    }

    fn plays_each_arm_first(&self) -> bool {
        matches!(
            self,
            Policy::KlUcb | Policy::DiscountedKlUcb { .. } | Policy::Ucb | Policy::DiscountedUcb { .. }
        )
    }
}

/// Index of the maximum; ties go to the lowest index.
pub fn argmax(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (i, v) in values.into_iter().enumerate() {
        if v > best_value {
            best = i;
            best_value = v;
        }
    }
    best
}

/// A policy together with the little memory some policies need across rounds.
#[derive(Debug, Clone)]
pub struct Selector {
    policy: Policy,
    committed: Option<usize>,
}

impl Selector {
    pub fn new(policy: Policy) -> Self {
        Selector {
            policy,
            committed: None,
        }
    }

    pub fn policy(&self) -> &Policy {
        &self.policy
    }

    /// Arm to play in round `state.round() + 1`. `true_means` is only read by the oracle.
    pub fn select<R: Rng + ?Sized>(&mut self, state: &PolicyState, true_means: &[f64], rng: &mut R) -> usize {
        let arms = state.arms();
        if self.policy.plays_each_arm_first() {
            if let Some(unplayed) = (0..arms).find(|a| state.pulls(*a) == 0) {
                return unplayed;
            }
        }
        let t = (state.round() + 1) as f64;
        match self.policy {
            Policy::KlUcb => argmax((0..arms).map(|a| {
                let n = state.pulls(a) as f64;
                kl_ucb_index(state.reward_sum(a) as f64 / n, n, t)
            })),
            Policy::DiscountedKlUcb { canonical, .. } => {
                let total = state.discounted_total().max(1.0);
                argmax((0..arms).map(|a| {
                    let mean = state.discounted_mean(a).unwrap_or(0.0).clamp(0.0, 1.0);
                    if canonical {
                        let n = state.discounted_pulls(a);
                        if n <= 0.0 {
                            1.0
                        } else {
                            kl_ucb_index(mean, n, total)
                        }
                    } else {
                        kl_ucb_index(mean, state.pulls(a) as f64, t)
                    }
                }))
            }
            Policy::Ucb => argmax((0..arms).map(|a| {
                let n = state.pulls(a) as f64;
                state.reward_sum(a) as f64 / n + (2.0 * t.ln() / n).sqrt()
            })),
            Policy::DiscountedUcb { .. } => argmax((0..arms).map(|a| {
                let n = state.discounted_pulls(a);
                let mean = state.discounted_mean(a).unwrap_or(0.0);
                if n <= 0.0 {
                    f64::INFINITY
                } else {
                    mean + (2.0 * t.ln() / n).sqrt()
                }
            })),
            Policy::ExploreThenCommit { m } => {
                if state.round() < m * arms as u64 {
                    (state.round() % arms as u64) as usize
                } else {
                    *self.committed.get_or_insert_with(|| {
                        argmax((0..arms).map(|a| state.empirical_mean(a).unwrap_or(0.0)))
                    })
                }
            }
            Policy::Random => rng.random_range(0..arms),
            Policy::Oracle => argmax(true_means.iter().copied()),
        }
    }
}
