use rand::Rng;

use super::env::Environment;
use super::policy::{argmax, Policy, Selector};
use crate::error::{Error, Result};

/// Reference arm mean against which regret is charged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RegretBaseline {
    /// Best mean of the current round.
    #[default]
    Dynamic,
    /// Arm with the best mean averaged over the horizon, fixed for the whole episode.
    /// Increments can be negative under this baseline.
    Static,
}

/// Per-round record of one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace {
    pub arms: Vec<u8>,
    pub rewards: Vec<bool>,
    pub oracle_means: Vec<f64>,
    pub cumulative_regret: Vec<f64>,
}

impl RegretTrace {
    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }

    pub fn final_regret(&self) -> f64 {
        self.cumulative_regret.last().copied().unwrap_or(0.0)
    }

    /// Fraction of rewarded rounds in `[start, len)`.
    pub fn success_rate_from(&self, start: usize) -> f64 {
        let tail = &self.rewards[start.min(self.rewards.len())..];
        if tail.is_empty() {
            return 0.0;
        }
        tail.iter().filter(|&&r| r).count() as f64 / tail.len() as f64
    }
}

/// Plays `policy` on `env` for the environment's full horizon. `rng` feeds only the
/// random policy.
pub fn run_episode<R: Rng + ?Sized>(
    policy: Policy,
    env: &Environment,
    baseline: RegretBaseline,
    rng: &mut R,
) -> Result<RegretTrace> {
    let horizon = env.horizon();
    let schedule = env.schedule();
    let mut state = policy.new_state(env.arms())?;
    let mut selector = Selector::new(policy);
    let static_arm = match baseline {
        RegretBaseline::Dynamic => None,
        RegretBaseline::Static => {
            let totals = (0..env.arms()).map(|a| (0..horizon).map(|t| schedule.means_at(t)[a]).sum::<f64>());
            Some(argmax(totals))
        }
    };
    let n = horizon as usize;
    let mut trace = RegretTrace {
        arms: Vec::with_capacity(n),
        rewards: Vec::with_capacity(n),
        oracle_means: Vec::with_capacity(n),
        cumulative_regret: Vec::with_capacity(n),
    };
    let mut regret = 0.0;
    for t in 0..horizon {
        let means = schedule.means_at(t);
        let arm = selector.select(&state, means, rng);
        let reward = env.reward(t, arm);
        state.update(arm, reward);
        let reference = match static_arm {
            Some(a) => means[a],
            None => schedule.best_mean_at(t),
        };
        regret += reference - means[arm];
        trace.arms.push(arm as u8);
        trace.rewards.push(reward);
        trace.oracle_means.push(reference);
        trace.cumulative_regret.push(regret);
    }
    Ok(trace)
}

/// Round-by-round average of cumulative regret over equally long traces.
pub fn average_regret(traces: &[RegretTrace]) -> Result<Vec<f64>> {
    let first = traces
        .first()
        .ok_or_else(|| Error::EmptyResults("no regret traces to average".into()))?;
    let n = first.len();
    if traces.iter().any(|t| t.len() != n) {
        return Err(Error::invalid("traces", "traces differ in length"));
    }
    let mut avg = vec![0.0; n];
    for tr in traces {
        for (a, r) in avg.iter_mut().zip(&tr.cumulative_regret) {
            *a += r;
        }
    }
    let k = traces.len() as f64;
    avg.iter_mut().for_each(|a| *a /= k);
    Ok(avg)
}
