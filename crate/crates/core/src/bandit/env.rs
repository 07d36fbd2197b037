use rand::Rng;

use crate::error::{Error, Result};
use crate::relay_sim::{Mode, SlotOutcome};
use crate::rng::SeedPath;

/// Seed of the shipped ten-segment schedule.
pub const CANONICAL_SCHEDULE_SEED: u64 = 20_190_601;
pub const CANONICAL_SEGMENTS: usize = 10;
pub const CANONICAL_SEGMENT_LEN: u64 = 1_000;
/// Smallest gap between the two arm means in a shipped segment.
pub const CANONICAL_MIN_GAP: f64 = 0.1;

/// Piecewise-constant arm means. Segment `k` starts at round `breakpoints[k]` (zero-based).
#[derive(Debug, Clone, PartialEq)]
pub struct ArmSchedule {
    breakpoints: Vec<u64>,
    means: Vec<Vec<f64>>,
}

impl ArmSchedule {
    pub fn new(breakpoints: Vec<u64>, means: Vec<Vec<f64>>) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != means.len() {
            return Err(Error::invalid("schedule", "need one mean vector per segment"));
        }
        if breakpoints[0] != 0 {
            return Err(Error::invalid("schedule", "first segment must start at round 0"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("schedule", "breakpoints must be strictly increasing"));
        }
        let arms = means[0].len();
        if arms == 0 {
            return Err(Error::invalid("schedule", "need at least one arm"));
        }
        for m in &means {
            if m.len() != arms {
                return Err(Error::invalid("schedule", "every segment needs the same number of arms"));
            }
            if m.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::invalid("schedule", format!("means must lie in [0, 1], got {m:?}")));
            }
        }
        Ok(ArmSchedule { breakpoints, means })
    }

    pub fn stationary(means: Vec<f64>) -> Result<Self> {
        ArmSchedule::new(vec![0], vec![means])
    }

    /// Ten segments of 1000 rounds with two arms. Means are uniform on [0.1, 0.9]; the better
    /// arm alternates between segments and leads by at least [`CANONICAL_MIN_GAP`].
    pub fn canonical() -> Self {
        ArmSchedule::generate(CANONICAL_SCHEDULE_SEED, CANONICAL_SEGMENTS, CANONICAL_SEGMENT_LEN)
    }

    /// Same construction as [`ArmSchedule::canonical`] with a different seed or shape.
    pub fn generate(seed: u64, segments: usize, segment_len: u64) -> Self {
        let mut rng = SeedPath::new(seed).child(crate::rng::label::SCHEDULE).rng();
        let mut means = Vec::with_capacity(segments);
        for k in 0..segments {
            let (lo, hi) = loop {
                let a = rng.random_range(0.1..0.9);
                let b = rng.random_range(0.1..0.9);
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                if hi - lo >= CANONICAL_MIN_GAP {
                    break (lo, hi);
                }
            };
            means.push(if k % 2 == 0 { vec![hi, lo] } else { vec![lo, hi] });
        }
        let breakpoints = (0..segments as u64).map(|k| k * segment_len.max(1)).collect();
        ArmSchedule { breakpoints, means }
    }

    pub fn arms(&self) -> usize {
        self.means[0].len()
    }

    pub fn segments(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn breakpoints(&self) -> &[u64] {
        &self.breakpoints
    }

    pub fn segment_means(&self, segment: usize) -> &[f64] {
        &self.means[segment]
    }

    pub fn segment_of(&self, round: u64) -> usize {
        self.breakpoints.partition_point(|&b| b <= round) - 1
    }

    /// True means in zero-based `round`.
    pub fn means_at(&self, round: u64) -> &[f64] {
        &self.means[self.segment_of(round)]
    }

    pub fn best_mean_at(&self, round: u64) -> f64 {
        self.means_at(round).iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// A bandit environment with every reward drawn up front, so that policies raced on the same
/// environment see the same reward for the same (round, arm).
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    schedule: ArmSchedule,
    horizon: u64,
    rewards: Vec<bool>,
}

impl Environment {
    /// Bernoulli rewards: arm `a` pays in round `t` iff `U[t][a] < mean`.
    pub fn bernoulli<R: Rng + ?Sized>(schedule: ArmSchedule, horizon: u64, rng: &mut R) -> Result<Self> {
        check_horizon(horizon)?;
        let arms = schedule.arms();
        let mut rewards = Vec::with_capacity(horizon as usize * arms);
        for t in 0..horizon {
            let means = schedule.means_at(t);
            for &p in means {
                rewards.push(rng.random::<f64>() < p);
            }
        }
        Ok(Environment {
            schedule,
            horizon,
            rewards,
        })
    }

    /// Rewards taken from simulated relay slots: arm `a` in round `t` pays iff mode `a`
    /// succeeds in slot `t`. `means` are the per-mode success probabilities used for regret.
    pub fn from_slots(slots: &[SlotOutcome], means: [f64; 2]) -> Result<Self> {
        let horizon = slots.len() as u64;
        check_horizon(horizon)?;
        let rewards = slots
            .iter()
            .flat_map(|o| Mode::ALL.map(|m| o.success(m)))
            .collect();
        Ok(Environment {
            schedule: ArmSchedule::stationary(means.to_vec())?,
            horizon,
            rewards,
        })
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn arms(&self) -> usize {
        self.schedule.arms()
    }

    pub fn schedule(&self) -> &ArmSchedule {
        &self.schedule
    }

    pub fn reward(&self, round: u64, arm: usize) -> bool {
        self.rewards[round as usize * self.arms() + arm]
    }
}

fn check_horizon(horizon: u64) -> Result<()> {
    if horizon < 2 {
        return Err(Error::invalid("horizon", format!("need at least 2 rounds, got {horizon}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_schedule_shape() {
        let s = ArmSchedule::canonical();
        assert_eq!(s.segments(), 10);
        assert_eq!(s.arms(), 2);
        assert_eq!(s.breakpoints()[9], 9000);
        for k in 0..10 {
            let m = s.segment_means(k);
            let best = if m[0] > m[1] { 0 } else { 1 };
            assert_eq!(best, k % 2);
            assert!((m[0] - m[1]).abs() >= CANONICAL_MIN_GAP);
            assert!(m.iter().all(|p| (0.1..0.9).contains(p)));
        }
        assert_eq!(s, ArmSchedule::canonical());
    }

    #[test]
    fn segment_lookup() {
        let s = ArmSchedule::new(vec![0, 10, 25], vec![vec![0.1], vec![0.2], vec![0.3]]).unwrap();
        assert_eq!(s.segment_of(0), 0);
        assert_eq!(s.segment_of(9), 0);
        assert_eq!(s.segment_of(10), 1);
        assert_eq!(s.segment_of(24), 1);
        assert_eq!(s.segment_of(10_000), 2);
        assert_eq!(s.best_mean_at(12), 0.2);
    }

    #[test]
    fn rejects_bad_schedules() {
        assert!(ArmSchedule::new(vec![0, 0], vec![vec![0.1], vec![0.2]]).is_err());
        assert!(ArmSchedule::new(vec![1], vec![vec![0.1]]).is_err());
        assert!(ArmSchedule::new(vec![0], vec![vec![1.1]]).is_err());
        assert!(ArmSchedule::new(vec![0, 5], vec![vec![0.1], vec![0.2, 0.3]]).is_err());
        let mut rng = SeedPath::new(1).rng();
        assert!(Environment::bernoulli(ArmSchedule::stationary(vec![0.5]).unwrap(), 1, &mut rng).is_err());
    }

    #[test]
    fn bernoulli_rewards_follow_means() {
        let mut rng = SeedPath::new(3).rng();
        let s = ArmSchedule::new(vec![0, 20_000], vec![vec![0.2, 0.7], vec![0.9, 0.0]]).unwrap();
        let env = Environment::bernoulli(s, 40_000, &mut rng).unwrap();
        let rate = |arm, range: std::ops::Range<u64>| {
            let n = range.end - range.start;
            range.filter(|&t| env.reward(t, arm)).count() as f64 / n as f64
        };
        assert!((rate(0, 0..20_000) - 0.2).abs() < 0.012);
        assert!((rate(1, 0..20_000) - 0.7).abs() < 0.012);
        assert!((rate(0, 20_000..40_000) - 0.9).abs() < 0.012);
        assert_eq!(rate(1, 20_000..40_000), 0.0);
    }
}
