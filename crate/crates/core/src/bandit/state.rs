use crate::error::{Error, Result};

/// Per-arm counters of one policy: raw and discounted pull counts and reward sums.
///
/// Discounting is applied lazily. Each arm keeps its discounted sums as of the last round it
/// was touched; reading them multiplies by `gamma^(rounds since)`, which equals multiplying
/// every arm by `gamma` each round. The discounted mean is a ratio and is unaffected.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyState {
    pulls: Vec<u64>,
    rewards: Vec<u64>,
    disc_pulls: Vec<f64>,
    disc_rewards: Vec<f64>,
    touched: Vec<u64>,
    round: u64,
    gamma: f64,
}

impl PolicyState {
    pub fn new(arms: usize, gamma: f64) -> Result<Self> {
        if arms == 0 {
            return Err(Error::invalid("arms", "need at least one arm"));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::invalid("gamma", format!("discount must lie in (0, 1], got {gamma}")));
        }
        Ok(PolicyState {
            pulls: vec![0; arms],
            rewards: vec![0; arms],
            disc_pulls: vec![0.0; arms],
            disc_rewards: vec![0.0; arms],
            touched: vec![0; arms],
            round: 0,
            gamma,
        })
    }

    pub fn arms(&self) -> usize {
        self.pulls.len()
    }

    /// Completed rounds.
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn pulls(&self, arm: usize) -> u64 {
        self.pulls[arm]
    }

    pub fn reward_sum(&self, arm: usize) -> u64 {
        self.rewards[arm]
    }

    fn decay_since(&self, arm: usize) -> f64 {
        if self.gamma == 1.0 {
            1.0
        } else {
            self.gamma.powf((self.round - self.touched[arm]) as f64)
        }
    }

    pub fn discounted_pulls(&self, arm: usize) -> f64 {
        self.disc_pulls[arm] * self.decay_since(arm)
    }

    pub fn discounted_rewards(&self, arm: usize) -> f64 {
        self.disc_rewards[arm] * self.decay_since(arm)
    }

    /// Sum of discounted pull counts over all arms.
    pub fn discounted_total(&self) -> f64 {
        (0..self.arms()).map(|a| self.discounted_pulls(a)).sum()
    }

    pub fn empirical_mean(&self, arm: usize) -> Result<f64> {
        match self.pulls[arm] {
            0 => Err(Error::UnplayedArm { arm }),
            n => Ok(self.rewards[arm] as f64 / n as f64),
        }
    }

    pub fn discounted_mean(&self, arm: usize) -> Result<f64> {
        if self.pulls[arm] == 0 || self.disc_pulls[arm] == 0.0 {
            return Err(Error::UnplayedArm { arm });
        }
        Ok(self.disc_rewards[arm] / self.disc_pulls[arm])
    }

    /// Records one round in which `arm` was played and paid `reward`.
    pub fn update(&mut self, arm: usize, reward: bool) {
        self.round += 1;
        let scale = if self.gamma == 1.0 {
            1.0
        } else {
            self.gamma.powf((self.round - self.touched[arm]) as f64)
        };
        let x = f64::from(u8::from(reward));
        self.disc_pulls[arm] = self.disc_pulls[arm] * scale + 1.0;
        self.disc_rewards[arm] = self.disc_rewards[arm] * scale + x;
        self.touched[arm] = self.round;
        self.pulls[arm] += 1;
        self.rewards[arm] += u64::from(reward);
    }
}
