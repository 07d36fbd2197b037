//! The three experiments: success probability against interferer density, against storage
//! capacity, and the nonstationary bandit race.

use rand::Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, ExperimentId, SweepVariable};
use crate::analytic::{AnalyticModel, SuccessTerms};
use crate::bandit::{run_episode, ArmSchedule, Environment, Policy};
use crate::error::{Error, Result};
use crate::relay_sim::{estimate_success_probs, simulate_slots, Mode, Proportion, SuccessEstimate};
use crate::rng::label;

/// Estimator names used in the `estimator` column.
pub mod estimator {
    pub const ACTIVE_MC: &str = "active_mc";
    pub const PASSIVE_MC: &str = "passive_mc";
    pub const OPTIMAL_MC: &str = "optimal_mc";
    pub const OPTIMAL_ANALYTIC: &str = "optimal_analytic";
    pub const RANDOM_MC: &str = "random_mc";
    pub const BANDIT: &str = "bandit";
    pub const TERM_ACTIVE_MC: &str = "term_active_mc";
    pub const TERM_PASSIVE_RESCUE_MC: &str = "term_passive_rescue_mc";
    pub const TERM_PASSIVE_ONLY_MC: &str = "term_passive_only_mc";
    pub const TERM_ACTIVE_ANALYTIC: &str = "term_active_analytic";
    pub const TERM_PASSIVE_RESCUE_ANALYTIC: &str = "term_passive_rescue_analytic";
    pub const TERM_PASSIVE_ONLY_ANALYTIC: &str = "term_passive_only_analytic";
}

/// One estimate at one sweep value. `replications` counts slots for per-slot estimators,
/// episodes for the bandit, and is 1 for closed-form values.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub sweep_value: f64,
    pub estimator: &'static str,
    pub estimate: f64,
    pub std_error: f64,
    pub replications: u64,
}

impl ResultRow {
    fn mc(sweep_value: f64, estimator: &'static str, p: Proportion) -> Self {
        ResultRow {
            sweep_value,
            estimator,
            estimate: p.mean(),
            std_error: p.std_error(),
            replications: p.trials,
        }
    }

    fn exact(sweep_value: f64, estimator: &'static str, value: f64) -> Self {
        ResultRow {
            sweep_value,
            estimator,
            estimate: value,
            std_error: 0.0,
            replications: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub variable: SweepVariable,
    pub rows: Vec<ResultRow>,
}

impl SweepTable {
    pub fn get(&self, sweep_value: f64, estimator: &str) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.sweep_value == sweep_value && r.estimator == estimator)
    }

    /// Distinct sweep values in table order.
    pub fn sweep_values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = Vec::new();
        for r in &self.rows {
            if v.last() != Some(&r.sweep_value) {
                v.push(r.sweep_value);
            }
        }
        v
    }
}

/// Averaged regret of one policy, one entry per round.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretCurve {
    pub policy: &'static str,
    pub mean: Vec<f64>,
    pub std_error: Vec<f64>,
    pub replications: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegretTable {
    pub schedule: ArmSchedule,
    pub horizon: u64,
    pub curves: Vec<RegretCurve>,
}

impl RegretTable {
    pub fn curve(&self, policy: &str) -> Option<&RegretCurve> {
        self.curves.iter().find(|c| c.policy == policy)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ResultTable {
    Sweep(SweepTable),
    Regret(RegretTable),
}

/// Runs `f` on a dedicated pool of `threads` workers, or on the global pool.
pub fn with_threads<T, F>(threads: Option<usize>, f: F) -> Result<T>
where
    T: Send,
    F: FnOnce() -> Result<T> + Send,
{
    match threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config("run.threads", e.to_string()))?
            .install(f),
    }
}

fn require_sweep(config: &ExperimentConfig, variable: SweepVariable) -> Result<&[f64]> {
    match &config.sweep {
        Some(s) if s.variable == variable => Ok(&s.grid),
        Some(s) => Err(Error::config(
            "sweep.variable",
            format!("{} sweeps {}, got {}", config.id.name(), variable.name(), s.variable.name()),
        )),
        None => Err(Error::config("sweep", format!("{} needs a sweep", config.id.name()))),
    }
}

/// Success probability against interferer density.
pub fn run_fig2(config: &ExperimentConfig) -> Result<SweepTable> {
    require_sweep(config, SweepVariable::Zeta)?;
    run_sweep(config)
}

/// Success probability against storage capacity.
pub fn run_fig3(config: &ExperimentConfig) -> Result<SweepTable> {
    require_sweep(config, SweepVariable::EStorage)?;
    run_sweep(config)
}

/// Every grid point uses the same slot, coin and policy streams, so neighbouring points
/// differ only through the swept parameter.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepTable> {
    config.validate()?;
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| Error::config("sweep", "no sweep configured"))?;
    with_threads(config.threads, || {
        let mut rows = Vec::new();
        for &value in &sweep.grid {
            let params = sweep.variable.apply(&config.params, value);
            rows.extend(sweep_point(config, &params, value)?);
        }
        Ok(SweepTable {
            variable: sweep.variable,
            rows,
        })
    })
}

fn sweep_point(config: &ExperimentConfig, params: &crate::params::SystemParams, value: f64) -> Result<Vec<ResultRow>> {
    use estimator::*;
    let root = config.stream_root();
    let reps = config.replications;
    let horizon = config.horizon;
    let total = config.n_slots.max(reps * horizon);
    let slots = simulate_slots(params, root.child(label::SLOTS), 0..total)?;
    let mc = SuccessEstimate::from_outcomes(params, &slots[..config.n_slots as usize]);

    let mut coin = root.child(label::COIN).rng();
    let random = Proportion::from_flags(
        slots[..config.n_slots as usize]
            .iter()
            .map(|o| o.success(Mode::from_arm(coin.random_range(0..2)))),
    );

    let means = [mc.active.mean(), mc.passive.mean()];
    let policy = config.bandit.discounted_kl_ucb();
    let tail_start = horizon as usize - ((horizon as f64 * config.bandit.tail_fraction).round() as usize).max(1);
    let tail_rates: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let lo = (r * horizon) as usize;
            let env = Environment::from_slots(&slots[lo..lo + horizon as usize], means)?;
            let mut rng = root.child(label::POLICY).child(r).rng();
            let trace = run_episode(policy, &env, config.bandit.baseline, &mut rng)?;
            Ok(trace.success_rate_from(tail_start))
        })
        .collect::<Result<_>>()?;
    let bandit_mean = tail_rates.iter().sum::<f64>() / reps as f64;
    let bandit_se = if reps > 1 {
        let var = tail_rates.iter().map(|x| (x - bandit_mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        (var / reps as f64).sqrt()
    } else {
        let n = (horizon as usize - tail_start) as f64;
        (bandit_mean * (1.0 - bandit_mean) / n).sqrt()
    };

    let model = AnalyticModel::with_options(*params, config.quadrature, config.analytic_saturation)?;
    let terms: SuccessTerms = model.evaluate()?;

    Ok(vec![
        ResultRow::mc(value, ACTIVE_MC, mc.active),
        ResultRow::mc(value, PASSIVE_MC, mc.passive),
        ResultRow::mc(value, OPTIMAL_MC, mc.optimal),
        ResultRow::exact(value, OPTIMAL_ANALYTIC, terms.total),
        ResultRow::mc(value, RANDOM_MC, random),
        ResultRow {
            sweep_value: value,
            estimator: BANDIT,
            estimate: bandit_mean,
            std_error: bandit_se,
            replications: reps,
        },
        ResultRow::mc(value, TERM_ACTIVE_MC, mc.term_active),
        ResultRow::mc(value, TERM_PASSIVE_RESCUE_MC, mc.term_passive_rescue),
        ResultRow::mc(value, TERM_PASSIVE_ONLY_MC, mc.term_passive_only),
        ResultRow::exact(value, TERM_ACTIVE_ANALYTIC, terms.active),
        ResultRow::exact(value, TERM_PASSIVE_RESCUE_ANALYTIC, terms.passive_rescue),
        ResultRow::exact(value, TERM_PASSIVE_ONLY_ANALYTIC, terms.passive_only),
    ])
}

/// Schedule raced in the nonstationary experiment: the shipped ten segments stretched to the horizon.
pub fn race_schedule(horizon: u64) -> ArmSchedule {
    use crate::bandit::env::{CANONICAL_SCHEDULE_SEED, CANONICAL_SEGMENTS};
    let segments = CANONICAL_SEGMENTS as u64;
    ArmSchedule::generate(CANONICAL_SCHEDULE_SEED, CANONICAL_SEGMENTS, horizon.div_ceil(segments))
}

/// Races the configured policies on shared reward tables.
pub fn run_fig4(config: &ExperimentConfig) -> Result<RegretTable> {
    run_race(config, &race_schedule(config.horizon), &config.bandit.race())
}

/// Races `policies` on `schedule`. Replication `r` draws one reward table that every policy
/// plays, and each policy's own randomness comes from a stream indexed by `(r, policy)`.
pub fn run_race(config: &ExperimentConfig, schedule: &ArmSchedule, policies: &[Policy]) -> Result<RegretTable> {
    config.validate()?;
    let root = config.stream_root();
    let horizon = config.horizon;
    let reps = config.replications;
    let per_rep: Vec<Vec<Vec<f64>>> = with_threads(config.threads, || {
        (0..reps)
            .into_par_iter()
            .map(|r| {
                let env = Environment::bernoulli(schedule.clone(), horizon, &mut root.child(label::REWARDS).child(r).rng())?;
                policies
                    .iter()
                    .enumerate()
                    .map(|(k, p)| {
                        let mut rng = root.child(label::POLICY).child(r).child(k as u64).rng();
                        Ok(run_episode(*p, &env, config.bandit.baseline, &mut rng)?.cumulative_regret)
                    })
                    .collect()
            })
            .collect()
    })?;

    let n = horizon as usize;
    let curves = policies
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let mut sum = vec![0.0; n];
            let mut sum_sq = vec![0.0; n];
            for rep in &per_rep {
                for (t, v) in rep[k].iter().enumerate() {
                    sum[t] += v;
                    sum_sq[t] += v * v;
                }
            }
            let m = reps as f64;
            let mean: Vec<f64> = sum.iter().map(|s| s / m).collect();
            let std_error = if reps > 1 {
                sum_sq
                    .iter()
                    .zip(&mean)
                    .map(|(sq, mu)| ((sq - m * mu * mu).max(0.0) / (m - 1.0) / m).sqrt())
                    .collect()
            } else {
                vec![0.0; n]
            };
            RegretCurve {
                policy: p.name(),
                mean,
                std_error,
                replications: reps,
            }
        })
        .collect();
    Ok(RegretTable {
        schedule: schedule.clone(),
        horizon,
        curves,
    })
}

/// Runs the experiment named by `config.id`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultTable> {
    match config.id {
        ExperimentId::Fig2 => run_fig2(config).map(ResultTable::Sweep),
        ExperimentId::Fig3 => run_fig3(config).map(ResultTable::Sweep),
        ExperimentId::Fig4 => run_fig4(config).map(ResultTable::Regret),
        ExperimentId::Custom => run_sweep(config).map(ResultTable::Sweep),
    }
}

/// Monte Carlo estimate at the configured parameters.
pub fn run_simulate(config: &ExperimentConfig) -> Result<SuccessEstimate> {
    config.validate()?;
    with_threads(config.threads, || {
        estimate_success_probs(&config.params, config.n_slots, config.stream_root().child(label::SLOTS))
    })
}

/// Closed-form terms at the configured parameters.
pub fn run_analytic(config: &ExperimentConfig) -> Result<SuccessTerms> {
    config.validate()?;
    AnalyticModel::with_options(config.params, config.quadrature, config.analytic_saturation)?.evaluate()
}
