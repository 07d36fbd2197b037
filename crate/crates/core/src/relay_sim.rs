//! One-slot simulation of the hybrid relaying protocol and Monte Carlo success estimates.
//!
//! Each slot is scored under both modes on the same randomness, so any selection policy
//! (fixed mode, coin flip, bandit, full-knowledge oracle) can be replayed on one stream.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::error::Result;
use crate::geometry::{sample_ppp, shot_noise, EmitterClass, PointField};
use crate::params::SystemParams;
use crate::rng::SeedPath;

/// Relay transmit power in active mode for incident carrier power `q_r`.
pub fn transmit_power_active(q_r: f64, params: &SystemParams) -> f64 {
    let e_r = params.harvest_factor() * q_r;
    if e_r < params.e_active {
        return 0.0;
    }
    let cap = params.saturation.saturation_energy(params);
    (2.0 * (e_r.min(cap) - params.e_active) / (1.0 - params.eta)).max(0.0)
}

/// Backscattered power in passive mode.
pub fn backscatter_power(q_r: f64, params: &SystemParams) -> f64 {
    params.gamma_reflect * params.xi * q_r
}

/// All random inputs of one slot.
#[derive(Debug, Clone)]
pub struct SlotDraw {
    pub carriers: PointField,
    pub interferers: PointField,
    /// Fading marks of the interferers towards the destination (same points, independent gains).
    pub interferer_marks_at_destination: PointField,
    pub h_sr: f64,
    pub h_rd: f64,
    pub h_rd_passive: f64,
}

impl SlotDraw {
    /// Fading gains and the carrier field are drawn before the interferer field, so changing
    /// the interferer density leaves everything else on the same sample path.
    pub fn sample<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> Result<Self> {
        let region = params.region()?;
        let h_sr = Exp1.sample(rng);
        let h_rd = Exp1.sample(rng);
        let h_rd_passive = Exp1.sample(rng);
        let carriers = sample_ppp(params.zeta_carrier, region, EmitterClass::CarrierEmitter, rng)?;
        let interferers = sample_ppp(params.zeta, region, EmitterClass::Interferer, rng)?;
        let interferer_marks_at_destination = interferers.with_fresh_marks(rng);
        Ok(SlotDraw {
            carriers,
            interferers,
            interferer_marks_at_destination,
            h_sr,
            h_rd,
            h_rd_passive,
        })
    }
}

/// Per-slot record, evaluated counterfactually for both modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotOutcome {
    /// Incident carrier power at the relay (W).
    pub q_r: f64,
    /// Harvested energy (J).
    pub e_r: f64,
    /// SINR at the relay.
    pub nu_r: f64,
    /// Active-mode transmit power (W).
    pub p_active_tx: f64,
    /// SINR at the destination in active mode.
    pub nu_d_active: f64,
    /// SNR at the destination in passive mode.
    pub nu_d_passive: f64,
    pub success_active: bool,
    pub success_passive: bool,
}

/// Which addend of the success-probability decomposition a slot falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermEvent {
    /// Active mode succeeds.
    Active,
    /// Enough energy for active mode, active fails at the destination, passive succeeds.
    PassiveRescue,
    /// Energy only sufficient for passive mode, and passive succeeds.
    PassiveOnly,
}

impl SlotOutcome {
    pub fn success_optimal(&self) -> bool {
        self.success_active || self.success_passive
    }

    pub fn success(&self, mode: Mode) -> bool {
        match mode {
            Mode::Active => self.success_active,
            Mode::Passive => self.success_passive,
        }
    }

    pub fn term_event(&self, params: &SystemParams) -> Option<TermEvent> {
        let relay_ok = self.nu_r > params.tau_active;
        let passive_ok = self.nu_d_passive > params.tau_passive;
        if self.success_active {
            Some(TermEvent::Active)
        } else if relay_ok && passive_ok && self.e_r > params.e_active && self.nu_d_active <= params.tau_active {
            Some(TermEvent::PassiveRescue)
        } else if relay_ok && passive_ok && self.e_r < params.e_active && self.e_r > params.e_passive {
            Some(TermEvent::PassiveOnly)
        } else {
            None
        }
    }
}

/// Relay transmission mode; also the arm index in the bandit layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Active = 0,
    Passive = 1,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::Active, Mode::Passive];

    pub fn from_arm(arm: usize) -> Mode {
        if arm == 0 {
            Mode::Active
        } else {
            Mode::Passive
        }
    }
}

/// Scores one slot given its random inputs.
pub fn evaluate_slot(params: &SystemParams, draw: &SlotDraw) -> Result<SlotOutcome> {
    let relay = params.relay();
    let destination = params.destination();

    let q_r = shot_noise(&draw.carriers, relay, params.p_carrier, params.alpha_carrier)?;
    let i_r = shot_noise(&draw.interferers, relay, params.p_interferer, params.alpha)?;
    let i_d = shot_noise(
        &draw.interferer_marks_at_destination,
        destination,
        params.p_interferer,
        params.alpha,
    )?;

    let e_r = params.harvest_factor() * q_r;
    let nu_r = params.p_source * draw.h_sr * params.d_sr.powf(-params.alpha) / (i_r + params.sigma2);

    let p_active_tx = transmit_power_active(q_r, params);
    let rd_loss = params.d_rd.powf(-params.alpha);
    let nu_d_active = p_active_tx * draw.h_rd * rd_loss / (i_d + params.sigma2);
    let nu_d_passive = backscatter_power(q_r, params) * draw.h_rd_passive * rd_loss / params.sigma2_passive;

    let relay_ok = nu_r > params.tau_active;
    Ok(SlotOutcome {
        q_r,
        e_r,
        nu_r,
        p_active_tx,
        nu_d_active,
        nu_d_passive,
        success_active: e_r > params.e_active && relay_ok && nu_d_active > params.tau_active,
        success_passive: e_r > params.e_passive && relay_ok && nu_d_passive > params.tau_passive,
    })
}

pub fn simulate_slot<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> Result<SlotOutcome> {
    let draw = SlotDraw::sample(params, rng)?;
    evaluate_slot(params, &draw)
}

/// Slots `range` of the stream rooted at `seeds`; slot `i` always uses substream `i`.
pub fn simulate_slots(
    params: &SystemParams,
    seeds: SeedPath,
    range: std::ops::Range<u64>,
) -> Result<Vec<SlotOutcome>> {
    params.validate()?;
    range
        .into_par_iter()
        .map(|i| simulate_slot(params, &mut seeds.child(i).rng()))
        .collect()
}

/// Bernoulli proportion with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
}

impl Proportion {
    pub fn from_flags(flags: impl IntoIterator<Item = bool>) -> Self {
        let mut p = Proportion::default();
        for f in flags {
            p.push(f);
        }
        p
    }

    pub fn push(&mut self, success: bool) {
        self.trials += 1;
        self.successes += u64::from(success);
    }

    pub fn merge(self, other: Proportion) -> Proportion {
        Proportion {
            successes: self.successes + other.successes,
            trials: self.trials + other.trials,
        }
    }

    pub fn mean(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        let p = self.mean();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// Monte Carlo success probabilities under each mode, the full-knowledge selector,
/// and the three addends of its decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SuccessEstimate {
    pub active: Proportion,
    pub passive: Proportion,
    pub optimal: Proportion,
    pub term_active: Proportion,
    pub term_passive_rescue: Proportion,
    pub term_passive_only: Proportion,
}

impl SuccessEstimate {
    pub fn from_outcomes<'a>(params: &SystemParams, outcomes: impl IntoIterator<Item = &'a SlotOutcome>) -> Self {
        let mut e = SuccessEstimate::default();
        for o in outcomes {
            e.push(params, o);
        }
        e
    }

    fn push(&mut self, params: &SystemParams, o: &SlotOutcome) {
        self.active.push(o.success_active);
        self.passive.push(o.success_passive);
        self.optimal.push(o.success_optimal());
        let term = o.term_event(params);
        self.term_active.push(term == Some(TermEvent::Active));
        self.term_passive_rescue.push(term == Some(TermEvent::PassiveRescue));
        self.term_passive_only.push(term == Some(TermEvent::PassiveOnly));
    }

    fn merge(self, o: SuccessEstimate) -> SuccessEstimate {
        SuccessEstimate {
            active: self.active.merge(o.active),
            passive: self.passive.merge(o.passive),
            optimal: self.optimal.merge(o.optimal),
            term_active: self.term_active.merge(o.term_active),
            term_passive_rescue: self.term_passive_rescue.merge(o.term_passive_rescue),
            term_passive_only: self.term_passive_only.merge(o.term_passive_only),
        }
    }
}

/// Monte Carlo estimate over `n_slots` independent slots.
pub fn estimate_success_probs(params: &SystemParams, n_slots: u64, seeds: SeedPath) -> Result<SuccessEstimate> {
    params.validate()?;
    if n_slots == 0 {
        return Err(crate::error::Error::invalid("n_slots", "must be at least 1"));
    }
    (0..n_slots)
        .into_par_iter()
        .map(|i| simulate_slot(params, &mut seeds.child(i).rng()))
        .try_fold(SuccessEstimate::default, |mut acc, o| {
            acc.push(params, &o?);
            Ok(acc)
        })
        .try_reduce(SuccessEstimate::default, |a, b| Ok(a.merge(b)))
}
