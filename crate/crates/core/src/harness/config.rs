//! Experiment configuration: built-in defaults per experiment, a TOML file with named
//! sections, and command-line overrides applied last.
//!
//! ```toml
//! [params]
//! zeta = 1e-3
//! tau_passive_db = 20
//! p_carrier_dbm = 40
//!
//! [sweep]
//! grid = [1e-4, 1e-3, 1e-2]
//!
//! [run]
//! seed = 7
//! slots = 200000
//! replications = 20
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::analytic::QuadratureSpec;
use crate::bandit::{Policy, RegretBaseline};
use crate::error::{Error, Result};
use crate::params::{db_to_linear, dbm_to_watts, SaturationRule, SystemParams};

pub const DEFAULT_SEED: u64 = 2019;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentId {
    Fig2,
    Fig3,
    Fig4,
    Custom,
}

impl ExperimentId {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentId::Fig2 => "fig2",
            ExperimentId::Fig3 => "fig3",
            ExperimentId::Fig4 => "fig4",
            ExperimentId::Custom => "custom",
        }
    }

    pub fn label(&self) -> u64 {
        use crate::rng::label;
        match self {
            ExperimentId::Fig2 => label::FIG2,
            ExperimentId::Fig3 => label::FIG3,
            ExperimentId::Fig4 => label::FIG4,
            ExperimentId::Custom => label::CUSTOM,
        }
    }
}

/// Parameter swept by the probability experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Zeta,
    EStorage,
}

impl SweepVariable {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVariable::Zeta => "zeta",
            SweepVariable::EStorage => "e_storage",
        }
    }

    pub fn apply(&self, params: &SystemParams, value: f64) -> SystemParams {
        let mut p = *params;
        match self {
            SweepVariable::Zeta => p.zeta = value,
            SweepVariable::EStorage => p.e_storage = value,
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub grid: Vec<f64>,
}

/// Hyperparameters of the bandit policies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BanditConfig {
    pub gamma: f64,
    pub canonical_discount: bool,
    pub etc_pulls: u64,
    /// Fraction of the horizon, counted from the end, over which the bandit success rate is read.
    pub tail_fraction: f64,
    pub baseline: RegretBaseline,
}

impl Default for BanditConfig {
    fn default() -> Self {
        BanditConfig {
            gamma: 0.9,
            canonical_discount: false,
            etc_pulls: 100,
            tail_fraction: 0.5,
            baseline: RegretBaseline::Dynamic,
        }
    }
}

impl BanditConfig {
    pub fn discounted_kl_ucb(&self) -> Policy {
        Policy::DiscountedKlUcb {
            gamma: self.gamma,
            canonical: self.canonical_discount,
        }
    }

    /// Policies raced in the nonstationary experiment, in output order.
    pub fn race(&self) -> Vec<Policy> {
        vec![
            Policy::Ucb,
            Policy::ExploreThenCommit { m: self.etc_pulls },
            Policy::Random,
            Policy::KlUcb,
            Policy::DiscountedUcb { gamma: self.gamma },
            self.discounted_kl_ucb(),
            Policy::Oracle,
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub id: ExperimentId,
    pub params: SystemParams,
    pub sweep: Option<Sweep>,
    /// Monte Carlo slots per grid point.
    pub n_slots: u64,
    pub replications: u64,
    /// Rounds per bandit episode.
    pub horizon: u64,
    pub bandit: BanditConfig,
    pub analytic_saturation: SaturationRule,
    pub quadrature: QuadratureSpec,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect()
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

impl ExperimentConfig {
    /// Built-in defaults for `id`.
    pub fn defaults(id: ExperimentId) -> Self {
        let sweep = match id {
            ExperimentId::Fig2 => Some(Sweep {
                variable: SweepVariable::Zeta,
                grid: log_grid(1e-4, 1e-2, 7),
            }),
            // 2.5e-4 J sits below the active/passive crossover near 4e-4 J
            ExperimentId::Fig3 => Some(Sweep {
                variable: SweepVariable::EStorage,
                grid: std::iter::once(2.5e-4).chain(linear_grid(5e-4, 5e-3, 10)).collect(),
            }),
            ExperimentId::Fig4 | ExperimentId::Custom => None,
        };
        ExperimentConfig {
            id,
            params: SystemParams::default(),
            sweep,
            n_slots: 200_000,
            replications: if id == ExperimentId::Fig4 { 50 } else { 20 },
            horizon: 10_000,
            bandit: BanditConfig::default(),
            analytic_saturation: SaturationRule::StorageAfterCircuit,
            quadrature: QuadratureSpec::default(),
            seed: DEFAULT_SEED,
            out_dir: PathBuf::from("results"),
            threads: None,
        }
    }

    /// Defaults overridden by the TOML file at `path`.
    pub fn from_file(id: ExperimentId, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(id, &text)
    }

    pub fn from_toml(id: ExperimentId, text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .map(|s| format!("bytes {}..{}", s.start, s.end))
                .unwrap_or_else(|| "file".into());
            Error::config(field, e.message().to_string())
        })?;
        let mut cfg = Self::defaults(id);
        raw.apply(&mut cfg)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn stream_root(&self) -> crate::rng::SeedPath {
        crate::rng::SeedPath::new(self.seed).child(self.id.label())
    }

    pub fn validate(&self) -> Result<()> {
        self.params
            .validate()
            .map_err(|e| Error::config(param_field(&e), e.to_string()))?;
        self.quadrature
            .validate()
            .map_err(|e| Error::config("analytic", e.to_string()))?;
        if self.n_slots == 0 {
            return Err(Error::config("run.slots", "must be at least 1"));
        }
        if self.replications == 0 {
            return Err(Error::config("run.replications", "must be at least 1"));
        }
        if self.horizon < 2 {
            return Err(Error::config("run.horizon", "must be at least 2"));
        }
        let b = &self.bandit;
        if !(b.gamma > 0.0 && b.gamma <= 1.0) {
            return Err(Error::config("bandit.gamma", format!("must lie in (0, 1], got {}", b.gamma)));
        }
        if b.etc_pulls == 0 {
            return Err(Error::config("bandit.etc_pulls", "must be at least 1"));
        }
        if !(b.tail_fraction > 0.0 && b.tail_fraction <= 1.0) {
            return Err(Error::config(
                "bandit.tail_fraction",
                format!("must lie in (0, 1], got {}", b.tail_fraction),
            ));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.grid.is_empty() {
                return Err(Error::config("sweep.grid", "must not be empty"));
            }
            if sweep.grid.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::config("sweep.grid", "must be strictly increasing"));
            }
            for &v in &sweep.grid {
                sweep
                    .variable
                    .apply(&self.params, v)
                    .validate()
                    .map_err(|e| Error::config("sweep.grid", format!("value {v}: {e}")))?;
                if sweep.variable == SweepVariable::EStorage && v <= self.params.e_active {
                    return Err(Error::config(
                        "sweep.grid",
                        format!("storage energy {v} must exceed the active circuit energy {}", self.params.e_active),
                    ));
                }
            }
        }
        if self.threads == Some(0) {
            return Err(Error::config("run.threads", "must be at least 1"));
        }
        Ok(())
    }
}

fn param_field(e: &Error) -> String {
    match e {
        Error::InvalidParameter { field, .. } => format!("params.{field}"),
        _ => "params".into(),
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    params: RawParams,
    #[serde(default)]
    sweep: RawSweep,
    #[serde(default)]
    run: RawRun,
    #[serde(default)]
    bandit: RawBandit,
    #[serde(default)]
    analytic: RawAnalytic,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    d_sr: Option<f64>,
    d_rd: Option<f64>,
    p_interferer: Option<f64>,
    p_interferer_dbm: Option<f64>,
    p_carrier: Option<f64>,
    p_carrier_dbm: Option<f64>,
    zeta: Option<f64>,
    zeta_carrier: Option<f64>,
    p_source: Option<f64>,
    e_active: Option<f64>,
    e_passive: Option<f64>,
    e_storage: Option<f64>,
    alpha: Option<f64>,
    alpha_carrier: Option<f64>,
    beta: Option<f64>,
    gamma_reflect: Option<f64>,
    eta: Option<f64>,
    xi: Option<f64>,
    sigma2: Option<f64>,
    sigma2_passive: Option<f64>,
    tau_active: Option<f64>,
    tau_active_db: Option<f64>,
    tau_passive: Option<f64>,
    tau_passive_db: Option<f64>,
    r_max: Option<f64>,
    saturation: Option<SaturationRule>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    variable: Option<SweepVariable>,
    grid: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    seed: Option<u64>,
    slots: Option<u64>,
    replications: Option<u64>,
    horizon: Option<u64>,
    out: Option<PathBuf>,
    threads: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBandit {
    gamma: Option<f64>,
    canonical_discount: Option<bool>,
    etc_pulls: Option<u64>,
    tail_fraction: Option<f64>,
    static_regret: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAnalytic {
    saturation: Option<SaturationRule>,
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    max_subdivisions: Option<usize>,
    inverse_nodes: Option<usize>,
}

/// Picks the linear value or the converted decibel value; both at once is an error.
fn either(field: &str, linear: Option<f64>, db: Option<f64>, convert: fn(f64) -> f64) -> Result<Option<f64>> {
    match (linear, db) {
        (Some(_), Some(_)) => Err(Error::config(
            format!("params.{field}"),
            "given both in linear and in decibel form",
        )),
        (Some(v), None) => Ok(Some(v)),
        (None, Some(d)) => Ok(Some(convert(d))),
        (None, None) => Ok(None),
    }
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

impl RawConfig {
    fn apply(self, cfg: &mut ExperimentConfig) -> Result<()> {
        let p = &mut cfg.params;
        let r = self.params;
        set(&mut p.d_sr, r.d_sr);
        set(&mut p.d_rd, r.d_rd);
        set(&mut p.p_interferer, either("p_interferer", r.p_interferer, r.p_interferer_dbm, dbm_to_watts)?);
        set(&mut p.p_carrier, either("p_carrier", r.p_carrier, r.p_carrier_dbm, dbm_to_watts)?);
        set(&mut p.zeta, r.zeta);
        set(&mut p.zeta_carrier, r.zeta_carrier);
        set(&mut p.p_source, r.p_source);
        set(&mut p.e_active, r.e_active);
        set(&mut p.e_passive, r.e_passive);
        set(&mut p.e_storage, r.e_storage);
        set(&mut p.alpha, r.alpha);
        set(&mut p.alpha_carrier, r.alpha_carrier);
        set(&mut p.beta, r.beta);
        set(&mut p.gamma_reflect, r.gamma_reflect);
        set(&mut p.eta, r.eta);
        set(&mut p.xi, r.xi);
        set(&mut p.sigma2, r.sigma2);
        set(&mut p.sigma2_passive, r.sigma2_passive);
        set(&mut p.tau_active, either("tau_active", r.tau_active, r.tau_active_db, db_to_linear)?);
        set(&mut p.tau_passive, either("tau_passive", r.tau_passive, r.tau_passive_db, db_to_linear)?);
        set(&mut p.r_max, r.r_max);
        set(&mut p.saturation, r.saturation);

        if self.sweep.variable.is_some() || self.sweep.grid.is_some() {
            let current = cfg.sweep.take();
            let variable = self
                .sweep
                .variable
                .or(current.as_ref().map(|s| s.variable))
                .ok_or_else(|| Error::config("sweep.variable", "this experiment has no default sweep variable"))?;
            let grid = match self.sweep.grid {
                Some(g) => g,
                None => current
                    .filter(|s| s.variable == variable)
                    .map(|s| s.grid)
                    .ok_or_else(|| Error::config("sweep.grid", "a new sweep variable needs a grid"))?,
            };
            cfg.sweep = Some(Sweep { variable, grid });
        }

        set(&mut cfg.seed, self.run.seed);
        set(&mut cfg.n_slots, self.run.slots);
        set(&mut cfg.replications, self.run.replications);
        set(&mut cfg.horizon, self.run.horizon);
        set(&mut cfg.out_dir, self.run.out);
        if self.run.threads.is_some() {
            cfg.threads = self.run.threads;
        }

        let b = &mut cfg.bandit;
        set(&mut b.gamma, self.bandit.gamma);
        set(&mut b.canonical_discount, self.bandit.canonical_discount);
        set(&mut b.etc_pulls, self.bandit.etc_pulls);
        set(&mut b.tail_fraction, self.bandit.tail_fraction);
        if let Some(flag) = self.bandit.static_regret {
            b.baseline = if flag { RegretBaseline::Static } else { RegretBaseline::Dynamic };
        }

        let a = self.analytic;
        set(&mut cfg.analytic_saturation, a.saturation);
        set(&mut cfg.quadrature.rel_tol, a.rel_tol);
        set(&mut cfg.quadrature.abs_tol, a.abs_tol);
        set(&mut cfg.quadrature.max_subdivisions, a.max_subdivisions);
        set(&mut cfg.quadrature.inverse_nodes, a.inverse_nodes);
        Ok(())
    }
}

/// Command-line overrides, applied after the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub replications: Option<u64>,
    pub n_slots: Option<u64>,
    pub gamma: Option<f64>,
    pub canonical_discount: bool,
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn with_overrides(mut self, o: &Overrides) -> Result<Self> {
        set(&mut self.seed, o.seed);
        set(&mut self.out_dir, o.out_dir.clone());
        set(&mut self.replications, o.replications);
        set(&mut self.n_slots, o.n_slots);
        set(&mut self.bandit.gamma, o.gamma);
        if o.canonical_discount {
            self.bandit.canonical_discount = true;
        }
        if o.threads.is_some() {
            self.threads = o.threads;
        }
        self.validate()?;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        for id in [ExperimentId::Fig2, ExperimentId::Fig3, ExperimentId::Fig4, ExperimentId::Custom] {
            ExperimentConfig::defaults(id).validate().unwrap();
        }
        let g = ExperimentConfig::defaults(ExperimentId::Fig2).sweep.unwrap().grid;
        assert_eq!(g.len(), 7);
        assert!((g[0] - 1e-4).abs() < 1e-18 && (g[6] - 1e-2).abs() < 1e-16);
        assert!((g[3] - 1e-3).abs() < 1e-17);
    }

    #[test]
    fn decibel_keys_convert() {
        let cfg = ExperimentConfig::from_toml(
            ExperimentId::Fig2,
            "[params]\ntau_passive_db = 10\np_carrier_dbm = 30\ntau_active_db = 3\n",
        )
        .unwrap();
        assert!((cfg.params.tau_passive - 10.0).abs() < 1e-12);
        assert!((cfg.params.p_carrier - 1.0).abs() < 1e-12);
        assert!((cfg.params.tau_active - 1.995_262_314_968_879_6).abs() < 1e-12);
    }

    #[test]
    fn both_forms_rejected() {
        let err = ExperimentConfig::from_toml(ExperimentId::Fig2, "[params]\ntau_passive = 100\ntau_passive_db = 20\n")
            .unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "params.tau_passive"));
    }

    #[test]
    fn field_errors_are_named() {
        let cases = [
            ("[params]\neta = 1.5\n", "params.eta"),
            ("[sweep]\ngrid = []\n", "sweep.grid"),
            ("[sweep]\ngrid = [1e-3, 1e-4]\n", "sweep.grid"),
            ("[run]\nslots = 0\n", "run.slots"),
            ("[bandit]\ngamma = 0\n", "bandit.gamma"),
            ("[bandit]\ntail_fraction = 2\n", "bandit.tail_fraction"),
        ];
        for (text, field) in cases {
            match ExperimentConfig::from_toml(ExperimentId::Fig2, text) {
                Err(Error::Config { field: f, .. }) => assert_eq!(f, field, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        let e = ExperimentConfig::from_toml(ExperimentId::Fig3, "[sweep]\ngrid = [1e-4, 1e-3]\n").unwrap_err();
        assert!(matches!(e, Error::Config { ref field, .. } if field == "sweep.grid"));
        assert!(ExperimentConfig::from_toml(ExperimentId::Fig2, "[params]\nbogus = 1\n").is_err());
        assert_eq!(
            ExperimentConfig::from_toml(ExperimentId::Fig2, "[run]\nslots = 0\n").unwrap_err().exit_code(),
            2
        );
    }

    #[test]
    fn sweep_override_and_cli() {
        let cfg = ExperimentConfig::from_toml(
            ExperimentId::Custom,
            "[sweep]\nvariable = \"e_storage\"\ngrid = [1e-3, 2e-3]\n[run]\nseed = 11\n",
        )
        .unwrap();
        assert_eq!(cfg.sweep.as_ref().unwrap().variable, SweepVariable::EStorage);
        assert_eq!(cfg.seed, 11);
        let cfg = cfg
            .with_overrides(&Overrides {
                seed: Some(5),
                gamma: Some(0.95),
                canonical_discount: true,
                ..Overrides::default()
            })
            .unwrap();
        assert_eq!(cfg.seed, 5);
        assert_eq!(cfg.bandit.gamma, 0.95);
        assert!(cfg.bandit.canonical_discount);
        let bad = cfg.with_overrides(&Overrides {
            gamma: Some(1.5),
            ..Overrides::default()
        });
        assert!(bad.is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(linear_grid(1.0, 2.0, 3), vec![1.0, 1.5, 2.0]);
        assert_eq!(log_grid(1.0, 100.0, 3), vec![1.0, 10.0, 100.0]);
        assert_eq!(linear_grid(4.0, 9.0, 1), vec![4.0]);
    }
}
