//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every function returns flat `f64` arrays; the page slices and plots them on a canvas.

use relaylab_core::analytic::{AnalyticModel, QrDistribution, QuadratureSpec, ShotNoiseTransform};
use relaylab_core::bandit::Policy;
use relaylab_core::harness::experiments::{race_schedule, run_race};
use relaylab_core::harness::{ExperimentConfig, ExperimentId};
use relaylab_core::params::dbm_to_watts;
use relaylab_core::{Error, Result, SaturationRule, SystemParams};
use wasm_bindgen::prelude::*;

fn js_err(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Looser than the native defaults so a sweep finishes in about a second in the browser.
fn demo_quadrature() -> QuadratureSpec {
    QuadratureSpec::default().with_tolerances(1e-6, 1e-10)
}

/// Density and CDF of the harvested carrier power on `points` log-spaced values spanning
/// four decades either side of the typical value. Layout: `[q..., pdf..., cdf...]`.
#[wasm_bindgen(js_name = harvestedPowerLaw)]
pub fn harvested_power_law_js(
    zeta_carrier: f64,
    p_carrier_dbm: f64,
    alpha_carrier: f64,
    points: usize,
) -> std::result::Result<Vec<f64>, JsError> {
    harvested_power_law(zeta_carrier, p_carrier_dbm, alpha_carrier, points).map_err(js_err)
}

pub fn harvested_power_law(zeta_carrier: f64, p_carrier_dbm: f64, alpha_carrier: f64, points: usize) -> Result<Vec<f64>> {
    let points = points.max(2);
    let tf = ShotNoiseTransform::new(dbm_to_watts(p_carrier_dbm), zeta_carrier, alpha_carrier)?;
    let dist = QrDistribution::new(tf, &QuadratureSpec::default())?;
    let q_bar = dist.q_bar();
    if q_bar == 0.0 {
        return Err(Error::Domain("no carrier emitters: the harvested power is identically zero".into()));
    }
    let q: Vec<f64> = (0..points)
        .map(|i| q_bar * 10f64.powf(-4.0 + 8.0 * i as f64 / (points - 1) as f64))
        .collect();
    let mut out = q.clone();
    for &x in &q {
        out.push(dist.pdf(x)?);
    }
    for &x in &q {
        out.push(dist.cdf(x)?);
    }
    Ok(out)
}

/// Closed-form success probability against interferer density on a log grid.
/// Layout: `[zeta..., active..., passive_rescue..., passive_only..., total...]`.
#[wasm_bindgen(js_name = successVsDensity)]
pub fn success_vs_density_js(
    zeta_lo: f64,
    zeta_hi: f64,
    points: usize,
    e_storage: f64,
) -> std::result::Result<Vec<f64>, JsError> {
    success_vs_density(zeta_lo, zeta_hi, points, e_storage).map_err(js_err)
}

pub fn success_vs_density(zeta_lo: f64, zeta_hi: f64, points: usize, e_storage: f64) -> Result<Vec<f64>> {
    if !(zeta_lo > 0.0 && zeta_hi > zeta_lo) {
        return Err(Error::Domain(format!("need 0 < zeta_lo < zeta_hi, got {zeta_lo} and {zeta_hi}")));
    }
    let points = points.max(2);
    let base = SystemParams {
        e_storage,
        ..SystemParams::default()
    };
    let zetas: Vec<f64> = (0..points)
        .map(|i| zeta_lo * (zeta_hi / zeta_lo).powf(i as f64 / (points - 1) as f64))
        .collect();
    let mut cols: Vec<Vec<f64>> = (0..4).map(|_| Vec::with_capacity(points)).collect();
    for &zeta in &zetas {
        let params = SystemParams { zeta, ..base };
        let t = AnalyticModel::with_options(params, demo_quadrature(), SaturationRule::StorageAfterCircuit)?.evaluate()?;
        for (col, v) in cols.iter_mut().zip([t.active, t.passive_rescue, t.passive_only, t.total]) {
            col.push(v);
        }
    }
    Ok(zetas.into_iter().chain(cols.into_iter().flatten()).collect())
}

/// Policy names in the order `regret_race` returns their curves.
#[wasm_bindgen(js_name = racePolicies)]
pub fn race_policies() -> Vec<String> {
    race_lineup(0.9, false).iter().map(|p| p.name().to_string()).collect()
}

fn race_lineup(gamma: f64, canonical: bool) -> Vec<Policy> {
    vec![
        Policy::DiscountedKlUcb { gamma, canonical },
        Policy::KlUcb,
        Policy::Ucb,
        Policy::ExploreThenCommit { m: 100 },
        Policy::Random,
    ]
}

/// Mean cumulative regret of each policy on the ten-segment schedule, sampled every
/// `stride` rounds. Layout: one block of `horizon / stride` values per policy.
#[wasm_bindgen(js_name = regretRace)]
pub fn regret_race_js(
    gamma: f64,
    canonical: bool,
    horizon: u32,
    replications: u32,
    seed: u32,
    stride: usize,
) -> std::result::Result<Vec<f64>, JsError> {
    regret_race(gamma, canonical, horizon.into(), replications.into(), seed.into(), stride).map_err(js_err)
}

pub fn regret_race(gamma: f64, canonical: bool, horizon: u64, replications: u64, seed: u64, stride: usize) -> Result<Vec<f64>> {
    let mut config = ExperimentConfig::defaults(ExperimentId::Fig4);
    config.bandit.gamma = gamma;
    config.horizon = horizon;
    config.replications = replications;
    config.seed = seed;
    let table = run_race(&config, &race_schedule(horizon), &race_lineup(gamma, canonical))?;
    let stride = stride.max(1);
    Ok(table
        .curves
        .iter()
        .flat_map(|c| c.mean.iter().skip(stride - 1).step_by(stride).copied())
        .collect())
}
