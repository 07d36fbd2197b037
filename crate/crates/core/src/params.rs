//! Physical constants of the hybrid relay scenario. All quantities are linear SI units;
//! decibel inputs are converted once at construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, SimulationRegion};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * db_to_linear(dbm)
}

/// How the relay's stored energy caps its active-mode transmit power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SaturationRule {
    /// Harvested energy beyond `E_A + E_C` is discarded; the cap is `2 E_C / (1 - eta)`.
    StorageCapacity,
    /// Harvested energy beyond `E_C` is discarded and the circuit draws `E_A` from it;
    /// the cap is `2 (E_C - E_A) / (1 - eta)`.
    StorageAfterCircuit,
}

impl SaturationRule {
    /// Harvested energy at which the transmit power stops growing.
    pub fn saturation_energy(&self, params: &SystemParams) -> f64 {
        match self {
            SaturationRule::StorageCapacity => params.e_active + params.e_storage,
            SaturationRule::StorageAfterCircuit => params.e_storage,
        }
    }
}

/// Every constant of the system model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Source-to-relay distance (m).
    pub d_sr: f64,
    /// Relay-to-destination distance (m).
    pub d_rd: f64,
    /// Interferer transmit power (W).
    pub p_interferer: f64,
    /// Carrier-emitter transmit power (W).
    pub p_carrier: f64,
    /// Interferer density (per m²).
    pub zeta: f64,
    /// Carrier-emitter density (per m²).
    pub zeta_carrier: f64,
    /// Source transmit power (W).
    pub p_source: f64,
    /// Active-mode circuit energy per slot (J).
    pub e_active: f64,
    /// Passive-mode circuit energy per slot (J).
    pub e_passive: f64,
    /// Energy storage capacity (J).
    pub e_storage: f64,
    /// Path-loss exponent of interferer-band links.
    pub alpha: f64,
    /// Path-loss exponent of carrier-emitter links.
    pub alpha_carrier: f64,
    /// RF-to-DC conversion efficiency.
    pub beta: f64,
    /// Fraction of the incident signal reflected while backscattering.
    pub gamma_reflect: f64,
    /// Harvesting fraction of each slot.
    pub eta: f64,
    /// Backscatter modulation efficiency.
    pub xi: f64,
    /// Noise power in the active band (W).
    pub sigma2: f64,
    /// Noise power in the backscatter band (W).
    pub sigma2_passive: f64,
    /// SINR threshold at the relay and at the destination in active mode (linear).
    pub tau_active: f64,
    /// SNR threshold at the destination in passive mode (linear).
    pub tau_passive: f64,
    /// Radius of the simulation disk (m).
    pub r_max: f64,
    /// Transmit-power cap used by the simulator.
    pub saturation: SaturationRule,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            d_sr: 5.0,
            d_rd: 5.0,
            p_interferer: dbm_to_watts(3.0),
            p_carrier: dbm_to_watts(40.0),
            zeta: 1e-3,
            zeta_carrier: 1e-3,
            p_source: 2e-3,
            e_active: 200e-6,
            e_passive: 10e-6,
            e_storage: 2e-3,
            alpha: 4.0,
            alpha_carrier: 3.0,
            beta: 0.5,
            gamma_reflect: 0.375,
            eta: 0.4,
            xi: 0.3,
            sigma2: 1e-10,
            sigma2_passive: 1e-9,
            tau_active: db_to_linear(0.0),
            tau_passive: db_to_linear(20.0),
            r_max: 500.0,
            saturation: SaturationRule::StorageCapacity,
        }
    }
}

fn nonneg(field: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 && !v.is_nan() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be nonnegative, got {v}")))
    }
}

fn unit(field: &'static str, v: f64, open_top: bool) -> Result<()> {
    let ok = v > 0.0 && if open_top { v < 1.0 } else { v <= 1.0 };
    if ok {
        Ok(())
    } else {
        let range = if open_top { "(0, 1)" } else { "(0, 1]" };
        Err(Error::invalid(field, format!("must lie in {range}, got {v}")))
    }
}

impl SystemParams {
    /// Full validation, including the `e_active > e_passive` ordering.
    pub fn validate(&self) -> Result<()> {
        self.validate_physical()?;
        if !(self.e_active > self.e_passive) {
            return Err(Error::invalid(
                "e_active",
                format!("must exceed e_passive ({} <= {})", self.e_active, self.e_passive),
            ));
        }
        Ok(())
    }

    /// Ranges of individual constants only.
    pub fn validate_physical(&self) -> Result<()> {
        for (name, v) in [
            ("d_sr", self.d_sr),
            ("d_rd", self.d_rd),
            ("r_max", self.r_max),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be positive and finite, got {v}")));
            }
        }
        for (name, v) in [
            ("p_interferer", self.p_interferer),
            ("p_carrier", self.p_carrier),
            ("zeta", self.zeta),
            ("zeta_carrier", self.zeta_carrier),
            ("p_source", self.p_source),
            ("e_active", self.e_active),
            ("e_passive", self.e_passive),
            ("e_storage", self.e_storage),
            ("sigma2", self.sigma2),
            ("sigma2_passive", self.sigma2_passive),
            ("tau_active", self.tau_active),
            ("tau_passive", self.tau_passive),
        ] {
            nonneg(name, v)?;
        }
        if !(self.alpha > 2.0) {
            return Err(Error::invalid("alpha", format!("must exceed 2, got {}", self.alpha)));
        }
        if !(self.alpha_carrier > 2.0) {
            return Err(Error::invalid(
                "alpha_carrier",
                format!("must exceed 2, got {}", self.alpha_carrier),
            ));
        }
        unit("eta", self.eta, true)?;
        unit("beta", self.beta, false)?;
        unit("gamma_reflect", self.gamma_reflect, false)?;
        unit("xi", self.xi, false)?;
        Ok(())
    }

    pub fn relay(&self) -> Point {
        Point::ORIGIN
    }

    pub fn source(&self) -> Point {
        Point::new(-self.d_sr, 0.0)
    }

    pub fn destination(&self) -> Point {
        Point::new(self.d_rd, 0.0)
    }

    /// Simulation disk centred on the relay–destination midpoint.
    pub fn region(&self) -> Result<SimulationRegion> {
        SimulationRegion::new(Point::new(0.5 * self.d_rd, 0.0), self.r_max)
    }

    /// `eta * beta`: harvested joules per watt of incident carrier power.
    pub fn harvest_factor(&self) -> f64 {
        self.eta * self.beta
    }
}
