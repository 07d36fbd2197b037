use std::cell::RefCell;
use std::collections::HashMap;

use super::density::QrDistribution;
use super::laplace::{laplace_joint, ShotNoiseTransform};
use super::quad::{integrate_fallible, QuadratureSpec};
use crate::error::Result;
use crate::params::{SaturationRule, SystemParams};

/// The three addends of the optimal-selection success probability and their sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuccessTerms {
    /// Active mode succeeds.
    pub active: f64,
    /// Active mode powered but failing at the destination, passive succeeds.
    pub passive_rescue: f64,
    /// Only the passive circuit is powered, and passive succeeds.
    pub passive_only: f64,
    /// Sum of the three, clamped to `[0, 1]`.
    pub total: f64,
}

/// `exp(-g * noise)` with `0 * inf` read as `0`.
fn decay(g: f64, noise: f64) -> f64 {
    if noise == 0.0 {
        1.0
    } else {
        (-g * noise).exp()
    }
}

/// Evaluator of the closed-form success probability for one parameter set.
#[derive(Debug, Clone)]
pub struct AnalyticModel {
    params: SystemParams,
    spec: QuadratureSpec,
    saturation: SaturationRule,
    interference: ShotNoiseTransform,
    qr: QrDistribution,
}

/// Below this magnitude an integrand value is treated as zero without evaluating the joint transform.
const NEGLIGIBLE: f64 = 1e-18;

impl AnalyticModel {
    /// Model with the default quadrature settings and the storage-after-circuit cap.
    pub fn new(params: SystemParams) -> Result<Self> {
        Self::with_options(params, QuadratureSpec::default(), SaturationRule::StorageAfterCircuit)
    }

    pub fn with_options(params: SystemParams, spec: QuadratureSpec, saturation: SaturationRule) -> Result<Self> {
        params.validate_physical()?;
        spec.validate()?;
        let interference = ShotNoiseTransform::new(params.p_interferer, params.zeta, params.alpha)?;
        let carriers = ShotNoiseTransform::new(params.p_carrier, params.zeta_carrier, params.alpha_carrier)?;
        let qr = QrDistribution::new(carriers, &spec)?;
        Ok(AnalyticModel {
            params,
            spec,
            saturation,
            interference,
            qr,
        })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn saturation(&self) -> SaturationRule {
        self.saturation
    }

    pub fn qr_distribution(&self) -> &QrDistribution {
        &self.qr
    }

    /// `d_sr^alpha tau_A / P_S`.
    pub fn g1(&self) -> f64 {
        let p = &self.params;
        p.d_sr.powf(p.alpha) * p.tau_active / p.p_source
    }

    /// `d_rd^alpha v (1 - eta) / (2 (energy - E_A))`; infinite when no energy is left.
    pub fn g2(&self, v: f64, energy: f64) -> f64 {
        let p = &self.params;
        let surplus = energy - p.e_active;
        if surplus <= 0.0 {
            return f64::INFINITY;
        }
        p.d_rd.powf(p.alpha) * v * (1.0 - p.eta) / (2.0 * surplus)
    }

    /// `d_rd^alpha tau_P / (Gamma xi q)` on the raw incident power.
    pub fn g3(&self, q: f64) -> f64 {
        let p = &self.params;
        p.d_rd.powf(p.alpha) * p.tau_passive / (p.gamma_reflect * p.xi * q)
    }

    fn b_active(&self) -> f64 {
        self.params.e_active / self.params.harvest_factor()
    }

    fn b_passive(&self) -> f64 {
        self.params.e_passive / self.params.harvest_factor()
    }

    /// Incident power at which the transmit power saturates (never below the active threshold).
    fn b_saturation(&self) -> f64 {
        (self.saturation.saturation_energy(&self.params) / self.params.harvest_factor()).max(self.b_active())
    }

    fn relay_factor(&self) -> Result<f64> {
        let g1 = self.g1();
        Ok(decay(g1, self.params.sigma2) * self.interference.laplace(g1)?)
    }

    /// Active-hop success factor `exp(-g2 sigma^2) L_{I_R, I_D}(g1, g2)` at harvested energy `energy`.
    fn active_hop(&self, energy: f64, cache: &RefCell<HashMap<u64, f64>>) -> Result<f64> {
        let g2 = self.g2(self.params.tau_active, energy);
        let noise = decay(g2, self.params.sigma2);
        if noise * self.interference.laplace(g2)? < NEGLIGIBLE {
            return Ok(0.0);
        }
        let key = g2.to_bits();
        if let Some(v) = cache.borrow().get(&key) {
            return Ok(*v);
        }
        let v = noise * laplace_joint(self.g1(), g2, &self.interference, self.params.d_rd, &self.spec)?;
        cache.borrow_mut().insert(key, v);
        Ok(v)
    }

    fn passive_hop(&self, q: f64) -> f64 {
        decay(self.g3(q), self.params.sigma2_passive)
    }

    /// `int_b^inf exp(-g3(q) sigma_p^2) f(q) dq`. When the noise factor stays near one it is
    /// written as `1 - F(b)` minus a small remainder, otherwise integrated directly.
    fn passive_tail(&self, b: f64) -> Result<f64> {
        let survival = 1.0 - self.qr.cdf(b)?;
        let noise = self.params.sigma2_passive;
        if noise == 0.0 || survival == 0.0 {
            return Ok(survival);
        }
        let kappa = self.g3(b) * noise;
        if kappa.is_infinite() {
            return Ok(0.0);
        }
        // q = b / u maps (b, inf) onto (0, 1], and g3(b / u) = g3(b) u
        let breaks = [0.0, 1e-4, 1e-2, 1.0];
        let jac = |u: f64| -> Result<f64> { Ok(self.qr.pdf(b / u)? * b / (u * u)) };
        if kappa < 0.5 {
            let loss = |u: f64| -> Result<f64> {
                if u <= 0.0 {
                    return Ok(0.0);
                }
                Ok(-(-kappa * u).exp_m1() * jac(u)?)
            };
            let (lost, _) = integrate_fallible(loss, &breaks, &self.spec, "passive tail")?;
            Ok((survival - lost).max(0.0))
        } else {
            let kept = |u: f64| -> Result<f64> {
                if u <= 0.0 {
                    return Ok(0.0);
                }
                Ok((-kappa * u).exp() * jac(u)?)
            };
            Ok(integrate_fallible(kept, &breaks, &self.spec, "passive tail")?.0.max(0.0))
        }
    }

    fn term_active_with(&self, cache: &RefCell<HashMap<u64, f64>>) -> Result<f64> {
        // the relay-side interference sits inside the joint transform; only its noise factor is left
        let relay = decay(self.g1(), self.params.sigma2);
        if relay == 0.0 {
            return Ok(0.0);
        }
        let hf = self.params.harvest_factor();
        let (b3, b_sat) = (self.b_active(), self.b_saturation());
        let integral = if b_sat > b3 {
            integrate_fallible(
                |q| Ok(self.active_hop(hf * q, cache)? * self.qr.pdf(q)?),
                &[b3, b_sat],
                &self.spec,
                "active term",
            )?
            .0
        } else {
            0.0
        };
        let sat_energy = self.saturation.saturation_energy(&self.params);
        let boundary = self.active_hop(sat_energy, cache)? * (1.0 - self.qr.cdf(b_sat)?);
        Ok(relay * (integral + boundary))
    }

    fn term_rescue_with(&self, cache: &RefCell<HashMap<u64, f64>>) -> Result<f64> {
        let g1 = self.g1();
        let relay_noise = decay(g1, self.params.sigma2);
        if relay_noise == 0.0 {
            return Ok(0.0);
        }
        let l_relay = self.interference.laplace(g1)?;
        let hf = self.params.harvest_factor();
        let (b3, b_sat) = (self.b_active(), self.b_saturation());
        let integral = if b_sat > b3 {
            integrate_fallible(
                |q| {
                    let passive = self.passive_hop(q);
                    if passive == 0.0 {
                        return Ok(0.0);
                    }
                    let fail = (l_relay - self.active_hop(hf * q, cache)?).max(0.0);
                    Ok(passive * fail * self.qr.pdf(q)?)
                },
                &[b3, b_sat],
                &self.spec,
                "passive rescue term",
            )?
            .0
        } else {
            0.0
        };
        let sat_energy = self.saturation.saturation_energy(&self.params);
        let fail_sat = (l_relay - self.active_hop(sat_energy, cache)?).max(0.0);
        let boundary = fail_sat * self.passive_tail(b_sat)?;
        Ok(relay_noise * (integral + boundary))
    }

    /// Active mode succeeds.
    pub fn term_active(&self) -> Result<f64> {
        self.term_active_with(&RefCell::default())
    }

    /// Active mode has energy but fails at the destination while passive succeeds.
    pub fn term_passive_rescue(&self) -> Result<f64> {
        self.term_rescue_with(&RefCell::default())
    }

    /// Energy between the two circuit thresholds and passive succeeds.
    pub fn term_passive_only(&self) -> Result<f64> {
        let (b2, b3) = (self.b_passive(), self.b_active());
        if b3 <= b2 {
            return Ok(0.0);
        }
        let relay = self.relay_factor()?;
        if relay == 0.0 {
            return Ok(0.0);
        }
        let (integral, _) = integrate_fallible(
            |q| Ok(self.passive_hop(q) * self.qr.pdf(q)?),
            &[b2, b3],
            &self.spec,
            "passive-only term",
        )?;
        Ok(relay * integral)
    }

    /// All three terms and the optimal-selection success probability.
    pub fn evaluate(&self) -> Result<SuccessTerms> {
        let cache = RefCell::default();
        let active = self.term_active_with(&cache)?;
        let passive_rescue = self.term_rescue_with(&cache)?;
        let passive_only = self.term_passive_only()?;
        let raw = active + passive_rescue + passive_only;
        let slack = 3.0 * self.spec.rel_tol.max(self.spec.abs_tol);
        if raw > 1.0 + slack || raw < -slack {
            log::warn!("success probability {raw} outside [0, 1] beyond quadrature tolerance; clamped");
        }
        Ok(SuccessTerms {
            active,
            passive_rescue,
            passive_only,
            total: raw.clamp(0.0, 1.0),
        })
    }

    pub fn success_prob_optimal(&self) -> Result<f64> {
        self.evaluate().map(|t| t.total)
    }
}
