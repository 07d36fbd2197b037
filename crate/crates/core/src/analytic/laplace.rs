//! Laplace transforms of Rayleigh-faded shot noise from a homogeneous PPP on the plane.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::inverse::{Hp, LogTransform};
use super::quad::{integrate_fallible, QuadratureSpec};
use crate::error::{Error, Result};

/// Default radial cutoff: the joint-transform integrand is dropped beyond the radius where it
/// falls below this value.
pub const RADIAL_CUTOFF: f64 = 1e-12;

/// A transmitter population: per-node power, density and path-loss exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotNoiseTransform {
    pub tx_power: f64,
    pub density: f64,
    pub path_loss_exp: f64,
}

impl ShotNoiseTransform {
    pub fn new(tx_power: f64, density: f64, path_loss_exp: f64) -> Result<Self> {
        if !(path_loss_exp > 2.0) {
            return Err(Error::NonIntegrablePathLoss {
                exponent: path_loss_exp,
            });
        }
        if !(tx_power >= 0.0) || !(density >= 0.0) {
            return Err(Error::Domain(format!(
                "transmit power ({tx_power}) and density ({density}) must be nonnegative"
            )));
        }
        Ok(ShotNoiseTransform {
            tx_power,
            density,
            path_loss_exp,
        })
    }

    /// `2 / alpha`, the stability index of the shot noise.
    pub fn delta(&self) -> f64 {
        2.0 / self.path_loss_exp
    }

    /// Constant `c` such that the transform is `exp(-c s^delta)`.
    pub fn scale(&self) -> f64 {
        let delta = self.delta();
        delta * PI * PI * self.density * self.tx_power.powf(delta) / (PI * delta).sin()
    }

    /// `E[exp(-s I)]`.
    pub fn laplace(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("transform argument must be nonnegative, got {s}")));
        }
        if s == 0.0 || self.density == 0.0 || self.tx_power == 0.0 {
            return Ok(1.0);
        }
        if s.is_infinite() {
            return Ok(0.0);
        }
        Ok((-self.scale() * s.powf(self.delta())).exp())
    }

    /// The transform continued to the complex plane (principal branch).
    pub fn laplace_complex(&self, s: Complex64) -> Complex64 {
        self.ln_complex(s).exp()
    }
}

impl LogTransform for ShotNoiseTransform {
    fn ln_complex(&self, s: Complex64) -> Complex64 {
        -self.scale() * s.powf(self.delta())
    }

    fn ln_real_hp(&self, s: &Hp) -> Hp {
        let precision = s.precision();
        let hp = |v: f64| Hp::try_from(v).expect("finite").with_precision(precision).value();
        -hp(self.scale()) * (hp(self.delta()) * s.ln()).exp()
    }

    /// Solves `t = c delta s^(delta - 1)`.
    fn saddle(&self, t: f64) -> Option<f64> {
        let c = self.scale();
        let delta = self.delta();
        (c > 0.0 && t > 0.0).then(|| (c * delta / t).powf(1.0 / (1.0 - delta)))
    }
}

/// Closed-form single transform `exp(-(2/a) pi^2 z (s p)^(2/a) csc(2 pi / a))`.
pub fn laplace_single(s: f64, tx_power: f64, density: f64, path_loss_exp: f64) -> Result<f64> {
    ShotNoiseTransform::new(tx_power, density, path_loss_exp)?.laplace(s)
}

/// Joint transform `E[exp(-s1 I_R - s2 I_D)]` of the interference at two receivers a distance
/// `separation` apart, sharing the point positions but with independent fading.
///
/// Evaluated as a nested adaptive quadrature over `r` (distance to the first receiver) and
/// `theta`, with the radial range cut where the integrand drops below `radial_cutoff`.
pub fn laplace_joint(
    s1: f64,
    s2: f64,
    tf: &ShotNoiseTransform,
    separation: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    laplace_joint_with_cutoff(s1, s2, tf, separation, spec, RADIAL_CUTOFF)
}

pub fn laplace_joint_with_cutoff(
    s1: f64,
    s2: f64,
    tf: &ShotNoiseTransform,
    separation: f64,
    spec: &QuadratureSpec,
    radial_cutoff: f64,
) -> Result<f64> {
    if !(s1 >= 0.0) || !(s2 >= 0.0) {
        return Err(Error::Domain(format!("transform arguments must be nonnegative, got ({s1}, {s2})")));
    }
    if (s1 == 0.0 && s2 == 0.0) || tf.density == 0.0 || tf.tx_power == 0.0 {
        return Ok(1.0);
    }
    if s1.is_infinite() || s2.is_infinite() {
        return Ok(0.0);
    }
    let exponent = joint_exponent(s1 * tf.tx_power, s2 * tf.tx_power, tf.path_loss_exp, separation, spec, radial_cutoff)?;
    Ok((-tf.density * exponent).exp())
}

/// `int_0^R int_0^{2 pi} [1 - A(r) B(l(r, theta))] r dtheta dr` with
/// `A = 1 / (1 + a r^-alpha)`, `B = 1 / (1 + b l^-alpha)`.
fn joint_exponent(a: f64, b: f64, alpha: f64, d: f64, spec: &QuadratureSpec, cutoff: f64) -> Result<f64> {
    let half_alpha = 0.5 * alpha;
    let bracket = |r: f64, theta: f64| -> f64 {
        let r_a = r.powf(alpha);
        let l2 = (r * r + d * d - 2.0 * r * d * theta.cos()).max(0.0);
        let l_a = l2.powf(half_alpha);
        let (keep_r, drop_r) = if a == 0.0 { (1.0, 0.0) } else { (r_a / (r_a + a), a / (r_a + a)) };
        let drop_l = if b == 0.0 { 0.0 } else { b / (l_a + b) };
        drop_r + keep_r * drop_l
    };

    let r_max = d + ((a + b) / cutoff).powf(1.0 / alpha);
    let mut breaks = vec![0.0];
    if d > 0.0 && d < r_max {
        breaks.push(0.5 * d);
        breaks.push(d);
        let mut r = 2.0 * d;
        while r < r_max {
            breaks.push(r);
            r *= 2.0;
        }
    }
    breaks.push(r_max);

    let inner_spec = spec.with_tolerances(spec.rel_tol * 0.1, spec.abs_tol * 1e-3);
    let outer = |r: f64| -> Result<f64> {
        if r == 0.0 {
            return Ok(0.0);
        }
        let (ring, _) = integrate_fallible(|t| Ok(bracket(r, t)), &[0.0, 0.25 * PI, PI], &inner_spec, "joint transform (angle)")?;
        Ok(2.0 * ring * r)
    };
    let (value, _) = integrate_fallible(outer, &breaks, spec, "joint transform (radius)")?;
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn interferers() -> ShotNoiseTransform {
        ShotNoiseTransform::new(crate::params::dbm_to_watts(3.0), 1e-3, 4.0).unwrap()
    }

    #[test]
    fn single_edge_cases() {
        assert_eq!(laplace_single(0.0, 10.0, 1e-3, 3.0).unwrap(), 1.0);
        assert_eq!(laplace_single(5.0, 10.0, 0.0, 3.0).unwrap(), 1.0);
        assert!(matches!(
            laplace_single(1.0, 10.0, 1e-3, 2.0),
            Err(Error::NonIntegrablePathLoss { .. })
        ));
    }

    #[test]
    fn single_alpha4_scale() {
        // csc(pi/2) = 1, so c = (pi^2 / 2) z sqrt(p)
        let tf = ShotNoiseTransform::new(4.0, 2e-3, 4.0).unwrap();
        assert_relative_eq!(tf.scale(), 0.5 * PI * PI * 2e-3 * 2.0, max_relative = 1e-14);
    }

    #[test]
    fn single_matches_radial_pgfl_integral() {
        // exp(-2 pi z int_0^inf (1 - 1/(1 + s p r^-a)) r dr), integrated numerically
        let (p, z, alpha, s) = (10.0, 1e-3, 3.0, 0.7);
        let spec = QuadratureSpec::default().with_tolerances(1e-11, 1e-14);
        // u = r / (1 + r) maps [0, inf) onto [0, 1)
        let integrand = |u: f64| {
            if u >= 1.0 {
                return 0.0;
            }
            let r = u / (1.0 - u);
            let sp = s * p;
            sp / (r.powf(alpha) + sp) * r / ((1.0 - u) * (1.0 - u))
        };
        let radial = super::super::quad::integrate(integrand, 0.0, 1.0, &spec, "pgfl").unwrap();
        let expected = (-2.0 * PI * z * radial).exp();
        assert_relative_eq!(laplace_single(s, p, z, alpha).unwrap(), expected, max_relative = 1e-8);
    }

    #[test]
    fn joint_reduces_to_single() {
        let tf = interferers();
        let spec = QuadratureSpec::default();
        assert_eq!(laplace_joint(0.0, 0.0, &tf, 5.0, &spec).unwrap(), 1.0);
        for s in [1e3, 1e5, 3.125e5, 1e7] {
            let j = laplace_joint(s, 0.0, &tf, 5.0, &spec).unwrap();
            assert_relative_eq!(j, tf.laplace(s).unwrap(), max_relative = 1e-6);
            let j2 = laplace_joint(0.0, s, &tf, 5.0, &spec).unwrap();
            assert_relative_eq!(j2, tf.laplace(s).unwrap(), max_relative = 1e-6);
        }
    }

    #[test]
    fn joint_is_bounded_by_independent_product() {
        // Shared positions make I_R and I_D positively associated, so the joint transform
        // exceeds the product of the marginals, and stays below each marginal.
        let tf = interferers();
        let spec = QuadratureSpec::default();
        let (s1, s2) = (3.125e5, 1e5);
        let j = laplace_joint(s1, s2, &tf, 5.0, &spec).unwrap();
        let l1 = tf.laplace(s1).unwrap();
        let l2 = tf.laplace(s2).unwrap();
        assert!(j > l1 * l2 && j < l1.min(l2), "{j} vs {l1} {l2}");
    }

    #[test]
    fn joint_is_decreasing_in_each_argument() {
        let tf = interferers();
        let spec = QuadratureSpec::default();
        let mut prev = 1.0;
        for s in [1e2, 1e4, 1e5, 1e6, 1e7] {
            let j = laplace_joint(1e5, s, &tf, 5.0, &spec).unwrap();
            assert!(j < prev);
            prev = j;
        }
    }

    #[test]
    fn radial_cutoff_is_converged() {
        let tf = interferers();
        let spec = QuadratureSpec::default();
        let base = laplace_joint_with_cutoff(1e6, 1e6, &tf, 5.0, &spec, RADIAL_CUTOFF).unwrap();
        let loose = laplace_joint_with_cutoff(1e6, 1e6, &tf, 5.0, &spec, 2.0 * RADIAL_CUTOFF).unwrap();
        assert_relative_eq!(base, loose, max_relative = 1e-7);
    }
}
