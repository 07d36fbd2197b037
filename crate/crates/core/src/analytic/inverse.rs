//! Numerical inversion of Laplace transforms.
//!
//! The primary method is the fixed Talbot contour of Abate and Valkó: the Bromwich line is
//! deformed to `s(theta) = r theta (cot theta + i)`, `theta in (-pi, pi)`, with
//! `r = 2M / (5t)`, and the integral is approximated by the trapezoid rule on `M` nodes.
//! Gaver–Stehfest, which only needs the transform on the positive real axis, serves as an
//! independent cross-check. Its weights alternate in sign and grow like `10^(N/2)`, so it is
//! run in multiprecision arithmetic and the transform must supply a multiprecision value.

use std::f64::consts::{LN_2, PI};

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use num_complex::Complex64;

/// Binary multiprecision float used by Gaver–Stehfest.
pub type Hp = FBig<HalfEven, 2>;

/// A Laplace transform given through its logarithm. Working with `ln F` lets the inversion
/// combine `exp(s t)` and `F(s)` before exponentiating, which avoids `inf * 0` far out on the
/// contour.
pub trait LogTransform {
    /// `ln F(s)` on the principal branch.
    fn ln_complex(&self, s: Complex64) -> Complex64;
    /// `ln F(s)` for real `s > 0` at the precision of `s`.
    fn ln_real_hp(&self, s: &Hp) -> Hp;
    /// Real saddle point of `s t + ln F(s)`, if known. Talbot moves its contour out to it.
    fn saddle(&self, _t: f64) -> Option<f64> {
        None
    }
}

/// Which inversion back-end to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InversionMethod {
    Talbot { nodes: usize },
    GaverStehfest { terms: usize },
}

impl InversionMethod {
    pub fn invert<T: LogTransform + ?Sized>(&self, transform: &T, t: f64) -> f64 {
        match *self {
            InversionMethod::Talbot { nodes } => talbot(transform, t, nodes),
            InversionMethod::GaverStehfest { terms } => gaver_stehfest(transform, t, terms),
        }
    }
}

/// Fixed-Talbot inversion at time `t > 0` with `m` contour nodes.
///
/// When the transform reports a saddle point beyond the standard crossing `2M / (5t)`, the
/// contour crosses the real axis at the saddle instead. Deep in the left tail of a one-sided
/// stable law the standard contour passes far inside the saddle and the sum is pure
/// cancellation noise.
pub fn talbot<T: LogTransform + ?Sized>(transform: &T, t: f64, m: usize) -> f64 {
    let mf = m as f64;
    let r = (2.0 * mf / (5.0 * t)).max(transform.saddle(t).unwrap_or(0.0));
    let s0 = Complex64::new(r, 0.0);
    let mut sum = 0.5 * (s0 * t + transform.ln_complex(s0)).exp().re;
    for k in 1..m {
        let theta = k as f64 * PI / mf;
        let cot = theta.cos() / theta.sin();
        let s = Complex64::new(r * theta * cot, r * theta);
        let sigma = theta + (theta * cot - 1.0) * cot;
        let term = (s * t + transform.ln_complex(s)).exp() * Complex64::new(1.0, sigma);
        if term.re.is_finite() {
            sum += term.re;
        }
    }
    r / mf * sum
}

fn factorial(k: usize, precision: usize) -> Hp {
    let mut f = Hp::ONE.with_precision(precision).value();
    for i in 2..=k {
        f *= Hp::from(i as u64);
    }
    f
}

fn hp_weights(n: usize, precision: usize) -> Vec<Hp> {
    let half = n / 2;
    let fact: Vec<Hp> = (0..=n).map(|k| factorial(k, precision)).collect();
    (1..=n)
        .map(|k| {
            let lo = k.div_ceil(2);
            let hi = k.min(half);
            let mut v = Hp::ZERO.with_precision(precision).value();
            for j in lo..=hi {
                let num = Hp::from(j as u64).with_precision(precision).value().powi((half as u64).into())
                    * &fact[2 * j];
                let den = &fact[half - j] * &fact[j] * &fact[j - 1] * &fact[k - j] * &fact[2 * j - k];
                v += num / den;
            }
            if (k + half) % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect()
}

/// Stehfest weights `V_k`, `k = 1..=n`, for even `n`, rounded to `f64`.
pub fn stehfest_weights(n: usize) -> Vec<f64> {
    assert!(n >= 2 && n.is_multiple_of(2), "Stehfest needs an even term count");
    hp_weights(n, working_precision(n))
        .iter()
        .map(|w| w.to_f64().value())
        .collect()
}

/// Bits of precision for an `n`-term Stehfest sum: the weights reach about `10^(n/2)`
/// before cancelling, so carry that many digits on top of double precision.
fn working_precision(n: usize) -> usize {
    128 + 4 * n
}

/// Gaver–Stehfest inversion from real-axis samples with `n` (even) terms.
pub fn gaver_stehfest<T: LogTransform + ?Sized>(transform: &T, t: f64, n: usize) -> f64 {
    assert!(n >= 2 && n.is_multiple_of(2), "Stehfest needs an even term count");
    let precision = working_precision(n);
    let a = Hp::try_from(LN_2)
        .expect("finite")
        .with_precision(precision)
        .value()
        / Hp::try_from(t).expect("finite time").with_precision(precision).value();
    let mut sum = Hp::ZERO.with_precision(precision).value();
    for (i, w) in hp_weights(n, precision).iter().enumerate() {
        let s = &a * Hp::from((i + 1) as u64);
        sum += w * transform.ln_real_hp(&s).exp();
    }
    (sum * a).to_f64().value()
}
