//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Accuracy settings shared by the quadratures and the inverse Laplace transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Node count of the Talbot contour.
    pub inverse_nodes: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_subdivisions: 4000,
            inverse_nodes: 32,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::invalid("tolerance", "tolerances must be positive"));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::invalid("max_subdivisions", "must be positive"));
        }
        if self.inverse_nodes < 8 {
            return Err(Error::invalid(
                "inverse_nodes",
                format!("need at least 8 contour nodes, got {}", self.inverse_nodes),
            ));
        }
        Ok(())
    }

    pub fn with_tolerances(self, rel_tol: f64, abs_tol: f64) -> Self {
        QuadratureSpec {
            rel_tol,
            abs_tol,
            ..self
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F>(f: &mut F, a: f64, b: f64) -> Result<Segment>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx)? + f(center + dx)?;
        kron += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).abs();
    if !value.is_finite() {
        return Err(Error::Domain(format!("integrand is not finite on [{a}, {b}]")));
    }
    Ok(Segment { a, b, value, error })
}

/// Integrates a fallible integrand over `[breaks[0], breaks[last]]`, starting from the given
/// subdivision. Returns the integral and its error estimate.
pub fn integrate_fallible<F>(mut f: F, breaks: &[f64], spec: &QuadratureSpec, what: &'static str) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    debug_assert!(breaks.len() >= 2);
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            heap.push(kronrod(&mut f, w[0], w[1])?);
        }
    }
    let mut evaluations = heap.len();
    loop {
        let (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
        let target = spec.abs_tol.max(spec.rel_tol * value.abs());
        if error <= target {
            return Ok((value, error));
        }
        if evaluations >= spec.max_subdivisions {
            return Err(Error::NonConvergence {
                what,
                estimate: error,
                tolerance: target,
            });
        }
        let worst = match heap.pop() {
            Some(s) => s,
            None => return Ok((0.0, 0.0)),
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine precision; accept its contribution as is
            return Err(Error::NonConvergence {
                what,
                estimate: error,
                tolerance: target,
            });
        }
        heap.push(kronrod(&mut f, worst.a, mid)?);
        heap.push(kronrod(&mut f, mid, worst.b)?);
        evaluations += 1;
    }
}

/// Infallible convenience wrapper over a single interval.
pub fn integrate<F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec, what: &'static str) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    integrate_fallible(|x| Ok(f(x)), &[a, b], spec, what).map(|(v, _)| v)
}
