//! Distribution of the incident carrier power `Q_R`, recovered by inverting its Laplace
//! transform and tabulated once on a log-spaced grid.

use num_complex::Complex64;

use super::inverse::{Hp, InversionMethod, LogTransform};
use super::laplace::ShotNoiseTransform;
use super::quad::QuadratureSpec;
use crate::error::{Error, Result};

pub const GRID_POINTS: usize = 256;
/// The grid spans `[q_bar / GRID_SPAN, q_bar * GRID_SPAN]`.
pub const GRID_SPAN: f64 = 1e4;

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch–Butland slopes).
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        assert!(n >= 2 && y.len() == n);
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let d: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
        let mut slope = vec![0.0; n];
        slope[0] = d[0];
        slope[n - 1] = d[n - 2];
        for k in 1..n - 1 {
            if d[k - 1] * d[k] > 0.0 {
                let w1 = 2.0 * h[k] + h[k - 1];
                let w2 = h[k] + 2.0 * h[k - 1];
                slope[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
            }
        }
        MonotoneCubic { x, y, slope }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    pub fn eval(&self, at: f64) -> f64 {
        let n = self.x.len();
        let k = match self.x.partition_point(|v| *v <= at) {
            0 => 0,
            i if i >= n => n - 2,
            i => i - 1,
        };
        let h = self.x[k + 1] - self.x[k];
        let t = (at - self.x[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[k] + h10 * h * self.slope[k] + h01 * self.y[k + 1] + h11 * h * self.slope[k + 1]
    }
}

const LOG_FLOOR: f64 = -700.0;
/// Interpolated log values below this are read as zero; Hermite weights do not sum to exactly
/// one in floating point, so a run of floor values can come back a hair above the floor.
const LOG_ZERO: f64 = LOG_FLOOR + 1.0;

#[derive(Debug, Clone)]
enum Tables {
    /// No carrier power at all: `Q_R = 0` almost surely.
    Degenerate,
    Inverted {
        q_bar: f64,
        ln_lo: f64,
        ln_hi: f64,
        /// `ln pdf` against `ln q`.
        log_pdf: MonotoneCubic,
        /// `ln CDF` against `ln q`.
        log_cdf: MonotoneCubic,
        peak: f64,
        worst_negative: f64,
    },
}

/// PDF and CDF of the shot noise described by a [`ShotNoiseTransform`].
#[derive(Debug, Clone)]
pub struct QrDistribution {
    transform: ShotNoiseTransform,
    method: InversionMethod,
    tables: Tables,
}

impl QrDistribution {
    pub fn new(transform: ShotNoiseTransform, spec: &QuadratureSpec) -> Result<Self> {
        spec.validate()?;
        Self::with_method(
            transform,
            InversionMethod::Talbot {
                nodes: spec.inverse_nodes,
            },
        )
    }

    pub fn with_method(transform: ShotNoiseTransform, method: InversionMethod) -> Result<Self> {
        let c = transform.scale();
        if c == 0.0 {
            return Ok(QrDistribution {
                transform,
                method,
                tables: Tables::Degenerate,
            });
        }
        let q_bar = c.powf(1.0 / transform.delta());
        let ln_lo = (q_bar / GRID_SPAN).ln();
        let ln_hi = (q_bar * GRID_SPAN).ln();
        let step = (ln_hi - ln_lo) / (GRID_POINTS - 1) as f64;
        let grid: Vec<f64> = (0..GRID_POINTS).map(|i| ln_lo + step * i as f64).collect();

        let mut raw = Vec::with_capacity(GRID_POINTS);
        let mut cdf = Vec::with_capacity(GRID_POINTS);
        for &lq in &grid {
            let q = lq.exp();
            let f = invert_pdf(&transform, method, q);
            let big_f = invert_cdf(&transform, method, q);
            raw.push(if f.is_finite() { f } else { 0.0 });
            cdf.push(if big_f.is_finite() { big_f.clamp(0.0, 1.0) } else { 0.0 });
        }
        let peak = raw.iter().cloned().fold(0.0, f64::max);
        let worst_negative = raw.iter().cloned().fold(0.0, f64::min);
        if worst_negative < 0.0 {
            log::warn!(
                "inverse Laplace ringing clamped: most negative density {worst_negative:e} ({:e} of peak)",
                -worst_negative / peak
            );
        }
        // a CDF never decreases; remove inversion noise in the flat left tail
        for i in 1..cdf.len() {
            if cdf[i] < cdf[i - 1] {
                cdf[i] = cdf[i - 1];
            }
        }
        let floor_ln = |f: &f64| if *f > 0.0 { f.ln().max(LOG_FLOOR) } else { LOG_FLOOR };
        let log_pdf = raw.iter().map(floor_ln).collect();
        let log_cdf = cdf.iter().map(floor_ln).collect();
        Ok(QrDistribution {
            transform,
            method,
            tables: Tables::Inverted {
                q_bar,
                ln_lo,
                ln_hi,
                log_pdf: MonotoneCubic::new(grid.clone(), log_pdf),
                log_cdf: MonotoneCubic::new(grid, log_cdf),
                peak,
                worst_negative,
            },
        })
    }

    pub fn transform(&self) -> &ShotNoiseTransform {
        &self.transform
    }

    /// Scale anchor `c^(1/delta)` of the tabulation grid (0 for a degenerate distribution).
    pub fn q_bar(&self) -> f64 {
        match &self.tables {
            Tables::Degenerate => 0.0,
            Tables::Inverted { q_bar, .. } => *q_bar,
        }
    }

    /// Most negative raw inverted density value relative to the density peak (0 if none).
    pub fn negative_excursion(&self) -> f64 {
        match &self.tables {
            Tables::Degenerate => 0.0,
            Tables::Inverted {
                peak, worst_negative, ..
            } => -worst_negative / peak,
        }
    }

    /// Density of `Q_R` at `q > 0`, interpolated inside the tabulation grid and inverted
    /// directly outside it.
    pub fn pdf(&self, q: f64) -> Result<f64> {
        check_domain(q)?;
        Ok(match &self.tables {
            Tables::Degenerate => 0.0,
            Tables::Inverted {
                ln_lo, ln_hi, log_pdf, ..
            } => {
                let lq = q.ln();
                if lq >= *ln_lo && lq <= *ln_hi {
                    let v = log_pdf.eval(lq);
                    if v <= LOG_ZERO {
                        0.0
                    } else {
                        v.exp()
                    }
                } else {
                    self.pdf_direct(q)?
                }
            }
        })
    }

    pub fn cdf(&self, q: f64) -> Result<f64> {
        check_domain(q)?;
        Ok(match &self.tables {
            Tables::Degenerate => 1.0,
            Tables::Inverted {
                ln_lo, ln_hi, log_cdf, ..
            } => {
                let lq = q.ln();
                if lq >= *ln_lo && lq <= *ln_hi {
                    let v = log_cdf.eval(lq);
                    if v <= LOG_ZERO {
                        0.0
                    } else {
                        v.exp().min(1.0)
                    }
                } else if lq < *ln_lo {
                    // keep the stitched CDF monotone across the grid edges
                    self.cdf_direct(q)?.min(self.cdf(ln_lo.exp())?)
                } else {
                    self.cdf_direct(q)?.max(self.cdf(ln_hi.exp())?)
                }
            }
        })
    }

    /// Density by a fresh inversion at `q`, clamped at zero.
    pub fn pdf_direct(&self, q: f64) -> Result<f64> {
        check_domain(q)?;
        Ok(match self.tables {
            Tables::Degenerate => 0.0,
            _ => invert_pdf(&self.transform, self.method, q).max(0.0),
        })
    }

    pub fn cdf_direct(&self, q: f64) -> Result<f64> {
        check_domain(q)?;
        Ok(match self.tables {
            Tables::Degenerate => 1.0,
            _ => invert_cdf(&self.transform, self.method, q).clamp(0.0, 1.0),
        })
    }

    /// Raw (unclamped) inversion with an explicit back-end, for cross-validation.
    pub fn pdf_with(&self, q: f64, method: InversionMethod) -> Result<f64> {
        check_domain(q)?;
        Ok(invert_pdf(&self.transform, method, q))
    }

    pub fn cdf_with(&self, q: f64, method: InversionMethod) -> Result<f64> {
        check_domain(q)?;
        Ok(invert_cdf(&self.transform, method, q))
    }
}

fn check_domain(q: f64) -> Result<()> {
    if q > 0.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("Q_R density is defined for q > 0, got {q}")))
    }
}

fn invert_pdf(tf: &ShotNoiseTransform, method: InversionMethod, q: f64) -> f64 {
    method.invert(tf, q)
}

/// `F(s) / s`, whose inverse is the CDF.
struct Integrated<'a>(&'a ShotNoiseTransform);

impl LogTransform for Integrated<'_> {
    fn ln_complex(&self, s: Complex64) -> Complex64 {
        self.0.ln_complex(s) - s.ln()
    }

    fn ln_real_hp(&self, s: &Hp) -> Hp {
        self.0.ln_real_hp(s) - s.ln()
    }

    fn saddle(&self, t: f64) -> Option<f64> {
        self.0.saddle(t)
    }
}

fn invert_cdf(tf: &ShotNoiseTransform, method: InversionMethod, q: f64) -> f64 {
    method.invert(&Integrated(tf), q)
}
