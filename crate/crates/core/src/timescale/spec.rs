use serde::{Deserialize, Serialize};

use crate::error::{QdetError, Result};
use crate::tol;

/// A concrete time scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TimeScaleSpec {
    /// The real line.
    Reals,
    /// `{offset + k h : k ∈ ℤ}`.
    Uniform {
        h: f64,
        #[serde(default)]
        offset: f64,
    },
    /// `{base q^k : k ∈ ℕ₀}`; `q = 2, base = 1` gives `2^ℕ₀`.
    Geometric { q: f64, base: f64 },
    /// `⋃_{k ≥ 0} [k(a+b), k(a+b)+a]`.
    UnionIntervals { a: f64, b: f64 },
    /// A finite set of points.
    Explicit { points: Vec<f64> },
}

impl TimeScaleSpec {
    pub fn integers() -> Self {
        TimeScaleSpec::Uniform { h: 1.0, offset: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(QdetError::InvalidInput(msg.to_string()));
        match self {
            TimeScaleSpec::Reals => Ok(()),
            TimeScaleSpec::Uniform { h, offset } => {
                if !(h.is_finite() && *h > 0.0 && offset.is_finite()) {
                    return bad("uniform time scale needs finite h > 0 and finite offset");
                }
                Ok(())
            }
            TimeScaleSpec::Geometric { q, base } => {
                if !(q.is_finite() && *q > 1.0 && base.is_finite() && *base > 0.0) {
                    return bad("geometric time scale needs q > 1 and base > 0");
                }
                Ok(())
            }
            TimeScaleSpec::UnionIntervals { a, b } => {
                if !(a.is_finite() && *a > 0.0 && b.is_finite() && *b > 0.0) {
                    return bad("union of intervals needs a > 0 and b > 0");
                }
                Ok(())
            }
            TimeScaleSpec::Explicit { points } => {
                if points.is_empty() || !points.iter().all(|p| p.is_finite()) {
                    return bad("explicit time scale needs finite points");
                }
                if points.windows(2).any(|w| w[0] >= w[1]) {
                    return bad("explicit time scale points must be strictly increasing");
                }
                Ok(())
            }
        }
    }

    fn tol_at(t: f64) -> f64 {
        tol::get().membership * t.abs().max(1.0)
    }

    /// The nearest point of the scale to `t`, or `NotInScale` if none is within tolerance.
    pub fn snap(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(QdetError::NotInScale { t });
        }
        let eps = Self::tol_at(t);
        let p = match self {
            TimeScaleSpec::Reals => return Ok(t),
            TimeScaleSpec::Uniform { h, offset } => offset + ((t - offset) / h).round() * h,
            TimeScaleSpec::Geometric { q, base } => {
                if t <= 0.0 {
                    return Err(QdetError::NotInScale { t });
                }
                let k = ((t / base).ln() / q.ln()).round().max(0.0);
                base * q.powi(k as i32)
            }
            TimeScaleSpec::UnionIntervals { a, b } => {
                let period = a + b;
                let k = (t / period).floor();
                let start = k * period;
                let r = t - start;
                if k < 0.0 {
                    0.0
                } else if r <= *a {
                    return Ok(t);
                } else if r - a <= period - r {
                    start + a
                } else {
                    start + period
                }
            }
            TimeScaleSpec::Explicit { points } => {
                let idx = points.partition_point(|&p| p < t);
                let below = idx.checked_sub(1).map(|i| points[i]);
                let above = points.get(idx).copied();
                match (below, above) {
                    (Some(lo), Some(hi)) => {
                        if t - lo <= hi - t {
                            lo
                        } else {
                            hi
                        }
                    }
                    (Some(lo), None) => lo,
                    (None, Some(hi)) => hi,
                    (None, None) => return Err(QdetError::NotInScale { t }),
                }
            }
        };
        if (p - t).abs() <= eps {
            Ok(p)
        } else {
            Err(QdetError::NotInScale { t })
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        self.snap(t).is_ok()
    }

    /// Forward jump `σ(t)`.
    pub fn sigma(&self, t: f64) -> Result<f64> {
        let t = self.snap(t)?;
        Ok(match self {
            TimeScaleSpec::Reals => t,
            TimeScaleSpec::Uniform { h, offset } => offset + (((t - offset) / h).round() + 1.0) * h,
            TimeScaleSpec::Geometric { q, .. } => t * q,
            TimeScaleSpec::UnionIntervals { a, b } => {
                let period = a + b;
                let k = (t / period).floor();
                let r = t - k * period;
                if (r - a).abs() <= Self::tol_at(t) {
                    (k + 1.0) * period
                } else {
                    t
                }
            }
            TimeScaleSpec::Explicit { points } => {
                let idx = points.partition_point(|&p| p <= t);
                points.get(idx).copied().unwrap_or(t)
            }
        })
    }

    /// Backward jump `ρ(t)`.
    pub fn rho(&self, t: f64) -> Result<f64> {
        let t = self.snap(t)?;
        Ok(match self {
            TimeScaleSpec::Reals => t,
            TimeScaleSpec::Uniform { h, offset } => offset + (((t - offset) / h).round() - 1.0) * h,
            TimeScaleSpec::Geometric { q, base } => {
                if t <= *base * (1.0 + 1e-12) {
                    t
                } else {
                    t / q
                }
            }
            TimeScaleSpec::UnionIntervals { a, b } => {
                let period = a + b;
                let k = (t / period).round();
                if k >= 1.0 && (t - k * period).abs() <= Self::tol_at(t) {
                    t - b
                } else {
                    t
                }
            }
            TimeScaleSpec::Explicit { points } => {
                let idx = points.partition_point(|&p| p < t);
                if idx == 0 {
                    t
                } else {
                    points[idx - 1]
                }
            }
        })
    }

    /// Graininess `μ(t) = σ(t) − t`.
    pub fn mu(&self, t: f64) -> Result<f64> {
        let s = self.snap(t)?;
        Ok(match self {
            TimeScaleSpec::Uniform { h, .. } => *h,
            TimeScaleSpec::Geometric { q, .. } => s * (q - 1.0),
            _ => self.sigma(s)? - s,
        })
    }

    /// Right end of the continuous interval starting at a right-dense `t`.
    pub(crate) fn dense_end(&self, t: f64) -> f64 {
        match self {
            TimeScaleSpec::Reals => f64::INFINITY,
            TimeScaleSpec::UnionIntervals { a, b } => {
                let period = a + b;
                (t / period).floor() * period + a
            }
            _ => t,
        }
    }

    /// Largest point of a bounded-above scale.
    pub fn max_point(&self) -> Option<f64> {
        match self {
            TimeScaleSpec::Explicit { points } => points.last().copied(),
            _ => None,
        }
    }
}
