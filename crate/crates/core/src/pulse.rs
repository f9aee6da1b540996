//! Write-pulse envelopes `Ω(t)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `4 ln 2`, the factor turning a FWHM into a Gaussian exponent.
const FOUR_LN2: f64 = 4.0 * std::f64::consts::LN_2;

/// Time-dependent Rabi frequency of the write laser.
///
/// Frequencies are angular (rad/μs), times in μs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PulseShape {
    /// `peak_rabi · exp(−4 ln2 (t − center)² / fwhm²)`.
    Gaussian {
        peak_rabi: f64,
        center: f64,
        fwhm: f64,
    },
    /// `peak_rabi` at all times.
    Constant { peak_rabi: f64 },
}

impl PulseShape {
    pub fn gaussian(peak_rabi: f64, center: f64, fwhm: f64) -> Result<Self> {
        let pulse = PulseShape::Gaussian {
            peak_rabi,
            center,
            fwhm,
        };
        pulse.validate()?;
        Ok(pulse)
    }

    pub fn constant(peak_rabi: f64) -> Result<Self> {
        let pulse = PulseShape::Constant { peak_rabi };
        pulse.validate()?;
        Ok(pulse)
    }

    pub fn validate(&self) -> Result<()> {
        let peak = self.peak_rabi();
        if !(peak.is_finite() && peak >= 0.0) {
            return Err(Error::invalid("peak_rabi", format!("must be finite and >= 0, got {peak}")));
        }
        if let PulseShape::Gaussian { center, fwhm, .. } = *self {
            if !center.is_finite() {
                return Err(Error::invalid("center", format!("must be finite, got {center}")));
            }
            if !(fwhm.is_finite() && fwhm > 0.0) {
                return Err(Error::invalid("fwhm", format!("must be finite and > 0, got {fwhm}")));
            }
        }
        Ok(())
    }

    pub fn peak_rabi(&self) -> f64 {
        match *self {
            PulseShape::Gaussian { peak_rabi, .. } | PulseShape::Constant { peak_rabi } => peak_rabi,
        }
    }

    /// Evaluates `Ω(t)`.
    #[inline]
    pub fn rabi_at(&self, t: f64) -> f64 {
        match *self {
            PulseShape::Gaussian {
                peak_rabi,
                center,
                fwhm,
            } => {
                let x = (t - center) / fwhm;
                peak_rabi * (-FOUR_LN2 * x * x).exp()
            }
            PulseShape::Constant { peak_rabi } => peak_rabi,
        }
    }

    /// `∫_{t0}^{t1} Ω(t) dt` in radians. Infinite bounds are accepted.
    pub fn area(&self, t0: f64, t1: f64) -> f64 {
        if t0 == t1 {
            return 0.0;
        }
        match *self {
            PulseShape::Gaussian {
                peak_rabi,
                center,
                fwhm,
            } => {
                // Ω(t) = P exp(−a²(t−c)²),  ∫ = P √π / (2a) [erf(a(t1−c)) − erf(a(t0−c))]
                let a = FOUR_LN2.sqrt() / fwhm;
                let x0 = a * (t0 - center);
                let x1 = a * (t1 - center);
                let diff = if x0 >= 0.0 {
                    // both in the upper tail: erfc keeps the digits
                    libm::erfc(x0) - libm::erfc(x1)
                } else if x1 <= 0.0 {
                    libm::erfc(-x1) - libm::erfc(-x0)
                } else {
                    libm::erf(x1) - libm::erf(x0)
                };
                peak_rabi * std::f64::consts::PI.sqrt() / (2.0 * a) * diff
            }
            PulseShape::Constant { peak_rabi } => {
                if peak_rabi == 0.0 {
                    0.0
                } else {
                    peak_rabi * (t1 - t0)
                }
            }
        }
    }
}

/// Evaluates `Ω(t)` for `pulse`.
pub fn rabi_at(pulse: &PulseShape, t: f64) -> f64 {
    pulse.rabi_at(t)
}

/// Pulse area `∫_{t0}^{t1} Ω(t) dt`. Requires `t1 >= t0`.
pub fn pulse_area(pulse: &PulseShape, t0: f64, t1: f64) -> Result<f64> {
    if t1 < t0 || t0.is_nan() || t1.is_nan() {
        return Err(Error::invalid("t1", format!("interval [{t0}, {t1}] is reversed")));
    }
    Ok(pulse.area(t0, t1))
}
