//! Driven, detuned, decaying two-level amplitudes.
//!
//! For one spectral class with detuning `Δ` and amplitude decay `Γ` the
//! ground and excited amplitudes obey
//!
//! ```text
//! dα/dt = −i Ω(t) β
//! dβ/dt = −i Ω(t) α − i Δ β − Γ β
//! ```
//!
//! with `α(0) = 1`, `β(0) = 0`. The amplitude for detecting a Stokes photon
//! at time `t` is proportional to `β(t)`, so no field modes are carried.
//! Integration is classical RK4 on a fixed grid in the lab frame; the fast
//! `e^{−iΔt}` phase is resolved directly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pulse::PulseShape;

/// Parameters of one spectral class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomParams {
    /// `Δ`, rad/μs. Any real value.
    pub detuning: f64,
    /// `Γ`, amplitude decay coefficient, rad/μs. The population decays at `2Γ`.
    pub decay: f64,
}

impl AtomParams {
    pub fn new(detuning: f64, decay: f64) -> Result<Self> {
        let atom = AtomParams { detuning, decay };
        atom.validate()?;
        Ok(atom)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.detuning.is_finite() {
            return Err(Error::invalid("detuning", format!("must be finite, got {}", self.detuning)));
        }
        if !(self.decay.is_finite() && self.decay >= 0.0) {
            return Err(Error::invalid("decay", format!("must be finite and >= 0, got {}", self.decay)));
        }
        Ok(())
    }
}

/// Uniform time grid `t_k = k·dt`, `k = 0..=n_steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub dt: f64,
    pub n_steps: usize,
}

impl TimeGrid {
    /// Grid from 0 to `t_end`. `dt` must divide `t_end` to within 1e−9 μs.
    pub fn new(t_end: f64, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::invalid("dt", format!("must be finite and > 0, got {dt}")));
        }
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(Error::invalid("t_end", format!("must be finite and > 0, got {t_end}")));
        }
        if dt > t_end {
            return Err(Error::invalid("dt", format!("{dt} exceeds t_end = {t_end}")));
        }
        let n_steps = (t_end / dt).round() as usize;
        if (n_steps as f64 * dt - t_end).abs() > 1e-9 {
            return Err(Error::invalid(
                "dt",
                format!("{dt} does not divide t_end = {t_end} into whole steps"),
            ));
        }
        Ok(TimeGrid { dt, n_steps })
    }

    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.n_steps)
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.time(k)).collect()
    }

    /// Index of the grid point closest to `t`, if `t` lies on the grid's span.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        if !t.is_finite() || t < -0.5 * self.dt || t > self.t_end() + 0.5 * self.dt {
            return None;
        }
        Some(((t / self.dt).round() as usize).min(self.n_steps))
    }
}

/// `Ω` sampled at every step point and step midpoint.
///
/// Entry `2k` holds `Ω(t_k)`, entry `2k + 1` holds `Ω(t_k + dt/2)`. Sharing one
/// table between classes is what makes ensemble columns bit-identical to
/// standalone runs.
#[derive(Debug, Clone)]
pub(crate) struct RabiTable {
    samples: Vec<f64>,
}

impl RabiTable {
    pub(crate) fn new(pulse: &PulseShape, grid: &TimeGrid) -> Self {
        let half = 0.5 * grid.dt;
        let mut samples = Vec::with_capacity(2 * grid.n_steps + 1);
        for k in 0..grid.n_steps {
            let t = grid.time(k);
            samples.push(pulse.rabi_at(t));
            samples.push(pulse.rabi_at(t + half));
        }
        samples.push(pulse.rabi_at(grid.time(grid.n_steps)));
        RabiTable { samples }
    }

    /// `(Ω(t_k), Ω(t_k + dt/2), Ω(t_{k+1}))`.
    #[inline(always)]
    pub(crate) fn step(&self, k: usize) -> (f64, f64, f64) {
        let i = 2 * k;
        (self.samples[i], self.samples[i + 1], self.samples[i + 2])
    }
}

/// Ground and excited amplitudes of one class.
pub(crate) type Amplitudes = (Complex64, Complex64);

#[inline(always)]
fn derivative(
    (alpha, beta): Amplitudes,
    omega: f64,
    damping: Complex64,
) -> Amplitudes {
    // −iΩβ and −iΩα − (Γ + iΔ)β
    let d_alpha = Complex64::new(omega * beta.im, -omega * beta.re);
    let d_beta = Complex64::new(omega * alpha.im, -omega * alpha.re) - damping * beta;
    (d_alpha, d_beta)
}

/// One classical RK4 step. `damping = Γ + iΔ`.
#[inline(always)]
pub(crate) fn rk4_step(
    state: Amplitudes,
    (omega_0, omega_mid, omega_1): (f64, f64, f64),
    damping: Complex64,
    dt: f64,
) -> Amplitudes {
    let half = 0.5 * dt;
    let (a, b) = state;
    let k1 = derivative(state, omega_0, damping);
    let k2 = derivative((a + k1.0 * half, b + k1.1 * half), omega_mid, damping);
    let k3 = derivative((a + k2.0 * half, b + k2.1 * half), omega_mid, damping);
    let k4 = derivative((a + k3.0 * dt, b + k3.1 * dt), omega_1, damping);
    let sixth = dt / 6.0;
    (
        a + (k1.0 + (k2.0 + k3.0) * 2.0 + k4.0) * sixth,
        b + (k1.1 + (k2.1 + k3.1) * 2.0 + k4.1) * sixth,
    )
}

#[inline]
pub(crate) fn damping(atom: &AtomParams) -> Complex64 {
    Complex64::new(atom.decay, atom.detuning)
}

pub(crate) const INITIAL: Amplitudes = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));

/// `α(t)` and `β(t)` for one class on a uniform grid starting at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTrajectory {
    pub times: Vec<f64>,
    pub alpha: Vec<Complex64>,
    pub beta: Vec<Complex64>,
}

impl AmplitudeTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `|α_k|² + |β_k|²` for every grid point.
    pub fn norms(&self) -> Vec<f64> {
        self.alpha
            .iter()
            .zip(&self.beta)
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .collect()
    }

    /// Excited-state population `|β_k|²`.
    pub fn excited_population(&self) -> Vec<f64> {
        self.beta.iter().map(|b| b.norm_sqr()).collect()
    }
}

/// Integrates one class from `t = 0` to `t_end` with step `dt`.
pub fn integrate_two_level(
    pulse: &PulseShape,
    atom: &AtomParams,
    t_end: f64,
    dt: f64,
) -> Result<AmplitudeTrajectory> {
    pulse.validate()?;
    atom.validate()?;
    let grid = TimeGrid::new(t_end, dt)?;
    let table = RabiTable::new(pulse, &grid);
    let (alpha, beta) = integrate_on(&table, &grid, atom)?;
    Ok(AmplitudeTrajectory {
        times: grid.times(),
        alpha,
        beta,
    })
}

pub(crate) fn integrate_on(
    table: &RabiTable,
    grid: &TimeGrid,
    atom: &AtomParams,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let damping = damping(atom);
    let mut alpha = Vec::with_capacity(grid.len());
    let mut beta = Vec::with_capacity(grid.len());
    let mut state = INITIAL;
    alpha.push(state.0);
    beta.push(state.1);
    for k in 0..grid.n_steps {
        state = rk4_step(state, table.step(k), damping, grid.dt);
        alpha.push(state.0);
        beta.push(state.1);
    }
    if let Some(k) = alpha
        .iter()
        .zip(&beta)
        .position(|(a, b)| !(a.is_finite() && b.is_finite()))
    {
        return Err(Error::NonFinite {
            time: grid.time(k),
            detuning: atom.detuning,
        });
    }
    Ok((alpha, beta))
}
