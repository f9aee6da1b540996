//! Collectivity of single atomic excitations heralded by spontaneous Raman
//! emission in inhomogeneously broadened ensembles.
//!
//! Units throughout the library: time in μs, every frequency (Rabi
//! frequency, detuning, decay, spectral width) in rad/μs. A linear frequency
//! of 1 MHz corresponds to `2π` rad/μs; see [`mhz_to_angular`].
//!
//! * [`pulse`]: write-pulse envelopes and their areas.
//! * [`dynamics`]: fixed-step RK4 integration of the driven, detuned,
//!   decaying two-level amplitudes `(α, β)`.
//! * [`ensemble`]: quadrature over the spectral distribution, excited
//!   population `p_e(t)`, collectivity `C(t_S)`, and the spectral profile.
//! * [`oracles`]: closed-form and brute-force reference solutions used by
//!   the test suites.

pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod oracles;
pub mod pulse;

pub use dynamics::{integrate_two_level, AmplitudeTrajectory, AtomParams, TimeGrid};
pub use ensemble::{
    build_grid, collectivity, ensemble_trajectories, excited_population, run_ensemble,
    spectral_contribution, EnsembleParams, EnsembleResult, QuadratureGrid, SpectralDistribution,
    SpectralProfile,
};
pub use error::{Error, Result};
pub use pulse::{pulse_area, rabi_at, PulseShape};

pub use num_complex::Complex64;

/// Converts a linear frequency in MHz to an angular frequency in rad/μs.
#[inline]
pub fn mhz_to_angular(mhz: f64) -> f64 {
    std::f64::consts::TAU * mhz
}

/// Converts an angular frequency in rad/μs back to linear MHz.
#[inline]
pub fn angular_to_mhz(omega: f64) -> f64 {
    omega / std::f64::consts::TAU
}
