//! Reference solutions for the integrator and ensemble layers.
//!
//! Nothing here shares code with the production path beyond the pulse
//! envelope: the brute-force collectivity has its own real-valued RK4, its
//! own node placement (trapezoid over ±6σ), and evaluates `Ω` directly.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::ensemble::SpectralDistribution;
use crate::error::{Error, Result};
use crate::pulse::PulseShape;

/// Closed form for `Δ = Γ = 0`: `α = cos θ`, `β = −i sin θ`, `θ = ∫₀ᵗ Ω`.
pub fn resonant_solution(pulse: &PulseShape, t: f64) -> (Complex64, Complex64) {
    let theta = pulse.area(0.0, t);
    (
        Complex64::new(theta.cos(), 0.0),
        Complex64::new(0.0, -theta.sin()),
    )
}

/// Closed form for constant `Ω` and `Γ = 0`.
///
/// With `W = √(Ω² + Δ²/4)`:
/// `β = −i (Ω/W) e^{−iΔt/2} sin(Wt)`,
/// `α = e^{−iΔt/2} [cos(Wt) + i (Δ/2W) sin(Wt)]`.
pub fn constant_rabi_solution(rabi: f64, detuning: f64, t: f64) -> (Complex64, Complex64) {
    let w = (rabi * rabi + 0.25 * detuning * detuning).sqrt();
    if w == 0.0 {
        return (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    }
    let phase = Complex64::from_polar(1.0, -0.5 * detuning * t);
    let (s, c) = (w * t).sin_cos();
    let alpha = phase * Complex64::new(c, 0.5 * detuning / w * s);
    let beta = phase * Complex64::new(0.0, -rabi / w * s);
    (alpha, beta)
}

/// Far-detuned excited amplitude `−Ω(t)/Δ`.
pub fn adiabatic_beta(pulse: &PulseShape, detuning: f64, t: f64) -> Result<Complex64> {
    if detuning == 0.0 || !detuning.is_finite() {
        return Err(Error::invalid("detuning", "adiabatic amplitude needs a finite, non-zero detuning"));
    }
    Ok(Complex64::new(-pulse.rabi_at(t) / detuning, 0.0))
}

/// `β(t_end)` for every detuning by plain RK4 on the four real components,
/// `n_steps` equal steps.
fn excited_amplitudes_at(
    pulse: &PulseShape,
    detunings: &[f64],
    decay: f64,
    t_end: f64,
    n_steps: usize,
) -> Vec<(f64, f64)> {
    // y = [Re α, Im α, Re β, Im β]
    let f = |o: f64, detuning: f64, y: &[f64; 4]| -> [f64; 4] {
        [
            o * y[3],
            -o * y[2],
            o * y[1] - decay * y[2] + detuning * y[3],
            -o * y[0] - detuning * y[2] - decay * y[3],
        ]
    };
    let h = t_end / n_steps as f64;
    let mut ys = vec![[1.0, 0.0, 0.0, 0.0]; detunings.len()];
    for i in 0..n_steps {
        let t = t_end * (i as f64 / n_steps as f64);
        let (o0, om, o1) = (
            pulse.rabi_at(t),
            pulse.rabi_at(t + 0.5 * h),
            pulse.rabi_at(t + h),
        );
        for (y, &d) in ys.iter_mut().zip(detunings) {
            let k1 = f(o0, d, y);
            let y2 = std::array::from_fn(|j| y[j] + 0.5 * h * k1[j]);
            let k2 = f(om, d, &y2);
            let y3 = std::array::from_fn(|j| y[j] + 0.5 * h * k2[j]);
            let k3 = f(om, d, &y3);
            let y4 = std::array::from_fn(|j| y[j] + h * k3[j]);
            let k4 = f(o1, d, &y4);
            for j in 0..4 {
                y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
        }
    }
    ys.into_iter().map(|y| (y[2], y[3])).collect()
}

/// Collectivity at `t_s` recomputed on an independent discretization:
/// trapezoid rule with `fine_nodes` nodes over `Δ₀ ± 6σ_G` and RK4 with step
/// at most `fine_dt`. Returns `None` when nothing is excited.
pub fn brute_force_collectivity(
    pulse: &PulseShape,
    dist: &SpectralDistribution,
    decay: f64,
    t_s: f64,
    fine_nodes: usize,
    fine_dt: f64,
) -> Result<Option<f64>> {
    pulse.validate()?;
    dist.validate()?;
    if !(t_s.is_finite() && t_s > 0.0) {
        return Err(Error::invalid("t_s", format!("must be > 0, got {t_s}")));
    }
    if !(fine_dt.is_finite() && fine_dt > 0.0) {
        return Err(Error::invalid("fine_dt", format!("must be > 0, got {fine_dt}")));
    }
    let n_steps = (t_s / fine_dt).ceil().max(1.0) as usize;

    let (nodes, weights): (Vec<f64>, Vec<f64>) = if dist.fwhm == 0.0 {
        (vec![dist.center_offset], vec![1.0])
    } else {
        if fine_nodes < 2 {
            return Err(Error::invalid("fine_nodes", "trapezoid rule needs at least 2 nodes"));
        }
        let half_width = 6.0 * dist.std_dev();
        let h = 2.0 * half_width / (fine_nodes - 1) as f64;
        (0..fine_nodes)
            .map(|i| {
                let d = dist.center_offset - half_width + i as f64 * h;
                let end = if i == 0 || i == fine_nodes - 1 { 0.5 } else { 1.0 };
                (d, end * dist.density(d))
            })
            .unzip()
    };

    let betas: Vec<(f64, f64)> = nodes
        .par_chunks(256)
        .flat_map_iter(|chunk| excited_amplitudes_at(pulse, chunk, decay, t_s, n_steps))
        .collect();

    let total: f64 = weights.iter().sum();
    let (mut re, mut im, mut pop) = (0.0, 0.0, 0.0);
    for (w, (br, bi)) in weights.iter().zip(&betas) {
        re += w * br;
        im += w * bi;
        pop += w * (br * br + bi * bi);
    }
    if pop / total < crate::ensemble::UNDEFINED_BELOW {
        return Ok(None);
    }
    Ok(Some((re * re + im * im) / (total * pop)))
}
