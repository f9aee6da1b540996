//! Averages over an inhomogeneously broadened spectral distribution.
//!
//! The distribution `n(Δ)` is discretized into a [`QuadratureGrid`] whose
//! weights absorb `n(Δ) dΔ / N`, so the atom number never appears. On that
//! grid
//!
//! ```text
//! p_e(t)   = Σ_j w_j |β(t, Δ_j)|²
//! C(t_S)   = |Σ_j w_j β(t_S, Δ_j)|² / Σ_j w_j |β(t_S, Δ_j)|²
//! ```
//!
//! All sums run in node-index order so results do not depend on how the
//! per-class trajectories were scheduled.

use ndarray::{Array2, ArrayView1, Axis};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{self, AtomParams, RabiTable, TimeGrid};
use crate::error::{Error, Result};
use crate::pulse::PulseShape;

const FOUR_LN2: f64 = 4.0 * std::f64::consts::LN_2;

/// Default number of quadrature nodes.
pub const DEFAULT_NODES: usize = 2001;

/// Default half-width of the detuning window, in Gaussian standard deviations.
pub const DEFAULT_SPAN_SIGMAS: f64 = 8.0;

/// Below this excited population the collectivity is reported as undefined.
pub const UNDEFINED_BELOW: f64 = 1e-30;

/// Gaussian distribution of atomic detunings from the laser.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralDistribution {
    /// FWHM `σ`, rad/μs. Zero means a homogeneous ensemble.
    pub fwhm: f64,
    /// `Δ₀`, detuning of the laser from the distribution center, rad/μs.
    pub center_offset: f64,
}

impl SpectralDistribution {
    pub fn new(fwhm: f64, center_offset: f64) -> Result<Self> {
        let dist = SpectralDistribution {
            fwhm,
            center_offset,
        };
        dist.validate()?;
        Ok(dist)
    }

    pub fn homogeneous(center_offset: f64) -> Self {
        SpectralDistribution {
            fwhm: 0.0,
            center_offset,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fwhm.is_finite() && self.fwhm >= 0.0) {
            return Err(Error::invalid("fwhm", format!("must be finite and >= 0, got {}", self.fwhm)));
        }
        if !self.center_offset.is_finite() {
            return Err(Error::invalid(
                "center_offset",
                format!("must be finite, got {}", self.center_offset),
            ));
        }
        Ok(())
    }

    /// Gaussian standard deviation `σ / (2√(2 ln2))`.
    pub fn std_dev(&self) -> f64 {
        self.fwhm / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt())
    }

    /// Unnormalized density, equal to 1 at `Δ₀`.
    pub fn density(&self, detuning: f64) -> f64 {
        let offset = detuning - self.center_offset;
        if self.fwhm == 0.0 {
            return if offset == 0.0 { 1.0 } else { 0.0 };
        }
        let x = offset / self.fwhm;
        (-FOUR_LN2 * x * x).exp()
    }
}

/// Detuning nodes with normalized non-negative weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureGrid {
    /// Checks the grid invariants: equal non-zero lengths, strictly increasing
    /// nodes, non-negative weights summing to one.
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} weights (>= 1)", nodes.len()),
                found: weights.len().to_string(),
            });
        }
        if nodes.iter().any(|d| !d.is_finite()) || nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("nodes", "must be finite and strictly increasing"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::invalid("weights", "must be finite and non-negative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("weights", format!("sum to {total}, expected 1")));
        }
        Ok(QuadratureGrid { nodes, weights })
    }

    pub fn single(detuning: f64) -> Self {
        QuadratureGrid {
            nodes: vec![detuning],
            weights: vec![1.0],
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Index of the node closest to `detuning`.
    pub fn nearest(&self, detuning: f64) -> usize {
        self.nodes
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - detuning).abs().total_cmp(&(b.1 - detuning).abs()))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    /// Node spacing (0 for a single node).
    pub fn spacing(&self) -> f64 {
        if self.len() < 2 {
            0.0
        } else {
            (self.nodes[self.len() - 1] - self.nodes[0]) / (self.len() - 1) as f64
        }
    }
}

/// Uniform grid over `Δ₀ ± span_sigmas · σ_G` with Gaussian weights.
///
/// `n_nodes` must be odd so that `Δ₀` is itself a node. Each node stands for
/// an equal-width cell, so the weights are the density samples renormalized to
/// sum to one. A homogeneous distribution (`fwhm = 0`) takes exactly one node.
pub fn build_grid(
    dist: &SpectralDistribution,
    n_nodes: usize,
    span_sigmas: f64,
) -> Result<QuadratureGrid> {
    dist.validate()?;
    if n_nodes < 1 || n_nodes.is_multiple_of(2) {
        return Err(Error::invalid("n_nodes", format!("must be odd and >= 1, got {n_nodes}")));
    }
    if !(span_sigmas.is_finite() && span_sigmas > 0.0) {
        return Err(Error::invalid(
            "span_sigmas",
            format!("must be finite and > 0, got {span_sigmas}"),
        ));
    }
    if dist.fwhm == 0.0 {
        if n_nodes != 1 {
            return Err(Error::invalid(
                "n_nodes",
                format!("a homogeneous distribution takes exactly 1 node, got {n_nodes}"),
            ));
        }
        return Ok(QuadratureGrid::single(dist.center_offset));
    }
    if n_nodes == 1 {
        return Ok(QuadratureGrid::single(dist.center_offset));
    }

    let half_width = span_sigmas * dist.std_dev();
    let middle = (n_nodes - 1) / 2;
    let spacing = half_width / middle as f64;
    // offsets are built from the middle outwards so ±offsets are exact negatives
    let offsets: Vec<f64> = (0..n_nodes)
        .map(|i| {
            if i >= middle {
                (i - middle) as f64 * spacing
            } else {
                -((middle - i) as f64 * spacing)
            }
        })
        .collect();
    let density: Vec<f64> = offsets
        .iter()
        .map(|&x| {
            let r = x / dist.fwhm;
            (-FOUR_LN2 * r * r).exp()
        })
        .collect();
    // pairwise from the outside in, so the total is symmetric in the offsets
    let mut total = density[middle];
    for i in 1..=middle {
        total += density[middle - i] + density[middle + i];
    }
    let nodes = offsets.iter().map(|x| dist.center_offset + x).collect::<Vec<_>>();
    if nodes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "n_nodes",
            "node spacing is below the floating-point resolution of the center offset",
        ));
    }
    Ok(QuadratureGrid {
        nodes,
        weights: density.into_iter().map(|d| d / total).collect(),
    })
}

/// Integrates every node of `grid` and collects `β` as a `(time × node)` matrix.
///
/// Column `k` is bit-identical to `integrate_two_level` at node `k`.
pub fn ensemble_trajectories(
    pulse: &PulseShape,
    grid: &QuadratureGrid,
    decay: f64,
    t_end: f64,
    dt: f64,
) -> Result<Array2<Complex64>> {
    pulse.validate()?;
    let times = TimeGrid::new(t_end, dt)?;
    let atoms = grid
        .nodes
        .iter()
        .map(|&d| AtomParams::new(d, decay))
        .collect::<Result<Vec<_>>>()?;
    let table = RabiTable::new(pulse, &times);
    let columns = atoms
        .par_iter()
        .map(|atom| dynamics::integrate_on(&table, &times, atom).map(|(_, beta)| beta))
        .collect::<Result<Vec<_>>>()?;
    let mut betas = Array2::zeros((times.len(), grid.len()));
    for (mut column, values) in betas.axis_iter_mut(Axis(1)).zip(columns) {
        for (slot, value) in column.iter_mut().zip(values) {
            *slot = value;
        }
    }
    Ok(betas)
}

fn weighted_population<'a>(weights: &[f64], betas: impl Iterator<Item = &'a Complex64>) -> f64 {
    let mut sum = 0.0;
    for (w, b) in weights.iter().zip(betas) {
        sum += w * b.norm_sqr();
    }
    sum
}

fn weighted_amplitude<'a>(
    weights: &[f64],
    betas: impl Iterator<Item = &'a Complex64>,
) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for (w, b) in weights.iter().zip(betas) {
        sum += b * w;
    }
    sum
}

fn collectivity_ratio(amplitude: Complex64, population: f64) -> Option<f64> {
    if population < UNDEFINED_BELOW {
        None
    } else {
        Some((amplitude.norm_sqr() / population).clamp(0.0, 1.0))
    }
}

fn row<'a>(
    betas: &'a Array2<Complex64>,
    grid: &QuadratureGrid,
    k: usize,
) -> Result<ArrayView1<'a, Complex64>> {
    if betas.ncols() != grid.len() {
        return Err(Error::ShapeMismatch {
            expected: format!("{} node columns", grid.len()),
            found: betas.ncols().to_string(),
        });
    }
    if k >= betas.nrows() {
        return Err(Error::ShapeMismatch {
            expected: format!("time index < {}", betas.nrows()),
            found: k.to_string(),
        });
    }
    Ok(betas.row(k))
}

/// `p_e` at time index `k`: the weighted mean of `|β|²` over the nodes.
pub fn excited_population(
    betas: &Array2<Complex64>,
    grid: &QuadratureGrid,
    k: usize,
) -> Result<f64> {
    let row = row(betas, grid, k)?;
    Ok(weighted_population(&grid.weights, row.iter()))
}

/// Collectivity at time index `k`, or `None` when the excited population is
/// below [`UNDEFINED_BELOW`] and no Stokes photon can herald a state.
pub fn collectivity(
    betas: &Array2<Complex64>,
    grid: &QuadratureGrid,
    k: usize,
) -> Result<Option<f64>> {
    let row = row(betas, grid, k)?;
    let amplitude = weighted_amplitude(&grid.weights, row.iter());
    let population = weighted_population(&grid.weights, row.iter());
    Ok(collectivity_ratio(amplitude, population))
}

/// `n(Δ_k) |β(t₀, Δ_k)|²` on the grid nodes, `n` normalized to peak 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralProfile {
    pub t0: f64,
    /// Detunings from the laser, rad/μs.
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
}

impl SpectralProfile {
    fn from_row<'a>(
        t0: f64,
        dist: &SpectralDistribution,
        grid: &QuadratureGrid,
        betas: impl Iterator<Item = &'a Complex64>,
    ) -> Self {
        let values = grid
            .nodes
            .iter()
            .zip(betas)
            .map(|(&d, b)| dist.density(d) * b.norm_sqr())
            .collect();
        SpectralProfile {
            t0,
            nodes: grid.nodes.clone(),
            values,
        }
    }

    /// Fraction of the profile's integral carried by nodes with `|Δ| < width`.
    pub fn fraction_within(&self, width: f64) -> f64 {
        let total: f64 = self.values.iter().sum();
        if total == 0.0 {
            return 0.0;
        }
        let inner: f64 = self
            .nodes
            .iter()
            .zip(&self.values)
            .filter(|(d, _)| d.abs() < width)
            .map(|(_, v)| v)
            .sum();
        inner / total
    }

    /// Detuning of the largest profile value.
    pub fn peak_detuning(&self) -> f64 {
        self.nodes
            .iter()
            .zip(&self.values)
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(d, _)| *d)
            .unwrap_or(f64::NAN)
    }
}

/// Spectral contribution profile at time index `k`.
pub fn spectral_contribution(
    betas: &Array2<Complex64>,
    dist: &SpectralDistribution,
    grid: &QuadratureGrid,
    k: usize,
    dt: f64,
) -> Result<SpectralProfile> {
    let row = row(betas, grid, k)?;
    Ok(SpectralProfile::from_row(k as f64 * dt, dist, grid, row.iter()))
}

/// Full input record of an ensemble run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleParams {
    pub pulse: PulseShape,
    pub distribution: SpectralDistribution,
    /// `Γ`, rad/μs.
    pub decay: f64,
    pub t_end: f64,
    pub dt: f64,
    pub n_nodes: usize,
    pub span_sigmas: f64,
    /// Time of the spectral profile snapshot, μs.
    pub t0: Option<f64>,
}

impl EnsembleParams {
    /// Default time grid and quadrature: 0.5 μs at 1e−5 μs
    /// steps, [`DEFAULT_NODES`] nodes over ±[`DEFAULT_SPAN_SIGMAS`] standard
    /// deviations, spectral snapshot at 0.2 μs.
    ///
    /// The node spacing must keep `2π / spacing` beyond `t_end`: a uniform comb
    /// of classes rephases after that time and fakes an echo of the pulse. The
    /// window must also reach the resonant classes at `Δ = 0`.
    pub fn with_defaults(pulse: PulseShape, distribution: SpectralDistribution, decay: f64) -> Self {
        EnsembleParams {
            pulse,
            distribution,
            decay,
            t_end: 0.5,
            dt: 1e-5,
            n_nodes: if distribution.fwhm == 0.0 { 1 } else { DEFAULT_NODES },
            span_sigmas: DEFAULT_SPAN_SIGMAS,
            t0: Some(0.2),
        }
    }
}

/// `p_e(t)`, `C(t)`, and optionally the spectral profile of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub times: Vec<f64>,
    pub p_e: Vec<f64>,
    /// `None` where the excited population is too small to define `C`.
    pub collectivity: Vec<Option<f64>>,
    pub spectrum: Option<SpectralProfile>,
    pub params: EnsembleParams,
}

impl EnsembleResult {
    pub fn index_of(&self, t: f64) -> Option<usize> {
        TimeGrid::new(self.params.t_end, self.params.dt)
            .ok()?
            .index_of(t)
    }

    pub fn collectivity_at(&self, t: f64) -> Option<f64> {
        self.index_of(t).and_then(|k| self.collectivity[k])
    }

    pub fn p_e_at(&self, t: f64) -> Option<f64> {
        self.index_of(t).map(|k| self.p_e[k])
    }

    pub fn p_e_max(&self) -> f64 {
        self.p_e.iter().copied().fold(0.0, f64::max)
    }
}

/// Integrates all classes in lockstep and reduces `p_e`, `C`, and the
/// spectral profile on the fly, without holding the `(time × node)` matrix.
///
/// Each class goes through exactly the same arithmetic as
/// [`integrate_two_level`](crate::dynamics::integrate_two_level), and the sums
/// match [`excited_population`] and [`collectivity`] bit for bit.
pub fn run_ensemble(params: &EnsembleParams) -> Result<EnsembleResult> {
    params.pulse.validate()?;
    let grid = build_grid(&params.distribution, params.n_nodes, params.span_sigmas)?;
    let times = TimeGrid::new(params.t_end, params.dt)?;
    let snapshot = match params.t0 {
        Some(t0) => Some(times.index_of(t0).ok_or_else(|| {
            Error::invalid("t0", format!("{t0} lies outside [0, {}]", params.t_end))
        })?),
        None => None,
    };
    let dampings = grid
        .nodes
        .iter()
        .map(|&d| AtomParams::new(d, params.decay).map(|a| dynamics::damping(&a)))
        .collect::<Result<Vec<_>>>()?;
    let table = RabiTable::new(&params.pulse, &times);

    let mut states = vec![dynamics::INITIAL; grid.len()];
    let mut p_e = Vec::with_capacity(times.len());
    let mut collectivity = Vec::with_capacity(times.len());
    let mut spectrum = None;

    for k in 0..times.len() {
        if k > 0 {
            let omega = table.step(k - 1);
            for (state, &damping) in states.iter_mut().zip(&dampings) {
                *state = dynamics::rk4_step(*state, omega, damping, times.dt);
            }
        }
        let population = weighted_population(&grid.weights, states.iter().map(|s| &s.1));
        if !population.is_finite() {
            let bad = states
                .iter()
                .position(|s| !(s.0.is_finite() && s.1.is_finite()))
                .unwrap_or(0);
            return Err(Error::NonFinite {
                time: times.time(k),
                detuning: grid.nodes[bad],
            });
        }
        let amplitude = weighted_amplitude(&grid.weights, states.iter().map(|s| &s.1));
        p_e.push(population);
        collectivity.push(collectivity_ratio(amplitude, population));
        if snapshot == Some(k) {
            spectrum = Some(SpectralProfile::from_row(
                times.time(k),
                &params.distribution,
                &grid,
                states.iter().map(|s| &s.1),
            ));
        }
    }

    Ok(EnsembleResult {
        times: times.times(),
        p_e,
        collectivity,
        spectrum,
        params: *params,
    })
}
