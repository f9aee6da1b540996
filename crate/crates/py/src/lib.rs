//! Python bindings. All quantities are in the core units: μs and rad/μs.

use collectivity_core as core;
use collectivity_core::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

fn to_py(err: core::Error) -> PyErr {
    match err {
        core::Error::InvalidParameter { .. } => PyValueError::new_err(err.to_string()),
        _ => PyArithmeticError::new_err(err.to_string()),
    }
}

/// Drive envelope `Ω(t)`.
#[pyclass(name = "PulseShape", frozen, from_py_object)]
#[derive(Clone)]
struct PyPulseShape(core::PulseShape);

#[pymethods]
impl PyPulseShape {
    #[staticmethod]
    fn gaussian(peak_rabi: f64, center: f64, fwhm: f64) -> PyResult<Self> {
        core::PulseShape::gaussian(peak_rabi, center, fwhm).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn constant(peak_rabi: f64) -> PyResult<Self> {
        core::PulseShape::constant(peak_rabi).map(Self).map_err(to_py)
    }

    #[getter]
    fn peak_rabi(&self) -> f64 {
        self.0.peak_rabi()
    }

    fn rabi_at(&self, t: f64) -> f64 {
        self.0.rabi_at(t)
    }

    #[pyo3(signature = (t0=f64::NEG_INFINITY, t1=f64::INFINITY))]
    fn area(&self, t0: f64, t1: f64) -> PyResult<f64> {
        core::pulse_area(&self.0, t0, t1).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

/// Detuning and excited-state decay of one atom.
#[pyclass(name = "AtomParams", frozen, from_py_object)]
#[derive(Clone)]
struct PyAtomParams(core::AtomParams);

#[pymethods]
impl PyAtomParams {
    #[new]
    #[pyo3(signature = (detuning, decay=0.0))]
    fn new(detuning: f64, decay: f64) -> PyResult<Self> {
        core::AtomParams::new(detuning, decay).map(Self).map_err(to_py)
    }

    #[getter]
    fn detuning(&self) -> f64 {
        self.0.detuning
    }

    #[getter]
    fn decay(&self) -> f64 {
        self.0.decay
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

/// Gaussian distribution of detunings.
#[pyclass(name = "SpectralDistribution", frozen, from_py_object)]
#[derive(Clone)]
struct PySpectralDistribution(core::SpectralDistribution);

#[pymethods]
impl PySpectralDistribution {
    #[new]
    #[pyo3(signature = (fwhm, center_offset=0.0))]
    fn new(fwhm: f64, center_offset: f64) -> PyResult<Self> {
        core::SpectralDistribution::new(fwhm, center_offset).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn homogeneous(center_offset: f64) -> Self {
        Self(core::SpectralDistribution::homogeneous(center_offset))
    }

    #[getter]
    fn fwhm(&self) -> f64 {
        self.0.fwhm
    }

    #[getter]
    fn center_offset(&self) -> f64 {
        self.0.center_offset
    }

    fn std_dev(&self) -> f64 {
        self.0.std_dev()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

/// Sampled amplitudes of one atom.
#[pyclass(name = "AmplitudeTrajectory", frozen)]
struct PyTrajectory(core::AmplitudeTrajectory);

#[pymethods]
impl PyTrajectory {
    #[getter]
    fn times(&self) -> Vec<f64> {
        self.0.times.clone()
    }

    #[getter]
    fn alpha(&self) -> Vec<Complex64> {
        self.0.alpha.clone()
    }

    #[getter]
    fn beta(&self) -> Vec<Complex64> {
        self.0.beta.clone()
    }

    fn norms(&self) -> Vec<f64> {
        self.0.norms()
    }

    fn excited_population(&self) -> Vec<f64> {
        self.0.excited_population()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

/// Ensemble averages over time. `collectivity` holds `None` where undefined.
#[pyclass(name = "EnsembleResult", frozen)]
struct PyEnsembleResult(core::EnsembleResult);

#[pymethods]
impl PyEnsembleResult {
    #[getter]
    fn times(&self) -> Vec<f64> {
        self.0.times.clone()
    }

    #[getter]
    fn p_e(&self) -> Vec<f64> {
        self.0.p_e.clone()
    }

    #[getter]
    fn collectivity(&self) -> Vec<Option<f64>> {
        self.0.collectivity.clone()
    }

    /// `(t0, detunings, values)` of the spectral snapshot, if one was taken.
    #[getter]
    fn spectrum(&self) -> Option<(f64, Vec<f64>, Vec<f64>)> {
        self.0
            .spectrum
            .as_ref()
            .map(|s| (s.t0, s.nodes.clone(), s.values.clone()))
    }

    fn collectivity_at(&self, t: f64) -> Option<f64> {
        self.0.collectivity_at(t)
    }

    fn p_e_at(&self, t: f64) -> Option<f64> {
        self.0.p_e_at(t)
    }

    fn p_e_max(&self) -> f64 {
        self.0.p_e_max()
    }
}

#[pyfunction]
fn integrate_two_level(
    pulse: &PyPulseShape,
    atom: &PyAtomParams,
    t_end: f64,
    dt: f64,
) -> PyResult<PyTrajectory> {
    core::integrate_two_level(&pulse.0, &atom.0, t_end, dt)
        .map(PyTrajectory)
        .map_err(to_py)
}

#[pyfunction]
fn rabi_at(pulse: &PyPulseShape, t: f64) -> f64 {
    core::rabi_at(&pulse.0, t)
}

#[pyfunction]
#[pyo3(signature = (pulse, t0=f64::NEG_INFINITY, t1=f64::INFINITY))]
fn pulse_area(pulse: &PyPulseShape, t0: f64, t1: f64) -> PyResult<f64> {
    core::pulse_area(&pulse.0, t0, t1).map_err(to_py)
}

/// Quadrature `(nodes, weights)` for `distribution`.
#[pyfunction]
#[pyo3(signature = (distribution, n_nodes=core::ensemble::DEFAULT_NODES, span_sigmas=core::ensemble::DEFAULT_SPAN_SIGMAS))]
fn build_grid(
    distribution: &PySpectralDistribution,
    n_nodes: usize,
    span_sigmas: f64,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    core::build_grid(&distribution.0, n_nodes, span_sigmas)
        .map(|g| (g.nodes, g.weights))
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (pulse, distribution, decay=0.0, t_end=None, dt=None, n_nodes=None, span_sigmas=None, t0=None))]
#[allow(clippy::too_many_arguments)]
fn run_ensemble(
    py: Python<'_>,
    pulse: &PyPulseShape,
    distribution: &PySpectralDistribution,
    decay: f64,
    t_end: Option<f64>,
    dt: Option<f64>,
    n_nodes: Option<usize>,
    span_sigmas: Option<f64>,
    t0: Option<f64>,
) -> PyResult<PyEnsembleResult> {
    let mut params = core::EnsembleParams::with_defaults(pulse.0, distribution.0, decay);
    params.t_end = t_end.unwrap_or(params.t_end);
    params.dt = dt.unwrap_or(params.dt);
    params.n_nodes = n_nodes.unwrap_or(params.n_nodes);
    params.span_sigmas = span_sigmas.unwrap_or(params.span_sigmas);
    if t0.is_some() {
        params.t0 = t0;
    }
    py.detach(|| core::run_ensemble(&params))
        .map(PyEnsembleResult)
        .map_err(to_py)
}

#[pyfunction]
fn mhz_to_angular(mhz: f64) -> f64 {
    core::mhz_to_angular(mhz)
}

#[pyfunction]
fn angular_to_mhz(w: f64) -> f64 {
    core::angular_to_mhz(w)
}

#[pymodule]
fn collectivity(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPulseShape>()?;
    m.add_class::<PyAtomParams>()?;
    m.add_class::<PySpectralDistribution>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_class::<PyEnsembleResult>()?;
    m.add_function(wrap_pyfunction!(integrate_two_level, m)?)?;
    m.add_function(wrap_pyfunction!(rabi_at, m)?)?;
    m.add_function(wrap_pyfunction!(pulse_area, m)?)?;
    m.add_function(wrap_pyfunction!(build_grid, m)?)?;
    m.add_function(wrap_pyfunction!(run_ensemble, m)?)?;
    m.add_function(wrap_pyfunction!(mhz_to_angular, m)?)?;
    m.add_function(wrap_pyfunction!(angular_to_mhz, m)?)?;
    Ok(())
}
