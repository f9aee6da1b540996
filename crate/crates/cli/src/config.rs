//! JSON run configuration.
//!
//! Every field is optional. Precedence is command-line flag, then file value,
//! then the default. Frequencies are linear MHz, times μs.

use std::path::{Path, PathBuf};

use collectivity_core::{
    mhz_to_angular, AtomParams, EnsembleParams, PulseShape, SpectralDistribution, TimeGrid,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, ConfigError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PulseKind {
    Gaussian,
    Constant,
}

/// The `pulse` object as written in a config file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseFile {
    pub kind: Option<PulseKind>,
    pub peak_rabi: Option<f64>,
    pub center: Option<f64>,
    pub fwhm: Option<f64>,
}

/// A config file as written; absent fields fall back to defaults.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub pulse: Option<PulseFile>,
    pub sigma_fwhm: Option<f64>,
    pub delta0_list: Option<Vec<f64>>,
    pub gamma_list: Option<Vec<f64>>,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub n_nodes: Option<usize>,
    pub span_sigmas: Option<f64>,
    pub t0_spectrum: Option<f64>,
    pub output_dir: Option<PathBuf>,
    pub svg: Option<bool>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut de = serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(&mut de).map_err(|err| {
            let field = err.path().to_string();
            let inner = err.into_inner();
            ConfigError {
                field,
                line: Some(inner.line()),
                message: inner.to_string(),
            }
        })
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub delta0: Option<Vec<f64>>,
    pub gamma: Option<Vec<f64>>,
    pub nodes: Option<usize>,
    pub dt: Option<f64>,
    pub out: Option<PathBuf>,
    pub svg: bool,
}

/// Pulse in user units: `peak_rabi` in MHz, `center` and `fwhm` in μs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PulseConfig {
    pub kind: PulseKind,
    pub peak_rabi: f64,
    pub center: f64,
    pub fwhm: f64,
}

/// Fully resolved configuration, in user units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub pulse: PulseConfig,
    pub sigma_fwhm: f64,
    pub delta0_list: Vec<f64>,
    pub gamma_list: Vec<f64>,
    pub t_end: f64,
    pub dt: f64,
    pub n_nodes: usize,
    pub span_sigmas: f64,
    pub t0_spectrum: f64,
    /// Not part of the recorded config: where a run is written does not
    /// change what it computes.
    #[serde(skip)]
    pub output_dir: PathBuf,
    #[serde(skip)]
    pub svg: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            pulse: PulseConfig {
                kind: PulseKind::Gaussian,
                peak_rabi: 1.0,
                center: 0.2,
                fwhm: 0.1,
            },
            sigma_fwhm: 500.0,
            delta0_list: vec![0.0, 500.0, 750.0, 1000.0, 1250.0],
            gamma_list: vec![0.0, 5.0],
            t_end: 0.5,
            dt: 1e-5,
            n_nodes: collectivity_core::ensemble::DEFAULT_NODES,
            span_sigmas: collectivity_core::ensemble::DEFAULT_SPAN_SIGMAS,
            t0_spectrum: 0.2,
            output_dir: PathBuf::from("out"),
            svg: false,
        }
    }
}

/// Line of the first `"key"` in `text`, 1-based.
fn line_of(text: Option<&str>, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    let text = text?;
    text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
}

impl RunConfig {
    /// Reads and resolves a config file; `None` uses defaults plus overrides.
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self, CliError> {
        match path {
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                Ok(Self::from_str_with(&text, overrides)?)
            }
            None => Ok(Self::resolve(ConfigFile::default(), None, overrides)?),
        }
    }

    pub fn from_str_with(text: &str, overrides: &Overrides) -> Result<Self, ConfigError> {
        let file = ConfigFile::parse(text)?;
        Self::resolve(file, Some(text), overrides)
    }

    /// Applies `file` and `overrides` over the defaults and validates the
    /// result. `text` is the file source, used to report line numbers.
    pub fn resolve(
        file: ConfigFile,
        text: Option<&str>,
        overrides: &Overrides,
    ) -> Result<Self, ConfigError> {
        let d = RunConfig::default();
        let pulse_file = file.pulse.clone().unwrap_or_default();
        let sigma_fwhm = file.sigma_fwhm.unwrap_or(d.sigma_fwhm);
        let homogeneous_nodes = if sigma_fwhm == 0.0 { 1 } else { d.n_nodes };
        let cfg = RunConfig {
            pulse: PulseConfig {
                kind: pulse_file.kind.unwrap_or(d.pulse.kind),
                peak_rabi: pulse_file.peak_rabi.unwrap_or(d.pulse.peak_rabi),
                center: pulse_file.center.unwrap_or(d.pulse.center),
                fwhm: pulse_file.fwhm.unwrap_or(d.pulse.fwhm),
            },
            sigma_fwhm,
            delta0_list: overrides
                .delta0
                .clone()
                .or(file.delta0_list)
                .unwrap_or(d.delta0_list),
            gamma_list: overrides
                .gamma
                .clone()
                .or(file.gamma_list)
                .unwrap_or(d.gamma_list),
            t_end: file.t_end.unwrap_or(d.t_end),
            dt: overrides.dt.or(file.dt).unwrap_or(d.dt),
            n_nodes: overrides.nodes.or(file.n_nodes).unwrap_or(homogeneous_nodes),
            span_sigmas: file.span_sigmas.unwrap_or(d.span_sigmas),
            t0_spectrum: file.t0_spectrum.unwrap_or(d.t0_spectrum),
            output_dir: overrides
                .out
                .clone()
                .or(file.output_dir)
                .unwrap_or(d.output_dir),
            svg: overrides.svg || file.svg.unwrap_or(false),
        };
        let located = |field: &'static str, key: &str, from_flag: bool, message: String| {
            ConfigError {
                field: field.to_string(),
                line: if from_flag { None } else { line_of(text, key) },
                message,
            }
        };
        cfg.validate().map_err(|(field, message)| {
            let from_flag = match field {
                "delta0_list" => overrides.delta0.is_some(),
                "gamma_list" => overrides.gamma.is_some(),
                "dt" => overrides.dt.is_some(),
                "n_nodes" => overrides.nodes.is_some(),
                _ => false,
            };
            let key = field.rsplit('.').next().unwrap_or(field);
            located(field, key, from_flag, message)
        })?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), (&'static str, String)> {
        let p = &self.pulse;
        if !(p.peak_rabi.is_finite() && p.peak_rabi >= 0.0) {
            return Err(("pulse.peak_rabi", format!("must be finite and >= 0, got {}", p.peak_rabi)));
        }
        if p.kind == PulseKind::Gaussian {
            if !p.center.is_finite() {
                return Err(("pulse.center", format!("must be finite, got {}", p.center)));
            }
            if !(p.fwhm.is_finite() && p.fwhm > 0.0) {
                return Err(("pulse.fwhm", format!("must be finite and > 0, got {}", p.fwhm)));
            }
        }
        if !(self.sigma_fwhm.is_finite() && self.sigma_fwhm >= 0.0) {
            return Err(("sigma_fwhm", format!("must be finite and >= 0, got {}", self.sigma_fwhm)));
        }
        if self.delta0_list.is_empty() || self.delta0_list.iter().any(|d| !d.is_finite()) {
            return Err(("delta0_list", "must be a non-empty list of finite values".into()));
        }
        if self.gamma_list.is_empty()
            || self.gamma_list.iter().any(|g| !(g.is_finite() && *g >= 0.0))
        {
            return Err(("gamma_list", "must be a non-empty list of finite values >= 0".into()));
        }
        if let Err(collectivity_core::Error::InvalidParameter { name, reason }) =
            TimeGrid::new(self.t_end, self.dt)
        {
            return Err((if name == "t_end" { "t_end" } else { "dt" }, reason));
        }
        if self.n_nodes == 0 || self.n_nodes.is_multiple_of(2) {
            return Err(("n_nodes", format!("must be odd and >= 1, got {}", self.n_nodes)));
        }
        if self.sigma_fwhm == 0.0 && self.n_nodes != 1 {
            return Err((
                "n_nodes",
                format!("sigma_fwhm = 0 is homogeneous and takes 1 node, got {}", self.n_nodes),
            ));
        }
        if !(self.span_sigmas.is_finite() && self.span_sigmas > 0.0) {
            return Err(("span_sigmas", format!("must be finite and > 0, got {}", self.span_sigmas)));
        }
        if !(self.t0_spectrum >= 0.0 && self.t0_spectrum <= self.t_end) {
            return Err((
                "t0_spectrum",
                format!("must lie in [0, t_end = {}], got {}", self.t_end, self.t0_spectrum),
            ));
        }
        Ok(())
    }

    /// The write pulse in angular units.
    pub fn pulse_shape(&self) -> PulseShape {
        let peak = mhz_to_angular(self.pulse.peak_rabi);
        match self.pulse.kind {
            PulseKind::Gaussian => PulseShape::Gaussian {
                peak_rabi: peak,
                center: self.pulse.center,
                fwhm: self.pulse.fwhm,
            },
            PulseKind::Constant => PulseShape::Constant { peak_rabi: peak },
        }
    }

    pub fn atom(&self, detuning_mhz: f64, gamma_mhz: f64) -> AtomParams {
        AtomParams {
            detuning: mhz_to_angular(detuning_mhz),
            decay: mhz_to_angular(gamma_mhz),
        }
    }

    pub fn distribution(&self, delta0_mhz: f64) -> SpectralDistribution {
        SpectralDistribution {
            fwhm: mhz_to_angular(self.sigma_fwhm),
            center_offset: mhz_to_angular(delta0_mhz),
        }
    }

    pub fn ensemble_params(&self, delta0_mhz: f64, gamma_mhz: f64) -> EnsembleParams {
        EnsembleParams {
            pulse: self.pulse_shape(),
            distribution: self.distribution(delta0_mhz),
            decay: mhz_to_angular(gamma_mhz),
            t_end: self.t_end,
            dt: self.dt,
            n_nodes: self.n_nodes,
            span_sigmas: self.span_sigmas,
            t0: Some(self.t0_spectrum),
        }
    }

    /// Time at which the summary reports `C`: the pulse center, or
    /// `t0_spectrum` for a pulse without one.
    pub fn pulse_center(&self) -> f64 {
        match self.pulse.kind {
            PulseKind::Gaussian if (0.0..=self.t_end).contains(&self.pulse.center) => {
                self.pulse.center
            }
            _ => self.t0_spectrum,
        }
    }

    /// One-line record of the resolved config and the unit convention.
    pub fn header(&self) -> String {
        format!(
            "collectivity-sim {} | units: frequencies in MHz (linear), each multiplied by 2*pi once to rad/us at parse time; times in us | config: {}",
            env!("CARGO_PKG_VERSION"),
            serde_json::to_string(self).expect("config serializes"),
        )
    }
}
