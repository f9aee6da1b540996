//! The four subcommands. Each returns the paths it wrote, in write order.

use std::path::{Path, PathBuf};

use collectivity_core::{angular_to_mhz, integrate_two_level, run_ensemble, EnsembleResult};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{fmt_label, fmt_sci, CsvWriter};
use crate::svg::{Plot, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// Single-atom |β(t)| for each detuning in the Δ₀ list.
    Single,
    /// p_e(t) and C(t) for every (Δ₀, Γ) pair.
    Ensemble,
    /// n(Δ)|β(t₀, Δ)|² for every (Δ₀, Γ) pair.
    Spectrum,
    /// Ensemble and spectrum files plus a summary table.
    Sweep,
}

impl Command {
    pub fn run(self, cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
        match self {
            Command::Single => cmd_single(cfg),
            Command::Ensemble => cmd_ensemble(cfg),
            Command::Spectrum => cmd_spectrum(cfg),
            Command::Sweep => cmd_sweep(cfg),
        }
    }
}

fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// `(Δ₀, Γ)` pairs in MHz, Δ₀-major.
fn cells(cfg: &RunConfig) -> Vec<(f64, f64)> {
    cfg.delta0_list
        .iter()
        .flat_map(|&d| cfg.gamma_list.iter().map(move |&g| (d, g)))
        .collect()
}

type Cell = ((f64, f64), EnsembleResult);

fn run_cells(cfg: &RunConfig) -> Result<Vec<Cell>, CliError> {
    cells(cfg)
        .into_par_iter()
        .map(|(d, g)| Ok(((d, g), run_ensemble(&cfg.ensemble_params(d, g))?)))
        .collect()
}

fn cell_name(prefix: &str, delta0: f64, gamma: f64) -> String {
    format!("{prefix}_d{}_g{}.csv", fmt_label(delta0), fmt_label(gamma))
}

fn color_of(cfg: &RunConfig, delta0: f64) -> usize {
    cfg.delta0_list.iter().position(|&d| d == delta0).unwrap_or(0)
}

/// Writes `single_<Δ>.csv` per detuning (decay: first entry of the Γ list)
/// and optionally `single.svg`.
pub fn cmd_single(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    prepare_dir(&cfg.output_dir)?;
    let gamma = cfg.gamma_list[0];
    let pulse = cfg.pulse_shape();
    let trajectories = cfg
        .delta0_list
        .par_iter()
        .map(|&d| integrate_two_level(&pulse, &cfg.atom(d, gamma), cfg.t_end, cfg.dt))
        .collect::<Result<Vec<_>, _>>()?;

    let header = cfg.header();
    let mut written = Vec::new();
    for (&d, tr) in cfg.delta0_list.iter().zip(&trajectories) {
        let path = cfg.output_dir.join(format!("single_{}.csv", fmt_label(d)));
        let mut csv = CsvWriter::create(
            &path,
            &header,
            &["t_us", "abs_beta", "re_beta", "im_beta", "re_alpha", "im_alpha"],
        )?;
        for k in 0..tr.len() {
            let (a, b) = (tr.alpha[k], tr.beta[k]);
            csv.row(&[
                fmt_sci(tr.times[k]),
                fmt_sci(b.norm()),
                fmt_sci(b.re),
                fmt_sci(b.im),
                fmt_sci(a.re),
                fmt_sci(a.im),
            ])?;
        }
        written.push(csv.finish()?);
    }

    if cfg.svg {
        let mut plot = Plot::new(
            "Single atom: excited-state amplitude",
            "t (us)",
            "|beta(t)|",
        );
        plot.comment = header.clone();
        let mut top: f64 = 0.0;
        for (i, (&d, tr)) in cfg.delta0_list.iter().zip(&trajectories).enumerate() {
            let ys: Vec<f64> = tr.beta.iter().map(|b| b.norm()).collect();
            top = ys.iter().copied().fold(top, f64::max);
            plot.series.push(
                Series::new(format!("Delta = {} MHz", fmt_label(d)), tr.times.clone(), ys)
                    .color(i),
            );
        }
        if let Some(tr) = trajectories.first() {
            let peak = pulse.peak_rabi();
            if peak > 0.0 {
                let ys = tr.times.iter().map(|&t| top * pulse.rabi_at(t) / peak).collect();
                plot.series.push(
                    Series::new("Omega(t) (scaled)", tr.times.clone(), ys)
                        .color(9)
                        .width(0.6),
                );
            }
        }
        let path = cfg.output_dir.join("single.svg");
        plot.write(&path)?;
        written.push(path);
    }
    Ok(written)
}

fn write_ensemble_csv(
    cfg: &RunConfig,
    (delta0, gamma): (f64, f64),
    result: &EnsembleResult,
) -> Result<PathBuf, CliError> {
    let path = cfg.output_dir.join(cell_name("ensemble", delta0, gamma));
    let mut csv = CsvWriter::create(
        &path,
        &cfg.header(),
        &["t_us", "p_e", "collectivity", "defined_flag"],
    )?;
    for k in 0..result.times.len() {
        let c = result.collectivity[k];
        csv.row(&[
            fmt_sci(result.times[k]),
            fmt_sci(result.p_e[k]),
            fmt_sci(c.unwrap_or(f64::NAN)),
            if c.is_some() { "1" } else { "0" }.to_string(),
        ])?;
    }
    csv.finish()
}

fn write_spectrum_csv(
    cfg: &RunConfig,
    (delta0, gamma): (f64, f64),
    result: &EnsembleResult,
) -> Result<PathBuf, CliError> {
    let path = cfg.output_dir.join(cell_name("spectrum", delta0, gamma));
    let mut csv = CsvWriter::create(&path, &cfg.header(), &["delta_MHz", "n_times_beta2"])?;
    if let Some(profile) = &result.spectrum {
        for (&d, &v) in profile.nodes.iter().zip(&profile.values) {
            csv.row(&[fmt_sci(angular_to_mhz(d)), fmt_sci(v)])?;
        }
    }
    csv.finish()
}

fn omega_squared_reference(cfg: &RunConfig, times: &[f64], scale: f64) -> Series {
    let pulse = cfg.pulse_shape();
    let peak = pulse.peak_rabi();
    let ys = times
        .iter()
        .map(|&t| {
            let r = if peak > 0.0 { pulse.rabi_at(t) / peak } else { 0.0 };
            scale * r * r
        })
        .collect();
    Series::new("Omega^2(t) (scaled)", times.to_vec(), ys)
        .color(9)
        .width(0.6)
}

fn ensemble_plots(
    cfg: &RunConfig,
    results: &[((f64, f64), EnsembleResult)],
) -> Result<Vec<PathBuf>, CliError> {
    let label = |d: f64, g: f64| format!("D0 = {} MHz, G = {} MHz", fmt_label(d), fmt_label(g));
    let mut pe = Plot::new("Average excited-state population", "t (us)", "p_e(t)");
    pe.log_y = true;
    pe.comment = cfg.header();
    let mut coll = Plot::new("Collectivity", "t_S (us)", "C(t_S)");
    coll.comment = cfg.header();
    let mut top: f64 = 0.0;
    for ((d, g), r) in results {
        top = top.max(r.p_e_max());
        let style = |s: Series| s.color(color_of(cfg, *d)).dashed(*g != 0.0);
        pe.series
            .push(style(Series::new(label(*d, *g), r.times.clone(), r.p_e.clone())));
        let c = r.collectivity.iter().map(|c| c.unwrap_or(f64::NAN)).collect();
        coll.series
            .push(style(Series::new(label(*d, *g), r.times.clone(), c)));
    }
    if let Some((_, r)) = results.first() {
        pe.series.push(omega_squared_reference(cfg, &r.times, top));
        coll.series.push(omega_squared_reference(cfg, &r.times, 1.0));
    }
    let pe_path = cfg.output_dir.join("ensemble_pe.svg");
    pe.write(&pe_path)?;
    let c_path = cfg.output_dir.join("ensemble_collectivity.svg");
    coll.write(&c_path)?;
    Ok(vec![pe_path, c_path])
}

fn spectrum_plot(
    cfg: &RunConfig,
    results: &[((f64, f64), EnsembleResult)],
) -> Result<PathBuf, CliError> {
    let mut plot = Plot::new(
        format!("n(Delta) |beta(t0, Delta)|^2 at t0 = {} us", cfg.t0_spectrum),
        "Delta (MHz)",
        "n |beta|^2 (arb. units)",
    );
    plot.log_y = true;
    plot.comment = cfg.header();
    for ((d, g), r) in results {
        if let Some(p) = &r.spectrum {
            let xs = p.nodes.iter().map(|&x| angular_to_mhz(x)).collect();
            plot.series.push(
                Series::new(
                    format!("D0 = {} MHz, G = {} MHz", fmt_label(*d), fmt_label(*g)),
                    xs,
                    p.values.clone(),
                )
                .color(color_of(cfg, *d))
                .dashed(*g != 0.0),
            );
        }
    }
    let path = cfg.output_dir.join("spectrum.svg");
    plot.write(&path)?;
    Ok(path)
}

/// Writes `ensemble_d<Δ₀>_g<Γ>.csv` per cell and optionally the p_e and C plots.
pub fn cmd_ensemble(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    prepare_dir(&cfg.output_dir)?;
    let results = run_cells(cfg)?;
    let mut written = results
        .iter()
        .map(|(cell, r)| write_ensemble_csv(cfg, *cell, r))
        .collect::<Result<Vec<_>, _>>()?;
    if cfg.svg {
        written.extend(ensemble_plots(cfg, &results)?);
    }
    Ok(written)
}

/// Writes `spectrum_d<Δ₀>_g<Γ>.csv` per cell and optionally `spectrum.svg`.
pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    prepare_dir(&cfg.output_dir)?;
    let results = run_cells(cfg)?;
    let mut written = results
        .iter()
        .map(|(cell, r)| write_spectrum_csv(cfg, *cell, r))
        .collect::<Result<Vec<_>, _>>()?;
    if cfg.svg {
        written.push(spectrum_plot(cfg, &results)?);
    }
    Ok(written)
}

/// Runs every `(Δ₀, Γ)` cell once and writes the ensemble and spectrum files
/// plus `summary.csv`, one row per cell in Δ₀-major order.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    prepare_dir(&cfg.output_dir)?;
    let results = run_cells(cfg)?;
    let mut written = Vec::new();
    for (cell, r) in &results {
        written.push(write_ensemble_csv(cfg, *cell, r)?);
        written.push(write_spectrum_csv(cfg, *cell, r)?);
    }

    let path = cfg.output_dir.join("summary.csv");
    let mut csv = CsvWriter::create(
        &path,
        &cfg.header(),
        &["delta0_MHz", "gamma_MHz", "C_at_pulse_center", "p_e_max"],
    )?;
    let center = cfg.pulse_center();
    for ((d, g), r) in &results {
        csv.row(&[
            fmt_sci(*d),
            fmt_sci(*g),
            fmt_sci(r.collectivity_at(center).unwrap_or(f64::NAN)),
            fmt_sci(r.p_e_max()),
        ])?;
    }
    written.push(csv.finish()?);

    if cfg.svg {
        written.extend(ensemble_plots(cfg, &results)?);
        written.push(spectrum_plot(cfg, &results)?);
    }
    Ok(written)
}
