//! Regenerates `tests/golden/` from the default configuration.
//!
//! cargo run --release -p collectivity-sim --example regenerate_golden

use std::fmt::Write as _;
use std::path::Path;

use collectivity_core::oracles::brute_force_collectivity;
use collectivity_sim::output::fmt_sci;
use collectivity_sim::{cmd_sweep, Overrides, RunConfig};
use sha2::{Digest, Sha256};

/// Every this many rows of the full ensemble CSV are kept in the readable copy.
const DECIMATION: usize = 100;

fn main() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let scratch = tempfile::tempdir().expect("temp dir");
    let cfg = RunConfig::load(
        None,
        &Overrides {
            out: Some(scratch.path().to_path_buf()),
            ..Default::default()
        },
    )
    .expect("default config");
    cmd_sweep(&cfg).expect("sweep");

    std::fs::copy(scratch.path().join("summary.csv"), golden.join("summary.csv")).unwrap();

    let full = std::fs::read(scratch.path().join("ensemble_d1250_g0.csv")).unwrap();
    let digest = Sha256::digest(&full);
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    std::fs::write(golden.join("ensemble_d1250_g0.sha256"), format!("{hex}  ensemble_d1250_g0.csv\n")).unwrap();
    let text = String::from_utf8(full).unwrap();
    let mut lines = text.lines();
    let mut kept = String::new();
    for _ in 0..2 {
        writeln!(kept, "{}", lines.next().unwrap()).unwrap();
    }
    for line in lines.step_by(DECIMATION) {
        writeln!(kept, "{line}").unwrap();
    }
    std::fs::write(golden.join("ensemble_d1250_g0_decimated.csv"), kept).unwrap();

    let pulse = cfg.pulse_shape();
    let mut brute = String::from(
        "# brute-force collectivity at t_S = 0.2 us, gamma = 0: trapezoid over +-6 sigma, 6001 nodes, dt = 2.5e-6 us\ndelta0_MHz,collectivity\n",
    );
    for &d0 in &cfg.delta0_list {
        let dist = cfg.distribution(d0);
        let c = brute_force_collectivity(&pulse, &dist, 0.0, 0.2, 6001, 2.5e-6)
            .unwrap()
            .unwrap();
        writeln!(brute, "{},{}", fmt_sci(d0), fmt_sci(c)).unwrap();
        eprintln!("Δ₀ = {d0} MHz: C = {c}");
    }
    std::fs::write(golden.join("brute_force_collectivity.csv"), brute).unwrap();
}
