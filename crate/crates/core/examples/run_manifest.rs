// Drive a suite from a configuration string and read back its manifest.

use modloc_lab::bench::{self, ExperimentConfig, ExperimentId};
use modloc_lab::Result;

const CONFIG: &str = r#"
experiment = "unruh"

[params]
accelerations = [1.0, 2.0]
omega_points = 6
control_beta_factor = 0.5
spacetime_dim = 4

[tolerances]
balance = 5e-4
"#;

pub fn main() -> Result<()> {
    let config = ExperimentConfig::parse(CONFIG)?;
    let dir = std::env::temp_dir().join(format!("modloc-example-{}", std::process::id()));
    let outcome = bench::run(&config, ExperimentId::Unruh, &dir, false)?;
    for r in &outcome.manifest.records {
        println!("{:<28} {:>10.3e}  tol {:>8.1e}  {:?}", r.name, r.measured.unwrap_or(f64::NAN), r.tolerance.unwrap_or(f64::NAN), r.verdict);
    }
    for f in &outcome.manifest.files {
        println!("{:<40} {:>7} bytes  {}", f.path, f.bytes, &f.sha256[..16]);
    }
    let replotted = bench::emit_plots(&dir)?;
    println!("plot files: {replotted:?}, exit code {}", outcome.exit_code);
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
