use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use modloc_lab::bench::{self, CheckRecord, ExperimentConfig, ExperimentId, Verdict};
use modloc_lab::{Error, Result};

/// Run verification suites and write CSV data, plot files and a manifest.
#[derive(Debug, Parser)]
#[command(name = "modloc-lab", version)]
struct Cli {
    /// Experiment id, `verify-all`, or `plots <run-dir>`.
    target: String,
    /// Run directory for `plots`.
    run_dir: Option<PathBuf>,
    /// TOML or JSON configuration; optional for `verify-all`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides MODLOC_OUT and the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Divide tolerances by ten.
    #[arg(long)]
    strict: bool,
    /// Worker threads.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    parallel: u16,
    /// Restrict `verify-all` to these experiments.
    #[arg(long)]
    only: Vec<ExperimentId>,
}

fn print_record(r: &CheckRecord) {
    let verdict = match r.verdict {
        Verdict::Pass => "pass",
        Verdict::Fail => "FAIL",
        Verdict::UnverifiedByDesign => "unverified",
    };
    let value = match (r.measured, r.tolerance) {
        (Some(m), Some(t)) => format!("{m:.3e} (tol {t:e})"),
        (Some(m), None) => format!("{m:.3e}"),
        _ => String::new(),
    };
    println!("  {verdict:<10} {:<40} {value}", r.name);
}

fn execute(cli: &Cli) -> Result<u8> {
    let load = |required: bool| -> Result<ExperimentConfig> {
        match &cli.config {
            Some(p) => ExperimentConfig::load(p),
            None if required => Err(Error::Config(format!("`{}` needs --config <path>", cli.target))),
            None => Ok(ExperimentConfig::default()),
        }
    };
    match cli.target.as_str() {
        "plots" => {
            let dir = cli
                .run_dir
                .as_ref()
                .ok_or_else(|| Error::Config("`plots` needs a run directory".into()))?;
            for f in bench::emit_plots(dir)? {
                println!("{}", dir.join(f).display());
            }
            Ok(0)
        }
        "verify-all" => {
            let config = load(false)?;
            let out = bench::resolve_out_dir(cli.out.as_deref(), config.output_dir.as_deref());
            let agg = bench::verify_all(&config, &cli.only, &out, cli.strict, cli.parallel as usize)?;
            for e in &agg.experiments {
                println!(
                    "{:<16} exit {}  pass {:>3}  fail {:>3}  unverified {:>2}  {:>7.2} s",
                    e.experiment.name(),
                    e.exit_code,
                    e.passed,
                    e.failed,
                    e.unverified_by_design,
                    e.runtime_seconds
                );
                for d in &e.diagnostics {
                    eprintln!("  {d}");
                }
            }
            println!("manifest: {}", out.join("manifest.json").display());
            Ok(agg.exit_code)
        }
        name => {
            let id: ExperimentId = name.parse()?;
            if cli.run_dir.is_some() {
                return Err(Error::Config(format!("unexpected positional argument after `{name}`")));
            }
            let config = load(true)?;
            let out = bench::resolve_out_dir(cli.out.as_deref(), config.output_dir.as_deref());
            let outcome = bench::run(&config, id, &out, cli.strict)?;
            let m = &outcome.manifest;
            println!("{} ({:.2} s)", id, m.runtime_seconds);
            m.records.iter().for_each(print_record);
            for d in &m.diagnostics {
                eprintln!("error: {d}");
            }
            println!("manifest: {}", out.join("manifest.json").display());
            Ok(outcome.exit_code)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.parallel > 1 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.parallel as usize).build_global();
    }
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
