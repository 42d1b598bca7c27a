use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use polya_cli::{emit, run_with_workers, ExperimentConfig, OutputFormat, Overrides, EXIT_ERROR, EXIT_FLAGGED, EXIT_PASS};

/// Run one experiment described by a TOML configuration file.
#[derive(Parser, Debug)]
#[command(name = "polya", version)]
struct Cli {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}

fn execute(cli: &Cli) -> anyhow::Result<i32> {
    let mut cfg = ExperimentConfig::load(&cli.config)?;
    Overrides { seed: cli.seed, out: cli.out.clone(), format: cli.format }.apply(&mut cfg);
    let report = run_with_workers(&cfg, cli.workers)?;
    for path in emit(&cfg, &report, &cfg.output.dir, cfg.output.format)? {
        eprintln!("wrote {}", path.display());
    }
    if report.passed() {
        println!("{}: pass ({} rows)", cfg.id, report.rows.len());
        Ok(EXIT_PASS)
    } else {
        println!("{}: {} flagged", cfg.id, report.flags.len());
        for f in &report.flags {
            println!("  {f}");
        }
        Ok(EXIT_FLAGGED)
    }
}
