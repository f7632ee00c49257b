use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use wrist_testbed::cli_io::{run, Mode, RunConfig};

/// Simulate, analyse and check wrist proprioception assessments.
#[derive(Debug, Parser)]
#[command(name = "wrist", version)]
struct Args {
    /// simulate | analyze | reproduce-paper | montecarlo | validate
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    seed: Option<u64>,
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Monte Carlo runs per parameter point.
    #[arg(long)]
    runs: Option<usize>,
    /// Participant table (CSV) for analyze, validate and reproduce-paper.
    #[arg(long)]
    input: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut cfg = match &args.config {
        Some(p) => match RunConfig::load(p) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(2);
            }
        },
        None => RunConfig::default(),
    };
    if let Some(m) = args.mode {
        cfg.mode = m;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(o) = args.out {
        cfg.out = o;
    }
    if let Some(r) = args.runs {
        cfg.runs = r;
    }
    if args.input.is_some() {
        cfg.input = args.input;
    }
    match run(&cfg) {
        Ok(out) => {
            print!("{}", out.summary);
            for a in &out.artifacts {
                eprintln!("wrote {}", a.display());
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
