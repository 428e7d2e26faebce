//! `darksqueeze <subcommand> --config <path> [--out <dir>] [--seed <u64>] [--workers <n>] [--dump-history]`

mod config;
mod failure;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use darksqueeze::bdg::certify::CheckRecord;
use serde_json::json;

use config::RunConfig;
use failure::{Failure, EXIT_CERTIFICATION, EXIT_OK};
use output::Writer;
use run::Context;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Subcommand {
    Medium,
    RegionMap,
    Soliton,
    Modes,
    Certify,
    Squeeze,
    Spin,
    Oracle,
    All,
}

impl Subcommand {
    fn name(self) -> &'static str {
        match self {
            Subcommand::Medium => "medium",
            Subcommand::RegionMap => "region-map",
            Subcommand::Soliton => "soliton",
            Subcommand::Modes => "modes",
            Subcommand::Certify => "certify",
            Subcommand::Squeeze => "squeeze",
            Subcommand::Spin => "spin",
            Subcommand::Oracle => "oracle",
            Subcommand::All => "all",
        }
    }
}

/// Slow-light dark soliton squeezing: datasets and certification reports.
#[derive(Debug, Parser)]
#[command(name = "darksqueeze", version)]
struct Cli {
    #[arg(value_enum)]
    subcommand: Subcommand,
    /// JSON run configuration; omitted keys take their defaults.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides output.dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seed (overrides seed).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the parallel sections.
    #[arg(long)]
    workers: Option<usize>,
    /// Write full NLS field snapshots from the oracle runs.
    #[arg(long)]
    dump_history: bool,
}

fn execute(cli: &Cli, cfg: &mut RunConfig) -> Result<Vec<CheckRecord>, Failure> {
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(Failure::validation("--workers", "must be at least 1"));
        }
        // fails only if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let soliton = cfg.validate()?;
    let out = Writer::new(&cfg.output.dir, cfg.output.format, &*cfg, cli.subcommand.name())?;
    let mut ctx = Context { cfg, soliton, out, dump_history: cli.dump_history };
    let steps: Vec<fn(&mut Context) -> Result<Vec<CheckRecord>, Failure>> = match cli.subcommand {
        Subcommand::Medium => vec![run::medium],
        Subcommand::RegionMap => vec![run::region_map],
        Subcommand::Soliton => vec![run::soliton],
        Subcommand::Modes => vec![run::modes],
        Subcommand::Certify => vec![run::certify_cmd],
        Subcommand::Squeeze => vec![run::squeeze],
        Subcommand::Spin => vec![run::spin],
        Subcommand::Oracle => vec![run::oracle],
        Subcommand::All => vec![
            run::medium,
            run::region_map,
            run::soliton,
            run::modes,
            run::certify_cmd,
            run::squeeze,
            run::spin,
            run::oracle,
        ],
    };
    let mut checks = Vec::new();
    for step in steps {
        checks.extend(step(&mut ctx)?);
    }
    Ok(checks)
}

fn write_error(dir: &std::path::Path, failure: &Failure, failed: &[&CheckRecord]) {
    let record = json!({
        "kind": failure.kind,
        "field": failure.field,
        "message": failure.message,
        "exitCode": failure.exit_code(),
        "failedChecks": failed,
    });
    if std::fs::create_dir_all(dir).is_ok() {
        let _ = std::fs::write(dir.join("error.json"), serde_json::to_string_pretty(&record).unwrap_or_default() + "\n");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match RunConfig::load(&cli.config) {
        Ok(c) => c,
        Err(f) => {
            let dir = cli.out.clone().unwrap_or_else(|| RunConfig::default().output.dir);
            eprintln!("darksqueeze: {f}");
            write_error(&dir, &f, &[]);
            return ExitCode::from(f.exit_code() as u8);
        }
    };
    let dir = cli.out.clone().unwrap_or_else(|| cfg.output.dir.clone());
    let _ = std::fs::remove_file(dir.join("error.json"));
    match execute(&cli, &mut cfg) {
        Ok(checks) => {
            let failed: Vec<&CheckRecord> = checks.iter().filter(|c| c.failed()).collect();
            for c in &failed {
                eprintln!("check failed: {} = {:e} (threshold {:?})", c.check, c.value, c.threshold);
            }
            if failed.is_empty() {
                eprintln!("{}: {} checks passed", cli.subcommand.name(), checks.iter().filter(|c| c.pass == Some(true)).count());
                ExitCode::from(EXIT_OK as u8)
            } else {
                let f = Failure::certification(failed[0].check.clone(), format!("{} check(s) failed", failed.len()));
                write_error(&dir, &f, &failed);
                ExitCode::from(EXIT_CERTIFICATION as u8)
            }
        }
        Err(f) => {
            eprintln!("darksqueeze: {f}");
            write_error(&dir, &f, &[]);
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
