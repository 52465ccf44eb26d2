//! `csx`: parameter scans and checks for the weighted extension laboratory.
//!
//! Exit codes: 0 all checks pass, 2 solver failure, 3 invariant violation,
//! 4 configuration error. Failures are reported as JSON on stderr.

// Negated comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod failure;

use std::io::Write;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use commands::RunOutput;
use config::{Defaults, Flags, RunConfig};
use failure::{classify, ConfigError, Violation, EXIT_CONFIG};

#[derive(Parser)]
#[command(name = "csx", version, about = "Weighted extension solver and energy-estimate scans")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Table of d_s, 2s·d_s and d_s/(2(1-s)).
    Dsconst,
    /// Solve one-dimensional layers; writes trace, report and field dump.
    Layer,
    /// Layer energies on C_R over the radii and their growth law.
    EnergyScan,
    /// Monotonicity profile φ(R) on half-balls.
    Monotonicity,
    /// Pohozaev balance on half-balls.
    Pohozaev,
    /// Ψ_s of comparison traces with ε = 1/R, and extension checks on random traces.
    PsiScan,
    /// Energies of minimizers against their comparison functions.
    Compare,
}

impl Command {
    fn defaults(self) -> Defaults {
        match self {
            Command::Dsconst => Defaults { s: &[0.5], radii: &[] },
            Command::Layer => Defaults { s: &[0.5], radii: &[40.0] },
            Command::EnergyScan => Defaults {
                s: &[0.5],
                radii: &[8.0, 16.0, 32.0, 64.0],
            },
            Command::Monotonicity => Defaults {
                s: &[0.3],
                radii: &[2.0, 4.0, 8.0, 16.0],
            },
            Command::Pohozaev => Defaults { s: &[0.5], radii: &[5.0] },
            Command::PsiScan => Defaults {
                s: &[0.25, 0.75],
                radii: &[8.0, 16.0, 32.0, 64.0],
            },
            Command::Compare => Defaults {
                s: &[0.5],
                radii: &[8.0, 16.0, 32.0],
            },
        }
    }

    fn run(self, cfg: &RunConfig) -> Result<RunOutput> {
        match self {
            Command::Dsconst => commands::dsconst(cfg),
            Command::Layer => commands::layer_cmd(cfg),
            Command::EnergyScan => commands::energy_scan(cfg),
            Command::Monotonicity => commands::monotonicity(cfg),
            Command::Pohozaev => commands::pohozaev(cfg),
            Command::PsiScan => commands::psi_scan(cfg),
            Command::Compare => commands::compare(cfg),
        }
    }
}

/// Caps the rayon pool at `CSX_THREADS` when set.
fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("CSX_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| ConfigError(format!("CSX_THREADS = '{raw}' must be a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("cannot configure the thread pool")?;
    Ok(())
}

fn emit(cfg: &RunConfig, out: &RunOutput) -> Result<()> {
    match &cfg.output {
        Some(dir) => {
            std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            for a in &out.artifacts {
                let path = dir.join(&a.name);
                std::fs::write(&path, &a.body).with_context(|| format!("cannot write {}", path.display()))?;
            }
        }
        None => {
            let shown: Vec<_> = out.artifacts.iter().filter(|a| !a.file_only).collect();
            let mut stdout = std::io::stdout().lock();
            for a in &shown {
                if shown.len() > 1 {
                    writeln!(stdout, "# {}", a.name)?;
                }
                stdout.write_all(a.body.as_bytes())?;
            }
            stdout.flush()?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    let cfg = RunConfig::resolve(&cli.flags, &cli.command.defaults())?;
    let out = cli.command.run(&cfg)?;
    emit(&cfg, &out)?;
    for w in &out.warnings {
        log::warn!("{w}");
    }
    let mut violations = out.violations;
    if cfg.strict {
        violations.extend(out.warnings);
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Violation(violations).into())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let (code, body) = classify(&err);
            eprintln!("{body}");
            ExitCode::from(code as u8)
        }
    }
}
