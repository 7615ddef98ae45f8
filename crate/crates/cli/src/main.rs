//! `hardy`: runs the numerical experiments of `hardy-core` from a JSON config
//! and writes machine-readable reports.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on invalid
//! configuration or a numerical error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CommandError, Context, Outcome};
use config::{ExperimentConfig, Format};

#[derive(Parser, Debug)]
#[command(name = "hardy", version, about = "Hardy-space truncation and interpolation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed override for stochastic commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Suppress the summary on stdout.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Level-λ decomposition sweep with the H^p bound.
    Decompose,
    /// Schur-defect inequality over a corpus.
    Lemma12,
    /// K-functional tables.
    Kfunc,
    /// Path ensemble with the stopping-time and truncation reports.
    Simulate,
    /// Strip interpolation certificate.
    Interpolate,
    /// Monte Carlo against closed-form stochastic Hilbert transform.
    Oracle,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Decompose => "decompose",
            Command::Lemma12 => "lemma12",
            Command::Kfunc => "kfunc",
            Command::Simulate => "simulate",
            Command::Interpolate => "interpolate",
            Command::Oracle => "oracle",
        }
    }
}

fn load_config(path: Option<&PathBuf>) -> Result<ExperimentConfig, String> {
    match path {
        None => Ok(ExperimentConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", p.display()))
        }
    }
}

fn write_outputs(outcome: &Outcome, name: &str, dir: &std::path::Path, format: Format) -> std::io::Result<()> {
    match format {
        Format::Json => output::write_atomic(&dir.join(format!("{name}.json")), output::json_to_string(&outcome.json).as_bytes())?,
        Format::Csv => {
            let bytes = output::table_to_csv(&outcome.table).map_err(std::io::Error::other)?;
            output::write_atomic(&dir.join(format!("{name}.csv")), &bytes)?
        }
    }
    let mut text = outcome.summary.join("\n");
    text.push_str(if outcome.pass { "\nresult: pass\n" } else { "\nresult: FAIL\n" });
    output::write_atomic(&dir.join(format!("{name}.summary.txt")), text.as_bytes())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    let config = match load_config(cli.config.as_ref()).and_then(|c| c.validate(name).map(|_| c)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: invalid config: {e}");
            return ExitCode::from(2);
        }
    };
    let format = cli.format.or(config.format).unwrap_or(Format::Json);
    let dir = cli.out.clone().or_else(|| config.output_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    let ctx = Context { config, seed: cli.seed };
    let result = match cli.command {
        Command::Decompose => commands::decompose(&ctx),
        Command::Lemma12 => commands::lemma12(&ctx),
        Command::Kfunc => commands::kfunc(&ctx),
        Command::Simulate => commands::simulate(&ctx),
        Command::Interpolate => commands::interpolate(&ctx),
        Command::Oracle => commands::oracle(&ctx),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e @ CommandError::Config(_)) | Err(e @ CommandError::Core(_)) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = write_outputs(&outcome, name, &dir, format) {
        eprintln!("error: writing reports to {}: {e}", dir.display());
        return ExitCode::from(2);
    }
    if !cli.quiet {
        for line in &outcome.summary {
            println!("{line}");
        }
        println!("{name}: {}", if outcome.pass { "pass" } else { "FAIL" });
    }
    if outcome.pass {
        ExitCode::SUCCESS
    } else {
        for row in outcome.table.rows.iter().filter(|r| matches!(r.last(), Some(output::Cell::Bool(false)))) {
            eprintln!("failed: {}", row.iter().map(cell_text).collect::<Vec<_>>().join(" "));
        }
        ExitCode::from(1)
    }
}

fn cell_text(c: &output::Cell) -> String {
    match c {
        output::Cell::Text(s) => s.clone(),
        output::Cell::Num(x) => format!("{x:.6e}"),
        output::Cell::Int(i) => i.to_string(),
        output::Cell::Bool(b) => b.to_string(),
    }
}
