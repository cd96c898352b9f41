//! Command-line front end: configuration, the experiment commands and the
//! result ledger.

pub mod commands;
pub mod config;
pub mod ledger;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::{run, CliError, Command, Outcome};
use config::{parse_pairs, ExperimentConfig};
use ledger::{Ledger, ResultRecord};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

const CONFIG_HELP: &str = "\
Configuration is a flat file of `section.key = value` lines (`#` comments).
Precedence: defaults < --config < --set < --kg/--out/--seed/--rigorous.
Run `wga show-config` for every key with its current value.

Exit codes: 0 success, 1 I/O error, 2 usage or precondition error, 3 resource cap exceeded,
4 inconclusive certificate (or --rigorous with an extrapolated series bound).
Every run appends one JSON line to <out>/ledger.jsonl.";

#[derive(Debug, Parser)]
#[command(name = "wga", version, about = "Experiments on weighted group algebras", after_help = CONFIG_HELP)]
pub struct Cli {
    /// Configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Grothendieck constant used in the bounds.
    #[arg(long, global = true, value_name = "FLOAT")]
    pub kg: Option<f64>,
    /// Output directory for CSV artifacts and the ledger.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Treat extrapolated (non-rigorous) series bounds as inconclusive.
    #[arg(long, global = true)]
    pub rigorous: bool,
    /// Seed for sampled sweeps and the stress test.
    #[arg(long, global = true, value_name = "INT")]
    pub seed: Option<u64>,
    /// Print the JSON payload to standard output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Override one config key; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum CliCommand {
    /// BFS balls, sphere sizes against closed forms, and the growth-order fit.
    #[command(after_help = "CSV growth.csv: n, sphere (|S_n|), ball (|F^n|), closed_form_ball (empty when unknown).")]
    Growth,
    /// Length-zeta enclosure, ||m||_eps bound, verdict and von Neumann delta.
    #[command(after_help = "CSV bound_sweep.csv (written when sweep.betas or sweep.alphas x sweep.cs is set): \
weight, verdict, beta, M, zeta_upper, bound (||m||_eps), delta, rigorous. Fields that do not apply are empty.")]
    Bound,
    /// Submultiplicativity sweeps, the composite M constant and the monotonicity lemma.
    #[command(after_help = "CSV submult.csv: weight, radius, pairs_checked, skipped, sampled, worst_ratio, claimed_M, \
violations, pass.\nCSV lemma_sweep.csv (sweep.alphas x sweep.cs): alpha, C, beta, K, points, p_violations, \
q_violations, log_M, pass.")]
    WeightCheck,
    /// Von Neumann constants (delta, L) and the randomized polynomial stress test.
    #[command(after_help = "No CSV; the report is in the JSON payload (trials, passes, worst_margin, delta, L, kg, seed).")]
    Vn,
    /// Rudin-Shapiro flatness, Hankel certificates, Omega lower bounds and the divergent sequence.
    #[command(after_help = "CSV divergence.csv: n (= 2^k), S_n (the lattice sum), L_n (the lower bound on the \
multiplication norm).")]
    FreeGroup,
    /// Print the effective configuration and its hash.
    ShowConfig,
}

impl CliCommand {
    fn experiment(self) -> Option<Command> {
        match self {
            CliCommand::Growth => Some(Command::Growth),
            CliCommand::Bound => Some(Command::Bound),
            CliCommand::WeightCheck => Some(Command::WeightCheck),
            CliCommand::Vn => Some(Command::Vn),
            CliCommand::FreeGroup => Some(Command::FreeGroup),
            CliCommand::ShowConfig => None,
        }
    }
}

/// Builds the effective configuration from the parsed flags.
pub fn effective_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_text(&std::fs::read_to_string(path)?)?,
        None => ExperimentConfig::default(),
    };
    let mut over = BTreeMap::new();
    for item in &cli.set {
        over.extend(parse_pairs(item)?);
    }
    if let Some(kg) = cli.kg {
        over.insert("bound.kg".into(), kg.to_string());
    }
    if let Some(out) = &cli.out {
        over.insert("output.dir".into(), out.display().to_string());
    }
    if let Some(seed) = cli.seed {
        over.insert("run.seed".into(), seed.to_string());
    }
    if cli.rigorous {
        over.insert("run.rigorous".into(), "true".into());
    }
    cfg.apply(&over)?;
    Ok(cfg)
}

/// Runs one command, appends its record to the ledger and returns the record.
pub fn execute(command: Command, cfg: &ExperimentConfig) -> Result<(Outcome, ResultRecord), CliError> {
    let outcome = run(command, cfg)?;
    let record = ResultRecord::new(command.name(), cfg.hash(), outcome.payload.clone());
    Ledger::open(&cfg.output_dir)?.append(&record)?;
    Ok((outcome, record))
}

/// Parses arguments, runs, prints, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let cfg = match effective_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("wga: {e}");
            return e.exit_code();
        }
    };
    let Some(command) = cli.command.experiment() else {
        print!("{}", cfg.to_text());
        println!("# hash = {}", cfg.hash());
        return EXIT_OK;
    };
    match execute(command, &cfg) {
        Ok((outcome, _)) => {
            let mut out = std::io::stdout().lock();
            if cli.json {
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&outcome.payload).unwrap_or_default());
            } else {
                let _ = writeln!(out, "{}", outcome.summary);
                for a in &outcome.artifacts {
                    let _ = writeln!(out, "wrote {}", a.display());
                }
            }
            if outcome.inconclusive {
                eprintln!("wga: result is inconclusive");
                EXIT_INCONCLUSIVE
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            eprintln!("wga: {e}");
            e.exit_code()
        }
    }
}
