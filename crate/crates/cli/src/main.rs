//! `ifslab`: render attractors, run minimality checkers and diagnostics, and
//! compare chaos-game drivers.
//!
//! Exit status: 0 when the run completed (whatever the verdicts), 2 for
//! configuration errors, 3 when a resource budget is exceeded.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ConfigError, ExperimentConfig, Settings};
use ifslab::chaosgame::ChaosError;
use ifslab::circle::CircleError;
use ifslab::dynamics::{CoreError, SchemaError};
use ifslab::sequences::SequenceError;
use ifslab::setops::SetError;

#[derive(Parser)]
#[command(name = "ifslab", version, about = "Iterated function system laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hutchinson limit and chaos-game orbit images plus convergence trace.
    Render(Common),
    /// Minimality verdicts and optional diagnostics.
    Check(Common),
    /// Coverage curves for several drivers and seeds in one CSV.
    Compare(Common),
}

/// Every flag overrides the key of the same name in `--config`.
#[derive(Args)]
struct Common {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    /// IFS file in the plain-text map schema.
    #[arg(long)]
    ifs: Option<String>,
    /// Extra generators for `cantor_candidate`.
    #[arg(long)]
    generators: Option<String>,
    /// champernowne | shuffled:S | bernoulli:W,..:S | bernoulli:uniform:S | biased:P:S | explicit:DIGITS
    #[arg(long)]
    stream: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long = "burn-in")]
    burn_in: Option<String>,
    /// Grid resolution; rationals such as 1/512 are accepted.
    #[arg(long)]
    h: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    /// Random seeds to compare, or checker seeds.
    #[arg(long)]
    seeds: Option<String>,
    /// First RNG seed.
    #[arg(long)]
    seed: Option<String>,
    /// Orbit start: `t` on the circle, `x,y` in the plane.
    #[arg(long)]
    start: Option<String>,
    #[arg(long = "max-iter")]
    max_iter: Option<String>,
    #[arg(long = "max-steps")]
    max_steps: Option<String>,
    #[arg(long)]
    beam: Option<String>,
    #[arg(long = "max-len")]
    max_len: Option<String>,
    #[arg(long)]
    depth: Option<String>,
    /// Circle arc `a,b` used as K by the witness and contraction diagnostics.
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    words: Option<String>,
    #[arg(long = "word-len")]
    word_len: Option<String>,
    #[arg(long = "witness-steps")]
    witness_steps: Option<String>,
    #[arg(long)]
    threshold: Option<String>,
    /// forward | backward | both | none
    #[arg(long)]
    direction: Option<String>,
    /// Comma list of contractible, fibre, skew, witness.
    #[arg(long)]
    diag: Option<String>,
    /// Comma list of bernoulli, biased, champernowne, shuffled.
    #[arg(long)]
    drivers: Option<String>,
    /// nominal | outer
    #[arg(long)]
    stamping: Option<String>,
    /// Also write an orbit-age PPM.
    #[arg(long)]
    age: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
}

impl Common {
    fn settings(self) -> Result<Settings, ConfigError> {
        let mut s = match &self.config {
            Some(p) => Settings::from_file(p)?,
            None => Settings::default(),
        };
        let flags = [
            ("preset", self.preset),
            ("ifs", self.ifs),
            ("generators", self.generators),
            ("stream", self.stream),
            ("n", self.n),
            ("burn_in", self.burn_in),
            ("h", self.h),
            ("eps", self.eps),
            ("seeds", self.seeds),
            ("seed", self.seed),
            ("start", self.start),
            ("max_iter", self.max_iter),
            ("max_steps", self.max_steps),
            ("beam", self.beam),
            ("max_len", self.max_len),
            ("depth", self.depth),
            ("target", self.target),
            ("words", self.words),
            ("word_len", self.word_len),
            ("witness_steps", self.witness_steps),
            ("threshold", self.threshold),
            ("direction", self.direction),
            ("diag", self.diag),
            ("drivers", self.drivers),
            ("stamping", self.stamping),
            ("age", self.age),
            ("out", self.out),
        ];
        for (k, v) in flags {
            s.set_flag(k, v);
        }
        Ok(s)
    }
}

fn is_budget(e: &(dyn std::error::Error + 'static)) -> bool {
    matches!(e.downcast_ref::<SetError>(), Some(SetError::Budget(_)))
        || matches!(e.downcast_ref::<ChaosError>(), Some(ChaosError::Set(SetError::Budget(_))))
        || matches!(e.downcast_ref::<CircleError>(), Some(CircleError::Budget(_)))
}

fn is_config(e: &(dyn std::error::Error + 'static)) -> bool {
    e.is::<ConfigError>()
        || e.is::<SchemaError>()
        || e.is::<SequenceError>()
        || e.is::<CoreError>()
        || matches!(
            e.downcast_ref::<ChaosError>(),
            Some(ChaosError::Precondition(_) | ChaosError::InvalidStream(_) | ChaosError::Sequence(_))
        )
        || matches!(e.downcast_ref::<SetError>(), Some(SetError::Resolution(_)))
        || e.is::<CircleError>()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.chain().any(is_budget) {
        3
    } else if err.chain().any(is_config) {
        2
    } else {
        1
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let (common, cmd): (Common, fn(&ExperimentConfig) -> anyhow::Result<()>) = match cli.command {
        Command::Render(c) => (c, commands::render),
        Command::Check(c) => (c, commands::check),
        Command::Compare(c) => (c, commands::compare),
    };
    let cfg = ExperimentConfig::resolve(&common.settings()?)?;
    cmd(&cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ifslab: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
