use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nilnike::commands::{self, Fixture, Outcome};
use nilnike::config::{read_config_file, RunConfig, Settings, SEED_ENV};
use nilnike::error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(
    name = "nilnike",
    version,
    about = "Multi-party key exchange over nilpotent groups, with attacks"
)]
struct Cli {
    /// `key=value` file; flags given on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// heisenberg, cyclic-triple or quaternion.
    #[arg(long, global = true)]
    platform: Option<String>,
    #[arg(long, global = true)]
    p: Option<String>,
    /// Heisenberg dimension.
    #[arg(long, global = true)]
    m: Option<String>,
    #[arg(long, global = true)]
    alpha: Option<String>,
    /// Number of generators (users minus one).
    #[arg(long, global = true)]
    n: Option<String>,
    /// Quaternion non-residue.
    #[arg(long, global = true)]
    t: Option<String>,
    /// Quaternion working precision.
    #[arg(long, global = true)]
    precision: Option<String>,
    /// Falls back to NILNIKE_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Comma list: generic, heisenberg-linear, quaternion-linear, linear, all.
    #[arg(long, global = true)]
    attacks: Option<String>,
    /// Largest generic attack estimate, in group operations.
    #[arg(long, global = true)]
    budget: Option<String>,
    #[arg(long, global = true)]
    transcript: Option<String>,
    #[arg(long, global = true)]
    report: Option<String>,
    #[arg(long, global = true)]
    out: Option<String>,
    /// Comma list of primes for `bench`.
    #[arg(long, global = true)]
    grid: Option<String>,
    #[arg(long, global = true)]
    trials: Option<String>,
    /// Bench thread count; 0 picks the default.
    #[arg(long, global = true)]
    workers: Option<String>,
    #[arg(long, global = true)]
    max_retries: Option<String>,
    /// Record private keys and the shared key in the transcript.
    #[arg(long, global = true)]
    test_mode: bool,
    /// Report 0 ms everywhere so output is byte-for-byte reproducible.
    #[arg(long, global = true)]
    no_timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one key exchange and write its transcript.
    Exchange,
    /// Attack a recorded transcript.
    Attack,
    /// Operation counts of the attacks over a grid of primes, as CSV.
    Bench,
    /// Check algebraic invariants.
    Verify {
        #[arg(long)]
        suite: Option<String>,
        #[arg(long, hide = true)]
        fixture: Option<FixtureArg>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FixtureArg {
    CorruptedSignTable,
}

impl Cli {
    fn settings(&self) -> CliResult<Settings> {
        let mut s = match &self.config {
            Some(path) => read_config_file(path)?,
            None => Settings::new(),
        };
        let flags = [
            ("platform", &self.platform),
            ("p", &self.p),
            ("m", &self.m),
            ("alpha", &self.alpha),
            ("n", &self.n),
            ("t", &self.t),
            ("precision", &self.precision),
            ("seed", &self.seed),
            ("attacks", &self.attacks),
            ("budget", &self.budget),
            ("transcript", &self.transcript),
            ("report", &self.report),
            ("out", &self.out),
            ("grid", &self.grid),
            ("trials", &self.trials),
            ("workers", &self.workers),
            ("max-retries", &self.max_retries),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                s.insert(k.to_string(), v.clone());
            }
        }
        if self.test_mode {
            s.insert("test-mode".into(), "true".into());
        }
        if self.no_timing {
            s.insert("no-timing".into(), "true".into());
        }
        Ok(s)
    }
}

fn run(cli: &Cli) -> CliResult<Outcome> {
    let env_seed = std::env::var(SEED_ENV).ok();
    let cfg = RunConfig::from_settings(&cli.settings()?, env_seed.as_deref())?;
    match &cli.command {
        Command::Exchange => commands::exchange(&cfg),
        Command::Attack => commands::attack(&cfg),
        Command::Bench => {
            let (csv, outcome) = commands::bench(&cfg)?;
            if cfg.out.is_none() {
                print!("{csv}");
                return Ok(Outcome {
                    stdout: serde_json::Value::Null,
                    ..outcome
                });
            }
            Ok(outcome)
        }
        Command::Verify { suite, fixture } => {
            let fixture = fixture.map(|FixtureArg::CorruptedSignTable| Fixture::CorruptedSignTable);
            commands::verify(&cfg, suite.as_deref(), fixture)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            if !outcome.stdout.is_null() {
                let mut out = std::io::stdout().lock();
                let _ = writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&outcome.stdout).expect("serializable")
                );
            }
            if outcome.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("{}", report_error(&e));
            ExitCode::FAILURE
        }
    }
}

fn report_error(e: &CliError) -> String {
    serde_json::to_string(&e.to_json()).expect("serializable")
}
