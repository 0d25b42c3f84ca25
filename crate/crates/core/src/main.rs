use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use toposqt::commands::{self, Output};
use toposqt::scenario::Scenario;
use toposqt::Error;

#[derive(Parser)]
#[command(name = "toposqt", version, about = "Exact topos quantum theory on finite context posets")]
struct Cli {
    /// Scenario file (JSON)
    #[arg(short, long, global = true)]
    scenario: Option<PathBuf>,

    #[arg(short, long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// List the context poset
    Contexts,
    /// Daseinise a proposition, projector or operator at every context
    Daseinise {
        name: String,
        /// Inner daseinisation instead of outer
        #[arg(long)]
        inner: bool,
        /// Only this context
        #[arg(long)]
        at: Option<String>,
    },
    /// Sieve-valued truth value of a proposition in a state
    TruthValue {
        prop: String,
        state: String,
        #[arg(long)]
        at: Option<String>,
        /// Probability threshold p/q for a truth object T^{ρ,r}
        #[arg(long)]
        r: Option<String>,
    },
    /// Daseinised projector of a pure state at every context
    PseudoState { state: String },
    /// Measure of a daseinised proposition in a state
    Measure { state: String, subobject: String },
    /// Truth value with probabilities, rooted at CONTEXT,r
    ProbTruth {
        prop: String,
        density: String,
        #[arg(long)]
        root: String,
    },
    /// Kochen-Specker colourability of a basis file, or of `kernaghan`
    KsCheck {
        #[arg(default_value = "kernaghan")]
        source: String,
        /// Also build the context poset and look for a global section
        #[arg(long)]
        poset: bool,
    },
    /// Global sections of the spectral presheaf
    GlobalSections {
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Check unitary covariance of truth values
    Covariance {
        prop: String,
        state: String,
        unitary: String,
        #[arg(long)]
        at: Option<String>,
    },
    /// Value interval of an operator at a spectral point CONTEXT:ATOM
    ValueInterval { op: String, point: String },
    /// Every computation the scenario supports, in one document
    Report,
}

enum Failure {
    Domain(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

fn scenario(cli: &Cli) -> Result<Scenario, Failure> {
    let path = cli.scenario.as_ref().ok_or_else(|| Failure::Usage("this subcommand needs --scenario FILE".into()))?;
    Ok(Scenario::load(path)?)
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    Ok(match &cli.command {
        Command::KsCheck { source, poset } => commands::ks_check(source, *poset)?,
        Command::Contexts => commands::contexts(&scenario(cli)?),
        Command::Daseinise { name, inner, at } => commands::daseinise(&scenario(cli)?, name, *inner, at.as_deref())?,
        Command::TruthValue { prop, state, at, r } => {
            commands::truth_value(&scenario(cli)?, prop, state, at.as_deref(), r.as_deref())?
        }
        Command::PseudoState { state } => commands::pseudo_state_cmd(&scenario(cli)?, state)?,
        Command::Measure { state, subobject } => commands::measure_cmd(&scenario(cli)?, state, subobject)?,
        Command::ProbTruth { prop, density, root } => commands::prob_truth(&scenario(cli)?, prop, density, root)?,
        Command::GlobalSections { limit } => commands::global_sections(&scenario(cli)?, *limit),
        Command::Covariance { prop, state, unitary, at } => {
            commands::covariance(&scenario(cli)?, prop, state, unitary, at.as_deref())?
        }
        Command::ValueInterval { op, point } => commands::value_interval(&scenario(cli)?, op, point)?,
        Command::Report => commands::report(&scenario(cli)?)?,
    })
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("TOPOSQT_THREADS") else { return Ok(()) };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("TOPOSQT_THREADS must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| run(&cli));
    let text = match result {
        Ok(out) => match cli.format {
            Format::Json => Ok(out.json_text()),
            Format::Table => Ok(out.table),
            Format::Dot => out.dot.ok_or_else(|| Failure::Usage("DOT output is not available for this subcommand".into())),
        },
        Err(e) => Err(e),
    };
    match text {
        Ok(t) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(t.as_bytes());
            ExitCode::SUCCESS
        }
        Err(Failure::Domain(e)) => {
            eprintln!("{}", commands::error_json(&e));
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
