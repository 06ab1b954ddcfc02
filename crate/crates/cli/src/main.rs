//! `ln-deform`: validate actions, compute structure constants and
//! cohomology, extend deformations and decide rigidity from the command line.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ln_deform::{BaseRing, Convention, ExpSeq};

use commands::{CohomologyArgs, ComplexKind, Kind};
use report::{error_json, exit, CliError, Report};

#[derive(Parser, Debug)]
#[command(name = "ln-deform", version, about = "Exact deformation theory of Landweber-Novikov algebras")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ConventionArg {
    AlphaInner,
    AlphaOuter,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::AlphaInner => Convention::AlphaInner,
            ConventionArg::AlphaOuter => Convention::AlphaOuter,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a ring, action, deformation, automorphism or structure-table document.
    Validate {
        file: PathBuf,
        /// Document kind; detected from its fields when omitted.
        #[arg(long, value_enum)]
        kind: Option<Kind>,
    },
    /// Structure constants of `s_alpha s_beta`.
    Constants {
        #[arg(long)]
        alpha: ExpSeq,
        #[arg(long)]
        beta: ExpSeq,
        #[arg(long, default_value_t = 4)]
        bound: usize,
        #[arg(long, value_enum, default_value_t = ConventionArg::AlphaInner)]
        convention: ConventionArg,
        /// Also write the whole table at this bound.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Cohomology of F* (degrees 1, 2) or Hochschild cohomology (any degree).
    Cohomology {
        #[arg(long)]
        action: Option<PathBuf>,
        /// Ring document (Hochschild only).
        #[arg(long)]
        ring: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ComplexKind::Fstar)]
        complex: ComplexKind,
        #[arg(long)]
        n: usize,
        /// Truncation bound; at most the action's bound, which is the default.
        #[arg(long)]
        bound: Option<usize>,
        /// Base ring: Z, Q or Zmod:p. Integral documents may be moved to Q or Zmod:p.
        #[arg(long)]
        base: Option<BaseRing>,
        /// Print representative cocycles.
        #[arg(long)]
        representatives: bool,
    },
    /// Extend a deformation order by order.
    Extend {
        #[arg(long)]
        deformation: PathBuf,
        #[arg(long)]
        to_order: usize,
        /// Write the extended deformation here.
        #[arg(long)]
        emit: Option<PathBuf>,
        /// Pick random solutions with this seed instead of the canonical ones.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare two extensions of the same deformation.
    Equivalence {
        #[arg(long)]
        tilde: PathBuf,
        #[arg(long)]
        bar: PathBuf,
        /// Write the witnessing automorphism here.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Certify rigidity (H^1 = 0 and HH^2 = 0) or report the obstruction.
    Rigidity {
        #[arg(long)]
        action: PathBuf,
        #[arg(long)]
        bound: Option<usize>,
        #[arg(long, default_value_t = 3)]
        max_order: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write the built-in fixtures and summarize them.
    Demo {
        #[arg(long, default_value = "ln-deform-demo")]
        out: PathBuf,
        #[arg(long, default_value_t = 2)]
        bound: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Constants { .. } => "constants",
            Command::Cohomology { .. } => "cohomology",
            Command::Extend { .. } => "extend",
            Command::Equivalence { .. } => "equivalence",
            Command::Rigidity { .. } => "rigidity",
            Command::Demo { .. } => "demo",
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("LN_DEFORM_THREADS") else { return Ok(()) };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("LN_DEFORM_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the thread pool: {e}")))
}

fn run(command: Command) -> Result<Report, CliError> {
    configure_threads()?;
    match command {
        Command::Validate { file, kind } => commands::validate(&file, kind),
        Command::Constants { alpha, beta, bound, convention, dump } => {
            commands::constants(&alpha, &beta, bound, convention.into(), dump.as_deref())
        }
        Command::Cohomology { action, ring, complex, n, bound, base, representatives } => {
            commands::cohomology(CohomologyArgs {
                action: action.as_deref(),
                ring: ring.as_deref(),
                complex,
                n,
                bound,
                base,
                representatives,
            })
        }
        Command::Extend { deformation, to_order, emit, seed } => {
            commands::extend(&deformation, to_order, emit.as_deref(), seed)
        }
        Command::Equivalence { tilde, bar, emit } => commands::equivalence(&tilde, &bar, emit.as_deref()),
        Command::Rigidity { action, bound, max_order, seed } => commands::rigidity(&action, bound, max_order, seed),
        Command::Demo { out, bound } => commands::demo(&out, bound),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    match run(cli.command) {
        Ok(report) => {
            match cli.format {
                Format::Text => report.lines.iter().for_each(|l| println!("{l}")),
                Format::Json => println!("{}", serde_json::to_string_pretty(&report.to_json()).expect("serializable")),
            }
            ExitCode::from(report.status.exit_code())
        }
        Err(err) => {
            if cli.format == Format::Json {
                println!("{}", serde_json::to_string_pretty(&error_json(name, &err)).expect("serializable"));
            }
            eprintln!("error: {err}");
            let code = err.exit_code();
            debug_assert!(code != exit::OK);
            ExitCode::from(code)
        }
    }
}
