use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod funcspec;
pub mod io;
pub mod report;

use report::{RunReport, Status};

#[derive(Parser, Debug)]
#[command(name = "sympconn", version, about = "Exact formal curves of symplectic connections on tori")]
pub struct Cli {
    /// Write the run report here instead of standard output.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Record wall-clock time in the report (makes it non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Curvature checks on a connection curve or structure-map curve.
    Check {
        input: PathBuf,
        /// Only examine orders up to K.
        #[arg(long = "order", value_name = "K")]
        order: Option<usize>,
    },
    /// Conjugate a Ricci-type curve to a flat invariant one.
    Normalize {
        input: PathBuf,
        #[arg(long = "order", value_name = "K")]
        order: Option<usize>,
        /// Destination of the flat structure-map curve.
        #[arg(long)]
        out: PathBuf,
        /// Destination of the normalizing symplectomorphism curve.
        #[arg(long)]
        witness: PathBuf,
    },
    /// Emit a fixture file.
    Generate(GenerateArgs),
    /// Decide equivalence of two flat invariant curves under Sp(2n, Z).
    Equiv {
        a: PathBuf,
        b: PathBuf,
        /// Maximal generator word length searched.
        #[arg(long, value_name = "L", default_value_t = 2)]
        bound: usize,
    },
    /// Apply a symplectomorphism curve to a connection curve.
    Act {
        psi: PathBuf,
        connection: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// Structure map with S(v) at order 1.
    RankOne,
    /// Seeded random ladder of rank-one cubes.
    Ladder,
    /// Connection curve with the third derivative of f at one order.
    Gradient,
    /// Rank-one flat curve conjugated by the flow of f.
    Conjugated,
    /// Seeded conjugated flat curve with steps at orders 1 and 2.
    Fixture,
    /// Symplectomorphism curve exp(t^k X_f).
    Hamiltonian,
    /// Seeded random connection curve.
    RandomCurve,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 4)]
    dim: usize,
    /// Series cap K.
    #[arg(long = "order", value_name = "K")]
    order: Option<usize>,
    /// JSON file holding the rows of ω as rational strings.
    #[arg(long)]
    omega: Option<PathBuf>,
    /// Vector v, comma separated (default e_0).
    #[arg(long, allow_hyphen_values = true)]
    v: Option<String>,
    /// Trigonometric polynomial such as "cos(1,0,0,0)+1/2*sin(1,1,0,0)".
    #[arg(long, allow_hyphen_values = true)]
    f: Option<String>,
    /// Order at which f enters.
    #[arg(long, default_value_t = 1)]
    at: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit structure maps as invariant connection curves.
    #[arg(long)]
    connection: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Anything that stops a command before it reaches a verdict.
#[derive(Debug)]
pub enum Failure {
    Core(sympconn::Error),
    InFile { path: PathBuf, err: sympconn::Error },
    Io { path: PathBuf, source: std::io::Error },
    Usage(String),
}

impl Failure {
    pub fn in_file(path: &std::path::Path, err: sympconn::Error) -> Self {
        Failure::InFile { path: path.to_path_buf(), err }
    }

    /// Structured location of a negative verdict, for the report.
    fn witness(&self) -> serde_json::Value {
        match self {
            Failure::Core(sympconn::Error::NotRicciType { order, idx }) => {
                serde_json::json!({ "refusal": "not_ricci_type", "first_failing_order": order, "component": idx })
            }
            Failure::Core(sympconn::Error::NotExactCube { order, mode, idx }) => {
                serde_json::json!({ "refusal": "not_exact_cube", "first_failing_order": order, "component": idx, "mode": mode })
            }
            _ => serde_json::Value::Null,
        }
    }

    pub fn status(&self) -> Status {
        let err = match self {
            Failure::Core(e) | Failure::InFile { err: e, .. } => e,
            Failure::Io { .. } | Failure::Usage(_) => return Status::InputError,
        };
        if err.is_internal() {
            Status::InternalError
        } else if err.is_verdict() {
            Status::Negative
        } else {
            Status::InputError
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::InFile { path, err } => write!(f, "{}: {err}", path.display()),
            Failure::Io { path, source } => write!(f, "{}: {source}", path.display()),
            Failure::Usage(m) => write!(f, "{m}"),
        }
    }
}

impl From<sympconn::Error> for Failure {
    fn from(e: sympconn::Error) -> Self {
        Failure::Core(e)
    }
}

/// Runs one invocation: emits the report and returns the exit code.
pub fn run(cli: Cli) -> ExitCode {
    let mut report = RunReport::new(std::env::args().skip(1).collect());
    let started = Instant::now();
    let mut ctx = commands::Context::default();
    let result = match &cli.command {
        Command::Check { input, order } => commands::check(&mut ctx, input, *order),
        Command::Normalize { input, order, out, witness } => commands::normalize(&mut ctx, input, *order, out, witness),
        Command::Generate(args) => commands::generate(&mut ctx, args),
        Command::Equiv { a, b, bound } => commands::equiv(&mut ctx, a, b, *bound),
        Command::Act { psi, connection, out } => commands::act(&mut ctx, psi, connection, out.as_deref()),
    };
    report.inputs = ctx.inputs;
    match result {
        Ok(outcome) => {
            report.status = outcome.status;
            report.results = outcome.results;
            eprintln!("{}: {}", status_word(outcome.status), outcome.summary);
        }
        Err(failure) => {
            report.status = failure.status();
            report.error = Some(failure.to_string());
            report.results = failure.witness();
            eprintln!("{}: {failure}", status_word(report.status));
        }
    }
    if cli.timing {
        report.timing_ms = Some(started.elapsed().as_millis() as u64);
    }
    if cli.report.is_some() || !ctx.stdout_taken {
        if let Err(e) = io::emit(cli.report.as_deref(), &report.to_json()) {
            eprintln!("error: {e}");
            return ExitCode::from(Status::InputError.exit_code());
        }
    }
    ExitCode::from(report.status.exit_code())
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Negative => "negative",
        Status::InputError => "input error",
        Status::InternalError => "internal error",
    }
}
