//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::driver::{lcs, lps, Mode, Problem, RunConfig, RunReport};
use crate::error::Error;
use crate::grover::{GroverConfig, Schedule};
use crate::resources::{estimate_resources, sweep, write_csv, ResourceRow};
use crate::selftest::{selftest, Fault};

pub const EXIT_OK: i32 = 0;
/// A false negative was flagged or a selftest suite failed.
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "qlcs", version, about = "Longest common / palindromic substring via simulated Grover search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Longest common substring of two equal-length strings.
    Lcs {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Longest palindromic substring.
    Lps {
        #[arg(long)]
        x: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Worst-case resource estimates, no simulation.
    Resources {
        /// Padded lengths (powers of two); defaults to 16..=4096.
        #[arg(long = "n", num_args = 1..)]
        sizes: Vec<usize>,
        #[arg(long, value_enum, default_value_t = ProblemArg::Both)]
        problem: ProblemArg,
        #[arg(long, default_value_t = 5)]
        restarts: u32,
        #[arg(long, value_enum, default_value_t = Schedule::RandomizedDoubling)]
        schedule: Schedule,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Exhaustive small-size consistency checks.
    Selftest {
        /// Corrupt an operator to confirm the suites catch it.
        #[arg(long, value_enum)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, value_enum, default_value_t = Mode::Gate)]
    mode: Mode,
    #[arg(long, env = "QLCS_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    restarts: u32,
    #[arg(long, value_enum, default_value_t = Schedule::RandomizedDoubling)]
    schedule: Schedule,
    #[arg(long, default_value_t = 6)]
    budget: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProblemArg {
    Lcs,
    Lps,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FaultArg {
    Sfc,
}

impl ValueEnum for Mode {
    fn value_variants<'a>() -> &'a [Self] {
        &[Mode::Gate, Mode::Abstract, Mode::Classical]
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(match self {
            Mode::Gate => "gate",
            Mode::Abstract => "abstract",
            Mode::Classical => "classical",
        }))
    }
}

impl ValueEnum for Schedule {
    fn value_variants<'a>() -> &'a [Self] {
        &[Schedule::Fixed, Schedule::RandomizedDoubling]
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(match self {
            Schedule::Fixed => "fixed",
            Schedule::RandomizedDoubling => "randomized-doubling",
        }))
    }
}

enum Failure {
    Usage(String),
    Capacity(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Capacity(_) => Failure::Capacity(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn emit(text: &str, output: &Option<PathBuf>, out: &mut dyn Write) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| Failure::Usage(e.to_string())),
    }
}

fn report_text(r: &RunReport) -> String {
    let mut s = format!("{:?} answer {} (n = {}, raw length {})\n", r.problem, r.answer, r.n, r.raw_len).to_lowercase();
    if let Some(w) = &r.witness {
        match w.y_pos {
            Some(y) => s += &format!("witness: x[{}..{}] = y[{}..{}]\n", w.x_pos, w.x_pos + r.answer, y, y + r.answer),
            None => s += &format!("witness: x[{}..{}]\n", w.x_pos, w.x_pos + r.answer),
        }
    }
    for it in &r.iterations {
        s += &format!(
            "  l={} r={} d={} verified={} restarts={}{}\n",
            it.l,
            it.r,
            it.d,
            it.verified,
            it.restarts,
            if it.false_negative { " FALSE-NEGATIVE" } else { "" }
        );
    }
    s += &format!(
        "oracle calls {}, qubits {}, depth {}\n",
        r.oracle_calls, r.resources.qubits, r.resources.depth
    );
    s
}

fn run_problem(report: RunReport, args: &RunArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&report).map_err(|e| Failure::Usage(e.to_string()))? + "\n",
        Format::Text => report_text(&report),
        Format::Csv => return Err(Failure::Usage("csv output is only available for resources".into())),
    };
    emit(&text, &args.output, out)?;
    Ok(if report.has_false_negative() { EXIT_CHECK_FAILED } else { EXIT_OK })
}

fn config(args: &RunArgs) -> RunConfig {
    RunConfig {
        mode: args.mode,
        grover: GroverConfig {
            schedule: args.schedule,
            restarts: args.restarts,
            budget: args.budget,
            seed: args.seed,
        },
    }
}

fn resources(
    sizes: &[usize],
    problem: ProblemArg,
    cfg: &GroverConfig,
    format: Format,
    output: &Option<PathBuf>,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let problems: &[Problem] = match problem {
        ProblemArg::Lcs => &[Problem::Lcs],
        ProblemArg::Lps => &[Problem::Lps],
        ProblemArg::Both => &[Problem::Lcs, Problem::Lps],
    };
    let mut rows: Vec<ResourceRow> = Vec::new();
    for &p in problems {
        if sizes.is_empty() {
            rows.extend(sweep(16, 4096, p, cfg)?);
        } else {
            for &n in sizes {
                rows.push(estimate_resources(n, p, cfg)?);
            }
        }
    }
    let text = match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf)?;
            String::from_utf8(buf).map_err(|e| Failure::Usage(e.to_string()))?
        }
        Format::Json => serde_json::to_string_pretty(&rows).map_err(|e| Failure::Usage(e.to_string()))? + "\n",
        Format::Text => rows
            .iter()
            .map(|r| {
                format!(
                    "{:?} n={} qubits={} depth={} oracle_calls={} ratio={:.3}\n",
                    r.problem, r.n, r.qubits, r.depth, r.oracle_calls, r.ratio
                )
                .to_lowercase()
            })
            .collect(),
    };
    emit(&text, output, out)?;
    Ok(EXIT_OK)
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    match cli.command {
        Command::Lcs { x, y, run } => run_problem(lcs(&x, &y, &config(&run))?, &run, out),
        Command::Lps { x, run } => run_problem(lps(&x, &config(&run))?, &run, out),
        Command::Resources {
            sizes,
            problem,
            restarts,
            schedule,
            format,
            output,
        } => {
            let cfg = GroverConfig {
                schedule,
                restarts,
                ..GroverConfig::default()
            };
            resources(&sizes, problem, &cfg, format, &output, out)
        }
        Command::Selftest { inject_fault } => {
            let results = selftest(inject_fault.map(|FaultArg::Sfc| Fault::Sfc));
            let mut text = String::new();
            for r in &results {
                text += &format!("{} {}: {}\n", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
            }
            emit(&text, &None, out)?;
            Ok(if results.iter().all(|r| r.passed) { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code. Reports go to `out`, diagnostics to
/// `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Capacity(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_CAPACITY
        }
    }
}
