//! Argument parsing and command dispatch.
//!
//! [`run`] writes to caller-supplied streams and returns the exit status:
//! 0 on success, 1 on a failed verdict or a domain error, 2 on a usage error.

use std::fs;
use std::io::{self, Read, Write};
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use approachable_core::approx::{
    self, check_approaching, check_computable, diagonal_prime, format_digits, ApproxError, ApproxReport, FuelPolicy,
    RunStatus, Verdict,
};
use approachable_core::codec::{self, machine_of, DecodeError, MachineNumber, NumberError};
use approachable_core::dovetail::{DovetailError, DovetailState};
use approachable_core::enumerate::{cantor_unpair, EnumError, MachineEnumerator, ProgramNumbering};
use approachable_core::tm::{self, Outcome, TmError};
use approachable_core::{samples, validate, Machine, MachineIndex, ProgramSource};

use crate::checkpoint::{Checkpoint, CheckpointError, Universe};
use crate::experiment::{run_experiment, ExperimentConfig, ExperimentError};
use crate::formats::{self, format_word, parse_word, FormatError};
use crate::parallel::Threaded;

/// Default step budget of `run`.
pub const DEFAULT_FUEL: u64 = 10_000;

#[derive(Debug, Parser)]
#[command(name = "approachable", version, about = "Turing machine encodings, the halting approximation and digit-stream checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Encode a machine description (see `decode` output) read from FILE or stdin
    Encode {
        /// Description file, `-` for stdin
        #[arg(default_value = "-")]
        file: PathBuf,
    },
    /// Decode an encoding and print the machine description
    Decode { encoding: String },
    /// Machine number of an encoding
    Number { encoding: String },
    /// Encoding of a machine number
    Unnumber { number: String },
    /// Check an encoding against every validity rule
    Validate { encoding: String },
    /// List machines in machine-number order, or programs in index order
    Enumerate(EnumerateArgs),
    /// Simulate one machine on one input
    Run(RunArgs),
    /// Print the halting approximation H(n) for each horizon n
    Dovetail(DovetailArgs),
    /// Finite-horizon checks on digit-printing machines
    Approx {
        #[command(subcommand)]
        check: ApproxCommand,
    },
    /// Diagonal of a list of digit streams
    Diagonal(DiagonalArgs),
    /// Run a built-in experiment and print its report
    Experiment(ExperimentArgs),
    /// Print the machine number of a built-in sample machine
    Sample {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(SAMPLES))]
        name: String,
    },
}

#[derive(Debug, Args)]
struct EnumerateArgs {
    /// How many entries to print
    #[arg(long)]
    count: u64,
    /// Start after this machine number
    #[arg(long, conflicts_with_all = ["programs", "start"])]
    after: Option<String>,
    /// List programs as `index<TAB>machine_number<TAB>input_word`, skipping vacant indices
    #[arg(long)]
    programs: bool,
    /// First program index to list
    #[arg(long, default_value_t = 0, requires = "programs")]
    start: u64,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, conflicts_with = "encoding", required_unless_present = "encoding")]
    machine_number: Option<String>,
    #[arg(long)]
    encoding: Option<String>,
    /// Input word, one base-36 digit per symbol
    #[arg(long, default_value = "")]
    input: String,
    /// Step budget
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    fuel: u64,
    /// Also print the final state, head and non-blank cells
    #[arg(long)]
    trace: bool,
}

#[derive(Debug, Args)]
struct DovetailArgs {
    /// Last horizon to compute
    #[arg(long)]
    horizon: u64,
    /// Program list, `machine_number<TAB>input_word` per line; default is the enumerated programs
    #[arg(long)]
    programs: Option<PathBuf>,
    /// Worker threads; the output does not depend on this
    #[arg(long, default_value_t = NonZeroUsize::MIN)]
    workers: NonZeroUsize,
    /// Continue from a checkpoint file
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Write a checkpoint file after the last horizon
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Print only the line for the last horizon
    #[arg(long)]
    last_only: bool,
}

#[derive(Debug, Args)]
struct FuelArgs {
    /// Fuel for input n is FUEL_BASE + FUEL_QUADRATIC * n^2
    #[arg(long, default_value_t = FuelPolicy::default().base)]
    fuel_base: u64,
    #[arg(long, default_value_t = FuelPolicy::default().quadratic)]
    fuel_quadratic: u64,
}

impl FuelArgs {
    fn policy(&self) -> FuelPolicy {
        FuelPolicy {
            base: self.fuel_base,
            quadratic: self.fuel_quadratic,
        }
    }
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Machine number, or an encoding starting with `(`
    #[arg(long)]
    machine: String,
    #[arg(long)]
    base: u32,
    /// Largest input n to run
    #[arg(long)]
    horizon: u64,
    #[command(flatten)]
    fuel: FuelArgs,
}

#[derive(Debug, Subcommand)]
enum ApproxCommand {
    /// Every run halts, prints at least n digits, and agrees with all earlier outputs
    CheckComputable {
        #[command(flatten)]
        check: CheckArgs,
        /// Stream file whose first line is the expected digits
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Find the smallest k >= m after which the first m digits stay fixed
    CheckApproaching {
        #[command(flatten)]
        check: CheckArgs,
        /// Precision: number of leading digits that must settle
        #[arg(long)]
        m: u64,
    },
    /// Diagonal of a list of digit streams
    Diagonal(DiagonalArgs),
}

#[derive(Debug, Args)]
struct DiagonalArgs {
    /// Stream file, line i is stream i
    #[arg(long)]
    streams: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    base: u32,
    /// Copy digit i of stream i instead of shifting it by one
    #[arg(long)]
    prime: bool,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// Configuration file of `key = value` lines, `-` for stdin
    #[arg(required_unless_present = "id", conflicts_with = "id")]
    config: Option<PathBuf>,
    /// Experiment name, instead of a configuration file
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(crate::experiment::EXPERIMENTS))]
    id: Option<String>,
    /// Parameter override, `key=value`
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Write the report to this file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

const SAMPLES: [&str; 10] = [
    "m-loop",
    "m-halt",
    "m-halt3",
    "wide-loop",
    "threes",
    "alternating",
    "two-phase",
    "parity",
    "inconsistent",
    "first",
];

/// Domain errors. Each variant prints with its own prefix.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("decode error: {0}")]
    Decode(#[from] DecodeError),
    #[error("number error: {0}")]
    Number(#[from] NumberError),
    #[error("input error: {0}")]
    Input(String),
    #[error("format error: {file}: {source}")]
    Format { file: String, source: FormatError },
    #[error("enumeration error: {0}")]
    Enum(#[from] EnumError),
    #[error("simulation error: {0}")]
    Simulation(#[from] TmError),
    #[error("dovetail error: {0}")]
    Dovetail(#[from] DovetailError),
    #[error("approx error: {0}")]
    Approx(#[from] ApproxError),
    #[error("checkpoint error: {0}")]
    Checkpoint(#[from] CheckpointError),
    #[error("experiment error: {0}")]
    Experiment(#[from] ExperimentError),
    #[error("io error: {path}: {source}")]
    Io { path: String, source: io::Error },
}

fn io_error(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text).map_err(io_error(path))?;
        Ok(text)
    } else {
        fs::read_to_string(path).map_err(io_error(path))
    }
}

fn format_error(path: &Path) -> impl FnOnce(FormatError) -> CliError + '_ {
    move |source| CliError::Format {
        file: path.display().to_string(),
        source,
    }
}

/// Outcome of a command that ran to completion.
enum Status {
    Success,
    Failed,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = target.write_all(text.as_bytes());
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(Status::Success) => 0,
        Ok(Status::Failed) => 1,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            1
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<Status, CliError> {
    let mut buf = String::new();
    let status = match command {
        Command::Encode { file } => {
            let text = read_text(&file)?;
            let machine = formats::parse_machine(&text).map_err(format_error(&file))?;
            line(&mut buf, codec::encode(&machine));
            Status::Success
        }
        Command::Decode { encoding } => {
            line(&mut buf, codec::decode(&encoding)?);
            Status::Success
        }
        Command::Number { encoding } => {
            line(&mut buf, codec::to_number(&encoding)?);
            Status::Success
        }
        Command::Unnumber { number } => {
            let number: MachineNumber = number.parse()?;
            line(&mut buf, codec::from_number(&number));
            Status::Success
        }
        Command::Validate { encoding } => {
            let report = validate(&codec::parse(&encoding)?);
            if report.is_valid() {
                line(&mut buf, "valid");
                Status::Success
            } else {
                for v in &report.violations {
                    line(&mut buf, format!("{}\t{}", v.rule, v.detail));
                }
                Status::Failed
            }
        }
        Command::Enumerate(args) => enumerate(args, &mut buf)?,
        Command::Run(args) => run_machine(args, &mut buf)?,
        Command::Dovetail(args) => dovetail(args, out)?,
        Command::Approx { check } => match check {
            ApproxCommand::CheckComputable { check, reference } => {
                let machine = machine_arg(&check.machine)?;
                let reference = match reference {
                    Some(path) => {
                        let text = read_text(&path)?;
                        Some(formats::parse_reference(&text, check.base).map_err(format_error(&path))?)
                    }
                    None => None,
                };
                let policy = check.fuel.policy();
                let report = check_computable(&machine, check.base, check.horizon, reference.as_ref(), &policy)?;
                approx_report(&report, &mut buf)
            }
            ApproxCommand::CheckApproaching { check, m } => {
                let machine = machine_arg(&check.machine)?;
                let policy = check.fuel.policy();
                let report = check_approaching(&machine, check.base, m, check.horizon, &policy)?;
                let status = approx_report(&report, &mut buf);
                if let Verdict::ConformsUpTo(k) = report.verdict {
                    line(&mut buf, format!("witness\t{k}"));
                }
                status
            }
            ApproxCommand::Diagonal(args) => diagonal(args, &mut buf)?,
        },
        Command::Diagonal(args) => diagonal(args, &mut buf)?,
        Command::Experiment(args) => experiment(args, &mut buf)?,
        Command::Sample { name } => {
            line(&mut buf, codec::number_of(&sample(&name)));
            Status::Success
        }
    };
    out.write_all(buf.as_bytes()).map_err(io_error(Path::new("<stdout>")))?;
    Ok(status)
}

fn line(buf: &mut String, value: impl std::fmt::Display) {
    use std::fmt::Write as _;
    writeln!(buf, "{value}").unwrap();
}

fn sample(name: &str) -> Machine {
    match name {
        "m-loop" => samples::m_loop(),
        "m-halt" => samples::m_halt(),
        "m-halt3" => samples::m_halt3(),
        "wide-loop" => samples::wide_loop(),
        "threes" => samples::threes(),
        "alternating" => samples::alternating(),
        "two-phase" => samples::two_phase(7),
        "parity" => samples::parity(),
        "inconsistent" => samples::inconsistent(),
        _ => approachable_core::enumerate::enumerate_machines(1).remove(0).1,
    }
}

/// A machine number, or an encoding when the text starts with `(`.
fn machine_arg(text: &str) -> Result<Machine, CliError> {
    if text.starts_with('(') {
        Ok(codec::decode(text)?)
    } else {
        let number: MachineNumber = text.parse()?;
        Ok(machine_of(&number)?)
    }
}

fn enumerate(args: EnumerateArgs, buf: &mut String) -> Result<Status, CliError> {
    if args.programs {
        let mut numbering = ProgramNumbering::enumerated();
        let end = args.start.saturating_add(args.count);
        for index in args.start..end {
            let Some(program) = numbering.program(index) else {
                continue;
            };
            let (a, _) = cantor_unpair(index);
            let number = numbering.catalog().number(MachineIndex(a + 1))?;
            line(buf, format!("{index}\t{number}\t{}", format_word(&program.input)));
        }
    } else {
        let numbers = match args.after {
            Some(after) => MachineEnumerator::after(&after.parse()?),
            None => MachineEnumerator::new(),
        };
        for number in numbers.take(usize::try_from(args.count).unwrap_or(usize::MAX)) {
            line(buf, number);
        }
    }
    Ok(Status::Success)
}

fn run_machine(args: RunArgs, buf: &mut String) -> Result<Status, CliError> {
    let machine = match (&args.machine_number, &args.encoding) {
        (Some(number), _) => machine_of(&number.parse()?)?,
        (None, Some(encoding)) => codec::decode(encoding)?,
        (None, None) => unreachable!("clap requires one of the machine flags"),
    };
    let input = parse_word(&args.input).map_err(CliError::Input)?;
    let outcome = tm::run(&machine, &input, args.fuel)?;
    let label = match &outcome {
        Outcome::Halted(_) => "HALTED",
        Outcome::OutOfFuel(_) => "OUT_OF_FUEL",
    };
    line(buf, format!("{label} steps={}", outcome.steps()));
    if args.trace {
        let config = outcome.config();
        line(buf, format!("state\t{}", config.state.0));
        line(buf, format!("head\t{}", config.head));
        let cells: Vec<String> = config.cells().map(|(c, s)| format!("{c}:{}", s.0)).collect();
        line(buf, format!("tape\t{}", cells.join(" ")));
    }
    Ok(Status::Success)
}

fn dovetail(args: DovetailArgs, out: &mut dyn Write) -> Result<Status, CliError> {
    let requested = match &args.programs {
        Some(path) => {
            let text = read_text(path)?;
            Some(Universe::explicit(&formats::parse_programs(&text).map_err(format_error(path))?))
        }
        None => None,
    };
    let (universe, mut state) = match &args.resume {
        Some(path) => {
            let checkpoint = Checkpoint::load(path)?;
            if requested.as_ref().is_some_and(|u| *u != checkpoint.universe) {
                return Err(CheckpointError::UniverseMismatch.into());
            }
            (checkpoint.universe, checkpoint.state)
        }
        None => (requested.unwrap_or(Universe::Enumerated), DovetailState::new()),
    };
    let mut source = universe
        .source()
        .map_err(|e| CliError::Checkpoint(CheckpointError::Programs(e)))?;
    let executor = Threaded::new(args.workers);
    if args.horizon <= state.horizon() {
        return Err(DovetailError::HorizonNotIncreasing {
            current: state.horizon(),
            requested: args.horizon,
        }
        .into());
    }
    let stdout = Path::new("<stdout>");
    for h in state.horizon() + 1..=args.horizon {
        state.advance_with(source.as_mut(), h, &executor)?;
        if !args.last_only || h == args.horizon {
            writeln!(out, "{h}\t{}", state.bits()).map_err(io_error(stdout))?;
        }
    }
    if let Some(path) = &args.checkpoint {
        Checkpoint::new(universe, state).save(path)?;
    }
    Ok(Status::Success)
}

fn approx_report(report: &ApproxReport, buf: &mut String) -> Status {
    for obs in &report.transcript {
        let output = match obs.status {
            RunStatus::Halted { .. } => format_digits(&obs.output),
            RunStatus::OutOfFuel { .. } => "-".to_owned(),
        };
        line(buf, format!("{}\t{}\t{}", obs.n, obs.status_label(), output));
    }
    line(buf, format!("verdict\t{}", report.verdict));
    match report.verdict {
        Verdict::ViolatesAt { .. } => Status::Failed,
        Verdict::ConformsUpTo(_) | Verdict::Inconclusive(_) => Status::Success,
    }
}

fn diagonal(args: DiagonalArgs, buf: &mut String) -> Result<Status, CliError> {
    let text = read_text(&args.streams)?;
    let streams = formats::parse_streams(&text, args.base).map_err(format_error(&args.streams))?;
    let digits = if args.prime {
        diagonal_prime(&streams, args.n)?
    } else {
        approx::diagonal(&streams, args.n, args.base)?
    };
    line(buf, format_digits(&digits));
    Ok(Status::Success)
}

fn experiment(args: ExperimentArgs, buf: &mut String) -> Result<Status, CliError> {
    let mut config = match (&args.config, &args.id) {
        (Some(path), _) => ExperimentConfig::parse(&read_text(path)?)?,
        (None, Some(id)) => ExperimentConfig::new(id),
        (None, None) => unreachable!("clap requires a configuration or an id"),
    };
    for pair in &args.set {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("--set expects KEY=VALUE, found {pair:?}")))?;
        config.params.insert(key.trim().to_owned(), value.trim().to_owned());
    }
    let report = run_experiment(&config)?;
    match &args.output {
        Some(path) => fs::write(path, report.to_string()).map_err(io_error(path))?,
        None => buf.push_str(&report.to_string()),
    }
    Ok(if report.passed { Status::Success } else { Status::Failed })
}
