//! The `emcs` command line.
//!
//! Exit codes: 0 on success, 1 when the input is fine but the answer is
//! negative (no grounded equilibrium, a failing check, a failed property),
//! 2 for malformed or inconsistent input.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use emcs_core::equilibria::{s_reduct, SolverConfig};
use emcs_core::evolution::{first_failing_instant, Semantics, StreamDriver};
use emcs_core::kernel::validate::Severity;
use emcs_core::oracle::Oracle;
use emcs_core::syntax::records::{
    observation_records, parse_observations, parse_single_state, parse_states, state_record, trace_record,
};
use emcs_core::syntax::{parse_system, serialize_system};
use emcs_core::{validate, warnings, Emcs, Error};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SEMANTIC: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "emcs", version, about = "Evolving multi-context system reasoner")]
struct Cli {
    /// Bound on fixpoint iterations; defaults to a bound derived from the system.
    #[arg(long, global = true, env = "EMCS_ITER_CAP")]
    iter_cap: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report errors and warnings for a system description.
    Validate { spec: PathBuf },
    /// Compute the evolving belief states for an observation stream.
    Run {
        spec: PathBuf,
        obs: PathBuf,
        /// Number of instants; defaults to the length of the stream.
        #[arg(long)]
        size: Option<usize>,
        #[arg(long, default_value = "wfs")]
        semantics: Semantics,
        /// Also write per-instant trace records to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Check that a sequence of states is an evolving equilibrium.
    Check {
        spec: PathBuf,
        obs: PathBuf,
        states: PathBuf,
    },
    /// Print the reduct of a system with respect to a belief state.
    Reduct { spec: PathBuf, state: PathBuf },
    /// Enumerate equilibria and check the solver against them.
    Oracle { spec: PathBuf },
}

/// Failure of one command: exit code and message.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn semantic(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_SEMANTIC,
            message: message.into(),
        }
    }

    fn at(path: &Path, e: Error) -> Self {
        let code = if e.is_input_error() { EXIT_INPUT } else { EXIT_SEMANTIC };
        let message = match e {
            Error::Parse { line, column, message } => format!("{}:{line}:{column}: {message}", path.display()),
            e => format!("{}: {e}", path.display()),
        };
        Failure { code, message }
    }
}

type Outcome = Result<i32, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn io(e: std::io::Error) -> Failure {
    Failure::input(format!("write failed: {e}"))
}

/// Parses and validates; warnings go to `err`.
fn load(path: &Path, err: &mut dyn Write) -> Result<Emcs, Failure> {
    let system = parse_system(&read(path)?).map_err(|e| Failure::at(path, e))?;
    let errors = validate(&system);
    if !errors.is_empty() {
        let lines: Vec<_> = errors.iter().map(|d| format!("{}: {d}", path.display())).collect();
        return Err(Failure::input(lines.join("\n")));
    }
    for w in warnings(&system) {
        writeln!(err, "{}: {w}", path.display()).map_err(io)?;
    }
    Ok(system)
}

/// Runs the command line `args` (including the program name).
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let config = SolverConfig {
        iteration_cap: cli.iter_cap,
    };
    let outcome = match cli.command {
        Command::Validate { spec } => cmd_validate(&spec, out),
        Command::Run {
            spec,
            obs,
            size,
            semantics,
            trace,
        } => cmd_run(&spec, &obs, size, semantics, trace.as_deref(), config, out, err),
        Command::Check { spec, obs, states } => cmd_check(&spec, &obs, &states, out, err),
        Command::Reduct { spec, state } => cmd_reduct(&spec, &state, out, err),
        Command::Oracle { spec } => cmd_oracle(&spec, config, out, err),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn cmd_validate(spec: &Path, out: &mut dyn Write) -> Outcome {
    let system = parse_system(&read(spec)?).map_err(|e| Failure::at(spec, e))?;
    let diagnostics = emcs_core::kernel::validate::diagnostics(&system);
    for d in &diagnostics {
        writeln!(out, "{}: {d}", spec.display()).map_err(io)?;
    }
    let errors = diagnostics.iter().filter(|d| d.severity == Severity::Error).count();
    writeln!(
        out,
        "{} context(s), {errors} error(s), {} warning(s)",
        system.len(),
        diagnostics.len() - errors
    )
    .map_err(io)?;
    Ok(if errors == 0 { EXIT_OK } else { EXIT_INPUT })
}

#[allow(clippy::too_many_arguments)]
fn cmd_run(
    spec: &Path,
    obs: &Path,
    size: Option<usize>,
    semantics: Semantics,
    trace: Option<&Path>,
    config: SolverConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let system = load(spec, err)?;
    let text = read(obs)?;
    let available = text.lines().filter(|l| !l.trim().is_empty()).count();
    let size = size.unwrap_or(available);
    if size > available {
        return Err(Failure::at(obs, Error::SizeExceedsObservations { size, available }));
    }
    let mut trace_file = match trace {
        Some(p) => Some(
            fs::File::create(p)
                .map(std::io::BufWriter::new)
                .map_err(|e| Failure::input(format!("{}: {e}", p.display())))?,
        ),
        None => None,
    };
    let mut driver = StreamDriver::new(system.clone(), semantics).with_config(config);
    for instant in observation_records(&text, &system).take(size) {
        let instant = instant.map_err(|e| Failure::at(obs, e))?;
        let t = driver.push(&instant).map_err(|e| Failure::at(obs, e))?;
        writeln!(out, "{}", state_record(&system, t.instant, &t.state)).map_err(io)?;
        if let Some(f) = trace_file.as_mut() {
            writeln!(f, "{}", trace_record(&system, &t)).map_err(io)?;
        }
    }
    if let Some(mut f) = trace_file {
        f.flush().map_err(io)?;
    }
    Ok(EXIT_OK)
}

fn cmd_check(spec: &Path, obs: &Path, states: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let system = load(spec, err)?;
    let obs_seq = parse_observations(&read(obs)?, &system).map_err(|e| Failure::at(obs, e))?;
    let se = parse_states(&read(states)?, &system).map_err(|e| Failure::at(states, e))?;
    match first_failing_instant(&system, &obs_seq, &se).map_err(|e| Failure::at(states, e))? {
        None => {
            writeln!(out, "ok: evolving equilibrium of size {}", se.size()).map_err(io)?;
            Ok(EXIT_OK)
        }
        Some(j) => Err(Failure::semantic(format!(
            "instant {j}: state is not an equilibrium of the instantiated system"
        ))),
    }
}

fn cmd_reduct(spec: &Path, state: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let system = load(spec, err)?;
    let s = parse_single_state(&read(state)?, &system).map_err(|e| Failure::at(state, e))?;
    let reduct = s_reduct(&system, &s).map_err(|e| Failure::at(spec, e))?;
    write!(out, "{}", serialize_system(&reduct.to_emcs())).map_err(io)?;
    Ok(EXIT_OK)
}

fn cmd_oracle(spec: &Path, config: SolverConfig, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let system = load(spec, err)?;
    let oracle = Oracle {
        solver: config,
        ..Oracle::default()
    };
    let report = oracle.verify_props(&system).map_err(|e| Failure::at(spec, e))?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    writeln!(out, "{json}").map_err(io)?;
    Ok(if report.pass() { EXIT_OK } else { EXIT_SEMANTIC })
}
