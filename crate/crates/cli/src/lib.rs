//! The `entgeo` command line.
//!
//! Exit codes: 0 on success, 2 on usage errors (bad flags, unknown or
//! out-of-range state specs), 1 on computation or input-file errors.

mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use entgeo::clifford::{
    explicit_permuted_map, meyer_wallach, qubit_k_invariants, scott_q, three_qubit_map,
    two_qubit_map, two_qubit_map_swapped, Permutation,
};
use entgeo::measures::{arithmetic_measure, geometric_measure};
use entgeo::measures::{measure_report, DEFAULT_TOLERANCE};
use entgeo::probes::{pair_probe_matrix, ProbeKind};
use entgeo::roof::{roof_measure, Average, RoofOptions, DEFAULT_BUDGET, DEFAULT_RESTARTS};
use entgeo::states::{make_mems_purification, parse_state, State, StateSpec};
use entgeo::StateVector;

pub use output::Format;
use output::{HopfOutput, ImageRow, SweepRow};

#[derive(Parser, Debug)]
#[command(
    name = "entgeo",
    version,
    about = "Geometric multipartite entanglement measures for qubit registers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct StateArgs {
    /// Named state: ghz:N, w:N, bell:K, epr-pair, mems:X, werner:P, zero:N,
    /// basis:BITS, product:A,B;..., random:N:SEED
    #[arg(long, value_name = "SPEC", value_parser = parse_state_spec,
          required_unless_present = "state_file", conflicts_with = "state_file")]
    state: Option<State>,
    /// State or density-matrix JSON file
    #[arg(long, value_name = "PATH")]
    state_file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pair probes, M, G and the entanglement class of a pure state
    Measure {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value = "fr")]
        probe: ProbeKind,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE, value_parser = positive_real)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Hopf/Clifford map images and K invariants
    Hopf {
        #[command(flatten)]
        state: StateArgs,
        /// All qubit relabelings (2 or 3 qubits)
        #[arg(long)]
        all_perms: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Scott's Q_m average over m-qubit reductions
    Scott {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Convex-roof upper bound of M or G for a mixed state
    Roof {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value = "fr")]
        probe: ProbeKind,
        #[arg(long, default_value = "arithmetic")]
        average: Average,
        /// Objective evaluations per local search
        #[arg(long, default_value_t = DEFAULT_BUDGET as u64, value_parser = clap::value_parser!(u64).range(1..))]
        budget: u64,
        /// Local searches per decomposition size
        #[arg(long, default_value_t = DEFAULT_RESTARTS as u64, value_parser = clap::value_parser!(u64).range(1..))]
        restarts: u64,
        /// Largest decomposition size (default min(2r, r^2))
        #[arg(long)]
        k_max: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Summarize a state, or re-emit it as JSON
    State {
        #[command(flatten)]
        state: StateArgs,
        /// Write the state in the JSON input format
        #[arg(long)]
        emit: bool,
    },
    /// Measures along a one-parameter state family
    Sweep {
        #[arg(long, value_enum)]
        family: Family,
        /// START:STOP:STEP
        #[arg(long, value_parser = parse_range)]
        param: ParamRange,
        #[arg(long, default_value = "fr")]
        probe: ProbeKind,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Mems,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct ParamRange {
    start: f64,
    stop: f64,
    step: f64,
}

impl ParamRange {
    fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| (self.start + i as f64 * self.step).min(self.stop))
            .collect()
    }
}

fn parse_state_spec(s: &str) -> Result<State, String> {
    let spec: StateSpec = s.parse().map_err(|e: entgeo::Error| e.to_string())?;
    spec.resolve().map_err(|e| e.to_string())
}

fn positive_real(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got `{s}`")),
    }
}

fn parse_range(s: &str) -> Result<ParamRange, String> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.parse::<f64>().ok().filter(|v| v.is_finite()))
        .collect::<Option<_>>()
        .ok_or_else(|| format!("expected START:STOP:STEP, got `{s}`"))?;
    match parts[..] {
        [start, stop, step] if step > 0.0 && start <= stop => Ok(ParamRange { start, stop, step }),
        [_, _, _] => Err(format!("need START <= STOP and STEP > 0, got `{s}`")),
        _ => Err(format!("expected START:STOP:STEP, got `{s}`")),
    }
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<entgeo::Error> for Failure {
    fn from(e: entgeo::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

fn load_state(args: StateArgs) -> Result<State, Failure> {
    if let Some(state) = args.state {
        return Ok(state);
    }
    let path = args.state_file.expect("clap requires one state source");
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Failure::Compute(format!("--state-file {}: {e}", path.display())))?;
    parse_state(&text)
        .map_err(|e| Failure::Compute(format!("--state-file {}: {e}", path.display())))
}

fn require_pure(state: State, command: &str) -> Result<StateVector, Failure> {
    match state {
        State::Pure(psi) => Ok(psi),
        State::Mixed(_) => Err(Failure::Compute(format!(
            "`{command}` needs a pure state; use `roof` for a mixed state"
        ))),
    }
}

/// Parses `argv` (program name first), runs the command and writes the
/// report to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let rendered = e.render().to_string();
                    let _ = writeln!(
                        err,
                        "{}",
                        rendered.lines().next().unwrap_or("error: invalid usage")
                    );
                    2
                }
            };
        }
    };
    match execute(cli.command) {
        Ok(text) => match out.write_all(text.as_bytes()) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(err, "error: writing output: {e}");
                1
            }
        },
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Compute(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn execute(command: Command) -> Result<String, Failure> {
    match command {
        Command::Measure {
            state,
            probe,
            tol,
            format,
        } => {
            let psi = require_pure(load_state(state)?, "measure")?;
            Ok(output::measure(&measure_report(&psi, probe, tol)?, format))
        }
        Command::Hopf {
            state,
            all_perms,
            format,
        } => {
            let psi = require_pure(load_state(state)?, "hopf")?;
            Ok(output::hopf(&hopf(&psi, all_perms)?, format))
        }
        Command::Scott { state, m, format } => {
            let psi = require_pure(load_state(state)?, "scott")?;
            let q = scott_q(&psi, m).map_err(|e| Failure::Usage(format!("--m {m}: {e}")))?;
            Ok(output::scott(psi.n_qubits(), m, q, format))
        }
        Command::Roof {
            state,
            probe,
            average,
            budget,
            restarts,
            k_max,
            seed,
            format,
        } => {
            let rho = load_state(state)?.density();
            let options = RoofOptions {
                probe,
                average,
                budget: budget as usize,
                restarts: restarts as usize,
                seed,
                k_max,
            };
            let result = roof_measure(&rho, &options)?;
            Ok(output::roof(rho.n_qubits(), &options, &result, format))
        }
        Command::State { state, emit } => {
            let state = load_state(state)?;
            Ok(if emit {
                output::emit_state(&state)
            } else {
                output::state_summary(&state)
            })
        }
        Command::Sweep {
            family,
            param,
            probe,
            format,
        } => {
            let rows = param
                .values()
                .into_iter()
                .map(|x| {
                    let psi = match family {
                        Family::Mems => make_mems_purification(x)
                            .map_err(|e| Failure::Usage(format!("--param {x}: {e}")))?,
                    };
                    let pm = pair_probe_matrix(&psi, probe)?;
                    Ok(SweepRow {
                        x,
                        m: arithmetic_measure(&pm),
                        g: geometric_measure(&pm),
                        pairs: pm,
                    })
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            Ok(output::sweep("mems", probe, &rows, format))
        }
    }
}

fn hopf(psi: &StateVector, all_perms: bool) -> Result<HopfOutput, Failure> {
    let n = psi.n_qubits();
    let images = match n {
        2 => {
            let mut rows = vec![ImageRow::Two(Permutation::identity(2), two_qubit_map(psi)?)];
            if all_perms {
                rows.push(ImageRow::Two(
                    Permutation::swap(2, 0, 1)?,
                    two_qubit_map_swapped(psi)?,
                ));
            }
            rows
        }
        3 if all_perms => Permutation::s3()
            .into_iter()
            .map(|p| explicit_permuted_map(psi, &p).map(|img| ImageRow::Three(p, img)))
            .collect::<entgeo::Result<Vec<_>>>()?,
        3 => vec![ImageRow::Three(
            Permutation::identity(3),
            three_qubit_map(psi)?,
        )],
        _ if n < 2 => return Err(Failure::Compute("`hopf` needs at least 2 qubits".into())),
        _ if all_perms => {
            return Err(Failure::Usage(format!(
                "--all-perms: explicit map images exist for 2 or 3 qubits, got {n}"
            )))
        }
        _ => Vec::new(),
    };
    let mw = meyer_wallach(psi)?;
    Ok(HopfOutput {
        n_qubits: n,
        images,
        k_invariants: qubit_k_invariants(psi),
        meyer_wallach: mw.value,
        permutation_average: mw.permutation_average,
    })
}
