//! `isolab` command line.
//!
//! Single-object verbs print JSON on stdout. Exit codes: 0 success, 1 I/O
//! failure, 2 invalid input, 3 a classification that is ambiguous at the
//! requested tolerance (the diagnostic is still printed as JSON on stdout).

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use isolab::io::{channel_to_json, parse_channel, parse_state, report_to_json, state_to_json};
use isolab::lattice::hasse_dot;
use isolab::lemmas::verify_lemmas;
use isolab::scan::{scan_tetrahedron, write_csv};
use isolab::{
    channel_isotropy, leq, meet, project, simulation_gate, smoothed_classify, Error, PauliForm, SubgroupClass,
    SubgroupDescriptor, Tolerance,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "isolab", version, about = "Residual SU(2) symmetry of two-qubit states and qubit channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TolArgs {
    /// Relative tolerance for rank and equality decisions.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

impl TolArgs {
    fn tolerance(&self) -> Result<Tolerance, Error> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidParameter(format!("--tol must be in (0, 1), got {}", self.tol)));
        }
        Ok(Tolerance::new(self.tol))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Isotropy subgroup of a state, or of a channel with --channel.
    Classify {
        #[arg(long, conflicts_with = "channel", required_unless_present = "channel")]
        state: Option<String>,
        #[arg(long)]
        channel: Option<String>,
        /// Trace-distance radius for the smoothed classification of a state.
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Twirl a state onto the fixed set of a subgroup.
    Project {
        #[arg(long)]
        state: String,
        /// Class name (standard axes) or descriptor JSON.
        #[arg(long)]
        group: String,
    },
    /// Subgroup lattice queries.
    Lattice {
        #[arg(long, num_args = 2, value_names = ["H1", "H2"], conflicts_with_all = ["leq", "dot"])]
        meet: Option<Vec<String>>,
        #[arg(long, num_args = 2, value_names = ["H1", "H2"], conflicts_with = "dot")]
        leq: Option<Vec<String>>,
        /// Hasse diagram of the six classes in Graphviz format.
        #[arg(long)]
        dot: bool,
    },
    /// Necessary condition for a resource state to simulate a channel.
    Gate {
        #[arg(long)]
        state: String,
        #[arg(long)]
        channel: String,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Classify the barycentric grid of the Bell-diagonal tetrahedron as CSV.
    Scan {
        #[arg(long, default_value_t = 20)]
        resolution: usize,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long, env = "ISOLAB_THREADS")]
        threads: Option<usize>,
    },
    /// Randomised property checks of the structural lemmas.
    VerifyLemmas {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        n_trials: usize,
    },
}

/// Reads a JSON argument: inline when it starts with `{`, stdin for `-`,
/// otherwise a file path.
fn read_json(arg: &str) -> Result<Value, Error> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else if arg == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(arg).map_err(|e| match e.kind() {
            io::ErrorKind::NotFound => Error::MalformedInput(format!("{arg:?} is not inline JSON or an existing file")),
            _ => Error::Io(format!("{arg}: {e}")),
        })?
    };
    Ok(serde_json::from_str(&text)?)
}

fn read_state(arg: &str) -> Result<PauliForm, Error> {
    parse_state(&read_json(arg)?)
}

fn read_group(arg: &str) -> Result<SubgroupDescriptor, Error> {
    if let Ok(class) = arg.parse::<SubgroupClass>() {
        return Ok(SubgroupDescriptor::standard(class));
    }
    Ok(serde_json::from_value(read_json(arg)?)?)
}

fn descriptor_json(h: &SubgroupDescriptor) -> Value {
    serde_json::to_value(h).expect("descriptor serialises")
}

fn check_eps(eps: f64) -> Result<(), Error> {
    if eps >= 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("--eps must be a nonnegative number, got {eps}")))
    }
}

enum Output {
    Json(Value),
    Text(String),
    None,
}

fn run(cmd: Command) -> Result<Output, Error> {
    match cmd {
        Command::Classify { state, channel, eps, tol } => {
            let tol = tol.tolerance()?;
            check_eps(eps)?;
            let report = match (state, channel) {
                (Some(s), _) => smoothed_classify(&read_state(&s)?, eps, &tol)?,
                (None, Some(c)) => {
                    let ch = parse_channel(&read_json(&c)?)?;
                    let mut v = report_to_json(&channel_isotropy(&ch, &tol)?);
                    v["channel"] = channel_to_json(&ch);
                    return Ok(Output::Json(v));
                }
                (None, None) => unreachable!("clap requires one of --state/--channel"),
            };
            Ok(Output::Json(report_to_json(&report)))
        }
        Command::Project { state, group } => {
            let h = read_group(&group)?;
            let out = project(&h, &read_state(&state)?);
            let mut v = state_to_json(&out);
            v["group"] = descriptor_json(&h);
            Ok(Output::Json(v))
        }
        Command::Lattice { meet: m, leq: l, dot } => {
            if dot {
                return Ok(Output::Text(hasse_dot()));
            }
            if let Some(args) = m {
                let (h1, h2) = (read_group(&args[0])?, read_group(&args[1])?);
                let h = meet(&h1, &h2);
                return Ok(Output::Json(json!({ "meet": descriptor_json(&h), "class": h.class().name() })));
            }
            if let Some(args) = l {
                let (h1, h2) = (read_group(&args[0])?, read_group(&args[1])?);
                return Ok(Output::Json(json!({ "leq": leq(&h1, &h2) })));
            }
            Err(Error::InvalidParameter("lattice needs one of --meet, --leq, --dot".into()))
        }
        Command::Gate { state, channel, eps, tol } => {
            let tol = tol.tolerance()?;
            check_eps(eps)?;
            let sigma = smoothed_classify(&read_state(&state)?, eps, &tol)?;
            let ch = channel_isotropy(&parse_channel(&read_json(&channel)?)?, &tol)?;
            Ok(Output::Json(json!({
                "verdict": serde_json::to_value(simulation_gate(&sigma, &ch))?,
                "state_isotropy": descriptor_json(&sigma.descriptor),
                "channel_isotropy": descriptor_json(&ch.descriptor),
            })))
        }
        Command::Scan { resolution, eps, out, tol, threads } => {
            let tol = tol.tolerance()?;
            let scan = scan_tetrahedron(resolution, eps, &tol, threads)?;
            match out {
                Some(path) => {
                    let f = File::create(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                    let mut w = BufWriter::new(f);
                    write_csv(&mut w, &scan.rows)?;
                    w.flush()?;
                }
                None => {
                    let stdout = io::stdout();
                    let mut w = BufWriter::new(stdout.lock());
                    write_csv(&mut w, &scan.rows)?;
                    w.flush()?;
                }
            }
            let ambiguous = scan.rows.iter().filter(|r| r.class.is_none()).count();
            eprintln!(
                "scanned {} points, skipped {} non-state points, {} ambiguous",
                scan.rows.len(),
                scan.skipped,
                ambiguous
            );
            Ok(Output::None)
        }
        Command::VerifyLemmas { seed, n_trials } => {
            if n_trials == 0 {
                return Err(Error::InvalidParameter("--n-trials must be at least 1".into()));
            }
            Ok(Output::Json(serde_json::to_value(verify_lemmas(seed, n_trials)?)?))
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialise")
}

// A closed pipe (`isolab ... | head`) is not an error worth a panic.
fn emit(s: &str) {
    let _ = writeln!(io::stdout().lock(), "{s}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Output::Json(v)) => {
            emit(&pretty(&v));
            ExitCode::SUCCESS
        }
        Ok(Output::Text(s)) => {
            emit(s.trim_end());
            ExitCode::SUCCESS
        }
        Ok(Output::None) => ExitCode::SUCCESS,
        Err(Error::AmbiguousAtTolerance { check, value, tol }) => {
            let diag = json!({ "error": "ambiguous", "check": check, "value": value, "tol": tol });
            emit(&pretty(&diag));
            ExitCode::from(3)
        }
        Err(e) => {
            let kind = match e {
                Error::Io(_) => "io",
                Error::MalformedInput(_) => "malformed-input",
                Error::NotAState { .. } | Error::InvalidState(_) => "invalid-state",
                _ => "invalid-parameter",
            };
            eprintln!("{}", json!({ "error": kind, "message": e.to_string() }));
            ExitCode::from(if matches!(e, Error::Io(_)) { 1 } else { 2 })
        }
    }
}
