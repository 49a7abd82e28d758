//! Command-line front end. Exit codes: 0 conclusive, 2 inconclusive,
//! 1 usage, I/O or validation error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::channel::{self, QuantumChannel};
use crate::error::{Error, Result};
use crate::io;
use crate::report::{self, ChannelAnalysis, Report, StateReport};
use crate::sdp::{decide, DecideConfig};
use crate::state;
use crate::Direction;

pub const EXIT_CONCLUSIVE: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "degradable", version, about = "Degradability tests for tripartite pure states and quantum channels")]
pub struct Cli {
    #[command(flatten)]
    pub run: RunArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    #[value(name = "EtoB", alias = "etob", alias = "e2b")]
    EtoB,
    #[value(name = "BtoE", alias = "btoe", alias = "b2e")]
    BtoE,
    #[value(name = "both")]
    Both,
}

impl DirectionArg {
    fn directions(self) -> Vec<Direction> {
        match self {
            DirectionArg::EtoB => vec![Direction::EveToBob],
            DirectionArg::BtoE => vec![Direction::BobToEve],
            DirectionArg::Both => vec![Direction::EveToBob, Direction::BobToEve],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Which degradation direction(s) to test.
    #[arg(long, global = true, value_enum, default_value = "both")]
    pub direction: DirectionArg,
    #[arg(long, global = true, default_value_t = 20_000)]
    pub max_iter: usize,
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub feas_tol: f64,
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub psd_tol: f64,
    #[arg(long, global = true, default_value_t = 500)]
    pub stall_window: usize,
    /// Random combination witnesses per direction (0 disables them).
    #[arg(long, global = true, default_value_t = 256)]
    pub witnesses: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl RunArgs {
    pub fn decide_config(&self) -> Result<DecideConfig> {
        let mut c = DecideConfig { witness_count: self.witnesses, seed: self.seed, ..DecideConfig::default() };
        c.solver.max_iter = self.max_iter;
        c.solver.feas_tol = self.feas_tol;
        c.solver.psd_tol = self.psd_tol;
        c.solver.stall_window = self.stall_window;
        c.validate()?;
        Ok(c)
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide degradability of a state file.
    AnalyzeState { path: PathBuf },
    /// Test a channel through its maximally entangled lift.
    AnalyzeChannel { path: PathBuf },
    /// Sweep a channel family and print CSV.
    Scan {
        #[arg(long, value_enum, default_value = "depolarizing")]
        family: Family,
        #[arg(long)]
        lo: f64,
        #[arg(long)]
        hi: f64,
        #[arg(long)]
        step: f64,
        /// Run the full decision on points the filter does not rule out.
        #[arg(long)]
        full: bool,
    },
    /// Write a built-in state or channel file.
    Fixture {
        #[command(subcommand)]
        name: Fixture,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Depolarizing,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Fixture {
    /// (|000⟩ + |111⟩)/√2.
    Ghz,
    /// Qubit state (a, 0, b, 0, 0, a, 0, −b) with 2(a² + b²) = 1.
    Example2 {
        #[arg(long, default_value_t = 0.5)]
        a: f64,
        #[arg(long, default_value_t = 0.5)]
        b: f64,
    },
    /// Unnormalized 3×2×2 state, degradable on diagonal terms only.
    Sec4 {
        /// α²
        #[arg(long, default_value_t = 0.8)]
        alpha2: f64,
        /// a²
        #[arg(long, default_value_t = 0.65)]
        a2: f64,
    },
    /// Qubit depolarizing channel.
    Depolarizing {
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
    },
    /// Qubit amplitude damping channel.
    AmplitudeDamping {
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
    },
    /// Identity channel on C^n.
    Identity {
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
}

fn fixture_json(f: &Fixture) -> Result<String> {
    let state_json = |s: state::TripartiteState| io::state_to_json(&s);
    let channel_json = |c: QuantumChannel| io::channel_to_json(&c);
    let sqrt_unit = |name: &str, x: f64| -> Result<f64> {
        if x > 0.0 && x < 1.0 {
            Ok(x.sqrt())
        } else {
            Err(Error::InvalidParameter(format!("{name} = {x} must lie in (0, 1)")))
        }
    };
    Ok(match *f {
        Fixture::Ghz => state_json(state::ghz()),
        Fixture::Example2 { a, b } => state_json(state::example2(a, b)?),
        Fixture::Sec4 { alpha2, a2 } => state_json(state::sec4(sqrt_unit("alpha2", alpha2)?, sqrt_unit("a2", a2)?)?),
        Fixture::Depolarizing { epsilon } => channel_json(channel::depolarizing(epsilon)?),
        Fixture::AmplitudeDamping { gamma } => channel_json(channel::amplitude_damping(gamma)?),
        Fixture::Identity { n } => channel_json(QuantumChannel::identity(n)?),
    } + "\n")
}

struct Output {
    text: String,
    code: i32,
    /// Extra line for stderr (kept out of machine-readable stdout).
    note: Option<String>,
}

fn execute(cli: &Cli) -> Result<Output> {
    let run = &cli.run;
    let started = Instant::now();
    let render = |report: Report| -> Output {
        let code = if report.is_conclusive() { EXIT_CONCLUSIVE } else { EXIT_INCONCLUSIVE };
        let text = match run.format {
            Format::Json => report.to_json(),
            Format::Text => report.to_text(Some(started.elapsed())),
        };
        Output { text, code, note: None }
    };
    match &cli.command {
        Command::AnalyzeState { path } => {
            let config = run.decide_config()?;
            let s = io::read_state(path)?;
            let outcomes = run
                .direction
                .directions()
                .into_iter()
                .map(|d| decide(&s, d, &config))
                .collect::<Result<Vec<_>>>()?;
            let (n, p, q) = s.dims();
            Ok(render(Report::State(StateReport {
                dims: [n, p, q],
                normalized_input: s.is_normalized(),
                config,
                outcomes,
            })))
        }
        Command::AnalyzeChannel { path } => {
            let config = run.decide_config()?;
            let ch = io::read_channel(path)?;
            let report = channel::channel_degradability_test(&ch, &config)?;
            Ok(render(Report::Channel(ChannelAnalysis {
                dim: ch.dim(),
                kraus_count: ch.kraus().len(),
                config,
                scope: report.verdict.scope(),
                report,
            })))
        }
        Command::Scan { family: Family::Depolarizing, lo, hi, step, full } => {
            let config = run.decide_config()?;
            let scan = channel::epsilon_scan(*lo, *hi, *step, config.slack_tol, full.then_some(&config))?;
            let note = Some(report::threshold_line(&scan));
            let text = match run.format {
                Format::Text => report::scan_csv(&scan),
                Format::Json => serde_json::to_string_pretty(&scan).expect("scan serializes") + "\n",
            };
            Ok(Output { text, code: EXIT_CONCLUSIVE, note })
        }
        Command::Fixture { name } => Ok(Output { text: fixture_json(name)?, code: EXIT_CONCLUSIVE, note: None }),
    }
}

/// Run with explicit arguments and streams; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_CONCLUSIVE };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            let written = match &cli.run.out {
                Some(path) => std::fs::write(path, &out.text),
                None => stdout.write_all(out.text.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_ERROR;
            }
            if let Some(note) = out.note {
                let _ = writeln!(stderr, "{note}");
            }
            out.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
    }
}
