//! `qpartial`: run quantum while-programs, compute interval expectations and
//! run the randomized verification suites. All output is JSON.
//!
//! Exit codes: 0 on success, 1 on any error, 2 when a program run does not
//! converge or a verification suite has failures.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qpartial::io::{self, RunReportJson};
use qpartial::observable::ExpectationJson;
use qpartial::verify::{self, Suite, VerifyConfig};
use qpartial::{BoundedObservable, FixpointConfig, PartialDensityOperator, Tolerances};

#[derive(Parser, Debug)]
#[command(name = "qpartial", version, about = "Partial density operators, interval expectations and a quantum while-language")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// Base seed for every random draw.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Iteration cap for chain suprema and loops.
    #[arg(long = "max-iter", global = true, default_value_t = 10_000)]
    max_iter: usize,
    /// A chain step raising the trace by less than this ends the iteration.
    #[arg(long = "trace-tol", global = true, default_value_t = 1e-9)]
    trace_tol: f64,
    /// Eigenvalues down to minus this count as nonnegative.
    #[arg(long = "psd-tol", global = true, default_value_t = 1e-9)]
    psd_tol: f64,
    /// Largest tolerated |A - A†| entry.
    #[arg(long = "hermitian-tol", global = true, default_value_t = 1e-10)]
    hermitian_tol: f64,
    #[arg(long = "eig-tol", global = true, default_value_t = 1e-9)]
    eig_tol: f64,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a program; the input defaults to |0...0><0...0|.
    Run {
        program: PathBuf,
        /// Input partial density operator as matrix JSON.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Interval expectation of an observable in a partial density operator.
    Expect { observable: PathBuf, state: PathBuf },
    /// Run a verification suite: gleason, dcpo, interval or qlang.
    Verify {
        suite: Suite,
        /// Comma-separated dimensions in 2..=16.
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Feed the dcpo suite a corrupted chain; the suite must then fail.
        #[arg(long = "negative-control")]
        negative_control: bool,
    },
}

impl GlobalOpts {
    fn tolerances(&self) -> qpartial::Result<Tolerances> {
        let tol = Tolerances {
            hermitian: self.hermitian_tol,
            eig: self.eig_tol,
            psd: self.psd_tol,
            ..Tolerances::default()
        };
        tol.validate()?;
        Ok(tol)
    }

    fn fixpoint(&self) -> qpartial::Result<FixpointConfig> {
        let cfg = FixpointConfig {
            max_iterations: self.max_iter,
            trace_tol: self.trace_tol,
            monotonicity_check: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn emit<S: Serialize>(&self, value: &S) -> qpartial::Result<()> {
        let text = io::to_json_string(value)?;
        match &self.out {
            Some(path) => std::fs::write(path, text + "\n")
                .map_err(|e| qpartial::Error::Config(format!("{}: {e}", path.display()))),
            None => {
                println!("{text}");
                Ok(())
            }
        }
    }
}

fn with_path(path: &Path, e: qpartial::Error) -> String {
    format!("{}: {e}", path.display())
}

fn run(opts: &GlobalOpts, program: &Path, input: Option<&Path>) -> Result<ExitCode, String> {
    let tol = opts.tolerances().map_err(|e| e.to_string())?;
    let cfg = opts.fixpoint().map_err(|e| e.to_string())?;
    let text = io::read(program).map_err(|e| e.to_string())?;
    let prog = qpartial::qlang::parse_with(&text, &tol).map_err(|e| with_path(program, e))?;
    let state = match input {
        Some(path) => io::read_state(path, &tol).map_err(|e| with_path(path, e))?,
        None => PartialDensityOperator::basis_state(prog.dim(), 0),
    };
    let report = qpartial::qlang::interpret(&prog, &state, &cfg, &tol).map_err(|e| e.to_string())?;
    opts.emit(&RunReportJson::from(&report)).map_err(|e| e.to_string())?;
    Ok(if report.converged { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn expect(opts: &GlobalOpts, observable: &Path, state: &Path) -> Result<ExitCode, String> {
    let tol = opts.tolerances().map_err(|e| e.to_string())?;
    let a = io::read_matrix(observable).map_err(|e| with_path(observable, e))?;
    let obs = BoundedObservable::from_hermitian(a, &tol).map_err(|e| with_path(observable, e))?;
    let f = io::read_state(state, &tol).map_err(|e| with_path(state, e))?;
    let e = obs.expectation(&f, &tol).map_err(|e| e.to_string())?;
    opts.emit(&ExpectationJson::from(&e)).map_err(|e| e.to_string())?;
    Ok(ExitCode::SUCCESS)
}

fn verify(opts: &GlobalOpts, suite: Suite, dims: &[usize], trials: usize, negative: bool) -> Result<ExitCode, String> {
    let cfg = VerifyConfig {
        suite,
        dims: dims.to_vec(),
        trials,
        seed: opts.seed,
        fixpoint: opts.fixpoint().map_err(|e| e.to_string())?,
        tol: opts.tolerances().map_err(|e| e.to_string())?,
        negative_control: negative,
    };
    let report = verify::run_suite(&cfg).map_err(|e| e.to_string())?;
    opts.emit(&report).map_err(|e| e.to_string())?;
    Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run { program, input } => run(&cli.opts, program, input.as_deref()),
        Command::Expect { observable, state } => expect(&cli.opts, observable, state),
        Command::Verify {
            suite,
            dims,
            trials,
            negative_control,
        } => verify(&cli.opts, *suite, dims, *trials, *negative_control),
    };
    outcome.unwrap_or_else(|message| {
        eprintln!("error: {message}");
        ExitCode::FAILURE
    })
}
