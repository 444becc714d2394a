//! `monadforge`: build, check and analyse monads on P³ from the command line.
//!
//! Exit codes: 0 on success, 1 when the mathematics says no (invalid or
//! unstable monad, refuted rank condition, residual above tolerance), 2 for
//! usage and format errors.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use monadforge::FieldKind;

#[derive(Parser, Debug)]
#[command(
    name = "monadforge",
    version,
    about = "Exact monads on P3 and a numerical connection lab"
)]
pub struct Cli {
    /// Coefficient field: prime:<p>, rational or gaussian. Files carry their own field.
    #[arg(long, global = true)]
    pub field: Option<FieldKind>,
    /// Seed for every random choice.
    #[arg(long, global = true, env = "MONADFORGE_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Saturation bound for rank certificates (default 4n + 4).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub dmax: Option<i64>,
    /// Write JSON here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenType {
    NullCorrelation,
    Instanton,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExtKind {
    Line,
    Omega1,
    Omega2,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SamplerKind {
    SmallHeight,
    Uniform,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a monad.
    Gen {
        #[arg(long = "type", value_enum, default_value_t = GenType::NullCorrelation)]
        kind: GenType,
        /// Charge of an instanton monad.
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Certify injectivity of A and surjectivity of B.
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = monadforge::monad::DEFAULT_SAMPLE_POINTS)]
        samples: usize,
    },
    /// Cohomology table of the monad's cohomology bundle.
    Cohom {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true, default_value_t = -3)]
        tmin: i64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 3)]
        tmax: i64,
    },
    /// Extend by O(k), Ω¹(k) or Ω²(k); random data unless --f is given.
    Extend {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
        #[arg(long, value_enum, default_value_t = ExtKind::Line)]
        kind: ExtKind,
        /// JSON array of forms, one per summand of the left term (line extensions only).
        #[arg(long)]
        f: Option<String>,
    },
    /// Build every stage of a tower spec.
    Tower {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Extension class of an O(k) row.
    Class {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
        #[arg(long)]
        f: Option<String>,
    },
    /// Stability of an extension by O(-1).
    Stability {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Splitting types on sampled lines.
    ScanLines {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, value_enum, default_value_t = SamplerKind::SmallHeight)]
        sampler: SamplerKind,
        #[arg(long, default_value_t = 2)]
        bound: i64,
    },
    /// Triviality on real lines (rational or Gaussian input).
    RealCheck {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 40)]
        samples: usize,
    },
    /// BPST curvature: anti-self-duality and gauge covariance.
    ConnDemo {
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, default_value_t = monadforge::lab::DEFAULT_STEP)]
        h: f64,
        /// Step for derivatives of the gauge transformation.
        #[arg(long, default_value_t = 1e-4)]
        gauge_h: f64,
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Dirac residual of the BPST zero mode (or a non-harmonic control).
    DiracCheck {
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, default_value_t = monadforge::lab::DEFAULT_STEP)]
        h: f64,
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Use (1 + x0)·ε instead of the zero mode.
        #[arg(long)]
        negative_control: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(outcome) => {
            let text = serde_json::to_string_pretty(&outcome.json).expect("JSON value");
            let written = match &cli.out {
                Some(path) => std::fs::write(path, text + "\n"),
                // a closed pipe (e.g. `| head`) is not an error
                None => match writeln!(std::io::stdout().lock(), "{text}") {
                    Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                    other => other,
                },
            };
            if let Err(e) = written {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(2);
            }
            if let Some(msg) = &outcome.message {
                eprintln!("{msg}");
            }
            ExitCode::from(if outcome.success { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
