//! Command-line front end. Every command computes its full output before
//! writing anything, so a failure never leaves a partial file behind.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::bethe::solve_for_a;
use crate::elliptic::{modulus_from_a, DEFAULT_SERIES_EPSILON};
use crate::error::Error;
use crate::exact::sigma_exact;
use crate::lax::{
    build_asymptotic_lax, eigenvalues_hermitian, empirical_density, lax_spectrum, Boundary,
    LaxMatrixSpec, Spectrum,
};
use crate::verify::{run_verification, Tolerances, VerifyConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryArg {
    Open,
    Periodic,
    /// `k_j = 0` asymptotic sign matrix; eigenvalues are printed unscaled.
    Asymptotic,
}

#[derive(Debug, Parser)]
#[command(
    name = "lax-density",
    version,
    about = "Eigenvalue density of the hyperbolic Calogero-Sutherland Lax matrix: Bethe ansatz vs theta functions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Lattice constant a of the equilibrium positions x_j = ja.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub a: f64,
    /// Chebyshev nodes for the densities.
    #[arg(long, global = true, default_value_t = 400)]
    pub nodes: usize,
    /// Matrix size N.
    #[arg(long = "matrix-n", global = true, default_value_t = 1000)]
    pub matrix_n: usize,
    #[arg(long, global = true, value_enum, default_value_t = BoundaryArg::Open)]
    pub boundary: BoundaryArg,
    /// Half-width of the omega grid for exact-density.
    #[arg(long = "omega-max", global = true, default_value_t = 5.0)]
    pub omega_max: f64,
    /// Number of omega samples for exact-density.
    #[arg(long, global = true, default_value_t = 201)]
    pub samples: usize,
    /// Histogram bins for `lax --histogram`.
    #[arg(long, global = true, default_value_t = 101)]
    pub bins: usize,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Override a verification threshold, e.g. `sup_sigma_diff=1e-6`.
    #[arg(long = "tolerance", global = true, value_name = "KEY=VALUE")]
    pub tolerances: Vec<String>,
    /// Relative truncation threshold of the theta series.
    #[arg(long = "series-epsilon", global = true, default_value_t = DEFAULT_SERIES_EPSILON)]
    pub series_epsilon: f64,
    /// Coupling λ.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Subcommand)]
pub enum Command {
    /// Exact density sigma(omega) on a uniform grid.
    ExactDensity,
    /// Solve the integral equation; prints rho on the Chebyshev nodes.
    Bethe,
    /// Lax-matrix eigenvalues divided by 2λ.
    Lax {
        /// Print a normalised histogram instead of the eigenvalues.
        #[arg(long)]
        histogram: bool,
    },
    /// Full comparison; prints a JSON report and exits 0 iff it passes.
    Verify {
        /// Relative shift of a applied to the Bethe side only.
        #[arg(long = "perturb-a", default_value_t = 0.0)]
        perturb_a: f64,
        /// Feed the cut equation a density squeezed onto half the cut.
        #[arg(long = "halve-rho0-support")]
        halve_rho0_support: bool,
    },
}

/// Text produced by a command together with its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

/// Why a command could not produce its output.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or configuration (exit 2).
    Usage(String),
    /// Numerical failure (exit 1).
    Compute(Error),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Compute(_) => EXIT_FAIL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Compute(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl Cli {
    fn validate(&self) -> Result<Tolerances, CliError> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(usage(format!("--a must be positive, got {}", self.a)));
        }
        if self.nodes < crate::bethe::MIN_NODES {
            return Err(usage(format!("--nodes must be at least {}", crate::bethe::MIN_NODES)));
        }
        if self.matrix_n < 2 {
            return Err(usage("--matrix-n must be at least 2"));
        }
        if !(self.omega_max > 0.0 && self.omega_max.is_finite()) {
            return Err(usage("--omega-max must be positive"));
        }
        if self.samples == 0 {
            return Err(usage("--samples must be positive"));
        }
        if self.bins < 2 {
            return Err(usage("--bins must be at least 2"));
        }
        if !(self.series_epsilon > 0.0 && self.series_epsilon < 1.0) {
            return Err(usage("--series-epsilon must lie in (0, 1)"));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(usage("--lambda must be positive"));
        }
        let mut tolerances = Tolerances::default();
        for t in &self.tolerances {
            tolerances.apply(t).map_err(|e| usage(e.to_string()))?;
        }
        Ok(tolerances)
    }

    fn lax_spec(&self, boundary: Boundary) -> Result<LaxMatrixSpec, CliError> {
        LaxMatrixSpec::new(self.matrix_n, self.a, self.lambda, boundary).map_err(|e| usage(e.to_string()))
    }
}

fn number(x: f64) -> String {
    format!("{x:.16e}")
}

/// Runs the parsed command and returns its output text.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let tolerances = cli.validate()?;
    match cli.command {
        Command::ExactDensity => exact_density(cli),
        Command::Bethe => bethe(cli),
        Command::Lax { histogram } => lax(cli, histogram),
        Command::Verify {
            perturb_a,
            halve_rho0_support,
        } => {
            if !(perturb_a > -1.0 && perturb_a.is_finite()) {
                return Err(usage("--perturb-a must exceed -1"));
            }
            let config = VerifyConfig {
                nodes: cli.nodes,
                matrix_n: cli.matrix_n,
                lambda: cli.lambda,
                series_epsilon: cli.series_epsilon,
                tolerances,
                perturb_a,
                halve_rho0_support,
            };
            let report = run_verification(cli.a, &config)?;
            let mut text = report.to_json();
            text.push('\n');
            Ok(Outcome {
                text,
                code: if report.pass { EXIT_PASS } else { EXIT_FAIL },
            })
        }
    }
}

fn exact_density(cli: &Cli) -> Result<Outcome, CliError> {
    let params = modulus_from_a(cli.a)?
        .with_series_epsilon(cli.series_epsilon)
        .map_err(|e| usage(e.to_string()))?;
    let mut text = String::from("omega,sigma\n");
    let n = cli.samples;
    for i in 0..n {
        let omega = if n == 1 {
            0.0
        } else {
            -cli.omega_max + 2.0 * cli.omega_max * i as f64 / (n - 1) as f64
        };
        let sigma = sigma_exact(omega, &params)?;
        writeln!(text, "{},{}", number(omega), number(sigma)).unwrap();
    }
    Ok(Outcome {
        text,
        code: EXIT_PASS,
    })
}

fn bethe(cli: &Cli) -> Result<Outcome, CliError> {
    let solution = solve_for_a(cli.a, cli.nodes)?;
    let mut text = String::from("x,rho\n");
    for (x, rho) in solution.rho.nodes().iter().zip(solution.rho.values()) {
        writeln!(text, "{},{}", number(*x), number(*rho)).unwrap();
    }
    writeln!(text, "# A={}", number(solution.big_a)).unwrap();
    writeln!(text, "# a={}", number(solution.a)).unwrap();
    writeln!(text, "# nodes={}", solution.nodes_n).unwrap();
    Ok(Outcome {
        text,
        code: EXIT_PASS,
    })
}

fn lax(cli: &Cli, histogram: bool) -> Result<Outcome, CliError> {
    let (spectrum, scale): (Spectrum, f64) = match cli.boundary {
        BoundaryArg::Open => (lax_spectrum(&cli.lax_spec(Boundary::Open)?)?, 2.0 * cli.lambda),
        BoundaryArg::Periodic => (lax_spectrum(&cli.lax_spec(Boundary::Periodic)?)?, 2.0 * cli.lambda),
        BoundaryArg::Asymptotic => {
            let matrix = build_asymptotic_lax(&vec![0.0; cli.matrix_n], cli.lambda)?;
            (eigenvalues_hermitian(&matrix)?, 1.0)
        }
    };
    let mut text = String::new();
    if histogram {
        let density = empirical_density(&spectrum, 0.5 * scale, cli.bins, None)?;
        text.push_str("center,density\n");
        for (c, h) in density.centers().iter().zip(&density.heights) {
            writeln!(text, "{},{}", number(*c), number(*h)).unwrap();
        }
    } else {
        text.push_str("index,eigenvalue\n");
        for (i, mu) in spectrum.eigenvalues.iter().enumerate() {
            writeln!(text, "{i},{}", number(mu / scale)).unwrap();
        }
    }
    Ok(Outcome {
        text,
        code: EXIT_PASS,
    })
}

/// Parses arguments, runs, writes output and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match execute(&cli) {
        Ok(outcome) => outcome,
        Err(e) => {
            eprintln!("lax-density: {e}");
            return e.code();
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &outcome.text),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(outcome.text.as_bytes()).and_then(|_| stdout.flush())
        }
    };
    if let Err(e) = written {
        eprintln!("lax-density: cannot write output: {e}");
        return EXIT_USAGE;
    }
    outcome.code
}
