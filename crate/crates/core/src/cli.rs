//! Command-line front end. Each command prints one JSON object on stdout.
//!
//! Exit codes: 0 success, 2 parse/usage, 3 validation, 4 certificate violation,
//! 5 sandwich violation or failed optimization.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use crate::certifier::{certify, CertificateReport};
use crate::closed_form::{er_closed_form, two_qubit_er, ErResult};
use crate::error::Error;
use crate::io::{matrix_to_json, JsonMatrix, StateFile};
use crate::linalg::ComplexMatrix;
use crate::minimizer::{
    lower_bound_check, minimize, MinimizeConfig, RestartOutcome, DESK_SCALE_LIMIT,
};
use crate::state::{
    build_sigma, closest_separable, diagnose_coefficients, random_coefficient_matrix,
    validate_coefficients, CoefficientMatrix, DensityMatrix,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_CERTIFICATE: i32 = 4;
pub const EXIT_SANDWICH: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "er-maxcorr",
    version,
    about = "Relative entropy of entanglement for maximally-correlated bipartite states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Display {
    /// Report entropies in bits instead of nats
    #[arg(long)]
    bits: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form Er of a coefficient file
    Compute {
        file: PathBuf,
        #[command(flatten)]
        display: Display,
        /// Include the closest separable state in the report
        #[arg(long)]
        dump_rho_star: bool,
    },
    /// Two-qubit state x|00><00| + (1-x)|11><11| + alpha|00><11| + h.c.
    Example {
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        alpha_re: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        alpha_im: f64,
        #[command(flatten)]
        display: Display,
    },
    /// Sample product states and check the first-order optimality condition
    Certify {
        file: PathBuf,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Numerically minimize the relative entropy over separable ensembles
    Minimize {
        file: PathBuf,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        restarts: u64,
        /// Defaults to (dA*dB)^2
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        ensemble_size: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5000)]
        max_iterations: usize,
        /// Allow dA*dB above the desk-scale limit
        #[arg(long)]
        force: bool,
        #[command(flatten)]
        display: Display,
    },
    /// Write a random coefficient file
    Random {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Default, Serialize)]
pub struct MinimizeSummary {
    pub restarts_converged: usize,
    pub best_restart_index: usize,
    pub restarts: Vec<RestartOutcome>,
}

#[derive(Debug, Default, Serialize)]
pub struct ValidationSummary {
    pub valid: bool,
    pub hermitian_deviation: f64,
    pub trace: f64,
    pub min_eigenvalue: f64,
    pub pairwise_ok: bool,
    pub pruned: Vec<usize>,
}

/// Report printed by every command; absent fields are omitted.
#[derive(Debug, Default, Serialize)]
pub struct ErReport {
    pub command: &'static str,
    pub input: BTreeMap<&'static str, serde_json::Value>,
    pub units: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub er_closed_form: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagonal_entropy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_entropy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficient_matrix: Option<JsonMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numerical_min: Option<f64>,
    /// `numerical_min − er_closed_form`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimize: Option<MinimizeSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_star: Option<JsonMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation: Option<ValidationSummary>,
    pub timing_ms: BTreeMap<&'static str, f64>,
}

impl ErReport {
    fn new(command: &'static str, bits: bool) -> Self {
        Self {
            command,
            units: if bits { "bits" } else { "nats" },
            ..Default::default()
        }
    }

    fn scale(&self) -> f64 {
        if self.units == "bits" {
            std::f64::consts::LN_2
        } else {
            1.0
        }
    }

    fn set_closed_form(&mut self, r: &ErResult) {
        let s = self.scale();
        self.er_closed_form = Some(r.er / s);
        self.diagonal_entropy = Some(r.diagonal_entropy / s);
        self.sigma_entropy = Some(r.sigma_entropy / s);
        self.lambda = r.lambda;
    }

    fn time<T>(&mut self, phase: &'static str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timing_ms
            .insert(phase, start.elapsed().as_secs_f64() * 1e3);
        out
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

fn load(path: &PathBuf) -> Result<StateFile, Failure> {
    StateFile::read(path).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn validation(e: Error) -> Failure {
    Failure::new(EXIT_VALIDATION, e.to_string())
}

fn coefficients_only(file: &StateFile, command: &str) -> Result<CoefficientMatrix, Failure> {
    match file {
        StateFile::Coefficients { .. } => {
            let raw = file
                .matrix()
                .map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))?;
            validate_coefficients(&raw).map_err(validation)
        }
        StateFile::Density { .. } => Err(Failure::new(
            EXIT_VALIDATION,
            format!("{command}: closed form requires coefficient input"),
        )),
    }
}

fn file_input(path: &Path) -> BTreeMap<&'static str, serde_json::Value> {
    BTreeMap::from([("file", serde_json::Value::from(path.display().to_string()))])
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{rendered}")
            } else {
                write!(stdout, "{rendered}")
            };
            return code;
        }
    };
    let (report, code) = match dispatch(cli.command) {
        Ok(pair) => pair,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            return f.code;
        }
    };
    let _ = writeln!(
        stdout,
        "{}",
        serde_json::to_string(&report).expect("report serializes")
    );
    code
}

fn dispatch(command: Command) -> Result<(ErReport, i32), Failure> {
    match command {
        Command::Compute {
            file,
            display,
            dump_rho_star,
        } => {
            let mut report = ErReport::new("compute", display.bits);
            report.input = file_input(&file);
            let state = load(&file)?;
            let a = coefficients_only(&state, "compute")?;
            let r = report.time("closed_form", || er_closed_form(&a));
            report.set_closed_form(&r);
            if dump_rho_star {
                let n = a.original_n();
                let rho = closest_separable(&a, n, n, None, None).map_err(validation)?;
                report.rho_star = Some(matrix_to_json(rho.matrix()));
            }
            Ok((report, EXIT_OK))
        }
        Command::Example {
            x,
            alpha_re,
            alpha_im,
            display,
        } => {
            let mut report = ErReport::new("example", display.bits);
            report.input = BTreeMap::from([
                ("x", x.into()),
                ("alpha", serde_json::json!([alpha_re, alpha_im])),
            ]);
            let alpha = Complex64::new(alpha_re, alpha_im);
            let r = report
                .time("closed_form", || two_qubit_er(x, alpha))
                .map_err(validation)?;
            report.set_closed_form(&r);
            let c = |re| Complex64::new(re, 0.0);
            let m = ComplexMatrix::from_row_slice(2, 2, &[c(x), alpha, alpha.conj(), c(1.0 - x)]);
            report.coefficient_matrix = Some(matrix_to_json(&m));
            Ok((report, EXIT_OK))
        }
        Command::Certify {
            file,
            samples,
            seed,
            tolerance,
        } => {
            let mut report = ErReport::new("certify", false);
            report.input = file_input(&file);
            let state = load(&file)?;
            let a = coefficients_only(&state, "certify")?;
            report.set_closed_form(&er_closed_form(&a));
            let cert = report
                .time("certify", || certify(&a, samples as usize, seed, tolerance))
                .map_err(validation)?;
            report.certificate = Some(cert);
            let code = if cert.passed() {
                EXIT_OK
            } else {
                EXIT_CERTIFICATE
            };
            Ok((report, code))
        }
        Command::Minimize {
            file,
            restarts,
            ensemble_size,
            seed,
            max_iterations,
            force,
            display,
        } => {
            let mut report = ErReport::new("minimize", display.bits);
            report.input = file_input(&file);
            let state = load(&file)?;
            let cfg = MinimizeConfig {
                ensemble_size: ensemble_size.map(|k| k as usize),
                restarts: restarts as usize,
                max_iterations,
                seed,
                force,
                ..Default::default()
            };
            let (sigma, claim): (DensityMatrix, Option<ErResult>) = match &state {
                StateFile::Coefficients { .. } => {
                    let a = coefficients_only(&state, "minimize")?;
                    let n = a.original_n();
                    if n * n > DESK_SCALE_LIMIT && !force {
                        return Err(validation(Error::DimensionTooLarge {
                            dim: n * n,
                            limit: DESK_SCALE_LIMIT,
                        }));
                    }
                    let sigma = build_sigma(&a, n, n, None, None).map_err(validation)?;
                    (sigma, Some(er_closed_form(&a)))
                }
                StateFile::Density { d_a, d_b, .. } => {
                    let raw = state
                        .matrix()
                        .map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))?;
                    (
                        DensityMatrix::new(raw, *d_a, *d_b).map_err(validation)?,
                        None,
                    )
                }
            };
            let result = report
                .time("minimize", || minimize(&sigma, &cfg))
                .map_err(validation)?;
            let s = report.scale();
            report.numerical_min = Some(result.value / s);
            report.minimize = Some(MinimizeSummary {
                restarts_converged: result.restarts_converged,
                best_restart_index: result.best_restart_index,
                restarts: result.restarts.clone(),
            });
            let code = match claim {
                Some(r) => {
                    report.set_closed_form(&r);
                    report.gap = Some((result.value - r.er) / s);
                    match lower_bound_check(&sigma, &result, r.er) {
                        Ok(_) => EXIT_OK,
                        Err(_) => EXIT_SANDWICH,
                    }
                }
                None if result.converged() => EXIT_OK,
                None => EXIT_SANDWICH,
            };
            Ok((report, code))
        }
        Command::Random { n, seed, out } => {
            let mut report = ErReport::new("random", false);
            report.input = BTreeMap::from([
                ("n", n.into()),
                ("seed", seed.into()),
                ("out", out.display().to_string().into()),
            ]);
            let a = report.time("generate", || random_coefficient_matrix(n as usize, seed));
            let file = StateFile::coefficients(a.matrix());
            file.write(&out)
                .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", out.display())))?;
            let d = diagnose_coefficients(a.matrix()).map_err(validation)?;
            report.validation = Some(ValidationSummary {
                valid: d.is_valid(),
                hermitian_deviation: d.hermitian_deviation,
                trace: d.trace,
                min_eigenvalue: d.min_eigenvalue,
                pairwise_ok: d.pairwise.is_none(),
                pruned: d.pruned,
            });
            Ok((report, EXIT_OK))
        }
    }
}
