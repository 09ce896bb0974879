//! `bsjc` — command-line sweeps over the intensity-dependent
//! (Buck–Sukumar) Jaynes–Cummings model's phase-space quantifiers.
//!
//! Subcommands map one-to-one onto the library's sweep drivers (`surface`,
//! `trace`, `parametric`, `alpha-sweep`, `cr`) plus a self-contained
//! `validate` suite. Tables go to stdout or `--out` as CSV/JSON; file
//! outputs get a `<out>.meta.json` reproducibility sidecar. Exit codes:
//! 0 success, 1 validation-suite failure, 2 configuration error,
//! 3 numerical error.

mod config;
mod output;
mod validate;

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bsjc::experiments::{
    alpha_sweep, cr_traces, parametric_fisher_vs_wehrl, surface_sweep, time_traces,
};
use bsjc::model_core::{ModelConfig, TruncationRule};
use bsjc::phase_space::{DEFAULT_N_R, DEFAULT_N_THETA};
use bsjc::{Aggregate, SweepSpec};

use config::FileConfig;

#[derive(Parser)]
#[command(
    name = "bsjc",
    version,
    about = "Phase-space information dynamics of the intensity-dependent (Buck-Sukumar) \
             Jaynes-Cummings model",
    long_about = "Evolves an initial |coherent> x |excited> state of the Buck-Sukumar model \
                  in closed form, samples the Husimi Q function on a Gauss-Legendre polar \
                  grid, and emits tables of Wehrl entropy, Husimi-based Fisher information, \
                  their phase distributions, and Cramer-Rao products. Dynamics are exactly \
                  2pi-periodic in the scaled time T = lambda*t."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Fisher/Wehrl surface over the (alpha, T) product grid
    /// (columns: alpha,T,I_F,S_W; default alpha in [0.5, 3.5] x 31)
    Surface(CommonArgs),
    /// Per-alpha time traces with the X2 marginal variance
    /// (columns: alpha,T,I_F,S_W,var_x2; default alpha = 1,2,3)
    Trace(CommonArgs),
    /// Trace data ordered for parametric I_F-vs-S_W plotting
    /// (columns: alpha,T,S_W,I_F; default alpha = 1,2,3)
    Parametric(CommonArgs),
    /// Period-averaged quantifiers per alpha
    /// (columns: alpha,I_F_mean,S_W_mean; default alpha in [1, 5] x 21)
    AlphaSweep(CommonArgs),
    /// Cramer-Rao product traces with rigorous marginal companions
    /// (columns: alpha,T,cr_product,marginal_cr_x1,marginal_cr_x2)
    Cr(CommonArgs),
    /// Self-check suite: analytic anchors, propagator cross-check, bounds
    /// (exit 1 if any check fails; default alpha = 1,2,3)
    Validate(CommonArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Comma-separated coherent amplitudes, e.g. --alpha 1,2,3
    #[arg(
        long,
        value_delimiter = ',',
        value_name = "LIST",
        conflicts_with_all = ["alpha_min", "alpha_max", "alpha_steps"]
    )]
    alpha: Option<Vec<f64>>,

    /// Start of a uniform alpha range (use with --alpha-max and --alpha-steps)
    #[arg(long, value_name = "A", requires = "alpha_max")]
    alpha_min: Option<f64>,

    /// End of the alpha range
    #[arg(long, value_name = "A", requires = "alpha_steps")]
    alpha_max: Option<f64>,

    /// Number of alpha samples, endpoints included
    #[arg(long, value_name = "N", requires = "alpha_min")]
    alpha_steps: Option<usize>,

    /// Start of the scaled-time window [default: 0]
    #[arg(long, value_name = "T")]
    t_min: Option<f64>,

    /// End of the scaled-time window [default: 2pi, one exact period]
    #[arg(long, value_name = "T")]
    t_max: Option<f64>,

    /// Number of time samples, endpoints included [default: 257]
    #[arg(long, value_name = "N")]
    t_steps: Option<usize>,

    /// Explicit Fock-space truncation [default: auto from the Poisson tail]
    #[arg(long, value_name = "N")]
    n_max: Option<usize>,

    /// Radial Gauss-Legendre nodes [default: 200]
    #[arg(long, value_name = "N")]
    grid_radial: Option<usize>,

    /// Uniform angular nodes [default: 256]
    #[arg(long, value_name = "N")]
    grid_angular: Option<usize>,

    /// Output format [default: csv]
    #[arg(long, value_enum, value_name = "FMT")]
    format: Option<OutputFormat>,

    /// Output file [default: stdout]; file outputs also get <out>.meta.json
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Config file of `key = value` lines (flags override file values)
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Worker-thread cap [default: machine parallelism]
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Surface,
    Trace,
    Parametric,
    AlphaSweep,
    Cr,
    Validate,
}

#[derive(Debug)]
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    fn numerical(e: bsjc::Error) -> Self {
        CliError { code: e.exit_code() as u8, message: e.to_string() }
    }
}

#[derive(Debug)]
struct Resolved {
    spec: SweepSpec,
    n_r: usize,
    n_theta: usize,
    format: OutputFormat,
    out: Option<PathBuf>,
}

fn linspace(min: f64, max: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if steps < 2 {
        return Err(CliError::config(format!("--alpha-steps must be >= 2, got {steps}")));
    }
    if !(max > min) || !min.is_finite() || !max.is_finite() {
        return Err(CliError::config(format!(
            "need finite --alpha-max > --alpha-min, got [{min}, {max}]"
        )));
    }
    let h = (max - min) / (steps - 1) as f64;
    Ok((0..steps).map(|k| min + h * k as f64).collect())
}

fn resolve(kind: Kind, args: &CommonArgs) -> Result<Resolved, CliError> {
    let file = match &args.config {
        Some(path) => config::parse_config(path).map_err(CliError::config)?,
        None => FileConfig::default(),
    };

    // Model template: file values over defaults, then flags over the file.
    let mut model = ModelConfig::default();
    if let Some(v) = file.alpha_phase {
        model.alpha_phase = v;
    }
    if let Some(v) = file.lambda {
        model.lambda = v;
    }
    if let Some(v) = file.omega_f {
        model.omega_f = v;
    }
    if let Some(v) = file.omega_a {
        model.omega_a = v;
    }
    if let Some(v) = file.tail_tol {
        model.tail_tol = v;
    }
    if let Some(v) = file.n_max {
        model.n_max = v.map_or(TruncationRule::Auto, TruncationRule::Explicit);
    }
    if let Some(n) = args.n_max {
        model.n_max = TruncationRule::Explicit(n);
    }

    let alpha_values = if let Some(list) = &args.alpha {
        list.clone()
    } else if let (Some(min), Some(max), Some(steps)) =
        (args.alpha_min, args.alpha_max, args.alpha_steps)
    {
        linspace(min, max, steps)?
    } else if let Some(a) = file.alpha_mag {
        vec![a]
    } else {
        match kind {
            Kind::Surface => linspace(0.5, 3.5, 31)?,
            Kind::AlphaSweep => linspace(1.0, 5.0, 21)?,
            _ => vec![1.0, 2.0, 3.0],
        }
    };

    let spec = SweepSpec {
        alpha_values,
        t_min: args.t_min.or(file.t_min).unwrap_or(0.0),
        t_max: args.t_max.or(file.t_max).unwrap_or(2.0 * PI),
        t_steps: args.t_steps.or(file.t_steps).unwrap_or(257),
        grid_override: Some((
            args.grid_radial.or(file.n_r).unwrap_or(DEFAULT_N_R),
            args.grid_angular.or(file.n_theta).unwrap_or(DEFAULT_N_THETA),
        )),
        aggregate: if kind == Kind::AlphaSweep { Aggregate::PeriodMean } else { Aggregate::None },
        model,
    };
    // Fail fast on invariant violations (negative alpha, t_steps < 2, ...)
    // before any computation; these are configuration errors (exit 2).
    spec.validate().map_err(CliError::numerical)?;

    let (n_r, n_theta) = spec.grid_override.expect("set above");
    Ok(Resolved {
        spec,
        n_r,
        n_theta,
        format: args.format.or(file.format).unwrap_or(OutputFormat::Csv),
        out: args.out.clone(),
    })
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let started = Instant::now();
    let command_line = std::env::args().collect::<Vec<_>>().join(" ");
    let (kind, args) = match &cli.cmd {
        Cmd::Surface(a) => (Kind::Surface, a),
        Cmd::Trace(a) => (Kind::Trace, a),
        Cmd::Parametric(a) => (Kind::Parametric, a),
        Cmd::AlphaSweep(a) => (Kind::AlphaSweep, a),
        Cmd::Cr(a) => (Kind::Cr, a),
        Cmd::Validate(a) => (Kind::Validate, a),
    };

    if let Some(n) = args.threads {
        if n == 0 {
            return Err(CliError::config("--threads must be >= 1"));
        }
        // Ignore the error if a global pool already exists (e.g. re-entry).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }

    let r = resolve(kind, args)?;

    if kind == Kind::Validate {
        let checker = validate::run(&r.spec.alpha_values, &r.spec.model, r.n_r, r.n_theta)
            .map_err(CliError::numerical)?;
        println!(
            "validate: {} checks, {} failed [{:.2?}]",
            checker.total,
            checker.failures,
            started.elapsed()
        );
        if checker.failures > 0 {
            return Err(CliError {
                code: 1,
                message: format!(
                    "validation suite failed: {} of {} checks",
                    checker.failures, checker.total
                ),
            });
        }
        return Ok(());
    }

    let table = match kind {
        Kind::Surface => surface_sweep(&r.spec),
        Kind::Trace => time_traces(&r.spec),
        Kind::Parametric => parametric_fisher_vs_wehrl(&r.spec),
        Kind::AlphaSweep => alpha_sweep(&r.spec),
        Kind::Cr => cr_traces(&r.spec),
        Kind::Validate => unreachable!("handled above"),
    }
    .map_err(CliError::numerical)?;

    let rendered = match r.format {
        OutputFormat::Csv => output::render_csv(&table),
        OutputFormat::Json => output::render_json(&table),
    };

    match &r.out {
        None => print!("{rendered}"),
        Some(path) => {
            std::fs::write(path, &rendered).map_err(|e| {
                CliError::config(format!("cannot write output file {}: {e}", path.display()))
            })?;
            output::write_sidecar(path, &table, &command_line, started.elapsed().as_secs_f64())
                .map_err(|e| {
                    CliError::config(format!(
                        "cannot write sidecar {}: {e}",
                        output::sidecar_path(path).display()
                    ))
                })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
