mod config;

use clap::{Args, Parser, Subcommand};
use config::{FileConfig, Format, RunConfig, Sweep, DEFAULT_CRITERION_TOL, DEFAULT_DT_OUT, DEFAULT_RTOL};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use tdo_core::ermakov::{integrate_ep, output_grid, EpOptions};
use tdo_core::io::{uncertainty_rows, write_trajectory_csv, write_uncertainty_csv};
use tdo_core::minimum::{check_criterion_on, default_initial_condition, CRITERION_SAMPLES};
use tdo_core::models::tabulated::Table;
use tdo_core::models::{catalog, ModelDescriptor};
use tdo_core::ode::StepControl;
use tdo_core::quantum::Reference;
use tdo_core::series::build_series;
use tdo_core::verify::{self, DEFAULT_SERIES_ORDER};
use tdo_core::TdoError;

/// Failure carrying its exit code and the `kind: message` line for stderr.
#[derive(Debug)]
struct Failure {
    code: u8,
    kind: String,
    message: String,
}

impl Failure {
    fn config(kind: &str, message: impl Into<String>) -> Self {
        Failure { code: 2, kind: kind.to_string(), message: message.into() }
    }

    /// Errors raised while building the model are configuration errors.
    fn setup(e: TdoError) -> Self {
        Failure { code: 2, kind: e.kind().to_string(), message: e.to_string() }
    }

    fn run(e: TdoError) -> Self {
        Failure { code: 3, kind: e.kind().to_string(), message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

#[derive(Parser, Debug)]
#[command(name = "tdo", version, about = "Time-dependent harmonic oscillators via the Ermakov-Pinney equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the built-in models with their default parameters.
    Catalog,
    /// Integrate the auxiliary equation and write `t,sigma,sigma_dot,theta,k,F`.
    Solve(RunArgs),
    /// Write variances, uncertainty product and Bogolubov coefficients.
    Uncertainty(RunArgs),
    /// Run the verification suites and print a JSON report.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = DEFAULT_SERIES_ORDER)]
        order: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the Bessel-type mass series and print its coefficients.
    Series {
        #[arg(long, default_value_t = 1.0)]
        omega0: f64,
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = DEFAULT_SERIES_ORDER)]
        order: usize,
        /// Also print both readings of the a_3 equation.
        #[arg(long)]
        diagnostics: bool,
        /// nu used for the diagnostic a_3; defaults to lambda/2.
        #[arg(long)]
        nu: Option<f64>,
    },
    /// Test whether m(t) omega(t) is constant on the window.
    CheckMin(RunArgs),
}

#[derive(Args, Debug, Clone, Default)]
struct RunArgs {
    #[arg(long)]
    model: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t1: Option<f64>,
    #[arg(long)]
    dt_out: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    hbar: Option<f64>,
    /// Integrator rtol for solve/uncertainty, criterion tolerance for check-min.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// `param=lo:hi:n`, run once per value with outputs suffixed `_i`.
    #[arg(long)]
    sweep: Option<String>,
    /// CSV file with header `t,m,omega`.
    #[arg(long)]
    table: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    sigma0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    sigma_dot0: Option<f64>,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args, Debug, Clone, Default)]
struct ParamArgs {
    #[arg(long, allow_hyphen_values = true)]
    omega0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    m0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    k0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<f64>,
    /// Bessel-type only: sets nu = lambda / (2 Omega0).
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Bessel-type only: sets k0 = mu / (2 Omega0).
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    #[arg(long)]
    order: Option<u32>,
    #[arg(long = "Omega0", allow_hyphen_values = true)]
    big_omega0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t_min: Option<f64>,
}

impl ParamArgs {
    fn overrides(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        let plain = [
            ("omega0", self.omega0),
            ("gamma", self.gamma),
            ("gamma0", self.gamma0),
            ("m0", self.m0),
            ("c", self.c),
            ("k0", self.k0),
            ("nu", self.nu),
            ("order", self.order.map(f64::from)),
            ("Omega0", self.big_omega0),
            ("t_min", self.t_min),
        ];
        for (k, v) in plain {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        }
        m
    }
}

/// Layers flags over the config file; model defaults are filled in later.
fn resolve(args: &RunArgs, tol_key: &str) -> CliResult<RunConfig> {
    let file = FileConfig::resolve(args.config.as_deref()).map_err(|m| Failure::config("ConfigError", m))?;
    let mut params = file.params.clone();
    params.extend(args.params.overrides());
    let model = args
        .model
        .clone()
        .or(file.model.clone())
        .or_else(|| args.table.as_ref().or(file.table.as_ref()).map(|_| "tabulated".to_string()))
        .ok_or_else(|| Failure::config("ConfigError", "no model given (use --model or a config file)"))?;

    // lambda and mu are the series parameters 2 Omega0 nu and 2 Omega0 k0
    if args.params.lambda.is_some() || args.params.mu.is_some() {
        if model != "bessel_type" {
            return Err(Failure::config("ParameterError", "--lambda/--mu apply only to bessel_type"));
        }
        let big = params.get("Omega0").copied().unwrap_or(1.0);
        if big == 0.0 {
            return Err(Failure::config("ParameterError", "Omega0 must be nonzero to use --lambda/--mu"));
        }
        if let Some(l) = args.params.lambda {
            params.insert("nu".into(), l / (2.0 * big));
        }
        if let Some(mu) = args.params.mu {
            params.insert("k0".into(), mu / (2.0 * big));
        }
    }

    let mut tolerances = file.tolerances.clone();
    if let Some(t) = args.tol {
        tolerances.insert(tol_key.to_string(), t);
    }
    let cfg = RunConfig {
        model,
        params,
        table: args.table.clone().or(file.table),
        t0: args.t0.or(file.t0),
        t1: args.t1.or(file.t1),
        dt_out: args.dt_out.or(file.dt_out).unwrap_or(DEFAULT_DT_OUT),
        hbar: args.hbar.or(file.hbar).unwrap_or(1.0),
        tolerances,
        sigma0: args.sigma0.or(file.sigma0),
        sigma_dot0: args.sigma_dot0.or(file.sigma_dot0),
        out: args.out.clone().or(file.out),
        format: args.format.or(file.format).unwrap_or(Format::Csv),
    };
    cfg.validate().map_err(|m| Failure::config("ConfigError", m))?;
    if !(cfg.hbar > 0.0) || !cfg.hbar.is_finite() {
        return Err(Failure::config("UnitsError", format!("hbar must be positive, got {}", cfg.hbar)));
    }
    Ok(cfg)
}

fn build_model(cfg: &RunConfig) -> CliResult<ModelDescriptor> {
    if cfg.model == "tabulated" {
        let path =
            cfg.table.as_ref().ok_or_else(|| Failure::config("ConfigError", "model `tabulated` needs --table"))?;
        if !cfg.params.is_empty() {
            return Err(Failure::config("ParameterError", "model `tabulated` takes no parameters"));
        }
        let table = Table::from_csv_path(path).map_err(Failure::setup)?;
        return Ok(ModelDescriptor::tabulated("tabulated", table));
    }
    ModelDescriptor::from_catalog(&cfg.model, &cfg.params).map_err(Failure::setup)
}

/// Model plus the resolved window; checks `t0 < t1` once defaults are known.
fn prepare(cfg: &RunConfig) -> CliResult<(ModelDescriptor, f64, f64)> {
    let model = build_model(cfg)?;
    let (d0, d1) = model.default_window();
    let t0 = cfg.t0.unwrap_or(d0);
    let t1 = cfg.t1.unwrap_or(d1);
    if !(t0 < t1) {
        return Err(Failure::config("ConfigError", format!("empty time range: t0 = {t0}, t1 = {t1}")));
    }
    Ok((model, t0, t1))
}

fn trajectory(
    cfg: &RunConfig,
    model: &ModelDescriptor,
    t0: f64,
    t1: f64,
) -> CliResult<Vec<tdo_core::ermakov::ErmakovState>> {
    let grid = output_grid(t0, t1, cfg.dt_out).map_err(Failure::setup)?;
    let init = match (cfg.sigma0, cfg.sigma_dot0) {
        (Some(s), Some(sd)) => (s, sd),
        (Some(s), None) => (s, 0.0),
        (None, given) => {
            let (s, sd) = default_initial_condition(model, t0, t1).map_err(Failure::run)?;
            (s, given.unwrap_or(sd))
        }
    };
    let opts =
        EpOptions { control: StepControl::with_rtol(cfg.tolerance("rtol", DEFAULT_RTOL)), ..EpOptions::default() };
    integrate_ep(model, init, &grid, &opts).map_err(Failure::run)
}

fn emit(out: Option<&PathBuf>, bytes: &[u8]) -> CliResult<()> {
    let io = |e: std::io::Error| Failure { code: 3, kind: "IoError".into(), message: e.to_string() };
    match out {
        Some(p) => std::fs::write(p, bytes).map_err(io),
        None => std::io::stdout().lock().write_all(bytes).map_err(io),
    }
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

fn cmd_solve(cfg: &RunConfig) -> CliResult<Vec<u8>> {
    let (model, t0, t1) = prepare(cfg)?;
    let states = trajectory(cfg, &model, t0, t1)?;
    Ok(match cfg.format {
        Format::Json => to_json(&states),
        Format::Csv => {
            let mut buf = Vec::new();
            write_trajectory_csv(&mut buf, &states).map_err(Failure::run)?;
            buf
        }
    })
}

fn cmd_uncertainty(cfg: &RunConfig) -> CliResult<Vec<u8>> {
    let (model, t0, t1) = prepare(cfg)?;
    let states = trajectory(cfg, &model, t0, t1)?;
    let reference = Reference::at(&model, t0).map_err(Failure::run)?;
    let rows = uncertainty_rows(&model, &states, cfg.hbar, reference).map_err(Failure::run)?;
    Ok(match cfg.format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut buf = Vec::new();
            write_uncertainty_csv(&mut buf, &rows).map_err(Failure::run)?;
            buf
        }
    })
}

fn cmd_check_min(cfg: &RunConfig) -> CliResult<Vec<u8>> {
    let (model, t0, t1) = prepare(cfg)?;
    let tol = cfg.tolerance("criterion", DEFAULT_CRITERION_TOL);
    let report = check_criterion_on(&model, t0, t1, CRITERION_SAMPLES, tol).map_err(Failure::run)?;
    Ok(to_json(&report))
}

/// Runs `job` once, or once per sweep value in parallel with indexed outputs.
fn run_jobs(args: &RunArgs, tol_key: &str, job: fn(&RunConfig) -> CliResult<Vec<u8>>) -> CliResult<()> {
    let base = resolve(args, tol_key)?;
    let Some(spec) = args.sweep.as_deref() else {
        let bytes = job(&base)?;
        return emit(base.out.as_ref(), &bytes);
    };
    let sweep = Sweep::parse(spec).map_err(|m| Failure::config("ConfigError", m))?;
    if base.out.is_none() {
        return Err(Failure::config("ConfigError", "--sweep needs --out for the indexed output files"));
    }
    let configs: Vec<RunConfig> = sweep
        .values
        .iter()
        .map(|v| {
            let mut c = base.clone();
            c.params.insert(sweep.param.clone(), *v);
            c
        })
        .collect();
    let results: Vec<CliResult<()>> = configs
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let bytes = job(c)?;
            emit(base.indexed_out(i).as_ref(), &bytes)
        })
        .collect();
    results.into_iter().collect()
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Catalog => {
            let infos: Vec<_> = catalog().iter().map(|m| m.info()).collect();
            emit(None, &to_json(&infos))?;
        }
        Command::Solve(args) => run_jobs(&args, "rtol", cmd_solve)?,
        Command::Uncertainty(args) => run_jobs(&args, "rtol", cmd_uncertainty)?,
        Command::CheckMin(args) => run_jobs(&args, "criterion", cmd_check_min)?,
        Command::Series { omega0, lambda, mu, order, diagnostics, nu } => {
            let series = build_series(omega0, lambda, mu, order).map_err(Failure::setup)?;
            let mut value = serde_json::to_value(&series).expect("serializable");
            if diagnostics {
                let (with_lambda, with_nu) = series.a3_candidates(nu.unwrap_or(lambda / 2.0));
                value["a3_lambda_reading"] = with_lambda.into();
                value["a3_nu_reading"] = with_nu.into();
                value["convergence_radius"] = series.convergence_radius().into();
            }
            emit(None, &to_json(&value))?;
        }
        Command::Verify { suite, order, out } => {
            let report = verify::run(&suite, order).map_err(Failure::setup)?;
            emit(out.as_ref(), &to_json(&report))?;
            if !report.pass {
                let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
                eprintln!("VerificationFailed: {} check(s) failed: {}", failed.len(), failed.join(", "));
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            let line = text
                .lines()
                .map(str::trim)
                .find(|l| !l.is_empty())
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ");
            eprintln!("ParseError: {line}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("{}: {}", f.kind, f.message.replace('\n', " "));
            ExitCode::from(f.code)
        }
    }
}
