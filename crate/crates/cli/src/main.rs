//! `hmseries`: separatrix constants, trans-series coefficients, large-order
//! fits and figure datasets for `y'' = 2 y^N + x y`.

mod figure;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use hmseries::asymptotics::{borel_consistency, fit_one_factorial, fit_two_factorial, FitError, LargeOrderFit};
use hmseries::coeffs::{airy_asym_coeffs, airy_power_coeffs, c_coeffs, d1_coeffs, pole_laurent_n3};
use hmseries::export::{pole_to_json, table_to_json, write_pole_csv, write_table_csv};
use hmseries::shooting::{table_scan, ShootConfig};
use hmseries::{PrecContext, PrecFloat};

/// A problem with the command line itself; exits with status 1.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Usage(msg.into()).into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "hmseries", version, about = "Connection problem for y'' = 2 y^N + x y")]
struct Cli {
    /// working precision in decimal digits (at least 15)
    #[arg(long, env = "HM_DIGITS", default_value_t = 32, global = true)]
    digits: u32,
    /// relative tolerance for integration and quadrature
    #[arg(long, default_value_t = 1e-14, global = true)]
    rel_tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// output file (directory for `figure`); stdout when omitted
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// significant digits of printed floating-point values
    #[arg(long, default_value_t = 10, global = true)]
    sig_digits: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Separatrix constants k_N with their brackets and upper bounds
    Kn {
        #[arg(long, num_args = 1.., required = true, allow_negative_numbers = true)]
        n: Vec<i64>,
        /// bisection bracket width
        #[arg(long, default_value_t = 1e-7)]
        k_tol: f64,
    },
    /// Exact expansion coefficients
    Coeffs {
        #[arg(long, value_enum)]
        sector: SectorArg,
        #[arg(long, allow_negative_numbers = true)]
        n: Option<i64>,
        /// number of coefficients (highest Laurent power for pole3)
        #[arg(long)]
        count: usize,
    },
    /// Large-order growth fit of a coefficient table
    Fit {
        #[arg(long, value_enum)]
        sector: FitSector,
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        #[arg(long)]
        count: usize,
        /// Richardson order
        #[arg(long, default_value_t = hmseries::asymptotics::DEFAULT_ORDER)]
        order: usize,
    },
    /// Plot-ready CSV curves for one figure
    Figure {
        #[arg(value_enum)]
        id: figure::FigureId,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SectorArg {
    D1,
    C,
    B,
    Airy,
    Pole3,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FitSector {
    D1,
    C,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub digits: u32,
    pub rel_tol: f64,
    pub out_format: Format,
    pub out_path: Option<PathBuf>,
    pub sig_digits: usize,
}

impl RunConfig {
    fn ctx(&self) -> PrecContext {
        PrecContext::new(self.digits).expect("validated")
    }

    fn sink(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out_path {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
            )),
            None => Box::new(io::stdout().lock()),
        })
    }

    fn sci(&self, v: &PrecFloat) -> String {
        v.to_sci(self.sig_digits)
    }

    fn write_json(&self, body: serde_json::Value) -> Result<()> {
        let mut out = self.sink()?;
        let mut doc = json!({ "config": self });
        doc.as_object_mut()
            .expect("object")
            .extend(body.as_object().cloned().unwrap_or_default());
        serde_json::to_writer_pretty(&mut out, &doc)?;
        writeln!(out)?;
        out.flush()?;
        Ok(())
    }
}

fn check_power(n: i64) -> Result<u32> {
    if n < 2 || n > u32::MAX as i64 {
        return usage("N must be ≥ 2");
    }
    Ok(n as u32)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    if PrecContext::new(cli.digits).is_err() {
        return usage(format!("--digits must be at least 15, got {}", cli.digits));
    }
    if !(cli.rel_tol > 0.0 && cli.rel_tol <= 1e-6) {
        return usage(format!("--rel-tol must lie in (0, 1e-6], got {}", cli.rel_tol));
    }
    if !(1..=60).contains(&cli.sig_digits) {
        return usage(format!("--sig-digits must lie in 1..=60, got {}", cli.sig_digits));
    }
    let cfg = RunConfig {
        digits: cli.digits,
        rel_tol: cli.rel_tol,
        out_format: cli.format,
        out_path: cli.out,
        sig_digits: cli.sig_digits,
    };
    match cli.command {
        Command::Kn { n, k_tol } => cmd_kn(&cfg, &n, k_tol),
        Command::Coeffs { sector, n, count } => cmd_coeffs(&cfg, sector, n, count),
        Command::Fit { sector, n, count, order } => cmd_fit(&cfg, sector, n, count, order),
        Command::Figure { id } => figure::run(&cfg, id),
    }
}

fn shoot_config(cfg: &RunConfig, k_tol: f64) -> Result<ShootConfig> {
    let mut sc = ShootConfig::new(2, cfg.ctx());
    sc.k_tol = k_tol;
    sc.rel_tol = cfg.rel_tol;
    if let Err(e) = sc.validate() {
        return usage(e.to_string());
    }
    Ok(sc)
}

fn cmd_kn(cfg: &RunConfig, ns: &[i64], k_tol: f64) -> Result<ExitCode> {
    let ns = ns.iter().map(|n| check_power(*n)).collect::<Result<Vec<_>>>()?;
    let sc = shoot_config(cfg, k_tol)?;
    let rows = table_scan(&ns, &sc);
    let mut failed = false;
    for r in &rows {
        if let Err(e) = &r.result {
            eprintln!("N = {}: {e}", r.n_power);
            failed = true;
        }
    }
    match cfg.out_format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(cfg.sink()?);
            w.write_record(["n", "k_n", "bracket_low", "bracket_high", "bound"])?;
            for r in &rows {
                let (k, lo, hi) = match &r.result {
                    Ok(s) => (cfg.sci(&s.k_n), cfg.sci(&s.bracket_low), cfg.sci(&s.bracket_high)),
                    Err(_) => Default::default(),
                };
                w.write_record([r.n_power.to_string(), k, lo, hi, cfg.sci(&r.bound)])?;
            }
            w.flush()?;
        }
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|r| match &r.result {
                    Ok(s) => json!({
                        "n": r.n_power,
                        "k_n": cfg.sci(&s.k_n),
                        "bracket_low": cfg.sci(&s.bracket_low),
                        "bracket_high": cfg.sci(&s.bracket_high),
                        "bound": cfg.sci(&r.bound),
                        "iterations": s.iterations,
                        "x_minus": s.x_minus,
                    }),
                    Err(e) => json!({ "n": r.n_power, "bound": cfg.sci(&r.bound), "error": e }),
                })
                .collect();
            cfg.write_json(json!({ "k_tol": k_tol, "rows": rows }))?;
        }
    }
    Ok(if failed { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn cmd_coeffs(cfg: &RunConfig, sector: SectorArg, n: Option<i64>, count: usize) -> Result<ExitCode> {
    if count == 0 {
        return usage("--count must be at least 1");
    }
    let power = || match n {
        Some(n) => check_power(n),
        None => usage("--n is required for this sector"),
    };
    let table = match sector {
        SectorArg::Pole3 => {
            if count < 4 {
                return usage("pole3 needs --count of at least 4");
            }
            let series = pole_laurent_n3(count as i64)?;
            match cfg.out_format {
                Format::Csv => write_pole_csv(&series, cfg.sink()?)?,
                Format::Json => cfg.write_json(json!({ "pole": pole_to_json(&series) }))?,
            }
            return Ok(ExitCode::SUCCESS);
        }
        SectorArg::Airy => airy_asym_coeffs(count - 1),
        SectorArg::B => airy_power_coeffs(power()?, count - 1)?,
        SectorArg::D1 => d1_coeffs(power()?, count - 1)?,
        SectorArg::C => c_coeffs(power()?, count - 1)?,
    };
    match cfg.out_format {
        Format::Csv => write_table_csv(&table, cfg.sink()?)?,
        Format::Json => cfg.write_json(json!({ "table": table_to_json(&table) }))?,
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct FitRow<'a> {
    model: &'a str,
    n_power: u32,
    rate_a: f64,
    constant_s: f64,
    offset: f64,
    subleading_beta: f64,
    rate_raw: f64,
    offset_raw: f64,
    richardson_order: usize,
    residual: f64,
    terms: usize,
}

fn cmd_fit(cfg: &RunConfig, sector: FitSector, n: i64, count: usize, order: usize) -> Result<ExitCode> {
    let n = check_power(n)?;
    let ctx = cfg.ctx();
    let outcome = match sector {
        FitSector::D1 => {
            if count < 80 {
                return usage("the d1 fit needs --count of at least 80");
            }
            fit_one_factorial(&d1_coeffs(n, count - 1)?, order, &ctx)
        }
        FitSector::C => {
            if count < 40 {
                return usage("the c fit needs --count of at least 40");
            }
            fit_two_factorial(&c_coeffs(n, count - 1)?, order, &ctx)
        }
    };
    let (fit, ok) = match outcome {
        Ok(f) => (f, true),
        Err(FitError::ResidualTooLarge(f)) => (*f, false),
        Err(e) => return Err(e.into()),
    };
    emit_fit(cfg, matches!(sector, FitSector::C), &fit)?;
    if !ok {
        eprintln!("fit residual {:e} exceeds the limit", fit.residual);
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn emit_fit(cfg: &RunConfig, negative: bool, fit: &LargeOrderFit) -> Result<()> {
    match cfg.out_format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(cfg.sink()?);
            let model = format!("{:?}", fit.model);
            w.serialize(FitRow {
                model: &model,
                n_power: fit.n_power,
                rate_a: fit.rate_a,
                constant_s: fit.constant_s,
                offset: fit.offset,
                subleading_beta: fit.subleading_beta,
                rate_raw: fit.rate_raw,
                offset_raw: fit.offset_raw,
                richardson_order: fit.richardson_order,
                residual: fit.residual,
                terms: fit.terms,
            })?;
            w.flush()?;
        }
        Format::Json => {
            let borel = negative.then(|| borel_consistency(fit.n_power, fit));
            cfg.write_json(json!({ "fit": fit, "borel_consistency": borel }))?;
        }
    }
    Ok(())
}
