//! Datasets for the separatrix, constant-vs-N and matching plots, one CSV file per curve.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde_json::json;

use hmseries::export::{format_sig, write_xy_csv};
use hmseries::inteq::{n2_match, uniform_grid, QuadratureSpec};
use hmseries::ode::{integrate_at, OdeProblem, DEFAULT_CAP};
use hmseries::shooting::{asymptote, k_infinity, table_scan};
use hmseries::specfun::airy_eval;
use hmseries::PrecContext;

use crate::{shoot_config, Format, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    K2,
    K3,
    K4,
    K10,
    KnVsN,
    N2Match,
}

impl FigureId {
    fn name(self) -> &'static str {
        match self {
            FigureId::K2 => "k2",
            FigureId::K3 => "k3",
            FigureId::K4 => "k4",
            FigureId::K10 => "k10",
            FigureId::KnVsN => "kn-vs-n",
            FigureId::N2Match => "n2-match",
        }
    }
}

/// N values of the published table.
const TABLE_N: [u32; 34] = [
    2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25, 26, 27, 28, 29, 30,
    50, 100, 500, 1000, 10000,
];

const X_LEFT: f64 = -10.0;
const X_RIGHT: f64 = 10.0;

pub fn run(cfg: &RunConfig, id: FigureId) -> Result<ExitCode> {
    let dir = cfg.out_path.clone().unwrap_or_else(|| PathBuf::from(id.name()));
    fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let ctx = cfg.ctx();
    let (files, code) = match id {
        FigureId::K2 => (separatrix_curves(cfg, &ctx, &dir, 2, "0.671232", "0.671231")?, ExitCode::SUCCESS),
        FigureId::K3 => (separatrix_curves(cfg, &ctx, &dir, 3, "1.00000001", "0.9999999")?, ExitCode::SUCCESS),
        FigureId::K4 => (separatrix_curves(cfg, &ctx, &dir, 4, "1.191125", "1.191124")?, ExitCode::SUCCESS),
        FigureId::K10 => (separatrix_curves(cfg, &ctx, &dir, 10, "1.577095", "1.577094")?, ExitCode::SUCCESS),
        FigureId::KnVsN => kn_vs_n(cfg, &ctx, &dir)?,
        FigureId::N2Match => (n2_curves(cfg, &ctx, &dir)?, ExitCode::SUCCESS),
    };
    match cfg.out_format {
        Format::Csv => {
            for f in &files {
                println!("{}", f.display());
            }
        }
        Format::Json => {
            let doc = json!({
                "config": cfg,
                "figure": id.name(),
                "files": files.iter().map(|f| f.display().to_string()).collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
    }
    Ok(code)
}

fn write_curve(cfg: &RunConfig, dir: &Path, name: &str, xs: &[f64], ys: &[f64]) -> Result<PathBuf> {
    let path = dir.join(format!("{name}.csv"));
    let file = fs::File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
    write_xy_csv(["x", "y"], xs, ys, cfg.sig_digits, file)?;
    Ok(path)
}

/// Trajectory launched at `x = 10` with `k Ai`, on a 0.05 grid down to
/// `x = -10` or until it blows up; rows ascend in `x`.
fn launch(cfg: &RunConfig, ctx: &PrecContext, n: u32, k: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let k = ctx.parse(k).context("bad k literal")?;
    let x0 = ctx.float(X_RIGHT);
    let a = airy_eval(&x0, ctx)?;
    let problem = OdeProblem::new(n, x0, a.ai * &k, a.ai_prime * &k, ctx.float(X_LEFT), ctx.clone())?
        .with_tolerances(cfg.rel_tol, 1e-30)?;
    let points: Vec<_> = uniform_grid(X_LEFT, X_RIGHT, 401, ctx).into_iter().rev().collect();
    let traj = integrate_at(&problem, DEFAULT_CAP, &points)?;
    let xs = traj.samples.iter().rev().map(|s| s.x.to_f64()).collect();
    let ys = traj.samples.iter().rev().map(|s| s.y.to_f64()).collect();
    Ok((xs, ys))
}

fn separatrix_curves(
    cfg: &RunConfig,
    ctx: &PrecContext,
    dir: &Path,
    n: u32,
    k_above: &str,
    k_below: &str,
) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for (label, k) in [("above", k_above), ("below", k_below)] {
        let (xs, ys) = launch(cfg, ctx, n, k)?;
        files.push(write_curve(cfg, dir, &format!("k{n}_{label}_{k}"), &xs, &ys)?);
    }
    let xs: Vec<f64> = (0..=200).map(|i| X_LEFT + 0.05 * i as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|x| asymptote(n, *x)).collect();
    files.push(write_curve(cfg, dir, &format!("k{n}_asymptote"), &xs, &ys)?);
    Ok(files)
}

fn kn_vs_n(cfg: &RunConfig, ctx: &PrecContext, dir: &Path) -> Result<(Vec<PathBuf>, ExitCode)> {
    let sc = shoot_config(cfg, 1e-7)?;
    let rows = table_scan(&TABLE_N, &sc);
    let k_inf = k_infinity(ctx).to_f64();
    let path = dir.join("kn_vs_n.csv");
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record(["n", "k_n", "bound", "k_infinity"])?;
    let mut code = ExitCode::SUCCESS;
    for r in &rows {
        let k = match &r.result {
            Ok(s) => format_sig(s.k_n.to_f64(), cfg.sig_digits),
            Err(e) => {
                eprintln!("N = {}: {e}", r.n_power);
                code = ExitCode::from(2);
                String::new()
            }
        };
        w.write_record([
            r.n_power.to_string(),
            k,
            format_sig(r.bound.to_f64(), cfg.sig_digits),
            format_sig(k_inf, cfg.sig_digits),
        ])?;
    }
    w.flush()?;
    Ok((vec![path], code))
}

fn n2_curves(cfg: &RunConfig, ctx: &PrecContext, dir: &Path) -> Result<Vec<PathBuf>> {
    let spec = QuadratureSpec::new(ctx.clone()).with_rel_tol(cfg.rel_tol.max(1e-12))?;
    let xs = uniform_grid(-6.0, 0.0, 121, ctx);
    let k2 = ctx.parse("0.671231").context("bad k literal")?;
    let mut files = Vec::new();
    let mut wrote_exact = false;
    for (levels, name) in [(0, "perturbative"), (1, "level1"), (2, "level2")] {
        let m = n2_match(&k2, &xs, levels, &spec)?;
        if !wrote_exact {
            files.push(write_curve(cfg, dir, "exact", &m.reference.xs_f64(), &m.reference.ys_f64())?);
            wrote_exact = true;
        }
        files.push(write_curve(cfg, dir, name, &m.transseries.xs_f64(), &m.transseries.ys_f64())?);
    }
    Ok(files)
}
