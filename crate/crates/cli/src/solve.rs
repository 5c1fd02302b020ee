use std::time::Instant;

use clap::Args;
use oscint::free_particle::{closed_form_psi, FreeParticle};
use oscint::quadrature::QuadratureConfig;
use oscint::schrodinger::{default_split_radius, pde_report, GreensDecomposition, InitialCondition, PdeReport};
use oscint::JetExpr;
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::json;

use crate::config::Format;
use crate::output::{csv_bytes, emit, json_bytes, num, seconds, SCHEMA};
use crate::{Context, Failure};

/// Registered Green's function decompositions.
pub const INSTANCES: [&str; 1] = ["free_particle"];

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Green's function decomposition (default `free_particle`).
    #[arg(long)]
    instance: Option<String>,
    /// Initial condition descriptor, e.g. `exp_i:1` or `mono:2`.
    #[arg(long = "f")]
    f: Option<String>,
    /// Times, comma separated; all must be positive.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    t: Option<Vec<f64>>,
    /// Positions, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Option<Vec<f64>>,
    /// Split radius, must exceed |x| (default |x| + 2).
    #[arg(long)]
    b: Option<f64>,
    /// Growth order of the initial condition (default: derived from the descriptor).
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveBlock {
    instance: Option<String>,
    f: Option<String>,
    t: Option<Vec<f64>>,
    x: Option<Vec<f64>>,
    b: Option<f64>,
    beta: Option<f64>,
    format: Option<Format>,
}

struct Plan {
    kernel: Box<dyn GreensDecomposition>,
    ic: InitialCondition,
    points: Vec<(f64, f64, f64)>,
    format: Format,
    cfg: QuadratureConfig,
}

fn plan(args: &SolveArgs, ctx: &Context) -> Result<Plan, Failure> {
    let blk = &ctx.file.solve_free;
    let instance = args.instance.clone().or_else(|| blk.instance.clone()).unwrap_or_else(|| "free_particle".into());
    if !INSTANCES.contains(&instance.as_str()) {
        return Err(Failure::Usage(format!("unknown instance '{instance}' (known: {})", INSTANCES.join(", "))));
    }
    let desc = args.f.clone().or_else(|| blk.f.clone()).ok_or_else(|| Failure::Usage("missing --f".into()))?;
    let expr: JetExpr = desc.parse()?;
    let ts = args.t.clone().or_else(|| blk.t.clone()).ok_or_else(|| Failure::Usage("missing --t".into()))?;
    let xs = args.x.clone().or_else(|| blk.x.clone()).ok_or_else(|| Failure::Usage("missing --x".into()))?;
    if ts.is_empty() || xs.is_empty() {
        return Err(Failure::Usage("the (t, x) grid must be non-empty".into()));
    }
    if let Some(t) = ts.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(Failure::Usage(format!("t must be positive, got {t}")));
    }
    if let Some(x) = xs.iter().find(|x| !x.is_finite()) {
        return Err(Failure::Usage(format!("x must be finite, got {x}")));
    }
    let beta = match args.beta.or(blk.beta) {
        Some(b) => b,
        None => expr.growth(),
    };
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Failure::Usage(format!("initial condition '{desc}' is not polynomially bounded")));
    }
    let kernel = FreeParticle::for_growth(beta)?;
    let ic = InitialCondition::new(expr, beta, &kernel)?;
    let b = args.b.or(blk.b);
    let mut points = Vec::new();
    for &t in &ts {
        for &x in &xs {
            let bx = b.unwrap_or_else(|| default_split_radius(x));
            if !(bx > x.abs()) {
                return Err(Failure::Usage(format!("split radius {bx} must exceed |x| = {}", x.abs())));
            }
            points.push((t, x, bx));
        }
    }
    Ok(Plan {
        kernel: Box::new(kernel),
        ic,
        points,
        format: args.format.or(blk.format).unwrap_or_default(),
        cfg: ctx.file.quadrature()?,
    })
}

struct Row {
    t: f64,
    x: f64,
    b: f64,
    result: Result<PdeReport, oscint::Error>,
    delta: Option<f64>,
    seconds: f64,
}

pub fn run(args: &SolveArgs, ctx: &Context) -> Result<(), Failure> {
    let p = plan(args, ctx)?;
    let rows: Vec<Row> = p
        .points
        .par_iter()
        .map(|&(t, x, b)| {
            let start = Instant::now();
            let result = pde_report(p.kernel.as_ref(), &p.ic, t, x, b, &p.cfg);
            let delta = match (&result, closed_form_psi(p.ic.expr(), t, x)) {
                (Ok(r), Some(exact)) => Some((r.psi - exact).norm()),
                _ => None,
            };
            Row { t, x, b, result, delta, seconds: start.elapsed().as_secs_f64() }
        })
        .collect();

    let status = |r: &Row| match &r.result {
        Ok(_) => "ok".to_string(),
        Err(e) => e.to_string(),
    };
    let bytes = match p.format {
        Format::Csv => {
            let header = [
                "method",
                "t",
                "x",
                "b",
                "re_psi",
                "im_psi",
                "err_est",
                "pde_residual",
                "closed_form_delta",
                "seconds",
                "status",
            ];
            let recs: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let (re, im, err, res) = match &r.result {
                        Ok(rep) => (num(rep.psi.re), num(rep.psi.im), num(rep.psi_error), num(rep.residual)),
                        Err(_) => Default::default(),
                    };
                    vec![
                        "greens_split".into(),
                        num(r.t),
                        num(r.x),
                        num(r.b),
                        re,
                        im,
                        err,
                        res,
                        r.delta.map(num).unwrap_or_default(),
                        seconds(ctx.timing, r.seconds),
                        status(r),
                    ]
                })
                .collect();
            csv_bytes(&header, &recs)?
        }
        Format::Json => {
            let recs: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    let mut v = json!({
                        "method": "greens_split",
                        "t": r.t,
                        "x": r.x,
                        "b": r.b,
                        "status": status(r),
                        "closed_form_delta": r.delta,
                    });
                    if let Ok(rep) = &r.result {
                        v["report"] = json!(rep);
                    }
                    if ctx.timing {
                        v["seconds"] = json!(r.seconds);
                    }
                    v
                })
                .collect();
            json_bytes(&json!({
                "schema": SCHEMA,
                "command": "solve-free",
                "instance": p.kernel.name(),
                "f": p.ic.descriptor(),
                "rows": recs,
            }))?
        }
    };
    emit(ctx.out.as_deref(), &bytes)?;
    if let Some(e) = rows.iter().find_map(|r| r.result.as_ref().err()) {
        return Err(Failure::from(e.clone()));
    }
    Ok(())
}
