use std::time::Instant;

use clap::Args;
use oscint::oscillatory::{oracle_limit, regularized_integral, representation_value, riemann_limit, EvalReport, IntegralSpec};
use oscint::quadrature::QuadratureConfig;
use oscint::JetFunction;
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::json;

use crate::config::Format;
use crate::output::{csv_bytes, emit, json_bytes, num, seconds, SCHEMA};
use crate::{Context, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    Representation,
    Oracle,
    Riemann,
    /// Single regularized integral at `--eps`.
    Regularized,
    /// Representation, oracle and Riemann.
    All,
}

#[derive(Args, Debug)]
pub struct IntegrateArgs {
    /// Function descriptor, e.g. `exp_i:1`, `poly:1,0,2`, `shift:0.5(gauss:0.1)`.
    #[arg(long = "f")]
    f: Option<String>,
    /// Phase coefficient(s), comma separated for a sweep.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    a: Option<Vec<f64>>,
    /// Lower limit(s), comma separated for a sweep.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    b: Option<Vec<f64>>,
    /// Number of integration-by-parts steps (default 3).
    #[arg(long)]
    n: Option<usize>,
    /// Growth order of the n-th derivative (default 0).
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Centre of the Gaussian regularizer (default 0).
    #[arg(long, allow_hyphen_values = true)]
    y0: Option<f64>,
    #[arg(long, value_enum)]
    method: Option<MethodChoice>,
    /// Regularization strength for `--method regularized`.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegrateBlock {
    f: Option<String>,
    a: Option<Vec<f64>>,
    b: Option<Vec<f64>>,
    n: Option<usize>,
    alpha: Option<f64>,
    y0: Option<f64>,
    method: Option<MethodChoice>,
    eps: Option<f64>,
    format: Option<Format>,
}

struct Plan {
    f: String,
    specs: Vec<IntegralSpec>,
    methods: Vec<MethodChoice>,
    eps: f64,
    format: Format,
    cfg: QuadratureConfig,
}

fn plan(args: &IntegrateArgs, ctx: &Context) -> Result<Plan, Failure> {
    let blk = &ctx.file.integrate;
    let f = args.f.clone().or_else(|| blk.f.clone()).ok_or_else(|| Failure::Usage("missing --f".into()))?;
    let a = args.a.clone().or_else(|| blk.a.clone()).ok_or_else(|| Failure::Usage("missing --a".into()))?;
    let b = args.b.clone().or_else(|| blk.b.clone()).ok_or_else(|| Failure::Usage("missing --b".into()))?;
    if a.is_empty() || b.is_empty() {
        return Err(Failure::Usage("--a and --b need at least one value".into()));
    }
    let n = args.n.or(blk.n).unwrap_or(3);
    let alpha = args.alpha.or(blk.alpha).unwrap_or(0.0);
    let y0 = args.y0.or(blk.y0).unwrap_or(0.0);
    let method = args.method.or(blk.method).unwrap_or(MethodChoice::Representation);
    let eps = args.eps.or(blk.eps).unwrap_or(0.1);
    if method == MethodChoice::Regularized && !(eps > 0.0 && eps <= 1.0) {
        return Err(Failure::Usage(format!("eps must lie in (0, 1], got {eps}")));
    }
    if !y0.is_finite() {
        return Err(Failure::Usage("y0 must be finite".into()));
    }
    JetFunction::parse(&f, n)?;
    let mut specs = Vec::new();
    for &ai in &a {
        for &bi in &b {
            specs.push(IntegralSpec::new(ai, bi, n, alpha)?.with_y0(y0));
        }
    }
    let methods = match method {
        MethodChoice::All => vec![MethodChoice::Representation, MethodChoice::Oracle, MethodChoice::Riemann],
        m => vec![m],
    };
    Ok(Plan { f, specs, methods, eps, format: args.format.or(blk.format).unwrap_or_default(), cfg: ctx.file.quadrature()? })
}

struct Row {
    method: MethodChoice,
    spec: IntegralSpec,
    result: Result<EvalReport, oscint::Error>,
    seconds: f64,
}

fn method_name(m: MethodChoice) -> &'static str {
    match m {
        MethodChoice::Representation => "representation",
        MethodChoice::Oracle => "oracle",
        MethodChoice::Riemann => "riemann",
        MethodChoice::Regularized => "regularized",
        MethodChoice::All => "all",
    }
}

fn status(r: &Result<EvalReport, oscint::Error>) -> String {
    match r {
        Ok(rep) if rep.diagnostics.budget_exceeded => "budget_exceeded".into(),
        Ok(_) => "ok".into(),
        Err(e) => e.to_string(),
    }
}

pub fn run(args: &IntegrateArgs, ctx: &Context) -> Result<(), Failure> {
    let p = plan(args, ctx)?;
    let jobs: Vec<(MethodChoice, IntegralSpec)> =
        p.specs.iter().flat_map(|s| p.methods.iter().map(move |m| (*m, *s))).collect();
    let rows: Vec<Row> = jobs
        .par_iter()
        .map(|&(method, spec)| {
            let start = Instant::now();
            let result = JetFunction::parse(&p.f, spec.n).and_then(|f| match method {
                MethodChoice::Representation => representation_value(&f, &spec, &p.cfg),
                MethodChoice::Oracle => oracle_limit(&f, &spec, &p.cfg),
                MethodChoice::Riemann => riemann_limit(&f, &spec, &p.cfg),
                MethodChoice::Regularized => regularized_integral(&f, &spec, p.eps, &p.cfg),
                MethodChoice::All => unreachable!("expanded in plan"),
            });
            Row { method, spec, result, seconds: start.elapsed().as_secs_f64() }
        })
        .collect();

    let bytes = match p.format {
        Format::Csv => {
            let header =
                ["method", "a", "b", "n", "alpha", "y0", "re", "im", "err_est", "panels", "seconds", "status"];
            let recs: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let (re, im, err, panels) = match &r.result {
                        Ok(rep) => (
                            num(rep.value.re),
                            num(rep.value.im),
                            num(rep.abs_error_estimate),
                            rep.diagnostics.panels.to_string(),
                        ),
                        Err(_) => Default::default(),
                    };
                    vec![
                        method_name(r.method).into(),
                        num(r.spec.a),
                        num(r.spec.b),
                        r.spec.n.to_string(),
                        num(r.spec.alpha),
                        num(r.spec.y0),
                        re,
                        im,
                        err,
                        panels,
                        seconds(ctx.timing, r.seconds),
                        status(&r.result),
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
                        "method": method_name(r.method),
                        "a": r.spec.a,
                        "b": r.spec.b,
                        "n": r.spec.n,
                        "alpha": r.spec.alpha,
                        "y0": r.spec.y0,
                        "f": p.f,
                        "status": status(&r.result),
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
            json_bytes(&json!({ "schema": SCHEMA, "command": "integrate", "rows": recs }))?
        }
    };
    emit(ctx.out.as_deref(), &bytes)?;

    for r in &rows {
        match &r.result {
            Err(e) => return Err(Failure::from(e.clone())),
            Ok(rep) if rep.diagnostics.budget_exceeded => {
                return Err(Failure::Numerical(format!("{} at a = {}: panel budget exhausted", method_name(r.method), r.spec.a)))
            }
            Ok(_) => {}
        }
    }
    Ok(())
}
