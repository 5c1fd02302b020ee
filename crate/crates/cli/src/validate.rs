use clap::Args;
use oscint::coefficients::{build_table, check_proof_identities, IDENTITY_TOLERANCE};
use oscint::free_particle::FreeParticle;
use oscint::oscillatory::{
    bound_constant, ibp_identity_check, iterated_formula_value, oracle_limit, regularized_integral, theorem_bound,
    IntegralSpec,
};
use oscint::quadrature::QuadratureConfig;
use oscint::schrodinger::{default_split_radius, psi, validate_decomposition, InitialCondition};
use oscint::spaces::{check_space_inequalities, norm_cn_alpha, GridSpec, SpaceParams};
use oscint::{JetExpr, JetFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::output::{emit, json_bytes, SCHEMA};
use crate::{Context, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Coefficients,
    Spaces,
    Ibp,
    Independence,
    Bounds,
    Decomposition,
}

const ALL_SUITES: [Suite; 6] =
    [Suite::Coefficients, Suite::Spaces, Suite::Ibp, Suite::Independence, Suite::Bounds, Suite::Decomposition];

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// Suites to run, comma separated (default: all).
    #[arg(long, value_enum, value_delimiter = ',')]
    suite: Option<Vec<Suite>>,
    /// Seed of the randomized cases.
    #[arg(long)]
    seed: Option<u64>,
    /// Randomized cases per suite (default 5).
    #[arg(long)]
    cases: Option<usize>,
    /// Print the coefficient table as CSV (k, l, value) instead of running suites.
    #[arg(long)]
    coefficients: bool,
    /// Table size for `--coefficients` (default 12).
    #[arg(long)]
    order: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateBlock {
    suite: Option<Vec<Suite>>,
    seed: Option<u64>,
    cases: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
struct Check {
    id: String,
    pass: bool,
    /// Relative distance to the threshold; negative when the check fails.
    margin: f64,
    value: f64,
    threshold: f64,
    detail: String,
}

/// `value ≤ threshold`.
fn at_most(id: impl Into<String>, value: f64, threshold: f64, detail: impl Into<String>) -> Check {
    let margin = if threshold > 0.0 { (threshold - value) / threshold } else { -value };
    Check { id: id.into(), pass: value <= threshold, margin, value, threshold, detail: detail.into() }
}

fn rng(seed: u64, suite: Suite) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(suite as u64);
    r
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

/// A catalog descriptor and the growth order of the function it names.
fn random_descriptor(r: &mut ChaCha8Rng) -> (String, f64) {
    match r.gen_range(0..5) {
        0 => (format!("exp_i:{}", round6(r.gen_range(-2.0..2.0))), 0.0),
        1 => {
            let k = r.gen_range(1..4);
            let c: Vec<String> = (0..k).map(|_| round6(r.gen_range(-1.0..1.0)).to_string()).collect();
            (format!("poly:{}", c.join(",")), (k - 1) as f64)
        }
        2 => ("lorentz".into(), 0.0),
        3 => (format!("gauss:{}", round6(r.gen_range(0.05..0.5))), 0.0),
        _ => (format!("prod(exp_i:{},lorentz)", round6(r.gen_range(-1.0..1.0))), 0.0),
    }
}

fn random_sign(r: &mut ChaCha8Rng) -> f64 {
    if r.gen_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

fn parse(desc: &str, order: usize) -> Result<JetFunction, Failure> {
    Ok(JetFunction::parse(desc, order)?)
}

fn coefficients() -> Result<Vec<Check>, Failure> {
    let t = build_table(12, 12)?;
    let rep = check_proof_identities(&t);
    let mut names: Vec<&str> = rep.checks.iter().map(|c| c.identity).collect();
    names.dedup();
    let mut out = Vec::new();
    for name in names {
        let worst = rep.checks.iter().filter(|c| c.identity == name).map(|c| c.rel_error).fold(0.0, f64::max);
        out.push(at_most(format!("identity:{name}"), worst, IDENTITY_TOLERANCE, "max relative error over the 12x12 table"));
    }
    let dev = oscint::coefficients::exact::max_relative_deviation(&t);
    out.push(at_most("exact_rational", dev, 1e-14, "float table against exact rational recurrence"));
    Ok(out)
}

fn spaces(seed: u64, cases: usize) -> Result<Vec<Check>, Failure> {
    let mut r = rng(seed, Suite::Spaces);
    let mut jobs = Vec::new();
    for _ in 0..cases {
        let (f, alpha) = random_descriptor(&mut r);
        let (g, beta) = random_descriptor(&mut r);
        let b = round6(r.gen_range(0.5..2.0));
        let p = SpaceParams {
            b,
            c: round6(b + r.gen_range(0.0..2.0)),
            n: r.gen_range(1..4),
            alpha,
            beta,
            p: round6(r.gen_range(0.0..2.0)),
            m: r.gen_range(0..3),
            x: round6(r.gen_range(-2.0..2.0)),
            kappa: round6(r.gen_range(-3.0..3.0)),
            grid: GridSpec::default(),
        };
        jobs.push((f, g, p));
    }
    let results: Vec<Result<Vec<Check>, Failure>> = jobs
        .par_iter()
        .enumerate()
        .map(|(i, (f, g, p))| {
            let rep = check_space_inequalities(&parse(f, p.n)?, &parse(g, p.n)?, p)?;
            Ok(rep
                .checks
                .iter()
                .map(|c| Check {
                    id: format!("case{i}:{}", c.inequality_id),
                    pass: c.pass,
                    margin: c.margin,
                    value: c.lhs,
                    threshold: c.rhs,
                    detail: format!("f = {f}, g = {g}{}", if rep.heuristic { " (sampled norms)" } else { "" }),
                })
                .collect())
        })
        .collect();
    flatten(results)
}

fn flatten(v: Vec<Result<Vec<Check>, Failure>>) -> Result<Vec<Check>, Failure> {
    let mut out = Vec::new();
    for r in v {
        out.extend(r?);
    }
    Ok(out)
}

fn ibp(seed: u64, cases: usize, cfg: &QuadratureConfig) -> Result<Vec<Check>, Failure> {
    let mut r = rng(seed, Suite::Ibp);
    let mut jobs = Vec::new();
    for _ in 0..cases {
        let (f, _) = random_descriptor(&mut r);
        let kappa = r.gen_range(0..4);
        let a = round6(r.gen_range(0.5..3.0)) * random_sign(&mut r);
        let b = round6(r.gen_range(0.5..2.0));
        let y0 = round6(r.gen_range(-2.0..2.0));
        jobs.push((f, kappa, a, b, y0));
    }
    let results: Vec<Result<Vec<Check>, Failure>> = jobs
        .par_iter()
        .enumerate()
        .map(|(i, (f, kappa, a, b, y0))| {
            let spec = IntegralSpec::new(*a, *b, 3, 0.0)?.with_y0(*y0);
            let fj = parse(f, 3)?;
            let mut out = Vec::new();
            for eps in [1.0, 0.1] {
                let rep = ibp_identity_check(&fj, &spec, eps, *kappa, cfg)?;
                out.push(at_most(
                    format!("case{i}:eps={eps}"),
                    rep.residual / rep.scale,
                    1e-8,
                    format!("f = {f}, kappa = {kappa}, a = {a}, b = {b}, y0 = {y0}; residual relative to term scale"),
                ));
            }
            Ok(out)
        })
        .collect();
    flatten(results)
}

fn independence(seed: u64, cases: usize, cfg: &QuadratureConfig) -> Result<Vec<Check>, Failure> {
    let mut r = rng(seed, Suite::Independence);
    let mut jobs = Vec::new();
    for _ in 0..cases {
        let (f, _) = random_descriptor(&mut r);
        let a = round6(r.gen_range(0.5..2.0)) * random_sign(&mut r);
        let b = round6(r.gen_range(0.5..2.0));
        jobs.push((f, a, b));
    }
    let y0s = [-1.0, 0.0, 1.0, 5.0];
    let mut out = flatten(
        jobs.par_iter()
            .enumerate()
            .map(|(i, (f, a, b))| {
                let fj = parse(f, 3)?;
                let mut vals = Vec::new();
                for y0 in y0s {
                    let o = oracle_limit(&fj, &IntegralSpec::new(*a, *b, 3, 0.0)?.with_y0(y0), cfg)?;
                    vals.push((o.value, o.abs_error_estimate));
                }
                let mut worst = 0.0f64;
                for (p, q) in vals.iter().enumerate().flat_map(|(i, p)| vals[i + 1..].iter().map(move |q| (p, q))) {
                    worst = worst.max((p.0 - q.0).norm() / (p.1 + q.1));
                }
                Ok(vec![at_most(
                    format!("y0:case{i}"),
                    worst,
                    1.0,
                    format!("f = {f}, a = {a}, b = {b}; spread over y0 in {{-1,0,1,5}} relative to combined error estimates"),
                )])
            })
            .collect(),
    )?;

    for n in [2usize, 3, 4] {
        let spec = IntegralSpec::new(1.3, 1.0, n, 0.0)?.with_y0(0.4);
        let fj = parse("exp_i:1", n)?;
        let vals: Vec<_> =
            (0..=n + 2).map(|m| iterated_formula_value(&fj, &spec, 0.5, m, cfg).map(|r| r.value)).collect::<Result<_, _>>()?;
        let worst = vals.windows(2).map(|w| (w[1] - w[0]).norm() / w[0].norm()).fold(0.0, f64::max);
        out.push(at_most(format!("m:n={n}"), worst, 1e-9, "relative step between consecutive m at eps = 0.5"));
    }

    let kernel = FreeParticle::for_growth(2.0)?;
    let points = [(0.2, -1.0), (0.5, 0.0), (1.0, 1.0)];
    for desc in ["exp_i:1", "mono:2"] {
        let ic = InitialCondition::from_expr(desc.parse::<JetExpr>()?, &kernel)?;
        for (t, x) in points {
            let b = default_split_radius(x);
            let p1 = psi(&kernel, &ic, t, x, b, cfg)?;
            let p2 = psi(&kernel, &ic, t, x, 2.0 * b, cfg)?;
            let ratio = (p1.value - p2.value).norm() / (p1.abs_error_estimate + p2.abs_error_estimate);
            out.push(at_most(
                format!("b:{desc}:t={t}:x={x}"),
                ratio,
                1.0,
                "|psi(b) - psi(2b)| relative to combined error estimates",
            ));
        }
    }
    Ok(out)
}

fn bounds(seed: u64, cases: usize, cfg: &QuadratureConfig) -> Result<Vec<Check>, Failure> {
    let mut r = rng(seed, Suite::Bounds);
    let mut jobs = Vec::new();
    for _ in 0..cases {
        let (f, _) = random_descriptor(&mut r);
        let a = round6(r.gen_range(0.5..3.0)) * random_sign(&mut r);
        let b = round6(r.gen_range(0.5..2.0));
        let y0 = round6(r.gen_range(-2.0..5.0));
        jobs.push((f, a, b, y0));
    }
    let mut out = flatten(
        jobs.par_iter()
            .enumerate()
            .map(|(i, (f, a, b, y0))| {
                let spec = IntegralSpec::new(*a, *b, 3, 0.0)?.with_y0(*y0);
                let fj = parse(f, 3)?;
                let w = norm_cn_alpha(&fj, *b, 3, 0.0, &GridSpec::default())?;
                let bound = theorem_bound(&w, &spec)?;
                let mut worst = 0.0f64;
                for eps in [1.0, 0.1, 0.01] {
                    worst = worst.max(regularized_integral(&fj, &spec, eps, cfg)?.value.norm());
                }
                Ok(vec![at_most(
                    format!("a_priori:case{i}"),
                    worst,
                    bound,
                    format!("f = {f}, a = {a}, b = {b}, y0 = {y0}; max |I^eps| over eps in {{1, 0.1, 0.01}} against D*norm"),
                )])
            })
            .collect(),
    )?;
    for (b, n, alpha) in [(1.0, 3usize, 0.0), (2.0, 4, 1.5)] {
        let scaled = 1e6 * bound_constant(&IntegralSpec::new(1e6, b, n, alpha)?)?;
        let limit = b.powf(n as f64 + alpha - 1.0) / 2.0;
        out.push(at_most(
            format!("asymptotics:b={b}:n={n}:alpha={alpha}"),
            (scaled / limit - 1.0).abs(),
            0.01,
            "|a| D at a = 1e6 relative to b^(n+alpha-1)/2",
        ));
    }
    Ok(out)
}

fn decomposition() -> Result<Vec<Check>, Failure> {
    let rep = validate_decomposition(&FreeParticle::new(4)?);
    let flag = |id: &str, ok: bool| Check {
        id: id.into(),
        pass: ok,
        margin: if ok { 0.0 } else { -1.0 },
        value: f64::from(u8::from(ok)),
        threshold: 1.0,
        detail: "free_particle".into(),
    };
    Ok(vec![
        flag("n_exceeds_alpha_plus_3", rep.n_exceeds_alpha_plus_3),
        flag("a_positive", rep.a_positive),
        flag("a_grows_near_zero", rep.a_grows_near_zero),
        at_most("ghat_identity", rep.ghat_identity_max_rel, 1e-12, "kernel identity against the decomposition"),
    ])
}

pub fn run(args: &ValidateArgs, ctx: &Context) -> Result<(), Failure> {
    let blk = &ctx.file.validate;
    if args.coefficients {
        let order = args.order.unwrap_or(12);
        let t = build_table(order, order)?;
        return crate::output::emit(ctx.out.as_deref(), t.to_csv().as_bytes());
    }
    let suites = args.suite.clone().or_else(|| blk.suite.clone()).unwrap_or_else(|| ALL_SUITES.to_vec());
    let seed = args.seed.or(blk.seed).unwrap_or(0);
    let cases = args.cases.or(blk.cases).unwrap_or(5);
    if cases == 0 {
        return Err(Failure::Usage("--cases must be positive".into()));
    }
    let cfg = ctx.file.quadrature()?;
    let mut reports = Vec::new();
    let mut all_pass = true;
    for s in suites {
        let checks = match s {
            Suite::Coefficients => coefficients(),
            Suite::Spaces => spaces(seed, cases),
            Suite::Ibp => ibp(seed, cases, &cfg),
            Suite::Independence => independence(seed, cases, &cfg),
            Suite::Bounds => bounds(seed, cases, &cfg),
            Suite::Decomposition => decomposition(),
        }
        .map_err(|f| match f {
            Failure::Numerical(m) => Failure::Validation(format!("suite {s:?} did not converge: {m}")),
            other => other,
        })?;
        let pass = checks.iter().all(|c| c.pass);
        all_pass &= pass;
        reports.push(json!({ "name": s, "pass": pass, "checks": checks }));
    }
    let doc = json!({
        "schema": SCHEMA,
        "command": "validate",
        "seed": seed,
        "cases": cases,
        "suites": reports,
        "pass": all_pass,
    });
    emit(ctx.out.as_deref(), &json_bytes(&doc)?)?;
    if all_pass {
        Ok(())
    } else {
        Err(Failure::Validation("one or more checks failed".into()))
    }
}
