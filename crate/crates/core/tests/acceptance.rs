//! Acceptance suite: sixteen end-to-end criteria, one status line each.
//!
//! Run with `cargo test -p oscint-core --test acceptance -- --nocapture` to see the lines.

use std::io::Write;
use std::time::Instant;

use oscint::coefficients::{build_table, check_proof_identities, exact};
use oscint::free_particle::{closed_form_moment, closed_form_oscillatory_exp, closed_form_plane_wave, closed_form_psi, FreeParticle};
use oscint::oscillatory::{
    bound_constant, continuity_check, holomorphy_check, ibp_identity_check, iterated_formula_value, oracle_limit,
    parametric_derivative, regularized_integral, representation_value, riemann_limit, theorem_bound, IntegralSpec,
    ParametricFamily,
};
use oscint::quadrature::QuadratureConfig;
use oscint::schrodinger::{
    continuous_dependence_check, default_split_radius, initial_condition_check, pde_report, psi, InitialCondition,
};
use oscint::spaces::{check_space_inequalities, norm_cn_alpha, GridSpec, SpaceParams};
use oscint::{Complex64, JetExpr, JetFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TS: [f64; 3] = [0.2, 0.5, 1.0];
const XS: [f64; 3] = [-1.0, 0.0, 1.0];

struct Outcome {
    pass: bool,
    detail: String,
    /// Sub-cases that fail because the stated threshold is below the exact value.
    unattainable: Vec<String>,
    /// Every failing sub-case is listed in `unattainable`.
    explained: bool,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail, unattainable: Vec::new(), explained: false }
    }
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(20240611);
    r.set_stream(stream);
    r
}

/// Runs `work` for every item on its own thread, keeping input order.
fn par_map<T: Sync, R: Send>(items: &[T], work: impl Fn(&T) -> R + Sync) -> Vec<R> {
    std::thread::scope(|s| {
        let handles: Vec<_> = items.iter().map(|it| s.spawn(|| work(it))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn grid() -> Vec<(f64, f64)> {
    TS.iter().flat_map(|&t| XS.iter().map(move |&x| (t, x))).collect()
}

fn solve(expr: &JetExpr, growth: f64, t: f64, x: f64, b: f64) -> (Complex64, f64) {
    let g = FreeParticle::for_growth(growth).unwrap();
    let ic = InitialCondition::from_expr(expr.clone(), &g).unwrap();
    let r = psi(&g, &ic, t, x, b, &cfg()).unwrap();
    (r.value, r.abs_error_estimate)
}

fn c01_plane_wave() -> Outcome {
    let cases: Vec<(f64, f64, f64)> =
        [-2.0, 0.0, 1.0, 3.0].iter().flat_map(|&k| grid().into_iter().map(move |(t, x)| (k, t, x))).collect();
    let worst = par_map(&cases, |&(k, t, x)| {
        let (v, _) = solve(&JetExpr::exp_i(k), 0.0, t, x, default_split_radius(x));
        (v - closed_form_plane_wave(t, x, k)).norm()
    })
    .into_iter()
    .fold(0.0f64, f64::max);
    Outcome::new(worst < 1e-6, format!("max |psi - e^(ikx-ik^2t)| = {worst:.3e} over 36 points (< 1e-6)"))
}

fn c02_moments() -> Outcome {
    let cases: Vec<(u32, f64, f64)> =
        (0..=5u32).flat_map(|m| grid().into_iter().map(move |(t, x)| (m, t, x))).collect();
    let worst = par_map(&cases, |&(m, t, x)| {
        let (v, _) = solve(&JetExpr::Monomial(m), m as f64, t, x, default_split_radius(x));
        let g = closed_form_moment(t, x, m);
        (v - g).norm() / (1.0 + g.norm())
    })
    .into_iter()
    .fold(0.0f64, f64::max);
    Outcome::new(worst < 1e-6, format!("max |psi - g_m|/(1+|g_m|) = {worst:.3e} over 54 points (< 1e-6)"))
}

fn c03_oscillatory_exp() -> Outcome {
    let mut cases = Vec::new();
    for a in [-1.0, 0.5, 2.0] {
        for b in [0.5, 1.0, 2.0] {
            for k in [-1.0, 0.0, 2.0] {
                cases.push((a, b, k));
            }
        }
    }
    let rows = par_map(&cases, |&(a, b, k)| {
        let exact = closed_form_oscillatory_exp(a, b, k).unwrap();
        let f = JetFunction::new(JetExpr::exp_i(k), 3);
        let spec = IntegralSpec::new(a, b, 3, 0.0).unwrap();
        let rep = representation_value(&f, &spec, &cfg()).unwrap();
        let orc = oracle_limit(&f, &spec, &cfg()).unwrap();
        let ok_rep = (rep.value - exact).norm() <= 1e-8f64.max(3.0 * rep.abs_error_estimate);
        let ok_orc = (orc.value - exact).norm() <= 1e-8f64.max(3.0 * orc.abs_error_estimate);
        (ok_rep && ok_orc, (rep.value - exact).norm(), (orc.value - exact).norm())
    });
    let pass = rows.iter().all(|r| r.0);
    let rep = rows.iter().map(|r| r.1).fold(0.0f64, f64::max);
    let orc = rows.iter().map(|r| r.2).fold(0.0f64, f64::max);
    Outcome::new(pass, format!("27 cases; max deviation representation {rep:.3e}, oracle {orc:.3e}"))
}

fn c04_coefficients() -> Outcome {
    let t = build_table(12, 12).unwrap();
    let ids = check_proof_identities(&t);
    let exact_dev = exact::max_relative_deviation(&t);
    let pass = ids.pass && ids.max_rel_error <= 1e-13 && exact_dev <= 1e-14;
    Outcome::new(
        pass,
        format!(
            "{} identity checks, max rel error {:.3e} (<= 1e-13); float vs exact rational {exact_dev:.3e} (<= 1e-14)",
            ids.checks.len(),
            ids.max_rel_error
        ),
    )
}

fn random_function(r: &mut ChaCha8Rng) -> JetExpr {
    match r.gen_range(0..5) {
        0 => JetExpr::exp_i(r.gen_range(-2.0..2.0)),
        1 => {
            let c: Vec<f64> = (0..r.gen_range(1..4)).map(|_| r.gen_range(-1.0..1.0)).collect();
            JetExpr::poly(&c)
        }
        2 => JetExpr::Lorentzian,
        3 => JetExpr::Gaussian(r.gen_range(0.05..0.5)),
        _ => JetExpr::exp_i(r.gen_range(-1.0..1.0)).mul(JetExpr::Lorentzian),
    }
}

fn c05_ibp() -> Outcome {
    let mut r = rng(5);
    let mut cases = Vec::new();
    for _ in 0..10 {
        let f = random_function(&mut r);
        let kappa = r.gen_range(0..4);
        let a = r.gen_range(0.5..3.0) * if r.gen_bool(0.5) { 1.0 } else { -1.0 };
        let b = r.gen_range(0.5..2.0);
        let y0 = r.gen_range(-2.0..2.0);
        cases.push((f, kappa, a, b, y0));
    }
    let rows = par_map(&cases, |(f, kappa, a, b, y0)| {
        let spec = IntegralSpec::new(*a, *b, 3, 0.0).unwrap().with_y0(*y0);
        let f = JetFunction::new(f.clone(), 3);
        [1.0, 0.1]
            .iter()
            .map(|&eps| {
                let rep = ibp_identity_check(&f, &spec, eps, *kappa, &cfg()).unwrap();
                rep.residual / rep.scale
            })
            .fold(0.0f64, f64::max)
    });
    let worst = rows.iter().copied().fold(0.0f64, f64::max);
    Outcome::new(worst < 1e-8, format!("20 identity evaluations, max residual/scale = {worst:.3e} (< 1e-8)"))
}

fn c06_m_independence() -> Outcome {
    let mut cases = Vec::new();
    for n in [2usize, 3, 4] {
        for f in [JetExpr::exp_i(1.0), JetExpr::Lorentzian, JetExpr::poly(&[0.5, -1.0])] {
            cases.push((n, f));
        }
    }
    let rows = par_map(&cases, |(n, f)| {
        let spec = IntegralSpec::new(1.3, 1.0, *n, 0.0).unwrap().with_y0(0.4);
        let fj = JetFunction::new(f.clone(), *n);
        let vals: Vec<Complex64> =
            (0..=n + 2).map(|m| iterated_formula_value(&fj, &spec, 0.5, m, &cfg()).unwrap().value).collect();
        vals.windows(2).map(|w| (w[1] - w[0]).norm() / w[0].norm().max(1e-300)).fold(0.0f64, f64::max)
    });
    let worst = rows.iter().copied().fold(0.0f64, f64::max);
    Outcome::new(worst < 1e-9, format!("n in {{2,3,4}}, m <= n+2, 3 functions: max relative step = {worst:.3e} (< 1e-9)"))
}

fn c07_y0_independence() -> Outcome {
    let mut r = rng(7);
    let mut cases = Vec::new();
    for _ in 0..10 {
        let f = random_function(&mut r);
        let a = r.gen_range(0.5..2.0) * if r.gen_bool(0.5) { 1.0 } else { -1.0 };
        let b = r.gen_range(0.5..2.0);
        cases.push((f, a, b));
    }
    let rows = par_map(&cases, |(f, a, b)| {
        let f = JetFunction::new(f.clone(), 3);
        let vals: Vec<(Complex64, f64)> = [-1.0, 0.0, 1.0, 5.0]
            .iter()
            .map(|&y0| {
                let spec = IntegralSpec::new(*a, *b, 3, 0.0).unwrap().with_y0(y0);
                let o = oracle_limit(&f, &spec, &cfg()).unwrap();
                (o.value, o.abs_error_estimate)
            })
            .collect();
        let mut ok = true;
        let mut worst = 0.0f64;
        for i in 0..vals.len() {
            for j in i + 1..vals.len() {
                let d = (vals[i].0 - vals[j].0).norm();
                worst = worst.max(d);
                ok &= d <= vals[i].1 + vals[j].1;
            }
        }
        (ok, worst)
    });
    let pass = rows.iter().all(|r| r.0);
    let worst = rows.iter().map(|r| r.1).fold(0.0f64, f64::max);
    Outcome::new(pass, format!("10 cases x 4 values of y0; max spread {worst:.3e}, within combined estimates: {pass}"))
}

fn c08_bound() -> Outcome {
    let mut r = rng(8);
    let mut cases = Vec::new();
    for _ in 0..10 {
        let f = random_function(&mut r);
        let a = r.gen_range(0.5..3.0) * if r.gen_bool(0.5) { 1.0 } else { -1.0 };
        let b = r.gen_range(0.5..2.0);
        let y0 = r.gen_range(-2.0..5.0);
        cases.push((f, a, b, y0));
    }
    let ladder = cfg().eps_ladder.values();
    let rows = par_map(&cases, |(f, a, b, y0)| {
        let spec = IntegralSpec::new(*a, *b, 3, 0.0).unwrap().with_y0(*y0);
        let f = JetFunction::new(f.clone(), 3);
        let w = norm_cn_alpha(&f, *b, 3, 0.0, &GridSpec::default()).unwrap();
        let bound = theorem_bound(&w, &spec).unwrap();
        ladder
            .iter()
            .map(|&eps| regularized_integral(&f, &spec, eps, &cfg()).unwrap().value.norm() / bound)
            .fold(0.0f64, f64::max)
    });
    let worst_ratio = rows.iter().copied().fold(0.0f64, f64::max);
    let mut asym = 0.0f64;
    for (b, n, alpha) in [(1.0, 3usize, 0.0), (2.0, 4, 1.5), (0.5, 2, 0.5)] {
        let spec = IntegralSpec::new(1e6, b, n, alpha).unwrap();
        let scaled = 1e6 * bound_constant(&spec).unwrap();
        let limit = b.powf(n as f64 + alpha - 1.0) / 2.0;
        asym = asym.max((scaled / limit - 1.0).abs());
    }
    let pass = worst_ratio <= 1.0 && asym < 0.01;
    Outcome::new(
        pass,
        format!(
            "max |I^eps|/(D*norm) = {worst_ratio:.3e} over 10 cases x {} rungs (<= 1); |a|D at a=1e6 off the limit by {asym:.3e} (< 1e-2)",
            ladder.len()
        ),
    )
}

fn random_space_function(r: &mut ChaCha8Rng) -> (JetExpr, f64) {
    match r.gen_range(0..5) {
        0 => (JetExpr::exp_i(r.gen_range(-2.0..2.0)), 0.0),
        1 => {
            let c: Vec<f64> = (0..r.gen_range(1..4)).map(|_| r.gen_range(-1.0..1.0)).collect();
            let d = (c.len() - 1) as f64;
            (JetExpr::poly(&c), d)
        }
        2 => (JetExpr::Lorentzian, 0.0),
        3 => (JetExpr::Gaussian(r.gen_range(0.05..0.5)), 0.0),
        _ => {
            let m = r.gen_range(0..3u32);
            (JetExpr::Monomial(m).mul(JetExpr::exp_i(r.gen_range(-1.0..1.0))), m as f64)
        }
    }
}

fn c09_inequalities() -> Outcome {
    let mut r = rng(9);
    let mut cases = Vec::new();
    for _ in 0..50 {
        let (f, alpha) = random_space_function(&mut r);
        let (g, beta) = random_space_function(&mut r);
        let b = r.gen_range(0.5..2.0);
        let p = SpaceParams {
            b,
            c: b + r.gen_range(0.0..2.0),
            n: r.gen_range(1..4),
            alpha,
            beta,
            p: r.gen_range(0.0..2.0),
            m: r.gen_range(0..3),
            x: r.gen_range(-2.0..2.0),
            kappa: r.gen_range(-3.0..3.0),
            grid: GridSpec::default(),
        };
        cases.push((f, g, p));
    }
    let rows = par_map(&cases, |(f, g, p)| {
        let rep = check_space_inequalities(&JetFunction::new(f.clone(), p.n), &JetFunction::new(g.clone(), p.n), p).unwrap();
        let ids: Vec<String> = rep.checks.iter().map(|c| c.inequality_id.clone()).collect();
        let worst = rep.checks.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min);
        (rep.pass, worst, ids)
    });
    let pass = rows.iter().all(|r| r.0);
    let worst = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let mut families: Vec<String> =
        rows.iter().flat_map(|r| r.2.iter().map(|s| s.split('_').next().unwrap().to_string())).collect();
    families.sort();
    families.dedup();
    Outcome::new(
        pass,
        format!("50 cases, {} inequality families exercised, min margin {worst:.3e} (>= -1e-9)", families.len()),
    )
}

fn c10_pde() -> Outcome {
    let cases: Vec<(JetExpr, f64, f64, f64)> = [(JetExpr::exp_i(1.0), 0.0), (JetExpr::Monomial(2), 2.0), (JetExpr::Monomial(3), 3.0)]
        .iter()
        .flat_map(|(e, g)| grid().into_iter().map(move |(t, x)| (e.clone(), *g, t, x)))
        .collect();
    let worst = par_map(&cases, |(e, growth, t, x)| {
        let g = FreeParticle::for_growth(*growth).unwrap();
        let ic = InitialCondition::from_expr(e.clone(), &g).unwrap();
        let r = pde_report(&g, &ic, *t, *x, default_split_radius(*x), &cfg()).unwrap();
        r.residual / (r.psi.norm() + 1.0)
    })
    .into_iter()
    .fold(0.0f64, f64::max);
    Outcome::new(worst < 1e-6, format!("27 points, max residual/(|psi|+1) = {worst:.3e} (< 1e-6)"))
}

fn c11_initial_condition() -> Outcome {
    let ladder: Vec<f64> = (3..=10).map(|j| 0.5f64.powi(j)).collect();
    let t_last = *ladder.last().unwrap();
    let cases: Vec<(&str, JetExpr, f64, f64)> = [("e^(iy)", JetExpr::exp_i(1.0), 0.0), ("y^2", JetExpr::Monomial(2), 2.0)]
        .iter()
        .flat_map(|(name, e, g)| [-0.5, 0.0, 0.5].into_iter().map(move |x| (*name, e.clone(), *g, x)))
        .collect();
    let rows = par_map(&cases, |(name, e, growth, x)| {
        let g = FreeParticle::for_growth(*growth).unwrap();
        let ic = InitialCondition::from_expr(e.clone(), &g).unwrap();
        let rep = initial_condition_check(&g, &ic, *x, &ladder, default_split_radius(*x), &cfg()).unwrap();
        let exact_gap = (closed_form_psi(e, t_last, *x).unwrap() - e.value(*x)).norm();
        (name.to_string(), *x, rep, exact_gap)
    });
    let mut pass = true;
    let mut explained = true;
    let mut unattainable = Vec::new();
    let mut worst = 0.0f64;
    for (name, x, rep, exact_gap) in &rows {
        let d = rep.final_distance.unwrap_or(f64::INFINITY);
        worst = worst.max(d);
        let structural = rep.decreasing && rep.outer_parts_vanishing;
        pass &= structural;
        explained &= structural;
        if !(d < 1e-3) {
            pass = false;
            // the computed value must still sit on the exact one
            explained &= *exact_gap >= 1e-3 && (d - exact_gap).abs() <= 1e-8;
            if *exact_gap >= 1e-3 {
                unattainable.push(format!("{name} at x={x}: exact |psi-F| = {exact_gap:.4e} at t=2^-10, computed {d:.4e}"));
            }
        }
    }
    let mut detail = format!("6 cases along t=2^-3..2^-10; max final |psi-F| = {worst:.3e} (< 1e-3)");
    if !unattainable.is_empty() {
        detail.push_str(&format!("; threshold below the exact distance for {}", unattainable.len()));
    }
    Outcome { pass, detail, unattainable, explained }
}

fn c12_b_independence() -> Outcome {
    let mut cases: Vec<(JetExpr, f64, f64, f64)> = Vec::new();
    for (t, x) in grid() {
        for k in [-2.0, 0.0, 1.0, 3.0] {
            cases.push((JetExpr::exp_i(k), 0.0, t, x));
        }
        for m in 0..=5u32 {
            cases.push((JetExpr::Monomial(m), m as f64, t, x));
        }
    }
    let rows = par_map(&cases, |(e, growth, t, x)| {
        let b = default_split_radius(*x);
        let (v1, e1) = solve(e, *growth, *t, *x, b);
        let (v2, e2) = solve(e, *growth, *t, *x, 2.0 * b);
        let d = (v1 - v2).norm();
        (d <= e1 + e2, d)
    });
    let pass = rows.iter().all(|r| r.0);
    let worst = rows.iter().map(|r| r.1).fold(0.0f64, f64::max);
    Outcome::new(pass, format!("90 points, max |psi(b) - psi(2b)| = {worst:.3e}, within combined estimates: {pass}"))
}

fn c13_parametric() -> Outcome {
    let family = ParametricFamily {
        a: Box::new(|s| s),
        a_prime: Box::new(|_| 1.0),
        b: Box::new(|_| 1.0),
        b_prime: Box::new(|_| 0.0),
        f: Box::new(|_| JetExpr::constant(1.0)),
        df_ds: Box::new(|_| JetExpr::Zero),
        n: 4,
        alpha: 0.0,
    };
    let mut worst = 0.0f64;
    for s in [0.5, 1.0, 2.0] {
        let d = parametric_derivative(&family, s, &cfg()).unwrap().value;
        let h = 1e-3 * s;
        // fourth-order central difference
        let p = |u: f64| family.psi(u, &cfg()).unwrap().value;
        let fd = (p(s - 2.0 * h) - p(s + 2.0 * h) + 8.0 * (p(s + h) - p(s - h))) / (12.0 * h);
        worst = worst.max((d - fd).norm() / d.norm());
    }
    Outcome::new(worst < 1e-4, format!("s in {{0.5,1,2}}, max relative deviation from finite differences {worst:.3e} (< 1e-4)"))
}

fn c14_riemann() -> Outcome {
    let spec = IntegralSpec::new(1.0, 1.0, 3, 0.0).unwrap();
    let mut worst = 0.0f64;
    for e in [JetExpr::exp_i(1.0), JetExpr::Lorentzian] {
        let f = JetFunction::new(e, 3);
        let r = riemann_limit(&f, &spec, &cfg()).unwrap();
        let v = representation_value(&f, &spec, &cfg()).unwrap();
        worst = worst.max((r.value - v.value).norm());
    }
    Outcome::new(worst < 1e-6, format!("e^(iy) and 1/(1+y^2) at (a,b)=(1,1): max |riemann - representation| = {worst:.3e} (< 1e-6)"))
}

fn c15_holomorphy() -> Outcome {
    let spec = IntegralSpec::new(1.0, 1.0, 3, 0.0).unwrap();
    let verts = [Complex64::new(0.8, 0.0), Complex64::new(1.2, 0.0), Complex64::new(1.0, 0.3)];
    let rep = holomorphy_check(&|z| JetExpr::ExpI(z), verts, &spec, &cfg()).unwrap();
    Outcome::new(
        rep.relative < 1e-6,
        format!("|contour integral| = {:.3e}, relative to perimeter*max|psi| {:.3e} (< 1e-6)", rep.residual, rep.relative),
    )
}

fn c16_continuity() -> Outcome {
    let coeffs: Vec<f64> = (1..=6).map(|m| 1.0 / m as f64).collect();
    let spec = IntegralSpec::new(1.0, 1.0, 3, 1.5).unwrap();
    let osc = continuity_check(&JetExpr::exp_i(1.0), &JetExpr::Monomial(1), &coeffs, &spec, &cfg(), 1e-12).unwrap();
    let g = FreeParticle::for_growth(1.0).unwrap();
    let ic = InitialCondition::from_expr(JetExpr::exp_i(1.0), &g).unwrap();
    let dep = continuous_dependence_check(&g, &ic, &JetExpr::Monomial(1), &coeffs, 0.5, 0.3, default_split_radius(0.3), &cfg(), 1e-12)
        .unwrap();
    let lin_osc = osc.rows.iter().filter_map(|r| r.relative_deviation).fold(0.0f64, f64::max);
    let lin_dep = dep.rows.iter().map(|r| r.relative_deviation).fold(0.0f64, f64::max);
    Outcome::new(
        osc.pass && dep.pass,
        format!(
            "integral: bound and convergence {} (linearity {lin_osc:.1e}); solution: {} (linearity {lin_dep:.1e}, fitted C {:.3e})",
            osc.pass, dep.pass, dep.fitted_constant
        ),
    )
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 16] = [
        ("plane-wave closed form", c01_plane_wave),
        ("moments closed form", c02_moments),
        ("oscillatory exp closed form", c03_oscillatory_exp),
        ("coefficient identities", c04_coefficients),
        ("integration-by-parts identity", c05_ibp),
        ("m-independence", c06_m_independence),
        ("y0-independence", c07_y0_independence),
        ("a-priori bound and asymptotics", c08_bound),
        ("function-space inequalities", c09_inequalities),
        ("PDE residual", c10_pde),
        ("initial condition", c11_initial_condition),
        ("b-independence of the split", c12_b_independence),
        ("parametric derivative", c13_parametric),
        ("Riemann limit", c14_riemann),
        ("holomorphy", c15_holomorphy),
        ("continuity in data", c16_continuity),
    ];
    // Written to the process stdout rather than through println!, so the
    // report shows up without --nocapture.
    let mut so = std::io::stdout().lock();
    let mut failures = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let secs = start.elapsed().as_secs_f64();
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        writeln!(so, "criterion {:2} {verdict} {name}: {} [{secs:.1}s]", i + 1, out.detail).unwrap();
        for u in &out.unattainable {
            writeln!(so, "             unattainable: {u}").unwrap();
        }
        so.flush().unwrap();
        if !out.pass {
            failures.push((i + 1, out));
        }
    }
    // A failure is tolerated only when every failing sub-case is explained by
    // the exact solution itself lying outside the threshold.
    let unexplained: Vec<usize> = failures.iter().filter(|(_, out)| !out.explained).map(|(id, _)| *id).collect();
    assert!(unexplained.is_empty(), "criteria failed: {unexplained:?}");
}
