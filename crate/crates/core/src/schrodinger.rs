//! `Ψ(t,x) = lim_{ε→0} ∫_ℝ e^{-εy²} G(t,x,y) F(y) dy` for kernels of the form
//! `G = e^{ia(t)(y-x)²} G̃(t,x,y)`, split at `±b` into two oscillatory
//! integrals over half lines and a proper integral over `[-b, b]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::jets::{JetExpr, JetFunction};
use crate::oscillatory::{representation_values, Diagnostics, EvalReport, IntegralSpec, Method, QuadratureConfig};
use crate::quadrature::{cis_quadratic, finite_phase_integral_batch, phase_mod_tau, Amplitude};
use crate::spaces::{norm_cn_r, GridSpec};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Below this time the panels get very narrow; results are flagged.
pub const SMALL_TIME: f64 = 1e-4;

/// A Green's function `G(t,x,y) = e^{ia(t)(y-x)²} G̃(t,x,y)`; every `G̃`
/// partial is a jet expression in `y`.
pub trait GreensDecomposition: Send + Sync {
    fn name(&self) -> &str;

    /// `T`, the end of the time interval.
    fn horizon(&self) -> f64 {
        f64::INFINITY
    }

    fn a(&self, t: f64) -> f64;
    fn a_prime(&self, t: f64) -> f64;
    fn gtilde(&self, t: f64, x: f64) -> JetExpr;
    fn gtilde_x(&self, t: f64, x: f64) -> JetExpr;
    fn gtilde_xx(&self, t: f64, x: f64) -> JetExpr;
    fn gtilde_t(&self, t: f64, x: f64) -> JetExpr;
    fn n(&self) -> usize;
    fn alpha(&self) -> f64;

    fn potential(&self, _t: f64, _x: f64) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
}

#[derive(Debug, Clone)]
pub struct InitialCondition {
    f: JetFunction,
    beta: f64,
}

impl InitialCondition {
    /// Accepts `F` of growth order `beta` when `0 ≤ β < n − α − 3`.
    pub fn new(expr: JetExpr, beta: f64, g: &dyn GreensDecomposition) -> Result<Self> {
        let limit = g.n() as f64 - g.alpha() - 3.0;
        if !(beta >= 0.0) || !(beta < limit) {
            return Err(invalid(format!(
                "initial condition growth beta = {beta} must satisfy 0 <= beta < n - alpha - 3 = {limit}"
            )));
        }
        let order = g.n();
        Ok(Self { f: JetFunction::new(expr, order), beta })
    }

    /// Growth order read off the expression.
    pub fn from_expr(expr: JetExpr, g: &dyn GreensDecomposition) -> Result<Self> {
        let beta = expr.growth();
        if !beta.is_finite() {
            return Err(invalid(format!("{expr} is not polynomially bounded on the real line")));
        }
        Self::new(expr, beta, g)
    }

    pub fn function(&self) -> &JetFunction {
        &self.f
    }

    pub fn expr(&self) -> &JetExpr {
        self.f.expr()
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn descriptor(&self) -> String {
        self.f.descriptor()
    }
}

/// How the integral over `[b, ∞)` is written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Psi1Form {
    #[default]
    Auto,
    /// `𝓘_{a,b}(e^{iay²} Ĝ F)` with `Ĝ = e^{ia(x²−2xy)} G̃`.
    Ghat,
    /// `𝓘_{a,b−x}(G̃F(·+x))` after `y → y + x`.
    Shifted,
}

impl Psi1Form {
    fn resolve(self, b: f64, x: f64) -> Self {
        match self {
            Psi1Form::Auto if b - x.abs() >= 0.25 * b => Psi1Form::Shifted,
            Psi1Form::Auto => Psi1Form::Ghat,
            other => other,
        }
    }
}

/// Which kernel sits under the integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kernel {
    Psi,
    Dt,
    Dxx,
}

impl Kernel {
    /// Extra polynomial growth of the kernel amplitude.
    fn growth(self) -> f64 {
        match self {
            Kernel::Psi => 0.0,
            Kernel::Dt | Kernel::Dxx => 2.0,
        }
    }
}

fn cpoly(c: &[Complex64]) -> JetExpr {
    JetExpr::Poly(c.to_vec())
}

/// Amplitude `K̃` with `∂G = e^{ia(y−x)²} K̃`.
fn kernel_amplitude(g: &dyn GreensDecomposition, t: f64, x: f64, k: Kernel) -> JetExpr {
    let a = g.a(t);
    let gt = g.gtilde(t, x);
    let c = |v: f64| Complex64::new(v, 0.0);
    match k {
        Kernel::Psi => gt,
        Kernel::Dt => {
            let ap = g.a_prime(t);
            let sq = cpoly(&[c(x * x), c(-2.0 * x), c(1.0)]).scale(I * ap);
            sq.mul(gt).add(g.gtilde_t(t, x))
        }
        Kernel::Dxx => {
            let a2 = 4.0 * a * a;
            let quad = cpoly(&[Complex64::new(-a2 * x * x, 2.0 * a), c(2.0 * a2 * x), c(-a2)]);
            let lin = cpoly(&[c(-x), c(1.0)]).scale(Complex64::new(0.0, -4.0 * a));
            quad.mul(gt).add(lin.mul(g.gtilde_x(t, x))).add(g.gtilde_xx(t, x))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiParts {
    /// Over `[b, ∞)`.
    pub plus: EvalReport,
    /// Over `[-b, b]`.
    pub zero: EvalReport,
    /// Over `(-∞, -b]`.
    pub minus: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiReport {
    pub t: f64,
    pub x: f64,
    pub b: f64,
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub form: Psi1Form,
    pub parts: PsiParts,
    pub warnings: Vec<String>,
}

impl PsiReport {
    pub fn to_eval_report(&self) -> EvalReport {
        let p = &self.parts;
        EvalReport {
            value: self.value,
            abs_error_estimate: self.abs_error_estimate,
            method: Method::GreensSplit,
            diagnostics: Diagnostics {
                panels: p.plus.diagnostics.panels + p.zero.diagnostics.panels + p.minus.diagnostics.panels,
                boundary_magnitude: p.plus.diagnostics.boundary_magnitude + p.minus.diagnostics.boundary_magnitude,
                tail_magnitude: p.plus.diagnostics.tail_magnitude + p.minus.diagnostics.tail_magnitude,
                budget_exceeded: p.plus.diagnostics.budget_exceeded || p.minus.diagnostics.budget_exceeded,
                warnings: self.warnings.clone(),
                ..Default::default()
            },
        }
    }
}

/// Default split radius `|x| + 2`.
pub fn default_split_radius(x: f64) -> f64 {
    x.abs() + 2.0
}

fn check_point(g: &dyn GreensDecomposition, t: f64, x: f64, b: f64) -> Result<Vec<String>> {
    if !(t > 0.0 && t < g.horizon()) {
        return Err(invalid(format!("t = {t} must lie in (0, {})", g.horizon())));
    }
    if !x.is_finite() {
        return Err(invalid("x must be finite"));
    }
    if !(b > x.abs()) || !b.is_finite() {
        return Err(invalid(format!("split radius b = {b} must exceed |x| = {}", x.abs())));
    }
    let a = g.a(t);
    if !(a > 0.0 && a.is_finite()) {
        return Err(invalid(format!("a(t) = {a} must be positive at t = {t}")));
    }
    let mut warnings = Vec::new();
    if t < SMALL_TIME {
        warnings.push(format!("t = {t:e} is below {SMALL_TIME:e}; a(t) = {a:e} makes panels very narrow"));
    }
    Ok(warnings)
}

fn quad_report(value: Complex64, err: f64, panels: usize, abs_sum: f64) -> EvalReport {
    EvalReport {
        value,
        abs_error_estimate: err,
        method: Method::Quadrature,
        diagnostics: Diagnostics { panels, tail_magnitude: abs_sum, ..Default::default() },
    }
}

/// The three-way split for several amplitudes `h_i = K̃·F_i` that share one
/// growth order; the half-line parts run on a common panel schedule.
#[allow(clippy::too_many_arguments)]
fn split_many(
    g: &dyn GreensDecomposition,
    hs: &[JetExpr],
    growth: f64,
    t: f64,
    x: f64,
    b: f64,
    form: Psi1Form,
    cfg: &QuadratureConfig,
) -> Result<Vec<PsiReport>> {
    let warnings = check_point(g, t, x, b)?;
    let a = g.a(t);
    let n = g.n();
    let form = form.resolve(b, x);
    let plus_fs: Vec<JetFunction>;
    let minus_fs: Vec<JetFunction>;
    let (plus_spec, minus_spec);
    match form {
        Psi1Form::Shifted | Psi1Form::Auto => {
            plus_spec = IntegralSpec::new(a, b - x, n, growth)?;
            minus_spec = IntegralSpec::new(a, b + x, n, growth)?;
            plus_fs = hs.iter().map(|h| JetFunction::new(h.clone().affine(1.0, x), n)).collect();
            minus_fs = hs.iter().map(|h| JetFunction::new(h.clone().affine(-1.0, x), n)).collect();
        }
        Psi1Form::Ghat => {
            plus_spec = IntegralSpec::new(a, b, n, growth)?;
            minus_spec = plus_spec;
            let c = cis_quadratic(a, x);
            let wave = |sign: f64| JetExpr::ExpI(Complex64::new(sign * 2.0 * a * x, 0.0)).scale(c);
            plus_fs = hs.iter().map(|h| JetFunction::new(wave(-1.0).mul(h.clone()), n)).collect();
            minus_fs = hs.iter().map(|h| JetFunction::new(wave(1.0).mul(h.clone().affine(-1.0, 0.0)), n)).collect();
        }
    }
    let plus = representation_values(&plus_fs, &plus_spec, cfg)?;
    let minus = representation_values(&minus_fs, &minus_spec, cfg)?;
    let right_fs: Vec<Box<dyn Fn(f64) -> Complex64 + '_>> =
        hs.iter().map(|h| Box::new(move |u: f64| h.value(x + u)) as Box<dyn Fn(f64) -> Complex64>).collect();
    let left_fs: Vec<Box<dyn Fn(f64) -> Complex64 + '_>> =
        hs.iter().map(|h| Box::new(move |u: f64| h.value(x - u)) as Box<dyn Fn(f64) -> Complex64>).collect();
    let right_refs: Vec<Amplitude> = right_fs.iter().map(|f| f.as_ref() as Amplitude).collect();
    let left_refs: Vec<Amplitude> = left_fs.iter().map(|f| f.as_ref() as Amplitude).collect();
    let rights = finite_phase_integral_batch(a, 0.0, b - x, cfg, &right_refs)?;
    let lefts = finite_phase_integral_batch(a, 0.0, b + x, cfg, &left_refs)?;
    let mut out = Vec::with_capacity(hs.len());
    for (((p, m), right), left) in plus.into_iter().zip(minus).zip(rights).zip(lefts) {
        let zero = quad_report(
            right.value + left.value,
            right.err + left.err,
            right.panels + left.panels,
            right.abs_sum + left.abs_sum,
        );
        let value = p.value + zero.value + m.value;
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::NonFinite { y: x });
        }
        let mut w = warnings.clone();
        for part in [&p, &m] {
            w.extend(part.diagnostics.warnings.iter().cloned());
        }
        w.dedup();
        out.push(PsiReport {
            t,
            x,
            b,
            value,
            abs_error_estimate: p.abs_error_estimate + zero.abs_error_estimate + m.abs_error_estimate,
            form,
            parts: PsiParts { plus: p, zero, minus: m },
            warnings: w,
        });
    }
    Ok(out)
}

fn evaluate(
    g: &dyn GreensDecomposition,
    fs: &[&InitialCondition],
    kernel: Kernel,
    t: f64,
    x: f64,
    b: f64,
    form: Psi1Form,
    cfg: &QuadratureConfig,
) -> Result<Vec<PsiReport>> {
    let beta = fs.iter().map(|f| f.beta).fold(0.0, f64::max);
    let growth = g.alpha() + beta + kernel.growth();
    if (g.n() as f64) <= growth + 1.0 {
        return Err(invalid(format!("n = {} is too small for growth order {growth}", g.n())));
    }
    let amp = kernel_amplitude(g, t, x, kernel);
    let hs: Vec<JetExpr> = fs.iter().map(|f| amp.clone().mul(f.expr().clone())).collect();
    split_many(g, &hs, growth, t, x, b, form, cfg)
}

/// `Ψ(t,x) = Ψ₁ + Ψ₀ + Ψ₋₁`.
pub fn psi(
    g: &dyn GreensDecomposition,
    f: &InitialCondition,
    t: f64,
    x: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<PsiReport> {
    psi_with_form(g, f, t, x, b, Psi1Form::Auto, cfg)
}

pub fn psi_with_form(
    g: &dyn GreensDecomposition,
    f: &InitialCondition,
    t: f64,
    x: f64,
    b: f64,
    form: Psi1Form,
    cfg: &QuadratureConfig,
) -> Result<PsiReport> {
    Ok(evaluate(g, &[f], Kernel::Psi, t, x, b, form, cfg)?.remove(0))
}

/// `Ψ` for several initial conditions on shared panel schedules.
pub fn psi_many(
    g: &dyn GreensDecomposition,
    fs: &[&InitialCondition],
    t: f64,
    x: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<Vec<PsiReport>> {
    evaluate(g, fs, Kernel::Psi, t, x, b, Psi1Form::Auto, cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiDerivatives {
    pub dt: Complex64,
    pub dt_error: f64,
    pub dxx: Complex64,
    pub dxx_error: f64,
}

/// `∂ₜΨ` and `∂ₓₓΨ` from the differentiated kernels
/// `G_t = e^{ia(y−x)²}[ia′(y−x)²G̃ + G̃_t]` and
/// `G_xx = e^{ia(y−x)²}[(2ia − 4a²(y−x)²)G̃ − 4ia(y−x)G̃_x + G̃_xx]`.
pub fn psi_derivatives(
    g: &dyn GreensDecomposition,
    f: &InitialCondition,
    t: f64,
    x: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<PsiDerivatives> {
    let dt = evaluate(g, &[f], Kernel::Dt, t, x, b, Psi1Form::Auto, cfg)?.remove(0);
    let dxx = evaluate(g, &[f], Kernel::Dxx, t, x, b, Psi1Form::Auto, cfg)?.remove(0);
    Ok(PsiDerivatives {
        dt: dt.value,
        dt_error: dt.abs_error_estimate,
        dxx: dxx.value,
        dxx_error: dxx.abs_error_estimate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PdeReport {
    pub t: f64,
    pub x: f64,
    pub psi: Complex64,
    pub psi_error: f64,
    pub derivatives: PsiDerivatives,
    /// `|i∂ₜΨ + ∂ₓₓΨ − VΨ|`.
    pub residual: f64,
}

pub fn pde_report(
    g: &dyn GreensDecomposition,
    f: &InitialCondition,
    t: f64,
    x: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<PdeReport> {
    let p = psi(g, f, t, x, b, cfg)?;
    let d = psi_derivatives(g, f, t, x, b, cfg)?;
    let residual = (I * d.dt + d.dxx - g.potential(t, x) * p.value).norm();
    Ok(PdeReport { t, x, psi: p.value, psi_error: p.abs_error_estimate, derivatives: d, residual })
}

pub fn pde_residual(
    g: &dyn GreensDecomposition,
    f: &InitialCondition,
    t: f64,
    x: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    Ok(pde_report(g, f, t, x, b, cfg)?.residual)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitialConditionRow {
    pub t: f64,
    pub psi: Option<Complex64>,
    pub distance: Option<f64>,
    pub error_estimate: Option<f64>,
    pub psi_plus_abs: Option<f64>,
    pub psi_minus_abs: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitialConditionReport {
    pub x: f64,
    pub target: Complex64,
    pub rows: Vec<InitialConditionRow>,
    /// `|Ψ − F(x)|` never grows along the ladder beyond the error estimates.
    pub decreasing: bool,
    /// `|Ψ₁|` and `|Ψ₋₁|` shrink along the ladder.
    pub outer_parts_vanishing: bool,
    pub final_distance: Option<f64>,
}

fn non_increasing(v: &[(f64, f64)]) -> bool {
    v.windows(2).all(|w| w[1].0 <= w[0].0 * (1.0 + 1e-9) + w[0].1 + w[1].1)
}

/// `|Ψ(t,x) − F(x)|` along a decreasing `t_ladder`; failures are recorded per rung.
pub fn initial_condition_check(
    g: &dyn GreensDecomposition,
    f: &InitialCondition,
    x: f64,
    t_ladder: &[f64],
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<InitialConditionReport> {
    if t_ladder.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(invalid("t ladder must be strictly decreasing"));
    }
    let target = f.function().value(x);
    let mut rows = Vec::new();
    for &t in t_ladder {
        let row = match psi(g, f, t, x, b, cfg) {
            Ok(p) => InitialConditionRow {
                t,
                psi: Some(p.value),
                distance: Some((p.value - target).norm()),
                error_estimate: Some(p.abs_error_estimate),
                psi_plus_abs: Some(p.parts.plus.value.norm()),
                psi_minus_abs: Some(p.parts.minus.value.norm()),
                failure: None,
            },
            Err(e) => InitialConditionRow {
                t,
                psi: None,
                distance: None,
                error_estimate: None,
                psi_plus_abs: None,
                psi_minus_abs: None,
                failure: Some(e.to_string()),
            },
        };
        rows.push(row);
    }
    let ok: Vec<&InitialConditionRow> = rows.iter().filter(|r| r.psi.is_some()).collect();
    let dist: Vec<(f64, f64)> = ok.iter().map(|r| (r.distance.unwrap(), r.error_estimate.unwrap())).collect();
    let plus: Vec<(f64, f64)> = ok.iter().map(|r| (r.psi_plus_abs.unwrap(), r.error_estimate.unwrap())).collect();
    let minus: Vec<(f64, f64)> = ok.iter().map(|r| (r.psi_minus_abs.unwrap(), r.error_estimate.unwrap())).collect();
    let all_ok = ok.len() == rows.len();
    let shrinking = |v: &[(f64, f64)]| non_increasing(v) && v.len() >= 2 && v[v.len() - 1].0 < v[0].0;
    Ok(InitialConditionReport {
        x,
        target,
        decreasing: all_ok && non_increasing(&dist),
        outer_parts_vanishing: all_ok && shrinking(&plus) && shrinking(&minus),
        final_distance: rows.last().and_then(|r| r.distance),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DependenceRow {
    pub m: usize,
    pub coefficient: f64,
    pub difference: f64,
    /// Sampled `‖F_m − F‖_{C^n(ℝ,r^β)}`.
    pub norm_difference: f64,
    /// `|c_m|·|Ψ(P)|`, the difference predicted by linearity.
    pub expected: f64,
    pub relative_deviation: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DependenceReport {
    pub base: Complex64,
    /// `C` fitted from the first two rungs: `difference ≤ C·norm_difference`.
    pub fitted_constant: f64,
    pub rows: Vec<DependenceRow>,
    pub pass: bool,
}

/// `F_m = F + c_m P`: checks `Ψ(F_m) → Ψ(F)` with differences proportional to
/// the norm of `F_m − F`, and equal to `|c_m|·|Ψ(P)|` within `linear_tol` relative.
#[allow(clippy::too_many_arguments)]
pub fn continuous_dependence_check(
    g: &dyn GreensDecomposition,
    f: &InitialCondition,
    perturbation: &JetExpr,
    coeffs: &[f64],
    t: f64,
    x: f64,
    b: f64,
    cfg: &QuadratureConfig,
    linear_tol: f64,
) -> Result<DependenceReport> {
    let p = InitialCondition::from_expr(perturbation.clone(), g)?;
    let beta = f.beta.max(p.beta);
    let mut ics = vec![f.clone(), p.clone()];
    for &c in coeffs {
        ics.push(InitialCondition::new(f.expr().clone().add(perturbation.clone().scale_re(c)), beta, g)?);
    }
    let refs: Vec<&InitialCondition> = ics.iter().collect();
    let values = psi_many(g, &refs, t, x, b, cfg)?;
    let (base, pv) = (&values[0], &values[1]);
    let grid = GridSpec::default().with_cutoff(1e2);
    let mut rows = Vec::new();
    for (i, (&c, v)) in coeffs.iter().zip(&values[2..]).enumerate() {
        let difference = (v.value - base.value).norm();
        let norm = norm_cn_r(&JetFunction::new(perturbation.clone().scale_re(c), g.n()), g.n(), beta, &grid)?;
        let expected = c.abs() * pv.value.norm();
        let relative_deviation =
            if expected > 0.0 { (difference - expected).abs() / expected } else { difference };
        rows.push(DependenceRow {
            m: i + 1,
            coefficient: c,
            difference,
            norm_difference: norm.norm_estimate,
            expected,
            relative_deviation,
            pass: relative_deviation <= linear_tol,
        });
    }
    let ratio = |r: &DependenceRow| if r.norm_difference > 0.0 { r.difference / r.norm_difference } else { 0.0 };
    let fitted_constant = rows.iter().take(2).map(ratio).fold(0.0, f64::max);
    for r in rows.iter_mut().skip(2) {
        let slack = (base.abs_error_estimate + pv.abs_error_estimate * r.coefficient.abs()) / r.norm_difference.max(f64::MIN_POSITIVE);
        r.pass &= ratio(r) <= fitted_constant * (1.0 + 1e-9) + slack;
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(DependenceReport { base: base.value, fitted_constant, rows, pass })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub n_exceeds_alpha_plus_3: bool,
    pub a_positive: bool,
    /// `a(2^{-j})` increases along `j`.
    pub a_grows_near_zero: bool,
    /// Largest relative gap between `e^{ia(y−x)²}G̃` and `e^{iay²}Ĝ`.
    pub ghat_identity_max_rel: f64,
    pub pass: bool,
}

/// Testable consequences of the structural assumptions on `G`.
pub fn validate_decomposition(g: &dyn GreensDecomposition) -> DecompositionReport {
    let n_ok = (g.n() as f64) > g.alpha() + 3.0;
    let ts: Vec<f64> = (1..=30).map(|j| 0.5f64.powi(j)).filter(|t| *t < g.horizon()).collect();
    let avals: Vec<f64> = ts.iter().map(|&t| g.a(t)).collect();
    let a_positive = avals.iter().all(|a| *a > 0.0 && a.is_finite());
    let a_grows = avals.windows(2).all(|w| w[1] > w[0]);
    let mut worst = 0.0f64;
    for &t in &[0.2, 0.5, 1.0] {
        if t >= g.horizon() {
            continue;
        }
        let a = g.a(t);
        for &x in &[-1.0, 0.0, 1.0] {
            let gt = g.gtilde(t, x);
            for k in -10..=10 {
                let y = 0.5 * f64::from(k);
                let gv = gt.value(y);
                let lhs = cis_quadratic(a, y - x) * gv;
                // Ĝ = e^{ia(x²−2xy)} G̃, the phase −2axy reduced separately
                let cross = (-2.0 * a * x * y).rem_euclid(std::f64::consts::TAU);
                let ghat = Complex64::from_polar(1.0, phase_mod_tau(a, x) + cross) * gv;
                let rhs = cis_quadratic(a, y) * ghat;
                let scale = lhs.norm().max(rhs.norm());
                if scale > 0.0 {
                    worst = worst.max((lhs - rhs).norm() / scale);
                }
            }
        }
    }
    DecompositionReport {
        n_exceeds_alpha_plus_3: n_ok,
        a_positive,
        a_grows_near_zero: a_grows,
        ghat_identity_max_rel: worst,
        pass: n_ok && a_positive && a_grows && worst <= 1e-12,
    }
}
