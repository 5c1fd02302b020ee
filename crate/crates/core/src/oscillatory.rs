//! Evaluation of `𝓘_{a,b}(f) = lim_{ε→0⁺} ∫_b^∞ e^{-ε(y-y₀)²} e^{iay²} f(y) dy`.
//!
//! Three independent routes: the regularized integral extrapolated along an
//! ε ladder ([`oracle_limit`]), the integration-by-parts representation with
//! absolutely convergent remainders ([`representation_value`]), and truncated
//! Riemann integrals ([`riemann_limit`]).

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coefficients::{cached_table, CoefficientTable};
use crate::error::{invalid, Error, Result};
use crate::jets::{JetExpr, JetFunction};
use crate::quadrature::{self, accel, cis_quadratic, gauss_legendre};
use crate::spaces::{norm_cn_alpha, GridSpec};

pub use crate::quadrature::{EpsLadder, QuadratureConfig};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const EPS: f64 = f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralSpec {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub alpha: f64,
    #[serde(default)]
    pub y0: f64,
}

impl IntegralSpec {
    pub fn new(a: f64, b: f64, n: usize, alpha: f64) -> Result<Self> {
        let s = Self { a, b, n, alpha, y0: 0.0 };
        s.validate()?;
        Ok(s)
    }

    pub fn with_y0(mut self, y0: f64) -> Self {
        self.y0 = y0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.a == 0.0 || !self.a.is_finite() {
            return Err(invalid("a must be nonzero"));
        }
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(invalid("b must be positive"));
        }
        if self.n < 1 {
            return Err(invalid("n must be at least 1"));
        }
        if !(self.alpha >= 0.0) {
            return Err(invalid("alpha must be nonnegative"));
        }
        if (self.n as f64) <= self.alpha + 1.0 {
            return Err(invalid(format!("n = {} must exceed alpha + 1 = {}", self.n, self.alpha + 1.0)));
        }
        if !self.y0.is_finite() {
            return Err(invalid("y0 must be finite"));
        }
        Ok(())
    }

    fn warnings(&self) -> Vec<String> {
        if self.a.abs() < 1e-8 {
            vec![format!("|a| = {:e} is tiny; panels are very wide", self.a.abs())]
        } else {
            Vec::new()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Oracle,
    Representation,
    Riemann,
    /// A single regularized integral at fixed ε.
    Regularized,
    /// A proper integral over a bounded interval.
    Quadrature,
    /// Three-way split of a Green's function integral.
    GreensSplit,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Oracle => "oracle",
            Method::Representation => "representation",
            Method::Riemann => "riemann",
            Method::Regularized => "regularized",
            Method::Quadrature => "quadrature",
            Method::GreensSplit => "greens_split",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub panels: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub eps_ladder: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rung_values: Vec<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extrapolation_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub raw_last_rung: Option<Complex64>,
    pub boundary_magnitude: f64,
    pub tail_magnitude: f64,
    pub budget_exceeded: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

fn check_growth(f: &JetFunction) -> Result<f64> {
    let g = f.expr().growth_right();
    if !g.is_finite() {
        return Err(invalid(format!("{} is not polynomially bounded on [b, ∞)", f.descriptor())));
    }
    Ok(g)
}

/// `(ia)^p` for integer `p`, exact up to the real power.
fn ia_pow(a: f64, p: i32) -> Complex64 {
    let ip = match p.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => I,
        2 => Complex64::new(-1.0, 0.0),
        _ => -I,
    };
    ip * a.powi(p)
}

/// `∫_b^∞ e^{-ε(y-y₀)²} e^{iay²} h(y) dy` for an arbitrary amplitude of growth `beta`.
pub(crate) fn regularized_amplitude(
    spec: &IntegralSpec,
    eps: f64,
    beta: f64,
    cfg: &QuadratureConfig,
    h: impl Fn(f64) -> Complex64,
) -> Result<quadrature::QuadResult> {
    quadrature::gaussian_damped_integral(spec.a, spec.b, eps, spec.y0, beta, cfg, h)
}

/// One regularized integral at fixed `eps > 0`.
pub fn regularized_integral(f: &JetFunction, spec: &IntegralSpec, eps: f64, cfg: &QuadratureConfig) -> Result<EvalReport> {
    spec.validate()?;
    cfg.validate()?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid("eps must be positive"));
    }
    let beta = check_growth(f)?;
    let expr = f.expr();
    let q = regularized_amplitude(spec, eps, beta, cfg, |y| expr.value(y))?;
    Ok(EvalReport {
        value: q.value,
        abs_error_estimate: q.err,
        method: Method::Regularized,
        diagnostics: Diagnostics {
            panels: q.panels,
            eps_ladder: vec![eps],
            tail_magnitude: q.abs_sum,
            warnings: spec.warnings(),
            ..Default::default()
        },
    })
}

/// Regularized integrals along the ε ladder, Richardson-extrapolated to ε = 0.
pub fn oracle_limit(f: &JetFunction, spec: &IntegralSpec, cfg: &QuadratureConfig) -> Result<EvalReport> {
    spec.validate()?;
    cfg.validate()?;
    let ladder = cfg.eps_ladder.values();
    let ratio = cfg.eps_ladder.ratio;
    let mut values = Vec::new();
    let mut errs = Vec::new();
    let mut panels = 0;
    let mut abs_max = 0.0f64;
    let mut best: Option<(accel::RichardsonEstimate, f64)> = None;
    let mut stale = 0;
    let mut budget_note = None;
    for (j, &eps) in ladder.iter().enumerate() {
        let r = match regularized_integral(f, spec, eps, cfg) {
            Ok(r) => r,
            Err(Error::BudgetExceeded { panels: p, .. }) if best.is_some() && j >= 4 => {
                budget_note = Some(format!("ladder stopped at eps = {eps:.3e}: panel budget ({p}) exceeded"));
                break;
            }
            Err(e) => return Err(e),
        };
        values.push(r.value);
        errs.push(r.abs_error_estimate);
        panels += r.diagnostics.panels;
        abs_max = abs_max.max(r.diagnostics.tail_magnitude);
        if j < 3 {
            continue;
        }
        if let Some(est) = accel::best_richardson(&values, ratio, 4) {
            // rung errors pass through the Neville weights; 8 bounds their sum for orders ≤ 4
            let quad: f64 = errs.iter().rev().take(est.order + 2).fold(0.0f64, |m, e| m.max(*e)) * 8.0;
            let err = est.residual + quad + 16.0 * EPS * est.value.norm();
            match &best {
                Some((_, e)) if err >= *e => stale += 1,
                _ => {
                    best = Some((est, err));
                    stale = 0;
                }
            }
            let cur = best.as_ref().map_or(f64::INFINITY, |b| b.1);
            if j >= 4 && cur <= cfg.abs_tol.max(cfg.rel_tol * est.value.norm()) {
                break;
            }
            if j >= 6 && stale >= 2 {
                break;
            }
        }
    }
    let (est, err) = best.ok_or_else(|| Error::NonConvergence("eps ladder too short".into()))?;
    let mut warnings = spec.warnings();
    warnings.push("extrapolation assumes an expansion in integer powers of eps".into());
    warnings.extend(budget_note);
    let tol = cfg.abs_tol.max(cfg.rel_tol * est.value.norm());
    if err > tol {
        let diffs: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
        let k = diffs.len();
        let settling = k >= 3 && diffs[k - 1] < diffs[k - 3];
        if !settling {
            return Err(Error::NonConvergence(format!(
                "regularized values do not settle along the eps ladder (last step {:.3e}); f is likely outside the admissible class",
                diffs[k - 1]
            )));
        }
        warnings.push(format!("ladder exhausted above tolerance ({err:.3e} > {tol:.3e})"));
    }
    let used = values.len();
    Ok(EvalReport {
        value: est.value,
        abs_error_estimate: err,
        method: Method::Oracle,
        diagnostics: Diagnostics {
            panels,
            eps_ladder: ladder[..used].to_vec(),
            raw_last_rung: values.last().copied(),
            rung_values: values,
            extrapolation_order: Some(est.order),
            tail_magnitude: abs_max,
            warnings,
            ..Default::default()
        },
    })
}

/// Result of the single integration-by-parts identity at fixed ε.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IbpReport {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    /// Sum of magnitudes of all terms; the residual is judged relative to it.
    pub scale: f64,
    /// Quadrature error estimates of the three integrals.
    pub quadrature_error: f64,
}

/// Both sides of
/// `I(f/y_ε^κ) = −1/(2(ia−ε))·[e^{iab²−ε(b−y₀)²} f(b)/b_ε^{κ+1} − (κ+1) I(f/y_ε^{κ+2}) + I(f′/y_ε^{κ+1})]`
/// with `y_ε = y + εy₀/(ia−ε)`.
pub fn ibp_identity_check(
    f: &JetFunction,
    spec: &IntegralSpec,
    eps: f64,
    kappa: i32,
    cfg: &QuadratureConfig,
) -> Result<IbpReport> {
    spec.validate()?;
    if !(eps > 0.0) {
        return Err(invalid("eps must be positive"));
    }
    if f.max_order() < 1 {
        return Err(invalid("the identity needs first derivatives"));
    }
    let beta = check_growth(f)? + f64::from((-kappa).max(0));
    let iae = Complex64::new(-eps, spec.a);
    let shift = eps * spec.y0 / iae;
    let y_eps = |y: f64| shift + y;
    let expr = f.expr();
    let lhs = regularized_amplitude(spec, eps, beta, cfg, |y| expr.value(y) / y_eps(y).powi(kappa))?;
    let i2 = regularized_amplitude(spec, eps, beta, cfg, |y| expr.value(y) / y_eps(y).powi(kappa + 2))?;
    let i3 = regularized_amplitude(spec, eps, beta, cfg, |y| {
        expr.jet(y, 1).derivative(1) / y_eps(y).powi(kappa + 1)
    })?;
    let b = spec.b;
    let boundary = cis_quadratic(spec.a, b) * (-eps * (b - spec.y0).powi(2)).exp() * f.value(b)
        / y_eps(b).powi(kappa + 1);
    let pref = -0.5 / iae;
    let k1 = f64::from(kappa + 1);
    let rhs = pref * (boundary - i2.value * k1 + i3.value);
    let scale = lhs.value.norm() + pref.norm() * (boundary.norm() + k1.abs() * i2.value.norm() + i3.value.norm());
    let quadrature_error = lhs.err + pref.norm() * (k1.abs() * i2.err + i3.err);
    Ok(IbpReport { lhs: lhs.value, rhs, residual: (lhs.value - rhs).norm(), scale, quadrature_error })
}

/// Value of the iterated formula with `m+1` integration steps at fixed ε,
/// every remainder integral computed by direct quadrature.
pub fn iterated_formula_value(
    f: &JetFunction,
    spec: &IntegralSpec,
    eps: f64,
    m: usize,
    cfg: &QuadratureConfig,
) -> Result<EvalReport> {
    spec.validate()?;
    if !(eps > 0.0) {
        return Err(invalid("eps must be positive"));
    }
    let n = spec.n;
    if f.max_order() < n {
        return Err(Error::OrderTooHigh { requested: n, max: f.max_order() });
    }
    let beta = check_growth(f)?;
    let t = cached_table(n, m)?;
    let iae = Complex64::new(-eps, spec.a);
    let shift = eps * spec.y0 / iae;
    let b = spec.b;
    let b_eps = shift + b;
    let jb = f.eval(b)?;
    let eb = cis_quadratic(spec.a, b) * (-eps * (b - spec.y0).powi(2)).exp();
    let mut boundary = Complex64::new(0.0, 0.0);
    let mut boundary_mag = 0.0;
    for k in 0..n {
        for l in 0..=m {
            let term = eb * jb.derivative(k) * t.get(k, l)
                / (iae.powi((k + 1 + l) as i32) * b_eps.powi((k + 1 + 2 * l) as i32));
            boundary += term;
            boundary_mag += term.norm();
        }
    }
    let c_top: Vec<Complex64> = (0..=m).map(|l| t.get(n - 1, l) / iae.powi((n + l) as i32)).collect();
    let c_low: Vec<Complex64> =
        (0..n).map(|k| (k + 1 + 2 * m) as f64 * t.get(k, m) / iae.powi((k + 1 + m) as i32)).collect();
    let expr = f.expr();
    let q = regularized_amplitude(spec, eps, beta, cfg, |y| {
        let j = expr.jet(y, n);
        let ye = shift + y;
        let mut s = Complex64::new(0.0, 0.0);
        let fnv = j.derivative(n);
        for (l, c) in c_top.iter().enumerate() {
            s += c * fnv / ye.powi((n + 2 * l) as i32);
        }
        for (k, c) in c_low.iter().enumerate() {
            s -= c * j.derivative(k) / ye.powi((k + 2 + 2 * m) as i32);
        }
        s
    })?;
    Ok(EvalReport {
        value: boundary + q.value,
        abs_error_estimate: q.err + 16.0 * EPS * boundary_mag,
        method: Method::Regularized,
        diagnostics: Diagnostics {
            panels: q.panels,
            eps_ladder: vec![eps],
            boundary_magnitude: boundary_mag,
            tail_magnitude: q.abs_sum,
            ..Default::default()
        },
    })
}

/// The ε = 0 representation with `m = n − 1`: a double boundary sum plus
/// absolutely convergent remainder integrals.
pub fn representation_value(f: &JetFunction, spec: &IntegralSpec, cfg: &QuadratureConfig) -> Result<EvalReport> {
    Ok(representation_values(std::slice::from_ref(f), spec, cfg)?.remove(0))
}

/// [`representation_value`] for several functions on one shared panel schedule.
pub fn representation_values(fs: &[JetFunction], spec: &IntegralSpec, cfg: &QuadratureConfig) -> Result<Vec<EvalReport>> {
    spec.validate()?;
    cfg.validate()?;
    let n = spec.n;
    for f in fs {
        if f.max_order() < n {
            return Err(Error::OrderTooHigh { requested: n, max: f.max_order() });
        }
    }
    let t: std::sync::Arc<CoefficientTable> = cached_table(n - 1, n - 1)?;
    let (a, b) = (spec.a, spec.b);
    let eb = cis_quadratic(a, b);
    let mut boundaries = Vec::with_capacity(fs.len());
    for f in fs {
        let jb = f.eval_order(b, n - 1)?;
        let mut boundary = Complex64::new(0.0, 0.0);
        let mut mag = 0.0;
        for k in 0..n {
            let fk = eb * jb.derivative(k);
            for l in 0..n {
                let term = fk * t.get(k, l) / (ia_pow(a, (k + 1 + l) as i32) * b.powi((k + 1 + 2 * l) as i32));
                boundary += term;
                mag += term.norm();
            }
        }
        boundaries.push((boundary, mag));
    }
    let c_top: Vec<Complex64> = (0..n).map(|l| t.get(n - 1, l) / ia_pow(a, (n + l) as i32)).collect();
    let c_low: Vec<Complex64> =
        (0..n).map(|k| (k + 2 * n - 1) as f64 * t.get(k, n - 1) / ia_pow(a, (k + n) as i32)).collect();
    let amp = |expr: &JetExpr, y: f64| {
        let j = expr.jet(y, n);
        let inv = 1.0 / y;
        let inv2 = inv * inv;
        let fnv = j.derivative(n);
        let mut s = Complex64::new(0.0, 0.0);
        let mut p = inv.powi(n as i32);
        for c in &c_top {
            s += c * fnv * p;
            p *= inv2;
        }
        let mut p = inv.powi(2 * n as i32);
        for (k, c) in c_low.iter().enumerate() {
            s -= c * j.derivative(k) * p;
            p *= inv;
        }
        s
    };
    let closures: Vec<Box<dyn Fn(f64) -> Complex64 + '_>> =
        fs.iter().map(|f| Box::new(move |y: f64| amp(f.expr(), y)) as Box<dyn Fn(f64) -> Complex64>).collect();
    let refs: Vec<&dyn Fn(f64) -> Complex64> = closures.iter().map(|c| c.as_ref()).collect();
    let tails = quadrature::alternating_tail_batch(a, b, cfg, &refs)?;
    Ok(tails
        .into_iter()
        .zip(boundaries)
        .map(|(tail, (boundary, boundary_mag))| {
            let mut warnings = spec.warnings();
            if tail.budget_exceeded {
                warnings.push("remainder integrals hit the panel budget".into());
            }
            EvalReport {
                value: boundary + tail.value,
                abs_error_estimate: tail.err + 16.0 * EPS * boundary_mag,
                method: Method::Representation,
                diagnostics: Diagnostics {
                    panels: tail.panels,
                    boundary_magnitude: boundary_mag,
                    tail_magnitude: tail.abs_sum,
                    budget_exceeded: tail.budget_exceeded,
                    warnings,
                    ..Default::default()
                },
            }
        })
        .collect())
}

/// `D_{a,b,n,α}` with `|ia−ε| ≤ |a|+1`, valid for every `0 < ε ≤ 1`.
pub fn bound_constant(spec: &IntegralSpec) -> Result<f64> {
    spec.validate()?;
    let n = spec.n;
    let t = cached_table(n - 1, n - 1)?;
    let (aa, b, al) = (spec.a.abs(), spec.b, spec.alpha);
    let a1 = aa + 1.0;
    let nf = n as f64;
    let gap = nf - al - 1.0;
    let mut d = 0.0;
    for k in 0..n {
        for l in 0..n {
            let (kf, lf) = (k as f64, l as f64);
            d += t.get(k, l).abs() * a1.powi(l as i32)
                / (aa.powi((k + 1 + 2 * l) as i32) * b.powf(2.0 * kf + 2.0 * lf - nf - al + 1.0));
        }
    }
    for l in 0..n {
        let lf = l as f64;
        d += t.get(n - 1, l).abs() * a1.powi(l as i32)
            / (gap * aa.powi((n + 2 * l) as i32) * b.powf(2.0 * lf + nf - al - 1.0));
    }
    for k in 0..n {
        let kf = k as f64;
        d += (kf + 2.0 * nf - 1.0) * t.get(k, n - 1).abs() * a1.powi(n as i32)
            / (gap * aa.powi((k + 2 * n) as i32) * b.powf(2.0 * kf + nf - al - 1.0));
    }
    Ok(d)
}

/// `D_{a,b,n,α}·‖f‖` for a norm witness computed at the `IntegralSpec`'s `(b, n, α)`.
pub fn theorem_bound(witness: &crate::spaces::CnAlphaWitness, spec: &IntegralSpec) -> Result<f64> {
    if witness.b != spec.b || witness.n != spec.n || witness.alpha != spec.alpha {
        return Err(invalid("witness was computed for a different (b, n, alpha)"));
    }
    Ok(bound_constant(spec)? * witness.norm_estimate)
}

/// Truncated integrals `∫_b^R e^{iay²} f dy` on the ladder of half-period
/// radii `R_j = √(b² + jπ/|a|)`, extrapolated in `j`.
pub fn riemann_limit(f: &JetFunction, spec: &IntegralSpec, cfg: &QuadratureConfig) -> Result<EvalReport> {
    spec.validate()?;
    cfg.validate()?;
    check_growth(f)?;
    let expr = f.expr();
    let r = quadrature::riemann_ladder(spec.a, spec.b, cfg, |y| expr.value(y))?;
    let mut warnings = spec.warnings();
    warnings.push(format!(
        "extrapolated from R = {:.4} .. {:.4}",
        r.radii.first().copied().unwrap_or(spec.b),
        r.radii.last().copied().unwrap_or(spec.b)
    ));
    Ok(EvalReport {
        value: r.quad.value,
        abs_error_estimate: r.quad.err,
        method: Method::Riemann,
        diagnostics: Diagnostics {
            panels: r.quad.panels,
            tail_magnitude: r.quad.abs_sum,
            budget_exceeded: r.quad.budget_exceeded,
            warnings,
            ..Default::default()
        },
    })
}

/// `s ↦ (a(s), b(s), f(s,·))` together with the s-derivatives.
pub struct ParametricFamily {
    pub a: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub a_prime: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub b: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub b_prime: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub f: Box<dyn Fn(f64) -> JetExpr + Send + Sync>,
    pub df_ds: Box<dyn Fn(f64) -> JetExpr + Send + Sync>,
    pub n: usize,
    pub alpha: f64,
}

impl ParametricFamily {
    fn check(&self) -> Result<()> {
        if (self.n as f64) <= self.alpha + 3.0 {
            return Err(invalid(format!("parametric derivative needs n > alpha + 3 (n = {}, alpha = {})", self.n, self.alpha)));
        }
        Ok(())
    }

    /// `ψ(s) = 𝓘_{a(s),b(s)}(f(s,·))`.
    pub fn psi(&self, s: f64, cfg: &QuadratureConfig) -> Result<EvalReport> {
        self.check()?;
        let spec = IntegralSpec::new((self.a)(s), (self.b)(s), self.n, self.alpha)?;
        representation_value(&JetFunction::new((self.f)(s), self.n), &spec, cfg)
    }
}

/// `ψ′(s) = −b′ e^{iab²} f(s,b) + 𝓘_{a,b}(ia′y²f + ∂f/∂s)`.
pub fn parametric_derivative(family: &ParametricFamily, s: f64, cfg: &QuadratureConfig) -> Result<EvalReport> {
    family.check()?;
    let (a, b) = ((family.a)(s), (family.b)(s));
    let ap = (family.a_prime)(s);
    let bp = (family.b_prime)(s);
    let f = (family.f)(s);
    let g = JetExpr::Monomial(2).mul(f.clone()).scale(I * ap).add((family.df_ds)(s));
    // y²f lies in the space with growth order alpha + 2
    let spec = IntegralSpec::new(a, b, family.n, family.alpha + 2.0)?;
    let mut r = representation_value(&JetFunction::new(g, family.n), &spec, cfg)?;
    let edge = -bp * cis_quadratic(a, b) * f.value(b);
    r.value += edge;
    r.abs_error_estimate += 16.0 * EPS * edge.norm();
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityRow {
    pub m: usize,
    pub difference: f64,
    pub norm_of_difference: f64,
    pub bound: f64,
    /// Exact value of the difference when it is known by linearity.
    pub expected: Option<f64>,
    pub relative_deviation: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityReport {
    pub base: Complex64,
    pub rows: Vec<ContinuityRow>,
    pub converging: bool,
    pub pass: bool,
}

/// Checks `|𝓘(f_m) − 𝓘(f)| ≤ D·‖f − f_m‖` for perturbations `f_m = f + c_m·g`,
/// and that the differences equal `|c_m|·|𝓘(g)|` to `linear_tol` relative.
pub fn continuity_check(
    f: &JetExpr,
    g: &JetExpr,
    coeffs: &[f64],
    spec: &IntegralSpec,
    cfg: &QuadratureConfig,
    linear_tol: f64,
) -> Result<ContinuityReport> {
    spec.validate()?;
    let n = spec.n;
    let mut fs = vec![JetFunction::new(f.clone(), n), JetFunction::new(g.clone(), n)];
    fs.extend(coeffs.iter().map(|&c| JetFunction::new(f.clone().add(g.clone().scale_re(c)), n)));
    let values = representation_values(&fs, spec, cfg)?;
    let (base, gi) = (&values[0], &values[1]);
    let d = bound_constant(spec)?;
    let mut rows = Vec::new();
    for (idx, (&c, rm)) in coeffs.iter().zip(&values[2..]).enumerate() {
        let difference = (rm.value - base.value).norm();
        let w = norm_cn_alpha(&JetFunction::new(g.clone().scale_re(c), n), spec.b, n, spec.alpha, &GridSpec::default())?;
        let bound = d * w.norm_estimate;
        let expected = c.abs() * gi.value.norm();
        let rel = if expected > 0.0 { (difference - expected).abs() / expected } else { difference };
        let pass = difference <= bound + rm.abs_error_estimate + base.abs_error_estimate && rel <= linear_tol;
        rows.push(ContinuityRow {
            m: idx + 1,
            difference,
            norm_of_difference: w.norm_estimate,
            bound,
            expected: Some(expected),
            relative_deviation: Some(rel),
            pass,
        });
    }
    let converging = rows.windows(2).all(|w| w[1].difference <= w[0].difference * (1.0 + 1e-12))
        && coeffs.last().map_or(true, |c| c.abs() < coeffs[0].abs());
    let pass = converging && rows.iter().all(|r| r.pass);
    Ok(ContinuityReport { base: base.value, rows, converging, pass })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolomorphyReport {
    pub contour_integral: Complex64,
    pub residual: f64,
    pub perimeter: f64,
    pub max_abs: f64,
    /// `residual / (perimeter · max|ψ|)`.
    pub relative: f64,
}

/// `∮ ψ(z) dz` around a triangle, `ψ(z) = 𝓘_{a,b}(f(z,·))`, by Gauss–Legendre on each edge.
pub fn holomorphy_check(
    family: &dyn Fn(Complex64) -> JetExpr,
    vertices: [Complex64; 3],
    spec: &IntegralSpec,
    cfg: &QuadratureConfig,
) -> Result<HolomorphyReport> {
    spec.validate()?;
    let rule = gauss_legendre(20);
    let mut total = Complex64::new(0.0, 0.0);
    let mut perimeter = 0.0;
    let mut max_abs = 0.0f64;
    for e in 0..3 {
        let (z0, z1) = (vertices[e], vertices[(e + 1) % 3]);
        let half = (z1 - z0) * 0.5;
        perimeter += (z1 - z0).norm();
        for (x, w) in rule.0.iter().zip(&rule.1) {
            let z = z0 + half * (x + 1.0);
            let psi = representation_value(&JetFunction::new(family(z), spec.n), spec, cfg)?.value;
            max_abs = max_abs.max(psi.norm());
            total += psi * half * *w;
        }
    }
    let residual = total.norm();
    let denom = perimeter * max_abs;
    Ok(HolomorphyReport {
        contour_integral: total,
        residual,
        perimeter,
        max_abs,
        relative: if denom > 0.0 { residual / denom } else { residual },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_rejections() {
        assert_eq!(IntegralSpec::new(0.0, 1.0, 3, 0.0), Err(invalid("a must be nonzero")));
        assert!(IntegralSpec::new(1.0, 0.0, 3, 0.0).is_err());
        assert!(IntegralSpec::new(1.0, 1.0, 2, 1.0).is_err());
        assert!(IntegralSpec::new(1.0, 1.0, 3, 1.5).is_ok());
    }

    #[test]
    fn imaginary_powers() {
        for p in -5..6 {
            let direct = Complex64::new(0.0, -1.7).powi(p);
            assert!((ia_pow(-1.7, p) - direct).norm() < 1e-14 * direct.norm());
        }
    }

    #[test]
    fn zero_function_everywhere_zero() {
        let cfg = QuadratureConfig::default();
        let f = JetFunction::new(JetExpr::Zero, 3);
        let spec = IntegralSpec::new(1.0, 1.0, 3, 0.0).unwrap();
        assert_eq!(regularized_integral(&f, &spec, 0.5, &cfg).unwrap().value, Complex64::new(0.0, 0.0));
        assert_eq!(representation_value(&f, &spec, &cfg).unwrap().value, Complex64::new(0.0, 0.0));
        assert_eq!(oracle_limit(&f, &spec, &cfg).unwrap().value, Complex64::new(0.0, 0.0));
        assert_eq!(riemann_limit(&f, &spec, &cfg).unwrap().value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn riemann_rejects_linear_growth() {
        let cfg = QuadratureConfig::default();
        let f = JetFunction::new(JetExpr::Monomial(1), 3);
        let spec = IntegralSpec::new(1.0, 1.0, 3, 1.0 - 1e-9).unwrap();
        assert!(matches!(riemann_limit(&f, &spec, &cfg), Err(Error::NonConvergence(_))));
    }

    #[test]
    fn bound_asymptotics() {
        let spec = IntegralSpec::new(1e6, 1.3, 3, 0.5).unwrap();
        let d = bound_constant(&spec).unwrap();
        let limit = 1.3f64.powf(3.0 + 0.5 - 1.0) / 2.0;
        assert!((1e6 * d / limit - 1.0).abs() < 0.01);
    }
}
