//! Sampled weighted norms and executable versions of the elementary
//! inequalities between them.
//!
//! `‖f‖_{C^n_α([b,∞))} = Σ_{k<n} |f⁽ᵏ⁾(b)|/b^{n-k+α} + sup_{y≥b} |f⁽ⁿ⁾(y)|/y^α`
//! and `‖f‖_{C^n(ℝ,r^α)} = max_{k≤n} sup_y |f⁽ᵏ⁾(y)|/(1+|y|)^α`.
//! Sups are taken over nested logarithmic grids, so they are lower bounds.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::jets::{JetExpr, JetFunction};

/// Log-spaced sample grid `y_j = b·e^{jh}`, `h = ln(1+δ)/2^refinements`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub delta: f64,
    /// Largest sample point; `max(10³, 10·b)` when unset.
    pub cutoff: Option<f64>,
    pub refinements: u32,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { delta: 1e-2, cutoff: None, refinements: 0 }
    }
}

impl GridSpec {
    pub fn with_cutoff(mut self, cutoff: f64) -> Self {
        self.cutoff = Some(cutoff);
        self
    }

    /// Halves the log spacing; every old point stays on the grid.
    pub fn refined(&self) -> Self {
        Self { refinements: self.refinements + 1, ..*self }
    }

    fn step(&self) -> f64 {
        self.delta.ln_1p() / f64::from(1u32 << self.refinements.min(20))
    }

    pub fn cutoff_for(&self, b: f64) -> f64 {
        self.cutoff.unwrap_or_else(|| 1e3f64.max(10.0 * b))
    }

    /// Points of `[b, cutoff]`.
    pub fn half_line(&self, b: f64) -> Vec<f64> {
        let h = self.step();
        let top = self.cutoff_for(b);
        let mut out = Vec::new();
        let mut j = 0u32;
        loop {
            let y = b * (f64::from(j) * h).exp();
            if y > top * (1.0 + 1e-12) {
                break;
            }
            out.push(y);
            j += 1;
        }
        out
    }

    /// Symmetric points `0, ±(e^{jh} − 1)` up to the cutoff.
    pub fn whole_line(&self) -> Vec<f64> {
        let h = self.step();
        let top = self.cutoff.unwrap_or(1e3);
        let mut out = vec![0.0];
        let mut j = 1u32;
        loop {
            let s = (f64::from(j) * h).exp_m1();
            if s > top * (1.0 + 1e-12) {
                break;
            }
            out.push(s);
            out.push(-s);
            j += 1;
        }
        out
    }

    fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(invalid("grid delta must be positive"));
        }
        if let Some(c) = self.cutoff {
            if !(c > 0.0 && c.is_finite()) {
                return Err(invalid("grid cutoff must be positive"));
            }
        }
        Ok(())
    }
}

/// Upper bound for the polynomial growth order of `f⁽ᵏ⁾`, on `y ≥ 0` when `right`.
pub fn derivative_growth(expr: &JetExpr, k: usize, right: bool) -> f64 {
    let growth = |e: &JetExpr| if right { e.growth_right() } else { e.growth() };
    match expr {
        JetExpr::Poly(c) => {
            let d = c.iter().rposition(|v| *v != Complex64::new(0.0, 0.0)).unwrap_or(0);
            d.saturating_sub(k) as f64
        }
        JetExpr::Monomial(m) => (*m as usize).saturating_sub(k) as f64,
        JetExpr::Power(p) => {
            if right {
                (p - k as f64).max(0.0)
            } else {
                f64::INFINITY
            }
        }
        JetExpr::Affine { scale, inner, .. } => {
            if right && *scale <= 0.0 {
                derivative_growth(inner, k, false)
            } else {
                derivative_growth(inner, k, right)
            }
        }
        JetExpr::Sum(a, b) => derivative_growth(a, k, right).max(derivative_growth(b, k, right)),
        JetExpr::Product(a, b) => (0..=k)
            .map(|l| derivative_growth(a, l, right) + derivative_growth(b, k - l, right))
            .fold(f64::NEG_INFINITY, f64::max),
        JetExpr::Scale(_, a) | JetExpr::Conj(a) => derivative_growth(a, k, right),
        _ => growth(expr),
    }
}

/// `k`-th through `(k+order)`-th derivatives of `f` at `y`.
fn shifted_derivatives(f: &JetFunction, offset: usize, order: usize, y: f64) -> Result<Vec<Complex64>> {
    let j = f.eval_order(y, offset + order)?;
    Ok((offset..=offset + order).map(|k| j.derivative(k)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CnAlphaWitness {
    pub b: f64,
    pub n: usize,
    pub alpha: f64,
    pub norm_estimate: f64,
    /// `Σ_{k<n} |f⁽ᵏ⁾(b)|/b^{n-k+α}`, evaluated exactly.
    pub boundary_part: f64,
    /// Largest sampled `|f⁽ⁿ⁾(y)|/y^α`.
    pub sup_part: f64,
    pub argmax: f64,
    pub cutoff: f64,
    #[serde(skip)]
    pub grid: Vec<f64>,
    /// The sup over the last decade of the grid does not exceed the sup below it.
    pub plateau: bool,
    /// Set when the growth of `f⁽ⁿ⁾` is not known to be at most `y^α`.
    pub heuristic: bool,
}

fn cn_alpha_core(f: &JetFunction, offset: usize, b: f64, n: usize, alpha: f64, points: &[f64]) -> Result<CnAlphaWitness> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(invalid("b must be positive"));
    }
    if !(alpha >= 0.0) {
        return Err(invalid("alpha must be nonnegative"));
    }
    if f.max_order() < n + offset {
        return Err(Error::OrderTooHigh { requested: n + offset, max: f.max_order() });
    }
    let at_b = shifted_derivatives(f, offset, n, b)?;
    let mut boundary_part = 0.0;
    for (k, d) in at_b.iter().take(n).enumerate() {
        boundary_part += d.norm() / b.powf((n - k) as f64 + alpha);
    }
    let mut sup_part = at_b[n].norm() / b.powf(alpha);
    let mut argmax = b;
    let grid: Vec<f64> = points.iter().copied().filter(|y| *y >= b).collect();
    let cutoff = grid.iter().copied().fold(b, f64::max);
    let mut sup_low = sup_part;
    for &y in &grid {
        let d = f.eval_order(y, n + offset)?.derivative(n + offset);
        let r = d.norm() / y.powf(alpha);
        if !r.is_finite() {
            return Err(Error::NonFinite { y });
        }
        if r > sup_part {
            sup_part = r;
            argmax = y;
        }
        if y <= cutoff / 10.0 {
            sup_low = sup_low.max(r);
        }
    }
    let plateau = sup_part <= sup_low * (1.0 + 1e-9);
    let heuristic = !f.is_certified() || derivative_growth(f.expr(), n + offset, true) > alpha + 1e-12;
    Ok(CnAlphaWitness {
        b,
        n,
        alpha,
        norm_estimate: boundary_part + sup_part,
        boundary_part,
        sup_part,
        argmax,
        cutoff,
        grid,
        plateau,
        heuristic,
    })
}

/// Sampled `‖f‖_{C^n_α([b,∞))}` on `grid.half_line(b)`.
pub fn norm_cn_alpha(f: &JetFunction, b: f64, n: usize, alpha: f64, grid: &GridSpec) -> Result<CnAlphaWitness> {
    grid.validate()?;
    cn_alpha_core(f, 0, b, n, alpha, &grid.half_line(b))
}

/// Same norm with the sup taken over the given points (those below `b` are ignored).
pub fn norm_cn_alpha_on(f: &JetFunction, b: f64, n: usize, alpha: f64, points: &[f64]) -> Result<CnAlphaWitness> {
    cn_alpha_core(f, 0, b, n, alpha, points)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CnRWitness {
    pub n: usize,
    pub alpha: f64,
    pub norm_estimate: f64,
    /// `[-Y, Y]`.
    pub sample_window: (f64, f64),
    /// Why the samples outside the window cannot exceed the estimate.
    pub tail_note: String,
    pub argmax: f64,
    pub argmax_order: usize,
    #[serde(skip)]
    pub points: Vec<f64>,
    pub heuristic: bool,
}

/// Sampled `‖f‖_{C^n(ℝ,r^α)}` on `grid.whole_line()`.
pub fn norm_cn_r(f: &JetFunction, n: usize, alpha: f64, grid: &GridSpec) -> Result<CnRWitness> {
    grid.validate()?;
    norm_cn_r_on(f, n, alpha, &grid.whole_line())
}

pub fn norm_cn_r_on(f: &JetFunction, n: usize, alpha: f64, points: &[f64]) -> Result<CnRWitness> {
    if !(alpha >= 0.0) {
        return Err(invalid("alpha must be nonnegative"));
    }
    if f.max_order() < n {
        return Err(Error::OrderTooHigh { requested: n, max: f.max_order() });
    }
    let mut best = 0.0f64;
    let mut argmax = 0.0;
    let mut argmax_order = 0;
    let mut window = 0.0f64;
    for &y in points {
        window = window.max(y.abs());
        let j = f.eval_order(y, n)?;
        let w = (1.0 + y.abs()).powf(alpha);
        for k in 0..=n {
            let r = j.derivative(k).norm() / w;
            if r > best {
                best = r;
                argmax = y;
                argmax_order = k;
            }
        }
    }
    let worst_growth = (0..=n).map(|k| derivative_growth(f.expr(), k, false)).fold(0.0, f64::max);
    let heuristic = !f.is_certified() || worst_growth > alpha + 1e-12;
    let tail_note = if heuristic {
        format!("derivative growth {worst_growth} is not bounded by r^{alpha}; sup is a sample estimate")
    } else {
        format!("derivatives grow at most like r^{worst_growth} with {worst_growth} <= {alpha}")
    };
    Ok(CnRWitness {
        n,
        alpha,
        norm_estimate: best,
        sample_window: (-window, window),
        tail_note,
        argmax,
        argmax_order,
        points: points.to_vec(),
        heuristic,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeBoundReport {
    /// Smallest `(rhs − lhs)/rhs` over all samples and orders.
    pub worst_margin: f64,
    pub worst_at: (usize, f64),
    pub violations: Vec<(usize, f64)>,
    pub pass: bool,
}

/// Checks `|f⁽ᵏ⁾(y)| ≤ ‖f‖·y^{n−k+α}` at every sample `y ≥ b`, `k ≤ n`.
pub fn check_derivative_bound(f: &JetFunction, w: &CnAlphaWitness, samples: &[f64]) -> Result<DerivativeBoundReport> {
    if f.max_order() < w.n {
        return Err(Error::OrderTooHigh { requested: w.n, max: f.max_order() });
    }
    let tol = 1e-9 * w.norm_estimate;
    let mut worst_margin = f64::INFINITY;
    let mut worst_at = (0, w.b);
    let mut violations = Vec::new();
    for &y in samples.iter().filter(|y| **y >= w.b) {
        let j = f.eval_order(y, w.n)?;
        for k in 0..=w.n {
            let weight = y.powf((w.n - k) as f64 + w.alpha);
            let lhs = j.derivative(k).norm();
            let rhs = w.norm_estimate * weight;
            let margin = if rhs > 0.0 { (rhs - lhs) / rhs } else if lhs == 0.0 { 0.0 } else { f64::NEG_INFINITY };
            if margin < worst_margin {
                worst_margin = margin;
                worst_at = (k, y);
            }
            if lhs > rhs + tol * weight {
                violations.push((k, y));
            }
        }
    }
    if worst_margin == f64::INFINITY {
        worst_margin = 0.0;
    }
    Ok(DerivativeBoundReport { worst_margin, worst_at, pass: violations.is_empty(), violations })
}

/// Parameters of the inequality battery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub b: f64,
    /// Restriction point, `c ≥ b`.
    pub c: f64,
    pub n: usize,
    /// Weight of `f`.
    pub alpha: f64,
    /// Weight of `g`.
    pub beta: f64,
    /// Real power for `y^p f` on the half line.
    pub p: f64,
    /// Integer power for `y^m f` on the whole line.
    pub m: u32,
    pub x: f64,
    pub kappa: f64,
    pub grid: GridSpec,
}

impl Default for SpaceParams {
    fn default() -> Self {
        Self { b: 1.0, c: 2.0, n: 2, alpha: 0.0, beta: 0.0, p: 1.0, m: 1, x: 0.5, kappa: 1.0, grid: GridSpec::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub inequality_id: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `(rhs − lhs)/max(rhs, lhs)`; the check passes when it is ≥ −1e-9.
    pub margin: f64,
    pub pass: bool,
}

pub const INEQUALITY_TOLERANCE: f64 = 1e-9;

fn inequality(id: &str, lhs: f64, rhs: f64) -> InequalityReport {
    let scale = rhs.abs().max(lhs.abs());
    let margin = if scale == 0.0 { 0.0 } else { (rhs - lhs) / scale };
    InequalityReport { inequality_id: id.to_string(), lhs, rhs, margin, pass: margin >= -INEQUALITY_TOLERANCE }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpaceReport {
    pub checks: Vec<InequalityReport>,
    /// Norms rest on sampling only; failures are then soft.
    pub heuristic: bool,
    pub pass: bool,
}

impl SpaceReport {
    pub fn get(&self, id: &str) -> Option<&InequalityReport> {
        self.checks.iter().find(|c| c.inequality_id == id)
    }
}

fn merged(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = a.iter().chain(b).copied().collect();
    v.sort_by(|x, y| x.total_cmp(y));
    v.dedup();
    v
}

/// Runs every inequality that applies to `f` (weight `α`) and `g` (weight `β`).
///
/// Half-line inequalities always run; the whole-line ones run when the
/// whole-line norms are finite.
pub fn check_space_inequalities(f: &JetFunction, g: &JetFunction, p: &SpaceParams) -> Result<SpaceReport> {
    p.grid.validate()?;
    if !(p.c >= p.b) {
        return Err(invalid("restriction point c must satisfy c >= b"));
    }
    if !(p.p >= 0.0) {
        return Err(invalid("monomial power p must be nonnegative"));
    }
    let n = p.n;
    let f = f.with_order(f.max_order().max(n));
    let g = g.with_order(g.max_order().max(n));
    if f.max_order() < n {
        return Err(Error::OrderTooHigh { requested: n, max: f.max_order() });
    }
    let mut checks = Vec::new();
    let mut heuristic = false;

    let pts_b = p.grid.half_line(p.b);
    let pts_c = p.grid.half_line(p.c);
    let both = merged(&pts_b, &pts_c);
    let base = norm_cn_alpha_on(&f, p.b, n, p.alpha, &both)?;
    heuristic |= base.heuristic;

    let restricted = norm_cn_alpha_on(&f, p.c, n, p.alpha, &pts_c)?;
    checks.push(inequality("restriction", restricted.norm_estimate, (n + 1) as f64 * base.norm_estimate));

    for m in 1..=n {
        let d = cn_alpha_core(&f, m, p.b, n - m, p.alpha, &both)?;
        checks.push(inequality(&format!("derivative_{m}"), d.norm_estimate, base.norm_estimate));
    }

    if n >= 1 {
        let (m, beta) = (n - 1, p.alpha + 1.0);
        let lower = norm_cn_alpha_on(&f, p.b, m, beta, &both)?;
        let factor = (m + 1) as f64 / p.b.powf(beta - p.alpha - n as f64 + m as f64);
        checks.push(inequality("cn_alpha_embedding", lower.norm_estimate, factor * base.norm_estimate));
    }

    let ypf = JetFunction::new(JetExpr::Power(p.p).mul(f.expr().clone()), n);
    let lhs = norm_cn_alpha_on(&ypf, p.b, n, p.alpha + p.p, &both)?;
    checks.push(inequality(
        "monomial_product",
        lhs.norm_estimate,
        (p.p + n as f64 + 1.0).powi(n as i32) * base.norm_estimate,
    ));

    let line = p.grid.whole_line();
    let shifted_pts: Vec<f64> = line.iter().map(|y| y + p.x).collect();
    let line_all = merged(&merged(&line, &shifted_pts), &pts_b);
    let fr = norm_cn_r_on(&f, n, p.alpha, &line_all)?;
    let gr = norm_cn_r_on(&g, n, p.beta, &line_all)?;
    let whole_line = f.expr().growth().is_finite() && fr.norm_estimate.is_finite();
    if whole_line {
        heuristic |= fr.heuristic;

        if gr.norm_estimate.is_finite() && g.expr().growth().is_finite() {
            heuristic |= gr.heuristic;
            let fg = JetFunction::new(f.expr().clone().mul(g.expr().clone()), n);
            let lhs = norm_cn_r_on(&fg, n, p.alpha + p.beta, &line_all)?;
            checks.push(inequality(
                "product",
                lhs.norm_estimate,
                2f64.powi(n as i32) * fr.norm_estimate * gr.norm_estimate,
            ));
        }

        let ymf = JetFunction::new(JetExpr::Monomial(p.m).mul(f.expr().clone()), n);
        let lhs = norm_cn_r_on(&ymf, n, p.alpha + f64::from(p.m), &line_all)?;
        checks.push(inequality(
            "monomial_product_r",
            lhs.norm_estimate,
            (1.0 + f64::from(p.m)).powi(n as i32) * fr.norm_estimate,
        ));

        let wave = JetFunction::new(JetExpr::exp_i(p.kappa).mul(f.expr().clone()), n);
        let lhs = norm_cn_r_on(&wave, n, p.alpha, &line_all)?;
        checks.push(inequality(
            "plane_wave",
            lhs.norm_estimate,
            (1.0 + p.kappa.abs()).powi(n as i32) * fr.norm_estimate,
        ));

        let sh = f.shift(p.x);
        let lhs = norm_cn_r_on(&sh, n, p.alpha, &line)?;
        checks.push(inequality("shift", lhs.norm_estimate, (1.0 + p.x.abs()).powf(p.alpha) * fr.norm_estimate));

        let lhs = norm_cn_alpha_on(&f, p.b, n, p.alpha, &pts_b)?;
        checks.push(inequality(
            "embedding",
            lhs.norm_estimate,
            (1.0 + 1.0 / p.b).powf(n as f64 + p.alpha) * fr.norm_estimate,
        ));
    }

    let pass = checks.iter().all(|c| c.pass);
    Ok(SpaceReport { checks, heuristic, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str, order: usize) -> JetFunction {
        JetFunction::parse(s, order).unwrap()
    }

    #[test]
    fn square_norm_is_five() {
        let w = norm_cn_alpha(&f("mono:2", 4), 1.0, 2, 0.0, &GridSpec::default()).unwrap();
        assert!((w.norm_estimate - 5.0).abs() < 1e-15);
        assert!(!w.heuristic);
        assert!(w.plateau);
    }

    #[test]
    fn zero_norm() {
        let w = norm_cn_alpha(&f("zero", 3), 2.0, 3, 0.5, &GridSpec::default()).unwrap();
        assert_eq!(w.norm_estimate, 0.0);
        let r = norm_cn_r(&f("zero", 3), 3, 0.0, &GridSpec::default()).unwrap();
        assert_eq!(r.norm_estimate, 0.0);
    }

    #[test]
    fn plane_wave_norm() {
        for b in [0.5, 1.0, 3.0] {
            for n in 0..4 {
                let w = norm_cn_alpha(&f("exp_i:1", 4), b, n, 0.0, &GridSpec::default()).unwrap();
                let expect: f64 = (0..n).map(|k| b.powi(k as i32 - n as i32)).sum::<f64>() + 1.0;
                assert!((w.norm_estimate - expect).abs() < 1e-14 * expect);
            }
        }
    }

    #[test]
    fn order_too_low_is_rejected() {
        assert!(matches!(
            norm_cn_alpha(&f("mono:2", 1), 1.0, 2, 0.0, &GridSpec::default()),
            Err(Error::OrderTooHigh { .. })
        ));
    }

    #[test]
    fn refined_grid_is_superset() {
        let g = GridSpec::default().with_cutoff(50.0);
        let coarse = g.half_line(1.0);
        let fine = g.refined().half_line(1.0);
        for (i, y) in coarse.iter().enumerate() {
            assert!((fine[2 * i] - y).abs() <= 1e-12 * y);
        }
    }

    #[test]
    fn identity_shift_equal_norms() {
        let p = SpaceParams { x: 0.0, alpha: 1.0, ..Default::default() };
        let r = check_space_inequalities(&f("poly:1,1", 4), &f("const:1", 4), &p).unwrap();
        let s = r.get("shift").unwrap();
        assert_eq!(s.lhs, s.rhs);
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn constants_product() {
        let p = SpaceParams::default();
        let r = check_space_inequalities(&f("const:1", 3), &f("const:1", 3), &p).unwrap();
        let c = r.get("product").unwrap();
        assert_eq!(c.lhs, 1.0);
        assert_eq!(c.rhs, 4.0);
        assert!(r.pass);
    }

    #[test]
    fn derivative_growth_of_products() {
        let e = JetExpr::exp_i(1.0).mul(JetExpr::Monomial(2));
        assert_eq!(derivative_growth(&e, 2, true), 2.0);
        assert_eq!(derivative_growth(&JetExpr::Monomial(2), 3, false), 0.0);
    }
}
