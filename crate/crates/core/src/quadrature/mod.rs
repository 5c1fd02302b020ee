//! Panel quadrature for integrands `e^{iau²}·h(u)`.
//!
//! Panels are aligned with the phase: panel `j` covers
//! `[√(u₀² + jΔ/|a|), √(u₀² + (j+1)Δ/|a|)]`, so `au²` advances by `Δ` (π or 2π)
//! per panel. Each panel uses a fixed Gauss–Legendre rule, and the phase is
//! evaluated relative to the panel start so it stays accurate far out.

pub mod accel;

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

const TAU_LO: f64 = 2.449_293_598_294_706_4e-16;
const EPS: f64 = f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsLadder {
    pub eps0: f64,
    pub ratio: f64,
    pub rungs: usize,
}

impl Default for EpsLadder {
    fn default() -> Self {
        Self { eps0: 0.1, ratio: 0.5, rungs: 12 }
    }
}

impl EpsLadder {
    pub fn values(&self) -> Vec<f64> {
        (0..self.rungs).map(|j| self.eps0 * self.ratio.powi(j as i32)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
    pub panel_rule: usize,
    pub eps_ladder: EpsLadder,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-12, max_panels: 1_000_000, panel_rule: 15, eps_ladder: EpsLadder::default() }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(invalid("tolerances must be positive"));
        }
        if self.panel_rule < 2 || self.panel_rule > 64 {
            return Err(invalid("panel_rule must be between 2 and 64 nodes"));
        }
        if self.max_panels == 0 {
            return Err(invalid("max_panels must be positive"));
        }
        let l = &self.eps_ladder;
        if !(l.eps0 > 0.0 && l.ratio > 0.0 && l.ratio < 1.0 && l.rungs >= 3) {
            return Err(invalid("eps ladder needs eps0 > 0, 0 < ratio < 1 and at least 3 rungs"));
        }
        Ok(())
    }

    fn tol(&self, value: Complex64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.norm())
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("gauss cache poisoned");
    guard.entry(n).or_insert_with(|| Arc::new(legendre_rule(n))).clone()
}

fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// `a·y² mod 2π`, computed with an error-free product so it stays accurate
/// when `a·y²` is large.
pub fn phase_mod_tau(a: f64, y: f64) -> f64 {
    let (p, e) = two_prod(y, y);
    let (q, e2) = two_prod(a, p);
    let lo = e2 + a * e;
    let k = (q / TAU).round();
    let (kh, kh_err) = two_prod(k, TAU);
    (q - kh) - kh_err - k * TAU_LO + lo
}

/// `e^{i a y²}` with the phase reduced accurately.
pub fn cis_quadratic(a: f64, y: f64) -> Complex64 {
    Complex64::from_polar(1.0, phase_mod_tau(a, y))
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    /// `Σ|wᵢ hᵢ|`, the size of the integrand before cancellation.
    pub abs_sum: f64,
    pub err: f64,
    pub panels: usize,
    pub budget_exceeded: bool,
}

/// Integrand `h` of `∫ e^{iau²} h(u) du`.
pub type Amplitude<'a> = &'a dyn Fn(f64) -> Complex64;

/// Phase-aligned panel generator for `∫ e^{iau²} h_i(u) du`, `i = 1..k`,
/// starting at `u0 ≥ 0`. All integrands share one bisection tree.
pub(crate) struct PhasePanels<'a> {
    a: f64,
    u0sq: f64,
    width: f64,
    rule: Arc<(Vec<f64>, Vec<f64>)>,
    hs: &'a [Amplitude<'a>],
    pub next: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Panel {
    pub hi: f64,
    pub values: Vec<Complex64>,
    pub abs: Vec<f64>,
    /// `Σ |whole − (left + right)|` over the accepted bisection leaves.
    pub err: Vec<f64>,
}

/// Bisection stops once halves agree with the whole to this fraction of `Σ|wh|`.
const PANEL_REL_TOL: f64 = 1e-13;
/// Below this the integrand has underflowed into subnormals.
const PANEL_ABS_FLOOR: f64 = 1e-200;
const MAX_BISECTIONS: u32 = 14;

struct Leaf {
    values: Vec<Complex64>,
    abs: Vec<f64>,
    err: Vec<f64>,
}

impl<'a> PhasePanels<'a> {
    /// `step` is the phase advance per panel.
    pub fn new(a: f64, u0: f64, step: f64, nodes: usize, hs: &'a [Amplitude<'a>]) -> Self {
        Self { a, u0sq: u0 * u0, width: step / a.abs(), rule: gauss_legendre(nodes), hs, next: 0 }
    }

    pub fn boundary(&self, j: usize) -> f64 {
        (self.u0sq + j as f64 * self.width).sqrt()
    }

    /// One Gauss–Legendre pass over `[lo, hi]`, phase taken relative to `lo`.
    fn rule_on(&self, lo: f64, hi: f64) -> Result<(Vec<Complex64>, Vec<f64>)> {
        let half = 0.5 * (hi - lo);
        let base = phase_mod_tau(self.a, lo);
        let (xs, ws) = (&self.rule.0, &self.rule.1);
        let k = self.hs.len();
        let mut values = vec![Complex64::new(0.0, 0.0); k];
        let mut abs = vec![0.0; k];
        for (x, w) in xs.iter().zip(ws) {
            let d = half * (x + 1.0);
            let theta = base + self.a * d * (2.0 * lo + d);
            let cis = Complex64::from_polar(w * half, theta);
            for (i, h) in self.hs.iter().enumerate() {
                let hv = h(lo + d);
                values[i] += hv * cis;
                abs[i] += hv.norm() * w * half;
            }
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite { y: lo });
        }
        Ok((values, abs))
    }

    fn bisect(&self, lo: f64, hi: f64, whole: &[Complex64], depth: u32) -> Result<Leaf> {
        let mid = 0.5 * (lo + hi);
        let (l, la) = self.rule_on(lo, mid)?;
        let (r, ra) = self.rule_on(mid, hi)?;
        let diffs: Vec<f64> = (0..whole.len()).map(|i| (whole[i] - l[i] - r[i]).norm()).collect();
        let settled =
            diffs.iter().enumerate().all(|(i, &d)| d <= PANEL_REL_TOL * (la[i] + ra[i]) || d <= PANEL_ABS_FLOOR);
        if settled || depth >= MAX_BISECTIONS {
            return Ok(Leaf {
                values: l.iter().zip(&r).map(|(x, y)| x + y).collect(),
                abs: la.iter().zip(&ra).map(|(x, y)| x + y).collect(),
                err: diffs,
            });
        }
        let left = self.bisect(lo, mid, &l, depth + 1)?;
        let right = self.bisect(mid, hi, &r, depth + 1)?;
        let sum = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p + q).collect::<Vec<f64>>();
        Ok(Leaf {
            values: left.values.iter().zip(&right.values).map(|(x, y)| x + y).collect(),
            abs: sum(&left.abs, &right.abs),
            err: sum(&left.err, &right.err),
        })
    }

    /// Integrals over `[lo, hi]`, bisected until the rule agrees with itself for every integrand.
    pub fn segment(&self, lo: f64, hi: f64) -> Result<Panel> {
        let (whole, _) = self.rule_on(lo, hi)?;
        let leaf = self.bisect(lo, hi, &whole, 0)?;
        Ok(Panel { hi, values: leaf.values, abs: leaf.abs, err: leaf.err })
    }

    pub fn next_panel(&mut self) -> Result<Panel> {
        let lo = self.boundary(self.next);
        let hi = self.boundary(self.next + 1);
        self.next += 1;
        self.segment(lo, hi)
    }
}

/// `∫_lo^hi e^{iau²} h(u) du` for `0 ≤ lo ≤ hi` on half-period panels.
pub fn finite_phase_integral(
    a: f64,
    lo: f64,
    hi: f64,
    cfg: &QuadratureConfig,
    h: impl Fn(f64) -> Complex64,
) -> Result<QuadResult> {
    let h: Amplitude = &h;
    Ok(finite_phase_integral_batch(a, lo, hi, cfg, &[h])?.remove(0))
}

/// [`finite_phase_integral`] for several integrands on one panel tree.
pub fn finite_phase_integral_batch(
    a: f64,
    lo: f64,
    hi: f64,
    cfg: &QuadratureConfig,
    hs: &[Amplitude],
) -> Result<Vec<QuadResult>> {
    if !(0.0 <= lo && lo <= hi) {
        return Err(invalid("finite phase integral needs 0 <= lo <= hi"));
    }
    let mut gen = PhasePanels::new(a, lo, PI, cfg.panel_rule, hs);
    let mut out = vec![QuadResult::default(); hs.len()];
    let mut rule_err = vec![0.0; hs.len()];
    let mut panels = 0;
    while panels < cfg.max_panels {
        let plo = gen.boundary(gen.next);
        if plo >= hi {
            break;
        }
        let phi = gen.boundary(gen.next + 1).min(hi);
        let p = gen.segment(plo, phi)?;
        gen.next += 1;
        panels += 1;
        for (i, o) in out.iter_mut().enumerate() {
            o.value += p.values[i];
            o.abs_sum += p.abs[i];
            rule_err[i] += p.err[i];
        }
    }
    if gen.boundary(gen.next) < hi {
        return Err(Error::BudgetExceeded { panels, partial: out[0].value });
    }
    for (o, e) in out.iter_mut().zip(rule_err) {
        o.panels = panels;
        o.err = e + 16.0 * EPS * o.abs_sum;
    }
    Ok(out)
}

/// `∫_b^∞ e^{-ε(y-y₀)²} e^{iay²} h(y) dy` over full-period panels, truncated once
/// the Gaussian tail bound with majorant `M(1+y)^β` drops below `abs_tol/10`.
pub fn gaussian_damped_integral(
    a: f64,
    b: f64,
    eps: f64,
    y0: f64,
    beta: f64,
    cfg: &QuadratureConfig,
    h: impl Fn(f64) -> Complex64,
) -> Result<QuadResult> {
    let beta = beta.max(0.0);
    let majorant = std::cell::Cell::new(0.0f64);
    let damped = |y: f64| {
        let v = h(y);
        let m = v.norm() / (1.0 + y.abs()).powf(beta);
        if m > majorant.get() {
            majorant.set(m);
        }
        v * (-eps * (y - y0) * (y - y0)).exp()
    };
    let hs: [Amplitude; 1] = [&damped];
    let mut gen = PhasePanels::new(a, b, TAU, cfg.panel_rule, &hs);
    let mut out = QuadResult::default();
    let mut rule_err = 0.0;
    loop {
        if out.panels >= cfg.max_panels {
            return Err(Error::BudgetExceeded { panels: out.panels, partial: out.value });
        }
        let p = gen.next_panel()?;
        out.value += p.values[0];
        out.abs_sum += p.abs[0];
        rule_err += p.err[0];
        out.panels += 1;
        let y = p.hi;
        if y > y0 {
            let d = 2.0 * eps * (y - y0) - beta / (1.0 + y);
            if d > 0.0 {
                let bound = majorant.get() * (1.0 + y).powf(beta) * (-eps * (y - y0) * (y - y0)).exp() / d;
                if bound < 0.1 * cfg.abs_tol && out.panels >= 2 {
                    out.err = rule_err + 16.0 * EPS * out.abs_sum + bound;
                    return Ok(out);
                }
            }
        }
    }
}

/// Euler averaging depth used for alternating panel sums.
pub const AVERAGING_DEPTH: usize = 24;
const FIRST_TAIL_PANELS: usize = 32;

/// Half-period panel partial sums of several integrands.
struct TailSeries<'a> {
    gen: PhasePanels<'a>,
    /// `partials[i][j]`: integrand `i` summed over the first `j` panels.
    partials: Vec<Vec<Complex64>>,
    abs_sum: Vec<f64>,
    rule_err: Vec<f64>,
}

impl<'a> TailSeries<'a> {
    fn new(a: f64, b: f64, nodes: usize, hs: &'a [Amplitude<'a>]) -> Self {
        let k = hs.len();
        Self {
            gen: PhasePanels::new(a, b, PI, nodes, hs),
            partials: vec![vec![Complex64::new(0.0, 0.0)]; k],
            abs_sum: vec![0.0; k],
            rule_err: vec![0.0; k],
        }
    }

    fn len(&self) -> usize {
        self.partials[0].len()
    }

    fn extend(&mut self, need: usize) -> Result<()> {
        while self.len() <= need {
            let p = self.gen.next_panel()?;
            for i in 0..self.partials.len() {
                self.abs_sum[i] += p.abs[i];
                self.rule_err[i] += p.err[i];
                let last = *self.partials[i].last().unwrap();
                self.partials[i].push(last + p.values[i]);
            }
        }
        Ok(())
    }

    fn estimate(&self, i: usize, n: usize) -> Complex64 {
        accel::euler_average(&self.partials[i][n..=n + AVERAGING_DEPTH])
    }

    fn floor(&self, i: usize) -> f64 {
        self.rule_err[i] + 16.0 * EPS * self.abs_sum[i]
    }
}

/// `∫_b^∞ e^{iay²} h(y) dy` for an absolutely integrable, slowly varying `h`.
///
/// Half-period panels make consecutive contributions alternate in sign; the
/// partial sums are binomially averaged, and the number of panels doubles
/// until two estimates agree.
pub fn alternating_tail(a: f64, b: f64, cfg: &QuadratureConfig, h: impl Fn(f64) -> Complex64) -> Result<QuadResult> {
    let h: Amplitude = &h;
    Ok(alternating_tail_batch(a, b, cfg, &[h])?.remove(0))
}

/// Several tails on one shared panel tree: every integrand is summed over
/// the same nodes and stops at the same count, so the result is exactly
/// linear in the integrands up to rounding.
pub fn alternating_tail_batch(a: f64, b: f64, cfg: &QuadratureConfig, hs: &[Amplitude]) -> Result<Vec<QuadResult>> {
    if hs.is_empty() {
        return Ok(Vec::new());
    }
    let mut series = TailSeries::new(a, b, cfg.panel_rule, hs);
    let k = hs.len();
    let mut prev: Vec<Option<Complex64>> = vec![None; k];
    let mut last_diff = vec![f64::INFINITY; k];
    let mut n = FIRST_TAIL_PANELS;
    loop {
        let need = n + AVERAGING_DEPTH;
        if need > cfg.max_panels {
            return Ok((0..k)
                .map(|i| QuadResult {
                    value: prev[i].unwrap_or(*series.partials[i].last().unwrap()),
                    abs_sum: series.abs_sum[i],
                    err: last_diff[i] + series.floor(i),
                    panels: series.len() - 1,
                    budget_exceeded: true,
                })
                .collect());
        }
        series.extend(need)?;
        let mut done = true;
        for i in 0..k {
            let est = series.estimate(i, n);
            match prev[i] {
                Some(p) => {
                    last_diff[i] = (est - p).norm();
                    done &= last_diff[i] <= cfg.tol(est);
                }
                None => done = false,
            }
            prev[i] = Some(est);
        }
        if done {
            return Ok((0..k)
                .map(|i| QuadResult {
                    value: prev[i].unwrap(),
                    abs_sum: series.abs_sum[i],
                    err: last_diff[i] + series.floor(i),
                    panels: need,
                    budget_exceeded: false,
                })
                .collect());
        }
        n *= 2;
    }
}

/// Outcome of a truncated-Riemann ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderResult {
    pub quad: QuadResult,
    /// Upper limits `R_j` of the partial integrals that were fed to the extrapolator.
    pub radii: Vec<f64>,
}

const WYNN_TERMS: usize = 21;

/// Partial integrals `∫_b^{R_j} e^{iay²} h` at half-period radii, extrapolated
/// with Wynn's epsilon algorithm. Fails if the panel contributions visibly
/// stop decaying.
pub fn riemann_ladder(a: f64, b: f64, cfg: &QuadratureConfig, h: impl Fn(f64) -> Complex64) -> Result<LadderResult> {
    let hs: [Amplitude; 1] = [&h];
    let mut gen = PhasePanels::new(a, b, PI, cfg.panel_rule, &hs);
    let mut partials = vec![Complex64::new(0.0, 0.0)];
    let mut mags = Vec::new();
    let mut abs_sum = 0.0;
    let mut n = 64usize;
    let mut prev: Option<Complex64> = None;
    loop {
        while partials.len() <= n {
            let p = gen.next_panel()?;
            abs_sum += p.abs[0];
            mags.push(p.values[0].norm());
            let last = *partials.last().unwrap();
            partials.push(last + p.values[0]);
        }
        let q = n / 4;
        let early: f64 = mags[q..2 * q].iter().sum::<f64>() / q as f64;
        let late: f64 = mags[3 * q..4 * q].iter().sum::<f64>() / q as f64;
        if late > 0.0 && late >= 0.9 * early {
            return Err(Error::NonConvergence(format!(
                "truncated integrals do not settle: mean panel size {late:.3e} at R = {:.3} vs {early:.3e} earlier",
                gen.boundary(n)
            )));
        }
        let window = &partials[n + 1 - WYNN_TERMS..=n];
        let (est, wynn_err) = accel::wynn_epsilon(window);
        let radii: Vec<f64> = (n + 1 - WYNN_TERMS..=n).map(|j| gen.boundary(j)).collect();
        if let Some(p) = prev {
            let diff = (est - p).norm();
            let budget_hit = 2 * n > cfg.max_panels;
            if diff <= cfg.tol(est) || budget_hit {
                let err = diff.max(wynn_err) + 16.0 * EPS * abs_sum;
                let quad = QuadResult { value: est, abs_sum, err, panels: n, budget_exceeded: budget_hit && diff > cfg.tol(est) };
                return Ok(LadderResult { quad, radii });
            }
        }
        prev = Some(est);
        n *= 2;
    }
}
