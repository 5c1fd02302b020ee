//! The free particle: `G(t,x,y) = e^{i(y-x)²/(4t)} / (2√(iπt))`, the complex
//! error function, and the closed forms that serve as exact oracles.

pub mod erf;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::jets::{JetExpr, JetFunction};
use crate::quadrature::gauss_legendre;
use crate::schrodinger::GreensDecomposition;

pub use erf::{complex_erf, complex_erfc};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Principal square root, `Re √z ≥ 0`, cut along the negative real axis.
/// Every kernel constant goes through this one helper.
pub fn principal_sqrt(z: Complex64) -> Complex64 {
    z.sqrt()
}

/// Free-particle kernel with `a(t) = 1/(4t)` and `G̃ = 1/(2√(iπt))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeParticle {
    n: usize,
}

impl Default for FreeParticle {
    fn default() -> Self {
        Self { n: 4 }
    }
}

impl FreeParticle {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(invalid("the free particle needs n >= 4"));
        }
        Ok(Self { n })
    }

    /// Smallest admissible `n` for initial data of growth `beta`.
    pub fn for_growth(beta: f64) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(invalid(format!("initial condition growth {beta} is not a finite nonnegative order")));
        }
        Self::new(beta.floor() as usize + 4)
    }

    /// `√(iπt)`.
    fn root(t: f64) -> Complex64 {
        principal_sqrt(Complex64::new(0.0, PI * t))
    }
}

impl GreensDecomposition for FreeParticle {
    fn name(&self) -> &str {
        "free_particle"
    }

    fn a(&self, t: f64) -> f64 {
        0.25 / t
    }

    fn a_prime(&self, t: f64) -> f64 {
        -0.25 / (t * t)
    }

    fn gtilde(&self, t: f64, _x: f64) -> JetExpr {
        JetExpr::Const(0.5 / Self::root(t))
    }

    fn gtilde_x(&self, _t: f64, _x: f64) -> JetExpr {
        JetExpr::Zero
    }

    fn gtilde_xx(&self, _t: f64, _x: f64) -> JetExpr {
        JetExpr::Zero
    }

    fn gtilde_t(&self, t: f64, _x: f64) -> JetExpr {
        // -1/(4√(iπ) t^{3/2}) = -1/(4 t √(iπt))
        JetExpr::Const(-0.25 / (t * Self::root(t)))
    }

    fn n(&self) -> usize {
        self.n
    }

    fn alpha(&self) -> f64 {
        0.0
    }
}

/// `𝓘_{a,b}(e^{iκy}) = √π/(2√(-ia)) · e^{κ²/(4ia)} · (1 − erf(b√(-ia) − iκ/(2√(-ia))))`.
pub fn closed_form_oscillatory_exp(a: f64, b: f64, kappa: f64) -> Result<Complex64> {
    if a == 0.0 || !a.is_finite() {
        return Err(invalid("a must be nonzero"));
    }
    if !(b > 0.0) {
        return Err(invalid("b must be positive"));
    }
    let s = principal_sqrt(Complex64::new(0.0, -a));
    let w = s * b - I * kappa / (2.0 * s);
    let pref = PI.sqrt() / (2.0 * s) * (Complex64::new(kappa * kappa, 0.0) / (4.0 * I * a)).exp();
    Ok(pref * complex_erfc(w)?)
}

/// `∫_b^∞ e^{-λy² + iκy} dy = √π/(2√λ) e^{-κ²/(4λ)} (1 − erf(b√λ − iκ/(2√λ)))` for `Re λ > 0`.
pub fn gauss_tail_integral(lambda: Complex64, b: f64, kappa: f64) -> Result<Complex64> {
    if !(lambda.re > 0.0) {
        return Err(invalid("Re lambda must be positive"));
    }
    let s = principal_sqrt(lambda);
    let w = s * b - I * kappa / (2.0 * s);
    Ok(PI.sqrt() / (2.0 * s) * (-(kappa * kappa) / (4.0 * lambda)).exp() * complex_erfc(w)?)
}

/// `e^{iκx − iκ²t}`.
pub fn closed_form_plane_wave(t: f64, x: f64, kappa: f64) -> Complex64 {
    Complex64::from_polar(1.0, kappa * x - kappa * kappa * t)
}

fn ln_factorial(n: u64) -> f64 {
    if n <= 20 {
        return (exact_factorial(n) as f64).ln();
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    x * x.ln() - x + 0.5 * (2.0 * PI * x).ln() + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

fn exact_factorial(n: u64) -> u64 {
    (1..=n).product()
}

/// `m!/(k!(m−2k)!)`.
fn moment_weight(m: u64, k: u64) -> f64 {
    if m <= 20 {
        (exact_factorial(m) / (exact_factorial(k) * exact_factorial(m - 2 * k))) as f64
    } else {
        (ln_factorial(m) - ln_factorial(k) - ln_factorial(m - 2 * k)).exp()
    }
}

/// `g_m(t,x) = m! Σ_{k ≤ m/2} x^{m−2k} (it)^k / (k!(m−2k)!)`.
pub fn closed_form_moment(t: f64, x: f64, m: u32) -> Complex64 {
    let m = u64::from(m);
    let it = Complex64::new(0.0, t);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..=m / 2 {
        sum += it.powu(k as u32) * x.powi((m - 2 * k) as i32) * moment_weight(m, k);
    }
    sum
}

/// Exact free-particle `Ψ(t,x;F)` for initial data built from plane waves and
/// polynomials by sums, scalings and reflections/translations; `None` otherwise.
pub fn closed_form_psi(f: &JetExpr, t: f64, x: f64) -> Option<Complex64> {
    match f {
        JetExpr::Zero => Some(Complex64::new(0.0, 0.0)),
        JetExpr::Const(c) => Some(*c),
        JetExpr::ExpI(k) if k.im == 0.0 => Some(closed_form_plane_wave(t, x, k.re)),
        JetExpr::Monomial(m) => Some(closed_form_moment(t, x, *m)),
        JetExpr::Poly(c) => {
            Some(c.iter().enumerate().map(|(m, cm)| cm * closed_form_moment(t, x, m as u32)).sum())
        }
        JetExpr::Sum(a, b) => Some(closed_form_psi(a, t, x)? + closed_form_psi(b, t, x)?),
        JetExpr::Scale(c, a) => Some(c * closed_form_psi(a, t, x)?),
        JetExpr::Affine { scale, shift, inner } if scale.abs() == 1.0 => closed_form_psi(inner, t, shift + scale * x),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelIdentityRow {
    pub t: f64,
    pub value: Complex64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelIdentityReport {
    pub x: f64,
    pub target: Complex64,
    pub rows: Vec<KernelIdentityRow>,
    /// Errors never grow along the ladder by more than rounding.
    pub converging: bool,
}

/// `∫_0^hi e(u) du` on panels that follow the phase `u²/(4t)` plus a uniform floor grid.
fn chirp_panels(t: f64, hi: f64, nodes: usize, h: impl Fn(f64) -> Complex64) -> Complex64 {
    if hi <= 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let step = 4.0 * PI * t;
    let mut cuts: Vec<f64> = (0..=16).map(|k| hi * f64::from(k) / 16.0).collect();
    let mut j = 1.0;
    loop {
        let u = (j * step).sqrt();
        if u >= hi {
            break;
        }
        cuts.push(u);
        j += 1.0;
    }
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup();
    let rule = gauss_legendre(nodes);
    let mut sum = Complex64::new(0.0, 0.0);
    for w in cuts.windows(2) {
        let (lo, up) = (w[0], w[1]);
        let half = 0.5 * (up - lo);
        for (xn, wn) in rule.0.iter().zip(&rule.1) {
            sum += h(lo + half * (xn + 1.0)) * (wn * half);
        }
    }
    sum
}

/// `∫_{-x0}^{x0} G(t,x,y) φ(y) dy` written as
/// `½ erf((y−x)/(2√(it))) φ(y) |_{-x0}^{x0} − ½ ∫ erf((y−x)/(2√(it))) φ′(y) dy`,
/// evaluated along `t_ladder`; the limit is `φ(x)`.
pub fn kernel_initial_condition_identity(
    x0: f64,
    phi: &JetFunction,
    x: f64,
    t_ladder: &[f64],
) -> Result<KernelIdentityReport> {
    if !(x.abs() < x0) {
        return Err(invalid("need |x| < x0"));
    }
    if phi.max_order() < 1 {
        return Err(invalid("phi must carry first derivatives"));
    }
    if t_ladder.iter().any(|t| !(*t > 0.0)) {
        return Err(invalid("t ladder must be positive"));
    }
    let target = phi.value(x);
    let expr = phi.expr();
    let mut rows = Vec::with_capacity(t_ladder.len());
    for &t in t_ladder {
        let scale = 1.0 / (2.0 * principal_sqrt(Complex64::new(0.0, t)));
        let e = |y: f64| complex_erf((y - x) * scale);
        let edge = e(x0)? * phi.value(x0) - e(-x0)? * phi.value(-x0);
        let failure = std::cell::RefCell::new(None);
        let integrand = |y: f64| match e(y) {
            Ok(v) => v * expr.jet(y, 1).derivative(1),
            Err(err) => {
                failure.borrow_mut().get_or_insert(err);
                Complex64::new(0.0, 0.0)
            }
        };
        let right = chirp_panels(t, x0 - x, 15, |u| integrand(x + u));
        let left = chirp_panels(t, x0 + x, 15, |u| integrand(x - u));
        if let Some(err) = failure.into_inner() {
            return Err(err);
        }
        let value = 0.5 * edge - 0.5 * (right + left);
        rows.push(KernelIdentityRow { t, value, error: (value - target).norm() });
    }
    let converging = rows.windows(2).all(|w| w[1].error <= w[0].error * (1.0 + 1e-6) + 1e-13);
    Ok(KernelIdentityReport { x, target, rows, converging })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_wave_instance() {
        let v = closed_form_plane_wave(0.3, 0.7, 1.0);
        assert!((v - Complex64::from_polar(1.0, 0.4)).norm() < 1e-15);
        assert_eq!(closed_form_plane_wave(0.9, -3.0, 0.0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn low_moments() {
        let (t, x) = (0.37, -1.3);
        assert_eq!(closed_form_moment(t, x, 0), Complex64::new(1.0, 0.0));
        assert_eq!(closed_form_moment(t, x, 1), Complex64::new(x, 0.0));
        assert!((closed_form_moment(t, x, 2) - Complex64::new(x * x, 2.0 * t)).norm() < 1e-15);
    }

    #[test]
    fn large_moment_weights_switch_smoothly() {
        // m!/(k!(m-2k)!) at m = 21, k = 3: 21!/(3!·15!) = 6.5116512e8
        let exact = 21.0 * 20.0 * 19.0 * 18.0 * 17.0 * 16.0 / 6.0;
        assert!((moment_weight(21, 3) / exact - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_constants_share_branch() {
        let g = FreeParticle::default();
        let t = 0.7;
        let JetExpr::Const(c) = g.gtilde(t, 0.0) else { panic!() };
        let JetExpr::Const(ct) = g.gtilde_t(t, 0.0) else { panic!() };
        // d/dt (1/(2√(iπt))) = -1/(4√(iπ) t^{3/2})
        let h = 1e-5;
        let JetExpr::Const(cp) = g.gtilde(t + h, 0.0) else { panic!() };
        let JetExpr::Const(cm) = g.gtilde(t - h, 0.0) else { panic!() };
        assert!(((cp - cm) / (2.0 * h) - ct).norm() < 1e-8);
        assert!(c.re > 0.0 && c.im < 0.0);
    }

    #[test]
    fn oscillatory_exp_rejects_zero_a() {
        assert!(closed_form_oscillatory_exp(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn oscillatory_exp_conjugation() {
        for (a, b, k) in [(1.0, 1.0, 1.0), (0.5, 3.0, -2.0), (10.0, 0.5, 0.0)] {
            let p = closed_form_oscillatory_exp(a, b, k).unwrap();
            let m = closed_form_oscillatory_exp(-a, b, -k).unwrap();
            assert!((p.conj() - m).norm() < 1e-13 * p.norm().max(1.0));
        }
    }

    #[test]
    fn closed_form_translation() {
        let f: JetExpr = "shift:0.5(mono:2)".parse().unwrap();
        let v = closed_form_psi(&f, 0.2, 1.0).unwrap();
        assert!((v - Complex64::new(2.25, 0.4)).norm() < 1e-14);
    }
}
