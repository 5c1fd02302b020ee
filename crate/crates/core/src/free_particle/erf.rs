//! Complex error function.
//!
//! Small arguments use the Maclaurin series summed in double-double
//! arithmetic (the series cancels heavily near the real axis). Large
//! arguments use the Laplace continued fraction of the Faddeeva function.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};

const TWO_OVER_SQRT_PI_HI: f64 = 1.128_379_167_095_512_6;
const TWO_OVER_SQRT_PI_LO: f64 = 1.533_545_961_316_588e-17;
const TAU_LO: f64 = 2.449_293_598_294_706_4e-16;

/// Inputs with `|Re z²|` beyond this are rejected.
pub const OVERFLOW_GUARD: f64 = 700.0;
/// Radius below which the series is used.
pub const SERIES_RADIUS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    fn from_prod(a: f64, b: f64) -> Dd {
        let (hi, lo) = two_prod(a, b);
        Dd { hi, lo }
    }

    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let (p, e) = two_prod(q1, d);
        let (s, f) = two_sum(self.hi, -p);
        let q2 = (s + (f - e + self.lo)) / d;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }
}

#[derive(Debug, Clone, Copy)]
struct CDd {
    re: Dd,
    im: Dd,
}

impl CDd {
    fn mul(self, o: CDd) -> CDd {
        CDd { re: self.re.mul(o.re).add(self.im.mul(o.im).neg()), im: self.re.mul(o.im).add(self.im.mul(o.re)) }
    }

    fn add(self, o: CDd) -> CDd {
        CDd { re: self.re.add(o.re), im: self.im.add(o.im) }
    }

    fn div_f64(self, d: f64) -> CDd {
        CDd { re: self.re.div_f64(d), im: self.im.div_f64(d) }
    }

    fn norm_hi(self) -> f64 {
        self.re.hi.hypot(self.im.hi)
    }
}

/// `z²` as a double-double pair.
fn square_dd(z: Complex64) -> CDd {
    let re = Dd::from_prod(z.re, z.re).add(Dd::from_prod(z.im, z.im).neg());
    let im = Dd::from_prod(z.re, z.im);
    CDd { re, im: im.add(im) }
}

fn maclaurin(z: Complex64) -> Complex64 {
    let zz = square_dd(z);
    let minus_z2 = CDd { re: zz.re.neg(), im: zz.im.neg() };
    let mut term = CDd { re: Dd { hi: z.re, lo: 0.0 }, im: Dd { hi: z.im, lo: 0.0 } };
    let mut sum = term;
    for n in 1..400 {
        term = term.mul(minus_z2).div_f64(n as f64);
        let contrib = term.div_f64((2 * n + 1) as f64);
        sum = sum.add(contrib);
        if contrib.norm_hi() <= 1e-34 * sum.norm_hi().max(1e-300) && n as f64 > z.norm_sqr() {
            break;
        }
    }
    let c = Dd { hi: TWO_OVER_SQRT_PI_HI, lo: TWO_OVER_SQRT_PI_LO };
    let out = CDd { re: sum.re.mul(c), im: sum.im.mul(c) };
    Complex64::new(out.re.hi + out.re.lo, out.im.hi + out.im.lo)
}

/// `e^{-z²}` with the phase `Im z²` reduced in double-double.
fn exp_minus_square(z: Complex64) -> Complex64 {
    let zz = square_dd(z);
    let k = (zz.im.hi / TAU).round();
    let kt = Dd::from_prod(k, TAU).add(Dd { hi: k * TAU_LO, lo: 0.0 });
    let phase = zz.im.add(kt.neg());
    let re = zz.re.hi + zz.re.lo;
    Complex64::from_polar((-re).exp(), -(phase.hi + phase.lo))
}

/// `1/(z + (1/2)/(z + 1/(z + (3/2)/(z + …))))`, evaluated backward with `terms` levels.
fn laplace_fraction(z: Complex64, terms: usize) -> Complex64 {
    let mut t = z;
    for k in (1..=terms).rev() {
        t = z + (k as f64 * 0.5) / t;
    }
    t.inv()
}

fn converged_fraction(z: Complex64) -> Complex64 {
    let mut terms = 32;
    let mut prev = laplace_fraction(z, terms);
    loop {
        terms *= 2;
        let next = laplace_fraction(z, terms);
        if (next - prev).norm() <= 1e-16 * next.norm() || terms >= 1 << 16 {
            return next;
        }
        prev = next;
    }
}

/// Faddeeva function `w(z) = e^{-z²} erfc(-iz)` for `Im z > 0` and `|z| > 4`,
/// from its continued fraction.
pub fn faddeeva_w_large(z: Complex64) -> Complex64 {
    // w(z) = erfc(-iz)e^{-z²}, and erfc(ζ)e^{ζ²} = K(ζ)/√π with ζ = -iz
    converged_fraction(Complex64::new(z.im, -z.re)) / PI.sqrt()
}

fn erf_right_half(z: Complex64) -> Complex64 {
    let r = z.norm();
    // Near the imaginary axis the series does not cancel and the fraction converges slowly.
    if r <= SERIES_RADIUS || (z.re < 0.25 * z.im.abs() && r <= 12.0) {
        return maclaurin(z);
    }
    let w = faddeeva_w_large(Complex64::new(-z.im, z.re));
    Complex64::new(1.0, 0.0) - exp_minus_square(z) * w
}

/// Entire error function `erf(z) = 2/√π ∫_0^z e^{-ξ²} dξ`.
pub fn complex_erf(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Range(format!("erf argument {z} is not finite")));
    }
    let re_sq = (z.re - z.im) * (z.re + z.im);
    if re_sq.abs() >= OVERFLOW_GUARD {
        return Err(Error::Range(format!("erf argument {z}: |Re z²| = {:.1} exceeds {OVERFLOW_GUARD}", re_sq.abs())));
    }
    if z.re < 0.0 {
        return Ok(-erf_right_half(-z));
    }
    Ok(erf_right_half(z))
}

/// Complementary error function `1 − erf(z)`, accurate where `erf(z) ≈ 1`.
pub fn complex_erfc(z: Complex64) -> Result<Complex64> {
    complex_erf(z)?;
    if z.re > 0.0 && z.norm() > SERIES_RADIUS && z.re >= 0.25 * z.im.abs() {
        let w = faddeeva_w_large(Complex64::new(-z.im, z.re));
        return Ok(exp_minus_square(z) * w);
    }
    Ok(Complex64::new(1.0, 0.0) - complex_erf(z)?)
}
