//! Truncated Taylor jets and the closed-form function catalog.
//!
//! A [`Jet`] stores scaled coefficients `f⁽ᵏ⁾(y)/k!`. A [`JetExpr`] is a small
//! expression tree over catalog leaves, combined with sums, products,
//! scalars, conjugation and affine changes of the argument.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * j as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    coeffs: Vec<Complex64>,
}

impl Jet {
    /// Builds a jet from scaled coefficients. Panics on an empty vector.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least one coefficient");
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![Complex64::new(0.0, 0.0); order + 1] }
    }

    pub fn constant(c: Complex64, order: usize) -> Self {
        let mut j = Self::zero(order);
        j.coeffs[0] = c;
        j
    }

    /// Builds a jet from raw derivatives `f, f', f'', ...`.
    pub fn from_derivatives(derivs: &[Complex64]) -> Self {
        let coeffs = derivs.iter().enumerate().map(|(k, d)| d / factorial(k)).collect();
        Self::new(coeffs)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Raw k-th derivative `k!·coeffs[k]`.
    pub fn derivative(&self, k: usize) -> Complex64 {
        self.coeffs[k] * factorial(k)
    }

    pub fn derivatives(&self) -> Vec<Complex64> {
        (0..=self.order()).map(|k| self.derivative(k)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn try_add(&self, other: &Jet) -> Result<Jet> {
        self.check_order(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn try_sub(&self, other: &Jet) -> Result<Jet> {
        self.check_order(other)?;
        Ok(Jet::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect()))
    }

    /// Cauchy product of the truncated series.
    pub fn try_mul(&self, other: &Jet) -> Result<Jet> {
        self.check_order(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn scale(&self, c: Complex64) -> Jet {
        Jet::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn conj(&self) -> Jet {
        Jet::new(self.coeffs.iter().map(|x| x.conj()).collect())
    }

    fn check_order(&self, other: &Jet) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch { left: self.order(), right: other.order() });
        }
        Ok(())
    }

    fn add_unchecked(&self, other: &Jet) -> Jet {
        Jet::new(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect())
    }

    fn mul_unchecked(&self, other: &Jet) -> Jet {
        let n = self.order();
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        for (k, slot) in out.iter_mut().enumerate() {
            for l in 0..=k {
                *slot += self.coeffs[l] * other.coeffs[k - l];
            }
        }
        Jet::new(out)
    }
}

pub fn jet_add(a: &Jet, b: &Jet) -> Result<Jet> {
    a.try_add(b)
}

pub fn jet_mul(a: &Jet, b: &Jet) -> Result<Jet> {
    a.try_mul(b)
}

/// User-supplied jet source. Not certified: norm estimates for it are heuristic.
pub struct CustomJet {
    pub name: String,
    /// Polynomial growth order on the real line.
    pub growth: f64,
    #[allow(clippy::type_complexity)]
    pub eval: Box<dyn Fn(f64, usize) -> Jet + Send + Sync>,
}

impl fmt::Debug for CustomJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CustomJet({})", self.name)
    }
}

#[derive(Debug, Clone)]
pub enum JetExpr {
    Zero,
    Const(Complex64),
    /// `e^{iκy}`; κ may be complex.
    ExpI(Complex64),
    /// `Σ c_j y^j`.
    Poly(Vec<Complex64>),
    Monomial(u32),
    /// `y^p`, only defined for y > 0.
    Power(f64),
    /// `e^{-εy²}`.
    Gaussian(f64),
    /// `1/(1+y²)`.
    Lorentzian,
    /// `inner(scale·y + shift)`.
    Affine { scale: f64, shift: f64, inner: Box<JetExpr> },
    Sum(Box<JetExpr>, Box<JetExpr>),
    Product(Box<JetExpr>, Box<JetExpr>),
    Scale(Complex64, Box<JetExpr>),
    Conj(Box<JetExpr>),
    Custom(Arc<CustomJet>),
}

impl JetExpr {
    pub fn exp_i(kappa: f64) -> Self {
        JetExpr::ExpI(Complex64::new(kappa, 0.0))
    }

    pub fn constant(c: f64) -> Self {
        JetExpr::Const(Complex64::new(c, 0.0))
    }

    pub fn poly(coeffs: &[f64]) -> Self {
        JetExpr::Poly(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn shift(self, x: f64) -> Self {
        self.affine(1.0, x)
    }

    pub fn affine(self, scale: f64, shift: f64) -> Self {
        JetExpr::Affine { scale, shift, inner: Box::new(self) }
    }

    pub fn add(self, other: JetExpr) -> Self {
        JetExpr::Sum(Box::new(self), Box::new(other))
    }

    pub fn mul(self, other: JetExpr) -> Self {
        JetExpr::Product(Box::new(self), Box::new(other))
    }

    pub fn scale(self, c: Complex64) -> Self {
        JetExpr::Scale(c, Box::new(self))
    }

    pub fn scale_re(self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn conj(self) -> Self {
        JetExpr::Conj(Box::new(self))
    }

    pub fn custom(
        name: &str,
        growth: f64,
        eval: impl Fn(f64, usize) -> Jet + Send + Sync + 'static,
    ) -> Self {
        JetExpr::Custom(Arc::new(CustomJet { name: name.to_string(), growth, eval: Box::new(eval) }))
    }

    /// Jet of the given order at `y`. Values may be non-finite outside the domain.
    pub fn jet(&self, y: f64, order: usize) -> Jet {
        match self {
            JetExpr::Zero => Jet::zero(order),
            JetExpr::Const(c) => Jet::constant(*c, order),
            JetExpr::ExpI(kappa) => {
                let ik = I * kappa;
                let mut c = Vec::with_capacity(order + 1);
                c.push((ik * y).exp());
                for k in 1..=order {
                    let prev = c[k - 1];
                    c.push(prev * ik / k as f64);
                }
                Jet::new(c)
            }
            JetExpr::Poly(p) => poly_jet(p, y, order),
            JetExpr::Monomial(m) => {
                let m = *m as usize;
                let mut c = vec![Complex64::new(0.0, 0.0); order + 1];
                let mut binom = 1.0;
                for (k, slot) in c.iter_mut().enumerate().take(m.min(order) + 1) {
                    if k > 0 {
                        binom = binom * (m + 1 - k) as f64 / k as f64;
                    }
                    *slot = Complex64::new(binom * y.powi((m - k) as i32), 0.0);
                }
                Jet::new(c)
            }
            JetExpr::Power(p) => {
                let mut c = Vec::with_capacity(order + 1);
                let mut g = 1.0;
                let base = y.powf(*p);
                let mut yk = 1.0;
                for k in 0..=order {
                    if k > 0 {
                        g = g * (p - (k - 1) as f64) / k as f64;
                        yk *= y;
                    }
                    c.push(Complex64::new(g * base / yk, 0.0));
                }
                Jet::new(c)
            }
            JetExpr::Gaussian(eps) => {
                let mut c = vec![0.0; order + 1];
                c[0] = (-eps * y * y).exp();
                if order >= 1 {
                    c[1] = -2.0 * eps * y * c[0];
                }
                for k in 1..order {
                    c[k + 1] = -2.0 * eps * (y * c[k] + c[k - 1]) / (k + 1) as f64;
                }
                Jet::new(c.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
            }
            JetExpr::Lorentzian => {
                let w = Complex64::new(y, -1.0).inv();
                let mut term = w;
                let mut c = Vec::with_capacity(order + 1);
                for k in 0..=order {
                    if k > 0 {
                        term = -term * w;
                    }
                    c.push(Complex64::new(term.im, 0.0));
                }
                Jet::new(c)
            }
            JetExpr::Affine { scale, shift, inner } => {
                let mut j = inner.jet(scale * y + shift, order);
                if *scale != 1.0 {
                    let mut s = 1.0;
                    for c in j.coeffs.iter_mut() {
                        *c *= s;
                        s *= scale;
                    }
                }
                j
            }
            JetExpr::Sum(a, b) => a.jet(y, order).add_unchecked(&b.jet(y, order)),
            JetExpr::Product(a, b) => a.jet(y, order).mul_unchecked(&b.jet(y, order)),
            JetExpr::Scale(c, a) => a.jet(y, order).scale(*c),
            JetExpr::Conj(a) => a.jet(y, order).conj(),
            JetExpr::Custom(c) => {
                let j = (c.eval)(y, order);
                if j.order() == order {
                    j
                } else {
                    let mut coeffs = j.coeffs;
                    coeffs.resize(order + 1, Complex64::new(f64::NAN, f64::NAN));
                    Jet::new(coeffs)
                }
            }
        }
    }

    /// Value only; cheaper than a full jet for most leaves.
    pub fn value(&self, y: f64) -> Complex64 {
        match self {
            JetExpr::Zero => Complex64::new(0.0, 0.0),
            JetExpr::Const(c) => *c,
            JetExpr::ExpI(k) => (I * k * y).exp(),
            JetExpr::Poly(p) => p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * y + c),
            JetExpr::Monomial(m) => Complex64::new(y.powi(*m as i32), 0.0),
            JetExpr::Power(p) => Complex64::new(y.powf(*p), 0.0),
            JetExpr::Gaussian(eps) => Complex64::new((-eps * y * y).exp(), 0.0),
            JetExpr::Lorentzian => Complex64::new(1.0 / (1.0 + y * y), 0.0),
            JetExpr::Affine { scale, shift, inner } => inner.value(scale * y + shift),
            JetExpr::Sum(a, b) => a.value(y) + b.value(y),
            JetExpr::Product(a, b) => a.value(y) * b.value(y),
            JetExpr::Scale(c, a) => a.value(y) * c,
            JetExpr::Conj(a) => a.value(y).conj(),
            JetExpr::Custom(_) => self.jet(y, 0).value(),
        }
    }

    /// Polynomial growth order on the whole real line (`∞` if unbounded by any power).
    pub fn growth(&self) -> f64 {
        match self {
            JetExpr::Zero | JetExpr::Const(_) | JetExpr::Gaussian(_) | JetExpr::Lorentzian => 0.0,
            JetExpr::ExpI(k) => {
                if k.im == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            JetExpr::Poly(p) => p.iter().rposition(|c| *c != Complex64::new(0.0, 0.0)).unwrap_or(0) as f64,
            JetExpr::Monomial(m) => *m as f64,
            JetExpr::Power(_) => f64::INFINITY,
            JetExpr::Affine { inner, .. } => inner.growth(),
            JetExpr::Sum(a, b) => a.growth().max(b.growth()),
            JetExpr::Product(a, b) => a.growth() + b.growth(),
            JetExpr::Scale(_, a) | JetExpr::Conj(a) => a.growth(),
            JetExpr::Custom(c) => c.growth,
        }
    }

    /// Growth order on the half line `y ≥ 0`.
    pub fn growth_right(&self) -> f64 {
        match self {
            JetExpr::ExpI(k) if k.im >= 0.0 => 0.0,
            JetExpr::Power(p) => p.max(0.0),
            JetExpr::Affine { scale, inner, .. } if *scale > 0.0 => inner.growth_right(),
            JetExpr::Sum(a, b) => a.growth_right().max(b.growth_right()),
            JetExpr::Product(a, b) => a.growth_right() + b.growth_right(),
            JetExpr::Scale(_, a) | JetExpr::Conj(a) => a.growth_right(),
            _ => self.growth(),
        }
    }

    /// True when every leaf has closed-form derivatives.
    pub fn is_certified(&self) -> bool {
        match self {
            JetExpr::Custom(_) => false,
            JetExpr::Affine { inner, .. } | JetExpr::Scale(_, inner) | JetExpr::Conj(inner) => {
                inner.is_certified()
            }
            JetExpr::Sum(a, b) | JetExpr::Product(a, b) => a.is_certified() && b.is_certified(),
            _ => true,
        }
    }
}

fn poly_jet(p: &[Complex64], y: f64, order: usize) -> Jet {
    // Ruffini-Horner Taylor shift: afterwards c[k] is the k-th Taylor coefficient at y.
    let mut c: Vec<Complex64> = if p.is_empty() { vec![Complex64::new(0.0, 0.0)] } else { p.to_vec() };
    let deg = c.len() - 1;
    for k in 0..deg.min(order + 1) {
        for j in (k..deg).rev() {
            let next = c[j + 1];
            c[j] += next * y;
        }
    }
    c.resize(order + 1, Complex64::new(0.0, 0.0));
    c.truncate(order + 1);
    Jet::new(c)
}

fn fmt_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else if c.im < 0.0 {
        format!("{}-{}i", c.re, -c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

impl fmt::Display for JetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JetExpr::Zero => write!(f, "zero"),
            JetExpr::Const(c) => write!(f, "const:{}", fmt_complex(*c)),
            JetExpr::ExpI(k) => write!(f, "exp_i:{}", fmt_complex(*k)),
            JetExpr::Poly(p) => {
                let parts: Vec<String> = p.iter().map(|c| fmt_complex(*c)).collect();
                write!(f, "poly:{}", parts.join(","))
            }
            JetExpr::Monomial(m) => write!(f, "mono:{m}"),
            JetExpr::Power(p) => write!(f, "power:{p}"),
            JetExpr::Gaussian(e) => write!(f, "gauss:{e}"),
            JetExpr::Lorentzian => write!(f, "lorentz"),
            JetExpr::Affine { scale, shift, inner } => {
                if *scale == 1.0 {
                    write!(f, "shift:{shift}({inner})")
                } else {
                    write!(f, "affine:{scale},{shift}({inner})")
                }
            }
            JetExpr::Sum(a, b) => write!(f, "sum({a},{b})"),
            JetExpr::Product(a, b) => write!(f, "prod({a},{b})"),
            JetExpr::Scale(c, a) => write!(f, "scale:{}({a})", fmt_complex(*c)),
            JetExpr::Conj(a) => write!(f, "conj({a})"),
            JetExpr::Custom(c) => write!(f, "custom:{}", c.name),
        }
    }
}

impl FromStr for JetExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut p = Parser { s: cleaned.as_bytes(), pos: 0 };
        let e = p.expr()?;
        if p.pos != p.s.len() {
            return Err(p.err("trailing characters"));
        }
        Ok(e)
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> Error {
        let text = String::from_utf8_lossy(self.s);
        invalid(format!("bad function descriptor '{text}' at {}: {what}", self.pos))
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while matches!(self.peek(), Some(b'a'..=b'z' | b'_')) {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.s[start..self.pos]).into_owned()
    }

    fn starts_number(&self) -> bool {
        matches!(self.peek(), Some(b'0'..=b'9' | b'-' | b'+' | b'.'))
    }

    fn number_token(&mut self) -> Result<String> {
        if !self.starts_number() {
            return Err(self.err("expected a number"));
        }
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9' | b'.' | b'e' | b'E' | b'+' | b'-' | b'i')) {
            self.pos += 1;
        }
        Ok(String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }

    fn real(&mut self) -> Result<f64> {
        let tok = self.number_token()?;
        tok.parse::<f64>().map_err(|_| self.err(&format!("'{tok}' is not a real number")))
    }

    fn complex(&mut self) -> Result<Complex64> {
        let tok = self.number_token()?;
        parse_complex(&tok).ok_or_else(|| self.err(&format!("'{tok}' is not a number")))
    }

    fn args(&mut self) -> Result<Vec<JetExpr>> {
        self.expect(b'(')?;
        let mut out = vec![self.expr()?];
        while self.peek() == Some(b',') {
            self.pos += 1;
            out.push(self.expr()?);
        }
        self.expect(b')')?;
        Ok(out)
    }

    fn single_arg(&mut self) -> Result<JetExpr> {
        let mut a = self.args()?;
        if a.len() != 1 {
            return Err(self.err("expected one argument"));
        }
        Ok(a.remove(0))
    }

    fn expr(&mut self) -> Result<JetExpr> {
        let name = self.ident();
        match name.as_str() {
            "zero" => Ok(JetExpr::Zero),
            "lorentz" => Ok(JetExpr::Lorentzian),
            "const" => {
                self.expect(b':')?;
                Ok(JetExpr::Const(self.complex()?))
            }
            "exp_i" => {
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                } else {
                    self.expect(b':')?;
                }
                Ok(JetExpr::ExpI(self.complex()?))
            }
            "poly" => {
                self.expect(b':')?;
                let mut c = vec![self.complex()?];
                // a comma followed by a letter starts the next descriptor, not a coefficient
                while self.peek() == Some(b',')
                    && matches!(self.s.get(self.pos + 1), Some(b'0'..=b'9' | b'-' | b'+' | b'.'))
                {
                    self.pos += 1;
                    c.push(self.complex()?);
                }
                Ok(JetExpr::Poly(c))
            }
            "mono" => {
                self.expect(b':')?;
                let m = self.real()?;
                if m < 0.0 || m.fract() != 0.0 || m > 64.0 {
                    return Err(self.err("monomial degree must be an integer in 0..=64"));
                }
                Ok(JetExpr::Monomial(m as u32))
            }
            "power" => {
                self.expect(b':')?;
                Ok(JetExpr::Power(self.real()?))
            }
            "gauss" => {
                self.expect(b':')?;
                let e = self.real()?;
                if e < 0.0 {
                    return Err(self.err("gaussian width must be nonnegative"));
                }
                Ok(JetExpr::Gaussian(e))
            }
            "shift" => {
                self.expect(b':')?;
                let x = self.real()?;
                Ok(self.single_arg()?.shift(x))
            }
            "affine" => {
                self.expect(b':')?;
                let s = self.real()?;
                self.expect(b',')?;
                let x = self.real()?;
                Ok(self.single_arg()?.affine(s, x))
            }
            "scale" => {
                self.expect(b':')?;
                let c = self.complex()?;
                Ok(self.single_arg()?.scale(c))
            }
            "conj" => Ok(self.single_arg()?.conj()),
            "sum" | "prod" => {
                let args = self.args()?;
                if args.len() < 2 {
                    return Err(self.err("expected at least two arguments"));
                }
                let mut it = args.into_iter();
                let first = it.next().unwrap();
                Ok(it.fold(first, |acc, e| if name == "sum" { acc.add(e) } else { acc.mul(e) }))
            }
            "" => Err(self.err("expected a function name")),
            other => Err(self.err(&format!("unknown function '{other}'"))),
        }
    }
}

/// Parses `1.5`, `-2`, `0.3i`, `1+0.3i`, `1e-3-2i`.
pub fn parse_complex(tok: &str) -> Option<Complex64> {
    if let Some(body) = tok.strip_suffix('i') {
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        match split {
            Some(k) => {
                let re = body[..k].parse::<f64>().ok()?;
                let im_str = &body[k..];
                let im = match im_str {
                    "+" => 1.0,
                    "-" => -1.0,
                    s => s.parse::<f64>().ok()?,
                };
                Some(Complex64::new(re, im))
            }
            None => {
                let im = match body {
                    "" | "+" => 1.0,
                    "-" => -1.0,
                    s => s.parse::<f64>().ok()?,
                };
                Some(Complex64::new(0.0, im))
            }
        }
    } else {
        tok.parse::<f64>().ok().map(|re| Complex64::new(re, 0.0))
    }
}

/// A jet expression evaluated at a fixed maximal order.
#[derive(Debug, Clone)]
pub struct JetFunction {
    expr: JetExpr,
    max_order: usize,
}

impl JetFunction {
    pub fn new(expr: JetExpr, max_order: usize) -> Self {
        Self { expr, max_order }
    }

    pub fn parse(descriptor: &str, max_order: usize) -> Result<Self> {
        Ok(Self::new(descriptor.parse()?, max_order))
    }

    pub fn expr(&self) -> &JetExpr {
        &self.expr
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn descriptor(&self) -> String {
        self.expr.to_string()
    }

    pub fn with_order(&self, max_order: usize) -> Self {
        Self::new(self.expr.clone(), max_order)
    }

    /// Jet of order `max_order` at `y`.
    pub fn eval(&self, y: f64) -> Result<Jet> {
        self.eval_order(y, self.max_order)
    }

    /// Jet of a lower order at `y`.
    pub fn eval_order(&self, y: f64, order: usize) -> Result<Jet> {
        if order > self.max_order {
            return Err(Error::OrderTooHigh { requested: order, max: self.max_order });
        }
        let j = self.expr.jet(y, order);
        if !j.is_finite() {
            return Err(Error::NonFinite { y });
        }
        Ok(j)
    }

    pub fn value(&self, y: f64) -> Complex64 {
        self.expr.value(y)
    }

    pub fn shift(&self, x: f64) -> Self {
        Self::new(self.expr.clone().shift(x), self.max_order)
    }

    pub fn growth(&self) -> f64 {
        self.expr.growth()
    }

    pub fn is_certified(&self) -> bool {
        self.expr.is_certified()
    }
}

/// Keys of the closed-form catalog.
pub const CATALOG_KEYS: [&str; 8] =
    ["zero", "constant", "exp_i_kappa", "monomial", "polynomial", "gaussian", "power", "lorentzian"];

#[derive(Debug, Clone, Copy, Default)]
pub struct Catalog;

pub fn builtin_jet_functions() -> Catalog {
    Catalog
}

impl Catalog {
    pub fn keys(&self) -> &'static [&'static str] {
        &CATALOG_KEYS
    }

    /// Builds a catalog entry from its key and real parameters.
    pub fn get(&self, key: &str, params: &[f64], max_order: usize) -> Result<JetFunction> {
        let need = |k: usize| -> Result<()> {
            if params.len() != k {
                return Err(invalid(format!("catalog entry '{key}' takes {k} parameter(s), got {}", params.len())));
            }
            Ok(())
        };
        let expr = match key {
            "zero" => {
                need(0)?;
                JetExpr::Zero
            }
            "lorentzian" => {
                need(0)?;
                JetExpr::Lorentzian
            }
            "constant" => {
                need(1)?;
                JetExpr::constant(params[0])
            }
            "exp_i_kappa" => {
                need(1)?;
                JetExpr::exp_i(params[0])
            }
            "monomial" => {
                need(1)?;
                if params[0] < 0.0 || params[0].fract() != 0.0 {
                    return Err(invalid("monomial degree must be a nonnegative integer"));
                }
                JetExpr::Monomial(params[0] as u32)
            }
            "polynomial" => JetExpr::poly(params),
            "gaussian" => {
                need(1)?;
                JetExpr::Gaussian(params[0])
            }
            "power" => {
                need(1)?;
                JetExpr::Power(params[0])
            }
            other => return Err(invalid(format!("unknown catalog key '{other}'"))),
        };
        Ok(JetFunction::new(expr, max_order))
    }
}
