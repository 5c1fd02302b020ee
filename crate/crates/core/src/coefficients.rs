//! Coefficients `C_{k,l}` of the iterated integration-by-parts formula.
//!
//! `C_{k,0} = (-1/2)^{k+1}` and
//! `C_{k,l+1} = Σ_{i=0}^{k} (-1)^{i+k} (i+1+2l) / 2^{k+1-i} · C_{i,l}`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest accepted `n_max` / `m_max`.
pub const MAX_TABLE_ORDER: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    n_max: usize,
    m_max: usize,
    /// `values[k][l]`
    values: Vec<Vec<f64>>,
}

impl CoefficientTable {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.values[k][l]
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// `k,l,value` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,l,value\n");
        for (k, row) in self.values.iter().enumerate() {
            for (l, v) in row.iter().enumerate() {
                let _ = writeln!(out, "{k},{l},{v:e}");
            }
        }
        out
    }
}

fn neumaier(terms: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

pub fn build_table(n_max: usize, m_max: usize) -> Result<CoefficientTable> {
    if n_max > MAX_TABLE_ORDER {
        return Err(Error::Sizing(n_max));
    }
    if m_max > MAX_TABLE_ORDER {
        return Err(Error::Sizing(m_max));
    }
    let mut values = vec![vec![0.0; m_max + 1]; n_max + 1];
    let mut c0 = -0.5;
    for row in values.iter_mut() {
        row[0] = c0;
        c0 *= -0.5;
    }
    for l in 0..m_max {
        for k in 0..=n_max {
            let next = neumaier((0..=k).map(|i| {
                let sign = if (i + k) % 2 == 0 { 1.0 } else { -1.0 };
                let weight = (i + 1 + 2 * l) as f64 * 0.5f64.powi((k + 1 - i) as i32);
                sign * weight * values[i][l]
            }));
            values[k][l + 1] = next;
        }
    }
    if values.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Range(format!("coefficient table {n_max}x{m_max} overflowed")));
    }
    Ok(CoefficientTable { n_max, m_max, values })
}

/// Shared table for `(n_max, m_max)`, built once per process.
pub fn cached_table(n_max: usize, m_max: usize) -> Result<Arc<CoefficientTable>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<CoefficientTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().expect("coefficient cache poisoned").get(&(n_max, m_max)) {
        return Ok(t.clone());
    }
    let t = Arc::new(build_table(n_max, m_max)?);
    cache.lock().expect("coefficient cache poisoned").insert((n_max, m_max), t.clone());
    Ok(t)
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub identity: &'static str,
    pub k: usize,
    pub l: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub rel_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub tolerance: f64,
    pub max_rel_error: f64,
    pub checks: Vec<IdentityCheck>,
    pub pass: bool,
}

impl IdentityReport {
    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

pub const IDENTITY_TOLERANCE: f64 = 1e-13;

fn rel_diff(lhs: f64, rhs: f64) -> f64 {
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).abs() / scale
    }
}

/// Checks `C_{n,0} = -C_{n-1,0}/2`, `C_{0,m+1} = (1+2m)/2·C_{0,m}` and
/// `C_{K,m+1} - (K+2+2m)C_{K+1,m} = -2C_{K+1,m+1}` over the whole table.
pub fn check_proof_identities(t: &CoefficientTable) -> IdentityReport {
    let mut checks = Vec::new();
    let mut push = |identity, k, l, lhs: f64, rhs: f64| {
        let rel_error = rel_diff(lhs, rhs);
        checks.push(IdentityCheck { identity, k, l, lhs, rhs, rel_error, pass: rel_error <= IDENTITY_TOLERANCE });
    };
    for n in 1..=t.n_max {
        push("first_column_halving", n, 0, t.get(n, 0), -0.5 * t.get(n - 1, 0));
    }
    for m in 0..t.m_max {
        push("first_row_growth", 0, m + 1, t.get(0, m + 1), (1 + 2 * m) as f64 / 2.0 * t.get(0, m));
    }
    for k in 0..t.n_max {
        for m in 0..t.m_max {
            let lhs = t.get(k, m + 1) - (k + 2 + 2 * m) as f64 * t.get(k + 1, m);
            push("k_relation", k, m, lhs, -2.0 * t.get(k + 1, m + 1));
        }
    }
    let max_rel_error = checks.iter().map(|c| c.rel_error).fold(0.0, f64::max);
    let pass = checks.iter().all(|c| c.pass);
    IdentityReport { tolerance: IDENTITY_TOLERANCE, max_rel_error, checks, pass }
}

/// Exact rational table used to certify the floating-point one.
#[cfg(feature = "exact-rational")]
pub mod exact {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Signed, ToPrimitive, Zero};

    use super::CoefficientTable;

    pub fn exact_table(n_max: usize, m_max: usize) -> Vec<Vec<BigRational>> {
        let half = BigRational::new(BigInt::from(-1), BigInt::from(2));
        let mut values = vec![vec![BigRational::zero(); m_max + 1]; n_max + 1];
        let mut c0 = half.clone();
        for row in values.iter_mut() {
            row[0] = c0.clone();
            c0 = &c0 * &half;
        }
        for l in 0..m_max {
            for k in 0..=n_max {
                let mut acc = BigRational::zero();
                for i in 0..=k {
                    let denom = BigInt::one() << (k + 1 - i);
                    let mut w = BigRational::new(BigInt::from(i + 1 + 2 * l), denom);
                    if (i + k) % 2 == 1 {
                        w = -w;
                    }
                    acc += w * &values[i][l];
                }
                values[k][l + 1] = acc;
            }
        }
        values
    }

    /// Largest relative deviation of the float table from the exact one.
    pub fn max_relative_deviation(t: &CoefficientTable) -> f64 {
        let exact = exact_table(t.n_max(), t.m_max());
        let mut worst = 0.0f64;
        for (k, row) in exact.iter().enumerate() {
            for (l, e) in row.iter().enumerate() {
                let diff = BigRational::from_float(t.get(k, l)).expect("finite") - e;
                if e.is_zero() {
                    worst = worst.max(diff.abs().to_f64().unwrap_or(f64::INFINITY));
                } else {
                    let rel = (diff / e).abs().to_f64().unwrap_or(f64::INFINITY);
                    worst = worst.max(rel);
                }
            }
        }
        worst
    }
}
