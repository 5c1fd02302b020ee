//! Sequence accelerators: Richardson on a geometric ladder, binomial
//! (Euler) averaging of partial sums, and Wynn's epsilon algorithm.

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RichardsonEstimate {
    pub value: Complex64,
    pub order: usize,
    pub residual: f64,
}

/// Neville table for values sampled at `h_j = h_0·ratio^j`, assuming an
/// expansion in integer powers of `h`. `table[j][p]` eliminates `h¹..h^p`.
pub fn richardson_table(values: &[Complex64], ratio: f64) -> Vec<Vec<Complex64>> {
    let mut table: Vec<Vec<Complex64>> = Vec::with_capacity(values.len());
    for (j, v) in values.iter().enumerate() {
        let mut row = vec![*v];
        for p in 1..=j {
            let fac = ratio.powi(-(p as i32)) - 1.0;
            let cur = row[p - 1];
            let prev = table[j - 1][p - 1];
            row.push(cur + (cur - prev) / fac);
        }
        table.push(row);
    }
    table
}

/// Picks the order in `1..=max_order` with the smallest residual
/// `|T[j][p] - T[j-1][p]|` on the last row.
pub fn best_richardson(values: &[Complex64], ratio: f64, max_order: usize) -> Option<RichardsonEstimate> {
    let j = values.len().checked_sub(1)?;
    if j < 2 {
        return None;
    }
    let table = richardson_table(values, ratio);
    let mut best: Option<RichardsonEstimate> = None;
    for p in 1..=max_order.min(j - 1) {
        let residual = (table[j][p] - table[j - 1][p]).norm();
        if best.map_or(true, |b| residual < b.residual) {
            best = Some(RichardsonEstimate { value: table[j][p], order: p, residual });
        }
    }
    best
}

/// Binomially weighted mean of consecutive partial sums; repeated pairwise
/// averaging of an alternating sequence.
pub fn euler_average(partials: &[Complex64]) -> Complex64 {
    let k = partials.len() - 1;
    let mut w = 0.5f64.powi(k as i32);
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, s) in partials.iter().enumerate() {
        acc += s * w;
        w = w * (k - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Wynn's epsilon algorithm. Returns the last entry of the highest even
/// column and the distance to the previous even column as an error proxy.
pub fn wynn_epsilon(seq: &[Complex64]) -> (Complex64, f64) {
    let n = seq.len();
    assert!(n >= 2, "need at least two terms");
    let zero = Complex64::new(0.0, 0.0);
    let mut prev = vec![zero; n + 1];
    let mut cur = seq.to_vec();
    let mut best = seq[n - 1];
    let mut err = (seq[n - 1] - seq[n - 2]).norm();
    for k in 1..n {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for j in 0..cur.len() - 1 {
            let d = cur[j + 1] - cur[j];
            if d.norm() <= f64::MIN_POSITIVE * 1e4 || !d.norm().is_finite() {
                return (best, err);
            }
            next.push(prev[j + 1] + d.inv());
        }
        if k % 2 == 0 {
            let est = next[next.len() - 1];
            if !(est.re.is_finite() && est.im.is_finite()) {
                return (best, err);
            }
            err = (est - best).norm();
            best = est;
        }
        prev = cur;
        cur = next;
        if cur.len() < 2 {
            break;
        }
    }
    (best, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn richardson_removes_polynomial_error() {
        // v(h) = 3 + 2h - h² + 0.5h³, exact after three eliminations
        let vals: Vec<Complex64> =
            (0..6).map(|j| 0.1 * 0.5f64.powi(j)).map(|h| c(3.0 + 2.0 * h - h * h + 0.5 * h * h * h)).collect();
        let est = best_richardson(&vals, 0.5, 4).unwrap();
        assert!((est.value - c(3.0)).norm() < 1e-13, "{est:?}");
    }

    #[test]
    fn euler_sums_alternating_harmonic() {
        let mut partials = vec![c(0.0)];
        for j in 1..=60 {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            let last = *partials.last().unwrap();
            partials.push(last + c(sign / j as f64));
        }
        let est = euler_average(&partials[30..=54]);
        assert!((est.re - std::f64::consts::LN_2).abs() < 1e-14, "{}", est.re - std::f64::consts::LN_2);
    }

    #[test]
    fn wynn_sums_leibniz_series() {
        let mut s = c(0.0);
        let mut partials = Vec::new();
        for j in 0..20 {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            s += c(sign / (2 * j + 1) as f64);
            partials.push(s);
        }
        let (est, _) = wynn_epsilon(&partials);
        assert!((est.re - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
    }
}
