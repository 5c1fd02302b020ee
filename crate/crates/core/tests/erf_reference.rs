//! Complex error function against a 50-digit arbitrary-precision table.

use oscint::free_particle::{complex_erf, complex_erfc};
use oscint::Complex64;

/// `(Re z, Im z, Re erf z, Im erf z)`.
const TABLE: &[(f64, f64, f64, f64)] = &[
    (0.5, 0.0, 0.5204998778130465376827, 0.0),
    (1.0, 0.0, 0.8427007929497148693412, 0.0),
    (2.5, 0.0, 0.9995930479825550410604, 0.0),
    (4.0, 0.0, 0.99999998458274209972, 0.0),
    (6.0, 0.0, 0.9999999999999999784803, 0.0),
    (0.0, 1.0, 0.0, 1.650425758797542876025),
    (0.0, 3.5, 0.0, 35282.28771517168531016),
    (0.3, 0.4, 0.3820432325830179206545, 0.4312520362319641622386),
    (1.0, 1.0, 1.31615128169794764488, 0.1904534692378346862841),
    (-1.5, 2.0, 0.1050492897740175326637, 0.6995116861631244569492),
    (3.0, -3.0, 0.8678264975754511421471, 0.01215218179031225651395),
    (3.9, 0.5, 1.000000028309377580575, -3.416184184207104982255e-8),
    (4.1, 0.5, 1.000000004077784955201, -7.513480105290244396044e-9),
    (5.0, 5.0, 0.9303796037430951158536, 0.03893619089512137895395),
    (7.0, -2.0, 1.000000000000000000002, -1.823153549377951352462e-24),
    (2.0, 6.0, -7073713254161.2668886, 769850245397.4172657519),
    (-8.0, 1.0, -1.0, -1.219870461950460400794e-29),
    (0.01, 0.02, 0.01128792952386213724245, 0.02256833516582954042152),
    (9.5, 0.1, 1.0, 3.589451866560209864582e-41),
    (1e-08, 1e-08, 1.12837916709551267273e-8, 1.128379167095512522279e-8),
    (6.5, 6.5, 1.055086584151028747204, -0.02705162759393158055216),
    (0.7, -4.2, -2091120.036058353081088, -3200597.85288323298525),
    (2.8, 2.9, 1.065068706523575589537, -0.2384573400211579348688),
];

fn tol(reference: Complex64) -> f64 {
    1e-13 * reference.norm().max(1.0)
}

#[test]
fn erf_matches_reference_table() {
    for &(x, y, re, im) in TABLE {
        let z = Complex64::new(x, y);
        let want = Complex64::new(re, im);
        let got = complex_erf(z).unwrap();
        assert!((got - want).norm() <= tol(want), "erf({z}) = {got}, reference {want}");
    }
}

#[test]
fn erfc_is_one_minus_erf_on_reference_table() {
    for &(x, y, re, im) in TABLE {
        let z = Complex64::new(x, y);
        let want = Complex64::new(1.0 - re, -im);
        let got = complex_erfc(z).unwrap();
        assert!((got - want).norm() <= tol(want).max(1e-13), "erfc({z}) = {got}, reference {want}");
    }
}

#[test]
fn switchover_radius_is_continuous() {
    for k in 0..32 {
        let th = k as f64 * std::f64::consts::TAU / 32.0;
        let inner = Complex64::from_polar(4.0 - 1e-13, th);
        let outer = Complex64::from_polar(4.0 + 1e-13, th);
        let (a, b) = (complex_erf(inner).unwrap(), complex_erf(outer).unwrap());
        // erf changes by |erf′|·|Δz| across the gap
        let slope = 2.0 / std::f64::consts::PI.sqrt() * (-(inner * inner)).exp().norm();
        let allowed = 2e-13 * a.norm().max(1.0) + slope * (outer - inner).norm();
        assert!((a - b).norm() <= allowed, "jump at angle {th}: {a} vs {b}");
    }
}
