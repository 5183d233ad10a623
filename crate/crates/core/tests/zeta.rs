use std::f64::consts::PI;

use num_complex::Complex64 as C;
use proptest::prelude::*;
use twisted_core::arith::{sieve, Kind};
use twisted_core::zeta::*;

fn close(a: C, b: C, tol: f64) -> bool {
    (a - b).norm() <= tol * b.norm()
}

/// `ζ(3)` by direct summation with an Euler–Maclaurin tail.
fn zeta3() -> f64 {
    let n = 10_000.0f64;
    let head: f64 = (1..10_000).map(|k| (k as f64).powi(-3)).sum();
    head + 1.0 / (2.0 * n * n) + 0.5 / n.powi(3) + 0.25 / n.powi(4)
}

/// Central differences of `ζ` at step `h` and `h/2`, Richardson-combined.
fn richardson(s: C, order: u32, h: f64) -> C {
    let d = |h: f64| -> C {
        let f = |z: C| zeta_complex(z).unwrap();
        let h = C::new(h, 0.0);
        match order {
            1 => (f(s + h) - f(s - h)) / (2.0 * h),
            _ => (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h),
        }
    };
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

#[test]
fn reference_values() {
    // computed with mpmath at 30 digits
    let cases = [
        (C::new(0.3, 20.0), C::new(0.26899441575398691, -1.2884234180483038)),
        (C::new(2.0, 100.0), C::new(1.190780408775217, -0.053890959354260458)),
        (C::new(-3.5, 10.0), C::new(5.8400950126549733, 4.4562400518472652)),
        (C::new(-1.5, -40.0), C::new(-4.3057635324901013, 37.086743062056253)),
        (C::new(4.0, -120.0), C::new(1.0135082311872565, 0.06070919852359687)),
    ];
    for (s, z) in cases {
        assert!(close(zeta_complex(s).unwrap(), z, 1e-10), "s = {s}");
    }
    let w = bundled_zeros().zero(0);
    assert!(close(zeta_derivative(w, 1).unwrap(), C::new(0.78329651186703093, 0.12469982974817109), 1e-10));
    let d2 = zeta_derivative(C::new(0.5, 5.0), 2).unwrap();
    assert!(close(d2, C::new(-0.041137100958319385, 0.028971728154947285), 1e-10));
    let g = gamma_complex(C::new(0.25, 7.0)).unwrap();
    assert!(close(g, C::new(2.5820035094033418e-5, -1.3703869497676168e-6), 1e-12));
}

#[test]
fn closed_form_derivatives() {
    let z3 = zeta3();
    let d = zeta_derivative(C::new(-2.0, 0.0), 1).unwrap();
    assert!((d.re + z3 / (4.0 * PI * PI)).abs() < 1e-13);
    let d = zeta_derivative(C::new(0.0, 0.0), 1).unwrap();
    assert!((d.re + 0.5 * (2.0 * PI).ln()).abs() < 1e-13);
    // −Σ log n/n², tail by Euler–Maclaurin on log t/t²
    let n = 100_000.0f64;
    let head: f64 = (2..100_000).map(|k| -(k as f64).ln() / (k as f64).powi(2)).sum();
    let tail = -((n.ln() + 1.0) / n) - 0.5 * n.ln() / (n * n);
    let d = zeta_derivative(C::new(2.0, 0.0), 1).unwrap();
    assert!((d.re - (head + tail)).abs() < 1e-10);
    assert!(zeta_derivative(C::new(1.0, 0.0), 1).is_err());
    assert!(zeta_derivative(C::new(2.0, 0.0), 3).is_err());
}

#[test]
fn derivatives_match_richardson_differences() {
    let zeros = bundled_zeros();
    let points = [C::new(0.5, 3.0), C::new(2.5, -7.0), C::new(-1.2, 4.0), C::new(-3.3, 0.7), zeros.zero(0), zeros.zero(9)];
    for s in points {
        let d1 = zeta_derivative(s, 1).unwrap();
        let d2 = zeta_derivative(s, 2).unwrap();
        assert!(close(d1, richardson(s, 1, 1e-3), 1e-8), "ζ′ at {s}");
        assert!(close(d2, richardson(s, 2, 1e-2), 1e-6), "ζ″ at {s}");
    }
}

#[test]
fn functional_equation_on_the_strip() {
    // ζ(s) = 2^s π^{s−1} sin(πs/2) Γ(1−s) ζ(1−s)
    for i in 1..10 {
        for j in -12..=12 {
            let s = C::new(i as f64 / 10.0, 2.5 * j as f64);
            let one = C::new(1.0, 0.0);
            let chi = C::new(2.0, 0.0).powc(s) * C::new(PI, 0.0).powc(s - one) * (s * PI / 2.0).sin() * gamma_complex(one - s).unwrap();
            let lhs = zeta_complex(s).unwrap();
            assert!(close(lhs, chi * zeta_complex(one - s).unwrap(), 1e-9), "s = {s}");
        }
    }
}

#[test]
fn gamma_and_digamma() {
    assert!((gamma_complex(C::new(0.5, 0.0)).unwrap().re - PI.sqrt()).abs() < 1e-14);
    assert!((gamma_complex(C::new(5.0, 0.0)).unwrap().re - 24.0).abs() < 1e-12);
    let euler = 0.5772156649015329;
    assert!((digamma(2.0).unwrap() - (1.0 - euler)).abs() < 1e-14);
    assert!((digamma(1.0).unwrap() + euler).abs() < 1e-14);
    assert!(gamma_complex(C::new(0.0, 0.0)).is_err());
    assert!(digamma(-2.0).is_err());
}

/// Residue of `Γ(s)ζ(s+1)ζ(s)y^s/ζ(2s)` at `s = −n` by the trapezoid rule on
/// a circle of radius ¼; nearest other singularity is at distance 1.
fn residue(n: u32, y: f64) -> f64 {
    let m = 256;
    let centre = C::new(-(n as f64), 0.0);
    let acc: C = (0..m)
        .map(|k| {
            let u = C::from_polar(0.25, 2.0 * PI * (k as f64 + 0.5) / m as f64);
            let s = centre + u;
            let f = gamma_complex(s).unwrap() * zeta_complex(s + 1.0).unwrap() * zeta_complex(s).unwrap()
                / zeta_complex(2.0 * s).unwrap()
                * (s * y.ln()).exp();
            f * u
        })
        .sum();
    (acc / m as f64).re
}

#[test]
fn trivial_coeffs_match_contour_residues() {
    for n in 1..=8 {
        let (c1, c2) = trivial_coeffs(n).unwrap();
        // (c₁ log y + c₂) y^{−n} at two values of y determines (c₁, c₂)
        let (ya, yb) = (2.0f64, 7.0f64);
        let ra = residue(n, ya) * ya.powi(n as i32);
        let rb = residue(n, yb) * yb.powi(n as i32);
        let e1 = (rb - ra) / (yb.ln() - ya.ln());
        let e2 = ra - e1 * ya.ln();
        let scale = c1.abs().max(c2.abs());
        assert!((c1 - e1).abs() <= 1e-9 * scale, "c1({n}) = {c1}, contour {e1}");
        assert!((c2 - e2).abs() <= 1e-9 * scale, "c2({n}) = {c2}, contour {e2}");
    }
}

#[test]
fn trivial_coeffs_closed_forms() {
    let z3 = zeta3();
    let (c1, _) = trivial_coeffs(1).unwrap();
    assert!((c1 - PI * PI / (12.0 * z3)).abs() < 1e-13);
    for n in 2..=20 {
        assert_eq!(trivial_coeffs(n).unwrap().0, 0.0, "n = {n}");
    }
    // ζ′(−2n) = (−1)^n (2n)! ζ(2n+1) / (2 (2π)^{2n}) on the real axis feeding the coefficients
    for n in 1..=6u32 {
        let s = C::new(-2.0 * n as f64, 0.0);
        let z = zeta_complex(C::new(2.0 * n as f64 + 1.0, 0.0)).unwrap().re;
        let fact: f64 = (1..=2 * n).map(f64::from).product();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let expect = sign * fact * z / (2.0 * (2.0 * PI).powi(2 * n as i32));
        assert!((zeta_derivative(s, 1).unwrap().re / expect - 1.0).abs() < 1e-12);
    }
    assert!(trivial_coeffs(0).is_err());
    assert!(trivial_coeffs(21).is_err());
}

#[test]
fn leading_term_and_single_terms() {
    let x = 100.0;
    let p = phi20(x, 0.0);
    assert_eq!(p.im, 0.0);
    assert!((p.re - (x + (x / (2.0 * PI)).ln())).abs() < 1e-12);
    let mu_abs = sieve(&Kind::MuAbs, 10).unwrap();
    let theta = 0.0123;
    let one = phi1_arithmetic(x, theta, 1, 1, &mu_abs).unwrap();
    let expect = C::new(-1.0 / x, 2.0 * PI * theta).exp();
    assert!((one - expect).norm() < 1e-15);
    let small = phi1_arithmetic(0.1, 0.0, 10, 10, &mu_abs).unwrap();
    assert_eq!(small.im, 0.0);
    assert!(small.re > 0.0);
    assert!(phi1_arithmetic(x, theta, 1, 11, &mu_abs).is_err());
    assert!(((theta_of_x(100.0) * 2.0 * PI).powi(2) - (100f64.powf(-4.0 / 3.0) - 1e-4)).abs() < 1e-15);
    let x = 250.0;
    assert!((x * delta_param(x, theta_of_x(x)).powi(3) - 1.0).abs() < 1e-12);
}

#[test]
fn zero_pairs_are_real_on_the_axis() {
    let f = ExplicitFormula::new(&bundled_zeros(), 100, 3).unwrap();
    for x in [5.0, 50.0, 500.0] {
        let z = f.zero_sum(x, 0.0);
        assert!(z.im.abs() <= 1e-12 * z.norm().max(1.0), "X = {x}");
        assert_eq!(f.trivial_sum(x, 0.0).im, 0.0);
    }
}

#[test]
fn explicit_formula_matches_full_double_sum() {
    // with every zero in the table and N past the e^{−60} cutoff the two sides
    // agree far beyond the truncated comparison
    let mu_abs = sieve(&Kind::MuAbs, 40_000).unwrap();
    let f = ExplicitFormula::new(&bundled_zeros(), 100, 8).unwrap();
    for x in [10.0, 60.0, 200.0, 500.0] {
        let e = explicit_eval(x, theta_of_x(x), 40_000, 40_000, &f, &mu_abs).unwrap();
        assert!(e.x_delta3_ok);
        assert!(e.relative_residual() < 1e-8, "X = {x}: {}", e.relative_residual());
    }
}

#[test]
fn zero_tables() {
    let t = bundled_zeros();
    assert_eq!(t.len(), 100);
    assert!((t.ordinates[0] - 14.134725).abs() < 1e-6);
    assert!(zeta_complex(t.zero(0)).unwrap().norm() < 1e-6);
    for k in [1, 49, 99] {
        assert!(zeta_complex(t.zero(k)).unwrap().norm() < 1e-9);
    }

    let dir = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let write = |name: &str, body: &str| {
        let p = dir.join(name);
        std::fs::write(&p, body).unwrap();
        p
    };
    let ok = load_zeros(&write("three.txt", "# first three\n14.134725\n21.022040\n\n25.010858\n")).unwrap();
    assert_eq!(ok.len(), 3);
    assert_eq!(ok.max_ordinate(), 25.010858);
    assert!(load_zeros(&write("empty.txt", "")).is_err());
    assert!(load_zeros(&write("shuffled.txt", "21.022040\n14.134725\n25.010858\n")).is_err());
    assert!(load_zeros(&write("garbage.txt", "14.1\nzero\n")).is_err());
    assert!(load_zeros(&dir.join("missing.txt")).is_err());
    assert!(ExplicitFormula::new(&ok, 4, 1).is_err());
    assert!(phi2_explicit(0.5, 0.0, 1, 1, &ok).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn conjugate_symmetry(x in 2.0f64..400.0, theta in -0.05f64..0.05) {
        let mu_abs = sieve(&Kind::MuAbs, 2000).unwrap();
        let a = phi1_arithmetic(x, theta, 200, 2000, &mu_abs).unwrap();
        let b = phi1_arithmetic(x, -theta, 200, 2000, &mu_abs).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm());
        let zeros = bundled_zeros();
        let a = phi2_explicit(x, theta, 25, 2, &zeros).unwrap();
        let b = phi2_explicit(x, -theta, 25, 2, &zeros).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm());
    }

    #[test]
    fn reflection_agrees_with_conjugation(re in -6.0f64..4.0, im in 0.5f64..100.0) {
        let s = C::new(re, im);
        let a = zeta_complex(s).unwrap();
        let b = zeta_complex(s.conj()).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm());
    }
}
