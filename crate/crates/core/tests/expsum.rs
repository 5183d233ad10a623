use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use twisted_core::arith::*;
use twisted_core::expsum::*;

fn naive(w: &ArithTable, x: u64, phase: impl Fn(u64) -> f64) -> Complex64 {
    (1..=x)
        .map(|n| {
            let t = std::f64::consts::TAU * phase(n);
            Complex64::new(t.cos(), t.sin()) * w.get(n as usize)
        })
        .sum()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

/// Dyadic `α = k/2^m` so that the oracle phase `k·P(n) mod 2^m` is exact.
fn dyadic_phase(k: u64, m: u32, value: u64) -> f64 {
    let modulus = 1u128 << m;
    ((k as u128 * value as u128) % modulus) as f64 / modulus as f64
}

#[test]
fn linear_and_quadratic_match_naive_sums() {
    let w = sieve(&Kind::Mu, 3000).unwrap();
    for &(k, m) in &[(12345u64, 20u32), (1, 1), (7, 4), (987_654_321, 30), (3, 50)] {
        let alpha = k as f64 / (1u64 << m) as f64;
        let s = exp_sum_linear(&w, alpha, 3000).unwrap();
        assert!(rel(s.value, naive(&w, 3000, |n| dyadic_phase(k, m, n))) < 1e-12);
        let s = exp_sum_quadratic(&w, alpha, 3000).unwrap();
        assert!(rel(s.value, naive(&w, 3000, |n| dyadic_phase(k, m, n * n))) < 1e-12);
    }
}

#[test]
fn primes_r_matches_double_loop() {
    let x = 20_000u64;
    let primes = primes_up_to(x as usize);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let alpha: f64 = rng.gen();
        let mut acc = Complex64::new(0.0, 0.0);
        for &p in &primes {
            for &q in primes.iter().take_while(|&&q| p * q <= x) {
                acc += e_mul(alpha, (p * q) as f64);
            }
        }
        let s = exp_sum_primes_r(2, alpha, x).unwrap();
        assert!(rel(s.value, acc) < 1e-10);
    }
    let s = exp_sum_primes_r(1, 0.0, 100).unwrap();
    assert_eq!(s.value, Complex64::new(25.0, 0.0));
}

#[test]
fn poly_phase_matches_naive() {
    let w = sieve(&Kind::MuAbs, 2000).unwrap();
    let coeffs = [0.0, 1.0, 0.0, 1.0];
    let (k, m) = (81_234u64, 28u32);
    let alpha = k as f64 / (1u64 << m) as f64;
    let s = exp_sum_poly(&w, &coeffs, alpha, 2000).unwrap();
    let o = naive(&w, 2000, |n| dyadic_phase(k, m, n + n * n * n));
    assert!(rel(s.value, o) < 1e-12);
}

#[test]
fn hyperbola_pieces_recombine() {
    let x = 10_000u64;
    let f = sieve(&Kind::Mu, x as usize).unwrap();
    let g = sieve(&Kind::OneP, x as usize).unwrap();
    let direct = convolution_sum(&f, &g, 0.3141, x).unwrap();
    for (m, n) in [(1.0, 1.0), (100.0, 100.0), (10.5, 950.2), (1.0, 10_000.0)] {
        let h = hyperbola_split(&f, &g, 0.3141, x, m, n).unwrap();
        assert!(rel(h.recombined(), direct) < 1e-10, "M = {m}, N = {n}");
    }
    assert!(hyperbola_split(&f, &g, 0.3, x, 200.0, 200.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integer_shift_is_exact(alpha in -10.0f64..10.0, k in -5i32..5) {
        let w = sieve(&Kind::OneP, 5000).unwrap();
        let a = exp_sum_linear(&w, alpha, 5000).unwrap().value;
        let b = exp_sum_linear(&w, alpha + k as f64, 5000).unwrap().value;
        prop_assume!(alpha.round() + k as f64 == (alpha + k as f64).round());
        prop_assume!(alpha - alpha.round() == (alpha + k as f64) - (alpha + k as f64).round());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn negation_conjugates(alpha in -1.0f64..1.0) {
        let w = sieve(&Kind::Mu, 4000).unwrap();
        let a = exp_sum_linear(&w, alpha, 4000).unwrap().value;
        let b = exp_sum_linear(&w, -alpha, 4000).unwrap().value;
        prop_assert_eq!(a, b.conj());
    }

    #[test]
    fn trivial_bound(alpha in 0.0f64..1.0, x in 1u64..3000) {
        let w = sieve(&Kind::Mu, 3000).unwrap();
        let s = exp_sum_linear(&w, alpha, x).unwrap();
        let bound: f64 = (1..=x as usize).map(|n| w.get(n).abs()).sum();
        prop_assert!(s.value.norm() <= bound * (1.0 + 1e-12) + 1e-9);
    }

    #[test]
    fn random_hyperbola_split(alpha in 0.0f64..1.0, m in 1.0f64..100.0, n in 1.0f64..100.0) {
        let x = 10_000u64;
        let f = sieve(&Kind::MuAbs, x as usize).unwrap();
        let g = sieve(&Kind::Lambda, x as usize).unwrap();
        let h = hyperbola_split(&f, &g, alpha, x, m, n).unwrap();
        let d = convolution_sum(&f, &g, alpha, x).unwrap();
        prop_assert!(rel(h.recombined(), d) < 1e-10);
    }
}
