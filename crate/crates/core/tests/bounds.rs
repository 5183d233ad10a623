use num_rational::Rational64 as Q;
use proptest::prelude::*;
use twisted_core::arith::*;
use twisted_core::bounds::*;
use twisted_core::expsum::Phase;

#[test]
fn schedule_recurrence_and_monotonicity() {
    for r in 1..=64 {
        let s = ExponentSchedule::new(r).unwrap();
        let next = ExponentSchedule::new(r + 1).unwrap();
        for j in 0..3 {
            assert_eq!(s.recurrence(j), next.beta(j), "r = {r}, j = {j}");
            assert!(next.beta(j) >= s.beta(j));
        }
    }
    assert!(ExponentSchedule::new(0).is_err());
}

#[test]
fn improvement_over_earlier_bound() {
    assert_eq!(improvement_deltas(), (Q::new(10, 119), Q::new(1, 8)));
}

#[test]
fn transcribed_envelopes() {
    let e = envelope_for(TheoremId::Thm1_4S2, None).unwrap();
    let got: Vec<_> = e.terms.iter().map(|t| (t.beta, t.delta, t.lam)).collect();
    assert_eq!(
        got,
        vec![
            (Q::from(1), Q::new(-1, 4), Q::new(5, 2)),
            (Q::new(6, 7), Q::from(0), Q::new(19, 7)),
            (Q::new(3, 4), Q::new(1, 4), Q::new(5, 2)),
        ]
    );
    let e = envelope_for(TheoremId::Thm1_8, None).unwrap();
    let got: Vec<_> = e.terms.iter().map(|t| (t.beta, t.delta, t.lam)).collect();
    assert_eq!(
        got,
        vec![
            (Q::from(1), Q::from(-1), Q::from(1)),
            (Q::new(8, 13), Q::from(0), Q::new(37, 13)),
            (Q::from(0), Q::from(1), Q::from(1)),
        ]
    );
    // r = 2 and r = 3 of the general bound agree with the stated S_2, S_3 bounds
    for (r, id) in [(2, TheoremId::Thm1_4S2), (3, TheoremId::Thm1_4S3)] {
        let a = envelope_for(TheoremId::Thm1_1, Some(r)).unwrap();
        let b = envelope_for(id, None).unwrap();
        let xs: Vec<_> = a.terms.iter().map(|t| (t.beta, t.gamma, t.delta)).collect();
        let ys: Vec<_> = b.terms.iter().map(|t| (t.beta, t.gamma, t.delta)).collect();
        assert_eq!(xs, ys);
    }
    // every id parses back from its display form
    for s in ["1.1", "1.2", "1.3", "prior-S2", "1.4-S2", "1.4-S3", "1.5", "1.6", "1.7", "1.8", "1.9", "4.2", "5.1", "5.2", "5.3", "S3-cumbersome"] {
        let id: TheoremId = s.parse().unwrap();
        assert_eq!(id.to_string(), s);
    }
}

#[test]
fn weyl_bounds() {
    // degree 2 Weyl with q = N: (Υ/q + 1/N + 1/N + q/N²)^{1/2} N
    let e = envelope_for(TheoremId::Lemma5_1, Some(2)).unwrap();
    let v = evaluate(&e, 1e4, 100, 1.0).unwrap();
    let n: f64 = 1e4;
    let expect = n * (0.01f64.sqrt() + 2.0 * n.powf(-0.5) + (100.0 / (n * n)).sqrt());
    assert!((v.value - expect).abs() < 1e-9 * expect);
    let e3 = envelope_for(TheoremId::Thm5_3, Some(3)).unwrap();
    let v = evaluate(&e3, 1e6, 1000, 0.5).unwrap();
    let expect = 1e3 * 1000f64.powf(1.0 / 6.0) + 1e6 / 1000f64.powf(0.25);
    assert!((v.value - expect).abs() < 1e-9 * expect);
}

#[test]
fn optimizer_recovers_r2_solution() {
    let x: f64 = 1e6;
    let l = x.ln();
    let q: f64 = 1000.0;
    let f = move |u: f64| x / u.sqrt() / l;
    let g0 = move |u: f64| x * u.sqrt() / q.sqrt();
    let g1 = move |u: f64| x.powf(0.8) * u.powf(0.2);
    let g2 = move |u: f64| (x * q * u).sqrt();
    let m = minmax_optimize(&f, &[&g0, &g1, &g2], x).unwrap();
    let n1 = x.powf(2.0 / 7.0) * l.powf(-10.0 / 7.0);
    assert_eq!(m.argmin, 1);
    assert!((m.x_star / n1 - 1.0).abs() < 1e-6);
    assert!((m.roots[0] / (q.sqrt() / l) - 1.0).abs() < 1e-6);
    assert!((m.roots[2] / (x.sqrt() / q.sqrt() / l) - 1.0).abs() < 1e-6);
}

#[test]
fn optimizer_recovers_r3_solution() {
    let x: f64 = 1e6;
    let l = x.ln();
    let q: f64 = 1000.0;
    let f = move |u: f64| x * l * l / u.sqrt();
    let g0 = move |u: f64| x * q.powf(-0.25) * u.powf(0.25) * l.powf(2.5);
    let g1 = move |u: f64| x.powf(6.0 / 7.0) * u.powf(1.0 / 7.0) * l.powf(19.0 / 7.0);
    let g2 = move |u: f64| x.powf(0.75) * q.powf(0.25) * u.powf(0.25) * l.powf(2.5);
    let m = minmax_optimize(&f, &[&g0, &g1, &g2], x).unwrap();
    let n1 = x.powf(2.0 / 9.0) * l.powf(-10.0 / 9.0);
    assert_eq!(m.argmin, 1);
    assert!((m.x_star / n1 - 1.0).abs() < 1e-6);
}

#[test]
fn ratio_at_zero_frequency() {
    let x = 20_000u64;
    let w = sieve(&Kind::OneP, x as usize).unwrap();
    let env = envelope_for(TheoremId::Thm1_2, None).unwrap();
    let st = empirical_ratio(&w, &Phase::Linear, &env, &[(0.0, x), (0.0, x)]).unwrap();
    let s = &st.samples[0];
    assert_eq!((s.a, s.q), (0, 1));
    assert!(s.ratio <= 1.0);
    assert!((s.abs_sum - 2262.0).abs() < 1e-9);
    assert_eq!(st.samples[0], st.samples[1]);
    assert!(empirical_ratio(&w, &Phase::Linear, &env, &[]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn minmax_is_the_minimum_of_the_maximum(a in 0.1f64..3.0, b in 0.1f64..3.0, c in 0.1f64..3.0, k0 in 1e-3f64..1e3, k1 in 1e-3f64..1e3) {
        let f = move |u: f64| u.powf(-a);
        let g0 = move |u: f64| k0 * u.powf(b);
        let g1 = move |u: f64| k1 * u.powf(c);
        let m = minmax_optimize(&f, &[&g0, &g1], 1e30).unwrap();
        let env = |u: f64| f(u).max(g0(u)).max(g1(u));
        let top = g0(m.x_star).max(g1(m.x_star));
        prop_assert!((f(m.x_star) - top).abs() <= 1e-9 * f(m.x_star));
        for i in 0..1000 {
            let u = m.x_star * 10f64.powf(-3.0 + 6.0 * i as f64 / 999.0);
            prop_assert!(env(m.x_star) <= env(u) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn envelopes_nondecreasing_in_x(x in 2.0f64..1e8, step in 1.0f64..10.0, q in 1u64..1000, u in 0.0f64..3.0) {
        for id in ["1.2", "1.4-S2", "1.4-S3", "1.5", "1.8", "prior-S2"] {
            let e = envelope_for(id.parse().unwrap(), None).unwrap();
            let a = evaluate(&e, x, q, u).unwrap().value;
            let b = evaluate(&e, x * step, q, u).unwrap().value;
            prop_assert!(b >= a, "{id}");
        }
    }
}
