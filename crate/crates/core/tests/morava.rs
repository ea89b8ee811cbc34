use chromalg::arith::{Ring, WittRing};
use chromalg::morava::*;
use chromalg::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn elem(r: &EndRing, b0: &[u64], b1: &[u64]) -> EndRingElement {
    r.from_coeffs(vec![b0.to_vec(), b1.to_vec()])
}

/// Rows `S^i·e` of `b0 + b1 S` at height 2, written out by hand.
fn matrix2(w: &WittRing, p: u64, e: &EndRingElement) -> [[Vec<u64>; 2]; 2] {
    let (b0, b1) = (&e.b[0], &e.b[1]);
    [
        [b0.clone(), b1.clone()],
        [w.mul(&w.from_int(p as i64), &w.frobenius_lift(b1)), w.frobenius_lift(b0)],
    ]
}

fn matmul(w: &WittRing, a: &[[Vec<u64>; 2]; 2], b: &[[Vec<u64>; 2]; 2]) -> [[Vec<u64>; 2]; 2] {
    let entry = |i: usize, j: usize| w.add(&w.mul(&a[i][0], &b[0][j]), &w.mul(&a[i][1], &b[1][j]));
    [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]]
}

#[test]
fn s_to_the_n_is_p() {
    for (p, n) in [(3u64, 2usize), (5, 2), (3, 3), (7, 2)] {
        let r = EndRing::new(p, n, 3).unwrap();
        assert_eq!(r.pow(&r.s(), n as u64).unwrap(), r.from_int(p as i64), "p={p} n={n}");
    }
    let r = EndRing::new(3, 2, 2).unwrap();
    assert_eq!(r.format(&r.mul(&r.s(), &r.s()).unwrap()), "3");
}

#[test]
fn s_twists_by_frobenius_exhaustively() {
    let r = EndRing::new(3, 2, 2).unwrap();
    for x in 0..9 {
        for y in 0..9 {
            let a = r.from_witt(&[x, y]);
            let phi_a = r.from_witt(&r.witt.frobenius_lift(&[x, y]));
            assert_eq!(r.mul(&r.s(), &a).unwrap(), r.mul(&phi_a, &r.s()).unwrap());
            assert_eq!(r.mul(&r.one(), &a).unwrap(), a);
        }
    }
}

#[test]
fn ring_axioms_exhaustive_at_k1() {
    let r = EndRing::new(3, 2, 1).unwrap();
    let all: Vec<EndRingElement> =
        (0..81u64).map(|i| elem(&r, &[i % 3, (i / 3) % 3], &[(i / 9) % 3, i / 27])).collect();
    for a in &all {
        for b in &all {
            let ab = r.mul(a, b).unwrap();
            for c in &all {
                assert_eq!(r.mul(&ab, c).unwrap(), r.mul(a, &r.mul(b, c).unwrap()).unwrap());
            }
            let s = r.add(a, b).unwrap();
            assert_eq!(r.mul(&s, b).unwrap(), r.add(&ab, &r.mul(b, b).unwrap()).unwrap());
        }
    }
}

#[test]
fn associativity_on_additive_basis_at_k2() {
    // Multiplication is Z/p^K-trilinear, so the additive basis w^j S^i suffices.
    let r = EndRing::new(3, 2, 2).unwrap();
    let basis: Vec<EndRingElement> = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| r.mul(&r.pow(&r.w(), j).unwrap(), &r.pow(&r.s(), i).unwrap()).unwrap())
        .collect();
    for a in &basis {
        for b in &basis {
            for c in &basis {
                let l = r.mul(&r.mul(a, b).unwrap(), c).unwrap();
                assert_eq!(l, r.mul(a, &r.mul(b, c).unwrap()).unwrap());
            }
        }
    }
}

#[test]
fn parameter_mismatch_is_an_error() {
    let r = EndRing::new(3, 2, 2).unwrap();
    let other = EndRing::new(3, 2, 3).unwrap();
    assert!(matches!(r.mul(&r.s(), &other.s()), Err(Error::Precondition(_))));
}

#[test]
fn units_and_inverses() {
    let r = EndRing::new(5, 2, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let u = r.random_unit(&mut rng);
        let ui = r.inv(&u).unwrap();
        assert!(r.is_one(&r.mul(&u, &ui).unwrap()));
        assert!(r.is_one(&r.mul(&ui, &u).unwrap()));
    }
    assert!(matches!(r.inv(&r.s()), Err(Error::Domain(_))));
}

#[test]
fn filtration_examples() {
    let r = EndRing::new(3, 2, 3).unwrap();
    let f = |e: &EndRingElement| r.filtration_degree(e).unwrap().to_string();
    assert_eq!(f(&r.add(&r.one(), &r.s()).unwrap()), "1/2");
    assert_eq!(f(&r.from_int(4)), "1");
    let omega = r.teichmuller(&r.witt.field.generator());
    assert_eq!(f(&omega), "0");
    assert_eq!(r.filtration_degree(&r.one()).unwrap(), Filtration::Infinite);
    assert!(r.filtration_degree(&r.s()).is_err());
}

#[test]
fn determinant_examples() {
    let r = EndRing::new(3, 2, 3).unwrap();
    assert_eq!(r.determinant_integer(&r.s()).unwrap(), 27 - 3);
    assert!(r.determinant(&r.s()).unwrap()[1..].iter().all(|&c| c == 0));
    let c = r.from_int(4);
    assert_eq!(r.determinant_integer(&c).unwrap(), 16);
    let r3 = EndRing::new(5, 3, 4).unwrap();
    assert_eq!(r3.determinant_integer(&r3.from_int(6)).unwrap(), 216);
    assert_eq!(r3.determinant_integer(&r3.s()).unwrap(), 5);
}

#[test]
fn determinant_matches_norm_formula() {
    // det(b0 + b1 S) = b0 φ(b0) − p b1 φ(b1) at height 2.
    let r = EndRing::new(5, 2, 3).unwrap();
    let w = &r.witt;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..40 {
        let e = r.random_element(&mut rng);
        let (b0, b1) = (&e.b[0], &e.b[1]);
        let want = w.sub(
            &w.mul(b0, &w.frobenius_lift(b0)),
            &w.mul(&w.from_int(5), &w.mul(b1, &w.frobenius_lift(b1))),
        );
        assert_eq!(r.determinant(&e).unwrap(), want);
    }
}

#[test]
fn strict_elements_have_p_adic_determinant() {
    let r = EndRing::new(5, 3, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let g = r.random_strict(&mut rng).unwrap();
        let d = r.determinant_integer(&g).unwrap();
        assert_eq!(d % 5, 1);
        let g1 = r.project_to_s1(&g).unwrap();
        assert_eq!(r.determinant_integer(&g1).unwrap(), 1);
    }
}

#[test]
fn digits_round_trip() {
    let r = EndRing::new(3, 2, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let e = r.random_element(&mut rng);
        let d = r.digits(&e, r.readable_digits()).unwrap();
        assert_eq!(r.from_digits(&d).unwrap(), e);
    }
    assert!(r.digits(&r.one(), 7).is_err());
}

#[test]
fn power_series_examples() {
    let law = HondaLaw::new(3, 2, 28).unwrap();
    let r = EndRing::new(3, 2, 2).unwrap();
    let series = |e: &EndRingElement| to_power_series(&r, &law, e).unwrap().series.fmt();
    assert_eq!(series(&r.one()), "x");
    assert!(to_power_series(&r, &law, &r.s()).is_err());
    let d = r.digits(&r.s(), 4).unwrap();
    assert_eq!(law.from_digits(&d).unwrap().fmt(), "x^3");
    let d = r.digits(&r.from_int(3), 4).unwrap();
    assert_eq!(law.from_digits(&d).unwrap().fmt(), "x^9");
    let coarse = EndRing::new(3, 2, 1).unwrap();
    assert!(matches!(to_power_series(&coarse, &law, &coarse.one()), Err(Error::Precondition(_))));
}

#[test]
fn series_digits_read_back() {
    let law = HondaLaw::new(3, 2, 28).unwrap();
    let r = EndRing::new(3, 2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10 {
        let u = r.random_unit(&mut rng);
        let f = to_power_series(&r, &law, &u).unwrap();
        assert_eq!(law.read_digits(&f.series).unwrap(), f.digits);
    }
}

#[test]
fn ring_addition_is_formal_sum() {
    let law = HondaLaw::new(3, 2, 28).unwrap();
    let r = EndRing::new(3, 2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let series = |e: &EndRingElement| law.from_digits(&r.digits(e, 4).unwrap()).unwrap();
    for _ in 0..10 {
        let a = r.random_element(&mut rng);
        let b = r.random_element(&mut rng);
        let sum = law.law.apply(&series(&a), &series(&b)).unwrap();
        assert_eq!(series(&r.add(&a, &b).unwrap()), sum);
    }
}

#[test]
fn series_are_multiplicative() {
    let law = HondaLaw::new(3, 2, 28).unwrap();
    let r = EndRing::new(3, 2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..10 {
        let a = r.random_unit(&mut rng);
        let b = r.random_unit(&mut rng);
        let fa = to_power_series(&r, &law, &a).unwrap().series;
        let fb = to_power_series(&r, &law, &b).unwrap().series;
        let fab = to_power_series(&r, &law, &r.mul(&a, &b).unwrap()).unwrap().series;
        assert_eq!(law.compose(&fa, &fb).unwrap(), fab);
    }
}

#[test]
fn cocycle_basics() {
    let r = EndRing::new(5, 2, 3).unwrap();
    let f = &r.witt.field;
    let spec = |n| CocycleSpec::new(n, 5);
    assert!(f.is_zero(&cocycle_eval(&r, &spec(CocycleName::Tau1), &r.one()).unwrap()));
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let omega = f.generator();
    for _ in 0..20 {
        let g = random_s21(&r, &mut rng).unwrap();
        let t1 = cocycle_eval(&r, &spec(CocycleName::Tau1), &g).unwrap();
        let t2 = cocycle_eval(&r, &spec(CocycleName::Tau2), &g).unwrap();
        assert_eq!(t2, f.pow(&t1, 5));
        let conj = r.conjugate_teichmuller(&omega, &g).unwrap();
        let t1c = cocycle_eval(&r, &spec(CocycleName::Tau1), &conj).unwrap();
        assert_eq!(t1c, f.mul(&f.pow(&omega, 4), &t1));
        let t2c = cocycle_eval(&r, &spec(CocycleName::Tau2), &conj).unwrap();
        assert_eq!(t2c, f.mul(&f.pow(&omega, 20), &t2));
    }
}

#[test]
fn cocycle_domains() {
    let r = EndRing::new(5, 2, 3).unwrap();
    let g = r.add(&r.one(), &r.s()).unwrap();
    assert!(matches!(cocycle_eval(&r, &CocycleSpec::new(CocycleName::Zeta, 5), &g), Err(Error::Domain(_))));
    let c = r.from_int(1 + 5 * 3);
    assert_eq!(cocycle_eval(&r, &CocycleSpec::new(CocycleName::Zeta, 5), &c).unwrap(), vec![3, 0]);
    assert!(matches!(cocycle_eval(&r, &CocycleSpec::new(CocycleName::Sigma, 5), &c), Err(Error::Domain(_))));
}

#[test]
fn cocycles_are_additive_and_sigma_bounds_tau_product() {
    let r = EndRing::new(5, 2, 3).unwrap();
    let f = &r.witt.field;
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..40 {
        let g = random_s21(&r, &mut rng).unwrap();
        let h = random_s21(&r, &mut rng).unwrap();
        let gh = r.mul(&g, &h).unwrap();
        for name in [CocycleName::Tau1, CocycleName::Tau2] {
            let s = CocycleSpec::new(name, 5);
            let sum = f.add(&cocycle_eval(&r, &s, &g).unwrap(), &cocycle_eval(&r, &s, &h).unwrap());
            assert_eq!(cocycle_eval(&r, &s, &gh).unwrap(), sum);
        }
        assert!(sigma_coboundary_holds(&r, &g, &h).unwrap());
        let c1 = r.random_central(&mut rng);
        let c2 = r.random_central(&mut rng);
        let z = CocycleSpec::new(CocycleName::Zeta, 5);
        let sum = f.add(&cocycle_eval(&r, &z, &c1).unwrap(), &cocycle_eval(&r, &z, &c2).unwrap());
        assert_eq!(cocycle_eval(&r, &z, &r.mul(&c1, &c2).unwrap()).unwrap(), sum);
    }
}

#[test]
fn abelianization_small_depth_is_whole_quotient() {
    let a = abelianization_s21(5, 2).unwrap();
    assert_eq!(a.group_order_log, 2);
    assert_eq!(a.commutator_order_log, 0);
    assert_eq!(a.invariant_factors, vec![1, 1]);
}

#[test]
fn abelianization_weights_at_p5() {
    let a = abelianization_s21(5, 3).unwrap();
    assert_eq!(a.group_order_log, 3);
    assert_eq!(a.commutator_order_log, 1);
    assert_eq!(a.invariant_factors, vec![1, 1]);
    assert!(a.tau1_isomorphism && a.stabilized);
    assert_eq!(a.h1_dimension, 2);
    assert_eq!(a.weights, vec![4, 20]);
    assert!(matches!(abelianization_s21(3, 3), Err(Error::Precondition(_))));
}

#[test]
fn g1_examples() {
    let g = g1_cohomology(5, 4, 8).unwrap();
    assert_eq!((g.h0.as_str(), g.h1.as_str()), ("Z/5", "0"));
    assert_eq!(g1_cohomology(5, 20, 8).unwrap().h0, "Z/25");
    assert_eq!(g1_cohomology(5, 3, 8).unwrap().h0, "0");
    let z = g1_cohomology(3, 0, 8).unwrap();
    assert_eq!((z.h0.as_str(), z.h1.as_str()), ("Z/3^inf", "Z/3^inf"));
    assert_eq!(g1_cohomology(3, -6, 8).unwrap().h0, "Z/9");
    assert!(g1_cohomology(2, 4, 8).is_err());
}

#[test]
fn g1_raises_precision_until_certified() {
    let t = 4 * 5i64.pow(5);
    let g = g1_cohomology(5, t, 2).unwrap();
    assert_eq!(g.h0_order_exponent, Some(6));
    assert!(g.precision > 6);
    assert!(matches!(g1_cohomology_with_ceiling(5, t, 2, 4), Err(Error::Resource(_))));
}

#[test]
fn g1_orders_follow_p_adic_valuation() {
    for p in [3u64, 5] {
        for k in 1..=2 * p * p {
            let mut r = 0;
            let mut k0 = k;
            while k0 % p == 0 {
                k0 /= p;
                r += 1;
            }
            let g = g1_cohomology(p, (k * (p - 1)) as i64, 4).unwrap();
            assert_eq!(g.h0_order_exponent, Some(r + 1), "p={p} k={k}");
            assert_eq!(g.h1_order_exponent, Some(0));
        }
        for t in 1..(p - 1) as i64 {
            assert_eq!(g1_cohomology(p, t, 4).unwrap().h0_order_exponent, Some(0));
        }
    }
}

#[test]
fn literal_parser() {
    let r = EndRing::new(3, 2, 2).unwrap();
    let parse = |s: &str| parse_element(&r, s).unwrap();
    assert_eq!(parse("S*S"), r.from_int(3));
    assert_eq!(parse("S^2"), r.from_int(3));
    assert_eq!(parse("1 + (2+w)*S"), elem(&r, &[1, 0], &[2, 1]));
    assert_eq!(parse("S*w"), r.mul(&r.s(), &r.w()).unwrap());
    assert_eq!(parse("-1 + 10"), r.from_int(0));
    assert_eq!(r.format(&parse("1 + (2+w)*S")), "1 + (w + 2)*S");
    assert_eq!(parse(&r.format(&parse("w^3 + 4*S"))), parse("w^3 + 4*S"));
    for bad in ["", "1 +", "S**2", "x", "(1", "2^"] {
        assert!(matches!(parse_element(&r, bad), Err(Error::Parse(_))), "{bad}");
    }
}

fn coeffs(k: u32) -> impl Strategy<Value = Vec<u64>> {
    proptest::collection::vec(0u64..5u64.pow(k), 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_matches_matrix_model(a0 in coeffs(3), a1 in coeffs(3), b0 in coeffs(3), b1 in coeffs(3)) {
        let r = EndRing::new(5, 2, 3).unwrap();
        let a = elem(&r, &a0, &a1);
        let b = elem(&r, &b0, &b1);
        let prod = matrix2(&r.witt, 5, &r.mul(&a, &b).unwrap());
        prop_assert_eq!(prod, matmul(&r.witt, &matrix2(&r.witt, 5, &a), &matrix2(&r.witt, 5, &b)));
    }

    #[test]
    fn determinant_is_multiplicative(a0 in coeffs(3), a1 in coeffs(3), b0 in coeffs(3), b1 in coeffs(3)) {
        let r = EndRing::new(5, 2, 3).unwrap();
        let a = elem(&r, &a0, &a1);
        let b = elem(&r, &b0, &b1);
        let lhs = r.determinant(&r.mul(&a, &b).unwrap()).unwrap();
        prop_assert_eq!(lhs, r.witt.mul(&r.determinant(&a).unwrap(), &r.determinant(&b).unwrap()));
    }

    #[test]
    fn filtration_is_a_group_filtration(seed in 0u64..1000) {
        let r = EndRing::new(5, 2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = r.random_unit(&mut rng);
        let b = r.random_unit(&mut rng);
        let q = r.mul(&a, &r.inv(&b).unwrap()).unwrap();
        let key = |f: Filtration| match f { Filtration::Infinite => (u32::MAX, 1), Filtration::Finite { num, den } => (num, den) };
        let (fa, fb, fq) = (key(r.filtration_degree(&a).unwrap()), key(r.filtration_degree(&b).unwrap()), key(r.filtration_degree(&q).unwrap()));
        prop_assert!(fq.0 >= fa.0.min(fb.0));
    }
}
