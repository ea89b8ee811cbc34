use chromalg::arith::{FiniteField, PrimeField, Rationals, Ring};
use chromalg::fgl::*;
use chromalg::series::{ps_compose, Series};
use chromalg::Error;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn qf(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn one_var(coeffs: &[(u32, BigRational)], t: u32) -> Series<Rationals> {
    Series::from_terms(&Rationals, &["x"], t, coeffs.iter().map(|(k, c)| (vec![*k], c.clone())))
}

fn rational_corpus(t: u32) -> Vec<FormalGroupLaw<Rationals>> {
    let m = FormalGroupLaw::multiplicative(&Rationals, t);
    let f = one_var(&[(1, q(1)), (2, q(1))], t);
    vec![
        FormalGroupLaw::additive(&Rationals, t),
        m.clone(),
        m.conjugate(&f).unwrap(),
        honda_rational(2, 2, t).unwrap(),
        honda_rational(3, 1, t).unwrap(),
    ]
}

#[test]
fn axiom_reports() {
    for law in rational_corpus(8) {
        assert!(law.check_axioms().unwrap().all_pass(), "{}", law.name);
    }
    let g = multiplicative_graded(8, false);
    assert!(g.check_axioms().unwrap().all_pass());
    assert!(check_grading(&g));
    let bad = FormalGroupLaw::from_terms(&Rationals, 8, &[((1, 2), q(1))], "x+y+xy^2");
    let r = bad.check_axioms().unwrap();
    assert!(r.unit && !r.commutativity && !r.associativity);
}

#[test]
fn invariant_differential_examples() {
    let a = FormalGroupLaw::additive(&Rationals, 8);
    assert_eq!(a.invariant_differential().unwrap(), one_var(&[(0, q(1))], 7));
    let m = FormalGroupLaw::multiplicative(&Rationals, 10);
    let geo: Vec<_> = (0..9).map(|k| (k, q(if k % 2 == 0 { 1 } else { -1 }))).collect();
    assert_eq!(m.invariant_differential().unwrap(), one_var(&geo, 9));
    let g2 = honda(5, 2, 30).unwrap();
    let w = g2.invariant_differential().unwrap();
    assert_eq!(w.coeffs.len(), 1);
    assert_eq!(w.c1(0), 1);
}

#[test]
fn graded_multiplicative_p_series() {
    for p in [2u32, 3, 5] {
        let f = multiplicative_graded(p + 2, false);
        let ring = f.ring().clone();
        let ps = f.n_series(p as i64).unwrap();
        // ((1+ux)^p − 1)/u = Σ_k C(p,k) u^{k−1} x^k.
        let mut binom = BigInt::from(1);
        for k in 1..=p {
            binom = binom * BigInt::from(p - k + 1) / BigInt::from(k);
            let want = ring.monomial(vec![k as i32 - 1], BigRational::from_integer(binom.clone()));
            assert_eq!(ps.c1(k), want, "p={p} k={k}");
        }
        assert!(ring.is_zero(&ps.c1(p + 1)));
    }
}

#[test]
fn log_of_universal_law_satisfies_araki_identity() {
    for (p, d) in [(2u64, 7u32), (3, 16)] {
        let data = universal_p_typical(p, d, Generators::Araki).unwrap();
        let law = &data.law;
        let l = logarithm(law).unwrap().series;
        assert!(is_p_typical_log(&l, p));
        let lhs = ps_compose(&l, &law.n_series(p as i64).unwrap()).unwrap();
        let rhs = l.scale(&law.ring().from_int(p as i64));
        let t = lhs.trunc.min(rhs.trunc);
        assert_eq!(lhs.truncate(t), rhs.truncate(t), "p={p}");
    }
}

#[test]
fn universal_law_p_series_and_grading() {
    let data = universal_p_typical(2, 3, Generators::Araki).unwrap();
    assert_eq!(data.vs.len(), 1);
    let law = &data.law;
    assert!(check_grading(law));
    assert!(law.check_axioms().unwrap().all_pass());
    let ps = law.n_series(2).unwrap();
    assert_eq!(resynthesize_p_series(law, 2, &data.vs).unwrap(), ps);
    assert_eq!(extract_v(law, 2, 1).unwrap(), data.vs);

    let wide = universal_p_typical(2, 7, Generators::Araki).unwrap();
    assert_eq!(wide.vs.len(), 2);
    assert!(check_grading(&wide.law));
}

#[test]
fn zero_vs_give_the_additive_law() {
    for p in [2u64, 3, 5] {
        let f = p_typical_from_vs(&Rationals, p, &[q(0), q(0)], 12, Generators::Araki, "zero").unwrap();
        assert_eq!(f.series, FormalGroupLaw::additive(&Rationals, 12).series);
        assert_eq!(f.n_series(p as i64).unwrap(), f.x1().scale(&q(p as i64)));
    }
}

#[test]
fn typicalization_is_idempotent() {
    let m = FormalGroupLaw::multiplicative(&Rationals, 12);
    let (g, _) = p_typicalize(&m, 3).unwrap();
    let (g2, e2) = p_typicalize(&g.law, 3).unwrap();
    assert_eq!(g2.law.series, g.law.series);
    assert_eq!(e2.series, m.x1());
    assert!(is_p_typical_log(&logarithm(&g2.law).unwrap().series, 3));

    let a = FormalGroupLaw::additive(&Rationals, 12);
    let (ga, ea) = p_typicalize(&a, 5).unwrap();
    assert_eq!(ga.law.series, a.series);
    assert_eq!(ea.series, a.x1());
    assert!(ga.vs.iter().all(|v| v.is_zero()));
}

#[test]
fn typicalization_rejects_non_local_coefficients() {
    let bad = FormalGroupLaw::from_terms(&Rationals, 6, &[((1, 1), qf(1, 3))], "x+y+xy/3");
    assert!(matches!(p_typicalize(&bad, 3), Err(Error::Domain(_))));
}

/// v_n from log coefficients: p·l_n = Σ_{i≤n} l_i v_{n−i}^{p^i}, v_0 = p.
fn araki_vs_from_log(l: &[BigRational], p: u64) -> Vec<BigRational> {
    let pq = q(p as i64);
    let mut vs: Vec<BigRational> = vec![pq.clone()];
    for n in 1..l.len() {
        let mut rest = &pq * &l[n] - &l[n] * pow(&pq, p.pow(n as u32));
        for i in 1..n {
            rest -= &l[i] * pow(&vs[n - i], p.pow(i as u32));
        }
        vs.push(rest);
    }
    vs.remove(0);
    vs
}

fn pow(a: &BigRational, e: u64) -> BigRational {
    (0..e).fold(q(1), |acc, _| acc * a)
}

#[test]
fn extract_v_matches_araki_oracle_for_typical_multiplicative() {
    let m = FormalGroupLaw::multiplicative(&Rationals, 9);
    let (g, _) = p_typicalize(&m, 2).unwrap();
    let l = logarithm(&g.law).unwrap().series;
    let logs: Vec<BigRational> = [1u32, 2, 4, 8].iter().map(|&k| l.c1(k)).collect();
    let oracle = araki_vs_from_log(&logs, 2);
    assert_eq!(extract_v(&g.law, 2, 3).unwrap(), oracle);
    assert_eq!(g.vs, oracle);
    assert_eq!(oracle[0], q(1));
}

#[test]
fn extract_v_examples() {
    let h = honda_graded_rational(3, 2, 12).unwrap();
    let vs = extract_v(&h, 3, 2).unwrap();
    let ring = h.ring().clone();
    assert!(ring.is_zero(&vs[0]));
    assert_eq!(vs[1], ring.var(0));

    let f5 = PrimeField::new(5).unwrap();
    let a = FormalGroupLaw::additive(&f5, 30);
    assert_eq!(extract_v(&a, 5, 2).unwrap(), vec![0, 0]);

    assert!(matches!(extract_v(&a, 5, 3), Err(Error::Precondition(_))));
}

#[test]
fn height_examples() {
    for p in [2u64, 3, 5] {
        let fp = PrimeField::new(p).unwrap();
        let m = FormalGroupLaw::multiplicative(&fp, p as u32 * p as u32 + 2);
        assert_eq!(height(&m, 10).unwrap(), Height::Exact(1));
        let a = FormalGroupLaw::additive(&fp, 20);
        assert_eq!(height(&a, 10).unwrap(), Height::AtLeast(10));
    }
    for (p, n) in [(2u64, 1usize), (2, 2), (2, 3), (3, 2), (5, 1), (5, 2)] {
        let t = p.pow(n as u32) as u32 + 1;
        assert_eq!(height(&honda(p, n, t).unwrap(), 10).unwrap(), Height::Exact(n as u32));
    }
    assert!(matches!(height(&FormalGroupLaw::additive(&Rationals, 5), 3), Err(Error::Domain(_))));
}

#[test]
fn height_agrees_with_reduced_v_values() {
    let cases: Vec<(FormalGroupLaw<Rationals>, u64)> = vec![
        (honda_rational(2, 2, 17).unwrap(), 2),
        (honda_rational(3, 2, 10).unwrap(), 3),
        (honda_rational(2, 3, 9).unwrap(), 2),
        (p_typicalize(&FormalGroupLaw::multiplicative(&Rationals, 10), 3).unwrap().0.law, 3),
        (p_typical_from_vs(&Rationals, 2, &[q(2), q(1), q(0)], 9, Generators::Araki, "v1=2").unwrap(), 2),
    ];
    for (law, p) in cases {
        let red = reduce_mod_p(&law, p).unwrap();
        let count = max_v_count(p, red.trunc());
        let vs = extract_v(&red, p, count).unwrap();
        let zeros = vs.iter().take_while(|v| **v == 0).count() as u32;
        let h = height(&red, 10).unwrap();
        match h {
            Height::Exact(n) => assert_eq!(zeros + 1, n, "{}", law.name),
            Height::AtLeast(n) => assert!(zeros + 1 >= n, "{}", law.name),
        }
    }
}

#[test]
fn frobenius_twist_properties() {
    let g = honda(5, 1, 12).unwrap();
    assert_eq!(frobenius_twist(&g).unwrap().series, g.series);
    assert!(matches!(frobenius_twist(&FormalGroupLaw::additive(&Rationals, 4)), Err(Error::Domain(_))));

    // Γ2 over F8, conjugated by a series with a coefficient outside F2.
    let f8 = FiniteField::standard(2, 3).unwrap();
    let t = 24;
    let base = honda(2, 2, t).unwrap().map_ring(&f8, |c| f8.from_coeffs(&[*c]));
    let w = f8.generator();
    let conj = Series::from_terms(&f8, &["x"], t, [(vec![1], f8.one()), (vec![2], w.clone()), (vec![3], f8.one())]);
    let law = base.conjugate(&conj).unwrap();
    assert!(law.series.coeffs.values().any(|c| c[1] != 0));

    let tw = frobenius_twist(&law).unwrap();
    for (e, c) in &law.series.coeffs {
        assert_eq!(tw.series.coeff(e), f8.pow(c, 2));
    }
    // x ↦ x^p is a homomorphism F → F^(p).
    let xy = |i| Series::var(&f8, &["x", "y"], t, i);
    let lhs = law.series.pow(2);
    let rhs = tw.apply(&xy(0).pow(2), &xy(1).pow(2)).unwrap();
    assert_eq!(lhs.truncate(t), rhs.truncate(t));

    // [p] = g ∘ σ^n with g: F^(p^n) → F.
    let g = p_series_factor(&law, 2).unwrap();
    let x = law.x1();
    let ps = law.n_series(2).unwrap();
    assert!(ps.coeffs.len() > 1);
    // Terms of g past its truncation land in degree ≥ 4·g.trunc ≥ t.
    let mut g_wide = g.clone();
    g_wide.trunc = t;
    assert_eq!(ps_compose(&g_wide, &x.pow(4)).unwrap(), ps);
    let twist2 = frobenius_twist(&tw).unwrap();
    assert!(twist2.is_homomorphism_to(&law, &g).unwrap());
    assert!(f8.inv(&g.c1(1)).is_some());
}

#[test]
fn symmetric_cocycle_examples_and_cocycle_identity() {
    let c2 = symmetric_cocycle(2).unwrap();
    assert_eq!(c2.coeffs.len(), 1);
    assert_eq!(c2.coeff(&[1, 1]), q(1));
    let c3 = symmetric_cocycle(3).unwrap();
    assert_eq!((c3.coeff(&[2, 1]), c3.coeff(&[1, 2]), c3.coeffs.len()), (q(1), q(1), 2));
    let c6 = symmetric_cocycle(6).unwrap();
    let want = [6, 15, 20, 15, 6];
    for i in 1..6u32 {
        assert_eq!(c6.coeff(&[i, 6 - i]), q(want[i as usize - 1]));
    }
    assert!(symmetric_cocycle(1).is_err());
    for n in 2..=12 {
        let c = symmetric_cocycle(n).unwrap();
        assert_eq!(content(&c), BigInt::from(1), "n={n}");
        assert!(c.coeffs.values().all(|v| v.is_integer()));
        let vars = ["x", "y", "z"];
        let v = |i| Series::var(&Rationals, &vars, n + 1, i);
        let (x, y, z) = (v(0), v(1), v(2));
        let at = |a: &Series<Rationals>, b: &Series<Rationals>| c.substitute(&[a.clone(), b.clone()]).unwrap();
        let delta = at(&y, &z).sub(&at(&x.add(&y), &z)).add(&at(&x, &y.add(&z))).sub(&at(&x, &y));
        assert!(delta.is_zero(), "n={n}");
    }
}

#[test]
fn landweber_for_typical_multiplicative_v_values() {
    let v1 = k_theory_v1(3).unwrap();
    let ring = GradedPresentation::k_theory(3).ring();
    assert_eq!(v1, ring.monomial(vec![2], q(1)));
    let r = landweber_check(&GradedPresentation::johnson_wilson(5, 1), &[ring_var(5)], 1).unwrap();
    assert!(r.exact);
}

fn ring_var(p: u64) -> chromalg::poly::Poly<BigRational> {
    GradedPresentation::johnson_wilson(p, 1).ring().var(0)
}

#[test]
fn json_round_trip() {
    for law in rational_corpus(7) {
        let back = law_from_json(&law.to_json()).unwrap();
        assert_eq!(back.series, law.series);
    }
    assert!(matches!(law_from_json(&serde_json::json!({"trunc": 4})), Err(Error::Parse(_))));
}

fn strict_iso(coeffs: &[i64], t: u32) -> Series<Rationals> {
    let mut terms = vec![(1, q(1))];
    terms.extend(coeffs.iter().enumerate().map(|(i, &c)| (i as u32 + 2, q(c))));
    one_var(&terms, t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn logarithm_linearizes_n_series(c in prop::collection::vec(-2i64..=2, 3), which in 0usize..5) {
        let t = 8;
        let base = rational_corpus(t).swap_remove(which);
        let law = base.conjugate(&strict_iso(&c, t)).unwrap();
        prop_assert!(law.check_axioms().unwrap().all_pass());
        let l = logarithm(&law).unwrap().series;
        for n in -6i64..=6 {
            let lhs = ps_compose(&l, &law.n_series(n).unwrap()).unwrap();
            prop_assert_eq!(lhs.truncate(t), l.scale(&q(n)).truncate(t));
        }
    }

    #[test]
    fn invariant_differential_pulls_back(c in prop::collection::vec(-3i64..=3, 4), which in 0usize..5) {
        let t = 8;
        let f = strict_iso(&c, t);
        let src = rational_corpus(t).swap_remove(which);
        let dst = src.conjugate(&f).unwrap();
        prop_assert!(src.is_homomorphism_to(&dst, &f).unwrap());
        let pulled = ps_compose(&dst.invariant_differential().unwrap(), &f).unwrap().mul(&f.derivative(0));
        let omega = src.invariant_differential().unwrap();
        let tt = pulled.trunc.min(omega.trunc);
        prop_assert_eq!(pulled.truncate(tt), omega.truncate(tt));
    }

    #[test]
    fn extract_then_resynthesize(
        p in prop::sample::select(vec![2u64, 3]),
        vs in prop::collection::vec(-3i64..=3, 2),
    ) {
        let t = if p == 2 { 9 } else { 10 };
        let vq: Vec<BigRational> = vs.iter().map(|&v| q(v)).collect();
        let law = p_typical_from_vs(&Rationals, p, &vq, t, Generators::Araki, "random").unwrap();
        let count = max_v_count(p, t);
        let got = extract_v(&law, p, count).unwrap();
        let zero = q(0);
        for (i, g) in got.iter().enumerate() {
            prop_assert_eq!(g, vq.get(i).unwrap_or(&zero));
        }
        prop_assert_eq!(resynthesize_p_series(&law, p, &got).unwrap(), law.n_series(p as i64).unwrap());
        let (again, e) = p_typicalize(&law, p).unwrap();
        prop_assert_eq!(&again.law.series, &law.series);
        prop_assert_eq!(e.series, law.x1());
    }
}
