use chromalg::arith::{PrimeField, Rationals};
use chromalg::series::{
    ps_compose, ps_derivative_integrate, ps_reversion, ps_reversion_newton, CalculusMode, Series,
};
use chromalg::Error;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

const T: u32 = 9;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn qx(coeffs: &[i64], start: u32, t: u32) -> Series<Rationals> {
    Series::from_terms(
        &Rationals,
        &["x"],
        t,
        coeffs.iter().enumerate().map(|(i, &c)| (vec![start + i as u32], q(c))),
    )
}

fn fx(ring: &PrimeField, coeffs: &[u64], start: u32, t: u32) -> Series<PrimeField> {
    Series::from_terms(
        ring,
        &["x"],
        t,
        coeffs.iter().enumerate().map(|(i, &c)| (vec![start + i as u32], c % 7)),
    )
}

fn qxy(coeffs: &[i64], t: u32) -> Series<Rationals> {
    let mut terms = vec![];
    let mut k = 0;
    for d in 0..t {
        for i in 0..=d {
            if let Some(&c) = coeffs.get(k) {
                terms.push((vec![i, d - i], q(c)));
            }
            k += 1;
        }
    }
    Series::from_terms(&Rationals, &["x", "y"], t, terms)
}

/// Lagrange inversion: n·[x^n] g = [x^{n−1}] (x/f)^n.
fn lagrange_reversion(f: &Series<Rationals>) -> Series<Rationals> {
    let t = f.trunc;
    let mut shifted = f.like(t);
    for (e, c) in &f.coeffs {
        shifted.add_term(vec![e[0] - 1], c.clone());
    }
    let h = shifted.inverse().unwrap();
    let mut g = f.like(t);
    for n in 1..t {
        let c = h.pow(n).c1(n - 1);
        g.add_term(vec![n], c / q(n as i64));
    }
    g
}

#[test]
fn composition_examples() {
    let sq = qx(&[1], 2, 10);
    let inner = qx(&[1, 1], 1, 10);
    assert_eq!(ps_compose(&sq, &inner).unwrap(), qx(&[1, 2, 1], 2, 10));
    let f = qx(&[1, -3, 4, 0, 2], 1, 10);
    assert_eq!(ps_compose(&f, &qx(&[1], 1, 10)).unwrap(), f);
}

#[test]
fn reversion_of_x_over_one_minus_x() {
    let f = qx(&[1; 11], 1, 12);
    let alt: Vec<i64> = (0..11).map(|k| if k % 2 == 0 { 1 } else { -1 }).collect();
    assert_eq!(ps_reversion(&f).unwrap(), qx(&alt, 1, 12));
    assert_eq!(lagrange_reversion(&f), qx(&alt, 1, 12));
}

#[test]
fn integrating_x_to_p_minus_one_fails_in_characteristic_p() {
    let f7 = PrimeField::new(7).unwrap();
    let s = fx(&f7, &[1], 6, 10);
    let err = ps_derivative_integrate(&s, 0, CalculusMode::Integrate).unwrap_err();
    assert!(matches!(err, Error::RingNotDivisible(_)));
    let lower = fx(&f7, &[1], 5, 10);
    assert!(lower.integrate(0).is_ok());
}

#[test]
fn reversion_rejects_bad_input() {
    assert!(matches!(ps_reversion(&qx(&[1, 1], 0, 5)), Err(Error::Precondition(_))));
    let f7 = PrimeField::new(7).unwrap();
    assert!(matches!(ps_reversion(&fx(&f7, &[0, 1], 1, 5)), Err(Error::Domain(_))));
}

#[test]
fn display_is_readable() {
    let s = qx(&[3, 3, 1], 1, 5);
    assert_eq!(s.fmt(), "3*x + 3*x^2 + x^3");
}

fn coeffs(len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-4i64..=4, len)
}

fn unit_linear(len: usize) -> impl Strategy<Value = Vec<i64>> {
    (prop::sample::select(vec![1i64, -1, 2, 3]), coeffs(len)).prop_map(|(u, mut rest)| {
        rest.insert(0, u);
        rest
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn two_variable_ring_axioms(a in coeffs(40), b in coeffs(40), c in coeffs(40)) {
        let (a, b, c) = (qxy(&a, T), qxy(&b, T), qxy(&c, T));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn inverse_of_unit(a in coeffs(T as usize - 1), u in prop::sample::select(vec![1u64, 2, 3, 6])) {
        let f7 = PrimeField::new(7).unwrap();
        let mut c: Vec<u64> = a.iter().map(|x| x.rem_euclid(7) as u64).collect();
        c.insert(0, u);
        let s = fx(&f7, &c, 0, T);
        let one = Series::constant(&f7, &["x"], T, 1);
        prop_assert_eq!(s.mul(&s.inverse().unwrap()), one);
    }

    #[test]
    fn composition_is_associative(f in coeffs(8), g in coeffs(8), h in coeffs(8)) {
        let (f, g, h) = (qx(&f, 1, T), qx(&g, 1, T), qx(&h, 1, T));
        let left = ps_compose(&ps_compose(&f, &g).unwrap(), &h).unwrap();
        let right = ps_compose(&f, &ps_compose(&g, &h).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn reversion_agrees_with_lagrange(f in unit_linear(7)) {
        let f = qx(&f, 1, T);
        let g = ps_reversion(&f).unwrap();
        prop_assert_eq!(&g, &lagrange_reversion(&f));
        prop_assert_eq!(&g, &ps_reversion_newton(&f).unwrap());
        prop_assert_eq!(ps_compose(&f, &g).unwrap(), qx(&[1], 1, T));
        prop_assert_eq!(ps_compose(&g, &f).unwrap(), qx(&[1], 1, T));
    }

    #[test]
    fn newton_matches_degreewise_over_f7(f in prop::collection::vec(0u64..7, 12), u in 1u64..7) {
        let f7 = PrimeField::new(7).unwrap();
        let mut c = f;
        c.insert(0, u);
        let s = fx(&f7, &c, 1, 14);
        prop_assert_eq!(ps_reversion(&s).unwrap(), ps_reversion_newton(&s).unwrap());
    }

    #[test]
    fn chain_and_leibniz_rules(f in coeffs(8), g in coeffs(8)) {
        let (f, g) = (qx(&f, 0, T), qx(&g, 1, T));
        let d = |s: &Series<Rationals>| ps_derivative_integrate(s, 0, CalculusMode::Derive).unwrap();
        let lhs = d(&f.mul(&g));
        let rhs = d(&f).mul(&g).add(&f.mul(&d(&g)));
        prop_assert_eq!(lhs.truncate(T - 1), rhs.truncate(T - 1));
        let chain = d(&ps_compose(&f, &g).unwrap());
        let expect = ps_compose(&d(&f), &g).unwrap().mul(&d(&g));
        prop_assert_eq!(chain.truncate(T - 2), expect.truncate(T - 2));
    }

    #[test]
    fn integrate_then_derive(f in coeffs(8)) {
        let f = qx(&f, 0, T);
        let i = ps_derivative_integrate(&f, 0, CalculusMode::Integrate).unwrap();
        prop_assert_eq!(i.c1(0), q(0));
        prop_assert_eq!(i.derivative(0).truncate(T), f);
    }

    #[test]
    fn substitution_is_a_homomorphism(a in coeffs(20), b in coeffs(20), g in coeffs(6), h in coeffs(6)) {
        let (a, b) = (qxy(&a, 6), qxy(&b, 6));
        let two = [qx(&g, 1, 6), qx(&h, 1, 6)];
        let s = |z: &Series<Rationals>| z.substitute(&two).unwrap();
        prop_assert_eq!(s(&a.mul(&b)), s(&a).mul(&s(&b)));
        prop_assert_eq!(s(&a.add(&b)), s(&a).add(&s(&b)));
    }
}
