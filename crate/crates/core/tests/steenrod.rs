use std::collections::BTreeMap;

use chromalg::steenrod::*;
use proptest::prelude::*;

// Oracle: the action of A on F₂[x₁,…,x_n] through the Cartan formula and
// Sq^i x^k = C(k,i) x^{k+i}. It is faithful on x₁⋯x_n in degrees ≤ n.
type Poly2 = BTreeMap<Vec<u32>, ()>;

fn toggle(p: &mut Poly2, e: Vec<u32>) {
    if p.remove(&e).is_none() {
        p.insert(e, ());
    }
}

fn binom_odd(n: u32, k: u32) -> bool {
    k <= n && (k & !n) == 0
}

fn sq_mono(i: u32, e: &[u32], out: &mut Poly2) {
    fn go(i: u32, e: &[u32], j: usize, acc: &mut Vec<u32>, out: &mut Poly2) {
        if j == e.len() {
            if i == 0 {
                toggle(out, acc.clone());
            }
            return;
        }
        for a in 0..=i.min(e[j]) {
            if binom_odd(e[j], a) {
                acc.push(e[j] + a);
                go(i - a, e, j + 1, acc, out);
                acc.pop();
            }
        }
    }
    go(i, e, 0, &mut Vec::new(), out);
}

fn act_word(word: &[u32], p: &Poly2) -> Poly2 {
    let mut cur = p.clone();
    for &i in word.iter().rev() {
        let mut next = Poly2::new();
        for e in cur.keys() {
            sq_mono(i, e, &mut next);
        }
        cur = next;
    }
    cur
}

fn act_element(el: &SteenrodElement, p: &Poly2) -> Poly2 {
    let mut out = Poly2::new();
    for w in el.terms() {
        for e in act_word(w, p).into_keys() {
            toggle(&mut out, e);
        }
    }
    out
}

fn product_of_variables(n: usize) -> Poly2 {
    [(vec![1; n], ())].into_iter().collect()
}

/// ⟨θ, ξ^R⟩ read off θ(x₁⋯x_n): the coefficient of Π x_j^{2^{i_j}} with
/// multiplicities R.
fn pairing(theta: &SteenrodElement, xi: &DualMonomial, n: usize) -> bool {
    let image = act_element(theta, &product_of_variables(n));
    let mut target = Vec::new();
    let mut used = 0;
    for (k, &r) in xi.exponents().iter().enumerate() {
        for _ in 0..r {
            target.push(1u32 << (k + 1));
            used += 1;
        }
    }
    if used > n {
        return false;
    }
    while target.len() < n {
        target.push(1);
    }
    target.sort_unstable_by(|a, b| b.cmp(a));
    image.contains_key(&target)
}

#[test]
fn adem_examples_and_idempotence() {
    assert!(adem_reduce(&[1, 1]).is_zero());
    assert_eq!(adem_reduce(&[2, 2]).to_string(), "Sq3 Sq1");
    assert_eq!(adem_reduce(&[4, 2]).to_string(), "Sq4 Sq2");
    for n in 1..=10 {
        for w in admissible_basis(n) {
            let r = adem_reduce(&w);
            assert_eq!(r.terms().collect::<Vec<_>>(), vec![&w]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, .. ProptestConfig::default() })]

    #[test]
    fn adem_normal_form_acts_like_the_word(word in proptest::collection::vec(0u32..5, 1..4)) {
        let deg: u32 = word.iter().sum();
        let n = deg.max(1) as usize;
        let reduced = adem_reduce(&word);
        prop_assert!(reduced.terms().all(|w| is_admissible(w)));
        if !reduced.is_zero() {
            prop_assert_eq!(reduced.degree(), Some(deg));
        }
        let p = product_of_variables(n);
        prop_assert_eq!(act_element(&reduced, &p), act_word(&word, &p));
    }

    #[test]
    fn diagonal_is_coassociative_and_counital(idx in 0usize..200) {
        let monos: Vec<DualMonomial> = (1..=14).flat_map(dual_basis).collect();
        let m = &monos[idx % monos.len()];
        let d = milnor_diagonal(m);
        // counit on both sides
        prop_assert!(d.contains(&(m.clone(), DualMonomial::one())));
        prop_assert!(d.contains(&(DualMonomial::one(), m.clone())));
        let mut left: BTreeMap<(DualMonomial, DualMonomial, DualMonomial), ()> = BTreeMap::new();
        let mut right = left.clone();
        let flip = |map: &mut BTreeMap<_, ()>, k| { if map.remove(&k).is_none() { map.insert(k, ()); } };
        for (a, b) in &d {
            for (a1, a2) in milnor_diagonal(a) { flip(&mut left, (a1, a2, b.clone())); }
            for (b1, b2) in milnor_diagonal(b) { flip(&mut right, (a.clone(), b1, b2)); }
        }
        prop_assert_eq!(left, right);
    }

    #[test]
    fn diagonal_is_multiplicative(i in 0usize..40, j in 0usize..40) {
        let monos: Vec<DualMonomial> = (1..=9).flat_map(dual_basis).collect();
        let (a, b) = (&monos[i % monos.len()], &monos[j % monos.len()]);
        let mut expect = DualTensor::new();
        for (a1, a2) in milnor_diagonal(a) {
            for (b1, b2) in milnor_diagonal(b) {
                let k = (a1.mul(&b1), a2.mul(&b2));
                if !expect.remove(&k) { expect.insert(k); }
            }
        }
        prop_assert_eq!(milnor_diagonal(&a.mul(b)), expect);
    }
}

#[test]
fn xi2_diagonal_from_the_pairing() {
    let xi1 = DualMonomial::xi(1, 1);
    let xi2 = DualMonomial::xi(2, 1);
    let expect: DualTensor = [
        (xi2.clone(), DualMonomial::one()),
        (DualMonomial::xi(1, 2), xi1.clone()),
        (DualMonomial::one(), xi2.clone()),
    ]
    .into_iter()
    .collect();
    assert_eq!(milnor_diagonal(&xi2), expect);
    assert_eq!(milnor_diagonal(&xi1).len(), 2);
}

#[test]
fn coproduct_is_dual_to_the_admissible_product() {
    // ⟨θφ, ξ⟩ = Σ ⟨θ, ξ'⟩⟨φ, ξ''⟩ over Δξ = Σ ξ' ⊗ ξ'', for all degrees ≤ 7.
    let mut reducer = AdemReducer::new();
    for total in 1..=7u32 {
        let n = total as usize;
        for a in 0..=total {
            for th in admissible_basis(a) {
                for ph in admissible_basis(total - a) {
                    let theta = SteenrodElement::from_admissible([th.clone()]).unwrap();
                    let phi = SteenrodElement::from_admissible([ph.clone()]).unwrap();
                    let prod = theta.mul(&phi, &mut reducer);
                    for xi in dual_basis(total) {
                        let lhs = pairing(&prod, &xi, n);
                        let mut rhs = false;
                        for (x1, x2) in milnor_diagonal(&xi) {
                            if x1.degree() == a
                                && pairing(&theta, &x1, a.max(1) as usize)
                                && pairing(&phi, &x2, (total - a).max(1) as usize)
                            {
                                rhs = !rhs;
                            }
                        }
                        assert_eq!(lhs, rhs, "{th:?}·{ph:?} against {xi}");
                    }
                }
            }
        }
    }
}

#[test]
fn cobar_one_line_and_diagonal() {
    let mut cx = CobarComplex::new(16);
    for t in 1..=16u32 {
        let expect = usize::from(t.is_power_of_two());
        assert_eq!(cx.cohomology_dim(1, t).unwrap(), expect, "t = {t}");
    }
    for s in 1..=6 {
        assert_eq!(cx.cohomology_dim(s, s).unwrap(), 1);
        let tower = CobarElement::h(0).pow(s);
        assert_eq!(cx.class_of(&tower).unwrap(), vec![0]);
    }
    let h1h2 = CobarElement::h(1).product(&CobarElement::h(2));
    assert!(cx.is_coboundary(&h1h2).unwrap());
}

#[test]
fn cobar_d_squared_vanishes() {
    let mut cx = CobarComplex::new(12);
    for t in 1..=12 {
        for s in 0..t {
            assert!(cx.d_squared_is_zero(s, t).unwrap(), "({s},{t})");
        }
    }
}

#[test]
fn massey_h1_h0_h1_is_h0h2() {
    let mut cx = CobarComplex::new(12);
    let (h0, h1, h2) = (CobarElement::h(0), CobarElement::h(1), CobarElement::h(2));
    let m = massey_product(&mut cx, &h1, &h0, &h1).unwrap();
    assert_eq!((m.s, m.t), (2, 5));
    assert!(m.contains(&mut cx, &h0.product(&h2)).unwrap());
    assert!(m.is_nonzero(&mut cx).unwrap());
    for seed in 0..8 {
        let r = massey_product_seeded(&mut cx, &h1, &h0, &h1, Some(seed)).unwrap();
        assert!(r.contains(&mut cx, &m.representative).unwrap());
    }
}

#[test]
fn massey_with_zero_middle_contains_zero() {
    let mut cx = CobarComplex::new(6);
    let h0 = CobarElement::h(0);
    let m = massey_product(&mut cx, &h0, &CobarElement::zero(1, 2), &h0).unwrap();
    assert!(m.contains(&mut cx, &CobarElement::zero(2, 4)).unwrap());
}

#[test]
fn massey_requires_vanishing_products() {
    let mut cx = CobarComplex::new(6);
    let h0 = CobarElement::h(0);
    let err = massey_product(&mut cx, &h0, &h0, &h0).unwrap_err();
    assert!(err.to_string().contains("products not zero"));
}

#[test]
fn c0_is_a_nonzero_indecomposable_bracket() {
    let mut cx = CobarComplex::new(12);
    let (h0, h1, h2) = (CobarElement::h(0), CobarElement::h(1), CobarElement::h(2));
    let c0 = massey_product(&mut cx, &h1, &h0, &h2.pow(2)).unwrap();
    assert_eq!((c0.s, c0.t), (3, 11));
    assert!(c0.is_nonzero(&mut cx).unwrap());
    assert_eq!(cx.cohomology_dim(3, 11).unwrap(), 1);
    // Nothing in (3,11) is an h_i multiple: the sources are empty or multiply to zero.
    for i in 0..4 {
        let t = 11 - (1 << i);
        for x in cx.cohomology_basis(2, t).unwrap() {
            let y = CobarElement::h(i).product(&x);
            assert!(cx.class_of(&y).unwrap().is_empty());
        }
    }
    for seed in 1..5 {
        let r = massey_product_seeded(&mut cx, &h1, &h0, &h2.pow(2), Some(seed)).unwrap();
        assert!(r.contains(&mut cx, &c0.representative).unwrap());
    }
}

#[test]
fn adams_periodicity_of_h1() {
    let mut cx = CobarComplex::new(14);
    let p = adams_periodicity(&mut cx, &CobarElement::h(1)).unwrap();
    assert_eq!((p.s, p.t), (5, 14));
    assert!(p.is_nonzero(&mut cx).unwrap());
}

#[test]
fn resolution_low_stages() {
    let res = MinimalResolution::compute(4, 14, DEFAULT_MAX_BASIS).unwrap();
    assert_eq!(res.generator_degrees(0), &[0]);
    assert_eq!(res.generator_degrees(1), &[1, 2, 4, 8]);
    // d(h_i generator) = Sq^{2^i} on the bottom class
    for (g, &deg) in res.generator_degrees(1).iter().enumerate() {
        let d = res.differential(1, g);
        assert!(d.iter().any(|(_, w)| w == &vec![deg]));
    }
}

#[test]
fn dual_methods_agree_on_small_window() {
    let res = MinimalResolution::compute(12, 14, DEFAULT_MAX_BASIS).unwrap();
    let dims = cobar_dimensions(12, 14, DEFAULT_MAX_BASIS).unwrap();
    for ((s, t), d) in dims {
        assert_eq!(res.ext_dim(s, t), d, "({s},{t})");
    }
}

fn window_chart() -> BigradedChart {
    let region = Region { s_max: 8, t_max: 24, max_stem: Some(16) };
    minimal_resolution_chart(&[region], ChartOptions::default()).unwrap().0
}

#[test]
fn two_line_relations() {
    let chart = window_chart();
    // h3h4 has stem 22, outside the window
    for i in 0..3u32 {
        assert_eq!(chart.product(&format!("h{i}"), &format!("h{}", i + 1)), Some(vec![]));
        assert_eq!(chart.product(&format!("h{}", i + 1), &format!("h{i}")), Some(vec![]));
        for j in 0..4u32 {
            assert_eq!(
                chart.product(&format!("h{i}"), &format!("h{j}")),
                chart.product(&format!("h{j}"), &format!("h{i}"))
            );
        }
    }
    for c in chart.cells.iter().filter(|c| c.s == 2) {
        for n in &c.names {
            assert!(n.starts_with('h'), "{n} at ({},{})", c.s, c.t);
        }
    }
}

#[test]
fn three_line_relations() {
    let chart = window_chart();
    // h_i h_{i+2}^2 = 0
    assert_eq!(chart.product("h0", "h2^2"), Some(vec![]));
    assert_eq!(chart.product("h1", "h3^2"), Some(vec![]));
    // h_i^2 h_{i+2} = h_{i+1}^3
    assert_eq!(chart.product("h1", "h1^2"), Some(vec!["h0^2h2".to_string()]));
    assert_eq!(chart.product("h2", "h2^2"), Some(vec!["h1^2h3".to_string()]));
    assert_eq!(chart.names(3, 11), vec!["c0".to_string()]);
}

#[test]
fn vanishing_line_and_planted_defect() {
    let chart = window_chart();
    assert!(vanishing_line_check(&chart).is_empty());
    let bad = chart.with_injected_class(4, 5, "planted");
    let v = vanishing_line_check(&bad);
    assert_eq!(v.len(), 1);
    assert_eq!((v[0].s, v[0].t), (4, 5));
    // ε(2) = 2: stem 1 at s = 2 is inside the wedge, stem 2 is on its boundary.
    assert_eq!(vanishing_line_check(&chart.with_injected_class(2, 3, "p")).len(), 1);
    assert!(vanishing_line_check(&chart.with_injected_class(2, 4, "p")).is_empty());
    assert_eq!(vanishing_epsilon(6), 2);
}

#[test]
fn chart_json_roundtrip_and_svg() {
    let chart = window_chart();
    let json = chart.to_json();
    let back: BigradedChart = serde_json::from_str(&json).unwrap();
    assert_eq!(back, chart);
    assert_eq!(window_chart().to_json(), json);
    let svg = chart.to_svg();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert!(svg.contains(">c0<"));
}

#[test]
fn cobar_chart_names_low_classes() {
    let region = Region { s_max: 4, t_max: 12, max_stem: None };
    let chart = cobar_cohomology(&[region], ChartOptions::default()).unwrap();
    assert_eq!(chart.names(1, 8), vec!["h3".to_string()]);
    assert_eq!(chart.names(2, 5), vec!["h0h2".to_string()]);
    assert_eq!(chart.names(3, 11), vec!["c0".to_string()]);
    assert_eq!(chart.names(4, 4), vec!["h0^4".to_string()]);
    assert!(vanishing_line_check(&chart).is_empty());
}

#[test]
fn resource_guard_trips() {
    let err = cobar_dimensions(8, 14, 100).unwrap_err();
    assert!(matches!(err, chromalg::Error::Resource(_)));
}
