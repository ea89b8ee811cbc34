use chromalg::arith::{FiniteField, IntegersModPk, PrimeField, Ring, WittRing};
use chromalg::linalg::{fp_rank_kernel, smith_normal_form, SparseMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

/// Plain mod-p elimination on u64 rows.
fn oracle_rank(mut a: Vec<Vec<u64>>, p: u64) -> usize {
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(pr) = (rank..a.len()).find(|&r| a[r][c] % p != 0) else {
            continue;
        };
        a.swap(rank, pr);
        let piv = a[rank][c];
        let inv = (1..p).find(|i| i * piv % p == 1).unwrap();
        for r in 0..a.len() {
            if r != rank && a[r][c] != 0 {
                let f = a[r][c] * inv % p;
                for k in 0..cols {
                    a[r][k] = (a[r][k] + p * p - f * a[rank][k] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn int_matrix(rows: &[Vec<i64>]) -> SparseMatrix<BigInt> {
    let r = rows.len();
    let c = rows.first().map_or(0, |x| x.len());
    let triples: Vec<_> = rows
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, &v)| (i, j, BigInt::from(v))))
        .collect();
    SparseMatrix::from_triples(&Z, r, c, triples).unwrap()
}

#[derive(Clone, Debug)]
struct Z;

impl Ring for Z {
    type Elem = BigInt;
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn inv(&self, a: &BigInt) -> Option<BigInt> {
        (a.abs().is_one()).then(|| a.clone())
    }
    fn from_int(&self, n: i64) -> BigInt {
        n.into()
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn fmt_elem(&self, a: &BigInt) -> String {
        a.to_string()
    }
}

fn det(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, &v)| v).collect())
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors from determinantal divisors: d_k = gcd of k×k minors.
fn oracle_invariant_factors(m: &[Vec<i64>]) -> Vec<i64> {
    let (r, c) = (m.len(), m.first().map_or(0, |x| x.len()));
    let mut divisors = vec![1i64];
    for k in 1..=r.min(c) {
        let mut g = 0i64;
        for rs in subsets(r, k) {
            for cs in subsets(c, k) {
                let minor: Vec<Vec<i64>> =
                    rs.iter().map(|&i| cs.iter().map(|&j| m[i][j]).collect()).collect();
                g = g.gcd(&det(&minor));
            }
        }
        if g == 0 {
            break;
        }
        divisors.push(g);
    }
    divisors.windows(2).map(|w| w[1] / w[0]).collect()
}

/// Count Z^r / image by enumerating the image inside a box mod N.
fn brute_cokernel_torsion_order(m: &[Vec<i64>], modulus: i64) -> usize {
    let r = m.len();
    let c = m[0].len();
    let mut seen = std::collections::HashSet::new();
    let mut frontier = vec![vec![0i64; r]];
    seen.insert(vec![0i64; r]);
    while let Some(v) = frontier.pop() {
        for j in 0..c {
            let w: Vec<i64> = (0..r).map(|i| (v[i] + m[i][j]).rem_euclid(modulus)).collect();
            if seen.insert(w.clone()) {
                frontier.push(w);
            }
        }
    }
    (modulus as usize).pow(r as u32) / seen.len()
}

#[test]
fn field_axioms_including_additive_group() {
    for (p, n) in [(2, 1), (2, 2), (3, 2), (5, 2)] {
        let f = FiniteField::standard(p, n).unwrap();
        let els = f.elements();
        assert_eq!(els.len() as u64, p.pow(n as u32));
        for a in &els {
            assert!(f.is_zero(&f.add(a, &f.neg(a))));
            assert_eq!(f.mul(a, &f.one()), *a);
            for b in &els {
                assert_eq!(f.add(a, b), f.add(b, a));
            }
        }
    }
}

#[test]
fn discrete_log_round_trips() {
    let f = FiniteField::standard(5, 2).unwrap();
    let g = f.generator();
    for e in 0..24 {
        assert_eq!(f.discrete_log(&f.pow(&g, e)), Some(e));
    }
    assert_eq!(f.discrete_log(&f.zero()), None);
}

#[test]
fn rank_kernel_examples() {
    let f2 = PrimeField::new(2).unwrap();
    let zero = SparseMatrix::from_triples(&f2, 3, 3, vec![]).unwrap();
    let (r, k) = fp_rank_kernel(&f2, &zero).unwrap();
    assert_eq!((r, k.len()), (0, 3));

    let f5 = PrimeField::new(5).unwrap();
    let id = SparseMatrix::from_triples(&f5, 4, 4, (0..4).map(|i| (i, i, 1))).unwrap();
    let (r, k) = fp_rank_kernel(&f5, &id).unwrap();
    assert_eq!((r, k.len()), (4, 0));
}

#[test]
fn smith_examples() {
    let cases: [(Vec<Vec<i64>>, Vec<i64>); 3] = [
        (vec![vec![2, 4], vec![6, 8]], vec![2, 4]),
        (vec![vec![6, 0], vec![0, 4]], vec![2, 12]),
        (vec![vec![1, 0], vec![0, 1]], vec![1, 1]),
    ];
    for (m, want) in cases {
        let s = smith_normal_form(&int_matrix(&m));
        let got: Vec<i64> = s.factors.iter().map(|d| d.try_into().unwrap()).collect();
        assert_eq!(got, want, "{m:?}");
    }
}

#[test]
fn integers_mod_pk_units() {
    let z = IntegersModPk::new(3, 3).unwrap();
    for a in 0..27u64 {
        let e = z.from_int(a as i64);
        assert_eq!(z.inv(&e).is_some(), a % 3 != 0);
    }
}

#[test]
fn witt_teichmuller_is_multiplicative_and_fixed_by_q_power() {
    let w = WittRing::new(5, 2, 3).unwrap();
    let els = w.field.elements();
    for a in els.iter().take(10) {
        let ta = w.teichmuller(a);
        assert_eq!(w.reduce(&ta), *a);
        assert_eq!(w.pow(&ta, 25), ta);
        for b in els.iter().skip(7).take(5) {
            let tb = w.teichmuller(b);
            assert_eq!(w.teichmuller(&w.field.mul(a, b)), w.mul(&ta, &tb));
        }
    }
}

#[test]
fn witt_n1_frobenius_is_identity() {
    let w = WittRing::new(7, 1, 4).unwrap();
    for a in 0..50 {
        let x = w.from_int(a);
        assert_eq!(w.frobenius_lift(&x), x);
        assert_eq!(w.as_integer(&x), Some(a as u64));
    }
}

fn matrix_strategy(max: usize, p: u64) -> impl Strategy<Value = Vec<Vec<u64>>> {
    (1..=max, 1..=max).prop_flat_map(move |(r, c)| {
        prop::collection::vec(prop::collection::vec(0..p, c), r)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_matches_oracle(p in prop::sample::select(vec![2u64, 3, 5, 7]), m in matrix_strategy(30, 7)) {
        let m: Vec<Vec<u64>> = m.into_iter().map(|r| r.into_iter().map(|x| x % p).collect()).collect();
        let ring = PrimeField::new(p).unwrap();
        let (rows, cols) = (m.len(), m[0].len());
        let triples: Vec<_> = m.iter().enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &v)| (i, j, v)))
            .collect();
        let sm = SparseMatrix::from_triples(&ring, rows, cols, triples).unwrap();
        let (rank, kernel) = fp_rank_kernel(&ring, &sm).unwrap();
        prop_assert_eq!(rank, oracle_rank(m.clone(), p));
        prop_assert_eq!(rank + kernel.len(), cols);
        for v in &kernel {
            prop_assert!(sm.mul_vec(&ring, v).iter().all(|x| *x == 0));
        }
        prop_assert_eq!(oracle_rank(kernel.clone(), p), kernel.len());
    }

    #[test]
    fn smith_matches_determinantal_divisors(
        m in (1usize..=3, 1usize..=3).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-8i64..=8, c), r))
    ) {
        let s = smith_normal_form(&int_matrix(&m));
        let got: Vec<i64> = s.factors.iter().map(|d| d.try_into().unwrap()).collect();
        prop_assert_eq!(&got, &oracle_invariant_factors(&m));
        for w in got.windows(2) {
            prop_assert_eq!(w[1] % w[0], 0);
        }
    }

    #[test]
    fn cokernel_matches_enumeration(
        m in (1usize..=2, 1usize..=3).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-8i64..=8, c), r))
    ) {
        let s = smith_normal_form(&int_matrix(&m));
        let (torsion, free) = s.cokernel();
        // Modulus N kills the torsion; the free part contributes N per summand.
        let order: i64 = torsion.iter().map(|d| i64::try_from(d).unwrap()).product();
        let n = if order == 1 { 2 } else { order };
        let expect = (order as usize) * (n as usize).pow(free as u32);
        prop_assert_eq!(brute_cokernel_torsion_order(&m, n), expect);
    }

    #[test]
    fn witt_frobenius_is_ring_automorphism(
        (p, n, k) in prop::sample::select(vec![(3u64, 2usize, 3u32), (5, 2, 2), (2, 3, 4), (5, 3, 2)]),
        a in prop::collection::vec(0u64..1000, 3),
        b in prop::collection::vec(0u64..1000, 3),
    ) {
        let w = WittRing::new(p, n, k).unwrap();
        let a: Vec<u64> = a[..n].iter().map(|x| x % w.pk).collect();
        let b: Vec<u64> = b[..n].iter().map(|x| x % w.pk).collect();
        let phi = |x: &Vec<u64>| w.frobenius_lift(x);
        prop_assert_eq!(phi(&w.add(&a, &b)), w.add(&phi(&a), &phi(&b)));
        prop_assert_eq!(phi(&w.mul(&a, &b)), w.mul(&phi(&a), &phi(&b)));
        prop_assert_eq!(w.frobenius_iter(&a, n), a.clone());
        prop_assert_eq!(w.reduce(&phi(&a)), w.field.pow(&w.reduce(&a), p));
    }
}
