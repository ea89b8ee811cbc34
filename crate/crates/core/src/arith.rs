//! Exact coefficient rings.
//!
//! Every engine in the crate is generic over [`Ring`], a small exact-ring
//! interface. Concrete rings: [`Rationals`], [`PrimeField`], [`FiniteField`]
//! (F_{p^n} from a [`FieldSpec`]), [`IntegersModPk`] and the truncated Witt
//! ring [`WittRing`] = W(F_{p^n})/p^K.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An exact commutative ring with identity.
pub trait Ring: Clone + Debug + Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Inverse if `a` is a unit.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn from_int(&self, n: i64) -> Self::Elem;
    /// 0 for characteristic zero.
    fn characteristic(&self) -> u64;
    fn fmt_elem(&self, a: &Self::Elem) -> String;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn from_bigint(&self, n: &BigInt) -> Self::Elem {
        let base = self.from_int(1 << 30);
        let mut acc = self.zero();
        let mut pow = self.one();
        let mut m = n.abs();
        let chunk = BigInt::from(1u64 << 30);
        while !m.is_zero() {
            let (q, r) = m.div_rem(&chunk);
            let digit = self.from_int(r.to_i64().unwrap());
            acc = self.add(&acc, &self.mul(&digit, &pow));
            pow = self.mul(&pow, &base);
            m = q;
        }
        if n.is_negative() {
            self.neg(&acc)
        } else {
            acc
        }
    }

    /// Image of a rational number, if its denominator is invertible.
    fn from_rational(&self, q: &BigRational) -> Option<Self::Elem> {
        let num = self.from_bigint(q.numer());
        let den = self.from_bigint(q.denom());
        self.inv(&den).map(|d| self.mul(&num, &d))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Absolute Frobenius a ↦ a^p in characteristic p.
    fn frobenius(&self, a: &Self::Elem) -> Self::Elem {
        let p = self.characteristic();
        assert!(p != 0, "frobenius in characteristic zero");
        self.pow(a, p)
    }
}

/// The field Q, with p-local integrality handled by [`p_valuation`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rationals;

impl Ring for Rationals {
    type Elem = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn from_int(&self, n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }
    fn from_bigint(&self, n: &BigInt) -> BigRational {
        BigRational::from_integer(n.clone())
    }
    fn from_rational(&self, q: &BigRational) -> Option<BigRational> {
        Some(q.clone())
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn fmt_elem(&self, a: &BigRational) -> String {
        a.to_string()
    }
}

/// Rings embedded in a Q-algebra where p-integrality can be tested.
pub trait PLocal: Ring {
    fn is_p_integral_elem(&self, a: &Self::Elem, p: u64) -> bool;
}

impl PLocal for Rationals {
    fn is_p_integral_elem(&self, a: &BigRational, p: u64) -> bool {
        is_p_integral(a, p)
    }
}

/// p-adic valuation of a nonzero integer.
pub fn int_valuation(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// p-adic valuation of a rational; `None` for zero.
pub fn p_valuation(q: &BigRational, p: u64) -> Option<i64> {
    if q.is_zero() {
        return None;
    }
    Some(int_valuation(q.numer(), p) as i64 - int_valuation(q.denom(), p) as i64)
}

pub fn is_p_integral(q: &BigRational, p: u64) -> bool {
    p_valuation(q, p).map_or(true, |v| v >= 0)
}

/// Reduce a p-integral rational modulo `m` (p^K).
pub fn rational_mod(q: &BigRational, m: u64) -> Option<u64> {
    let m_big = BigInt::from(m);
    let den = q.denom().mod_floor(&m_big);
    let inv = mod_inverse(den.to_u64()?, m)?;
    let num = q.numer().mod_floor(&m_big).to_u64()?;
    Some(mulmod(num, inv, m))
}

pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    acc
}

pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let g = num_integer::Integer::extended_gcd(&(a as i128), &(m as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m as i128) as u64)
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// The prime field F_p.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeField {
    pub p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Domain(format!("{p} is not prime")));
        }
        Ok(PrimeField { p })
    }
}

impl Ring for PrimeField {
    type Elem = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mulmod(*a, *b, self.p)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        (*a != 0).then(|| powmod(*a, self.p - 2, self.p))
    }
    fn from_int(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }
    fn from_bigint(&self, n: &BigInt) -> u64 {
        n.mod_floor(&BigInt::from(self.p)).to_u64().unwrap()
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn fmt_elem(&self, a: &u64) -> String {
        a.to_string()
    }
    fn frobenius(&self, a: &u64) -> u64 {
        *a
    }
}

/// F_{p^n} presented as F_p[w]/(modulus).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub n: usize,
    /// Monic modulus, low degree first; length n+1.
    pub modulus: Vec<u64>,
}

impl FieldSpec {
    /// Shipped moduli (Conway polynomials) for p ∈ {2,3,5,7}, n ∈ {1,2,3}.
    pub fn standard(p: u64, n: usize) -> Result<Self> {
        let modulus: &[u64] = match (p, n) {
            (2, 1) => &[1, 1],
            (2, 2) => &[1, 1, 1],
            (2, 3) => &[1, 1, 0, 1],
            (3, 1) => &[1, 1],
            (3, 2) => &[2, 2, 1],
            (3, 3) => &[1, 2, 0, 1],
            (5, 1) => &[3, 1],
            (5, 2) => &[2, 4, 1],
            (5, 3) => &[3, 3, 0, 1],
            (7, 1) => &[4, 1],
            (7, 2) => &[3, 6, 1],
            (7, 3) => &[4, 0, 6, 1],
            _ => {
                return Err(Error::Domain(format!(
                    "no shipped modulus for p={p}, n={n}"
                )))
            }
        };
        Ok(FieldSpec { p, n, modulus: modulus.to_vec() })
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.n as u32)
    }

    /// Brute-force irreducibility: no monic factor of degree ≤ n/2.
    pub fn is_irreducible(&self) -> bool {
        let p = self.p;
        for d in 1..=self.n / 2 {
            let count = p.pow(d as u32);
            for idx in 0..count {
                let mut f = vec![0u64; d + 1];
                let mut m = idx;
                for c in f.iter_mut().take(d) {
                    *c = m % p;
                    m /= p;
                }
                f[d] = 1;
                if poly_rem_mod(&self.modulus, &f, p).iter().all(|&c| c == 0) {
                    return false;
                }
            }
        }
        true
    }
}

/// Remainder of a by monic b over Z/m.
pub(crate) fn poly_rem_mod(a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
    let db = b.len() - 1;
    let mut r: Vec<u64> = a.to_vec();
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (i, &bc) in b.iter().enumerate() {
                let sub = mulmod(lead, bc, m);
                r[shift + i] = (r[shift + i] + m - sub) % m;
            }
        }
        r.pop();
    }
    r.resize(db, 0);
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], modulus: &[u64], m: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + mulmod(x, y, m)) % m;
        }
    }
    poly_rem_mod(&prod, modulus, m)
}

fn fmt_poly(coeffs: &[u64], var: &str) -> String {
    let mut parts = Vec::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        parts.push(match (i, c) {
            (0, _) => c.to_string(),
            (1, 1) => var.to_string(),
            (1, _) => format!("{c}*{var}"),
            (_, 1) => format!("{var}^{i}"),
            _ => format!("{c}*{var}^{i}"),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// The finite field F_{p^n}; elements are coefficient vectors in the generator w.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteField {
    pub spec: FieldSpec,
}

impl FiniteField {
    pub fn new(spec: FieldSpec) -> Self {
        FiniteField { spec }
    }

    pub fn standard(p: u64, n: usize) -> Result<Self> {
        Ok(Self::new(FieldSpec::standard(p, n)?))
    }

    pub fn generator(&self) -> Vec<u64> {
        let mut g = vec![0; self.spec.n];
        if self.spec.n == 1 {
            // Root of the linear modulus x + c.
            g[0] = (self.spec.p - self.spec.modulus[0]) % self.spec.p;
        } else {
            g[1] = 1;
        }
        g
    }

    pub fn from_coeffs(&self, c: &[u64]) -> Vec<u64> {
        let mut v: Vec<u64> = c.iter().map(|x| x % self.spec.p).collect();
        v = poly_rem_mod(&v, &self.spec.modulus, self.spec.p);
        v
    }

    pub fn elements(&self) -> Vec<Vec<u64>> {
        let q = self.spec.order();
        (0..q).map(|i| self.element_from_index(i)).collect()
    }

    pub fn element_from_index(&self, mut i: u64) -> Vec<u64> {
        let mut v = vec![0; self.spec.n];
        for c in v.iter_mut() {
            *c = i % self.spec.p;
            i /= self.spec.p;
        }
        v
    }

    pub fn index_of(&self, a: &[u64]) -> u64 {
        a.iter().rev().fold(0, |acc, &c| acc * self.spec.p + c)
    }

    /// Discrete logarithm to base `generator()`, by search.
    pub fn discrete_log(&self, a: &[u64]) -> Option<u64> {
        let g = self.generator();
        let mut x = self.one();
        for k in 0..self.spec.order() - 1 {
            if x == a {
                return Some(k);
            }
            x = self.mul(&x, &g);
        }
        None
    }
}

impl Ring for FiniteField {
    type Elem = Vec<u64>;
    fn zero(&self) -> Vec<u64> {
        vec![0; self.spec.n]
    }
    fn one(&self) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = 1;
        v
    }
    fn add(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.spec.p).collect()
    }
    fn neg(&self, a: &Vec<u64>) -> Vec<u64> {
        a.iter().map(|x| (self.spec.p - x) % self.spec.p).collect()
    }
    fn mul(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        poly_mulmod(a, b, &self.spec.modulus, self.spec.p)
    }
    fn is_zero(&self, a: &Vec<u64>) -> bool {
        a.iter().all(|&x| x == 0)
    }
    fn inv(&self, a: &Vec<u64>) -> Option<Vec<u64>> {
        (!self.is_zero(a)).then(|| self.pow(a, self.spec.order() - 2))
    }
    fn from_int(&self, n: i64) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = n.rem_euclid(self.spec.p as i64) as u64;
        v
    }
    fn characteristic(&self) -> u64 {
        self.spec.p
    }
    fn fmt_elem(&self, a: &Vec<u64>) -> String {
        fmt_poly(a, "w")
    }
}

/// Z/p^K.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegersModPk {
    pub p: u64,
    pub k: u32,
    pub modulus: u64,
}

impl IntegersModPk {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        let modulus = p
            .checked_pow(k)
            .filter(|m| *m < (1 << 62))
            .ok_or_else(|| Error::Resource(format!("p^K too large: {p}^{k}")))?;
        Ok(IntegersModPk { p, k, modulus })
    }
}

impl Ring for IntegersModPk {
    type Elem = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.modulus
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.modulus
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.modulus - a) % self.modulus
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mulmod(*a, *b, self.modulus)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if a % self.p == 0 {
            None
        } else {
            mod_inverse(*a, self.modulus)
        }
    }
    fn from_int(&self, n: i64) -> u64 {
        (n as i128).rem_euclid(self.modulus as i128) as u64
    }
    fn from_bigint(&self, n: &BigInt) -> u64 {
        n.mod_floor(&BigInt::from(self.modulus)).to_u64().unwrap()
    }
    fn characteristic(&self) -> u64 {
        if self.k == 1 {
            self.p
        } else {
            0
        }
    }
    fn fmt_elem(&self, a: &u64) -> String {
        a.to_string()
    }
}

/// W(F_{p^n})/p^K as (Z/p^K)[w]/(f̃), f̃ the integer lift of the shipped modulus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WittRing {
    pub field: FiniteField,
    pub k: u32,
    pub pk: u64,
    /// Image of w under the Frobenius lift.
    frob_root: Vec<u64>,
}

impl WittRing {
    pub fn new(p: u64, n: usize, k: u32) -> Result<Self> {
        let field = FiniteField::standard(p, n)?;
        let pk = IntegersModPk::new(p, k)?.modulus;
        let mut w = WittRing { field, k, pk, frob_root: vec![] };
        w.frob_root = w.hensel_frobenius_root();
        Ok(w)
    }

    pub fn p(&self) -> u64 {
        self.field.spec.p
    }

    pub fn n(&self) -> usize {
        self.field.spec.n
    }

    /// Root r of f̃ with r ≡ w^p mod p, by Newton iteration.
    fn hensel_frobenius_root(&self) -> Vec<u64> {
        let n = self.n();
        let modulus = &self.field.spec.modulus;
        let gen = {
            let mut g = vec![0; n];
            if n == 1 {
                g[0] = (self.pk - modulus[0]) % self.pk;
                // n = 1: f̃ is linear, its root is fixed by the Frobenius.
                return g;
            }
            g[1] = 1;
            g
        };
        let mut r = self.pow(&gen, self.p());
        let deriv: Vec<u64> = (1..modulus.len())
            .map(|i| mulmod(modulus[i], i as u64, self.pk))
            .collect();
        for _ in 0..=self.k + 1 {
            let fr = self.eval_int_poly(modulus, &r);
            if self.is_zero(&fr) {
                break;
            }
            let dr = self.eval_int_poly(&deriv, &r);
            let inv = self.inv(&dr).expect("separable modulus");
            r = self.sub(&r, &self.mul(&fr, &inv));
        }
        r
    }

    fn eval_int_poly(&self, coeffs: &[u64], x: &[u64]) -> Vec<u64> {
        let mut acc = self.zero();
        for &c in coeffs.iter().rev() {
            acc = self.mul(&acc, &x.to_vec());
            acc[0] = (acc[0] + c) % self.pk;
        }
        acc
    }

    pub fn generator(&self) -> Vec<u64> {
        let mut g = self.zero();
        if self.n() == 1 {
            g[0] = (self.pk - self.field.spec.modulus[0]) % self.pk;
        } else {
            g[1] = 1;
        }
        g
    }

    /// The lifted Frobenius φ, a ring automorphism of order n.
    pub fn frobenius_lift(&self, a: &[u64]) -> Vec<u64> {
        if self.n() == 1 {
            return a.to_vec();
        }
        let mut acc = self.zero();
        for &c in a.iter().rev() {
            acc = self.mul(&acc, &self.frob_root);
            acc[0] = (acc[0] + c) % self.pk;
        }
        acc
    }

    pub fn frobenius_iter(&self, a: &[u64], times: usize) -> Vec<u64> {
        let mut x = a.to_vec();
        for _ in 0..times % self.n() {
            x = self.frobenius_lift(&x);
        }
        x
    }

    pub fn reduce(&self, a: &[u64]) -> Vec<u64> {
        a.iter().map(|c| c % self.p()).collect()
    }

    pub fn lift(&self, a: &[u64]) -> Vec<u64> {
        a.to_vec()
    }

    /// Teichmüller representative of a field element.
    pub fn teichmuller(&self, a: &[u64]) -> Vec<u64> {
        let q = self.field.spec.order();
        let mut x = a.to_vec();
        for _ in 0..self.k {
            x = self.pow(&x, q);
        }
        x
    }

    /// Rational integer part when the element lies in Z/p^K.
    pub fn as_integer(&self, a: &[u64]) -> Option<u64> {
        a[1..].iter().all(|&c| c == 0).then_some(a[0])
    }

    /// p-adic valuation (K for zero).
    pub fn valuation(&self, a: &[u64]) -> u32 {
        let p = self.p();
        let mut v = self.k;
        for &c in a {
            if c != 0 {
                let mut m = c;
                let mut e = 0;
                while m % p == 0 {
                    m /= p;
                    e += 1;
                }
                v = v.min(e);
            }
        }
        v
    }

    /// Divide by p^e when the element is divisible; the top e digits are lost.
    pub fn div_p_pow(&self, a: &[u64], e: u32) -> Option<Vec<u64>> {
        let pe = self.p().pow(e);
        a.iter()
            .map(|&c| (c % pe == 0).then_some(c / pe))
            .collect()
    }
}

impl Ring for WittRing {
    type Elem = Vec<u64>;
    fn zero(&self) -> Vec<u64> {
        vec![0; self.n()]
    }
    fn one(&self) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = 1 % self.pk;
        v
    }
    fn add(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.pk).collect()
    }
    fn neg(&self, a: &Vec<u64>) -> Vec<u64> {
        a.iter().map(|x| (self.pk - x) % self.pk).collect()
    }
    fn mul(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        poly_mulmod(a, b, &self.field.spec.modulus, self.pk)
    }
    fn is_zero(&self, a: &Vec<u64>) -> bool {
        a.iter().all(|&x| x == 0)
    }
    fn inv(&self, a: &Vec<u64>) -> Option<Vec<u64>> {
        let abar = self.reduce(a);
        let x0 = self.field.inv(&abar)?;
        let two = self.from_int(2);
        let mut x = x0;
        // Newton: x ← x(2 − a x) doubles the precision.
        for _ in 0..=(32 - self.k.leading_zeros()) + 1 {
            x = self.mul(&x, &self.sub(&two, &self.mul(a, &x)));
        }
        Some(x)
    }
    fn from_int(&self, n: i64) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = (n as i128).rem_euclid(self.pk as i128) as u64;
        v
    }
    fn from_bigint(&self, n: &BigInt) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = n.mod_floor(&BigInt::from(self.pk)).to_u64().unwrap();
        v
    }
    fn characteristic(&self) -> u64 {
        if self.k == 1 {
            self.p()
        } else {
            0
        }
    }
    fn fmt_elem(&self, a: &Vec<u64>) -> String {
        fmt_poly(a, "w")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_moduli_are_irreducible() {
        for p in [2, 3, 5, 7] {
            for n in 1..=3 {
                assert!(FieldSpec::standard(p, n).unwrap().is_irreducible(), "p={p} n={n}");
            }
        }
    }

    #[test]
    fn generator_is_primitive() {
        for p in [2, 3, 5, 7] {
            for n in 1..=3 {
                let f = FiniteField::standard(p, n).unwrap();
                let q = f.spec.order();
                let g = f.generator();
                let mut x = g.clone();
                let mut ord = 1;
                while !f.is_one(&x) {
                    x = f.mul(&x, &g);
                    ord += 1;
                }
                assert_eq!(ord, q - 1, "p={p} n={n}");
            }
        }
    }

    #[test]
    fn exhaustive_small_field_axioms() {
        for (p, n) in [(2, 1), (2, 2), (3, 2), (5, 2)] {
            let f = FiniteField::standard(p, n).unwrap();
            let els = f.elements();
            for a in &els {
                if !f.is_zero(a) {
                    assert!(f.is_one(&f.mul(a, &f.inv(a).unwrap())));
                }
                for b in &els {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in &els {
                        assert_eq!(f.mul(&f.mul(a, b), c), f.mul(a, &f.mul(b, c)));
                        assert_eq!(
                            f.mul(a, &f.add(b, c)),
                            f.add(&f.mul(a, b), &f.mul(a, c))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn witt_frobenius_root_matches_brute_force() {
        // W(F_9)/9: search all 81 elements for roots of f̃ congruent to w^3.
        let w = WittRing::new(3, 2, 2).unwrap();
        let modulus = w.field.spec.modulus.clone();
        let g = w.generator();
        let target = w.field.pow(&w.reduce(&g), 3);
        let mut roots = vec![];
        for a in 0..9 {
            for b in 0..9 {
                let r = vec![a, b];
                if w.is_zero(&w.eval_int_poly(&modulus, &r)) && w.reduce(&r) == target {
                    roots.push(r);
                }
            }
        }
        assert_eq!(roots.len(), 1);
        assert_eq!(w.frobenius_lift(&g), roots[0]);
    }

    #[test]
    fn witt_frobenius_has_order_n() {
        for (p, n, k) in [(3, 2, 3), (5, 2, 4), (2, 3, 5), (7, 3, 2)] {
            let w = WittRing::new(p, n, k).unwrap();
            let g = w.generator();
            let a = w.add(&w.mul(&g, &g), &w.from_int(7));
            assert_eq!(w.frobenius_iter(&a, n), a);
            assert_eq!(w.reduce(&w.frobenius_lift(&a)), w.field.frobenius(&w.reduce(&a)));
        }
    }

    #[test]
    fn witt_inverse() {
        let w = WittRing::new(5, 2, 6).unwrap();
        let a = vec![3, 7];
        let ai = w.inv(&a).unwrap();
        assert!(w.is_one(&w.mul(&a, &ai)));
        assert!(w.inv(&vec![5, 10]).is_none());
    }

    #[test]
    fn valuations() {
        let q = BigRational::new(BigInt::from(50), BigInt::from(3));
        assert_eq!(p_valuation(&q, 5), Some(2));
        assert_eq!(p_valuation(&q, 3), Some(-1));
        assert_eq!(rational_mod(&BigRational::new(1.into(), 2.into()), 9), Some(5));
    }
}
