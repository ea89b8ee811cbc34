//! Endomorphisms of the Honda formal group and the Morava stabilizer group.
//!
//! `End(Γ_n)` is presented as `W(F_{p^n})⟨S⟩/(S^n − p)` with `S·a = φ(a)·S`.
//! An element is stored as `b_0 + b_1 S + … + b_{n−1} S^{n−1}` with each
//! `b_i ∈ W(F_{p^n})/p^K`. Every element also has a unique expansion
//! `Σ_m [a_m] S^m` with Teichmüller digits `a_m ∈ F_{p^n}`; these are the
//! coefficients of the series `f(x) = a_0 x +_Γ a_1 x^p +_Γ a_2 x^{p²} +_Γ …`.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::arith::{int_valuation, FiniteField, IntegersModPk, Ring, WittRing};
use crate::error::{Error, Result};
use crate::fgl::{honda, FormalGroupLaw};
use crate::series::{ps_compose, Series};

/// Ordered basis used for the determinant.
pub const DET_BASIS: &str = "1, S, ..., S^(n-1)";

/// The ring `W(F_{p^n})⟨S⟩/(S^n − p)` modulo `p^K`.
#[derive(Clone, Debug)]
pub struct EndRing {
    pub p: u64,
    pub n: usize,
    pub k: u32,
    pub witt: WittRing,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EndRingElement {
    pub p: u64,
    pub n: usize,
    pub k: u32,
    /// `b_i` as coordinates in the Witt generator `w`.
    pub b: Vec<Vec<u64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Filtration {
    Finite { num: u32, den: u32 },
    Infinite,
}

impl fmt::Display for Filtration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Filtration::Infinite => write!(f, "inf"),
            Filtration::Finite { num, den } => {
                let g = num.gcd(&den);
                if den / g == 1 {
                    write!(f, "{}", num / g)
                } else {
                    write!(f, "{}/{}", num / g, den / g)
                }
            }
        }
    }
}

impl EndRing {
    pub fn new(p: u64, n: usize, k: u32) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::Domain("height and precision must be positive".into()));
        }
        Ok(EndRing { p, n, k, witt: WittRing::new(p, n, k)? })
    }

    fn check(&self, a: &EndRingElement) -> Result<()> {
        if (a.p, a.n, a.k) != (self.p, self.n, self.k) || a.b.len() != self.n {
            return Err(Error::Precondition(format!(
                "parameter mismatch: element (p={}, n={}, K={}) in ring (p={}, n={}, K={})",
                a.p, a.n, a.k, self.p, self.n, self.k
            )));
        }
        Ok(())
    }

    pub fn from_coeffs(&self, b: Vec<Vec<u64>>) -> EndRingElement {
        let mut b: Vec<Vec<u64>> = b.into_iter().map(|c| self.witt.add(&c, &self.witt.zero())).collect();
        b.resize(self.n, self.witt.zero());
        EndRingElement { p: self.p, n: self.n, k: self.k, b }
    }

    pub fn from_witt(&self, c: &[u64]) -> EndRingElement {
        self.from_coeffs(vec![c.to_vec()])
    }

    pub fn zero(&self) -> EndRingElement {
        self.from_coeffs(vec![])
    }

    pub fn one(&self) -> EndRingElement {
        self.from_witt(&self.witt.one())
    }

    pub fn from_int(&self, c: i64) -> EndRingElement {
        self.from_witt(&self.witt.from_int(c))
    }

    /// The Frobenius endomorphism `x ↦ x^p`.
    pub fn s(&self) -> EndRingElement {
        if self.n == 1 {
            return self.from_int(self.p as i64);
        }
        let mut e = self.zero();
        e.b[1] = self.witt.one();
        e
    }

    /// The Witt generator `w` as a constant.
    pub fn w(&self) -> EndRingElement {
        self.from_witt(&self.witt.generator())
    }

    /// `[a]` for `a ∈ F_{p^n}`.
    pub fn teichmuller(&self, a: &[u64]) -> EndRingElement {
        self.from_witt(&self.witt.teichmuller(a))
    }

    pub fn add(&self, a: &EndRingElement, b: &EndRingElement) -> Result<EndRingElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.from_coeffs(a.b.iter().zip(&b.b).map(|(x, y)| self.witt.add(x, y)).collect()))
    }

    pub fn neg(&self, a: &EndRingElement) -> EndRingElement {
        self.from_coeffs(a.b.iter().map(|x| self.witt.neg(x)).collect())
    }

    pub fn sub(&self, a: &EndRingElement, b: &EndRingElement) -> Result<EndRingElement> {
        self.add(a, &self.neg(b))
    }

    /// `(Σ a_i S^i)(Σ b_j S^j) = Σ a_i φ^i(b_j) S^{i+j}`, with `S^n = p`.
    pub fn mul(&self, a: &EndRingElement, b: &EndRingElement) -> Result<EndRingElement> {
        self.check(a)?;
        self.check(b)?;
        let w = &self.witt;
        let p = w.from_int(self.p as i64);
        let mut out = vec![w.zero(); self.n];
        for (i, ai) in a.b.iter().enumerate() {
            if w.is_zero(ai) {
                continue;
            }
            for (j, bj) in b.b.iter().enumerate() {
                if w.is_zero(bj) {
                    continue;
                }
                let mut c = w.mul(ai, &w.frobenius_iter(bj, i));
                let mut deg = i + j;
                if deg >= self.n {
                    c = w.mul(&c, &p);
                    deg -= self.n;
                }
                out[deg] = w.add(&out[deg], &c);
            }
        }
        Ok(self.from_coeffs(out))
    }

    pub fn pow(&self, a: &EndRingElement, mut e: u64) -> Result<EndRingElement> {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base)?;
            }
            base = self.mul(&base, &base)?;
            e >>= 1;
        }
        Ok(acc)
    }

    pub fn is_unit(&self, a: &EndRingElement) -> bool {
        !self.witt.field.is_zero(&self.witt.reduce(&a.b[0]))
    }

    pub fn inv(&self, a: &EndRingElement) -> Result<EndRingElement> {
        self.check(a)?;
        let b0i = self
            .witt
            .inv(&a.b[0])
            .ok_or_else(|| Error::Domain("not a unit: b_0 is divisible by p".into()))?;
        let two = self.from_int(2);
        let mut z = self.from_witt(&b0i);
        // Newton doubles the S-adic precision; nK digits are meaningful.
        let steps = 64 - ((self.n as u64) * self.k as u64).leading_zeros() + 1;
        for _ in 0..steps {
            z = self.mul(&z, &self.sub(&two, &self.mul(a, &z)?)?)?;
        }
        Ok(z)
    }

    pub fn is_one(&self, a: &EndRingElement) -> bool {
        *a == self.one()
    }

    /// `y` with `x = y·S`, for `x ≡ 0 mod S`; the top p-adic digit of the wrapped coefficient is lost.
    fn s_divide(&self, x: &EndRingElement) -> EndRingElement {
        let w = &self.witt;
        let c = w.div_p_pow(&x.b[0], 1).expect("b_0 divisible by p");
        let mut out = vec![w.zero(); self.n];
        for i in 1..self.n {
            out[i - 1] = x.b[i].clone();
        }
        out[self.n - 1] = w.add(&out[self.n - 1], &c);
        self.from_coeffs(out)
    }

    /// Number of Teichmüller digits determined at precision K.
    pub fn readable_digits(&self) -> usize {
        self.n * self.k as usize
    }

    /// Teichmüller digits `a_0, a_1, …` with `x = Σ [a_m] S^m`.
    pub fn digits(&self, x: &EndRingElement, count: usize) -> Result<Vec<Vec<u64>>> {
        self.check(x)?;
        if count > self.readable_digits() {
            return Err(Error::Precondition(format!(
                "{count} digits requested but only {} are readable at precision {}",
                self.readable_digits(),
                self.k
            )));
        }
        let mut cur = x.clone();
        let mut out = Vec::with_capacity(count);
        for m in 0..count {
            let a = self.witt.reduce(&cur.b[0]);
            out.push(a.clone());
            if m + 1 < count {
                cur = self.sub(&cur, &self.teichmuller(&a))?;
                cur = self.s_divide(&cur);
            }
        }
        Ok(out)
    }

    pub fn from_digits(&self, digits: &[Vec<u64>]) -> Result<EndRingElement> {
        let mut acc = self.zero();
        let mut sp = self.one();
        let s = self.s();
        for a in digits {
            acc = self.add(&acc, &self.mul(&self.teichmuller(a), &sp)?)?;
            sp = self.mul(&sp, &s)?;
        }
        Ok(acc)
    }

    /// Reduce modulo `S^d`.
    pub fn truncate_s(&self, x: &EndRingElement, d: usize) -> EndRingElement {
        let b = x
            .b
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let e = if d > i { ((d - i) + self.n - 1) / self.n } else { 0 } as u32;
                let m = self.p.pow(e.min(self.k));
                c.iter().map(|v| v % m).collect()
            })
            .collect();
        self.from_coeffs(b)
    }

    /// `min_i (n·v_p(b_i) + i)`; `None` when zero at this precision.
    pub fn s_valuation(&self, x: &EndRingElement) -> Option<usize> {
        let top = self.readable_digits();
        let v = x
            .b
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.witt.is_zero(c))
            .map(|(i, c)| self.n * self.witt.valuation(c) as usize + i)
            .min()?;
        (v < top).then_some(v)
    }

    /// Largest `i/n` with `e ≡ 1 mod S^i`.
    pub fn filtration_degree(&self, e: &EndRingElement) -> Result<Filtration> {
        self.check(e)?;
        if !self.is_unit(e) {
            return Err(Error::Domain("filtration is defined on units".into()));
        }
        Ok(match self.s_valuation(&self.sub(e, &self.one())?) {
            None => Filtration::Infinite,
            Some(v) => Filtration::Finite { num: v as u32, den: self.n as u32 },
        })
    }

    /// Matrix of `x ↦ x·e` in the basis `1, S, …, S^{n−1}`; row i is `S^i·e`.
    pub fn right_multiplication_matrix(&self, e: &EndRingElement) -> Result<Vec<Vec<Vec<u64>>>> {
        let s = self.s();
        let mut rows = Vec::with_capacity(self.n);
        let mut si = self.one();
        for _ in 0..self.n {
            rows.push(self.mul(&si, e)?.b);
            si = self.mul(&si, &s)?;
        }
        Ok(rows)
    }

    pub fn determinant(&self, e: &EndRingElement) -> Result<Vec<u64>> {
        self.check(e)?;
        let m = self.right_multiplication_matrix(e)?;
        Ok(leibniz_det(&self.witt, &m))
    }

    /// The determinant as an element of `Z/p^K`, or an error if it leaves the `Z_p`-line.
    pub fn determinant_integer(&self, e: &EndRingElement) -> Result<u64> {
        let d = self.determinant(e)?;
        self.witt
            .as_integer(&d)
            .ok_or_else(|| Error::Verification(format!("determinant {} is not in Z_p", self.witt.fmt_elem(&d))))
    }

    /// `[ω]^{-1}·g·[ω]`, i.e. the series `ω^{-1} f(ω x)`.
    pub fn conjugate_teichmuller(&self, omega: &[u64], g: &EndRingElement) -> Result<EndRingElement> {
        let t = self.teichmuller(omega);
        self.mul(&self.inv(&t)?, &self.mul(g, &t)?)
    }

    /// Central element `c ∈ 1 + pZ_p` with `c^n = d`.
    pub fn central_root(&self, d: u64) -> Result<u64> {
        let z = IntegersModPk::new(self.p, self.k)?;
        if d % self.p != 1 % self.p {
            return Err(Error::Domain(format!("{d} is not congruent to 1 mod {}", self.p)));
        }
        if self.n as u64 % self.p == 0 {
            return Err(Error::Unsupported("p divides n: no central splitting".into()));
        }
        let n = self.n as u64;
        let inv_n = z.inv(&z.from_int(n as i64)).unwrap();
        let mut y = 1u64;
        for _ in 0..=self.k + 1 {
            let yn1 = z.pow(&y, n - 1);
            let f = z.sub(&z.mul(&yn1, &y), &d);
            let step = z.mul(&f, &z.mul(&inv_n, &z.inv(&yn1).unwrap()));
            y = z.sub(&y, &step);
        }
        Ok(y)
    }

    /// Projection `S_n → S_n^1`, `g ↦ g·c^{-1}` with `c` central and `c^n = det g`.
    pub fn project_to_s1(&self, g: &EndRingElement) -> Result<EndRingElement> {
        let c = self.central_root(self.determinant_integer(g)?)?;
        let ci = self.inv(&self.from_int(c as i64))?;
        self.mul(g, &ci)
    }

    /// `g ≡ 1 mod S`.
    pub fn in_strict(&self, g: &EndRingElement) -> bool {
        self.witt.reduce(&g.b[0]) == self.witt.field.one()
    }

    pub fn is_central(&self, g: &EndRingElement) -> bool {
        self.witt.as_integer(&g.b[0]).is_some() && g.b[1..].iter().all(|c| self.witt.is_zero(c))
    }

    pub fn format(&self, e: &EndRingElement) -> String {
        let mut parts = Vec::new();
        for (i, c) in e.b.iter().enumerate() {
            if self.witt.is_zero(c) {
                continue;
            }
            let cs = self.witt.fmt_elem(c);
            let s = match i {
                0 => String::new(),
                1 => "S".to_string(),
                _ => format!("S^{i}"),
            };
            parts.push(match (i, cs.as_str()) {
                (0, _) => cs.clone(),
                (_, "1") => s,
                _ if cs.contains(' ') => format!("({cs})*{s}"),
                _ => format!("{cs}*{s}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    pub fn to_json(&self, e: &EndRingElement) -> serde_json::Value {
        json!({
            "p": self.p,
            "n": self.n,
            "precision": self.k,
            "coefficients": e.b,
            "text": self.format(e),
            "basis": DET_BASIS,
            "witt_modulus": self.witt.field.spec.modulus,
        })
    }

    pub fn random_element(&self, rng: &mut impl rand::Rng) -> EndRingElement {
        let b = (0..self.n)
            .map(|_| (0..self.n).map(|_| rng.gen_range(0..self.witt.pk)).collect())
            .collect();
        self.from_coeffs(b)
    }

    pub fn random_unit(&self, rng: &mut impl rand::Rng) -> EndRingElement {
        loop {
            let e = self.random_element(rng);
            if self.is_unit(&e) {
                return e;
            }
        }
    }

    /// Uniform-ish element of `S_n`: `1 + S·(random)`.
    pub fn random_strict(&self, rng: &mut impl rand::Rng) -> Result<EndRingElement> {
        let r = self.random_element(rng);
        self.add(&self.one(), &self.mul(&self.s(), &r)?)
    }

    /// Random element of the centre `1 + pZ_p`.
    pub fn random_central(&self, rng: &mut impl rand::Rng) -> EndRingElement {
        let u = rng.gen_range(0..self.witt.pk);
        self.from_int(1 + (self.p as i64) * (u as i64 % (self.witt.pk / self.p) as i64))
    }
}

fn leibniz_det(w: &WittRing, m: &[Vec<Vec<u64>>]) -> Vec<u64> {
    let n = m.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut acc = w.zero();
    permute(w, m, &mut perm, 0, &mut acc);
    acc
}

fn permute(w: &WittRing, m: &[Vec<Vec<u64>>], perm: &mut Vec<usize>, k: usize, acc: &mut Vec<u64>) {
    let n = perm.len();
    if k == n {
        let mut term = w.one();
        for (i, &j) in perm.iter().enumerate() {
            term = w.mul(&term, &m[i][j]);
        }
        let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| perm[i] > perm[j]).count();
        *acc = if inversions % 2 == 0 { w.add(acc, &term) } else { w.sub(acc, &term) };
        return;
    }
    for i in k..n {
        perm.swap(k, i);
        permute(w, m, perm, k + 1, acc);
        perm.swap(k, i);
    }
}

pub fn end_multiply(ring: &EndRing, a: &EndRingElement, b: &EndRingElement) -> Result<EndRingElement> {
    ring.mul(a, b)
}

/// Honda's `Γ_n` over `F_{p^n}`, truncated.
#[derive(Clone, Debug)]
pub struct HondaLaw {
    pub p: u64,
    pub n: usize,
    pub field: FiniteField,
    pub law: FormalGroupLaw<FiniteField>,
}

impl HondaLaw {
    pub fn new(p: u64, n: usize, trunc: u32) -> Result<Self> {
        let field = FiniteField::standard(p, n)?;
        let base = honda(p, n, trunc)?;
        let law = base.map_ring(&field, |c| field.from_int(*c as i64));
        Ok(HondaLaw { p, n, field, law })
    }

    pub fn trunc(&self) -> u32 {
        self.law.trunc()
    }

    fn monomial(&self, a: &[u64], deg: u32) -> Series<FiniteField> {
        Series::from_terms(&self.field, &["x"], self.trunc(), [(vec![deg], a.to_vec())])
    }

    /// `Σ^Γ a_m x^{p^m}`.
    pub fn from_digits(&self, digits: &[Vec<u64>]) -> Result<Series<FiniteField>> {
        let mut acc = Series::zero(&self.field, &["x"], self.trunc());
        let mut deg = 1u64;
        for a in digits {
            if deg >= self.trunc() as u64 {
                break;
            }
            acc = self.law.apply(&acc, &self.monomial(a, deg as u32))?;
            deg *= self.p;
        }
        Ok(acc)
    }

    /// Read back the digits of a series of the form `Σ^Γ a_m x^{p^m}`.
    pub fn read_digits(&self, f: &Series<FiniteField>) -> Result<Vec<Vec<u64>>> {
        let mut g = f.clone();
        let mut out = Vec::new();
        let mut deg = 1u64;
        while deg < self.trunc() as u64 {
            if let Some(v) = g.valuation() {
                if (v as u64) < deg {
                    return Err(Error::Verification(format!("series has a term x^{v} outside the p-power digits")));
                }
            }
            let a = g.c1(deg as u32);
            g = self.law.minus(&g, &self.monomial(&a, deg as u32))?;
            out.push(a);
            deg *= self.p;
        }
        if !g.is_zero() {
            return Err(Error::Verification("residual terms after digit extraction".into()));
        }
        Ok(out)
    }

    /// `f(Γ(x,y)) = Γ(f(x), f(y))` up to truncation.
    pub fn is_endomorphism(&self, f: &Series<FiniteField>) -> Result<bool> {
        let lhs = ps_compose(f, &self.law.series)?;
        let embed = |i: usize| {
            let mut s = Series::zero(&self.field, &["x", "y"], self.trunc());
            for (e, c) in &f.coeffs {
                let mut m = vec![0, 0];
                m[i] = e[0];
                s.add_term(m, c.clone());
            }
            s
        };
        let rhs = self.law.apply(&embed(0), &embed(1))?;
        Ok(lhs == rhs)
    }

    pub fn compose(&self, f: &Series<FiniteField>, g: &Series<FiniteField>) -> Result<Series<FiniteField>> {
        ps_compose(f, g)
    }
}

/// A unit of `End(Γ_n)` viewed as an automorphism series.
#[derive(Clone, Debug)]
pub struct AutSeriesElement {
    pub p: u64,
    pub n: usize,
    pub trunc: u32,
    pub digits: Vec<Vec<u64>>,
    pub series: Series<FiniteField>,
}

impl AutSeriesElement {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "p": self.p,
            "n": self.n,
            "trunc": self.trunc,
            "digits": self.digits,
            "series": self.series.fmt(),
        })
    }
}

/// Digits of `x^{p^m}` below the truncation.
fn digits_needed(p: u64, trunc: u32) -> usize {
    let mut m = 0;
    let mut d = 1u64;
    while d < trunc as u64 {
        d *= p;
        m += 1;
    }
    m
}

pub fn to_power_series(ring: &EndRing, law: &HondaLaw, e: &EndRingElement) -> Result<AutSeriesElement> {
    ring.check(e)?;
    if (law.p, law.n) != (ring.p, ring.n) {
        return Err(Error::Precondition("law and ring disagree on (p, n)".into()));
    }
    if !ring.is_unit(e) {
        return Err(Error::Domain(format!("{} is not a unit", ring.format(e))));
    }
    let need = digits_needed(ring.p, law.trunc());
    if need > ring.readable_digits() {
        return Err(Error::Precondition(format!(
            "truncation {} needs {need} digits; precision {} gives {}",
            law.trunc(),
            ring.k,
            ring.readable_digits()
        )));
    }
    let digits = ring.digits(e, need)?;
    let series = law.from_digits(&digits)?;
    if !law.is_endomorphism(&series)? {
        return Err(Error::Verification("series is not an endomorphism of the law".into()));
    }
    Ok(AutSeriesElement { p: ring.p, n: ring.n, trunc: law.trunc(), digits, series })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CocycleName {
    Zeta,
    Tau1,
    Tau2,
    Sigma,
}

impl std::str::FromStr for CocycleName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zeta" => Ok(CocycleName::Zeta),
            "tau1" => Ok(CocycleName::Tau1),
            "tau2" => Ok(CocycleName::Tau2),
            "sigma" => Ok(CocycleName::Sigma),
            _ => Err(Error::Parse(format!("unknown cocycle '{s}' (zeta, tau1, tau2, sigma)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CocycleDomain {
    Center,
    S21,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CocycleSpec {
    pub name: CocycleName,
    pub domain: CocycleDomain,
    /// Twist `w` in `F_{p²}(w)`.
    pub weight: u64,
}

impl CocycleSpec {
    pub fn new(name: CocycleName, p: u64) -> Self {
        let (domain, weight) = match name {
            CocycleName::Zeta => (CocycleDomain::Center, 0),
            CocycleName::Tau1 => (CocycleDomain::S21, p - 1),
            CocycleName::Tau2 => (CocycleDomain::S21, p * p - p),
            CocycleName::Sigma => (CocycleDomain::S21, 0),
        };
        CocycleSpec { name, domain, weight }
    }
}

/// Membership in the cocycle's domain, at the ring's precision.
pub fn in_domain(ring: &EndRing, domain: CocycleDomain, g: &EndRingElement) -> Result<bool> {
    if !ring.in_strict(g) {
        return Ok(false);
    }
    Ok(match domain {
        CocycleDomain::Center => ring.is_central(g),
        CocycleDomain::S21 => ring.determinant_integer(g)? == 1,
    })
}

pub fn cocycle_eval(ring: &EndRing, spec: &CocycleSpec, g: &EndRingElement) -> Result<Vec<u64>> {
    if ring.n != 2 {
        return Err(Error::Unsupported("cocycles are defined at height 2".into()));
    }
    ring.check(g)?;
    if !in_domain(ring, spec.domain, g)? {
        return Err(Error::Domain(format!("{} is not in the domain {:?} of {:?}", ring.format(g), spec.domain, spec.name)));
    }
    let d = ring.digits(g, 3.min(ring.readable_digits()))?;
    let digit = |i: usize| d.get(i).cloned().ok_or_else(|| Error::Precondition("precision too low for digit".into()));
    let f = &ring.witt.field;
    Ok(match spec.name {
        CocycleName::Zeta | CocycleName::Sigma => digit(2)?,
        CocycleName::Tau1 => digit(1)?,
        CocycleName::Tau2 => f.pow(&digit(1)?, ring.p),
    })
}

/// `∂σ(g,h) = σ(g) + σ(h) − σ(gh)` against `−τ₁(g)τ₂(h)`.
pub fn sigma_coboundary_holds(ring: &EndRing, g: &EndRingElement, h: &EndRingElement) -> Result<bool> {
    let f = &ring.witt.field;
    let spec = |n| CocycleSpec::new(n, ring.p);
    let sig = |x: &EndRingElement| cocycle_eval(ring, &spec(CocycleName::Sigma), x);
    let gh = ring.mul(g, h)?;
    let lhs = f.sub(&f.add(&sig(g)?, &sig(h)?), &sig(&gh)?);
    let rhs = f.neg(&f.mul(
        &cocycle_eval(ring, &spec(CocycleName::Tau1), g)?,
        &cocycle_eval(ring, &spec(CocycleName::Tau2), h)?,
    ));
    Ok(lhs == rhs)
}

/// A random element of `S_2^1` (projected from `S_2`).
pub fn random_s21(ring: &EndRing, rng: &mut impl rand::Rng) -> Result<EndRingElement> {
    let g = ring.random_strict(rng)?;
    ring.project_to_s1(&g)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Abelianization {
    pub p: u64,
    pub depth: usize,
    /// `log_p` of the order of `S_2^1/F_depth`.
    pub group_order_log: u32,
    pub commutator_order_log: u32,
    /// Exponents `e_i` with abelianization `⊕ Z/p^{e_i}`.
    pub invariant_factors: Vec<u32>,
    /// `τ₁` induces an isomorphism from the abelianization onto `F_{p²}`.
    pub tau1_isomorphism: bool,
    /// Dimension of `H¹ = Hom(abelianization, F_{p²})` over `F_{p²}`.
    pub h1_dimension: usize,
    /// Conjugation weights `w` (eigenvalues `ω^w`) in increasing order.
    pub weights: Vec<u64>,
    pub stabilized: bool,
}

/// The finite group `S_2^1/F_{depth/2}` as canonical truncated elements.
struct QuotientGroup<'a> {
    ring: &'a EndRing,
    depth: usize,
}

type Key = Vec<Vec<u64>>;

impl QuotientGroup<'_> {
    fn canon(&self, x: &EndRingElement) -> Key {
        self.ring.truncate_s(x, self.depth).b
    }

    fn elem(&self, k: &Key) -> EndRingElement {
        self.ring.from_coeffs(k.clone())
    }

    fn mul(&self, a: &Key, b: &Key) -> Key {
        self.canon(&self.ring.mul(&self.elem(a), &self.elem(b)).unwrap())
    }

    fn inv(&self, a: &Key) -> Key {
        self.canon(&self.ring.inv(&self.elem(a)).unwrap())
    }

    fn pow(&self, a: &Key, mut e: u64) -> Key {
        let mut base = a.clone();
        let mut acc = self.canon(&self.ring.one());
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn commutator(&self, a: &Key, b: &Key) -> Key {
        let ab = self.mul(a, b);
        let ba = self.mul(b, a);
        self.mul(&ab, &self.inv(&ba))
    }

    /// Subgroup generated by `gens`, by breadth-first closure.
    fn generate(&self, gens: &[Key]) -> HashSet<Key> {
        let id = self.canon(&self.ring.one());
        let mut seen: HashSet<Key> = HashSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in gens {
                let y = self.mul(&x, g);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        seen
    }
}

fn log_p(mut m: usize, p: u64) -> Result<u32> {
    let mut e = 0;
    while m > 1 {
        if m as u64 % p != 0 {
            return Err(Error::Verification(format!("group order is not a power of {p}")));
        }
        m /= p as usize;
        e += 1;
    }
    Ok(e)
}

fn abelianization_at(p: u64, depth: usize) -> Result<Abelianization> {
    let ring = EndRing::new(p, 2, (depth as u32 + 1) / 2 + 1)?;
    let field = ring.witt.field.clone();
    let q = QuotientGroup { ring: &ring, depth };
    let digits_of = |idx: u64| -> Vec<Vec<u64>> {
        let mut ds = vec![field.one()];
        let mut m = idx;
        for _ in 1..depth {
            ds.push(field.element_from_index(m % field.spec.order()));
            m /= field.spec.order();
        }
        ds
    };
    let count = field.spec.order().pow(depth as u32 - 1);
    let mut group: HashSet<Key> = HashSet::new();
    for idx in 0..count {
        let g = ring.from_digits(&digits_of(idx))?;
        group.insert(q.canon(&ring.project_to_s1(&g)?));
    }
    // Generators: projections of 1 + [c]S^i, c in an F_p-basis.
    let basis: Vec<Vec<u64>> = (0..2).map(|i| field.element_from_index(p.pow(i))).collect();
    let mut gens = Vec::new();
    for i in 1..depth {
        for c in &basis {
            let mut ds = vec![field.zero(); i + 1];
            ds[0] = field.one();
            ds[i] = c.clone();
            gens.push(q.canon(&ring.project_to_s1(&ring.from_digits(&ds)?)?));
        }
    }
    if q.generate(&gens) != group {
        return Err(Error::Verification("chosen elements do not generate the quotient".into()));
    }
    let mut cgens: Vec<Key> = Vec::new();
    for a in &gens {
        for b in &gens {
            cgens.push(q.commutator(a, b));
        }
    }
    let mut comm = q.generate(&cgens);
    loop {
        let mut extra = Vec::new();
        for h in &cgens {
            for x in &gens {
                let c = q.mul(&q.inv(x), &q.mul(h, x));
                if !comm.contains(&c) {
                    extra.push(c);
                }
            }
        }
        if extra.is_empty() {
            break;
        }
        cgens.extend(extra);
        comm = q.generate(&cgens);
    }
    let group_order_log = log_p(group.len(), p)?;
    let commutator_order_log = log_p(comm.len(), p)?;
    let ab_log = group_order_log - commutator_order_log;

    // |A[p^k]| from the number of g with g^{p^k} in [G,G].
    let mut torsion_logs = vec![0u32];
    let mut k = 1;
    while *torsion_logs.last().unwrap() < ab_log {
        let c = group.iter().filter(|g| comm.contains(&q.pow(g, p.pow(k)))).count();
        torsion_logs.push(log_p(c / comm.len(), p)?);
        k += 1;
    }
    let mut ranks: Vec<u32> = torsion_logs.windows(2).map(|w| w[1] - w[0]).collect();
    let mut invariant_factors = Vec::new();
    while let Some(&r) = ranks.first() {
        if r == 0 {
            break;
        }
        let e = ranks.iter().take_while(|&&x| x > 0).count() as u32;
        invariant_factors.push(e);
        for x in ranks.iter_mut().take(e as usize) {
            *x -= 1;
        }
    }
    invariant_factors.sort_unstable();

    // τ₁ as a candidate coordinate on the abelianization.
    let tau = |k: &Key| -> Vec<u64> { ring.digits(&q.elem(k), 2).unwrap()[1].clone() };
    let kills_commutators = comm.iter().all(|h| field.is_zero(&tau(h)));
    let image: HashSet<Vec<u64>> = group.iter().map(tau).collect();
    let tau1_isomorphism = kills_commutators && image.len() == field.spec.order() as usize && ab_log == 2;

    let mut weights = Vec::new();
    if tau1_isomorphism {
        // Conjugation by [ω] on A ≅ F_{p²}, as an F_p-matrix in the basis (1, w).
        let omega = field.generator();
        let lift = |t: &Vec<u64>| group.iter().find(|g| tau(g) == *t).unwrap().clone();
        let mut cols = Vec::new();
        for b in &basis {
            let g = lift(b);
            let c = ring.conjugate_teichmuller(&omega, &q.elem(&g))?;
            cols.push(tau(&q.canon(&c)));
        }
        // Eigenvalues over F_{p²}: roots of the characteristic polynomial.
        let (a, b, c, d) = (cols[0][0], cols[1][0], cols[0][1], cols[1][1]);
        let tr = field.from_int((a + d) as i64);
        let det = field.from_int(((a * d) as i64) - (b * c) as i64);
        for lambda in field.elements() {
            let v = field.add(&field.sub(&field.mul(&lambda, &lambda), &field.mul(&tr, &lambda)), &det);
            if field.is_zero(&v) && !field.is_zero(&lambda) {
                weights.push(field.discrete_log(&lambda).unwrap());
            }
        }
        weights.sort_unstable();
    }
    Ok(Abelianization {
        p,
        depth,
        group_order_log,
        commutator_order_log,
        h1_dimension: invariant_factors.len(),
        invariant_factors,
        tau1_isomorphism,
        weights,
        stabilized: false,
    })
}

/// Abelianization of `S_2^1/F_{depth/2}` by brute force, with a stabilization check at `depth + 1`.
pub fn abelianization_s21(p: u64, depth: usize) -> Result<Abelianization> {
    if p < 5 {
        return Err(Error::Precondition(format!("needs p >= 5, got {p}")));
    }
    if depth < 2 {
        return Err(Error::Precondition("depth must be at least 2".into()));
    }
    let mut a = abelianization_at(p, depth)?;
    let next = abelianization_at(p, depth + 1)?;
    a.stabilized = next.invariant_factors == a.invariant_factors && next.weights == a.weights;
    Ok(a)
}

/// Cohomology of `G_1 = Z_p^×` with coefficients `Z/p^∞(t)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct G1Cohomology {
    pub p: u64,
    pub t: i64,
    pub gamma: u64,
    pub precision: u32,
    /// `None` for `Z/p^∞`.
    pub h0_order_exponent: Option<u32>,
    pub h1_order_exponent: Option<u32>,
    pub h0: String,
    pub h1: String,
}

pub const DEFAULT_MAX_PRECISION: u32 = 256;

fn group_name(p: u64, e: Option<u32>) -> String {
    match e {
        None => format!("Z/{p}^inf"),
        Some(0) => "0".into(),
        Some(e) => format!("Z/{}", BigInt::from(p).pow(e)),
    }
}

fn pow_mod_signed(base: &BigInt, t: i64, m: &BigInt, p: u64, k: u32) -> BigInt {
    let e = BigInt::from(t.unsigned_abs());
    let x = base.modpow(&e, m);
    if t >= 0 {
        x
    } else {
        // Units mod p^K have order dividing p^{K-1}(p-1).
        let phi = BigInt::from(p).pow(k - 1) * BigInt::from(p - 1);
        x.modpow(&(phi - BigInt::one()), m)
    }
}

fn big_valuation(x: &BigInt, p: u64, k: u32) -> u32 {
    if x.is_zero() {
        k
    } else {
        int_valuation(x, p).min(k)
    }
}

/// Teichmüller generator of `μ_{p−1} ⊂ Z_p^×` modulo `p^K`.
fn teichmuller_generator(p: u64, k: u32) -> BigInt {
    let g = (2..p)
        .find(|&g| (1..p - 1).all(|e| crate::arith::powmod(g, e, p) != 1))
        .unwrap_or(1);
    let m = BigInt::from(p).pow(k);
    BigInt::from(g).modpow(&BigInt::from(p).pow(k - 1), &m)
}

/// `H^*(G_1, Z/p^∞(t))` from the complex `γ^t − 1` with `γ = 1 + p`, then `C_{p−1}`-invariants.
pub fn g1_cohomology(p: u64, t: i64, precision: u32) -> Result<G1Cohomology> {
    g1_cohomology_with_ceiling(p, t, precision, DEFAULT_MAX_PRECISION)
}

pub fn g1_cohomology_with_ceiling(p: u64, t: i64, precision: u32, max_precision: u32) -> Result<G1Cohomology> {
    if p < 3 || !crate::arith::is_prime(p) {
        return Err(Error::Precondition(format!("needs an odd prime, got {p}")));
    }
    let gamma = p + 1;
    let done = |k: u32, h0: Option<u32>, h1: Option<u32>| G1Cohomology {
        p,
        t,
        gamma,
        precision: k,
        h0_order_exponent: h0,
        h1_order_exponent: h1,
        h0: group_name(p, h0),
        h1: group_name(p, h1),
    };
    if t == 0 {
        return Ok(done(precision.max(1), None, None));
    }
    let mut k = precision.max(2);
    loop {
        if k > max_precision {
            return Err(Error::Resource(format!("precision ceiling {max_precision} reached without certifying an order")));
        }
        let m = BigInt::from(p).pow(k);
        let u = (pow_mod_signed(&BigInt::from(gamma), t, &m, p, k) - BigInt::one()).mod_floor(&m);
        let v = big_valuation(&u, p, k);
        if v >= k {
            k *= 2;
            continue;
        }
        // ker(γ^t − 1) on Z/p^∞ is Z/p^v; cokernel of a nonzero scalar on a divisible group is 0.
        let omega_t = pow_mod_signed(&teichmuller_generator(p, k), t, &m, p, k);
        let w = big_valuation(&(omega_t - BigInt::one()).mod_floor(&m), p, k);
        let h0 = v.min(w);
        return Ok(done(k, Some(h0), Some(0)));
    }
}

/// Parse `b_0 + b_1*S + …` where coefficients are integers and polynomials in `w`.
pub fn parse_element(ring: &EndRing, text: &str) -> Result<EndRingElement> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { ring, tokens, pos: 0 };
    let e = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(Error::Parse(format!("unexpected '{}' in '{text}'", parser.tokens[parser.pos])));
    }
    Ok(e)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "{n}"),
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Sym(c) => write!(f, "{c}"),
        }
    }
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let d: String = chars[start..i].iter().collect();
            out.push(Tok::Int(d.parse().unwrap()));
        } else if c.is_ascii_alphabetic() {
            out.push(Tok::Ident(c.to_string()));
            i += 1;
        } else if "+-*^()".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character '{c}'")));
        }
    }
    if out.is_empty() {
        return Err(Error::Parse("empty element literal".into()));
    }
    Ok(out)
}

struct Parser<'a> {
    ring: &'a EndRing,
    tokens: Vec<Tok>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<EndRingElement> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = self.ring.add(&acc, &self.term()?)?;
            } else if self.eat('-') {
                acc = self.ring.sub(&acc, &self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<EndRingElement> {
        if self.eat('-') {
            return Ok(self.ring.neg(&self.term()?));
        }
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = self.ring.mul(&acc, &self.factor()?)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<EndRingElement> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Tok::Int(n)) => {
                    self.pos += 1;
                    let e = n.to_u64().ok_or_else(|| Error::Parse("exponent too large".into()))?;
                    return self.ring.pow(&base, e);
                }
                other => return Err(Error::Parse(format!("expected exponent, found {other:?}"))),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<EndRingElement> {
        let tok = self.peek().cloned().ok_or_else(|| Error::Parse("unexpected end of literal".into()))?;
        self.pos += 1;
        match tok {
            Tok::Int(n) => Ok(self.ring.from_witt(&self.ring.witt.from_bigint(&n))),
            Tok::Ident(s) if s == "S" => Ok(self.ring.s()),
            Tok::Ident(s) if s == "w" => Ok(self.ring.w()),
            Tok::Ident(s) if s == "p" => Ok(self.ring.from_int(self.ring.p as i64)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(e)
            }
            other => Err(Error::Parse(format!("unexpected '{other}'"))),
        }
    }
}
