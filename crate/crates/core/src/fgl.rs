//! Formal group laws F(x, y) = x +_F y as truncated two-variable series.
//!
//! Constructors cover the additive and multiplicative laws, laws given by a
//! logarithm, the universal p-typical law over Z_(p)[v₁, v₂, …] and Honda's
//! law Γ_n. Invariants: n-series, invariant differential, logarithm,
//! p-typicalization, v_n extraction, height, Frobenius twist, Landweber
//! regularity.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{rational_mod, PLocal, PrimeField, Rationals, Ring};
use crate::error::{Error, Result};
use crate::poly::{Poly, PolyRing};
use crate::series::{ps_compose, ps_reversion_newton, Series};

pub type QPoly = PolyRing<Rationals>;

#[derive(Clone, Debug)]
pub struct FormalGroupLaw<R: Ring> {
    pub series: Series<R>,
    pub prime: Option<u64>,
    /// Coefficient of x^i y^j has degree 2(i+j−1).
    pub graded: bool,
    /// The stored series is the whole law (a polynomial), not a truncation.
    pub polynomial: bool,
    pub name: String,
}

#[derive(Clone, Debug)]
pub struct StrictIsomorphism<R: Ring> {
    pub series: Series<R>,
}

#[derive(Clone, Debug)]
pub struct PTypicalData<R: Ring> {
    pub law: FormalGroupLaw<R>,
    pub vs: Vec<R::Elem>,
}

/// Which generators of the p-typical Lazard ring are used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Generators {
    /// p·l_n = Σ_{0≤i≤n} l_i v_{n−i}^{p^i}, v₀ = p.
    Araki,
    /// p·l_n = Σ_{0≤i<n} l_i v_{n−i}^{p^i}.
    Hazewinkel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub unit: bool,
    pub commutativity: bool,
    pub associativity: bool,
    /// Lowest total degree at which associativity fails.
    pub associativity_failure_degree: Option<u32>,
    pub trunc: u32,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.unit && self.commutativity && self.associativity
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Height {
    Exact(u32),
    AtLeast(u32),
}

impl std::fmt::Display for Height {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Height::Exact(n) => write!(f, "exact height {n}"),
            Height::AtLeast(n) => write!(f, "height >= {n}"),
        }
    }
}

fn xy<R: Ring>(ring: &R, t: u32) -> (Series<R>, Series<R>) {
    (Series::var(ring, &["x", "y"], t, 0), Series::var(ring, &["x", "y"], t, 1))
}

impl<R: Ring> FormalGroupLaw<R> {
    pub fn from_series(series: Series<R>, name: &str) -> Self {
        FormalGroupLaw { series, prime: None, graded: false, polynomial: false, name: name.into() }
    }

    pub fn ring(&self) -> &R {
        &self.series.ring
    }

    pub fn trunc(&self) -> u32 {
        self.series.trunc
    }

    pub fn additive(ring: &R, trunc: u32) -> Self {
        let (x, y) = xy(ring, trunc);
        let mut f = Self::from_series(x.add(&y), "additive");
        f.polynomial = true;
        f
    }

    /// x + y + xy.
    pub fn multiplicative(ring: &R, trunc: u32) -> Self {
        let (x, y) = xy(ring, trunc);
        let mut f = Self::from_series(x.add(&y).add(&x.mul(&y)), "multiplicative");
        f.polynomial = true;
        f
    }

    /// x + y + c·x^i·y^j, typically not associative.
    pub fn from_terms(ring: &R, trunc: u32, terms: &[((u32, u32), R::Elem)], name: &str) -> Self {
        let (x, y) = xy(ring, trunc);
        let mut s = x.add(&y);
        for ((i, j), c) in terms {
            s.add_term(vec![*i, *j], c.clone());
        }
        let mut f = Self::from_series(s, name);
        f.polynomial = true;
        f
    }

    /// F(a, b) for series a, b in a common variable set.
    pub fn apply(&self, a: &Series<R>, b: &Series<R>) -> Result<Series<R>> {
        self.series.substitute(&[a.clone(), b.clone()])
    }

    /// The one-variable identity series in this law's ring.
    pub fn x1(&self) -> Series<R> {
        Series::var(self.ring(), &["x"], self.trunc(), 0)
    }

    pub fn check_axioms(&self) -> Result<AxiomReport> {
        let ring = self.ring();
        let t = self.trunc();
        let (x, _) = xy(ring, t);
        let unit = self.series.at_zero(1) == x;
        let swapped = {
            let mut s = self.series.like(t);
            for (e, c) in &self.series.coeffs {
                s.add_term(vec![e[1], e[0]], c.clone());
            }
            s
        };
        let commutativity = swapped == self.series;
        let vars = ["x", "y", "z"];
        let v = |i| Series::var(ring, &vars, t, i);
        let (x3, y3, z3) = (v(0), v(1), v(2));
        let left = self.apply(&self.apply(&x3, &y3)?, &z3)?;
        let right = self.apply(&x3, &self.apply(&y3, &z3)?)?;
        let diff = left.sub(&right);
        Ok(AxiomReport {
            unit,
            commutativity,
            associativity: diff.is_zero(),
            associativity_failure_degree: diff.valuation(),
            trunc: t,
        })
    }

    /// Formal inverse ι with x +_F ι(x) = 0.
    pub fn formal_inverse(&self) -> Result<Series<R>> {
        let ring = self.ring();
        let t = self.trunc();
        let x = self.x1();
        let mut iota = x.neg();
        for d in 2..t {
            let s = self.apply(&x, &iota.truncate(d + 1))?;
            let c = s.c1(d);
            if !ring.is_zero(&c) {
                iota.add_term(vec![d], ring.neg(&c));
            }
        }
        Ok(iota)
    }

    pub fn n_series(&self, n: i64) -> Result<Series<R>> {
        let x = self.x1();
        let mut acc = x.like(self.trunc());
        for _ in 0..n.unsigned_abs() {
            acc = self.apply(&acc, &x)?;
        }
        if n < 0 {
            acc = ps_compose(&self.formal_inverse()?, &acc)?;
        }
        Ok(acc)
    }

    /// Formal difference a −_F b.
    pub fn minus(&self, a: &Series<R>, b: &Series<R>) -> Result<Series<R>> {
        let iota = self.formal_inverse()?;
        self.apply(a, &ps_compose(&iota, b)?)
    }

    /// ω_F = 1/F_y(x, 0).
    pub fn invariant_differential(&self) -> Result<Series<R>> {
        let fy = self.series.derivative(1).at_zero(1).restrict_to(0, "x");
        fy.inverse()
    }

    /// Conjugate law f(F(f⁻¹x, f⁻¹y)) for f = x + higher.
    pub fn conjugate(&self, f: &Series<R>) -> Result<FormalGroupLaw<R>> {
        let finv = ps_reversion_newton(f)?;
        let (x, y) = xy(self.ring(), self.trunc());
        let a = ps_compose(&finv, &x)?;
        let b = ps_compose(&finv, &y)?;
        let inner = self.apply(&a, &b)?;
        let s = ps_compose(f, &inner)?;
        let mut g = Self::from_series(s, &format!("{}^f", self.name));
        g.prime = self.prime;
        Ok(g)
    }

    /// Check f(F(x,y)) = G(f(x), f(y)).
    pub fn is_homomorphism_to(&self, g: &FormalGroupLaw<R>, f: &Series<R>) -> Result<bool> {
        let (x, y) = xy(self.ring(), self.trunc().min(g.trunc()));
        let lhs = ps_compose(f, &self.series)?;
        let rhs = g.apply(&ps_compose(f, &x)?, &ps_compose(f, &y)?)?;
        let t = lhs.trunc.min(rhs.trunc);
        Ok(lhs.truncate(t) == rhs.truncate(t))
    }

    pub fn map_ring<S: Ring>(&self, target: &S, f: impl Fn(&R::Elem) -> S::Elem) -> FormalGroupLaw<S> {
        FormalGroupLaw {
            series: self.series.map_ring(target, f),
            prime: self.prime,
            graded: self.graded,
            polynomial: self.polynomial,
            name: self.name.clone(),
        }
    }

    /// Coefficients a_ij as strings, keyed "i,j".
    pub fn to_json(&self) -> serde_json::Value {
        let coeffs: BTreeMap<String, String> = self
            .series
            .coeffs
            .iter()
            .map(|(e, c)| (format!("{},{}", e[0], e[1]), self.ring().fmt_elem(c)))
            .collect();
        serde_json::json!({
            "name": self.name,
            "prime": self.prime,
            "trunc": self.trunc(),
            "variables": ["x", "y"],
            "coefficients": coeffs,
            "grading": self.graded,
        })
    }
}

/// Reads a law over Q written by [`FormalGroupLaw::to_json`].
pub fn law_from_json(v: &serde_json::Value) -> Result<FormalGroupLaw<Rationals>> {
    let bad = |m: &str| Error::Parse(format!("law document: {m}"));
    let trunc = v["trunc"].as_u64().ok_or_else(|| bad("missing trunc"))? as u32;
    let coeffs = v["coefficients"].as_object().ok_or_else(|| bad("missing coefficients"))?;
    let mut s = Series::zero(&Rationals, &["x", "y"], trunc);
    for (k, c) in coeffs {
        let (i, j) = k.split_once(',').ok_or_else(|| bad(&format!("key {k}")))?;
        let i: u32 = i.trim().parse().map_err(|_| bad(&format!("key {k}")))?;
        let j: u32 = j.trim().parse().map_err(|_| bad(&format!("key {k}")))?;
        let c: BigRational = c
            .as_str()
            .ok_or_else(|| bad(&format!("value at {k} is not a string")))?
            .trim()
            .parse()
            .map_err(|_| bad(&format!("value at {k}")))?;
        s.add_term(vec![i, j], c);
    }
    let name = v["name"].as_str().unwrap_or("file").to_string();
    let mut f = FormalGroupLaw::from_series(s, &name);
    f.prime = v["prime"].as_u64();
    Ok(f)
}

/// Formal sum Σ^F of a list of one-variable series.
pub fn formal_sum<R: Ring>(f: &FormalGroupLaw<R>, terms: &[Series<R>]) -> Result<Series<R>> {
    let mut acc = f.x1().like(f.trunc());
    for t in terms {
        acc = f.apply(&acc, t)?;
    }
    Ok(acc)
}

/// Logarithm: the integral of ω_F; requires a Q-algebra.
pub fn logarithm<R: Ring>(f: &FormalGroupLaw<R>) -> Result<StrictIsomorphism<R>> {
    let omega = f.invariant_differential()?;
    let l = omega.integrate(0)?.truncate(f.trunc());
    Ok(StrictIsomorphism { series: l })
}

/// The law with logarithm l: F(x,y) = l⁻¹(l(x) + l(y)).
pub fn from_logarithm<R: Ring>(l: &Series<R>, name: &str) -> Result<FormalGroupLaw<R>> {
    let ring = &l.ring;
    let t = l.trunc;
    let exp = ps_reversion_newton(l)?;
    let (x, y) = xy(ring, t);
    let sum = ps_compose(l, &x)?.add(&ps_compose(l, &y)?);
    let s = ps_compose(&exp, &sum)?;
    Ok(FormalGroupLaw::from_series(s, name))
}

fn is_power_of(mut k: u32, p: u32) -> bool {
    if k == 0 {
        return false;
    }
    while k % p == 0 {
        k /= p;
    }
    k == 1
}

/// Logarithm supported on p-power degrees.
pub fn is_p_typical_log<R: Ring>(l: &Series<R>, p: u64) -> bool {
    l.coeffs.keys().all(|e| is_power_of(e[0], p as u32))
}

/// Cartier p-typicalization through the logarithm: keep the p-power part.
pub fn p_typicalize<R: PLocal>(
    f: &FormalGroupLaw<R>,
    p: u64,
) -> Result<(PTypicalData<R>, StrictIsomorphism<R>)> {
    let ring = f.ring();
    if ring.characteristic() != 0 {
        return Err(Error::Unsupported(
            "p-typicalization needs a torsion-free p-local ring".into(),
        ));
    }
    for c in f.series.coeffs.values() {
        if !ring.is_p_integral_elem(c, p) {
            return Err(Error::Domain(format!("coefficient {} is not {p}-local", ring.fmt_elem(c))));
        }
    }
    let lf = logarithm(f)?.series;
    let mut lg = lf.like(lf.trunc);
    for (e, c) in &lf.coeffs {
        if is_power_of(e[0], p as u32) {
            lg.add_term(e.clone(), c.clone());
        }
    }
    let mut g = if lg == lf {
        f.clone()
    } else {
        let mut g = from_logarithm(&lg, &format!("{}_p-typical", f.name))?;
        g.graded = f.graded;
        g
    };
    g.prime = Some(p);
    for c in g.series.coeffs.values() {
        if !ring.is_p_integral_elem(c, p) {
            return Err(Error::Verification("p-typicalization left Z_(p)".into()));
        }
    }
    let e = ps_compose(&ps_reversion_newton(&lg)?, &lf)?;
    let vs = extract_v(&g, p, max_v_count(p, g.trunc()))?;
    Ok((PTypicalData { law: g, vs }, StrictIsomorphism { series: e }))
}

/// Largest count with p^count < trunc.
pub fn max_v_count(p: u64, trunc: u32) -> usize {
    let mut k = 0;
    let mut q = p;
    while q < trunc as u64 {
        k += 1;
        q *= p;
    }
    k
}

/// Peel [p](x) = px +_F v₁x^p +_F v₂x^{p²} +_F … .
pub fn extract_v<R: Ring>(f: &FormalGroupLaw<R>, p: u64, count: usize) -> Result<Vec<R::Elem>> {
    let t = f.trunc() as u64;
    if p.checked_pow(count as u32).map_or(true, |q| q >= t) {
        return Err(Error::Precondition(format!(
            "trunc {t} too small to read v_{count} (need > p^{count})"
        )));
    }
    let ring = f.ring();
    let x = f.x1();
    let mut rest = f.n_series(p as i64)?;
    let px = x.scale(&ring.from_int(p as i64));
    rest = f.minus(&rest, &px)?;
    let mut vs = Vec::new();
    let mut q = p as u32;
    for _ in 0..count {
        if let Some(v) = rest.valuation() {
            if v < q {
                return Err(Error::Verification(format!(
                    "law is not p-typical: term of degree {v} below x^{q}"
                )));
            }
        }
        let vk = rest.c1(q);
        let term = Series::from_terms(ring, &["x"], f.trunc(), [(vec![q], vk.clone())]);
        rest = f.minus(&rest, &term)?;
        vs.push(vk);
        q *= p as u32;
    }
    Ok(vs)
}

/// Σ^F of px, v₁x^p, v₂x^{p²}, ….
pub fn resynthesize_p_series<R: Ring>(f: &FormalGroupLaw<R>, p: u64, vs: &[R::Elem]) -> Result<Series<R>> {
    let ring = f.ring();
    let mut terms = vec![f.x1().scale(&ring.from_int(p as i64))];
    let mut q = p as u32;
    for v in vs {
        terms.push(Series::from_terms(ring, &["x"], f.trunc(), [(vec![q], v.clone())]));
        q *= p as u32;
    }
    formal_sum(f, &terms)
}

/// Height over a ring of characteristic p.
pub fn height<R: Ring>(f: &FormalGroupLaw<R>, bound: u32) -> Result<Height> {
    let ring = f.ring();
    let p = ring.characteristic();
    if p == 0 {
        return Err(Error::Domain("height needs characteristic p".into()));
    }
    let ps = f.n_series(p as i64)?;
    let Some((lead, c)) = ps.coeffs.iter().next().map(|(e, c)| (e[0], c.clone())) else {
        if f.polynomial {
            return Ok(Height::AtLeast(bound));
        }
        // [p](x) ≡ 0 mod x^T: the leading x^{p^h} has p^h ≥ T.
        let mut h = 0;
        let mut q = 1u64;
        while q < f.trunc() as u64 {
            q *= p;
            h += 1;
        }
        return Ok(Height::AtLeast(h.min(bound)));
    };
    let mut n = 0u32;
    let mut q = 1u32;
    while ps.coeffs.keys().all(|e| e[0] % (q * p as u32) == 0) && q * (p as u32) <= lead {
        q *= p as u32;
        n += 1;
    }
    if n >= bound {
        return Ok(Height::AtLeast(bound));
    }
    if lead == q && ring.inv(&c).is_some() {
        Ok(Height::Exact(n))
    } else {
        Ok(Height::AtLeast(n))
    }
}

/// g with [p](x) = g(x^{p^n}).
pub fn p_series_factor<R: Ring>(f: &FormalGroupLaw<R>, n: u32) -> Result<Series<R>> {
    let p = f.ring().characteristic() as u32;
    let ps = f.n_series(p as i64)?;
    let q = p.pow(n);
    // x^k of g is read from x^{qk}, known only for qk < trunc.
    let mut g = ps.like(ps.trunc.div_ceil(q));
    for (e, c) in &ps.coeffs {
        if e[0] % q != 0 {
            return Err(Error::Domain("p-series is not a series in x^{p^n}".into()));
        }
        g.add_term(vec![e[0] / q], c.clone());
    }
    Ok(g)
}

/// F^{(p)}: coefficients raised to the p-th power.
pub fn frobenius_twist<R: Ring>(f: &FormalGroupLaw<R>) -> Result<FormalGroupLaw<R>> {
    let ring = f.ring();
    if ring.characteristic() == 0 {
        return Err(Error::Domain("Frobenius twist needs characteristic p".into()));
    }
    let mut g = f.clone();
    g.series = f.series.map_ring(ring, |c| ring.frobenius(c));
    g.name = format!("{}^(p)", f.name);
    Ok(g)
}

/// C_n(x,y) = ((x+y)^n − x^n − y^n)/d, d = p if n is a power of p else 1.
pub fn symmetric_cocycle(n: u32) -> Result<Series<Rationals>> {
    if n < 2 {
        return Err(Error::Domain("C_n needs n ≥ 2".into()));
    }
    let d = (2..=n as u64).find(|q| n as u64 % q == 0).filter(|&q| is_power_of(n, q as u32)).unwrap_or(1);
    let mut s = Series::zero(&Rationals, &["x", "y"], n + 1);
    let mut binom = BigInt::one();
    for i in 1..n {
        binom = binom * BigInt::from(n - i + 1) / BigInt::from(i);
        s.add_term(vec![i, n - i], BigRational::new(binom.clone(), BigInt::from(d)));
    }
    Ok(s)
}

/// Content (gcd of coefficients) of an integral series.
pub fn content(s: &Series<Rationals>) -> BigInt {
    use num_integer::Integer;
    s.coeffs.values().fold(BigInt::zero(), |g, c| g.gcd(c.numer()))
}

/// The polynomial ring Q[v₁, …, v_m] with |v_i| = 2(p^i − 1).
pub fn v_ring(p: u64, m: usize) -> QPoly {
    let names: Vec<String> = (1..=m).map(|i| format!("v{i}")).collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let w: Vec<i64> = (1..=m as u32).map(|i| 2 * (p.pow(i) as i64 - 1)).collect();
    PolyRing::new(Rationals, &refs).with_weights(&w)
}

/// Log coefficients l_0 = 1, l_1, … from v-values in a Q-algebra.
pub fn log_coefficients<R: Ring>(ring: &R, p: u64, vs: &[R::Elem], count: usize, gens: Generators) -> Vec<R::Elem> {
    let pe = ring.from_int(p as i64);
    let mut l = vec![ring.one()];
    let v = |i: usize| -> R::Elem { if i == 0 { pe.clone() } else { vs.get(i - 1).cloned().unwrap_or_else(|| ring.zero()) } };
    for n in 1..=count {
        let mut rhs = ring.zero();
        for i in 0..n {
            let vp = ring.pow(&v(n - i), p.pow(i as u32));
            rhs = ring.add(&rhs, &ring.mul(&l[i], &vp));
        }
        let denom = match gens {
            Generators::Araki => ring.sub(&pe, &ring.pow(&pe, p.pow(n as u32))),
            Generators::Hazewinkel => pe.clone(),
        };
        let inv = ring.inv(&denom).expect("Q-algebra");
        l.push(ring.mul(&rhs, &inv));
    }
    l
}

/// The p-typical law with the given v-values (over a Q-algebra).
pub fn p_typical_from_vs<R: PLocal>(
    ring: &R,
    p: u64,
    vs: &[R::Elem],
    trunc: u32,
    gens: Generators,
    name: &str,
) -> Result<FormalGroupLaw<R>> {
    let count = max_v_count(p, trunc);
    let l = log_coefficients(ring, p, vs, count, gens);
    let mut log = Series::zero(ring, &["x"], trunc);
    for (k, lk) in l.iter().enumerate() {
        log.add_term(vec![p.pow(k as u32) as u32], lk.clone());
    }
    let mut f = from_logarithm(&log, name)?;
    f.prime = Some(p);
    for c in f.series.coeffs.values() {
        if !ring.is_p_integral_elem(c, p) {
            return Err(Error::Verification(format!(
                "integrality failure: coefficient {} not {p}-integral",
                ring.fmt_elem(c)
            )));
        }
    }
    Ok(f)
}

/// Universal p-typical law over Q[v₁,…] ⊇ Z_(p)[v₁,…], coefficients of degree ≤ D.
pub fn universal_p_typical(p: u64, degree_bound: u32, gens: Generators) -> Result<PTypicalData<QPoly>> {
    let mut m = 0;
    while 2 * (p.pow(m as u32 + 1) - 1) <= degree_bound as u64 {
        m += 1;
    }
    let ring = v_ring(p, m);
    let vs: Vec<Poly<BigRational>> = (0..m).map(|i| ring.var(i)).collect();
    let trunc = degree_bound / 2 + 2;
    let mut law = p_typical_from_vs(&ring, p, &vs, trunc, gens, "universal p-typical")?;
    law.graded = true;
    let law = with_fgl_weights(law);
    Ok(PTypicalData { law, vs })
}

fn with_fgl_weights<R: Ring>(mut f: FormalGroupLaw<R>) -> FormalGroupLaw<R> {
    f.series.weights = Some(vec![-2, -2]);
    f
}

/// Graded check: coefficient of x^i y^j has degree 2(i+j−1).
pub fn check_grading(f: &FormalGroupLaw<QPoly>) -> bool {
    let ring = f.ring().clone();
    let mut s = f.series.clone();
    s.weights = Some(vec![-2, -2]);
    s.check_homogeneous(|c| ring.is_homogeneous(c), -2)
}

/// Honda's Γ_n over Q (ungraded, v_n = 1) or Q[v_n] (graded); p-integral.
pub fn honda_rational(p: u64, n: usize, trunc: u32) -> Result<FormalGroupLaw<Rationals>> {
    let mut vs = vec![BigRational::zero(); n];
    vs[n - 1] = BigRational::one();
    let mut f = p_typical_from_vs(&Rationals, p, &vs, trunc, Generators::Araki, &format!("honda:{n}"))?;
    f.prime = Some(p);
    Ok(f)
}

pub fn honda_graded_rational(p: u64, n: usize, trunc: u32) -> Result<FormalGroupLaw<QPoly>> {
    let ring = PolyRing::new(Rationals, &[&format!("v{n}")]).with_weights(&[2 * (p.pow(n as u32) as i64 - 1)]);
    let mut vs = vec![ring.zero(); n];
    vs[n - 1] = ring.var(0);
    let mut f = p_typical_from_vs(&ring, p, &vs, trunc, Generators::Araki, &format!("honda:{n} graded"))?;
    f.graded = true;
    Ok(with_fgl_weights(f))
}

/// Reduce a p-integral rational law mod p.
pub fn reduce_mod_p(f: &FormalGroupLaw<Rationals>, p: u64) -> Result<FormalGroupLaw<PrimeField>> {
    let fp = PrimeField::new(p)?;
    for c in f.series.coeffs.values() {
        if !crate::arith::is_p_integral(c, p) {
            return Err(Error::Domain(format!("coefficient {c} not {p}-integral")));
        }
    }
    let mut g = f.map_ring(&fp, |c| rational_mod(c, p).unwrap());
    g.prime = Some(p);
    Ok(g)
}

pub fn reduce_poly_mod_p(f: &FormalGroupLaw<QPoly>, p: u64) -> Result<FormalGroupLaw<PolyRing<PrimeField>>> {
    let fp = PrimeField::new(p)?;
    let src = f.ring().clone();
    let mut target = PolyRing::new(fp, &src.vars.iter().map(|s| s.as_str()).collect::<Vec<_>>()).with_weights(&src.weights);
    target.laurent = src.laurent.clone();
    for c in f.series.coeffs.values() {
        if !src.is_p_integral_elem(c, p) {
            return Err(Error::Domain(format!("coefficient {} not {p}-integral", src.fmt_elem(c))));
        }
    }
    let g = f.map_ring(&target, |c| src.map_coeffs(c, &target, |q| rational_mod(q, p).unwrap()));
    Ok(g)
}

/// Γ_n over F_p with [p](x) = x^{p^n}.
pub fn honda(p: u64, n: usize, trunc: u32) -> Result<FormalGroupLaw<PrimeField>> {
    let mut g = reduce_mod_p(&honda_rational(p, n, trunc)?, p)?;
    g.name = format!("honda:{n}");
    Ok(g)
}

/// x + y + u·x·y over Q[u] (|u| = 2).
pub fn multiplicative_graded(trunc: u32, laurent: bool) -> FormalGroupLaw<QPoly> {
    let mut ring = PolyRing::new(Rationals, &["u"]).with_weights(&[2]);
    if laurent {
        ring = ring.with_laurent(0);
    }
    let (x, y) = xy(&ring, trunc);
    let u = ring.var(0);
    let mut f = FormalGroupLaw::from_series(x.add(&y).add(&x.mul(&y).scale(&u)), "multiplicative graded");
    f.graded = true;
    f.polynomial = true;
    with_fgl_weights(f)
}

/// A graded polynomial or Laurent ring over Z_(p) or F_p, for regularity checks.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GradedPresentation {
    pub p: u64,
    /// Base is F_p instead of Z_(p).
    pub char_p: bool,
    pub vars: Vec<String>,
    pub degrees: Vec<i64>,
    pub invertible: Vec<bool>,
}

impl GradedPresentation {
    pub fn ring(&self) -> QPoly {
        let refs: Vec<&str> = self.vars.iter().map(|s| s.as_str()).collect();
        let mut r = PolyRing::new(Rationals, &refs).with_weights(&self.degrees);
        for (i, &inv) in self.invertible.iter().enumerate() {
            if inv {
                r = r.with_laurent(i);
            }
        }
        r
    }

    /// E(n)_* = Z_(p)[v₁, …, v_{n−1}, v_n^{±1}].
    pub fn johnson_wilson(p: u64, n: usize) -> Self {
        GradedPresentation {
            p,
            char_p: false,
            vars: (1..=n).map(|i| format!("v{i}")).collect(),
            degrees: (1..=n as u32).map(|i| 2 * (p.pow(i) as i64 - 1)).collect(),
            invertible: (1..=n).map(|i| i == n).collect(),
        }
    }

    /// Z_(p)[u^{±1}].
    pub fn k_theory(p: u64) -> Self {
        GradedPresentation { p, char_p: false, vars: vec!["u".into()], degrees: vec![2], invertible: vec![true] }
    }

    pub fn prime_field(p: u64) -> Self {
        GradedPresentation { p, char_p: true, vars: vec![], degrees: vec![], invertible: vec![] }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LandweberStep {
    pub index: usize,
    pub element: String,
    pub regular: bool,
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct LandweberReport {
    pub steps: Vec<LandweberStep>,
    pub exact: bool,
    pub summary: String,
}

/// Is v_i (v₀ = p) a non-zero-divisor in A/(p, v₁, …, v_{i−1}) for i ≤ n_max?
///
/// Quotients stay polynomial/Laurent rings over Z_(p) or F_p (domains) or
/// collapse to zero; anything else is unsupported.
pub fn landweber_check(a: &GradedPresentation, vs: &[Poly<BigRational>], n_max: usize) -> Result<LandweberReport> {
    let ring = a.ring();
    let p = a.p;
    let mut char_p = a.char_p;
    let mut killed = vec![false; ring.nvars()];
    let mut steps = Vec::new();
    let reduce = |x: &Poly<BigRational>, char_p: bool, killed: &[bool]| -> Result<Poly<BigRational>> {
        let mut out = Poly::new();
        for (e, c) in x {
            if e.iter().zip(killed).any(|(&k, &dead)| dead && k != 0) {
                continue;
            }
            let c = if char_p {
                let r = rational_mod(c, p).ok_or_else(|| Error::Domain(format!("{c} not {p}-integral")))?;
                BigRational::from_integer(r.into())
            } else {
                c.clone()
            };
            ring.add_term(&mut out, e.clone(), c);
        }
        Ok(out)
    };
    for i in 0..=n_max {
        let raw = if i == 0 {
            ring.from_int(p as i64)
        } else {
            vs.get(i - 1).cloned().ok_or_else(|| Error::Precondition(format!("v_{i} not supplied")))?
        };
        let x = reduce(&raw, char_p, &killed)?;
        let name = if i == 0 { "p".to_string() } else { format!("v{i}") };
        if x.is_empty() {
            steps.push(LandweberStep { index: i, element: name, regular: false, note: "zero in the quotient".into() });
            let summary = format!("not Landweber exact: v_{i} is a zero divisor");
            return Ok(LandweberReport { steps, exact: false, summary });
        }
        let (e, c) = x.iter().next().unwrap();
        let single = x.len() == 1;
        let unit_coeff = if char_p { true } else { crate::arith::p_valuation(c, p) == Some(0) };
        let unit = single && unit_coeff && e.iter().enumerate().all(|(j, &k)| k == 0 || ring.laurent[j]);
        if unit {
            steps.push(LandweberStep {
                index: i,
                element: name,
                regular: true,
                note: format!("unit ({}); quotient is zero", ring.fmt_elem(&x)),
            });
            let summary = format!("Landweber exact, height <= {i} everywhere");
            return Ok(LandweberReport { steps, exact: true, summary });
        }
        // Nonzero in a domain: regular. Now form the quotient.
        let is_p = single && e.iter().all(|&k| k == 0) && !char_p && crate::arith::p_valuation(c, p) == Some(1);
        let var = if single && unit_coeff {
            let nz: Vec<usize> = (0..e.len()).filter(|&j| e[j] != 0).collect();
            (nz.len() == 1 && e[nz[0]] == 1 && !ring.laurent[nz[0]]).then(|| nz[0])
        } else {
            None
        };
        steps.push(LandweberStep { index: i, element: name, regular: true, note: "nonzero in a domain".into() });
        if is_p {
            char_p = true;
        } else if let Some(j) = var {
            killed[j] = true;
        } else if i < n_max {
            return Err(Error::Unsupported(format!(
                "quotient by {} is not a polynomial presentation",
                ring.fmt_elem(&x)
            )));
        }
    }
    let summary = format!("regular through v_{n_max}");
    Ok(LandweberReport { steps, exact: true, summary })
}

/// v₁ of x + y + uxy, read off [p](x) mod p over Z_(p)[u^{±1}].
pub fn k_theory_v1(p: u64) -> Result<Poly<BigRational>> {
    let f = multiplicative_graded(p as u32 + 1, true);
    let ps = f.n_series(p as i64)?;
    let c = ps.c1(p as u32);
    let ring = f.ring().clone();
    let mut out = Poly::new();
    for (e, q) in &c {
        let r = rational_mod(q, p).ok_or_else(|| Error::Domain("non-integral".into()))?;
        ring.add_term(&mut out, e.clone(), BigRational::from_integer(r.into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn axioms_of_basic_laws() {
        assert!(FormalGroupLaw::additive(&Rationals, 8).check_axioms().unwrap().all_pass());
        assert!(FormalGroupLaw::multiplicative(&Rationals, 8).check_axioms().unwrap().all_pass());
        let bad = FormalGroupLaw::from_terms(&Rationals, 8, &[((2, 1), q(1))], "x+y+x^2y");
        let r = bad.check_axioms().unwrap();
        assert!(!r.associativity);
        assert_eq!(r.associativity_failure_degree, Some(oracle_assoc_failure(0)));
        assert_eq!(r.associativity_failure_degree, Some(3));
        let f2 = PrimeField::new(2).unwrap();
        let bad2 = FormalGroupLaw::from_terms(&f2, 8, &[((2, 1), 1)], "x+y+x^2y");
        let r2 = bad2.check_axioms().unwrap();
        assert_eq!(r2.associativity_failure_degree, Some(oracle_assoc_failure(2)));
    }

    /// Direct expansion of (x+y+x²y) associativity with plain integer polynomials.
    fn oracle_assoc_failure(modulus: i64) -> u32 {
        use std::collections::HashMap;
        type P = HashMap<[u32; 3], i64>;
        fn mul(a: &P, b: &P) -> P {
            let mut out = P::new();
            for (ea, ca) in a {
                for (eb, cb) in b {
                    *out.entry([ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]]).or_default() += ca * cb;
                }
            }
            out
        }
        fn add(a: &P, b: &P) -> P {
            let mut out = a.clone();
            for (e, c) in b {
                *out.entry(*e).or_default() += c;
            }
            out
        }
        let f = |a: &P, b: &P| add(&add(a, b), &mul(&mul(a, a), b));
        let var = |i: usize| {
            let mut e = [0; 3];
            e[i] = 1;
            P::from([(e, 1)])
        };
        let (x, y, z) = (var(0), var(1), var(2));
        let left = f(&f(&x, &y), &z);
        let right = f(&x, &f(&y, &z));
        let diff = add(&left, &right.iter().map(|(e, c)| (*e, -c)).collect());
        diff.iter()
            .filter(|(_, &c)| if modulus == 0 { c != 0 } else { c % modulus != 0 })
            .map(|(e, _)| e.iter().sum())
            .min()
            .unwrap()
    }

    #[test]
    fn n_series_examples() {
        let a = FormalGroupLaw::additive(&Rationals, 8);
        assert_eq!(a.n_series(7).unwrap(), a.x1().scale(&q(7)));
        let m = FormalGroupLaw::multiplicative(&Rationals, 8);
        let two = m.n_series(2).unwrap();
        assert_eq!(two.c1(1), q(2));
        assert_eq!(two.c1(2), q(1));
        assert_eq!(two.coeffs.len(), 2);
        let minus = m.n_series(-1).unwrap();
        assert_eq!(m.apply(&m.x1(), &minus).unwrap().coeffs.len(), 0);
    }

    #[test]
    fn multiplicative_log() {
        let m = FormalGroupLaw::multiplicative(&Rationals, 8);
        let l = logarithm(&m).unwrap().series;
        for k in 1..8i64 {
            let sign = if k % 2 == 1 { 1 } else { -1 };
            assert_eq!(l.c1(k as u32), BigRational::new(sign.into(), k.into()));
        }
    }

    #[test]
    fn typicalize_multiplicative_at_5() {
        let m = FormalGroupLaw::multiplicative(&Rationals, 26);
        let (g, e) = p_typicalize(&m, 5).unwrap();
        let l = logarithm(&g.law).unwrap().series;
        assert_eq!(l.coeffs.len(), 3);
        assert_eq!(l.c1(5), BigRational::new(1.into(), 5.into()));
        assert_eq!(l.c1(25), BigRational::new(1.into(), 25.into()));
        assert!(m.is_homomorphism_to(&g.law, &e.series).unwrap());
    }

    #[test]
    fn cocycles() {
        let c6 = symmetric_cocycle(6).unwrap();
        assert_eq!(c6.coeff(&[3, 3]), q(20));
        assert_eq!(content(&c6), BigInt::one());
        let c4 = symmetric_cocycle(4).unwrap();
        assert_eq!(c4.coeff(&[2, 2]), q(3));
        assert_eq!(content(&c4), BigInt::one());
    }

    #[test]
    fn honda_p_series() {
        let g = honda(3, 2, 12).unwrap();
        let ps = g.n_series(3).unwrap();
        assert_eq!(ps.coeffs.len(), 1);
        assert_eq!(ps.c1(9), 1);
        assert_eq!(height(&g, 10).unwrap(), Height::Exact(2));
    }

    #[test]
    fn landweber_examples() {
        let k = GradedPresentation::k_theory(5);
        let v1 = k_theory_v1(5).unwrap();
        let r = landweber_check(&k, &[v1], 1).unwrap();
        assert!(r.exact);
        assert_eq!(r.summary, "Landweber exact, height <= 1 everywhere");
        let e2 = GradedPresentation::johnson_wilson(3, 2);
        let ring = e2.ring();
        let vs = vec![ring.var(0), ring.var(1)];
        let r = landweber_check(&e2, &vs, 2).unwrap();
        assert!(r.exact && r.steps.iter().all(|s| s.regular));
        let r = landweber_check(&GradedPresentation::prime_field(3), &[], 1).unwrap();
        assert!(!r.exact && !r.steps[0].regular);
    }
}
