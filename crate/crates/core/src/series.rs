//! Truncated multivariate power series.
//!
//! A [`Series`] is known modulo total degree `trunc` (exclusive): no stored
//! monomial has total degree ≥ trunc, and binary operations return the
//! minimum truncation of their inputs.

use std::collections::BTreeMap;

use crate::arith::Ring;
use crate::error::{Error, Result};

pub type Mono = Vec<u32>;

#[derive(Clone, Debug)]
pub struct Series<R: Ring> {
    pub ring: R,
    pub vars: Vec<String>,
    pub coeffs: BTreeMap<Mono, R::Elem>,
    pub trunc: u32,
    pub weights: Option<Vec<i64>>,
}

impl<R: Ring> PartialEq for Series<R> {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.trunc == other.trunc && self.coeffs == other.coeffs
    }
}

fn total(e: &[u32]) -> u32 {
    e.iter().sum()
}

impl<R: Ring> Series<R> {
    pub fn zero(ring: &R, vars: &[&str], trunc: u32) -> Self {
        Series {
            ring: ring.clone(),
            vars: vars.iter().map(|s| s.to_string()).collect(),
            coeffs: BTreeMap::new(),
            trunc,
            weights: None,
        }
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn from_terms(
        ring: &R,
        vars: &[&str],
        trunc: u32,
        terms: impl IntoIterator<Item = (Mono, R::Elem)>,
    ) -> Self {
        let mut s = Self::zero(ring, vars, trunc);
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    pub fn constant(ring: &R, vars: &[&str], trunc: u32, c: R::Elem) -> Self {
        Self::from_terms(ring, vars, trunc, [(vec![0; vars.len()], c)])
    }

    pub fn var(ring: &R, vars: &[&str], trunc: u32, i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Self::from_terms(ring, vars, trunc, [(e, ring.one())])
    }

    /// A zero series in the same variables.
    pub fn like(&self, trunc: u32) -> Self {
        Series {
            ring: self.ring.clone(),
            vars: self.vars.clone(),
            coeffs: BTreeMap::new(),
            trunc,
            weights: self.weights.clone(),
        }
    }

    pub fn with_weights(mut self, w: Vec<i64>) -> Self {
        self.weights = Some(w);
        self
    }

    pub fn add_term(&mut self, e: Mono, c: R::Elem) {
        if total(&e) >= self.trunc || self.ring.is_zero(&c) {
            return;
        }
        match self.coeffs.get_mut(&e) {
            Some(x) => {
                let s = self.ring.add(x, &c);
                if self.ring.is_zero(&s) {
                    self.coeffs.remove(&e);
                } else {
                    *x = s;
                }
            }
            None => {
                self.coeffs.insert(e, c);
            }
        }
    }

    pub fn coeff(&self, e: &[u32]) -> R::Elem {
        self.coeffs.get(e).cloned().unwrap_or_else(|| self.ring.zero())
    }

    /// Coefficient of x^k in a one-variable series.
    pub fn c1(&self, k: u32) -> R::Elem {
        self.coeff(&[k])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn truncate(&self, t: u32) -> Self {
        let t = t.min(self.trunc);
        let mut out = self.like(t);
        for (e, c) in &self.coeffs {
            if total(e) < t {
                out.coeffs.insert(e.clone(), c.clone());
            }
        }
        out
    }

    /// Lowest total degree present.
    pub fn valuation(&self) -> Option<u32> {
        self.coeffs.keys().map(|e| total(e)).min()
    }

    fn check_vars(&self, other: &Self) {
        assert_eq!(self.vars, other.vars, "series variable mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_vars(other);
        let mut out = self.truncate(other.trunc);
        for (e, c) in &other.coeffs {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.like(self.trunc);
        for (e, c) in &self.coeffs {
            out.coeffs.insert(e.clone(), self.ring.neg(c));
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        let mut out = self.like(self.trunc);
        for (e, x) in &self.coeffs {
            out.add_term(e.clone(), self.ring.mul(x, c));
        }
        out
    }

    /// Product; valid modulo min(T₁ + v₂, T₂ + v₁) but reported as min(T₁, T₂).
    pub fn mul(&self, other: &Self) -> Self {
        self.check_vars(other);
        let t = self.trunc.min(other.trunc);
        let mut out = self.like(t);
        let n = self.nvars();
        let mut e = vec![0u32; n];
        let a: Vec<(&Mono, &R::Elem, u32)> = self.coeffs.iter().map(|(e, c)| (e, c, total(e))).collect();
        let b: Vec<(&Mono, &R::Elem, u32)> = other.coeffs.iter().map(|(e, c)| (e, c, total(e))).collect();
        for (ea, ca, da) in &a {
            if *da >= t {
                continue;
            }
            for (eb, cb, db) in &b {
                if da + db >= t {
                    continue;
                }
                for i in 0..n {
                    e[i] = ea[i] + eb[i];
                }
                out.add_term(e.clone(), self.ring.mul(ca, cb));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(&self.ring, &self.var_refs(), self.trunc, self.ring.one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn var_refs(&self) -> Vec<&str> {
        self.vars.iter().map(|s| s.as_str()).collect()
    }

    /// Multiplicative inverse of a series with unit constant term.
    pub fn inverse(&self) -> Result<Self> {
        let zero = vec![0; self.nvars()];
        let c0 = self.coeff(&zero);
        let c0i = self
            .ring
            .inv(&c0)
            .ok_or_else(|| Error::Domain("constant term is not a unit".into()))?;
        // 1/(c0(1 − n)) = c0⁻¹ Σ nᵏ, n has positive valuation.
        let normalized = self.scale(&c0i);
        let one = Self::constant(&self.ring, &self.var_refs(), self.trunc, self.ring.one());
        let n = one.sub(&normalized);
        let mut acc = one.clone();
        let mut term = one;
        for _ in 1..self.trunc.max(1) {
            term = term.mul(&n);
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
        }
        Ok(acc.scale(&c0i))
    }

    /// Substitute series (in a common variable set) for each variable.
    pub fn substitute(&self, images: &[Series<R>]) -> Result<Series<R>> {
        assert_eq!(images.len(), self.nvars());
        let target = &images[0];
        for im in images {
            if !self.ring.is_zero(&im.coeff(&vec![0; im.nvars()])) {
                return Err(Error::Precondition("inner series has nonzero constant term".into()));
            }
            target.check_vars(im);
        }
        let t = images.iter().map(|s| s.trunc).min().unwrap().min(self.trunc);
        let mut powers: Vec<Vec<Series<R>>> = images
            .iter()
            .map(|s| vec![Series::constant(&self.ring, &s.var_refs(), t, self.ring.one())])
            .collect();
        let mut out = target.like(t);
        for (e, c) in &self.coeffs {
            let mut term = Series::constant(&self.ring, &target.var_refs(), t, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&images[i].truncate(t));
                    powers[i].push(next);
                }
                if k > 0 {
                    term = term.mul(&powers[i][k as usize]);
                }
                if term.is_zero() {
                    break;
                }
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    /// Set one variable to zero.
    pub fn at_zero(&self, var: usize) -> Self {
        let mut out = self.like(self.trunc);
        for (e, c) in &self.coeffs {
            if e[var] == 0 {
                out.coeffs.insert(e.clone(), c.clone());
            }
        }
        out
    }

    /// Keep only variable `var`, producing a one-variable series.
    pub fn restrict_to(&self, var: usize, name: &str) -> Series<R> {
        let mut out = Series::zero(&self.ring, &[name], self.trunc);
        for (e, c) in &self.coeffs {
            if e.iter().enumerate().all(|(i, &k)| i == var || k == 0) {
                out.add_term(vec![e[var]], c.clone());
            }
        }
        out
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = self.like(self.trunc.saturating_sub(1));
        for (e, c) in &self.coeffs {
            if e[var] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            out.add_term(e2, self.ring.mul(c, &self.ring.from_int(e[var] as i64)));
        }
        out
    }

    pub fn integrate(&self, var: usize) -> Result<Self> {
        let mut out = self.like(self.trunc + 1);
        for (e, c) in &self.coeffs {
            let k = e[var] as i64 + 1;
            let inv = self.ring.inv(&self.ring.from_int(k)).ok_or_else(|| {
                Error::RingNotDivisible(format!(
                    "cannot divide by {k} in characteristic {}",
                    self.ring.characteristic()
                ))
            })?;
            let mut e2 = e.clone();
            e2[var] += 1;
            out.add_term(e2, self.ring.mul(c, &inv));
        }
        Ok(out)
    }

    /// Apply a coefficient map into another ring.
    pub fn map_ring<S: Ring>(&self, target: &S, f: impl Fn(&R::Elem) -> S::Elem) -> Series<S> {
        let mut out = Series::zero(target, &self.var_refs(), self.trunc);
        for (e, c) in &self.coeffs {
            out.add_term(e.clone(), f(c));
        }
        out.weights = self.weights.clone();
        out
    }

    /// Every stored monomial has weighted degree `deg(coefficient) + weight(exponent) = target`.
    pub fn check_homogeneous(&self, coeff_degree: impl Fn(&R::Elem) -> Option<i64>, target: i64) -> bool {
        let Some(w) = &self.weights else { return true };
        self.coeffs.iter().all(|(e, c)| {
            let ew: i64 = e.iter().zip(w).map(|(&k, &wi)| k as i64 * wi).sum();
            coeff_degree(c).map_or(false, |d| d + ew == target)
        })
    }

    pub fn fmt(&self) -> String {
        if self.coeffs.is_empty() {
            return format!("O({})", self.trunc);
        }
        let mut parts = Vec::new();
        let mut terms: Vec<_> = self.coeffs.iter().collect();
        terms.sort_by_key(|(e, _)| (total(e), std::cmp::Reverse((*e).clone())));
        for (e, c) in terms {
            let m: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { self.vars[i].clone() } else { format!("{}^{}", self.vars[i], k) })
                .collect();
            let m = m.join("*");
            let cs = self.ring.fmt_elem(c);
            parts.push(match (m.is_empty(), cs.as_str()) {
                (true, _) => cs.clone(),
                (false, "1") => m,
                (false, _) if cs.contains(' ') || cs.contains('/') => format!("({cs})*{m}"),
                (false, _) => format!("{cs}*{m}"),
            });
        }
        parts.join(" + ")
    }
}

/// Composition outer(inner) for a one-variable outer series.
pub fn ps_compose<R: Ring>(outer: &Series<R>, inner: &Series<R>) -> Result<Series<R>> {
    if outer.nvars() != 1 {
        return Err(Error::Shape("outer series must have one variable".into()));
    }
    outer.substitute(std::slice::from_ref(inner))
}

/// Compositional inverse of f = u·x + … with u a unit.
pub fn ps_reversion<R: Ring>(f: &Series<R>) -> Result<Series<R>> {
    if f.nvars() != 1 {
        return Err(Error::Shape("reversion needs a one-variable series".into()));
    }
    let ring = &f.ring;
    if !ring.is_zero(&f.c1(0)) {
        return Err(Error::Precondition("nonzero constant term".into()));
    }
    let u_inv = ring
        .inv(&f.c1(1))
        .ok_or_else(|| Error::Domain("linear coefficient is not a unit".into()))?;
    let t = f.trunc;
    let vars = f.var_refs();
    let mut g = Series::from_terms(ring, &vars, t, [(vec![1], u_inv.clone())]);
    for d in 2..t {
        let comp = ps_compose(f, &g.truncate(d + 1))?;
        let c = comp.c1(d);
        if !ring.is_zero(&c) {
            g.add_term(vec![d], ring.neg(&ring.mul(&c, &u_inv)));
        }
    }
    Ok(g)
}

/// Compositional inverse by Newton iteration, doubling precision each step.
pub fn ps_reversion_newton<R: Ring>(f: &Series<R>) -> Result<Series<R>> {
    if f.nvars() != 1 {
        return Err(Error::Shape("reversion needs a one-variable series".into()));
    }
    let ring = &f.ring;
    if !ring.is_zero(&f.c1(0)) {
        return Err(Error::Precondition("nonzero constant term".into()));
    }
    let u_inv = ring
        .inv(&f.c1(1))
        .ok_or_else(|| Error::Domain("linear coefficient is not a unit".into()))?;
    let t = f.trunc;
    let vars = f.var_refs();
    // f' is known below t − 1, but it only ever multiplies a series of
    // valuation ≥ 2, so the unknown top coefficient never matters.
    let mut fp = f.derivative(0);
    fp.trunc = t;
    let mut g = Series::from_terms(ring, &vars, 2.min(t), [(vec![1], u_inv)]);
    let mut prec = 2;
    while prec < t {
        prec = (2 * prec).min(t);
        g.trunc = prec;
        let x = Series::var(ring, &vars, prec, 0);
        let err = ps_compose(&f.truncate(prec), &g)?.sub(&x);
        let d = ps_compose(&fp.truncate(prec), &g)?.inverse()?;
        g = g.sub(&err.mul(&d));
    }
    Ok(g.truncate(t))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CalculusMode {
    Derive,
    Integrate,
}

pub fn ps_derivative_integrate<R: Ring>(f: &Series<R>, var: usize, mode: CalculusMode) -> Result<Series<R>> {
    match mode {
        CalculusMode::Derive => Ok(f.derivative(var)),
        CalculusMode::Integrate => f.integrate(var),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{PrimeField, Rationals};
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn x_series(terms: &[(u32, BigRational)], t: u32) -> Series<Rationals> {
        Series::from_terms(&Rationals, &["x"], t, terms.iter().map(|(k, c)| (vec![*k], c.clone())))
    }

    #[test]
    fn compose_square() {
        let outer = x_series(&[(2, q(1, 1))], 10);
        let inner = x_series(&[(1, q(1, 1)), (2, q(1, 1))], 10);
        let c = ps_compose(&outer, &inner).unwrap();
        assert_eq!(c, x_series(&[(2, q(1, 1)), (3, q(2, 1)), (4, q(1, 1))], 10));
    }

    #[test]
    fn log_of_exp_is_identity() {
        let t = 10;
        let mut fact = 1i64;
        let mut e = vec![];
        let mut l = vec![];
        for k in 1..t as i64 {
            fact *= k;
            e.push((k as u32, q(1, fact)));
            l.push((k as u32, q(if k % 2 == 1 { 1 } else { -1 }, k)));
        }
        let c = ps_compose(&x_series(&l, t), &x_series(&e, t)).unwrap();
        assert_eq!(c, x_series(&[(1, q(1, 1))], t));
    }

    #[test]
    fn reversion_of_geometric() {
        let t = 12;
        let f = x_series(&(1..t).map(|k| (k, q(1, 1))).collect::<Vec<_>>(), t);
        let g = ps_reversion(&f).unwrap();
        let expect = x_series(
            &(1..t).map(|k| (k, q(if k % 2 == 1 { 1 } else { -1 }, 1))).collect::<Vec<_>>(),
            t,
        );
        assert_eq!(g, expect);
    }

    #[test]
    fn reversion_over_f5_round_trips() {
        let f5 = PrimeField::new(5).unwrap();
        let f = Series::from_terms(&f5, &["x"], 25, [(vec![1], 1), (vec![5], 1)]);
        let g = ps_reversion(&f).unwrap();
        assert_eq!(ps_reversion_newton(&f).unwrap(), g);
        let id = Series::var(&f5, &["x"], 25, 0);
        assert_eq!(ps_compose(&f, &g).unwrap(), id);
        assert_eq!(ps_compose(&g, &f).unwrap(), id);
    }

    #[test]
    fn calculus() {
        let f = x_series(&[(3, q(1, 1))], 10);
        assert_eq!(f.derivative(0), x_series(&[(2, q(3, 1))], 9));
        let geo = x_series(&(0..9).map(|k| (k, q(if k % 2 == 0 { 1 } else { -1 }, 1))).collect::<Vec<_>>(), 9);
        let log = geo.integrate(0).unwrap();
        assert_eq!(log.c1(4), q(-1, 4));
        let f3 = PrimeField::new(3).unwrap();
        let s = Series::from_terms(&f3, &["x"], 5, [(vec![2], 1)]);
        assert!(matches!(s.integrate(0), Err(Error::RingNotDivisible(_))));
    }
}
