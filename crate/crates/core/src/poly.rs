//! Sparse multivariate Laurent polynomials over a [`Ring`].
//!
//! A [`PolyRing`] may mark variables as invertible and may impose caps
//! (the quotient by `x_i^cap`) or a weighted degree ceiling. Caps make
//! elements of the form `unit monomial + nilpotent` invertible.

use std::collections::BTreeMap;

use crate::arith::{PLocal, Ring};

pub type Exps = Vec<i32>;
pub type Poly<E> = BTreeMap<Exps, E>;

#[derive(Clone, Debug)]
pub struct PolyRing<R: Ring> {
    pub base: R,
    pub vars: Vec<String>,
    /// Grading weights; used by `max_degree` and homogeneity checks.
    pub weights: Vec<i64>,
    pub laurent: Vec<bool>,
    pub caps: Vec<Option<i32>>,
    pub max_degree: Option<i64>,
}

impl<R: Ring> PolyRing<R> {
    pub fn new(base: R, vars: &[&str]) -> Self {
        let n = vars.len();
        PolyRing {
            base,
            vars: vars.iter().map(|s| s.to_string()).collect(),
            weights: vec![1; n],
            laurent: vec![false; n],
            caps: vec![None; n],
            max_degree: None,
        }
    }

    pub fn with_weights(mut self, w: &[i64]) -> Self {
        self.weights = w.to_vec();
        self
    }

    pub fn with_laurent(mut self, i: usize) -> Self {
        self.laurent[i] = true;
        self
    }

    pub fn with_cap(mut self, i: usize, cap: i32) -> Self {
        self.caps[i] = Some(cap);
        self
    }

    pub fn with_max_degree(mut self, d: i64) -> Self {
        self.max_degree = Some(d);
        self
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn weight(&self, e: &[i32]) -> i64 {
        e.iter().zip(&self.weights).map(|(&a, &w)| a as i64 * w).sum()
    }

    fn keep(&self, e: &[i32]) -> bool {
        for (i, cap) in self.caps.iter().enumerate() {
            if let Some(c) = cap {
                if e[i] >= *c {
                    return false;
                }
            }
        }
        self.max_degree.map_or(true, |d| self.weight(e) <= d)
    }

    pub fn var(&self, i: usize) -> Poly<R::Elem> {
        let mut e = vec![0; self.nvars()];
        e[i] = 1;
        self.monomial(e, self.base.one())
    }

    pub fn monomial(&self, e: Exps, c: R::Elem) -> Poly<R::Elem> {
        let mut p = Poly::new();
        if !self.base.is_zero(&c) && self.keep(&e) {
            p.insert(e, c);
        }
        p
    }

    pub fn constant(&self, c: R::Elem) -> Poly<R::Elem> {
        self.monomial(vec![0; self.nvars()], c)
    }

    pub fn coeff(&self, a: &Poly<R::Elem>, e: &[i32]) -> R::Elem {
        a.get(e).cloned().unwrap_or_else(|| self.base.zero())
    }

    pub fn add_term(&self, a: &mut Poly<R::Elem>, e: Exps, c: R::Elem) {
        if self.base.is_zero(&c) || !self.keep(&e) {
            return;
        }
        match a.get_mut(&e) {
            Some(x) => {
                let s = self.base.add(x, &c);
                if self.base.is_zero(&s) {
                    a.remove(&e);
                } else {
                    *x = s;
                }
            }
            None => {
                a.insert(e, c);
            }
        }
    }

    pub fn scale(&self, a: &Poly<R::Elem>, c: &R::Elem) -> Poly<R::Elem> {
        let mut out = Poly::new();
        for (e, x) in a {
            let y = self.base.mul(x, c);
            if !self.base.is_zero(&y) {
                out.insert(e.clone(), y);
            }
        }
        out
    }

    pub fn mul_monomial(&self, a: &Poly<R::Elem>, m: &[i32], c: &R::Elem) -> Poly<R::Elem> {
        let mut out = Poly::new();
        for (e, x) in a {
            let e2: Exps = e.iter().zip(m).map(|(a, b)| a + b).collect();
            self.add_term(&mut out, e2, self.base.mul(x, c));
        }
        out
    }

    pub fn is_homogeneous(&self, a: &Poly<R::Elem>) -> Option<i64> {
        let mut deg = None;
        for e in a.keys() {
            let w = self.weight(e);
            match deg {
                None => deg = Some(w),
                Some(d) if d != w => return None,
                _ => {}
            }
        }
        Some(deg.unwrap_or(0))
    }

    /// Ring homomorphism sending variable i to `images[i]` in `target`,
    /// with coefficients mapped by `f`. Negative exponents need invertible images.
    pub fn substitute<S: Ring>(
        &self,
        a: &Poly<R::Elem>,
        target: &PolyRing<S>,
        images: &[Poly<S::Elem>],
        f: impl Fn(&R::Elem) -> S::Elem,
    ) -> Option<Poly<S::Elem>> {
        let mut inverses: Vec<Option<Poly<S::Elem>>> = vec![None; self.nvars()];
        let mut powers: Vec<BTreeMap<i32, Poly<S::Elem>>> = vec![BTreeMap::new(); self.nvars()];
        let mut out = Poly::new();
        for (e, x) in a {
            let mut term = target.constant(f(x));
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if !powers[i].contains_key(&k) {
                    let p = if k > 0 {
                        target.pow(&images[i], k as u64)
                    } else {
                        if inverses[i].is_none() {
                            inverses[i] = Some(target.inv(&images[i])?);
                        }
                        target.pow(inverses[i].as_ref().unwrap(), (-k) as u64)
                    };
                    powers[i].insert(k, p);
                }
                term = target.mul(&term, &powers[i][&k]);
                if term.is_empty() {
                    break;
                }
            }
            out = target.add(&out, &term);
        }
        Some(out)
    }

    pub fn map_coeffs<S: Ring>(
        &self,
        a: &Poly<R::Elem>,
        target: &PolyRing<S>,
        f: impl Fn(&R::Elem) -> S::Elem,
    ) -> Poly<S::Elem> {
        let mut out = Poly::new();
        for (e, x) in a {
            target.add_term(&mut out, e.clone(), f(x));
        }
        out
    }

    /// Embed into a ring with more variables, placing variable i at `slots[i]`.
    pub fn relabel(&self, a: &Poly<R::Elem>, target: &PolyRing<R>, slots: &[usize]) -> Poly<R::Elem> {
        let mut out = Poly::new();
        for (e, x) in a {
            let mut e2 = vec![0; target.nvars()];
            for (i, &k) in e.iter().enumerate() {
                e2[slots[i]] += k;
            }
            target.add_term(&mut out, e2, x.clone());
        }
        out
    }

    pub fn fmt_monomial(&self, e: &[i32]) -> String {
        let parts: Vec<String> = e
            .iter()
            .enumerate()
            .filter(|(_, &k)| k != 0)
            .map(|(i, &k)| {
                if k == 1 {
                    self.vars[i].clone()
                } else {
                    format!("{}^{}", self.vars[i], k)
                }
            })
            .collect();
        parts.join("*")
    }

    /// Nilpotent split a = u·(1 + n) with u a unit monomial.
    fn unit_split(&self, a: &Poly<R::Elem>) -> Option<(Exps, R::Elem)> {
        let capped = |e: &Exps| self.caps.iter().zip(e).any(|(c, &k)| c.is_some() && k > 0);
        let mut cand = a.iter().filter(|(e, _)| !capped(e));
        let (e, c) = cand.next()?;
        if cand.next().is_some() {
            return None;
        }
        for (i, &k) in e.iter().enumerate() {
            if k != 0 && !self.laurent[i] {
                return None;
            }
        }
        let ci = self.base.inv(c)?;
        Some((e.iter().map(|k| -k).collect(), ci))
    }
}

impl<R: Ring> Ring for PolyRing<R> {
    type Elem = Poly<R::Elem>;

    fn zero(&self) -> Self::Elem {
        Poly::new()
    }
    fn one(&self) -> Self::Elem {
        self.constant(self.base.one())
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let (big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
        let mut out = big.clone();
        for (e, x) in small {
            self.add_term(&mut out, e.clone(), x.clone());
        }
        out
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|(e, x)| (e.clone(), self.base.neg(x))).collect()
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let mut out = Poly::new();
        let mut e = vec![0; self.nvars()];
        for (ea, xa) in a {
            for (eb, xb) in b {
                for i in 0..e.len() {
                    e[i] = ea[i] + eb[i];
                }
                if !self.keep(&e) {
                    continue;
                }
                let c = self.base.mul(xa, xb);
                self.add_term(&mut out, e.clone(), c);
            }
        }
        out
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.is_empty()
    }
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        let (ue, uc) = self.unit_split(a)?;
        // a·u⁻¹ = 1 + n with n nilpotent under the caps.
        let normalized = self.mul_monomial(a, &ue, &uc);
        let n = self.sub(&normalized, &self.one());
        let mut acc = self.one();
        let mut term = self.one();
        let neg_n = self.neg(&n);
        let limit = 1 + self.caps.iter().flatten().map(|c| *c as usize).sum::<usize>() * 4;
        for _ in 0..limit.max(2) {
            term = self.mul(&term, &neg_n);
            if term.is_empty() {
                break;
            }
            acc = self.add(&acc, &term);
        }
        if !term.is_empty() && !n.is_empty() {
            return None;
        }
        Some(self.mul_monomial(&acc, &ue, &uc))
    }
    fn from_int(&self, n: i64) -> Self::Elem {
        self.constant(self.base.from_int(n))
    }
    fn characteristic(&self) -> u64 {
        self.base.characteristic()
    }
    fn fmt_elem(&self, a: &Self::Elem) -> String {
        if a.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (e, x) in a.iter().rev() {
            let m = self.fmt_monomial(e);
            let c = self.base.fmt_elem(x);
            parts.push(match (m.is_empty(), c.as_str()) {
                (true, _) => c.clone(),
                (false, "1") => m,
                (false, _) if c.contains(' ') => format!("({c})*{m}"),
                (false, _) => format!("{c}*{m}"),
            });
        }
        parts.join(" + ")
    }
    fn frobenius(&self, a: &Self::Elem) -> Self::Elem {
        let p = self.characteristic();
        assert!(p != 0);
        let mut out = Poly::new();
        for (e, x) in a {
            let e2: Exps = e.iter().map(|k| k * p as i32).collect();
            self.add_term(&mut out, e2, self.base.frobenius(x));
        }
        out
    }
}

impl<R: PLocal> PLocal for PolyRing<R> {
    fn is_p_integral_elem(&self, a: &Self::Elem, p: u64) -> bool {
        a.values().all(|c| self.base.is_p_integral_elem(c, p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{PrimeField, Rationals};

    #[test]
    fn laurent_inverse_with_cap() {
        // (v2 + v1) in F_3[v1, v2^±]/(v1^3): inverse is v2⁻¹ − v1 v2⁻² + v1² v2⁻³.
        let r = PolyRing::new(PrimeField::new(3).unwrap(), &["v1", "v2"])
            .with_laurent(1)
            .with_cap(0, 3);
        let a = r.add(&r.var(0), &r.var(1));
        let ai = r.inv(&a).unwrap();
        assert_eq!(r.mul(&a, &ai), r.one());
        assert_eq!(ai.len(), 3);
    }

    #[test]
    fn frobenius_is_pth_power() {
        let r = PolyRing::new(PrimeField::new(5).unwrap(), &["x", "y"]);
        let a = r.add(&r.var(0), &r.scale(&r.var(1), &2));
        assert_eq!(r.frobenius(&a), r.pow(&a, 5));
    }

    #[test]
    fn substitution_is_a_homomorphism() {
        let q = Rationals;
        let r = PolyRing::new(q.clone(), &["x", "y"]);
        let x = r.var(0);
        let y = r.var(1);
        let a = r.add(&r.mul(&x, &x), &y);
        let images = vec![r.add(&x, &y), r.sub(&x, &y)];
        let s = r.substitute(&a, &r, &images, |c| c.clone()).unwrap();
        let expect = r.add(&r.pow(&images[0], 2), &images[1]);
        assert_eq!(s, expect);
    }
}
