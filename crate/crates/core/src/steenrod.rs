//! The mod 2 Steenrod algebra, its dual, and Adams E2 charts.
//!
//! Two independent engines compute `Ext_A^{s,t}(F₂, F₂)`:
//!
//! * [`CobarComplex`] works in the dual algebra with the Milnor coproduct;
//! * [`MinimalResolution`] resolves F₂ over A in the admissible basis, with
//!   products computed by Adem relations.
//!
//! Both produce a [`BigradedChart`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{f2_normalize, f2_xor, F2Echelon, F2Vec};
use crate::{Error, Result};

fn binom_mod2(n: u32, k: u32) -> bool {
    k <= n && (k & !n) == 0
}

fn toggle<T: Ord>(set: &mut BTreeSet<T>, x: T) {
    if !set.remove(&x) {
        set.insert(x);
    }
}

// ---------------------------------------------------------------------------
// Admissible basis

/// An F₂-linear combination of admissible monomials `Sq^{i₁}⋯Sq^{i_k}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SteenrodElement {
    terms: BTreeSet<Vec<u32>>,
}

impl SteenrodElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self { terms: [vec![]].into_iter().collect() }
    }

    /// `Sq^i` (with `Sq^0 = 1`).
    pub fn sq(i: u32) -> Self {
        if i == 0 {
            Self::one()
        } else {
            Self { terms: [vec![i]].into_iter().collect() }
        }
    }

    pub fn from_admissible(terms: impl IntoIterator<Item = Vec<u32>>) -> Result<Self> {
        let mut out = BTreeSet::new();
        for t in terms {
            if !is_admissible(&t) {
                return Err(Error::Domain(format!("{t:?} is not admissible")));
            }
            toggle(&mut out, t);
        }
        Ok(Self { terms: out })
    }

    pub fn terms(&self) -> impl Iterator<Item = &Vec<u32>> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree of a nonzero homogeneous element.
    pub fn degree(&self) -> Option<u32> {
        let mut degs = self.terms.iter().map(|w| w.iter().sum::<u32>());
        let d = degs.next()?;
        degs.all(|e| e == d).then_some(d)
    }

    pub fn add(&self, other: &Self) -> Self {
        let terms = self.terms.symmetric_difference(&other.terms).cloned().collect();
        Self { terms }
    }

    pub fn mul(&self, other: &Self, reducer: &mut AdemReducer) -> Self {
        let mut out = BTreeSet::new();
        for a in &self.terms {
            for b in &other.terms {
                let w: Vec<u32> = a.iter().chain(b).copied().collect();
                for m in reducer.reduce(&w) {
                    toggle(&mut out, m);
                }
            }
        }
        Self { terms: out }
    }
}

impl fmt::Display for SteenrodElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|w| {
                if w.is_empty() {
                    "1".to_string()
                } else {
                    w.iter().map(|i| format!("Sq{i}")).collect::<Vec<_>>().join(" ")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

pub fn is_admissible(w: &[u32]) -> bool {
    w.iter().all(|&i| i > 0) && w.windows(2).all(|p| p[0] >= 2 * p[1])
}

/// Memoized Adem-relation reduction of arbitrary Sq words.
#[derive(Default, Debug)]
pub struct AdemReducer {
    memo: HashMap<Vec<u32>, BTreeSet<Vec<u32>>>,
}

impl AdemReducer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reduce(&mut self, word: &[u32]) -> BTreeSet<Vec<u32>> {
        let w: Vec<u32> = word.iter().copied().filter(|&i| i > 0).collect();
        if let Some(r) = self.memo.get(&w) {
            return r.clone();
        }
        // Rightmost inadmissible pair first.
        let pos = (0..w.len().saturating_sub(1)).rev().find(|&k| w[k] < 2 * w[k + 1]);
        let out = match pos {
            None => [w.clone()].into_iter().collect(),
            Some(k) => {
                let (a, b) = (w[k], w[k + 1]);
                let mut acc = BTreeSet::new();
                for j in 0..=a / 2 {
                    if binom_mod2(b - 1 - j, a - 2 * j) {
                        let mut nw = w[..k].to_vec();
                        nw.push(a + b - j);
                        nw.push(j);
                        nw.extend_from_slice(&w[k + 2..]);
                        for m in self.reduce(&nw) {
                            toggle(&mut acc, m);
                        }
                    }
                }
                acc
            }
        };
        self.memo.insert(w, out.clone());
        out
    }
}

/// Admissible normal form of a Sq word.
pub fn adem_reduce(word: &[u32]) -> SteenrodElement {
    SteenrodElement { terms: AdemReducer::new().reduce(word) }
}

/// Admissible monomials of degree n, sorted lexicographically.
pub fn admissible_basis(n: u32) -> Vec<Vec<u32>> {
    fn go(n: u32, cap: u32, out: &mut Vec<Vec<u32>>, prefix: &mut Vec<u32>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for a in 1..=n.min(cap) {
            prefix.push(a);
            go(n - a, a / 2, out, prefix);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut out, &mut Vec::new());
    out.sort();
    out
}

// ---------------------------------------------------------------------------
// Dual Steenrod algebra

/// `ξ₁^{e₁} ξ₂^{e₂} ⋯`, stored without trailing zero exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DualMonomial(Vec<u32>);

impl DualMonomial {
    pub fn new(mut e: Vec<u32>) -> Self {
        while e.last() == Some(&0) {
            e.pop();
        }
        DualMonomial(e)
    }

    pub fn one() -> Self {
        DualMonomial(vec![])
    }

    /// `ξ_n^k`; `ξ_0 = 1`.
    pub fn xi(n: usize, k: u32) -> Self {
        if n == 0 || k == 0 {
            return Self::one();
        }
        let mut e = vec![0; n];
        e[n - 1] = k;
        DualMonomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().enumerate().map(|(i, &e)| e * ((1u32 << (i + 1)) - 1)).sum()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let e = (0..n)
            .map(|i| self.0.get(i).copied().unwrap_or(0) + other.0.get(i).copied().unwrap_or(0))
            .collect();
        DualMonomial::new(e)
    }
}

impl fmt::Display for DualMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { format!("xi{}", i + 1) } else { format!("xi{}^{}", i + 1, e) })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// An F₂ sum of pure tensors `a ⊗ b`.
pub type DualTensor = BTreeSet<(DualMonomial, DualMonomial)>;

/// The Milnor coproduct `Δξ_n = Σ ξ_{n−i}^{2^i} ⊗ ξ_i`, extended multiplicatively.
pub fn milnor_diagonal(m: &DualMonomial) -> DualTensor {
    let mut acc: DualTensor = [(DualMonomial::one(), DualMonomial::one())].into_iter().collect();
    for (idx, &e) in m.0.iter().enumerate() {
        let n = idx + 1;
        for k in 0..32 {
            if e >> k & 1 == 0 {
                continue;
            }
            // Δ(ξ_n^{2^k}) = Σ ξ_{n−i}^{2^{i+k}} ⊗ ξ_i^{2^k} in characteristic 2.
            let factor: Vec<(DualMonomial, DualMonomial)> = (0..=n)
                .map(|i| (DualMonomial::xi(n - i, 1 << (i + k)), DualMonomial::xi(i, 1 << k)))
                .collect();
            let mut next = BTreeSet::new();
            for (a, b) in &acc {
                for (c, d) in &factor {
                    toggle(&mut next, (a.mul(c), b.mul(d)));
                }
            }
            acc = next;
        }
    }
    acc
}

/// Reduced coproduct: drop the `m ⊗ 1` and `1 ⊗ m` terms.
pub fn reduced_diagonal(m: &DualMonomial) -> DualTensor {
    milnor_diagonal(m).into_iter().filter(|(a, b)| !a.is_unit() && !b.is_unit()).collect()
}

/// Monomials of degree n in the dual algebra, sorted.
pub fn dual_basis(n: u32) -> Vec<DualMonomial> {
    fn go(n: u32, i: usize, e: &mut Vec<u32>, out: &mut Vec<DualMonomial>) {
        let d = (1u32 << i) - 1;
        if n == 0 {
            out.push(DualMonomial::new(e.clone()));
            return;
        }
        if d > n {
            return;
        }
        for k in 0..=n / d {
            e.push(k);
            go(n - k * d, i + 1, e, out);
            e.pop();
        }
    }
    let mut out = Vec::new();
    go(n, 1, &mut Vec::new(), &mut out);
    out.sort();
    out
}

// ---------------------------------------------------------------------------
// Cobar complex

/// A homogeneous element of the normalized cobar complex of F₂.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CobarElement {
    pub s: u32,
    pub t: u32,
    terms: BTreeSet<Vec<DualMonomial>>,
}

impl CobarElement {
    pub fn zero(s: u32, t: u32) -> Self {
        CobarElement { s, t, terms: BTreeSet::new() }
    }

    /// The unit `[ ]` in degree (0, 0).
    pub fn unit() -> Self {
        CobarElement { s: 0, t: 0, terms: [vec![]].into_iter().collect() }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = Vec<DualMonomial>>) -> Result<Self> {
        let mut set = BTreeSet::new();
        let mut bideg = None;
        for term in terms {
            if term.iter().any(|m| m.is_unit()) {
                return Err(Error::Domain("cobar factor must lie in the augmentation ideal".into()));
            }
            let st = (term.len() as u32, term.iter().map(|m| m.degree()).sum::<u32>());
            if *bideg.get_or_insert(st) != st {
                return Err(Error::Domain("inhomogeneous cobar element".into()));
            }
            toggle(&mut set, term);
        }
        let (s, t) = bideg.ok_or_else(|| Error::Domain("use CobarElement::zero for zero".into()))?;
        Ok(CobarElement { s, t, terms: set })
    }

    /// `[ξ₁^{2^i}]`, the cocycle representing h_i.
    pub fn h(i: u32) -> Self {
        let m = DualMonomial::xi(1, 1 << i);
        CobarElement { s: 1, t: 1 << i, terms: [vec![m]].into_iter().collect() }
    }

    pub fn terms(&self) -> impl Iterator<Item = &Vec<DualMonomial>> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.s, self.t) != (other.s, other.t) {
            return Err(Error::Shape("adding cobar elements of different bidegree".into()));
        }
        let terms = self.terms.symmetric_difference(&other.terms).cloned().collect();
        Ok(CobarElement { s: self.s, t: self.t, terms })
    }

    /// Product by concatenation of tensors.
    pub fn product(&self, other: &Self) -> Self {
        let mut terms = BTreeSet::new();
        for a in &self.terms {
            for b in &other.terms {
                toggle(&mut terms, a.iter().chain(b).cloned().collect());
            }
        }
        CobarElement { s: self.s + other.s, t: self.t + other.t, terms }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(CobarElement::unit(), |acc, _| acc.product(self))
    }

    /// The cobar differential `Σ_i [a₁|…|Δ̄a_i|…|a_s]`.
    pub fn differential(&self) -> Self {
        let mut terms = BTreeSet::new();
        for term in &self.terms {
            for i in 0..term.len() {
                for (x, y) in reduced_diagonal(&term[i]) {
                    let mut nt = term[..i].to_vec();
                    nt.push(x);
                    nt.push(y);
                    nt.extend_from_slice(&term[i + 1..]);
                    toggle(&mut terms, nt);
                }
            }
        }
        CobarElement { s: self.s + 1, t: self.t, terms }
    }
}

impl fmt::Display for CobarElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| format!("[{}]", t.iter().map(|m| m.to_string()).collect::<Vec<_>>().join("|")))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Debug)]
struct CobarCell {
    basis: Vec<Vec<u16>>,
    index: HashMap<Vec<u16>, u32>,
}

#[derive(Debug)]
struct CohomologyCell {
    /// Coboundaries inserted first, then one representative per class.
    classifier: F2Echelon,
    boundaries: usize,
    reps: Vec<F2Vec>,
}

/// Default ceiling on the size of a single cobar cell.
pub const DEFAULT_MAX_BASIS: usize = 4_000_000;

/// The normalized cobar complex of F₂ over the dual Steenrod algebra, below
/// internal degree `t_max`, with lazily built cells.
#[derive(Debug)]
pub struct CobarComplex {
    t_max: u32,
    max_basis: usize,
    monos: Vec<DualMonomial>,
    mono_index: HashMap<DualMonomial, u16>,
    by_degree: Vec<Vec<u16>>,
    rcoprod: Vec<Vec<(u16, u16)>>,
    cells: HashMap<(u32, u32), CobarCell>,
    boundaries: HashMap<(u32, u32), F2Echelon>,
    cocycles: HashMap<(u32, u32), Vec<F2Vec>>,
    cohomology: HashMap<(u32, u32), CohomologyCell>,
}

impl CobarComplex {
    pub fn new(t_max: u32) -> Self {
        Self::with_max_basis(t_max, DEFAULT_MAX_BASIS)
    }

    pub fn with_max_basis(t_max: u32, max_basis: usize) -> Self {
        let mut monos = Vec::new();
        let mut by_degree = vec![Vec::new(); t_max as usize + 1];
        for d in 1..=t_max {
            for m in dual_basis(d) {
                by_degree[d as usize].push(monos.len() as u16);
                monos.push(m);
            }
        }
        let mono_index: HashMap<DualMonomial, u16> =
            monos.iter().enumerate().map(|(i, m)| (m.clone(), i as u16)).collect();
        let rcoprod = monos
            .iter()
            .map(|m| reduced_diagonal(m).iter().map(|(a, b)| (mono_index[a], mono_index[b])).collect())
            .collect();
        CobarComplex {
            t_max,
            max_basis,
            monos,
            mono_index,
            by_degree,
            rcoprod,
            cells: HashMap::new(),
            boundaries: HashMap::new(),
            cocycles: HashMap::new(),
            cohomology: HashMap::new(),
        }
    }

    pub fn t_max(&self) -> u32 {
        self.t_max
    }

    fn check_t(&self, t: u32) -> Result<()> {
        if t > self.t_max {
            return Err(Error::Domain(format!("internal degree {t} exceeds complex bound {}", self.t_max)));
        }
        Ok(())
    }

    fn enumerate(&self, s: u32, t: u32) -> Result<Vec<Vec<u16>>> {
        fn go(cx: &CobarComplex, s: u32, t: u32, prefix: &mut Vec<u16>, out: &mut Vec<Vec<u16>>, cap: usize) -> Result<()> {
            if s == 0 {
                if t == 0 {
                    out.push(prefix.clone());
                    if out.len() > cap {
                        return Err(Error::Resource(format!("cobar cell exceeds {cap} basis elements")));
                    }
                }
                return Ok(());
            }
            if t < s {
                return Ok(());
            }
            for d in 1..=(t - (s - 1)) {
                for &m in &cx.by_degree[d as usize] {
                    prefix.push(m);
                    go(cx, s - 1, t - d, prefix, out, cap)?;
                    prefix.pop();
                }
            }
            Ok(())
        }
        let mut out = Vec::new();
        go(self, s, t, &mut Vec::new(), &mut out, self.max_basis)?;
        Ok(out)
    }

    fn ensure_cell(&mut self, s: u32, t: u32) -> Result<()> {
        self.check_t(t)?;
        if !self.cells.contains_key(&(s, t)) {
            let basis = self.enumerate(s, t)?;
            let index = basis.iter().enumerate().map(|(i, b)| (b.clone(), i as u32)).collect();
            self.cells.insert((s, t), CobarCell { basis, index });
        }
        Ok(())
    }

    /// Dimension of `C^{s,t}`.
    pub fn cell_size(&mut self, s: u32, t: u32) -> Result<usize> {
        self.ensure_cell(s, t)?;
        Ok(self.cells[&(s, t)].basis.len())
    }

    fn d_tuple(&self, tup: &[u16], target: &CobarCell) -> F2Vec {
        let mut out = Vec::new();
        let mut nt = Vec::with_capacity(tup.len() + 1);
        for i in 0..tup.len() {
            for &(x, y) in &self.rcoprod[tup[i] as usize] {
                nt.clear();
                nt.extend_from_slice(&tup[..i]);
                nt.push(x);
                nt.push(y);
                nt.extend_from_slice(&tup[i + 1..]);
                out.push(target.index[&nt]);
            }
        }
        f2_normalize(out)
    }

    /// Coordinates of x in the basis of its cell.
    pub fn coords(&mut self, x: &CobarElement) -> Result<F2Vec> {
        self.ensure_cell(x.s, x.t)?;
        let cell = &self.cells[&(x.s, x.t)];
        let mut v = Vec::with_capacity(x.terms.len());
        for term in &x.terms {
            let key: Vec<u16> = term.iter().map(|m| self.mono_index[m]).collect();
            v.push(cell.index[&key]);
        }
        Ok(f2_normalize(v))
    }

    pub fn element(&mut self, s: u32, t: u32, v: &[u32]) -> Result<CobarElement> {
        self.ensure_cell(s, t)?;
        let cell = &self.cells[&(s, t)];
        let terms = v
            .iter()
            .map(|&i| cell.basis[i as usize].iter().map(|&m| self.monos[m as usize].clone()).collect())
            .collect();
        Ok(CobarElement { s, t, terms })
    }

    /// `d` on coordinates, `C^{s,t} → C^{s+1,t}`.
    pub fn d(&mut self, s: u32, t: u32, v: &[u32]) -> Result<F2Vec> {
        self.ensure_cell(s, t)?;
        self.ensure_cell(s + 1, t)?;
        let src = &self.cells[&(s, t)];
        let dst = &self.cells[&(s + 1, t)];
        let mut acc = Vec::new();
        for &i in v {
            acc = f2_xor(&acc, &self.d_tuple(&src.basis[i as usize], dst));
        }
        Ok(acc)
    }

    fn ensure_boundaries(&mut self, s: u32, t: u32) -> Result<()> {
        if self.boundaries.contains_key(&(s, t)) {
            return Ok(());
        }
        let mut ech = F2Echelon::new(true);
        if s > 0 {
            self.ensure_cell(s - 1, t)?;
            self.ensure_cell(s, t)?;
            let src = &self.cells[&(s - 1, t)];
            let dst = &self.cells[&(s, t)];
            for b in &src.basis {
                ech.insert(&self.d_tuple(b, dst));
            }
        }
        self.boundaries.insert((s, t), ech);
        Ok(())
    }

    fn ensure_cocycles(&mut self, s: u32, t: u32) -> Result<()> {
        if self.cocycles.contains_key(&(s, t)) {
            return Ok(());
        }
        self.ensure_boundaries(s + 1, t)?;
        let deps = self.boundaries[&(s + 1, t)].dependencies().to_vec();
        self.cocycles.insert((s, t), deps);
        Ok(())
    }

    /// Basis of the cocycles in `C^{s,t}`, as coordinates.
    pub fn cocycle_basis(&mut self, s: u32, t: u32) -> Result<Vec<F2Vec>> {
        self.ensure_cocycles(s, t)?;
        Ok(self.cocycles[&(s, t)].clone())
    }

    fn ensure_cohomology(&mut self, s: u32, t: u32) -> Result<()> {
        if self.cohomology.contains_key(&(s, t)) {
            return Ok(());
        }
        self.ensure_boundaries(s, t)?;
        self.ensure_cocycles(s, t)?;
        let mut classifier = F2Echelon::new(true);
        let mut boundaries = 0;
        if s > 0 {
            self.ensure_cell(s - 1, t)?;
            self.ensure_cell(s, t)?;
            let src = &self.cells[&(s - 1, t)];
            let dst = &self.cells[&(s, t)];
            for b in &src.basis {
                classifier.insert(&self.d_tuple(b, dst));
            }
            boundaries = src.basis.len();
        }
        // Only independent cocycles are inserted, so ids past `boundaries` index reps.
        let mut reps = Vec::new();
        for z in &self.cocycles[&(s, t)] {
            if !classifier.contains(z) {
                classifier.insert(z);
                reps.push(z.clone());
            }
        }
        self.cohomology.insert((s, t), CohomologyCell { classifier, boundaries, reps });
        Ok(())
    }

    /// `dim H^{s,t}`.
    pub fn cohomology_dim(&mut self, s: u32, t: u32) -> Result<usize> {
        self.ensure_cohomology(s, t)?;
        Ok(self.cohomology[&(s, t)].reps.len())
    }

    /// Cocycle representatives for a basis of `H^{s,t}`.
    pub fn cohomology_basis(&mut self, s: u32, t: u32) -> Result<Vec<CobarElement>> {
        self.ensure_cohomology(s, t)?;
        let reps = self.cohomology[&(s, t)].reps.clone();
        reps.iter().map(|r| self.element(s, t, r)).collect()
    }

    fn classify_coords(&mut self, s: u32, t: u32, v: &[u32]) -> Result<F2Vec> {
        self.ensure_cohomology(s, t)?;
        if !self.d(s, t, v)?.is_empty() {
            return Err(Error::Domain(format!("element of C^({s},{t}) is not a cocycle")));
        }
        let cell = &self.cohomology[&(s, t)];
        let combo = cell
            .classifier
            .solve(v)
            .ok_or_else(|| Error::Verification("cocycle outside computed span".into()))?;
        Ok(combo
            .into_iter()
            .filter(|&i| i as usize >= cell.boundaries)
            .map(|i| i - cell.boundaries as u32)
            .collect())
    }

    /// Coordinates of the class of a cocycle in the basis of [`Self::cohomology_basis`].
    pub fn class_of(&mut self, x: &CobarElement) -> Result<F2Vec> {
        let v = self.coords(x)?;
        self.classify_coords(x.s, x.t, &v)
    }

    pub fn is_cocycle(&mut self, x: &CobarElement) -> Result<bool> {
        let v = self.coords(x)?;
        Ok(self.d(x.s, x.t, &v)?.is_empty())
    }

    pub fn is_coboundary(&mut self, x: &CobarElement) -> Result<bool> {
        Ok(self.solve_coboundary(x)?.is_some())
    }

    /// Some `a` with `d a = x`.
    pub fn solve_coboundary(&mut self, x: &CobarElement) -> Result<Option<CobarElement>> {
        if x.s == 0 {
            return Ok(x.is_zero().then(|| CobarElement::zero(0, x.t)));
        }
        let v = self.coords(x)?;
        self.ensure_boundaries(x.s, x.t)?;
        match self.boundaries[&(x.s, x.t)].solve(&v) {
            None => Ok(None),
            Some(combo) => Ok(Some(self.element(x.s - 1, x.t, &combo)?)),
        }
    }

    /// Checks `d∘d = 0` on every basis element of `C^{s,t}`.
    pub fn d_squared_is_zero(&mut self, s: u32, t: u32) -> Result<bool> {
        let n = self.cell_size(s, t)?;
        for i in 0..n as u32 {
            let dv = self.d(s, t, &[i])?;
            if !self.d(s + 1, t, &dv)?.is_empty() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `h_i · [x]` in H-coordinates, when the target fits in the complex.
    fn h_mult_coords(&mut self, i: u32, s: u32, t: u32, v: &[u32]) -> Result<F2Vec> {
        self.ensure_cohomology(s, t)?;
        let reps = &self.cohomology[&(s, t)].reps;
        let mut z = Vec::new();
        for &k in v {
            z = f2_xor(&z, &reps[k as usize]);
        }
        let x = self.element(s, t, &z)?;
        let y = CobarElement::h(i).product(&x);
        self.class_of(&y)
    }
}

/// Dimensions of `H^{s,t}` of the cobar complex for `s ≤ s_max`, `t ≤ t_max`,
/// computed from ranks only; cells are dropped as soon as they are used.
pub fn cobar_dimensions(s_max: u32, t_max: u32, max_basis: usize) -> Result<BTreeMap<(u32, u32), usize>> {
    let cx = CobarComplex::with_max_basis(t_max, max_basis);
    let mut out = BTreeMap::new();
    for t in 0..=t_max {
        let top = t.min(s_max + 1);
        let mut ranks = vec![0usize; top as usize + 2];
        let mut sizes = vec![0usize; top as usize + 2];
        let mut prev: Option<CobarCell> = None;
        for s in 0..=top {
            let basis = cx.enumerate(s, t)?;
            let index = basis.iter().enumerate().map(|(i, b)| (b.clone(), i as u32)).collect();
            let cell = CobarCell { basis, index };
            sizes[s as usize] = cell.basis.len();
            if let Some(src) = &prev {
                let mut ech = F2Echelon::new(false);
                for b in &src.basis {
                    ech.insert(&cx.d_tuple(b, &cell));
                }
                ranks[s as usize - 1] = ech.rank();
            }
            prev = Some(cell);
        }
        for s in 0..=t.min(s_max) {
            let s = s as usize;
            let below = if s == 0 { 0 } else { ranks[s - 1] };
            let dim = sizes[s] - ranks[s] - below;
            out.insert((s as u32, t), dim);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Massey products

/// A Massey product: a representative cocycle plus a spanning set of the
/// indeterminacy `x·H + H·z`.
#[derive(Clone, Debug)]
pub struct MasseyProduct {
    pub s: u32,
    pub t: u32,
    pub representative: CobarElement,
    pub indeterminacy: Vec<CobarElement>,
}

impl MasseyProduct {
    /// Whether the cocycle c lies in the coset.
    pub fn contains(&self, cx: &mut CobarComplex, c: &CobarElement) -> Result<bool> {
        if (c.s, c.t) != (self.s, self.t) {
            return Ok(false);
        }
        let target = self.representative.add(c)?;
        let mut span = Vec::new();
        for w in &self.indeterminacy {
            span.push(cx.class_of(w)?);
        }
        let cls = cx.class_of(&target)?;
        let mut ech = F2Echelon::new(false);
        for v in &span {
            ech.insert(v);
        }
        Ok(ech.contains(&cls))
    }

    /// Whether the coset avoids zero.
    pub fn is_nonzero(&self, cx: &mut CobarComplex) -> Result<bool> {
        Ok(!self.contains(cx, &CobarElement::zero(self.s, self.t))?)
    }
}

/// `⟨x, y, z⟩` with canonical nullhomotopies.
pub fn massey_product(cx: &mut CobarComplex, x: &CobarElement, y: &CobarElement, z: &CobarElement) -> Result<MasseyProduct> {
    massey_product_seeded(cx, x, y, z, None)
}

/// `⟨x, y, z⟩`; with a seed, random cocycles are added to both nullhomotopies.
pub fn massey_product_seeded(
    cx: &mut CobarComplex,
    x: &CobarElement,
    y: &CobarElement,
    z: &CobarElement,
    seed: Option<u64>,
) -> Result<MasseyProduct> {
    for e in [x, y, z] {
        if !cx.is_cocycle(e)? {
            return Err(Error::Precondition(format!("{e} is not a cocycle")));
        }
    }
    let xy = x.product(y);
    let yz = y.product(z);
    let mut a = cx
        .solve_coboundary(&xy)?
        .ok_or_else(|| Error::Precondition("products not zero: x·y is nonzero in cohomology".into()))?;
    let mut b = cx
        .solve_coboundary(&yz)?
        .ok_or_else(|| Error::Precondition("products not zero: y·z is nonzero in cohomology".into()))?;
    if let Some(seed) = seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for e in [&mut a, &mut b] {
            let basis = cx.cocycle_basis(e.s, e.t)?;
            let mut v = cx.coords(e)?;
            for c in &basis {
                if rng.gen_bool(0.5) {
                    v = f2_xor(&v, c);
                }
            }
            *e = cx.element(e.s, e.t, &v)?;
        }
    }
    let representative = a.product(z).add(&x.product(&b))?;
    let (s, t) = (representative.s, representative.t);
    let mut indeterminacy = Vec::new();
    for w in cx.cohomology_basis(y.s + z.s - 1, y.t + z.t)? {
        indeterminacy.push(x.product(&w));
    }
    for w in cx.cohomology_basis(x.s + y.s - 1, x.t + y.t)? {
        indeterminacy.push(w.product(z));
    }
    Ok(MasseyProduct { s, t, representative, indeterminacy })
}

/// The Adams periodicity operator `P(x) = ⟨x, h₀⁴, h₃⟩`.
pub fn adams_periodicity(cx: &mut CobarComplex, x: &CobarElement) -> Result<MasseyProduct> {
    massey_product(cx, x, &CobarElement::h(0).pow(4), &CobarElement::h(3))
}

// ---------------------------------------------------------------------------
// Minimal resolution

/// Admissible bases in each degree with memoized products.
#[derive(Debug, Default)]
struct AlgebraTable {
    basis: Vec<Vec<Vec<u32>>>,
    index: Vec<HashMap<Vec<u32>, u32>>,
    reducer: AdemReducer,
    products: HashMap<(u32, u32, u32, u32), Vec<u32>>,
}

impl AlgebraTable {
    fn new(t_max: u32) -> Self {
        let basis: Vec<Vec<Vec<u32>>> = (0..=t_max).map(admissible_basis).collect();
        let index = basis
            .iter()
            .map(|b| b.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect())
            .collect();
        AlgebraTable { basis, index, ..Default::default() }
    }

    fn dim(&self, d: u32) -> usize {
        self.basis[d as usize].len()
    }

    /// Product of basis elements, as indices in degree da + db.
    fn mul(&mut self, da: u32, ia: u32, db: u32, ib: u32) -> &[u32] {
        let key = (da, ia, db, ib);
        if !self.products.contains_key(&key) {
            let w: Vec<u32> = self.basis[da as usize][ia as usize]
                .iter()
                .chain(&self.basis[db as usize][ib as usize])
                .copied()
                .collect();
            let idx = &self.index[(da + db) as usize];
            let v = f2_normalize(self.reducer.reduce(&w).iter().map(|m| idx[m]).collect());
            self.products.insert(key, v);
        }
        &self.products[&key]
    }
}

/// A minimal free resolution of F₂ over the Steenrod algebra, through
/// homological degree `s_max` and internal degree `t_max`.
#[derive(Debug)]
pub struct MinimalResolution {
    s_max: u32,
    t_max: u32,
    algebra: AlgebraTable,
    /// Generator degrees per homological degree, nondecreasing.
    gens: Vec<Vec<u32>>,
    /// `d(g)` as sorted (generator, admissible index) pairs.
    diffs: Vec<Vec<Vec<(u32, u32)>>>,
}

impl MinimalResolution {
    pub fn compute(s_max: u32, t_max: u32, max_basis: usize) -> Result<Self> {
        let mut res = MinimalResolution {
            s_max,
            t_max,
            algebra: AlgebraTable::new(t_max),
            gens: vec![vec![0]],
            diffs: vec![vec![vec![]]],
        };
        // Kernel of the augmentation.
        let mut kernel_prev: Vec<Vec<F2Vec>> = (0..=t_max)
            .map(|t| if t == 0 { vec![] } else { (0..res.algebra.dim(t) as u32).map(|i| vec![i]).collect() })
            .collect();
        for s in 1..=s_max {
            res.gens.push(Vec::new());
            res.diffs.push(Vec::new());
            let mut kernel_s = vec![Vec::new(); t_max as usize + 1];
            for t in s..=t_max {
                let (off_prev, _) = res.offsets(s - 1, t);
                let (off_cur, size) = res.offsets(s, t);
                if size > max_basis {
                    return Err(Error::Resource(format!("free module F_{s} in degree {t} has {size} basis elements")));
                }
                let mut ech = F2Echelon::new(true);
                for (g, &off) in off_cur.iter().enumerate() {
                    let Some(off) = off else { continue };
                    let a = t - res.gens[s as usize][g];
                    for m in 0..res.algebra.dim(a) as u32 {
                        debug_assert_eq!(ech.rank() + ech.dependencies().len(), (off + m) as usize);
                        let v = res.apply(s, g, a, m, &off_prev);
                        ech.insert(&v);
                    }
                }
                for k in &kernel_prev[t as usize] {
                    if !ech.contains(k) {
                        ech.insert(k);
                        let d = res.decode(s - 1, t, &off_prev, k);
                        res.gens[s as usize].push(t);
                        res.diffs[s as usize].push(d);
                    }
                }
                kernel_s[t as usize] = ech.dependencies().to_vec();
            }
            kernel_prev = kernel_s;
        }
        Ok(res)
    }

    /// Basis offsets of generators of F_s in degree t (None above t).
    fn offsets(&self, s: u32, t: u32) -> (Vec<Option<u32>>, usize) {
        let mut off = Vec::with_capacity(self.gens[s as usize].len());
        let mut total = 0usize;
        for &d in &self.gens[s as usize] {
            if d <= t {
                off.push(Some(total as u32));
                total += self.algebra.dim(t - d);
            } else {
                off.push(None);
            }
        }
        (off, total)
    }

    /// `d(Sq^I · g)` in coordinates of F_{s−1} in degree t.
    fn apply(&mut self, s: u32, g: usize, a: u32, m: u32, off_prev: &[Option<u32>]) -> F2Vec {
        let mut out = Vec::new();
        if s == 0 {
            return out;
        }
        let terms = self.diffs[s as usize][g].clone();
        let gdeg = self.gens[s as usize][g];
        for (gp, mp) in terms {
            let b = gdeg - self.gens[s as usize - 1][gp as usize];
            let base = off_prev[gp as usize].expect("generator below degree");
            for &r in self.algebra.mul(a, m, b, mp) {
                out.push(base + r);
            }
        }
        f2_normalize(out)
    }

    fn decode(&self, s: u32, t: u32, off: &[Option<u32>], v: &[u32]) -> Vec<(u32, u32)> {
        let starts: Vec<(u32, usize)> =
            off.iter().enumerate().filter_map(|(g, o)| o.map(|o| (o, g))).collect();
        v.iter()
            .map(|&i| {
                let pos = starts.partition_point(|&(o, _)| o <= i) - 1;
                let (o, g) = starts[pos];
                debug_assert!(self.gens[s as usize][g] <= t);
                (g as u32, i - o)
            })
            .collect()
    }

    pub fn s_max(&self) -> u32 {
        self.s_max
    }

    pub fn t_max(&self) -> u32 {
        self.t_max
    }

    /// Degrees of the generators of the s-th free module.
    pub fn generator_degrees(&self, s: u32) -> &[u32] {
        &self.gens[s as usize]
    }

    /// `d(g)` as (generator of F_{s−1}, admissible monomial) pairs.
    pub fn differential(&self, s: u32, g: usize) -> Vec<(u32, Vec<u32>)> {
        let deg = self.gens[s as usize][g];
        self.diffs[s as usize][g]
            .iter()
            .map(|&(gp, m)| {
                let b = deg - self.gens[s as usize - 1][gp as usize];
                (gp, self.algebra.basis[b as usize][m as usize].clone())
            })
            .collect()
    }

    /// `dim Ext^{s,t}`: the number of degree-t generators of F_s.
    pub fn ext_dim(&self, s: u32, t: u32) -> usize {
        self.gens.get(s as usize).map_or(0, |g| g.iter().filter(|&&d| d == t).count())
    }

    fn cell_range(&self, s: u32, t: u32) -> std::ops::Range<usize> {
        let g = &self.gens[s as usize];
        g.partition_point(|&d| d < t)..g.partition_point(|&d| d <= t)
    }

    /// `h_i · x` for x given over the generators of F_s in degree t.
    ///
    /// The coefficient of g' is the coefficient of `Sq^{2^i} g` in `d(g')`.
    pub fn h_mult(&self, i: u32, s: u32, t: u32, v: &[u32]) -> Option<F2Vec> {
        let ti = t + (1 << i);
        if s + 1 > self.s_max || ti > self.t_max {
            return None;
        }
        let src = self.cell_range(s, t);
        let target = self.cell_range(s + 1, ti);
        let sq = self.algebra.index[1usize << i][&vec![1u32 << i]];
        let mut out = Vec::new();
        for (k, gp) in target.clone().enumerate() {
            let mut bit = false;
            for &(g, m) in &self.diffs[s as usize + 1][gp] {
                if m == sq && src.contains(&(g as usize)) && v.contains(&((g as usize - src.start) as u32)) {
                    bit = !bit;
                }
            }
            if bit {
                out.push(k as u32);
            }
        }
        Some(out)
    }
}

// ---------------------------------------------------------------------------
// Charts

/// A rectangular computed region, optionally cut to stems ≤ max_stem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub s_max: u32,
    pub t_max: u32,
    pub max_stem: Option<u32>,
}

impl Region {
    pub fn contains(&self, s: u32, t: u32) -> bool {
        s <= self.s_max && t <= self.t_max && self.max_stem.is_none_or(|m| t < s || t - s <= m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartCell {
    pub s: u32,
    pub t: u32,
    pub dim: usize,
    pub names: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductRecord {
    pub a: String,
    pub b: String,
    pub result: Vec<String>,
}

/// Dimensions, names and h_i-products of an Ext computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BigradedChart {
    pub prime: u32,
    pub method: String,
    pub regions: Vec<Region>,
    pub cells: Vec<ChartCell>,
    pub products: Vec<ProductRecord>,
}

impl BigradedChart {
    pub fn in_window(&self, s: u32, t: u32) -> bool {
        self.regions.iter().any(|r| r.contains(s, t))
    }

    /// Dimension at (s,t); None outside the computed window.
    pub fn dim(&self, s: u32, t: u32) -> Option<usize> {
        if let Some(c) = self.cells.iter().find(|c| c.s == s && c.t == t) {
            return Some(c.dim);
        }
        self.in_window(s, t).then_some(0)
    }

    pub fn names(&self, s: u32, t: u32) -> Vec<String> {
        self.cells.iter().find(|c| c.s == s && c.t == t).map(|c| c.names.clone()).unwrap_or_default()
    }

    /// Product `a·b` as a list of class names, if recorded.
    pub fn product(&self, a: &str, b: &str) -> Option<Vec<String>> {
        self.products.iter().find(|p| p.a == a && p.b == b).map(|p| p.result.clone())
    }

    /// Restrict to a region, dropping cells and products outside it.
    pub fn restrict(&self, region: Region) -> Self {
        let cells: Vec<ChartCell> = self.cells.iter().filter(|c| region.contains(c.s, c.t)).cloned().collect();
        let names: BTreeSet<&String> = cells.iter().flat_map(|c| c.names.iter()).collect();
        let products = self
            .products
            .iter()
            .filter(|p| names.contains(&p.b) && p.result.iter().all(|r| names.contains(r)))
            .filter(|p| {
                // keep only products whose target bidegree lies in the region
                let (s, t) = name_bidegree(self, &p.b).unwrap_or((0, 0));
                let i: u32 = p.a[1..].parse().unwrap_or(0);
                region.contains(s + 1, t + (1 << i))
            })
            .cloned()
            .collect();
        BigradedChart { prime: self.prime, method: self.method.clone(), regions: vec![region], cells, products }
    }

    /// One line per cell of the window: `s t dim`.
    pub fn dimension_table(&self) -> String {
        let mut keys = BTreeSet::new();
        for r in &self.regions {
            for s in 0..=r.s_max {
                for t in s..=r.t_max {
                    if r.contains(s, t) {
                        keys.insert((s, t));
                    }
                }
            }
        }
        let mut out = String::new();
        for (s, t) in keys {
            out.push_str(&format!("{s} {t} {}\n", self.dim(s, t).unwrap_or(0)));
        }
        out
    }

    /// Stable JSON rendering.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("chart serializes")
    }

    pub fn with_injected_class(&self, s: u32, t: u32, name: &str) -> Self {
        let mut out = self.clone();
        match out.cells.iter_mut().find(|c| c.s == s && c.t == t) {
            Some(c) => {
                c.dim += 1;
                c.names.push(name.to_string());
            }
            None => out.cells.push(ChartCell { s, t, dim: 1, names: vec![name.to_string()] }),
        }
        out.cells.sort_by_key(|c| (c.s, c.t));
        out
    }

    /// Classical Adams chart: stem across, filtration up, h₀ and h₁ lines.
    pub fn to_svg(&self) -> String {
        let max_stem = self.cells.iter().map(|c| c.t - c.s).max().unwrap_or(0);
        let max_s = self.cells.iter().map(|c| c.s).max().unwrap_or(0);
        let unit = 40.0;
        let (w, h) = ((max_stem + 2) as f64 * unit, (max_s + 2) as f64 * unit);
        let pos = |s: u32, t: u32, k: usize, n: usize| -> (f64, f64) {
            let spread = 8.0;
            let dx = (k as f64 - (n as f64 - 1.0) / 2.0) * spread;
            ((t - s) as f64 * unit + unit + dx, h - (s as f64 * unit + unit))
        };
        let mut where_is: HashMap<&str, (f64, f64)> = HashMap::new();
        let mut dots = String::new();
        for c in &self.cells {
            for k in 0..c.dim {
                let (x, y) = pos(c.s, c.t, k, c.dim);
                dots.push_str(&format!("<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"3\"/>\n"));
                if let Some(n) = c.names.get(k) {
                    where_is.insert(n.as_str(), (x, y));
                    if c.s <= 3 && !n.starts_with('x') {
                        dots.push_str(&format!(
                            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"9\">{}</text>\n",
                            x + 4.0,
                            y - 4.0,
                            n
                        ));
                    }
                }
            }
        }
        let mut lines = String::new();
        for p in self.products.iter().filter(|p| p.a == "h0" || p.a == "h1") {
            let Some(&(x1, y1)) = where_is.get(p.b.as_str()) else { continue };
            for r in &p.result {
                if let Some(&(x2, y2)) = where_is.get(r.as_str()) {
                    lines.push_str(&format!(
                        "<line x1=\"{x1:.1}\" y1=\"{y1:.1}\" x2=\"{x2:.1}\" y2=\"{y2:.1}\" stroke=\"black\" stroke-width=\"1\"/>\n"
                    ));
                }
            }
        }
        let mut axes = String::new();
        for stem in 0..=max_stem {
            axes.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"10\" text-anchor=\"middle\">{stem}</text>\n",
                stem as f64 * unit + unit,
                h - 4.0
            ));
        }
        for s in 0..=max_s {
            axes.push_str(&format!(
                "<text x=\"4\" y=\"{:.1}\" font-size=\"10\">{s}</text>\n",
                h - (s as f64 * unit + unit) + 3.0
            ));
        }
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\">\n\
             <desc>Ext over the mod 2 Steenrod algebra, method {}; x = t - s, y = s</desc>\n\
             {axes}{lines}{dots}</svg>\n",
            self.method
        )
    }
}

fn name_bidegree(chart: &BigradedChart, name: &str) -> Option<(u32, u32)> {
    chart.cells.iter().find(|c| c.names.iter().any(|n| n == name)).map(|c| (c.s, c.t))
}

/// Display a product of named factors: h-monomial first, e.g. `h0^2h2`, `h1c0`, `h0·x4_18_0`.
fn format_factors(f: &[String]) -> String {
    let mut hs: BTreeMap<u32, usize> = BTreeMap::new();
    let mut rest = Vec::new();
    for x in f {
        match x.strip_prefix('h').and_then(|i| i.parse::<u32>().ok()) {
            Some(i) => *hs.entry(i).or_default() += 1,
            None => rest.push(x.as_str()),
        }
    }
    let mut out: String = hs
        .into_iter()
        .map(|(i, n)| if n == 1 { format!("h{i}") } else { format!("h{i}^{n}") })
        .collect();
    for r in rest {
        if r.starts_with('x') && !out.is_empty() {
            out.push('·');
        }
        out.push_str(r);
    }
    if out.is_empty() {
        "1".into()
    } else {
        out
    }
}

/// Something that knows Ext dimensions and the action of h_i on a native basis.
trait ExtSource {
    fn dim(&mut self, s: u32, t: u32) -> Result<usize>;
    fn h_mult(&mut self, i: u32, s: u32, t: u32, v: &[u32]) -> Result<Option<F2Vec>>;
    /// Whether a 1-dimensional diagonal cell is known to be spanned by h₀^s
    /// without computing products.
    fn diagonal_is_tower(&self, _s: u32) -> bool {
        false
    }
}

impl ExtSource for MinimalResolution {
    fn dim(&mut self, s: u32, t: u32) -> Result<usize> {
        Ok(self.ext_dim(s, t))
    }

    fn h_mult(&mut self, i: u32, s: u32, t: u32, v: &[u32]) -> Result<Option<F2Vec>> {
        Ok(MinimalResolution::h_mult(self, i, s, t, v))
    }
}

struct CobarSource<'a> {
    cx: &'a mut CobarComplex,
    dims: &'a BTreeMap<(u32, u32), usize>,
    rep_s: u32,
}

impl ExtSource for CobarSource<'_> {
    fn dim(&mut self, s: u32, t: u32) -> Result<usize> {
        Ok(self.dims.get(&(s, t)).copied().unwrap_or(0))
    }

    fn h_mult(&mut self, i: u32, s: u32, t: u32, v: &[u32]) -> Result<Option<F2Vec>> {
        let ti = t + (1 << i);
        if s + 1 > self.rep_s || ti > self.cx.t_max() {
            return Ok(None);
        }
        self.cx.h_mult_coords(i, s, t, v).map(Some)
    }

    // C^{s,s} is spanned by the single cochain [ξ₁|…|ξ₁].
    fn diagonal_is_tower(&self, _s: u32) -> bool {
        true
    }
}

struct NamedCell {
    names: Vec<Vec<String>>,
    vectors: Vec<F2Vec>,
    solver: F2Echelon,
}

/// Choose named bases cell by cell: h_i-products first, then c_i, then synthetic ids.
fn name_chart(src: &mut dyn ExtSource, regions: &[Region], method: &str) -> Result<BigradedChart> {
    let mut keys = BTreeSet::new();
    for r in regions {
        for s in 0..=r.s_max {
            for t in s..=r.t_max {
                keys.insert((s, t));
            }
        }
    }
    let mut named: BTreeMap<(u32, u32), NamedCell> = BTreeMap::new();
    for &(s, t) in &keys {
        let dim = src.dim(s, t)?;
        if dim == 0 {
            continue;
        }
        let mut cell = NamedCell { names: vec![], vectors: vec![], solver: F2Echelon::new(true) };
        if s == 0 {
            cell.names.push(vec!["1".into()]);
            cell.vectors.push(vec![0]);
        } else if s == 1 && t.is_power_of_two() && dim == 1 {
            cell.names.push(vec![format!("h{}", t.trailing_zeros())]);
            cell.vectors.push(vec![0]);
        } else if s == t && dim == 1 && src.diagonal_is_tower(s) {
            cell.names.push(vec!["h0".to_string(); s as usize]);
            cell.vectors.push(vec![0]);
        } else {
            let mut i = 0;
            while (1u32 << i) <= t && cell.vectors.len() < dim {
                let from = (s - 1, t - (1 << i));
                if let Some(source) = named.get(&from) {
                    if source.names.len() > 0 && source.names[0] != vec!["1".to_string()] {
                        for (n, v) in source.names.clone().iter().zip(source.vectors.clone()) {
                            if let Some(p) = src.h_mult(i, from.0, from.1, &v)? {
                                if !p.is_empty() && !cell.solver.contains(&p) {
                                    cell.solver.insert(&p);
                                    let mut f = n.clone();
                                    f.push(format!("h{i}"));
                                    f.sort();
                                    cell.names.push(f);
                                    cell.vectors.push(p);
                                }
                            }
                        }
                    }
                }
                i += 1;
            }
            // rebuild the solver with named products only; remaining slots below
            let is_c = s == 3 && t % 11 == 0 && (t / 11).is_power_of_two();
            let mut k = 0;
            for e in 0..dim as u32 {
                if cell.vectors.len() >= dim {
                    break;
                }
                let v = vec![e];
                if cell.solver.contains(&v) {
                    continue;
                }
                cell.solver.insert(&v);
                let name = if is_c && k == 0 {
                    format!("c{}", (t / 11).trailing_zeros())
                } else {
                    format!("x{}_{}_{}", s, t, k)
                };
                k += 1;
                cell.names.push(vec![name]);
                cell.vectors.push(v);
            }
        }
        let mut solver = F2Echelon::new(true);
        for v in &cell.vectors {
            solver.insert(v);
        }
        cell.solver = solver;
        named.insert((s, t), cell);
    }
    let display = |f: &Vec<String>| format_factors(f);
    let t_top = regions.iter().map(|r| r.t_max).max().unwrap_or(0);
    let mut cells = Vec::new();
    let mut products = Vec::new();
    for (&(s, t), cell) in &named {
        if !regions.iter().any(|r| r.contains(s, t)) {
            continue;
        }
        cells.push(ChartCell { s, t, dim: cell.vectors.len(), names: cell.names.iter().map(display).collect() });
        if s == 0 {
            continue;
        }
        let mut i = 0;
        while (1u32 << i) <= t_top {
            let to = (s + 1, t + (1 << i));
            if regions.iter().any(|r| r.contains(to.0, to.1)) {
                for (n, v) in cell.names.iter().zip(&cell.vectors) {
                    let Some(p) = src.h_mult(i, s, t, v)? else { continue };
                    let result = if p.is_empty() {
                        vec![]
                    } else {
                        let target = named.get(&to).ok_or_else(|| Error::Verification("product into empty cell".into()))?;
                        let combo = target
                            .solver
                            .solve(&p)
                            .ok_or_else(|| Error::Verification("product outside named basis".into()))?;
                        combo.iter().map(|&k| display(&target.names[k as usize])).collect()
                    };
                    products.push(ProductRecord { a: format!("h{i}"), b: display(n), result });
                }
            }
            i += 1;
        }
    }
    Ok(BigradedChart { prime: 2, method: method.to_string(), regions: regions.to_vec(), cells, products })
}

/// Options shared by the chart engines.
#[derive(Clone, Copy, Debug)]
pub struct ChartOptions {
    /// Ceiling on the dimension of any single linear-algebra problem.
    pub max_basis: usize,
    /// Cobar only: highest s with cocycle representatives (for names and products).
    pub rep_s: u32,
}

impl Default for ChartOptions {
    fn default() -> Self {
        ChartOptions { max_basis: DEFAULT_MAX_BASIS, rep_s: 3 }
    }
}

/// Ext chart of the cobar complex over the given regions.
pub fn cobar_cohomology(regions: &[Region], opts: ChartOptions) -> Result<BigradedChart> {
    let mut dims = BTreeMap::new();
    let t_top = regions.iter().map(|r| r.t_max).max().unwrap_or(0);
    for r in regions {
        for ((s, t), d) in cobar_dimensions(r.s_max, r.t_max, opts.max_basis)? {
            dims.insert((s, t), d);
        }
    }
    let mut cx = CobarComplex::with_max_basis(t_top, opts.max_basis);
    let mut src = CobarSource { cx: &mut cx, dims: &dims, rep_s: opts.rep_s };
    name_chart(&mut src, regions, "cobar")
}

/// Ext chart from a minimal resolution covering the regions.
pub fn minimal_resolution_chart(regions: &[Region], opts: ChartOptions) -> Result<(BigradedChart, MinimalResolution)> {
    let s_max = regions.iter().map(|r| r.s_max).max().unwrap_or(0);
    let t_max = regions.iter().map(|r| r.t_max).max().unwrap_or(0);
    // one extra filtration so that products out of the top row can be named
    let mut res = MinimalResolution::compute(s_max + 1, t_max, opts.max_basis)?;
    let chart = name_chart(&mut res, regions, "minres")?;
    Ok((chart, res))
}

// ---------------------------------------------------------------------------
// Vanishing line

/// The correction term in the vanishing wedge.
pub fn vanishing_epsilon(s: u32) -> u32 {
    match s % 4 {
        0 | 1 => 1,
        2 => 2,
        _ => 3,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub s: u32,
    pub t: u32,
    pub rule: String,
}

/// Checks negative-stem vanishing, the h₀-tower diagonal and the vanishing
/// wedge `0 < t−s < 2s − ε(s)` over every cell of the chart's window.
pub fn vanishing_line_check(chart: &BigradedChart) -> Vec<Violation> {
    let mut out = Vec::new();
    for c in &chart.cells {
        if c.dim > 0 && c.t < c.s {
            out.push(Violation { s: c.s, t: c.t, rule: "negative stem".into() });
        }
    }
    let mut keys = BTreeSet::new();
    for r in &chart.regions {
        for s in 0..=r.s_max {
            for t in s..=r.t_max {
                if r.contains(s, t) {
                    keys.insert((s, t));
                }
            }
        }
    }
    for c in &chart.cells {
        keys.insert((c.s, c.t));
    }
    for (s, t) in keys {
        if t < s {
            continue;
        }
        let dim = chart.dim(s, t).unwrap_or(0);
        let stem = t - s;
        if stem == 0 {
            let expect = if s == 0 { "1".to_string() } else if s == 1 { "h0".into() } else { format!("h0^{s}") };
            let names = chart.names(s, t);
            if dim != 1 || (!names.is_empty() && names[0] != expect) {
                out.push(Violation { s, t, rule: format!("diagonal must be {expect}") });
            }
        } else if (stem as i64) < 2 * s as i64 - vanishing_epsilon(s) as i64 && dim > 0 {
            out.push(Violation { s, t, rule: format!("inside vanishing wedge (eps={})", vanishing_epsilon(s)) });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adem_examples() {
        assert!(adem_reduce(&[1, 1]).is_zero());
        assert_eq!(adem_reduce(&[2, 2]), SteenrodElement::from_admissible([vec![3, 1]]).unwrap());
        assert_eq!(adem_reduce(&[4, 2]), SteenrodElement::from_admissible([vec![4, 2]]).unwrap());
        assert_eq!(adem_reduce(&[1, 2]).to_string(), "Sq3");
        assert_eq!(adem_reduce(&[2, 3]).to_string(), "Sq4 Sq1 + Sq5");
    }

    #[test]
    fn admissible_counts_match_dual_basis() {
        for n in 0..=24 {
            assert_eq!(admissible_basis(n).len(), dual_basis(n).len(), "degree {n}");
        }
    }

    #[test]
    fn diagonal_examples() {
        let xi1 = DualMonomial::xi(1, 1);
        let d: Vec<_> = milnor_diagonal(&xi1).into_iter().collect();
        assert_eq!(d.len(), 2);
        let xi2 = DualMonomial::xi(2, 1);
        let expect: DualTensor = [
            (xi2.clone(), DualMonomial::one()),
            (DualMonomial::xi(1, 2), xi1.clone()),
            (DualMonomial::one(), xi2.clone()),
        ]
        .into_iter()
        .collect();
        assert_eq!(milnor_diagonal(&xi2), expect);
    }

    #[test]
    fn small_cobar_cells() {
        let mut cx = CobarComplex::new(8);
        for i in 0..4 {
            assert!(cx.is_cocycle(&CobarElement::h(i)).unwrap());
            assert_eq!(cx.cohomology_dim(1, 1 << i).unwrap(), 1);
        }
        assert_eq!(cx.cohomology_dim(1, 3).unwrap(), 0);
        assert!(cx.d_squared_is_zero(2, 7).unwrap());
    }

    #[test]
    fn resolution_first_stages() {
        let res = MinimalResolution::compute(3, 12, DEFAULT_MAX_BASIS).unwrap();
        assert_eq!(res.generator_degrees(0), &[0]);
        assert_eq!(res.generator_degrees(1), &[1, 2, 4, 8]);
        assert_eq!(res.ext_dim(2, 2), 1);
        assert_eq!(res.ext_dim(3, 11), 1);
    }

    #[test]
    fn epsilon_table() {
        assert_eq!((0..8).map(vanishing_epsilon).collect::<Vec<_>>(), vec![1, 1, 2, 3, 1, 1, 2, 3]);
    }
}
