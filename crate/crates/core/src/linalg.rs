//! Sparse and dense exact linear algebra.
//!
//! Field elimination is generic over [`Ring`] (assumed a field); F₂ has a
//! dedicated sparse path for cobar complexes. Integer and Z_(p)-local Smith
//! forms carry their transforms so kernels and cokernels can be read off.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{p_valuation, Ring};
use crate::error::{Error, Result};

/// Sparse matrix with (row, col, value) triples: no duplicates, no zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<E> {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<(usize, usize, E)>,
}

impl<E: Clone + PartialEq> SparseMatrix<E> {
    /// Duplicate positions are summed; zero results dropped.
    pub fn from_triples<R: Ring<Elem = E>>(
        ring: &R,
        rows: usize,
        cols: usize,
        triples: impl IntoIterator<Item = (usize, usize, E)>,
    ) -> Result<Self> {
        let mut map: HashMap<(usize, usize), E> = HashMap::new();
        for (r, c, v) in triples {
            if r >= rows || c >= cols {
                return Err(Error::Shape(format!(
                    "entry ({r},{c}) outside {rows}x{cols}"
                )));
            }
            let e = map.entry((r, c)).or_insert_with(|| ring.zero());
            *e = ring.add(e, &v);
        }
        let mut entries: Vec<_> = map
            .into_iter()
            .filter(|(_, v)| !ring.is_zero(v))
            .map(|((r, c), v)| (r, c, v))
            .collect();
        entries.sort_by_key(|(r, c, _)| (*r, *c));
        Ok(SparseMatrix { rows, cols, entries })
    }

    pub fn entries(&self) -> &[(usize, usize, E)] {
        &self.entries
    }

    pub fn to_dense<R: Ring<Elem = E>>(&self, ring: &R) -> Vec<Vec<E>> {
        let mut d = vec![vec![ring.zero(); self.cols]; self.rows];
        for (r, c, v) in &self.entries {
            d[*r][*c] = v.clone();
        }
        d
    }

    pub fn mul_vec<R: Ring<Elem = E>>(&self, ring: &R, v: &[E]) -> Vec<E> {
        let mut out = vec![ring.zero(); self.rows];
        for (r, c, x) in &self.entries {
            out[*r] = ring.add(&out[*r], &ring.mul(x, &v[*c]));
        }
        out
    }
}

/// Rank and a kernel basis of M (right kernel: M·v = 0) over a field.
pub fn fp_rank_kernel<R: Ring>(
    ring: &R,
    m: &SparseMatrix<R::Elem>,
) -> Result<(usize, Vec<Vec<R::Elem>>)> {
    let dense = m.to_dense(ring);
    Ok(dense_rank_kernel(ring, dense, m.cols))
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref<R: Ring>(ring: &R, a: &mut [Vec<R::Elem>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row >= a.len() {
            break;
        }
        let Some(pr) = (row..a.len()).find(|&r| !ring.is_zero(&a[r][col])) else {
            continue;
        };
        a.swap(row, pr);
        let inv = ring.inv(&a[row][col]).expect("field element invertible");
        for x in a[row].iter_mut() {
            *x = ring.mul(x, &inv);
        }
        let pivot_row = a[row].clone();
        for (r, other) in a.iter_mut().enumerate() {
            if r != row && !ring.is_zero(&other[col]) {
                let f = other[col].clone();
                for (x, y) in other.iter_mut().zip(&pivot_row) {
                    *x = ring.sub(x, &ring.mul(&f, y));
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn dense_rank_kernel<R: Ring>(
    ring: &R,
    mut a: Vec<Vec<R::Elem>>,
    cols: usize,
) -> (usize, Vec<Vec<R::Elem>>) {
    let pivots = rref(ring, &mut a, cols);
    let rank = pivots.len();
    let mut is_pivot = vec![None; cols];
    for (i, &c) in pivots.iter().enumerate() {
        is_pivot[c] = Some(i);
    }
    let mut kernel = Vec::new();
    for free in (0..cols).filter(|c| is_pivot[*c].is_none()) {
        let mut v = vec![ring.zero(); cols];
        v[free] = ring.one();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = ring.neg(&a[i][free]);
        }
        kernel.push(v);
    }
    (rank, kernel)
}

/// Sparse F₂ vector: sorted column indices.
pub type F2Vec = Vec<u32>;

pub fn f2_xor(a: &[u32], b: &[u32]) -> F2Vec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Normalize an unsorted list of indices into an F₂ vector (pairs cancel).
pub fn f2_normalize(mut v: Vec<u32>) -> F2Vec {
    v.sort_unstable();
    let mut out = Vec::with_capacity(v.len());
    for x in v {
        if out.last() == Some(&x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

/// Incremental F₂ echelon basis keyed by leading (smallest) column.
///
/// With `track` set, each stored row remembers which inserted vectors
/// it is a combination of.
#[derive(Clone, Debug, Default)]
pub struct F2Echelon {
    rows: Vec<F2Vec>,
    combos: Vec<F2Vec>,
    pivot_of: HashMap<u32, usize>,
    dependencies: Vec<F2Vec>,
    inserted: u32,
    track: bool,
}

impl F2Echelon {
    pub fn new(track: bool) -> Self {
        F2Echelon { track, ..Default::default() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce v against the basis; returns the residue and the combination used.
    pub fn reduce(&self, v: &[u32]) -> (F2Vec, F2Vec) {
        let mut v = v.to_vec();
        let mut combo = Vec::new();
        // Full reduction: clear every pivot column; entries before the
        // cursor are never touched again since pivot rows start at their pivot.
        let mut i = 0;
        while i < v.len() {
            if let Some(&r) = self.pivot_of.get(&v[i]) {
                let tail = f2_xor(&v[i..], &self.rows[r]);
                v.truncate(i);
                v.extend(tail);
                if self.track {
                    combo = f2_xor(&combo, &self.combos[r]);
                }
            } else {
                i += 1;
            }
        }
        (v, combo)
    }

    /// Insert; returns true if v was independent. Returns the inserted index.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        let id = self.inserted;
        self.inserted += 1;
        let mut v = v.to_vec();
        let mut combo = if self.track { vec![id] } else { vec![] };
        while let Some(&lead) = v.first() {
            match self.pivot_of.get(&lead) {
                Some(&r) => {
                    v = f2_xor(&v, &self.rows[r]);
                    if self.track {
                        combo = f2_xor(&combo, &self.combos[r]);
                    }
                }
                None => {
                    self.pivot_of.insert(lead, self.rows.len());
                    self.rows.push(v);
                    if self.track {
                        self.combos.push(combo);
                    }
                    return true;
                }
            }
        }
        if self.track {
            // Record the dependency for kernel extraction.
            self.dependencies.push(combo);
        }
        false
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).0.is_empty()
    }

    /// Express v as a combination of inserted vectors, if it lies in the span.
    pub fn solve(&self, v: &[u32]) -> Option<F2Vec> {
        let (res, combo) = self.reduce(v);
        res.is_empty().then_some(combo)
    }

    /// Kernel relations among the inserted vectors (requires `track`).
    pub fn dependencies(&self) -> &[F2Vec] {
        &self.dependencies
    }
}

/// Incremental echelon basis over a field with sparse vectors.
#[derive(Clone, Debug)]
pub struct SparseEchelon<R: Ring> {
    ring: R,
    rows: Vec<Vec<(usize, R::Elem)>>,
    pivot_of: HashMap<usize, usize>,
}

pub type SparseVec<E> = Vec<(usize, E)>;

pub fn sparse_axpy<R: Ring>(ring: &R, a: &[(usize, R::Elem)], f: &R::Elem, b: &[(usize, R::Elem)]) -> SparseVec<R::Elem> {
    // a + f·b
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i >= a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, ring.mul(f, &b[j].1)));
            j += 1;
        } else {
            let v = ring.add(&a[i].1, &ring.mul(f, &b[j].1));
            if !ring.is_zero(&v) {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

impl<R: Ring> SparseEchelon<R> {
    pub fn new(ring: R) -> Self {
        SparseEchelon { ring, rows: vec![], pivot_of: HashMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Full reduction modulo the span.
    pub fn reduce(&self, v: &[(usize, R::Elem)]) -> SparseVec<R::Elem> {
        let ring = &self.ring;
        let mut v = v.to_vec();
        let mut i = 0;
        while i < v.len() {
            if let Some(&r) = self.pivot_of.get(&v[i].0) {
                let f = ring.neg(&v[i].1);
                let tail = sparse_axpy(ring, &v[i..], &f, &self.rows[r]);
                v.truncate(i);
                v.extend(tail);
            } else {
                i += 1;
            }
        }
        v
    }

    pub fn insert(&mut self, v: &[(usize, R::Elem)]) -> bool {
        let ring = self.ring.clone();
        let mut v = v.to_vec();
        while let Some((lead, c)) = v.first().cloned() {
            match self.pivot_of.get(&lead) {
                Some(&r) => {
                    let f = ring.neg(&c);
                    v = sparse_axpy(&ring, &v, &f, &self.rows[r]);
                }
                None => {
                    let inv = ring.inv(&c).expect("field");
                    let v: Vec<_> = v.into_iter().map(|(i, x)| (i, ring.mul(&x, &inv))).collect();
                    self.pivot_of.insert(lead, self.rows.len());
                    self.rows.push(v);
                    return true;
                }
            }
        }
        false
    }

    pub fn contains(&self, v: &[(usize, R::Elem)]) -> bool {
        self.reduce(v).is_empty()
    }
}

/// Smith normal form with transforms: U·M·V = diag(factors).
#[derive(Clone, Debug, PartialEq)]
pub struct SmithForm {
    pub rows: usize,
    pub cols: usize,
    /// Nonzero invariant factors d₁ | d₂ | …, positive.
    pub factors: Vec<BigInt>,
    pub u: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Cokernel Z^rows / image: torsion orders (> 1) and free rank.
    pub fn cokernel(&self) -> (Vec<BigInt>, usize) {
        let torsion = self.factors.iter().filter(|d| !d.is_one()).cloned().collect();
        (torsion, self.rows - self.rank())
    }

    /// Kernel basis: the last cols − rank columns of V.
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        (self.rank()..self.cols)
            .map(|j| (0..self.cols).map(|i| self.v[i][j].clone()).collect())
            .collect()
    }
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

/// Integer Smith normal form over exact big integers.
pub fn smith_normal_form(m: &SparseMatrix<BigInt>) -> SmithForm {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = vec![vec![BigInt::zero(); cols]; rows];
    for (r, c, v) in m.entries() {
        a[*r][*c] = v.clone();
    }
    smith_dense(a, rows, cols)
}

pub fn smith_dense(mut a: Vec<Vec<BigInt>>, rows: usize, cols: usize) -> SmithForm {
    let mut u = identity(rows);
    let mut v = identity(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        // Pivot: smallest nonzero absolute value in the remaining block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero()
                    && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        u.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        for row in v.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in t..cols {
                    let s = &q * &a[t][j];
                    a[i][j] -= s;
                }
                for j in 0..rows {
                    let s = &q * &u[t][j];
                    u[i][j] -= s;
                }
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    u.swap(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for i in t..rows {
                    let s = &q * &a[i][t];
                    a[i][j] -= s;
                }
                for i in 0..cols {
                    let s = &q * &v[i][t];
                    v[i][j] -= s;
                }
                if !a[t][j].is_zero() {
                    for row in a.iter_mut() {
                        row.swap(t, j);
                    }
                    for row in v.iter_mut() {
                        row.swap(t, j);
                    }
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // Divisibility: fold any entry not divisible by the pivot into row t.
            let mut fix = None;
            'outer: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(&a[i][j] % &a[t][t]).is_zero() {
                        fix = Some(i);
                        break 'outer;
                    }
                }
            }
            match fix {
                Some(i) => {
                    for j in t..cols {
                        let s = a[i][j].clone();
                        a[t][j] += s;
                    }
                    for j in 0..rows {
                        let s = u[i][j].clone();
                        u[t][j] += s;
                    }
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for j in t..cols {
                a[t][j] = -&a[t][j];
            }
            for j in 0..rows {
                u[t][j] = -&u[t][j];
            }
        }
        t += 1;
    }
    let factors = (0..rows.min(cols))
        .map(|i| a[i][i].clone())
        .take_while(|d| !d.is_zero())
        .collect();
    SmithForm { rows, cols, factors, u, v }
}

/// Smith form over Z_(p): U·M·V = diag(p^{e_i}·unit), with V⁻¹ kept.
#[derive(Clone, Debug)]
pub struct LocalSmith {
    pub p: u64,
    pub rows: usize,
    pub cols: usize,
    /// Valuations of the nonzero diagonal entries, in pivot order.
    pub exponents: Vec<u32>,
    pub diag: Vec<BigRational>,
    pub u: Vec<Vec<BigRational>>,
    pub v: Vec<Vec<BigRational>>,
    pub v_inv: Vec<Vec<BigRational>>,
}

fn q_identity(n: usize) -> Vec<Vec<BigRational>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect()
}

/// Local Smith form of a dense matrix of p-integral rationals.
pub fn local_smith(p: u64, m: &[Vec<BigRational>], rows: usize, cols: usize) -> Result<LocalSmith> {
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    for row in &a {
        for x in row {
            if p_valuation(x, p).map_or(false, |e| e < 0) {
                return Err(Error::Domain(format!("entry {x} not {p}-integral")));
            }
        }
    }
    let mut u = q_identity(rows);
    let mut v = q_identity(cols);
    let mut v_inv = q_identity(cols);
    let mut exponents = Vec::new();
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        let mut best: Option<(usize, usize, i64)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, x) in row.iter().enumerate().skip(t) {
                if let Some(e) = p_valuation(x, p) {
                    if best.map_or(true, |(_, _, be)| e < be) {
                        best = Some((i, j, e));
                    }
                }
            }
        }
        let Some((pi, pj, e)) = best else { break };
        a.swap(t, pi);
        u.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        for row in v.iter_mut() {
            row.swap(t, pj);
        }
        v_inv.swap(t, pj);
        let piv = a[t][t].clone();
        for i in t + 1..rows {
            if a[i][t].is_zero() {
                continue;
            }
            let q = &a[i][t] / &piv;
            for j in t..cols {
                let s = &q * &a[t][j];
                a[i][j] -= s;
            }
            for j in 0..rows {
                let s = &q * &u[t][j];
                u[i][j] -= s;
            }
        }
        for j in t + 1..cols {
            if a[t][j].is_zero() {
                continue;
            }
            let q = &a[t][j] / &piv;
            // column_j -= q·column_t; V likewise, V⁻¹ gets row_t += q·row_j.
            for i in t..rows {
                let s = &q * &a[i][t];
                a[i][j] -= s;
            }
            for i in 0..cols {
                let s = &q * &v[i][t];
                v[i][j] -= s;
            }
            for k in 0..cols {
                let s = &q * &v_inv[j][k];
                v_inv[t][k] += s;
            }
        }
        exponents.push(e as u32);
        diag.push(piv);
    }
    Ok(LocalSmith { p, rows, cols, exponents, diag, u, v, v_inv })
}

impl LocalSmith {
    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    /// Kernel basis over Z_(p): columns rank.. of V.
    pub fn kernel_basis(&self) -> Vec<Vec<BigRational>> {
        (self.rank()..self.cols)
            .map(|j| (0..self.cols).map(|i| self.v[i][j].clone()).collect())
            .collect()
    }

    /// Coordinates of a kernel vector in `kernel_basis()`.
    pub fn kernel_coords(&self, x: &[BigRational]) -> Vec<BigRational> {
        (self.rank()..self.cols)
            .map(|i| {
                self.v_inv[i]
                    .iter()
                    .zip(x)
                    .fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Smallest e with p^e·y in the column span over Z_(p); None if y is
    /// outside the rational span.
    pub fn order_exponent(&self, y: &[BigRational]) -> Option<u32> {
        let c: Vec<BigRational> = self
            .u
            .iter()
            .map(|row| row.iter().zip(y).fold(BigRational::zero(), |acc, (a, b)| acc + a * b))
            .collect();
        if c[self.rank()..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let mut need = 0i64;
        for (i, &e) in self.exponents.iter().enumerate() {
            if let Some(vc) = p_valuation(&c[i], self.p) {
                need = need.max(e as i64 - vc);
            }
        }
        Some(need as u32)
    }
}

/// Z_(p)-module ⊕ Z/p^{e_i} ⊕ Z_(p)^free.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct LocalGroup {
    pub p: u64,
    pub torsion: Vec<u32>,
    pub free: usize,
}

impl LocalGroup {
    pub fn is_zero(&self) -> bool {
        self.torsion.is_empty() && self.free == 0
    }

    pub fn order_exponent(&self) -> Option<u32> {
        (self.free == 0).then(|| self.torsion.iter().sum())
    }
}

impl std::fmt::Display for LocalGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = self
            .torsion
            .iter()
            .map(|e| format!("Z/{}", BigInt::from(self.p).pow(*e)))
            .collect();
        match self.free {
            0 => {}
            1 => parts.push(format!("Z_({})", self.p)),
            k => parts.push(format!("Z_({})^{k}", self.p)),
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// H = ker(d_next) / im(d_prev) over Z_(p), matrices acting on columns.
///
/// `d_prev`: dim_mid × dim_prev, `d_next`: dim_next × dim_mid.
pub fn local_homology(
    p: u64,
    d_prev: &[Vec<BigRational>],
    dim_prev: usize,
    d_next: &[Vec<BigRational>],
    dim_next: usize,
    dim_mid: usize,
) -> Result<LocalGroup> {
    let next = local_smith(p, d_next, dim_next, dim_mid)?;
    let kdim = dim_mid - next.rank();
    let mut b = vec![vec![BigRational::zero(); dim_prev]; kdim];
    for j in 0..dim_prev {
        let col: Vec<BigRational> = (0..dim_mid).map(|i| d_prev[i][j].clone()).collect();
        let coords = next.kernel_coords(&col);
        for (i, c) in coords.into_iter().enumerate() {
            b[i][j] = c;
        }
    }
    let img = local_smith(p, &b, kdim, dim_prev)?;
    let mut torsion: Vec<u32> = img.exponents.iter().copied().filter(|&e| e > 0).collect();
    torsion.sort_unstable();
    Ok(LocalGroup { p, torsion, free: kdim - img.rank() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{FiniteField, PrimeField};

    fn int_matrix(rows: &[&[i64]]) -> SparseMatrix<BigInt> {
        let r = rows.len();
        let c = rows[0].len();
        let triples = rows.iter().enumerate().flat_map(|(i, row)| {
            row.iter().enumerate().map(move |(j, &x)| (i, j, BigInt::from(x)))
        });
        SparseMatrix::from_triples(&IntRing, r, c, triples).unwrap()
    }

    #[derive(Clone, Debug)]
    struct IntRing;
    impl Ring for IntRing {
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

    #[test]
    fn spec_smith_examples() {
        let f = |m: &[&[i64]]| smith_normal_form(&int_matrix(m)).factors;
        assert_eq!(f(&[&[1, 0], &[0, 1]]), vec![1.into(), 1.into()]);
        assert_eq!(f(&[&[2, 4], &[6, 8]]), vec![2.into(), 4.into()]);
        assert_eq!(f(&[&[6, 0], &[0, 4]]), vec![2.into(), 12.into()]);
    }

    #[test]
    fn smith_transforms_diagonalize() {
        let m = int_matrix(&[&[3, 5, 7], &[2, -4, 6], &[1, 1, 1]]);
        let s = smith_normal_form(&m);
        let a = m.to_dense(&IntRing);
        for i in 0..3 {
            for j in 0..3 {
                let mut x = BigInt::zero();
                for k in 0..3 {
                    for l in 0..3 {
                        x += &s.u[i][k] * &a[k][l] * &s.v[l][j];
                    }
                }
                let expect = if i == j { s.factors.get(i).cloned().unwrap_or_default() } else { BigInt::zero() };
                assert_eq!(x, expect);
            }
        }
    }

    #[test]
    fn rank_kernel_trivial_cases() {
        let f2 = PrimeField::new(2).unwrap();
        let z = SparseMatrix::from_triples(&f2, 3, 3, vec![]).unwrap();
        let (r, k) = fp_rank_kernel(&f2, &z).unwrap();
        assert_eq!((r, k.len()), (0, 3));
        let f5 = PrimeField::new(5).unwrap();
        let id = SparseMatrix::from_triples(&f5, 4, 4, (0..4).map(|i| (i, i, 1))).unwrap();
        let (r, k) = fp_rank_kernel(&f5, &id).unwrap();
        assert_eq!((r, k.len()), (4, 0));
        assert!(SparseMatrix::from_triples(&f5, 2, 2, vec![(2, 0, 1)]).is_err());
    }

    #[test]
    fn rank_kernel_over_extension_field() {
        let f = FiniteField::standard(3, 2).unwrap();
        let w = f.generator();
        let m = SparseMatrix::from_triples(
            &f,
            2,
            3,
            vec![(0, 0, f.one()), (0, 1, w.clone()), (1, 0, w.clone()), (1, 1, f.mul(&w, &w))],
        )
        .unwrap();
        let (r, k) = fp_rank_kernel(&f, &m).unwrap();
        assert_eq!(r, 1);
        for v in &k {
            assert!(m.mul_vec(&f, v).iter().all(|x| f.is_zero(x)));
        }
    }

    #[test]
    fn local_homology_of_multiplication_by_p2() {
        let q = |n: i64| BigRational::from_integer(n.into());
        // Z --12--> Z --0--> 0 at p=2: H = Z/4.
        let g = local_homology(2, &[vec![q(12)]], 1, &[], 0, 1).unwrap();
        assert_eq!(g, LocalGroup { p: 2, torsion: vec![2], free: 0 });
    }
}
