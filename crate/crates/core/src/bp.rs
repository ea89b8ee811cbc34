//! The Brown-Peterson Hopf algebroid in a degree window.
//!
//! `BP_* = Z_(p)[v_1, v_2, ...]` with Hazewinkel generators and
//! `BP_*BP = BP_*[t_1, t_2, ...]`. Structure maps come from the logarithm:
//! `eta_R(l_n) = sum l_i t_{n-i}^{p^i}` and the matching formula for the
//! diagonal. Everything is computed over `Q` and checked to be p-integral.
//!
//! The cobar complex of a comodule is modelled as a polynomial ring
//! `M[t^(1), ..., t^(s)]`, one block of `t` variables per tensor slot; the
//! coefficients in slot junctions are iterated right units. Cohomology
//! cells over `Z_(p)` come from local Smith forms.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, p_valuation, rational_mod, IntegersModPk, PrimeField, Rationals, Ring};
use crate::error::{Error, Result};
use crate::fgl::{log_coefficients, Generators, QPoly};
use crate::linalg::{dense_rank_kernel, local_homology, local_smith, LocalGroup, SparseEchelon};
use crate::poly::{Exps, Poly, PolyRing};

type Q = BigRational;

/// |v_i| = |t_i| = 2(p^i − 1).
pub fn generator_degree(p: u64, i: usize) -> i64 {
    2 * (p.pow(i as u32) as i64 - 1)
}

fn slot_names(m: usize, s: usize) -> Vec<String> {
    let mut names: Vec<String> = (1..=m).map(|i| format!("v{i}")).collect();
    for k in 1..=s {
        for j in 1..=m {
            names.push(if s == 1 { format!("t{j}") } else { format!("t{j}[{k}]") });
        }
    }
    names
}

/// `base[v_1..v_m, t^(1)_1..t^(1)_m, ..., t^(s)_m]`, graded.
pub fn slot_ring<R: Ring>(base: R, p: u64, m: usize, s: usize) -> PolyRing<R> {
    let names = slot_names(m, s);
    let refs: Vec<&str> = names.iter().map(|x| x.as_str()).collect();
    let w: Vec<i64> = (0..m * (s + 1)).map(|i| generator_degree(p, i % m + 1)).collect();
    PolyRing::new(base, &refs).with_weights(&w)
}

fn v_index(i: usize) -> usize {
    i - 1
}

fn t_index(m: usize, slot: usize, j: usize) -> usize {
    m * slot + j - 1
}

/// Hazewinkel log coefficients and right units eta_R(v_1..v_m) in Q[v, t].
fn right_units(p: u64, m: usize) -> (QPoly, Vec<Poly<Q>>, Vec<Poly<Q>>) {
    let ring = slot_ring(Rationals, p, m, 1);
    let vs: Vec<Poly<Q>> = (1..=m).map(|i| ring.var(v_index(i))).collect();
    let l = log_coefficients(&ring, p, &vs, m, Generators::Hazewinkel);
    let t = |j: usize| if j == 0 { ring.one() } else { ring.var(t_index(m, 1, j)) };
    let pq = ring.from_int(p as i64);
    let mut eta_l = vec![ring.one()];
    let mut eta_v: Vec<Poly<Q>> = Vec::new();
    for n in 1..=m {
        let mut el = ring.zero();
        for i in 0..=n {
            el = ring.add(&el, &ring.mul(&l[i], &ring.pow(&t(n - i), p.pow(i as u32))));
        }
        eta_l.push(el);
        let mut ev = ring.mul(&pq, &eta_l[n]);
        for i in 1..n {
            let term = ring.mul(&eta_l[i], &ring.pow(&eta_v[n - i - 1], p.pow(i as u32)));
            ev = ring.sub(&ev, &term);
        }
        eta_v.push(ev);
    }
    (ring, l, eta_v)
}

/// Delta(t_1..t_m) in Q[v, t', t''].
fn diagonals(p: u64, m: usize, ring1: &QPoly, l: &[Poly<Q>]) -> (QPoly, Vec<Poly<Q>>) {
    let ring2 = slot_ring(Rationals, p, m, 2);
    let slots: Vec<usize> = (0..2 * m).collect();
    let l2: Vec<Poly<Q>> = l.iter().map(|x| ring1.relabel(x, &ring2, &slots)).collect();
    let tp = |j: usize| if j == 0 { ring2.one() } else { ring2.var(t_index(m, 1, j)) };
    let tpp = |j: usize| if j == 0 { ring2.one() } else { ring2.var(t_index(m, 2, j)) };
    let mut delta = vec![ring2.one()];
    for n in 1..=m {
        let mut acc = ring2.zero();
        for i in 0..=n {
            for j in 0..=n - i {
                let k = n - i - j;
                let a = ring2.pow(&tp(j), p.pow(i as u32));
                let b = ring2.pow(&tpp(k), p.pow((i + j) as u32));
                acc = ring2.add(&acc, &ring2.mul(&l2[i], &ring2.mul(&a, &b)));
            }
        }
        for i in 1..=n {
            let term = ring2.mul(&l2[i], &ring2.pow(&delta[n - i], p.pow(i as u32)));
            acc = ring2.sub(&acc, &term);
        }
        delta.push(acc);
    }
    delta.remove(0);
    (ring2, delta)
}

/// Outcome of the build-time Hopf algebroid checks.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BpChecks {
    pub integral: bool,
    pub eta_v1_exact: bool,
    pub eta_v2_mod_p: Option<bool>,
    pub counit: bool,
    pub coassociative: bool,
}

impl BpChecks {
    pub fn all_pass(&self) -> bool {
        self.integral
            && self.eta_v1_exact
            && self.eta_v2_mod_p.unwrap_or(true)
            && self.counit
            && self.coassociative
    }
}

/// BP_* and BP_*BP through degree `window`.
#[derive(Clone, Debug)]
pub struct BpStructure {
    pub p: u64,
    pub window: i64,
    /// Number of generators v_i (and t_i) with |v_i| ≤ window.
    pub m: usize,
    /// Q[v, t].
    pub ring: QPoly,
    /// l_0, ..., l_m in Q[v].
    pub log: Vec<Poly<Q>>,
    /// eta_R(v_1), ..., eta_R(v_m).
    pub eta_r: Vec<Poly<Q>>,
    /// Q[v, t', t''].
    pub ring2: QPoly,
    /// Delta(t_1), ..., Delta(t_m).
    pub delta: Vec<Poly<Q>>,
    pub checks: BpChecks,
}

/// Builds the presentation and verifies it; any failed check is an error.
pub fn bp_structure(p: u64, window: i64) -> Result<BpStructure> {
    if p < 2 || !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    let mut m = 0;
    while generator_degree(p, m + 1) <= window {
        m += 1;
    }
    if m == 0 {
        return Err(Error::Precondition(format!("window {window} below |v1| = {}", generator_degree(p, 1))));
    }
    let (ring, log, eta_r) = right_units(p, m);
    let (ring2, delta) = diagonals(p, m, &ring, &log);
    let mut bp = BpStructure {
        p,
        window,
        m,
        ring,
        log,
        eta_r,
        ring2,
        delta,
        checks: BpChecks {
            integral: false,
            eta_v1_exact: false,
            eta_v2_mod_p: None,
            counit: false,
            coassociative: false,
        },
    };
    bp.checks = bp.verify()?;
    if !bp.checks.all_pass() {
        return Err(Error::Verification(format!("Hopf algebroid checks failed: {:?}", bp.checks)));
    }
    Ok(bp)
}

fn integral(p: u64, a: &Poly<Q>) -> bool {
    a.values().all(|c| p_valuation(c, p).map_or(true, |e| e >= 0))
}

fn reduce_poly(a: &Poly<Q>, modulus: u64) -> Result<Poly<u64>> {
    let mut out = Poly::new();
    for (e, c) in a {
        let r = rational_mod(c, modulus)
            .ok_or_else(|| Error::Verification(format!("coefficient {c} not integral mod {modulus}")))?;
        if r != 0 {
            out.insert(e.clone(), r);
        }
    }
    Ok(out)
}

impl BpStructure {
    pub fn v(&self, i: usize) -> Poly<Q> {
        self.ring.var(v_index(i))
    }

    pub fn t(&self, j: usize) -> Poly<Q> {
        self.ring.var(t_index(self.m, 1, j))
    }

    /// The cobar model of BP_* itself, over Q with integrality tracked.
    pub fn model(&self) -> CobarModel<Rationals> {
        CobarModel {
            p: self.p,
            m: self.m,
            base: Rationals,
            eta: self.eta_r.clone(),
            delta: self.delta.clone(),
            laurent: vec![],
            caps: vec![],
        }
    }

    /// The cobar model of BP_*/p, optionally with inverted or capped v_i
    /// (indices are 1-based generator numbers).
    pub fn model_mod_p(&self, laurent: &[usize], caps: &[(usize, i32)]) -> Result<CobarModel<PrimeField>> {
        let eta = self.eta_r.iter().map(|x| reduce_poly(x, self.p)).collect::<Result<_>>()?;
        let delta = self.delta.iter().map(|x| reduce_poly(x, self.p)).collect::<Result<_>>()?;
        Ok(CobarModel {
            p: self.p,
            m: self.m,
            base: PrimeField::new(self.p)?,
            eta,
            delta,
            laurent: laurent.iter().map(|&i| v_index(i)).collect(),
            caps: caps.iter().map(|&(i, c)| (v_index(i), c)).collect(),
        })
    }

    fn verify(&self) -> Result<BpChecks> {
        let p = self.p;
        let ring = &self.ring;
        let integral_ok = self.eta_r.iter().chain(&self.delta).all(|x| integral(p, x));
        let expected_v1 = ring.add(&self.v(1), &ring.mul(&ring.from_int(p as i64), &self.t(1)));
        let eta_v1_exact = self.eta_r[0] == expected_v1;
        let eta_v2_mod_p = if self.m >= 2 {
            let fp = slot_ring(PrimeField::new(p)?, p, self.m, 1);
            let red = reduce_poly(&self.eta_r[1], p)?;
            let (v1, v2, t1) = (fp.var(v_index(1)), fp.var(v_index(2)), fp.var(t_index(self.m, 1, 1)));
            let want = fp.sub(
                &fp.add(&v2, &fp.mul(&v1, &fp.pow(&t1, p))),
                &fp.mul(&fp.pow(&v1, p), &t1),
            );
            Some(red == want)
        } else {
            None
        };
        // Counits: t -> 0 on eta_R; t' -> 0 or t'' -> 0 on Delta.
        let m = self.m;
        let mut kill_t: Vec<Poly<Q>> = (0..2 * m).map(|i| ring.var(i)).collect();
        for x in kill_t.iter_mut().skip(m) {
            *x = ring.zero();
        }
        let mut counit = true;
        for (i, e) in self.eta_r.iter().enumerate() {
            let back = ring.substitute(e, ring, &kill_t, |c| c.clone()).unwrap();
            counit &= back == self.v(i + 1);
        }
        let r2 = &self.ring2;
        for (j, d) in self.delta.iter().enumerate() {
            for killed in [1usize, 2] {
                let imgs: Vec<Poly<Q>> = (0..3 * m)
                    .map(|i| if i >= m * killed && i < m * (killed + 1) { r2.zero() } else { r2.var(i) })
                    .collect();
                let got = r2.substitute(d, r2, &imgs, |c| c.clone()).unwrap();
                let other = if killed == 1 { 2 } else { 1 };
                counit &= got == r2.var(t_index(m, other, j + 1));
            }
        }
        // Cosimplicial identities d1 d1 = d2 d1 on t_j and d1 d0 = d0 d0 on v_i.
        let model = self.model();
        let c0 = model.cofaces(0)?;
        let c1 = model.cofaces(1)?;
        let c2 = model.cofaces(2)?;
        let r1 = model.ring(1);
        let mut coassociative = true;
        for j in 1..=m {
            let t = r1.var(t_index(m, 1, j));
            let dt = c1.apply(1, &t)?;
            coassociative &= c2.apply(1, &dt)? == c2.apply(2, &dt)?;
        }
        let r0 = model.ring(0);
        for i in 1..=m {
            let v = r0.var(v_index(i));
            let dv = c0.apply(0, &v)?;
            coassociative &= c1.apply(1, &dv)? == c1.apply(0, &dv)?;
        }
        Ok(BpChecks { integral: integral_ok, eta_v1_exact, eta_v2_mod_p, counit, coassociative })
    }
}

/// Coface data of a cyclic comodule with primitive generator.
#[derive(Clone, Debug)]
pub struct CobarModel<R: Ring> {
    pub p: u64,
    pub m: usize,
    pub base: R,
    /// eta_R(v_i) in `ring(1)`.
    eta: Vec<Poly<R::Elem>>,
    /// Delta(t_j) in `ring(2)`; may be empty when only C^0 -> C^1 is used.
    delta: Vec<Poly<R::Elem>>,
    laurent: Vec<usize>,
    caps: Vec<(usize, i32)>,
}

/// The s+2 coface maps C^s -> C^{s+1}, as variable images.
#[derive(Clone, Debug)]
pub struct Cofaces<R: Ring> {
    pub s: usize,
    pub source: PolyRing<R>,
    pub target: PolyRing<R>,
    maps: Vec<Vec<Poly<R::Elem>>>,
}

impl<R: Ring> Cofaces<R> {
    pub fn apply(&self, i: usize, f: &Poly<R::Elem>) -> Result<Poly<R::Elem>> {
        self.source
            .substitute(f, &self.target, &self.maps[i], |c| c.clone())
            .ok_or_else(|| Error::Domain("coface needs an inverse that does not exist".into()))
    }

    /// d = sum (-1)^i d^i.
    pub fn d(&self, f: &Poly<R::Elem>) -> Result<Poly<R::Elem>> {
        let t = &self.target;
        let mut out = t.zero();
        for i in 0..self.maps.len() {
            let g = self.apply(i, f)?;
            out = if i % 2 == 0 { t.add(&out, &g) } else { t.sub(&out, &g) };
        }
        Ok(out)
    }
}

impl<R: Ring> CobarModel<R> {
    pub fn ring(&self, s: usize) -> PolyRing<R> {
        let mut r = slot_ring(self.base.clone(), self.p, self.m, s);
        for &i in &self.laurent {
            r = r.with_laurent(i);
        }
        for &(i, c) in &self.caps {
            r = r.with_cap(i, c);
        }
        r
    }

    /// Junction coefficients V^(1), ..., V^(upto) inside `target`.
    fn junctions(&self, target: &PolyRing<R>, upto: usize) -> Result<Vec<Vec<Poly<R::Elem>>>> {
        let m = self.m;
        let r1 = self.ring(1);
        let mut out = vec![(1..=m).map(|i| target.var(v_index(i))).collect::<Vec<_>>()];
        for k in 1..upto {
            let prev = &out[k - 1];
            let mut imgs = prev.clone();
            imgs.extend((1..=m).map(|j| target.var(t_index(m, k, j))));
            let next = self
                .eta
                .iter()
                .map(|e| r1.substitute(e, target, &imgs, |c| c.clone()))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::Domain("junction inverse does not exist".into()))?;
            out.push(next);
        }
        Ok(out)
    }

    pub fn cofaces(&self, s: usize) -> Result<Cofaces<R>> {
        let m = self.m;
        if s >= 1 && self.delta.len() < m {
            return Err(Error::Unsupported("diagonal not available in this model".into()));
        }
        let source = self.ring(s);
        let target = self.ring(s + 1);
        let junc = self.junctions(&target, s + 2)?;
        let var = |i: usize| target.var(i);
        let mut maps = Vec::with_capacity(s + 2);
        // d^0: coefficients move past a new unit slot.
        let mut d0: Vec<Poly<R::Elem>> = junc[1].clone();
        for k in 1..=s {
            d0.extend((1..=m).map(|j| var(t_index(m, k + 1, j))));
        }
        maps.push(d0);
        let r2 = self.ring(2);
        for i in 1..=s {
            let mut imgs: Vec<Poly<R::Elem>> = (1..=m).map(|j| var(v_index(j))).collect();
            for k in 1..i {
                imgs.extend((1..=m).map(|j| var(t_index(m, k, j))));
            }
            let mut dimgs = junc[i - 1].clone();
            dimgs.extend((1..=m).map(|j| var(t_index(m, i, j))));
            dimgs.extend((1..=m).map(|j| var(t_index(m, i + 1, j))));
            for dj in &self.delta {
                let img = r2
                    .substitute(dj, &target, &dimgs, |c| c.clone())
                    .ok_or_else(|| Error::Domain("diagonal substitution failed".into()))?;
                imgs.push(img);
            }
            for k in i + 1..=s {
                imgs.extend((1..=m).map(|j| var(t_index(m, k + 1, j))));
            }
            maps.push(imgs);
        }
        maps.push((0..m * (s + 1)).map(var).collect());
        Ok(Cofaces { s, source, target, maps })
    }
}

fn monomials_of_weight(weights: &[i64], target: i64) -> Vec<Exps> {
    fn rec(w: &[i64], i: usize, left: i64, cur: &mut Exps, out: &mut Vec<Exps>) {
        if i == w.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let mut k = 0;
        while k as i64 * w[i] <= left {
            cur[i] = k;
            rec(w, i + 1, left - k as i64 * w[i], cur, out);
            k += 1;
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    let mut cur = vec![0; weights.len()];
    rec(weights, 0, target, &mut cur, &mut out);
    out
}

/// Basis of the normalized cobar complex C^s in internal degree t:
/// monomials with positive degree in every slot.
pub fn normalized_basis(p: u64, m: usize, s: usize, t: i64) -> Vec<Exps> {
    let w: Vec<i64> = (0..m * (s + 1)).map(|i| generator_degree(p, i % m + 1)).collect();
    monomials_of_weight(&w, t)
        .into_iter()
        .filter(|e| (1..=s).all(|k| e[m * k..m * (k + 1)].iter().any(|&x| x > 0)))
        .collect()
}

fn differential_matrix<R: Ring>(cof: &Cofaces<R>, src: &[Exps], dst: &[Exps]) -> Result<Vec<Vec<R::Elem>>> {
    let base = &cof.source.base;
    let index: HashMap<&Exps, usize> = dst.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let mut mat = vec![vec![base.zero(); src.len()]; dst.len()];
    for (j, e) in src.iter().enumerate() {
        let f = cof.source.monomial(e.clone(), base.one());
        for (oe, c) in cof.d(&f)? {
            let &i = index.get(&oe).ok_or_else(|| {
                Error::Verification(format!("d leaves the normalized complex at {}", cof.target.fmt_monomial(&oe)))
            })?;
            mat[i][j] = c;
        }
    }
    Ok(mat)
}

/// Coefficients of the comodule whose cobar cohomology is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BpCoefficients {
    /// BP_* ⊗ Q.
    Rational,
    /// BP_* over Z_(p).
    Integral,
    /// BP_*/(p).
    ModP,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BpCell {
    pub s: usize,
    pub t: i64,
    pub group: String,
    pub torsion: Vec<u32>,
    pub free: usize,
}

/// Default ceiling on the size of one cobar cell.
pub const DEFAULT_MAX_CELL: usize = 20_000;

fn field_rank<R: Ring>(ring: &R, mat: Vec<Vec<R::Elem>>, cols: usize) -> usize {
    if mat.is_empty() || cols == 0 {
        return 0;
    }
    dense_rank_kernel(ring, mat, cols).0
}

/// H^{s,t} of the cobar complex for s ≤ s_max and 0 ≤ t ≤ t_max.
pub fn cobar_cohomology_bp(
    bp: &BpStructure,
    coeffs: BpCoefficients,
    s_max: usize,
    t_max: i64,
    max_cell: usize,
) -> Result<Vec<BpCell>> {
    if t_max > bp.window {
        return Err(Error::Precondition(format!("t_max {t_max} exceeds the window {}", bp.window)));
    }
    let p = bp.p;
    let step = generator_degree(p, 1);
    let mut cells = Vec::new();
    let qmodel = bp.model();
    let fmodel = bp.model_mod_p(&[], &[])?;
    let qcof: Vec<Cofaces<Rationals>> = (0..=s_max).map(|s| qmodel.cofaces(s)).collect::<Result<_>>()?;
    let fcof: Vec<Cofaces<PrimeField>> = (0..=s_max).map(|s| fmodel.cofaces(s)).collect::<Result<_>>()?;
    let mut t = 0;
    while t <= t_max {
        let bases: Vec<Vec<Exps>> = (0..=s_max + 1).map(|s| normalized_basis(p, bp.m, s, t)).collect();
        if let Some(b) = bases.iter().find(|b| b.len() > max_cell) {
            return Err(Error::Resource(format!("cobar cell of size {} at t = {t} exceeds {max_cell}", b.len())));
        }
        for s in 0..=s_max {
            let n = bases[s].len();
            let cell = match coeffs {
                BpCoefficients::Integral => {
                    let next = differential_matrix(&qcof[s], &bases[s], &bases[s + 1])?;
                    let prev = if s == 0 {
                        vec![Vec::new(); n]
                    } else {
                        differential_matrix(&qcof[s - 1], &bases[s - 1], &bases[s])?
                    };
                    let dim_prev = if s == 0 { 0 } else { bases[s - 1].len() };
                    let g = local_homology(p, &prev, dim_prev, &next, bases[s + 1].len(), n)?;
                    BpCell { s, t, group: g.to_string(), torsion: g.torsion.clone(), free: g.free }
                }
                BpCoefficients::Rational | BpCoefficients::ModP => {
                    let (rk_next, rk_prev) = if coeffs == BpCoefficients::Rational {
                        let next = differential_matrix(&qcof[s], &bases[s], &bases[s + 1])?;
                        let prev = if s == 0 {
                            Vec::new()
                        } else {
                            differential_matrix(&qcof[s - 1], &bases[s - 1], &bases[s])?
                        };
                        let pc = if s == 0 { 0 } else { bases[s - 1].len() };
                        (field_rank(&Rationals, next, n), field_rank(&Rationals, prev, pc))
                    } else {
                        let next = differential_matrix(&fcof[s], &bases[s], &bases[s + 1])?;
                        let prev = if s == 0 {
                            Vec::new()
                        } else {
                            differential_matrix(&fcof[s - 1], &bases[s - 1], &bases[s])?
                        };
                        let pc = if s == 0 { 0 } else { bases[s - 1].len() };
                        (field_rank(&fmodel.base, next, n), field_rank(&fmodel.base, prev, pc))
                    };
                    let dim = n - rk_next - rk_prev;
                    let field = if coeffs == BpCoefficients::Rational { "Q".to_string() } else { format!("F_{p}") };
                    let group = match dim {
                        0 => "0".to_string(),
                        1 => field,
                        k => format!("{field}^{k}"),
                    };
                    BpCell { s, t, group, torsion: vec![], free: dim }
                }
            };
            cells.push(cell);
        }
        t += step;
    }
    Ok(cells)
}

/// Primitives of BP_*/p in degree t: an F_p basis of H^{0,t}(BP_*/p).
pub fn primitives_mod_p(bp: &BpStructure, t: i64) -> Result<Vec<Poly<u64>>> {
    let model = bp.model_mod_p(&[], &[])?;
    let cof = model.cofaces(0)?;
    let b0 = normalized_basis(bp.p, bp.m, 0, t);
    let b1 = normalized_basis(bp.p, bp.m, 1, t);
    let mat = differential_matrix(&cof, &b0, &b1)?;
    let kernel = if b1.is_empty() {
        (0..b0.len())
            .map(|i| (0..b0.len()).map(|j| u64::from(i == j)).collect())
            .collect()
    } else {
        dense_rank_kernel(&model.base, mat, b0.len()).1
    };
    let r0 = model.ring(0);
    Ok(kernel
        .into_iter()
        .map(|v| {
            let mut out = Poly::new();
            for (e, c) in b0.iter().zip(v) {
                r0.add_term(&mut out, e.clone(), c);
            }
            out
        })
        .collect())
}

/// Internal degree of the n-th Greek family generator with index k:
/// 2k(p^n − 1) − f(n), f(n) = sum_{i<n} 2(p^i − 1).
pub fn greek_degree(n: u32, k: i64, p: u64) -> i64 {
    let f: i64 = (1..n as usize).map(|i| generator_degree(p, i)).sum();
    k * generator_degree(p, n as usize) - f
}

/// One entry of a Greek-letter table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreekLetterElement {
    pub name: String,
    pub family: String,
    pub n: u32,
    pub params: BTreeMap<String, i64>,
    pub degree: i64,
    pub order: String,
    pub order_exponent: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub representative: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cocycle: Option<String>,
    pub certificate: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreekTable {
    pub prime: u64,
    pub family: String,
    pub entries: Vec<GreekLetterElement>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub excluded: Vec<GreekLetterElement>,
}

impl GreekTable {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

fn p_adic_split(mut k: u64, p: u64) -> (u32, u64) {
    let mut r = 0;
    while k > 0 && k % p == 0 {
        k /= p;
        r += 1;
    }
    (r, k)
}

fn pow_string(p: u64, e: u32) -> String {
    BigInt::from(p).pow(e).to_string()
}

fn poly_from_vector(ring: &QPoly, basis: &[Exps], v: &[Q]) -> Poly<Q> {
    let mut out = Poly::new();
    for (e, c) in basis.iter().zip(v) {
        ring.add_term(&mut out, e.clone(), c.clone());
    }
    out
}

/// The H^0(BP/p^∞) generator in degree 2k(p−1), its image under the
/// connecting map into H^1(BP_*), and its order.
pub fn alpha_family(bp: &BpStructure, k: u64) -> Result<GreekLetterElement> {
    let p = bp.p;
    if p < 3 {
        return Err(Error::Precondition("alpha family needs p ≥ 3".into()));
    }
    if k == 0 {
        return Err(Error::Precondition("k ≥ 1".into()));
    }
    let t = greek_degree(1, k as i64, p);
    if t > bp.window {
        return Err(Error::Resource(format!("degree {t} exceeds the window {}", bp.window)));
    }
    let model = bp.model();
    let (b0, b1, b2) = (
        normalized_basis(p, bp.m, 0, t),
        normalized_basis(p, bp.m, 1, t),
        normalized_basis(p, bp.m, 2, t),
    );
    let d0 = differential_matrix(&model.cofaces(0)?, &b0, &b1)?;
    let d1 = differential_matrix(&model.cofaces(1)?, &b1, &b2)?;
    let smith = local_smith(p, &d0, b1.len(), b0.len())?;
    if smith.rank() < b0.len() {
        return Err(Error::Verification(format!("d0 not injective in degree {t}")));
    }
    let (pivot, &e) = smith
        .exponents
        .iter()
        .enumerate()
        .max_by_key(|(i, e)| (**e, std::cmp::Reverse(*i)))
        .ok_or_else(|| Error::Verification("empty degree".into()))?;
    let scale = Q::from_integer(BigInt::from(p).pow(e));
    let mut x: Vec<Q> = (0..b0.len()).map(|i| &smith.v[i][pivot] / &scale).collect();
    // Rescale so v_1^k carries 1/p^e, then drop terms that are zero in BP/p^inf.
    let mut v1k = vec![0; bp.m];
    v1k[0] = k as i32;
    if let Some(pos) = b0.iter().position(|e| *e == v1k) {
        if p_valuation(&x[pos], p) == Some(-(e as i64)) {
            let unit = &x[pos] * &scale;
            for c in x.iter_mut() {
                *c = &*c / &unit;
            }
        }
    }
    for c in x.iter_mut() {
        if p_valuation(c, p).map_or(true, |v| v >= 0) {
            *c = Q::zero();
        }
    }
    let dx: Vec<Q> = (0..b1.len())
        .map(|i| d0[i].iter().zip(&x).fold(Q::zero(), |acc, (a, b)| acc + a * b))
        .collect();
    if dx.iter().any(|c| p_valuation(c, p).map_or(false, |v| v < 0)) {
        return Err(Error::Verification("connecting image not integral".into()));
    }
    let cocycle_ok = d1.iter().all(|row| row.iter().zip(&dx).fold(Q::zero(), |acc, (a, b)| acc + a * b).is_zero());
    let order = smith
        .order_exponent(&dx)
        .ok_or_else(|| Error::Verification("connecting image outside the span".into()))?;
    let h1 = local_homology(p, &d0, b0.len(), &d1, b2.len(), b1.len())?;
    let r1 = model.ring(1);
    let r0 = model.ring(0);
    let lead = x.iter().zip(&b0).find(|(_, e)| **e == v1k).map(|(c, _)| c.clone());
    let lead_val = lead.as_ref().and_then(|c| p_valuation(c, p));
    let (r, k0) = p_adic_split(k, p);
    let mut params = BTreeMap::new();
    params.insert("k".to_string(), k as i64);
    params.insert("r".to_string(), r as i64);
    params.insert("k0".to_string(), k0 as i64);
    let mut cert = BTreeMap::new();
    cert.insert("route".into(), "connecting map BP/p^inf -> BP, local Smith form".into());
    cert.insert("h1_group".into(), h1.to_string());
    cert.insert("delta_is_cocycle".into(), cocycle_ok.to_string());
    cert.insert(
        "v1_power_coefficient_valuation".into(),
        lead_val.map_or("absent".into(), |v| v.to_string()),
    );
    if !cocycle_ok {
        return Err(Error::Verification("connecting image is not a cocycle".into()));
    }
    let name = if e <= 1 { format!("alpha_{k}") } else { format!("alpha_{{{k}/{e}}}") };
    Ok(GreekLetterElement {
        name,
        family: "alpha".into(),
        n: 1,
        params,
        degree: t,
        order: pow_string(p, order),
        order_exponent: order,
        representative: Some(r0.fmt_elem(&poly_from_vector(&r0, &b0, &x))),
        cocycle: Some(r1.fmt_elem(&poly_from_vector(&r1, &b1, &dx))),
        certificate: cert,
    })
}

/// H^0(BP/p^∞) in degree t as a list of cyclic orders p^{e_i}.
pub fn h0_p_infinity(bp: &BpStructure, t: i64) -> Result<LocalGroup> {
    let p = bp.p;
    let model = bp.model();
    let (b0, b1) = (normalized_basis(p, bp.m, 0, t), normalized_basis(p, bp.m, 1, t));
    let d0 = differential_matrix(&model.cofaces(0)?, &b0, &b1)?;
    let smith = local_smith(p, &d0, b1.len(), b0.len())?;
    let mut torsion: Vec<u32> = smith.exponents.iter().copied().filter(|&e| e > 0).collect();
    torsion.sort_unstable();
    // Columns outside the rank give divisible summands Q/Z_(p).
    Ok(LocalGroup { p, torsion, free: b0.len() - smith.rank() })
}

/// Short exact sequences of the chromatic resolution used for connecting maps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChromaticSes {
    /// 0 -> BP_* -> p^{-1}BP_* -> BP_*/p^∞ -> 0.
    PInverse,
    /// 0 -> BP_*/p -> v_1^{-1}BP_*/p -> BP_*/(p, v_1^∞) -> 0.
    V1Inverse,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaImage<E> {
    pub s: usize,
    pub degree: i64,
    pub cocycle: Poly<E>,
    /// Order of the class as p^e; 0 for the zero class.
    pub order_exponent: u32,
}

fn coords<E: Clone>(zero: E, basis: &[Exps], f: &Poly<E>) -> Result<Vec<E>> {
    let index: HashMap<&Exps, usize> = basis.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let mut v = vec![zero; basis.len()];
    for (e, c) in f {
        let &i = index
            .get(e)
            .ok_or_else(|| Error::Precondition("element outside the normalized cobar complex".into()))?;
        v[i] = c.clone();
    }
    Ok(v)
}

/// Connecting map of [`ChromaticSes::PInverse`] on a cochain of C^s(BP/p^∞),
/// given as a rational polynomial in the slot ring (integral terms are zero).
pub fn connecting_delta_p(bp: &BpStructure, s: usize, x: &Poly<Q>) -> Result<DeltaImage<Q>> {
    let p = bp.p;
    let model = bp.model();
    let ring = model.ring(s);
    let frac: Poly<Q> = x
        .iter()
        .filter(|(_, c)| p_valuation(c, p).map_or(false, |v| v < 0))
        .map(|(e, c)| (e.clone(), c.clone()))
        .collect();
    let degree = ring
        .is_homogeneous(&frac)
        .ok_or_else(|| Error::Precondition("input is not homogeneous".into()))?;
    let cof = model.cofaces(s)?;
    let dx = cof.d(&frac)?;
    if !integral(p, &dx) {
        return Err(Error::Precondition("input is not a cocycle of BP/p^inf".into()));
    }
    if dx.is_empty() {
        return Ok(DeltaImage { s: s + 1, degree, cocycle: dx, order_exponent: 0 });
    }
    let bs = normalized_basis(p, bp.m, s, degree);
    let bn = normalized_basis(p, bp.m, s + 1, degree);
    let mat = differential_matrix(&cof, &bs, &bn)?;
    let smith = local_smith(p, &mat, bn.len(), bs.len())?;
    let y = coords(Q::zero(), &bn, &dx)?;
    let e = smith
        .order_exponent(&y)
        .ok_or_else(|| Error::Verification("torsion class expected".into()))?;
    Ok(DeltaImage { s: s + 1, degree, cocycle: dx, order_exponent: e })
}

/// Connecting map of [`ChromaticSes::V1Inverse`] on a cochain of
/// C^s(BP/(p, v_1^∞)), given over F_p with v_1 invertible.
pub fn connecting_delta_v1(bp: &BpStructure, s: usize, x: &Poly<u64>) -> Result<DeltaImage<u64>> {
    let p = bp.p;
    let model = bp.model_mod_p(&[1], &[])?;
    let ring = model.ring(s);
    let frac: Poly<u64> = x.iter().filter(|(e, _)| e[0] < 0).map(|(e, c)| (e.clone(), *c)).collect();
    let degree = ring
        .is_homogeneous(&frac)
        .ok_or_else(|| Error::Precondition("input is not homogeneous".into()))?;
    let cof = model.cofaces(s)?;
    let dx = cof.d(&frac)?;
    if dx.keys().any(|e| e[0] < 0) {
        return Err(Error::Precondition("input is not a cocycle of BP/(p, v1^inf)".into()));
    }
    if dx.is_empty() {
        return Ok(DeltaImage { s: s + 1, degree, cocycle: dx, order_exponent: 0 });
    }
    let plain = bp.model_mod_p(&[], &[])?;
    let pcof = plain.cofaces(s)?;
    let bs = normalized_basis(p, bp.m, s, degree);
    let bn = normalized_basis(p, bp.m, s + 1, degree);
    let mat = differential_matrix(&pcof, &bs, &bn)?;
    let y = coords(0u64, &bn, &dx)?;
    let field = &plain.base;
    let rows_t: Vec<Vec<u64>> = transpose(&mat, bs.len());
    let rk = field_rank(field, rows_t.clone(), bn.len());
    let mut aug = rows_t;
    aug.push(y);
    let rk2 = field_rank(field, aug, bn.len());
    Ok(DeltaImage { s: s + 1, degree, cocycle: dx, order_exponent: u32::from(rk2 > rk) })
}

fn transpose<E: Clone>(mat: &[Vec<E>], cols: usize) -> Vec<Vec<E>> {
    (0..cols).map(|j| mat.iter().map(|row| row[j].clone()).collect()).collect()
}

/// I_n-torsion comodules accepted by [`localize_comodule`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TorsionComodule {
    /// BP_*.
    Free,
    /// BP_*/(p^e).
    PPower(u32),
    /// BP_*/(p, v_1^e).
    PV1Power(u32),
}

/// v_n^{-1}M with coaction psi(a/v_n^k) = eta_R(v_n)^{-k} eta_R(a).
#[derive(Clone, Debug)]
pub struct LocalizedComodule {
    pub p: u64,
    pub n: usize,
    pub module: TorsionComodule,
    /// Coefficients Z/p^e with v_n inverted (and v_1 capped for n = 2).
    pub ring: PolyRing<IntegersModPk>,
    eta: Vec<Poly<u64>>,
    pub max_terms: usize,
}

pub fn localize_comodule(bp: &BpStructure, module: TorsionComodule, n: usize) -> Result<LocalizedComodule> {
    let p = bp.p;
    let (coeff_exp, cap) = match (n, module) {
        (1, TorsionComodule::PPower(e)) if e >= 1 => (e, None),
        (2, TorsionComodule::PV1Power(e)) if e >= 1 => (1, Some(e as i32)),
        (_, TorsionComodule::Free) => {
            return Err(Error::Precondition(format!("BP_* is not I_{n}-torsion")));
        }
        _ => {
            return Err(Error::Precondition(format!("{module:?} is not I_{n}-torsion with v_{n} acting")));
        }
    };
    if n > bp.m {
        return Err(Error::Precondition(format!("v_{n} outside the window")));
    }
    let base = IntegersModPk::new(p, coeff_exp)?;
    let mut ring = slot_ring(base.clone(), p, bp.m, 1).with_laurent(v_index(n));
    if let Some(c) = cap {
        ring = ring.with_cap(v_index(1), c);
    }
    let modulus = base.modulus;
    let eta = bp
        .eta_r
        .iter()
        .map(|x| reduce_poly(x, modulus).map(|r| ring.map_coeffs(&r, &ring, |c| *c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(LocalizedComodule { p, n, module, ring, eta, max_terms: 4096 })
}

fn binomial(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

impl LocalizedComodule {
    pub fn v(&self, i: usize) -> Poly<u64> {
        self.ring.var(v_index(i))
    }

    pub fn t(&self, j: usize) -> Poly<u64> {
        let m = self.eta.len();
        self.ring.var(t_index(m, 1, j))
    }

    /// eta_R(a) for a polynomial in the v's.
    pub fn eta(&self, a: &Poly<u64>) -> Result<Poly<u64>> {
        let m = self.eta.len();
        let mut imgs = self.eta.clone();
        imgs.extend((1..=m).map(|j| self.t(j)));
        self.ring
            .substitute(a, &self.ring, &imgs, |c| *c)
            .ok_or_else(|| Error::Domain("eta_R of a non-invertible element".into()))
    }

    /// eta_R(v_n)^{-k} as v_n^{-k} sum_j C(k+j-1, j) (f/v_n)^j with
    /// f = v_n − eta_R(v_n); returns the value and the number of nonzero terms.
    pub fn inverse_power(&self, k: u32) -> Result<(Poly<u64>, usize)> {
        let ring = &self.ring;
        if k == 0 {
            return Ok((ring.one(), 1));
        }
        let vn = self.v(self.n);
        let vn_inv = ring.inv(&vn).expect("Laurent generator");
        let f = ring.sub(&vn, &self.eta[self.n - 1]);
        let ratio = ring.mul(&f, &vn_inv);
        let mut acc = ring.zero();
        let mut power = ring.one();
        let mut terms = 0;
        for j in 0..self.max_terms as u64 {
            if power.is_empty() {
                let lead = ring.pow(&vn_inv, k as u64);
                return Ok((ring.mul(&acc, &lead), terms));
            }
            let c = ring.base.from_bigint(&binomial(k as u64 + j - 1, j));
            let term = ring.scale(&power, &c);
            if !term.is_empty() {
                terms += 1;
            }
            acc = ring.add(&acc, &term);
            power = ring.mul(&power, &ratio);
        }
        Err(Error::Resource(format!("expansion did not terminate within {} terms", self.max_terms)))
    }

    /// The same inverse power, expanding eta_R(v_n)^{-1} first.
    pub fn inverse_power_iterated(&self, k: u32) -> Result<Poly<u64>> {
        let (inv1, _) = self.inverse_power(1)?;
        Ok(self.ring.pow(&inv1, k as u64))
    }

    /// psi(a / v_n^k).
    pub fn psi(&self, a: &Poly<u64>, k: u32) -> Result<Poly<u64>> {
        let (inv, _) = self.inverse_power(k)?;
        Ok(self.ring.mul(&inv, &self.eta(a)?))
    }
}

/// Result of the v_1-Bockstein search on v_2^s.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BocksteinResult {
    pub p: u64,
    pub s: i64,
    /// First Bockstein with d^step(v_2^s) ≠ 0; v_2^s/v_1^step survives.
    pub step: u32,
    /// Normalized cocycle of d^step in the cobar complex of v_2^{-1}BP/(p, v_1).
    pub value: String,
    pub coefficient: Option<u64>,
    pub v2_exponent: Option<i64>,
    pub h_index: Option<u32>,
    /// The corrected lift of v_2^s modulo (p, v_1^{step+1}).
    pub lift: String,
    pub v3_max: u32,
    pub stable: bool,
}

impl BocksteinResult {
    pub fn label(&self) -> String {
        match (self.coefficient, self.v2_exponent, self.h_index) {
            (Some(c), Some(e), Some(h)) => format!("{c} v2^{e} h{h}"),
            _ => self.value.clone(),
        }
    }
}

struct BocksteinRun {
    step: u32,
    value: Poly<u64>,
    lift: Poly<u64>,
}

fn bockstein_model(p: u64, budget: u32) -> Result<CobarModel<PrimeField>> {
    let (_, _, eta) = right_units(p, 3);
    let eta = eta.iter().map(|x| reduce_poly(x, p)).collect::<Result<_>>()?;
    Ok(CobarModel {
        p,
        m: 3,
        base: PrimeField::new(p)?,
        eta,
        delta: vec![],
        laurent: vec![v_index(2)],
        caps: vec![(v_index(1), budget as i32 + 1)],
    })
}

fn bockstein_run(model: &CobarModel<PrimeField>, s: i64, budget: u32, v3_max: u32) -> Result<BocksteinRun> {
    let p = model.p;
    let r0 = model.ring(0);
    let r1 = model.ring(1);
    let cof = model.cofaces(0)?;
    let (dv1, dv2, dv3) = (generator_degree(p, 1), generator_degree(p, 2), generator_degree(p, 3));
    let deg = s * dv2;
    let mono = |a: i32, b: i32, c: i32| r0.monomial(vec![a, b, c], 1);
    let b = cof.d(&mono(0, s as i32, 0))?;
    let mut ys = Vec::new();
    for c in 0..=v3_max as i64 {
        for a in 1..=budget as i64 {
            let rem = deg - a * dv1 - c * dv3;
            if rem % dv2 == 0 {
                ys.push(mono(a as i32, (rem / dv2) as i32, c as i32));
            }
        }
    }
    let dys: Vec<Poly<u64>> = ys.iter().map(|y| cof.d(y)).collect::<Result<_>>()?;
    let m = model.m;
    let t_deg = |e: &Exps| -> i64 { (1..=m).map(|j| e[t_index(m, 1, j)] as i64 * generator_degree(p, j)).sum() };
    let mut monos: Vec<Exps> = b.keys().chain(dys.iter().flat_map(|d| d.keys())).cloned().collect();
    monos.sort_by(|x, y| (x[0], std::cmp::Reverse(t_deg(x)), x).cmp(&(y[0], std::cmp::Reverse(t_deg(y)), y)));
    monos.dedup();
    let index: HashMap<&Exps, usize> = monos.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let nrows = monos.len();
    let to_sparse = |f: &Poly<u64>| -> Vec<(usize, u64)> {
        let mut v: Vec<(usize, u64)> = f.iter().map(|(e, c)| (index[e], *c)).collect();
        v.sort_unstable();
        v
    };
    let field = model.base.clone();
    let mut ech = SparseEchelon::new(field);
    for (i, d) in dys.iter().enumerate() {
        let mut v = to_sparse(d);
        v.push((nrows + i, 1));
        ech.insert(&v);
    }
    let reduced = ech.reduce(&to_sparse(&b));
    let real: Vec<&(usize, u64)> = reduced.iter().filter(|(i, _)| *i < nrows).collect();
    let Some(step) = real.iter().map(|(i, _)| monos[*i][0]).min() else {
        return Err(Error::Resource(format!("v2^{s} stays divisible through the budget {budget}")));
    };
    let mut value = Poly::new();
    for &&(i, c) in &real {
        if monos[i][0] == step {
            let mut e = monos[i].clone();
            e[0] = 0;
            r1.add_term(&mut value, e, c);
        }
    }
    let mut lift = mono(0, s as i32, 0);
    for &(i, c) in reduced.iter().filter(|(i, _)| *i >= nrows) {
        lift = r0.add(&lift, &r0.scale(&ys[i - nrows], &c));
    }
    Ok(BocksteinRun { step: step as u32, value, lift })
}

/// First nonvanishing v_1-Bockstein differential on v_2^s.
///
/// Corrections range over v_1·F_p[v_1, v_2^{±1}, v_3] with v_3-degree at most
/// `v3_max`; the truncation is enlarged until two consecutive answers agree.
pub fn v1_bockstein(p: u64, s: i64, budget: u32) -> Result<BocksteinResult> {
    if p < 3 || !is_prime(p) {
        return Err(Error::Precondition("v1_bockstein needs an odd prime".into()));
    }
    if s < 1 {
        return Err(Error::Precondition("s ≥ 1".into()));
    }
    let model = bockstein_model(p, budget)?;
    // t_1^{p^3} ≡ v_2^{p^2-p} t_1^p needs d(v_3^p); start above it.
    let mut v3_max = p as u32 + 1;
    let mut prev = bockstein_run(&model, s, budget, v3_max)?;
    let stable = loop {
        let next = bockstein_run(&model, s, budget, v3_max + 1)?;
        let same = next.step == prev.step && next.value == prev.value;
        prev = next;
        v3_max += 1;
        if same {
            break true;
        }
        if v3_max > 2 * p as u32 + 2 {
            break false;
        }
    };
    if !stable {
        return Err(Error::Resource(format!("Bockstein for v2^{s} did not stabilize in the v3 truncation")));
    }
    let r1 = model.ring(1);
    let (mut coefficient, mut v2_exponent, mut h_index) = (None, None, None);
    if prev.value.len() == 1 {
        let (e, c) = prev.value.iter().next().unwrap();
        let t1 = e[t_index(3, 1, 1)] as u64;
        let others = e.iter().enumerate().all(|(i, &x)| i == 1 || i == t_index(3, 1, 1) || x == 0);
        if others && t1 > 0 {
            let (h, rest) = p_adic_split(t1, p);
            if rest == 1 {
                coefficient = Some(*c);
                v2_exponent = Some(e[1] as i64);
                h_index = Some(h);
            }
        }
    }
    Ok(BocksteinResult {
        p,
        s,
        step: prev.step,
        value: r1.fmt_elem(&prev.value),
        coefficient,
        v2_exponent,
        h_index,
        lift: model.ring(0).fmt_elem(&prev.lift),
        v3_max,
        stable,
    })
}

/// a_0 = 1, a_i = p^i + p^{i−1} − 1.
pub fn a_sequence(p: u64, i: u32) -> u64 {
    if i == 0 {
        1
    } else {
        p.pow(i) + p.pow(i - 1) - 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BetaWindow {
    pub max_s: u64,
    pub max_degree: Option<i64>,
}

/// β_{s/j,k+1} = x_i^{s_0}/(p^{k+1} v_1^j) for s = p^i s_0.
///
/// For each (s, j) the listed k is the largest with p^k | j and
/// j ≤ a_{i−k}. Items the literal twin constraint a_{i−k−1} < j would drop
/// are kept and flagged; when `oracle_budget` is set their v_1-divisibility
/// is confirmed by [`v1_bockstein`].
pub fn beta_enumerate(p: u64, window: BetaWindow, oracle_budget: Option<u32>) -> Result<GreekTable> {
    if p < 3 || !is_prime(p) {
        return Err(Error::Precondition("beta family needs an odd prime".into()));
    }
    let a = |i: i64| -> u64 { if i < 0 { 0 } else { a_sequence(p, i as u32) } };
    let mut entries = Vec::new();
    let mut excluded = Vec::new();
    let mut oracle_cache: BTreeMap<u64, std::result::Result<u32, String>> = BTreeMap::new();
    for s in 1..=window.max_s {
        let (i, s0) = p_adic_split(s, p);
        for j in 1..=a(i as i64) {
            let k = (0..=i)
                .rev()
                .find(|&k| j % p.pow(k) == 0 && j <= a(i as i64 - k as i64))
                .expect("k = 0 always qualifies");
            let degree = 2 * s as i64 * (p * p - 1) as i64 - 2 * j as i64 * (p - 1) as i64;
            if window.max_degree.map_or(false, |d| degree > d) {
                continue;
            }
            let name = match (j, k) {
                (1, 0) => format!("beta_{s}"),
                (_, 0) => format!("beta_{{{s}/{j}}}"),
                _ => format!("beta_{{{s}/{j},{}}}", k + 1),
            };
            let mut params = BTreeMap::new();
            for (key, val) in [("s", s), ("j", j), ("k", k as u64), ("i", i as u64), ("s0", s0)] {
                params.insert(key.to_string(), val as i64);
            }
            let mut cert = BTreeMap::new();
            cert.insert("p_divides".into(), format!("{}^{k} | {j}", p));
            cert.insert("bound".into(), format!("{j} <= a_{} = {}", i - k, a(i as i64 - k as i64)));
            let lower = a(i as i64 - k as i64 - 1);
            let literal = lower < j;
            cert.insert(
                "literal_lower_bound".into(),
                format!("a_{} = {lower} < {j}: {}", i as i64 - k as i64 - 1, if literal { "holds" } else { "fails" }),
            );
            cert.insert("hypothesis".into(), if p >= 5 { "p >= 5".into() } else { "p = 3: divisibility only".into() });
            if !literal {
                let verdict = match oracle_budget {
                    None => "flagged; oracle not run".to_string(),
                    Some(budget) => {
                        let res = oracle_cache
                            .entry(s)
                            .or_insert_with(|| v1_bockstein(p, s as i64, budget).map(|r| r.step).map_err(|e| e.to_string()));
                        match res {
                            Ok(step) if *step as u64 >= j => format!("flagged; v1-divisibility {step} >= {j} confirms"),
                            Ok(step) => format!("flagged; v1-divisibility {step} < {j} contradicts"),
                            Err(e) => format!("flagged; oracle failed: {e}"),
                        }
                    }
                };
                cert.insert("oracle".into(), verdict);
            }
            let elem = GreekLetterElement {
                name,
                family: "beta".into(),
                n: 2,
                params,
                degree,
                order: pow_string(p, k as u32 + 1),
                order_exponent: k as u32 + 1,
                representative: Some(format!(
                    "x_{i}{}/({}v1^{j})",
                    if s0 > 1 { format!("^{s0}") } else { String::new() },
                    if k == 0 { "p".to_string() } else { format!("p^{} ", k + 1) }
                )),
                cocycle: None,
                certificate: cert,
            };
            let dropped = s0 == 1 && k == 0 && i >= 2 && p.pow(i) < j;
            if dropped {
                excluded.push(elem);
            } else {
                entries.push(elem);
            }
        }
    }
    Ok(GreekTable { prime: p, family: "beta".into(), entries, excluded })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct E1Entry {
    pub degree: i64,
    pub group: String,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct E1Cell {
    pub n: usize,
    pub q: usize,
    pub status: String,
    pub entries: Vec<E1Entry>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub symbol: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct E1Layout {
    pub prime: u64,
    pub t_max: i64,
    pub cells: Vec<E1Cell>,
}

impl E1Layout {
    pub fn cell(&self, n: usize, q: usize) -> Option<&E1Cell> {
        self.cells.iter().find(|c| c.n == n && c.q == q)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// E_1^{n,q} for n, q ≤ 2 in internal degrees 0..=t_max.
pub fn chromatic_e1_layout(p: u64, t_max: i64) -> Result<E1Layout> {
    let bp = bp_structure(p, t_max.max(generator_degree(p, 2)))?;
    let rational = cobar_cohomology_bp(&bp, BpCoefficients::Rational, 2, t_max, DEFAULT_MAX_CELL)?;
    let mut cells = Vec::new();
    for q in 0..=2 {
        let entries = rational
            .iter()
            .filter(|c| c.s == q && c.free > 0)
            .map(|c| E1Entry { degree: c.t, group: c.group.clone(), label: if c.t == 0 { "1".into() } else { String::new() } })
            .collect();
        cells.push(E1Cell { n: 0, q, status: "computed".into(), entries, symbol: None });
    }
    let mut alpha = Vec::new();
    let mut k = 1;
    while greek_degree(1, k, p) <= t_max {
        let a = alpha_family(&bp, k as u64)?;
        alpha.push(E1Entry { degree: a.degree, group: format!("Z/{}", a.order), label: a.name });
        k += 1;
    }
    cells.push(E1Cell { n: 1, q: 0, status: "computed".into(), entries: alpha, symbol: Some("t <= 0: 1/p^j v1^k, symbolic".into()) });
    for q in 1..=2 {
        cells.push(E1Cell { n: 1, q, status: "symbolic".into(), entries: vec![], symbol: Some(format!("H^{q}(v1^-1 BP/p^inf)")) });
    }
    let max_s = (t_max / (2 * (p * p - 1) as i64)) as u64 + 1;
    let beta = beta_enumerate(p, BetaWindow { max_s, max_degree: Some(t_max) }, None)?;
    let entries = beta
        .entries
        .iter()
        .map(|b| E1Entry { degree: b.degree, group: format!("Z/{}", b.order), label: b.name.clone() })
        .collect();
    cells.push(E1Cell { n: 2, q: 0, status: "computed".into(), entries, symbol: Some("negative degrees: 1/p^{k+1} v1^j, symbolic".into()) });
    for q in 1..=2 {
        cells.push(E1Cell { n: 2, q, status: "symbolic".into(), entries: vec![], symbol: Some(format!("H^{q}(v2^-1 BP/I_2^inf)")) });
    }
    Ok(E1Layout { prime: p, t_max, cells })
}
