//! Cross-module checks with pinned windows and time limits.
//!
//! Each check returns a [`CriterionReport`]; a check passes only if its
//! computation succeeds, every comparison holds exactly and it finishes
//! within its limit. The determinism check needs the command-line binary and
//! lives there.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{is_p_integral, rational_mod, PLocal, PrimeField, Rationals, Ring};
use crate::bp::{
    a_sequence, alpha_family, beta_enumerate, bp_structure, greek_degree, v1_bockstein, BetaWindow,
};
use crate::error::{Error, Result};
use crate::fgl::{
    height, honda, honda_rational, is_p_typical_log, logarithm, multiplicative_graded, p_typicalize, universal_p_typical,
    FormalGroupLaw, Generators, Height,
};
use crate::morava::{
    abelianization_s21, cocycle_eval, g1_cohomology, random_s21, sigma_coboundary_holds, to_power_series, CocycleName,
    CocycleSpec, EndRing, EndRingElement, HondaLaw,
};
use crate::poly::PolyRing;
use crate::series::Series;
use crate::steenrod::{
    cobar_dimensions, massey_product, minimal_resolution_chart, vanishing_line_check, ChartOptions, CobarComplex,
    CobarElement, MinimalResolution, Region, DEFAULT_MAX_BASIS,
};

/// Window of the vanishing-line check.
pub const VANISHING_WINDOW: Region = Region { s_max: 20, t_max: 36, max_stem: Some(16) };
/// Window on which the two Ext engines are compared.
pub const DUAL_WINDOW: (u32, u32) = (20, 19);
/// Window of the 2-line and 3-line checks.
pub const RELATIONS_WINDOW: Region = Region { s_max: 8, t_max: 24, max_stem: Some(16) };
/// Sample counts and seed for the randomized Morava checks.
pub const MORAVA_PAIRS: usize = 100;
pub const MORAVA_SEED: u64 = 0x5eed;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
    pub limit_secs: u64,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {} ({} ms, limit {} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed_ms,
            self.limit_secs,
            self.detail
        )
    }
}

/// (id, name, limit in seconds) for the library-side criteria.
pub const CRITERIA: [(u32, &str, u64); 11] = [
    (1, "Adams 1-line", 60),
    (2, "vanishing line", 120),
    (3, "2-line relations and c0", 120),
    (4, "minimal resolution vs cobar", 300),
    (5, "Massey bracket <h1,h0,h1>", 10),
    (6, "formal group law suite", 30),
    (7, "BP right units", 60),
    (8, "alpha family vs G1 cohomology", 300),
    (9, "v1-Bockstein", 300),
    (10, "beta enumeration bookkeeping", 10),
    (11, "Morava stabilizer group", 300),
];

/// Determinism of the command-line tool (run there).
pub const DETERMINISM: (u32, &str, u64) = (12, "CLI determinism", 60);

pub fn run(id: u32) -> Result<CriterionReport> {
    let &(_, name, limit) = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .ok_or_else(|| Error::Precondition(format!("no library criterion {id}")))?;
    let start = Instant::now();
    let outcome = match id {
        1 => adams_one_line(),
        2 => vanishing_line(),
        3 => two_line(),
        4 => dual_methods(),
        5 => massey(),
        6 => fgl_suite(),
        7 => bp_right_units(),
        8 => alpha_vs_g1(),
        9 => bockstein(),
        10 => beta(),
        _ => morava(),
    };
    Ok(finish(id, name, limit, start.elapsed(), outcome))
}

pub fn run_all() -> Vec<CriterionReport> {
    CRITERIA.iter().map(|c| run(c.0).expect("listed criterion")).collect()
}

pub fn finish(id: u32, name: &str, limit: u64, elapsed: Duration, outcome: Result<String>) -> CriterionReport {
    let over = elapsed > Duration::from_secs(limit);
    let (passed, detail) = match outcome {
        Ok(d) if over => (false, format!("{d}; exceeded time limit")),
        Ok(d) => (true, d),
        Err(e) => (false, e.to_string()),
    };
    CriterionReport { id, name: name.into(), passed, detail, elapsed_ms: elapsed.as_millis(), limit_secs: limit }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Verification(msg()))
    }
}

fn adams_one_line() -> Result<String> {
    let res = MinimalResolution::compute(1, 20, DEFAULT_MAX_BASIS)?;
    let nonzero: Vec<u32> = (1..=20).filter(|&t| res.ext_dim(1, t) > 0).collect();
    for t in 1..=20u32 {
        let want = usize::from(t.is_power_of_two());
        ensure(res.ext_dim(1, t) == want, || format!("Ext^(1,{t}) has dimension {}", res.ext_dim(1, t)))?;
    }
    Ok(format!("Ext^1 nonzero exactly at t = {nonzero:?}, each F2"))
}

fn vanishing_line() -> Result<String> {
    let (chart, _) = minimal_resolution_chart(&[VANISHING_WINDOW], ChartOptions::default())?;
    let v = vanishing_line_check(&chart);
    ensure(v.is_empty(), || format!("{} violations, first at ({},{}): {}", v.len(), v[0].s, v[0].t, v[0].rule))?;
    // the check must be able to fail
    let planted = vanishing_line_check(&chart.with_injected_class(4, 5, "planted"));
    ensure(planted.len() == 1, || "planted class at (4,5) not reported".into())?;
    let cells = chart.cells.iter().filter(|c| c.dim > 0).count();
    Ok(format!("0 violations over s<=20, t-s<=16 ({cells} nonzero cells); planted defect caught"))
}

fn two_line() -> Result<String> {
    let (chart, _) = minimal_resolution_chart(&[RELATIONS_WINDOW], ChartOptions::default())?;
    for i in 0..3u32 {
        let (a, b) = (format!("h{i}"), format!("h{}", i + 1));
        ensure(chart.product(&a, &b) == Some(vec![]), || format!("{a}{b} != 0"))?;
    }
    for i in 0..4u32 {
        for j in 0..4u32 {
            let (a, b) = (format!("h{i}"), format!("h{j}"));
            ensure(chart.product(&a, &b) == chart.product(&b, &a), || format!("{a}{b} != {b}{a}"))?;
        }
    }
    let mut two_line = 0;
    for c in chart.cells.iter().filter(|c| c.s == 2 && c.dim > 0) {
        ensure(c.names.len() == c.dim && c.names.iter().all(|n| n.starts_with('h')), || {
            format!("2-line cell ({},{}) not spanned by h_i h_j: {:?}", c.s, c.t, c.names)
        })?;
        two_line += c.dim;
    }
    ensure(chart.names(3, 11) == vec!["c0".to_string()], || "c0 missing at (3,11)".into())?;
    let mut cx = CobarComplex::new(12);
    let (h0, h1, h2) = (CobarElement::h(0), CobarElement::h(1), CobarElement::h(2));
    let c0 = massey_product(&mut cx, &h1, &h0, &h2.pow(2))?;
    ensure((c0.s, c0.t) == (3, 11) && c0.is_nonzero(&mut cx)?, || "<h1,h0,h2^2> is zero".into())?;
    Ok(format!("{two_line} 2-line classes, all h_i h_j; h_i h_(i+1) = 0; c0 = <h1,h0,h2^2> != 0 at (3,11)"))
}

fn dual_methods() -> Result<String> {
    let (s_max, t_max) = DUAL_WINDOW;
    let res = MinimalResolution::compute(s_max, t_max, DEFAULT_MAX_BASIS)?;
    let dims = cobar_dimensions(s_max, t_max, DEFAULT_MAX_BASIS)?;
    for (&(s, t), &d) in &dims {
        ensure(res.ext_dim(s, t) == d, || format!("({s},{t}): minres {} vs cobar {d}", res.ext_dim(s, t)))?;
    }
    Ok(format!("{} cells agree on s<={s_max}, t<={t_max}", dims.len()))
}

fn massey() -> Result<String> {
    let mut cx = CobarComplex::new(8);
    let (h0, h1, h2) = (CobarElement::h(0), CobarElement::h(1), CobarElement::h(2));
    let m = massey_product(&mut cx, &h1, &h0, &h1)?;
    ensure(m.contains(&mut cx, &h0.product(&h2))?, || "h0h2 not in <h1,h0,h1>".into())?;
    ensure(m.is_nonzero(&mut cx)?, || "bracket is zero".into())?;
    Ok("<h1,h0,h1> contains h0h2 and is nonzero".into())
}

fn binomial(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::from(1), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

fn typicalize_holds<R: PLocal>(f: &FormalGroupLaw<R>, p: u64) -> Result<bool> {
    if !f.check_axioms()?.all_pass() {
        return Ok(false);
    }
    let (g, e) = p_typicalize(f, p)?;
    let (g2, e2) = p_typicalize(&g.law, p)?;
    Ok(g.law.check_axioms()?.all_pass()
        && is_p_typical_log(&logarithm(&g.law)?.series, p)
        && f.is_homomorphism_to(&g.law, &e.series)?
        && g2.law.series == g.law.series
        && e2.series == g.law.x1())
}

fn fgl_suite() -> Result<String> {
    // [p](x) of x + y + uxy is ((1+ux)^p − 1)/u
    for p in [2u64, 3, 5] {
        let f = multiplicative_graded(12, false);
        let ring = f.ring().clone();
        let want = Series::from_terms(
            &ring,
            &["x"],
            12,
            (1..=p).map(|k| {
                let c = ring.constant(BigRational::from_integer(binomial(p, k)));
                (vec![k as u32], ring.mul(&c, &ring.pow(&ring.var(0), k - 1)))
            }),
        );
        ensure(f.n_series(p as i64)? == want, || format!("[{p}](x) of the multiplicative law"))?;
    }
    for p in [2u64, 3, 5] {
        for n in 1..=3usize {
            let g = honda(p, n, p.pow(n as u32) as u32 + 1)?;
            let h = height(&g, n as u32 + 2)?;
            ensure(h == Height::Exact(n as u32), || format!("Honda({p},{n}) has {h}"))?;
        }
        let a = FormalGroupLaw::additive(&PrimeField::new(p)?, 12);
        ensure(height(&a, 10)? == Height::AtLeast(10), || "additive law height".into())?;
    }
    let q = |n: i64| BigRational::from_integer(n.into());
    let t = 10;
    let f1 = Series::from_terms(&Rationals, &["x"], t, [(vec![1], q(1)), (vec![2], q(1))]);
    let f2 = Series::from_terms(&Rationals, &["x"], t, [(vec![1], q(1)), (vec![2], q(-1)), (vec![3], q(3))]);
    let add = FormalGroupLaw::additive(&Rationals, t);
    let mult = FormalGroupLaw::multiplicative(&Rationals, t);
    let corpus: Vec<(FormalGroupLaw<Rationals>, u64)> = vec![
        (add.clone(), 3),
        (mult.clone(), 3),
        (mult.clone(), 2),
        (mult.conjugate(&f1)?, 3),
        (add.conjugate(&f2)?, 2),
        (honda_rational(3, 1, t)?, 3),
        (honda_rational(3, 2, t)?, 3),
        (honda_rational(2, 2, t)?, 2),
    ];
    let mut passed = 0;
    for (f, p) in &corpus {
        ensure(typicalize_holds(f, *p)?, || format!("p-typicalization of {} at {p}", f.name))?;
        passed += 1;
    }
    let graded: Vec<(FormalGroupLaw<PolyRing<Rationals>>, u64)> =
        vec![(multiplicative_graded(t, false), 3), (universal_p_typical(2, 14, Generators::Araki)?.law, 2)];
    for (f, p) in &graded {
        ensure(typicalize_holds(f, *p)?, || format!("p-typicalization of {} at {p}", f.name))?;
        passed += 1;
    }
    Ok(format!(
        "[p](x) = ((1+ux)^p-1)/u for p in 2,3,5; Honda heights exact for n<=3, p<=5; additive >= 10; \
         {passed} laws typicalize idempotently"
    ))
}

fn bp_window(p: u64) -> i64 {
    let p = p as i64;
    2 * (p * p - 1) + 2 * (p - 1)
}

fn bp_right_units() -> Result<String> {
    for p in [3u64, 5] {
        let bp = bp_structure(p, bp_window(p))?;
        let r = &bp.ring;
        let v1 = r.add(&bp.v(1), &r.mul(&r.from_int(p as i64), &bp.t(1)));
        ensure(bp.eta_r[0] == v1, || format!("eta_R(v1) at p = {p}"))?;
        let fp = PolyRing::new(PrimeField::new(p)?, &["v1", "v2", "t1", "t2"]);
        for e in &bp.eta_r {
            ensure(e.values().all(|c| is_p_integral(c, p)), || format!("eta_R not {p}-integral"))?;
        }
        let red = bp.ring.map_coeffs(&bp.eta_r[1], &fp, |c| rational_mod(c, p).unwrap_or(0));
        let (v1, v2, t1) = (fp.var(0), fp.var(1), fp.var(2));
        let want = fp.sub(&fp.add(&v2, &fp.mul(&v1, &fp.pow(&t1, p))), &fp.mul(&fp.pow(&v1, p), &t1));
        ensure(red == want, || format!("eta_R(v2) mod {p}"))?;
    }
    Ok("eta_R(v1) = v1 + p t1, eta_R(v2) = v2 + v1 t1^p - v1^p t1 mod p, integral (p = 3, 5)".into())
}

fn p_adic_order(p: u64, mut k: u64) -> u32 {
    let mut r = 0;
    while k % p == 0 {
        k /= p;
        r += 1;
    }
    r + 1
}

fn alpha_vs_g1() -> Result<String> {
    let mut compared = 0;
    for p in [3u64, 5] {
        let bp = bp_structure(p, greek_degree(1, 2 * p as i64, p))?;
        for k in 1..=2 * p * p {
            let want = p_adic_order(p, k);
            let g = g1_cohomology(p, (k * (p - 1)) as i64, 4)?;
            ensure(g.h0_order_exponent == Some(want) && g.h1_order_exponent == Some(0), || {
                format!("G1 cohomology at p = {p}, k = {k}: {} / {}", g.h0, g.h1)
            })?;
            if k <= 2 * p {
                let a = alpha_family(&bp, k)?;
                ensure(a.order_exponent == want, || format!("alpha_{k} at p = {p} has order {}", a.order))?;
                compared += 1;
            }
        }
    }
    Ok(format!("orders p^(r+1) for k <= 2p^2 via G1; {compared} alpha orders agree with G1"))
}

fn bockstein() -> Result<String> {
    for p in [3u64, 5] {
        for s in 1..p as i64 {
            let r = v1_bockstein(p, s, p as u32 + 2)?;
            ensure(
                r.step == 1 && r.coefficient == Some(s as u64) && r.v2_exponent == Some(s - 1) && r.h_index == Some(1),
                || format!("d1(v2^{s}) at p = {p} is {}", r.label()),
            )?;
        }
        let r = v1_bockstein(p, p as i64, p as u32 + 2)?;
        ensure(r.step > 1, || format!("d1(v2^{p}) nonzero at p = {p}"))?;
    }
    Ok("d1(v2^s) = s v2^(s-1) h1 for s < p; d1(v2^p) = 0 with a later nonzero differential (p = 3, 5)".into())
}

fn beta() -> Result<String> {
    for p in [3u64, 5] {
        ensure(
            [a_sequence(p, 0), a_sequence(p, 1), a_sequence(p, 2)] == [1, p, p * p + p - 1],
            || format!("a-sequence at p = {p}"),
        )?;
        let t = beta_enumerate(p, BetaWindow { max_s: 1, max_degree: None }, None)?;
        let b1 = t.entries.iter().find(|b| b.name == "beta_1").ok_or_else(|| Error::Verification("no beta_1".into()))?;
        let want = 2 * (p as i64 * p as i64 - 1) - 2 * (p as i64 - 1);
        ensure(b1.degree == want, || format!("beta_1 degree {} at p = {p}", b1.degree))?;
    }
    let t = beta_enumerate(5, BetaWindow { max_s: 25, max_degree: None }, None)?;
    let excluded: Vec<i64> = t.excluded.iter().filter(|b| b.params["s"] == 25).map(|b| b.params["j"]).collect();
    ensure(excluded == vec![26, 27, 28, 29], || format!("excluded j at s = 25: {excluded:?}"))?;
    let listed = t.entries.iter().filter(|b| b.params["s"] == 25).all(|b| b.params["j"] <= 25);
    ensure(listed, || "an entry with s = 25 has j > 25".into())?;
    Ok("a = 1, p, p^2+p-1; |beta_1| = 2(p^2-1)-2(p-1); s = 25 at p = 5 excludes j = 26..29".into())
}

fn morava() -> Result<String> {
    for (p, n) in [(3u64, 2usize), (5, 2), (3, 3)] {
        let r = EndRing::new(p, n, 3)?;
        ensure(r.pow(&r.s(), n as u64)? == r.from_int(p as i64), || format!("S^{n} != {p}"))?;
    }
    let r = EndRing::new(5, 2, 2)?;
    for x in 0..25 {
        for y in 0..25 {
            let a = r.from_witt(&[x, y]);
            let phi = r.from_witt(&r.witt.frobenius_lift(&[x, y]));
            ensure(r.mul(&r.s(), &a)? == r.mul(&phi, &r.s())?, || format!("S a != phi(a) S for a = {}", r.format(&a)))?;
        }
    }
    let law = HondaLaw::new(5, 2, 26)?;
    let mut rng = ChaCha8Rng::seed_from_u64(MORAVA_SEED);
    for _ in 0..MORAVA_PAIRS {
        let a = r.random_unit(&mut rng);
        let b = r.random_unit(&mut rng);
        let fa = to_power_series(&r, &law, &a)?.series;
        let fb = to_power_series(&r, &law, &b)?.series;
        let fab = to_power_series(&r, &law, &r.mul(&a, &b)?)?.series;
        ensure(law.compose(&fa, &fb)? == fab, || format!("series of {} * {}", r.format(&a), r.format(&b)))?;
    }
    let r3 = EndRing::new(5, 2, 3)?;
    let f = &r3.witt.field;
    let spec = CocycleSpec::new(CocycleName::Tau1, 5);
    let tau1 = |g: &EndRingElement| cocycle_eval(&r3, &spec, g);
    for _ in 0..MORAVA_PAIRS {
        let g = random_s21(&r3, &mut rng)?;
        let h = random_s21(&r3, &mut rng)?;
        ensure(sigma_coboundary_holds(&r3, &g, &h)?, || format!("d sigma at {} , {}", r3.format(&g), r3.format(&h)))?;
        let gh = r3.mul(&g, &h)?;
        let sum = f.add(&tau1(&g)?, &tau1(&h)?);
        ensure(tau1(&gh)? == sum, || "tau1 not additive".into())?;
    }
    let ab = abelianization_s21(5, 3)?;
    ensure(ab.stabilized && ab.tau1_isomorphism, || "abelianization not stabilized".into())?;
    ensure(ab.weights == vec![4, 20], || format!("weights {:?}", ab.weights))?;
    Ok(format!(
        "S^n = p; S a = phi(a) S on W(F25)/25; {MORAVA_PAIRS} series pairs compose; d sigma = -tau1 tau2 on \
         {MORAVA_PAIRS} pairs; abelianization weights (4, 20) stable from depth {}",
        ab.depth
    ))
}

/// Command lines (after the binary name) re-run by the determinism check.
pub const DETERMINISM_COMMANDS: &[&[&str]] = &[
    &["ext", "chart", "--max-stem", "8", "--json"],
    &["ext", "chart", "--max-stem", "8", "--method", "cobar", "--json"],
    &["ext", "chart", "--max-stem", "8", "--svg"],
    &["fgl", "p-series", "--law", "multiplicative", "--prime", "3", "--trunc", "10", "--json"],
    &["fgl", "typicalize", "--law", "multiplicative", "--prime", "5", "--trunc", "26", "--json"],
    &["fgl", "height", "--law", "honda:2", "--prime", "5", "--json"],
    &["fgl", "landweber", "--theory", "En:2", "--prime", "3", "--json"],
    &["greek", "alpha", "--prime", "5", "--max-k", "10", "--json"],
    &["greek", "beta", "--prime", "5", "--max-s", "6", "--json"],
    &["greek", "layout", "--prime", "3", "--json"],
    &["morava", "mul", "--n", "2", "--p", "3", "S", "S", "--json"],
    &["morava", "series", "--prime", "3", "--elem", "1 + w*S", "--json"],
    &["morava", "det", "--prime", "5", "--elem", "2 + S", "--json"],
    &["morava", "cocycle", "--name", "zeta", "--elem", "6", "--json"],
    &["morava", "g1", "--prime", "5", "--t", "20", "--json"],
];

/// Runs every command in [`DETERMINISM_COMMANDS`] twice through `run`, which
/// returns the bytes printed, and compares.
pub fn determinism(mut run: impl FnMut(&[&str]) -> Result<Vec<u8>>) -> CriterionReport {
    let (id, name, limit) = DETERMINISM;
    let start = Instant::now();
    let mut outcome = || -> Result<String> {
        let mut bytes = 0;
        for args in DETERMINISM_COMMANDS {
            let a = run(args)?;
            let b = run(args)?;
            ensure(a == b, || format!("`{}` differs between runs", args.join(" ")))?;
            ensure(!a.is_empty(), || format!("`{}` printed nothing", args.join(" ")))?;
            bytes += a.len();
        }
        Ok(format!("{} commands byte-identical across two runs ({bytes} bytes)", DETERMINISM_COMMANDS.len()))
    };
    let outcome = outcome();
    finish(id, name, limit, start.elapsed(), outcome)
}
