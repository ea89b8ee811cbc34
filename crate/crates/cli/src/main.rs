use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use chromalg::arith::{Rationals, Ring};
use chromalg::bp::{
    alpha_family, beta_enumerate, bp_structure, chromatic_e1_layout, generator_degree, greek_degree, BetaWindow,
    GreekTable,
};
use chromalg::fgl::{
    height, honda_rational, landweber_check, law_from_json, p_typicalize, reduce_mod_p, reduce_poly_mod_p,
    universal_p_typical, FormalGroupLaw, Generators, GradedPresentation, QPoly,
};
use chromalg::morava::{
    cocycle_eval, g1_cohomology_with_ceiling, parse_element, to_power_series, CocycleName, CocycleSpec, EndRing,
    HondaLaw, DEFAULT_MAX_PRECISION, DET_BASIS,
};
use chromalg::steenrod::{
    cobar_cohomology, minimal_resolution_chart, vanishing_line_check, ChartOptions, Region, DEFAULT_MAX_BASIS,
};
use chromalg::validate;
use chromalg::Error;

#[derive(Parser)]
#[command(name = "chromalg", version, about = "Exact computations in chromatic homotopy theory")]
struct Cli {
    /// Flat key=value file supplying flag defaults; explicit flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write the JSON document to this path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Adams E2 charts for the mod 2 Steenrod algebra.
    #[command(subcommand)]
    Ext(ExtCmd),
    /// Formal group laws.
    #[command(subcommand)]
    Fgl(FglCmd),
    /// Greek letter elements and the chromatic E1 term.
    #[command(subcommand)]
    Greek(GreekCmd),
    /// The Morava stabilizer group.
    #[command(subcommand)]
    Morava(MoravaCmd),
    /// Acceptance checks.
    #[command(subcommand)]
    Validate(ValidateCmd),
}

#[derive(Subcommand)]
enum ExtCmd {
    /// Dimensions, names and products over a window.
    Chart(ChartArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Minres,
    Cobar,
}

#[derive(Args)]
struct ChartArgs {
    #[arg(long, default_value_t = 2)]
    prime: u64,
    #[arg(long, default_value_t = 14)]
    max_stem: u32,
    /// Defaults to min(ceil(max_stem/2), 4).
    #[arg(long)]
    max_s: Option<u32>,
    /// Defaults to max_s + max_stem.
    #[arg(long)]
    max_t: Option<u32>,
    #[arg(long, value_enum, default_value_t = Method::Minres)]
    method: Method,
    /// Emit the SVG chart (next to --out, or on stdout).
    #[arg(long)]
    svg: bool,
    /// Fail with exit code 2 on vanishing-line violations.
    #[arg(long)]
    verify: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_BASIS)]
    max_basis: usize,
}

#[derive(Subcommand)]
enum FglCmd {
    /// The n-series [n](x), n defaulting to the prime.
    PSeries(PSeriesArgs),
    /// Cartier p-typicalization with v-values.
    Typicalize(LawArgs),
    /// Height of the reduction mod p.
    Height(HeightArgs),
    /// Regularity of p, v1, v2, ... for a theory.
    Landweber(LandweberArgs),
}

#[derive(Args)]
struct LawArgs {
    /// additive, multiplicative, honda:N, universal or file:PATH
    #[arg(long)]
    law: String,
    #[arg(long)]
    prime: u64,
    #[arg(long)]
    trunc: Option<u32>,
}

#[derive(Args)]
struct PSeriesArgs {
    #[command(flatten)]
    law: LawArgs,
    #[arg(long, allow_hyphen_values = true)]
    n: Option<i64>,
    /// Reduce coefficients mod p first.
    #[arg(long)]
    mod_p: bool,
}

#[derive(Args)]
struct HeightArgs {
    #[command(flatten)]
    law: LawArgs,
    #[arg(long, default_value_t = 10)]
    bound: u32,
}

#[derive(Args)]
struct LandweberArgs {
    /// K, En:N or Fp
    #[arg(long)]
    theory: String,
    #[arg(long)]
    prime: u64,
}

#[derive(Subcommand)]
enum GreekCmd {
    /// The alpha family in H^1(BP_*).
    Alpha(AlphaArgs),
    /// Beta family enumeration.
    Beta(BetaArgs),
    /// Chromatic E1 term dimensions by (n, q).
    Layout(LayoutArgs),
}

#[derive(Args)]
struct AlphaArgs {
    #[arg(long)]
    prime: u64,
    /// Defaults to 2p.
    #[arg(long)]
    max_k: Option<u64>,
}

#[derive(Args)]
struct BetaArgs {
    #[arg(long)]
    prime: u64,
    #[arg(long, default_value_t = 6)]
    max_s: u64,
    /// Upper bound on the internal degree.
    #[arg(long)]
    max_t: Option<i64>,
    /// Bockstein budget for confirming flagged entries.
    #[arg(long)]
    oracle_budget: Option<u32>,
}

#[derive(Args)]
struct LayoutArgs {
    #[arg(long)]
    prime: u64,
    /// Defaults to |v2| = 2(p^2 - 1).
    #[arg(long)]
    max_t: Option<i64>,
}

#[derive(Subcommand)]
enum MoravaCmd {
    /// Product of two elements of End(Γ_n).
    Mul(MulArgs),
    /// The automorphism series of a unit.
    Series(ElemArgs),
    /// Determinant in W(F_{p^n}).
    Det(ElemArgs),
    /// Evaluate one of the 1-cocycles zeta, tau1, tau2, sigma.
    Cocycle(CocycleArgs),
    /// H^*(G_1; Z/p^inf(t)).
    G1(G1Args),
}

#[derive(Args)]
struct RingArgs {
    #[arg(long, visible_alias = "p", default_value_t = 5)]
    prime: u64,
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Witt precision K (coefficients mod p^K).
    #[arg(long, default_value_t = 3)]
    precision: u32,
}

#[derive(Args)]
struct MulArgs {
    #[command(flatten)]
    ring: RingArgs,
    a: String,
    b: String,
}

#[derive(Args)]
struct ElemArgs {
    #[command(flatten)]
    ring: RingArgs,
    #[arg(long)]
    elem: String,
    /// Series truncation; defaults to p^n + 1.
    #[arg(long)]
    trunc: Option<u32>,
}

#[derive(Args)]
struct CocycleArgs {
    #[command(flatten)]
    ring: RingArgs,
    /// zeta, tau1, tau2 or sigma
    #[arg(long)]
    name: String,
    #[arg(long)]
    elem: String,
}

#[derive(Args)]
struct G1Args {
    #[arg(long)]
    prime: u64,
    #[arg(long, allow_hyphen_values = true)]
    t: i64,
    #[arg(long, default_value_t = 4)]
    precision: u32,
    #[arg(long, default_value_t = DEFAULT_MAX_PRECISION)]
    max_precision: u32,
}

#[derive(Subcommand)]
enum ValidateCmd {
    /// Every acceptance criterion, one line each.
    All,
}

/// What a command produced; `failure` is reported after the output is written.
struct Output {
    text: String,
    json: Value,
    svg: Option<String>,
    failure: Option<Error>,
}

impl Output {
    fn ok(text: String, json: Value) -> Self {
        Output { text, json, svg: None, failure: None }
    }
}

fn main() -> ExitCode {
    let args = match expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => return report(&e),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(4),
            };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            if let Some(out) = &cli.out {
                remove_outputs(out);
            }
            report(&e)
        }
    }
}

fn report(e: &anyhow::Error) -> ExitCode {
    eprintln!("error: {e:#}");
    ExitCode::from(exit_code(e))
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Verification(_)) => 2,
        Some(Error::Resource(_)) => 3,
        Some(Error::Parse(_)) => 4,
        _ => 1,
    }
}

/// Splices `--key value` pairs from the config file into the arguments,
/// skipping keys already given on the command line.
fn expand_config(mut args: Vec<String>) -> anyhow::Result<Vec<String>> {
    let Some(pos) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(args);
    };
    let path = if let Some(p) = args[pos].strip_prefix("--config=") {
        let p = p.to_string();
        args.remove(pos);
        p
    } else {
        args.remove(pos);
        if pos >= args.len() {
            return Err(Error::Parse("--config needs a path".into()).into());
        }
        args.remove(pos)
    };
    let text = fs::read_to_string(&path).with_context(|| format!("reading config {path}"))?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("{path}:{}: expected key=value", lineno + 1)))?;
        let flag = format!("--{}", key.trim().replace('_', "-"));
        let value = value.trim();
        if args.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}="))) {
            continue;
        }
        match value {
            "true" => args.push(flag),
            "false" => {}
            v => {
                args.push(flag);
                args.push(v.to_string());
            }
        }
    }
    Ok(args)
}

fn svg_path(out: &Path) -> PathBuf {
    out.with_extension("svg")
}

fn remove_outputs(out: &Path) {
    let _ = fs::remove_file(out);
    let _ = fs::remove_file(svg_path(out));
}

fn execute(cli: &Cli) -> anyhow::Result<ExitCode> {
    let output = match &cli.cmd {
        Cmd::Ext(ExtCmd::Chart(a)) => ext_chart(a)?,
        Cmd::Fgl(c) => fgl(c)?,
        Cmd::Greek(c) => greek(c)?,
        Cmd::Morava(c) => morava(c)?,
        Cmd::Validate(ValidateCmd::All) => validate_all()?,
    };
    let doc = serde_json::to_string_pretty(&output.json)? + "\n";
    if let Some(out) = &cli.out {
        remove_outputs(out);
        fs::write(out, &doc).with_context(|| format!("writing {}", out.display()))?;
        if let Some(svg) = &output.svg {
            fs::write(svg_path(out), svg)?;
        }
    }
    if cli.json {
        print!("{doc}");
    } else if let (Some(svg), None) = (&output.svg, &cli.out) {
        print!("{svg}");
    } else {
        println!("{}", output.text.trim_end());
    }
    match output.failure {
        Some(f) => {
            let e = anyhow::Error::from(f);
            eprintln!("error: {e}");
            Ok(ExitCode::from(exit_code(&e)))
        }
        None => Ok(ExitCode::SUCCESS),
    }
}

fn ext_chart(a: &ChartArgs) -> anyhow::Result<Output> {
    if a.prime != 2 {
        bail!(Error::Unsupported("Ext charts are computed at p = 2 only".into()));
    }
    let s_max = a.max_s.unwrap_or_else(|| a.max_stem.div_ceil(2).min(4));
    let t_max = a.max_t.unwrap_or(s_max + a.max_stem);
    let region = Region { s_max, t_max, max_stem: Some(a.max_stem) };
    let opts = ChartOptions { max_basis: a.max_basis, ..ChartOptions::default() };
    let chart = match a.method {
        Method::Minres => minimal_resolution_chart(&[region], opts)?.0,
        Method::Cobar => cobar_cohomology(&[region], opts)?,
    };
    let violations = vanishing_line_check(&chart);
    let mut text = format!("# s t dim over s <= {s_max}, t <= {t_max}, stem <= {}\n", a.max_stem);
    text.push_str(&chart.dimension_table());
    for c in chart.cells.iter().filter(|c| !c.names.is_empty()) {
        text.push_str(&format!("({},{}) {}\n", c.s, c.t, c.names.join(", ")));
    }
    for v in &violations {
        text.push_str(&format!("violation at ({},{}): {}\n", v.s, v.t, v.rule));
    }
    let json = json!({
        "command": "ext chart",
        "chart": serde_json::to_value(&chart)?,
        "dimension_table": chart.dimension_table(),
        "violations": serde_json::to_value(&violations)?,
    });
    let failure = (a.verify && !violations.is_empty())
        .then(|| Error::Verification(format!("{} vanishing-line violations", violations.len())));
    Ok(Output { text, json, svg: a.svg.then(|| chart.to_svg()), failure })
}

enum Law {
    Q(FormalGroupLaw<Rationals>),
    V(FormalGroupLaw<QPoly>),
}

fn law_trunc(sel: &str, p: u64, trunc: Option<u32>) -> u32 {
    if let Some(t) = trunc {
        return t;
    }
    match sel.strip_prefix("honda:").and_then(|n| n.parse::<u32>().ok()) {
        Some(n) => p.saturating_pow(n).min(u32::MAX as u64 - 1) as u32 + 1,
        None => 10,
    }
}

fn build_law(a: &LawArgs) -> anyhow::Result<Law> {
    let p = a.prime;
    if !chromalg::arith::is_prime(p) {
        bail!(Error::Domain(format!("{p} is not prime")));
    }
    let t = law_trunc(&a.law, p, a.trunc);
    let law = match a.law.as_str() {
        "additive" => Law::Q(FormalGroupLaw::additive(&Rationals, t)),
        "multiplicative" => Law::Q(FormalGroupLaw::multiplicative(&Rationals, t)),
        "universal" => Law::V(universal_p_typical(p, 2 * t.saturating_sub(2), Generators::Araki)?.law),
        s if s.starts_with("honda:") => {
            let n: usize = s[6..].parse().map_err(|_| Error::Parse(format!("bad height in {s}")))?;
            if n == 0 {
                bail!(Error::Parse("honda:N needs N >= 1".into()));
            }
            Law::Q(honda_rational(p, n, t)?)
        }
        s if s.starts_with("file:") => {
            let text = fs::read_to_string(&s[5..]).with_context(|| format!("reading {}", &s[5..]))?;
            let v: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
            Law::Q(law_from_json(&v)?)
        }
        s => bail!(Error::Parse(format!("unknown law selector {s}"))),
    };
    Ok(law)
}

fn series_json<R: Ring>(s: &chromalg::series::Series<R>) -> Value {
    let coeffs: std::collections::BTreeMap<String, String> =
        s.coeffs.iter().map(|(e, c)| (e.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(","), s.ring.fmt_elem(c))).collect();
    json!({ "trunc": s.trunc, "variables": s.vars, "text": s.fmt(), "coefficients": coeffs })
}

fn fgl(c: &FglCmd) -> anyhow::Result<Output> {
    match c {
        FglCmd::PSeries(a) => {
            let p = a.law.prime;
            let n = a.n.unwrap_or(p as i64);
            let law = build_law(&a.law)?;
            let (series, law_json) = match (&law, a.mod_p) {
                (Law::Q(f), false) => (series_json(&f.n_series(n)?), f.to_json()),
                (Law::Q(f), true) => {
                    let g = reduce_mod_p(f, p)?;
                    (series_json(&g.n_series(n)?), g.to_json())
                }
                (Law::V(f), false) => (series_json(&f.n_series(n)?), f.to_json()),
                (Law::V(f), true) => {
                    let g = reduce_poly_mod_p(f, p)?;
                    (series_json(&g.n_series(n)?), g.to_json())
                }
            };
            let text = format!("[{n}](x) = {}", series["text"].as_str().unwrap_or(""));
            Ok(Output::ok(text, json!({ "command": "fgl p-series", "n": n, "law": law_json, "series": series })))
        }
        FglCmd::Typicalize(a) => {
            let p = a.prime;
            let (law, vs, iso, src) = match build_law(a)? {
                Law::Q(f) => {
                    let (g, e) = p_typicalize(&f, p)?;
                    let vs: Vec<String> = g.vs.iter().map(|v| v.to_string()).collect();
                    (g.law.to_json(), vs, series_json(&e.series), f.to_json())
                }
                Law::V(f) => {
                    let (g, e) = p_typicalize(&f, p)?;
                    let vs: Vec<String> = g.vs.iter().map(|v| f.ring().fmt_elem(v)).collect();
                    (g.law.to_json(), vs, series_json(&e.series), f.to_json())
                }
            };
            let mut text = format!("e(x) = {}\n", iso["text"].as_str().unwrap_or(""));
            for (i, v) in vs.iter().enumerate() {
                text.push_str(&format!("v{} = {v}\n", i + 1));
            }
            let json = json!({ "command": "fgl typicalize", "prime": p, "source": src, "law": law, "vs": vs, "isomorphism": iso });
            Ok(Output::ok(text, json))
        }
        FglCmd::Height(a) => {
            let p = a.law.prime;
            let h = match build_law(&a.law)? {
                Law::Q(f) => {
                    let mut g = reduce_mod_p(&f, p)?;
                    g.polynomial = f.polynomial;
                    height(&g, a.bound)?
                }
                Law::V(f) => height(&reduce_poly_mod_p(&f, p)?, a.bound)?,
            };
            let json = json!({ "command": "fgl height", "law": a.law.law, "prime": p, "bound": a.bound, "height": h.to_string() });
            Ok(Output::ok(h.to_string(), json))
        }
        FglCmd::Landweber(a) => {
            let p = a.prime;
            let (pres, vs, n_max) = match a.theory.as_str() {
                "K" => (GradedPresentation::k_theory(p), vec![chromalg::fgl::k_theory_v1(p)?], 1),
                "Fp" => (GradedPresentation::prime_field(p), vec![], 1),
                s if s.starts_with("En:") => {
                    let n: usize = s[3..].parse().map_err(|_| Error::Parse(format!("bad height in {s}")))?;
                    if n == 0 {
                        bail!(Error::Parse("En:N needs N >= 1".into()));
                    }
                    let pres = GradedPresentation::johnson_wilson(p, n);
                    let ring = pres.ring();
                    let vs = (0..n).map(|i| ring.var(i)).collect();
                    (pres, vs, n)
                }
                s => bail!(Error::Parse(format!("unknown theory {s}"))),
            };
            let r = landweber_check(&pres, &vs, n_max)?;
            let mut text = String::new();
            for s in &r.steps {
                let verdict = if s.regular { "regular" } else { "zero divisor" };
                text.push_str(&format!("v{} = {}: {verdict} ({})\n", s.index, s.element, s.note));
            }
            text.push_str(&r.summary);
            Ok(Output::ok(text, json!({ "command": "fgl landweber", "theory": a.theory, "prime": p, "report": serde_json::to_value(&r)? })))
        }
    }
}

fn greek_text(t: &GreekTable) -> String {
    let mut text = String::new();
    for e in &t.entries {
        text.push_str(&format!("{} degree {} order {}\n", e.name, e.degree, e.order));
    }
    for e in &t.excluded {
        text.push_str(&format!("excluded {} degree {}\n", e.name, e.degree));
    }
    text
}

fn greek(c: &GreekCmd) -> anyhow::Result<Output> {
    match c {
        GreekCmd::Alpha(a) => {
            let p = a.prime;
            let max_k = a.max_k.unwrap_or(2 * p);
            if max_k == 0 {
                bail!(Error::Precondition("--max-k must be positive".into()));
            }
            let bp = bp_structure(p, greek_degree(1, max_k as i64, p))?;
            let entries = (1..=max_k).map(|k| alpha_family(&bp, k)).collect::<chromalg::Result<Vec<_>>>()?;
            let table = GreekTable { prime: p, family: "alpha".into(), entries, excluded: vec![] };
            let orders: Vec<&str> = table.entries.iter().map(|e| e.order.as_str()).collect();
            let text = format!("{}orders: {}", greek_text(&table), orders.join(","));
            Ok(Output::ok(text, serde_json::from_str(&table.to_json())?))
        }
        GreekCmd::Beta(a) => {
            let window = BetaWindow { max_s: a.max_s, max_degree: a.max_t };
            let table = beta_enumerate(a.prime, window, a.oracle_budget)?;
            Ok(Output::ok(greek_text(&table), serde_json::from_str(&table.to_json())?))
        }
        GreekCmd::Layout(a) => {
            let t_max = a.max_t.unwrap_or(generator_degree(a.prime, 2));
            let layout = chromatic_e1_layout(a.prime, t_max)?;
            let mut text = String::new();
            for c in &layout.cells {
                let mut parts: Vec<String> = c.entries.iter().map(|e| format!("{} in degree {}", e.label, e.degree)).collect();
                if parts.is_empty() && c.status == "computed" {
                    parts.push(format!("0 through degree {t_max}"));
                }
                if let Some(sym) = &c.symbol {
                    parts.push(sym.clone());
                }
                text.push_str(&format!("E1^({},{}) {}: {}\n", c.n, c.q, c.status, parts.join("; ")));
            }
            Ok(Output::ok(text, serde_json::from_str(&layout.to_json())?))
        }
    }
}

fn ring(a: &RingArgs) -> anyhow::Result<EndRing> {
    Ok(EndRing::new(a.prime, a.n, a.precision)?)
}

fn ring_meta(r: &EndRing) -> Value {
    json!({ "p": r.p, "n": r.n, "precision": r.k, "witt_generator": "w", "basis": DET_BASIS })
}

fn morava(c: &MoravaCmd) -> anyhow::Result<Output> {
    match c {
        MoravaCmd::Mul(a) => {
            let r = ring(&a.ring)?;
            let x = parse_element(&r, &a.a)?;
            let y = parse_element(&r, &a.b)?;
            let z = r.mul(&x, &y)?;
            let json = json!({ "command": "morava mul", "ring": ring_meta(&r), "a": r.to_json(&x), "b": r.to_json(&y), "product": r.to_json(&z) });
            Ok(Output::ok(r.format(&z), json))
        }
        MoravaCmd::Series(a) => {
            let r = ring(&a.ring)?;
            let e = parse_element(&r, &a.elem)?;
            let trunc = a.trunc.unwrap_or(a.ring.prime.pow(a.ring.n as u32) as u32 + 1);
            let law = HondaLaw::new(r.p, r.n, trunc)?;
            let s = to_power_series(&r, &law, &e)?;
            let text = s.series.fmt();
            Ok(Output::ok(text, json!({ "command": "morava series", "ring": ring_meta(&r), "element": r.to_json(&e), "series": s.to_json() })))
        }
        MoravaCmd::Det(a) => {
            let r = ring(&a.ring)?;
            let e = parse_element(&r, &a.elem)?;
            let d = r.determinant(&e)?;
            let as_int = r.determinant_integer(&e).ok();
            let text = match as_int {
                Some(v) => format!("{v} (mod {})", r.witt.pk),
                None => r.witt.fmt_elem(&d),
            };
            let json = json!({
                "command": "morava det",
                "ring": ring_meta(&r),
                "element": r.to_json(&e),
                "determinant": r.witt.fmt_elem(&d),
                "determinant_integer": as_int,
            });
            Ok(Output::ok(text, json))
        }
        MoravaCmd::Cocycle(a) => {
            let r = ring(&a.ring)?;
            let name: CocycleName = a.name.parse()?;
            let spec = CocycleSpec::new(name, r.p);
            let e = parse_element(&r, &a.elem)?;
            let v = cocycle_eval(&r, &spec, &e)?;
            let f = &r.witt.field;
            let json = json!({
                "command": "morava cocycle",
                "ring": ring_meta(&r),
                "cocycle": serde_json::to_value(&spec)?,
                "element": r.to_json(&e),
                "value": f.fmt_elem(&v),
            });
            Ok(Output::ok(f.fmt_elem(&v), json))
        }
        MoravaCmd::G1(a) => {
            let g = g1_cohomology_with_ceiling(a.prime, a.t, a.precision, a.max_precision)?;
            let text = format!("H0 = {}\nH1 = {}", g.h0, g.h1);
            let mut json = serde_json::to_value(&g)?;
            json["command"] = json!("morava g1");
            Ok(Output::ok(text, json))
        }
    }
}

fn run_self(args: &[&str]) -> chromalg::Result<Vec<u8>> {
    let exe = std::env::current_exe().map_err(|e| Error::Verification(e.to_string()))?;
    let out = Command::new(exe).args(args).output().map_err(|e| Error::Verification(e.to_string()))?;
    if !out.status.success() {
        return Err(Error::Verification(format!("`{}` exited with {}", args.join(" "), out.status)));
    }
    Ok(out.stdout)
}

fn validate_all() -> anyhow::Result<Output> {
    let mut reports = validate::run_all();
    reports.push(validate::determinism(run_self));
    let text: Vec<String> = reports.iter().map(|r| r.line()).collect();
    let failed = reports.iter().filter(|r| !r.passed).count();
    let failure = (failed > 0).then(|| Error::Verification(format!("{failed} criteria failed")));
    Ok(Output { text: text.join("\n"), json: json!({ "command": "validate all", "criteria": reports }), svg: None, failure })
}
