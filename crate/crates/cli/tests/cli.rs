use std::fs;
use std::process::{Command, Output};

fn chromalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chromalg")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = chromalg(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut a = args.to_vec();
    a.push("--json");
    serde_json::from_str(&stdout(&a)).unwrap()
}

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("chromalg-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn morava_examples() {
    assert_eq!(stdout(&["morava", "mul", "--n", "2", "--p", "3", "S", "S"]).trim(), "3");
    assert!(stdout(&["morava", "g1", "--prime", "5", "--t", "20"]).contains("H0 = Z/25"));
    assert_eq!(stdout(&["morava", "cocycle", "--name", "tau1", "--elem", "1"]).trim(), "0");
    let det = json(&["morava", "det", "--prime", "3", "--elem", "S"]);
    assert_eq!(det["determinant_integer"], 24);
    assert_eq!(det["ring"]["basis"], "1, S, ..., S^(n-1)");
    assert_eq!(stdout(&["morava", "series", "--prime", "3", "--elem", "1 + w*S"]).trim(), "x + w*x^3");
}

#[test]
fn greek_examples() {
    let out = stdout(&["greek", "alpha", "--prime", "5", "--max-k", "10"]);
    assert!(out.contains("orders: 5,5,5,5,25,5,5,5,5,25"));
    let beta = json(&["greek", "beta", "--prime", "5", "--max-s", "6"]);
    let b1 = beta["entries"].as_array().unwrap().iter().find(|e| e["name"] == "beta_1").unwrap();
    assert_eq!(b1["degree"], 40);
    let layout = json(&["greek", "layout", "--prime", "5"]);
    assert!(!layout["cells"].as_array().unwrap().is_empty());
}

#[test]
fn fgl_examples() {
    let out = stdout(&["fgl", "p-series", "--law", "multiplicative", "--prime", "3", "--trunc", "10"]);
    assert_eq!(out.trim(), "[3](x) = 3*x + 3*x^2 + x^3");
    assert_eq!(stdout(&["fgl", "height", "--law", "honda:2", "--prime", "5"]).trim(), "exact height 2");
    assert_eq!(stdout(&["fgl", "height", "--law", "additive", "--prime", "3"]).trim(), "height >= 10");
    let lw = json(&["fgl", "landweber", "--theory", "En:1", "--prime", "5"]);
    assert_eq!(lw["report"]["exact"], true);
    assert_eq!(lw["report"]["steps"].as_array().unwrap().len(), 2);
    let fp = json(&["fgl", "landweber", "--theory", "Fp", "--prime", "5"]);
    assert_eq!(fp["report"]["exact"], false);
}

#[test]
fn law_files_round_trip() {
    let doc = json(&["fgl", "p-series", "--law", "multiplicative", "--prime", "3", "--trunc", "8"]);
    let path = scratch("law.json");
    fs::write(&path, serde_json::to_string(&doc["law"]).unwrap()).unwrap();
    let sel = format!("file:{}", path.display());
    let out = stdout(&["fgl", "p-series", "--law", &sel, "--prime", "3"]);
    assert_eq!(out.trim(), "[3](x) = 3*x + 3*x^2 + x^3");
    fs::write(&path, "{\"trunc\": 4, \"coefficients\": {\"1\": \"1\"}}").unwrap();
    assert_eq!(chromalg(&["fgl", "p-series", "--law", &sel, "--prime", "3"]).status.code(), Some(4));
}

#[test]
fn ext_chart_single_cell_and_methods_agree() {
    let c = json(&["ext", "chart", "--max-stem", "0"]);
    assert_eq!(c["dimension_table"], "0 0 1\n");
    let minres = json(&["ext", "chart", "--max-stem", "14"]);
    let cobar = json(&["ext", "chart", "--max-stem", "14", "--method", "cobar"]);
    assert_eq!(minres["dimension_table"], cobar["dimension_table"]);
    let names: Vec<String> = cobar["chart"]["cells"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|c| c["names"].as_array().unwrap().iter().map(|n| n.as_str().unwrap().to_string()))
        .collect();
    for n in ["h0", "h1", "h2", "h3", "c0"] {
        assert!(names.iter().any(|m| m == n), "{n} missing");
    }
}

#[test]
fn chart_files_and_resource_ceiling() {
    let out = scratch("chart.json");
    let o = out.to_str().unwrap();
    stdout(&["ext", "chart", "--max-stem", "6", "--svg", "--verify", "--out", o]);
    assert!(fs::read_to_string(&out).unwrap().contains("\"method\": \"minres\""));
    let svg = fs::read_to_string(out.with_extension("svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    let r = chromalg(&["ext", "chart", "--max-stem", "14", "--max-basis", "10", "--svg", "--out", o]);
    assert_eq!(r.status.code(), Some(3));
    assert!(!out.exists() && !out.with_extension("svg").exists());
}

#[test]
fn exit_codes() {
    assert_eq!(chromalg(&["morava", "mul", "--p", "3", "S", "x"]).status.code(), Some(4));
    assert_eq!(chromalg(&["fgl", "height", "--law", "bogus", "--prime", "3"]).status.code(), Some(4));
    assert_eq!(chromalg(&["no-such-command"]).status.code(), Some(4));
    let g = chromalg(&["morava", "g1", "--prime", "5", "--t", "12500", "--precision", "2", "--max-precision", "4"]);
    assert_eq!(g.status.code(), Some(3));
    assert_eq!(chromalg(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_supplies_defaults() {
    let cfg = scratch("run.cfg");
    fs::write(&cfg, "# p-series run\nlaw = multiplicative\nprime = 3\ntrunc = 10\njson = false\n").unwrap();
    let c = cfg.to_str().unwrap();
    assert_eq!(stdout(&["fgl", "p-series", "--config", c]).trim(), "[3](x) = 3*x + 3*x^2 + x^3");
    assert_eq!(stdout(&["fgl", "p-series", "--config", c, "--prime", "2"]).trim(), "[2](x) = 2*x + x^2");
    fs::write(&cfg, "no equals sign\n").unwrap();
    assert_eq!(chromalg(&["fgl", "p-series", "--config", c]).status.code(), Some(4));
}

#[test]
fn json_output_is_deterministic() {
    for args in chromalg::validate::DETERMINISM_COMMANDS.iter().take(6) {
        assert_eq!(stdout(args), stdout(args), "{args:?}");
    }
}
