//! One line per acceptance criterion; limits are pinned in `chromalg::validate`.

use std::io::Write;
use std::process::Command;

use chromalg::validate::{self, CriterionReport};

fn run_cli(args: &[&str]) -> chromalg::Result<Vec<u8>> {
    let out = Command::new(env!("CARGO_BIN_EXE_chromalg"))
        .args(args)
        .output()
        .map_err(|e| chromalg::Error::Verification(e.to_string()))?;
    if !out.status.success() {
        return Err(chromalg::Error::Verification(format!("`{}` exited with {}", args.join(" "), out.status)));
    }
    Ok(out.stdout)
}

#[test]
fn acceptance() {
    let mut reports: Vec<CriterionReport> = Vec::new();
    let mut emit = |r: CriterionReport| {
        // written past the test harness capture so the lines always show
        let _ = writeln!(std::io::stderr(), "{}", r.line());
        reports.push(r);
    };
    for &(id, _, _) in validate::CRITERIA.iter() {
        emit(validate::run(id).unwrap());
    }
    emit(validate::determinism(run_cli));
    let failed: Vec<u32> = reports.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    assert_eq!(reports.len(), 12);
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
