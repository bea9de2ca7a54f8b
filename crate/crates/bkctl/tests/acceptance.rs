//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Runs the full-level grids, so build with the test profile's optimizations
//! (the workspace sets them) and expect several minutes.

use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::Instant;

use bk_core::conjectures::SweepConfig;
use bk_core::verify::{self, CheckOutcome, Grid, Level};

struct Line {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn from_outcome(id: u32, name: &'static str, c: CheckOutcome) -> Line {
    let mut detail = format!("{} cases, {:.1}s", c.cases, c.elapsed.as_secs_f64());
    if let Some(first) = c.failures.first() {
        detail.push_str(&format!(", {} failures, first: {first}", c.failures.len()));
    }
    Line {
        id,
        name,
        pass: c.pass() && c.cases > 0,
        detail,
    }
}

fn bkctl(args: &[&str]) -> (Option<i32>, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_bkctl"))
        .args(args)
        .output()
        .expect("bkctl runs");
    let text = String::from_utf8_lossy(&out.stdout).into_owned() + &String::from_utf8_lossy(&out.stderr);
    (out.status.code(), text)
}

fn sweep_via_cli() -> Line {
    let start = Instant::now();
    let base: PathBuf = [env!("CARGO_TARGET_TMPDIR"), "acceptance-sweep"].iter().collect();
    let (code, text) = bkctl(&["sweep-beta", "--out", base.to_str().unwrap()]);
    let json = std::fs::read_to_string(base.with_extension("json")).unwrap_or_default();
    let summary = serde_json::from_str::<serde_json::Value>(&json)
        .ok()
        .map(|v| v["summary"].clone())
        .unwrap_or_default();
    let count = |k: &str| summary[k].as_u64();
    let pass = code == Some(0)
        && count("cells").is_some_and(|c| c > 0)
        && count("violations") == Some(0)
        && count("skipped") == Some(0)
        && count("inconclusive") == Some(0);
    Line {
        id: 3,
        name: "beta sweep via bkctl",
        pass,
        detail: format!(
            "exit {code:?}, cells {:?}, violations {:?}, {:.1}s{}",
            count("cells"),
            count("violations"),
            start.elapsed().as_secs_f64(),
            if pass {
                String::new()
            } else {
                format!(", output: {}", text.trim())
            }
        ),
    }
}

fn injected_fault_bites() -> Line {
    let (code, text) = bkctl(&["verify", "fast", "--inject-fault"]);
    let failed = text
        .lines()
        .filter(|l| l.starts_with("FAIL") || l.starts_with("fail"))
        .count();
    Line {
        id: 9,
        name: "off-by-one fast path is caught",
        pass: code == Some(1),
        detail: format!("exit {code:?}, {failed} failing checks"),
    }
}

fn main() -> ExitCode {
    let grid = Grid::for_level(Level::Full);
    let mut lines = vec![
        from_outcome(1, "formula vs oracle", verify::formula_vs_oracle(&grid)),
        from_outcome(2, "filtration identities", verify::lemma_identities(&grid)),
        sweep_via_cli(),
        from_outcome(4, "valuation table, p <= 7", verify::valuation_table(7, 3)),
        from_outcome(5, "worked example lengths", verify::li_petrov(&[2, 3, 5])),
        from_outcome(6, "ring identities", verify::ring_identities(1000, 50, 0x5eed)),
        from_outcome(7, "constants, p <= 13, e <= 200", verify::constants(13, 200)),
    ];
    lines.push(match verify::beta_sweep(&SweepConfig::default()) {
        Ok((_, sweep)) => from_outcome(8, "quasi-filtered", verify::quasi_filtered_checks(&sweep)),
        Err(e) => Line {
            id: 8,
            name: "quasi-filtered",
            pass: false,
            detail: format!("sweep failed: {e}"),
        },
    });
    lines.push(injected_fault_bites());

    for l in &lines {
        println!(
            "[{}] {}  {:<32} {}",
            l.id,
            if l.pass { "PASS" } else { "FAIL" },
            l.name,
            l.detail
        );
    }
    let failed = lines.iter().filter(|l| !l.pass).count();
    println!("{} criteria, {failed} failed", lines.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
