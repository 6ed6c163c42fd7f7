//! The acceptance matrix: every criterion in-process with its runtime budget,
//! then report determinism through the binary.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use mupir::verify::{self, CRITERIA};

const SEED: u64 = 20240601;

fn budget(id: usize) -> Duration {
    Duration::from_secs(match id {
        1 | 2 | 8 => 1,
        3 => 10,
        4 => 30,
        5 => 60,
        6 => 300,
        7 | 9 | 10 => 5,
        _ => 60,
    })
}

fn report_bytes(seed: u64, path: &std::path::Path) -> Vec<u8> {
    let status = Command::new(env!("CARGO_BIN_EXE_mupir"))
        .args([
            "verify-all",
            "--seed",
            &seed.to_string(),
            "--out",
            path.to_str().unwrap(),
        ])
        .output()
        .expect("binary runs")
        .status;
    assert_eq!(status.code(), Some(0), "verify-all exit status");
    std::fs::read(path).unwrap()
}

/// Written past the test harness's output capture so the matrix always shows.
fn line(text: String) {
    let _ = writeln!(std::io::stderr().lock(), "{text}");
}

#[test]
fn acceptance_matrix() {
    let mut failed = Vec::new();
    let mut results = Vec::new();
    for id in 1..=CRITERIA {
        let start = Instant::now();
        let r = verify::criterion(id, SEED);
        let took = start.elapsed();
        let ok = r.passed && took <= budget(id);
        line(format!(
            "[{}] {:>2} {} ({:.2}s, budget {}s): {}",
            if ok { "PASS" } else { "FAIL" },
            id,
            r.title,
            took.as_secs_f64(),
            budget(id).as_secs(),
            r.detail
        ));
        if !ok {
            failed.push(id);
        }
        results.push(r);
    }

    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let a = report_bytes(SEED, &dir.path().join("a.json"));
    let b = report_bytes(SEED, &dir.path().join("b.json"));
    let in_process = verify::VerifyReport {
        seed: SEED,
        criteria: results,
    }
    .to_json();
    let ok = a == b && a == in_process.as_bytes();
    line(format!(
        "[{}] 11 Determinism ({:.2}s): two verify-all runs {} and {} the in-process report",
        if ok { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64(),
        if a == b { "byte-identical" } else { "differ" },
        if a == in_process.as_bytes() {
            "match"
        } else {
            "do not match"
        },
    ));
    if !ok {
        failed.push(11);
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
