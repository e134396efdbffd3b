//! Runs every acceptance criterion and prints one PASS/FAIL line for each.
//! Exits non-zero if any criterion fails.

mod demo;
mod packets;
mod stationary;

use std::process::ExitCode;
use std::time::Instant;

pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    pub fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

/// Relative difference with a floor on the reference magnitude.
pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("oracle equivalence", stationary::oracle_equivalence),
        ("invariant suite", stationary::invariant_suite),
        ("dwell-time closed forms", stationary::dwell_closed_forms),
        ("derivative checks", stationary::derivative_checks),
        ("Hartman effects", stationary::hartman_effects),
        ("limiting-regime regressions", stationary::limiting_regimes),
        ("packet example", packets::packet_example),
        ("packet norm properties", packets::packet_norms),
        ("superposition demo", demo::superposition_demo),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        if !out.pass {
            failed += 1;
        }
        println!(
            "criterion {} {}: {} ({}; {:.1} s)",
            i + 1,
            name,
            if out.pass { "PASS" } else { "FAIL" },
            out.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
