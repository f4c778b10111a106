//! Criteria 1 to 8, one line each. Exits nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use cobord_cli::selftest::{run_core, CriterionResult};

fn line(r: &CriterionResult) {
    let budget = r.runtime_limit_s.map(|s| format!(" / {s} s")).unwrap_or_default();
    println!(
        "criterion {} [{}] {} ({:.2} s{budget}): {}",
        r.id,
        if r.pass { "PASS" } else { "FAIL" },
        r.title,
        r.elapsed.as_secs_f64(),
        r.detail
    );
}

fn main() -> ExitCode {
    let mut all = true;
    for r in run_core() {
        line(&r);
        all &= r.pass;
    }
    let start = Instant::now();
    let selftest = || Command::new(env!("CARGO_BIN_EXE_cobord")).arg("selftest").output().unwrap();
    let (a, b) = (selftest(), selftest());
    let identical = a.stdout == b.stdout && !a.stdout.is_empty();
    let ran = a.status.code() == Some(0) && b.status.code() == Some(0);
    let pass = identical && ran;
    println!(
        "criterion 8 [{}] determinism ({:.2} s): selftest stdout {}, exit codes {:?} {:?}",
        if pass { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64(),
        if identical { "byte-identical across two runs" } else { "differs between runs" },
        a.status.code(),
        b.status.code()
    );
    all &= pass;
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
