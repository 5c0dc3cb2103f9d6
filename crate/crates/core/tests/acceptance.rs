//! Acceptance gate: runs criteria 1 to 10 against one shared context and
//! prints a PASS/FAIL line for each.

use std::process::ExitCode;

use dodeca::checks::{run_check, CheckOptions, Context, Outcome, CHECKS};

fn main() -> ExitCode {
    let ctx = Context::new(CheckOptions::default());
    let mut failed = 0;
    println!("running {} acceptance criteria", CHECKS.len());
    for &(id, _, _) in CHECKS.iter() {
        let r = run_check(&ctx, id).expect("registered criterion");
        let tag = match r.outcome {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Inconclusive => "FAIL (inconclusive)",
        };
        if r.outcome != Outcome::Pass {
            failed += 1;
        }
        println!("{tag} criterion {:>2} {:<26} {:>7.1}s  {}", r.id, r.name, r.seconds, r.detail);
    }
    println!("acceptance: {} passed, {failed} failed", CHECKS.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
