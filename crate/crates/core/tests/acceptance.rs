//! Acceptance suite: one line per criterion, nonzero exit on any failure.
//! Pass criterion numbers as arguments to run a subset.

use std::process::ExitCode;

use brcert::driver::acceptance::{family, run, Status, CRITERIA};

fn main() -> ExitCode {
    let selected: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (lm, load_error) = family();
    let mut failed = 0;
    for &n in CRITERIA.iter().filter(|n| selected.is_empty() || selected.contains(n)) {
        let outcome = run(n, &lm, load_error.as_ref());
        println!("{}", outcome.line());
        failed += (outcome.status == Status::Fail) as usize;
    }
    println!("acceptance: {failed} failed");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
