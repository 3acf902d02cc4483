//! Runs the shipped rule suite and prints its text report.

use bq_core::harness::{render_text, run_suite, SuiteConfig};

fn main() {
    let report = run_suite(&SuiteConfig::shipped());
    print!("{}", render_text(&report));
    std::process::exit(report.exit_code());
}
