//! Runs two of the invariant suites and prints their checks.

use progbar_sched::verify::run_suite;

fn main() -> progbar_sched::error::Result<()> {
    for name in ["brittleness", "poisson"] {
        let report = run_suite(name, 1)?;
        for c in &report.checks {
            println!(
                "{} {}: {}",
                if c.passed { "ok  " } else { "FAIL" },
                c.property,
                c.detail
            );
        }
    }
    Ok(())
}
