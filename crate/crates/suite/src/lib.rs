//! Plain-text rendering of acceptance runs.

use std::time::Instant;

use eulertop::verify::{run_criterion, CriterionReport, SuiteOptions, CRITERIA};

/// One status line per criterion followed by its sub-check lines.
pub fn render(report: &CriterionReport, seconds: f64) -> String {
    let status = if report.passed { "PASS" } else { "FAIL" };
    let mut out = format!("{status} criterion {:>2}: {} ({seconds:.1}s)\n", report.id, report.title);
    for c in &report.checks {
        let mark = if c.passed { "ok  " } else { "FAIL" };
        out.push_str(&format!("    {mark} {}: {}\n", c.name, c.detail));
    }
    out
}

/// Runs the selected criteria (all when `selected` is empty), printing as it
/// goes. Returns the number that failed.
pub fn run(selected: &[u8], opts: &SuiteOptions) -> usize {
    let ids: Vec<u8> = CRITERIA.iter().copied().filter(|id| selected.is_empty() || selected.contains(id)).collect();
    println!("acceptance: {} criteria, seed {}", ids.len(), opts.seed);
    let mut failed = 0;
    for id in ids {
        let start = Instant::now();
        let report = run_criterion(id, opts).expect("known criterion");
        print!("{}", render(&report, start.elapsed().as_secs_f64()));
        if !report.passed {
            failed += 1;
        }
    }
    if failed == 0 {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: {failed} criteria failed");
    }
    failed
}
