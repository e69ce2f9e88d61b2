//! Reporting helpers for the acceptance target.

use std::io::Write;
use std::time::Duration;

/// One criterion verdict, written straight to stdout so that it shows up
/// even when the test harness captures output.
pub fn report(id: u8, title: &str, passed: bool, elapsed: Duration, detail: &str) {
    let verdict = if passed { "PASS" } else { "FAIL" };
    let line = format!(
        "acceptance criterion {id} [{title}]: {verdict} ({:.2} s) {detail}\n",
        elapsed.as_secs_f64()
    );
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}

/// Free-form line on stdout, bypassing capture like [`report`].
pub fn note(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(format!("    {text}\n").as_bytes());
    let _ = out.flush();
}

/// Collects named sub-checks and summarizes the failing ones.
#[derive(Debug, Default)]
pub struct Checks {
    failed: Vec<String>,
    total: usize,
}

impl Checks {
    pub fn check(&mut self, name: impl Into<String>, ok: bool) {
        self.total += 1;
        if !ok {
            self.failed.push(name.into());
        }
    }

    pub fn passed(&self) -> bool {
        self.failed.is_empty()
    }

    pub fn summary(&self) -> String {
        if self.failed.is_empty() {
            format!("{} sub-checks passed", self.total)
        } else {
            format!("{}/{} sub-checks failed: {}", self.failed.len(), self.total, self.failed.join("; "))
        }
    }
}
