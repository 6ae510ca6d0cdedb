//! Deterministic plain-text run reports.
//!
//! Reports are assembled as ordered lines and rendered once. All floats
//! go through one fixed-precision formatter so a report is byte-stable
//! across runs with the same configuration. Timing never enters a
//! report; the driver prints it to stderr on request.

/// Fixed-precision float formatting for byte-stable reports.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v:.12e}")
    }
}

/// Complex value formatting matching [`fmt_f64`].
pub fn fmt_c64(v: crate::linalg::C64) -> String {
    format!("{} + {}i", fmt_f64(v.re), fmt_f64(v.im))
}

/// An ordered, append-only run report with pass/fail bookkeeping.
pub struct Report {
    title: String,
    lines: Vec<String>,
    checks: usize,
    fails: usize,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report { title: title.into(), lines: Vec::new(), checks: 0, fails: 0 }
    }

    /// Start a named section.
    pub fn section(&mut self, name: &str) {
        self.lines.push(String::new());
        self.lines.push(format!("{name}:"));
    }

    /// Indented key and value.
    pub fn kv(&mut self, key: &str, value: impl AsRef<str>) {
        self.lines.push(format!("  {key}: {}", value.as_ref()));
    }

    pub fn kv_f64(&mut self, key: &str, value: f64) {
        let text = fmt_f64(value);
        self.kv(key, text);
    }

    /// Free-form indented line.
    pub fn note(&mut self, line: impl AsRef<str>) {
        self.lines.push(format!("  {}", line.as_ref()));
    }

    /// A verdict line; any failing check fails the whole report.
    pub fn check(&mut self, label: &str, pass: bool) {
        self.checks += 1;
        if !pass {
            self.fails += 1;
        }
        self.lines.push(format!("  {label}: {}", if pass { "PASS" } else { "FAIL" }));
    }

    pub fn passed(&self) -> bool {
        self.fails == 0
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.title);
        out.push('\n');
        for line in &self.lines {
            out.push_str(line);
            out.push('\n');
        }
        out.push('\n');
        if self.fails == 0 {
            out.push_str(&format!("overall: PASS ({} checks)\n", self.checks));
        } else {
            out.push_str(&format!(
                "overall: FAIL ({} of {} checks failed)\n",
                self.fails, self.checks
            ));
        }
        out
    }
}
