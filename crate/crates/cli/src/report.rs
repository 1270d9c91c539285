//! Verification reports and their text / JSON-lines serialisations.

use std::fmt::Write as _;

use serde_json::json;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    /// Residual, or the amount by which an observed value exceeds its bound.
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `|residual| ≤ tol`.
    pub fn absolute(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Self { name: name.into(), residual, tol, pass: residual.abs() <= tol }
    }

    /// Passes when `residual ≤ tol`; for signed excesses over a bound.
    pub fn excess(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Self { name: name.into(), residual, tol, pass: residual <= tol }
    }

    pub fn with_pass(name: impl Into<String>, residual: f64, tol: f64, pass: bool) -> Self {
        Self { name: name.into(), residual, tol, pass }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub scenario: String,
    /// Resolved parameters, in a fixed order.
    pub params: Vec<(String, String)>,
    pub checks: Vec<Check>,
    /// Derived quantities worth recording (classification, μ, …).
    pub notes: Vec<(String, String)>,
    /// Wall-clock seconds; never serialised, so reports stay reproducible.
    pub timing: f64,
}

impl Report {
    pub fn new(scenario: impl Into<String>) -> Self {
        Self { scenario: scenario.into(), ..Self::default() }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.params.push((key.to_string(), value.to_string()));
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_string(), value.to_string()));
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn overall(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    JsonLines,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Text => "txt",
            Self::JsonLines => "jsonl",
        }
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn emit_report(report: &Report, format: Format) -> Vec<u8> {
    let mut out = String::new();
    match format {
        Format::Text => {
            let _ = writeln!(out, "REPORT {}", report.scenario);
            for (k, v) in &report.params {
                let _ = writeln!(out, "PARAM {k}={v}");
            }
            for c in &report.checks {
                let _ = writeln!(out, "CHECK {} residual={:.6e} tol={:.6e} {}", c.name, c.residual, c.tol, verdict(c.pass));
            }
            for (k, v) in &report.notes {
                let _ = writeln!(out, "NOTE {k}={v}");
            }
            let _ = writeln!(out, "OVERALL {}", verdict(report.overall()));
        }
        Format::JsonLines => {
            let mut line = |v: serde_json::Value| {
                out.push_str(&v.to_string());
                out.push('\n');
            };
            line(json!({"type": "report", "scenario": report.scenario}));
            for (k, v) in &report.params {
                line(json!({"type": "param", "key": k, "value": v}));
            }
            for c in &report.checks {
                line(json!({"type": "check", "name": c.name, "residual": c.residual, "tol": c.tol, "pass": c.pass}));
            }
            for (k, v) in &report.notes {
                line(json!({"type": "note", "key": k, "value": v}));
            }
            line(json!({"type": "overall", "pass": report.overall()}));
        }
    }
    out.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_is_header_and_overall() {
        let r = Report::new("empty");
        assert_eq!(String::from_utf8(emit_report(&r, Format::Text)).unwrap(), "REPORT empty\nOVERALL PASS\n");
    }

    #[test]
    fn failing_check_fails_overall() {
        let mut r = Report::new("one");
        r.check(Check::absolute("identity", 2e-3, 1e-8));
        let text = String::from_utf8(emit_report(&r, Format::Text)).unwrap();
        assert!(text.contains("CHECK identity residual=2.000000e-3 tol=1.000000e-8 FAIL\n"));
        assert!(text.ends_with("OVERALL FAIL\n"));
        let jsonl = String::from_utf8(emit_report(&r, Format::JsonLines)).unwrap();
        let last: serde_json::Value = serde_json::from_str(jsonl.lines().last().unwrap()).unwrap();
        assert_eq!(last["pass"], false);
    }

    #[test]
    fn serialisation_is_deterministic_and_ignores_timing() {
        let mut a = Report::new("d");
        a.param("n", 3);
        a.check(Check::excess("bound", -1.5, 1e-9));
        a.note("mu", 3.0);
        let mut b = a.clone();
        b.timing = 12.5;
        for f in [Format::Text, Format::JsonLines] {
            assert_eq!(emit_report(&a, f), emit_report(&a, f));
            assert_eq!(emit_report(&a, f), emit_report(&b, f));
        }
    }
}
