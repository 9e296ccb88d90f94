//! Regression corpus: JSON-lines files of equations with expected
//! methods and multipliers, compared structurally (never by string).

use crate::parse::{parse_foode, parse_integrating_factor};
use crate::render::Style;
use crate::solver::{
    same_factor_up_to_const, solve, verify_integrating_factor, IntegratingFactor, Method,
    SolveConfig, SolveReport, Status,
};
use serde::Deserialize;
use std::io::BufRead;
use std::path::Path;
use std::time::Duration;

#[derive(Clone, Debug, Deserialize)]
pub struct CorpusEntry {
    pub id: String,
    pub ode: String,
    #[serde(default)]
    pub params: Vec<String>,
    #[serde(default)]
    pub expect_method: Option<String>,
    #[serde(default, rename = "expect_R")]
    pub expect_r: Option<String>,
    #[serde(default)]
    pub max_degree: Option<u32>,
    /// Free-form commentary (e.g. flags a reconstructed source).
    #[serde(default)]
    pub note: Option<String>,
}

#[derive(Clone, Debug)]
pub struct EntryOutcome {
    pub line: usize,
    pub id: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u64,
    pub report: Option<(SolveReport, crate::ode::Foode)>,
}

#[derive(Debug, Default)]
pub struct CorpusSummary {
    pub outcomes: Vec<EntryOutcome>,
    pub passed: usize,
    pub failed: usize,
    pub malformed: usize,
}

impl CorpusSummary {
    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.malformed == 0
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CorpusOverrides {
    pub max_degree: Option<u32>,
    pub timeout: Option<Duration>,
}

pub fn run_corpus(path: &Path, overrides: CorpusOverrides) -> std::io::Result<CorpusSummary> {
    let file = std::fs::File::open(path)?;
    let reader = std::io::BufReader::new(file);
    let mut summary = CorpusSummary::default();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let text = line?;
        if text.trim().is_empty() || text.trim_start().starts_with('#') {
            continue;
        }
        let entry: CorpusEntry = match serde_json::from_str(&text) {
            Ok(e) => e,
            Err(err) => {
                summary.malformed += 1;
                summary.outcomes.push(EntryOutcome {
                    line: line_no,
                    id: format!("<line {}>", line_no),
                    passed: false,
                    detail: format!("malformed entry: {}", err),
                    elapsed_ms: 0,
                    report: None,
                });
                continue;
            }
        };
        let outcome = run_entry(&entry, line_no, overrides);
        if outcome.passed {
            summary.passed += 1;
        } else {
            summary.failed += 1;
        }
        summary.outcomes.push(outcome);
    }
    Ok(summary)
}

pub fn run_entry(entry: &CorpusEntry, line: usize, overrides: CorpusOverrides) -> EntryOutcome {
    let started = std::time::Instant::now();
    let fail = |detail: String, elapsed: u64| EntryOutcome {
        line,
        id: entry.id.clone(),
        passed: false,
        detail,
        elapsed_ms: elapsed,
        report: None,
    };
    let eq = match parse_foode(&entry.ode, &entry.params) {
        Ok(eq) => eq,
        Err(err) => return fail(format!("equation does not parse: {}", err), 0),
    };
    let mut config = SolveConfig::default();
    if let Some(d) = entry.max_degree {
        config.max_degree = d;
    }
    if let Some(d) = overrides.max_degree {
        config.max_degree = d;
    }
    if let Some(t) = overrides.timeout {
        config.timeout = t;
    }
    let report = solve(&eq, &config);
    let elapsed = started.elapsed().as_millis() as u64;

    let mut problems: Vec<String> = Vec::new();
    if entry.expect_method.is_some() || entry.expect_r.is_some() {
        if report.status != Status::Solved {
            problems.push(format!("expected a solution, got {:?}", report.status));
        }
    }
    if let Some(expected) = &entry.expect_method {
        match Method::from_str_opt(expected) {
            None => problems.push(format!("unknown expected method '{}'", expected)),
            Some(m) => {
                if report.method != Some(m) {
                    problems.push(format!(
                        "method mismatch: expected {}, got {}",
                        expected,
                        report
                            .method
                            .map(|m| m.to_string())
                            .unwrap_or_else(|| "none".into())
                    ));
                }
            }
        }
    }
    if let Some(expected_r) = &entry.expect_r {
        match parse_integrating_factor(expected_r, &entry.params) {
            Err(err) => problems.push(format!("expect_R does not parse: {}", err)),
            Ok((r0, factors)) => {
                let expected = IntegratingFactor { r0, factors };
                if !verify_integrating_factor(&eq, &expected) {
                    problems.push("expect_R does not verify against the equation".into());
                } else if let Some(actual) = &report.factor {
                    if !same_factor_up_to_const(actual, &expected) {
                        problems.push(format!(
                            "multiplier mismatch: expected {}, got {}",
                            expected.render(Style::Plain, eq.param()),
                            actual.render(Style::Plain, eq.param())
                        ));
                    }
                }
            }
        }
    }
    let passed = problems.is_empty();
    let detail = if passed {
        match (&report.method, &report.factor) {
            (Some(m), Some(f)) => {
                format!("{} R = {}", m, f.render(Style::Plain, eq.param()))
            }
            _ => format!("{:?}", report.status),
        }
    } else {
        problems.join("; ")
    };
    EntryOutcome {
        line,
        id: entry.id.clone(),
        passed,
        detail,
        elapsed_ms: elapsed,
        report: Some((report, eq)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_corpus(lines: &[&str]) -> tempdir_path::TempPath {
        let mut path = std::env::temp_dir();
        path.push(format!("corpus-test-{}.jsonl", std::process::id()));
        let mut f = std::fs::File::create(&path).unwrap();
        for l in lines {
            writeln!(f, "{}", l).unwrap();
        }
        tempdir_path::TempPath(path)
    }

    mod tempdir_path {
        pub struct TempPath(pub std::path::PathBuf);
        impl Drop for TempPath {
            fn drop(&mut self) {
                let _ = std::fs::remove_file(&self.0);
            }
        }
    }

    #[test]
    fn empty_corpus_passes() {
        let tmp = write_corpus(&[]);
        let s = run_corpus(&tmp.0, CorpusOverrides::default()).unwrap();
        assert!(s.all_passed());
        assert_eq!(s.passed + s.failed, 0);
    }

    #[test]
    fn wrong_expectation_fails_and_run_continues() {
        let tmp = write_corpus(&[
            r#"{"id":"bad","ode":"dy/dx = x*y","expect_R":"y^-2"}"#,
            r#"{"id":"good","ode":"dy/dx = x*y","expect_method":"classic_ps","expect_R":"y^-1"}"#,
            "not json at all",
        ]);
        let s = run_corpus(&tmp.0, CorpusOverrides::default()).unwrap();
        assert_eq!(s.passed, 1);
        assert_eq!(s.failed, 1);
        assert_eq!(s.malformed, 1);
        assert!(!s.all_passed());
        // the wrong expectation is rejected by verification, not by
        // string comparison
        assert!(s.outcomes[0].detail.contains("does not verify"));
    }
}
