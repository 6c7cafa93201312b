//! Findings, reports, and their text and JSON renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model_spec::{LayerSpec, SourceLocation};
use crate::rules::{RuleId, Severity};

pub const REPORT_VERSION: u32 = 1;

/// One localized rule violation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Finding {
    pub rule_id: RuleId,
    pub severity: Severity,
    pub layer_index: Option<usize>,
    pub source_location: Option<SourceLocation>,
    pub message: String,
    pub fix_suggestion: String,
}

impl Finding {
    /// A finding attached to `layer`, at the rule's default severity.
    pub fn at_layer(rule_id: RuleId, layer: &LayerSpec, message: String, fix: String) -> Self {
        Finding {
            rule_id,
            severity: rule_id.descriptor().default_severity,
            layer_index: Some(layer.index),
            source_location: layer.source_location.clone(),
            message,
            fix_suggestion: fix,
        }
    }

    /// A finding about the learner or the data rather than one layer.
    pub fn global(rule_id: RuleId, message: String, fix: String) -> Self {
        Finding {
            rule_id,
            severity: rule_id.descriptor().default_severity,
            layer_index: None,
            source_location: None,
            message,
            fix_suggestion: fix,
        }
    }
}

/// A rule that could not be evaluated because an input was missing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkipNote {
    pub rule_id: RuleId,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Clean,
    Warnings,
    Errors,
}

impl Verdict {
    pub fn of(findings: &[Finding]) -> Self {
        if findings.iter().any(|f| f.severity == Severity::Error) {
            Verdict::Errors
        } else if findings.is_empty() {
            Verdict::Clean
        } else {
            Verdict::Warnings
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Clean => "clean",
            Verdict::Warnings => "warnings",
            Verdict::Errors => "errors",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub version: u32,
    pub verdict: Verdict,
    /// Call-strings findings first, then parameter findings.
    pub findings: Vec<Finding>,
    pub skip_notes: Vec<SkipNote>,
    /// Hex SHA-256 of the analyzed spec's canonical JSON.
    pub spec_fingerprint: String,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("malformed report document: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("unsupported report version {0}")]
    Version(u32),
    #[error("verdict `{stated}` disagrees with findings (expected `{expected}`)")]
    Verdict { stated: &'static str, expected: &'static str },
}

impl Report {
    pub fn new(findings: Vec<Finding>, skip_notes: Vec<SkipNote>, spec_fingerprint: String) -> Self {
        Report {
            version: REPORT_VERSION,
            verdict: Verdict::of(&findings),
            findings,
            skip_notes,
            spec_fingerprint,
        }
    }

    pub fn count(&self, severity: Severity) -> usize {
        self.findings.iter().filter(|f| f.severity == severity).count()
    }

    /// Parses a machine-readable report and checks its verdict.
    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        let report: Report = serde_json::from_str(text)?;
        if report.version != REPORT_VERSION {
            return Err(ReportError::Version(report.version));
        }
        let expected = Verdict::of(&report.findings);
        if expected != report.verdict {
            return Err(ReportError::Verdict {
                stated: report.verdict.as_str(),
                expected: expected.as_str(),
            });
        }
        Ok(report)
    }
}

fn plural(n: usize, word: &str) -> String {
    if n == 1 {
        format!("{n} {word}")
    } else {
        format!("{n} {word}s")
    }
}

/// Human-readable report: one line per finding, then skip notes, then the
/// verdict summary.
pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    for f in &report.findings {
        let _ = write!(out, "[{}] {}", f.severity.as_str().to_uppercase(), f.rule_id);
        if let Some(i) = f.layer_index {
            let _ = write!(out, " layer {i}");
        }
        if let Some(loc) = &f.source_location {
            let _ = write!(out, " ({loc})");
        }
        let _ = writeln!(out, ": {} — fix: {}", f.message, f.fix_suggestion);
    }
    for note in &report.skip_notes {
        let _ = writeln!(out, "note: {} not checked: {}", note.rule_id, note.reason);
    }
    match report.verdict {
        Verdict::Clean => out.push_str("verdict: clean (0 findings)\n"),
        v => {
            let _ = writeln!(
                out,
                "verdict: {} ({}, {})",
                v.as_str(),
                plural(report.count(Severity::Error), "error"),
                plural(report.count(Severity::Warning), "warning"),
            );
        }
    }
    out
}

/// Pretty-printed JSON report document.
pub fn render_machine(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("reports always serialize")
}

/// 0 when nothing reaches `fail_on`, 1 otherwise.
pub fn exit_code(report: &Report, fail_on: Severity) -> i32 {
    if report.findings.iter().any(|f| f.severity >= fail_on) {
        1
    } else {
        0
    }
}
