//! Command-line front end.
//!
//! Exit codes: 0 when nothing reaches `--fail-on`, 1 when findings do, 2 for
//! usage, I/O and spec errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::engine::{analyze, AnalysisConfig, Profile, RuleSetting};
use crate::model_spec::{InputType, ModelDocument, ParseOptions, ProblemType};
use crate::report::{exit_code, render_machine, render_text};
use crate::rules::{RuleId, Severity};

pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FailOn {
    Error,
    Warning,
}

impl From<FailOn> for Severity {
    fn from(f: FailOn) -> Self {
        match f {
            FailOn::Error => Severity::Error,
            FailOn::Warning => Severity::Warning,
        }
    }
}

/// Lint a model spec document for structural bugs before training.
#[derive(Debug, Parser)]
#[command(name = "theia-lint", version)]
pub struct CliOptions {
    /// Model spec document (JSON).
    pub spec_path: PathBuf,

    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,

    /// Lowest severity that makes the run fail.
    #[arg(long, value_enum, default_value = "error")]
    pub fail_on: FailOn,

    /// Rule override such as `CNL=off` or `IBS=error`; repeatable.
    #[arg(long = "rule", value_name = "ID=SETTING", value_parser = parse_rule_override)]
    pub rules: Vec<(RuleId, RuleSetting)>,

    /// default, minimal (no MNL) or strict-llm.
    #[arg(long, env = "THEIA_LINT_PROFILE", default_value = "default", value_parser = parse_profile)]
    pub profile: Profile,

    /// Ignore unknown keys in the spec document.
    #[arg(long)]
    pub lenient: bool,

    /// Problem type, overriding the document.
    #[arg(long, value_parser = parse_problem_type)]
    pub problem_type: Option<ProblemType>,

    /// Input type, overriding the document (channels are re-derived).
    #[arg(long, value_parser = parse_input_type)]
    pub input_type: Option<InputType>,

    /// Observed training-input range as `min,max`, overriding the document.
    #[arg(long, value_name = "MIN,MAX", allow_hyphen_values = true, value_parser = parse_value_range)]
    pub value_range: Option<(f64, f64)>,
}

pub fn parse_rule_override(s: &str) -> Result<(RuleId, RuleSetting), String> {
    let (id, setting) = s
        .split_once('=')
        .ok_or_else(|| format!("expected ID=SETTING, got `{s}`"))?;
    Ok((id.parse()?, setting.parse()?))
}

fn parse_profile(s: &str) -> Result<Profile, String> {
    s.parse()
}

fn parse_problem_type(s: &str) -> Result<ProblemType, String> {
    s.parse()
}

fn parse_input_type(s: &str) -> Result<InputType, String> {
    s.parse()
}

pub fn parse_value_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| format!("expected MIN,MAX, got `{s}`"))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| format!("`{v}` is not a finite number"))
    };
    let (lo, hi) = (parse(lo)?, parse(hi)?);
    if lo > hi {
        return Err(format!("min {lo} exceeds max {hi}"));
    }
    Ok((lo, hi))
}

impl CliOptions {
    pub fn config(&self) -> AnalysisConfig {
        AnalysisConfig {
            severity_overrides: self.rules.iter().copied().collect(),
            fail_on: self.fail_on.into(),
            lenient_parsing: self.lenient,
            profile: self.profile,
        }
    }

    fn apply_overrides(&self, doc: &mut ModelDocument) {
        if let Some(p) = self.problem_type {
            doc.dataset.problem_type = Some(p);
        }
        if let Some(t) = self.input_type {
            doc.dataset.input_type = Some(t);
            doc.dataset.channels = None;
        }
        if let Some(r) = self.value_range {
            doc.dataset.value_range = Some(r);
        }
    }
}

/// Runs the linter with `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let opts = match CliOptions::try_parse_from(args) {
        Ok(opts) => opts,
        Err(err) => {
            let code = if err.use_stderr() {
                let _ = write!(stderr, "{err}");
                EXIT_USAGE
            } else {
                // --help and --version
                let _ = write!(stdout, "{err}");
                0
            };
            return code;
        }
    };

    let text = match std::fs::read_to_string(&opts.spec_path) {
        Ok(t) => t,
        Err(err) => {
            let _ = writeln!(stderr, "error: cannot read {}: {err}", opts.spec_path.display());
            return EXIT_USAGE;
        }
    };
    let config = opts.config();
    let parsed = ModelDocument::from_json(
        &text,
        ParseOptions {
            lenient: config.lenient_parsing,
        },
    )
    .and_then(|mut doc| {
        opts.apply_overrides(&mut doc);
        doc.validate()
    });
    let spec = match parsed {
        Ok(spec) => spec,
        Err(err) => {
            let _ = writeln!(stderr, "error: {}: {err}", opts.spec_path.display());
            return EXIT_USAGE;
        }
    };

    let report = analyze(&spec, &config);
    let rendered = match opts.format {
        OutputFormat::Text => render_text(&report),
        OutputFormat::Json => render_machine(&report) + "\n",
    };
    if stdout.write_all(rendered.as_bytes()).is_err() {
        return EXIT_USAGE;
    }
    exit_code(&report, config.fail_on)
}
