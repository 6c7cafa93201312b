//! Runs the two analyses over a model and merges their findings.
//!
//! The call-strings pass walks the layers once, left to right, keeping
//! counters for the open dense/convolution layer ("anchor"). Activations and
//! dropouts seen after an anchor are attributed to it until the next anchor
//! or pooling layer closes it. The parameter pass then inspects individual
//! hyper-parameters. The final report lists all call-strings findings before
//! all parameter findings.

use std::collections::BTreeMap;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::model_spec::{infer_shapes, LayerKind, LayerSpec, ModelSpec, ProblemType};
use crate::report::{Finding, Report, SkipNote};
use crate::rules::{self, AnchorSegment, RuleId, Severity};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleSetting {
    Error,
    Warning,
    Off,
}

impl FromStr for RuleSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "error" => Ok(RuleSetting::Error),
            "warning" => Ok(RuleSetting::Warning),
            "off" => Ok(RuleSetting::Off),
            other => Err(format!("unknown rule setting `{other}` (expected error, warning or off)")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Profile {
    #[default]
    Default,
    /// Turns MNL off.
    Minimal,
    /// Multiclass problems accept only categorical_crossentropy.
    StrictLlm,
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "default" => Ok(Profile::Default),
            "minimal" => Ok(Profile::Minimal),
            "strict-llm" => Ok(Profile::StrictLlm),
            other => Err(format!(
                "unknown profile `{other}` (expected default, minimal or strict-llm)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisConfig {
    pub severity_overrides: BTreeMap<RuleId, RuleSetting>,
    pub fail_on: Severity,
    pub lenient_parsing: bool,
    pub profile: Profile,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            severity_overrides: BTreeMap::new(),
            fail_on: Severity::Error,
            lenient_parsing: false,
            profile: Profile::Default,
        }
    }
}

impl AnalysisConfig {
    /// Explicit overrides win over the profile, which wins over defaults.
    pub fn setting(&self, rule: RuleId) -> RuleSetting {
        if let Some(s) = self.severity_overrides.get(&rule) {
            return *s;
        }
        if rule == RuleId::MNL && self.profile == Profile::Minimal {
            return RuleSetting::Off;
        }
        match rule.descriptor().default_severity {
            Severity::Error => RuleSetting::Error,
            Severity::Warning => RuleSetting::Warning,
        }
    }

    pub fn strict_llm(&self) -> bool {
        self.profile == Profile::StrictLlm
    }
}

/// Counters maintained by the call-strings walk.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CallStringState {
    /// Conv1d and conv2d layers seen.
    pub conv_count: usize,
    pub conv2d_count: usize,
    pub dense_count: usize,
    /// Convolution layers since the last pooling, flatten or dense layer.
    pub consecutive_conv_run: usize,
    pub activation_count_since_anchor: usize,
    pub dropout_count_since_anchor: usize,
    pub anchor_index: Option<usize>,
}

/// Findings and skip notes produced by one pass.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PassOutput {
    pub findings: Vec<Finding>,
    pub skip_notes: Vec<SkipNote>,
}

impl PassOutput {
    fn note(&mut self, rule_id: RuleId, reason: impl Into<String>) {
        self.skip_notes.push(SkipNote {
            rule_id,
            reason: reason.into(),
        });
    }

    /// Drops disabled rules, applies severities, and orders findings by
    /// layer index (layer-less findings last) then rule id.
    fn settle(mut self, config: &AnalysisConfig) -> Self {
        self.findings.retain_mut(|f| match config.setting(f.rule_id) {
            RuleSetting::Off => false,
            RuleSetting::Error => {
                f.severity = Severity::Error;
                true
            }
            RuleSetting::Warning => {
                f.severity = Severity::Warning;
                true
            }
        });
        self.skip_notes
            .retain(|n| config.setting(n.rule_id) != RuleSetting::Off);
        self.findings
            .sort_by_key(|f| (f.layer_index.is_none(), f.layer_index, f.rule_id));
        self
    }
}

/// Runs both passes and merges them into a report.
pub fn analyze(spec: &ModelSpec, config: &AnalysisConfig) -> Report {
    let first = run_call_strings_pass(spec, config);
    let second = run_parameter_pass(spec, config);
    let mut findings = first.findings;
    findings.extend(second.findings);
    let mut notes = first.skip_notes;
    notes.extend(second.skip_notes);
    Report::new(findings, notes, fingerprint(spec))
}

/// Hex SHA-256 of the spec's canonical JSON.
pub fn fingerprint(spec: &ModelSpec) -> String {
    hex::encode(Sha256::digest(spec.to_json().as_bytes()))
}

struct OpenAnchor<'a> {
    segment: AnchorSegment<'a>,
    saw_follower: bool,
}

fn close_anchor(open: Option<OpenAnchor<'_>>, problem: ProblemType, out: &mut PassOutput) {
    if let Some(open) = open {
        let seg = &open.segment;
        out.findings.extend(rules::cnl(seg, problem));
        out.findings.extend(rules::mrd(seg));
        out.findings.extend(rules::mnl(seg));
    }
}

/// Sequence-structure rules: CNL, IDS, MRD, MNL, ICL and IFL.
pub fn run_call_strings_pass(spec: &ModelSpec, config: &AnalysisConfig) -> PassOutput {
    let problem = spec.dataset().problem_type;
    let output_index = spec.output_layer();
    let mut out = PassOutput::default();
    let mut state = CallStringState::default();
    let mut open: Option<OpenAnchor<'_>> = None;
    let mut last_conv: Option<&LayerSpec> = None;
    let mut excess_dense: Option<&LayerSpec> = None;

    for layer in spec.layers() {
        if let Some(a) = open.as_mut().filter(|a| !a.saw_follower) {
            a.saw_follower = true;
            a.segment.normalized_first = layer.kind == LayerKind::BatchNormalization;
        }
        if layer.kind.is_anchor() || layer.kind.is_pooling() {
            close_anchor(open.take(), problem, &mut out);
            state.anchor_index = None;
            state.activation_count_since_anchor = 0;
            state.dropout_count_since_anchor = 0;
        }

        match &layer.kind {
            LayerKind::Conv1d | LayerKind::Conv2d => {
                state.conv_count += 1;
                if layer.kind == LayerKind::Conv2d {
                    state.conv2d_count += 1;
                }
                state.consecutive_conv_run += 1;
                out.findings.extend(rules::ids(layer, state.consecutive_conv_run));
                last_conv = Some(layer);
            }
            LayerKind::Dense => {
                state.dense_count += 1;
                state.consecutive_conv_run = 0;
                if state.dense_count == rules::MAX_DENSE_IN_CNN + 1 {
                    excess_dense = Some(layer);
                }
            }
            LayerKind::Flatten => state.consecutive_conv_run = 0,
            kind if kind.is_pooling() => state.consecutive_conv_run = 0,
            LayerKind::Activation => {
                if let (Some(a), Some(act)) = (open.as_mut(), &layer.activation_name) {
                    if act.is_nonlinear() {
                        a.segment.activations.push(act.clone());
                        state.activation_count_since_anchor += 1;
                    }
                }
            }
            LayerKind::Dropout => {
                if let Some(a) = open.as_mut() {
                    a.segment.dropout_count += 1;
                    state.dropout_count_since_anchor += 1;
                }
            }
            _ => {}
        }

        if layer.kind.is_anchor() {
            let activations: Vec<_> = layer.nonlinear_inline().cloned().into_iter().collect();
            state.anchor_index = Some(layer.index);
            state.activation_count_since_anchor = activations.len();
            open = Some(OpenAnchor {
                segment: AnchorSegment {
                    anchor: layer,
                    is_output: Some(layer.index) == output_index,
                    activations,
                    dropout_count: 0,
                    normalized_first: false,
                },
                saw_follower: false,
            });
        }
    }
    close_anchor(open, problem, &mut out);

    let input_type = spec.dataset().input_type;
    if input_type.is_image() {
        if let Some(conv) = last_conv {
            out.findings
                .extend(rules::icl(input_type, state.conv2d_count, conv));
            if let Some(dense) = excess_dense {
                out.findings.extend(rules::ifl(state.dense_count, dense));
            }
        }
    }
    out.settle(config)
}

/// Hyper-parameter rules: INF, INN, IDN, LLM, LOB and IBS.
pub fn run_parameter_pass(spec: &ModelSpec, config: &AnalysisConfig) -> PassOutput {
    let dataset = spec.dataset();
    let learner = spec.learner();
    let layers = spec.layers();
    let mut out = PassOutput::default();

    for layer in layers.iter().filter(|l| l.kind.is_conv()) {
        out.findings.extend(rules::inf(dataset.input_type, layer));
    }

    let output_index = spec.output_layer();
    let shapes = infer_shapes(spec);
    let input_of = |i: usize| -> Option<u64> {
        if i == 0 {
            dataset.input_shape.as_ref().and_then(|s| s.last().copied())
        } else {
            shapes[i - 1].feature_size()
        }
    };
    let hidden: Vec<&LayerSpec> = layers
        .iter()
        .filter(|l| l.kind == LayerKind::Dense && Some(l.index) != output_index)
        .collect();
    for layer in &hidden {
        match input_of(layer.index) {
            Some(size) => out.findings.extend(rules::inn_width(layer, size)),
            None => out.note(
                RuleId::INN,
                format!("input size of dense layer {} is unknown", layer.index),
            ),
        }
    }
    if spec.has_conv() {
        for pair in hidden.windows(2) {
            out.findings.extend(rules::inn_order(pair[0], pair[1]));
        }
    }

    match dataset.value_range {
        Some(range) => out.findings.extend(rules::idn(range)),
        None => out.note(RuleId::IDN, "dataset value_range not set"),
    }

    if dataset.problem_type == ProblemType::MultilabelClassification {
        out.note(
            RuleId::LLM,
            "no output activation/loss mapping for multilabel classification",
        );
    } else if let Some((activation, source)) = spec.effective_output_activation() {
        if learner.loss.is_none() {
            out.note(RuleId::LLM, "learner loss not set; only the output activation was checked");
        }
        out.findings.extend(rules::llm(
            dataset.problem_type,
            &activation,
            &layers[source],
            learner.loss.as_ref(),
            config.strict_llm(),
        ));
    } else {
        out.note(RuleId::LLM, "model has no dense output layer");
    }

    match learner.learning_rate {
        Some(lr) => out.findings.extend(rules::lob(lr)),
        None => out.note(RuleId::LOB, "learner learning_rate not set"),
    }
    match learner.batch_size {
        Some(bs) => out.findings.extend(rules::ibs(bs)),
        None => out.note(RuleId::IBS, "learner batch_size not set"),
    }
    out.settle(config)
}
