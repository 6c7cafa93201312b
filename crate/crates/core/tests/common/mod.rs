#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use theia_lint::engine::{AnalysisConfig, RuleSetting};
use theia_lint::model_spec::{
    infer_shapes, parse_model_spec, Activation, DatasetProfile, InputType, LayerKind, LayerSpec,
    LearnerSpec, Loss, ModelSpec, Padding, ParseOptions, ProblemType, ValueRange,
};
use theia_lint::report::Finding;
use theia_lint::rules::{self, AnchorSegment, RuleId, Severity};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn load_spec(name: &str) -> ModelSpec {
    parse_model_spec(&read_fixture(name), ParseOptions::default())
        .unwrap_or_else(|e| panic!("{name}: {e}"))
}

const PASS_ONE: [RuleId; 6] = [
    RuleId::CNL,
    RuleId::IDS,
    RuleId::MRD,
    RuleId::MNL,
    RuleId::ICL,
    RuleId::IFL,
];

pub fn is_call_strings_rule(rule: RuleId) -> bool {
    PASS_ONE.contains(&rule)
}

fn segment_of<'a>(layers: &'a [LayerSpec], output: Option<usize>, anchor: &'a LayerSpec) -> AnchorSegment<'a> {
    let i = anchor.index;
    let end = layers[i + 1..]
        .iter()
        .position(|l| l.kind.is_anchor() || l.kind.is_pooling())
        .map_or(layers.len(), |p| i + 1 + p);
    let tail = &layers[i + 1..end];
    let mut activations: Vec<Activation> = anchor.nonlinear_inline().cloned().into_iter().collect();
    activations.extend(
        tail.iter()
            .filter(|l| l.kind == LayerKind::Activation)
            .filter_map(|l| l.activation_name.clone())
            .filter(|a| *a != Activation::Linear),
    );
    AnchorSegment {
        anchor,
        is_output: Some(i) == output,
        activations,
        dropout_count: tail.iter().filter(|l| l.kind == LayerKind::Dropout).count(),
        normalized_first: layers
            .get(i + 1)
            .is_some_and(|l| l.kind == LayerKind::BatchNormalization),
    }
}

/// Evaluates one rule by slicing the layer list directly, with no shared
/// walk state. Only the rule predicates themselves are reused.
pub fn oracle_rule(spec: &ModelSpec, rule: RuleId, strict_llm: bool) -> Vec<Finding> {
    let layers = spec.layers();
    let ds = spec.dataset();
    let output = layers.iter().rposition(|l| l.kind == LayerKind::Dense);
    let anchors = || layers.iter().filter(|l| l.kind.is_anchor());


    let cnn_image = ds.input_type.is_image() && layers.iter().any(|l| l.kind.is_conv());

    match rule {
        RuleId::CNL => anchors()
            .filter_map(|a| rules::cnl(&segment_of(layers, output, a), ds.problem_type))
            .collect(),
        RuleId::MRD => anchors().filter_map(|a| rules::mrd(&segment_of(layers, output, a))).collect(),
        RuleId::MNL => anchors().filter_map(|a| rules::mnl(&segment_of(layers, output, a))).collect(),
        RuleId::IDS => layers
            .iter()
            .filter(|l| l.kind.is_conv())
            .filter_map(|l| {
                let run = layers[..=l.index]
                    .iter()
                    .rev()
                    .take_while(|p| {
                        !(p.kind.is_pooling()
                            || p.kind == LayerKind::Flatten
                            || p.kind == LayerKind::Dense)
                    })
                    .filter(|p| p.kind.is_conv())
                    .count();
                rules::ids(l, run)
            })
            .collect(),
        RuleId::ICL if cnn_image => {
            let conv2d = layers.iter().filter(|l| l.kind == LayerKind::Conv2d).count();
            let last = layers.iter().rev().find(|l| l.kind.is_conv()).unwrap();
            rules::icl(ds.input_type, conv2d, last).into_iter().collect()
        }
        RuleId::IFL if cnn_image => {
            let dense: Vec<&LayerSpec> =
                layers.iter().filter(|l| l.kind == LayerKind::Dense).collect();
            dense
                .get(rules::MAX_DENSE_IN_CNN)
                .and_then(|d| rules::ifl(dense.len(), d))
                .into_iter()
                .collect()
        }
        RuleId::ICL | RuleId::IFL => Vec::new(),
        RuleId::INF => layers
            .iter()
            .filter(|l| l.kind.is_conv())
            .filter_map(|l| rules::inf(ds.input_type, l))
            .collect(),
        RuleId::INN => {
            let shapes = infer_shapes(spec);
            let hidden: Vec<&LayerSpec> = layers
                .iter()
                .filter(|l| l.kind == LayerKind::Dense && Some(l.index) != output)
                .collect();
            let mut found: Vec<Finding> = hidden
                .iter()
                .filter_map(|l| {
                    let size = if l.index == 0 {
                        ds.input_shape.as_ref().and_then(|s| s.last().copied())
                    } else {
                        shapes[l.index - 1].feature_size()
                    };
                    size.and_then(|s| rules::inn_width(l, s))
                })
                .collect();
            if layers.iter().any(|l| l.kind.is_conv()) {
                found.extend(hidden.windows(2).filter_map(|w| rules::inn_order(w[0], w[1])));
            }
            found
        }
        RuleId::IDN => ds.value_range.and_then(rules::idn).into_iter().collect(),
        RuleId::LLM => {
            let Some(out) = output else { return Vec::new() };
            let (act, src) = match layers[out].inline_activation.clone() {
                Some(a) if a != Activation::Linear => (a, out),
                _ => layers[out + 1..]
                    .iter()
                    .find(|l| l.kind == LayerKind::Activation)
                    .map(|l| (l.activation_name.clone().unwrap(), l.index))
                    .unwrap_or((Activation::Linear, out)),
            };
            rules::llm(
                ds.problem_type,
                &act,
                &layers[src],
                spec.learner().loss.as_ref(),
                strict_llm,
            )
        }
        RuleId::LOB => spec.learner().learning_rate.and_then(rules::lob).into_iter().collect(),
        RuleId::IBS => spec.learner().batch_size.and_then(rules::ibs).into_iter().collect(),
    }
}

/// The oracle's view of a full report: every enabled rule, severities
/// applied, in no particular order.
pub fn oracle_findings(spec: &ModelSpec, config: &AnalysisConfig) -> Vec<Finding> {
    RuleId::ALL
        .iter()
        .flat_map(|&rule| {
            let severity = match config.setting(rule) {
                RuleSetting::Off => return Vec::new(),
                RuleSetting::Error => Severity::Error,
                RuleSetting::Warning => Severity::Warning,
            };
            oracle_rule(spec, rule, config.strict_llm())
                .into_iter()
                .map(|mut f| {
                    f.severity = severity;
                    f
                })
                .collect()
        })
        .collect()
}

/// Canonical sort key so two finding lists can be compared as multisets.
pub fn multiset(findings: &[Finding]) -> Vec<String> {
    let mut keys: Vec<String> = findings
        .iter()
        .map(|f| serde_json::to_string(f).unwrap())
        .collect();
    keys.sort();
    keys
}

const ACTIVATIONS: [&str; 7] = ["relu", "softmax", "sigmoid", "tanh", "linear", "elu", "swish"];
const LOSSES: [&str; 6] = [
    "binary_crossentropy",
    "categorical_crossentropy",
    "sparse_categorical_crossentropy",
    "mse",
    "mae",
    "hinge",
];

fn pick_activation(rng: &mut ChaCha8Rng) -> Activation {
    Activation::from(ACTIVATIONS.choose(rng).unwrap().to_string())
}

fn random_layer(rng: &mut ChaCha8Rng, conv_rank: usize) -> LayerSpec {
    let inline = |rng: &mut ChaCha8Rng, layer: LayerSpec| {
        if rng.gen_bool(0.4) {
            layer.with_inline(pick_activation(rng))
        } else {
            layer
        }
    };
    match rng.gen_range(0..100) {
        0..=24 => {
            let filters = *[1, 5, 6, 15, 16, 32, 64, 256, 257, 512, 513, 700].choose(rng).unwrap();
            let k = rng.gen_range(1..=5);
            let mut l = if conv_rank == 1 {
                LayerSpec::conv1d(filters, k)
            } else {
                LayerSpec::conv2d(filters, [k, k])
            };
            if rng.gen_bool(0.5) {
                l = l.with_padding(Padding::Same);
            }
            inline(rng, l)
        }
        25..=42 => {
            let units = rng.gen_range(1..=600);
            inline(rng, LayerSpec::dense(units))
        }
        43..=59 => LayerSpec::activation(pick_activation(rng)),
        60..=69 => LayerSpec::dropout(rng.gen_range(0.0..=0.9)),
        70..=79 => LayerSpec::batch_norm(),
        80..=87 => {
            if conv_rank == 1 {
                let mut l = LayerSpec::new(LayerKind::MaxPooling1d);
                l.pool_size = Some(vec![2]);
                l
            } else {
                LayerSpec::max_pool2d([2, 2])
            }
        }
        88..=95 => LayerSpec::flatten(),
        _ => LayerSpec::new(LayerKind::from("GlobalAveragePooling2D".to_owned())),
    }
}

/// A valid spec drawn from a deterministic stream seeded by `seed`.
pub fn random_spec(seed: u64) -> ModelSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let input = *[InputType::ColorImages, InputType::GrayscaleImages, InputType::Tabular]
        .choose(&mut rng)
        .unwrap();
    let problem = *[
        ProblemType::BinaryClassification,
        ProblemType::MulticlassClassification,
        ProblemType::MultilabelClassification,
        ProblemType::Regression,
    ]
    .choose(&mut rng)
    .unwrap();
    let mut dataset = DatasetProfile::new(input, problem);
    let conv_rank = if input == InputType::Tabular { 1 } else { 2 };
    if rng.gen_bool(0.7) {
        dataset.input_shape = Some(match input {
            InputType::Tabular => vec![rng.gen_range(1..=64)],
            _ => {
                let side = rng.gen_range(4..=64);
                vec![side, side, u64::from(dataset.channels)]
            }
        });
    }
    if rng.gen_bool(0.7) {
        let (min, max) = *[(0.0, 1.0), (-1.0, 1.0), (0.0, 255.0), (-0.5, 0.5), (-2.0, 3.0)]
            .choose(&mut rng)
            .unwrap();
        dataset.value_range = Some(ValueRange { min, max });
    }

    let len = rng.gen_range(1..=14);
    let mut layers: Vec<LayerSpec> = (0..len).map(|_| random_layer(&mut rng, conv_rank)).collect();
    if rng.gen_bool(0.3) {
        let at = rng.gen_range(0..=layers.len());
        let block: Vec<LayerSpec> = (0..rng.gen_range(3..=7))
            .map(|_| match rng.gen_range(0..4) {
                0 => LayerSpec::batch_norm(),
                _ => LayerSpec::conv2d(32, [3, 3]).with_padding(Padding::Same),
            })
            .collect();
        layers.splice(at..at, block);
    }
    if rng.gen_bool(0.8) {
        let out = LayerSpec::dense(rng.gen_range(1..=16));
        layers.push(if rng.gen_bool(0.6) {
            out.with_inline(pick_activation(&mut rng))
        } else {
            out
        });
        if rng.gen_bool(0.3) {
            layers.push(LayerSpec::activation(pick_activation(&mut rng)));
        }
    }

    let learner = LearnerSpec {
        loss: rng
            .gen_bool(0.7)
            .then(|| Loss::from(LOSSES.choose(&mut rng).unwrap().to_string())),
        optimizer: Some("adam".to_owned()),
        learning_rate: rng
            .gen_bool(0.7)
            .then(|| *[0.1, 0.011, 0.01, 0.001, 0.0001, 0.00009].choose(&mut rng).unwrap()),
        batch_size: rng
            .gen_bool(0.7)
            .then(|| *[1, 16, 31, 32, 128, 256, 257, 1024].choose(&mut rng).unwrap()),
        epochs: rng.gen_bool(0.5).then(|| rng.gen_range(1..=100)),
    };
    ModelSpec::new(dataset, layers, learner).expect("generator only builds valid specs")
}
