//! Rules over individual hyper-parameter values.

use crate::model_spec::{Activation, InputType, LayerSpec, Loss, ProblemType, ValueRange};
use crate::report::Finding;

use super::{RuleId, BATCH_SIZE_BOUNDS, COLOR_FILTERS, GRAYSCALE_FILTERS, LEARNING_RATE_BOUNDS};

/// Filter count outside the range suited to the input type.
pub fn inf(input_type: InputType, layer: &LayerSpec) -> Option<Finding> {
    let filters = layer.filters?;
    let (lo, hi) = match input_type {
        InputType::ColorImages => COLOR_FILTERS,
        InputType::GrayscaleImages | InputType::Tabular => GRAYSCALE_FILTERS,
    };
    let data = input_type.as_str().replace('_', " ");
    if filters < lo {
        Some(Finding::at_layer(
            RuleId::INF,
            layer,
            format!("{filters} filters is too few for {data} (minimum {lo})"),
            format!("Increase convolution layer filters while going deeper → Use at least {lo} filters"),
        ))
    } else if filters > hi {
        Some(Finding::at_layer(
            RuleId::INF,
            layer,
            format!("{filters} filters is too many for {data} (maximum {hi})"),
            format!("Reduce convolution layer filters → Use at most {hi} filters"),
        ))
    } else {
        None
    }
}

/// A hidden dense layer wider than the input it receives.
pub fn inn_width(layer: &LayerSpec, input_size: u64) -> Option<Finding> {
    let units = layer.units?;
    (units > input_size).then(|| {
        Finding::at_layer(
            RuleId::INN,
            layer,
            format!("{units} units exceed the layer's input size of {input_size}"),
            format!("Decrease units in dense layer → Use at most {input_size} units"),
        )
    })
}

/// In a CNN, a hidden dense layer wider than the hidden dense layer before it.
pub fn inn_order(previous: &LayerSpec, layer: &LayerSpec) -> Option<Finding> {
    let (prev, units) = (previous.units?, layer.units?);
    (units > prev).then(|| {
        Finding::at_layer(
            RuleId::INN,
            layer,
            format!(
                "{units} units follow a {prev}-unit dense layer (layer {}); widths should not grow toward the output",
                previous.index
            ),
            format!("Decrease units in dense layers progressively → Use at most {prev} units"),
        )
    })
}

/// Input values outside both [0, 1] and [-1, 1].
pub fn idn(range: ValueRange) -> Option<Finding> {
    let normalized = range.contained_in(0.0, 1.0) || range.contained_in(-1.0, 1.0);
    (!normalized).then(|| {
        Finding::global(
            RuleId::IDN,
            format!(
                "training inputs range over [{}, {}], outside [0, 1] and [-1, 1]",
                range.min, range.max
            ),
            "Normalize the data → Scale inputs into [0, 1] or [-1, 1]".to_owned(),
        )
    })
}

fn expected_losses(problem: ProblemType, strict: bool) -> &'static [Loss] {
    match problem {
        ProblemType::BinaryClassification => &[Loss::BinaryCrossentropy],
        ProblemType::MulticlassClassification if strict => &[Loss::CategoricalCrossentropy],
        ProblemType::MulticlassClassification => {
            &[Loss::CategoricalCrossentropy, Loss::SparseCategoricalCrossentropy]
        }
        ProblemType::Regression => &[Loss::Mse, Loss::Mae],
        ProblemType::MultilabelClassification => &[],
    }
}

/// Output activation and loss that do not match the problem type. One
/// finding per mismatched component; `loss` of `None` checks only the
/// activation. Multilabel problems have no mapping and never fire.
///
/// `activation_layer` is the layer that supplies the effective activation.
pub fn llm(
    problem: ProblemType,
    activation: &Activation,
    activation_layer: &LayerSpec,
    loss: Option<&Loss>,
    strict: bool,
) -> Vec<Finding> {
    let expected_activation = match problem {
        ProblemType::BinaryClassification => Activation::Sigmoid,
        ProblemType::MulticlassClassification => Activation::Softmax,
        ProblemType::Regression => Activation::Linear,
        ProblemType::MultilabelClassification => return Vec::new(),
    };
    let problem_name = problem.as_str().replace('_', " ");
    let mut findings = Vec::new();

    if *activation != expected_activation {
        let fix = if problem == ProblemType::Regression {
            format!("Change last layer activation function → Remove last {activation} activation layer")
        } else {
            format!("Change last layer activation function → Use {expected_activation}")
        };
        findings.push(Finding::at_layer(
            RuleId::LLM,
            activation_layer,
            format!("output activation {activation} does not suit {problem_name}"),
            fix,
        ));
    }

    if let Some(loss) = loss {
        let allowed = expected_losses(problem, strict);
        if !allowed.contains(loss) {
            let names: Vec<&str> = allowed.iter().map(Loss::as_str).collect();
            findings.push(Finding::global(
                RuleId::LLM,
                format!("loss {loss} does not suit {problem_name}"),
                format!("Change loss function → Use {}", names.join(" or ")),
            ));
        }
    }
    findings
}

/// Learning rate outside [0.0001, 0.01].
pub fn lob(learning_rate: f64) -> Option<Finding> {
    let (lo, hi) = LEARNING_RATE_BOUNDS;
    if learning_rate > hi {
        Some(Finding::global(
            RuleId::LOB,
            format!("learning rate {learning_rate} is above {hi}"),
            format!("Reduce the learning rate → Use a value between {lo} and {hi}"),
        ))
    } else if learning_rate < lo {
        Some(Finding::global(
            RuleId::LOB,
            format!("learning rate {learning_rate} is below {lo}"),
            format!("Increase the learning rate → Use a value between {lo} and {hi}"),
        ))
    } else {
        None
    }
}

/// Batch size outside [32, 256].
pub fn ibs(batch_size: u64) -> Option<Finding> {
    let (lo, hi) = BATCH_SIZE_BOUNDS;
    if batch_size < lo {
        Some(Finding::global(
            RuleId::IBS,
            format!("batch size {batch_size} is below {lo}"),
            format!("Increase the batch size → Start at {lo} and double up to {hi}"),
        ))
    } else if batch_size > hi {
        Some(Finding::global(
            RuleId::IBS,
            format!("batch size {batch_size} is above {hi}"),
            format!("Reduce the batch size → Use at most {hi}"),
        ))
    } else {
        None
    }
}
