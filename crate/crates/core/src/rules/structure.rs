//! Rules over the order of layer calls.

use crate::model_spec::{Activation, InputType, LayerSpec, ProblemType};
use crate::report::Finding;

use super::{RuleId, MAX_CONV_RUN, MAX_DENSE_IN_CNN, MIN_COLOR_CONV, MIN_GRAYSCALE_CONV};

/// What follows one dense or convolution layer up to the next dense,
/// convolution or pooling layer (or the end of the model).
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorSegment<'a> {
    pub anchor: &'a LayerSpec,
    pub is_output: bool,
    /// Non-linear activations in application order, inline activation first.
    pub activations: Vec<Activation>,
    pub dropout_count: usize,
    /// The layer right after the anchor is a batch normalization.
    pub normalized_first: bool,
}

fn output_activation_for(problem: ProblemType) -> &'static str {
    match problem {
        ProblemType::MulticlassClassification => "softmax",
        _ => "sigmoid",
    }
}

/// Missing or redundant activation on a dense or convolution layer.
pub fn cnl(segment: &AnchorSegment<'_>, problem: ProblemType) -> Option<Finding> {
    let anchor = segment.anchor;
    match segment.activations.len() {
        0 if segment.is_output && problem == ProblemType::Regression => None,
        0 if segment.is_output => Some(Finding::at_layer(
            RuleId::CNL,
            anchor,
            format!("output {} layer has no activation function", anchor.kind),
            format!(
                "Add last layer activation function → Use {}",
                output_activation_for(problem)
            ),
        )),
        0 => Some(Finding::at_layer(
            RuleId::CNL,
            anchor,
            format!("hidden {} layer has no activation function", anchor.kind),
            "Add activation function in hidden layers → Use relu".to_owned(),
        )),
        1 => None,
        n => {
            let names: Vec<&str> = segment.activations.iter().map(Activation::as_str).collect();
            let last = names[n - 1];
            Some(Finding::at_layer(
                RuleId::CNL,
                anchor,
                format!(
                    "{} layer has {n} activation functions applied ({})",
                    anchor.kind,
                    names.join(", ")
                ),
                format!("Remove last {last} activation layer → Keep one activation per layer"),
            ))
        }
    }
}

/// Missing dropout after an activated hidden layer, or more than one dropout
/// for the same layer.
pub fn mrd(segment: &AnchorSegment<'_>) -> Option<Finding> {
    let anchor = segment.anchor;
    if segment.dropout_count > 1 {
        return Some(Finding::at_layer(
            RuleId::MRD,
            anchor,
            format!(
                "{} dropout layers follow the same {} layer",
                segment.dropout_count, anchor.kind
            ),
            "Remove redundant dropout layers → Keep one dropout per layer".to_owned(),
        ));
    }
    if !segment.is_output && !segment.activations.is_empty() && segment.dropout_count == 0 {
        return Some(Finding::at_layer(
            RuleId::MRD,
            anchor,
            format!("no dropout after the activation of hidden {} layer", anchor.kind),
            "Add dropout layers after hidden layers → Add Dropout after the activation".to_owned(),
        ));
    }
    None
}

/// Batch normalization missing between a hidden layer and its activation.
pub fn mnl(segment: &AnchorSegment<'_>) -> Option<Finding> {
    if segment.is_output {
        return None;
    }
    let anchor = segment.anchor;
    if let Some(inline) = anchor.nonlinear_inline() {
        return Some(Finding::at_layer(
            RuleId::MNL,
            anchor,
            format!(
                "{} layer applies inline {inline} activation with no batch normalization before it",
                anchor.kind
            ),
            "Add Batch Normalization → Move the activation into a separate layer after BatchNormalization"
                .to_owned(),
        ));
    }
    if !segment.normalized_first {
        return Some(Finding::at_layer(
            RuleId::MNL,
            anchor,
            format!("{} layer is not followed by batch normalization", anchor.kind),
            "Add Batch Normalization → Insert BatchNormalization before the activation".to_owned(),
        ));
    }
    None
}

/// Fires exactly when a convolution run reaches `MAX_CONV_RUN + 1`, so each
/// offending run is reported once, at its first excess layer.
pub fn ids(layer: &LayerSpec, consecutive_conv_run: usize) -> Option<Finding> {
    (consecutive_conv_run == MAX_CONV_RUN + 1).then(|| {
        Finding::at_layer(
            RuleId::IDS,
            layer,
            format!("more than {MAX_CONV_RUN} consecutive convolution layers without pooling"),
            "Add pooling layer → Insert MaxPooling after at most 4 convolution layers".to_owned(),
        )
    })
}

/// Too few 2D convolution layers for the image type. `located` is the layer
/// the finding points at (the last convolution layer).
pub fn icl(input_type: InputType, conv2d_count: usize, located: &LayerSpec) -> Option<Finding> {
    let min = match input_type {
        InputType::ColorImages => MIN_COLOR_CONV,
        InputType::GrayscaleImages => MIN_GRAYSCALE_CONV,
        InputType::Tabular => return None,
    };
    (conv2d_count < min).then(|| {
        Finding::at_layer(
            RuleId::ICL,
            located,
            format!(
                "only {conv2d_count} convolution layer(s) for {}; at least {min} expected",
                input_type.as_str().replace('_', " ")
            ),
            format!("Increase network depth → Use at least {min} convolution layers"),
        )
    })
}

/// Too many fully connected layers in a CNN. `located` is the first dense
/// layer beyond the limit.
pub fn ifl(dense_count: usize, located: &LayerSpec) -> Option<Finding> {
    (dense_count > MAX_DENSE_IN_CNN).then(|| {
        Finding::at_layer(
            RuleId::IFL,
            located,
            format!("CNN has {dense_count} fully connected layers"),
            format!(
                "Reduce the number of fully connected layers → Use at most {MAX_DENSE_IN_CNN}"
            ),
        )
    })
}
