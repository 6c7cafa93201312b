//! Framework-neutral model description: dataset profile, ordered layers and
//! learner configuration.

mod document;
mod shapes;
mod vocab;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use document::{
    parse_model_spec, DatasetDocument, ModelDocument, ParseOptions, SpecError, DOCUMENT_VERSION,
};
pub use shapes::{infer_shapes, Shape};
pub use vocab::{
    canonicalize_activation, canonicalize_layer_kind, canonicalize_loss, Activation, LayerKind,
    Loss,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputType {
    ColorImages,
    GrayscaleImages,
    Tabular,
}

impl InputType {
    pub fn is_image(self) -> bool {
        matches!(self, InputType::ColorImages | InputType::GrayscaleImages)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            InputType::ColorImages => "color_images",
            InputType::GrayscaleImages => "grayscale_images",
            InputType::Tabular => "tabular",
        }
    }
}

impl std::str::FromStr for InputType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "color_images" => Ok(InputType::ColorImages),
            "grayscale_images" => Ok(InputType::GrayscaleImages),
            "tabular" => Ok(InputType::Tabular),
            other => Err(format!(
                "unknown input type `{other}` (expected color_images, grayscale_images or tabular)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemType {
    BinaryClassification,
    MulticlassClassification,
    MultilabelClassification,
    Regression,
}

impl ProblemType {
    pub fn is_classification(self) -> bool {
        self != ProblemType::Regression
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemType::BinaryClassification => "binary_classification",
            ProblemType::MulticlassClassification => "multiclass_classification",
            ProblemType::MultilabelClassification => "multilabel_classification",
            ProblemType::Regression => "regression",
        }
    }
}

impl std::str::FromStr for ProblemType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "binary_classification" => Ok(ProblemType::BinaryClassification),
            "multiclass_classification" => Ok(ProblemType::MulticlassClassification),
            "multilabel_classification" => Ok(ProblemType::MultilabelClassification),
            "regression" => Ok(ProblemType::Regression),
            other => Err(format!("unknown problem type `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Padding {
    Same,
    Valid,
}

/// Where a layer was declared in the original program.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SourceLocation {
    pub file: String,
    pub line: u32,
}

impl fmt::Display for SourceLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.file, self.line)
    }
}

/// Observed range of training-input values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueRange {
    pub min: f64,
    pub max: f64,
}

impl ValueRange {
    pub fn contained_in(&self, lo: f64, hi: f64) -> bool {
        self.min >= lo && self.max <= hi
    }
}

/// Training-dataset characteristics the rules consume.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetProfile {
    pub input_type: InputType,
    /// 3 for color images, 1 for grayscale images and tabular data.
    pub channels: u32,
    pub problem_type: ProblemType,
    pub num_classes: Option<u32>,
    /// Per-sample shape without the batch dimension, channels last.
    pub input_shape: Option<Vec<u64>>,
    pub value_range: Option<ValueRange>,
    pub training_set_size: Option<u64>,
}

impl DatasetProfile {
    /// A profile with the channel count implied by `input_type` and every
    /// optional characteristic unset.
    pub fn new(input_type: InputType, problem_type: ProblemType) -> Self {
        DatasetProfile {
            input_type,
            channels: if input_type == InputType::ColorImages { 3 } else { 1 },
            problem_type,
            num_classes: match problem_type {
                ProblemType::BinaryClassification => Some(2),
                ProblemType::Regression => None,
                _ => Some(10),
            },
            input_shape: None,
            value_range: None,
            training_set_size: None,
        }
    }
}

/// One layer of the model with the hyper-parameters the rules look at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub index: usize,
    pub kind: LayerKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filters: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_size: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strides: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub padding: Option<Padding>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool_size: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inline_activation: Option<Activation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub activation_name: Option<Activation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_location: Option<SourceLocation>,
}

impl LayerSpec {
    /// A layer of `kind` with no hyper-parameters set. The index is assigned
    /// when the layer is placed into a [`ModelSpec`].
    pub fn new(kind: LayerKind) -> Self {
        LayerSpec {
            index: 0,
            kind,
            filters: None,
            kernel_size: None,
            strides: None,
            padding: None,
            pool_size: None,
            units: None,
            inline_activation: None,
            activation_name: None,
            rate: None,
            source_location: None,
        }
    }

    pub fn conv2d(filters: u64, kernel: [u64; 2]) -> Self {
        LayerSpec {
            filters: Some(filters),
            kernel_size: Some(kernel.to_vec()),
            ..LayerSpec::new(LayerKind::Conv2d)
        }
    }

    pub fn conv1d(filters: u64, kernel: u64) -> Self {
        LayerSpec {
            filters: Some(filters),
            kernel_size: Some(vec![kernel]),
            ..LayerSpec::new(LayerKind::Conv1d)
        }
    }

    pub fn dense(units: u64) -> Self {
        LayerSpec {
            units: Some(units),
            ..LayerSpec::new(LayerKind::Dense)
        }
    }

    pub fn activation(activation: Activation) -> Self {
        LayerSpec {
            activation_name: Some(activation),
            ..LayerSpec::new(LayerKind::Activation)
        }
    }

    pub fn dropout(rate: f64) -> Self {
        LayerSpec {
            rate: Some(rate),
            ..LayerSpec::new(LayerKind::Dropout)
        }
    }

    pub fn max_pool2d(pool: [u64; 2]) -> Self {
        LayerSpec {
            pool_size: Some(pool.to_vec()),
            ..LayerSpec::new(LayerKind::MaxPooling2d)
        }
    }

    pub fn batch_norm() -> Self {
        LayerSpec::new(LayerKind::BatchNormalization)
    }

    pub fn flatten() -> Self {
        LayerSpec::new(LayerKind::Flatten)
    }

    pub fn with_inline(mut self, activation: Activation) -> Self {
        self.inline_activation = Some(activation);
        self
    }

    pub fn with_padding(mut self, padding: Padding) -> Self {
        self.padding = Some(padding);
        self
    }

    pub fn with_strides(mut self, strides: Vec<u64>) -> Self {
        self.strides = Some(strides);
        self
    }

    pub fn at(mut self, file: &str, line: u32) -> Self {
        self.source_location = Some(SourceLocation {
            file: file.to_owned(),
            line,
        });
        self
    }

    /// The inline activation when it contributes a non-linearity.
    pub fn nonlinear_inline(&self) -> Option<&Activation> {
        self.inline_activation.as_ref().filter(|a| a.is_nonlinear())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LearnerSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loss: Option<Loss>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub learning_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epochs: Option<u64>,
}

/// A validated model description. Construct it with [`parse_model_spec`],
/// [`ModelDocument::validate`] or [`ModelSpec::new`]; all three enforce the
/// same invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    dataset: DatasetProfile,
    layers: Vec<LayerSpec>,
    learner: LearnerSpec,
    metadata: BTreeMap<String, String>,
}

impl ModelSpec {
    /// Builds and validates a spec; layer indices are taken from position.
    pub fn new(
        dataset: DatasetProfile,
        mut layers: Vec<LayerSpec>,
        learner: LearnerSpec,
    ) -> Result<Self, SpecError> {
        for (i, layer) in layers.iter_mut().enumerate() {
            layer.index = i;
        }
        ModelDocument::from_parts(&dataset, layers, learner, BTreeMap::new()).validate()
    }

    pub fn dataset(&self) -> &DatasetProfile {
        &self.dataset
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    pub fn learner(&self) -> &LearnerSpec {
        &self.learner
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn with_metadata(mut self, key: &str, value: &str) -> Self {
        self.metadata.insert(key.to_owned(), value.to_owned());
        self
    }

    /// Index of the output layer: the last dense layer.
    pub fn output_layer(&self) -> Option<usize> {
        self.layers.iter().rposition(|l| l.kind == LayerKind::Dense)
    }

    /// The output layer's activation together with the index of the layer
    /// that supplies it. A non-linear inline activation wins, then the first
    /// activation layer after the output layer, else `linear` from the
    /// output layer itself.
    pub fn effective_output_activation(&self) -> Option<(Activation, usize)> {
        let out = self.output_layer()?;
        if let Some(a) = self.layers[out].nonlinear_inline() {
            return Some((a.clone(), out));
        }
        let trailing = self.layers[out + 1..]
            .iter()
            .find(|l| l.kind == LayerKind::Activation)
            .and_then(|l| l.activation_name.clone().map(|a| (a, l.index)));
        Some(trailing.unwrap_or((Activation::Linear, out)))
    }

    pub fn has_conv(&self) -> bool {
        self.layers.iter().any(|l| l.kind.is_conv())
    }

    pub fn to_document(&self) -> ModelDocument {
        ModelDocument::from_parts(
            &self.dataset,
            self.layers.clone(),
            self.learner.clone(),
            self.metadata.clone(),
        )
    }

    /// Deterministic compact JSON encoding of the spec.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("model documents always serialize")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_document())
            .expect("model documents always serialize")
    }
}
