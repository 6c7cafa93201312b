//! The versioned on-disk model document and its validation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{
    DatasetProfile, InputType, LayerKind, LayerSpec, LearnerSpec, ModelSpec, ProblemType,
    ValueRange,
};

pub const DOCUMENT_VERSION: u32 = 1;

/// Both variants carry the offending document path, e.g. `layers[3].rate`.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("invariant violated at {path}: {message}")]
    Invariant { path: String, message: String },
}

impl SpecError {
    fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        SpecError::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    fn invariant(path: impl Into<String>, message: impl Into<String>) -> Self {
        SpecError::Invariant {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn path(&self) -> &str {
        match self {
            SpecError::Schema { path, .. } | SpecError::Invariant { path, .. } => path,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Ignore unknown keys instead of rejecting them.
    pub lenient: bool,
}

/// Dataset section as written on disk. `input_type` and `channels` may each
/// be omitted as long as the other determines it; `problem_type` may be
/// supplied later (see the CLI overrides) but must be present at validation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DatasetDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_type: Option<InputType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channels: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem_type: Option<ProblemType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_classes: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_shape: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_range: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub training_set_size: Option<u64>,
}

/// Unvalidated model document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub version: u32,
    pub dataset: DatasetDocument,
    pub layers: Vec<LayerSpec>,
    #[serde(default)]
    pub learner: LearnerSpec,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

/// Parses and validates a model document.
pub fn parse_model_spec(text: &str, options: ParseOptions) -> Result<ModelSpec, SpecError> {
    ModelDocument::from_json(text, options)?.validate()
}

fn render_ignored(path: &serde_ignored::Path<'_>, out: &mut String) {
    use serde_ignored::Path;
    match path {
        Path::Root => {}
        Path::Seq { parent, index } => {
            render_ignored(parent, out);
            out.push_str(&format!("[{index}]"));
        }
        Path::Map { parent, key } => {
            render_ignored(parent, out);
            if !out.is_empty() {
                out.push('.');
            }
            out.push_str(key);
        }
        Path::Some { parent } | Path::NewtypeStruct { parent } | Path::NewtypeVariant { parent } => {
            render_ignored(parent, out)
        }
    }
}

impl ModelDocument {
    /// Decodes the JSON text without checking invariants. In strict mode any
    /// key outside the schema is a [`SpecError::Schema`].
    pub fn from_json(text: &str, options: ParseOptions) -> Result<Self, SpecError> {
        let mut unknown = Vec::new();
        let mut json = serde_json::Deserializer::from_str(text);
        let doc: ModelDocument = {
            let mut record = |path: serde_ignored::Path<'_>| {
                let mut rendered = String::new();
                render_ignored(&path, &mut rendered);
                unknown.push(rendered);
            };
            let de = serde_ignored::Deserializer::new(&mut json, &mut record);
            serde_path_to_error::deserialize(de).map_err(|err| {
                let path = err.path().to_string();
                SpecError::schema(path, err.into_inner().to_string())
            })?
        };
        json.end()
            .map_err(|e| SpecError::schema(".", e.to_string()))?;
        if !options.lenient {
            if let Some(path) = unknown.into_iter().next() {
                return Err(SpecError::schema(path, "unknown field"));
            }
        }
        Ok(doc)
    }

    pub(super) fn from_parts(
        dataset: &DatasetProfile,
        layers: Vec<LayerSpec>,
        learner: LearnerSpec,
        metadata: BTreeMap<String, String>,
    ) -> Self {
        ModelDocument {
            version: DOCUMENT_VERSION,
            dataset: DatasetDocument {
                input_type: Some(dataset.input_type),
                channels: Some(dataset.channels),
                problem_type: Some(dataset.problem_type),
                num_classes: dataset.num_classes,
                input_shape: dataset.input_shape.clone(),
                value_range: dataset.value_range.map(|r| (r.min, r.max)),
                training_set_size: dataset.training_set_size,
            },
            layers,
            learner,
            metadata,
        }
    }

    /// Checks every invariant and produces the validated spec.
    pub fn validate(self) -> Result<ModelSpec, SpecError> {
        if self.version != DOCUMENT_VERSION {
            return Err(SpecError::schema(
                "version",
                format!("unsupported version {} (expected {DOCUMENT_VERSION})", self.version),
            ));
        }
        let dataset = validate_dataset(self.dataset)?;
        if self.layers.is_empty() {
            return Err(SpecError::invariant("layers", "model has no layers"));
        }
        for (position, layer) in self.layers.iter().enumerate() {
            validate_layer(position, layer)?;
        }
        validate_learner(&self.learner)?;
        Ok(ModelSpec {
            dataset,
            layers: self.layers,
            learner: self.learner,
            metadata: self.metadata,
        })
    }
}

fn positive(path: &str, value: Option<u64>) -> Result<(), SpecError> {
    match value {
        Some(0) => Err(SpecError::invariant(path, "must be positive")),
        _ => Ok(()),
    }
}

fn positive_list(path: &str, value: Option<&Vec<u64>>) -> Result<(), SpecError> {
    match value {
        Some(v) if v.is_empty() => Err(SpecError::invariant(path, "must not be empty")),
        Some(v) => match v.iter().position(|d| *d == 0) {
            Some(i) => Err(SpecError::invariant(format!("{path}[{i}]"), "must be positive")),
            None => Ok(()),
        },
        None => Ok(()),
    }
}

fn validate_dataset(doc: DatasetDocument) -> Result<DatasetProfile, SpecError> {
    let channels_implied = |t: InputType| if t == InputType::ColorImages { 3 } else { 1 };
    let (input_type, channels) = match (doc.input_type, doc.channels) {
        (None, None) => {
            return Err(SpecError::schema(
                "dataset.input_type",
                "missing field (give input_type or channels)",
            ))
        }
        (None, Some(3)) => (InputType::ColorImages, 3),
        (None, Some(1)) => (InputType::GrayscaleImages, 1),
        (_, Some(c)) if c != 1 && c != 3 => {
            return Err(SpecError::invariant(
                "dataset.channels",
                format!("channels must be 1 or 3, got {c}"),
            ))
        }
        (Some(t), None) => (t, channels_implied(t)),
        (Some(t), Some(c)) => {
            if c != channels_implied(t) {
                return Err(SpecError::schema(
                    "dataset.channels",
                    format!("{c} channels conflicts with input_type {}", t.as_str()),
                ));
            }
            (t, c)
        }
        (None, Some(_)) => unreachable!("channels outside {{1, 3}} handled above"),
    };

    let problem_type = doc
        .problem_type
        .ok_or_else(|| SpecError::schema("dataset.problem_type", "missing field"))?;
    match (problem_type, doc.num_classes) {
        (ProblemType::Regression, Some(_)) => {
            return Err(SpecError::invariant(
                "dataset.num_classes",
                "regression problems have no class count",
            ))
        }
        (ProblemType::Regression, None) => {}
        (_, None) => {
            return Err(SpecError::schema(
                "dataset.num_classes",
                "missing field (required for classification)",
            ))
        }
        (_, Some(n)) if n < 2 => {
            return Err(SpecError::invariant(
                "dataset.num_classes",
                format!("classification needs at least 2 classes, got {n}"),
            ))
        }
        _ => {}
    }

    positive_list("dataset.input_shape", doc.input_shape.as_ref())?;
    positive("dataset.training_set_size", doc.training_set_size)?;

    let value_range = match doc.value_range {
        Some((min, max)) => {
            if !min.is_finite() || !max.is_finite() {
                return Err(SpecError::invariant("dataset.value_range", "bounds must be finite"));
            }
            if min > max {
                return Err(SpecError::invariant(
                    "dataset.value_range",
                    format!("min {min} exceeds max {max}"),
                ));
            }
            Some(ValueRange { min, max })
        }
        None => None,
    };

    Ok(DatasetProfile {
        input_type,
        channels,
        problem_type,
        num_classes: doc.num_classes,
        input_shape: doc.input_shape,
        value_range,
        training_set_size: doc.training_set_size,
    })
}

fn validate_layer(position: usize, layer: &LayerSpec) -> Result<(), SpecError> {
    let at = |field: &str| format!("layers[{position}].{field}");
    if layer.index != position {
        return Err(SpecError::invariant(
            at("index"),
            format!("index {} does not match position {position}", layer.index),
        ));
    }
    if matches!(&layer.kind, LayerKind::Other(name) if name.trim().is_empty()) {
        return Err(SpecError::invariant(at("kind"), "layer kind must not be empty"));
    }
    positive(&at("filters"), layer.filters)?;
    positive(&at("units"), layer.units)?;
    positive_list(&at("kernel_size"), layer.kernel_size.as_ref())?;
    positive_list(&at("strides"), layer.strides.as_ref())?;
    positive_list(&at("pool_size"), layer.pool_size.as_ref())?;

    match layer.kind {
        LayerKind::Conv1d | LayerKind::Conv2d if layer.filters.is_none() => {
            return Err(SpecError::schema(at("filters"), "missing field (required for conv layers)"));
        }
        LayerKind::Dense if layer.units.is_none() => {
            return Err(SpecError::schema(at("units"), "missing field (required for dense layers)"));
        }
        LayerKind::Dropout if layer.rate.is_none() => {
            return Err(SpecError::schema(at("rate"), "missing field (required for dropout layers)"));
        }
        LayerKind::Activation if layer.activation_name.is_none() => {
            return Err(SpecError::schema(
                at("activation_name"),
                "missing field (required for activation layers)",
            ));
        }
        _ => {}
    }
    if let Some(rate) = layer.rate {
        if !(0.0..=1.0).contains(&rate) {
            return Err(SpecError::invariant(
                at("rate"),
                format!("dropout rate {rate} outside [0, 1]"),
            ));
        }
    }
    Ok(())
}

fn validate_learner(learner: &LearnerSpec) -> Result<(), SpecError> {
    if let Some(lr) = learner.learning_rate {
        if !(lr.is_finite() && lr > 0.0) {
            return Err(SpecError::invariant(
                "learner.learning_rate",
                format!("learning rate must be positive, got {lr}"),
            ));
        }
    }
    positive("learner.batch_size", learner.batch_size)?;
    positive("learner.epochs", learner.epochs)?;
    Ok(())
}
