//! Canonical layer, activation and loss vocabularies.
//!
//! Frameworks spell the same concept differently (`Conv2D`, `Conv2d`,
//! `conv2d`). Every name is folded to lowercase with underscores removed
//! before lookup; anything unrecognized is carried through verbatim as
//! `Other`, so canonicalization never fails.

use std::fmt;

use serde::{Deserialize, Serialize};

fn fold(raw: &str) -> String {
    raw.trim()
        .chars()
        .filter(|c| *c != '_' && *c != '-')
        .flat_map(char::to_lowercase)
        .collect()
}

/// Canonical layer kind.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum LayerKind {
    Conv1d,
    Conv2d,
    Dense,
    MaxPooling1d,
    MaxPooling2d,
    AveragePooling1d,
    AveragePooling2d,
    Dropout,
    BatchNormalization,
    Activation,
    Flatten,
    Other(String),
}

/// Maps a framework layer name onto the canonical vocabulary.
pub fn canonicalize_layer_kind(raw_name: &str) -> LayerKind {
    match fold(raw_name).as_str() {
        "conv1d" | "convolution1d" => LayerKind::Conv1d,
        "conv2d" | "convolution2d" => LayerKind::Conv2d,
        "dense" | "linear" => LayerKind::Dense,
        "maxpooling1d" | "maxpool1d" => LayerKind::MaxPooling1d,
        "maxpooling2d" | "maxpool2d" => LayerKind::MaxPooling2d,
        "averagepooling1d" | "avgpool1d" | "avgpooling1d" => LayerKind::AveragePooling1d,
        "averagepooling2d" | "avgpool2d" | "avgpooling2d" => LayerKind::AveragePooling2d,
        "dropout" | "dropout1d" | "dropout2d" => LayerKind::Dropout,
        "batchnormalization" | "batchnorm" | "batchnorm1d" | "batchnorm2d" => {
            LayerKind::BatchNormalization
        }
        "activation" => LayerKind::Activation,
        "flatten" => LayerKind::Flatten,
        _ => LayerKind::Other(raw_name.to_owned()),
    }
}

impl LayerKind {
    pub fn as_str(&self) -> &str {
        match self {
            LayerKind::Conv1d => "conv1d",
            LayerKind::Conv2d => "conv2d",
            LayerKind::Dense => "dense",
            LayerKind::MaxPooling1d => "maxpooling1d",
            LayerKind::MaxPooling2d => "maxpooling2d",
            LayerKind::AveragePooling1d => "averagepooling1d",
            LayerKind::AveragePooling2d => "averagepooling2d",
            LayerKind::Dropout => "dropout",
            LayerKind::BatchNormalization => "batch_normalization",
            LayerKind::Activation => "activation",
            LayerKind::Flatten => "flatten",
            LayerKind::Other(name) => name,
        }
    }

    pub fn is_conv(&self) -> bool {
        matches!(self, LayerKind::Conv1d | LayerKind::Conv2d)
    }

    pub fn is_pooling(&self) -> bool {
        matches!(
            self,
            LayerKind::MaxPooling1d
                | LayerKind::MaxPooling2d
                | LayerKind::AveragePooling1d
                | LayerKind::AveragePooling2d
        )
    }

    /// Dense and convolution layers: the layers activations, dropouts and
    /// normalization are attributed to.
    pub fn is_anchor(&self) -> bool {
        self.is_conv() || *self == LayerKind::Dense
    }

    /// Number of spatial axes for convolution and pooling kinds.
    pub fn spatial_rank(&self) -> Option<usize> {
        match self {
            LayerKind::Conv1d | LayerKind::MaxPooling1d | LayerKind::AveragePooling1d => Some(1),
            LayerKind::Conv2d | LayerKind::MaxPooling2d | LayerKind::AveragePooling2d => Some(2),
            _ => None,
        }
    }
}

impl From<String> for LayerKind {
    fn from(raw: String) -> Self {
        canonicalize_layer_kind(&raw)
    }
}

impl From<LayerKind> for String {
    fn from(kind: LayerKind) -> Self {
        kind.as_str().to_owned()
    }
}

impl fmt::Display for LayerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Canonical activation function name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum Activation {
    Relu,
    Sigmoid,
    Softmax,
    Tanh,
    Linear,
    Other(String),
}

pub fn canonicalize_activation(raw_name: &str) -> Activation {
    match fold(raw_name).as_str() {
        "relu" => Activation::Relu,
        "sigmoid" => Activation::Sigmoid,
        "softmax" => Activation::Softmax,
        "tanh" => Activation::Tanh,
        "linear" | "identity" => Activation::Linear,
        _ => Activation::Other(raw_name.to_owned()),
    }
}

impl Activation {
    pub fn as_str(&self) -> &str {
        match self {
            Activation::Relu => "relu",
            Activation::Sigmoid => "sigmoid",
            Activation::Softmax => "softmax",
            Activation::Tanh => "tanh",
            Activation::Linear => "linear",
            Activation::Other(name) => name,
        }
    }

    /// `linear` is the identity and adds no non-linearity.
    pub fn is_nonlinear(&self) -> bool {
        *self != Activation::Linear
    }
}

impl From<String> for Activation {
    fn from(raw: String) -> Self {
        canonicalize_activation(&raw)
    }
}

impl From<Activation> for String {
    fn from(a: Activation) -> Self {
        a.as_str().to_owned()
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Canonical loss function name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum Loss {
    BinaryCrossentropy,
    CategoricalCrossentropy,
    SparseCategoricalCrossentropy,
    Mse,
    Mae,
    Other(String),
}

pub fn canonicalize_loss(raw_name: &str) -> Loss {
    match fold(raw_name).as_str() {
        "binarycrossentropy" | "bce" | "bceloss" => Loss::BinaryCrossentropy,
        "categoricalcrossentropy" => Loss::CategoricalCrossentropy,
        "sparsecategoricalcrossentropy" => Loss::SparseCategoricalCrossentropy,
        "mse" | "meansquarederror" | "mseloss" => Loss::Mse,
        "mae" | "meanabsoluteerror" | "l1loss" => Loss::Mae,
        _ => Loss::Other(raw_name.to_owned()),
    }
}

impl Loss {
    pub fn as_str(&self) -> &str {
        match self {
            Loss::BinaryCrossentropy => "binary_crossentropy",
            Loss::CategoricalCrossentropy => "categorical_crossentropy",
            Loss::SparseCategoricalCrossentropy => "sparse_categorical_crossentropy",
            Loss::Mse => "mse",
            Loss::Mae => "mae",
            Loss::Other(name) => name,
        }
    }
}

impl From<String> for Loss {
    fn from(raw: String) -> Self {
        canonicalize_loss(&raw)
    }
}

impl From<Loss> for String {
    fn from(l: Loss) -> Self {
        l.as_str().to_owned()
    }
}

impl fmt::Display for Loss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
