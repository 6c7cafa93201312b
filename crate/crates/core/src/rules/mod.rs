//! The twelve verification rules.
//!
//! Every rule is a pure function of the facts handed to it and returns the
//! findings it raises. Collecting those facts from a model (segment walking,
//! shape inference, counting) is the engine's job.

mod params;
mod structure;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use params::{ibs, idn, inf, inn_order, inn_width, llm, lob};
pub use structure::{cnl, icl, ids, ifl, mnl, mrd, AnchorSegment};

/// Lower and upper filter bounds for color images.
pub const COLOR_FILTERS: (u64, u64) = (16, 512);
/// Lower and upper filter bounds for grayscale images and tabular data.
pub const GRAYSCALE_FILTERS: (u64, u64) = (6, 256);
/// Longest allowed run of convolution layers without pooling.
pub const MAX_CONV_RUN: usize = 4;
pub const MIN_COLOR_CONV: usize = 3;
pub const MIN_GRAYSCALE_CONV: usize = 2;
pub const MAX_DENSE_IN_CNN: usize = 3;
pub const LEARNING_RATE_BOUNDS: (f64, f64) = (0.0001, 0.01);
pub const BATCH_SIZE_BOUNDS: (u64, u64) = (32, 256);

/// Rule identifiers, ordered as findings are ordered within one layer.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub enum RuleId {
    CNL,
    INF,
    INN,
    IDS,
    MRD,
    MNL,
    ICL,
    IFL,
    IDN,
    LLM,
    LOB,
    IBS,
}

impl RuleId {
    pub const ALL: [RuleId; 12] = [
        RuleId::CNL,
        RuleId::INF,
        RuleId::INN,
        RuleId::IDS,
        RuleId::MRD,
        RuleId::MNL,
        RuleId::ICL,
        RuleId::IFL,
        RuleId::IDN,
        RuleId::LLM,
        RuleId::LOB,
        RuleId::IBS,
    ];

    pub fn as_str(self) -> &'static str {
        self.descriptor().name
    }

    pub fn descriptor(self) -> &'static RuleDescriptor {
        &DESCRIPTORS[self as usize]
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RuleId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        // MDR is the alternate spelling of the dropout rule.
        let upper = if upper == "MDR" { "MRD".to_owned() } else { upper };
        RuleId::ALL
            .into_iter()
            .find(|r| r.as_str() == upper)
            .ok_or_else(|| format!("unknown rule id `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        }
    }
}

impl FromStr for Severity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "error" => Ok(Severity::Error),
            "warning" => Ok(Severity::Warning),
            other => Err(format!("unknown severity `{other}` (expected error or warning)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Technique {
    CallStrings,
    ParameterSensitive,
}

/// Dataset fields a rule's verdict may depend on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetField {
    /// Input type together with the channel count it implies.
    InputType,
    ProblemType,
    NumClasses,
    InputShape,
    ValueRange,
    TrainingSetSize,
}

#[derive(Debug)]
pub struct RuleDescriptor {
    pub id: RuleId,
    pub name: &'static str,
    pub title: &'static str,
    pub technique: Technique,
    /// Dataset characteristics used to fix this class of bug.
    pub dataset_characteristics: &'static [&'static str],
    /// Dataset fields the rule actually reads.
    pub reads: &'static [DatasetField],
    pub default_severity: Severity,
}

const ANY_DATA: &[&str] = &["any type of data/problem"];

pub static DESCRIPTORS: [RuleDescriptor; 12] = [
    RuleDescriptor {
        id: RuleId::CNL,
        name: "CNL",
        title: "Choice of Non-Linearity",
        technique: Technique::CallStrings,
        dataset_characteristics: &["number of classes", "type of problem"],
        reads: &[DatasetField::ProblemType],
        default_severity: Severity::Error,
    },
    RuleDescriptor {
        id: RuleId::INF,
        name: "INF",
        title: "Inaccurate Number of Filters",
        technique: Technique::ParameterSensitive,
        dataset_characteristics: &["type of images"],
        reads: &[DatasetField::InputType],
        default_severity: Severity::Error,
    },
    RuleDescriptor {
        id: RuleId::INN,
        name: "INN",
        title: "Incorrect Number of Neurons",
        technique: Technique::ParameterSensitive,
        dataset_characteristics: &["type of images", "type of problem"],
        reads: &[DatasetField::InputShape],
        default_severity: Severity::Error,
    },
    RuleDescriptor {
        id: RuleId::IDS,
        name: "IDS",
        title: "Insufficient Downsampling",
        technique: Technique::CallStrings,
        dataset_characteristics: ANY_DATA,
        reads: &[],
        default_severity: Severity::Error,
    },
    RuleDescriptor {
        id: RuleId::MRD,
        name: "MRD",
        title: "Missing or Redundant Dropout",
        technique: Technique::CallStrings,
        dataset_characteristics: ANY_DATA,
        reads: &[],
        default_severity: Severity::Warning,
    },
    RuleDescriptor {
        id: RuleId::MNL,
        name: "MNL",
        title: "Missing Normalization Layer",
        technique: Technique::CallStrings,
        dataset_characteristics: ANY_DATA,
        reads: &[],
        default_severity: Severity::Warning,
    },
    RuleDescriptor {
        id: RuleId::ICL,
        name: "ICL",
        title: "Inappropriate Number of Convolution Layers",
        technique: Technique::CallStrings,
        dataset_characteristics: &["type of images"],
        reads: &[DatasetField::InputType],
        default_severity: Severity::Error,
    },
    RuleDescriptor {
        id: RuleId::IFL,
        name: "IFL",
        title: "Improper Number of Fully Connected Layers",
        technique: Technique::CallStrings,
        dataset_characteristics: &["type of images"],
        reads: &[DatasetField::InputType],
        default_severity: Severity::Warning,
    },
    RuleDescriptor {
        id: RuleId::IDN,
        name: "IDN",
        title: "Input Data not Normalized",
        technique: Technique::ParameterSensitive,
        dataset_characteristics: ANY_DATA,
        reads: &[DatasetField::ValueRange],
        default_severity: Severity::Error,
    },
    RuleDescriptor {
        id: RuleId::LLM,
        name: "LLM",
        title: "Labels, Output Layer Activation, and Loss Mismatch",
        technique: Technique::ParameterSensitive,
        dataset_characteristics: &["number of classes", "type of problem"],
        reads: &[DatasetField::ProblemType],
        default_severity: Severity::Error,
    },
    RuleDescriptor {
        id: RuleId::LOB,
        name: "LOB",
        title: "Learning Rate Out-of-Bound",
        technique: Technique::ParameterSensitive,
        dataset_characteristics: ANY_DATA,
        reads: &[],
        default_severity: Severity::Error,
    },
    RuleDescriptor {
        id: RuleId::IBS,
        name: "IBS",
        title: "Inadequate Batch Size",
        technique: Technique::ParameterSensitive,
        dataset_characteristics: &["size of training set"],
        reads: &[],
        default_severity: Severity::Warning,
    },
];
