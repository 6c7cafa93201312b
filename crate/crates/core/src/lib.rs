//! Static linter for structural bugs in deep-learning model configurations.
//!
//! A model is described by a framework-neutral JSON document (dataset
//! profile, ordered layers, learner settings). [`engine::analyze`] checks it
//! against twelve rules covering activations, filter and unit counts,
//! downsampling, dropout, normalization, depth, input scaling, output/loss
//! pairing, learning rate and batch size, and returns a [`report::Report`]
//! of localized findings with fix suggestions.
//!
//! ```
//! use theia_lint::engine::{analyze, AnalysisConfig};
//! use theia_lint::model_spec::{parse_model_spec, ParseOptions};
//!
//! let doc = r#"{"version":1,
//!   "dataset":{"input_type":"tabular","problem_type":"regression"},
//!   "layers":[{"index":0,"kind":"dense","units":1}],
//!   "learner":{"loss":"mse","learning_rate":0.001,"batch_size":32}}"#;
//! let spec = parse_model_spec(doc, ParseOptions::default()).unwrap();
//! let report = analyze(&spec, &AnalysisConfig::default());
//! assert!(report.findings.is_empty());
//! ```

pub mod cli;
pub mod engine;
pub mod model_spec;
pub mod report;
pub mod rules;
