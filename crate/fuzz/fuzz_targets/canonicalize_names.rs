#![no_main]

use libfuzzer_sys::fuzz_target;
use theia_lint::model_spec::{canonicalize_activation, canonicalize_layer_kind, canonicalize_loss};

fuzz_target!(|name: &str| {
    let kind = canonicalize_layer_kind(name);
    assert_eq!(canonicalize_layer_kind(kind.as_str()), kind);

    let activation = canonicalize_activation(name);
    assert_eq!(canonicalize_activation(activation.as_str()), activation);

    let loss = canonicalize_loss(name);
    assert_eq!(canonicalize_loss(loss.as_str()), loss);
});
