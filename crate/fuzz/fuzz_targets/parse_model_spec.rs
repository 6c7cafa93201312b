#![no_main]

use libfuzzer_sys::fuzz_target;
use theia_lint::engine::{analyze, AnalysisConfig};
use theia_lint::model_spec::{parse_model_spec, ParseOptions};
use theia_lint::report::{render_machine, render_text, Report};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let strict = parse_model_spec(text, ParseOptions { lenient: false });
    let lenient = parse_model_spec(text, ParseOptions { lenient: true });

    // Anything the strict parser accepts, the lenient one accepts identically.
    if let Ok(spec) = &strict {
        assert_eq!(lenient.as_ref().ok(), Some(spec));
    }
    let Ok(spec) = lenient else {
        return;
    };

    let again = parse_model_spec(&spec.to_json(), ParseOptions::default())
        .expect("canonical encoding must parse");
    assert_eq!(again, spec);

    let report = analyze(&spec, &AnalysisConfig::default());
    let _ = render_text(&report);
    let machine = render_machine(&report);
    assert_eq!(Report::from_json(&machine).expect("own report parses"), report);
});
