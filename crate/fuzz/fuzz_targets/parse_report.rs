#![no_main]

use libfuzzer_sys::fuzz_target;
use theia_lint::report::{render_machine, render_text, Report};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(report) = Report::from_json(text) {
        let _ = render_text(&report);
        let back = Report::from_json(&render_machine(&report)).expect("rendered report parses");
        assert_eq!(back, report);
    }
});
