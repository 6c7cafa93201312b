#![no_main]

use libfuzzer_sys::fuzz_target;
use theia_lint::cli::{parse_rule_override, parse_value_range};
use theia_lint::engine::Profile;
use theia_lint::rules::RuleId;

fuzz_target!(|arg: &str| {
    if let Ok((rule, _)) = parse_rule_override(arg) {
        assert_eq!(rule.as_str().parse::<RuleId>(), Ok(rule));
    }
    if let Ok((lo, hi)) = parse_value_range(arg) {
        assert!(lo.is_finite() && hi.is_finite() && lo <= hi);
    }
    let _ = arg.parse::<Profile>();
});
