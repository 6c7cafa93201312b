mod common;

use proptest::prelude::*;

use theia_lint::engine::{analyze, run_call_strings_pass, run_parameter_pass, AnalysisConfig, RuleSetting};
use theia_lint::model_spec::{
    parse_model_spec, DatasetProfile, InputType, ModelSpec, ParseOptions, ProblemType, ValueRange,
};
use theia_lint::report::{exit_code, render_machine, Finding, Verdict};
use theia_lint::rules::{DatasetField, RuleId, Severity, Technique};

use common::{is_call_strings_rule, random_spec};

fn rule_findings(spec: &ModelSpec, rule: RuleId) -> Vec<Finding> {
    analyze(spec, &AnalysisConfig::default())
        .findings
        .into_iter()
        .filter(|f| f.rule_id == rule)
        .collect()
}

fn rebuilt(spec: &ModelSpec, dataset: DatasetProfile) -> Option<ModelSpec> {
    ModelSpec::new(dataset, spec.layers().to_vec(), spec.learner().clone()).ok()
}

/// Variants of the spec's dataset that each change exactly one field.
fn dataset_mutations(spec: &ModelSpec) -> Vec<(DatasetField, ModelSpec)> {
    let base = spec.dataset();
    let mut out = Vec::new();
    let mut push = |field, ds: DatasetProfile| {
        if let Some(s) = rebuilt(spec, ds) {
            out.push((field, s));
        }
    };

    for input in [InputType::ColorImages, InputType::GrayscaleImages, InputType::Tabular] {
        if input != base.input_type {
            let mut ds = DatasetProfile::new(input, base.problem_type);
            ds.num_classes = base.num_classes;
            ds.input_shape = base.input_shape.clone();
            ds.value_range = base.value_range;
            ds.training_set_size = base.training_set_size;
            push(DatasetField::InputType, ds);
        }
    }
    for problem in [
        ProblemType::BinaryClassification,
        ProblemType::MulticlassClassification,
        ProblemType::Regression,
    ] {
        if problem != base.problem_type {
            let mut ds = base.clone();
            ds.problem_type = problem;
            ds.num_classes = DatasetProfile::new(base.input_type, problem).num_classes;
            push(DatasetField::ProblemType, ds);
        }
    }
    let mut ds = base.clone();
    ds.input_shape = match &base.input_shape {
        Some(_) => None,
        None => Some(vec![7]),
    };
    push(DatasetField::InputShape, ds);

    let mut ds = base.clone();
    ds.value_range = Some(match base.value_range {
        Some(r) if r.contained_in(0.0, 1.0) => ValueRange { min: 0.0, max: 255.0 },
        _ => ValueRange { min: 0.0, max: 1.0 },
    });
    push(DatasetField::ValueRange, ds);

    let mut ds = base.clone();
    ds.training_set_size = Some(base.training_set_size.unwrap_or(0) + 17);
    push(DatasetField::TrainingSetSize, ds);

    if base.problem_type.is_classification() {
        let mut ds = base.clone();
        ds.num_classes = Some(base.num_classes.unwrap_or(2) + 3);
        push(DatasetField::NumClasses, ds);
    }
    out
}

fn setting() -> impl Strategy<Value = RuleSetting> {
    prop_oneof![
        Just(RuleSetting::Error),
        Just(RuleSetting::Warning),
        Just(RuleSetting::Off)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn analysis_is_deterministic(seed in any::<u64>()) {
        let spec = random_spec(seed);
        let config = AnalysisConfig::default();
        prop_assert_eq!(render_machine(&analyze(&spec, &config)), render_machine(&analyze(&spec, &config)));
    }

    #[test]
    fn report_is_concatenation_of_passes(seed in any::<u64>()) {
        let spec = random_spec(seed);
        let config = AnalysisConfig::default();
        let report = analyze(&spec, &config);
        let mut joined = run_call_strings_pass(&spec, &config).findings;
        joined.extend(run_parameter_pass(&spec, &config).findings);
        prop_assert_eq!(&report.findings, &joined);
        let first_param = report.findings.iter().position(|f| !is_call_strings_rule(f.rule_id));
        if let Some(p) = first_param {
            prop_assert!(report.findings[p..].iter().all(|f| !is_call_strings_rule(f.rule_id)));
        }
    }

    #[test]
    fn findings_within_a_pass_are_sorted(seed in any::<u64>()) {
        let spec = random_spec(seed);
        let config = AnalysisConfig::default();
        for pass in [run_call_strings_pass(&spec, &config), run_parameter_pass(&spec, &config)] {
            let keys: Vec<_> = pass
                .findings
                .iter()
                .map(|f| (f.layer_index.is_none(), f.layer_index, f.rule_id))
                .collect();
            prop_assert!(keys.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn overrides_only_relabel_or_remove(
        seed in any::<u64>(),
        overrides in proptest::collection::btree_map(
            proptest::sample::select(RuleId::ALL.to_vec()), setting(), 0..6),
    ) {
        let spec = random_spec(seed);
        let base = analyze(&spec, &AnalysisConfig::default());
        let config = AnalysisConfig { severity_overrides: overrides.clone(), ..AnalysisConfig::default() };
        let tuned = analyze(&spec, &config);

        let expected: Vec<Finding> = base
            .findings
            .iter()
            .filter_map(|f| {
                let mut f = f.clone();
                match overrides.get(&f.rule_id) {
                    Some(RuleSetting::Off) => return None,
                    Some(RuleSetting::Error) => f.severity = Severity::Error,
                    Some(RuleSetting::Warning) => f.severity = Severity::Warning,
                    None => {}
                }
                Some(f)
            })
            .collect();
        prop_assert_eq!(&tuned.findings, &expected);
        for (rule, s) in &overrides {
            if *s == RuleSetting::Off {
                prop_assert!(tuned.skip_notes.iter().all(|n| n.rule_id != *rule));
            }
        }
        prop_assert_eq!(&tuned.spec_fingerprint, &base.spec_fingerprint);
    }

    #[test]
    fn exit_code_follows_fail_on(seed in any::<u64>()) {
        let report = analyze(&random_spec(seed), &AnalysisConfig::default());
        let strict = exit_code(&report, Severity::Warning);
        let lax = exit_code(&report, Severity::Error);
        prop_assert!(strict >= lax);
        prop_assert_eq!(lax, i32::from(report.verdict == Verdict::Errors));
        prop_assert_eq!(strict, i32::from(report.verdict != Verdict::Clean));
    }

    #[test]
    fn rules_ignore_dataset_fields_they_do_not_read(seed in any::<u64>()) {
        let spec = random_spec(seed);
        for (field, mutated) in dataset_mutations(&spec) {
            for rule in RuleId::ALL {
                if rule.descriptor().reads.contains(&field) {
                    continue;
                }
                prop_assert_eq!(
                    rule_findings(&spec, rule),
                    rule_findings(&mutated, rule),
                    "{} changed when only {:?} changed", rule, field
                );
            }
        }
    }

    #[test]
    fn spec_documents_round_trip(seed in any::<u64>()) {
        let spec = random_spec(seed);
        let back = parse_model_spec(&spec.to_json(), ParseOptions::default()).unwrap();
        prop_assert_eq!(&back, &spec);
        prop_assert_eq!(back.to_json(), spec.to_json());
    }
}

#[test]
fn pass_membership_matches_descriptors() {
    for rule in RuleId::ALL {
        let call_strings = rule.descriptor().technique == Technique::CallStrings;
        assert_eq!(call_strings, is_call_strings_rule(rule), "{rule}");
    }
}

#[test]
fn invalid_documents_produce_no_report() {
    let cases = [
        ("{}", "version"),
        (r#"{"version":2,"dataset":{"channels":1,"problem_type":"regression"},"layers":[{"index":0,"kind":"dense","units":1}]}"#, "version"),
        (r#"{"version":1,"dataset":{"channels":1,"problem_type":"regression"},"layers":[]}"#, "layers"),
        (r#"{"version":1,"dataset":{"channels":1,"problem_type":"regression"},"layers":[{"index":0,"kind":"dense"}]}"#, "layers[0].units"),
        (r#"{"version":1,"dataset":{"channels":1,"problem_type":"regression"},"layers":[{"index":0,"kind":"dropout","rate":1.5}]}"#, "layers[0].rate"),
        (r#"{"version":1,"dataset":{"channels":1,"problem_type":"regression"},"layers":[{"index":0,"kind":"dense","units":1}],"learner":{"learning_rate":-1}}"#, "learner.learning_rate"),
    ];
    for (text, path) in cases {
        let err = parse_model_spec(text, ParseOptions::default()).unwrap_err();
        assert!(err.to_string().contains(path), "{text}: `{err}` does not mention `{path}`");
    }
}
