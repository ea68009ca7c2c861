use hplab_core::cli::{BUNDLED_EXAMPLES, BUNDLED_MARKOV};
use hplab_core::config::{ExperimentConfig, Pair, PairConfig, TOLERANCE_DEFAULTS};
use hplab_core::Error;

fn err(text: &str) -> String {
    match ExperimentConfig::from_json(text) {
        Err(Error::Config(m)) => m,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn bundled_configs_parse_and_roundtrip() {
    for text in std::iter::once(BUNDLED_MARKOV).chain(BUNDLED_EXAMPLES) {
        let cfg = ExperimentConfig::from_json(text).unwrap();
        let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
    }
}

#[test]
fn defaults_fill_missing_fields() {
    let cfg = ExperimentConfig::from_json(r#"{"pair":{"kind":"markov","support":[[2,3]]}}"#).unwrap();
    assert_eq!(cfg.degrees, vec![8, 16, 32]);
    assert_eq!(cfg.precision_bits, 512);
    assert_eq!(cfg.nodes.equilibrium, 400);
    for (k, v) in TOLERANCE_DEFAULTS {
        assert_eq!(cfg.tolerance(k), *v);
    }
    assert!(matches!(cfg.pair.resolve().unwrap(), Pair::Markov(p) if p.densities.len() == 1));
}

#[test]
fn tolerance_overrides_apply() {
    let cfg = ExperimentConfig::from_json(
        r#"{"pair":{"kind":"markov","support":[[2,3]]},"tolerances":{"lemma1_ks":0.2}}"#,
    )
    .unwrap();
    assert_eq!(cfg.check_settings("lemma1_ks").ks_tolerance, 0.2);
}

#[test]
fn field_level_messages() {
    assert!(err(r#"{"pair":{"kind":"markov","support":[[0.5,3]]}}"#).starts_with("pair"));
    assert!(err(r#"{"pair":{"kind":"markov","support":[[2,3]]},"degrees":[]}"#).starts_with("degrees"));
    assert!(err(r#"{"pair":{"kind":"markov","support":[[2,3]]},"precision_bits":16}"#).starts_with("precision_bits"));
    assert!(err(r#"{"pair":{"kind":"markov","support":[[2,3]]},"tolerances":{"nope":1}}"#).contains("tolerances.nope"));
    assert!(err(r#"{"pair":{"kind":"markov","support":[[2,3]]},"tolerances":{"lemma1_ks":-1}}"#).contains("lemma1_ks"));
    assert!(err(r#"{"pair":{"kind":"markov","support":[[2,3]]},"extra":1}"#).contains("extra"));
    assert!(err(r#"{"pair":{"kind":"triangle"}}"#).contains("triangle"));
}

#[test]
fn algebraic_branch_cut_rejected() {
    let m = err(
        r#"{"pair":{"kind":"algebraic-one-interval","factors":[{"base":-2.2,"exponent":0.5},{"base":3,"exponent":-0.5}]}}"#,
    );
    assert!(m.starts_with("pair"), "{m}");
}

#[test]
fn two_interval_kind_resolves() {
    let cfg = ExperimentConfig::from_json(BUNDLED_EXAMPLES[3]).unwrap();
    assert!(matches!(cfg.pair, PairConfig::AlgebraicTwoInterval { .. }));
    match cfg.pair.resolve().unwrap() {
        Pair::Algebraic(spec) => assert_eq!(spec.intervals.len(), 2),
        Pair::Markov(_) => panic!("wrong kind"),
    }
}
