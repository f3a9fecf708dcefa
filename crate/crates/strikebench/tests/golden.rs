//! A fully hand-traced fixture, frozen end to end.
//!
//! Three training facts give exactly one forward rule `(r0 ← r1)` with
//! confidence 1/2 (one of the two body occurrences is followed by a
//! head). For the test event `(0, r0, 2, t=5)` the object vector is
//! `[0.5·e^{−0.5}, 0.5·e^{−0.3}]` (target, peer 3), so after L2
//! normalization
//!
//! ```text
//! sk_o = e^{0.2}·(e^{0.2} − 1) / (1 + e^{0.4})
//! ```
//!
//! and the subject/relation candidate sets collapse to the target alone.
//! The head-direction record mirrors it through the inverse event. These
//! values were derived by hand, independently of both the implementation
//! and the test oracle.

use strikebench::rsmf::{
    batch_strikingness, expectation_score, write_table, RsmfConfig, SkTableHeader,
    StrikingnessTable,
};
use strikebench::rules::{mine_rules, MiningConfig};
use strikebench::tkg::{
    augment_inverse, dataset_from_splits, Direction, Quadruple, Split, TemporalIndex,
};

fn closed_form_sk_element() -> f64 {
    (0.2f64.exp() * (0.2f64.exp() - 1.0)) / (1.0 + 0.4f64.exp())
}

#[test]
fn hand_traced_values_are_reproduced() {
    let ds = dataset_from_splits(
        vec![
            Quadruple::new(0, 1, 2, 0),
            Quadruple::new(0, 0, 2, 1),
            Quadruple::new(0, 1, 3, 2),
        ],
        vec![Quadruple::new(0, 0, 2, 4)],
        vec![Quadruple::new(0, 0, 2, 5)],
    )
    .unwrap();
    let ds = augment_inverse(ds).unwrap();
    let train = TemporalIndex::build(&ds, &[Split::Train]).unwrap();
    let rules = mine_rules(
        &train,
        &MiningConfig {
            tau: 0.0,
            min_body_support: 1,
            sample_cap: None,
            seed: 0,
        },
    )
    .unwrap();

    // The forward rule and its mirrored inverse-side twin.
    let forward = rules.for_head(0);
    assert_eq!(forward.len(), 1);
    assert_eq!(forward[0].body, 1);
    assert_eq!(forward[0].body_support, 2);
    assert_eq!(forward[0].rule_support, 1);
    assert_eq!(forward[0].conf, 0.5);
    let mirrored = rules.for_head(2);
    assert_eq!(mirrored.len(), 1);
    assert_eq!(mirrored[0].body, 3);
    assert_eq!(mirrored[0].conf, 0.5);

    let cfg = RsmfConfig::default();
    let query_time = 5;

    // Expectation scores, stage by stage.
    let sc_target = expectation_score(
        &Quadruple::new(0, 0, 2, 5),
        &rules,
        &train,
        &cfg,
        query_time,
    );
    assert!((sc_target - 0.5 * (-0.5f64).exp()).abs() < 1e-15);
    let sc_peer = expectation_score(
        &Quadruple::new(0, 0, 3, 5),
        &rules,
        &train,
        &cfg,
        query_time,
    );
    assert!((sc_peer - 0.5 * (-0.3f64).exp()).abs() < 1e-15);

    // Full records for both directions.
    let records = batch_strikingness(ds.raw_split(Split::Test), &rules, &train, &cfg, 1);
    assert_eq!(records.len(), 2);
    let expected_element = closed_form_sk_element();
    let expected_sk = 0.4 * expected_element;

    let tail = &records[0];
    assert_eq!(tail.direction, Direction::Tail);
    assert_eq!(tail.sk_subject, 0.0);
    assert_eq!(tail.sk_relation, 0.0);
    assert!((tail.sk_object - expected_element).abs() < 1e-12);
    assert!((tail.sk - expected_sk).abs() < 1e-12);
    assert_eq!(tail.candidate_counts, [0, 1, 0]);

    let head = &records[1];
    assert_eq!(head.direction, Direction::Head);
    assert_eq!(head.sk_object, 0.0);
    assert_eq!(head.sk_relation, 0.0);
    assert!((head.sk_subject - expected_element).abs() < 1e-12);
    assert!((head.sk - expected_sk).abs() < 1e-12);
    assert_eq!(head.candidate_counts, [1, 0, 0]);

    // Frozen on-disk bytes: guards the TSV schema and float formatting.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("golden.tsv");
    write_table(
        &path,
        &StrikingnessTable {
            header: SkTableHeader::rsmf(&cfg, Some(rules.min_confidence), "train-only"),
            records,
        },
    )
    .unwrap();
    let expected = "#{\"measure\":\"rsmf\",\"window\":null,\"lambda\":0.1,\
                    \"alpha\":[0.4,0.4,0.2],\"min_confidence\":0.0,\
                    \"history_scope\":\"train-only\"}\n\
                    0\ttail\t0.0000000000\t0.1085236613\t0.0000000000\t0.0434094645\n\
                    0\thead\t0.1085236613\t0.0000000000\t0.0000000000\t0.0434094645\n";
    assert_eq!(std::fs::read_to_string(&path).unwrap(), expected);
}
