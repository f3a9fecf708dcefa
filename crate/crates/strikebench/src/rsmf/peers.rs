use std::collections::BTreeSet;

use super::{Element, RsmfConfig};
use crate::rules::RuleSet;
use crate::tkg::{Quadruple, TemporalIndex, TimeWindow};

/// Replacement candidates for one element of the target event, sorted
/// ascending.
///
/// Entity modes collect the entities grounding some rule body of the
/// event's relation within the window: object mode takes `o'` from
/// `(s, r_b, o', t')`, subject mode symmetrically fixes the object (via
/// the inverse relation of the augmented graph). Relation mode collects
/// the head relations of any mined rule whose body links the fixed
/// `(s, o)` pair within the window. An empty result is a valid outcome.
pub fn peer_candidates(
    event: &Quadruple,
    element: Element,
    rules: &RuleSet,
    history: &TemporalIndex,
    cfg: &RsmfConfig,
) -> Vec<u64> {
    let window = TimeWindow::before(event.timestamp, cfg.window);
    let mut out = BTreeSet::new();
    match element {
        Element::Object => {
            for rule in rules.for_head(event.relation) {
                for &(_, object) in history.objects_in_window(event.subject, rule.body, window) {
                    out.insert(object);
                }
            }
        }
        Element::Subject => {
            for rule in rules.for_head(event.relation) {
                let inv_body = history.inverse_relation(rule.body);
                for &(_, subject) in history.objects_in_window(event.object, inv_body, window) {
                    out.insert(subject);
                }
            }
        }
        Element::Relation => {
            let mut bodies = BTreeSet::new();
            for &(_, relation, object) in history.subject_events_in_window(event.subject, window) {
                if object == event.object {
                    bodies.insert(relation);
                }
            }
            for body in bodies {
                for &head in rules.heads_for_body(body) {
                    out.insert(head);
                }
            }
        }
    }
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{RuleSet, TemporalRule};
    use crate::tkg::{augment_inverse, dataset_from_splits, Split};

    fn rule(head: u64, body: u64, conf: f64) -> TemporalRule {
        TemporalRule {
            head,
            body,
            conf,
            body_support: 10,
            rule_support: (conf * 10.0) as u64,
        }
    }

    fn history_of(train: Vec<Quadruple>) -> TemporalIndex {
        let t_max = train.iter().map(|q| q.timestamp).max().unwrap();
        let ds = dataset_from_splits(
            train,
            vec![Quadruple::new(0, 0, 0, t_max + 1)],
            vec![Quadruple::new(0, 0, 0, t_max + 2)],
        )
        .unwrap();
        let ds = augment_inverse(ds).unwrap();
        TemporalIndex::build(&ds, &[Split::Train]).unwrap()
    }

    #[test]
    fn single_grounding_yields_single_object_candidate() {
        // history {(A, r_b, B, t−1)}, rule (r ← r_b), object mode → {B}
        let history = history_of(vec![Quadruple::new(0, 1, 2, 9)]);
        let rules = RuleSet::from_rules(vec![rule(0, 1, 0.5)], 0.0, 1);
        let event = Quadruple::new(0, 0, 3, 10);
        let cands = peer_candidates(
            &event,
            Element::Object,
            &rules,
            &history,
            &RsmfConfig::default(),
        );
        assert_eq!(cands, vec![2]);
    }

    #[test]
    fn empty_rule_set_yields_empty_candidates() {
        let history = history_of(vec![Quadruple::new(0, 1, 2, 9)]);
        let rules = RuleSet::from_rules(vec![], 0.0, 1);
        let event = Quadruple::new(0, 0, 3, 10);
        for element in Element::ALL {
            assert!(
                peer_candidates(&event, element, &rules, &history, &RsmfConfig::default())
                    .is_empty()
            );
        }
    }

    #[test]
    fn subject_mode_fixes_the_object() {
        // (5, r_b, 2) in history; event (0, r, 2): subject candidates {5}.
        let history = history_of(vec![Quadruple::new(5, 1, 2, 9)]);
        let rules = RuleSet::from_rules(vec![rule(0, 1, 0.5)], 0.0, 1);
        let event = Quadruple::new(0, 0, 2, 10);
        let cands = peer_candidates(
            &event,
            Element::Subject,
            &rules,
            &history,
            &RsmfConfig::default(),
        );
        assert_eq!(cands, vec![5]);
    }

    #[test]
    fn relation_mode_collects_heads_of_grounded_bodies() {
        // Bodies linking (0, 2): relation 1 at t=9. Rules 3 ← 1 and 4 ← 1
        // make {3, 4} the relation candidates; rule 6 ← 5 is not grounded.
        let history = history_of(vec![Quadruple::new(0, 1, 2, 9)]);
        let rules = RuleSet::from_rules(
            vec![rule(3, 1, 0.5), rule(4, 1, 0.2), rule(6, 5, 0.9)],
            0.0,
            1,
        );
        let event = Quadruple::new(0, 0, 2, 10);
        let cands = peer_candidates(
            &event,
            Element::Relation,
            &rules,
            &history,
            &RsmfConfig::default(),
        );
        assert_eq!(cands, vec![3, 4]);
    }

    #[test]
    fn window_excludes_stale_groundings() {
        let history = history_of(vec![Quadruple::new(0, 1, 2, 1), Quadruple::new(0, 1, 3, 8)]);
        let rules = RuleSet::from_rules(vec![rule(0, 1, 0.5)], 0.0, 1);
        let event = Quadruple::new(0, 0, 7, 10);
        let cfg = RsmfConfig {
            window: Some(5),
            ..RsmfConfig::default()
        };
        let cands = peer_candidates(&event, Element::Object, &rules, &history, &cfg);
        assert_eq!(cands, vec![3]);
    }
}
