use super::chain::greedy_chain;
use super::{peer_candidates, Element, RsmfConfig, StrikingnessRecord};
use crate::rules::RuleSet;
use crate::tkg::{Direction, Quadruple, TemporalIndex, TimeIndex, TimeWindow};

/// Expectation score of a (peer) event at `query_time`: over every rule
/// for the event's relation, the confidence-weighted, exponentially
/// decayed sum across grounding-chain entries. Zero when no chain has a
/// body entry.
pub fn expectation_score(
    peer: &Quadruple,
    rules: &RuleSet,
    history: &TemporalIndex,
    cfg: &RsmfConfig,
    query_time: TimeIndex,
) -> f64 {
    let body_window = TimeWindow::before(query_time, cfg.window);
    let head_window = TimeWindow {
        lo: 0,
        hi: query_time,
    };
    let head_times = history.times_in_window(peer.subject, peer.relation, peer.object, head_window);

    let mut score = 0.0;
    for rule in rules.for_head(peer.relation) {
        let body_times = history.times_in_window(peer.subject, rule.body, peer.object, body_window);
        if body_times.is_empty() {
            continue;
        }
        let (bodies, _) = greedy_chain(body_times, head_times, query_time);
        for &t_y in &bodies {
            score += rule.conf * (-cfg.lambda * (query_time - t_y) as f64).exp();
        }
    }
    score
}

/// Element strikingness from a raw (non-negative) score vector.
///
/// The vector is L2-normalized; an all-zero vector scores 0. Otherwise the
/// result is `Σ v'·(v' − v_f)` over entries strictly above the target's
/// normalized score `v_f`, which lies in [0, 1] (up to rounding) for any
/// non-negative input.
pub fn strikingness_from_raw(raw: &[f64], target_index: usize) -> f64 {
    debug_assert!(target_index < raw.len());
    debug_assert!(raw.iter().all(|&v| v >= 0.0));
    let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return 0.0;
    }
    let target = raw[target_index] / norm;
    let mut sk = 0.0;
    for (i, &v) in raw.iter().enumerate() {
        if i == target_index {
            continue;
        }
        let v = v / norm;
        if v > target {
            sk += v * (v - target);
        }
    }
    sk
}

/// Element strikingness of the target event with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementScore {
    /// Strikingness of this element, in [0, 1].
    pub strikingness: f64,
    /// Number of peer candidates retrieved (target excluded).
    pub candidate_count: usize,
    /// Raw expectation score of the target event.
    pub target_raw: f64,
}

fn element_id(event: &Quadruple, element: Element) -> u64 {
    match element {
        Element::Subject => event.subject,
        Element::Object => event.object,
        Element::Relation => event.relation,
    }
}

fn replace_element(event: &Quadruple, element: Element, id: u64) -> Quadruple {
    let mut peer = *event;
    match element {
        Element::Subject => peer.subject = id,
        Element::Object => peer.object = id,
        Element::Relation => peer.relation = id,
    }
    peer
}

/// Score one element of the target event: retrieve peer candidates, score
/// every candidate plus the target itself, normalize, and compare.
pub fn element_strikingness(
    target: &Quadruple,
    element: Element,
    rules: &RuleSet,
    history: &TemporalIndex,
    cfg: &RsmfConfig,
    query_time: TimeIndex,
) -> ElementScore {
    let candidates = peer_candidates(target, element, rules, history, cfg);
    let own_id = element_id(target, element);
    let candidate_count = candidates.iter().filter(|&&id| id != own_id).count();

    // The target's own element is always part of the score vector; place
    // it first so its index is fixed regardless of candidate membership.
    let mut raw = Vec::with_capacity(candidates.len() + 1);
    raw.push(expectation_score(target, rules, history, cfg, query_time));
    for &id in &candidates {
        if id == own_id {
            continue;
        }
        let peer = replace_element(target, element, id);
        raw.push(expectation_score(&peer, rules, history, cfg, query_time));
    }

    ElementScore {
        strikingness: strikingness_from_raw(&raw, 0).min(1.0),
        candidate_count,
        target_raw: raw[0],
    }
}

/// Full strikingness of one event: per-element scores combined with the
/// configured weights. Every component and the combined value lie in
/// [0, 1].
pub fn event_strikingness(
    target: &Quadruple,
    rules: &RuleSet,
    history: &TemporalIndex,
    cfg: &RsmfConfig,
) -> StrikingnessRecord {
    let query_time = target.timestamp;
    let subject = element_strikingness(target, Element::Subject, rules, history, cfg, query_time);
    let object = element_strikingness(target, Element::Object, rules, history, cfg, query_time);
    let relation = element_strikingness(target, Element::Relation, rules, history, cfg, query_time);
    let sk = cfg.alpha.subject * subject.strikingness
        + cfg.alpha.object * object.strikingness
        + cfg.alpha.relation * relation.strikingness;
    StrikingnessRecord {
        query_index: 0,
        direction: Direction::Tail,
        sk_subject: subject.strikingness,
        sk_object: object.strikingness,
        sk_relation: relation.strikingness,
        sk: sk.min(1.0),
        candidate_counts: [
            subject.candidate_count,
            object.candidate_count,
            relation.candidate_count,
        ],
        target_raw_scores: [subject.target_raw, object.target_raw, relation.target_raw],
    }
}
