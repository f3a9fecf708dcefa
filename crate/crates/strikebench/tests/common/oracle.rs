//! Independent exhaustive-enumeration oracle for the strikingness
//! pipeline.
//!
//! Deliberately avoids the production lookup structures and the greedy
//! chain construction: candidate sets come from direct linear scans over
//! the raw fact list, chains from memoized enumeration of *every*
//! interleaving-valid chain (maximal length, then lexicographically
//! earliest body times), and scores from literal evaluation of the
//! formulas. If the pipeline and this module disagree, the oracle wins.

use std::collections::{BTreeSet, HashMap};

use strikebench::rsmf::{Element, RsmfConfig};
use strikebench::rules::RuleSet;
use strikebench::tkg::Quadruple;

/// Per-event scan state: occurrence lists anchored on the event's subject
/// and object, restricted to the window `[t − w, t)`.
pub struct EventOracle {
    /// (relation, object) → sorted times of (event.subject, relation, object).
    subj_anchored: HashMap<(u64, u64), Vec<u64>>,
    /// (relation, subject) → sorted times of (subject, relation, event.object).
    obj_anchored: HashMap<(u64, u64), Vec<u64>>,
    event: Quadruple,
    query_time: u64,
    lambda: f64,
}

impl EventOracle {
    /// Scan the raw fact list once for each anchor. `facts` must be the
    /// same (augmented) fact set the production history index was built
    /// over; only facts inside the window are retained.
    pub fn build(facts: &[Quadruple], event: &Quadruple, cfg: &RsmfConfig) -> Self {
        let query_time = event.timestamp;
        let lo = cfg.window.map_or(0, |w| query_time.saturating_sub(w));
        let mut subj_anchored: HashMap<(u64, u64), Vec<u64>> = HashMap::new();
        let mut obj_anchored: HashMap<(u64, u64), Vec<u64>> = HashMap::new();
        for f in facts {
            if f.timestamp < lo || f.timestamp >= query_time {
                continue;
            }
            if f.subject == event.subject {
                subj_anchored
                    .entry((f.relation, f.object))
                    .or_default()
                    .push(f.timestamp);
            }
            if f.object == event.object {
                obj_anchored
                    .entry((f.relation, f.subject))
                    .or_default()
                    .push(f.timestamp);
            }
        }
        for list in subj_anchored.values_mut().chain(obj_anchored.values_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        EventOracle {
            subj_anchored,
            obj_anchored,
            event: *event,
            query_time,
            lambda: cfg.lambda,
        }
    }

    /// Windowed occurrence times of (s, r, o). The pattern must share the
    /// event's subject or object (peers always do).
    pub fn times(&self, s: u64, r: u64, o: u64) -> &[u64] {
        if s == self.event.subject {
            self.subj_anchored.get(&(r, o)).map_or(&[], Vec::as_slice)
        } else if o == self.event.object {
            self.obj_anchored.get(&(r, s)).map_or(&[], Vec::as_slice)
        } else {
            panic!("oracle queried for a pattern sharing neither anchor");
        }
    }

    /// Peer candidates by direct pattern scan.
    pub fn candidates(&self, element: Element, rules: &RuleSet) -> BTreeSet<u64> {
        let mut out = BTreeSet::new();
        match element {
            Element::Object => {
                for rule in rules.for_head(self.event.relation) {
                    for &(r, o) in self.subj_anchored.keys() {
                        if r == rule.body {
                            out.insert(o);
                        }
                    }
                }
            }
            Element::Subject => {
                for rule in rules.for_head(self.event.relation) {
                    for &(r, s) in self.obj_anchored.keys() {
                        if r == rule.body {
                            out.insert(s);
                        }
                    }
                }
            }
            Element::Relation => {
                for &(r, o) in self.subj_anchored.keys() {
                    if o == self.event.object {
                        for &head in rules.heads_for_body(r) {
                            out.insert(head);
                        }
                    }
                }
            }
        }
        out
    }

    /// Expectation score of a peer event by literal formula evaluation
    /// over the canonical chain of every rule.
    pub fn expectation(&self, peer: &Quadruple, rules: &RuleSet) -> f64 {
        let heads = self.times(peer.subject, peer.relation, peer.object);
        let mut score = 0.0;
        for rule in rules.for_head(peer.relation) {
            let bodies = self.times(peer.subject, rule.body, peer.object);
            let chain = best_chain(bodies, heads, self.query_time);
            for &t_y in &chain {
                score += rule.conf * (-self.lambda * (self.query_time - t_y) as f64).exp();
            }
        }
        score
    }

    /// Canonical chain body times for one (peer, rule) pair.
    pub fn chain_bodies(&self, peer: &Quadruple, body_relation: u64) -> Vec<u64> {
        let bodies = self.times(peer.subject, body_relation, peer.object);
        let heads = self.times(peer.subject, peer.relation, peer.object);
        best_chain(bodies, heads, self.query_time)
    }

    /// Element strikingness by direct evaluation: score the target and
    /// every peer, L2-normalize, and sum the excesses.
    pub fn element_strikingness(&self, element: Element, rules: &RuleSet) -> f64 {
        let own = match element {
            Element::Subject => self.event.subject,
            Element::Object => self.event.object,
            Element::Relation => self.event.relation,
        };
        let mut scores = vec![self.expectation(&self.event, rules)];
        for id in self.candidates(element, rules) {
            if id == own {
                continue;
            }
            let mut peer = self.event;
            match element {
                Element::Subject => peer.subject = id,
                Element::Object => peer.object = id,
                Element::Relation => peer.relation = id,
            }
            scores.push(self.expectation(&peer, rules));
        }
        let norm = scores.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let target = scores[0] / norm;
        scores[1..]
            .iter()
            .map(|&v| v / norm)
            .filter(|&v| v > target)
            .map(|v| v * (v - target))
            .sum()
    }

    pub fn event_strikingness(&self, rules: &RuleSet, cfg: &RsmfConfig) -> f64 {
        cfg.alpha.subject * self.element_strikingness(Element::Subject, rules)
            + cfg.alpha.object * self.element_strikingness(Element::Object, rules)
            + cfg.alpha.relation * self.element_strikingness(Element::Relation, rules)
    }
}

/// Longer chain wins; among equal lengths, lexicographically earlier body
/// times win.
fn better(a: &[u64], b: &[u64]) -> bool {
    a.len() > b.len() || (a.len() == b.len() && a < b)
}

/// Canonical chain by memoized enumeration of every valid chain.
///
/// A chain picks bodies `y1 < … < yn` and historical heads `h1 … h_{n−1}`
/// with `y_i < h_i ≤ y_{i+1}` and `h_i < t`; the final head is the
/// hypothetical occurrence at `t`. Enumeration explores every start body
/// and every head choice; memoization only caches best suffixes, it does
/// not prune choices.
pub fn best_chain(bodies: &[u64], heads: &[u64], t: u64) -> Vec<u64> {
    // Suffix memo: best chain whose first body is exactly bodies[j].
    let mut best_at: Vec<Option<Vec<u64>>> = vec![None; bodies.len()];
    for j in (0..bodies.len()).rev() {
        let b = bodies[j];
        if b >= t {
            best_at[j] = Some(Vec::new());
            continue;
        }
        // Option 1: the chain ends here (hypothetical head at t).
        let mut best = vec![b];
        // Option 2: continue through any admissible historical head.
        for &h in heads {
            if h <= b || h >= t {
                continue;
            }
            let k = bodies.partition_point(|&x| x < h);
            for suffix in best_at[k..].iter().flatten() {
                if suffix.is_empty() {
                    continue;
                }
                let mut candidate = Vec::with_capacity(1 + suffix.len());
                candidate.push(b);
                candidate.extend_from_slice(suffix);
                if better(&candidate, &best) {
                    best = candidate;
                }
            }
        }
        best_at[j] = Some(best);
    }
    let mut overall: Vec<u64> = Vec::new();
    for suffix in best_at.into_iter().flatten() {
        if better(&suffix, &overall) {
            overall = suffix;
        }
    }
    overall
}

#[cfg(test)]
mod chain_oracle_tests {
    use super::best_chain;

    #[test]
    fn oracle_hand_cases() {
        assert_eq!(best_chain(&[2], &[], 10), vec![2]);
        assert_eq!(best_chain(&[2, 5], &[4], 10), vec![2, 5]);
        assert_eq!(best_chain(&[2, 3], &[4], 10), vec![2]);
        assert_eq!(best_chain(&[], &[4], 10), Vec::<u64>::new());
        // Maximal length beats earlier singleton start.
        assert_eq!(best_chain(&[1, 4, 6], &[2, 7], 10), vec![1, 4]);
        // Equal body and head time: h ≤ y2 admits equality.
        assert_eq!(best_chain(&[1, 4], &[4], 10), vec![1, 4]);
    }
}
