use super::RsmfConfig;
use crate::rules::TemporalRule;
use crate::tkg::{Quadruple, TemporalIndex, TimeIndex, TimeWindow};

/// The alternating body/head timestamp sequence for one (peer event, rule)
/// pair.
///
/// Entries interleave as `y1 < h1 ≤ y2 < h2 ≤ … ≤ yn < hn` with the final
/// head fixed at the query time (the hypothetical occurrence of the peer
/// event itself). A chain with no body entry contributes nothing.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundingChain {
    pub rule: TemporalRule,
    pub body_times: Vec<TimeIndex>,
    pub head_times: Vec<TimeIndex>,
}

impl GroundingChain {
    pub fn len(&self) -> usize {
        self.body_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.body_times.is_empty()
    }
}

/// Greedy earliest-match chain over pre-sorted occurrence lists.
///
/// `body_times` are the windowed body occurrences, `head_times` the head
/// occurrences strictly before `query_time`; both ascending. The greedy
/// scan takes the earliest admissible body, pairs it with the earliest
/// head strictly after it, and requires the next body to be no earlier
/// than that head. The last accepted body is re-paired with the
/// hypothetical head at `query_time`. This construction is
/// differential-tested against exhaustive chain enumeration: it yields
/// the maximal number of entries and, among maximal chains, the
/// lexicographically earliest body times.
pub fn greedy_chain(
    body_times: &[TimeIndex],
    head_times: &[TimeIndex],
    query_time: TimeIndex,
) -> (Vec<TimeIndex>, Vec<TimeIndex>) {
    let mut bodies: Vec<TimeIndex> = Vec::new();
    let mut heads: Vec<TimeIndex> = Vec::new();
    let mut body_cursor = 0usize;
    let mut min_next_body: TimeIndex = 0;

    loop {
        while body_cursor < body_times.len() && body_times[body_cursor] < min_next_body {
            body_cursor += 1;
        }
        if body_cursor >= body_times.len() {
            break;
        }
        let body = body_times[body_cursor];
        body_cursor += 1;
        bodies.push(body);

        // Earliest head strictly after this body and before the query.
        let pos = head_times.partition_point(|&h| h <= body);
        match head_times.get(pos) {
            Some(&head) if head < query_time => {
                heads.push(head);
                min_next_body = head;
            }
            _ => break,
        }
    }

    if bodies.is_empty() {
        return (bodies, heads);
    }
    heads.truncate(bodies.len() - 1);
    heads.push(query_time);
    (bodies, heads)
}

/// Build the grounding chain for one (peer event, rule) pair against the
/// indexed history.
pub fn build_grounding_chain(
    peer: &Quadruple,
    rule: &TemporalRule,
    history: &TemporalIndex,
    cfg: &RsmfConfig,
    query_time: TimeIndex,
) -> GroundingChain {
    let body_window = TimeWindow::before(query_time, cfg.window);
    let body_times = history.times_in_window(peer.subject, rule.body, peer.object, body_window);
    let head_window = TimeWindow {
        lo: 0,
        hi: query_time,
    };
    let head_times = history.times_in_window(peer.subject, peer.relation, peer.object, head_window);
    let (body_times, head_times) = greedy_chain(body_times, head_times, query_time);
    GroundingChain {
        rule: rule.clone(),
        body_times,
        head_times,
    }
}
