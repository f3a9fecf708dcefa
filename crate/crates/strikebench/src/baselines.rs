//! Diagnostic comparison strikingness measures.
//!
//! Two deliberately simple proxies used to contextualize the rule-based
//! measure: pair-frequency inverseness and exact-event recency. Both map
//! events to [0, 1] but ignore peer context, which is precisely the flaw
//! the comparisons are meant to expose.

use std::collections::HashMap;

use crate::rsmf::{SkTableHeader, StrikingnessRecord};
use crate::tkg::{Direction, EntityId, Quadruple, RelationId, TemporalIndex, TimeWindow};
use crate::{Error, Result};

/// `(subject, relation)` occurrence counts over the training history,
/// with the maximum frozen at build time.
#[derive(Debug, Clone)]
pub struct PairFrequencyTable {
    counts: HashMap<(EntityId, RelationId), u64>,
    max_count: u64,
}

impl PairFrequencyTable {
    /// Count `(s, r)` pairs over the given facts (the augmented training
    /// split, so inverse-direction queries find their pairs too).
    pub fn build(facts: &[Quadruple]) -> Self {
        let mut counts: HashMap<(EntityId, RelationId), u64> = HashMap::new();
        for q in facts {
            *counts.entry((q.subject, q.relation)).or_default() += 1;
        }
        let max_count = counts.values().copied().max().unwrap_or(0);
        PairFrequencyTable { counts, max_count }
    }

    pub fn count(&self, subject: EntityId, relation: RelationId) -> u64 {
        self.counts.get(&(subject, relation)).copied().unwrap_or(0)
    }

    pub fn max_count(&self) -> u64 {
        self.max_count
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Frequency-inverse strikingness: `1 − count(s, r) / max count`. Unseen
/// pairs score 1.
pub fn freq_inv(event: &Quadruple, table: &PairFrequencyTable) -> Result<f64> {
    if table.is_empty() {
        return Err(Error::Validation(
            "pair frequency table is empty".to_owned(),
        ));
    }
    let count = table.count(event.subject, event.relation);
    Ok(1.0 - count as f64 / table.max_count as f64)
}

/// Temporal-inverse strikingness: `1 − exp(−λ · (t − t_last))` from the
/// most recent exact `(s, r, o)` occurrence strictly before the event;
/// 1 when the event never occurred.
pub fn temp_inv(event: &Quadruple, history: &TemporalIndex, lambda_t: f64) -> f64 {
    let window = TimeWindow {
        lo: 0,
        hi: event.timestamp,
    };
    let times = history.times_in_window(event.subject, event.relation, event.object, window);
    match times.last() {
        Some(&t_last) => 1.0 - (-lambda_t * (event.timestamp - t_last) as f64).exp(),
        None => 1.0,
    }
}

/// Which baseline measure to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineMeasure {
    FreqInv,
    TempInv,
}

impl BaselineMeasure {
    pub fn as_str(&self) -> &'static str {
        match self {
            BaselineMeasure::FreqInv => "freq_inv",
            BaselineMeasure::TempInv => "temp_inv",
        }
    }
}

/// Header for a baseline strikingness table, sharing the RSMF schema with
/// the `measure` field distinguishing the source.
pub fn baseline_header(
    measure: BaselineMeasure,
    lambda: f64,
    window: Option<u64>,
    history_scope: &str,
) -> SkTableHeader {
    SkTableHeader {
        measure: measure.as_str().to_owned(),
        window,
        lambda,
        alpha: [0.0, 0.0, 0.0],
        min_confidence: None,
        history_scope: history_scope.to_owned(),
    }
}

/// Score every query in both directions under a scalar baseline measure.
/// The scalar fills all four strikingness columns of the shared schema.
pub fn batch_baseline(
    queries: &[Quadruple],
    measure: BaselineMeasure,
    freq_table: Option<&PairFrequencyTable>,
    history: &TemporalIndex,
    lambda_t: f64,
) -> Result<Vec<StrikingnessRecord>> {
    let num_raw = history.num_relations_raw();
    let mut records = Vec::with_capacity(queries.len() * 2);
    for (i, q) in queries.iter().enumerate() {
        for direction in Direction::BOTH {
            let event = match direction {
                Direction::Tail => *q,
                Direction::Head => q.inverse(num_raw),
            };
            let sk = match measure {
                BaselineMeasure::FreqInv => {
                    let table = freq_table.ok_or_else(|| {
                        Error::Config("freq_inv needs a pair frequency table".to_owned())
                    })?;
                    freq_inv(&event, table)?
                }
                BaselineMeasure::TempInv => temp_inv(&event, history, lambda_t),
            };
            records.push(StrikingnessRecord {
                query_index: i,
                direction,
                sk_subject: sk,
                sk_object: sk,
                sk_relation: sk,
                sk,
                candidate_counts: [0; 3],
                target_raw_scores: [0.0; 3],
            });
        }
    }
    Ok(records)
}
