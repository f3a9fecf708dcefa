//! Rank computation and evaluation metrics.
//!
//! Model outputs ([`PredictionSet`]) are ranked under time-aware filtering
//! ([`compute_rank`]), joined with strikingness values into a
//! [`RankTable`], and aggregated into original and strikingness-weighted
//! metrics ([`aggregate`]). Per-bin grouping, neighborhood overlap,
//! multi-model intersection, and group significance tests support the
//! downstream analyses.

mod analysis;
mod predictions;
mod rank;
mod report;
mod stats;

pub use analysis::{n_model_hits, neighborhood_overlap};
pub use predictions::{
    read_dense_binary, read_predictions, write_dense_binary, write_predictions, PredictionSet,
    ScoreRow,
};
pub use rank::{compute_rank, read_rank_table, write_rank_table, RankRow, RankTable, TiePolicy};
pub use report::{
    aggregate, event_weight, group_by_strikingness, write_bins_csv, BinRow, EvalReport,
    MetricBundle, MetricDeltas,
};
pub use stats::{group_significance, SignificanceResult};

use crate::rsmf::StrikingnessTable;
use crate::tkg::{Direction, EntityId, Quadruple, TemporalIndex};
use crate::{Error, Result};

/// Everything needed to turn raw model scores into filtered ranks for a
/// fixed query split: the queries themselves, ground truth for time-aware
/// filtering, and the tie policy.
pub struct RankingContext<'a> {
    /// The evaluated queries (raw, pre-augmentation facts) in split order.
    pub queries: &'a [Quadruple],
    /// Index containing all known facts (for same-timestamp filtering).
    pub truth: &'a TemporalIndex,
    pub entity_count: u64,
    pub tie_policy: TiePolicy,
}

impl<'a> RankingContext<'a> {
    /// The answer entity of a query direction.
    pub fn answer(&self, query: &Quadruple, direction: Direction) -> EntityId {
        match direction {
            Direction::Tail => query.object,
            Direction::Head => query.subject,
        }
    }

    /// Entities filtered from contention: all other true answers of the
    /// same (subject, relation, timestamp) pattern.
    pub fn filter(&self, query: &Quadruple, direction: Direction) -> Vec<EntityId> {
        let answer = self.answer(query, direction);
        let truths = match direction {
            Direction::Tail => self
                .truth
                .truth_at(query.subject, query.relation, query.timestamp),
            Direction::Head => {
                let inv = query.inverse(self.truth.num_relations_raw());
                self.truth
                    .truth_at(inv.subject, inv.relation, inv.timestamp)
            }
        };
        truths.iter().copied().filter(|&e| e != answer).collect()
    }

    /// Rank every query in both directions and join strikingness values.
    ///
    /// Every (query, direction) pair must be present in the prediction
    /// set exactly once; strikingness, when provided, must cover every
    /// pair as well.
    pub fn rank_predictions(
        &self,
        predictions: &PredictionSet,
        sk: Option<&StrikingnessTable>,
    ) -> Result<RankTable> {
        use rayon::prelude::*;
        // Ranks are independent per query; output order is fixed by the
        // (query, direction) enumeration, not completion order.
        let rows: Vec<RankRow> = self
            .queries
            .par_iter()
            .enumerate()
            .map(|(i, query)| -> Result<[RankRow; 2]> {
                let mut pair = Vec::with_capacity(2);
                for direction in Direction::BOTH {
                    let row = predictions.row(i, direction).ok_or_else(|| {
                        Error::Validation(format!(
                            "prediction set {:?} is missing query {i} direction {direction}",
                            predictions.model_name
                        ))
                    })?;
                    let answer = self.answer(query, direction);
                    let filter = self.filter(query, direction);
                    let rank =
                        compute_rank(row, answer, &filter, self.entity_count, self.tie_policy)?;
                    let sk_value = match sk {
                        Some(table) => Some(table.get(i, direction).ok_or_else(|| {
                            Error::Validation(format!(
                                "strikingness table is missing query {i} direction {direction}"
                            ))
                        })?),
                        None => None,
                    };
                    pair.push(RankRow {
                        query_index: i,
                        direction,
                        rank,
                        answer,
                        sk: sk_value,
                    });
                }
                Ok([pair.remove(0), pair.remove(0)])
            })
            .collect::<Result<Vec<[RankRow; 2]>>>()?
            .into_iter()
            .flatten()
            .collect();
        let mrr_available = self.queries.iter().enumerate().all(|(i, _)| {
            Direction::BOTH
                .iter()
                .all(|&d| !matches!(predictions.row(i, d), Some(ScoreRow::TopK(_))))
        });
        Ok(RankTable {
            model_name: predictions.model_name.clone(),
            tie_policy: self.tie_policy,
            mrr_available,
            rows,
        })
    }
}
