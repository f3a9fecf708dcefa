use std::collections::HashMap;

use super::{
    dataset::inverse_relation, Dataset, EntityId, Quadruple, RelationId, Split, TimeIndex,
};
use crate::Result;

/// Half-open time range `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeWindow {
    pub lo: TimeIndex,
    pub hi: TimeIndex,
}

impl TimeWindow {
    /// The window `[t − w, t)` used for history lookups at query time `t`.
    /// `w = None` means full history.
    pub fn before(t: TimeIndex, w: Option<u64>) -> Self {
        TimeWindow {
            lo: w.map_or(0, |w| t.saturating_sub(w)),
            hi: t,
        }
    }

    pub fn contains(&self, t: TimeIndex) -> bool {
        self.lo <= t && t < self.hi
    }
}

/// Immutable sorted lookup maps over a set of splits.
///
/// All timestamp lists are sorted ascending and deduplicated. Queries
/// return slices into the index; nothing is ever mutated after
/// [`TemporalIndex::build`] returns, so the index is freely shareable
/// across threads.
#[derive(Debug)]
pub struct TemporalIndex {
    /// (subject, relation) → sorted (timestamp, object).
    by_pair: HashMap<(EntityId, RelationId), Vec<(TimeIndex, EntityId)>>,
    /// (subject, relation, object) → sorted timestamps.
    by_pair_full: HashMap<(EntityId, RelationId, EntityId), Vec<TimeIndex>>,
    /// subject → sorted (timestamp, relation, object).
    by_subject: HashMap<EntityId, Vec<(TimeIndex, RelationId, EntityId)>>,
    /// (subject, relation, timestamp) → sorted distinct objects.
    same_time_truth: HashMap<(EntityId, RelationId, TimeIndex), Vec<EntityId>>,
    num_relations_raw: u64,
    entity_count: u64,
    fact_count: usize,
}

impl TemporalIndex {
    /// Build the index from exactly the requested splits of an augmented
    /// dataset.
    pub fn build(dataset: &Dataset, splits: &[Split]) -> Result<Self> {
        let mut by_pair: HashMap<_, Vec<_>> = HashMap::new();
        let mut by_pair_full: HashMap<_, Vec<_>> = HashMap::new();
        let mut by_subject: HashMap<_, Vec<_>> = HashMap::new();
        let mut same_time_truth: HashMap<_, Vec<_>> = HashMap::new();
        let mut fact_count = 0usize;

        for &split in splits {
            for q in dataset.split(split) {
                fact_count += 1;
                by_pair
                    .entry((q.subject, q.relation))
                    .or_default()
                    .push((q.timestamp, q.object));
                by_pair_full
                    .entry((q.subject, q.relation, q.object))
                    .or_default()
                    .push(q.timestamp);
                by_subject
                    .entry(q.subject)
                    .or_default()
                    .push((q.timestamp, q.relation, q.object));
                same_time_truth
                    .entry((q.subject, q.relation, q.timestamp))
                    .or_default()
                    .push(q.object);
            }
        }

        for list in by_pair.values_mut() {
            list.sort_unstable();
            list.dedup();
        }
        for list in by_pair_full.values_mut() {
            list.sort_unstable();
            list.dedup();
        }
        for list in by_subject.values_mut() {
            list.sort_unstable();
            list.dedup();
        }
        for list in same_time_truth.values_mut() {
            list.sort_unstable();
            list.dedup();
        }

        Ok(TemporalIndex {
            by_pair,
            by_pair_full,
            by_subject,
            same_time_truth,
            num_relations_raw: dataset.num_relations_raw,
            entity_count: dataset.entity_count,
            fact_count,
        })
    }

    pub fn entity_count(&self) -> u64 {
        self.entity_count
    }

    pub fn num_relations_raw(&self) -> u64 {
        self.num_relations_raw
    }

    pub fn fact_count(&self) -> usize {
        self.fact_count
    }

    pub fn inverse_relation(&self, relation: RelationId) -> RelationId {
        inverse_relation(relation, self.num_relations_raw)
    }

    /// `(t, object)` entries for `(subject, relation, ·)` with `t` in the
    /// window, sorted ascending.
    pub fn objects_in_window(
        &self,
        subject: EntityId,
        relation: RelationId,
        window: TimeWindow,
    ) -> &[(TimeIndex, EntityId)] {
        match self.by_pair.get(&(subject, relation)) {
            Some(list) => {
                let lo = list.partition_point(|&(t, _)| t < window.lo);
                let hi = list.partition_point(|&(t, _)| t < window.hi);
                &list[lo..hi]
            }
            None => &[],
        }
    }

    /// Timestamps of `(subject, relation, object)` within the window,
    /// sorted ascending.
    pub fn times_in_window(
        &self,
        subject: EntityId,
        relation: RelationId,
        object: EntityId,
        window: TimeWindow,
    ) -> &[TimeIndex] {
        match self.by_pair_full.get(&(subject, relation, object)) {
            Some(list) => {
                let lo = list.partition_point(|&t| t < window.lo);
                let hi = list.partition_point(|&t| t < window.hi);
                &list[lo..hi]
            }
            None => &[],
        }
    }

    /// All `(t, relation, object)` events of a subject within the window,
    /// sorted ascending.
    pub fn subject_events_in_window(
        &self,
        subject: EntityId,
        window: TimeWindow,
    ) -> &[(TimeIndex, RelationId, EntityId)] {
        match self.by_subject.get(&subject) {
            Some(list) => {
                let lo = list.partition_point(|&(t, _, _)| t < window.lo);
                let hi = list.partition_point(|&(t, _, _)| t < window.hi);
                &list[lo..hi]
            }
            None => &[],
        }
    }

    /// Distinct objects `o` with `(subject, relation, o, t)` in the index.
    pub fn truth_at(&self, subject: EntityId, relation: RelationId, t: TimeIndex) -> &[EntityId] {
        self.same_time_truth
            .get(&(subject, relation, t))
            .map_or(&[], Vec::as_slice)
    }

    pub fn contains(&self, q: &Quadruple) -> bool {
        self.by_pair_full
            .get(&(q.subject, q.relation, q.object))
            .is_some_and(|list| list.binary_search(&q.timestamp).is_ok())
    }

    /// Subjects present in the index, sorted ascending.
    pub fn subjects(&self) -> Vec<EntityId> {
        let mut subjects: Vec<_> = self.by_subject.keys().copied().collect();
        subjects.sort_unstable();
        subjects
    }

    /// All events of a subject, sorted by (t, relation, object).
    pub fn subject_events(&self, subject: EntityId) -> &[(TimeIndex, RelationId, EntityId)] {
        self.by_subject.get(&subject).map_or(&[], Vec::as_slice)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tkg::dataset_from_splits;

    fn index_of(train: Vec<Quadruple>) -> TemporalIndex {
        let t_max = train.iter().map(|q| q.timestamp).max().unwrap();
        let ds = dataset_from_splits(
            train,
            vec![Quadruple::new(0, 0, 0, t_max + 1)],
            vec![Quadruple::new(0, 0, 0, t_max + 2)],
        )
        .unwrap();
        TemporalIndex::build(&ds, &[Split::Train]).unwrap()
    }

    #[test]
    fn times_for_full_pattern_are_sorted() {
        let idx = index_of(vec![Quadruple::new(0, 0, 1, 7), Quadruple::new(0, 0, 1, 3)]);
        assert_eq!(
            idx.times_in_window(0, 0, 1, TimeWindow { lo: 0, hi: 100 }),
            &[3, 7]
        );
    }

    #[test]
    fn same_time_truth_collects_all_objects() {
        let idx = index_of(vec![Quadruple::new(0, 0, 1, 3), Quadruple::new(0, 0, 2, 3)]);
        assert_eq!(idx.truth_at(0, 0, 3), &[1, 2]);
        assert_eq!(idx.truth_at(0, 0, 4), &[] as &[EntityId]);
    }

    #[test]
    fn window_bounds_are_half_open() {
        let idx = index_of(vec![
            Quadruple::new(0, 0, 1, 2),
            Quadruple::new(0, 0, 2, 5),
            Quadruple::new(0, 0, 3, 9),
        ]);
        let window = TimeWindow::before(9, Some(7));
        assert_eq!(window, TimeWindow { lo: 2, hi: 9 });
        let hits: Vec<_> = idx
            .objects_in_window(0, 0, window)
            .iter()
            .map(|&(_, o)| o)
            .collect();
        assert_eq!(hits, vec![1, 2]);
    }

    #[test]
    fn full_history_window_saturates_at_zero() {
        let w = TimeWindow::before(3, None);
        assert_eq!(w, TimeWindow { lo: 0, hi: 3 });
        let w = TimeWindow::before(3, Some(10));
        assert_eq!(w, TimeWindow { lo: 0, hi: 3 });
    }

    #[test]
    fn subject_scan_covers_all_relations() {
        let idx = index_of(vec![
            Quadruple::new(0, 0, 1, 1),
            Quadruple::new(0, 1, 2, 2),
            Quadruple::new(3, 0, 1, 2),
        ]);
        let events = idx.subject_events_in_window(0, TimeWindow { lo: 0, hi: 10 });
        assert_eq!(events, &[(1, 0, 1), (2, 1, 2)]);
    }
}
