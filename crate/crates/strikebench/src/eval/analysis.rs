use std::collections::{BTreeMap, BTreeSet};

use super::RankTable;
use crate::tkg::{Direction, Quadruple, TemporalIndex, TimeWindow};
use crate::{Error, Result};

/// Neighborhood overlap of an event: the Jaccard similarity between the
/// windowed historical neighbor sets of its subject and object.
///
/// Neighbors cover both argument positions (the index is built over the
/// inverse-augmented graph, so a subject scan sees incoming edges too).
/// Returns 0 when the union is empty. Symmetric under event inversion.
pub fn neighborhood_overlap(
    event: &Quadruple,
    history: &TemporalIndex,
    window: Option<u64>,
) -> f64 {
    let w = TimeWindow::before(event.timestamp, window);
    let neighbors = |entity| -> BTreeSet<u64> {
        history
            .subject_events_in_window(entity, w)
            .iter()
            .map(|&(_, _, o)| o)
            .collect()
    };
    let n_s = neighbors(event.subject);
    let n_o = neighbors(event.object);
    let intersection = n_s.intersection(&n_o).count();
    let union = n_s.union(&n_o).count();
    if union == 0 {
        0.0
    } else {
        intersection as f64 / union as f64
    }
}

/// Fraction of queries on which at least `n` of the given models achieve
/// rank ≤ k.
///
/// All tables must cover identical (query, direction) sets.
pub fn n_model_hits(tables: &[&RankTable], n: usize, k: u64) -> Result<f64> {
    if tables.is_empty() {
        return Err(Error::Config("no rank tables given".to_owned()));
    }
    if n == 0 || n > tables.len() {
        return Err(Error::Config(format!(
            "n must lie in 1..={}, got {n}",
            tables.len()
        )));
    }
    let keys = |t: &RankTable| -> Result<BTreeSet<(usize, Direction)>> {
        let set: BTreeSet<_> = t
            .rows
            .iter()
            .map(|r| (r.query_index, r.direction))
            .collect();
        if set.len() != t.rows.len() {
            return Err(Error::Validation(format!(
                "rank table {:?} has duplicate query rows",
                t.model_name
            )));
        }
        Ok(set)
    };
    let reference = keys(tables[0])?;
    for table in &tables[1..] {
        if keys(table)? != reference {
            return Err(Error::Validation(format!(
                "rank tables {:?} and {:?} cover different query sets",
                tables[0].model_name, table.model_name
            )));
        }
    }

    let mut hit_counts: BTreeMap<(usize, Direction), usize> =
        reference.iter().map(|&key| (key, 0)).collect();
    for table in tables {
        for row in &table.rows {
            if row.rank <= k {
                *hit_counts
                    .get_mut(&(row.query_index, row.direction))
                    .unwrap() += 1;
            }
        }
    }
    let satisfied = hit_counts.values().filter(|&&c| c >= n).count();
    Ok(satisfied as f64 / reference.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{RankRow, TiePolicy};
    use crate::tkg::{augment_inverse, dataset_from_splits, Split};

    #[test]
    fn jaccard_hand_cases() {
        // N_s = {1,2,3} via subject 0, N_o = {3,4} via subject 9.
        let train = vec![
            Quadruple::new(0, 0, 1, 1),
            Quadruple::new(0, 0, 2, 2),
            Quadruple::new(0, 1, 3, 3),
            Quadruple::new(9, 0, 3, 1),
            Quadruple::new(9, 1, 4, 2),
        ];
        let ds = dataset_from_splits(
            train,
            vec![Quadruple::new(0, 0, 0, 10)],
            vec![Quadruple::new(0, 0, 9, 11)],
        )
        .unwrap();
        let ds = augment_inverse(ds).unwrap();
        let idx = TemporalIndex::build(&ds, &[Split::Train]).unwrap();
        let event = Quadruple::new(0, 0, 9, 11);
        assert_eq!(neighborhood_overlap(&event, &idx, None), 0.25);
    }

    #[test]
    fn identical_and_disjoint_neighborhoods() {
        let train = vec![
            Quadruple::new(0, 0, 1, 1),
            Quadruple::new(0, 0, 2, 1),
            Quadruple::new(5, 0, 1, 1),
            Quadruple::new(5, 0, 2, 1),
            Quadruple::new(7, 0, 3, 1),
        ];
        let ds = dataset_from_splits(
            train,
            vec![Quadruple::new(0, 0, 0, 10)],
            vec![Quadruple::new(0, 0, 5, 11)],
        )
        .unwrap();
        let ds = augment_inverse(ds).unwrap();
        let idx = TemporalIndex::build(&ds, &[Split::Train]).unwrap();
        assert_eq!(
            neighborhood_overlap(&Quadruple::new(0, 0, 5, 11), &idx, None),
            1.0
        );
        assert_eq!(
            neighborhood_overlap(&Quadruple::new(0, 0, 7, 11), &idx, None),
            0.0
        );
        // Unknown entities: empty union → 0.
        assert_eq!(
            neighborhood_overlap(&Quadruple::new(40, 0, 41, 11), &idx, None),
            0.0
        );
    }

    #[test]
    fn inversion_symmetry() {
        let train = vec![
            Quadruple::new(0, 0, 1, 1),
            Quadruple::new(0, 1, 2, 2),
            Quadruple::new(9, 0, 2, 1),
        ];
        let ds = dataset_from_splits(
            train,
            vec![Quadruple::new(0, 0, 0, 10)],
            vec![Quadruple::new(0, 0, 9, 11)],
        )
        .unwrap();
        let raw = ds.num_relations_raw;
        let ds = augment_inverse(ds).unwrap();
        let idx = TemporalIndex::build(&ds, &[Split::Train]).unwrap();
        let event = Quadruple::new(0, 0, 9, 11);
        let inv = event.inverse(raw);
        assert_eq!(
            neighborhood_overlap(&event, &idx, None),
            neighborhood_overlap(&inv, &idx, None)
        );
    }

    fn rank_table(name: &str, ranks: &[u64]) -> RankTable {
        RankTable {
            model_name: name.into(),
            tie_policy: TiePolicy::Realistic,
            mrr_available: true,
            rows: ranks
                .iter()
                .enumerate()
                .map(|(i, &rank)| RankRow {
                    query_index: i,
                    direction: Direction::Tail,
                    rank,
                    answer: 0,
                    sk: None,
                })
                .collect(),
        }
    }

    #[test]
    fn single_model_equals_hits_at_k() {
        let t = rank_table("a", &[1, 4, 2, 11]);
        let got = n_model_hits(&[&t], 1, 3).unwrap();
        assert_eq!(got, 0.5);
    }

    #[test]
    fn all_models_with_one_always_wrong_gives_zero() {
        let good = rank_table("good", &[1, 1, 1]);
        let bad = rank_table("bad", &[100, 100, 100]);
        assert_eq!(n_model_hits(&[&good, &bad], 2, 3).unwrap(), 0.0);
    }

    #[test]
    fn monotone_in_n() {
        let a = rank_table("a", &[1, 5, 2, 9, 1]);
        let b = rank_table("b", &[2, 1, 8, 1, 1]);
        let c = rank_table("c", &[3, 3, 3, 3, 30]);
        let tables = [&a, &b, &c];
        let mut last = 1.0;
        for n in 1..=3 {
            let v = n_model_hits(&tables, n, 3).unwrap();
            assert!(v <= last + 1e-15);
            last = v;
        }
    }

    #[test]
    fn mismatched_query_sets_are_rejected() {
        let a = rank_table("a", &[1, 2]);
        let b = rank_table("b", &[1, 2, 3]);
        assert!(n_model_hits(&[&a, &b], 1, 3).is_err());
        assert!(n_model_hits(&[&a], 0, 3).is_err());
        assert!(n_model_hits(&[&a], 2, 3).is_err());
    }
}
