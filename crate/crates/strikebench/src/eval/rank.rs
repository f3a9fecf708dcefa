use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ScoreRow;
use crate::tkg::{Direction, EntityId};
use crate::{Error, Result};

/// How rank ties with the answer's score are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TiePolicy {
    /// Answer wins all ties.
    Optimistic,
    /// Answer is placed mid-tie: `rank += ⌊ties/2⌋`.
    Realistic,
    /// Answer loses all ties.
    Pessimistic,
}

impl TiePolicy {
    fn adjust(&self, ties: u64) -> u64 {
        match self {
            TiePolicy::Optimistic => 0,
            TiePolicy::Realistic => ties / 2,
            TiePolicy::Pessimistic => ties,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            TiePolicy::Optimistic => "optimistic",
            TiePolicy::Realistic => "realistic",
            TiePolicy::Pessimistic => "pessimistic",
        }
    }
}

impl std::fmt::Display for TiePolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TiePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "optimistic" => Ok(TiePolicy::Optimistic),
            "realistic" => Ok(TiePolicy::Realistic),
            "pessimistic" => Ok(TiePolicy::Pessimistic),
            other => Err(Error::Config(format!("unknown tie policy {other:?}"))),
        }
    }
}

/// Filtered rank of the answer entity within a score row.
///
/// Entities in `filter` are removed from contention (the answer itself is
/// never filtered). Rank is `1 + (#strictly greater) + tie adjustment`
/// over the surviving entities. For sparse rows, unlisted entities share
/// a score worse than every listed one and tie among themselves.
pub fn compute_rank(
    row: &ScoreRow,
    answer: EntityId,
    filter: &[EntityId],
    entity_count: u64,
    policy: TiePolicy,
) -> Result<u64> {
    let filtered = |e: EntityId| e != answer && filter.binary_search(&e).is_ok();
    debug_assert!(
        filter.windows(2).all(|w| w[0] <= w[1]),
        "filter must be sorted"
    );

    match row {
        ScoreRow::Dense(scores) => {
            let answer_idx = usize::try_from(answer)
                .ok()
                .filter(|&i| i < scores.len())
                .ok_or_else(|| {
                    Error::Validation(format!(
                        "answer entity {answer} outside dense vector of length {}",
                        scores.len()
                    ))
                })?;
            let answer_score = scores[answer_idx];
            let mut greater = 0u64;
            let mut ties = 0u64;
            for (i, &s) in scores.iter().enumerate() {
                if i == answer_idx || filtered(i as u64) {
                    continue;
                }
                if s > answer_score {
                    greater += 1;
                } else if s == answer_score {
                    ties += 1;
                }
            }
            Ok(1 + greater + policy.adjust(ties))
        }
        ScoreRow::Sparse(list) | ScoreRow::TopK(list) => {
            if entity_count == 0 {
                return Err(Error::Config(
                    "entity count required to rank sparse predictions".to_owned(),
                ));
            }
            let mut answer_score = None;
            let mut listed_contenders = 0u64;
            for &(e, s) in list {
                if e == answer {
                    answer_score = Some(s);
                } else if !filtered(e) {
                    listed_contenders += 1;
                }
            }
            match answer_score {
                Some(answer_score) => {
                    let mut greater = 0u64;
                    let mut ties = 0u64;
                    for &(e, s) in list {
                        if e == answer || filtered(e) {
                            continue;
                        }
                        if s > answer_score {
                            greater += 1;
                        } else if s == answer_score {
                            ties += 1;
                        }
                    }
                    Ok(1 + greater + policy.adjust(ties))
                }
                None => {
                    // Answer shares the implicit worst score with every
                    // other unlisted, unfiltered entity.
                    if answer >= entity_count {
                        return Err(Error::Validation(format!(
                            "answer entity {answer} ≥ entity count {entity_count}"
                        )));
                    }
                    let listed_ids: Vec<EntityId> = list.iter().map(|&(e, _)| e).collect();
                    let filtered_unlisted = filter
                        .iter()
                        .filter(|&&e| e != answer && !listed_ids.contains(&e))
                        .count() as u64;
                    let listed_total = list.iter().filter(|&&(e, _)| e != answer).count() as u64;
                    let unlisted_others = entity_count
                        .saturating_sub(listed_total)
                        .saturating_sub(filtered_unlisted)
                        .saturating_sub(1);
                    Ok(1 + listed_contenders + policy.adjust(unlisted_others))
                }
            }
        }
    }
}

/// One ranked (query, direction) with its joined strikingness value.
#[derive(Debug, Clone, PartialEq)]
pub struct RankRow {
    pub query_index: usize,
    pub direction: Direction,
    pub rank: u64,
    pub answer: EntityId,
    pub sk: Option<f64>,
}

/// Ranks for a full prediction set over one split.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub model_name: String,
    pub tie_policy: TiePolicy,
    /// False when any row came from a truncated top-K list, making MRR
    /// unreliable.
    pub mrr_available: bool,
    pub rows: Vec<RankRow>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RankTableHeader {
    model: String,
    tie_policy: TiePolicy,
    mrr_available: bool,
}

/// Write a rank table: `#`-prefixed JSON header, then TSV rows
/// `query_index, direction, rank, answer, sk` (sk column `NA` when
/// absent).
pub fn write_rank_table(path: &Path, table: &RankTable) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    let header = RankTableHeader {
        model: table.model_name.clone(),
        tie_policy: table.tie_policy,
        mrr_available: table.mrr_available,
    };
    writeln!(w, "#{}", serde_json::to_string(&header)?)?;
    for row in &table.rows {
        match row.sk {
            Some(sk) => writeln!(
                w,
                "{}\t{}\t{}\t{}\t{:.10}",
                row.query_index, row.direction, row.rank, row.answer, sk
            )?,
            None => writeln!(
                w,
                "{}\t{}\t{}\t{}\tNA",
                row.query_index, row.direction, row.rank, row.answer
            )?,
        }
    }
    w.flush()?;
    Ok(())
}

/// Read a rank table written by [`write_rank_table`].
pub fn read_rank_table(path: &Path) -> Result<RankTable> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut header: Option<RankTableHeader> = None;
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim_end();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(json) = trimmed.strip_prefix('#') {
            if header.is_none() {
                header = Some(
                    serde_json::from_str(json)
                        .map_err(|e| Error::parse(path, lineno, e.to_string()))?,
                );
            }
            continue;
        }
        let cols: Vec<&str> = trimmed.split('\t').collect();
        if cols.len() != 5 {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected 5 columns, found {}", cols.len()),
            ));
        }
        let parse_err = |e: String| Error::parse(path, lineno, e);
        rows.push(RankRow {
            query_index: cols[0]
                .parse()
                .map_err(|e: std::num::ParseIntError| parse_err(e.to_string()))?,
            direction: cols[1]
                .parse()
                .map_err(|_| parse_err(format!("bad direction {:?}", cols[1])))?,
            rank: cols[2]
                .parse()
                .map_err(|e: std::num::ParseIntError| parse_err(e.to_string()))?,
            answer: cols[3]
                .parse()
                .map_err(|e: std::num::ParseIntError| parse_err(e.to_string()))?,
            sk: match cols[4] {
                "NA" => None,
                v => Some(
                    v.parse()
                        .map_err(|e: std::num::ParseFloatError| parse_err(e.to_string()))?,
                ),
            },
        });
    }
    let header =
        header.ok_or_else(|| Error::Validation(format!("{}: missing header", path.display())))?;
    Ok(RankTable {
        model_name: header.model,
        tie_policy: header.tie_policy,
        mrr_available: header.mrr_available,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unique_maximum_ranks_first() {
        let row = ScoreRow::Dense(vec![0.1, 0.9, 0.3]);
        assert_eq!(
            compute_rank(&row, 1, &[], 3, TiePolicy::Realistic).unwrap(),
            1
        );
    }

    #[test]
    fn realistic_policy_places_answer_mid_tie() {
        // Answer ties with 2 others: 1 + 0 + ⌊2/2⌋ = 2.
        let row = ScoreRow::Dense(vec![0.5, 0.5, 0.5, 0.1]);
        assert_eq!(
            compute_rank(&row, 0, &[], 4, TiePolicy::Realistic).unwrap(),
            2
        );
        assert_eq!(
            compute_rank(&row, 0, &[], 4, TiePolicy::Optimistic).unwrap(),
            1
        );
        assert_eq!(
            compute_rank(&row, 0, &[], 4, TiePolicy::Pessimistic).unwrap(),
            3
        );
    }

    #[test]
    fn filtering_removes_higher_scored_entities() {
        let row = ScoreRow::Dense(vec![0.2, 0.9, 0.1]);
        assert_eq!(
            compute_rank(&row, 0, &[], 3, TiePolicy::Realistic).unwrap(),
            2
        );
        assert_eq!(
            compute_rank(&row, 0, &[1], 3, TiePolicy::Realistic).unwrap(),
            1
        );
    }

    #[test]
    fn answer_outside_dense_vector_is_an_error() {
        let row = ScoreRow::Dense(vec![0.2, 0.9]);
        assert!(compute_rank(&row, 5, &[], 2, TiePolicy::Realistic).is_err());
    }

    #[test]
    fn sparse_listed_answer_beats_unlisted_entities() {
        let row = ScoreRow::Sparse(vec![(1, 1.0), (2, 3.0)]);
        // Entities 0, 3, 4 are unlisted and rank below the answer.
        assert_eq!(
            compute_rank(&row, 1, &[], 5, TiePolicy::Realistic).unwrap(),
            2
        );
    }

    #[test]
    fn sparse_unlisted_answer_ties_with_other_unlisted() {
        let row = ScoreRow::Sparse(vec![(1, 1.0), (2, 3.0)]);
        // Unlisted answer 0 ties with unlisted {3, 4}: 1 + 2 + ⌊2/2⌋ = 4.
        assert_eq!(
            compute_rank(&row, 0, &[], 5, TiePolicy::Realistic).unwrap(),
            4
        );
        // Pessimistic: 1 + 2 + 2 = 5; optimistic: 3.
        assert_eq!(
            compute_rank(&row, 0, &[], 5, TiePolicy::Pessimistic).unwrap(),
            5
        );
        assert_eq!(
            compute_rank(&row, 0, &[], 5, TiePolicy::Optimistic).unwrap(),
            3
        );
    }

    #[test]
    fn sparse_filter_applies_to_listed_and_unlisted() {
        let row = ScoreRow::Sparse(vec![(1, 1.0), (2, 3.0)]);
        // Filter the higher-scored listed entity 2 and unlisted entity 3.
        assert_eq!(
            compute_rank(&row, 1, &[2, 3], 5, TiePolicy::Realistic).unwrap(),
            1
        );
        // Unlisted answer with one unlisted competitor filtered out.
        assert_eq!(
            compute_rank(&row, 0, &[3], 5, TiePolicy::Pessimistic).unwrap(),
            1 + 2 + 1
        );
    }

    #[test]
    fn rank_table_round_trip() {
        let table = RankTable {
            model_name: "m".into(),
            tie_policy: TiePolicy::Realistic,
            mrr_available: true,
            rows: vec![
                RankRow {
                    query_index: 0,
                    direction: Direction::Tail,
                    rank: 3,
                    answer: 7,
                    sk: Some(0.25),
                },
                RankRow {
                    query_index: 0,
                    direction: Direction::Head,
                    rank: 1,
                    answer: 2,
                    sk: None,
                },
            ],
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ranks.tsv");
        write_rank_table(&path, &table).unwrap();
        let reread = read_rank_table(&path).unwrap();
        assert_eq!(reread.model_name, "m");
        assert_eq!(reread.rows.len(), 2);
        assert_eq!(reread.rows[0].rank, 3);
        assert_eq!(reread.rows[0].sk, Some(0.25));
        assert_eq!(reread.rows[1].sk, None);
    }
}
