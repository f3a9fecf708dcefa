use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{RankRow, RankTable, TiePolicy};
use crate::{Error, Result};

/// MRR and Hits@{1,3,10} as fractions in [0, 1]. `mrr` is `None` when the
/// underlying predictions were truncated top-K lists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricBundle {
    pub mrr: Option<f64>,
    pub hits1: f64,
    pub hits3: f64,
    pub hits10: f64,
}

/// Relative decrease `(ORG − SK)/ORG` per metric; `None` where ORG is
/// zero or unavailable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricDeltas {
    pub mrr: Option<f64>,
    pub hits1: Option<f64>,
    pub hits3: Option<f64>,
    pub hits10: Option<f64>,
}

/// One strikingness bin with its mean metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinRow {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub mrr: Option<f64>,
    pub hits1: Option<f64>,
    pub hits3: Option<f64>,
    pub hits10: Option<f64>,
}

/// Aggregate evaluation under both the original and the
/// strikingness-weighted framework.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model_name: String,
    pub tie_policy: TiePolicy,
    pub bias_b: f64,
    /// Number of (query, direction) rows aggregated.
    pub query_directions: usize,
    pub org: MetricBundle,
    /// Weighted metrics; `None` when rows carry no strikingness values.
    pub sk: Option<MetricBundle>,
    pub delta: Option<MetricDeltas>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bins: Option<Vec<BinRow>>,
}

/// Weight of one event in the strikingness-aware metrics.
pub fn event_weight(sk: f64, b: f64) -> f64 {
    sk + b
}

fn weighted_metrics(rows: &[RankRow], b: f64, mrr_available: bool) -> MetricBundle {
    let mut weight_sum = 0.0;
    let mut mrr = 0.0;
    let mut hits = [0.0f64; 3];
    for row in rows {
        let weight = event_weight(row.sk.unwrap_or(0.0), b);
        weight_sum += weight;
        mrr += weight / row.rank as f64;
        for (slot, k) in hits.iter_mut().zip([1u64, 3, 10]) {
            if row.rank <= k {
                *slot += weight;
            }
        }
    }
    MetricBundle {
        mrr: mrr_available.then_some(mrr / weight_sum),
        hits1: hits[0] / weight_sum,
        hits3: hits[1] / weight_sum,
        hits10: hits[2] / weight_sum,
    }
}

fn unweighted_metrics(rows: &[RankRow], mrr_available: bool) -> MetricBundle {
    let n = rows.len() as f64;
    let mrr = rows.iter().map(|r| 1.0 / r.rank as f64).sum::<f64>() / n;
    let hit = |k: u64| rows.iter().filter(|r| r.rank <= k).count() as f64 / n;
    MetricBundle {
        mrr: mrr_available.then_some(mrr),
        hits1: hit(1),
        hits3: hit(3),
        hits10: hit(10),
    }
}

fn delta(org: f64, sk: f64) -> Option<f64> {
    (org > 0.0).then(|| (org - sk) / org)
}

/// Aggregate a rank table into original and strikingness-weighted
/// metrics.
///
/// Original metrics average both directions uniformly. Weighted metrics
/// weight each row by `sk + b`. Rows must either all carry strikingness
/// or none; `b ≤ 0` combined with any `sk = 0` is rejected as a division
/// hazard.
pub fn aggregate(table: &RankTable, b: f64) -> Result<EvalReport> {
    if table.rows.is_empty() {
        return Err(Error::Validation("empty rank table".to_owned()));
    }
    let with_sk = table.rows.iter().filter(|r| r.sk.is_some()).count();
    if with_sk != 0 && with_sk != table.rows.len() {
        return Err(Error::Validation(format!(
            "{} of {} rank rows carry strikingness values; the join is incomplete",
            with_sk,
            table.rows.len()
        )));
    }
    let has_sk = with_sk == table.rows.len();
    if has_sk {
        for row in &table.rows {
            let sk = row.sk.unwrap();
            if !(0.0..=1.0).contains(&sk) {
                return Err(Error::Validation(format!(
                    "strikingness {sk} outside [0, 1] at query {}",
                    row.query_index
                )));
            }
            if b <= 0.0 && sk == 0.0 {
                return Err(Error::Config(format!(
                    "b = {b} with a zero-strikingness event gives zero weight; b must be > 0"
                )));
            }
        }
    }

    let org = unweighted_metrics(&table.rows, table.mrr_available);
    let (sk, deltas) = if has_sk {
        let sk = weighted_metrics(&table.rows, b, table.mrr_available);
        let deltas = MetricDeltas {
            mrr: match (org.mrr, sk.mrr) {
                (Some(o), Some(s)) => delta(o, s),
                _ => None,
            },
            hits1: delta(org.hits1, sk.hits1),
            hits3: delta(org.hits3, sk.hits3),
            hits10: delta(org.hits10, sk.hits10),
        };
        (Some(sk), Some(deltas))
    } else {
        (None, None)
    };

    Ok(EvalReport {
        model_name: table.model_name.clone(),
        tie_policy: table.tie_policy,
        bias_b: b,
        query_directions: table.rows.len(),
        org,
        sk,
        delta: deltas,
        bins: None,
    })
}

/// Number of bins covering [0, 1] at the given width; the final bin is
/// closed at 1.0.
fn bin_count(width: f64) -> usize {
    let inv = 1.0 / width;
    if (inv - inv.round()).abs() < 1e-9 {
        inv.round() as usize
    } else {
        inv.ceil() as usize
    }
}

/// Group rows by strikingness into `[0, Δ), [Δ, 2Δ), …` with the final
/// bin closed at 1.0, and compute per-bin mean metrics. Empty bins are
/// emitted with count 0. All rows must carry strikingness.
pub fn group_by_strikingness(table: &RankTable, bin_width: f64) -> Result<Vec<BinRow>> {
    if !(bin_width > 0.0 && bin_width <= 1.0) {
        return Err(Error::Config(format!(
            "bin width must lie in (0, 1], got {bin_width}"
        )));
    }
    let n_bins = bin_count(bin_width);
    let mut buckets: Vec<Vec<&RankRow>> = vec![Vec::new(); n_bins];
    for row in &table.rows {
        let sk = row.sk.ok_or_else(|| {
            Error::Validation(format!(
                "rank row for query {} has no strikingness value",
                row.query_index
            ))
        })?;
        let idx = ((sk / bin_width) as usize).min(n_bins - 1);
        buckets[idx].push(row);
    }
    let mut out = Vec::with_capacity(n_bins);
    for (i, bucket) in buckets.iter().enumerate() {
        let lo = i as f64 * bin_width;
        let hi = if i + 1 == n_bins {
            1.0
        } else {
            (i + 1) as f64 * bin_width
        };
        if bucket.is_empty() {
            out.push(BinRow {
                lo,
                hi,
                count: 0,
                mrr: None,
                hits1: None,
                hits3: None,
                hits10: None,
            });
            continue;
        }
        let n = bucket.len() as f64;
        let mrr = bucket.iter().map(|r| 1.0 / r.rank as f64).sum::<f64>() / n;
        let hit = |k: u64| bucket.iter().filter(|r| r.rank <= k).count() as f64 / n;
        out.push(BinRow {
            lo,
            hi,
            count: bucket.len(),
            mrr: table.mrr_available.then_some(mrr),
            hits1: Some(hit(1)),
            hits3: Some(hit(3)),
            hits10: Some(hit(10)),
        });
    }
    Ok(out)
}

/// Write per-bin rows as plot-ready CSV (bin bounds, event count, mean
/// metrics).
pub fn write_bins_csv(path: &Path, bins: &[BinRow]) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "bin_lo,bin_hi,count,mrr,hits@1,hits@3,hits@10")?;
    let cell = |v: Option<f64>| v.map(|v| format!("{v:.6}")).unwrap_or_default();
    for bin in bins {
        writeln!(
            w,
            "{:.2},{:.2},{},{},{},{},{}",
            bin.lo,
            bin.hi,
            bin.count,
            cell(bin.mrr),
            cell(bin.hits1),
            cell(bin.hits3),
            cell(bin.hits10)
        )?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tkg::Direction;
    use approx::assert_relative_eq;

    fn table(rows: Vec<(u64, Option<f64>)>) -> RankTable {
        RankTable {
            model_name: "m".into(),
            tie_policy: TiePolicy::Realistic,
            mrr_available: true,
            rows: rows
                .into_iter()
                .enumerate()
                .map(|(i, (rank, sk))| RankRow {
                    query_index: i / 2,
                    direction: if i % 2 == 0 {
                        Direction::Tail
                    } else {
                        Direction::Head
                    },
                    rank,
                    answer: 0,
                    sk,
                })
                .collect(),
        }
    }

    #[test]
    fn constant_strikingness_makes_weighted_equal_unweighted() {
        let t = table(vec![
            (1, Some(0.37)),
            (4, Some(0.37)),
            (2, Some(0.37)),
            (9, Some(0.37)),
        ]);
        let report = aggregate(&t, 0.1).unwrap();
        let sk = report.sk.unwrap();
        assert!((report.org.mrr.unwrap() - sk.mrr.unwrap()).abs() < 1e-12);
        assert!((report.org.hits3 - sk.hits3).abs() < 1e-12);
    }

    #[test]
    fn weighted_mrr_matches_hand_computation() {
        // ranks [1, 2], sk [1.0, 0.0], b = 0.1 → (1.1 + 0.05)/1.2.
        let t = table(vec![(1, Some(1.0)), (2, Some(0.0))]);
        let report = aggregate(&t, 0.1).unwrap();
        assert_relative_eq!(
            report.sk.unwrap().mrr.unwrap(),
            (1.1 * 1.0 + 0.1 * 0.5) / 1.2,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            report.sk.unwrap().mrr.unwrap(),
            0.9583333333,
            epsilon = 1e-9
        );
    }

    #[test]
    fn nonpositive_bias_with_zero_strikingness_is_rejected() {
        let t = table(vec![(1, Some(0.0)), (2, Some(0.5))]);
        assert!(aggregate(&t, 0.0).is_err());
        assert!(aggregate(&t, -0.5).is_err());
        assert!(aggregate(&t, 0.1).is_ok());
    }

    #[test]
    fn rows_without_strikingness_give_org_only_report() {
        let t = table(vec![(1, None), (2, None)]);
        let report = aggregate(&t, 0.1).unwrap();
        assert!(report.sk.is_none());
        assert!(report.delta.is_none());
        assert!(report.org.mrr.is_some());
    }

    #[test]
    fn partial_strikingness_join_is_rejected() {
        let t = table(vec![(1, Some(0.2)), (2, None)]);
        assert!(aggregate(&t, 0.1).is_err());
    }

    #[test]
    fn delta_is_relative_decrease() {
        let t = table(vec![(1, Some(1.0)), (2, Some(0.0))]);
        let report = aggregate(&t, 0.1).unwrap();
        let org = report.org.mrr.unwrap();
        let sk = report.sk.unwrap().mrr.unwrap();
        assert_relative_eq!(
            report.delta.unwrap().mrr.unwrap(),
            (org - sk) / org,
            epsilon = 1e-15
        );
    }

    #[test]
    fn bins_cover_unit_interval_with_closed_top() {
        let t = table(vec![
            (1, Some(0.05)),
            (2, Some(1.0)),
            (3, Some(0.95)),
            (4, Some(0.10)),
        ]);
        let bins = group_by_strikingness(&t, 0.1).unwrap();
        assert_eq!(bins.len(), 10);
        assert_eq!(bins[0].count, 1); // sk 0.05 → [0, 0.1)
        assert_eq!(bins[1].count, 1); // sk 0.10 → [0.1, 0.2)
        assert_eq!(bins[9].count, 2); // sk 0.95 and 1.0 → [0.9, 1.0]
        assert_eq!(bins[9].hi, 1.0);
        assert_eq!(bins[4].count, 0);
        assert!(bins[4].mrr.is_none());
    }

    #[test]
    fn uneven_width_gets_a_short_final_bin() {
        let t = table(vec![(1, Some(0.95)), (2, Some(0.0))]);
        let bins = group_by_strikingness(&t, 0.3).unwrap();
        assert_eq!(bins.len(), 4);
        assert_relative_eq!(bins[3].lo, 0.9, epsilon = 1e-12);
        assert_eq!(bins[3].hi, 1.0);
        assert_eq!(bins[3].count, 1);
    }

    #[test]
    fn count_weighted_bin_mrr_recombines_to_global() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let rows: Vec<(u64, Option<f64>)> = (0..500)
            .map(|_| {
                (
                    rng.random_range(1..200u64),
                    Some((rng.random_range(0..=1000) as f64) / 1000.0),
                )
            })
            .collect();
        let t = table(rows);
        let report = aggregate(&t, 0.1).unwrap();
        let bins = group_by_strikingness(&t, 0.1).unwrap();
        let total: usize = bins.iter().map(|b| b.count).sum();
        let recombined: f64 = bins
            .iter()
            .filter(|b| b.count > 0)
            .map(|b| b.mrr.unwrap() * b.count as f64)
            .sum::<f64>()
            / total as f64;
        assert_relative_eq!(recombined, report.org.mrr.unwrap(), epsilon = 1e-9);
    }

    #[test]
    fn invalid_bin_width_is_rejected() {
        let t = table(vec![(1, Some(0.5))]);
        assert!(group_by_strikingness(&t, 0.0).is_err());
        assert!(group_by_strikingness(&t, 1.5).is_err());
    }
}
