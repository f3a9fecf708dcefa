//! Linear score fusion of two prediction sets.
//!
//! Fused scores are `η·a + (1−η)·b` per entity after an optional
//! per-query normalization; η is grid-searched on a validation split.

use serde::{Deserialize, Serialize};

use crate::eval::{aggregate, PredictionSet, RankingContext, ScoreRow};
use crate::rsmf::StrikingnessTable;
use crate::{Error, Result};

/// Per-query score normalization applied before mixing. Path- and
/// representation-based model scores live on different scales; min-max is
/// the default, `none` reproduces the raw linear mix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreNormalization {
    None,
    MinMax,
    L2,
}

impl std::str::FromStr for ScoreNormalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(ScoreNormalization::None),
            "minmax" => Ok(ScoreNormalization::MinMax),
            "l2" => Ok(ScoreNormalization::L2),
            other => Err(Error::Config(format!("unknown normalization {other:?}"))),
        }
    }
}

/// Fusion parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub eta: f64,
    pub grid_step: f64,
    pub normalization: ScoreNormalization,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            eta: 0.5,
            grid_step: 0.1,
            normalization: ScoreNormalization::MinMax,
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::Config(format!(
                "eta must lie in [0, 1], got {}",
                self.eta
            )));
        }
        let steps = 1.0 / self.grid_step;
        if self.grid_step <= 0.0 || (steps - steps.round()).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "grid step {} does not divide 1 evenly",
                self.grid_step
            )));
        }
        Ok(())
    }

    /// The η grid: 0, step, …, 1.
    pub fn grid(&self) -> Vec<f64> {
        let n = (1.0 / self.grid_step).round() as usize;
        (0..=n).map(|i| i as f64 * self.grid_step).collect()
    }
}

fn normalize(scores: &mut [f64], normalization: ScoreNormalization) {
    match normalization {
        ScoreNormalization::None => {}
        ScoreNormalization::MinMax => {
            let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
            let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let range = max - min;
            if range > 0.0 {
                for s in scores.iter_mut() {
                    *s = (*s - min) / range;
                }
            } else {
                scores.iter_mut().for_each(|s| *s = 0.0);
            }
        }
        ScoreNormalization::L2 => {
            let norm = scores.iter().map(|s| s * s).sum::<f64>().sqrt();
            if norm > 0.0 {
                scores.iter_mut().for_each(|s| *s /= norm);
            }
        }
    }
}

/// Mix two dense score vectors for one query: `η·a + (1−η)·b` after the
/// configured normalization. The inputs must share one entity space.
pub fn combine_scores(a: &[f64], b: &[f64], cfg: &EnsembleConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    if a.len() != b.len() {
        return Err(Error::Validation(format!(
            "score dimension mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    normalize(&mut a, cfg.normalization);
    normalize(&mut b, cfg.normalization);
    Ok(a.iter()
        .zip(&b)
        .map(|(&x, &y)| cfg.eta * x + (1.0 - cfg.eta) * y)
        .collect())
}

/// Fuse two whole prediction sets (densifying sparse rows with the
/// worst-score convention) into a dense prediction set.
pub fn combine_prediction_sets(
    a: &PredictionSet,
    b: &PredictionSet,
    entity_count: u64,
    cfg: &EnsembleConfig,
    model_name: &str,
) -> Result<PredictionSet> {
    cfg.validate()?;
    let keys_a: Vec<_> = a.keys().copied().collect();
    let keys_b: Vec<_> = b.keys().copied().collect();
    if keys_a != keys_b {
        return Err(Error::Validation(
            "prediction sets cover different query sets".to_owned(),
        ));
    }
    let mut fused = PredictionSet::new(model_name, Some(entity_count));
    for &(qi, direction) in &keys_a {
        let row_a = a.row(qi, direction).unwrap().to_dense(entity_count)?;
        let row_b = b.row(qi, direction).unwrap().to_dense(entity_count)?;
        let mixed = combine_scores(&row_a, &row_b, cfg)?;
        fused.insert(qi, direction, ScoreRow::Dense(mixed))?;
    }
    Ok(fused)
}

/// Which validation metric the η search maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMetric {
    Mrr,
    Wmrr,
}

impl std::str::FromStr for SearchMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mrr" => Ok(SearchMetric::Mrr),
            "wmrr" => Ok(SearchMetric::Wmrr),
            other => Err(Error::Config(format!("unknown search metric {other:?}"))),
        }
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaPoint {
    pub eta: f64,
    pub score: f64,
}

/// Result of an η grid search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaScan {
    pub best_eta: f64,
    pub metric: SearchMetric,
    pub grid: Vec<EtaPoint>,
}

/// Grid-search η on validation predictions, maximizing the chosen metric
/// under the given ranking context. Both sets must cover the same query
/// set (an empty overlap is an error); ties break toward 0.5.
///
/// `sk` and `b` feed the weighted metric and are required for
/// [`SearchMetric::Wmrr`].
pub fn search_eta(
    valid_a: &PredictionSet,
    valid_b: &PredictionSet,
    context: &RankingContext<'_>,
    sk: Option<&StrikingnessTable>,
    bias_b: f64,
    metric: SearchMetric,
    cfg: &EnsembleConfig,
) -> Result<EtaScan> {
    cfg.validate()?;
    if valid_a.is_empty() || valid_b.is_empty() {
        return Err(Error::Validation(
            "empty overlap between validation prediction sets".to_owned(),
        ));
    }
    if metric == SearchMetric::Wmrr && sk.is_none() {
        return Err(Error::Config(
            "wmrr search needs a strikingness table for the validation split".to_owned(),
        ));
    }
    let entity_count = context.entity_count;
    let mut grid = Vec::new();
    let mut best: Option<EtaPoint> = None;
    for eta in cfg.grid() {
        let point_cfg = EnsembleConfig { eta, ..*cfg };
        let fused = combine_prediction_sets(valid_a, valid_b, entity_count, &point_cfg, "fused")?;
        let table = context.rank_predictions(&fused, sk)?;
        let report = aggregate(&table, bias_b)?;
        let score = match metric {
            SearchMetric::Mrr => report.org.mrr.ok_or_else(|| {
                Error::Validation("MRR unavailable for truncated top-K inputs".to_owned())
            })?,
            SearchMetric::Wmrr => report
                .sk
                .and_then(|m| m.mrr)
                .ok_or_else(|| Error::Validation("WMRR unavailable".to_owned()))?,
        };
        grid.push(EtaPoint { eta, score });
        let closer_to_half = |x: f64, y: f64| (x - 0.5).abs() < (y - 0.5).abs() - 1e-15;
        best = match best {
            None => Some(EtaPoint { eta, score }),
            Some(current) => {
                if score > current.score + 1e-15
                    || ((score - current.score).abs() <= 1e-15 && closer_to_half(eta, current.eta))
                {
                    Some(EtaPoint { eta, score })
                } else {
                    Some(current)
                }
            }
        };
    }
    Ok(EtaScan {
        best_eta: best.unwrap().eta,
        metric,
        grid,
    })
}
