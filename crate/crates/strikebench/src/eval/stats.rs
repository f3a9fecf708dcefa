use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::{Error, Result};

/// Results of the two group-comparison tests, one-sided with the
/// alternative "group A stochastically greater than group B".
///
/// `welch_t`/`welch_p` are `None` when either group has fewer than two
/// samples or both groups have zero variance (the statistic is
/// undefined). `mann_whitney_p` is `None` when every pooled value is
/// identical (zero-variance normal approximation).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignificanceResult {
    pub welch_t: Option<f64>,
    pub welch_p: Option<f64>,
    pub mann_whitney_u: f64,
    pub mann_whitney_p: Option<f64>,
}

fn mean_and_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

fn welch(a: &[f64], b: &[f64]) -> (Option<f64>, Option<f64>) {
    if a.len() < 2 || b.len() < 2 {
        return (None, None);
    }
    let (mean_a, var_a) = mean_and_var(a);
    let (mean_b, var_b) = mean_and_var(b);
    if var_a == 0.0 && var_b == 0.0 {
        return (None, None);
    }
    let na = a.len() as f64;
    let nb = b.len() as f64;
    let se2 = var_a / na + var_b / nb;
    let t = (mean_a - mean_b) / se2.sqrt();
    // Welch–Satterthwaite degrees of freedom.
    let df = se2 * se2 / ((var_a / na).powi(2) / (na - 1.0) + (var_b / nb).powi(2) / (nb - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).expect("valid t distribution");
    let p = 1.0 - dist.cdf(t);
    (Some(t), Some(p))
}

/// Midranks of the pooled sample plus the tie-group sizes.
fn midranks(pooled: &[f64]) -> (Vec<f64>, Vec<u64>) {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&i, &j| pooled[i].partial_cmp(&pooled[j]).unwrap());
    let mut ranks = vec![0.0; pooled.len()];
    let mut tie_sizes = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && pooled[order[j]] == pooled[order[i]] {
            j += 1;
        }
        // Positions i..j share ranks i+1..j; midrank is their mean.
        let midrank = (i + j + 1) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = midrank;
        }
        tie_sizes.push((j - i) as u64);
        i = j;
    }
    (ranks, tie_sizes)
}

fn mann_whitney(a: &[f64], b: &[f64]) -> (f64, Option<f64>) {
    let n1 = a.len() as f64;
    let n2 = b.len() as f64;
    let pooled: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    let (ranks, tie_sizes) = midranks(&pooled);
    let r1: f64 = ranks[..a.len()].iter().sum();
    let u1 = r1 - n1 * (n1 + 1.0) / 2.0;

    let n = n1 + n2;
    let tie_term: f64 = tie_sizes
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum();
    let sigma2 = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if sigma2 <= 0.0 {
        return (u1, None);
    }
    let mu = n1 * n2 / 2.0;
    let z = (u1 - mu) / sigma2.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    (u1, Some(1.0 - normal.cdf(z)))
}

/// Compare two non-empty groups of metric values with Welch's t-test and
/// the Mann-Whitney U test (normal approximation with tie correction, no
/// continuity correction). One-sided alternative: A > B.
pub fn group_significance(a: &[f64], b: &[f64]) -> Result<SignificanceResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Validation(
            "both groups must be non-empty".to_owned(),
        ));
    }
    if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Validation("group values must be finite".to_owned()));
    }
    let (welch_t, welch_p) = welch(a, b);
    let (mann_whitney_u, mann_whitney_p) = mann_whitney(a, b);
    Ok(SignificanceResult {
        welch_t,
        welch_p,
        mann_whitney_u,
        mann_whitney_p,
    })
}
