use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{event_strikingness, RsmfConfig, StrikingnessRecord};
use crate::rules::RuleSet;
use crate::tkg::{Direction, Quadruple, TemporalIndex};
use crate::{Error, Result};

/// Reproducibility header carried by strikingness tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkTableHeader {
    /// Which measure produced the table: `rsmf`, `freq_inv`, or `temp_inv`.
    pub measure: String,
    pub window: Option<u64>,
    pub lambda: f64,
    pub alpha: [f64; 3],
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub min_confidence: Option<f64>,
    pub history_scope: String,
}

impl SkTableHeader {
    pub fn rsmf(cfg: &RsmfConfig, min_confidence: Option<f64>, history_scope: &str) -> Self {
        SkTableHeader {
            measure: "rsmf".to_owned(),
            window: cfg.window,
            lambda: cfg.lambda,
            alpha: [cfg.alpha.subject, cfg.alpha.object, cfg.alpha.relation],
            min_confidence,
            history_scope: history_scope.to_owned(),
        }
    }
}

/// A strikingness table: one record per query per direction, plus the
/// configuration that produced it.
#[derive(Debug, Clone)]
pub struct StrikingnessTable {
    pub header: SkTableHeader,
    pub records: Vec<StrikingnessRecord>,
}

impl StrikingnessTable {
    /// Strikingness value for a (query, direction) pair.
    pub fn get(&self, query_index: usize, direction: Direction) -> Option<f64> {
        // Records are ordered (query, tail, head); fall back to a scan if
        // the direct position does not match.
        let guess = query_index * 2 + usize::from(direction == Direction::Head);
        if let Some(r) = self.records.get(guess) {
            if r.query_index == query_index && r.direction == direction {
                return Some(r.sk);
            }
        }
        self.records
            .iter()
            .find(|r| r.query_index == query_index && r.direction == direction)
            .map(|r| r.sk)
    }
}

/// Score every query in both directions. Head-direction records score the
/// inverse event. Output order is fixed by query index regardless of
/// `jobs` (0 = use all available cores).
pub fn batch_strikingness(
    queries: &[Quadruple],
    rules: &RuleSet,
    history: &TemporalIndex,
    cfg: &RsmfConfig,
    jobs: usize,
) -> Vec<StrikingnessRecord> {
    let num_raw = history.num_relations_raw();
    let score_one = |(i, q): (usize, &Quadruple)| {
        let mut out = Vec::with_capacity(2);
        for direction in Direction::BOTH {
            let event = match direction {
                Direction::Tail => *q,
                Direction::Head => q.inverse(num_raw),
            };
            let mut record = event_strikingness(&event, rules, history, cfg);
            record.query_index = i;
            record.direction = direction;
            out.push(record);
        }
        out
    };

    if jobs == 1 {
        queries.iter().enumerate().flat_map(score_one).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs) // 0 = default
            .build()
            .expect("thread pool construction");
        pool.install(|| {
            queries
                .par_iter()
                .enumerate()
                .flat_map_iter(score_one)
                .collect()
        })
    }
}

/// Write a strikingness table: a `#`-prefixed JSON header line, then one
/// TSV row per record.
pub fn write_table(path: &Path, table: &StrikingnessTable) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "#{}", serde_json::to_string(&table.header)?)?;
    for r in &table.records {
        writeln!(
            w,
            "{}\t{}\t{:.10}\t{:.10}\t{:.10}\t{:.10}",
            r.query_index, r.direction, r.sk_subject, r.sk_object, r.sk_relation, r.sk
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Read a strikingness table written by [`write_table`].
pub fn read_table(path: &Path) -> Result<StrikingnessTable> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut header: Option<SkTableHeader> = None;
    let mut records = Vec::new();
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
        if cols.len() != 6 {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected 6 columns, found {}", cols.len()),
            ));
        }
        let query_index = cols[0]
            .parse::<usize>()
            .map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        let direction: Direction = cols[1]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad direction {:?}", cols[1])))?;
        let mut vals = [0.0f64; 4];
        for (slot, col) in vals.iter_mut().zip(&cols[2..6]) {
            *slot = col
                .parse::<f64>()
                .map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        }
        records.push(StrikingnessRecord {
            query_index,
            direction,
            sk_subject: vals[0],
            sk_object: vals[1],
            sk_relation: vals[2],
            sk: vals[3],
            candidate_counts: [0; 3],
            target_raw_scores: [0.0; 3],
        });
    }
    let header = header
        .ok_or_else(|| Error::Validation(format!("{}: missing table header", path.display())))?;
    Ok(StrikingnessTable { header, records })
}
