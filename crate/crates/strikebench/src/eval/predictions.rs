use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::tkg::{Direction, EntityId};
use crate::{Error, Result};

/// Scores for one (query, direction).
#[derive(Debug, Clone, PartialEq)]
pub enum ScoreRow {
    /// One score per entity id.
    Dense(Vec<f64>),
    /// Complete sparse scoring: entities absent from the list deliberately
    /// score worse than every listed one.
    Sparse(Vec<(EntityId, f64)>),
    /// Truncated top-K output: ranks beyond the list are unknown, so MRR
    /// is marked unavailable downstream. Rank semantics are the same as
    /// [`ScoreRow::Sparse`] (unlisted entities tie at the bottom).
    TopK(Vec<(EntityId, f64)>),
}

impl ScoreRow {
    pub fn listed(&self) -> Option<&[(EntityId, f64)]> {
        match self {
            ScoreRow::Dense(_) => None,
            ScoreRow::Sparse(list) | ScoreRow::TopK(list) => Some(list),
        }
    }

    /// Materialize a dense vector, mapping unlisted entities to one less
    /// than the minimum listed score (the worst-score convention).
    pub fn to_dense(&self, entity_count: u64) -> Result<Vec<f64>> {
        match self {
            ScoreRow::Dense(v) => {
                if v.len() as u64 != entity_count {
                    return Err(Error::Validation(format!(
                        "dense row has {} entries, expected {entity_count}",
                        v.len()
                    )));
                }
                Ok(v.clone())
            }
            ScoreRow::Sparse(list) | ScoreRow::TopK(list) => {
                let default = list.iter().map(|&(_, s)| s).fold(f64::INFINITY, f64::min);
                let default = if default.is_finite() {
                    default - 1.0
                } else {
                    0.0
                };
                let mut dense = vec![default; entity_count as usize];
                for &(e, s) in list {
                    let idx = usize::try_from(e)
                        .map_err(|_| Error::Validation(format!("entity id {e} out of range")))?;
                    if idx >= dense.len() {
                        return Err(Error::Validation(format!(
                            "entity id {e} ≥ entity count {entity_count}"
                        )));
                    }
                    dense[idx] = s;
                }
                Ok(dense)
            }
        }
    }
}

/// One model's scores over a query split, keyed by (query index,
/// direction).
#[derive(Debug, Clone, Default)]
pub struct PredictionSet {
    pub model_name: String,
    pub entity_count: Option<u64>,
    rows: BTreeMap<(usize, Direction), ScoreRow>,
}

impl PredictionSet {
    pub fn new(model_name: impl Into<String>, entity_count: Option<u64>) -> Self {
        PredictionSet {
            model_name: model_name.into(),
            entity_count,
            rows: BTreeMap::new(),
        }
    }

    /// Insert a row; duplicate (query, direction) keys are an error.
    pub fn insert(
        &mut self,
        query_index: usize,
        direction: Direction,
        row: ScoreRow,
    ) -> Result<()> {
        if let ScoreRow::Sparse(list) | ScoreRow::TopK(list) = &row {
            let mut ids: Vec<_> = list.iter().map(|&(e, _)| e).collect();
            ids.sort_unstable();
            let before = ids.len();
            ids.dedup();
            if ids.len() != before {
                return Err(Error::Validation(format!(
                    "duplicate entity ids in sparse row for query {query_index} {direction}"
                )));
            }
        }
        if self.rows.insert((query_index, direction), row).is_some() {
            return Err(Error::Validation(format!(
                "duplicate prediction row for query {query_index} {direction}"
            )));
        }
        Ok(())
    }

    pub fn row(&self, query_index: usize, direction: Direction) -> Option<&ScoreRow> {
        self.rows.get(&(query_index, direction))
    }

    pub fn keys(&self) -> impl Iterator<Item = &(usize, Direction)> {
        self.rows.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, Direction), &ScoreRow)> {
        self.rows.iter()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[derive(Debug, Default, Deserialize)]
struct JsonLine {
    // Header fields.
    model: Option<String>,
    entity_count: Option<u64>,
    // Row fields.
    query_index: Option<usize>,
    direction: Option<Direction>,
    scores: Option<BTreeMap<String, f64>>,
    topk: Option<Vec<(EntityId, f64)>>,
}

#[derive(Debug, Serialize)]
struct JsonHeader<'a> {
    model: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    entity_count: Option<u64>,
}

/// Read predictions, dispatching on format: a `<path>.shape.json` sidecar
/// selects the dense binary layout, otherwise JSON Lines.
pub fn read_predictions(path: &Path) -> Result<PredictionSet> {
    if sidecar_path(path).exists() {
        read_dense_binary(path)
    } else {
        read_jsonl(path)
    }
}

fn read_jsonl(path: &Path) -> Result<PredictionSet> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut set = PredictionSet::new(
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "model".to_owned()),
        None,
    );
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: JsonLine =
            serde_json::from_str(&line).map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        match (parsed.query_index, parsed.direction) {
            (None, None) => {
                // Header line.
                if let Some(model) = parsed.model {
                    set.model_name = model;
                }
                if parsed.entity_count.is_some() {
                    set.entity_count = parsed.entity_count;
                }
            }
            (Some(qi), Some(direction)) => {
                let row = match (parsed.scores, parsed.topk) {
                    (Some(scores), None) => {
                        let mut list = Vec::with_capacity(scores.len());
                        for (key, score) in scores {
                            let id = key.parse::<u64>().map_err(|_| {
                                Error::parse(path, lineno, format!("bad entity id {key:?}"))
                            })?;
                            list.push((id, score));
                        }
                        list.sort_unstable_by_key(|&(e, _)| e);
                        ScoreRow::Sparse(list)
                    }
                    (None, Some(topk)) => ScoreRow::TopK(topk),
                    _ => {
                        return Err(Error::parse(
                            path,
                            lineno,
                            "row must carry exactly one of \"scores\" or \"topk\"",
                        ))
                    }
                };
                set.insert(qi, direction, row)
                    .map_err(|e| Error::parse(path, lineno, e.to_string()))?;
            }
            _ => {
                return Err(Error::parse(
                    path,
                    lineno,
                    "row needs both \"query_index\" and \"direction\"",
                ))
            }
        }
    }
    Ok(set)
}

/// Write predictions as JSON Lines: a header line with model metadata,
/// then one row per (query, direction) in key order. Dense rows are
/// written as full score maps.
pub fn write_predictions(path: &Path, set: &PredictionSet) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer(
        &mut w,
        &JsonHeader {
            model: &set.model_name,
            entity_count: set.entity_count,
        },
    )?;
    writeln!(w)?;
    for (&(qi, direction), row) in set.iter() {
        let mut obj = serde_json::Map::new();
        obj.insert("query_index".into(), qi.into());
        obj.insert("direction".into(), direction.as_str().into());
        match row {
            ScoreRow::Dense(values) => {
                let mut scores = serde_json::Map::new();
                for (e, &s) in values.iter().enumerate() {
                    scores.insert(e.to_string(), s.into());
                }
                obj.insert("scores".into(), scores.into());
            }
            ScoreRow::Sparse(list) => {
                let mut scores = serde_json::Map::new();
                for &(e, s) in list {
                    scores.insert(e.to_string(), s.into());
                }
                obj.insert("scores".into(), scores.into());
            }
            ScoreRow::TopK(list) => {
                let topk: Vec<serde_json::Value> = list
                    .iter()
                    .map(|&(e, s)| serde_json::json!([e, s]))
                    .collect();
                obj.insert("topk".into(), topk.into());
            }
        }
        serde_json::to_writer(&mut w, &serde_json::Value::Object(obj))?;
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".shape.json");
    PathBuf::from(os)
}

#[derive(Debug, Serialize, Deserialize)]
struct ShapeHeader {
    model: String,
    rows: usize,
    entity_count: u64,
    /// Fixed row order: query 0 tail, query 0 head, query 1 tail, ...
    layout: String,
}

const DENSE_LAYOUT: &str = "query-major; tail row then head row per query";

/// Write dense predictions as a little-endian float32 matrix plus a
/// `.shape.json` sidecar. Requires exactly two dense rows (tail, head)
/// per query index 0..n.
pub fn write_dense_binary(path: &Path, set: &PredictionSet) -> Result<()> {
    let entity_count = set.entity_count.ok_or_else(|| {
        Error::Config("dense binary output needs a known entity count".to_owned())
    })?;
    let n_rows = set.len();
    if !n_rows.is_multiple_of(2) {
        return Err(Error::Validation(
            "dense binary output needs both directions per query".to_owned(),
        ));
    }
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    for qi in 0..n_rows / 2 {
        for direction in Direction::BOTH {
            let row = set.row(qi, direction).ok_or_else(|| {
                Error::Validation(format!("missing row for query {qi} {direction}"))
            })?;
            let dense = row.to_dense(entity_count)?;
            for v in dense {
                w.write_all(&(v as f32).to_le_bytes())?;
            }
        }
    }
    w.flush()?;
    let header = ShapeHeader {
        model: set.model_name.clone(),
        rows: n_rows,
        entity_count,
        layout: DENSE_LAYOUT.to_owned(),
    };
    std::fs::write(sidecar_path(path), serde_json::to_string_pretty(&header)?)?;
    Ok(())
}

/// Read a dense binary prediction matrix written by
/// [`write_dense_binary`].
pub fn read_dense_binary(path: &Path) -> Result<PredictionSet> {
    let header: ShapeHeader = serde_json::from_str(&std::fs::read_to_string(sidecar_path(path))?)?;
    if header.layout != DENSE_LAYOUT {
        return Err(Error::Validation(format!(
            "unsupported dense layout {:?}",
            header.layout
        )));
    }
    let mut reader = BufReader::new(std::fs::File::open(path)?);
    let mut set = PredictionSet::new(header.model, Some(header.entity_count));
    let cols = header.entity_count as usize;
    let mut buf = vec![0u8; cols * 4];
    for row_idx in 0..header.rows {
        reader.read_exact(&mut buf).map_err(|_| {
            Error::Validation(format!(
                "{}: truncated at row {row_idx} (expected {} rows of {cols} float32)",
                path.display(),
                header.rows
            ))
        })?;
        let values: Vec<f64> = buf
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
            .collect();
        let direction = if row_idx % 2 == 0 {
            Direction::Tail
        } else {
            Direction::Head
        };
        set.insert(row_idx / 2, direction, ScoreRow::Dense(values))?;
    }
    Ok(set)
}
