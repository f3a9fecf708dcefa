use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{Quadruple, RelationId, TimeIndex};
use crate::{Error, Result};

/// Bidirectional label ↔ id map. May be empty, in which case labels
/// default to the decimal id.
#[derive(Debug, Clone, Default)]
pub struct Vocabulary {
    by_label: HashMap<String, u64>,
    by_id: BTreeMap<u64, String>,
}

impl Vocabulary {
    pub fn insert(&mut self, label: String, id: u64) {
        self.by_label.insert(label.clone(), id);
        self.by_id.insert(id, label);
    }

    pub fn id(&self, label: &str) -> Option<u64> {
        self.by_label.get(label).copied()
    }

    /// Label for `id`, falling back to the decimal id when unmapped.
    pub fn label(&self, id: u64) -> String {
        self.by_id
            .get(&id)
            .cloned()
            .unwrap_or_else(|| id.to_string())
    }

    pub fn len(&self) -> usize {
        self.by_id.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_id.is_empty()
    }

    pub fn max_id(&self) -> Option<u64> {
        self.by_id.keys().next_back().copied()
    }

    /// Entries in ascending id order.
    pub fn entries(&self) -> impl Iterator<Item = (u64, &str)> {
        self.by_id.iter().map(|(id, label)| (*id, label.as_str()))
    }
}

/// How raw quadruple files map onto the internal representation.
#[derive(Debug, Clone)]
pub struct FormatSpec {
    /// Raw timestamps are divided by this to obtain contiguous integer
    /// time steps (e.g. 24 for hourly stamps at daily granularity).
    pub time_divisor: u64,
    /// Descriptive granularity string carried through to outputs.
    pub granularity: String,
}

impl Default for FormatSpec {
    fn default() -> Self {
        FormatSpec {
            time_divisor: 1,
            granularity: "unspecified".to_owned(),
        }
    }
}

/// The three chronological splits of a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Split {
    Train,
    Valid,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Valid, Split::Test];

    pub fn as_str(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Valid => "valid",
            Split::Test => "test",
        }
    }
}

impl std::fmt::Display for Split {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "valid" => Ok(Split::Valid),
            "test" => Ok(Split::Test),
            other => Err(Error::Config(format!("unknown split name {other:?}"))),
        }
    }
}

/// A loaded dataset: vocabularies plus ordered, deduplicated splits.
///
/// Splits are chronological: every train timestamp ≤ every valid
/// timestamp ≤ every test timestamp. After [`augment_inverse`] each split
/// holds the original facts followed by their inverse companions.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub entity_vocab: Vocabulary,
    pub relation_vocab: Vocabulary,
    pub train: Vec<Quadruple>,
    pub valid: Vec<Quadruple>,
    pub test: Vec<Quadruple>,
    pub entity_count: u64,
    /// Current relation-id space size; doubles on augmentation.
    pub relation_count: u64,
    /// Relation count before augmentation.
    pub num_relations_raw: u64,
    pub augmented: bool,
    pub granularity: String,
}

impl Dataset {
    pub fn split(&self, split: Split) -> &[Quadruple] {
        match split {
            Split::Train => &self.train,
            Split::Valid => &self.valid,
            Split::Test => &self.test,
        }
    }

    /// The original (pre-augmentation) facts of a split. Augmented splits
    /// store originals first, so this is the first half.
    pub fn raw_split(&self, split: Split) -> &[Quadruple] {
        let facts = self.split(split);
        if self.augmented {
            &facts[..facts.len() / 2]
        } else {
            facts
        }
    }

    fn time_range(facts: &[Quadruple]) -> (TimeIndex, TimeIndex) {
        let min = facts.iter().map(|q| q.timestamp).min().unwrap_or(0);
        let max = facts.iter().map(|q| q.timestamp).max().unwrap_or(0);
        (min, max)
    }
}

/// Parse one quadruple line: four tab-separated integer columns, optional
/// trailing columns ignored. Timestamps are returned raw.
fn parse_quadruple(path: &Path, lineno: usize, line: &str) -> Result<Quadruple> {
    let mut cols = line.split('\t');
    let mut next = |name: &str| -> Result<u64> {
        let col = cols
            .next()
            .ok_or_else(|| Error::parse(path, lineno, format!("missing {name} column")))?;
        col.trim()
            .parse::<u64>()
            .map_err(|_| Error::parse(path, lineno, format!("non-integer {name} {:?}", col.trim())))
    };
    let subject = next("subject")?;
    let relation = next("relation")?;
    let object = next("object")?;
    let timestamp = next("timestamp")?;
    Ok(Quadruple::new(subject, relation, object, timestamp))
}

fn read_quadruple_file(path: &Path, divisor: u64) -> Result<Vec<Quadruple>> {
    let content = fs::read_to_string(path)?;
    let mut facts = Vec::new();
    let mut off_grid = 0usize;
    for (i, line) in content.lines().enumerate() {
        let trimmed = line.trim_end_matches('\r');
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut q = parse_quadruple(path, i + 1, trimmed)?;
        if q.timestamp % divisor != 0 {
            off_grid += 1;
        }
        q.timestamp /= divisor;
        facts.push(q);
    }
    if off_grid > 0 {
        log::warn!(
            "{}: {off_grid} timestamps are not multiples of the time divisor {divisor} (floored)",
            path.display()
        );
    }
    Ok(facts)
}

fn read_vocab_file(path: &Path) -> Result<Vocabulary> {
    let content = fs::read_to_string(path)?;
    let mut vocab = Vocabulary::default();
    for (i, line) in content.lines().enumerate() {
        let trimmed = line.trim_end_matches('\r');
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (label, id) = trimmed
            .rsplit_once('\t')
            .ok_or_else(|| Error::parse(path, i + 1, "expected `label<TAB>id`".to_owned()))?;
        let id = id
            .trim()
            .parse::<u64>()
            .map_err(|_| Error::parse(path, i + 1, format!("non-integer id {:?}", id.trim())))?;
        vocab.insert(label.to_owned(), id);
    }
    Ok(vocab)
}

/// Drop exact duplicate facts, preserving first-occurrence order.
fn dedup_split(name: Split, facts: Vec<Quadruple>) -> Vec<Quadruple> {
    let mut seen = HashSet::with_capacity(facts.len());
    let before = facts.len();
    let facts: Vec<_> = facts.into_iter().filter(|q| seen.insert(*q)).collect();
    let dropped = before - facts.len();
    if dropped > 0 {
        log::warn!("dropped {dropped} duplicate quadruples from the {name} split");
    }
    facts
}

/// Load a dataset directory: `train.txt`, `valid.txt`, `test.txt` plus
/// optional `entity2id.txt` / `relation2id.txt` vocabularies.
///
/// Timestamps are divided by `spec.time_divisor`; duplicates within a
/// split are dropped with a logged count; split chronology and id bounds
/// are validated.
pub fn load_dataset(dir: &Path, spec: &FormatSpec) -> Result<Dataset> {
    if spec.time_divisor == 0 {
        return Err(Error::Config("time_divisor must be ≥ 1".to_owned()));
    }

    let mut splits = Vec::with_capacity(3);
    for split in Split::ALL {
        let path = dir.join(format!("{split}.txt"));
        let facts = read_quadruple_file(&path, spec.time_divisor)?;
        if facts.is_empty() {
            return Err(Error::Validation(format!("empty split: {split}")));
        }
        splits.push(dedup_split(split, facts));
    }
    let test = splits.pop().unwrap();
    let valid = splits.pop().unwrap();
    let train = splits.pop().unwrap();

    let entity_vocab = match fs::metadata(dir.join("entity2id.txt")) {
        Ok(_) => read_vocab_file(&dir.join("entity2id.txt"))?,
        Err(_) => Vocabulary::default(),
    };
    let relation_vocab = match fs::metadata(dir.join("relation2id.txt")) {
        Ok(_) => read_vocab_file(&dir.join("relation2id.txt"))?,
        Err(_) => Vocabulary::default(),
    };

    let max_entity = train
        .iter()
        .chain(&valid)
        .chain(&test)
        .flat_map(|q| [q.subject, q.object])
        .max()
        .unwrap();
    let max_relation = train
        .iter()
        .chain(&valid)
        .chain(&test)
        .map(|q| q.relation)
        .max()
        .unwrap();

    let entity_count = match entity_vocab.max_id() {
        Some(max_id) => {
            if max_entity > max_id {
                return Err(Error::Validation(format!(
                    "entity id {max_entity} exceeds vocabulary (max id {max_id})"
                )));
            }
            max_id + 1
        }
        None => max_entity + 1,
    };
    let relation_count = match relation_vocab.max_id() {
        Some(max_id) => {
            if max_relation > max_id {
                return Err(Error::Validation(format!(
                    "relation id {max_relation} exceeds vocabulary (max id {max_id})"
                )));
            }
            max_id + 1
        }
        None => max_relation + 1,
    };

    let (_, train_max) = Dataset::time_range(&train);
    let (valid_min, valid_max) = Dataset::time_range(&valid);
    let (test_min, _) = Dataset::time_range(&test);
    if train_max > valid_min {
        return Err(Error::Validation(format!(
            "split chronology violation: train reaches t={train_max} but valid starts at t={valid_min}"
        )));
    }
    if valid_max > test_min {
        return Err(Error::Validation(format!(
            "split chronology violation: valid reaches t={valid_max} but test starts at t={test_min}"
        )));
    }

    Ok(Dataset {
        entity_vocab,
        relation_vocab,
        train,
        valid,
        test,
        entity_count,
        relation_count,
        num_relations_raw: relation_count,
        augmented: false,
        granularity: spec.granularity.clone(),
    })
}

/// Write a dataset back out in the directory layout accepted by
/// [`load_dataset`]. Vocabulary files are written only when non-empty.
pub fn save_dataset(dataset: &Dataset, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    for split in Split::ALL {
        let mut w = BufWriter::new(fs::File::create(dir.join(format!("{split}.txt")))?);
        for q in dataset.split(split) {
            writeln!(
                w,
                "{}\t{}\t{}\t{}",
                q.subject, q.relation, q.object, q.timestamp
            )?;
        }
        w.flush()?;
    }
    for (vocab, name) in [
        (&dataset.entity_vocab, "entity2id.txt"),
        (&dataset.relation_vocab, "relation2id.txt"),
    ] {
        if !vocab.is_empty() {
            let mut w = BufWriter::new(fs::File::create(dir.join(name))?);
            for (id, label) in vocab.entries() {
                writeln!(w, "{label}\t{id}")?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// Add the inverse companion `(o, r + R, s, t)` of every fact, doubling
/// the relation space. Originals keep their positions; companions are
/// appended in the same order.
pub fn augment_inverse(mut dataset: Dataset) -> Result<Dataset> {
    if dataset.augmented {
        return Err(Error::Validation(
            "dataset is already augmented with inverse relations".to_owned(),
        ));
    }
    let raw = dataset.num_relations_raw;
    for split in [&mut dataset.train, &mut dataset.valid, &mut dataset.test] {
        let inverses: Vec<_> = split.iter().map(|q| q.inverse(raw)).collect();
        split.extend(inverses);
    }
    dataset.relation_count = raw * 2;
    dataset.augmented = true;
    Ok(dataset)
}

/// Relation id of the inverse companion under a doubled relation space.
pub fn inverse_relation(relation: RelationId, num_relations_raw: u64) -> RelationId {
    if relation < num_relations_raw {
        relation + num_relations_raw
    } else {
        relation - num_relations_raw
    }
}

/// Build a dataset directly from in-memory splits. Intended for tests and
/// synthetic data; applies the same dedup and validation as loading.
pub fn dataset_from_splits(
    train: Vec<Quadruple>,
    valid: Vec<Quadruple>,
    test: Vec<Quadruple>,
) -> Result<Dataset> {
    for (facts, split) in [
        (&train, Split::Train),
        (&valid, Split::Valid),
        (&test, Split::Test),
    ] {
        if facts.is_empty() {
            return Err(Error::Validation(format!("empty split: {split}")));
        }
    }
    let train = dedup_split(Split::Train, train);
    let valid = dedup_split(Split::Valid, valid);
    let test = dedup_split(Split::Test, test);

    let max_entity = train
        .iter()
        .chain(&valid)
        .chain(&test)
        .flat_map(|q| [q.subject, q.object])
        .max()
        .unwrap();
    let max_relation = train
        .iter()
        .chain(&valid)
        .chain(&test)
        .map(|q| q.relation)
        .max()
        .unwrap();

    let (_, train_max) = Dataset::time_range(&train);
    let (valid_min, valid_max) = Dataset::time_range(&valid);
    let (test_min, _) = Dataset::time_range(&test);
    if train_max > valid_min || valid_max > test_min {
        return Err(Error::Validation(
            "split chronology violation in synthetic dataset".to_owned(),
        ));
    }

    Ok(Dataset {
        entity_vocab: Vocabulary::default(),
        relation_vocab: Vocabulary::default(),
        train,
        valid,
        test,
        entity_count: max_entity + 1,
        relation_count: max_relation + 1,
        num_relations_raw: max_relation + 1,
        augmented: false,
        granularity: "synthetic".to_owned(),
    })
}
