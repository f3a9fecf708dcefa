//! Dataset model and temporal indexes.
//!
//! Facts are [`Quadruple`]s over dense integer id spaces. A [`Dataset`]
//! groups the chronological train/valid/test splits with optional label
//! vocabularies; [`TemporalIndex`] materializes the sorted lookup maps
//! every downstream stage queries. Both are immutable once built and safe
//! to share across threads.

mod dataset;
mod index;

pub use dataset::{
    augment_inverse, dataset_from_splits, inverse_relation, load_dataset, save_dataset, Dataset,
    FormatSpec, Split, Vocabulary,
};
pub use index::{TemporalIndex, TimeWindow};

use serde::{Deserialize, Serialize};

pub type EntityId = u64;
pub type RelationId = u64;
/// Timestamp in dataset granularity units, contiguous from 0.
pub type TimeIndex = u64;

/// One timestamped fact in integer-id space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Quadruple {
    pub subject: EntityId,
    pub relation: RelationId,
    pub object: EntityId,
    pub timestamp: TimeIndex,
}

impl Quadruple {
    pub fn new(
        subject: EntityId,
        relation: RelationId,
        object: EntityId,
        timestamp: TimeIndex,
    ) -> Self {
        Quadruple {
            subject,
            relation,
            object,
            timestamp,
        }
    }

    /// Companion fact with subject and object swapped and the relation
    /// mapped into the other half of the doubled relation space. Applying
    /// it twice returns the original fact.
    pub fn inverse(&self, num_relations_raw: u64) -> Quadruple {
        let relation = if self.relation < num_relations_raw {
            self.relation + num_relations_raw
        } else {
            self.relation - num_relations_raw
        };
        Quadruple {
            subject: self.object,
            relation,
            object: self.subject,
            timestamp: self.timestamp,
        }
    }
}

/// Which side of a query is predicted: `Tail` ranks objects of
/// `(s, r, ?, t)`, `Head` ranks subjects of `(?, r, o, t)`. Head queries
/// are evaluated through the inverse event `(o, r⁻¹, ?, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Tail,
    Head,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Tail, Direction::Head];

    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::Tail => "tail",
            Direction::Head => "head",
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Direction {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tail" => Ok(Direction::Tail),
            "head" => Ok(Direction::Head),
            other => Err(crate::Error::Config(format!(
                "unknown direction {other:?} (expected \"tail\" or \"head\")"
            ))),
        }
    }
}
