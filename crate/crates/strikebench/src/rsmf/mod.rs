//! Rule-based strikingness measure.
//!
//! For a future event, peer events are generated by replacing its subject,
//! object, or relation with candidates grounded by mined temporal rules in
//! the windowed history ([`peer_candidates`]). Each candidate event gets an
//! expectation score: a confidence- and decay-weighted sum over its
//! grounding chains ([`expectation_score`]). The score vector is
//! L2-normalized and the target's prominence against higher-scored peers
//! gives the element strikingness ([`element_strikingness`]); a convex
//! combination over the three elements gives the event strikingness
//! `sk ∈ [0, 1]` ([`event_strikingness`]).

mod batch;
mod chain;
mod peers;
mod score;

pub use batch::{batch_strikingness, read_table, write_table, SkTableHeader, StrikingnessTable};
pub use chain::{build_grounding_chain, greedy_chain, GroundingChain};
pub use peers::peer_candidates;
pub use score::{
    element_strikingness, event_strikingness, expectation_score, strikingness_from_raw,
    ElementScore,
};

use serde::{Deserialize, Serialize};

use crate::tkg::Direction;
use crate::{Error, Result};

/// The event element being replaced when generating peers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Element {
    Subject,
    Object,
    Relation,
}

impl Element {
    pub const ALL: [Element; 3] = [Element::Subject, Element::Object, Element::Relation];
}

/// Convex weights over the three replaceable elements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElementWeights {
    pub subject: f64,
    pub object: f64,
    pub relation: f64,
}

impl ElementWeights {
    pub fn get(&self, element: Element) -> f64 {
        match element {
            Element::Subject => self.subject,
            Element::Object => self.object,
            Element::Relation => self.relation,
        }
    }
}

/// Strikingness parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RsmfConfig {
    /// History window in time steps; `None` means full history.
    pub window: Option<u64>,
    /// Temporal decay coefficient, > 0.
    pub lambda: f64,
    /// Element weights; must sum to 1.
    pub alpha: ElementWeights,
}

impl Default for RsmfConfig {
    fn default() -> Self {
        RsmfConfig {
            window: None,
            lambda: 0.1,
            alpha: ElementWeights {
                subject: 0.4,
                object: 0.4,
                relation: 0.2,
            },
        }
    }
}

impl RsmfConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lambda <= 0.0 || !self.lambda.is_finite() {
            return Err(Error::Config(format!(
                "lambda must be a positive real, got {}",
                self.lambda
            )));
        }
        if self.window == Some(0) {
            return Err(Error::Config("window must be ≥ 1 time step".to_owned()));
        }
        let a = &self.alpha;
        for (name, v) in [
            ("alpha_s", a.subject),
            ("alpha_o", a.object),
            ("alpha_r", a.relation),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        let sum = a.subject + a.object + a.relation;
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "element weights must sum to 1 (got {sum})"
            )));
        }
        Ok(())
    }
}

/// Per-query strikingness values with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct StrikingnessRecord {
    /// Index of the query event within the evaluated split.
    pub query_index: usize,
    pub direction: Direction,
    pub sk_subject: f64,
    pub sk_object: f64,
    pub sk_relation: f64,
    /// Combined strikingness, in [0, 1].
    pub sk: f64,
    /// Peer-candidate counts per element (subject, object, relation).
    pub candidate_counts: [usize; 3],
    /// Raw (pre-normalization) expectation score of the target per element.
    pub target_raw_scores: [f64; 3],
}
