//! Strikingness scoring and strikingness-weighted evaluation for temporal
//! knowledge graph (TKG) forecasting.
//!
//! A TKG is a set of timestamped facts `(subject, relation, object, t)`.
//! Forecasting models are usually scored with MRR/Hits@k over all test
//! events, which lets trivial repetitions dominate. This crate scores how
//! *outstanding* each test event is relative to its rule-derived peer
//! events and folds that score into the ranking metrics, so that models
//! are credited more for predicting rare events than routine ones.
//!
//! Pipeline stages, each usable on its own:
//!
//! 1. [`tkg`] — dataset ingestion, inverse-relation augmentation, and
//!    immutable temporal indexes.
//! 2. [`rules`] — length-1 temporal rule mining with confidences from the
//!    training split.
//! 3. [`rsmf`] — the rule-based strikingness measure: peer retrieval,
//!    grounding chains, expectation scores, and the combined `sk ∈ [0,1]`
//!    per event.
//! 4. [`eval`] — filtered rank computation, original and
//!    strikingness-weighted metrics, per-bin grouping, neighborhood
//!    overlap, multi-model intersection, and significance tests.
//! 5. [`baselines`], [`recurrency`], [`ensemble`] — comparison strikingness
//!    measures, a heuristic recency/frequency predictor, and linear score
//!    fusion.
//!
//! ```no_run
//! use strikebench::tkg::{augment_inverse, load_dataset, FormatSpec, Split, TemporalIndex};
//! use strikebench::rules::{mine_rules, MiningConfig};
//! use strikebench::rsmf::{batch_strikingness, RsmfConfig};
//!
//! let dataset = load_dataset("data/ICEWS14".as_ref(), &FormatSpec::default()).unwrap();
//! let dataset = augment_inverse(dataset).unwrap();
//! let train = TemporalIndex::build(&dataset, &[Split::Train]).unwrap();
//! let rules = mine_rules(&train, &MiningConfig::default()).unwrap();
//! let history = TemporalIndex::build(&dataset, &[Split::Train, Split::Valid, Split::Test]).unwrap();
//! let records = batch_strikingness(
//!     dataset.raw_split(Split::Test),
//!     &rules,
//!     &history,
//!     &RsmfConfig::default(),
//!     0,
//! );
//! ```

pub mod baselines;
pub mod ensemble;
mod error;
pub mod eval;
pub mod recurrency;
pub mod rsmf;
pub mod rules;
pub mod tkg;

pub use error::{Error, Result};
