//! Shared fixtures: a seeded synthetic TKG generator and helpers.
//!
//! Each integration test binary compiles this module separately and uses
//! its own subset, so unused-item lints are suppressed here.
#![allow(dead_code)]

pub mod oracle;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use strikebench::tkg::{augment_inverse, dataset_from_splits, Dataset, Quadruple};

pub struct SynthConfig {
    pub entities: u64,
    pub relations: u64,
    pub timestamps: u64,
    pub facts: usize,
    /// Probability of re-emitting an earlier fact at a later time.
    pub repeat_bias: f64,
    /// Probability of emitting a correlated follow-up with a different
    /// relation between an existing entity pair.
    pub follow_bias: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            entities: 30,
            relations: 4,
            timestamps: 30,
            facts: 600,
            repeat_bias: 0.35,
            follow_bias: 0.2,
            seed: 0,
        }
    }
}

/// Generate a chronologically split synthetic dataset (raw, not yet
/// augmented). Repetition and correlated follow-ups give the rule miner
/// signal to work with.
pub fn generate(cfg: &SynthConfig) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut facts: Vec<Quadruple> = Vec::with_capacity(cfg.facts);
    while facts.len() < cfg.facts {
        let roll: f64 = rng.random();
        if roll < cfg.repeat_bias && !facts.is_empty() {
            let base = facts[rng.random_range(0..facts.len())];
            let t = rng.random_range(0..cfg.timestamps);
            facts.push(Quadruple::new(base.subject, base.relation, base.object, t));
        } else if roll < cfg.repeat_bias + cfg.follow_bias && !facts.is_empty() {
            let base = facts[rng.random_range(0..facts.len())];
            let relation = rng.random_range(0..cfg.relations);
            let t = rng.random_range(0..cfg.timestamps);
            facts.push(Quadruple::new(base.subject, relation, base.object, t));
        } else {
            facts.push(Quadruple::new(
                rng.random_range(0..cfg.entities),
                rng.random_range(0..cfg.relations),
                rng.random_range(0..cfg.entities),
                rng.random_range(0..cfg.timestamps),
            ));
        }
    }
    facts.sort_by_key(|q| q.timestamp);
    let n = facts.len();
    let train_end = n * 8 / 10;
    let valid_end = n * 9 / 10;
    let train = facts[..train_end].to_vec();
    let valid = facts[train_end..valid_end].to_vec();
    let test = facts[valid_end..].to_vec();
    dataset_from_splits(train, valid, test).expect("synthetic dataset is valid")
}

pub fn generate_augmented(cfg: &SynthConfig) -> Dataset {
    augment_inverse(generate(cfg)).expect("augmentation")
}
