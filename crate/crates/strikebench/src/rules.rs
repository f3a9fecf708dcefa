//! Length-1 temporal rule mining.
//!
//! A rule `(E1, r_h, E2, T2) ← (E1, r_b, E2, T1)` with `T1 < T2` states
//! that a body event between two entities makes a later head event between
//! the same entities more plausible. Confidence is the fraction of body
//! occurrences in the training split that are followed by at least one
//! head occurrence between the same entity pair.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::tkg::{RelationId, TemporalIndex};
use crate::{Error, Result};

/// One mined rule: head relation, body relation, and support statistics.
///
/// `confidence = rule_support / body_support`, where `body_support` counts
/// body occurrences (one per fact) and `rule_support` counts body
/// occurrences with at least one strictly later head occurrence between
/// the same entity pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalRule {
    pub head: RelationId,
    pub body: RelationId,
    pub conf: f64,
    pub body_support: u64,
    pub rule_support: u64,
}

/// Mining parameters.
#[derive(Debug, Clone)]
pub struct MiningConfig {
    /// Minimum confidence a rule must reach to be kept.
    pub tau: f64,
    /// Minimum number of body occurrences.
    pub min_body_support: u64,
    /// Optional cap on body occurrences counted per body relation,
    /// enforced by seeded uniform sampling. Bounds work on very large
    /// training splits.
    pub sample_cap: Option<usize>,
    pub seed: u64,
}

impl Default for MiningConfig {
    fn default() -> Self {
        MiningConfig {
            tau: 0.01,
            min_body_support: 2,
            sample_cap: None,
            seed: 0,
        }
    }
}

/// The mined rules, grouped by head relation (descending confidence) and
/// by body relation for reverse lookups.
#[derive(Debug, Clone, Default)]
pub struct RuleSet {
    by_head: HashMap<RelationId, Vec<TemporalRule>>,
    by_body: HashMap<RelationId, Vec<RelationId>>,
    pub min_confidence: f64,
    pub min_body_support: u64,
}

impl RuleSet {
    pub fn from_rules(
        rules: Vec<TemporalRule>,
        min_confidence: f64,
        min_body_support: u64,
    ) -> Self {
        let mut by_head: HashMap<RelationId, Vec<TemporalRule>> = HashMap::new();
        let mut by_body: HashMap<RelationId, Vec<RelationId>> = HashMap::new();
        for rule in rules {
            by_body.entry(rule.body).or_default().push(rule.head);
            by_head.entry(rule.head).or_default().push(rule);
        }
        for list in by_head.values_mut() {
            list.sort_by(|a, b| {
                b.conf
                    .partial_cmp(&a.conf)
                    .unwrap()
                    .then(a.body.cmp(&b.body))
            });
        }
        for heads in by_body.values_mut() {
            heads.sort_unstable();
            heads.dedup();
        }
        RuleSet {
            by_head,
            by_body,
            min_confidence,
            min_body_support,
        }
    }

    /// Rules with the given head relation, sorted by descending confidence.
    pub fn for_head(&self, head: RelationId) -> &[TemporalRule] {
        self.by_head.get(&head).map_or(&[], Vec::as_slice)
    }

    /// Head relations of all rules with the given body relation.
    pub fn heads_for_body(&self, body: RelationId) -> &[RelationId] {
        self.by_body.get(&body).map_or(&[], Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.by_head.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_head.is_empty()
    }

    /// All rules in canonical order: head ascending, then descending
    /// confidence, then body ascending.
    pub fn iter_sorted(&self) -> impl Iterator<Item = &TemporalRule> {
        let mut heads: Vec<_> = self.by_head.keys().copied().collect();
        heads.sort_unstable();
        heads.into_iter().flat_map(move |h| self.by_head[&h].iter())
    }
}

/// Mine all length-1 rules from an index built over the training split
/// only.
///
/// For every relation pair `(r_h, r_b)`: `body_support` is the number of
/// body occurrences `(s, r_b, o, t1)`, and `rule_support` counts those
/// with some `(s, r_h, o, t2)`, `t2 > t1`. Pairs never observed with a
/// later head are not materialized (their confidence is zero and they
/// contribute nothing downstream). Rules below `tau` or
/// `min_body_support` are discarded.
pub fn mine_rules(train_index: &TemporalIndex, cfg: &MiningConfig) -> Result<RuleSet> {
    if !(0.0..=1.0).contains(&cfg.tau) {
        return Err(Error::Config(format!(
            "tau must lie in [0, 1], got {}",
            cfg.tau
        )));
    }
    if let Some(cap) = cfg.sample_cap {
        if (cap as u64) < cfg.min_body_support {
            return Err(Error::Config(format!(
                "sample_cap {cap} is below min_body_support {}",
                cfg.min_body_support
            )));
        }
    }

    // Pass 1: count body occurrences per relation, walking subjects in
    // sorted order and events in list order. This walk order defines the
    // per-relation occurrence ordinals used for sampling.
    let subjects = train_index.subjects();
    let mut body_counts: HashMap<RelationId, u64> = HashMap::new();
    for &s in &subjects {
        for &(_, r, _) in train_index.subject_events(s) {
            *body_counts.entry(r).or_default() += 1;
        }
    }

    // Which body occurrences are counted. Without a cap, all of them.
    let included: Option<HashMap<RelationId, Vec<bool>>> = cfg.sample_cap.map(|cap| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut relations: Vec<_> = body_counts.keys().copied().collect();
        relations.sort_unstable();
        relations
            .into_iter()
            .map(|r| {
                let n = body_counts[&r] as usize;
                let mut mask = vec![true; n];
                if n > cap {
                    mask.iter_mut().for_each(|m| *m = false);
                    for idx in rand::seq::index::sample(&mut rng, n, cap) {
                        mask[idx] = true;
                    }
                }
                (r, mask)
            })
            .collect()
    });

    // Pass 2: group facts by (subject, object) pair with inclusion flags
    // resolved, replaying the same walk order as pass 1.
    let mut groups: Vec<Vec<(u64, RelationId, bool)>> = Vec::new();
    {
        let mut ordinals: HashMap<RelationId, usize> = HashMap::new();
        for &s in &subjects {
            let mut by_object: BTreeMap<u64, Vec<(u64, RelationId, bool)>> = BTreeMap::new();
            for &(t, r, o) in train_index.subject_events(s) {
                let ordinal = ordinals.entry(r).or_default();
                let counted = included.as_ref().is_none_or(|map| map[&r][*ordinal]);
                *ordinal += 1;
                by_object.entry(o).or_default().push((t, r, counted));
            }
            groups.extend(by_object.into_values());
        }
    }

    let sampled_body_counts: HashMap<RelationId, u64> = match &included {
        Some(map) => map
            .iter()
            .map(|(&r, mask)| (r, mask.iter().filter(|&&m| m).count() as u64))
            .collect(),
        None => body_counts.clone(),
    };

    // Count, per (head, body) pair, body occurrences followed by a
    // strictly later head occurrence between the same entity pair.
    let support: HashMap<(RelationId, RelationId), u64> = groups
        .par_iter()
        .fold(
            HashMap::new,
            |mut acc: HashMap<(RelationId, RelationId), u64>, group| {
                count_group_support(group, &mut acc);
                acc
            },
        )
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });

    let mut rules = Vec::with_capacity(support.len());
    for (&(head, body), &rule_support) in &support {
        let body_support = sampled_body_counts[&body];
        if body_support < cfg.min_body_support {
            continue;
        }
        let conf = rule_support as f64 / body_support as f64;
        if conf < cfg.tau {
            continue;
        }
        rules.push(TemporalRule {
            head,
            body,
            conf,
            body_support,
            rule_support,
        });
    }

    Ok(RuleSet::from_rules(rules, cfg.tau, cfg.min_body_support))
}

/// Walk one (subject, object) group, time-descending, accumulating
/// `(head, body)` support. Events are sorted by time ascending; a body
/// occurrence at `t1` supports every head relation seen strictly after
/// `t1` in the group.
fn count_group_support(
    group: &[(u64, RelationId, bool)],
    acc: &mut HashMap<(RelationId, RelationId), u64>,
) {
    let mut later_relations: HashSet<RelationId> = HashSet::new();
    let mut i = group.len();
    while i > 0 {
        // Block of events sharing the trailing timestamp.
        let t = group[i - 1].0;
        let mut j = i;
        while j > 0 && group[j - 1].0 == t {
            j -= 1;
        }
        for &(_, body, counted) in &group[j..i] {
            if !counted {
                continue;
            }
            for &head in &later_relations {
                *acc.entry((head, body)).or_default() += 1;
            }
        }
        for &(_, r, _) in &group[j..i] {
            later_relations.insert(r);
        }
        i = j;
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RulesHeader {
    min_confidence: f64,
    min_body_support: u64,
}

/// Write a rule set as JSON Lines: a header with the mining thresholds,
/// then one rule per line in canonical order.
pub fn write_rules(path: &Path, rules: &RuleSet) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer(
        &mut w,
        &RulesHeader {
            min_confidence: rules.min_confidence,
            min_body_support: rules.min_body_support,
        },
    )?;
    writeln!(w)?;
    for rule in rules.iter_sorted() {
        serde_json::to_writer(&mut w, rule)?;
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a rule set written by [`write_rules`]. A missing header line is
/// tolerated (thresholds default to zero).
pub fn read_rules(path: &Path) -> Result<RuleSet> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut rules = Vec::new();
    let mut header: Option<RulesHeader> = None;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if i == 0 && !line.contains("\"head\"") {
            header = Some(
                serde_json::from_str(&line)
                    .map_err(|e| Error::parse(path, i + 1, e.to_string()))?,
            );
            continue;
        }
        let rule: TemporalRule =
            serde_json::from_str(&line).map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
        rules.push(rule);
    }
    let (tau, min_bs) = header
        .map(|h| (h.min_confidence, h.min_body_support))
        .unwrap_or((0.0, 0));
    Ok(RuleSet::from_rules(rules, tau, min_bs))
}
