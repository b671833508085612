//! Streaming sufficient statistics for a fuzzing campaign.
//!
//! The sampling unit is one *test input*; a species' abundance is the number
//! of inputs that exhibited it, never how often it fired within an input.
//! Everything the estimators need is captured by the triple
//!
//! - `n`: inputs processed,
//! - `species_counts`: species id -> incidence count,
//! - `f`: frequency-of-frequencies histogram, `f[k]` = number of species
//!   observed in exactly `k` inputs (so `f[1]` counts singletons).
//!
//! Snapshots are plain values: build one per ingestion shard and [`merge`]
//! them, or fold a record stream through [`observe`]. Both routes produce
//! identical snapshots for identical multisets of records.
//!
//! Counts are `u64` and overflow is a hard error (panic), never a silent
//! wrap.
//!
//! [`merge`]: CampaignSnapshot::merge
//! [`observe`]: CampaignSnapshot::observe

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

/// One test input and the set of species it exhibited.
///
/// Species ids are opaque non-empty tokens; by convention they carry a
/// namespace prefix such as `edge:`, `mutant:`, or `crash:` so that mixed
/// campaigns coexist in one snapshot. `species` is a set: an input either
/// exhibits a species or it does not. An empty set is legal (the input
/// found nothing trackable) and still counts as a sampling unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncidenceRecord {
    /// Opaque input identifier. Duplicate ids are counted as distinct
    /// sampling units; deduplication is the ingester's job.
    pub id: String,
    /// Species exhibited by this input, deduplicated and ordered.
    pub species: BTreeSet<String>,
    /// Optional position of the input in the campaign.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u64>,
}

impl IncidenceRecord {
    /// Builds a record from any iterable of species tokens (duplicates
    /// collapse by set semantics).
    pub fn new<I, S>(id: impl Into<String>, species: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        IncidenceRecord {
            id: id.into(),
            species: species.into_iter().map(Into::into).collect(),
            order: None,
        }
    }
}

/// Campaign-level sufficient statistics.
///
/// Maintained invariants, checked by the test suite after every operation
/// sequence:
///
/// - every count in `species_counts` is in `1..=n`,
/// - `sum_k f[k] = s_obs = species_counts.len()`,
/// - `sum_k k * f[k] = sum of species_counts values`,
/// - `f` equals a from-scratch recount of `species_counts`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CampaignSnapshot {
    n: u64,
    species_counts: HashMap<String, u64>,
    f: BTreeMap<u64, u64>,
}

/// The scalar statistics consumed by the estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SnapshotStats {
    /// Inputs processed.
    pub n: u64,
    /// Distinct species observed.
    pub s_obs: u64,
    /// Species observed in exactly one input.
    pub f1: u64,
    /// Species observed in exactly two inputs.
    pub f2: u64,
}

impl CampaignSnapshot {
    /// Empty campaign: `n = 0`, no species.
    pub fn new() -> Self {
        Self::default()
    }

    /// Folds one input's species set into the statistics.
    ///
    /// Cost is linear in the size of the record's species set. Empty
    /// species sets still increment `n`: the risk estimators divide by the
    /// number of generated inputs, not the number of productive ones.
    pub fn observe(&mut self, record: &IncidenceRecord) {
        self.n = self.n.checked_add(1).expect("input count overflow");
        for sp in &record.species {
            self.bump(sp);
        }
    }

    /// [`observe`](Self::observe) for an ad-hoc species list; duplicates
    /// within the list collapse by set semantics.
    pub fn observe_species<I, S>(&mut self, species: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let tokens: Vec<S> = species.into_iter().collect();
        let set: BTreeSet<&str> = tokens.iter().map(AsRef::as_ref).collect();
        self.n = self.n.checked_add(1).expect("input count overflow");
        for sp in set {
            self.bump(sp);
        }
    }

    /// Builds a snapshot from a batch of records.
    pub fn from_records<'a, I>(records: I) -> Self
    where
        I: IntoIterator<Item = &'a IncidenceRecord>,
    {
        let mut snap = Self::new();
        for rec in records {
            snap.observe(rec);
        }
        snap
    }

    /// Additively folds another snapshot into this one.
    ///
    /// Correct only when the two snapshots were built from disjoint record
    /// streams; the result then equals observing the concatenated stream.
    pub fn merge(&mut self, other: &CampaignSnapshot) {
        self.n = self.n.checked_add(other.n).expect("input count overflow");
        for (sp, &add) in &other.species_counts {
            let old = self.species_counts.get(sp).copied().unwrap_or(0);
            let new = old.checked_add(add).expect("species count overflow");
            self.species_counts.insert(sp.clone(), new);
            if old > 0 {
                self.histogram_dec(old);
            }
            self.histogram_inc(new);
        }
    }

    /// Inputs processed.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Distinct species observed so far.
    pub fn s_obs(&self) -> u64 {
        self.species_counts.len() as u64
    }

    /// `f[k]`: number of species observed in exactly `k` inputs.
    pub fn f(&self, k: u64) -> u64 {
        self.f.get(&k).copied().unwrap_or(0)
    }

    /// Singleton count `f[1]`.
    pub fn f1(&self) -> u64 {
        self.f(1)
    }

    /// Doubleton count `f[2]`.
    pub fn f2(&self) -> u64 {
        self.f(2)
    }

    /// Incidence count for one species (0 if never observed).
    pub fn species_count(&self, id: &str) -> u64 {
        self.species_counts.get(id).copied().unwrap_or(0)
    }

    /// Full species -> incidence count map.
    pub fn species_counts(&self) -> &HashMap<String, u64> {
        &self.species_counts
    }

    /// Full frequency-of-frequencies histogram (sorted by `k`, zero
    /// entries absent).
    pub fn freq_histogram(&self) -> &BTreeMap<u64, u64> {
        &self.f
    }

    /// Total incidences: `sum_k k * f[k]`, equal to the sum of all species
    /// counts.
    pub fn total_incidences(&self) -> u64 {
        self.f.iter().fold(0u64, |acc, (k, v)| {
            acc.checked_add(k.checked_mul(*v).expect("incidence total overflow"))
                .expect("incidence total overflow")
        })
    }

    /// The scalar statistics `(n, s_obs, f1, f2)` consumed by the
    /// estimators.
    pub fn snapshot_stats(&self) -> SnapshotStats {
        SnapshotStats {
            n: self.n,
            s_obs: self.s_obs(),
            f1: self.f1(),
            f2: self.f2(),
        }
    }

    fn bump(&mut self, species: &str) {
        match self.species_counts.get_mut(species) {
            Some(c) => {
                let old = *c;
                *c = old.checked_add(1).expect("species count overflow");
                self.histogram_dec(old);
                self.histogram_inc(old + 1);
            }
            None => {
                self.species_counts.insert(species.to_owned(), 1);
                self.histogram_inc(1);
            }
        }
    }

    fn histogram_inc(&mut self, k: u64) {
        *self.f.entry(k).or_insert(0) += 1;
    }

    fn histogram_dec(&mut self, k: u64) {
        let slot = self.f.get_mut(&k).expect("histogram entry must exist");
        *slot -= 1;
        if *slot == 0 {
            self.f.remove(&k);
        }
    }
}
