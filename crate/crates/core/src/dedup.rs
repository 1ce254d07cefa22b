//! Keep-first in-set deduplication, cross-set leakage detection and removal,
//! and overlap audits between independent corpora.
//!
//! Every operation has a `_keyed` form taking precomputed digests (one per
//! sample, in order) so callers can fingerprint in parallel; grouping itself
//! is a sequential reduction in ordinal order and therefore deterministic.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::fingerprint::{digests, Digest, NormalizationMode};
use crate::sample::{Corpus, RepairSample};
use crate::tags::TagVocabulary;

/// One duplicate class: the survivor and the later copies that were dropped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DedupGroup {
    /// Shared key of the class.
    pub fingerprint: Digest,
    /// Ordinal of the first occurrence.
    pub kept_ordinal: usize,
    /// Ordinals of the removed occurrences, ascending.
    pub removed_ordinals: Vec<usize>,
}

/// Accounting for one in-set deduplication.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DedupReport {
    /// Corpus the report describes.
    pub corpus_name: String,
    /// Key mode.
    pub mode: NormalizationMode,
    /// Samples before deduplication.
    pub total: usize,
    /// Samples removed.
    pub in_set_duplicates: usize,
    /// Samples kept.
    pub remaining: usize,
    /// Classes with at least one removal, ordered by survivor ordinal.
    pub groups: Vec<DedupGroup>,
}

impl DedupReport {
    /// Checks conservation, keep-first ordering and group accounting.
    pub fn is_consistent(&self) -> bool {
        let removed: usize = self.groups.iter().map(|g| g.removed_ordinals.len()).sum();
        self.total == self.remaining + self.in_set_duplicates
            && removed == self.in_set_duplicates
            && self.groups.iter().all(|g| {
                g.removed_ordinals
                    .first()
                    .is_some_and(|&first| g.kept_ordinal < first)
            })
    }
}

/// Keeps the first occurrence of every key class.
///
/// Stored samples keep their own labels; only the keys are normalized.
pub fn dedup_in_set(
    corpus: &Corpus,
    mode: NormalizationMode,
    vocab: &TagVocabulary,
) -> (Corpus, DedupReport) {
    let keys = digests(&corpus.samples, mode, vocab);
    let (out, report, _) = dedup_in_set_keyed(corpus, mode, &keys);
    (out, report)
}

/// [`dedup_in_set`] over precomputed keys. Also returns the keys of the
/// surviving samples, aligned with the output corpus.
///
/// # Panics
/// If `keys.len() != corpus.len()`.
pub fn dedup_in_set_keyed(
    corpus: &Corpus,
    mode: NormalizationMode,
    keys: &[Digest],
) -> (Corpus, DedupReport, Vec<Digest>) {
    assert_eq!(keys.len(), corpus.len(), "one key per sample");
    let mut first_seen: BTreeMap<Digest, usize> = BTreeMap::new();
    let mut groups: Vec<DedupGroup> = Vec::new();
    // index into `groups` for classes that already have a removal
    let mut group_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut kept: Vec<RepairSample> = Vec::new();
    let mut kept_keys: Vec<Digest> = Vec::new();

    for (sample, key) in corpus.samples.iter().zip(keys) {
        match first_seen.get(key) {
            None => {
                first_seen.insert(*key, sample.ordinal);
                kept.push(sample.clone());
                kept_keys.push(*key);
            }
            Some(&kept_ordinal) => {
                let idx = *group_of.entry(kept_ordinal).or_insert_with(|| {
                    groups.push(DedupGroup {
                        fingerprint: *key,
                        kept_ordinal,
                        removed_ordinals: Vec::new(),
                    });
                    groups.len() - 1
                });
                groups[idx].removed_ordinals.push(sample.ordinal);
            }
        }
    }
    groups.sort_by_key(|g| g.kept_ordinal);

    let report = DedupReport {
        corpus_name: corpus.name.clone(),
        mode,
        total: corpus.len(),
        in_set_duplicates: corpus.len() - kept.len(),
        remaining: kept.len(),
        groups,
    };
    (corpus.with_samples(kept), report, kept_keys)
}

/// Which side of a corpus pair loses its shared samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Remove shared samples from the first corpus.
    FromFirst,
    /// Remove shared samples from the second corpus.
    FromSecond,
    /// Detection only.
    None,
}

/// Shared-key accounting between two deduplicated corpora.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossSetReport {
    /// Key mode.
    pub mode: NormalizationMode,
    /// Names of the (first, second) corpora.
    pub pair: (String, String),
    /// Keys present in both.
    pub shared_keys: usize,
    /// Side that lost its shared samples.
    pub removal_direction: Direction,
    /// Ordinals removed from that side (relative to the corpus passed in).
    pub removed_ordinals: Vec<usize>,
    /// Original file rows of the removed samples.
    pub removed_origin_rows: Vec<usize>,
}

/// Cross-set precondition failure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CrossSetError {
    /// A corpus still has in-set duplicates under the requested mode.
    #[error("corpus `{corpus}` contains in-set duplicates; deduplicate it first")]
    NotDeduplicated {
        /// Offending corpus name.
        corpus: String,
    },
}

fn unique_keys(corpus: &Corpus, keys: &[Digest]) -> Result<BTreeSet<Digest>, CrossSetError> {
    assert_eq!(keys.len(), corpus.len(), "one key per sample");
    let mut set = BTreeSet::new();
    for k in keys {
        if !set.insert(*k) {
            return Err(CrossSetError::NotDeduplicated {
                corpus: corpus.name.clone(),
            });
        }
    }
    Ok(set)
}

/// Counts keys shared by two in-set-deduplicated corpora.
pub fn find_cross_set(
    a: &Corpus,
    b: &Corpus,
    mode: NormalizationMode,
    vocab: &TagVocabulary,
) -> Result<CrossSetReport, CrossSetError> {
    find_cross_set_keyed(
        a,
        &digests(&a.samples, mode, vocab),
        b,
        &digests(&b.samples, mode, vocab),
        mode,
    )
}

/// [`find_cross_set`] over precomputed keys.
pub fn find_cross_set_keyed(
    a: &Corpus,
    a_keys: &[Digest],
    b: &Corpus,
    b_keys: &[Digest],
    mode: NormalizationMode,
) -> Result<CrossSetReport, CrossSetError> {
    let a_set = unique_keys(a, a_keys)?;
    let b_set = unique_keys(b, b_keys)?;
    Ok(CrossSetReport {
        mode,
        pair: (a.name.clone(), b.name.clone()),
        shared_keys: a_set.intersection(&b_set).count(),
        removal_direction: Direction::None,
        removed_ordinals: Vec::new(),
        removed_origin_rows: Vec::new(),
    })
}

/// Removes every shared-key sample from the side named by `direction`.
pub fn remove_cross_set(
    a: &Corpus,
    b: &Corpus,
    mode: NormalizationMode,
    direction: Direction,
    vocab: &TagVocabulary,
) -> Result<(Corpus, Corpus, CrossSetReport), CrossSetError> {
    remove_cross_set_keyed(
        a,
        &digests(&a.samples, mode, vocab),
        b,
        &digests(&b.samples, mode, vocab),
        mode,
        direction,
    )
}

/// [`remove_cross_set`] over precomputed keys.
pub fn remove_cross_set_keyed(
    a: &Corpus,
    a_keys: &[Digest],
    b: &Corpus,
    b_keys: &[Digest],
    mode: NormalizationMode,
    direction: Direction,
) -> Result<(Corpus, Corpus, CrossSetReport), CrossSetError> {
    let a_set = unique_keys(a, a_keys)?;
    let b_set = unique_keys(b, b_keys)?;
    let shared_keys = a_set.intersection(&b_set).count();

    let strip = |victim: &Corpus, keys: &[Digest], other: &BTreeSet<Digest>| {
        let mut kept = Vec::with_capacity(victim.len());
        let mut removed = Vec::new();
        let mut removed_rows = Vec::new();
        for (s, k) in victim.samples.iter().zip(keys) {
            if other.contains(k) {
                removed.push(s.ordinal);
                removed_rows.push(s.origin_row);
            } else {
                kept.push(s.clone());
            }
        }
        (victim.with_samples(kept), removed, removed_rows)
    };

    let (out_a, out_b, removed_ordinals, removed_origin_rows) = match direction {
        Direction::FromFirst => {
            let (a2, r, rows) = strip(a, a_keys, &b_set);
            (a2, b.clone(), r, rows)
        }
        Direction::FromSecond => {
            let (b2, r, rows) = strip(b, b_keys, &a_set);
            (a.clone(), b2, r, rows)
        }
        Direction::None => (a.clone(), b.clone(), Vec::new(), Vec::new()),
    };

    let report = CrossSetReport {
        mode,
        pair: (a.name.clone(), b.name.clone()),
        shared_keys,
        removal_direction: direction,
        removed_ordinals,
        removed_origin_rows,
    };
    Ok((out_a, out_b, report))
}

/// How much of a probe corpus already occurs in a reference corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapReport {
    /// Probe corpus name.
    pub probe_corpus: String,
    /// Reference corpus name.
    pub reference_corpus: String,
    /// Key mode.
    pub mode: NormalizationMode,
    /// Probe size.
    pub probe_total: usize,
    /// Probe samples whose key occurs in the reference.
    pub matched: usize,
    /// Their ordinals.
    pub matched_ordinals: Vec<usize>,
}

/// Counts probe samples whose key occurs anywhere in `reference`. Neither
/// corpus needs to be deduplicated.
pub fn overlap_audit(
    probe: &Corpus,
    reference: &Corpus,
    mode: NormalizationMode,
    vocab: &TagVocabulary,
) -> OverlapReport {
    overlap_audit_keyed(
        probe,
        &digests(&probe.samples, mode, vocab),
        reference,
        &digests(&reference.samples, mode, vocab),
        mode,
    )
}

/// [`overlap_audit`] over precomputed keys.
pub fn overlap_audit_keyed(
    probe: &Corpus,
    probe_keys: &[Digest],
    reference: &Corpus,
    reference_keys: &[Digest],
    mode: NormalizationMode,
) -> OverlapReport {
    assert_eq!(probe_keys.len(), probe.len(), "one key per sample");
    let reference_set: BTreeSet<&Digest> = reference_keys.iter().collect();
    let matched_ordinals: Vec<usize> = probe
        .samples
        .iter()
        .zip(probe_keys)
        .filter(|(_, k)| reference_set.contains(k))
        .map(|(s, _)| s.ordinal)
        .collect();
    OverlapReport {
        probe_corpus: probe.name.clone(),
        reference_corpus: reference.name.clone(),
        mode,
        probe_total: probe.len(),
        matched: matched_ordinals.len(),
        matched_ordinals,
    }
}
