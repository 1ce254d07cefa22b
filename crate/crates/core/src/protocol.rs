//! Named dataset cleaning protocols.
//!
//! | id          | key mode     | cross-set removal side |
//! |-------------|--------------|------------------------|
//! | RQ1         | none         | none (passthrough)     |
//! | RQ2A        | raw          | train                  |
//! | RQ2B        | raw          | test                   |
//! | RQ3A        | cwe-stripped | train                  |
//! | RQ3B        | cwe-stripped | test                   |
//! | BugFixClean | raw          | validation             |

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
use serde::{Deserialize, Serialize};

use crate::dedup::{
    dedup_in_set_keyed, remove_cross_set_keyed, CrossSetError, CrossSetReport, DedupReport,
    Direction,
};
use crate::fingerprint::{digests, Digest, NormalizationMode};
use crate::presets::UNLABELED;
use crate::sample::{Corpus, RepairSample};
use crate::tags::TagVocabulary;

/// Protocol identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ProtocolId {
    /// Original corpora, untouched.
    #[serde(rename = "RQ1")]
    Rq1,
    /// Raw dedup, cross-set duplicates removed from train.
    #[serde(rename = "RQ2A")]
    Rq2a,
    /// Raw dedup, cross-set duplicates removed from test.
    #[serde(rename = "RQ2B")]
    Rq2b,
    /// Label-insensitive dedup, cross-set duplicates removed from train.
    #[serde(rename = "RQ3A")]
    Rq3a,
    /// Label-insensitive dedup, cross-set duplicates removed from test.
    #[serde(rename = "RQ3B")]
    Rq3b,
    /// Raw dedup of a bug-fix corpus, cross-set duplicates removed from
    /// validation.
    BugFixClean,
}

impl ProtocolId {
    /// Every protocol.
    pub const ALL: [ProtocolId; 6] = [
        ProtocolId::Rq1,
        ProtocolId::Rq2a,
        ProtocolId::Rq2b,
        ProtocolId::Rq3a,
        ProtocolId::Rq3b,
        ProtocolId::BugFixClean,
    ];

    /// Canonical spelling.
    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolId::Rq1 => "RQ1",
            ProtocolId::Rq2a => "RQ2A",
            ProtocolId::Rq2b => "RQ2B",
            ProtocolId::Rq3a => "RQ3A",
            ProtocolId::Rq3b => "RQ3B",
            ProtocolId::BugFixClean => "BugFixClean",
        }
    }
}

impl fmt::Display for ProtocolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Unrecognized protocol name.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown protocol `{0}` (expected RQ1, RQ2A, RQ2B, RQ3A, RQ3B or BugFixClean)")]
pub struct UnknownProtocol(pub String);

impl FromStr for ProtocolId {
    type Err = UnknownProtocol;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProtocolId::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownProtocol(String::from(s)))
    }
}

/// Mode and direction implied by a protocol id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolSpec {
    /// Protocol.
    pub id: ProtocolId,
    /// Key mode; `None` for the passthrough.
    pub mode: Option<NormalizationMode>,
    /// Cross-set removal side.
    pub direction: Direction,
}

impl From<ProtocolId> for ProtocolSpec {
    fn from(id: ProtocolId) -> Self {
        use NormalizationMode::*;
        let (mode, direction) = match id {
            ProtocolId::Rq1 => (None, Direction::None),
            ProtocolId::Rq2a => (Some(Raw), Direction::FromFirst),
            ProtocolId::Rq2b => (Some(Raw), Direction::FromSecond),
            ProtocolId::Rq3a => (Some(CweStripped), Direction::FromFirst),
            ProtocolId::Rq3b => (Some(CweStripped), Direction::FromSecond),
            ProtocolId::BugFixClean => (Some(Raw), Direction::FromSecond),
        };
        Self {
            id,
            mode,
            direction,
        }
    }
}

/// Every stage a protocol ran, with its accounting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditTrail {
    /// Protocol that produced the trail.
    pub protocol: ProtocolId,
    /// Key mode used by every stage.
    pub mode: Option<NormalizationMode>,
    /// Cross-set removal side.
    pub direction: Direction,
    /// Input names and sizes, `[first, second]`.
    pub inputs: [(String, usize); 2],
    /// In-set deduplication of each corpus.
    pub in_set: Vec<DedupReport>,
    /// Cross-set removal.
    pub cross_set: Option<CrossSetReport>,
    /// Output sizes, `[first, second]`.
    pub final_sizes: [usize; 2],
}

impl AuditTrail {
    /// True if output sizes equal inputs minus every recorded removal.
    pub fn is_consistent(&self) -> bool {
        let mut expected = [self.inputs[0].1, self.inputs[1].1];
        for (side, report) in self.in_set.iter().enumerate().take(2) {
            if report.total != expected[side] || !report.is_consistent() {
                return false;
            }
            expected[side] -= report.in_set_duplicates;
        }
        if let Some(cs) = &self.cross_set {
            let removed = cs.removed_ordinals.len();
            match cs.removal_direction {
                Direction::FromFirst => expected[0] = expected[0].saturating_sub(removed),
                Direction::FromSecond => expected[1] = expected[1].saturating_sub(removed),
                Direction::None => {}
            }
        }
        expected == self.final_sizes
    }
}

/// Runs a protocol: in-set dedup of both corpora, then one-sided cross-set
/// removal. RQ1 returns the inputs unchanged.
pub fn build_protocol(
    first: &Corpus,
    second: &Corpus,
    spec: ProtocolSpec,
    vocab: &TagVocabulary,
) -> Result<(Corpus, Corpus, AuditTrail), CrossSetError> {
    build_protocol_with(first, second, spec, |samples, mode| {
        digests(samples, mode, vocab)
    })
}

/// [`build_protocol`] with a caller-supplied key function, e.g. a parallel
/// fingerprinter. `keys(samples, mode)` must return one digest per sample.
pub fn build_protocol_with<F>(
    first: &Corpus,
    second: &Corpus,
    spec: ProtocolSpec,
    keys: F,
) -> Result<(Corpus, Corpus, AuditTrail), CrossSetError>
where
    F: Fn(&[RepairSample], NormalizationMode) -> Vec<Digest>,
{
    let inputs = [
        (first.name.clone(), first.len()),
        (second.name.clone(), second.len()),
    ];
    let Some(mode) = spec.mode else {
        let trail = AuditTrail {
            protocol: spec.id,
            mode: None,
            direction: Direction::None,
            inputs,
            in_set: Vec::new(),
            cross_set: None,
            final_sizes: [first.len(), second.len()],
        };
        return Ok((first.clone(), second.clone(), trail));
    };

    let (a, a_report, a_keys) = dedup_in_set_keyed(first, mode, &keys(&first.samples, mode));
    let (b, b_report, b_keys) = dedup_in_set_keyed(second, mode, &keys(&second.samples, mode));
    let (a, b, cross) = remove_cross_set_keyed(&a, &a_keys, &b, &b_keys, mode, spec.direction)?;

    let trail = AuditTrail {
        protocol: spec.id,
        mode: Some(mode),
        direction: spec.direction,
        inputs,
        in_set: alloc::vec![a_report, b_report],
        cross_set: Some(cross),
        final_sizes: [a.len(), b.len()],
    };
    Ok((a, b, trail))
}

/// Samples per CWE label, optionally restricted to `filter`. Unlabeled
/// samples count under [`UNLABELED`]. Labels with no samples are absent.
pub fn per_cwe_census(corpus: &Corpus, filter: Option<&[&str]>) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for s in &corpus.samples {
        let label = s.cwe_label.as_deref().unwrap_or(UNLABELED);
        if filter.is_some_and(|f| !f.contains(&label)) {
            continue;
        }
        *counts.entry(String::from(label)).or_insert(0) += 1;
    }
    counts
}
