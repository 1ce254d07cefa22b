//! Manual accuracy/completeness review records.
//!
//! The toolkit only seeds and tallies the ledger; verdicts come from a
//! human reviewer who reads the CVE entry and fixing commit for each sample.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
use serde::{Deserialize, Serialize};

use crate::fingerprint::{fingerprint, Digest, NormalizationMode};
use crate::presets::UNLABELED;
use crate::sample::Corpus;
use crate::tags::TagVocabulary;

/// Identifies the reviewed sample. The fingerprint lets verdicts be
/// re-attached after the corpus is reordered.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SampleRef {
    /// Corpus name.
    pub corpus: String,
    /// Ordinal in that corpus.
    pub ordinal: usize,
    /// Raw-mode fingerprint of the sample.
    pub fingerprint: Digest,
}

macro_rules! verdict_enum {
    ($(#[$doc:meta])* $name:ident { $($(#[$vdoc:meta])* $variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
        #[serde(rename_all = "lowercase")]
        pub enum $name {
            $($(#[$vdoc])* $variant,)+
            /// Not yet reviewed.
            #[default]
            Unreviewed,
        }

        impl $name {
            /// Ledger spelling.
            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text,)+
                    $name::Unreviewed => "unreviewed",
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = BadVerdict;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s.trim() {
                    $($text => Ok($name::$variant),)+
                    "unreviewed" | "" => Ok($name::Unreviewed),
                    other => Err(BadVerdict(String::from(other))),
                }
            }
        }
    };
}

verdict_enum!(
    /// Whether the CWE label correctly describes the vulnerability.
    Accuracy {
        /// Label verified correct.
        Accurate => "accurate",
        /// Label wrong or vulnerability absent.
        Inaccurate => "inaccurate",
    }
);

verdict_enum!(
    /// Whether the sample holds everything needed to see and fix the bug.
    Completeness {
        /// Self-contained.
        Complete => "complete",
        /// Relevant code missing.
        Incomplete => "incomplete",
    }
);

/// Unrecognized verdict spelling.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unrecognized verdict `{0}`")]
pub struct BadVerdict(pub String);

/// One reviewer verdict bound to one sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewRecord {
    /// Sample identity.
    pub sample_ref: SampleRef,
    /// CWE label of the sample (`UNLABELED` if none).
    pub cwe_label: String,
    /// CVE identifier from corpus metadata.
    pub cve_id: Option<String>,
    /// Fixing commit from corpus metadata.
    pub commit_url: Option<String>,
    /// Label accuracy verdict.
    pub accuracy: Accuracy,
    /// Completeness verdict.
    pub completeness: Completeness,
    /// The sample lacks the information needed for either verdict.
    pub unverifiable: bool,
    /// Free text.
    pub notes: String,
    /// Who reviewed it.
    pub reviewer: String,
}

impl ReviewRecord {
    /// An unverifiable record must leave both verdicts unreviewed.
    pub fn is_well_formed(&self) -> bool {
        !self.unverifiable
            || (self.accuracy == Accuracy::Unreviewed
                && self.completeness == Completeness::Unreviewed)
    }
}

/// Seeds one unreviewed record per sample whose label passes `filter`.
pub fn init_ledger(
    corpus: &Corpus,
    filter: Option<&[&str]>,
    vocab: &TagVocabulary,
) -> Vec<ReviewRecord> {
    corpus
        .samples
        .iter()
        .filter(|s| {
            let label = s.cwe_label.as_deref().unwrap_or(UNLABELED);
            filter.is_none_or(|f| f.contains(&label))
        })
        .map(|s| ReviewRecord {
            sample_ref: SampleRef {
                corpus: corpus.name.clone(),
                ordinal: s.ordinal,
                fingerprint: fingerprint(s, NormalizationMode::Raw, vocab).digest,
            },
            cwe_label: String::from(s.cwe_label.as_deref().unwrap_or(UNLABELED)),
            cve_id: s.cve_id().map(String::from),
            commit_url: s.commit_url().map(String::from),
            accuracy: Accuracy::Unreviewed,
            completeness: Completeness::Unreviewed,
            unverifiable: false,
            notes: String::new(),
            reviewer: String::new(),
        })
        .collect()
}

/// Verdict counts for one label.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CweSummary {
    /// Records.
    pub total: usize,
    /// Accurate records.
    pub accurate: usize,
    /// Complete records.
    pub complete: usize,
    /// Records both accurate and complete.
    pub accurate_and_complete: usize,
    /// Unverifiable records.
    pub unverifiable: usize,
}

impl CweSummary {
    fn add(&mut self, r: &ReviewRecord) {
        let accurate = r.accuracy == Accuracy::Accurate;
        let complete = r.completeness == Completeness::Complete;
        self.total += 1;
        self.accurate += usize::from(accurate);
        self.complete += usize::from(complete);
        self.accurate_and_complete += usize::from(accurate && complete);
        self.unverifiable += usize::from(r.unverifiable);
    }

    /// `accurate_and_complete <= min(accurate, complete) <= total`.
    pub fn is_consistent(&self) -> bool {
        let m = self.accurate.min(self.complete);
        self.accurate_and_complete <= m && m <= self.total
    }
}

/// Verdict counts per label plus a totals row.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerSummary {
    /// Per label.
    pub per_cwe: BTreeMap<String, CweSummary>,
    /// Over all records.
    pub totals: CweSummary,
}

/// Ledger validation failure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LedgerError {
    /// Two records point at the same sample.
    #[error("duplicate record for {corpus}#{ordinal}")]
    DuplicateRecord {
        /// Corpus name.
        corpus: String,
        /// Ordinal.
        ordinal: usize,
    },
    /// Verdicts contradict each other.
    #[error("record {corpus}#{ordinal}: {reason}")]
    MalformedVerdict {
        /// Corpus name.
        corpus: String,
        /// Ordinal.
        ordinal: usize,
        /// What is wrong.
        reason: String,
    },
}

/// Tallies verdicts per label.
pub fn summarize_ledger(records: &[ReviewRecord]) -> Result<LedgerSummary, LedgerError> {
    let mut seen = BTreeSet::new();
    let mut summary = LedgerSummary::default();
    for r in records {
        let key = (&r.sample_ref.corpus, r.sample_ref.ordinal);
        if !seen.insert(key) {
            return Err(LedgerError::DuplicateRecord {
                corpus: r.sample_ref.corpus.clone(),
                ordinal: r.sample_ref.ordinal,
            });
        }
        if !r.is_well_formed() {
            return Err(LedgerError::MalformedVerdict {
                corpus: r.sample_ref.corpus.clone(),
                ordinal: r.sample_ref.ordinal,
                reason: String::from("unverifiable records must leave verdicts unreviewed"),
            });
        }
        summary
            .per_cwe
            .entry(r.cwe_label.clone())
            .or_default()
            .add(r);
        summary.totals.add(r);
    }
    Ok(summary)
}
