//! Samples, corpora and the row grammar.
//!
//! A raw row is a pair of strings. The source optionally starts with a CWE
//! label token followed by one whitespace character; everything after that
//! is the vulnerable function, kept byte for byte.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use serde::{Deserialize, Serialize};

use crate::tags::TagVocabulary;

/// Split a corpus plays in an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    /// Training split.
    Train,
    /// Validation split.
    Validation,
    /// Test split.
    Test,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Train => "train",
            Role::Validation => "validation",
            Role::Test => "test",
        })
    }
}

/// One (label, vulnerable function, patch) record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairSample {
    /// Dense position in the owning corpus.
    pub ordinal: usize,
    /// Row index in the file the sample was loaded from. Survives cleaning,
    /// so removals can always be traced back to the original file.
    pub origin_row: usize,
    /// CWE label taken from the source prefix, if any.
    pub cwe_label: Option<String>,
    /// Vulnerable function text, possibly containing bug-span tags.
    pub source_body: String,
    /// Patch text with modification tags.
    pub target_patch: String,
    /// Provenance: `cve_id`, `commit_url` and any extra input columns.
    #[serde(default)]
    pub meta: BTreeMap<String, String>,
}

impl RepairSample {
    /// The CVE identifier from metadata, if present and non-empty.
    pub fn cve_id(&self) -> Option<&str> {
        self.meta_value("cve_id")
    }

    /// The fixing commit URL from metadata, if present and non-empty.
    pub fn commit_url(&self) -> Option<&str> {
        self.meta_value("commit_url")
    }

    fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta
            .get(key)
            .map(String::as_str)
            .filter(|v| !v.is_empty())
    }
}

/// Row-level parse failure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    /// The source column is empty.
    #[error("source text is empty")]
    EmptySource,
}

/// Parses one raw row. Never rewrites tokens; a source without a leading
/// CWE label is accepted with `cwe_label = None`.
pub fn parse_sample(
    raw_source: &str,
    raw_target: &str,
    vocab: &TagVocabulary,
    ordinal: usize,
) -> Result<RepairSample, ParseError> {
    if raw_source.is_empty() {
        return Err(ParseError::EmptySource);
    }
    let (cwe_label, source_body) = split_label(raw_source, vocab);
    Ok(RepairSample {
        ordinal,
        origin_row: ordinal,
        cwe_label: cwe_label.map(String::from),
        source_body: String::from(source_body),
        target_patch: String::from(raw_target),
        meta: BTreeMap::new(),
    })
}

fn split_label<'a>(raw: &'a str, vocab: &TagVocabulary) -> (Option<&'a str>, &'a str) {
    let token_end = raw.find(char::is_whitespace).unwrap_or(raw.len());
    if token_end == 0 {
        return (None, raw);
    }
    let token = &raw[..token_end];
    if !vocab.cwe_pattern.matches(token) {
        return (None, raw);
    }
    let rest = &raw[token_end..];
    let body = match rest.chars().next() {
        Some(sep) => &rest[sep.len_utf8()..],
        None => rest,
    };
    (Some(token), body)
}

/// Rebuilds the raw `(source, target)` pair: label and body joined by a
/// single space.
pub fn serialize_sample(sample: &RepairSample, _vocab: &TagVocabulary) -> (String, String) {
    (labeled_source(sample), sample.target_patch.clone())
}

pub(crate) fn labeled_source(sample: &RepairSample) -> String {
    match &sample.cwe_label {
        Some(label) if sample.source_body.is_empty() => label.clone(),
        Some(label) => {
            let mut s = String::with_capacity(label.len() + 1 + sample.source_body.len());
            s.push_str(label);
            s.push(' ');
            s.push_str(&sample.source_body);
            s
        }
        None => sample.source_body.clone(),
    }
}

/// An ordered split of samples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    /// Display name used in reports.
    pub name: String,
    /// Split role.
    pub role: Role,
    /// Samples in file order; `samples[i].ordinal == i`.
    pub samples: Vec<RepairSample>,
}

impl Corpus {
    /// Creates a corpus, renumbering ordinals densely in the given order.
    pub fn new(name: impl Into<String>, role: Role, mut samples: Vec<RepairSample>) -> Self {
        for (i, s) in samples.iter_mut().enumerate() {
            s.ordinal = i;
        }
        Self {
            name: name.into(),
            role,
            samples,
        }
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// True if the corpus has no samples.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// A new corpus with the same name and role holding `samples`.
    pub fn with_samples(&self, samples: Vec<RepairSample>) -> Self {
        Self::new(self.name.clone(), self.role, samples)
    }

    /// True if ordinals are exactly `0..len`.
    pub fn ordinals_valid(&self) -> bool {
        self.samples.iter().enumerate().all(|(i, s)| s.ordinal == i)
    }
}
