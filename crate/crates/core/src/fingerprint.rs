//! Canonical forms and digest keys for duplicate identity.

use alloc::borrow::Cow;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest as _, Sha256};

use crate::sample::{labeled_source, RepairSample};
use crate::tags::TagVocabulary;

/// What is erased before two samples are compared.
///
/// Each mode erases everything the previous one does: `CweStripped` drops
/// the label, `BugTagStripped` additionally drops bug-span tags and
/// collapses whitespace in the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationMode {
    /// Exact string match of the full row.
    Raw,
    /// Row match with the CWE label removed.
    CweStripped,
    /// Row match without label or bug-span tags.
    #[serde(rename = "bugtag-stripped")]
    BugTagStripped,
}

impl NormalizationMode {
    /// All modes, weakest normalization first.
    pub const LADDER: [NormalizationMode; 3] = [
        NormalizationMode::Raw,
        NormalizationMode::CweStripped,
        NormalizationMode::BugTagStripped,
    ];

    /// Stable flag spelling (`raw`, `cwe-stripped`, `bugtag-stripped`).
    pub fn as_str(self) -> &'static str {
        match self {
            NormalizationMode::Raw => "raw",
            NormalizationMode::CweStripped => "cwe-stripped",
            NormalizationMode::BugTagStripped => "bugtag-stripped",
        }
    }
}

impl fmt::Display for NormalizationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NormalizationMode {
    type Err = UnknownMode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "raw" => Ok(NormalizationMode::Raw),
            "cwe-stripped" => Ok(NormalizationMode::CweStripped),
            "bugtag-stripped" => Ok(NormalizationMode::BugTagStripped),
            _ => Err(UnknownMode),
        }
    }
}

/// Unrecognized normalization mode name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("unknown normalization mode (expected raw, cwe-stripped or bugtag-stripped)")]
pub struct UnknownMode;

/// Canonical `(source, target)` pair of a sample under `mode`.
///
/// The target patch is never altered.
pub fn canonicalize(
    sample: &RepairSample,
    mode: NormalizationMode,
    vocab: &TagVocabulary,
) -> (String, String) {
    let (source, target) = canonical_parts(sample, mode, vocab);
    (source.into_owned(), String::from(target))
}

fn canonical_parts<'a>(
    sample: &'a RepairSample,
    mode: NormalizationMode,
    vocab: &TagVocabulary,
) -> (Cow<'a, str>, &'a str) {
    let source = match mode {
        NormalizationMode::Raw => match sample.cwe_label {
            Some(_) => Cow::Owned(labeled_source(sample)),
            None => Cow::Borrowed(sample.source_body.as_str()),
        },
        NormalizationMode::CweStripped => Cow::Borrowed(sample.source_body.as_str()),
        NormalizationMode::BugTagStripped => {
            let kept: Vec<&str> = sample
                .source_body
                .split_whitespace()
                .filter(|t| !vocab.is_bug_tag(t))
                .collect();
            Cow::Owned(kept.join(" "))
        }
    };
    (source, sample.target_patch.as_str())
}

/// 256-bit SHA-256 digest, rendered as lowercase hex.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Digest(pub [u8; 32]);

impl Digest {
    /// Digest of a `(source, target)` pair. Each part is length-prefixed
    /// so no two distinct pairs share an encoding.
    pub fn of_pair(source: &str, target: &str) -> Self {
        let mut h = Sha256::new();
        h.update((source.len() as u64).to_le_bytes());
        h.update(source.as_bytes());
        h.update((target.len() as u64).to_le_bytes());
        h.update(target.as_bytes());
        Digest(h.finalize().into())
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({self})")
    }
}

/// Malformed hex digest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("digest must be 64 lowercase hex characters")]
pub struct BadDigest;

impl FromStr for Digest {
    type Err = BadDigest;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        if bytes.len() != 64 {
            return Err(BadDigest);
        }
        let nibble = |c: u8| match c {
            b'0'..=b'9' => Ok(c - b'0'),
            b'a'..=b'f' => Ok(c - b'a' + 10),
            _ => Err(BadDigest),
        };
        let mut out = [0u8; 32];
        for (i, pair) in bytes.chunks_exact(2).enumerate() {
            out[i] = (nibble(pair[0])? << 4) | nibble(pair[1])?;
        }
        Ok(Digest(out))
    }
}

impl Serialize for Digest {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Digest {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = <Cow<'de, str>>::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Duplicate-identity key of a sample under one normalization mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fingerprint {
    /// Digest of the canonical pair.
    pub digest: Digest,
    /// Mode the canonical pair was built with.
    pub mode: NormalizationMode,
}

/// Fingerprints a sample. Deterministic across runs and platforms.
pub fn fingerprint(
    sample: &RepairSample,
    mode: NormalizationMode,
    vocab: &TagVocabulary,
) -> Fingerprint {
    let (source, target) = canonical_parts(sample, mode, vocab);
    Fingerprint {
        digest: Digest::of_pair(&source, target),
        mode,
    }
}

/// Digests of every sample in order.
pub fn digests(
    samples: &[RepairSample],
    mode: NormalizationMode,
    vocab: &TagVocabulary,
) -> Vec<Digest> {
    samples
        .iter()
        .map(|s| fingerprint(s, mode, vocab).digest)
        .collect()
}
