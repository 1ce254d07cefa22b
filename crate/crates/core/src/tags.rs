//! Tag grammar: bug-span markers in sources, modification markers in
//! patches and the CWE label prefix.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::sample::RepairSample;

/// Default opener of a vulnerable span in the source function.
pub const DEFAULT_START_BUG: &str = "<S2SV_StartBug>";
/// Default closer of a vulnerable span.
pub const DEFAULT_END_BUG: &str = "<S2SV_EndBug>";
/// Default opener of a modification in the target patch.
pub const DEFAULT_MOD_START: &str = "<ModStart>";
/// Default closer of a modification.
pub const DEFAULT_MOD_END: &str = "<ModEnd>";

/// Recognizes CWE labels: `<prefix><digits>`, plus optional literal labels
/// (e.g. `NVD-CWE-Other`) that some corpora use.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CwePattern {
    /// Literal prefix, `CWE-` by default.
    pub prefix: String,
    /// Extra whole-token labels accepted verbatim.
    #[serde(default)]
    pub extra_labels: Vec<String>,
}

impl Default for CwePattern {
    fn default() -> Self {
        Self {
            prefix: "CWE-".to_string(),
            extra_labels: Vec::new(),
        }
    }
}

impl CwePattern {
    /// Returns true if `token` is a CWE label.
    pub fn matches(&self, token: &str) -> bool {
        if self.extra_labels.iter().any(|l| l == token) {
            return true;
        }
        match token.strip_prefix(self.prefix.as_str()) {
            Some(digits) => !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()),
            None => false,
        }
    }
}

/// Invalid tag vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VocabularyError {
    /// One of the four tags is empty or contains whitespace.
    #[error("tag `{0}` must be a single non-empty token")]
    BadTag(String),
    /// Two tags share the same spelling.
    #[error("tag `{0}` is used for more than one role")]
    DuplicateTag(String),
    /// The CWE pattern cannot recognize the generic-bug label.
    #[error("CWE pattern does not accept the generic label CWE-000")]
    GenericLabelRejected,
}

/// The four marker tokens plus the CWE label pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagVocabulary {
    /// Opens a vulnerable span in the source.
    pub start_bug: String,
    /// Closes a vulnerable span.
    pub end_bug: String,
    /// Opens a modification in the patch.
    pub mod_start: String,
    /// Closes a modification.
    pub mod_end: String,
    /// Label recognizer for the source prefix.
    #[serde(default)]
    pub cwe_pattern: CwePattern,
}

impl Default for TagVocabulary {
    fn default() -> Self {
        Self {
            start_bug: DEFAULT_START_BUG.to_string(),
            end_bug: DEFAULT_END_BUG.to_string(),
            mod_start: DEFAULT_MOD_START.to_string(),
            mod_end: DEFAULT_MOD_END.to_string(),
            cwe_pattern: CwePattern::default(),
        }
    }
}

impl TagVocabulary {
    /// Builds a vocabulary and checks its invariants.
    pub fn new(
        start_bug: &str,
        end_bug: &str,
        mod_start: &str,
        mod_end: &str,
        cwe_pattern: CwePattern,
    ) -> Result<Self, VocabularyError> {
        let vocab = Self {
            start_bug: start_bug.to_string(),
            end_bug: end_bug.to_string(),
            mod_start: mod_start.to_string(),
            mod_end: mod_end.to_string(),
            cwe_pattern,
        };
        vocab.validate()?;
        Ok(vocab)
    }

    /// Checks that the tags are distinct single tokens and that `CWE-000`
    /// is a recognized label.
    pub fn validate(&self) -> Result<(), VocabularyError> {
        let tags = [
            &self.start_bug,
            &self.end_bug,
            &self.mod_start,
            &self.mod_end,
        ];
        for (i, tag) in tags.iter().enumerate() {
            if tag.is_empty() || tag.chars().any(char::is_whitespace) {
                return Err(VocabularyError::BadTag((*tag).clone()));
            }
            if tags[..i].contains(tag) {
                return Err(VocabularyError::DuplicateTag((*tag).clone()));
            }
        }
        if !self.cwe_pattern.matches("CWE-000") {
            return Err(VocabularyError::GenericLabelRejected);
        }
        Ok(())
    }

    /// True if `token` is either bug-span marker.
    pub fn is_bug_tag(&self, token: &str) -> bool {
        token == self.start_bug || token == self.end_bug
    }
}

/// Pairing defects found by [`validate_tags`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagDiagnostics {
    /// True iff all defect counts are zero.
    pub balanced: bool,
    /// Closers seen while no span was open.
    pub unopened_closers: usize,
    /// Spans still open at the end of the text.
    pub unclosed_openers: usize,
    /// Openers seen while a span was already open.
    pub misordered_pairs: usize,
    /// Properly closed opener/closer pairs.
    pub bug_span_count: usize,
}

/// Scans `text` once, left to right, pairing `open` and `close` tokens.
pub fn scan_pairs(text: &str, open: &str, close: &str) -> TagDiagnostics {
    let mut diag = TagDiagnostics::default();
    let mut is_open = false;
    for token in text.split_whitespace() {
        if token == open {
            if is_open {
                diag.misordered_pairs += 1;
            }
            is_open = true;
        } else if token == close {
            if is_open {
                diag.bug_span_count += 1;
                is_open = false;
            } else {
                diag.unopened_closers += 1;
            }
        }
    }
    if is_open {
        diag.unclosed_openers = 1;
    }
    diag.balanced =
        diag.unopened_closers == 0 && diag.unclosed_openers == 0 && diag.misordered_pairs == 0;
    diag
}

/// Diagnoses bug-span markers in a sample's source body.
pub fn validate_tags(sample: &RepairSample, vocab: &TagVocabulary) -> TagDiagnostics {
    scan_pairs(&sample.source_body, &vocab.start_bug, &vocab.end_bug)
}

/// Diagnoses modification markers in a sample's target patch.
pub fn validate_patch_tags(sample: &RepairSample, vocab: &TagVocabulary) -> TagDiagnostics {
    scan_pairs(&sample.target_patch, &vocab.mod_start, &vocab.mod_end)
}
