//! Named configuration presets.

use alloc::string::ToString;

use crate::tags::{CwePattern, TagVocabulary};

/// Top-10 CWE ranking used for per-category breakdowns, highest rank first.
pub const TOP10_CWES: [&str; 10] = [
    "CWE-787", "CWE-79", "CWE-125", "CWE-20", "CWE-78", "CWE-89", "CWE-416", "CWE-22", "CWE-352",
    "CWE-434",
];

/// Categories covered by the manual accuracy/completeness review (the
/// top-10 list without CWE-125 and CWE-20).
pub const REVIEWED_CWES: [&str; 8] = [
    "CWE-787", "CWE-79", "CWE-78", "CWE-89", "CWE-416", "CWE-22", "CWE-352", "CWE-434",
];

/// Label bucket for samples without a CWE label.
pub const UNLABELED: &str = "UNLABELED";

/// Vocabulary preset by name: `default` (`<ModStart>`/`<ModEnd>`) or `s2sv`
/// (`<S2SV_ModStart>`/`<S2SV_ModEnd>`, as shipped in some published files).
pub fn vocabulary(name: &str) -> Option<TagVocabulary> {
    match name {
        "default" => Some(TagVocabulary::default()),
        "s2sv" => Some(TagVocabulary {
            mod_start: "<S2SV_ModStart>".to_string(),
            mod_end: "<S2SV_ModEnd>".to_string(),
            cwe_pattern: CwePattern::default(),
            ..TagVocabulary::default()
        }),
        _ => None,
    }
}
