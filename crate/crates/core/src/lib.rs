//! Quality auditing for tagged vulnerability-repair corpora.
//!
//! Samples are `(CWE label, tagged vulnerable function, tagged patch)` rows.
//! This crate holds the pure algorithmic part of the toolkit: tag grammar,
//! canonicalization and fingerprinting, keep-first in-set deduplication,
//! cross-set leakage detection, the named cleaning protocols, exact-match
//! scoring and the manual review ledger model. It performs no IO and only
//! needs `alloc`; file formats, rendering and the CLI live in the
//! `vulnaudit` crate.

#![cfg_attr(not(test), no_std)]
#![deny(missing_docs)]

extern crate alloc;

pub mod dedup;
pub mod eval;
pub mod fingerprint;
pub mod ledger;
pub mod presets;
pub mod protocol;
pub mod sample;
pub mod tags;

pub use dedup::{
    dedup_in_set, dedup_in_set_keyed, find_cross_set, find_cross_set_keyed, overlap_audit,
    overlap_audit_keyed, remove_cross_set, remove_cross_set_keyed, CrossSetError, CrossSetReport,
    DedupGroup, DedupReport, Direction, OverlapReport,
};
pub use eval::{
    aggregate_seeds, beam_sweep, perfect_prediction, top10_breakdown, CweTally, EvalError,
    EvalResult, MatchPolicy, MeanResult, PredictionSet, SweepRow, Top10Cell, Top10Column, Top10Row,
    Top10Table,
};
pub use fingerprint::{canonicalize, digests, fingerprint, Digest, Fingerprint, NormalizationMode};
pub use ledger::{
    init_ledger, summarize_ledger, Accuracy, Completeness, CweSummary, LedgerError, LedgerSummary,
    ReviewRecord, SampleRef,
};
pub use protocol::{
    build_protocol, build_protocol_with, per_cwe_census, AuditTrail, ProtocolId, ProtocolSpec,
};
pub use sample::{parse_sample, serialize_sample, Corpus, ParseError, RepairSample, Role};
pub use tags::{
    validate_patch_tags, validate_tags, CwePattern, TagDiagnostics, TagVocabulary, VocabularyError,
};
