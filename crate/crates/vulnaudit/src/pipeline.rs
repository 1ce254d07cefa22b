//! The core operations wired to the parallel fingerprinter.

use vulnaudit_core::{
    build_protocol_with, dedup_in_set_keyed, overlap_audit_keyed, remove_cross_set_keyed,
    validate_patch_tags, validate_tags, AuditTrail, Corpus, Direction, NormalizationMode,
    OverlapReport, ProtocolId, ProtocolSpec, TagVocabulary,
};

use crate::error::Result;
use crate::parallel::digests;
use crate::report::{PairAudit, TagHealth};

/// In-set dedup of both corpora, then cross-set detection between the
/// survivors. With a `direction`, shared samples are also removed from that
/// side and the cleaned pair is returned.
pub fn audit_pair(
    first: &Corpus,
    second: &Corpus,
    mode: NormalizationMode,
    direction: Direction,
    vocab: &TagVocabulary,
) -> Result<(Corpus, Corpus, PairAudit)> {
    let (a, a_report, a_keys) =
        dedup_in_set_keyed(first, mode, &digests(&first.samples, mode, vocab));
    let (b, b_report, b_keys) =
        dedup_in_set_keyed(second, mode, &digests(&second.samples, mode, vocab));
    let (a, b, cross_set) = remove_cross_set_keyed(&a, &a_keys, &b, &b_keys, mode, direction)?;
    Ok((
        a,
        b,
        PairAudit {
            mode,
            first: a_report,
            second: b_report,
            cross_set,
        },
    ))
}

pub fn run_protocol(
    first: &Corpus,
    second: &Corpus,
    id: ProtocolId,
    vocab: &TagVocabulary,
) -> Result<(Corpus, Corpus, AuditTrail)> {
    let spec = ProtocolSpec::from(id);
    Ok(build_protocol_with(first, second, spec, |s, mode| {
        digests(s, mode, vocab)
    })?)
}

pub fn overlap(
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

pub fn tag_health(corpus: &Corpus, vocab: &TagVocabulary) -> TagHealth {
    let mut h = TagHealth {
        total: corpus.len(),
        ..TagHealth::default()
    };
    for s in &corpus.samples {
        let src = validate_tags(s, vocab);
        let patch = validate_patch_tags(s, vocab);
        h.unbalanced_sources += usize::from(!src.balanced);
        h.unbalanced_patches += usize::from(!patch.balanced);
        for d in [src, patch] {
            h.unopened_closers += d.unopened_closers;
            h.unclosed_openers += d.unclosed_openers;
            h.misordered_pairs += d.misordered_pairs;
        }
    }
    h
}
