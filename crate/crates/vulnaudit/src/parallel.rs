//! Data-parallel fingerprinting. Keys come back in sample order, so every
//! downstream reduction sees the same input whatever the thread count.

use rayon::prelude::*;
use vulnaudit_core::fingerprint::{fingerprint, Digest, NormalizationMode};
use vulnaudit_core::{RepairSample, TagVocabulary};

pub fn digests(
    samples: &[RepairSample],
    mode: NormalizationMode,
    vocab: &TagVocabulary,
) -> Vec<Digest> {
    samples
        .par_iter()
        .with_min_len(1024)
        .map(|s| fingerprint(s, mode, vocab).digest)
        .collect()
}

/// Configures the global pool; `None` keeps rayon's default (all cores).
pub fn init_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        // a pool may already exist when called twice in one process (tests)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}
