//! Perfect-prediction (exact match) scoring of beam candidates.
//!
//! A test sample counts as repaired when any of its first `k` candidates
//! equals the reference patch. Scores are aggregated across seeds by plain
//! arithmetic mean and can be sliced per CWE label.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::presets::UNLABELED;
use crate::sample::Corpus;

/// Ranked beam candidates of one model run, one row per test sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionSet {
    /// Model name.
    pub model_name: String,
    /// Training seed of the run.
    pub seed: i64,
    /// Beam size used at inference; rows may hold fewer candidates.
    pub beam_size: usize,
    /// `rows[i]` holds the candidates for test ordinal `i`, best first.
    pub rows: Vec<Vec<String>>,
}

/// How candidate and reference strings are compared.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchPolicy {
    /// Byte equality after trimming trailing whitespace.
    #[default]
    Exact,
    /// Whitespace runs collapsed to one space, both ends trimmed.
    NormalizeWhitespace,
}

impl MatchPolicy {
    /// Whether `candidate` counts as a match for `reference`.
    pub fn matches(self, candidate: &str, reference: &str) -> bool {
        match self {
            MatchPolicy::Exact => candidate.trim_end() == reference.trim_end(),
            MatchPolicy::NormalizeWhitespace => candidate
                .split_whitespace()
                .eq(reference.split_whitespace()),
        }
    }
}

/// Scoring failures.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    /// Prediction rows do not line up with the test corpus.
    #[error("prediction set has {found} rows but the test corpus has {expected} samples")]
    Misaligned {
        /// Test corpus size.
        expected: usize,
        /// Prediction rows.
        found: usize,
    },
    /// `k` exceeds the beam size (or is zero).
    #[error("k = {k} is outside 1..={beam_size}")]
    BadK {
        /// Requested k.
        k: usize,
        /// Declared beam size.
        beam_size: usize,
    },
    /// A row holds more candidates than the declared beam size.
    #[error("row {row} has {found} candidates, more than the beam size {beam_size}")]
    RowTooLong {
        /// Offending row.
        row: usize,
        /// Candidates in the row.
        found: usize,
        /// Declared beam size.
        beam_size: usize,
    },
    /// Results to aggregate were computed over different corpora or k.
    #[error("results were computed over different test corpora or beam prefixes")]
    MixedCorpus,
    /// Nothing to aggregate.
    #[error("no results to aggregate")]
    Empty,
}

/// Correct and total counts for one label.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CweTally {
    /// Correctly repaired samples.
    pub correct: usize,
    /// Samples with the label.
    pub total: usize,
}

/// Outcome of one scoring pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    /// Fraction of samples repaired, in `[0, 1]`.
    pub pp: f64,
    /// Correct samples.
    pub correct: usize,
    /// Scored samples.
    pub total: usize,
    /// Per-sample outcome, by ordinal.
    pub correct_flags: Vec<bool>,
    /// Outcome per CWE label; unlabeled samples under `UNLABELED`.
    pub per_cwe: BTreeMap<String, CweTally>,
    /// Beam prefix length that was scored.
    pub k_used: usize,
}

/// Scores the first `k` candidates of every row against the test patches.
pub fn perfect_prediction(
    preds: &PredictionSet,
    test: &Corpus,
    k: usize,
    policy: MatchPolicy,
) -> Result<EvalResult, EvalError> {
    if preds.rows.len() != test.len() {
        return Err(EvalError::Misaligned {
            expected: test.len(),
            found: preds.rows.len(),
        });
    }
    if k == 0 || k > preds.beam_size {
        return Err(EvalError::BadK {
            k,
            beam_size: preds.beam_size,
        });
    }
    if let Some((row, r)) = preds
        .rows
        .iter()
        .enumerate()
        .find(|(_, r)| r.len() > preds.beam_size)
    {
        return Err(EvalError::RowTooLong {
            row,
            found: r.len(),
            beam_size: preds.beam_size,
        });
    }

    let mut per_cwe: BTreeMap<String, CweTally> = BTreeMap::new();
    let correct_flags: Vec<bool> = preds
        .rows
        .iter()
        .zip(&test.samples)
        .map(|(candidates, sample)| {
            let hit = candidates
                .iter()
                .take(k)
                .any(|c| policy.matches(c, &sample.target_patch));
            let label = sample.cwe_label.as_deref().unwrap_or(UNLABELED);
            let tally = per_cwe.entry(String::from(label)).or_default();
            tally.total += 1;
            tally.correct += usize::from(hit);
            hit
        })
        .collect();

    let correct = correct_flags.iter().filter(|&&f| f).count();
    let total = correct_flags.len();
    Ok(EvalResult {
        pp: if total == 0 {
            0.0
        } else {
            correct as f64 / total as f64
        },
        correct,
        total,
        correct_flags,
        per_cwe,
        k_used: k,
    })
}

/// Per-seed scores and their mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanResult {
    /// `(seed, pp)` in input order.
    pub per_seed: Vec<(i64, f64)>,
    /// Arithmetic mean of the per-seed scores.
    pub mean_pp: f64,
}

impl MeanResult {
    /// Mean of already-computed per-seed scores.
    pub fn from_pps(per_seed: Vec<(i64, f64)>) -> Result<Self, EvalError> {
        if per_seed.is_empty() {
            return Err(EvalError::Empty);
        }
        let sum: f64 = per_seed.iter().map(|(_, pp)| pp).sum();
        let mean_pp = sum / per_seed.len() as f64;
        Ok(Self { per_seed, mean_pp })
    }
}

/// Averages results of several seeds over the same test corpus and `k`.
pub fn aggregate_seeds(results: &[(i64, EvalResult)]) -> Result<MeanResult, EvalError> {
    let (_, first) = results.first().ok_or(EvalError::Empty)?;
    if results
        .iter()
        .any(|(_, r)| r.total != first.total || r.k_used != first.k_used)
    {
        return Err(EvalError::MixedCorpus);
    }
    MeanResult::from_pps(results.iter().map(|(seed, r)| (*seed, r.pp)).collect())
}

/// One point of a beam-size sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Model name.
    pub model: String,
    /// Seed.
    pub seed: i64,
    /// Beam prefix length.
    pub k: usize,
    /// Score at that prefix.
    pub pp: f64,
}

/// Scores the same predictions at every prefix length in `ks`.
pub fn beam_sweep(
    preds: &PredictionSet,
    ks: &[usize],
    test: &Corpus,
    policy: MatchPolicy,
) -> Result<Vec<SweepRow>, EvalError> {
    ks.iter()
        .map(|&k| {
            let r = perfect_prediction(preds, test, k, policy)?;
            Ok(SweepRow {
                model: preds.model_name.clone(),
                seed: preds.seed,
                k,
                pp: r.pp,
            })
        })
        .collect()
}

/// Sample counts and seed results of one protocol column.
#[derive(Debug, Clone, PartialEq)]
pub struct Top10Column {
    /// Column heading, e.g. `RQ2B`.
    pub protocol: String,
    /// Test samples per label, as from `per_cwe_census`.
    pub census: BTreeMap<String, usize>,
    /// One result per seed; may be empty when only counts are wanted.
    pub results: Vec<EvalResult>,
}

/// One cell of the breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Top10Cell {
    /// Samples with the label.
    pub total: usize,
    /// Correct samples averaged over seeds.
    pub mean_correct: Option<f64>,
    /// `mean_correct / total` as a percentage.
    pub percent: Option<f64>,
}

/// One label row; `None` cells mean the label has no samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Top10Row {
    /// 1-based rank in the label list.
    pub rank: usize,
    /// Label.
    pub cwe: String,
    /// One cell per column.
    pub cells: Vec<Option<Top10Cell>>,
}

/// Per-label comparison across protocols, plus an aggregate row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Top10Table {
    /// Column headings.
    pub protocols: Vec<String>,
    /// Rows for labels present in at least one column, in list order.
    pub rows: Vec<Top10Row>,
    /// Column totals over the listed labels.
    pub aggregate: Vec<Top10Cell>,
}

fn cell(total: usize, correct_sum: Option<f64>, seeds: usize) -> Top10Cell {
    let mean_correct = correct_sum.map(|c| c / seeds as f64);
    Top10Cell {
        total,
        mean_correct,
        percent: mean_correct.map(|m| {
            if total == 0 {
                0.0
            } else {
                100.0 * m / total as f64
            }
        }),
    }
}

/// Builds the per-label breakdown for `cwes`, in that order.
pub fn top10_breakdown(columns: &[Top10Column], cwes: &[&str]) -> Top10Table {
    let mut rows = Vec::new();
    let mut agg: Vec<(usize, f64)> = alloc::vec![(0, 0.0); columns.len()];
    for (rank, cwe) in cwes.iter().enumerate() {
        let cells: Vec<Option<Top10Cell>> = columns
            .iter()
            .enumerate()
            .map(|(i, col)| {
                let total = *col.census.get(*cwe)?;
                let correct_sum = (!col.results.is_empty()).then(|| {
                    col.results
                        .iter()
                        .map(|r| r.per_cwe.get(*cwe).map_or(0, |t| t.correct) as f64)
                        .sum::<f64>()
                });
                agg[i].0 += total;
                agg[i].1 += correct_sum.unwrap_or(0.0) / col.results.len().max(1) as f64;
                Some(cell(total, correct_sum, col.results.len()))
            })
            .collect();
        if cells.iter().any(Option::is_some) {
            rows.push(Top10Row {
                rank: rank + 1,
                cwe: String::from(*cwe),
                cells,
            });
        }
    }
    let aggregate = columns
        .iter()
        .zip(agg)
        .map(|(col, (total, mean_correct))| {
            if col.results.is_empty() {
                cell(total, None, 1)
            } else {
                cell(total, Some(mean_correct), 1)
            }
        })
        .collect();
    Top10Table {
        protocols: columns.iter().map(|c| c.protocol.clone()).collect(),
        rows,
        aggregate,
    }
}
