//! Prediction files: one JSON object per test sample,
//! `{"ordinal": n, "candidates": ["best", "second", ...]}`.
//!
//! Lines may also carry `model` and `seed`; otherwise the model is the file
//! stem without its seed suffix and the seed the trailing digits of the stem
//! (`codebert_seed43511` is model `codebert`, seed 43511).

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use vulnaudit_core::PredictionSet;

use crate::error::{Error, Result};
use crate::io::corpus_name;

#[derive(Debug, Serialize, Deserialize)]
struct PredictionLine {
    ordinal: usize,
    candidates: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<i64>,
}

fn seed_from_stem(stem: &str) -> Option<i64> {
    let digits: String = stem
        .chars()
        .rev()
        .take_while(char::is_ascii_digit)
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
        .collect();
    digits.parse().ok()
}

/// `codebert_seed43511` -> `codebert`; a stem without a seed is kept whole.
fn model_from_stem(stem: &str) -> String {
    let base = stem.trim_end_matches(|c: char| c.is_ascii_digit());
    if base.len() == stem.len() {
        return stem.to_string();
    }
    let base = base.trim_end_matches(['_', '-']);
    let base = base
        .strip_suffix("seed")
        .map_or(base, |b| b.trim_end_matches(['_', '-']));
    if base.is_empty() {
        stem.to_string()
    } else {
        base.to_string()
    }
}

/// Loads a prediction file. `beam_size` defaults to the longest row.
pub fn load_predictions(path: &Path, beam_size: Option<usize>) -> Result<PredictionSet> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let format_err = |reason: String| Error::Format {
        path: path.to_path_buf(),
        reason,
    };
    let mut rows: Vec<Option<Vec<String>>> = Vec::new();
    let mut model = None;
    let mut seed = None;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let p: PredictionLine =
            serde_json::from_str(&line).map_err(|e| format_err(format!("line {}: {e}", i + 1)))?;
        if p.ordinal >= rows.len() {
            rows.resize(p.ordinal + 1, None);
        }
        if rows[p.ordinal].is_some() {
            return Err(format_err(format!(
                "line {}: ordinal {} repeated",
                i + 1,
                p.ordinal
            )));
        }
        rows[p.ordinal] = Some(p.candidates);
        if p.model.is_some() && model.is_some() && model != p.model {
            return Err(format_err(format!(
                "line {}: conflicting model names",
                i + 1
            )));
        }
        if p.seed.is_some() && seed.is_some() && seed != p.seed {
            return Err(format_err(format!("line {}: conflicting seeds", i + 1)));
        }
        model = model.or(p.model);
        seed = seed.or(p.seed);
    }
    let rows: Vec<Vec<String>> = rows
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.ok_or_else(|| format_err(format!("no prediction for ordinal {i}"))))
        .collect::<Result<_>>()?;
    let stem = corpus_name(path);
    let longest = rows.iter().map(Vec::len).max().unwrap_or(0).max(1);
    Ok(PredictionSet {
        model_name: model.unwrap_or_else(|| model_from_stem(&stem)),
        seed: seed.or_else(|| seed_from_stem(&stem)).unwrap_or(0),
        beam_size: beam_size.unwrap_or(longest),
        rows,
    })
}

/// Writes a prediction set in the same line format.
pub fn write_predictions(path: &Path, preds: &PredictionSet) -> Result<()> {
    let mut out = std::io::BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    for (ordinal, candidates) in preds.rows.iter().enumerate() {
        let line = PredictionLine {
            ordinal,
            candidates: candidates.clone(),
            model: Some(preds.model_name.clone()),
            seed: Some(preds.seed),
        };
        serde_json::to_writer(&mut out, &line).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}
