//! Corpus files: header-delimited CSV and JSON lines.
//!
//! Both formats carry a `source` and a `target` column (names configurable);
//! any other column is kept as sample metadata and written back unchanged
//! when a cleaned corpus is saved.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use vulnaudit_core::{parse_sample, serialize_sample, Corpus, RepairSample, Role, TagVocabulary};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Csv,
    Jsonl,
}

impl InputFormat {
    /// `.jsonl`/`.json`/`.ndjson` are JSON lines, everything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl" | "json" | "ndjson") => InputFormat::Jsonl,
            _ => InputFormat::Csv,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            InputFormat::Csv => "csv",
            InputFormat::Jsonl => "jsonl",
        }
    }
}

#[derive(Debug, Clone)]
pub struct LoadOptions {
    /// Forced format; detected from the extension when `None`.
    pub format: Option<InputFormat>,
    pub source_column: String,
    pub target_column: String,
    /// Skip undecodable or short rows instead of failing.
    pub skip_malformed: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            format: None,
            source_column: "source".into(),
            target_column: "target".into(),
            skip_malformed: false,
        }
    }
}

/// A corpus together with what is needed to write it back and cite it.
#[derive(Debug, Clone)]
pub struct LoadedCorpus {
    pub corpus: Corpus,
    pub path: PathBuf,
    pub format: InputFormat,
    /// Column order of the input.
    pub columns: Vec<String>,
    /// Data rows dropped under `skip_malformed`.
    pub skipped_rows: Vec<usize>,
    /// SHA-256 of the file bytes, hex.
    pub sha256: String,
}

struct HashingReader<R> {
    inner: R,
    hasher: Sha256,
}

impl<R: Read> Read for HashingReader<R> {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        let n = self.inner.read(buf)?;
        self.hasher.update(&buf[..n]);
        Ok(n)
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// SHA-256 of a file's contents, hex.
pub fn file_sha256(path: &Path) -> Result<String> {
    let mut reader = HashingReader {
        inner: File::open(path).map_err(|e| Error::io(path, e))?,
        hasher: Sha256::new(),
    };
    std::io::copy(&mut reader, &mut std::io::sink()).map_err(|e| Error::io(path, e))?;
    Ok(hex(&reader.hasher.finalize()))
}

/// Corpus name used in reports: the file stem.
pub fn corpus_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".into())
}

/// Loads one corpus, one sample per data row, in file order.
pub fn load_corpus(
    path: &Path,
    role: Role,
    vocab: &TagVocabulary,
    opts: &LoadOptions,
) -> Result<LoadedCorpus> {
    let format = opts.format.unwrap_or_else(|| InputFormat::from_path(path));
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = HashingReader {
        inner: BufReader::new(file),
        hasher: Sha256::new(),
    };
    let mut rows = RowSink {
        path,
        vocab,
        opts,
        samples: Vec::new(),
        skipped: Vec::new(),
    };
    let columns = match format {
        InputFormat::Csv => read_csv(&mut reader, &mut rows)?,
        InputFormat::Jsonl => read_jsonl(&mut reader, &mut rows)?,
    };
    // drain whatever the parser did not consume so the digest covers the file
    std::io::copy(&mut reader, &mut std::io::sink()).map_err(|e| Error::io(path, e))?;
    let RowSink {
        samples, skipped, ..
    } = rows;
    Ok(LoadedCorpus {
        corpus: Corpus::new(corpus_name(path), role, samples),
        path: path.to_path_buf(),
        format,
        columns,
        skipped_rows: skipped,
        sha256: hex(&reader.hasher.finalize()),
    })
}

struct RowSink<'a> {
    path: &'a Path,
    vocab: &'a TagVocabulary,
    opts: &'a LoadOptions,
    samples: Vec<RepairSample>,
    skipped: Vec<usize>,
}

impl RowSink<'_> {
    fn malformed(&mut self, row: usize, line: u64, reason: String) -> Result<()> {
        if self.opts.skip_malformed {
            self.skipped.push(row);
            Ok(())
        } else {
            Err(Error::MalformedRow {
                path: self.path.to_path_buf(),
                row,
                line,
                reason,
            })
        }
    }

    fn push(
        &mut self,
        row: usize,
        line: u64,
        source: &str,
        target: &str,
        meta: Vec<(String, String)>,
    ) -> Result<()> {
        match parse_sample(source, target, self.vocab, row) {
            Ok(mut s) => {
                s.meta.extend(meta);
                self.samples.push(s);
                Ok(())
            }
            Err(e) => self.malformed(row, line, e.to_string()),
        }
    }
}

fn read_csv<R: Read>(reader: R, sink: &mut RowSink<'_>) -> Result<Vec<String>> {
    let path = sink.path;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.byte_headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.is_empty() {
        return Ok(Vec::new());
    }
    let columns: Vec<String> = headers
        .iter()
        .map(|h| String::from_utf8_lossy(h).into_owned())
        .collect();
    let find = |name: &str| {
        columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::ColumnMissing {
                path: path.to_path_buf(),
                column: name.to_string(),
            })
    };
    let src_idx = find(&sink.opts.source_column)?;
    let tgt_idx = find(&sink.opts.target_column)?;

    let mut record = csv::ByteRecord::new();
    let mut row = 0usize;
    loop {
        match rdr.read_byte_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => return Err(csv_error(path, e)),
        }
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != columns.len() {
            let reason = format!("expected {} fields, found {}", columns.len(), record.len());
            sink.malformed(row, line, reason)?;
            row += 1;
            continue;
        }
        let fields: std::result::Result<Vec<&str>, _> =
            record.iter().map(std::str::from_utf8).collect();
        match fields {
            Ok(fields) => {
                let meta = columns
                    .iter()
                    .zip(&fields)
                    .enumerate()
                    .filter(|(i, _)| *i != src_idx && *i != tgt_idx)
                    .map(|(_, (c, v))| (c.clone(), (*v).to_string()))
                    .collect();
                sink.push(row, line, fields[src_idx], fields[tgt_idx], meta)?;
            }
            Err(e) => sink.malformed(row, line, format!("invalid UTF-8: {e}"))?,
        }
        row += 1;
    }
    Ok(columns)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Format {
            path: path.to_path_buf(),
            reason: format!("line {line}: {other:?}"),
        },
    }
}

fn read_jsonl<R: Read>(reader: R, sink: &mut RowSink<'_>) -> Result<Vec<String>> {
    let path = sink.path;
    let mut reader = BufReader::new(reader);
    let mut buf = Vec::new();
    let mut line_no = 0u64;
    let mut row = 0usize;
    let mut extra_columns = BTreeSet::new();
    loop {
        buf.clear();
        let n = reader
            .read_until(b'\n', &mut buf)
            .map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        line_no += 1;
        if buf.iter().all(u8::is_ascii_whitespace) {
            continue;
        }
        match parse_json_row(&buf, &sink.opts.source_column, &sink.opts.target_column) {
            Ok((source, target, meta)) => {
                extra_columns.extend(meta.iter().map(|(k, _)| k.clone()));
                sink.push(row, line_no, &source, &target, meta)?;
            }
            Err(reason) => sink.malformed(row, line_no, reason)?,
        }
        row += 1;
    }
    let mut columns = vec![
        sink.opts.source_column.clone(),
        sink.opts.target_column.clone(),
    ];
    columns.extend(extra_columns);
    Ok(columns)
}

type JsonRow = (String, String, Vec<(String, String)>);

fn parse_json_row(bytes: &[u8], source_col: &str, target_col: &str) -> Result<JsonRow, String> {
    let text = std::str::from_utf8(bytes).map_err(|e| format!("invalid UTF-8: {e}"))?;
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let serde_json::Value::Object(map) = value else {
        return Err("expected a JSON object".into());
    };
    let field = |name: &str| match map.get(name) {
        Some(serde_json::Value::String(s)) => Ok(s.clone()),
        Some(_) => Err(format!("field `{name}` is not a string")),
        None => Err(format!("field `{name}` is missing")),
    };
    let source = field(source_col)?;
    let target = field(target_col)?;
    let meta = map
        .iter()
        .filter(|(k, _)| k.as_str() != source_col && k.as_str() != target_col)
        .filter_map(|(k, v)| match v {
            serde_json::Value::Null => None,
            serde_json::Value::String(s) => Some((k.clone(), s.clone())),
            other => Some((k.clone(), other.to_string())),
        })
        .collect();
    Ok((source, target, meta))
}

/// Writes `corpus` in `format`, with `columns` as the CSV header order.
pub fn write_corpus(
    path: &Path,
    corpus: &Corpus,
    columns: &[String],
    format: InputFormat,
    opts: &LoadOptions,
    vocab: &TagVocabulary,
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let mut columns = columns.to_vec();
    if columns.is_empty() {
        columns = vec![opts.source_column.clone(), opts.target_column.clone()];
    }
    match format {
        InputFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            let io_err = |e: csv::Error| Error::Format {
                path: path.to_path_buf(),
                reason: e.to_string(),
            };
            w.write_record(&columns).map_err(io_err)?;
            for s in &corpus.samples {
                let (src, tgt) = serialize_sample(s, vocab);
                let record = columns.iter().map(|c| {
                    if *c == opts.source_column {
                        src.as_str()
                    } else if *c == opts.target_column {
                        tgt.as_str()
                    } else {
                        s.meta.get(c).map_or("", String::as_str)
                    }
                });
                w.write_record(record).map_err(io_err)?;
            }
            w.flush().map_err(|e| Error::io(path, e))?;
        }
        InputFormat::Jsonl => {
            for s in &corpus.samples {
                let (src, tgt) = serialize_sample(s, vocab);
                let mut obj = serde_json::Map::new();
                obj.insert(opts.source_column.clone(), src.into());
                obj.insert(opts.target_column.clone(), tgt.into());
                for (k, v) in &s.meta {
                    obj.insert(k.clone(), v.clone().into());
                }
                serde_json::to_writer(&mut out, &obj).map_err(|e| Error::Format {
                    path: path.to_path_buf(),
                    reason: e.to_string(),
                })?;
                out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
            }
        }
    }
    out.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn load(path: &Path, opts: &LoadOptions) -> Result<LoadedCorpus> {
        load_corpus(path, Role::Train, &TagVocabulary::default(), opts)
    }

    #[test]
    fn csv_with_quotes_and_meta() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("train.csv");
        fs::write(
            &p,
            "idx,source,target,cve_id\n0,\"CWE-20 a , b\",\"x\ny\",CVE-1\n1,CWE-787 c,z,\n",
        )
        .unwrap();
        let c = load(&p, &LoadOptions::default()).unwrap();
        assert_eq!(c.corpus.len(), 2);
        assert_eq!(c.corpus.name, "train");
        let s = &c.corpus.samples[0];
        assert_eq!(s.cwe_label.as_deref(), Some("CWE-20"));
        assert_eq!(s.source_body, "a , b");
        assert_eq!(s.target_patch, "x\ny");
        assert_eq!(s.cve_id(), Some("CVE-1"));
        assert_eq!(c.corpus.samples[1].cve_id(), None);
        assert_eq!(c.columns, ["idx", "source", "target", "cve_id"]);
        assert_eq!(c.sha256, file_sha256(&p).unwrap());
    }

    #[test]
    fn empty_file_is_empty_corpus() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["e.csv", "e.jsonl"] {
            let p = dir.path().join(name);
            fs::write(&p, "").unwrap();
            assert!(load(&p, &LoadOptions::default()).unwrap().corpus.is_empty());
        }
        let p = dir.path().join("h.csv");
        fs::write(&p, "source,target\n").unwrap();
        assert!(load(&p, &LoadOptions::default()).unwrap().corpus.is_empty());
    }

    #[test]
    fn missing_column() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        fs::write(&p, "source,patch\na,b\n").unwrap();
        let err = load(&p, &LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::ColumnMissing { column, .. } if column == "target"));
    }

    #[test]
    fn malformed_rows_abort_or_skip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        let mut bytes = b"source,target\na,b\nc\n".to_vec();
        bytes.extend_from_slice(b"\xff\xfe,d\n,e\nf,g\n");
        fs::write(&p, bytes).unwrap();
        let err = load(&p, &LoadOptions::default()).unwrap_err();
        assert!(
            matches!(
                err,
                Error::MalformedRow {
                    row: 1,
                    line: 3,
                    ..
                }
            ),
            "{err}"
        );
        let opts = LoadOptions {
            skip_malformed: true,
            ..LoadOptions::default()
        };
        let c = load(&p, &opts).unwrap();
        assert_eq!(c.skipped_rows, [1, 2, 3]);
        assert_eq!(c.corpus.len(), 2);
        assert_eq!(c.corpus.samples[1].origin_row, 4);
    }

    #[test]
    fn jsonl_rows() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.jsonl");
        fs::write(
            &p,
            "{\"source\":\"CWE-79 a\",\"target\":\"b\",\"cve_id\":\"CVE-9\",\"commit_url\":null}\n\n{\"source\":\"c\",\"target\":\"d\"}\n",
        )
        .unwrap();
        let c = load(&p, &LoadOptions::default()).unwrap();
        assert_eq!(c.format, InputFormat::Jsonl);
        assert_eq!(c.corpus.len(), 2);
        assert_eq!(c.corpus.samples[0].cve_id(), Some("CVE-9"));
        assert_eq!(c.corpus.samples[0].commit_url(), None);

        fs::write(&p, "{\"source\":\"a\"}\n").unwrap();
        assert!(matches!(
            load(&p, &LoadOptions::default()),
            Err(Error::MalformedRow {
                row: 0,
                line: 1,
                ..
            })
        ));
    }

    #[test]
    fn write_then_load_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("in.csv");
        fs::write(
            &p,
            "source,target,cve_id\n\"CWE-20 a \"\"q\"\"\",x,CVE-1\nb,y,\n",
        )
        .unwrap();
        let opts = LoadOptions::default();
        let v = TagVocabulary::default();
        let c = load(&p, &opts).unwrap();
        for format in [InputFormat::Csv, InputFormat::Jsonl] {
            let out = dir.path().join(format!("out.{}", format.extension()));
            write_corpus(&out, &c.corpus, &c.columns, format, &opts, &v).unwrap();
            let back = load(&out, &opts).unwrap();
            assert_eq!(back.corpus.samples, c.corpus.samples);
        }
        let out = dir.path().join("out.csv");
        assert_eq!(fs::read(&out).unwrap(), fs::read(&p).unwrap());
    }
}
