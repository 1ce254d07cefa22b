//! Report bundles and their JSON, Markdown and CSV renderings.
//!
//! A bundle is metadata plus an ordered list of typed sections. JSON is the
//! lossless form (`parse_json(render(b, Json)) == b`); Markdown is for people;
//! CSV is a long table `section,index,row,column,value` that spreadsheets and
//! plotting scripts can pivot.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use vulnaudit_core::{
    AuditTrail, CrossSetReport, DedupReport, Direction, EvalResult, LedgerSummary, MatchPolicy,
    MeanResult, NormalizationMode, OverlapReport, SweepRow, Top10Cell, Top10Table,
};

use crate::config::Config;
use crate::error::{Error, Result};

pub const SCHEMA: &str = "vulnaudit-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Json,
    Markdown,
    Csv,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Json => "json",
            ReportFormat::Markdown => "md",
            ReportFormat::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
    pub rows: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped_rows: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool_version: String,
    pub inputs: Vec<InputDigest>,
    /// Only set from `SOURCE_DATE_EPOCH`, so reruns stay byte-identical.
    pub generated_at: Option<u64>,
    pub config: Option<Config>,
}

impl Metadata {
    pub fn new(config: Option<Config>) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: Vec::new(),
            generated_at: std::env::var("SOURCE_DATE_EPOCH")
                .ok()
                .and_then(|s| s.trim().parse().ok()),
            config,
        }
    }
}

/// Both corpora of a pair: in-set dedup of each plus their cross-set overlap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairAudit {
    pub mode: NormalizationMode,
    pub first: DedupReport,
    pub second: DedupReport,
    pub cross_set: CrossSetReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub corpus: String,
    pub counts: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSection {
    pub model: String,
    pub seed: i64,
    pub policy: MatchPolicy,
    /// Per-sample flags are dropped unless the caller keeps them.
    pub result: EvalResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanSection {
    pub model: String,
    pub k: usize,
    pub mean: MeanResult,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagHealth {
    pub total: usize,
    pub unbalanced_sources: usize,
    pub unbalanced_patches: usize,
    pub unopened_closers: usize,
    pub unclosed_openers: usize,
    pub misordered_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagHealthSection {
    pub corpus: String,
    pub health: TagHealth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum Section {
    PairAudit(PairAudit),
    Dedup(DedupReport),
    Trail(AuditTrail),
    Overlap(OverlapReport),
    Census(Census),
    Eval(EvalSection),
    Mean(MeanSection),
    Sweep(Vec<SweepRow>),
    Top10(Top10Table),
    Ledger(LedgerSummary),
    TagHealth(TagHealthSection),
}

pub const SECTION_KINDS: [&str; 11] = [
    "pair_audit",
    "dedup",
    "trail",
    "overlap",
    "census",
    "eval",
    "mean",
    "sweep",
    "top10",
    "ledger",
    "tag_health",
];

impl Section {
    pub fn kind(&self) -> &'static str {
        match self {
            Section::PairAudit(_) => "pair_audit",
            Section::Dedup(_) => "dedup",
            Section::Trail(_) => "trail",
            Section::Overlap(_) => "overlap",
            Section::Census(_) => "census",
            Section::Eval(_) => "eval",
            Section::Mean(_) => "mean",
            Section::Sweep(_) => "sweep",
            Section::Top10(_) => "top10",
            Section::Ledger(_) => "ledger",
            Section::TagHealth(_) => "tag_health",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub schema: String,
    pub metadata: Metadata,
    pub sections: Vec<Section>,
}

impl ReportBundle {
    pub fn new(metadata: Metadata) -> Self {
        Self {
            schema: SCHEMA.to_string(),
            metadata,
            sections: Vec::new(),
        }
    }

    pub fn push(&mut self, section: Section) -> &mut Self {
        self.sections.push(section);
        self
    }
}

/// Parses a JSON rendering, rejecting other schema versions and section kinds.
pub fn parse_json(text: &str) -> Result<ReportBundle> {
    let format = |e: serde_json::Error| Error::Format {
        path: "<report>".into(),
        reason: e.to_string(),
    };
    let value: serde_json::Value = serde_json::from_str(text).map_err(format)?;
    match value.get("schema").and_then(|s| s.as_str()) {
        Some(SCHEMA) => {}
        Some(other) => return Err(Error::Schema(other.to_string())),
        None => return Err(Error::Schema(String::new())),
    }
    if let Some(sections) = value.get("sections").and_then(|s| s.as_array()) {
        for s in sections {
            let kind = s.get("kind").and_then(|k| k.as_str()).unwrap_or_default();
            if !SECTION_KINDS.contains(&kind) {
                return Err(Error::UnknownSection(kind.to_string()));
            }
        }
    }
    serde_json::from_value(value).map_err(format)
}

pub fn render(bundle: &ReportBundle, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(bundle).expect("report is serializable");
            s.push('\n');
            s
        }
        ReportFormat::Markdown => markdown(bundle),
        ReportFormat::Csv => csv_long(bundle),
    }
}

/// `1593` -> `1,593`.
pub fn thousands(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

/// Fraction to a two-decimal percentage, `0.4042` -> `40.42%`.
pub fn pp_percent(pp: f64) -> String {
    format!("{:.2}%", pp * 100.0)
}

fn mode_title(mode: NormalizationMode) -> &'static str {
    match mode {
        NormalizationMode::Raw => "Uniqueness",
        NormalizationMode::CweStripped => "Consistency",
        NormalizationMode::BugTagStripped => "Bug-tag-insensitive uniqueness",
    }
}

fn direction_str(d: Direction) -> &'static str {
    match d {
        Direction::FromFirst => "from first",
        Direction::FromSecond => "from second",
        Direction::None => "none",
    }
}

fn mode_str(mode: Option<NormalizationMode>) -> &'static str {
    mode.map_or("none", NormalizationMode::as_str)
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    fn row<S: Into<String>>(&mut self, cells: impl IntoIterator<Item = S>) {
        self.rows.push(cells.into_iter().map(Into::into).collect());
    }

    fn write(&self, out: &mut String) {
        let line = |out: &mut String, cells: &[String]| {
            out.push('|');
            for c in cells {
                let _ = write!(out, " {} |", c.replace('|', "\\|"));
            }
            out.push('\n');
        };
        line(out, &self.header);
        out.push('|');
        for _ in &self.header {
            out.push_str(" --- |");
        }
        out.push('\n');
        for r in &self.rows {
            line(out, r);
        }
        out.push('\n');
    }
}

fn cell_total(c: &Option<Top10Cell>) -> String {
    c.as_ref().map_or("-".into(), |c| thousands(c.total))
}

fn cell_percent(c: &Option<Top10Cell>) -> String {
    c.as_ref()
        .and_then(|c| c.percent)
        .map_or("-".into(), |p| format!("{p:.1}%"))
}

fn markdown(bundle: &ReportBundle) -> String {
    let mut out = String::new();
    let m = &bundle.metadata;
    let _ = writeln!(out, "# vulnaudit report\n");
    let _ = writeln!(out, "- schema: `{}`", bundle.schema);
    let _ = writeln!(out, "- tool version: {}", m.tool_version);
    if let Some(t) = m.generated_at {
        let _ = writeln!(out, "- generated at: {t} (unix seconds)");
    }
    out.push('\n');
    if !m.inputs.is_empty() {
        let mut t = Table::new(["Input", "Rows", "SHA-256"]);
        for i in &m.inputs {
            t.row([i.path.clone(), thousands(i.rows), format!("`{}`", i.sha256)]);
        }
        t.write(&mut out);
        for i in m.inputs.iter().filter(|i| !i.skipped_rows.is_empty()) {
            let _ = writeln!(
                out,
                "Skipped malformed rows in {}: {:?}\n",
                i.path, i.skipped_rows
            );
        }
    }
    for section in &bundle.sections {
        markdown_section(&mut out, section);
    }
    out
}

fn markdown_section(out: &mut String, section: &Section) {
    match section {
        Section::PairAudit(a) => {
            let _ = writeln!(out, "## {} ({})\n", mode_title(a.mode), a.mode.as_str());
            let mut t = Table::new([
                "",
                a.first.corpus_name.as_str(),
                a.second.corpus_name.as_str(),
            ]);
            let cs = thousands(a.cross_set.shared_keys);
            t.row([
                "Total Samples (TS)".into(),
                thousands(a.first.total),
                thousands(a.second.total),
            ]);
            t.row([
                "In-Set Duplicates (IS Dup)".into(),
                thousands(a.first.in_set_duplicates),
                thousands(a.second.in_set_duplicates),
            ]);
            t.row([
                "Samples Left (SL = TS - IS Dup)".into(),
                thousands(a.first.remaining),
                thousands(a.second.remaining),
            ]);
            t.row(["Cross-Set Duplicates (CS Dup)".into(), cs.clone(), cs]);
            t.write(out);
            let removed = a.cross_set.removed_ordinals.len();
            match a.cross_set.removal_direction {
                Direction::FromFirst => {
                    let _ = writeln!(
                        out,
                        "Removed {} shared samples from {}.\n",
                        thousands(removed),
                        a.first.corpus_name
                    );
                }
                Direction::FromSecond => {
                    let _ = writeln!(
                        out,
                        "Removed {} shared samples from {}.\n",
                        thousands(removed),
                        a.second.corpus_name
                    );
                }
                Direction::None => {}
            }
        }
        Section::Dedup(d) => {
            let _ = writeln!(
                out,
                "## In-set duplicates: {} ({})\n",
                d.corpus_name,
                d.mode.as_str()
            );
            let mut t = Table::new(["", "Count"]);
            t.row(["Total Samples (TS)".into(), thousands(d.total)]);
            t.row([
                "In-Set Duplicates (IS Dup)".into(),
                thousands(d.in_set_duplicates),
            ]);
            t.row([
                "Samples Left (SL = TS - IS Dup)".into(),
                thousands(d.remaining),
            ]);
            t.row(["Duplicate groups".into(), thousands(d.groups.len())]);
            t.write(out);
        }
        Section::Trail(tr) => {
            let _ = writeln!(out, "## Protocol {}\n", tr.protocol.as_str());
            let _ = writeln!(
                out,
                "mode: {}, cross-set removal: {}\n",
                mode_str(tr.mode),
                direction_str(tr.direction)
            );
            let mut t = Table::new(["Stage", tr.inputs[0].0.as_str(), tr.inputs[1].0.as_str()]);
            t.row([
                "Input".into(),
                thousands(tr.inputs[0].1),
                thousands(tr.inputs[1].1),
            ]);
            let dups = |name: &str| {
                tr.in_set
                    .iter()
                    .find(|d| d.corpus_name == name)
                    .map_or("-".into(), |d| thousands(d.in_set_duplicates))
            };
            t.row([
                "In-set duplicates removed".into(),
                dups(&tr.inputs[0].0),
                dups(&tr.inputs[1].0),
            ]);
            if let Some(cs) = &tr.cross_set {
                let removed = thousands(cs.removed_ordinals.len());
                let (a, b) = match cs.removal_direction {
                    Direction::FromFirst => (removed, "0".into()),
                    Direction::FromSecond => ("0".into(), removed),
                    Direction::None => ("0".into(), "0".into()),
                };
                t.row(["Cross-set duplicates removed".into(), a, b]);
            }
            t.row([
                "Final size".into(),
                thousands(tr.final_sizes[0]),
                thousands(tr.final_sizes[1]),
            ]);
            t.write(out);
        }
        Section::Overlap(o) => {
            let _ = writeln!(
                out,
                "## Overlap: {} against {} ({})\n",
                o.probe_corpus,
                o.reference_corpus,
                o.mode.as_str()
            );
            let mut t = Table::new(["Probe", "Matched", "Probe total"]);
            t.row([
                o.probe_corpus.clone(),
                thousands(o.matched),
                thousands(o.probe_total),
            ]);
            t.write(out);
        }
        Section::Census(c) => {
            let _ = writeln!(out, "## Label census: {}\n", c.corpus);
            let mut t = Table::new(["CWE", "Samples"]);
            for (cwe, n) in &c.counts {
                t.row([cwe.clone(), thousands(*n)]);
            }
            t.write(out);
        }
        Section::Eval(e) => {
            let r = &e.result;
            let _ = writeln!(
                out,
                "## Perfect predictions: {} seed {} (k = {})\n",
                e.model, e.seed, r.k_used
            );
            let mut t = Table::new(["Correct", "Total", "%PP"]);
            t.row([thousands(r.correct), thousands(r.total), pp_percent(r.pp)]);
            t.write(out);
            if r.per_cwe.len() > 1 {
                let mut t = Table::new(["CWE", "Correct", "Total", "%PP"]);
                for (cwe, tally) in &r.per_cwe {
                    let pct = if tally.total == 0 {
                        0.0
                    } else {
                        100.0 * tally.correct as f64 / tally.total as f64
                    };
                    t.row([
                        cwe.clone(),
                        thousands(tally.correct),
                        thousands(tally.total),
                        format!("{pct:.1}%"),
                    ]);
                }
                t.write(out);
            }
        }
        Section::Mean(m) => {
            let _ = writeln!(out, "## Mean over seeds: {} (k = {})\n", m.model, m.k);
            let mut t = Table::new(["Seed", "%PP"]);
            for (seed, pp) in &m.mean.per_seed {
                t.row([seed.to_string(), pp_percent(*pp)]);
            }
            t.row(["Mean".into(), pp_percent(m.mean.mean_pp)]);
            t.write(out);
        }
        Section::Sweep(rows) => {
            let _ = writeln!(out, "## Beam sweep\n");
            let mut t = Table::new(["Model", "Seed", "k", "%PP"]);
            for r in rows {
                t.row([
                    r.model.clone(),
                    r.seed.to_string(),
                    r.k.to_string(),
                    pp_percent(r.pp),
                ]);
            }
            t.write(out);
        }
        Section::Top10(tab) => {
            let _ = writeln!(out, "## Top-10 CWE breakdown\n");
            let mut header = vec!["Rank".to_string(), "CWE".to_string()];
            for p in &tab.protocols {
                header.push(format!("{p} Total Samples"));
                header.push(format!("{p} %PP"));
            }
            let mut t = Table::new(header);
            for row in &tab.rows {
                let mut cells = vec![row.rank.to_string(), row.cwe.clone()];
                for c in &row.cells {
                    cells.push(cell_total(c));
                    cells.push(cell_percent(c));
                }
                t.row(cells);
            }
            let mut cells = vec![String::new(), "Top-10 total".to_string()];
            for c in &tab.aggregate {
                let c = Some(c.clone());
                cells.push(cell_total(&c));
                cells.push(cell_percent(&c));
            }
            t.row(cells);
            t.write(out);
        }
        Section::Ledger(l) => {
            let _ = writeln!(out, "## Review ledger\n");
            let mut t = Table::new([
                "CWE",
                "Reviewed",
                "Accurate",
                "Complete",
                "Accurate and complete",
                "Unverifiable",
            ]);
            let mut push = |name: &str, s: &vulnaudit_core::CweSummary| {
                t.row([
                    name.to_string(),
                    s.total.to_string(),
                    s.accurate.to_string(),
                    s.complete.to_string(),
                    s.accurate_and_complete.to_string(),
                    s.unverifiable.to_string(),
                ])
            };
            for (cwe, s) in &l.per_cwe {
                push(cwe, s);
            }
            push("Total", &l.totals);
            t.write(out);
        }
        Section::TagHealth(h) => {
            let _ = writeln!(out, "## Tag health: {}\n", h.corpus);
            let s = &h.health;
            let mut t = Table::new(["", "Count"]);
            t.row(["Samples".into(), thousands(s.total)]);
            t.row(["Unbalanced sources".into(), thousands(s.unbalanced_sources)]);
            t.row(["Unbalanced patches".into(), thousands(s.unbalanced_patches)]);
            t.row([
                "Closers without opener".into(),
                thousands(s.unopened_closers),
            ]);
            t.row(["Unclosed openers".into(), thousands(s.unclosed_openers)]);
            t.row(["Nested openers".into(), thousands(s.misordered_pairs)]);
            t.write(out);
        }
    }
}

fn csv_long(bundle: &ReportBundle) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut put = |section: &str, index: usize, row: &str, column: &str, value: String| {
        w.write_record([section, &index.to_string(), row, column, &value])
            .expect("writing to memory");
    };
    put("section", 0, "row", "column", "value".into());
    let m = &bundle.metadata;
    put("metadata", 0, "schema", "", bundle.schema.clone());
    put("metadata", 0, "tool_version", "", m.tool_version.clone());
    if let Some(t) = m.generated_at {
        put("metadata", 0, "generated_at", "", t.to_string());
    }
    for i in &m.inputs {
        put("input", 0, &i.path, "sha256", i.sha256.clone());
        put("input", 0, &i.path, "rows", i.rows.to_string());
    }
    for (idx, section) in bundle.sections.iter().enumerate() {
        let idx = idx + 1;
        let kind = section.kind();
        match section {
            Section::PairAudit(a) => {
                for d in [&a.first, &a.second] {
                    let c = d.corpus_name.as_str();
                    put(kind, idx, "TS", c, d.total.to_string());
                    put(kind, idx, "IS Dup", c, d.in_set_duplicates.to_string());
                    put(kind, idx, "SL", c, d.remaining.to_string());
                    put(kind, idx, "CS Dup", c, a.cross_set.shared_keys.to_string());
                }
            }
            Section::Dedup(d) => {
                let c = d.corpus_name.as_str();
                put(kind, idx, "TS", c, d.total.to_string());
                put(kind, idx, "IS Dup", c, d.in_set_duplicates.to_string());
                put(kind, idx, "SL", c, d.remaining.to_string());
            }
            Section::Trail(tr) => {
                for (j, (name, n)) in tr.inputs.iter().enumerate() {
                    put(kind, idx, "input", name, n.to_string());
                    put(kind, idx, "final", name, tr.final_sizes[j].to_string());
                }
                if let Some(cs) = &tr.cross_set {
                    put(
                        kind,
                        idx,
                        "cross_set_removed",
                        "",
                        cs.removed_ordinals.len().to_string(),
                    );
                }
            }
            Section::Overlap(o) => {
                put(kind, idx, &o.probe_corpus, "matched", o.matched.to_string());
                put(
                    kind,
                    idx,
                    &o.probe_corpus,
                    "total",
                    o.probe_total.to_string(),
                );
            }
            Section::Census(c) => {
                for (cwe, n) in &c.counts {
                    put(kind, idx, cwe, &c.corpus, n.to_string());
                }
            }
            Section::Eval(e) => {
                let row = format!("{}#{}", e.model, e.seed);
                put(kind, idx, &row, "k", e.result.k_used.to_string());
                put(kind, idx, &row, "correct", e.result.correct.to_string());
                put(kind, idx, &row, "total", e.result.total.to_string());
                put(kind, idx, &row, "pp", e.result.pp.to_string());
            }
            Section::Mean(mr) => {
                for (seed, pp) in &mr.mean.per_seed {
                    put(kind, idx, &seed.to_string(), &mr.model, pp.to_string());
                }
                put(kind, idx, "mean", &mr.model, mr.mean.mean_pp.to_string());
            }
            Section::Sweep(rows) => {
                for r in rows {
                    let row = format!("{}#{}", r.model, r.seed);
                    put(kind, idx, &row, &r.k.to_string(), r.pp.to_string());
                }
            }
            Section::Top10(tab) => {
                for row in &tab.rows {
                    for (p, c) in tab.protocols.iter().zip(&row.cells) {
                        if let Some(c) = c {
                            put(
                                kind,
                                idx,
                                &row.cwe,
                                &format!("{p} total"),
                                c.total.to_string(),
                            );
                            if let Some(pct) = c.percent {
                                put(
                                    kind,
                                    idx,
                                    &row.cwe,
                                    &format!("{p} percent"),
                                    pct.to_string(),
                                );
                            }
                        }
                    }
                }
            }
            Section::Ledger(l) => {
                let rows = l.per_cwe.iter().map(|(k, v)| (k.as_str(), v));
                for (cwe, s) in rows.chain([("Total", &l.totals)]) {
                    put(kind, idx, cwe, "total", s.total.to_string());
                    put(kind, idx, cwe, "accurate", s.accurate.to_string());
                    put(kind, idx, cwe, "complete", s.complete.to_string());
                    put(kind, idx, cwe, "both", s.accurate_and_complete.to_string());
                    put(kind, idx, cwe, "unverifiable", s.unverifiable.to_string());
                }
            }
            Section::TagHealth(h) => {
                let s = &h.health;
                for (row, v) in [
                    ("total", s.total),
                    ("unbalanced_sources", s.unbalanced_sources),
                    ("unbalanced_patches", s.unbalanced_patches),
                    ("unopened_closers", s.unopened_closers),
                    ("unclosed_openers", s.unclosed_openers),
                    ("misordered_pairs", s.misordered_pairs),
                ] {
                    put(kind, idx, row, &h.corpus, v.to_string());
                }
            }
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv of UTF-8 fields")
}
