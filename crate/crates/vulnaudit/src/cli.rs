//! Command-line interface. Every subcommand reads local files only and
//! writes its outputs (reports as JSON, Markdown and CSV, plus any cleaned
//! corpora) below `--out`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use vulnaudit_core::{
    aggregate_seeds, beam_sweep, init_ledger, per_cwe_census, perfect_prediction, summarize_ledger,
    top10_breakdown, Corpus, Direction, EvalResult, MatchPolicy, NormalizationMode, PredictionSet,
    ProtocolId, Role, SweepRow, TagVocabulary, Top10Column,
};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::io::{file_sha256, load_corpus, write_corpus, InputFormat, LoadOptions, LoadedCorpus};
use crate::ledger_csv::{read_ledger, write_ledger};
use crate::parallel;
use crate::pipeline::{audit_pair, overlap, run_protocol, tag_health};
use crate::predictions::load_predictions;
use crate::report::{
    render, Census, EvalSection, InputDigest, MeanSection, Metadata, ReportBundle, ReportFormat,
    Section, TagHealthSection,
};

#[derive(Debug, Parser)]
#[command(
    name = "vulnaudit",
    version,
    about = "Quality audits for tagged vulnerability-repair corpora"
)]
pub struct Cli {
    /// TOML config file (falls back to $VULNAUDIT_CONFIG).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory [default: from config, else vulnaudit-out].
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads [default: all cores]. Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Corpus file format [default: from the file extension].
    #[arg(long, global = true, value_enum)]
    pub format: Option<InputFormat>,
    /// Skip malformed rows instead of aborting; skipped rows are reported.
    #[arg(long, global = true)]
    pub skip_malformed: bool,
    /// Compare predictions by whitespace-separated tokens.
    #[arg(long, global = true)]
    pub normalize_ws: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    FromTrain,
    FromTest,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::FromTrain => Direction::FromFirst,
            DirectionArg::FromTest => Direction::FromSecond,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// In-set and cross-set duplicate census of a train/test pair.
    Audit {
        /// raw, cwe-stripped or bugtag-stripped [default: from config].
        #[arg(long)]
        mode: Option<NormalizationMode>,
        train: PathBuf,
        test: PathBuf,
    },
    /// Builds a named protocol split (RQ1, RQ2A, RQ2B, RQ3A, RQ3B, BugFixClean).
    Split {
        #[arg(long)]
        protocol: ProtocolId,
        train: PathBuf,
        test: PathBuf,
    },
    /// Dedups both corpora and removes shared samples from one side.
    Clean {
        #[arg(long)]
        mode: Option<NormalizationMode>,
        #[arg(long, value_enum)]
        direction: DirectionArg,
        train: PathBuf,
        test: PathBuf,
    },
    /// Perfect-prediction scores of prediction files (globs allowed).
    Eval {
        #[arg(long)]
        test: PathBuf,
        /// Beam prefix to score [default: the beam size].
        #[arg(long)]
        k: Option<usize>,
        /// Declared beam size [default: the longest candidate list].
        #[arg(long)]
        beam_size: Option<usize>,
        /// Keep the per-CWE breakdown.
        #[arg(long)]
        per_cwe: bool,
        #[arg(required = true)]
        preds: Vec<String>,
    },
    /// Scores prediction files at several beam prefixes; writes sweep.csv.
    Sweep {
        #[arg(long)]
        test: PathBuf,
        /// Comma-separated prefix lengths, e.g. 1,5,10,50.
        #[arg(long, value_delimiter = ',', required = true)]
        ks: Vec<usize>,
        #[arg(long)]
        beam_size: Option<usize>,
        #[arg(required = true)]
        preds: Vec<String>,
    },
    /// Counts probe samples already present in a reference corpus.
    Overlap {
        #[arg(long)]
        mode: Option<NormalizationMode>,
        #[arg(long)]
        reference: PathBuf,
        #[arg(required = true)]
        probes: Vec<PathBuf>,
    },
    /// Samples per CWE label, restricted to the top-10 list unless --all.
    Census {
        #[arg(long)]
        all: bool,
        #[arg(required = true)]
        corpora: Vec<PathBuf>,
    },
    /// Per-CWE totals and scores across protocol test sets.
    Top10 {
        /// LABEL=PATH, once per protocol column.
        #[arg(long = "test", required = true)]
        tests: Vec<String>,
        /// LABEL=GLOB of prediction files for the column LABEL.
        #[arg(long = "preds")]
        preds: Vec<String>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        beam_size: Option<usize>,
    },
    /// Manual review ledger.
    #[command(subcommand)]
    Ledger(LedgerCommand),
}

#[derive(Debug, Subcommand)]
pub enum LedgerCommand {
    /// Writes an unreviewed ledger for the reviewed CWEs (or --all).
    Init {
        #[arg(long)]
        all: bool,
        corpus: PathBuf,
    },
    /// Validates a filled-in ledger and tallies its verdicts.
    Summarize { ledger: PathBuf },
}

struct Ctx {
    config: Config,
    vocab: TagVocabulary,
    load: LoadOptions,
    out: PathBuf,
    policy: MatchPolicy,
    meta: Metadata,
}

impl Ctx {
    fn load(&mut self, path: &Path, role: Role) -> Result<LoadedCorpus> {
        let c = load_corpus(path, role, &self.vocab, &self.load)?;
        self.meta.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: c.sha256.clone(),
            rows: c.corpus.len(),
            skipped_rows: c.skipped_rows.clone(),
        });
        Ok(c)
    }

    fn predictions(&mut self, path: &Path, beam_size: Option<usize>) -> Result<PredictionSet> {
        let p = load_predictions(path, beam_size)?;
        self.meta.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: file_sha256(path)?,
            rows: p.rows.len(),
            skipped_rows: Vec::new(),
        });
        Ok(p)
    }

    fn bundle(&self, sections: Vec<Section>) -> ReportBundle {
        let mut b = ReportBundle::new(self.meta.clone());
        b.sections = sections;
        b
    }

    fn dir(&self, sub: Option<&str>) -> Result<PathBuf> {
        let dir = match sub {
            Some(s) => self.out.join(s),
            None => self.out.clone(),
        };
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(dir)
    }

    /// Writes `<stem>.json`, `<stem>.md` and `<stem>.csv`; prints the Markdown.
    fn emit(&self, dir: &Path, stem: &str, bundle: &ReportBundle) -> Result<()> {
        for f in [
            ReportFormat::Json,
            ReportFormat::Markdown,
            ReportFormat::Csv,
        ] {
            let path = dir.join(format!("{stem}.{}", f.extension()));
            std::fs::write(&path, render(bundle, f)).map_err(|e| Error::io(&path, e))?;
        }
        print!("{}", render(bundle, ReportFormat::Markdown));
        Ok(())
    }

    fn save(&self, dir: &Path, c: &LoadedCorpus, corpus: &Corpus) -> Result<()> {
        let path = dir.join(format!("{}.{}", corpus.name, c.format.extension()));
        write_corpus(&path, corpus, &c.columns, c.format, &self.load, &self.vocab)
    }
}

/// Glob patterns expand in sorted order; a plain path is taken as is.
fn expand(patterns: &[String]) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for p in patterns {
        if !p.contains(['*', '?', '[']) {
            paths.push(PathBuf::from(p));
            continue;
        }
        let matches = glob::glob(p).map_err(|e| Error::Usage(format!("bad glob `{p}`: {e}")))?;
        let mut found: Vec<PathBuf> = matches.filter_map(std::result::Result::ok).collect();
        if found.is_empty() {
            return Err(Error::Usage(format!("`{p}` matches no files")));
        }
        found.sort();
        paths.extend(found);
    }
    Ok(paths)
}

fn split_label(arg: &str) -> Result<(String, String)> {
    match arg.split_once('=') {
        Some((l, v)) if !l.is_empty() && !v.is_empty() => Ok((l.to_string(), v.to_string())),
        _ => Err(Error::Usage(format!("expected LABEL=VALUE, got `{arg}`"))),
    }
}

fn distinct_names(a: &Corpus, b: &Corpus) -> Result<()> {
    if a.name == b.name {
        return Err(Error::Usage(format!(
            "both inputs are named `{}`; cleaned files would collide",
            a.name
        )));
    }
    Ok(())
}

fn score(
    ctx: &mut Ctx,
    path: &Path,
    test: &Corpus,
    k: Option<usize>,
    beam_size: Option<usize>,
) -> Result<(PredictionSet, EvalResult)> {
    let preds = ctx.predictions(path, beam_size)?;
    let k = k.unwrap_or(preds.beam_size);
    let result =
        perfect_prediction(&preds, test, k, ctx.policy).map_err(|source| Error::Prediction {
            path: path.to_path_buf(),
            source,
        })?;
    Ok((preds, result))
}

pub fn run(cli: Cli) -> Result<()> {
    let config = Config::discover(cli.config.as_deref())?;
    let vocab = config.vocabulary()?;
    if cli.threads == Some(0) {
        return Err(Error::Usage("--threads must be at least 1".into()));
    }
    parallel::init_threads(cli.threads);
    let mut ctx = Ctx {
        load: config.load_options(cli.format, cli.skip_malformed),
        out: cli.out.clone().unwrap_or_else(|| config.out.clone()),
        policy: if cli.normalize_ws {
            MatchPolicy::NormalizeWhitespace
        } else {
            MatchPolicy::Exact
        },
        meta: Metadata::new(Some(config.clone())),
        vocab,
        config,
    };
    let top10: Vec<String> = ctx.config.top10.clone();
    let top10: Vec<&str> = top10.iter().map(String::as_str).collect();

    match cli.command {
        Command::Audit { mode, train, test } => {
            let mode = mode.unwrap_or(ctx.config.mode);
            let a = ctx.load(&train, Role::Train)?;
            let b = ctx.load(&test, Role::Test)?;
            let (_, _, audit) =
                audit_pair(&a.corpus, &b.corpus, mode, Direction::None, &ctx.vocab)?;
            let mut sections = vec![Section::PairAudit(audit)];
            for c in [&a.corpus, &b.corpus] {
                sections.push(Section::TagHealth(TagHealthSection {
                    corpus: c.name.clone(),
                    health: tag_health(c, &ctx.vocab),
                }));
            }
            let dir = ctx.dir(None)?;
            ctx.emit(
                &dir,
                &format!("audit-{}", mode.as_str()),
                &ctx.bundle(sections),
            )
        }
        Command::Split {
            protocol,
            train,
            test,
        } => {
            let a = ctx.load(&train, Role::Train)?;
            let b = ctx.load(&test, Role::Test)?;
            distinct_names(&a.corpus, &b.corpus)?;
            let (a2, b2, trail) = run_protocol(&a.corpus, &b.corpus, protocol, &ctx.vocab)?;
            let dir = ctx.dir(Some(&protocol.as_str().to_ascii_lowercase()))?;
            ctx.save(&dir, &a, &a2)?;
            ctx.save(&dir, &b, &b2)?;
            ctx.emit(&dir, "trail", &ctx.bundle(vec![Section::Trail(trail)]))
        }
        Command::Clean {
            mode,
            direction,
            train,
            test,
        } => {
            let mode = mode.unwrap_or(ctx.config.mode);
            let a = ctx.load(&train, Role::Train)?;
            let b = ctx.load(&test, Role::Test)?;
            distinct_names(&a.corpus, &b.corpus)?;
            let (a2, b2, audit) =
                audit_pair(&a.corpus, &b.corpus, mode, direction.into(), &ctx.vocab)?;
            let side = direction.to_possible_value().expect("no skipped variants");
            let dir = ctx.dir(Some(&format!(
                "clean-{}-{}",
                mode.as_str(),
                side.get_name()
            )))?;
            ctx.save(&dir, &a, &a2)?;
            ctx.save(&dir, &b, &b2)?;
            ctx.emit(&dir, "report", &ctx.bundle(vec![Section::PairAudit(audit)]))
        }
        Command::Eval {
            test,
            k,
            beam_size,
            per_cwe,
            preds,
        } => {
            let test = ctx.load(&test, Role::Test)?.corpus;
            let mut sections = Vec::new();
            let mut by_model: BTreeMap<String, Vec<(i64, EvalResult)>> = BTreeMap::new();
            for path in expand(&preds)? {
                let (p, mut result) = score(&mut ctx, &path, &test, k, beam_size)?;
                if !per_cwe {
                    result.per_cwe.clear();
                }
                by_model
                    .entry(p.model_name.clone())
                    .or_default()
                    .push((p.seed, result.clone()));
                sections.push(Section::Eval(EvalSection {
                    model: p.model_name,
                    seed: p.seed,
                    policy: ctx.policy,
                    result,
                }));
            }
            for (model, results) in by_model {
                let mean = aggregate_seeds(&results)?;
                sections.push(Section::Mean(MeanSection {
                    model,
                    k: results[0].1.k_used,
                    mean,
                }));
            }
            let dir = ctx.dir(None)?;
            ctx.emit(&dir, "eval", &ctx.bundle(sections))
        }
        Command::Sweep {
            test,
            ks,
            beam_size,
            preds,
        } => {
            let test = ctx.load(&test, Role::Test)?.corpus;
            let mut rows: Vec<SweepRow> = Vec::new();
            for path in expand(&preds)? {
                let p = ctx.predictions(&path, beam_size)?;
                rows.extend(beam_sweep(&p, &ks, &test, ctx.policy).map_err(|source| {
                    Error::Prediction {
                        path: path.clone(),
                        source,
                    }
                })?);
            }
            let dir = ctx.dir(None)?;
            let csv_path = dir.join("sweep.csv");
            write_sweep_csv(&csv_path, &rows)?;
            ctx.emit(
                &dir,
                "sweep-report",
                &ctx.bundle(vec![Section::Sweep(rows)]),
            )
        }
        Command::Overlap {
            mode,
            reference,
            probes,
        } => {
            let mode = mode.unwrap_or(ctx.config.mode);
            let reference = ctx.load(&reference, Role::Train)?.corpus;
            let mut sections = Vec::new();
            for p in probes {
                let probe = ctx.load(&p, Role::Test)?.corpus;
                sections.push(Section::Overlap(overlap(
                    &probe, &reference, mode, &ctx.vocab,
                )));
            }
            let dir = ctx.dir(None)?;
            ctx.emit(
                &dir,
                &format!("overlap-{}", mode.as_str()),
                &ctx.bundle(sections),
            )
        }
        Command::Census { all, corpora } => {
            let filter = (!all).then_some(top10.as_slice());
            let mut sections = Vec::new();
            for p in corpora {
                let c = ctx.load(&p, Role::Test)?.corpus;
                sections.push(Section::Census(Census {
                    corpus: c.name.clone(),
                    counts: per_cwe_census(&c, filter),
                }));
            }
            let dir = ctx.dir(None)?;
            ctx.emit(&dir, "census", &ctx.bundle(sections))
        }
        Command::Top10 {
            tests,
            preds,
            k,
            beam_size,
        } => {
            let mut pred_globs: BTreeMap<String, Vec<String>> = BTreeMap::new();
            for p in &preds {
                let (label, pattern) = split_label(p)?;
                pred_globs.entry(label).or_default().push(pattern);
            }
            let mut columns = Vec::new();
            for t in &tests {
                let (label, path) = split_label(t)?;
                let test = ctx.load(Path::new(&path), Role::Test)?.corpus;
                let mut results = Vec::new();
                if let Some(patterns) = pred_globs.remove(&label) {
                    for path in expand(&patterns)? {
                        results.push(score(&mut ctx, &path, &test, k, beam_size)?.1);
                    }
                }
                columns.push(Top10Column {
                    protocol: label,
                    census: per_cwe_census(&test, None),
                    results,
                });
            }
            if let Some(label) = pred_globs.keys().next() {
                return Err(Error::Usage(format!(
                    "--preds {label}=... has no matching --test"
                )));
            }
            let table = top10_breakdown(&columns, &top10);
            let dir = ctx.dir(None)?;
            ctx.emit(&dir, "top10", &ctx.bundle(vec![Section::Top10(table)]))
        }
        Command::Ledger(LedgerCommand::Init { all, corpus }) => {
            let c = ctx.load(&corpus, Role::Test)?.corpus;
            let reviewed: Vec<&str> = ctx.config.reviewed.iter().map(String::as_str).collect();
            let records = init_ledger(&c, (!all).then_some(reviewed.as_slice()), &ctx.vocab);
            let dir = ctx.dir(None)?;
            let path = dir.join(format!("ledger-{}.csv", c.name));
            write_ledger(&path, &records)?;
            println!("{} records written to {}", records.len(), path.display());
            Ok(())
        }
        Command::Ledger(LedgerCommand::Summarize { ledger }) => {
            let records = read_ledger(&ledger)?;
            ctx.meta.inputs.push(InputDigest {
                path: ledger.display().to_string(),
                sha256: file_sha256(&ledger)?,
                rows: records.len(),
                skipped_rows: Vec::new(),
            });
            let summary = summarize_ledger(&records)?;
            let dir = ctx.dir(None)?;
            ctx.emit(
                &dir,
                "ledger-summary",
                &ctx.bundle(vec![Section::Ledger(summary)]),
            )
        }
    }
}

fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let fail = |e: csv::Error| Error::Format {
        path: path.to_path_buf(),
        reason: e.to_string(),
    };
    w.write_record(["model", "seed", "k", "pp"]).map_err(fail)?;
    for r in rows {
        w.write_record([
            r.model.clone(),
            r.seed.to_string(),
            r.k.to_string(),
            r.pp.to_string(),
        ])
        .map_err(fail)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
