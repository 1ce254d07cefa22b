//! Acceptance run: prints one PASS / FAIL / SKIP line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Criteria 1 to 6 need the public corpora. Point `VULNAUDIT_DATA_DIR` at a
//! directory laid out as
//!
//! ```text
//! vulrepair/{train,test}.csv
//! bugfix/{train,valid}.csv
//! vqm/{bugfix_train,bugfix_valid,vuln_train,vuln_valid,vuln_test}.csv
//! ```
//!
//! (`.jsonl` works too; column names come from `VULNAUDIT_CONFIG`). Without
//! the data those criteria report SKIP, after running the same commands on
//! synthetic corpora built to carry the published counts. A surrogate failure
//! is a FAIL.

#[path = "../../core/tests/properties.rs"]
mod properties;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use vulnaudit::core::{MeanResult, OverlapReport};
use vulnaudit::report::{parse_json, PairAudit, ReportBundle, Section};

type Check = Result<String, String>;

enum Status {
    Pass,
    Fail,
    Skip,
}

fn cli(out: &Path, args: &[&str]) -> Result<(), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_vulnaudit"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .map_err(|e| format!("spawn: {e}"))?;
    if o.status.success() {
        Ok(())
    } else {
        Err(format!(
            "`vulnaudit {}` exited {:?}: {}",
            args.join(" "),
            o.status.code(),
            String::from_utf8_lossy(&o.stderr).trim()
        ))
    }
}

fn report(path: &Path) -> Result<ReportBundle, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_json(&text).map_err(|e| e.to_string())
}

fn pair_audit(b: &ReportBundle) -> Result<&PairAudit, String> {
    b.sections
        .iter()
        .find_map(|s| match s {
            Section::PairAudit(a) => Some(a),
            _ => None,
        })
        .ok_or_else(|| "no pair audit in report".into())
}

fn expect<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, expected {want:?}"))
    }
}

fn s(p: &Path) -> &str {
    p.to_str().expect("UTF-8 path")
}

/// `dir/stem.csv` or `dir/stem.jsonl`.
fn find(dir: &Path, stem: &str) -> Option<PathBuf> {
    ["csv", "jsonl"]
        .iter()
        .map(|ext| dir.join(format!("{stem}.{ext}")))
        .find(|p| p.is_file())
}

fn data_dir(sub: &str, stems: &[&str]) -> Option<PathBuf> {
    let dir = PathBuf::from(std::env::var_os("VULNAUDIT_DATA_DIR")?).join(sub);
    stems.iter().all(|s| find(&dir, s).is_some()).then_some(dir)
}

// ---------------------------------------------------------------- checks

/// `[TS, IS Dup, SL]` for each side, then CS Dup.
struct Census {
    first: [usize; 3],
    second: [usize; 3],
    cross: usize,
}

fn census(first: &Path, second: &Path, mode: &str, want: &Census, limit: Duration) -> Check {
    let out = tempfile::tempdir().map_err(|e| e.to_string())?;
    let t = Instant::now();
    cli(out.path(), &["audit", "--mode", mode, s(first), s(second)])?;
    let elapsed = t.elapsed();
    let b = report(&out.path().join(format!("audit-{mode}.json")))?;
    let a = pair_audit(&b)?;
    let side = |d: &vulnaudit::core::DedupReport| [d.total, d.in_set_duplicates, d.remaining];
    expect("first [TS, IS Dup, SL]", side(&a.first), want.first)?;
    expect("second [TS, IS Dup, SL]", side(&a.second), want.second)?;
    expect("CS Dup", a.cross_set.shared_keys, want.cross)?;
    if elapsed > limit {
        return Err(format!("took {elapsed:.1?}, limit {limit:?}"));
    }
    Ok(format!(
        "IS {}/{}, SL {}/{}, CS {} in {elapsed:.1?}",
        want.first[1], want.second[1], want.first[2], want.second[2], want.cross
    ))
}

const TABLE_UNIQUENESS: Census = Census {
    first: [6776, 1593, 5183],
    second: [1706, 91, 1615],
    cross: 796,
};

const TABLE_CONSISTENCY: Census = Census {
    first: [6776, 1858, 4918],
    second: [1706, 111, 1595],
    cross: 923,
};

const TABLE_BUGFIX: Census = Census {
    first: [534858, 6192, 528666],
    second: [10000, 4, 9996],
    cross: 247,
};

fn check_uniqueness(dir: &Path) -> Check {
    let (train, test) = (find(dir, "train").unwrap(), find(dir, "test").unwrap());
    census(
        &train,
        &test,
        "raw",
        &TABLE_UNIQUENESS,
        Duration::from_secs(30),
    )
}

fn check_consistency(dir: &Path) -> Check {
    let (train, test) = (find(dir, "train").unwrap(), find(dir, "test").unwrap());
    census(
        &train,
        &test,
        "cwe-stripped",
        &TABLE_CONSISTENCY,
        Duration::from_secs(30),
    )
}

fn check_bugfix(dir: &Path) -> Check {
    let (train, valid) = (find(dir, "train").unwrap(), find(dir, "valid").unwrap());
    census(
        &train,
        &valid,
        "raw",
        &TABLE_BUGFIX,
        Duration::from_secs(300),
    )
}

fn check_protocols(dir: &Path) -> Check {
    let (train, test) = (find(dir, "train").unwrap(), find(dir, "test").unwrap());
    let out = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut detail = Vec::new();
    for (id, want) in [
        ("RQ2A", [4387, 1615]),
        ("RQ2B", [5183, 819]),
        ("RQ3A", [3995, 1595]),
        ("RQ3B", [4918, 672]),
    ] {
        cli(
            out.path(),
            &["split", "--protocol", id, s(&train), s(&test)],
        )?;
        let b = report(&out.path().join(id.to_ascii_lowercase()).join("trail.json"))?;
        let Some(Section::Trail(t)) = b.sections.first() else {
            return Err(format!("{id}: no trail"));
        };
        expect(id, t.final_sizes, want)?;
        if !t.is_consistent() {
            return Err(format!("{id}: trail does not add up"));
        }
        detail.push(format!("{id} {}/{}", want[0], want[1]));
    }
    Ok(detail.join(", "))
}

fn check_vqm(dir: &Path) -> Check {
    let f = |stem| find(dir, stem).unwrap();
    let (train, valid) = (f("bugfix_train"), f("bugfix_valid"));
    let out = tempfile::tempdir().map_err(|e| e.to_string())?;

    cli(
        out.path(),
        &["audit", "--mode", "raw", s(&train), s(&valid)],
    )?;
    let b = report(&out.path().join("audit-raw.json"))?;
    let raw = pair_audit(&b)?;
    expect(
        "raw IS Dup",
        [raw.first.in_set_duplicates, raw.second.in_set_duplicates],
        [17303, 666],
    )?;

    cli(
        out.path(),
        &["audit", "--mode", "bugtag-stripped", s(&train), s(&valid)],
    )?;
    let b = report(&out.path().join("audit-bugtag-stripped.json"))?;
    let tag = pair_audit(&b)?;
    expect(
        "bug-tag-stripped IS Dup",
        [tag.first.in_set_duplicates, tag.second.in_set_duplicates],
        [18622, 782],
    )?;
    expect(
        "validation keys present in train",
        tag.cross_set.shared_keys,
        tag.second.remaining,
    )?;

    let probes = [f("vuln_test"), f("vuln_valid"), f("vuln_train")];
    let mut args = vec!["overlap", "--mode", "raw", "--reference", s(&train)];
    args.extend(probes.iter().map(|p| s(p)));
    cli(out.path(), &args)?;
    let b = report(&out.path().join("overlap-raw.json"))?;
    let got: Vec<[usize; 2]> = b
        .sections
        .iter()
        .filter_map(|s| match s {
            Section::Overlap(OverlapReport {
                matched,
                probe_total,
                ..
            }) => Some([*matched, *probe_total]),
            _ => None,
        })
        .collect();
    expect(
        "overlap [matched, total]",
        got,
        vec![[511, 1090], [243, 536], [1747, 3790]],
    )?;
    Ok(format!(
        "IS {}/{} raw, {}/{} tag-stripped, {} of {} validation keys in train, overlap 511/243/1,747, raw CS {}",
        raw.first.in_set_duplicates,
        raw.second.in_set_duplicates,
        tag.first.in_set_duplicates,
        tag.second.in_set_duplicates,
        tag.cross_set.shared_keys,
        tag.second.remaining,
        raw.cross_set.shared_keys,
    ))
}

/// `(CWE, [RQ1, RQ2B, RQ3B])` test-set counts; an absent cell counts as 0.
const TOP10_TOTALS: [(&str, [usize; 3]); 6] = [
    ("CWE-787", [53, 33, 22]),
    ("CWE-125", [170, 68, 67]),
    ("CWE-20", [152, 73, 63]),
    ("CWE-416", [55, 29, 17]),
    ("CWE-22", [8, 2, 2]),
    ("CWE-352", [2, 2, 2]),
];

fn check_top10(dir: &Path) -> Check {
    let (train, test) = (find(dir, "train").unwrap(), find(dir, "test").unwrap());
    let out = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut tests = vec![format!("RQ1={}", s(&test))];
    for id in ["RQ2B", "RQ3B"] {
        cli(
            out.path(),
            &["split", "--protocol", id, s(&train), s(&test)],
        )?;
        let name = test.file_name().unwrap().to_str().unwrap();
        let cleaned = out.path().join(id.to_ascii_lowercase()).join(name);
        tests.push(format!("{id}={}", s(&cleaned)));
    }
    let mut args = vec!["top10"];
    for t in &tests {
        args.extend(["--test", t.as_str()]);
    }
    cli(out.path(), &args)?;
    let b = report(&out.path().join("top10.json"))?;
    let Some(Section::Top10(table)) = b.sections.first() else {
        return Err("no top-10 table".into());
    };
    for (cwe, want) in TOP10_TOTALS {
        let row = table.rows.iter().find(|r| r.cwe == cwe);
        let got: Vec<usize> = match row {
            Some(r) => r
                .cells
                .iter()
                .map(|c| c.as_ref().map_or(0, |c| c.total))
                .collect(),
            None => vec![0; 3],
        };
        expect(cwe, got, want.to_vec())?;
    }
    Ok("787 53/33/22, 125 170/68/67, 20 152/73/63, 416 55/29/17, 22 8/2/2, 352 2/2/2".into())
}

// ---------------------------------------------------------------- surrogates

fn write_csv(path: &Path, rows: &[(String, String)]) {
    let mut w = csv::Writer::from_path(path).unwrap();
    w.write_record(["source", "target"]).unwrap();
    for (src, tgt) in rows {
        w.write_record([src, tgt]).unwrap();
    }
    w.flush().unwrap();
}

fn shuffled(mut rows: Vec<(String, String)>, seed: u64) -> Vec<(String, String)> {
    rows.shuffle(&mut StdRng::seed_from_u64(seed));
    rows
}

fn vr_row(label: &str, id: usize) -> (String, String) {
    (
        format!(
            "{label} static int f{id} ( char * buf , int len ) {{ <S2SV_StartBug> buf [ len ] = {id} ; <S2SV_EndBug> return len ; }}"
        ),
        format!("<ModStart> if ( len >= {id} ) return -1 ; <ModEnd>"),
    )
}

const FILLER: &str = "CWE-119";

/// Train/test pair with the published VulRepair shape: 923 shared bodies (796
/// with the same label on both sides), label variants on 265 train-only and
/// 20 test-only bodies, and 1,593 / 91 exact repeats. Top-10 labels are
/// placed so each protocol's test set has the published per-CWE counts.
fn vulrepair_surrogate(dir: &Path) {
    let mut train = Vec::new();
    let mut test = Vec::new();
    let mut id = 0;
    let same = [
        ("CWE-787", 20),
        ("CWE-125", 102),
        ("CWE-20", 79),
        ("CWE-416", 26),
        ("CWE-22", 6),
        ("CWE-79", 1),
        ("CWE-78", 2),
        ("CWE-89", 4),
        (FILLER, 556),
    ];
    for (label, n) in same {
        for _ in 0..n {
            train.push(vr_row(label, id));
            test.push(vr_row(label, id));
            id += 1;
        }
    }
    let relabeled = [
        ("CWE-787", 11),
        ("CWE-125", 1),
        ("CWE-20", 10),
        ("CWE-416", 12),
        (FILLER, 93),
    ];
    for (label, n) in relabeled {
        for _ in 0..n {
            train.push(vr_row("CWE-200", id));
            test.push(vr_row(label, id));
            id += 1;
        }
    }
    let test_only = [
        ("CWE-787", 22),
        ("CWE-125", 67),
        ("CWE-20", 63),
        ("CWE-416", 17),
        ("CWE-22", 2),
        ("CWE-352", 2),
        ("CWE-78", 1),
        ("CWE-89", 1),
        (FILLER, 497),
    ];
    let mut filler_ids = Vec::new();
    for (label, n) in test_only {
        for _ in 0..n {
            if label == FILLER {
                filler_ids.push(id);
            }
            test.push(vr_row(label, id));
            id += 1;
        }
    }
    test.extend(filler_ids[..20].iter().map(|&i| vr_row("CWE-399", i)));
    test.extend(filler_ids[20..111].iter().map(|&i| vr_row(FILLER, i)));

    let first_train_only = id;
    for _ in 0..3995 {
        train.push(vr_row(FILLER, id));
        id += 1;
    }
    train.extend((first_train_only..first_train_only + 265).map(|i| vr_row("CWE-264", i)));
    let repeats: Vec<_> = train[..1593].to_vec();
    train.extend(repeats);

    assert_eq!((train.len(), test.len()), (6776, 1706));
    write_csv(&dir.join("train.csv"), &shuffled(train, 1));
    write_csv(&dir.join("test.csv"), &shuffled(test, 2));
}

fn bf_row(id: usize) -> (String, String) {
    (
        format!("CWE-000 void b{id} ( int * p ) {{ <S2SV_StartBug> * p = {id} ; <S2SV_EndBug> }}"),
        format!("<ModStart> if ( p ) * p = {id} ; <ModEnd>"),
    )
}

/// 528,666 + 6,192 repeats against 9,996 + 4, sharing 247 samples.
fn bugfix_surrogate(dir: &Path) {
    let mut train: Vec<_> = (0..528_666).map(bf_row).collect();
    let repeats: Vec<_> = (0..6192).map(|i| train[i * 85].clone()).collect();
    train.extend(repeats);
    let mut valid: Vec<_> = (0..247).map(|i| bf_row(i * 2000)).collect();
    valid.extend((0..9749).map(|i| bf_row(1_000_000 + i)));
    let repeats: Vec<_> = (0..4).map(|i| valid[i * 1000].clone()).collect();
    valid.extend(repeats);
    assert_eq!((train.len(), valid.len()), (534_858, 10_000));
    write_csv(&dir.join("train.csv"), &shuffled(train, 3));
    write_csv(&dir.join("valid.csv"), &shuffled(valid, 4));
}

/// Class `c` with its bug tags around token `k` of the body: variants of one
/// class differ only in tag placement.
fn vqm_row(c: usize, k: usize) -> (String, String) {
    let mut tokens: Vec<String> = format!("int g{c} ( int x ) {{ return x * {c} ; }}")
        .split(' ')
        .map(String::from)
        .collect();
    tokens.insert(8 + k, "<S2SV_EndBug>".into());
    tokens.insert(7 + k, "<S2SV_StartBug>".into());
    (
        format!("CWE-476 {}", tokens.join(" ")),
        format!("<ModStart> return x + {c} ; <ModEnd>"),
    )
}

fn vuln_row(n: usize) -> (String, String) {
    (
        format!(
            "CWE-787 int v{n} ( char * s ) {{ <S2SV_StartBug> s [ {n} ] = 0 ; <S2SV_EndBug> }}"
        ),
        format!("<ModStart> if ( s ) s [ {n} ] = 0 ; <ModEnd>"),
    )
}

fn with_repeats(mut rows: Vec<(String, String)>, repeats: usize) -> Vec<(String, String)> {
    let n = rows.len();
    let copies: Vec<_> = (0..repeats).map(|i| rows[i % n].clone()).collect();
    rows.extend(copies);
    rows
}

/// Bug-fix pair: 2,624 code classes in train (1,319 with a second tag
/// placement), 1,580 in validation, all of them also in train; validation
/// uses 83 tag placements train never does. Plus three vulnerability sets
/// partly copied from the bug-fix training rows.
fn vqm_surrogate(dir: &Path) {
    let mut train = Vec::new();
    for c in 0..2624 {
        train.push(vqm_row(c, 0));
        if c < 1319 {
            train.push(vqm_row(c, 1));
        }
    }
    let mut valid = Vec::new();
    for c in 0..1580 {
        match c {
            0..=115 => valid.extend([vqm_row(c, 0), vqm_row(c, 1)]),
            1497.. => valid.push(vqm_row(c, 2)),
            _ => valid.push(vqm_row(c, 0)),
        }
    }
    let train = with_repeats(train, 17303);
    let valid = with_repeats(valid, 666);
    assert_eq!((train.len(), valid.len()), (21246, 2362));
    write_csv(&dir.join("bugfix_train.csv"), &shuffled(train, 5));
    write_csv(&dir.join("bugfix_valid.csv"), &shuffled(valid, 6));

    let mut next = 0;
    for (name, total, copied, from) in [
        ("vuln_test", 1090, 511, 0),
        ("vuln_valid", 536, 243, 600),
        ("vuln_train", 3790, 1747, 0),
    ] {
        let mut rows: Vec<_> = (from..from + copied).map(|c| vqm_row(c, 0)).collect();
        rows.extend((next..next + total - copied).map(vuln_row));
        next += total - copied;
        write_csv(&dir.join(format!("{name}.csv")), &shuffled(rows, 7));
    }
}

// ---------------------------------------------------------------- criteria

fn data_criterion(
    sub: &str,
    stems: &[&str],
    surrogate: impl FnOnce(&Path),
    check: impl Fn(&Path) -> Check,
) -> (Status, String) {
    let synthetic = tempfile::tempdir().unwrap();
    surrogate(synthetic.path());
    let surrogate_result = check(synthetic.path());
    match (data_dir(sub, stems), surrogate_result) {
        (_, Err(e)) => (Status::Fail, format!("synthetic surrogate: {e}")),
        (Some(dir), Ok(syn)) => match check(&dir) {
            Ok(d) => (Status::Pass, format!("{d} [surrogate also ok: {syn}]")),
            Err(e) => (Status::Fail, format!("{}: {e}", dir.display())),
        },
        (None, Ok(syn)) => (
            Status::Skip,
            format!("dataset `{sub}` not present; synthetic surrogate ok: {syn}"),
        ),
    }
}

fn verdict(r: Check) -> (Status, String) {
    match r {
        Ok(d) => (Status::Pass, d),
        Err(e) => (Status::Fail, e),
    }
}

/// Per-seed scores of the two models whose means are checked.
const SEEDS_RQ1: [f64; 6] = [0.4349, 0.4197, 0.4244, 0.3511, 0.4244, 0.371];
const SEEDS_RQ3B: [f64; 6] = [0.1012, 0.0878, 0.0923, 0.1071, 0.1101, 0.1176];
const SEED_IDS: [i64; 6] = [26312, 43511, 67732, 70757, 95541, 123456];

fn check_means() -> Check {
    let t = Instant::now();
    let mut detail = Vec::new();
    for (pps, sum, want) in [(SEEDS_RQ1, 2.4255, 40.42), (SEEDS_RQ3B, 0.6161, 10.27)] {
        let per_seed = SEED_IDS.iter().copied().zip(pps).collect();
        let m = MeanResult::from_pps(per_seed).map_err(|e| e.to_string())?;
        let total: f64 = pps.iter().sum();
        if (total - sum).abs() > 1e-9 {
            return Err(format!("seed sum {total} != {sum}"));
        }
        let pct = m.mean_pp * 100.0;
        // 2.4255 / 6 is 40.425 exactly; allow float noise at the boundary
        if (pct - want).abs() > 0.005 + 1e-9 {
            return Err(format!("mean {pct:.4}% not within 0.005 pp of {want}%"));
        }
        detail.push(format!("{pct:.4}% ~ {want}%"));
    }
    Ok(format!("{} in {:.1?}", detail.join(", "), t.elapsed()))
}

fn check_properties() -> Check {
    let t = Instant::now();
    for (name, f) in properties::ALL {
        catch_unwind(AssertUnwindSafe(f)).map_err(|_| format!("property `{name}` failed"))?;
    }
    let elapsed = t.elapsed();
    if elapsed > Duration::from_secs(10) {
        return Err(format!("suite took {elapsed:.1?}, limit 10s"));
    }
    Ok(format!(
        "{} properties in {elapsed:.1?}",
        properties::ALL.len()
    ))
}

fn check_beam_fixture() -> Check {
    let want = vec![(1, 0.125), (3, 0.25), (5, 0.375)];
    expect("core sweep", properties::eight_sample_beam_fixture(), want)?;

    // same fixture through files and the CLI
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let rows: Vec<_> = (0..8)
        .map(|i| (format!("CWE-787 f{i}"), format!("fix{i}")))
        .collect();
    let test = dir.path().join("test.csv");
    write_csv(&test, &rows);
    let hit_rank = [Some(1), Some(3), Some(5), None, None, None, None, None];
    let mut lines = String::new();
    for (i, rank) in hit_rank.iter().enumerate() {
        let candidates: Vec<String> = (1..=5)
            .map(|r| {
                if Some(r) == *rank {
                    format!("fix{i}")
                } else {
                    format!("wrong{r}")
                }
            })
            .collect();
        lines += &serde_json::json!({"ordinal": i, "candidates": candidates}).to_string();
        lines.push('\n');
    }
    let preds = dir.path().join("fixture_seed1.jsonl");
    std::fs::write(&preds, lines).map_err(|e| e.to_string())?;
    let out = dir.path().join("out");
    cli(
        &out,
        &["sweep", "--test", s(&test), "--ks", "1,3,5", s(&preds)],
    )?;
    let csv = std::fs::read_to_string(out.join("sweep.csv")).map_err(|e| e.to_string())?;
    expect(
        "sweep.csv",
        csv.as_str(),
        "model,seed,k,pp\nfixture,1,1,0.125\nfixture,1,3,0.25\nfixture,1,5,0.375\n",
    )?;
    Ok("pp@1 = 0.125, pp@3 = 0.25, pp@5 = 0.375 (library and CLI)".into())
}

fn check_ledger() -> Check {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/review_ledger.csv");
    let out = tempfile::tempdir().map_err(|e| e.to_string())?;
    cli(out.path(), &["ledger", "summarize", s(&fixture)])?;
    let b = report(&out.path().join("ledger-summary.json"))?;
    let Some(Section::Ledger(l)) = b.sections.first() else {
        return Err("no ledger summary".into());
    };
    let t = l.totals;
    expect(
        "[total, accurate, complete, both]",
        [t.total, t.accurate, t.complete, t.accurate_and_complete],
        [68, 30, 38, 21],
    )?;
    Ok("accurate 30, complete 38, both 21 of 68".into())
}

type Criterion = Box<dyn FnOnce() -> (Status, String)>;

fn main() {
    let criteria: Vec<(&str, Criterion)> = vec![
        (
            "uniqueness census (raw)",
            Box::new(|| {
                data_criterion(
                    "vulrepair",
                    &["train", "test"],
                    vulrepair_surrogate,
                    check_uniqueness,
                )
            }),
        ),
        (
            "consistency census (cwe-stripped)",
            Box::new(|| {
                data_criterion(
                    "vulrepair",
                    &["train", "test"],
                    vulrepair_surrogate,
                    check_consistency,
                )
            }),
        ),
        (
            "bug-fix corpus census",
            Box::new(|| {
                data_criterion(
                    "bugfix",
                    &["train", "valid"],
                    bugfix_surrogate,
                    check_bugfix,
                )
            }),
        ),
        (
            "protocol sizes",
            Box::new(|| {
                data_criterion(
                    "vulrepair",
                    &["train", "test"],
                    vulrepair_surrogate,
                    check_protocols,
                )
            }),
        ),
        (
            "VQM overlap audit",
            Box::new(|| {
                data_criterion(
                    "vqm",
                    &[
                        "bugfix_train",
                        "bugfix_valid",
                        "vuln_train",
                        "vuln_valid",
                        "vuln_test",
                    ],
                    vqm_surrogate,
                    check_vqm,
                )
            }),
        ),
        (
            "top-10 census",
            Box::new(|| {
                data_criterion(
                    "vulrepair",
                    &["train", "test"],
                    vulrepair_surrogate,
                    check_top10,
                )
            }),
        ),
        ("seed aggregation", Box::new(|| verdict(check_means()))),
        ("property suite", Box::new(|| verdict(check_properties()))),
        (
            "evaluator fixture",
            Box::new(|| verdict(check_beam_fixture())),
        ),
        ("ledger summary", Box::new(|| verdict(check_ledger()))),
    ];

    let (mut pass, mut fail, mut skip) = (0, 0, 0);
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let (status, detail) = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|_| (Status::Fail, "panicked".into()));
        let word = match status {
            Status::Pass => {
                pass += 1;
                "PASS"
            }
            Status::Fail => {
                fail += 1;
                "FAIL"
            }
            Status::Skip => {
                skip += 1;
                "SKIP"
            }
        };
        println!("{word} criterion {:>2} {name}: {detail}", i + 1);
    }
    println!("acceptance: {pass} passed, {fail} failed, {skip} skipped");
    if fail > 0 {
        std::process::exit(1);
    }
}
