//! Command-line front end: argument parsing, JSON reports, exit codes and
//! the on-disk result cache.

pub mod cache;

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::catalog::{
    classify_class, compare, enumerate_labels, expected, gu3_witness, hints_for, mixed_involution_pair, odd_w_pair,
    regular_f_family, regular_pairs, split_label, two_two_pair, unipotent_census, ClassRecord, Coverage, ExplicitPair,
    PairKind, RowStatus, UnipotentLabel, TABLE_VERSION,
};
use crate::chevalley::{chevalley_suite, root_system, torus_family, torus_pair_witness, FamilyCase, FamilyOutcome, WitnessCase};
use crate::detect::{
    check_f_family, d_pair, refute_d, refute_f, Basis, Budget, ClassRack, Refutation, ScanOptions, Verdict,
    SUBGROUP_CAP,
};
use crate::error::{Error, Result};
use crate::matgroup::{group_spec, Family, GroupSpec};

use cache::{resolve_dir, Cache, FileCheckpoint, KeyMaterial, ARTIFACT_VERSION};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_INTERNAL: i32 = 1;

#[derive(Parser, Debug)]
#[command(name = "cthulhu", version, about = "Type D / type F / cthulhu classification of unipotent classes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Seed for sampled searches.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Pair evaluations allowed per search stage.
    #[arg(long, global = true, default_value_t = 5_000_000)]
    pub pairs: u64,
    /// Largest orbit or class materialized.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub orbit_cap: usize,
    /// Random partners tried by the sampled D search.
    #[arg(long, global = true, default_value_t = 2_000)]
    pub samples: usize,
    /// Cache directory (overrides CTHULHU_CACHE_DIR).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Include wall-clock times (reports are then no longer reproducible).
    #[arg(long, global = true)]
    pub wall_clock: bool,
}

impl Common {
    fn budget(&self) -> Budget {
        Budget { pairs: self.pairs, orbit_cap: self.orbit_cap, samples: self.samples, seed: self.seed }
    }

    fn cache(&self) -> Result<Option<Cache>> {
        if self.no_cache {
            return Ok(None);
        }
        Cache::open(&resolve_dir(self.cache_dir.as_deref())).map(Some)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Sl,
    Su,
    Sp,
}

impl FamilyArg {
    fn family(self) -> Family {
        match self {
            FamilyArg::Sl => Family::SL,
            FamilyArg::Su => Family::SU,
            FamilyArg::Sp => Family::Sp,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum RefuteKind {
    D,
    F,
    Both,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Relation {
    Noncommuting,
    Commuting,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Split labels of Sp_{2n}(q) into classes and classify each.
    Classify {
        #[arg(long, value_enum, default_value = "sp")]
        family: FamilyArg,
        /// Rank: the group is Sp_{2n}(q).
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        /// One label, e.g. `2,2` or `W(1)+V(2)`; all labels when omitted.
        #[arg(long)]
        label: Option<String>,
        /// Only this split of the label.
        #[arg(long, requires = "label")]
        split: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Build and verify one of the named constructions.
    Witness {
        #[command(subcommand)]
        kind: WitnessKind,
        #[command(flatten)]
        common: Common,
    },
    /// Exhaustive refutation scans for one class.
    Refute {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        label: String,
        #[arg(long, default_value_t = 0)]
        split: usize,
        #[arg(long, value_enum, default_value = "both")]
        kind: RefuteKind,
        #[command(flatten)]
        common: Common,
    },
    /// Labels, expected verdicts and class splits of Sp_{2n}(q).
    Catalog {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        /// Also count all unipotent elements class by class.
        #[arg(long)]
        census: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Torus action and commutator product form checks for C_n over F_q.
    ChevalleyVerify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        /// Random torus-action checks.
        #[arg(long, default_value_t = 100)]
        torus_samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Computed verdicts against the expected table.
    Table {
        /// Only table `I` is available.
        #[arg(long = "paper-table", value_parser = ["I"])]
        paper_table: String,
        /// Rank; with `--q` restricts to one group, else Sp_4(2), Sp_4(3), Sp_4(4).
        #[arg(long, requires = "q")]
        n: Option<usize>,
        #[arg(long, requires = "n")]
        q: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand, Debug)]
pub enum WitnessKind {
    /// Type D pair in a regular unipotent class of GU_3(2).
    Gu3,
    /// Four torus translates of a regular unipotent of Sp_4(q), q > 2 even.
    RegularFamily {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 0)]
        which: usize,
    },
    /// x_a1(1) and w in the (2^2) class of Sp_4(3).
    TwoTwo,
    /// The W(2)+V(2) pair in Sp_6(2).
    MixedInvolution,
    /// The W(3) pair in Sp_6(2).
    OddW,
    /// Two regular unipotents of one class with a given relation.
    RegularPair {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Matrix size.
        #[arg(long)]
        size: usize,
        #[arg(long)]
        q: u64,
        #[arg(long, value_enum)]
        relation: Relation,
    },
    /// Torus element separating two root characters.
    TorusPair {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
    },
    /// Four torus elements with pairwise distinct character values.
    TorusFamily {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
    },
}

/// Parse `argv` (including the program name), run, print and return the
/// exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match execute(&cli.command) {
        Ok((report, code)) => match emit(&report, output_of(&cli.command)) {
            Ok(()) => code,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_INTERNAL
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Parse(_)
        | Error::Precondition(_)
        | Error::Dimension(_)
        | Error::Unsupported(_)
        | Error::Field(_)
        | Error::DegeneratePair(_) => EXIT_USAGE,
        Error::CapExceeded { .. } => EXIT_BUDGET,
        Error::Verification(_) => EXIT_MISMATCH,
        Error::Io(_) | Error::Json(_) => EXIT_INTERNAL,
    }
}

fn output_of(c: &Command) -> Option<&PathBuf> {
    match c {
        Command::Classify { common, .. }
        | Command::Witness { common, .. }
        | Command::Refute { common, .. }
        | Command::Catalog { common, .. }
        | Command::ChevalleyVerify { common, .. }
        | Command::Table { common, .. } => common.output.as_ref(),
    }
}

fn emit(report: &Value, output: Option<&PathBuf>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    match output {
        Some(p) => cache::atomic_write(p, text.as_bytes()),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Run a parsed command; returns the report and exit code.
pub fn execute(c: &Command) -> Result<(Value, i32)> {
    match c {
        Command::Classify { family, n, q, label, split, common } => {
            if *family != FamilyArg::Sp {
                return Err(Error::Unsupported("classify covers the symplectic family only".into()));
            }
            let labels = match label {
                Some(l) => vec![UnipotentLabel::parse_for(l, *q)?],
                None => enumerate_labels(*n, *q)?,
            };
            let rows = run_rows(&labels, *n, *q, *split, common)?;
            let code = rows_exit(&rows);
            let group = group_spec(Family::Sp, 2 * n, *q)?.name();
            Ok((json!({ "schema_version": SCHEMA_VERSION, "command": "classify", "group": group, "seed": common.seed, "rows": rows }), code))
        }
        Command::Table { n, q, common, .. } => {
            let groups: Vec<(usize, u64)> = match (n, q) {
                (Some(n), Some(q)) => vec![(*n, *q)],
                _ => vec![(2, 2), (2, 3), (2, 4)],
            };
            let mut all = Vec::new();
            let mut codes = Vec::new();
            for (n, q) in groups {
                let rows = run_rows(&enumerate_labels(n, q)?, n, q, None, common)?;
                codes.push(rows_exit(&rows));
                let summary: Vec<Value> = rows
                    .iter()
                    .map(|r| {
                        json!({
                            "label": r["label"],
                            "expected": r["expected"],
                            "computed": r["classes"].as_array().map(|cs| cs.iter().map(|c| c["verdict"].clone()).collect::<Vec<_>>()),
                            "class_sizes": r["classes"].as_array().map(|cs| cs.iter().map(|c| c["timings"]["class_size"].clone()).collect::<Vec<_>>()),
                            "status": r["status"],
                            "letters_agree": r["letters_agree"],
                        })
                    })
                    .collect();
                all.push(json!({ "group": group_spec(Family::Sp, 2 * n, q)?.name(), "rows": summary }));
            }
            let code = worst(&codes);
            Ok((json!({ "schema_version": SCHEMA_VERSION, "command": "table", "table": "I", "table_version": TABLE_VERSION, "seed": common.seed, "groups": all }), code))
        }
        Command::Witness { kind, common } => witness(kind, common),
        Command::Refute { n, q, label, split, kind, common } => refute(*n, *q, label, *split, *kind, common),
        Command::Catalog { n, q, census, common } => catalog(*n, *q, *census, common),
        Command::ChevalleyVerify { n, q, torus_samples, common } => {
            let r = chevalley_suite(*n, *q, *torus_samples, common.seed)?;
            let ok = r.ok() && (r.product_form_exhaustive || *q > 9);
            Ok((json!({ "schema_version": SCHEMA_VERSION, "command": "chevalley-verify", "ok": ok, "report": r }), if ok { EXIT_OK } else { EXIT_MISMATCH }))
        }
    }
}

fn worst(codes: &[i32]) -> i32 {
    if codes.contains(&EXIT_MISMATCH) {
        EXIT_MISMATCH
    } else if codes.contains(&EXIT_BUDGET) {
        EXIT_BUDGET
    } else {
        EXIT_OK
    }
}

fn rows_exit(rows: &[Value]) -> i32 {
    let codes: Vec<i32> = rows
        .iter()
        .map(|r| match r["status"].as_str() {
            Some("mismatch") => EXIT_MISMATCH,
            Some("unknown") => EXIT_BUDGET,
            _ => EXIT_OK,
        })
        .collect();
    worst(&codes)
}

fn class_key(group: &str, label: &UnipotentLabel, split: usize, common: &Common) -> KeyMaterial {
    KeyMaterial {
        group: group.to_string(),
        label: label.to_string(),
        split_index: split,
        operation: "classify".into(),
        caps: json!({ "pairs": common.pairs, "orbit_cap": common.orbit_cap, "samples": common.samples }),
        seed: common.seed,
        version: ARTIFACT_VERSION.into(),
    }
}

/// Classify one class, through the cache when enabled.
fn classify_cached(
    class: &ClassRack,
    spec: &GroupSpec,
    label: &UnipotentLabel,
    n: usize,
    q: u64,
    split: usize,
    common: &Common,
    cache: Option<&Cache>,
) -> Result<(ClassRecord, bool)> {
    let key = class_key(&spec.name(), label, split, common);
    if let Some(c) = cache {
        if let Some(rec) = c.get::<ClassRecord>(&key) {
            match cache::revalidate(&rec, class, spec) {
                Ok(()) => return Ok((rec, true)),
                Err(e) => eprintln!("cache: discarding entry for {label} split {split}: {e}"),
            }
        }
    }
    let hints = hints_for(n, q)?;
    let cp = cache.map(|c| FileCheckpoint { path: c.checkpoint_path(&key.digest(), "not-d") });
    let rec = classify_class(class, label, n, q, split, &hints, &common.budget(), cp.as_ref().map(|c| c as _))?;
    if let Some(c) = cache {
        if rec.verdict != Verdict::Unknown {
            c.put(&key, &rec)?;
            if let Some(cp) = &cp {
                let _ = std::fs::remove_file(&cp.path);
            }
        }
    }
    Ok((rec, false))
}

/// The per-class report.
fn class_report(rec: &ClassRecord, seed: u64, wall: Option<u128>, cached: bool) -> Value {
    let pairs: u64 = rec.certificates.iter().map(|c| c.scan_log.pairs_evaluated).sum();
    let mut timings = json!({ "class_size": rec.class_size, "pairs_evaluated": pairs });
    if let Some(ms) = wall {
        timings["wall_ms"] = json!(ms);
        timings["cached"] = json!(cached);
    }
    let mut v = json!({
        "schema_version": SCHEMA_VERSION,
        "group": rec.group,
        "label": rec.label,
        "split_index": rec.split_index,
        "representative": rec.representative,
        "verdict": rec.verdict,
        "verdict_basis": rec.verdict_basis,
        "strategy": rec.strategy,
        "timings": timings,
        "seed": seed,
    });
    if let Some(w) = &rec.witness {
        v["witness"] = w.clone();
    }
    if !rec.certificates.is_empty() {
        v["certificate"] = json!(rec.certificates);
    }
    if let Some(f) = &rec.f_family {
        v["f_family"] = json!(f);
    }
    v
}

fn run_rows(labels: &[UnipotentLabel], n: usize, q: u64, only: Option<usize>, common: &Common) -> Result<Vec<Value>> {
    let spec = group_spec(Family::Sp, 2 * n, q)?;
    let cache = common.cache()?;
    let mut rows = Vec::new();
    for label in labels {
        label.check_for(n, q)?;
        let coverage = expected(label, n, q)?;
        let splits = split_label(label, n, q, common.orbit_cap)?;
        let mut records = Vec::new();
        let mut reports = Vec::new();
        for s in &splits {
            if only.is_some_and(|i| i != s.index) {
                continue;
            }
            let t = Instant::now();
            let class = ClassRack::new(&s.rep, &spec, common.orbit_cap)?;
            let (rec, cached) = classify_cached(&class, &spec, label, n, q, s.index, common, cache.as_ref())?;
            let wall = common.wall_clock.then(|| t.elapsed().as_millis());
            reports.push(class_report(&rec, common.seed, wall, cached));
            records.push(rec);
        }
        if only.is_some() && records.is_empty() {
            return Err(Error::Precondition(format!("{label} has {} classes", splits.len())));
        }
        let (status, count_ok, letters_agree) = if only.is_some() {
            // a single split cannot be compared as a multiset
            let exp = match &coverage {
                Coverage::Covered(e) => e.per_class(splits.len()),
                Coverage::Uncovered => vec![],
            };
            let rec = &records[0];
            let status = if rec.verdict == Verdict::Unknown {
                RowStatus::Unknown
            } else if exp.iter().any(|e| e.agrees(rec.verdict)) {
                RowStatus::Match
            } else if exp.iter().any(|e| e.collapses() && matches!(rec.verdict, Verdict::D | Verdict::F)) {
                RowStatus::Match
            } else if exp.is_empty() {
                RowStatus::Uncovered
            } else {
                RowStatus::Mismatch
            };
            (status, None, exp.iter().any(|e| e.agrees(rec.verdict)))
        } else {
            compare(&coverage, &records)
        };
        let exp_json = match &coverage {
            Coverage::Covered(e) => json!({ "row": e.row, "class_count": e.class_count, "verdicts": e.verdicts, "note": e.note }),
            Coverage::Uncovered => json!("uncovered"),
        };
        rows.push(json!({
            "label": label.to_string(),
            "class_count": splits.len(),
            "class_count_ok": count_ok,
            "expected": exp_json,
            "status": status,
            "letters_agree": letters_agree,
            "classes": reports,
        }));
    }
    Ok(rows)
}

fn pair_json(p: &ExplicitPair) -> Result<Value> {
    let spec = group_spec(Family::Sp, 2 * p.n, p.q)?;
    let orbit = crate::matgroup::class_orbit(&p.class_rep, &spec, 2_000_000)?;
    let in_class = orbit.complete && orbit.contains(&p.r) && orbit.contains(&p.s);
    let w = d_pair(&p.r, &p.s, SUBGROUP_CAP)?;
    let ok = in_class && w.witness().is_some_and(|w| w.validate().is_ok());
    Ok(json!({
        "name": p.name,
        "group": spec.name(),
        "class_rep": p.class_rep.to_text(),
        "class_size": orbit.len(),
        "in_class": in_class,
        "verified": ok,
        "witness": w.witness(),
    }))
}

fn witness(kind: &WitnessKind, common: &Common) -> Result<(Value, i32)> {
    let (name, result, ok) = match kind {
        WitnessKind::Gu3 => {
            let r = gu3_witness()?;
            ("gu3", json!(r), true)
        }
        WitnessKind::RegularFamily { q, which } => {
            let fam = regular_f_family(*q, *which)?;
            let res = check_f_family(&fam.reps, &fam.builder, common.orbit_cap)?;
            let ok = matches!(&res, Ok(w) if w.validate().is_ok());
            let detail = match &res {
                Ok(w) => json!({ "reps": w.reps.iter().map(|m| m.to_text()).collect::<Vec<_>>(), "subrack_sizes": w.subracks.iter().map(|s| s.0.len()).collect::<Vec<_>>() }),
                Err(f) => json!({ "failure": f.to_string() }),
            };
            ("regular-family", json!({ "q": q, "which": which, "u": fam.u.to_text(), "family": detail }), ok)
        }
        WitnessKind::TwoTwo => {
            let v = pair_json(&two_two_pair()?)?;
            let ok = v["verified"] == json!(true);
            ("two-two", v, ok)
        }
        WitnessKind::MixedInvolution => {
            let (p, [sigma, z, y]) = mixed_involution_pair()?;
            let zs = z.mul(&sigma);
            let conj_ok = zs.mul(&p.class_rep).mul(&zs.inverse().expect("invertible")) == p.r
                && y.mul(&p.class_rep).mul(&y.inverse().expect("invertible")) == p.s;
            let mut v = pair_json(&p)?;
            v["conjugators_reproduce_pair"] = json!(conj_ok);
            let ok = conj_ok && v["verified"] == json!(true);
            ("mixed-involution", v, ok)
        }
        WitnessKind::OddW => {
            let v = pair_json(&odd_w_pair()?)?;
            let ok = v["verified"] == json!(true);
            ("odd-w", v, ok)
        }
        WitnessKind::RegularPair { family, size, q, relation } => {
            let spec = group_spec(family.family(), *size, *q)?;
            let kind = match relation {
                Relation::Noncommuting => PairKind::Noncommuting,
                Relation::Commuting => PairKind::Commuting,
            };
            let p = regular_pairs(&spec, kind)?;
            (
                "regular-pair",
                json!({ "group": spec.name(), "relation": kind, "x1": p.x1.to_text(), "x2": p.x2.to_text(), "via": p.via, "class_size": p.class_size }),
                true,
            )
        }
        WitnessKind::TorusPair { n, q, alpha, beta } => {
            let rs = root_system(*n)?;
            let (a, b) = (rs.parse_label(alpha)?, rs.parse_label(beta)?);
            let w = torus_pair_witness(&rs, &a, &b, *q, WitnessCase::Chevalley)?;
            (
                "torus-pair",
                json!({
                    "alpha": rs.label(&w.alpha), "beta": rs.label(&w.beta), "swapped": w.swapped,
                    "t": w.t.matrix.to_text(), "modulus": w.modulus, "alpha_exp": w.alpha_exp, "beta_exp": w.beta_exp,
                }),
                true,
            )
        }
        WitnessKind::TorusFamily { n, q, alpha, beta } => {
            let rs = root_system(*n)?;
            let (a, b) = (rs.parse_label(alpha)?, rs.parse_label(beta)?);
            match torus_family(&rs, &a, &b, *q, &FamilyCase::Chevalley)? {
                FamilyOutcome::Family(f) => (
                    "torus-family",
                    json!({
                        "alpha": rs.label(&f.alpha), "beta": rs.label(&f.beta),
                        "ts": f.ts.iter().map(|t| t.matrix.to_text()).collect::<Vec<_>>(),
                        "alpha_exps": f.alpha_exps, "beta_exps": f.beta_exps, "modulus": f.modulus,
                        "matrix_verified": f.matrix_verified,
                    }),
                    f.matrix_verified,
                ),
                FamilyOutcome::Refused(r) => ("torus-family", json!({ "refused": r }), false),
            }
        }
    };
    let code = if ok { EXIT_OK } else { EXIT_MISMATCH };
    Ok((json!({ "schema_version": SCHEMA_VERSION, "command": "witness", "kind": name, "verified": ok, "result": result }), code))
}

fn refute(n: usize, q: u64, label: &str, split: usize, kind: RefuteKind, common: &Common) -> Result<(Value, i32)> {
    let label = UnipotentLabel::parse_for(label, q)?;
    let spec = group_spec(Family::Sp, 2 * n, q)?;
    let splits = split_label(&label, n, q, common.orbit_cap)?;
    let s = splits
        .get(split)
        .ok_or_else(|| Error::Precondition(format!("{label} has {} classes", splits.len())))?;
    let class = ClassRack::new(&s.rep, &spec, common.orbit_cap)?;
    let cache = common.cache()?;
    let mut key = class_key(&spec.name(), &label, split, common);
    key.operation = "refute".into();
    let cp = cache.as_ref().map(|c| FileCheckpoint { path: c.checkpoint_path(&key.digest(), "not-d") });
    let opts = ScanOptions { cap: common.pairs, orbit_cap: common.orbit_cap, checkpoint: cp.as_ref().map(|c| c as _) };
    let mut out = serde_json::Map::new();
    let mut codes = Vec::new();
    if matches!(kind, RefuteKind::D | RefuteKind::Both) {
        match refute_d(&class, opts)? {
            Refutation::Witness(w, c) => {
                codes.push(EXIT_MISMATCH);
                out.insert("not_d".into(), json!({ "refuted": false, "witness": w, "certificate": c }));
            }
            Refutation::Refuted(c) => {
                codes.push(if c.verdict_basis == Basis::Exhaustive { EXIT_OK } else { EXIT_BUDGET });
                out.insert("not_d".into(), json!({ "refuted": true, "certificate": c }));
            }
        }
    }
    if matches!(kind, RefuteKind::F | RefuteKind::Both) {
        let opts = ScanOptions { checkpoint: None, ..opts };
        match refute_f(&class, opts)? {
            Refutation::Witness(w, c) => {
                codes.push(EXIT_MISMATCH);
                out.insert("not_f".into(), json!({ "refuted": false, "witness": w, "certificate": c }));
            }
            Refutation::Refuted(c) => {
                let ok = matches!(c.verdict_basis, Basis::Exhaustive | Basis::NecessaryCondition);
                codes.push(if ok { EXIT_OK } else { EXIT_BUDGET });
                out.insert("not_f".into(), json!({ "refuted": true, "certificate": c }));
            }
        }
    }
    let code = worst(&codes);
    Ok((
        json!({
            "schema_version": SCHEMA_VERSION, "command": "refute", "group": spec.name(), "label": label.to_string(),
            "split_index": split, "class_size": class.len(), "seed": common.seed, "scans": out,
        }),
        code,
    ))
}

fn catalog(n: usize, q: u64, census: bool, common: &Common) -> Result<(Value, i32)> {
    let spec = group_spec(Family::Sp, 2 * n, q)?;
    let mut rows = Vec::new();
    let mut mismatch = false;
    for label in enumerate_labels(n, q)? {
        let splits = split_label(&label, n, q, common.orbit_cap)?;
        let coverage = expected(&label, n, q)?;
        if let Coverage::Covered(e) = &coverage {
            mismatch |= e.class_count.is_some_and(|c| c != splits.len());
        }
        rows.push(json!({ "label": label.to_string(), "expected": coverage, "classes": splits }));
    }
    let mut v = json!({ "schema_version": SCHEMA_VERSION, "command": "catalog", "group": spec.name(), "labels": rows });
    if census {
        let c = unipotent_census(n, q, common.orbit_cap)?;
        mismatch |= !c.ok();
        v["census"] = json!(c);
    }
    Ok((v, if mismatch { EXIT_MISMATCH } else { EXIT_OK }))
}
