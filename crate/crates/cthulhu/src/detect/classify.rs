use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matgroup::Mat;

use super::class::ClassRack;
use super::scan::{find_d, local_f, refute_d, refute_f, Basis, CertKind, Certificate, Checkpoint, Refutation, ScanOptions, Strategy};
use super::witness::{check_f_family, DWitness, FBuilder, FWitness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Verdict {
    D,
    F,
    #[serde(rename = "cthulhu")]
    Cthulhu,
    #[serde(rename = "unknown")]
    Unknown,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::D => "D",
            Verdict::F => "F",
            Verdict::Cthulhu => "cthulhu",
            Verdict::Unknown => "unknown",
        })
    }
}

impl std::str::FromStr for Verdict {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> Result<Verdict> {
        match s {
            "D" => Ok(Verdict::D),
            "F" => Ok(Verdict::F),
            "cthulhu" => Ok(Verdict::Cthulhu),
            "unknown" => Ok(Verdict::Unknown),
            _ => Err(crate::error::Error::Parse(format!("unknown verdict {s:?}"))),
        }
    }
}

/// Limits for [`classify`]. `pairs` bounds the pair evaluations of every
/// individual search stage.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Budget {
    pub pairs: u64,
    pub orbit_cap: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { pairs: 5_000_000, orbit_cap: 1_000_000, samples: 2_000, seed: 0 }
    }
}

/// Extra constructions a caller knows about the class.
#[derive(Clone, Debug, Default)]
pub struct Hints {
    /// Torus and product strategies, tried first and in order.
    pub d_strategies: Vec<Strategy>,
    /// Subgroups (typically `U^F` and parabolics) to search locally.
    pub local_subgroups: Vec<(String, Vec<Mat>)>,
    /// Ready-made F candidates.
    pub f_families: Vec<(String, Vec<Mat>, FBuilder)>,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub verdict: Verdict,
    pub basis: Option<Basis>,
    pub strategy: String,
    pub d_witness: Option<Box<DWitness>>,
    pub f_witness: Option<Box<FWitness>>,
    pub certificates: Vec<Certificate>,
    pub log: Vec<String>,
}

fn cert(kind: CertKind, basis: Basis, search: String) -> Certificate {
    Certificate {
        kind,
        verdict_basis: basis,
        scan_log: super::scan::ScanLog { search_space: search, ..Default::default() },
    }
}

/// Run the pipeline: hinted D constructions, local and sampled D searches,
/// F constructions, the exhaustive fixed-representative D scan, and the
/// clique scan. `cthulhu` needs an exhaustive not-D certificate and a not-F
/// certificate of exhaustive or necessary-condition grade.
pub fn classify(
    class: &ClassRack,
    hints: &Hints,
    budget: &Budget,
    checkpoint: Option<&dyn Checkpoint>,
) -> Result<Classification> {
    let opts = ScanOptions { cap: budget.pairs, orbit_cap: budget.orbit_cap, checkpoint: None };
    let mut log = Vec::new();
    let mut certificates = Vec::new();
    let done_d = |strategy: String, w: Box<DWitness>, c: Certificate, log: Vec<String>, mut certs: Vec<Certificate>| {
        certs.push(c);
        Classification {
            verdict: Verdict::D,
            basis: Some(Basis::Exhaustive),
            strategy,
            d_witness: Some(w),
            f_witness: None,
            certificates: certs,
            log,
        }
    };
    let mut strategies: Vec<Strategy> = hints.d_strategies.clone();
    for (name, sub) in &hints.local_subgroups {
        strategies.push(Strategy::Local { name: name.clone(), subgroup: sub.clone() });
    }
    strategies.push(Strategy::Sampled { seed: budget.seed, samples: budget.samples });
    for st in &strategies {
        let res = match find_d(class, st, opts) {
            Ok(r) => r,
            Err(e) => {
                log.push(format!("{}: not applicable ({e})", st.name()));
                continue;
            }
        };
        log.push(format!("{}: {} pairs", st.name(), res.certificate.scan_log.pairs_evaluated));
        if let Some(w) = res.witness {
            w.validate()?;
            return Ok(done_d(st.name(), w, res.certificate, log, certificates));
        }
    }
    for (name, reps, builder) in &hints.f_families {
        match check_f_family(reps, builder, budget.orbit_cap)? {
            Ok(w) => {
                w.validate().map_err(|f| crate::error::Error::Verification(f.to_string()))?;
                certificates.push(cert(CertKind::WitnessF, Basis::Exhaustive, format!("family {name}")));
                return Ok(Classification {
                    verdict: Verdict::F,
                    basis: Some(Basis::Exhaustive),
                    strategy: format!("family({name})"),
                    d_witness: None,
                    f_witness: Some(Box::new(w)),
                    certificates,
                    log,
                });
            }
            Err(f) => log.push(format!("family {name}: {f}")),
        }
    }
    if let Some((name, sub)) = hints.local_subgroups.first() {
        let (w, slog) = local_f(class, sub, opts)?;
        log.push(format!("local F ({name}): {} pairs, {} cliques", slog.pairs_evaluated, slog.cliques));
        if let Some(w) = w {
            w.validate().map_err(|f| crate::error::Error::Verification(f.to_string()))?;
            certificates.push(Certificate { kind: CertKind::WitnessF, verdict_basis: Basis::Exhaustive, scan_log: slog });
            return Ok(Classification {
                verdict: Verdict::F,
                basis: Some(Basis::Exhaustive),
                strategy: format!("local-clique({name})"),
                d_witness: None,
                f_witness: Some(Box::new(w)),
                certificates,
                log,
            });
        }
    }
    let not_d = match refute_d(class, ScanOptions { checkpoint, ..opts })? {
        Refutation::Witness(w, c) => {
            w.validate()?;
            return Ok(done_d("exhaustive".into(), w, c, log, certificates));
        }
        Refutation::Refuted(c) => c,
    };
    log.push(format!(
        "exhaustive D scan: {} pairs, basis {:?}",
        not_d.scan_log.pairs_evaluated, not_d.verdict_basis
    ));
    let not_d_ok = not_d.verdict_basis == Basis::Exhaustive;
    certificates.push(not_d);
    let not_f = match refute_f(class, opts)? {
        Refutation::Witness(w, c) => {
            w.validate().map_err(|f| crate::error::Error::Verification(f.to_string()))?;
            certificates.push(c);
            return Ok(Classification {
                verdict: Verdict::F,
                basis: Some(Basis::Exhaustive),
                strategy: "clique-scan".into(),
                d_witness: None,
                f_witness: Some(w),
                certificates,
                log,
            });
        }
        Refutation::Refuted(c) => c,
    };
    log.push(format!("clique scan: {} cliques, basis {:?}", not_f.scan_log.cliques, not_f.verdict_basis));
    let not_f_ok = matches!(not_f.verdict_basis, Basis::Exhaustive | Basis::NecessaryCondition);
    let basis = not_f.verdict_basis;
    certificates.push(not_f);
    let verdict = if not_d_ok && not_f_ok { Verdict::Cthulhu } else { Verdict::Unknown };
    Ok(Classification {
        verdict,
        basis: (verdict == Verdict::Cthulhu).then_some(basis),
        strategy: "refutation".into(),
        d_witness: None,
        f_witness: None,
        certificates,
        log,
    })
}
