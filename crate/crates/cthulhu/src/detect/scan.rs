use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chevalley::{ab_property, torus_pair_witness, Realization, Root, WitnessCase};
use crate::error::{Error, Result};
use crate::matgroup::Mat;

use super::class::ClassRack;
use super::witness::{check_f_family, d_pair, distinct_generated_orbits, f_edge, DPair, DWitness, FBuilder, FWitness};

/// Pair evaluations between checkpoints.
pub const CHECKPOINT_EVERY: u64 = 100_000;
/// Schreier generators used to reduce fixed-representative scans.
pub const CENTRALIZER_GENS: usize = 24;
/// Sampled pairs evaluated together before looking for a witness.
const SAMPLE_CHUNK: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertKind {
    NotD,
    NotF,
    WitnessD,
    WitnessF,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    Exhaustive,
    NecessaryCondition,
    Sampled,
}

/// Counters and parameters describing one search.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanLog {
    pub search_space: String,
    pub class_size: usize,
    pub pairs_evaluated: u64,
    /// Class elements accounted for by the scanned orbit representatives.
    pub pairs_covered: u64,
    pub orbit_reps: usize,
    pub centralizer_gens: usize,
    pub degenerate: u64,
    pub same_orbit: u64,
    pub failed: u64,
    pub neighbours: usize,
    pub cliques: u64,
    pub pruning: Vec<String>,
    pub seed: Option<u64>,
    pub cap: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertKind,
    pub verdict_basis: Basis,
    pub scan_log: ScanLog,
}

/// Resume state of a fixed-representative scan.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanProgress {
    pub next: usize,
    pub evaluated: u64,
    pub covered: u64,
    pub degenerate: u64,
    pub same_orbit: u64,
    pub failed: u64,
}

/// Persistence hook for long scans.
pub trait Checkpoint: Sync {
    fn load(&self) -> Option<ScanProgress>;
    fn save(&self, progress: &ScanProgress) -> Result<()>;
}

#[derive(Clone, Copy)]
pub struct ScanOptions<'a> {
    /// Maximum pair evaluations in this call.
    pub cap: u64,
    /// Maximum size of a single `<r, s>`-orbit.
    pub orbit_cap: usize,
    pub checkpoint: Option<&'a dyn Checkpoint>,
}

impl Default for ScanOptions<'_> {
    fn default() -> Self {
        ScanOptions { cap: 10_000_000, orbit_cap: 1_000_000, checkpoint: None }
    }
}

/// Either a witness or a refutation certificate.
#[derive(Clone, Debug)]
pub enum Refutation<W> {
    Witness(Box<W>, Certificate),
    Refuted(Certificate),
}

fn tally(log: &mut ScanProgress, out: &DPair) {
    log.evaluated += 1;
    match out {
        DPair::Degenerate => log.degenerate += 1,
        DPair::SameOrbit => log.same_orbit += 1,
        DPair::Fail { .. } => log.failed += 1,
        DPair::Witness(_) => {}
    }
}

/// Scan the fixed representative `r` against one representative of each
/// orbit of a subgroup of `C(r)` on the class. Conjugation is a rack
/// automorphism, so a witness exists iff one exists among these pairs.
pub fn refute_d(class: &ClassRack, opts: ScanOptions) -> Result<Refutation<DWitness>> {
    let hgens = class.centralizer_gens(CENTRALIZER_GENS);
    let orbits = class.orbits_under(&hgens);
    let covered: u64 = orbits.iter().map(|o| o.len() as u64).sum();
    if covered != class.len() as u64 {
        return Err(Error::Verification("centralizer orbits do not partition the class".into()));
    }
    let r = class.rep().clone();
    let mut prog = opts.checkpoint.and_then(|c| c.load()).unwrap_or_default();
    let mut log = ScanLog {
        search_space: format!("r = class representative, s over {} centralizer-orbit representatives", orbits.len()),
        class_size: class.len(),
        orbit_reps: orbits.len(),
        centralizer_gens: hgens.len(),
        pruning: vec![
            "conjugation equivariance: r fixed".into(),
            "C(r)-orbit reduction via Schreier generators".into(),
            "early exit when s enters the <r,s>-orbit of r".into(),
        ],
        cap: opts.cap,
        ..ScanLog::default()
    };
    let budget_end = prog.evaluated.saturating_add(opts.cap);
    let chunk = CHECKPOINT_EVERY as usize;
    while prog.next < orbits.len() {
        if prog.evaluated >= budget_end {
            break;
        }
        let room = (budget_end - prog.evaluated) as usize;
        let end = (prog.next + chunk.min(room)).min(orbits.len());
        let results: Vec<Result<DPair>> = orbits[prog.next..end]
            .par_iter()
            .map(|o| d_pair(&r, class.elem(o[0]), opts.orbit_cap))
            .collect();
        for (k, res) in results.into_iter().enumerate() {
            let out = res?;
            tally(&mut prog, &out);
            prog.covered += orbits[prog.next + k].len() as u64;
            if let DPair::Witness(w) = out {
                fill(&mut log, &prog);
                log.pairs_covered = prog.covered;
                return Ok(Refutation::Witness(
                    w,
                    Certificate { kind: CertKind::WitnessD, verdict_basis: Basis::Exhaustive, scan_log: log },
                ));
            }
        }
        prog.next = end;
        if let Some(c) = opts.checkpoint {
            c.save(&prog)?;
        }
    }
    fill(&mut log, &prog);
    let complete = prog.next == orbits.len() && prog.failed == 0 && prog.covered == class.len() as u64;
    Ok(Refutation::Refuted(Certificate {
        kind: CertKind::NotD,
        verdict_basis: if complete { Basis::Exhaustive } else { Basis::Sampled },
        scan_log: log,
    }))
}

fn fill(log: &mut ScanLog, p: &ScanProgress) {
    log.pairs_evaluated = p.evaluated;
    log.pairs_covered = p.covered;
    log.degenerate = p.degenerate;
    log.same_orbit = p.same_orbit;
    log.failed = p.failed;
}

/// Neighbours of the representative in the compatibility graph, computed on
/// centralizer-orbit representatives and spread over their orbits.
fn neighbourhood(class: &ClassRack, orbits: &[Vec<usize>], cap: usize) -> Result<(Vec<usize>, u64, bool)> {
    let r = class.rep();
    let edges: Vec<Result<Option<bool>>> =
        orbits.par_iter().map(|o| f_edge(r, class.elem(o[0]), cap)).collect();
    let mut nbrs = Vec::new();
    let mut capped = false;
    for (o, e) in orbits.iter().zip(edges) {
        match e? {
            Some(true) => nbrs.extend_from_slice(o),
            Some(false) => {}
            None => capped = true,
        }
    }
    nbrs.sort_unstable();
    Ok((nbrs, orbits.len() as u64, capped))
}

/// Search for four pairwise adjacent vertices `r, a, b, c` of the
/// compatibility graph. A clique whose members lie in distinct orbits of the
/// group they generate is a type F witness; absence of 4-cliques refutes F.
pub fn refute_f(class: &ClassRack, opts: ScanOptions) -> Result<Refutation<FWitness>> {
    let hgens = class.centralizer_gens(CENTRALIZER_GENS);
    let orbits = class.orbits_under(&hgens);
    let (nbrs, evaluated, mut capped) = neighbourhood(class, &orbits, opts.orbit_cap)?;
    let mut log = ScanLog {
        search_space: "4-cliques through the class representative".into(),
        class_size: class.len(),
        orbit_reps: orbits.len(),
        centralizer_gens: hgens.len(),
        pairs_evaluated: evaluated,
        pairs_covered: class.len() as u64,
        neighbours: nbrs.len(),
        pruning: vec![
            "vertex transitivity: cliques contain r".into(),
            "neighbour rows by translating the row of r".into(),
            "second vertex up to centralizer orbits".into(),
        ],
        cap: opts.cap,
        ..ScanLog::default()
    };
    let pos = ClassRack::positions(&nbrs);
    let nbr_set: HashSet<usize> = nbrs.iter().copied().collect();
    // adjacency among neighbours: b ~ a iff u_a^{-1} b u_a is a neighbour of r
    let adj: Vec<Vec<usize>> = nbrs
        .par_iter()
        .map(|&a| {
            let (_, ua_inv) = class.conjugator(a);
            let ua = ua_inv.inverse().expect("group element");
            nbrs.iter()
                .copied()
                .filter(|&b| {
                    b != a && {
                        let y = class.elem(b).conj(&ua_inv, &ua);
                        class.index_of(&y).is_some_and(|j| nbr_set.contains(&j))
                    }
                })
                .map(|b| pos[&b])
                .collect()
        })
        .collect();
    log.pairs_evaluated += (nbrs.len() * nbrs.len()) as u64;
    let adj_sets: Vec<HashSet<usize>> = adj.iter().map(|v| v.iter().copied().collect()).collect();
    let first: Vec<usize> = orbits.iter().map(|o| o[0]).filter(|i| nbr_set.contains(i)).collect();
    let r = class.rep().clone();
    for &a in &first {
        let pa = pos[&a];
        for &pb in &adj[pa] {
            for &pc in &adj[pa] {
                if pc <= pb || !adj_sets[pb].contains(&pc) {
                    continue;
                }
                log.cliques += 1;
                if log.cliques > opts.cap {
                    capped = true;
                    break;
                }
                let reps = vec![r.clone(), class.elem(a).clone(), class.elem(nbrs[pb]).clone(), class.elem(nbrs[pc]).clone()];
                match distinct_generated_orbits(&reps, opts.orbit_cap)? {
                    Some(true) => {
                        let built = check_f_family(&reps, &FBuilder::SubgroupOrbits(reps.clone()), opts.orbit_cap)?;
                        let w = built.map_err(|f| Error::Verification(format!("clique family rejected: {f}")))?;
                        return Ok(Refutation::Witness(
                            Box::new(w),
                            Certificate { kind: CertKind::WitnessF, verdict_basis: Basis::Exhaustive, scan_log: log },
                        ));
                    }
                    Some(false) => {}
                    None => capped = true,
                }
            }
        }
    }
    let basis = if capped {
        Basis::Sampled
    } else if log.cliques == 0 {
        Basis::NecessaryCondition
    } else {
        log.pruning.push("every 4-clique has two members in one generated orbit".into());
        Basis::Exhaustive
    };
    Ok(Refutation::Refuted(Certificate { kind: CertKind::NotF, verdict_basis: basis, scan_log: log }))
}

/// Search strategies for [`find_d`].
#[derive(Clone, Debug)]
pub enum Strategy {
    /// `r = u`, `s = t u t^{-1}` with `t` from the torus witness for
    /// `(alpha, beta)`; needs the alpha-beta support condition on `u`.
    Torus { realization: Realization, alpha: Root, beta: Root, u: Mat },
    /// `r = x_1 y_1`, `s = x_2 y_2` from a non-commuting pair and a
    /// commuting pair in commuting subgroups.
    Product { x: (Mat, Mat), y: (Mat, Mat) },
    /// All pairs from the class intersected with a subgroup.
    Local { name: String, subgroup: Vec<Mat> },
    /// Fixed `r` against seeded random `s`.
    Sampled { seed: u64, samples: usize },
    Exhaustive,
}

impl Strategy {
    pub fn name(&self) -> String {
        match self {
            Strategy::Torus { .. } => "torus".into(),
            Strategy::Product { .. } => "product".into(),
            Strategy::Local { name, .. } => format!("local({name})"),
            Strategy::Sampled { .. } => "sampled".into(),
            Strategy::Exhaustive => "exhaustive".into(),
        }
    }
}

/// Outcome of [`find_d`]: a witness, or the log of an unsuccessful search.
#[derive(Clone, Debug)]
pub struct DSearch {
    pub witness: Option<Box<DWitness>>,
    pub certificate: Certificate,
}

fn pair_in_class(class: &ClassRack, r: &Mat, s: &Mat) -> Result<()> {
    if !class.contains(r) || !class.contains(s) {
        return Err(Error::Precondition("strategy produced elements outside the class".into()));
    }
    Ok(())
}

pub fn find_d(class: &ClassRack, strategy: &Strategy, opts: ScanOptions) -> Result<DSearch> {
    let mut log = ScanLog { class_size: class.len(), cap: opts.cap, ..ScanLog::default() };
    let single = |log: &mut ScanLog, r: &Mat, s: &Mat| -> Result<Option<Box<DWitness>>> {
        pair_in_class(class, r, s)?;
        let mut p = ScanProgress::default();
        let out = d_pair(r, s, opts.orbit_cap)?;
        tally(&mut p, &out);
        fill(log, &p);
        Ok(match out {
            DPair::Witness(w) => Some(w),
            _ => None,
        })
    };
    let witness = match strategy {
        Strategy::Torus { realization, alpha, beta, u } => {
            log.search_space = format!("torus conjugate for ({alpha}, {beta})");
            if !ab_property(realization, u, alpha, beta, 0)? {
                return Err(Error::Precondition("u lacks the alpha-beta support condition".into()));
            }
            let q = realization.field.q() as u64;
            let w = torus_pair_witness(&realization.rs, alpha, beta, q, WitnessCase::Chevalley)?;
            let t = &w.t.matrix;
            let s = u.conj(t, &t.inverse().expect("torus element"));
            single(&mut log, u, &s)?
        }
        Strategy::Product { x, y } => {
            log.search_space = "product of a non-commuting and a commuting pair".into();
            if !x.0.commutes_with(&y.0) || !x.1.commutes_with(&y.1) {
                return Err(Error::Precondition("product factors must commute".into()));
            }
            if x.0.commutes_with(&x.1) || y.0 == y.1 || !y.0.commutes_with(&y.1) {
                return Err(Error::Precondition("need x1, x2 non-commuting and y1 != y2 commuting".into()));
            }
            let r = x.0.mul(&y.0);
            let s = x.1.mul(&y.1);
            single(&mut log, &r, &s)?
        }
        Strategy::Local { name, subgroup } => {
            let members = class.intersect(subgroup);
            log.search_space = format!("pairs in the class ∩ {name} ({} elements)", members.len());
            let mut p = ScanProgress::default();
            let mut found = None;
            'outer: for (k, &i) in members.iter().enumerate() {
                let rest = &members[k + 1..];
                let room = opts.cap.saturating_sub(p.evaluated) as usize;
                if room == 0 {
                    break;
                }
                let rest = &rest[..rest.len().min(room)];
                let outs: Vec<Result<DPair>> =
                    rest.par_iter().map(|&j| d_pair(class.elem(i), class.elem(j), opts.orbit_cap)).collect();
                for out in outs {
                    let out = out?;
                    tally(&mut p, &out);
                    if let DPair::Witness(w) = out {
                        found = Some(w);
                        break 'outer;
                    }
                }
            }
            fill(&mut log, &p);
            found
        }
        Strategy::Sampled { seed, samples } => {
            log.search_space = format!("fixed r against {samples} seeded random s");
            log.seed = Some(*seed);
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let n = (*samples as u64).min(opts.cap) as usize;
            let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..class.len())).collect();
            let mut p = ScanProgress::default();
            let mut found = None;
            'chunks: for chunk in idx.chunks(SAMPLE_CHUNK) {
                let outs: Vec<Result<DPair>> =
                    chunk.par_iter().map(|&j| d_pair(class.rep(), class.elem(j), opts.orbit_cap)).collect();
                for out in outs {
                    let out = out?;
                    tally(&mut p, &out);
                    if let DPair::Witness(w) = out {
                        found = Some(w);
                        break 'chunks;
                    }
                }
            }
            fill(&mut log, &p);
            found
        }
        Strategy::Exhaustive => {
            return Ok(match refute_d(class, opts)? {
                Refutation::Witness(w, c) => DSearch { witness: Some(w), certificate: c },
                Refutation::Refuted(c) => DSearch { witness: None, certificate: c },
            });
        }
    };
    let (kind, basis) = match &witness {
        Some(_) => (CertKind::WitnessD, Basis::Exhaustive),
        None => (CertKind::NotD, Basis::Sampled),
    };
    if let Some(w) = &witness {
        pair_in_class(class, &w.r, &w.s)?;
    }
    Ok(DSearch { witness, certificate: Certificate { kind, verdict_basis: basis, scan_log: log } })
}

/// Look for a type F family among the class elements inside a subgroup: a
/// 4-clique of the compatibility graph whose members lie in distinct orbits
/// of the group they generate.
pub fn local_f(class: &ClassRack, subgroup: &[Mat], opts: ScanOptions) -> Result<(Option<FWitness>, ScanLog)> {
    let members = class.intersect(subgroup);
    let m = members.len();
    let mut log = ScanLog {
        search_space: format!("4-cliques in the class ∩ subgroup ({m} elements)"),
        class_size: class.len(),
        cap: opts.cap,
        ..ScanLog::default()
    };
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect();
    if pairs.len() as u64 > opts.cap {
        log.pruning.push("skipped: pair count above cap".into());
        return Ok((None, log));
    }
    let edges: Vec<Result<Option<bool>>> = pairs
        .par_iter()
        .map(|&(a, b)| f_edge(class.elem(members[a]), class.elem(members[b]), opts.orbit_cap))
        .collect();
    log.pairs_evaluated = pairs.len() as u64;
    let mut adj = vec![HashSet::new(); m];
    for (&(a, b), e) in pairs.iter().zip(edges) {
        if e? == Some(true) {
            adj[a].insert(b);
            adj[b].insert(a);
        }
    }
    for a in 0..m {
        let mut na: Vec<usize> = adj[a].iter().copied().filter(|&b| b > a).collect();
        na.sort_unstable();
        for (ib, &b) in na.iter().enumerate() {
            for (ic, &c) in na.iter().enumerate().skip(ib + 1) {
                if !adj[b].contains(&c) {
                    continue;
                }
                for &d in &na[ic + 1..] {
                    if !adj[b].contains(&d) || !adj[c].contains(&d) {
                        continue;
                    }
                    log.cliques += 1;
                    let reps: Vec<Mat> = [a, b, c, d].iter().map(|&k| class.elem(members[k]).clone()).collect();
                    if distinct_generated_orbits(&reps, opts.orbit_cap)? == Some(true) {
                        let w = check_f_family(&reps, &FBuilder::SubgroupOrbits(reps.clone()), opts.orbit_cap)?
                            .map_err(|f| Error::Verification(format!("clique family rejected: {f}")))?;
                        return Ok((Some(w), log));
                    }
                }
            }
        }
    }
    Ok((None, log))
}

#[cfg(test)]
mod tests {
    use std::sync::Mutex;

    use super::*;
    use crate::catalog::{representative, unipotent_radical};
    use crate::matgroup::{group_spec, Family};

    fn class(label: &str, n: usize, q: u64) -> ClassRack {
        let spec = group_spec(Family::Sp, 2 * n, q).unwrap();
        ClassRack::new(&representative(&label.parse().unwrap(), n, q).unwrap(), &spec, 1 << 20).unwrap()
    }

    #[derive(Default)]
    struct MemCheckpoint(Mutex<Option<ScanProgress>>);

    impl Checkpoint for MemCheckpoint {
        fn load(&self) -> Option<ScanProgress> {
            self.0.lock().unwrap().clone()
        }
        fn save(&self, p: &ScanProgress) -> Result<()> {
            *self.0.lock().unwrap() = Some(p.clone());
            Ok(())
        }
    }

    #[test]
    fn v2_squared_is_refuted_both_ways() {
        let c = class("V(2)^2", 2, 2);
        assert_eq!(c.len(), 45);
        let Refutation::Refuted(d) = refute_d(&c, ScanOptions::default()).unwrap() else { panic!("D witness") };
        assert_eq!(d.verdict_basis, Basis::Exhaustive);
        assert_eq!(d.scan_log.pairs_covered, 45);
        let Refutation::Refuted(f) = refute_f(&c, ScanOptions::default()).unwrap() else { panic!("F witness") };
        assert!(matches!(f.verdict_basis, Basis::Exhaustive | Basis::NecessaryCondition));
    }

    #[test]
    fn regular_class_has_d_witness_in_u() {
        let c = class("(4)", 2, 3);
        let st = Strategy::Local { name: "U".into(), subgroup: unipotent_radical(2, 3).unwrap() };
        let found = find_d(&c, &st, ScanOptions::default()).unwrap();
        let w = found.witness.expect("witness");
        w.validate().unwrap();
        assert!(c.contains(&w.r) && c.contains(&w.s));
    }

    #[test]
    fn sampled_search_is_seeded() {
        let c = class("W(1)+V(4)", 3, 2);
        let run = |seed| {
            let st = Strategy::Sampled { seed, samples: 64 };
            find_d(&c, &st, ScanOptions::default()).unwrap().witness.map(|w| (w.r.clone(), w.s.clone()))
        };
        assert_eq!(run(3), run(3));
    }

    #[test]
    fn scan_resumes_from_checkpoint() {
        let c = class("(2^2)", 2, 3);
        let whole = match refute_d(&c, ScanOptions::default()).unwrap() {
            Refutation::Refuted(cert) | Refutation::Witness(_, cert) => cert,
        };
        let cp = MemCheckpoint::default();
        let mut last = None;
        for _ in 0..100 {
            let opts = ScanOptions { cap: 2, checkpoint: Some(&cp), ..ScanOptions::default() };
            let out = refute_d(&c, opts).unwrap();
            let done = match &out {
                Refutation::Witness(..) => true,
                Refutation::Refuted(cert) => cert.verdict_basis == Basis::Exhaustive,
            };
            last = Some(out);
            if done {
                break;
            }
        }
        let resumed = match last.unwrap() {
            Refutation::Refuted(cert) | Refutation::Witness(_, cert) => cert,
        };
        assert_eq!(resumed.kind, whole.kind);
        assert_eq!(resumed.verdict_basis, whole.verdict_basis);
        assert_eq!(resumed.scan_log.pairs_evaluated, whole.scan_log.pairs_evaluated);
    }

    #[test]
    fn centralizer_generators_fix_the_representative() {
        let c = class("W(2)", 2, 4);
        for h in c.centralizer_gens(CENTRALIZER_GENS) {
            assert!(h.commutes_with(c.rep()));
        }
        for i in [0, 7, c.len() - 1] {
            let (g, gi) = c.conjugator(i);
            assert_eq!(&c.rep().conj(&g, &gi), c.elem(i));
        }
    }
}
