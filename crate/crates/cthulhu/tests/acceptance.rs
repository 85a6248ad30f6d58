//! Desk-scale acceptance suite. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};

use cthulhu::catalog::{
    enumerate_labels, expected, gu3_witness, hints_for, regular_f_family, representative, split_label, two_two_pair,
    decomposition_type, verify_row, Coverage, RowStatus, UnipotentLabel,
};
use cthulhu::chevalley::{
    chevalley_suite, character_by_conjugation, orthogonal_short_pair, root_system, root_system_a, torus_family,
    torus_pair_witness, FamilyCase, FamilyOutcome, Realization, WitnessCase, CHEVALLEY_EXCLUDED,
};
use cthulhu::detect::{
    check_f_family, classify, d_pair, refute_d, refute_f, Basis, Budget, CertKind, ClassRack, DPair, Refutation,
    ScanOptions, Verdict,
};
use cthulhu::ffield::field_of_order;
use cthulhu::matgroup::{class_orbit, group_spec, subgroup_closure, Family, GroupSpec, Mat};
use cthulhu::rack::{conj_rack, SoberMode};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest class or subgroup any criterion enumerates.
const CAP: usize = 1 << 20;
/// Random pairs per group for the triple-conjugation identity.
const IDENTITY_PAIRS: usize = 10_000;
/// Torus samples per `(n, q)` for the commutation rule.
const TORUS_SAMPLES: usize = 100;
const SEED: u64 = 20_240_601;

type Outcome = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn sp(n: usize, q: u64) -> GroupSpec {
    group_spec(Family::Sp, 2 * n, q).unwrap()
}

fn label(s: &str) -> UnipotentLabel {
    s.parse().unwrap()
}

fn class_of(l: &str, n: usize, q: u64) -> ClassRack {
    ClassRack::new(&representative(&label(l), n, q).unwrap(), &sp(n, q), CAP).unwrap()
}

fn axioms_hold(c: &ClassRack) -> bool {
    c.rack.check_axioms().ok()
}

fn two_two_classes() -> Outcome {
    let (n, q) = (2, 3);
    let spec = sp(n, q);
    let splits = split_label(&label("(2^2)"), n, q, CAP).unwrap();
    ensure!(splits.len() == 2, "found {} classes", splits.len());
    let hints = hints_for(n, q).unwrap();
    let mut verdicts = Vec::new();
    let mut d_class = None;
    for s in &splits {
        let class = ClassRack::new(&s.rep, &spec, CAP).unwrap();
        ensure!(axioms_hold(&class), "rack axioms fail");
        let c = classify(&class, &hints, &Budget::default(), None).unwrap();
        match c.verdict {
            Verdict::D => {
                c.d_witness.as_ref().unwrap().validate().map_err(|e| e.to_string())?;
                d_class = Some(class);
            }
            Verdict::Cthulhu => {
                let has = |k: CertKind, ok: &[Basis]| {
                    c.certificates.iter().any(|x| x.kind == k && ok.contains(&x.verdict_basis))
                };
                ensure!(has(CertKind::NotD, &[Basis::Exhaustive]), "no exhaustive not-D certificate");
                ensure!(
                    has(CertKind::NotF, &[Basis::Exhaustive, Basis::NecessaryCondition]),
                    "no not-F certificate"
                );
            }
            v => return Err(format!("unexpected verdict {v:?}")),
        }
        verdicts.push(c.verdict);
    }
    verdicts.sort_by_key(|v| format!("{v:?}"));
    ensure!(verdicts == [Verdict::Cthulhu, Verdict::D], "verdicts {verdicts:?}");
    let p = two_two_pair().unwrap();
    let d = d_class.unwrap();
    ensure!(d.contains(&p.r) && d.contains(&p.s), "explicit pair is not in the D class");
    match d_pair(&p.r, &p.s, CAP).unwrap() {
        DPair::Witness(w) => w.validate().map_err(|e| e.to_string()),
        other => Err(format!("explicit pair gives {other:?}")),
    }
}

fn v2_squared_in_sp4_2() -> Outcome {
    let class = class_of("V(2)^2", 2, 2);
    ensure!(class.len() == 45, "class size {}", class.len());
    ensure!(axioms_hold(&class), "rack axioms fail");
    match refute_d(&class, ScanOptions::default()).unwrap() {
        Refutation::Refuted(c) => ensure!(c.verdict_basis == Basis::Exhaustive, "not-D basis {:?}", c.verdict_basis),
        Refutation::Witness(..) => return Err("refute_d found a witness".into()),
    }
    match refute_f(&class, ScanOptions::default()).unwrap() {
        Refutation::Refuted(c) => ensure!(
            matches!(c.verdict_basis, Basis::Exhaustive | Basis::NecessaryCondition),
            "not-F basis {:?}",
            c.verdict_basis
        ),
        Refutation::Witness(..) => return Err("refute_f found a witness".into()),
    }
    let c = classify(&class, &hints_for(2, 2).unwrap(), &Budget::default(), None).unwrap();
    ensure!(c.verdict == Verdict::Cthulhu, "verdict {:?}", c.verdict);
    Ok(())
}

fn transvection_like_classes() -> Outcome {
    for q in [2u64, 4] {
        let hints = hints_for(2, q).unwrap();
        for l in ["W(1)+V(2)", "W(2)"] {
            let class = class_of(l, 2, q);
            let want = (q.pow(4) - 1) as usize;
            ensure!(class.len() == want, "{l} at q = {q}: size {} != {want}", class.len());
            let c = classify(&class, &hints, &Budget::default(), None).unwrap();
            ensure!(c.verdict == Verdict::Cthulhu, "{l} at q = {q}: verdict {:?}", c.verdict);
        }
    }
    Ok(())
}

fn transvection_sizes() -> Outcome {
    for (n, q) in [(2usize, 3u64), (2, 5), (3, 3), (2, 2), (2, 4), (3, 2)] {
        let spec = sp(n, q);
        let t = Mat::elementary(&spec.field, 2 * n, 0, 2 * n - 1, 1);
        ensure!(spec.membership(&t).unwrap(), "transvection not in {}", spec.name());
        let orbit = class_orbit(&t, &spec, CAP).unwrap();
        let full = q.pow(2 * n as u32) - 1;
        let want = if q % 2 == 1 { full / 2 } else { full };
        ensure!(orbit.complete && orbit.len() as u64 == want, "{}: {} != {want}", spec.name(), orbit.len());
    }
    Ok(())
}

fn regular_family_sp4_4() -> Outcome {
    let spec = sp(2, 4);
    for which in 0..2 {
        let fam = regular_f_family(4, which).unwrap();
        ensure!(fam.reps.len() == 4, "{} representatives", fam.reps.len());
        let class = ClassRack::new(&fam.u, &spec, CAP).unwrap();
        ensure!(fam.reps.iter().all(|r| class.contains(r)), "representative outside the class");
        let w = check_f_family(&fam.reps, &fam.builder, CAP).unwrap().map_err(|f| f.to_string())?;
        w.validate().map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn gu3() -> Outcome {
    let r = gu3_witness().map_err(|e| e.to_string())?;
    ensure!(r.twist_is_scalar, "twist is not scalar");
    ensure!(r.regular_classes == 3, "{} regular classes", r.regular_classes);
    let w = &r.witness;
    w.validate().map_err(|e| e.to_string())?;
    let (x, y) = (w.r.mul(&w.s), w.s.mul(&w.r));
    ensure!(x.mul(&x) != y.mul(&y), "(rs)^2 = (sr)^2");
    let su = group_spec(Family::SU, 3, 2).unwrap();
    let closure = subgroup_closure(&[w.r.clone(), w.s.clone()], CAP).unwrap();
    ensure!(closure.is_complete(), "closure incomplete");
    ensure!(closure.elements().iter().all(|g| su.membership(g).unwrap()), "<r, s> leaves SU_3(2)");
    let orbit = class_orbit(&w.r, &su, CAP).unwrap();
    ensure!(orbit.complete && !orbit.contains(&w.s), "s is conjugate to r");
    Ok(())
}

fn regular_classes_sp4_2() -> Outcome {
    let splits = split_label(&label("V(4)"), 2, 2, CAP).unwrap();
    ensure!(splits.len() == 2, "{} classes", splits.len());
    let spec = sp(2, 2);
    let mut orders = BTreeSet::new();
    for s in &splits {
        let orbit = class_orbit(&s.rep, &spec, CAP).unwrap();
        ensure!(orbit.len() == 90, "class size {}", orbit.len());
        let rack = conj_rack(&orbit.elems).unwrap();
        ensure!(rack.check_axioms().ok(), "rack axioms fail");
        orders.insert(rack.inn_order());
    }
    let want: BTreeSet<BigUint> = [720u32, 360].into_iter().map(BigUint::from).collect();
    ensure!(orders == want, "inner group orders {orders:?}");
    Ok(())
}

fn chevalley_calculus() -> Outcome {
    for (n, q) in [(2, 2), (2, 3), (3, 2), (3, 3), (2, 5)] {
        let r = chevalley_suite(n, q, TORUS_SAMPLES, SEED).unwrap();
        ensure!(r.torus_samples == TORUS_SAMPLES && r.ok(), "C{n} q = {q}: {} torus failures", r.torus_failures);
    }
    for q in [2, 4] {
        ensure!(orthogonal_short_pair(q).unwrap().degenerate, "orthogonal pair does not commute at q = {q}");
    }
    let d = orthogonal_short_pair(3).unwrap();
    ensure!(!d.degenerate && d.c11.is_some_and(|c| c != 0), "c11 vanishes at q = 3");
    for n in [2, 3] {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            let r = chevalley_suite(n, q, 0, SEED).unwrap();
            ensure!(r.product_form_exhaustive, "product form not exhaustive for C{n} at q = {q}");
        }
    }
    Ok(())
}

fn torus_witnesses() -> Outcome {
    for n in [2, 3] {
        let rs = root_system(n).unwrap();
        for q in [5u64, 7, 9] {
            let field = field_of_order(q).unwrap();
            let re = Realization::new(rs.clone(), &field);
            for a in &rs.positive {
                for b in &rs.positive {
                    if a == b || !rs.is_root(&a.add(b)) {
                        continue;
                    }
                    let w = torus_pair_witness(&rs, a, b, q, WitnessCase::Chevalley).map_err(|e| e.to_string())?;
                    let va = character_by_conjugation(&re, &w.alpha, &w.t.matrix).unwrap();
                    let vb = character_by_conjugation(&re, &w.beta, &w.t.matrix).unwrap();
                    ensure!(va != 1 && va != vb, "C{n} q = {q}: alpha(t) = {va}, beta(t) = {vb}");
                    ensure!((va, vb) == (w.alpha_value, w.beta_value), "stored character values differ");
                }
            }
        }
    }
    let rs = root_system(2).unwrap();
    let (a, b) = (&rs.simple[0], &rs.simple[1]);
    for q in [8u64, 9, 11, 13] {
        let out = torus_family(&rs, a, b, q, &FamilyCase::Chevalley).unwrap();
        let f = out.family().ok_or(format!("family refused at q = {q}"))?;
        ensure!(f.matrix_verified && f.ts.len() == 4, "family at q = {q} unverified");
        let field = field_of_order(q).unwrap();
        let re = Realization::new(rs.clone(), &field);
        let vals: Vec<(u32, u32)> = f
            .ts
            .iter()
            .map(|t| {
                (character_by_conjugation(&re, a, &t.matrix).unwrap(), character_by_conjugation(&re, b, &t.matrix).unwrap())
            })
            .collect();
        for i in 0..4 {
            for j in i + 1..4 {
                let (ai, bi) = vals[i];
                let (aj, bj) = vals[j];
                ensure!(field.mul(ai, bj) != field.mul(aj, bi), "pair ({i}, {j}) collides at q = {q}");
            }
        }
    }
    for q in CHEVALLEY_EXCLUDED {
        match torus_family(&rs, a, b, q, &FamilyCase::Chevalley).unwrap() {
            FamilyOutcome::Refused(r) => ensure!(r.collision.is_some(), "no collision exhibited at q = {q}"),
            FamilyOutcome::Family(_) => return Err(format!("family accepted at excluded q = {q}")),
        }
    }
    let a2 = root_system_a(3).unwrap();
    torus_pair_witness(&a2, &a2.simple[0], &a2.simple[1], 3, WitnessCase::Su3).map_err(|e| e.to_string())?;
    for q in [3u64, 4] {
        let out = torus_family(&a2, &a2.simple[0], &a2.simple[1], q, &FamilyCase::Su3).unwrap();
        ensure!(out.family().is_some_and(|f| f.pairs_checked == 6), "SU3 family at q = {q}");
    }
    Ok(())
}

/// Closed, non-abelian and decomposable, recomputed from the matrices.
fn breaks_soberness(set: &[Mat]) -> bool {
    let invs: Vec<Mat> = set.iter().map(|m| m.inverse().unwrap()).collect();
    let closed = set.iter().zip(&invs).all(|(x, xi)| set.iter().all(|y| set.contains(&y.conj(x, xi))));
    let abelian = set.iter().all(|x| set.iter().all(|y| x.commutes_with(y)));
    let mut orbit = vec![set[0].clone()];
    let mut k = 0;
    while k < orbit.len() {
        for (x, xi) in set.iter().zip(&invs) {
            let y = orbit[k].conj(x, xi);
            if !orbit.contains(&y) {
                orbit.push(y);
            }
        }
        k += 1;
    }
    closed && !abelian && orbit.len() < set.len()
}

fn soberness() -> Outcome {
    let mut broken = Vec::new();
    for (q, mode) in [(3, SoberMode::Exhaustive), (4, SoberMode::Exhaustive), (5, SoberMode::Pairs), (7, SoberMode::Pairs), (9, SoberMode::Pairs)] {
        let spec = group_spec(Family::SL, 2, q).unwrap();
        let u = Mat::elementary(&spec.field, 2, 0, 1, 1);
        let orbit = class_orbit(&u, &spec, CAP).unwrap();
        let rack = conj_rack(&orbit.elems).unwrap();
        ensure!(rack.check_axioms().ok(), "rack axioms fail for SL_2({q})");
        let r = rack.sober_check(mode).unwrap();
        if let Some(bad) = r.counterexample {
            let set: Vec<Mat> = bad.iter().map(|&i| orbit.elems[i].clone()).collect();
            ensure!(breaks_soberness(&set), "SL_2({q}): reported counterexample does not recheck");
            broken.push(format!("SL_2({q}) has a decomposable non-abelian subrack of size {}", set.len()));
        }
    }
    ensure!(broken.is_empty(), "{}", broken.join("; "));
    Ok(())
}

const SPLIT_GROUPS: [(usize, u64); 4] = [(2, 2), (2, 3), (2, 4), (3, 2)];

fn round_trip_and_splits() -> Outcome {
    for n in [2, 3, 4] {
        for q in [2, 4] {
            let spec = sp(n, q);
            for l in enumerate_labels(n, q).unwrap() {
                let u = representative(&l, n, q).unwrap();
                let back = decomposition_type(&u, &spec).unwrap();
                ensure!(back == l, "{} round-trips to {back} in {}", l, spec.name());
            }
        }
    }
    for (n, q) in SPLIT_GROUPS {
        for l in enumerate_labels(n, q).unwrap() {
            let Coverage::Covered(e) = expected(&l, n, q).unwrap() else { continue };
            let Some(want) = e.class_count else { continue };
            let got = split_label(&l, n, q, CAP).unwrap().len();
            ensure!(got == want, "{l} in Sp_{}({q}): {got} classes, expected {want}", 2 * n);
        }
    }
    Ok(())
}

fn table_end_to_end() -> Outcome {
    for (n, q) in SPLIT_GROUPS {
        for l in enumerate_labels(n, q).unwrap() {
            let row = verify_row(&l, n, q, &Budget::default()).unwrap();
            ensure!(row.status == RowStatus::Match, "{l} in {}: {:?}", row.group, row.status);
        }
    }
    Ok(())
}

fn random_elem(spec: &GroupSpec, rng: &mut ChaCha8Rng) -> Mat {
    let len = rng.random_range(4..32);
    (0..len).fold(spec.identity(), |acc, _| acc.mul(&spec.generators[rng.random_range(0..spec.generators.len())]))
}

fn cli_report(args: &[&str], path: &std::path::Path) -> Vec<u8> {
    let mut argv = vec!["cthulhu"];
    argv.extend_from_slice(args);
    argv.extend_from_slice(&["--no-cache", "--output", path.to_str().unwrap()]);
    let code = cthulhu::cli::run(argv);
    assert!(code == 0 || code == 2, "exit code {code}");
    std::fs::read(path).unwrap()
}

fn property_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for (f, m, q) in [(Family::Sp, 4, 2), (Family::Sp, 4, 3), (Family::Sp, 6, 2), (Family::SL, 2, 5), (Family::SU, 3, 2)] {
        let spec = group_spec(f, m, q).unwrap();
        for _ in 0..IDENTITY_PAIRS {
            let (r, s) = (random_elem(&spec, &mut rng), random_elem(&spec, &mut rng));
            let (ri, si) = (r.inverse().unwrap(), s.inverse().unwrap());
            let t = r.mul(&s.mul(&r.mul(&s).mul(&ri)).mul(&si)).mul(&ri);
            let (x, y) = (r.mul(&s), s.mul(&r));
            ensure!((t == s) == (x.mul(&x) == y.mul(&y)), "identity fails in {}", spec.name());
        }
    }
    let spec = sp(2, 3);
    for l in ["(1^2,2)", "(2^2)", "(4)"] {
        let class = class_of(l, 2, 3);
        ensure!(axioms_hold(&class), "rack axioms fail for {l}");
        let g = random_elem(&spec, &mut rng);
        let moved = ClassRack::new(&class.rep().conj(&g, &g.inverse().unwrap()), &spec, CAP).unwrap();
        let summary = |c: &ClassRack| match refute_d(c, ScanOptions::default()).unwrap() {
            Refutation::Refuted(c) => (false, c.verdict_basis, c.scan_log.pairs_covered),
            Refutation::Witness(_, c) => (true, c.verdict_basis, 0),
        };
        let (a, b) = (summary(&class), summary(&moved));
        ensure!(a.0 == b.0 && a.1 == b.1, "{l}: refute_d differs after conjugation");
        for _ in 0..20 {
            let (i, j) = (rng.random_range(0..class.len()), rng.random_range(0..class.len()));
            let h = random_elem(&spec, &mut rng);
            let hi = h.inverse().unwrap();
            let kind = |p: DPair| std::mem::discriminant(&p);
            let before = kind(d_pair(class.elem(i), class.elem(j), CAP).unwrap());
            let after = kind(d_pair(&class.elem(i).conj(&h, &hi), &class.elem(j).conj(&h, &hi), CAP).unwrap());
            ensure!(before == after, "{l}: d_pair differs after conjugation");
        }
    }
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["classify", "--family", "sp", "--n", "2", "--q", "3", "--label", "(2^2)", "--seed", "5"][..],
        &["witness", "gu3"][..],
        &["refute", "--n", "2", "--q", "2", "--label", "V(2)^2"][..],
    ] {
        let a = cli_report(args, &dir.path().join("a.json"));
        let b = cli_report(args, &dir.path().join("b.json"));
        ensure!(!a.is_empty() && a == b, "reports differ for {args:?}");
    }
    Ok(())
}

/// Criteria that cannot pass because the claim they check is false.
const EXPECTED_RED: &[usize] = &[10];

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("(2^2) in Sp_4(3): one D class and one cthulhu class", two_two_classes),
        ("V(2)^2 in Sp_4(2): size 45, refuted both ways, cthulhu", v2_squared_in_sp4_2),
        ("W(1)+V(2) and W(2) in Sp_4(2), Sp_4(4): size q^4-1, cthulhu", transvection_like_classes),
        ("transvection class sizes", transvection_sizes),
        ("regular classes of Sp_4(4): type F torus translate family", regular_family_sp4_4),
        ("GU_3(2) regular class witness", gu3),
        ("regular classes of Sp_4(2): sizes 90, inner groups 720 and 360", regular_classes_sp4_2),
        ("Chevalley commutation, degeneracy and product form", chevalley_calculus),
        ("torus pair witnesses and torus families", torus_witnesses),
        ("soberness of unipotent classes of SL_2(q)", soberness),
        ("label round trip and class splitting", round_trip_and_splits),
        ("expected verdict table for Sp_4(2), Sp_4(3), Sp_4(4), Sp_6(2)", table_end_to_end),
        ("property suite: identity, axioms, equivariance, determinism", property_suite),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match out {
            Ok(()) => println!("PASS criterion {:>2}: {name} ({secs:.1}s)", i + 1),
            Err(e) => {
                println!("FAIL criterion {:>2}: {name} ({secs:.1}s): {e}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    // The unipotent class of SL_2(9) is isomorphic to the 3-cycles of A_6,
    // whose 8 three-cycles on four points form a decomposable non-abelian
    // subrack, so the soberness claim at q = 9 cannot hold.
    assert_eq!(failed, EXPECTED_RED, "criteria failing other than the known-unattainable set");
}
