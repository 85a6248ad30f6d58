use std::sync::OnceLock;

use cthulhu::catalog::{decomposition_type, enumerate_labels, representative, unipotent_generators};
use cthulhu::detect::{classify, d_pair, Budget, ClassRack, DPair, Hints};
use cthulhu::ffield::field_of_order;
use cthulhu::matgroup::{class_orbit, group_spec, jordan_partition, Family, GroupSpec, Mat};
use cthulhu::rack::conj_rack;
use proptest::prelude::*;

fn specs() -> &'static [GroupSpec] {
    static S: OnceLock<Vec<GroupSpec>> = OnceLock::new();
    S.get_or_init(|| {
        [(Family::Sp, 4, 2), (Family::Sp, 4, 3), (Family::Sp, 4, 4), (Family::SL, 2, 5), (Family::SU, 3, 3)]
            .into_iter()
            .map(|(f, n, q)| group_spec(f, n, q).unwrap())
            .collect()
    })
}

fn word(spec: &GroupSpec, w: &[usize]) -> Mat {
    w.iter().fold(spec.identity(), |acc, &k| acc.mul(&spec.generators[k % spec.generators.len()]))
}

fn words() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..64, 1..24)
}

fn tri(r: &Mat, s: &Mat) -> Mat {
    let ri = r.inverse().unwrap();
    let si = s.inverse().unwrap();
    let rs = r.mul(s).mul(&ri);
    let inner = s.mul(&rs).mul(&si);
    r.mul(&inner).mul(&ri)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn triple_conjugation_matches_squares(g in 0usize..5, a in words(), b in words()) {
        let spec = &specs()[g];
        let (r, s) = (word(spec, &a), word(spec, &b));
        let rs = r.mul(&s);
        let sr = s.mul(&r);
        prop_assert_eq!(tri(&r, &s) == s, rs.mul(&rs) == sr.mul(&sr));
    }

    #[test]
    fn conjugation_preserves_membership_and_jordan_type(g in 0usize..5, a in words(), b in words()) {
        let spec = &specs()[g];
        let (x, h) = (word(spec, &a), word(spec, &b));
        let hi = h.inverse().unwrap();
        prop_assert!(spec.membership(&x.conj(&h, &hi)).unwrap());
        if spec.family == Family::Sp {
            let gens = unipotent_generators(spec.rank(), spec.q as u64).unwrap();
            let u = a.iter().fold(spec.identity(), |acc, &k| acc.mul(&gens[k % gens.len()]));
            prop_assert_eq!(jordan_partition(&u).unwrap(), jordan_partition(&u.conj(&h, &hi)).unwrap());
        }
    }

    #[test]
    fn d_pair_is_conjugation_equivariant(g in 0usize..2, a in words(), b in words(), c in words()) {
        let spec = &specs()[g];
        let (r, s, h) = (word(spec, &a), word(spec, &b), word(spec, &c));
        let hi = h.inverse().unwrap();
        let before = d_pair(&r, &s, 1 << 12).unwrap();
        let after = d_pair(&r.conj(&h, &hi), &s.conj(&h, &hi), 1 << 12).unwrap();
        let kind = |d: &DPair| match d {
            DPair::Degenerate => 0,
            DPair::Witness(_) => 1,
            DPair::SameOrbit => 2,
            DPair::Fail { .. } => 3,
        };
        prop_assert_eq!(kind(&before), kind(&after));
    }

    #[test]
    fn class_racks_satisfy_axioms(g in 0usize..4, a in words()) {
        let spec = &specs()[g];
        let x = word(spec, &a);
        let orbit = class_orbit(&x, spec, 300).unwrap();
        if !orbit.complete {
            return Ok(());
        }
        let rack = conj_rack(&orbit.elems).unwrap();
        prop_assert!(rack.check_axioms().ok());
        for block in rack.decompose() {
            let sub = rack.subrack_closure(&block).unwrap();
            prop_assert_eq!(sub.members.len(), block.len());
        }
    }

    #[test]
    fn field_axioms(qi in 0usize..6, a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let q = [2u64, 3, 4, 8, 9, 25][qi];
        let f = field_of_order(q).unwrap();
        let (a, b, c) = (a % q as u32, b % q as u32, c % q as u32);
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
        prop_assert_eq!(f.frobenius(f.add(a, b), 1), f.add(f.frobenius(a, 1), f.frobenius(b, 1)));
        prop_assert_eq!(f.frobenius(f.mul(a, b), 1), f.mul(f.frobenius(a, 1), f.frobenius(b, 1)));
    }
}

#[test]
fn labels_round_trip_through_representatives() {
    for (n, q) in [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (4, 2)] {
        let spec = group_spec(Family::Sp, 2 * n, q).unwrap();
        for label in enumerate_labels(n, q).unwrap() {
            let text = label.to_string();
            assert_eq!(text.parse::<cthulhu::catalog::UnipotentLabel>().unwrap(), label);
            let u = representative(&label, n, q).unwrap();
            assert!(spec.membership(&u).unwrap(), "{text}");
            assert_eq!(jordan_partition(&u).unwrap(), label.partition(), "{text}");
            if q % 2 == 0 {
                assert_eq!(decomposition_type(&u, &spec).unwrap(), label, "{text}");
            }
        }
    }
}

#[test]
fn classification_is_deterministic() {
    let spec = group_spec(Family::Sp, 4, 2).unwrap();
    for label in ["V(4)", "V(2)^2", "W(2)"] {
        let u = representative(&label.parse().unwrap(), 2, 2).unwrap();
        let class = ClassRack::new(&u, &spec, 1 << 16).unwrap();
        let budget = Budget { seed: 11, ..Budget::default() };
        let run = || {
            let c = classify(&class, &Hints::default(), &budget, None).unwrap();
            let w = c.d_witness.map(|w| serde_json::to_string(&w).unwrap());
            (c.verdict, w, serde_json::to_string(&c.certificates).unwrap())
        };
        assert_eq!(run(), run(), "{label}");
    }
}
