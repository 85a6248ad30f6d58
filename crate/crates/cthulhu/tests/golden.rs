//! Small exact values recomputed by brute force, independently of the
//! library routines that produce them.

use std::collections::BTreeSet;

use cthulhu::catalog::{enumerate_labels, two_two_pair};
use cthulhu::chevalley::{ab_property, orthogonal_short_pair, root_system, torus_family, FamilyCase, FamilyOutcome, Realization, Root};
use cthulhu::detect::{d_pair, DPair};
use cthulhu::error::Error;
use cthulhu::ffield::field_of_order;
use cthulhu::matgroup::{class_orbit, group_spec, Family, Mat};
use cthulhu::rack::conj_rack;

#[test]
fn least_irreducible_quadratic_over_f2() {
    // x^2 + b x + c is irreducible over F_2 iff it has no root
    let irreducible: Vec<[u32; 3]> = (0..4u32)
        .map(|k| [k & 1, k >> 1, 1])
        .filter(|c| (0..2).all(|x| (c[0] + c[1] * x + x * x) % 2 != 0))
        .collect();
    assert_eq!(irreducible, [[1, 1, 1]]);
    let f = field_of_order(4).unwrap();
    assert_eq!(f.modulus(), &irreducible[0][..]);
    // omega = 2, omega + 1 = 3 in the additive basis encoding
    assert_eq!(f.mul(2, 2), 3);
    assert_eq!(f.frobenius(2, 1), 3);
}

#[test]
fn generator_of_f9_has_order_eight() {
    let f = field_of_order(9).unwrap();
    let g = f.generator();
    let mut x = g;
    let mut k = 1;
    while x != 1 {
        x = f.mul(x, g);
        k += 1;
    }
    assert_eq!(k, 8);
}

#[test]
fn squares_of_f5() {
    let f = field_of_order(5).unwrap();
    let squares: BTreeSet<u32> = (0..5).map(|x| x * x % 5).collect();
    assert_eq!(squares, BTreeSet::from([0, 1, 4]));
    for a in 0..5 {
        assert_eq!(f.is_square(a), squares.contains(&a), "{a}");
    }
}

fn all_matrices(q: u32, n: usize) -> impl Iterator<Item = Vec<u32>> {
    let total = (q as u64).pow((n * n) as u32);
    (0..total).map(move |mut k| {
        (0..n * n)
            .map(|_| {
                let d = (k % q as u64) as u32;
                k /= q as u64;
                d
            })
            .collect()
    })
}

#[test]
fn group_orders_by_brute_force() {
    let sp = group_spec(Family::Sp, 4, 2).unwrap();
    let count = all_matrices(2, 4)
        .map(|e| Mat::from_entries(&sp.field, 4, e).unwrap())
        .filter(|x| x.transpose().mul(&sp.form).mul(x) == sp.form)
        .count();
    assert_eq!(count, 720);
    assert_eq!(sp.order, 720u32.into());

    let sl = group_spec(Family::SL, 2, 3).unwrap();
    let count = all_matrices(3, 2).filter(|e| (e[0] * e[3] + 2 * e[1] * e[2]) % 3 == 1).count();
    assert_eq!(count, 24);
    assert_eq!(sl.order, 24u32.into());

    // fixed points of X -> J (Fr(X)^t)^{-1} J in GL_3(F_4)
    let gu = group_spec(Family::GU, 3, 2).unwrap();
    let f4 = field_of_order(4).unwrap();
    let j = Mat::antidiag(&f4, 3);
    let count = all_matrices(4, 3)
        .map(|e| Mat::from_entries(&f4, 3, e).unwrap())
        .filter(|x| x.frobenius(1).transpose().mul(&j).mul(x) == j)
        .count();
    assert_eq!(count, 648);
    assert_eq!(gu.order, 648u32.into());
    assert_eq!(gu.enumerate_keys(1_000).unwrap().len(), 648);
}

#[test]
fn transvection_rack_of_sp4_2_is_indecomposable() {
    let spec = group_spec(Family::Sp, 4, 2).unwrap();
    let t = Mat::elementary(&spec.field, 4, 0, 3, 1);
    let orbit = class_orbit(&t, &spec, 1 << 10).unwrap();
    assert_eq!(orbit.len(), 15);
    let rack = conj_rack(&orbit.elems).unwrap();
    assert!(rack.check_axioms().ok());
    assert_eq!(rack.decompose().len(), 1);
    // inner orbit of t by direct conjugation with class members
    let mut seen = vec![t.clone()];
    let mut k = 0;
    while k < seen.len() {
        for x in &orbit.elems {
            let y = seen[k].conj(x, &x.inverse().unwrap());
            if !seen.contains(&y) {
                seen.push(y);
            }
        }
        k += 1;
    }
    assert_eq!(seen.len(), 15);
}

#[test]
fn witness_orbits_split_the_generated_subrack() {
    let p = two_two_pair().unwrap();
    let DPair::Witness(w) = d_pair(&p.r, &p.s, 1 << 20).unwrap() else { panic!("no witness") };
    let mut y: Vec<Mat> = w.orbit_r.clone();
    y.extend(w.orbit_s.iter().cloned());
    let rack = conj_rack(&y).unwrap();
    let blocks = rack.decompose();
    assert!(blocks.len() >= 2);
    let block_of = |m: &Mat| blocks.iter().position(|b| b.contains(&rack.index_of(m).unwrap())).unwrap();
    assert_ne!(block_of(&w.r), block_of(&w.s));
}

#[test]
fn orthogonal_short_pair_constant_at_three() {
    let d = orthogonal_short_pair(3).unwrap();
    let f = field_of_order(3).unwrap();
    let re = Realization::new(root_system(2).unwrap(), &f);
    let (a, b) = (Root(vec![1, -1]), Root(vec![1, 1]));
    let (xa, xb) = (re.x(&a, 1).unwrap(), re.x(&b, 1).unwrap());
    let comm = xa.mul(&xb).mul(&xa.inverse().unwrap()).mul(&xb.inverse().unwrap());
    let sum = a.add(&b);
    let c = (1..3).find(|&c| re.x(&sum, c).unwrap() == comm).expect("commutator is a root element");
    // c_11 = +-2, which is nonzero mod 3
    assert!(c == 1 || c == 2);
    assert!(d.c11 == Some(c) || d.c11 == Some(f.neg(c)));
}

#[test]
fn two_root_support_has_no_ab_pair() {
    let rs = root_system(3).unwrap();
    let a2 = rs.parse_label("a2").unwrap();
    let top = rs.parse_label("2a1+2a2+a3").unwrap();
    assert!(!rs.is_root(&a2.add(&top)));
    for q in [2u64, 3] {
        let f = field_of_order(q).unwrap();
        let re = Realization::new(rs.clone(), &f);
        let v = re.x(&a2, 1).unwrap().mul(&re.x(&top, 1).unwrap());
        for a in &rs.positive {
            for b in &rs.positive {
                if a == b || !rs.is_root(&a.add(b)) {
                    continue;
                }
                match ab_property(&re, &v, a, b, 0) {
                    Ok(flag) => assert!(!flag, "{} {} at q = {q}", rs.label(a), rs.label(b)),
                    Err(Error::DegeneratePair(_)) => {}
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }
}

#[test]
fn torus_family_collision_at_five() {
    let rs = root_system(2).unwrap();
    let a = Root(vec![1, -1]);
    let b = Root(vec![1, 1]);
    let FamilyOutcome::Refused(r) = torus_family(&rs, &a, &b, 5, &FamilyCase::Chevalley).unwrap() else {
        panic!("expected refusal")
    };
    let c = r.collision.unwrap();
    // exponents e_a = a - 1 scaled by 2, compared mod q - 1 = 4
    let first = (0..4i64)
        .flat_map(|x| (x + 1..4).map(move |y| (x, y)))
        .find(|&(x, y)| (2 * x - 2 * y).rem_euclid(4) == 0)
        .unwrap();
    assert_eq!((c.r, c.a, c.b, c.modulus), (Some(2), first.0 as usize + 1, first.1 as usize + 1, 4));
}

#[test]
fn rank_two_labels() {
    // symplectic partitions of 4: odd parts occur with even multiplicity
    let mut parts: Vec<Vec<usize>> = vec![vec![4], vec![3, 1], vec![2, 2], vec![2, 1, 1], vec![1, 1, 1, 1]];
    parts.retain(|p| p.iter().all(|&x| x % 2 == 0 || p.iter().filter(|&&y| y == x).count() % 2 == 0));
    parts.retain(|p| p.iter().any(|&x| x > 1));
    assert_eq!(parts.len(), 3);
    let odd: BTreeSet<String> = enumerate_labels(2, 3).unwrap().iter().map(ToString::to_string).collect();
    assert_eq!(odd, BTreeSet::from(["(1^2,2)".into(), "(2^2)".into(), "(4)".into()]));
    let even: BTreeSet<String> = enumerate_labels(2, 2).unwrap().iter().map(ToString::to_string).collect();
    assert_eq!(even, BTreeSet::from(["W(1)+V(2)".into(), "V(2)^2".into(), "V(4)".into(), "W(2)".into()]));
}
