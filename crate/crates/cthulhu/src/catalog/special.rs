use serde::Serialize;

use crate::chevalley::{root_system, Realization};
use crate::detect::{d_pair, squares_agree, DPair, DWitness, FBuilder};
use crate::error::{Error, Result};
use crate::ffield::{field_of_order, Embedding};
use crate::matgroup::{
    apply_endo, class_orbit, group_spec, jordan_block, jordan_partition, split_classes, subgroup_closure, Endo,
    Family, GroupSpec, Mat, SplitMode,
};
use crate::rack::conj_rack;

use super::build::representative;
use super::label::{Term, UnipotentLabel};

const PAIR_CLASS_CAP: usize = 2_000_000;
const SUBGROUP_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairKind {
    /// `(x1 x2)^2 != (x2 x1)^2`.
    Noncommuting,
    /// `x1 != x2` and `x1 x2 = x2 x1`.
    Commuting,
}

#[derive(Clone, Debug)]
pub struct RegularPair {
    pub x1: Mat,
    pub x2: Mat,
    /// Name of the matrix conjugating `x1` to `x2`, or of the relation used.
    pub via: &'static str,
    pub class_size: usize,
}

/// Regular unipotent representative used by [`regular_pairs`].
fn regular_rep(spec: &GroupSpec) -> Result<Mat> {
    let f = &spec.field;
    match spec.family {
        Family::SL => Ok(jordan_block(f, spec.n)),
        Family::Sp => regular_symplectic(spec),
        Family::SU if spec.n == 3 => {
            let q = spec.q;
            let xi = (1..f.q())
                .find(|&x| f.add(f.add(f.frobenius(x, spec.base_m), x), 1) == 0)
                .ok_or_else(|| Error::Verification(format!("no xi with xi^{q} + xi + 1 = 0")))?;
            let mut m = jordan_block(f, 3);
            m.set(0, 2, xi);
            Ok(m)
        }
        _ => Err(Error::Unsupported(format!("regular pairs in {}", spec.name()))),
    }
}

fn regular_symplectic(spec: &GroupSpec) -> Result<Mat> {
    let n = spec.rank();
    let label = if spec.q % 2 == 0 {
        UnipotentLabel::even(vec![Term::V { size: 2 * n, b: 1 }])?
    } else {
        UnipotentLabel::odd(crate::matgroup::Partition::new(vec![2 * n])?)?
    };
    representative(&label, n, spec.q as u64)
}

/// Two regular unipotent elements of one class of `spec` (SL, SU_3 or Sp)
/// with the requested relation, each relation and the class membership
/// checked by computation.
pub fn regular_pairs(spec: &GroupSpec, kind: PairKind) -> Result<RegularPair> {
    let x1 = regular_rep(spec)?;
    let f = spec.field.clone();
    let n = spec.n;
    let orbit = class_orbit(&x1, spec, PAIR_CLASS_CAP)?;
    if !orbit.complete {
        return Err(Error::CapExceeded { cap: PAIR_CLASS_CAP, what: format!("regular class of {}", spec.name()) });
    }
    let (x2, via) = match kind {
        PairKind::Noncommuting => match spec.family {
            Family::SL => {
                let j = Mat::antidiag(&f, n);
                (j.mul(&x1).mul(&j.inverse().expect("invertible")), "J")
            }
            Family::SU => {
                let x2 = spec.frobenius_q(&x1).transpose();
                if x2.mul(&x1).mul(&x2).get(1, 0) == 0 {
                    return Err(Error::Verification("(x2 x1 x2)_21 vanishes".into()));
                }
                (x2, "transposed Frobenius")
            }
            Family::Sp => {
                let mut sigma = Mat::identity(&f, n);
                for (a, b) in [(0, 1), (n - 2, n - 1)] {
                    sigma.set(a, a, 0);
                    sigma.set(b, b, 0);
                    sigma.set(a, b, 1);
                    sigma.set(b, a, 1);
                }
                let x2 = sigma.mul(&x1).mul(&sigma);
                if squares_agree(&x1, &x2) {
                    // happens for Sp_4 in characteristic 3
                    let om = &spec.form;
                    (om.mul(&x1).mul(&om.inverse().expect("nondegenerate")), "form")
                } else {
                    (x2, "sigma")
                }
            }
            _ => unreachable!("rejected by regular_rep"),
        },
        PairKind::Commuting => {
            if n > 2 {
                let inv = x1.inverse().expect("unipotent");
                if orbit.contains(&inv) {
                    (inv, "inverse")
                } else {
                    // x_1 is not real here (Sp with q = 3 mod 4); the
                    // corner transvections centralize U
                    (1..f.q())
                        .map(|t| x1.mul(&Mat::elementary(&f, n, 0, n - 1, t)))
                        .find(|y| orbit.contains(y))
                        .map(|y| (y, "corner translate"))
                        .ok_or_else(|| Error::Verification("no commuting partner found".into()))?
                }
            } else if spec.q > 2 {
                let xi = (2..f.q())
                    .find(|&x| f.is_square(x))
                    .ok_or_else(|| {
                        Error::Precondition(format!(
                            "{}: no square other than 1, so x_a(1) and x_a(xi) lie in different classes",
                            spec.name()
                        ))
                    })?;
                let mut y2 = x1.clone();
                y2.set(0, 1, xi);
                (y2, "square scalar")
            } else {
                return Err(Error::Precondition("commuting pairs need size > 2 or q > 2".into()));
            }
        }
    };
    for (name, x) in [("x1", &x1), ("x2", &x2)] {
        if !spec.membership(x)? {
            return Err(Error::Verification(format!("{name} not in {}", spec.name())));
        }
        if jordan_partition(x)?.parts() != [n] {
            return Err(Error::Verification(format!("{name} is not regular unipotent")));
        }
    }
    match kind {
        PairKind::Noncommuting if squares_agree(&x1, &x2) => {
            return Err(Error::Verification("(x1 x2)^2 = (x2 x1)^2".into()))
        }
        PairKind::Commuting if x1 == x2 || !x1.commutes_with(&x2) => {
            return Err(Error::Verification("pair is equal or does not commute".into()))
        }
        _ => {}
    }
    if !orbit.contains(&x2) {
        return Err(Error::Verification("x1 and x2 are not conjugate".into()));
    }
    Ok(RegularPair { x1, x2, via, class_size: orbit.len() })
}

/// Everything the regular class of `GU_3(2)` construction checks.
#[derive(Clone, Debug, Serialize)]
pub struct Gu3Report {
    pub witness: DWitness,
    /// `x` in `F_64` with `x^3 = eta^{-1}`, as its integer encoding.
    pub cube_root: u32,
    pub twist_is_scalar: bool,
    pub regular_classes: usize,
    pub subgroup_order: usize,
}

/// Type D pair in a regular unipotent class of `GU_3(2)`: `r` has ones on
/// the superdiagonal and `zeta` in the corner, `g = diag(x^4, x, x^4)` with
/// `x^3 = eta^{-1}` satisfies `g^{-1} F(g) = eta id`, and
/// `s = J (g r g^{-1}) J` lies in another `SU_3(2)`-class.
pub fn gu3_witness() -> Result<Gu3Report> {
    let su = group_spec(Family::SU, 3, 2)?;
    let f4 = su.field.clone();
    let big = field_of_order(64)?;
    let emb = Embedding::new(&f4, &big)?;
    let zeta = (2..4).find(|&z| f4.add(f4.add(f4.mul(z, z), z), 1) == 0).expect("F_4 has primitive cube roots");
    let eta = zeta;
    let target = emb.apply(f4.inv(eta).expect("nonzero"));
    let x = (1..64).find(|&x| big.pow(x, 3) == Some(target)).ok_or_else(|| Error::Verification("no cube root".into()))?;
    let x4 = big.pow(x, 4).expect("nonzero");
    let g = Mat::diag(&big, &[x4, x, x4]);
    let twisted = g.inverse().expect("diagonal").mul(&apply_endo(&g, &Endo::UnitaryTwist { base_m: 1 })?);
    let twist_is_scalar = twisted == Mat::identity(&big, 3).scale(emb.apply(eta));
    if !twist_is_scalar {
        return Err(Error::Verification("g^{-1} F(g) is not eta id".into()));
    }
    let mut r = jordan_block(&f4, 3);
    r.set(0, 2, zeta);
    let lifted = r.map_into(&big, |v| emb.apply(v));
    let conj = g.mul(&lifted).mul(&g.inverse().expect("diagonal"));
    let mut back = Vec::with_capacity(9);
    for &v in conj.entries() {
        back.push(emb.preimage(v).ok_or_else(|| Error::Verification("g r g^{-1} leaves F_4".into()))?);
    }
    let grg = Mat::from_entries(&f4, 3, back)?;
    let j = Mat::antidiag(&f4, 3);
    let s = j.mul(&grg).mul(&j);
    for (name, m) in [("r", &r), ("s", &s), ("J", &j)] {
        if !su.membership(m)? {
            return Err(Error::Verification(format!("{name} not in SU_3(2)")));
        }
    }
    if squares_agree(&r, &s) {
        return Err(Error::Verification("(rs)^2 = (sr)^2".into()));
    }
    let closure = subgroup_closure(&[r.clone(), s.clone()], SUBGROUP_CAP)?;
    for y in closure.elements() {
        if !su.membership(y)? {
            return Err(Error::Verification("<r, s> leaves SU_3(2)".into()));
        }
    }
    let all = su
        .enumerate_keys(1_000)
        .ok_or_else(|| Error::CapExceeded { cap: 1_000, what: "SU_3(2)".into() })?;
    let packer = su.packer();
    let regular: Vec<Mat> = all
        .iter()
        .map(|k| packer.unpack(k))
        .filter(|m| m.is_unipotent() && jordan_partition(m).map(|p| p.parts() == [3]).unwrap_or(false))
        .collect();
    let classes = split_classes(&regular, &su, &SplitMode::Conjugation)?;
    let home = classes.iter().find(|c| c.members.contains(&r)).ok_or_else(|| Error::Verification("r is not regular".into()))?;
    if home.members.contains(&s) {
        return Err(Error::Verification("s is SU_3(2)-conjugate to r".into()));
    }
    let witness = match d_pair(&r, &s, SUBGROUP_CAP)? {
        DPair::Witness(w) => *w,
        other => return Err(Error::Verification(format!("d_pair returned {other:?}"))),
    };
    witness.validate()?;
    Ok(Gu3Report {
        witness,
        cube_root: x,
        twist_is_scalar,
        regular_classes: classes.len(),
        subgroup_order: closure.elements().len(),
    })
}

/// Generators `x_a(p^k)` of the upper unitriangular group of `Sp_{2n}(q)`.
pub fn unipotent_generators(n: usize, q: u64) -> Result<Vec<Mat>> {
    let field = field_of_order(q)?;
    let re = Realization::new(root_system(n)?, &field);
    let mut gens = Vec::new();
    for a in &re.rs.positive {
        for k in 0..field.m() {
            gens.push(re.x(a, field.p().pow(k))?);
        }
    }
    Ok(gens)
}

/// The four torus conjugates of a regular unipotent of `Sp_4(q)`, `q > 2`
/// even, together with the builder taking their orbits under `U`.
#[derive(Clone, Debug)]
pub struct RegularFamily {
    pub u: Mat,
    pub reps: Vec<Mat>,
    pub builder: FBuilder,
}

/// Upper unitriangular `u = [[1,x,0,p],[0,1,y,xy],[0,0,1,x],[0,0,0,1]]` in
/// regular class `which` (0 or 1) of `Sp_4(q)`, conjugated by
/// `diag(z^a, z^b, z^-b, z^-a)` for `a, b` in `{0, 1}`, `z` a generator.
pub fn regular_f_family(q: u64, which: usize) -> Result<RegularFamily> {
    if q % 2 == 1 || q <= 2 {
        return Err(Error::Precondition(format!("needs even q > 2, got {q}")));
    }
    let spec = group_spec(Family::Sp, 4, q)?;
    let f = spec.field.clone();
    let mut found: Vec<(Mat, crate::matgroup::Orbit)> = Vec::new();
    'search: for x in 1..f.q() {
        for y in 1..f.q() {
            for p in 0..f.q() {
                let xy = f.mul(x, y);
                let u = Mat::from_rows(&f, &[vec![1, x, 0, p], vec![0, 1, y, xy], vec![0, 0, 1, x], vec![0, 0, 0, 1]])?;
                if !spec.membership(&u)? || found.iter().any(|(_, o)| o.contains(&u)) {
                    continue;
                }
                let orb = class_orbit(&u, &spec, PAIR_CLASS_CAP)?;
                found.push((u, orb));
                if found.len() == 2 {
                    break 'search;
                }
            }
        }
    }
    let u = found
        .into_iter()
        .nth(which)
        .map(|x| x.0)
        .ok_or_else(|| Error::Verification(format!("regular class {which} has no representative of the required shape")))?;
    let z = f.generator();
    let zi = f.inv(z).expect("nonzero");
    let mut ts = Vec::new();
    let mut reps = Vec::new();
    for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let pick = |e: u32, v: u32| if e == 1 { v } else { 1 };
        let t = Mat::diag(&f, &[pick(a, z), pick(b, z), pick(b, zi), pick(a, zi)]);
        reps.push(t.mul(&u).mul(&t.inverse().expect("diagonal")));
        ts.push(t);
    }
    let builder = FBuilder::TorusTranslates { u: u.clone(), ts, subgroup_gens: unipotent_generators(2, q)? };
    Ok(RegularFamily { u, reps, builder })
}

#[derive(Clone, Debug, Serialize)]
pub struct RackIsomorphism {
    pub size: usize,
    pub pairs_checked: u64,
}

/// Conjugation by the similitude `diag(id_n, zeta^{-1} id_n)` carries the
/// transvection class of `x_b(1)` onto that of `x_b(zeta)`, `zeta` a
/// non-square, odd `q`; checked as a bijection preserving the operation.
pub fn transvection_isomorphism(n: usize, q: u64) -> Result<RackIsomorphism> {
    if q % 2 == 0 {
        return Err(Error::Precondition("odd q only".into()));
    }
    let spec = group_spec(Family::Sp, 2 * n, q)?;
    let f = spec.field.clone();
    let zeta = (1..f.q()).find(|&z| !f.is_square(z)).expect("odd q has non-squares");
    let mut diag = vec![1; n];
    diag.extend(std::iter::repeat_n(f.inv(zeta).expect("nonzero"), n));
    let d = Mat::diag(&f, &diag);
    let di = d.inverse().expect("diagonal");
    let u = Mat::elementary(&f, 2 * n, 0, 2 * n - 1, 1);
    let u2 = Mat::elementary(&f, 2 * n, 0, 2 * n - 1, zeta);
    if u.conj(&d, &di) != u2 {
        return Err(Error::Verification("similitude does not map u to u'".into()));
    }
    let a = class_orbit(&u, &spec, PAIR_CLASS_CAP)?;
    let b = class_orbit(&u2, &spec, PAIR_CLASS_CAP)?;
    if !a.complete || !b.complete || a.len() != b.len() {
        return Err(Error::Verification("class sizes differ".into()));
    }
    let image: Vec<usize> = a
        .elems
        .iter()
        .map(|y| b.position(&y.conj(&d, &di)).ok_or_else(|| Error::Verification("image leaves the class".into())))
        .collect::<Result<_>>()?;
    let mut seen = vec![false; b.len()];
    for &i in &image {
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::Verification("map is not injective".into()));
        }
    }
    let ra = conj_rack(&a.elems)?;
    let rb = conj_rack(&b.elems)?;
    let mut pairs = 0u64;
    for x in 0..ra.len() {
        for y in 0..ra.len() {
            if image[ra.op(x, y)] != rb.op(image[x], image[y]) {
                return Err(Error::Verification(format!("operation not preserved at ({x}, {y})")));
            }
            pairs += 1;
        }
    }
    Ok(RackIsomorphism { size: a.len(), pairs_checked: pairs })
}

/// A pair `(r, s)` written out in a proof, with a representative of the
/// class it lives in.
#[derive(Clone, Debug)]
pub struct ExplicitPair {
    pub name: &'static str,
    pub n: usize,
    pub q: u64,
    pub class_rep: Mat,
    pub r: Mat,
    pub s: Mat,
}

/// `x = x_a1(1)` and `w` in the `(2^2)` class of `Sp_4(3)` with the
/// non-square corner.
pub fn two_two_pair() -> Result<ExplicitPair> {
    let f = field_of_order(3)?;
    let w = Mat::from_int_rows(&f, &[&[1, 0, 0, -1], &[0, 1, 1, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]])?;
    let re = Realization::new(root_system(2)?, &f);
    let x = re.x(&re.rs.simple[0], 1)?;
    Ok(ExplicitPair { name: "two-two", n: 2, q: 3, class_rep: w.clone(), r: x, s: w })
}

/// Pair in the `W(2)+V(2)` class of `Sp_6(2)`: `r = (z sigma) ▷ v`,
/// `s = y ▷ v` for `v = x_a2(1) x_{2a1+2a2+a3}(1)`.
pub fn mixed_involution_pair() -> Result<(ExplicitPair, [Mat; 3])> {
    let f = field_of_order(2)?;
    let rows = |r: &[&[i64]]| Mat::from_int_rows(&f, r);
    let v = rows(&[
        &[1, 0, 0, 0, 0, 1],
        &[0, 1, 1, 0, 0, 0],
        &[0, 0, 1, 0, 0, 0],
        &[0, 0, 0, 1, 1, 0],
        &[0, 0, 0, 0, 1, 0],
        &[0, 0, 0, 0, 0, 1],
    ])?;
    let sigma = rows(&[
        &[0, 1, 0, 0, 0, 0],
        &[0, 0, 1, 0, 0, 0],
        &[1, 0, 0, 0, 0, 0],
        &[0, 0, 0, 0, 0, 1],
        &[0, 0, 0, 1, 0, 0],
        &[0, 0, 0, 0, 1, 0],
    ])?;
    let z = rows(&[
        &[1, 0, 0, 0, 0, 0],
        &[0, 1, 0, 1, 1, 0],
        &[0, 0, 1, 0, 1, 0],
        &[0, 0, 0, 1, 0, 0],
        &[0, 0, 0, 0, 1, 0],
        &[0, 0, 0, 0, 0, 1],
    ])?;
    let y = rows(&[
        &[1, 0, 0, 0, 0, 0],
        &[0, 1, 0, 0, 0, 0],
        &[0, 0, 1, 1, 0, 0],
        &[0, 0, 0, 1, 0, 0],
        &[0, 0, 0, 0, 1, 0],
        &[0, 0, 0, 0, 0, 1],
    ])?;
    let r = rows(&[
        &[1, 1, 0, 1, 1, 0],
        &[0, 1, 0, 0, 0, 1],
        &[0, 0, 1, 1, 0, 1],
        &[0, 0, 0, 1, 0, 0],
        &[0, 0, 0, 0, 1, 1],
        &[0, 0, 0, 0, 0, 1],
    ])?;
    let s = rows(&[
        &[1, 0, 0, 0, 0, 1],
        &[0, 1, 1, 1, 0, 0],
        &[0, 0, 1, 0, 1, 0],
        &[0, 0, 0, 1, 1, 0],
        &[0, 0, 0, 0, 1, 0],
        &[0, 0, 0, 0, 0, 1],
    ])?;
    Ok((ExplicitPair { name: "mixed-involution", n: 3, q: 2, class_rep: v, r, s }, [sigma, z, y]))
}

/// Pair in the split `W(3)` class of `Sp_6(2)`:
/// `r = x_{a1+a2}(1) x_{-a2}(1)`, `s = x_a1(1) x_{a2+a3}(1)`, class of
/// `v = x_a1(1) x_a2(1)`.
pub fn odd_w_pair() -> Result<ExplicitPair> {
    let f = field_of_order(2)?;
    let re = Realization::new(root_system(3)?, &f);
    let root = |s: &str| re.rs.parse_label(s);
    let x = |s: &str| -> Result<Mat> { re.x(&root(s)?, 1) };
    let v = x("a1")?.mul(&x("a2")?);
    let r = x("a1+a2")?.mul(&x("-(a2)")?);
    let s = x("a1")?.mul(&x("a2+a3")?);
    Ok(ExplicitPair { name: "odd-w", n: 3, q: 2, class_rep: v, r, s })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl3_2_noncommuting_pair() {
        let spec = group_spec(Family::SL, 3, 2).unwrap();
        let p = regular_pairs(&spec, PairKind::Noncommuting).unwrap();
        let j = Mat::antidiag(&spec.field, 3);
        assert_eq!(p.x2, j.mul(&p.x1).mul(&j));
    }

    #[test]
    fn sl2_commuting_pair_needs_a_square() {
        let spec = group_spec(Family::SL, 2, 3).unwrap();
        assert!(matches!(regular_pairs(&spec, PairKind::Commuting), Err(Error::Precondition(_))));
        for q in [4, 5, 7] {
            let spec = group_spec(Family::SL, 2, q).unwrap();
            let p = regular_pairs(&spec, PairKind::Commuting).unwrap();
            assert_ne!(p.x1, p.x2);
        }
    }

    #[test]
    fn su3_2_noncommuting_pair() {
        let spec = group_spec(Family::SU, 3, 2).unwrap();
        let p = regular_pairs(&spec, PairKind::Noncommuting).unwrap();
        assert_ne!(p.x2.mul(&p.x1).mul(&p.x2).get(1, 0), 0);
    }

    #[test]
    fn symplectic_pairs() {
        for (n, q, via) in [(4, 2, "sigma"), (4, 3, "form"), (4, 5, "sigma"), (6, 2, "sigma")] {
            let spec = group_spec(Family::Sp, n, q).unwrap();
            assert_eq!(regular_pairs(&spec, PairKind::Noncommuting).unwrap().via, via);
            regular_pairs(&spec, PairKind::Commuting).unwrap();
        }
    }

    #[test]
    fn gu3_construction_verifies() {
        let rep = gu3_witness().unwrap();
        assert_eq!(rep.regular_classes, 3);
        assert!(rep.twist_is_scalar);
        assert_eq!(rep.witness.r.get(0, 1), 1);
        assert_eq!(rep.witness.r.get(1, 2), 1);
    }

    #[test]
    fn similitude_is_rack_isomorphism() {
        let iso = transvection_isomorphism(2, 3).unwrap();
        assert_eq!(iso.size, 40);
    }

    fn assert_d_pair(p: &ExplicitPair) {
        let spec = group_spec(Family::Sp, 2 * p.n, p.q).unwrap();
        let orbit = class_orbit(&p.class_rep, &spec, PAIR_CLASS_CAP).unwrap();
        assert!(orbit.contains(&p.r) && orbit.contains(&p.s), "{}", p.name);
        let w = d_pair(&p.r, &p.s, SUBGROUP_CAP).unwrap();
        w.witness().unwrap_or_else(|| panic!("{}: {w:?}", p.name)).validate().unwrap();
    }

    #[test]
    fn explicit_pairs_are_type_d() {
        assert_d_pair(&two_two_pair().unwrap());
        assert_d_pair(&mixed_involution_pair().unwrap().0);
        assert_d_pair(&odd_w_pair().unwrap());
    }

    #[test]
    fn mixed_involution_pair_conjugators() {
        let (p, [sigma, z, y]) = mixed_involution_pair().unwrap();
        let zs = z.mul(&sigma);
        assert_eq!(zs.mul(&p.class_rep).mul(&zs.inverse().unwrap()), p.r);
        assert_eq!(y.mul(&p.class_rep).mul(&y.inverse().unwrap()), p.s);
    }

    #[test]
    fn regular_family_in_sp4_4() {
        for which in 0..2 {
            let fam = regular_f_family(4, which).unwrap();
            let w = crate::detect::check_f_family(&fam.reps, &fam.builder, SUBGROUP_CAP).unwrap().unwrap();
            w.validate().unwrap();
        }
        assert!(regular_f_family(2, 0).is_err());
    }
}
