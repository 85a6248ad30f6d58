use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matgroup::{subgroup_closure, Closure, Key, Mat, Packer};

/// Subgroup closures stop at this many elements.
pub const SUBGROUP_CAP: usize = 1_000_000;

/// `r ▷ s = r s r^{-1}`.
pub fn tri(r: &Mat, r_inv: &Mat, s: &Mat) -> Mat {
    r.mul(s).mul(r_inv)
}

fn inv(m: &Mat) -> Result<Mat> {
    m.inverse().ok_or_else(|| Error::Precondition("singular matrix".into()))
}

/// True when `r ▷ (s ▷ (r ▷ s)) = s`.
pub fn triple_conjugation_fixes(r: &Mat, s: &Mat) -> Result<bool> {
    let ri = inv(r)?;
    let si = inv(s)?;
    let a = tri(r, &ri, s);
    let b = tri(s, &si, &a);
    Ok(tri(r, &ri, &b) == *s)
}

/// True when `(rs)^2 = (sr)^2`.
pub fn squares_agree(r: &Mat, s: &Mat) -> bool {
    let rs = r.mul(s);
    let sr = s.mul(r);
    rs.mul(&rs) == sr.mul(&sr)
}

/// Orbit of `start` under conjugation by `gens`. Returns `Ok(None)` as soon
/// as `stop` is reached; `Err` past `cap` elements.
pub fn conj_orbit(start: &Mat, gens: &[Mat], stop: Option<&Mat>, cap: usize) -> Result<Option<Vec<Mat>>> {
    let packer = Packer::for_mat(start);
    let invs = gens.iter().map(inv).collect::<Result<Vec<_>>>()?;
    let target = stop.map(|s| packer.key(s));
    let mut seen: HashSet<Key> = HashSet::new();
    seen.insert(packer.key(start));
    if target.as_ref().is_some_and(|t| seen.contains(t)) {
        return Ok(None);
    }
    let mut elems = vec![start.clone()];
    let mut head = 0;
    while head < elems.len() {
        let y = elems[head].clone();
        for (g, gi) in gens.iter().zip(&invs) {
            let z = tri(g, gi, &y);
            let k = packer.key(&z);
            if target.as_ref() == Some(&k) {
                return Ok(None);
            }
            if seen.insert(k) {
                if elems.len() >= cap {
                    return Err(Error::CapExceeded { cap, what: "conjugation orbit".into() });
                }
                elems.push(z);
            }
        }
        head += 1;
    }
    Ok(Some(elems))
}

fn sorted(mut v: Vec<Mat>) -> Vec<Mat> {
    v.sort();
    v
}

/// A type D witness: `r, s` in one class with `(rs)^2 != (sr)^2` and
/// disjoint `<r, s>`-orbits.
#[derive(Clone, Debug, Serialize)]
pub struct DWitness {
    #[serde(serialize_with = "ser_mat")]
    pub r: Mat,
    #[serde(serialize_with = "ser_mat")]
    pub s: Mat,
    /// `|<r, s>|`, absent when the closure exceeded [`SUBGROUP_CAP`].
    pub subgroup_size: Option<u64>,
    #[serde(serialize_with = "ser_mats")]
    pub orbit_r: Vec<Mat>,
    #[serde(serialize_with = "ser_mats")]
    pub orbit_s: Vec<Mat>,
    #[serde(serialize_with = "ser_mat")]
    pub rs_squared: Mat,
    #[serde(serialize_with = "ser_mat")]
    pub sr_squared: Mat,
}

pub(crate) fn ser_mat<S: serde::Serializer>(m: &Mat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&m.to_text())
}

pub(crate) fn ser_mats<S: serde::Serializer>(v: &[Mat], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for m in v {
        seq.serialize_element(&m.to_text())?;
    }
    seq.end()
}

impl DWitness {
    /// Recheck every condition from the matrices alone, computing the orbits
    /// with inverse generators included so the path differs from the search.
    pub fn validate(&self) -> Result<()> {
        let (r, s) = (&self.r, &self.s);
        if squares_agree(r, s) {
            return Err(Error::Verification("(rs)^2 = (sr)^2".into()));
        }
        if triple_conjugation_fixes(r, s)? {
            return Err(Error::Verification("r ▷ (s ▷ (r ▷ s)) = s".into()));
        }
        let rs = r.mul(s);
        let sr = s.mul(r);
        if rs.mul(&rs) != self.rs_squared || sr.mul(&sr) != self.sr_squared {
            return Err(Error::Verification("stored squares are wrong".into()));
        }
        let gens = [r.clone(), s.clone(), inv(r)?, inv(s)?];
        let or = sorted(conj_orbit(r, &gens, None, usize::MAX)?.unwrap());
        let os = sorted(conj_orbit(s, &gens, None, usize::MAX)?.unwrap());
        if or != self.orbit_r || os != self.orbit_s {
            return Err(Error::Verification("stored orbits differ from recomputation".into()));
        }
        let in_r: HashSet<&Mat> = or.iter().collect();
        if os.iter().any(|x| in_r.contains(x)) {
            return Err(Error::Verification("orbits of r and s intersect".into()));
        }
        // R ⊔ S is a subrack and each part is stable under the whole union
        let union: Vec<&Mat> = or.iter().chain(os.iter()).collect();
        let in_s: HashSet<&Mat> = os.iter().collect();
        for x in &union {
            let xi = inv(x)?;
            for y in &or {
                if !in_r.contains(&tri(x, &xi, y)) {
                    return Err(Error::Verification("R is not stable under the union".into()));
                }
            }
            for y in &os {
                if !in_s.contains(&tri(x, &xi, y)) {
                    return Err(Error::Verification("S is not stable under the union".into()));
                }
            }
        }
        Ok(())
    }
}

/// Result of [`d_pair`].
#[derive(Clone, Debug)]
pub enum DPair {
    /// `rs = sr` or `(rs)^2 = (sr)^2`.
    Degenerate,
    Witness(Box<DWitness>),
    /// `s` lies in the `<r, s>`-orbit of `r`.
    SameOrbit,
    /// The orbit search exceeded the cap after this many elements.
    Fail { explored: usize },
}

impl DPair {
    pub fn witness(&self) -> Option<&DWitness> {
        match self {
            DPair::Witness(w) => Some(w),
            _ => None,
        }
    }
}

/// Test one pair for the type D condition. The orbit of `r` under
/// `<r, s>` is grown by conjugating with `r` and `s` and abandoned as soon as
/// it reaches `s`.
pub fn d_pair(r: &Mat, s: &Mat, cap: usize) -> Result<DPair> {
    r.same_shape(s)?;
    let squares = squares_agree(r, s);
    if squares != triple_conjugation_fixes(r, s)? {
        return Err(Error::Verification(format!(
            "(rs)^2 = (sr)^2 and r ▷ (s ▷ (r ▷ s)) = s disagree on {} / {}",
            r.to_text(),
            s.to_text()
        )));
    }
    if r == s || squares {
        return Ok(DPair::Degenerate);
    }
    let gens = [r.clone(), s.clone()];
    let orbit_r = match conj_orbit(r, &gens, Some(s), cap) {
        Ok(Some(o)) => o,
        Ok(None) => return Ok(DPair::SameOrbit),
        Err(Error::CapExceeded { .. }) => return Ok(DPair::Fail { explored: cap }),
        Err(e) => return Err(e),
    };
    let orbit_s = match conj_orbit(s, &gens, None, cap) {
        Ok(o) => o.unwrap(),
        Err(Error::CapExceeded { .. }) => return Ok(DPair::Fail { explored: cap }),
        Err(e) => return Err(e),
    };
    let subgroup_size = match subgroup_closure(&gens, SUBGROUP_CAP)? {
        Closure::Complete(v) => Some(v.len() as u64),
        Closure::Capped(_) => None,
    };
    let rs = r.mul(s);
    let sr = s.mul(r);
    Ok(DPair::Witness(Box::new(DWitness {
        r: r.clone(),
        s: s.clone(),
        subgroup_size,
        orbit_r: sorted(orbit_r),
        orbit_s: sorted(orbit_s),
        rs_squared: rs.mul(&rs),
        sr_squared: sr.mul(&sr),
    })))
}

/// True when `x ▷ y != y` and the `<x, y>`-orbits of `x` and `y` differ: the
/// edge relation of the type F compatibility graph. `None` past the cap.
pub fn f_edge(x: &Mat, y: &Mat, cap: usize) -> Result<Option<bool>> {
    if x.commutes_with(y) {
        return Ok(Some(false));
    }
    match conj_orbit(x, &[x.clone(), y.clone()], Some(y), cap) {
        Ok(Some(_)) => Ok(Some(true)),
        Ok(None) => Ok(Some(false)),
        Err(Error::CapExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// A type F witness: four disjoint subracks `R_a` with `R_a ▷ R_b = R_b`
/// and `r_a ▷ r_b != r_b` for `a != b`.
#[derive(Clone, Debug, Serialize)]
pub struct FWitness {
    #[serde(serialize_with = "ser_mats")]
    pub reps: Vec<Mat>,
    pub subracks: Vec<SubrackSet>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubrackSet(#[serde(serialize_with = "ser_mats")] pub Vec<Mat>);

/// Which F condition failed, with 1-based indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum FFailure {
    WrongCount(usize),
    NotConjugate { a: usize },
    NotInSubrack { a: usize },
    NotDisjoint { a: usize, b: usize },
    NotStable { a: usize, b: usize },
    Fixes { a: usize, b: usize },
    CapExceeded { a: usize },
}

impl std::fmt::Display for FFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FFailure::WrongCount(n) => write!(f, "need 4 representatives, got {n}"),
            FFailure::NotConjugate { a } => write!(f, "r_{a} is not t_{a} u t_{a}^-1"),
            FFailure::NotInSubrack { a } => write!(f, "r_{a} is not in R_{a}"),
            FFailure::NotDisjoint { a, b } => write!(f, "R_{a} and R_{b} intersect"),
            FFailure::NotStable { a, b } => write!(f, "R_{a} ▷ R_{b} != R_{b}"),
            FFailure::Fixes { a, b } => write!(f, "r_{a} ▷ r_{b} = r_{b}"),
            FFailure::CapExceeded { a } => write!(f, "subrack R_{a} exceeded the cap"),
        }
    }
}

/// How [`check_f_family`] builds the subracks.
#[derive(Clone, Debug)]
pub enum FBuilder {
    /// `r_a = t_a u t_a^{-1}` and `R_a` the orbit of `r_a` under conjugation
    /// by `subgroup_gens` (generators of `U^F`).
    TorusTranslates { u: Mat, ts: Vec<Mat>, subgroup_gens: Vec<Mat> },
    /// Orbits of the `r_a` under conjugation by the given generators.
    SubgroupOrbits(Vec<Mat>),
    Explicit(Vec<Vec<Mat>>),
}

impl FWitness {
    /// Brute-force check of all three conditions over the stored subracks.
    pub fn validate(&self) -> std::result::Result<(), FFailure> {
        let sets: Vec<Vec<Mat>> = self.subracks.iter().map(|s| s.0.clone()).collect();
        verify_f(&self.reps, &sets)
    }
}

fn verify_f(reps: &[Mat], sets: &[Vec<Mat>]) -> std::result::Result<(), FFailure> {
    if reps.len() != 4 || sets.len() != 4 {
        return Err(FFailure::WrongCount(reps.len()));
    }
    let hs: Vec<HashSet<&Mat>> = sets.iter().map(|s| s.iter().collect()).collect();
    for a in 0..4 {
        if !hs[a].contains(&reps[a]) {
            return Err(FFailure::NotInSubrack { a: a + 1 });
        }
    }
    for a in 0..4 {
        for b in a + 1..4 {
            if sets[a].iter().any(|x| hs[b].contains(x)) {
                return Err(FFailure::NotDisjoint { a: a + 1, b: b + 1 });
            }
        }
    }
    for a in 0..4 {
        for x in &sets[a] {
            let xi = x.inverse().expect("unipotent elements are invertible");
            for b in 0..4 {
                // conjugation is injective, so image inside R_b means onto
                if sets[b].iter().any(|y| !hs[b].contains(&tri(x, &xi, y))) {
                    return Err(FFailure::NotStable { a: a + 1, b: b + 1 });
                }
            }
        }
    }
    for a in 0..4 {
        for b in 0..4 {
            if a != b && reps[a].commutes_with(&reps[b]) {
                return Err(FFailure::Fixes { a: a + 1, b: b + 1 });
            }
        }
    }
    Ok(())
}

/// Build the subracks for four representatives and verify the F conditions.
pub fn check_f_family(reps: &[Mat], builder: &FBuilder, cap: usize) -> Result<std::result::Result<FWitness, FFailure>> {
    if reps.len() != 4 {
        return Ok(Err(FFailure::WrongCount(reps.len())));
    }
    let sets: Vec<Vec<Mat>> = match builder {
        FBuilder::Explicit(sets) => sets.clone(),
        FBuilder::TorusTranslates { u, ts, subgroup_gens } => {
            if ts.len() != 4 {
                return Ok(Err(FFailure::WrongCount(ts.len())));
            }
            for (a, t) in ts.iter().enumerate() {
                if tri(t, &inv(t)?, u) != reps[a] {
                    return Ok(Err(FFailure::NotConjugate { a: a + 1 }));
                }
            }
            match orbits_of(reps, subgroup_gens, cap)? {
                Ok(s) => s,
                Err(f) => return Ok(Err(f)),
            }
        }
        FBuilder::SubgroupOrbits(gens) => match orbits_of(reps, gens, cap)? {
            Ok(s) => s,
            Err(f) => return Ok(Err(f)),
        },
    };
    let sets: Vec<Vec<Mat>> = sets.into_iter().map(sorted).collect();
    Ok(verify_f(reps, &sets).map(|()| FWitness {
        reps: reps.to_vec(),
        subracks: sets.into_iter().map(SubrackSet).collect(),
    }))
}

fn orbits_of(reps: &[Mat], gens: &[Mat], cap: usize) -> Result<std::result::Result<Vec<Vec<Mat>>, FFailure>> {
    let mut out = Vec::new();
    for (a, r) in reps.iter().enumerate() {
        match conj_orbit(r, gens, None, cap) {
            Ok(o) => out.push(o.unwrap()),
            Err(Error::CapExceeded { .. }) => return Ok(Err(FFailure::CapExceeded { a: a + 1 })),
            Err(e) => return Err(e),
        }
    }
    Ok(Ok(out))
}

/// True when the four elements lie in four distinct orbits of the group they
/// generate; then those orbits form a type F family.
pub fn distinct_generated_orbits(reps: &[Mat], cap: usize) -> Result<Option<bool>> {
    let packer = Packer::for_mat(&reps[0]);
    let mut owner: HashMap<Key, usize> = HashMap::new();
    for (a, r) in reps.iter().enumerate() {
        if owner.contains_key(&packer.key(r)) {
            return Ok(Some(false));
        }
        let orb = match conj_orbit(r, reps, None, cap) {
            Ok(o) => o.unwrap(),
            Err(Error::CapExceeded { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        for x in &orb {
            owner.insert(packer.key(x), a);
        }
    }
    Ok(Some(true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::make_field;

    #[test]
    fn equal_pair_is_degenerate() {
        let f = make_field(3, 1).unwrap();
        let x = Mat::from_int_rows(&f, &[&[1, 1], &[0, 1]]).unwrap();
        assert!(matches!(d_pair(&x, &x, 100).unwrap(), DPair::Degenerate));
    }

    #[test]
    fn equal_family_fails_disjointness() {
        let f = make_field(3, 1).unwrap();
        let x = Mat::from_int_rows(&f, &[&[1, 1], &[0, 1]]).unwrap();
        let reps = vec![x.clone(); 4];
        let out = check_f_family(&reps, &FBuilder::SubgroupOrbits(vec![x.clone()]), 100).unwrap();
        assert_eq!(out.unwrap_err(), FFailure::NotDisjoint { a: 1, b: 2 });
    }
}
