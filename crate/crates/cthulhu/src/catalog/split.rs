use std::collections::{BTreeMap, HashSet};

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matgroup::{class_orbit, group_spec, subgroup_closure, Family, GroupSpec, Key, Mat};

use super::build::{label_of, split_representatives};
use super::label::UnipotentLabel;
use super::special::unipotent_generators;

/// Largest `U^F` enumerated when splitting labels into classes.
pub const RADICAL_CAP: usize = 1 << 20;

/// All elements of the upper unitriangular subgroup `U^F` of `Sp_{2n}(q)`,
/// in canonical order.
pub fn unipotent_radical(n: usize, q: u64) -> Result<Vec<Mat>> {
    let gens = unipotent_generators(n, q)?;
    let c = subgroup_closure(&gens, RADICAL_CAP)?;
    if !c.is_complete() {
        return Err(Error::CapExceeded { cap: RADICAL_CAP, what: format!("U^F of Sp_{}({q})", 2 * n) });
    }
    let expected = BigUint::from(q).pow((n * n) as u32);
    if BigUint::from(c.elements().len()) != expected {
        return Err(Error::Verification(format!("|U^F| = {}, expected q^(n^2) = {expected}", c.elements().len())));
    }
    Ok(c.elements().to_vec())
}

/// One rational class inside the set of elements carrying a label.
#[derive(Clone, Debug, Serialize)]
pub struct SplitClass {
    pub index: usize,
    #[serde(serialize_with = "crate::catalog::ser_mat")]
    pub rep: Mat,
    pub size: usize,
}

/// The rational classes of `Sp_{2n}(q)` carrying `label`. Split 0 is the
/// class of [`super::representative`]; further splits start from the named
/// representatives, then from the least element of `U^F` not yet covered.
pub fn split_label(label: &UnipotentLabel, n: usize, q: u64, cap: usize) -> Result<Vec<SplitClass>> {
    label.check_for(n, q)?;
    let spec = group_spec(Family::Sp, 2 * n, q)?;
    let packer = spec.packer();
    let mut pending: Vec<Mat> = Vec::new();
    for u in unipotent_radical(n, q)? {
        if &label_of(&u, &spec)? == label {
            pending.push(u);
        }
    }
    let mut out: Vec<SplitClass> = Vec::new();
    let mut covered: HashSet<Key> = HashSet::new();
    let mut seeds = split_representatives(label, n, q)?;
    seeds.extend(pending.iter().cloned());
    for seed in seeds {
        if covered.contains(&packer.key(&seed)) {
            continue;
        }
        let orbit = class_orbit(&seed, &spec, cap)?;
        if !orbit.complete {
            return Err(Error::CapExceeded { cap, what: format!("class of {label} in {}", spec.name()) });
        }
        for u in &pending {
            if orbit.contains(u) {
                covered.insert(packer.key(u));
            }
        }
        if !covered.contains(&packer.key(&seed)) {
            return Err(Error::Verification(format!("named representative of {label} is not in U^F")));
        }
        out.push(SplitClass { index: out.len(), rep: seed, size: orbit.len() });
        if pending.iter().all(|u| covered.contains(&packer.key(u))) {
            break;
        }
    }
    Ok(out)
}

/// Class sizes of every nontrivial unipotent class, grouped by label, and
/// the comparison of their total with `q^{2n^2} - 1`.
#[derive(Clone, Debug, Serialize)]
pub struct UnipotentCensus {
    pub group: String,
    pub classes: BTreeMap<String, Vec<usize>>,
    pub total: String,
    pub expected: String,
}

impl UnipotentCensus {
    pub fn ok(&self) -> bool {
        self.total == self.expected
    }
}

/// Walk `U^F`, open a class at each element not yet covered and record
/// its size under its label.
pub fn unipotent_census(n: usize, q: u64, cap: usize) -> Result<UnipotentCensus> {
    let spec: GroupSpec = group_spec(Family::Sp, 2 * n, q)?;
    let packer = spec.packer();
    let radical = unipotent_radical(n, q)?;
    let mut covered: HashSet<Key> = HashSet::new();
    let mut classes: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let mut total = BigUint::from(0u32);
    for u in &radical {
        if u.is_identity() || covered.contains(&packer.key(u)) {
            continue;
        }
        let orbit = class_orbit(u, &spec, cap)?;
        if !orbit.complete {
            return Err(Error::CapExceeded { cap, what: format!("unipotent class in {}", spec.name()) });
        }
        for v in &radical {
            if orbit.contains(v) {
                covered.insert(packer.key(v));
            }
        }
        total += orbit.len();
        classes.entry(label_of(u, &spec)?.to_string()).or_default().push(orbit.len());
    }
    let expected = BigUint::from(q).pow((2 * n * n) as u32) - 1u32;
    Ok(UnipotentCensus { group: spec.name(), classes, total: total.to_string(), expected: expected.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_orders() {
        assert_eq!(unipotent_radical(2, 2).unwrap().len(), 16);
        assert_eq!(unipotent_radical(2, 3).unwrap().len(), 81);
    }

    #[test]
    fn sp4_3_two_two_splits() {
        let l: UnipotentLabel = "2,2".parse().unwrap();
        let s = split_label(&l, 2, 3, 1 << 20).unwrap();
        let mut sizes: Vec<usize> = s.iter().map(|c| c.size).collect();
        sizes.sort();
        assert_eq!(sizes, [240, 480]);
    }

    #[test]
    fn census_matches_unipotent_count() {
        for (n, q) in [(2, 2), (2, 3), (2, 4)] {
            let c = unipotent_census(n, q, 1 << 20).unwrap();
            assert!(c.ok(), "{c:?}");
        }
    }
}
