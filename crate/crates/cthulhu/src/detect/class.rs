use std::collections::HashMap;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::matgroup::{class_orbit, GroupSpec, Mat, Orbit};
use crate::rack::{conj_rack, Rack};

/// A full conjugacy class as a rack, with the group generators that produced
/// it so conjugators and centralizer elements can be rebuilt.
#[derive(Clone, Debug)]
pub struct ClassRack {
    pub rack: Rack,
    pub group: String,
    pub group_order: BigUint,
    orbit: Orbit,
    gens: Vec<Mat>,
    gen_invs: Vec<Mat>,
}

impl ClassRack {
    /// Class of `rep` in the group of `spec`; fails when larger than `cap`.
    pub fn new(rep: &Mat, spec: &GroupSpec, cap: usize) -> Result<ClassRack> {
        let orbit = class_orbit(rep, spec, cap)?;
        if !orbit.complete {
            return Err(Error::CapExceeded { cap, what: format!("class of {} in {}", rep.to_text(), spec.name()) });
        }
        let rack = conj_rack(&orbit.elems)?;
        Ok(ClassRack {
            rack,
            group: spec.name(),
            group_order: spec.order.clone(),
            orbit,
            gens: spec.generators.clone(),
            gen_invs: spec.generator_inverses.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.orbit.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbit.is_empty()
    }

    pub fn rep(&self) -> &Mat {
        &self.orbit.elems[0]
    }

    pub fn elems(&self) -> &[Mat] {
        &self.orbit.elems
    }

    pub fn elem(&self, i: usize) -> &Mat {
        &self.orbit.elems[i]
    }

    pub fn index_of(&self, m: &Mat) -> Option<usize> {
        self.orbit.position(m)
    }

    pub fn contains(&self, m: &Mat) -> bool {
        self.orbit.contains(m)
    }

    pub fn generators(&self) -> &[Mat] {
        &self.gens
    }

    /// `(g, g^{-1})` with `g rep g^{-1} = elem(i)`.
    pub fn conjugator(&self, i: usize) -> (Mat, Mat) {
        let f = self.rep().field();
        let n = self.rep().n();
        let mut g = Mat::identity(f, n);
        let mut gi = Mat::identity(f, n);
        for k in self.orbit.word(i) {
            g = self.gens[k].mul(&g);
            gi = gi.mul(&self.gen_invs[k]);
        }
        (g, gi)
    }

    /// Up to `max` distinct nontrivial Schreier generators of the centralizer
    /// of the representative, read off at evenly spread orbit positions.
    pub fn centralizer_gens(&self, max: usize) -> Vec<Mat> {
        let n = self.len();
        let mut out: Vec<Mat> = Vec::new();
        if n == 0 || max == 0 {
            return out;
        }
        let samples = (4 * max).min(n);
        let mut positions: Vec<usize> = (0..samples).map(|k| k * n / samples).collect();
        positions.dedup();
        for i in positions {
            let (ui, _) = self.conjugator(i);
            for (g, gi) in self.gens.iter().zip(&self.gen_invs) {
                let img = self.elem(i).conj(g, gi);
                let j = self.index_of(&img).expect("class is closed under the generators");
                let (_, uj_inv) = self.conjugator(j);
                let h = uj_inv.mul(g).mul(&ui);
                if !h.is_identity() && !out.contains(&h) {
                    out.push(h);
                    if out.len() >= max {
                        return out;
                    }
                }
            }
        }
        out
    }

    /// Orbits of the subgroup generated by `hgens` on the class, as sorted
    /// index lists ordered by least member.
    pub fn orbits_under(&self, hgens: &[Mat]) -> Vec<Vec<usize>> {
        let invs: Vec<Mat> = hgens.iter().map(|h| h.inverse().expect("group element")).collect();
        let n = self.len();
        let mut owner = vec![usize::MAX; n];
        let mut orbits = Vec::new();
        for start in 0..n {
            if owner[start] != usize::MAX {
                continue;
            }
            let id = orbits.len();
            owner[start] = id;
            let mut orb = vec![start];
            let mut head = 0;
            while head < orb.len() {
                let y = self.elem(orb[head]).clone();
                for (h, hi) in hgens.iter().zip(&invs) {
                    let j = self.index_of(&y.conj(h, hi)).expect("centralizer preserves the class");
                    if owner[j] == usize::MAX {
                        owner[j] = id;
                        orb.push(j);
                    }
                }
                head += 1;
            }
            orb.sort_unstable();
            orbits.push(orb);
        }
        orbits
    }

    /// Indices of the class that lie in the given set of group elements.
    pub fn intersect(&self, elements: &[Mat]) -> Vec<usize> {
        let mut v: Vec<usize> = elements.iter().filter_map(|m| self.index_of(m)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Map from indices to positions in an ordered subset.
    pub(crate) fn positions(subset: &[usize]) -> HashMap<usize, usize> {
        subset.iter().enumerate().map(|(p, &i)| (i, p)).collect()
    }
}
