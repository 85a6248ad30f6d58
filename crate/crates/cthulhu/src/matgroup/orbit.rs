use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};

use super::{apply_endo, Endo, GroupSpec, Key, Mat, Packer};

/// Breadth-first orbit with parent pointers, so that for every element a
/// conjugator from the starting point can be rebuilt.
#[derive(Clone, Debug)]
pub struct Orbit {
    pub packer: Packer,
    /// Elements in discovery order; index 0 is the starting point.
    pub elems: Vec<Mat>,
    pub index: HashMap<Key, usize>,
    parent: Vec<(u32, u32)>,
    /// False when the cap stopped the search early.
    pub complete: bool,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn position(&self, x: &Mat) -> Option<usize> {
        self.index.get(&self.packer.key(x)).copied()
    }

    pub fn contains(&self, x: &Mat) -> bool {
        self.position(x).is_some()
    }

    /// Elements sorted canonically.
    pub fn sorted(&self) -> Vec<Mat> {
        let mut v = self.elems.clone();
        v.sort();
        v
    }

    /// Word (generator indices, applied first to last) carrying the start
    /// point to element `i`.
    pub fn word(&self, mut i: usize) -> Vec<usize> {
        let mut w = Vec::new();
        while i != 0 {
            let (p, g) = self.parent[i];
            w.push(g as usize);
            i = p as usize;
        }
        w.reverse();
        w
    }

    /// `g` with `g * start * g^{-1} = elems[i]` for a conjugation orbit built
    /// from `gens`.
    pub fn conjugator(&self, i: usize, gens: &[Mat]) -> Mat {
        let mut g = Mat::identity(self.packer.field(), self.packer.n());
        for k in self.word(i) {
            g = gens[k].mul(&g);
        }
        g
    }
}

/// Orbit of `start` under the maps `y -> L y R` for the given pairs.
pub fn orbit_under(start: &Mat, maps: &[(Mat, Mat)], cap: usize) -> Orbit {
    let packer = Packer::for_mat(start);
    let mut index = HashMap::new();
    index.insert(packer.key(start), 0usize);
    let mut elems = vec![start.clone()];
    let mut parent = vec![(0u32, 0u32)];
    let mut head = 0;
    let mut complete = true;
    'bfs: while head < elems.len() {
        let y = elems[head].clone();
        for (gi, (l, r)) in maps.iter().enumerate() {
            let z = l.mul(&y).mul(r);
            let k = packer.key(&z);
            if let std::collections::hash_map::Entry::Vacant(e) = index.entry(k) {
                if elems.len() >= cap {
                    complete = false;
                    break 'bfs;
                }
                e.insert(elems.len());
                elems.push(z);
                parent.push((head as u32, gi as u32));
            }
        }
        head += 1;
    }
    Orbit { packer, elems, index, parent, complete }
}

fn conjugation_maps(gens: &[Mat], invs: &[Mat]) -> Vec<(Mat, Mat)> {
    gens.iter().cloned().zip(invs.iter().cloned()).collect()
}

/// Conjugacy class of `rep` under the group's generators, stopping at `cap`
/// elements (then `complete` is false).
pub fn class_orbit(rep: &Mat, spec: &GroupSpec, cap: usize) -> Result<Orbit> {
    if !spec.membership(rep)? {
        return Err(Error::Precondition(format!("{rep:?} is not in {}", spec.name())));
    }
    let maps = conjugation_maps(&spec.generators, &spec.generator_inverses);
    Ok(orbit_under(rep, &maps, cap))
}

/// How [`split_classes`] acts on the input set.
#[derive(Clone, Debug)]
pub enum SplitMode {
    /// Conjugation by the group's generators.
    Conjugation,
    /// `y -> x y F(x^{-1})` for `x` in `acting` (the group's generators when
    /// empty).
    Twisted { endo: Endo, acting: Vec<Mat> },
}

/// One orbit found by [`split_classes`].
#[derive(Clone, Debug)]
pub struct ClassInfo {
    /// Least member in canonical order.
    pub rep: Mat,
    pub size: usize,
    /// Members sorted canonically.
    pub members: Vec<Mat>,
}

/// Partition `elements` into orbits. Every orbit must stay inside the input
/// set; classes are returned sorted by their least member.
pub fn split_classes(elements: &[Mat], spec: &GroupSpec, mode: &SplitMode) -> Result<Vec<ClassInfo>> {
    let maps = match mode {
        SplitMode::Conjugation => conjugation_maps(&spec.generators, &spec.generator_inverses),
        SplitMode::Twisted { endo, acting } => {
            let acting = if acting.is_empty() { &spec.generators } else { acting };
            acting
                .iter()
                .map(|x| {
                    let xi = x.inverse().ok_or_else(|| Error::Precondition("singular acting element".into()))?;
                    Ok((x.clone(), apply_endo(&xi, endo)?))
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    let packer = spec.packer();
    let mut sorted: Vec<(Key, &Mat)> = elements.iter().map(|m| (packer.key(m), m)).collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    sorted.dedup_by(|a, b| a.0 == b.0);
    let universe: HashSet<&Key> = sorted.iter().map(|(k, _)| k).collect();
    let mut visited: HashSet<Key> = HashSet::new();
    let mut classes = Vec::new();
    for (k, m) in &sorted {
        if visited.contains(k) {
            continue;
        }
        let orb = orbit_under(m, &maps, usize::MAX);
        let mut members = Vec::with_capacity(orb.len());
        for x in orb.elems {
            let kx = packer.key(&x);
            if !universe.contains(&kx) {
                return Err(Error::Precondition(format!(
                    "orbit of {m:?} leaves the input set at {x:?}"
                )));
            }
            visited.insert(kx);
            members.push(x);
        }
        members.sort();
        classes.push(ClassInfo { rep: members[0].clone(), size: members.len(), members });
    }
    classes.sort_by(|a, b| a.rep.cmp(&b.rep));
    Ok(classes)
}

/// Result of [`subgroup_closure`].
#[derive(Clone, Debug)]
pub enum Closure {
    Complete(Vec<Mat>),
    /// The cap was hit; carries the elements found so far.
    Capped(Vec<Mat>),
}

impl Closure {
    pub fn elements(&self) -> &[Mat] {
        match self {
            Closure::Complete(v) | Closure::Capped(v) => v,
        }
    }

    pub fn is_complete(&self) -> bool {
        matches!(self, Closure::Complete(_))
    }
}

/// Subgroup generated by `gens`, by breadth-first right multiplication.
/// Elements are returned in canonical order.
pub fn subgroup_closure(gens: &[Mat], cap: usize) -> Result<Closure> {
    let first = gens
        .first()
        .ok_or_else(|| Error::Precondition("no generators".into()))?;
    for g in gens {
        g.same_shape(first)?;
    }
    let packer = Packer::for_mat(first);
    let id = Mat::identity(first.field(), first.n());
    let mut seen = HashSet::new();
    seen.insert(packer.key(&id));
    let mut elems = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.mul(g);
            if seen.insert(packer.key(&y)) {
                elems.push(y.clone());
                if elems.len() > cap {
                    elems.sort();
                    return Ok(Closure::Capped(elems));
                }
                queue.push_back(y);
            }
        }
    }
    elems.sort();
    Ok(Closure::Complete(elems))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::make_field;
    use crate::matgroup::{group_spec, Family};

    #[test]
    fn central_element_has_trivial_orbit() {
        let g = group_spec(Family::Sp, 4, 3).unwrap();
        let o = class_orbit(&g.identity().neg(), &g, 100).unwrap();
        assert_eq!(o.len(), 1);
        assert!(o.complete);
    }

    #[test]
    fn conjugators_rebuild_members() {
        let g = group_spec(Family::Sp, 4, 3).unwrap();
        let t = Mat::elementary(&g.field, 4, 0, 3, 1);
        let o = class_orbit(&t, &g, 1000).unwrap();
        assert_eq!(o.len(), 40);
        for i in [1, 7, 39] {
            let c = o.conjugator(i, &g.generators);
            assert_eq!(t.conj(&c, &c.inverse().unwrap()), o.elems[i]);
        }
    }

    #[test]
    fn capped_closure_is_reported() {
        let f = make_field(5, 1).unwrap();
        let a = Mat::elementary(&f, 2, 0, 1, 1);
        let b = Mat::elementary(&f, 2, 1, 0, 1);
        let c = subgroup_closure(&[a, b], 50).unwrap();
        assert!(!c.is_complete());
        assert!(c.elements().len() > 50);
    }
}
