//! Finite racks: conjugation racks of matrix sets, abstract table racks and
//! direct products, with subrack closure, decomposition, soberness and the
//! inner group.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matgroup::{Key, Mat, Packer};
use crate::perm;

/// Racks up to this size get a materialized operation table at construction.
pub const MATERIALIZE_LIMIT: usize = 256;
/// Exhaustive soberness scans are limited to this many elements.
pub const SOBER_EXHAUSTIVE_LIMIT: usize = 20;
/// Random triples checked by the sampled axiom test.
pub const AXIOM_SAMPLES: usize = 10_000;
const AXIOM_SEED: u64 = 0x5eed_0a11;

#[derive(Clone)]
struct ConjData {
    elems: Vec<Mat>,
    inv: Vec<Mat>,
    packer: Packer,
    index: HashMap<Key, u32>,
}

#[derive(Clone)]
enum Backend {
    Conj(Arc<ConjData>),
    Table,
}

/// A finite rack on `0..len`.
#[derive(Clone)]
pub struct Rack {
    backend: Backend,
    len: usize,
    table: Arc<OnceLock<Vec<u32>>>,
}

impl std::fmt::Debug for Rack {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Rack(len={})", self.len)
    }
}

/// Outcome of the axiom checks.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct AxiomReport {
    pub exhaustive: bool,
    pub triples_checked: u64,
    pub self_distributive: bool,
    pub bijective: bool,
    pub crossed_set: bool,
}

impl AxiomReport {
    pub fn ok(&self) -> bool {
        self.self_distributive && self.bijective && self.crossed_set
    }
}

/// A subset closed under the rack operation.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Subrack {
    /// Sorted member indices of the parent rack.
    pub members: Vec<usize>,
    pub abelian: bool,
    pub indecomposable: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SoberMode {
    Exhaustive,
    Pairs,
}

#[derive(Clone, Debug, Serialize)]
pub struct SoberReport {
    pub sober: bool,
    /// True for the pairs mode, which only inspects 2-generated subracks.
    pub partial: bool,
    pub subracks_checked: u64,
    pub counterexample: Option<Vec<usize>>,
}

/// Conjugation rack `x ▷ y = x y x^{-1}` on a set of invertible matrices.
/// Fails when the set is not closed under its own conjugation action.
pub fn conj_rack(orbit: &[Mat]) -> Result<Rack> {
    if orbit.is_empty() {
        return Err(Error::Precondition("a rack needs at least one element".into()));
    }
    let packer = Packer::for_mat(&orbit[0]);
    let mut index = HashMap::with_capacity(orbit.len());
    for (i, m) in orbit.iter().enumerate() {
        if index.insert(packer.key(m), i as u32).is_some() {
            return Err(Error::Precondition(format!("duplicate element {m:?}")));
        }
    }
    let inv = orbit
        .iter()
        .map(|m| m.inverse().ok_or_else(|| Error::Precondition("singular matrix in rack".into())))
        .collect::<Result<Vec<_>>>()?;
    let data = ConjData { elems: orbit.to_vec(), inv, packer, index };
    let rack = Rack { backend: Backend::Conj(Arc::new(data)), len: orbit.len(), table: Arc::new(OnceLock::new()) };
    if rack.len <= MATERIALIZE_LIMIT {
        rack.try_materialize()?;
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(AXIOM_SEED);
        for _ in 0..AXIOM_SAMPLES.min(rack.len * rack.len) {
            let x = rng.random_range(0..rack.len);
            let y = rng.random_range(0..rack.len);
            rack.try_op(x, y)?;
        }
    }
    Ok(rack)
}

impl Rack {
    /// Abstract rack from a full table, `table[x * n + y] = x ▷ y`.
    pub fn from_table(n: usize, table: Vec<u32>) -> Result<Rack> {
        if table.len() != n * n || table.iter().any(|&v| v as usize >= n) {
            return Err(Error::Precondition("malformed rack table".into()));
        }
        let lock = OnceLock::new();
        let _ = lock.set(table);
        Ok(Rack { backend: Backend::Table, len: n, table: Arc::new(lock) })
    }

    /// Direct product `X × Y` with componentwise operation; the pair `(x, y)`
    /// has index `x * |Y| + y`.
    pub fn product(x: &Rack, y: &Rack) -> Result<Rack> {
        let (a, b) = (x.len, y.len);
        let n = a * b;
        let mut table = vec![0u32; n * n];
        for x1 in 0..a {
            for y1 in 0..b {
                for x2 in 0..a {
                    for y2 in 0..b {
                        let v = x.op(x1, x2) * b + y.op(y1, y2);
                        table[(x1 * b + y1) * n + x2 * b + y2] = v as u32;
                    }
                }
            }
        }
        Rack::from_table(n, table)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_materialized(&self) -> bool {
        self.table.get().is_some()
    }

    /// Matrix behind an index, for conjugation racks.
    pub fn elem(&self, i: usize) -> Option<&Mat> {
        match &self.backend {
            Backend::Conj(d) => d.elems.get(i),
            Backend::Table => None,
        }
    }

    pub fn elems(&self) -> Option<&[Mat]> {
        match &self.backend {
            Backend::Conj(d) => Some(&d.elems),
            Backend::Table => None,
        }
    }

    pub fn inverse_elem(&self, i: usize) -> Option<&Mat> {
        match &self.backend {
            Backend::Conj(d) => d.inv.get(i),
            Backend::Table => None,
        }
    }

    pub fn index_of(&self, m: &Mat) -> Option<usize> {
        match &self.backend {
            Backend::Conj(d) => d.index.get(&d.packer.key(m)).map(|&i| i as usize),
            Backend::Table => None,
        }
    }

    pub fn packer(&self) -> Option<&Packer> {
        match &self.backend {
            Backend::Conj(d) => Some(&d.packer),
            Backend::Table => None,
        }
    }

    fn try_op(&self, x: usize, y: usize) -> Result<usize> {
        if let Some(t) = self.table.get() {
            return Ok(t[x * self.len + y] as usize);
        }
        match &self.backend {
            Backend::Conj(d) => {
                let z = d.elems[x].mul(&d.elems[y]).mul(&d.inv[x]);
                d.index
                    .get(&d.packer.key(&z))
                    .map(|&i| i as usize)
                    .ok_or_else(|| Error::Precondition(format!("set is not closed: {x} ▷ {y} = {z:?}")))
            }
            Backend::Table => unreachable!("table racks are always materialized"),
        }
    }

    /// `x ▷ y`.
    #[inline]
    pub fn op(&self, x: usize, y: usize) -> usize {
        self.try_op(x, y).expect("rack closure was verified at construction")
    }

    /// The permutation `x ▷ -`.
    pub fn left(&self, x: usize) -> Vec<u32> {
        if let Some(t) = self.table.get() {
            return t[x * self.len..(x + 1) * self.len].to_vec();
        }
        (0..self.len).map(|y| self.op(x, y) as u32).collect()
    }

    fn try_materialize(&self) -> Result<()> {
        if self.table.get().is_some() {
            return Ok(());
        }
        let mut t = Vec::with_capacity(self.len * self.len);
        for x in 0..self.len {
            for y in 0..self.len {
                t.push(self.try_op(x, y)? as u32);
            }
        }
        let _ = self.table.set(t);
        Ok(())
    }

    /// Build the full operation table now.
    pub fn materialize(&self) {
        self.try_materialize().expect("rack closure was verified at construction");
    }

    /// Check self-distributivity, bijectivity of left translations and the
    /// crossed-set law, exhaustively up to [`MATERIALIZE_LIMIT`] elements and
    /// on [`AXIOM_SAMPLES`] seeded random triples above.
    pub fn check_axioms(&self) -> AxiomReport {
        let n = self.len;
        let exhaustive = n <= MATERIALIZE_LIMIT;
        let mut rep = AxiomReport {
            exhaustive,
            triples_checked: 0,
            self_distributive: true,
            bijective: true,
            crossed_set: true,
        };
        if exhaustive {
            self.materialize();
            for x in 0..n {
                if !perm::is_permutation(&self.left(x)) {
                    rep.bijective = false;
                }
                for y in 0..n {
                    let xy = self.op(x, y);
                    if (xy == y) != (self.op(y, x) == x) {
                        rep.crossed_set = false;
                    }
                    for z in 0..n {
                        if self.op(x, self.op(y, z)) != self.op(xy, self.op(x, z)) {
                            rep.self_distributive = false;
                        }
                    }
                }
            }
            rep.triples_checked = (n * n * n) as u64;
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(AXIOM_SEED);
            for _ in 0..AXIOM_SAMPLES {
                let x = rng.random_range(0..n);
                let y = rng.random_range(0..n);
                let z = rng.random_range(0..n);
                let xy = self.op(x, y);
                if self.op(x, self.op(y, z)) != self.op(xy, self.op(x, z)) {
                    rep.self_distributive = false;
                }
                if (xy == y) != (self.op(y, x) == x) {
                    rep.crossed_set = false;
                }
            }
            for x in 0..n.min(16) {
                if !perm::is_permutation(&self.left(x)) {
                    rep.bijective = false;
                }
            }
            rep.triples_checked = AXIOM_SAMPLES as u64;
        }
        rep
    }

    /// Smallest subrack containing `seed`, with its abelian and
    /// indecomposable flags.
    pub fn subrack_closure(&self, seed: &[usize]) -> Result<Subrack> {
        if seed.is_empty() {
            return Err(Error::Precondition("seed must be nonempty".into()));
        }
        let mut members: Vec<usize> = Vec::new();
        let mut inside = HashSet::new();
        for &s in seed {
            if s >= self.len {
                return Err(Error::Precondition(format!("index {s} out of range")));
            }
            if inside.insert(s) {
                members.push(s);
            }
        }
        // every pair (x, y) with both indices below `done` has been processed
        let mut done = 0;
        while done < members.len() {
            let y = members[done];
            let upto = done + 1;
            for i in 0..upto {
                let x = members[i];
                for (a, b) in [(x, y), (y, x)] {
                    let z = self.op(a, b);
                    if inside.insert(z) {
                        members.push(z);
                    }
                }
            }
            done += 1;
        }
        members.sort_unstable();
        Ok(self.analyse(members))
    }

    fn analyse(&self, members: Vec<usize>) -> Subrack {
        let abelian = members
            .iter()
            .all(|&x| members.iter().all(|&y| self.op(x, y) == y));
        let blocks = self.decompose_subset(&members);
        Subrack { indecomposable: blocks.len() == 1, abelian, members }
    }

    /// Inner-group orbits of a subset closed under the operation.
    pub fn decompose_subset(&self, members: &[usize]) -> Vec<Vec<usize>> {
        let mut block_of: HashMap<usize, usize> = HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for &start in members {
            if block_of.contains_key(&start) {
                continue;
            }
            let id = blocks.len();
            let mut block = vec![start];
            block_of.insert(start, id);
            let mut head = 0;
            while head < block.len() {
                let y = block[head];
                for &x in members {
                    let z = self.op(x, y);
                    if let std::collections::hash_map::Entry::Vacant(e) = block_of.entry(z) {
                        e.insert(id);
                        block.push(z);
                    }
                }
                head += 1;
            }
            block.sort_unstable();
            blocks.push(block);
        }
        blocks.sort();
        blocks
    }

    /// Inner-group orbits of the whole rack.
    pub fn decompose(&self) -> Vec<Vec<usize>> {
        let all: Vec<usize> = (0..self.len).collect();
        self.decompose_subset(&all)
    }

    /// Soberness: every subrack is abelian or indecomposable.
    pub fn sober_check(&self, mode: SoberMode) -> Result<SoberReport> {
        match mode {
            SoberMode::Exhaustive => self.sober_exhaustive(),
            SoberMode::Pairs => Ok(self.sober_pairs()),
        }
    }

    fn sober_exhaustive(&self) -> Result<SoberReport> {
        let n = self.len;
        if n > SOBER_EXHAUSTIVE_LIMIT {
            return Err(Error::Precondition(format!(
                "exhaustive soberness needs at most {SOBER_EXHAUSTIVE_LIMIT} elements, got {n}"
            )));
        }
        self.materialize();
        // image masks: img[x][y] = bit of x ▷ y
        let ops: Vec<Vec<u32>> = (0..n).map(|x| self.left(x)).collect();
        let mut checked = 0u64;
        let mut mask: u32 = 0;
        for i in 1u64..(1u64 << n) {
            // Gray code step: flip the lowest set bit position of i
            mask ^= 1 << i.trailing_zeros();
            let closed = (0..n).filter(|&x| mask >> x & 1 == 1).all(|x| {
                (0..n)
                    .filter(|&y| mask >> y & 1 == 1)
                    .all(|y| mask >> ops[x][y] & 1 == 1)
            });
            if !closed {
                continue;
            }
            checked += 1;
            let members: Vec<usize> = (0..n).filter(|&x| mask >> x & 1 == 1).collect();
            let sub = self.analyse(members);
            if !sub.abelian && !sub.indecomposable {
                return Ok(SoberReport {
                    sober: false,
                    partial: false,
                    subracks_checked: checked,
                    counterexample: Some(sub.members),
                });
            }
        }
        Ok(SoberReport { sober: true, partial: false, subracks_checked: checked, counterexample: None })
    }

    fn sober_pairs(&self) -> SoberReport {
        let mut checked = 0u64;
        for x in 0..self.len {
            for y in x + 1..self.len {
                let sub = self.subrack_closure(&[x, y]).expect("valid seed");
                checked += 1;
                if !sub.abelian && !sub.indecomposable {
                    return SoberReport {
                        sober: false,
                        partial: true,
                        subracks_checked: checked,
                        counterexample: Some(sub.members),
                    };
                }
            }
        }
        SoberReport { sober: true, partial: true, subracks_checked: checked, counterexample: None }
    }

    /// Order of the inner group generated by the permutations `x ▷ -`.
    pub fn inn_order(&self) -> BigUint {
        let gens: Vec<Vec<u32>> = (0..self.len).map(|x| self.left(x)).collect();
        let mut uniq: Vec<Vec<u32>> = gens.into_iter().filter(|g| !perm::is_identity(g)).collect();
        uniq.sort();
        uniq.dedup();
        perm::group_order(self.len, &uniq)
    }

    /// Carrier legend and (optionally) the operation table.
    pub fn dump(&self, with_table: bool) -> serde_json::Value {
        let legend: Vec<String> = match self.elems() {
            Some(e) => e.iter().map(|m| m.to_text()).collect(),
            None => (0..self.len).map(|i| i.to_string()).collect(),
        };
        let mut v = serde_json::json!({ "size": self.len, "legend": legend });
        if with_table {
            let rows: Vec<String> = (0..self.len)
                .map(|x| {
                    self.left(x).iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
                })
                .collect();
            v["table"] = serde_json::json!(rows);
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::make_field;

    fn dihedral_reflections(n: usize) -> Rack {
        // reflections of D_n act as i ▷ j = 2i - j mod n
        let mut t = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                t[i * n + j] = ((2 * i + n - j) % n) as u32;
            }
        }
        Rack::from_table(n, t).unwrap()
    }

    #[test]
    fn dihedral_rack() {
        let r = dihedral_reflections(4);
        assert!(r.check_axioms().ok());
        assert_eq!(r.decompose().len(), 2);
        let r3 = dihedral_reflections(3);
        assert_eq!(r3.decompose().len(), 1);
        assert_eq!(r3.inn_order(), BigUint::from(6u32));
        assert!(r3.sober_check(SoberMode::Exhaustive).unwrap().sober);
    }

    #[test]
    fn singleton_and_abelian() {
        let f = make_field(3, 1).unwrap();
        let r = conj_rack(&[Mat::identity(&f, 2)]).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.inn_order(), BigUint::from(1u32));
        let a = Mat::elementary(&f, 3, 0, 2, 1);
        let b = Mat::elementary(&f, 3, 0, 1, 1);
        let c = Mat::elementary(&f, 3, 1, 2, 1);
        assert!(a.commutes_with(&b));
        let r = conj_rack(&[a, b.clone()]).unwrap();
        let s = r.subrack_closure(&[0, 1]).unwrap();
        assert!(s.abelian && !s.indecomposable);
        assert_eq!(r.decompose(), vec![vec![0], vec![1]]);
        assert!(conj_rack(&[b, c]).is_err());
    }

    #[test]
    fn product_rack_axioms() {
        let p = Rack::product(&dihedral_reflections(3), &dihedral_reflections(4)).unwrap();
        assert_eq!(p.len(), 12);
        assert!(p.check_axioms().ok());
    }
}
