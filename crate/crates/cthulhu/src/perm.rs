//! Permutation groups on `0..n` with a deterministic Schreier-Sims order
//! computation. Permutations act on the right: `p^g = g[p]`, and `g * h`
//! means "first `g`, then `h`".

use num_bigint::BigUint;

pub type Perm = Vec<u32>;

pub fn identity(n: usize) -> Perm {
    (0..n as u32).collect()
}

pub fn is_identity(g: &[u32]) -> bool {
    g.iter().enumerate().all(|(i, &v)| i as u32 == v)
}

pub fn compose(g: &[u32], h: &[u32]) -> Perm {
    g.iter().map(|&p| h[p as usize]).collect()
}

pub fn inverse(g: &[u32]) -> Perm {
    let mut inv = vec![0u32; g.len()];
    for (i, &v) in g.iter().enumerate() {
        inv[v as usize] = i as u32;
    }
    inv
}

pub fn is_permutation(g: &[u32]) -> bool {
    let mut seen = vec![false; g.len()];
    for &v in g {
        let v = v as usize;
        if v >= g.len() || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

struct Level {
    base: u32,
    gens: Vec<Perm>,
    /// `transversal[p]` maps the base point to `p`.
    transversal: Vec<Option<Perm>>,
    orbit: Vec<u32>,
}

impl Level {
    fn new(base: u32, n: usize) -> Level {
        let mut l = Level { base, gens: Vec::new(), transversal: vec![None; n], orbit: Vec::new() };
        l.rebuild(n);
        l
    }

    fn rebuild(&mut self, n: usize) {
        self.transversal = vec![None; n];
        self.transversal[self.base as usize] = Some(identity(n));
        self.orbit = vec![self.base];
        let mut head = 0;
        while head < self.orbit.len() {
            let p = self.orbit[head];
            let up = self.transversal[p as usize].clone().unwrap();
            for s in &self.gens {
                let img = s[p as usize];
                if self.transversal[img as usize].is_none() {
                    self.transversal[img as usize] = Some(compose(&up, s));
                    self.orbit.push(img);
                }
            }
            head += 1;
        }
    }
}

/// Base and strong generating set for the group generated by `gens`.
pub struct StabChain {
    n: usize,
    levels: Vec<Level>,
}

impl StabChain {
    pub fn new(n: usize, gens: &[Perm]) -> StabChain {
        let mut chain = StabChain { n, levels: Vec::new() };
        for g in gens {
            if !is_identity(g) {
                chain.add_strong(g.clone(), 0);
            }
        }
        chain.complete();
        chain
    }

    /// Strip `g` through levels starting at `from`; returns the residue and
    /// the level where sifting stopped.
    fn sift(&self, mut g: Perm, from: usize) -> (Perm, usize) {
        for (j, level) in self.levels.iter().enumerate().skip(from) {
            let p = g[level.base as usize];
            match &level.transversal[p as usize] {
                None => return (g, j),
                Some(u) => g = compose(&g, &inverse(u)),
            }
        }
        let len = self.levels.len();
        (g, len)
    }

    /// Add a non-identity element fixing the first `from` base points as a
    /// strong generator on levels `from..`.
    fn add_strong(&mut self, g: Perm, from: usize) {
        let mut depth = from;
        while depth < self.levels.len() && g[self.levels[depth].base as usize] == self.levels[depth].base {
            depth += 1;
        }
        if depth == self.levels.len() {
            let moved = g.iter().enumerate().find(|(i, &v)| *i as u32 != v).map(|(i, _)| i as u32);
            let Some(b) = moved else { return };
            self.levels.push(Level::new(b, self.n));
        }
        for level in self.levels.iter_mut().take(depth + 1).skip(from) {
            level.gens.push(g.clone());
            level.rebuild(self.n);
        }
    }

    fn complete(&mut self) {
        'outer: loop {
            for i in (0..self.levels.len()).rev() {
                let orbit = self.levels[i].orbit.clone();
                let gens = self.levels[i].gens.clone();
                for &p in &orbit {
                    let up = self.levels[i].transversal[p as usize].clone().unwrap();
                    for s in &gens {
                        let img = s[p as usize];
                        let uimg = self.levels[i].transversal[img as usize].clone().unwrap();
                        let h = compose(&compose(&up, s), &inverse(&uimg));
                        let (res, _) = self.sift(h, i + 1);
                        if !is_identity(&res) {
                            self.add_strong(res, i + 1);
                            continue 'outer;
                        }
                    }
                }
            }
            return;
        }
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::from(1u32), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    pub fn contains(&self, g: &[u32]) -> bool {
        let (res, _) = self.sift(g.to_vec(), 0);
        is_identity(&res)
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base).collect()
    }
}

/// Order of the permutation group generated by `gens` on `0..n`.
pub fn group_order(n: usize, gens: &[Perm]) -> BigUint {
    StabChain::new(n, gens).order()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize, pts: &[u32]) -> Perm {
        let mut g = identity(n);
        for w in 0..pts.len() {
            g[pts[w] as usize] = pts[(w + 1) % pts.len()];
        }
        g
    }

    #[test]
    fn symmetric_and_alternating() {
        let n = 6;
        let s6 = group_order(n, &[cycle(n, &[0, 1]), cycle(n, &[0, 1, 2, 3, 4, 5])]);
        assert_eq!(s6, BigUint::from(720u32));
        let a6 = group_order(n, &[cycle(n, &[0, 1, 2]), cycle(n, &[1, 2, 3, 4, 5])]);
        assert_eq!(a6, BigUint::from(360u32));
        let c5 = group_order(n, &[cycle(n, &[0, 1, 2, 3, 4])]);
        assert_eq!(c5, BigUint::from(5u32));
        assert_eq!(group_order(n, &[identity(n)]), BigUint::from(1u32));
    }

    #[test]
    fn membership_in_chain() {
        let n = 5;
        let chain = StabChain::new(n, &[cycle(n, &[0, 1, 2]), cycle(n, &[2, 3, 4])]);
        assert_eq!(chain.order(), BigUint::from(60u32));
        assert!(chain.contains(&cycle(n, &[0, 1, 2, 3, 4])));
        assert!(!chain.contains(&cycle(n, &[0, 1])));
    }
}
