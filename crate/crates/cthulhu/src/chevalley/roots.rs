use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Root system kinds realized as matrices: `C_n` inside `Sp_{2n}` and
/// `A_{n-1}` inside `SL_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RootKind {
    C,
    A,
}

/// A root written in the epsilon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Root(pub Vec<i32>);

impl Root {
    pub fn add(&self, o: &Root) -> Root {
        Root(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, k: i32) -> Root {
        Root(self.0.iter().map(|a| a * k).collect())
    }

    pub fn neg(&self) -> Root {
        self.scale(-1)
    }

    pub fn dot(&self, o: &Root) -> i32 {
        self.0.iter().zip(&o.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> i32 {
        self.dot(self)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// `2(self, beta)/(beta, beta)`, the pairing with the coroot of `beta`.
    pub fn pairing(&self, beta: &Root) -> i32 {
        2 * self.dot(beta) / beta.norm()
    }

    /// The coroot `2 beta / (beta, beta)` as a cocharacter vector.
    pub fn coroot(&self) -> Vec<i32> {
        let nb = self.norm();
        self.0.iter().map(|&a| 2 * a / nb).collect()
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Positive roots, simple roots and heights of a rank-`n` system.
#[derive(Clone, Debug)]
pub struct RootSystem {
    pub kind: RootKind,
    pub rank: usize,
    /// Length of epsilon vectors: `rank` for `C`, `rank + 1` for `A`.
    pub dim: usize,
    /// Positive roots in the default order (height, then simple coordinates).
    pub positive: Vec<Root>,
    pub simple: Vec<Root>,
}

fn eps(dim: usize, i: usize) -> Root {
    let mut v = vec![0; dim];
    v[i] = 1;
    Root(v)
}

/// The root system `C_n` (`2 <= n <= 10`).
pub fn root_system(n: usize) -> Result<RootSystem> {
    if !(2..=10).contains(&n) {
        return Err(Error::Precondition(format!("rank {n} outside 2..=10")));
    }
    RootSystem::build(RootKind::C, n)
}

/// The root system `A_{n-1}` of `SL_n` (`2 <= n <= 10`).
pub fn root_system_a(n: usize) -> Result<RootSystem> {
    if !(2..=10).contains(&n) {
        return Err(Error::Precondition(format!("matrix size {n} outside 2..=10")));
    }
    RootSystem::build(RootKind::A, n - 1)
}

impl RootSystem {
    fn build(kind: RootKind, rank: usize) -> Result<RootSystem> {
        let dim = match kind {
            RootKind::C => rank,
            RootKind::A => rank + 1,
        };
        let mut positive = Vec::new();
        for i in 0..dim {
            for j in i + 1..dim {
                positive.push(eps(dim, i).add(&eps(dim, j).neg()));
                if kind == RootKind::C {
                    positive.push(eps(dim, i).add(&eps(dim, j)));
                }
            }
            if kind == RootKind::C {
                positive.push(eps(dim, i).scale(2));
            }
        }
        let mut simple: Vec<Root> =
            (0..dim - 1).map(|i| eps(dim, i).add(&eps(dim, i + 1).neg())).collect();
        if kind == RootKind::C {
            simple.push(eps(dim, dim - 1).scale(2));
        }
        let mut rs = RootSystem { kind, rank, dim, positive, simple };
        let mut pos = std::mem::take(&mut rs.positive);
        pos.sort_by_key(|r| (rs.height(r), rs.simple_coords(r)));
        rs.positive = pos;
        Ok(rs)
    }

    pub fn is_root(&self, r: &Root) -> bool {
        if r.0.len() != self.dim || r.is_zero() {
            return false;
        }
        self.positive.iter().any(|p| p == r || p.neg() == *r)
    }

    pub fn is_positive(&self, r: &Root) -> bool {
        self.positive.contains(r)
    }

    pub fn index(&self, r: &Root) -> Option<usize> {
        self.positive.iter().position(|p| p == r)
    }

    /// Coordinates in the basis of simple roots.
    pub fn simple_coords(&self, r: &Root) -> Vec<i32> {
        let v = &r.0;
        let mut c = Vec::with_capacity(self.rank);
        let mut acc = 0;
        for k in 0..self.rank {
            acc += v[k];
            c.push(acc);
        }
        if self.kind == RootKind::C {
            let last = self.rank - 1;
            c[last] = (c[last - 1] + v[last]) / 2;
            if self.rank == 1 {
                c[0] = v[0] / 2;
            }
        }
        c
    }

    pub fn height(&self, r: &Root) -> i32 {
        self.simple_coords(r).iter().sum()
    }

    pub fn is_long(&self, r: &Root) -> bool {
        self.kind == RootKind::C && r.norm() == 4
    }

    pub fn highest_root(&self) -> Root {
        self.positive.last().cloned().expect("nonempty system")
    }

    /// Bourbaki-style label such as `a1+2a2`.
    pub fn label(&self, r: &Root) -> String {
        let c = self.simple_coords(r);
        let sign = if c.iter().any(|&x| x < 0) { -1 } else { 1 };
        let mut terms = Vec::new();
        for (i, &x) in c.iter().enumerate() {
            let x = x * sign;
            if x == 0 {
                continue;
            }
            if x == 1 {
                terms.push(format!("a{}", i + 1));
            } else {
                terms.push(format!("{x}a{}", i + 1));
            }
        }
        let body = terms.join("+");
        if sign < 0 {
            format!("-({body})")
        } else {
            body
        }
    }

    pub fn parse_label(&self, s: &str) -> Result<Root> {
        let s = s.trim();
        let (neg, body) = match s.strip_prefix("-(").and_then(|b| b.strip_suffix(')')) {
            Some(b) => (true, b),
            None => (false, s),
        };
        let mut coords = vec![0; self.rank];
        for term in body.split('+') {
            let term = term.trim();
            let pos = term.find('a').ok_or_else(|| Error::Parse(s.into()))?;
            let k: i32 = if pos == 0 { 1 } else { term[..pos].parse().map_err(|_| Error::Parse(s.into()))? };
            let i: usize = term[pos + 1..].parse().map_err(|_| Error::Parse(s.into()))?;
            if i == 0 || i > self.rank {
                return Err(Error::Parse(s.into()));
            }
            coords[i - 1] += k;
        }
        let mut r = Root(vec![0; self.dim]);
        for (i, &k) in coords.iter().enumerate() {
            r = r.add(&self.simple[i].scale(k));
        }
        if neg {
            r = r.neg();
        }
        if !self.is_root(&r) {
            return Err(Error::Parse(format!("{s} is not a root")));
        }
        Ok(r)
    }

    /// Length of the `alpha`-string through `beta`: returns `(m, big_m)` with
    /// `beta - m*alpha, ..., beta + big_m*alpha` all roots (or zero excluded).
    pub fn string(&self, alpha: &Root, beta: &Root) -> (i32, i32) {
        let mut m = 0;
        while self.is_root(&beta.add(&alpha.scale(-(m + 1)))) {
            m += 1;
        }
        let mut big = 0;
        while self.is_root(&beta.add(&alpha.scale(big + 1))) {
            big += 1;
        }
        (m, big)
    }

    /// True when `(alpha, beta)` is a vanishing pair in characteristic `p`:
    /// for `C_n` these are orthogonal short roots with a root sum, at `p = 2`.
    pub fn is_degenerate_pair(&self, alpha: &Root, beta: &Root, p: u32) -> bool {
        if !self.is_root(&alpha.add(beta)) {
            return false;
        }
        let (m, _) = self.string(alpha, beta);
        (m + 1) as u32 % p == 0
    }

    /// `Sigma_alpha`: positive `beta` with `alpha + beta` a root and the pair
    /// not degenerate in characteristic `p`.
    pub fn sigma(&self, alpha: &Root, p: u32) -> Vec<Root> {
        self.positive
            .iter()
            .filter(|b| self.is_root(&alpha.add(b)) && !self.is_degenerate_pair(alpha, b, p))
            .cloned()
            .collect()
    }
}

/// Fixed total orders on the positive roots, all refining height.
pub fn ordering(rs: &RootSystem, ordering_id: u8) -> Vec<Root> {
    let mut v = rs.positive.clone();
    match ordering_id {
        0 => v.sort_by_key(|r| (rs.height(r), rs.simple_coords(r))),
        1 => v.sort_by_key(|r| (rs.height(r), std::cmp::Reverse(rs.simple_coords(r)))),
        _ => v.sort_by_key(|r| (rs.height(r), std::cmp::Reverse(r.0.clone()))),
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_heights() {
        for n in 2..=5 {
            let rs = root_system(n).unwrap();
            assert_eq!(rs.positive.len(), n * n);
            let hr = rs.highest_root();
            let mut expect = vec![0; n];
            expect[0] = 2;
            assert_eq!(hr.0, expect);
            assert!(rs.is_long(&hr));
            assert_eq!(rs.height(&hr), 2 * n as i32 - 1);
        }
        let a = root_system_a(4).unwrap();
        assert_eq!(a.positive.len(), 6);
    }

    #[test]
    fn labels_round_trip() {
        let rs = root_system(3).unwrap();
        for r in &rs.positive {
            assert_eq!(&rs.parse_label(&rs.label(r)).unwrap(), r);
        }
        assert_eq!(rs.label(&rs.highest_root()), "2a1+2a2+a3");
    }

    #[test]
    fn string_lengths_match_pairing() {
        let rs = root_system(3).unwrap();
        for a in &rs.positive {
            for b in &rs.positive {
                if a == b {
                    continue;
                }
                let (m, big) = rs.string(a, b);
                assert_eq!(m - big, b.pairing(a));
            }
        }
    }

    #[test]
    fn orthogonal_short_pair_degenerate_only_in_char_two() {
        let rs = root_system(2).unwrap();
        let a = Root(vec![1, -1]);
        let b = Root(vec![1, 1]);
        assert!(rs.is_degenerate_pair(&a, &b, 2));
        assert!(!rs.is_degenerate_pair(&a, &b, 3));
        assert!(!rs.sigma(&a, 2).contains(&b));
    }
}
