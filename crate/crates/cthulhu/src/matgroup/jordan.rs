use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::Mat;

/// A partition stored with parts in weakly decreasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Result<Partition> {
        if parts.contains(&0) {
            return Err(Error::Parse("partition parts must be positive".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Multiplicity `r_i` of the part `i`.
    pub fn multiplicity(&self, i: usize) -> usize {
        self.parts.iter().filter(|&&p| p == i).count()
    }

    /// `(part, multiplicity)` pairs in increasing part order.
    pub fn multiplicities(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for &p in &self.parts {
            *m.entry(p).or_insert(0) += 1;
        }
        m
    }

    /// Symplectic partitions have even multiplicity at every odd part.
    pub fn is_symplectic(&self) -> bool {
        self.multiplicities().iter().all(|(&i, &r)| i % 2 == 0 || r % 2 == 0)
    }

    /// All partitions of `n`, parts weakly decreasing, in reverse
    /// lexicographic order.
    pub fn all(n: usize) -> Vec<Partition> {
        fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if rest == 0 {
                out.push(Partition { parts: cur.clone() });
                return;
            }
            for p in (1..=max.min(rest)).rev() {
                cur.push(p);
                rec(rest - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, &mut Vec::new(), &mut out);
        out
    }
}

/// Displayed in increasing order with exponents, e.g. `(1^2,2)`.
impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .multiplicities()
            .iter()
            .map(|(&i, &r)| if r == 1 { i.to_string() } else { format!("{i}^{r}") })
            .collect();
        write!(f, "({})", terms.join(","))
    }
}

/// Accepts `2,2`, `(2^2)`, `1^2,2` and similar.
impl FromStr for Partition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        let mut parts = Vec::new();
        for tok in body.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            let (base, exp) = match tok.split_once('^') {
                Some((b, e)) => (b, e),
                None => (tok, "1"),
            };
            let b: usize = base.trim().parse().map_err(|_| Error::Parse(s.into()))?;
            let e: usize = exp.trim().parse().map_err(|_| Error::Parse(s.into()))?;
            parts.extend(std::iter::repeat_n(b, e));
        }
        if parts.is_empty() {
            return Err(Error::Parse(s.into()));
        }
        Partition::new(parts)
    }
}

/// Jordan partition of a unipotent matrix from the ranks of `(X - I)^k`.
pub fn jordan_partition(x: &Mat) -> Result<Partition> {
    let n = x.n();
    let nil = x.sub(&Mat::identity(x.field(), n));
    let mut ranks = vec![n];
    let mut pw = Mat::identity(x.field(), n);
    for _ in 0..n {
        pw = pw.mul(&nil);
        ranks.push(pw.rank());
    }
    if ranks[n] != 0 {
        return Err(Error::Precondition("matrix is not unipotent".into()));
    }
    // blocks of size >= k: ranks[k-1] - ranks[k]
    let mut parts = Vec::new();
    for k in 1..=n {
        let ge_k = ranks[k - 1] - ranks[k];
        let ge_k1 = if k < n { ranks[k] - ranks[k + 1] } else { 0 };
        parts.extend(std::iter::repeat_n(k, ge_k - ge_k1));
    }
    Partition::new(parts)
}

/// Single Jordan block `J_k(1)` (ones on the superdiagonal).
pub fn jordan_block(field: &std::sync::Arc<crate::ffield::FieldSpec>, k: usize) -> Mat {
    let mut m = Mat::identity(field, k);
    for i in 0..k.saturating_sub(1) {
        m.set(i, i + 1, 1);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::make_field;

    #[test]
    fn display_and_parse() {
        let p: Partition = "2,2".parse().unwrap();
        assert_eq!(p.to_string(), "(2^2)");
        let p: Partition = "(1^2,2)".parse().unwrap();
        assert_eq!(p.parts(), &[2, 1, 1]);
        assert!(p.is_symplectic());
        assert!(!"1,3".parse::<Partition>().unwrap().is_symplectic());
    }

    #[test]
    fn partitions_of_four() {
        assert_eq!(Partition::all(4).len(), 5);
    }

    #[test]
    fn jordan_of_blocks() {
        let f = make_field(3, 1).unwrap();
        assert_eq!(jordan_partition(&Mat::identity(&f, 3)).unwrap().parts(), &[1, 1, 1]);
        assert_eq!(jordan_partition(&jordan_block(&f, 4)).unwrap().parts(), &[4]);
        let m = Mat::block_diag(&f, &[jordan_block(&f, 2), jordan_block(&f, 3)]);
        assert_eq!(jordan_partition(&m).unwrap().parts(), &[3, 2]);
        assert!(jordan_partition(&Mat::diag(&f, &[2, 1])).is_err());
    }
}
