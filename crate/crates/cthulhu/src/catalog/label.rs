use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matgroup::Partition;

/// An indecomposable summand type of the natural module under a unipotent
/// element in characteristic two, with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// `W(m)^a`: Jordan type `(m, m)` per copy.
    W { m: usize, a: usize },
    /// `V(size)^b` with `size` even and `b <= 2`: Jordan type `(size)` per copy.
    V { size: usize, b: usize },
}

impl Term {
    pub fn dim(&self) -> usize {
        match *self {
            Term::W { m, a } => 2 * m * a,
            Term::V { size, b } => size * b,
        }
    }

    pub fn multiplicity(&self) -> usize {
        match *self {
            Term::W { a, .. } => a,
            Term::V { b, .. } => b,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (head, e) = match *self {
            Term::W { m, a } => (format!("W({m})"), a),
            Term::V { size, b } => (format!("V({size})"), b),
        };
        if e == 1 {
            f.write_str(&head)
        } else {
            write!(f, "{head}^{e}")
        }
    }
}

/// Label of a unipotent class of `Sp_{2n}`: a symplectic partition for odd
/// `q`, a W/V decomposition for even `q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnipotentLabel {
    Odd(Partition),
    Even(Vec<Term>),
}

impl UnipotentLabel {
    /// Canonical even label: W terms by `m`, then V terms by size.
    pub fn even(mut terms: Vec<Term>) -> Result<UnipotentLabel> {
        terms.retain(|t| t.multiplicity() > 0);
        terms.sort();
        for w in terms.windows(2) {
            let same = match (w[0], w[1]) {
                (Term::W { m: x, .. }, Term::W { m: y, .. }) => x == y,
                (Term::V { size: x, .. }, Term::V { size: y, .. }) => x == y,
                _ => false,
            };
            if same {
                return Err(Error::Parse(format!("repeated summand {}", w[1])));
            }
        }
        for t in &terms {
            match *t {
                Term::W { m: 0, .. } => return Err(Error::Parse("W(0)".into())),
                Term::V { size, b } if size == 0 || size % 2 == 1 || b > 2 => {
                    return Err(Error::Parse(format!("invalid summand {t}")))
                }
                _ => {}
            }
        }
        if terms.is_empty() {
            return Err(Error::Parse("empty decomposition".into()));
        }
        Ok(UnipotentLabel::Even(terms))
    }

    pub fn odd(p: Partition) -> Result<UnipotentLabel> {
        if !p.is_symplectic() {
            return Err(Error::Parse(format!("{p} is not symplectic")));
        }
        Ok(UnipotentLabel::Odd(p))
    }

    pub fn dim(&self) -> usize {
        match self {
            UnipotentLabel::Odd(p) => p.total(),
            UnipotentLabel::Even(t) => t.iter().map(Term::dim).sum(),
        }
    }

    pub fn is_even(&self) -> bool {
        matches!(self, UnipotentLabel::Even(_))
    }

    pub fn is_identity(&self) -> bool {
        match self {
            UnipotentLabel::Odd(p) => p.parts().iter().all(|&x| x == 1),
            UnipotentLabel::Even(t) => t.iter().all(|x| matches!(x, Term::W { m: 1, .. })),
        }
    }

    /// Jordan partition of any element carrying this label.
    pub fn partition(&self) -> Partition {
        match self {
            UnipotentLabel::Odd(p) => p.clone(),
            UnipotentLabel::Even(ts) => {
                let mut parts = Vec::new();
                for t in ts {
                    match *t {
                        Term::W { m, a } => parts.extend(std::iter::repeat_n(m, 2 * a)),
                        Term::V { size, b } => parts.extend(std::iter::repeat_n(size, b)),
                    }
                }
                Partition::new(parts).expect("positive parts")
            }
        }
    }

    pub fn terms(&self) -> &[Term] {
        match self {
            UnipotentLabel::Even(t) => t,
            UnipotentLabel::Odd(_) => &[],
        }
    }

    /// Multiplicity of `W(m)`.
    pub fn w(&self, m: usize) -> usize {
        self.terms()
            .iter()
            .find_map(|t| match *t {
                Term::W { m: x, a } if x == m => Some(a),
                _ => None,
            })
            .unwrap_or(0)
    }

    /// Multiplicity of `V(size)`.
    pub fn v(&self, size: usize) -> usize {
        self.terms()
            .iter()
            .find_map(|t| match *t {
                Term::V { size: x, b } if x == size => Some(b),
                _ => None,
            })
            .unwrap_or(0)
    }

    pub fn check_for(&self, n: usize, q: u64) -> Result<()> {
        if self.dim() != 2 * n {
            return Err(Error::Dimension(format!("label {self} has dimension {}, expected {}", self.dim(), 2 * n)));
        }
        if self.is_even() != (q % 2 == 0) {
            return Err(Error::Precondition(format!("label {self} does not match the parity of q = {q}")));
        }
        Ok(())
    }

    /// Parse for a given characteristic: partitions (`2,2`, `(1^2,2)`) for
    /// odd `q`, decompositions (`W(1)+V(2)^2`) for even `q`.
    pub fn parse_for(s: &str, q: u64) -> Result<UnipotentLabel> {
        let l: UnipotentLabel = s.parse()?;
        if l.is_even() != (q % 2 == 0) {
            return Err(Error::Parse(format!("label {s:?} does not match q = {q}")));
        }
        Ok(l)
    }
}

impl fmt::Display for UnipotentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnipotentLabel::Odd(p) => write!(f, "{p}"),
            UnipotentLabel::Even(ts) => {
                let s: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
                f.write_str(&s.join("+"))
            }
        }
    }
}

impl Serialize for UnipotentLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for UnipotentLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.contains('W') || t.contains('V') {
            let mut terms = Vec::new();
            for tok in t.split('+') {
                let tok: String = tok.chars().filter(|c| !c.is_whitespace()).collect();
                let (head, e) = match tok.split_once('^') {
                    Some((h, e)) => (h.to_string(), e.parse::<usize>().map_err(|_| Error::Parse(s.into()))?),
                    None => (tok.clone(), 1),
                };
                let kind = head.chars().next().ok_or_else(|| Error::Parse(s.into()))?;
                let size: usize = head[1..]
                    .trim_start_matches('(')
                    .trim_end_matches(')')
                    .parse()
                    .map_err(|_| Error::Parse(s.into()))?;
                terms.push(match kind {
                    'W' => Term::W { m: size, a: e },
                    'V' => Term::V { size, b: e },
                    _ => return Err(Error::Parse(s.into())),
                });
            }
            UnipotentLabel::even(terms)
        } else {
            UnipotentLabel::odd(t.parse()?)
        }
    }
}

/// All nontrivial labels for `Sp_{2n}(q)`.
pub fn enumerate_labels(n: usize, q: u64) -> Result<Vec<UnipotentLabel>> {
    if n < 2 {
        return Err(Error::Precondition(format!("rank {n} < 2")));
    }
    let mut out = Vec::new();
    if q % 2 == 1 {
        for p in Partition::all(2 * n) {
            if p.is_symplectic() && p.parts().iter().any(|&x| x > 1) {
                out.push(UnipotentLabel::Odd(p));
            }
        }
    } else {
        let mut cur = Vec::new();
        even_rec(2 * n, 0, n, &mut cur, &mut out);
        out.retain(|l| !l.is_identity());
    }
    out.sort();
    Ok(out)
}

/// Slots `0..n` are `W(slot + 1)`, slots `n..2n` are `V(2 (slot - n + 1))`.
fn even_rec(rest: usize, slot: usize, n: usize, cur: &mut Vec<Term>, out: &mut Vec<UnipotentLabel>) {
    if rest == 0 {
        out.push(UnipotentLabel::even(cur.clone()).expect("valid by construction"));
        return;
    }
    if slot == 2 * n {
        return;
    }
    let (unit, max) = if slot < n { (2 * (slot + 1), usize::MAX) } else { (2 * (slot - n + 1), 2) };
    let mut mult = 0;
    while mult <= max && mult * unit <= rest {
        if mult > 0 {
            cur.push(if slot < n { Term::W { m: slot + 1, a: mult } } else { Term::V { size: unit, b: mult } });
        }
        even_rec(rest - mult * unit, slot + 1, n, cur, out);
        if mult > 0 {
            cur.pop();
        }
        mult += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize, q: u64) -> Vec<String> {
        enumerate_labels(n, q).unwrap().iter().map(|l| l.to_string()).collect()
    }

    #[test]
    fn rank_two_odd_labels_filter_partitions() {
        let oracle: Vec<String> = Partition::all(4)
            .into_iter()
            .filter(|p| p.multiplicities().iter().all(|(&i, &r)| i % 2 == 0 || r % 2 == 0))
            .filter(|p| p.parts() != [1, 1, 1, 1])
            .map(|p| p.to_string())
            .collect();
        let mut got = labels(2, 3);
        got.sort();
        let mut want = oracle;
        want.sort();
        assert_eq!(got, want);
        assert_eq!(got.len(), 3);
        assert!(!got.contains(&"(1,3)".to_string()));
    }

    #[test]
    fn rank_two_even_labels() {
        let mut got = labels(2, 2);
        got.sort();
        assert_eq!(got, ["V(2)^2", "V(4)", "W(1)+V(2)", "W(2)"]);
    }

    #[test]
    fn rank_three_even_labels_include_mixed_w() {
        let got = labels(3, 2);
        assert!(got.contains(&"W(1)+W(2)".to_string()));
        assert_eq!(got.len(), 8);
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["W(1)^2+V(2)", "V(2)^2", "W(3)", "W(1)+V(4)"] {
            let l: UnipotentLabel = s.parse().unwrap();
            assert_eq!(l.to_string(), s);
        }
        let l: UnipotentLabel = "2,2".parse().unwrap();
        assert_eq!(l.to_string(), "(2^2)");
        assert!("1,3".parse::<UnipotentLabel>().is_err());
        assert!("V(2)^3".parse::<UnipotentLabel>().is_err());
    }

    #[test]
    fn partition_of_even_label() {
        let l: UnipotentLabel = "W(1)+V(2)^2".parse().unwrap();
        assert_eq!(l.partition().to_string(), "(1^2,2^2)");
        assert_eq!(l.dim(), 6);
    }
}
