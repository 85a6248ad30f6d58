use std::sync::OnceLock;

use serde::Serialize;

use crate::detect::Verdict;
use crate::error::{Error, Result};

use super::label::{Term, UnipotentLabel};

const TABLE: &str = include_str!("../../data/expected_tables.txt");

pub const TABLE_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Size {
    Eq(usize),
    Any,
    Gt(usize),
    OddGt(usize),
    EvenGt(usize),
}

impl Size {
    fn holds(self, x: usize) -> bool {
        match self {
            Size::Eq(k) => x == k,
            Size::Any => true,
            Size::Gt(k) => x > k,
            Size::OddGt(k) => x % 2 == 1 && x > k,
            Size::EvenGt(k) => x % 2 == 0 && x > k,
        }
    }

    fn parse(s: &str) -> Result<Size> {
        let bad = || Error::Parse(format!("size condition {s:?}"));
        Ok(if s == "*" {
            Size::Any
        } else if let Some(r) = s.strip_prefix("odd>") {
            Size::OddGt(r.parse().map_err(|_| bad())?)
        } else if let Some(r) = s.strip_prefix("even>") {
            Size::EvenGt(r.parse().map_err(|_| bad())?)
        } else if let Some(r) = s.strip_prefix('>') {
            Size::Gt(r.parse().map_err(|_| bad())?)
        } else {
            Size::Eq(s.parse().map_err(|_| bad())?)
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    W,
    V,
    Part,
}

#[derive(Clone, Debug)]
struct TermPattern {
    kind: Kind,
    size: Size,
    mult: Size,
}

#[derive(Clone, Debug)]
struct LabelPattern {
    contains: bool,
    odd: bool,
    terms: Vec<TermPattern>,
}

impl LabelPattern {
    fn parse(s: &str) -> Result<LabelPattern> {
        let (contains, body) = match s.strip_prefix('~') {
            Some(b) => (true, b),
            None => (false, s),
        };
        let default = if contains { Size::Gt(0) } else { Size::Eq(1) };
        let split_mult = |tok: &str| -> Result<(String, Size)> {
            match tok.split_once('^') {
                Some((h, m)) => Ok((h.to_string(), Size::parse(m)?)),
                None => Ok((tok.to_string(), default)),
            }
        };
        let mut terms = Vec::new();
        let odd = body.starts_with('(');
        if odd {
            for tok in body.trim_start_matches('(').trim_end_matches(')').split(',') {
                let (h, mult) = split_mult(tok.trim())?;
                terms.push(TermPattern { kind: Kind::Part, size: Size::parse(&h)?, mult });
            }
        } else {
            for tok in body.split('+') {
                let (h, mult) = split_mult(tok.trim())?;
                let kind = match h.chars().next() {
                    Some('W') => Kind::W,
                    Some('V') => Kind::V,
                    _ => return Err(Error::Parse(format!("pattern term {h:?}"))),
                };
                let inner = h[1..].trim_start_matches('(').trim_end_matches(')');
                terms.push(TermPattern { kind, size: Size::parse(inner)?, mult });
            }
        }
        Ok(LabelPattern { contains, odd, terms })
    }

    fn matches(&self, label: &UnipotentLabel) -> bool {
        let items: Vec<(Kind, usize, usize)> = match label {
            UnipotentLabel::Odd(p) => {
                if !self.odd {
                    return false;
                }
                p.multiplicities().into_iter().map(|(i, r)| (Kind::Part, i, r)).collect()
            }
            UnipotentLabel::Even(ts) => {
                if self.odd {
                    return false;
                }
                ts.iter()
                    .map(|t| match *t {
                        Term::W { m, a } => (Kind::W, m, a),
                        Term::V { size, b } => (Kind::V, size, b),
                    })
                    .collect()
            }
        };
        let mut used = vec![false; items.len()];
        self.assign(0, &items, &mut used)
    }

    fn assign(&self, k: usize, items: &[(Kind, usize, usize)], used: &mut [bool]) -> bool {
        if k == self.terms.len() {
            return self.contains || used.iter().all(|&u| u);
        }
        let t = &self.terms[k];
        for i in 0..items.len() {
            let (kind, size, mult) = items[i];
            if !used[i] && kind == t.kind && t.size.holds(size) && t.mult.holds(mult) {
                used[i] = true;
                if self.assign(k + 1, items, used) {
                    return true;
                }
                used[i] = false;
            }
        }
        !self.contains && t.mult.holds(0) && self.assign(k + 1, items, used)
    }
}

#[derive(Clone, Debug)]
enum QAtom {
    Even,
    Odd,
    Square,
    NonSquare,
    Eq(u64),
    Gt(u64),
}

fn is_square_power(q: u64) -> bool {
    let p = crate::ffield::prime_factors(q);
    let mut m = 0;
    let mut x = q;
    while x > 1 {
        x /= p[0];
        m += 1;
    }
    m % 2 == 0
}

impl QAtom {
    fn holds(&self, q: u64) -> bool {
        match *self {
            QAtom::Even => q % 2 == 0,
            QAtom::Odd => q % 2 == 1,
            QAtom::Square => is_square_power(q),
            QAtom::NonSquare => !is_square_power(q),
            QAtom::Eq(k) => q == k,
            QAtom::Gt(k) => q > k,
        }
    }
}

fn parse_q(s: &str) -> Result<Vec<Vec<QAtom>>> {
    s.split('|')
        .map(|conj| {
            conj.split('&')
                .map(|a| {
                    let a = a.trim();
                    Ok(match a {
                        "even" => QAtom::Even,
                        "odd" => QAtom::Odd,
                        "square" => QAtom::Square,
                        "nonsquare" => QAtom::NonSquare,
                        _ => match a.strip_prefix('>') {
                            Some(r) => QAtom::Gt(r.parse().map_err(|_| Error::Parse(a.into()))?),
                            None => QAtom::Eq(a.parse().map_err(|_| Error::Parse(a.into()))?),
                        },
                    })
                })
                .collect()
        })
        .collect()
}

/// One expected verdict; `Collapse` accepts either D or F.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExpectedVerdict {
    D,
    F,
    #[serde(rename = "D|F")]
    Collapse,
    #[serde(rename = "cthulhu")]
    Cthulhu,
}

impl ExpectedVerdict {
    fn parse(s: &str) -> Result<ExpectedVerdict> {
        match s.trim() {
            "D" => Ok(ExpectedVerdict::D),
            "F" => Ok(ExpectedVerdict::F),
            "D|F" => Ok(ExpectedVerdict::Collapse),
            "cthulhu" => Ok(ExpectedVerdict::Cthulhu),
            o => Err(Error::Parse(format!("verdict {o:?}"))),
        }
    }

    pub fn collapses(self) -> bool {
        self != ExpectedVerdict::Cthulhu
    }

    /// Exact agreement; `D|F` agrees with either letter.
    pub fn agrees(self, v: Verdict) -> bool {
        matches!(
            (self, v),
            (ExpectedVerdict::D, Verdict::D)
                | (ExpectedVerdict::F, Verdict::F)
                | (ExpectedVerdict::Collapse, Verdict::D | Verdict::F)
                | (ExpectedVerdict::Cthulhu, Verdict::Cthulhu)
        )
    }
}

impl std::fmt::Display for ExpectedVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ExpectedVerdict::D => "D",
            ExpectedVerdict::F => "F",
            ExpectedVerdict::Collapse => "D|F",
            ExpectedVerdict::Cthulhu => "cthulhu",
        })
    }
}

#[derive(Clone, Debug)]
pub struct TableRow {
    pub id: String,
    pattern: LabelPattern,
    n_cond: Size,
    q_cond: Vec<Vec<QAtom>>,
    pub classes: Option<usize>,
    pub verdicts: Vec<ExpectedVerdict>,
    pub note: String,
}

/// The table's answer for one label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Expected {
    pub row: String,
    pub class_count: Option<usize>,
    /// One entry per class when the row lists several, else a single entry.
    pub verdicts: Vec<ExpectedVerdict>,
    pub note: String,
}

impl Expected {
    /// Expected verdicts as a multiset of the given size.
    pub fn per_class(&self, count: usize) -> Vec<ExpectedVerdict> {
        if self.verdicts.len() == 1 {
            vec![self.verdicts[0]; count]
        } else {
            self.verdicts.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Coverage {
    Covered(Expected),
    Uncovered,
}

fn parse_table(text: &str) -> Result<Vec<TableRow>> {
    let mut rows = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(" | ").map(str::trim).collect();
        if cols.len() != 7 {
            return Err(Error::Parse(format!("table line {}: {} columns", ln + 1, cols.len())));
        }
        let classes = if cols[4] == "?" {
            None
        } else {
            Some(cols[4].parse().map_err(|_| Error::Parse(format!("table line {}: classes", ln + 1)))?)
        };
        let verdicts = if cols[5] == "D|F" {
            vec![ExpectedVerdict::Collapse]
        } else {
            cols[5].split(',').map(ExpectedVerdict::parse).collect::<Result<Vec<_>>>()?
        };
        if let (Some(c), true) = (classes, verdicts.len() > 1) {
            if c != verdicts.len() {
                return Err(Error::Parse(format!("table line {}: verdict count", ln + 1)));
            }
        }
        rows.push(TableRow {
            id: cols[0].to_string(),
            pattern: LabelPattern::parse(cols[1])?,
            n_cond: Size::parse(cols[2])?,
            q_cond: parse_q(cols[3])?,
            classes,
            verdicts,
            note: cols[6].to_string(),
        });
    }
    Ok(rows)
}

/// Parsed rows of the bundled table.
pub fn table_rows() -> &'static [TableRow] {
    static ROWS: OnceLock<Vec<TableRow>> = OnceLock::new();
    ROWS.get_or_init(|| parse_table(TABLE).expect("bundled table parses"))
}

impl TableRow {
    pub fn applies(&self, label: &UnipotentLabel, n: usize, q: u64) -> bool {
        self.n_cond.holds(n)
            && self.q_cond.iter().any(|c| c.iter().all(|a| a.holds(q)))
            && self.pattern.matches(label)
    }
}

/// The first table row covering `label` in `Sp_{2n}(q)`.
pub fn expected(label: &UnipotentLabel, n: usize, q: u64) -> Result<Coverage> {
    label.check_for(n, q)?;
    Ok(match table_rows().iter().find(|r| r.applies(label, n, q)) {
        Some(r) => Coverage::Covered(Expected {
            row: r.id.clone(),
            class_count: r.classes,
            verdicts: r.verdicts.clone(),
            note: r.note.clone(),
        }),
        None => Coverage::Uncovered,
    })
}
