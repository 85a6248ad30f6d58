use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::detect::{check_f_family, classify, Basis, Budget, Certificate, Checkpoint, ClassRack, Classification, Hints, Verdict};
use crate::error::Result;
use crate::matgroup::{group_spec, Family};

use super::label::UnipotentLabel;
use super::special::regular_f_family;
use super::split::{split_label, unipotent_radical, SplitClass};
use super::table::{expected, Coverage, ExpectedVerdict};

/// Classification of one rational class.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassRecord {
    pub group: String,
    pub label: String,
    pub split_index: usize,
    pub representative: String,
    pub class_size: usize,
    pub verdict: Verdict,
    pub verdict_basis: Option<Basis>,
    pub strategy: String,
    pub witness: Option<serde_json::Value>,
    pub certificates: Vec<Certificate>,
    /// Set when an explicit type F family was also verified in this class.
    pub f_family: Option<String>,
    pub log: Vec<String>,
    pub elapsed_ms: u128,
}

impl ClassRecord {
    fn letters(&self) -> Vec<Verdict> {
        let mut v = vec![self.verdict];
        if self.f_family.is_some() && self.verdict != Verdict::F {
            v.push(Verdict::F);
        }
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Match,
    Mismatch,
    Unknown,
    Uncovered,
}

#[derive(Clone, Debug, Serialize)]
pub struct RowReport {
    pub group: String,
    pub label: String,
    pub coverage: Coverage,
    pub classes: Vec<ClassRecord>,
    pub class_count_ok: Option<bool>,
    pub status: RowStatus,
    /// False when the row matched only after identifying D with F.
    pub letters_agree: bool,
}

/// Default hints for a unipotent class of `Sp_{2n}(q)`: local search in
/// `U^F`.
pub fn hints_for(n: usize, q: u64) -> Result<Hints> {
    Ok(Hints { local_subgroups: vec![("U".into(), unipotent_radical(n, q)?)], ..Default::default() })
}

/// Class rack of one split of a label.
pub fn class_of_split(label: &UnipotentLabel, n: usize, q: u64, split: usize, cap: usize) -> Result<(ClassRack, Vec<SplitClass>)> {
    let splits = split_label(label, n, q, cap)?;
    let s = splits.get(split).ok_or_else(|| {
        crate::error::Error::Precondition(format!("{label} has {} classes, no split {split}", splits.len()))
    })?;
    let spec = group_spec(Family::Sp, 2 * n, q)?;
    Ok((ClassRack::new(&s.rep, &spec, cap)?, splits))
}

fn witness_json(c: &Classification) -> Option<serde_json::Value> {
    if let Some(w) = &c.d_witness {
        return serde_json::to_value(w).ok();
    }
    c.f_witness.as_ref().and_then(|w| serde_json::to_value(w).ok())
}

/// Regular classes of `Sp_4(q)`, `q > 2` even: check the torus translate
/// family when it lives in this class.
fn regular_family_check(class: &ClassRack, label: &UnipotentLabel, n: usize, q: u64, cap: usize) -> Result<Option<String>> {
    if n != 2 || q % 2 == 1 || q <= 2 || label.v(4) != 1 {
        return Ok(None);
    }
    for which in 0..2 {
        let fam = regular_f_family(q, which)?;
        if !class.contains(&fam.u) {
            continue;
        }
        if let Ok(w) = check_f_family(&fam.reps, &fam.builder, cap)? {
            if w.validate().is_ok() {
                return Ok(Some(format!("torus translates of regular class {which}")));
            }
        }
    }
    Ok(None)
}

/// Classify one class and wrap the result.
pub fn classify_class(
    class: &ClassRack,
    label: &UnipotentLabel,
    n: usize,
    q: u64,
    split_index: usize,
    hints: &Hints,
    budget: &Budget,
    checkpoint: Option<&dyn Checkpoint>,
) -> Result<ClassRecord> {
    let t = Instant::now();
    let c = classify(class, hints, budget, checkpoint)?;
    let f_family = regular_family_check(class, label, n, q, budget.orbit_cap)?;
    Ok(ClassRecord {
        group: class.group.clone(),
        label: label.to_string(),
        split_index,
        representative: class.rep().to_text(),
        class_size: class.len(),
        verdict: c.verdict,
        verdict_basis: c.basis,
        strategy: c.strategy.clone(),
        witness: witness_json(&c),
        certificates: c.certificates.clone(),
        f_family,
        log: c.log.clone(),
        elapsed_ms: t.elapsed().as_millis(),
    })
}

/// Match computed letters against expected ones. `exact` keeps D and F
/// apart; otherwise both count as one letter.
fn multiset_match(expected: &[ExpectedVerdict], computed: &[Vec<Verdict>], exact: bool) -> bool {
    if expected.len() != computed.len() {
        return false;
    }
    let fits = |e: ExpectedVerdict, c: &[Verdict]| {
        if exact {
            c.iter().any(|&v| e.agrees(v))
        } else {
            c.iter().any(|&v| e.agrees(v) || e.collapses() && matches!(v, Verdict::D | Verdict::F))
        }
    };
    // bipartite matching by augmenting paths; at most a handful of classes
    let mut owner: Vec<Option<usize>> = vec![None; computed.len()];
    fn augment(
        i: usize,
        expected: &[ExpectedVerdict],
        computed: &[Vec<Verdict>],
        fits: &dyn Fn(ExpectedVerdict, &[Verdict]) -> bool,
        owner: &mut [Option<usize>],
        seen: &mut [bool],
    ) -> bool {
        for j in 0..computed.len() {
            if seen[j] || !fits(expected[i], &computed[j]) {
                continue;
            }
            seen[j] = true;
            if owner[j].is_none() || augment(owner[j].unwrap(), expected, computed, fits, owner, seen) {
                owner[j] = Some(i);
                return true;
            }
        }
        false
    }
    (0..expected.len()).all(|i| augment(i, expected, computed, &fits, &mut owner, &mut vec![false; computed.len()]))
}

/// Compare classified classes with a table entry.
pub fn compare(coverage: &Coverage, classes: &[ClassRecord]) -> (RowStatus, Option<bool>, bool) {
    let exp = match coverage {
        Coverage::Covered(e) => e,
        Coverage::Uncovered => return (RowStatus::Uncovered, None, false),
    };
    let count_ok = exp.class_count.map(|c| c == classes.len());
    if classes.iter().any(|c| c.verdict == Verdict::Unknown) {
        return (RowStatus::Unknown, count_ok, false);
    }
    let want = exp.per_class(exp.class_count.unwrap_or(classes.len()));
    let got: Vec<Vec<Verdict>> = classes.iter().map(ClassRecord::letters).collect();
    if count_ok == Some(false) {
        return (RowStatus::Mismatch, count_ok, false);
    }
    if multiset_match(&want, &got, true) {
        (RowStatus::Match, count_ok, true)
    } else if multiset_match(&want, &got, false) {
        (RowStatus::Match, count_ok, false)
    } else {
        (RowStatus::Mismatch, count_ok, false)
    }
}

/// Split a label into classes, classify each and compare with the table.
pub fn verify_row(label: &UnipotentLabel, n: usize, q: u64, budget: &Budget) -> Result<RowReport> {
    let spec = group_spec(Family::Sp, 2 * n, q)?;
    let coverage = expected(label, n, q)?;
    let hints = hints_for(n, q)?;
    let mut classes = Vec::new();
    for s in split_label(label, n, q, budget.orbit_cap)? {
        let class = ClassRack::new(&s.rep, &spec, budget.orbit_cap)?;
        classes.push(classify_class(&class, label, n, q, s.index, &hints, budget, None)?);
    }
    let (status, class_count_ok, letters_agree) = compare(&coverage, &classes);
    Ok(RowReport { group: spec.name(), label: label.to_string(), coverage, classes, class_count_ok, status, letters_agree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::table::Expected;

    fn rec(v: Verdict, f: bool) -> ClassRecord {
        ClassRecord {
            group: String::new(),
            label: String::new(),
            split_index: 0,
            representative: String::new(),
            class_size: 1,
            verdict: v,
            verdict_basis: None,
            strategy: String::new(),
            witness: None,
            certificates: vec![],
            f_family: f.then(|| "x".into()),
            log: vec![],
            elapsed_ms: 0,
        }
    }

    fn cov(count: Option<usize>, v: &[ExpectedVerdict]) -> Coverage {
        Coverage::Covered(Expected { row: "r".into(), class_count: count, verdicts: v.to_vec(), note: String::new() })
    }

    #[test]
    fn comparison_levels() {
        use ExpectedVerdict as E;
        let c = cov(Some(2), &[E::D, E::Cthulhu]);
        assert_eq!(compare(&c, &[rec(Verdict::Cthulhu, false), rec(Verdict::D, false)]).0, RowStatus::Match);
        assert_eq!(compare(&c, &[rec(Verdict::Cthulhu, false), rec(Verdict::Cthulhu, false)]).0, RowStatus::Mismatch);
        assert_eq!(compare(&c, &[rec(Verdict::D, false)]).0, RowStatus::Mismatch);
        let f = cov(Some(2), &[E::F]);
        assert_eq!(compare(&f, &[rec(Verdict::D, false), rec(Verdict::D, false)]), (RowStatus::Match, Some(true), false));
        assert_eq!(compare(&f, &[rec(Verdict::D, true), rec(Verdict::D, true)]), (RowStatus::Match, Some(true), true));
        assert_eq!(compare(&f, &[rec(Verdict::D, true), rec(Verdict::Unknown, true)]).0, RowStatus::Unknown);
        let either = cov(None, &[E::Collapse]);
        assert_eq!(compare(&either, &[rec(Verdict::F, false)]), (RowStatus::Match, None, true));
    }

    #[test]
    fn sp4_3_two_two_row() {
        let l: UnipotentLabel = "2,2".parse().unwrap();
        let r = verify_row(&l, 2, 3, &Budget::default()).unwrap();
        assert_eq!(r.status, RowStatus::Match, "{r:?}");
        assert!(r.letters_agree);
    }
}
