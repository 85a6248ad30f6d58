use serde::Serialize;

use crate::error::{Error, Result};
use crate::matgroup::Mat;

use super::realize::Realization;
use super::roots::{ordering, Root};

/// A product `x_{g1}(c1) x_{g2}(c2) ...` of positive root elements, with
/// factors listed in the order of the ordering used to produce it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChevalleyWord {
    pub factors: Vec<(Root, u32)>,
    pub ordering_id: u8,
}

impl ChevalleyWord {
    pub fn support(&self) -> Vec<Root> {
        self.factors.iter().map(|(r, _)| r.clone()).collect()
    }

    pub fn coefficient(&self, r: &Root) -> u32 {
        self.factors.iter().find(|(g, _)| g == r).map_or(0, |(_, c)| *c)
    }

    pub fn evaluate(&self, re: &Realization) -> Result<Mat> {
        re.evaluate(&self.factors)
    }
}

/// Factorize an element of the upper unitriangular group `U` as a product of
/// root elements in the given ordering, peeling the leftmost factor by
/// reading its pivot entry. Fails when `u` is not in `U`.
pub fn support_factorize(re: &Realization, u: &Mat, ordering_id: u8) -> Result<ChevalleyWord> {
    if u.n() != re.size {
        return Err(Error::Dimension(format!("{}x{} matrix for a realization of size {}", u.n(), u.n(), re.size)));
    }
    for i in 0..u.n() {
        for j in 0..=i {
            let want = u32::from(i == j);
            if u.get(i, j) != want {
                return Err(Error::Precondition("matrix is not upper unitriangular".into()));
            }
        }
    }
    let f = &re.field;
    let mut rest = u.clone();
    let mut factors = Vec::new();
    for gamma in ordering(&re.rs, ordering_id) {
        let (i, j) = re.pivot(&gamma)?;
        let c = rest.get(i, j);
        if c != 0 {
            rest = re.x(&gamma, f.neg(c))?.mul(&rest);
            factors.push((gamma, c));
        }
    }
    if !rest.is_identity() {
        return Err(Error::Precondition("matrix is not in the unipotent radical U^F".into()));
    }
    Ok(ChevalleyWord { factors, ordering_id })
}

/// One measured term `x_{i alpha + j beta}(c_ij xi^i eta^j)` of the
/// commutator formula.
#[derive(Clone, Debug, Serialize)]
pub struct CommutatorTerm {
    pub i: u32,
    pub j: u32,
    pub root: Root,
    pub constant: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutatorData {
    pub terms: Vec<CommutatorTerm>,
    /// True when `alpha + beta` is a root whose term vanishes.
    pub degenerate: bool,
    /// `c_11` when `alpha + beta` is a root.
    pub c11: Option<u32>,
    /// Number of `(xi, eta)` pairs on which the product form was confirmed.
    pub pairs_verified: u64,
}

/// Measure the commutator constants for positive roots `alpha != beta` from
/// `[x_alpha(1), x_beta(1)]`, then confirm the product form on every pair
/// `(xi, eta)` when `q <= 9` (on a fixed grid of 81 pairs above).
pub fn commutator_data(re: &Realization, alpha: &Root, beta: &Root) -> Result<CommutatorData> {
    let rs = &re.rs;
    if !rs.is_positive(alpha) || !rs.is_positive(beta) || alpha == beta {
        return Err(Error::Precondition("need distinct positive roots".into()));
    }
    let f = &re.field;
    let comm = |xi: u32, eta: u32| -> Result<Mat> {
        let xa = re.x(alpha, xi)?;
        let xb = re.x(beta, eta)?;
        let xa_inv = re.x(alpha, f.neg(xi))?;
        let xb_inv = re.x(beta, f.neg(eta))?;
        Ok(xa.mul(&xb).mul(&xa_inv).mul(&xb_inv))
    };
    let word = support_factorize(re, &comm(1, 1)?, 0)?;
    let mut terms = Vec::new();
    for (gamma, c) in &word.factors {
        let found = (1..=3u32)
            .flat_map(|i| (1..=3u32).map(move |j| (i, j)))
            .find(|&(i, j)| alpha.scale(i as i32).add(&beta.scale(j as i32)) == *gamma);
        let Some((i, j)) = found else {
            return Err(Error::Verification(format!(
                "commutator factor {gamma} is not of the form i*alpha + j*beta"
            )));
        };
        terms.push(CommutatorTerm { i, j, root: gamma.clone(), constant: *c });
    }
    let sum_is_root = rs.is_root(&alpha.add(beta));
    let c11 = terms.iter().find(|t| t.i == 1 && t.j == 1).map(|t| t.constant);
    let degenerate = sum_is_root && c11.is_none();
    if degenerate != rs.is_degenerate_pair(alpha, beta, f.p()) {
        return Err(Error::Verification(format!(
            "measured degeneracy of ({alpha}, {beta}) disagrees with the string criterion"
        )));
    }
    if let Some(c) = c11 {
        let (m, _) = rs.string(alpha, beta);
        let plus = f.from_int((m + 1) as i64);
        if c != plus && c != f.neg(plus) {
            return Err(Error::Verification(format!("c11 = {c} is not ±{}", m + 1)));
        }
    }
    let q = f.q();
    let grid: Vec<u32> = if q <= 9 { (0..q).collect() } else { (0..9).map(|k| f.exp_gen(k)).collect() };
    let mut pairs = 0;
    for &xi in &grid {
        for &eta in &grid {
            let mut prod = Mat::identity(f, re.size);
            for t in &terms {
                let v = f.mul(t.constant, f.mul(f.pow(xi, t.i as i64).unwrap(), f.pow(eta, t.j as i64).unwrap()));
                prod = prod.mul(&re.x(&t.root, v)?);
            }
            if prod != comm(xi, eta)? {
                return Err(Error::Verification(format!(
                    "product form fails at xi={xi}, eta={eta} for ({alpha}, {beta})"
                )));
            }
            pairs += 1;
        }
    }
    Ok(CommutatorData { terms, degenerate, c11, pairs_verified: pairs })
}

/// All multisets of roots from `supp` summing to `target`, each listed as
/// sorted indices into `supp`.
fn decompositions(supp: &[Root], target: &Root, max_len: usize) -> Vec<Vec<usize>> {
    fn rec(
        supp: &[Root],
        rest: &Root,
        start: usize,
        cur: &mut Vec<usize>,
        max_len: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if rest.is_zero() {
            out.push(cur.clone());
            return;
        }
        if cur.len() == max_len {
            return;
        }
        for k in start..supp.len() {
            cur.push(k);
            rec(supp, &rest.add(&supp[k].neg()), k, cur, max_len, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(supp, target, 0, &mut Vec::new(), max_len, &mut out);
    out
}

/// The alpha-beta support condition for `u` in `U^F`: `alpha, beta` lie in
/// the support and the only way to write `alpha + beta` as a sum of at
/// least two support roots is `alpha + beta` itself.
pub fn ab_property(re: &Realization, u: &Mat, alpha: &Root, beta: &Root, ordering_id: u8) -> Result<bool> {
    let rs = &re.rs;
    let sum = alpha.add(beta);
    if !rs.is_root(&sum) {
        return Err(Error::Precondition(format!("{alpha} + {beta} is not a root")));
    }
    if rs.is_degenerate_pair(alpha, beta, re.field.p()) {
        return Err(Error::DegeneratePair(format!(
            "({}, {}) vanishes in characteristic {}",
            rs.label(alpha),
            rs.label(beta),
            re.field.p()
        )));
    }
    let word = support_factorize(re, u, ordering_id)?;
    let supp = word.support();
    if !supp.contains(alpha) || !supp.contains(beta) {
        return Ok(false);
    }
    let max_len = rs.height(&sum).max(0) as usize;
    for d in decompositions(&supp, &sum, max_len) {
        if d.len() < 2 {
            continue;
        }
        let mut roots: Vec<&Root> = d.iter().map(|&k| &supp[k]).collect();
        roots.sort();
        let mut pair = vec![alpha, beta];
        pair.sort();
        if roots != pair {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chevalley::roots::root_system;
    use crate::ffield::make_field;

    #[test]
    fn factorize_identity_and_simple_product() {
        let f = make_field(3, 1).unwrap();
        let re = Realization::new(root_system(2).unwrap(), &f);
        let w = support_factorize(&re, &Mat::identity(&f, 4), 0).unwrap();
        assert!(w.factors.is_empty());
        let a1 = re.rs.simple[0].clone();
        let a2 = re.rs.simple[1].clone();
        let u = re.x(&a2, 1).unwrap().mul(&re.x(&a1, 1).unwrap());
        let w = support_factorize(&re, &u, 0).unwrap();
        let mut supp = w.support();
        supp.sort();
        let mut want = vec![a1, a2];
        want.sort();
        assert_eq!(supp, want);
        assert_eq!(w.evaluate(&re).unwrap(), u);
    }

    #[test]
    fn lower_triangular_is_rejected() {
        let f = make_field(3, 1).unwrap();
        let re = Realization::new(root_system(2).unwrap(), &f);
        let a1 = re.rs.simple[0].neg();
        assert!(support_factorize(&re, &re.x(&a1, 1).unwrap(), 0).is_err());
    }

    #[test]
    fn short_orthogonal_pair_degenerates_in_char_two() {
        let a = Root(vec![1, -1]);
        let b = Root(vec![1, 1]);
        let f2 = make_field(2, 1).unwrap();
        let re2 = Realization::new(root_system(2).unwrap(), &f2);
        let d = commutator_data(&re2, &a, &b).unwrap();
        assert!(d.degenerate);
        assert_eq!(d.pairs_verified, 4);
        let f3 = make_field(3, 1).unwrap();
        let re3 = Realization::new(root_system(2).unwrap(), &f3);
        let d = commutator_data(&re3, &a, &b).unwrap();
        assert!(!d.degenerate);
        assert_eq!(d.c11.map(|c| c == 2 || c == 1), Some(true));
        let u = re2.x(&b, 1).unwrap().mul(&re2.x(&a, 1).unwrap());
        assert!(matches!(ab_property(&re2, &u, &a, &b, 0), Err(Error::DegeneratePair(_))));
    }
}
