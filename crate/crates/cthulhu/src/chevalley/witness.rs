use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffield::{field_of_order, make_field, FieldSpec};
use crate::matgroup::Mat;

use super::realize::Realization;
use super::roots::{Root, RootKind, RootSystem};

/// Which group the torus element lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WitnessCase {
    /// Split group realized by the given root system over `F_q`.
    Chevalley,
    /// `SU_3(q)` inside `SL_3(q^2)`, with the graph automorphism swapping the
    /// two simple roots of `A_2`.
    Su3,
}

/// A torus element as a coroot word together with its diagonal matrix.
#[derive(Clone, Debug)]
pub struct TorusElt {
    /// `(beta, z)` factors meaning `beta^vee(z)`.
    pub coroot_word: Vec<(Root, u32)>,
    pub matrix: Mat,
}

/// Torus element `t` with `1 != alpha(t) != beta(t)`.
#[derive(Clone, Debug)]
pub struct TorusPairWitness {
    /// The roles after any interchange.
    pub alpha: Root,
    pub beta: Root,
    pub swapped: bool,
    pub t: TorusElt,
    /// Order of the generator the exponents refer to.
    pub modulus: u64,
    pub alpha_exp: i64,
    pub beta_exp: i64,
    pub alpha_value: u32,
    pub beta_value: u32,
}

/// Value of the character `alpha` on `t`, read from the conjugation action
/// `t x_alpha(1) t^{-1} = x_alpha(alpha(t))`.
pub fn character_by_conjugation(re: &Realization, alpha: &Root, t: &Mat) -> Result<u32> {
    let x = re.x(alpha, 1)?;
    let ti = t.inverse().ok_or_else(|| Error::Precondition("singular torus element".into()))?;
    let y = t.mul(&x).mul(&ti);
    let (i, j) = re.pivot(alpha)?;
    let v = y.get(i, j);
    if re.x(alpha, v)? != y {
        return Err(Error::Verification(format!("conjugate of x_{alpha}(1) is not a root element")));
    }
    Ok(v)
}

fn su3_setup(q: u64) -> Result<(Arc<FieldSpec>, u32, Realization)> {
    let base = field_of_order(q)?;
    let big = make_field(base.p() as u64, 2 * base.m())?;
    let re = Realization::new(super::roots::root_system_a(3)?, &big);
    Ok((big, base.m(), re))
}

fn check_su3_member(t: &Mat, base_m: u32) -> Result<()> {
    let j = Mat::antidiag(t.field(), 3);
    if t.det() != 1 || t.frobenius(base_m).transpose().mul(&j).mul(t) != j {
        return Err(Error::Verification(format!("{} is not in SU_3", t.to_text())));
    }
    Ok(())
}

/// Torus witness for the type D criterion. In the Chevalley case `t =
/// beta^vee(zeta)` with `beta` the longer root, interchanging the roles when
/// `alpha(t) = 1`; in the `SU_3` case `t = beta^vee(xi) alpha^vee(xi^q)`.
/// Both the exponent congruences and the conjugation action are checked.
pub fn torus_pair_witness(rs: &RootSystem, alpha: &Root, beta: &Root, q: u64, case: WitnessCase) -> Result<TorusPairWitness> {
    if q % 2 == 0 {
        return Err(Error::Precondition(format!("q = {q} must be odd")));
    }
    if !rs.is_root(alpha) || !rs.is_root(beta) {
        return Err(Error::Precondition("alpha and beta must be roots".into()));
    }
    match case {
        WitnessCase::Chevalley => {
            if alpha.dot(beta) == 0 && q <= 3 {
                return Err(Error::Precondition(format!(
                    "orthogonal pair needs q > 3, got q = {q}"
                )));
            }
            let field = field_of_order(q)?;
            let re = Realization::new(rs.clone(), &field);
            let (mut a, mut b) = if alpha.norm() > beta.norm() {
                (beta.clone(), alpha.clone())
            } else {
                (alpha.clone(), beta.clone())
            };
            let mut swapped = a != *alpha;
            let zeta = field.generator();
            let t = re.coroot(&b, zeta)?;
            let word = vec![(b.clone(), zeta)];
            let modulus = (q - 1) as i64;
            let mut a_exp = a.pairing(&b) as i64;
            let mut b_exp = 2i64;
            if a_exp.rem_euclid(modulus) == 0 {
                std::mem::swap(&mut a, &mut b);
                std::mem::swap(&mut a_exp, &mut b_exp);
                swapped = !swapped;
            }
            finish35(&re, a, b, swapped, TorusElt { coroot_word: word, matrix: t }, modulus, a_exp, b_exp)
        }
        WitnessCase::Su3 => {
            if rs.kind != RootKind::A || rs.rank != 2 {
                return Err(Error::Precondition("the SU_3 case needs the A_2 root system".into()));
            }
            let simple: Vec<&Root> = rs.simple.iter().collect();
            if !(simple.contains(&alpha) && simple.contains(&beta) && alpha != beta) {
                return Err(Error::Precondition("the SU_3 case uses the two simple roots".into()));
            }
            let (field, base_m, re) = su3_setup(q)?;
            let xi = field.generator();
            let xi_q = field.pow(xi, q as i64).unwrap();
            // theta(beta) = alpha for the graph automorphism of A_2
            let word = vec![(beta.clone(), xi), (alpha.clone(), xi_q)];
            let t = re.torus(&word)?;
            check_su3_member(&t, base_m)?;
            let qi = q as i64;
            let a_exp = alpha.pairing(beta) as i64 + qi * 2;
            let b_exp = 2 + qi * beta.pairing(alpha) as i64;
            let modulus = qi * qi - 1;
            finish35(&re, alpha.clone(), beta.clone(), false, TorusElt { coroot_word: word, matrix: t }, modulus, a_exp, b_exp)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn finish35(
    re: &Realization,
    alpha: Root,
    beta: Root,
    swapped: bool,
    t: TorusElt,
    modulus: i64,
    a_exp: i64,
    b_exp: i64,
) -> Result<TorusPairWitness> {
    let a_res = a_exp.rem_euclid(modulus);
    let b_res = b_exp.rem_euclid(modulus);
    if a_res == 0 || a_res == b_res {
        return Err(Error::Verification(format!(
            "exponents alpha: {a_exp}, beta: {b_exp} (mod {modulus}) violate 1 != alpha(t) != beta(t)"
        )));
    }
    let f = &re.field;
    let alpha_value = character_by_conjugation(re, &alpha, &t.matrix)?;
    let beta_value = character_by_conjugation(re, &beta, &t.matrix)?;
    if alpha_value != f.exp_gen(a_exp) || beta_value != f.exp_gen(b_exp) {
        return Err(Error::Verification("conjugation disagrees with the exponent calculus".into()));
    }
    if alpha_value != re.character(&alpha, &t.matrix) || beta_value != re.character(&beta, &t.matrix) {
        return Err(Error::Verification("diagonal character disagrees with conjugation".into()));
    }
    if alpha_value == 1 || alpha_value == beta_value {
        return Err(Error::Verification("matrix values violate 1 != alpha(t) != beta(t)".into()));
    }
    Ok(TorusPairWitness {
        alpha,
        beta,
        swapped,
        t,
        modulus: modulus as u64,
        alpha_exp: a_exp,
        beta_exp: b_exp,
        alpha_value,
        beta_value,
    })
}

/// Family construction mode for [`torus_family`].
#[derive(Clone, Debug)]
pub enum FamilyCase {
    Chevalley,
    Su3,
    /// Check supplied exponent pairs `(alpha(t_a), beta(t_a)) = (g^{x_a},
    /// g^{y_a})` modulo the order of `g`, without a matrix model.
    CongruenceOnly { alpha_exps: Vec<i64>, beta_exps: Vec<i64>, modulus: u64 },
}

/// Exponent collision `r e_a = r e_b (mod modulus)` (1-based `a`, `b`).
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Collision {
    pub r: Option<i64>,
    pub a: usize,
    pub b: usize,
    pub modulus: u64,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyRefusal {
    pub q: u64,
    pub excluded: Vec<u64>,
    pub collision: Option<Collision>,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct TorusFamily {
    pub alpha: Root,
    pub beta: Root,
    /// Empty in the congruence-only mode.
    pub ts: Vec<TorusElt>,
    pub alpha_exps: Vec<i64>,
    pub beta_exps: Vec<i64>,
    pub modulus: u64,
    pub pairs_checked: usize,
    pub matrix_verified: bool,
}

#[derive(Clone, Debug)]
pub enum FamilyOutcome {
    Family(TorusFamily),
    Refused(FamilyRefusal),
}

impl FamilyOutcome {
    pub fn family(&self) -> Option<&TorusFamily> {
        match self {
            FamilyOutcome::Family(f) => Some(f),
            FamilyOutcome::Refused(_) => None,
        }
    }
}

pub const CHEVALLEY_EXCLUDED: [u64; 5] = [2, 3, 4, 5, 7];
pub const SU3_EXCLUDED: [u64; 3] = [2, 5, 8];

/// First pair `a < b` where `alpha(t_a) beta(t_b) = alpha(t_b) beta(t_a)`.
fn eq37_violation(ax: &[i64], by: &[i64], modulus: i64) -> Option<(usize, usize)> {
    for a in 0..4 {
        for b in a + 1..4 {
            if (ax[a] + by[b] - ax[b] - by[a]).rem_euclid(modulus) == 0 {
                return Some((a + 1, b + 1));
            }
        }
    }
    None
}

fn find_collision(rs_order: &[i64], modulus: u64) -> Option<Collision> {
    let m = modulus as i64;
    for &r in rs_order {
        for a in 0..4i64 {
            for b in a + 1..4 {
                if (r * a - r * b).rem_euclid(m) == 0 {
                    return Some(Collision {
                        r: Some(r),
                        a: a as usize + 1,
                        b: b as usize + 1,
                        modulus,
                        detail: format!("{r}*{a} = {r}*{b} (mod {modulus})"),
                    });
                }
            }
        }
    }
    None
}

/// Four torus elements `t_a` with `alpha(t_a) beta(t_b) != alpha(t_b)
/// beta(t_a)` for `a != b`, or a refusal for the excluded field sizes.
pub fn torus_family(rs: &RootSystem, alpha: &Root, beta: &Root, q: u64, case: &FamilyCase) -> Result<FamilyOutcome> {
    match case {
        FamilyCase::CongruenceOnly { alpha_exps, beta_exps, modulus } => {
            if alpha_exps.len() != 4 || beta_exps.len() != 4 || *modulus == 0 {
                return Err(Error::Precondition("need four exponent pairs and a positive modulus".into()));
            }
            if let Some((a, b)) = eq37_violation(alpha_exps, beta_exps, *modulus as i64) {
                return Ok(FamilyOutcome::Refused(FamilyRefusal {
                    q,
                    excluded: vec![],
                    collision: Some(Collision {
                        r: None,
                        a,
                        b,
                        modulus: *modulus,
                        detail: format!("alpha(t_{a})beta(t_{b}) = alpha(t_{b})beta(t_{a})"),
                    }),
                    reason: "supplied exponents violate the pairwise inequality".into(),
                }));
            }
            Ok(FamilyOutcome::Family(TorusFamily {
                alpha: alpha.clone(),
                beta: beta.clone(),
                ts: vec![],
                alpha_exps: alpha_exps.clone(),
                beta_exps: beta_exps.clone(),
                modulus: *modulus,
                pairs_checked: 6,
                matrix_verified: false,
            }))
        }
        FamilyCase::Chevalley => {
            if !rs.is_root(alpha) || !rs.is_root(beta) {
                return Err(Error::Precondition("alpha and beta must be roots".into()));
            }
            let (a, b) = if beta.norm() > alpha.norm() {
                (beta.clone(), alpha.clone())
            } else {
                (alpha.clone(), beta.clone())
            };
            let m = b.pairing(&a) as i64;
            if CHEVALLEY_EXCLUDED.contains(&q) {
                let own = 2 - m;
                let order: Vec<i64> = std::iter::once(own).chain([1, 2, 3].into_iter().filter(|&r| r != own)).collect();
                return Ok(FamilyOutcome::Refused(FamilyRefusal {
                    q,
                    excluded: CHEVALLEY_EXCLUDED.to_vec(),
                    collision: find_collision(&order, q - 1),
                    reason: format!("q = {q} is excluded for split groups"),
                }));
            }
            let field = field_of_order(q)?;
            let re = Realization::new(rs.clone(), &field);
            let zeta = field.generator();
            let mut ts = Vec::new();
            let mut ax = Vec::new();
            let mut by = Vec::new();
            for e in 0..4i64 {
                let z = field.exp_gen(e);
                ts.push(TorusElt { coroot_word: vec![(a.clone(), z)], matrix: re.coroot(&a, z)? });
                ax.push(2 * e);
                by.push(m * e);
            }
            let _ = zeta;
            finish36(&re, a, b, ts, ax, by, q - 1)
        }
        FamilyCase::Su3 => {
            if rs.kind != RootKind::A || rs.rank != 2 {
                return Err(Error::Precondition("the SU_3 case needs the A_2 root system".into()));
            }
            if SU3_EXCLUDED.contains(&q) {
                let modulus = q * q - 1;
                let qi = q as i64;
                let coef = 3 * (1 - qi);
                let collision = (0..4i64)
                    .flat_map(|a| (a + 1..4).map(move |b| (a, b)))
                    .find(|&(a, b)| (coef * (a - b)).rem_euclid(modulus as i64) == 0)
                    .map(|(a, b)| Collision {
                        r: Some(coef),
                        a: a as usize + 1,
                        b: b as usize + 1,
                        modulus,
                        detail: format!("3(1-q)({a}-{b}) = 0 (mod {modulus})"),
                    });
                return Ok(FamilyOutcome::Refused(FamilyRefusal {
                    q,
                    excluded: SU3_EXCLUDED.to_vec(),
                    collision,
                    reason: format!("q = {q} is excluded for SU_3"),
                }));
            }
            let (field, base_m, re) = su3_setup(q)?;
            let qi = q as i64;
            let mut ts = Vec::new();
            let mut ax = Vec::new();
            let mut by = Vec::new();
            for e in 0..4i64 {
                let word = vec![(alpha.clone(), field.exp_gen(e)), (beta.clone(), field.exp_gen(e * qi))];
                let t = re.torus(&word)?;
                check_su3_member(&t, base_m)?;
                ts.push(TorusElt { coroot_word: word, matrix: t });
                ax.push(e * (2 - qi));
                by.push(e * (2 * qi - 1));
            }
            finish36(&re, alpha.clone(), beta.clone(), ts, ax, by, q * q - 1)
        }
    }
}

fn finish36(
    re: &Realization,
    alpha: Root,
    beta: Root,
    ts: Vec<TorusElt>,
    ax: Vec<i64>,
    by: Vec<i64>,
    modulus: u64,
) -> Result<FamilyOutcome> {
    if let Some((a, b)) = eq37_violation(&ax, &by, modulus as i64) {
        return Err(Error::Verification(format!("exponent check fails for t_{a}, t_{b}")));
    }
    let f = &re.field;
    let mut av = Vec::new();
    let mut bv = Vec::new();
    for (k, t) in ts.iter().enumerate() {
        let a = character_by_conjugation(re, &alpha, &t.matrix)?;
        let b = character_by_conjugation(re, &beta, &t.matrix)?;
        if a != f.exp_gen(ax[k]) || b != f.exp_gen(by[k]) {
            return Err(Error::Verification(format!("t_{} disagrees with its exponents", k + 1)));
        }
        av.push(a);
        bv.push(b);
    }
    let mut pairs = 0;
    for a in 0..4 {
        for b in a + 1..4 {
            if f.mul(av[a], bv[b]) == f.mul(av[b], bv[a]) {
                return Err(Error::Verification(format!("matrix check fails for t_{}, t_{}", a + 1, b + 1)));
            }
            pairs += 1;
        }
    }
    Ok(FamilyOutcome::Family(TorusFamily {
        alpha,
        beta,
        ts,
        alpha_exps: ax,
        beta_exps: by,
        modulus,
        pairs_checked: pairs,
        matrix_verified: true,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chevalley::roots::root_system;

    #[test]
    fn c3_adjacent_simple_pair_at_five() {
        let rs = root_system(3).unwrap();
        let w = torus_pair_witness(&rs, &rs.simple[0], &rs.simple[1], 5, WitnessCase::Chevalley).unwrap();
        assert_eq!((w.alpha_exp, w.beta_exp), (-1, 2));
        assert!(!w.swapped);
    }

    #[test]
    fn orthogonal_pair_needs_q_above_three() {
        let rs = root_system(2).unwrap();
        let a = Root(vec![1, -1]);
        let b = Root(vec![1, 1]);
        assert!(torus_pair_witness(&rs, &a, &b, 3, WitnessCase::Chevalley).is_err());
        let w = torus_pair_witness(&rs, &a, &b, 5, WitnessCase::Chevalley).unwrap();
        assert!(w.swapped);
        assert_eq!(w.alpha_exp, 2);
    }

    #[test]
    fn refusal_at_five_exhibits_collision() {
        let rs = root_system(2).unwrap();
        let a = Root(vec![1, -1]);
        let b = Root(vec![1, 1]);
        let out = torus_family(&rs, &a, &b, 5, &FamilyCase::Chevalley).unwrap();
        let FamilyOutcome::Refused(r) = out else { panic!("expected refusal") };
        let c = r.collision.unwrap();
        assert_eq!((c.r, c.a, c.b), (Some(2), 1, 3));
    }

    #[test]
    fn su3_witnesses() {
        let rs = crate::chevalley::roots::root_system_a(3).unwrap();
        let (a, b) = (&rs.simple[0], &rs.simple[1]);
        let w = torus_pair_witness(&rs, a, b, 3, WitnessCase::Su3).unwrap();
        assert_eq!((w.alpha_exp, w.beta_exp, w.modulus), (5, -1, 8));
        for q in [3, 4, 7] {
            let out = torus_family(&rs, a, b, q, &FamilyCase::Su3).unwrap();
            assert_eq!(out.family().unwrap().pairs_checked, 6, "q = {q}");
        }
        for q in SU3_EXCLUDED {
            let out = torus_family(&rs, a, b, q, &FamilyCase::Su3).unwrap();
            assert!(out.family().is_none());
        }
    }

    #[test]
    fn split_family_above_exclusions() {
        let rs = root_system(2).unwrap();
        for (a, b) in [(&rs.simple[0], &rs.simple[1]), (&rs.simple[1], &rs.simple[0])] {
            for q in [8, 9, 11] {
                let out = torus_family(&rs, a, b, q, &FamilyCase::Chevalley).unwrap();
                let fam = out.family().unwrap();
                assert!(fam.matrix_verified);
                assert_eq!(fam.ts.len(), 4);
            }
        }
    }
}
