use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::chevalley::{root_system, root_system_a, Realization};
use crate::error::{Error, Result};
use crate::ffield::{field_of_order, make_field, FieldSpec};

use super::{Key, Mat, Packer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    GL,
    SL,
    Sp,
    GU,
    SU,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::GL => "GL",
            Family::SL => "SL",
            Family::Sp => "Sp",
            Family::GU => "GU",
            Family::SU => "SU",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gl" => Ok(Family::GL),
            "sl" => Ok(Family::SL),
            "sp" => Ok(Family::Sp),
            "gu" => Ok(Family::GU),
            "su" => Ok(Family::SU),
            _ => Err(Error::Parse(format!("unknown family {s:?}"))),
        }
    }
}

impl Family {
    pub fn is_unitary(self) -> bool {
        matches!(self, Family::GU | Family::SU)
    }
}

/// A concrete classical group: family, matrix size `n`, base field size `q`,
/// invariant form, generating set and order.
#[derive(Clone)]
pub struct GroupSpec {
    pub family: Family,
    pub n: usize,
    pub q: u32,
    /// `F_q`, or `F_{q^2}` for unitary families.
    pub field: Arc<FieldSpec>,
    /// Gram matrix of the invariant form (identity for GL/SL).
    pub form: Mat,
    pub generators: Vec<Mat>,
    pub generator_inverses: Vec<Mat>,
    pub order: BigUint,
    /// `q = p^base_m`; the unitary Frobenius is `a -> a^{p^base_m}`.
    pub base_m: u32,
}

impl fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// Largest order cross-checked by full enumeration.
pub const ENUMERATION_LIMIT: u64 = 2_000_000;

fn big_pow(q: u64, k: u32) -> BigUint {
    BigUint::from(q).pow(k)
}

/// Standard order formulas; `n` is the matrix size.
pub fn order_formula(family: Family, n: usize, q: u64) -> BigUint {
    let one = BigUint::from(1u32);
    let nn = n as u32;
    match family {
        Family::GL | Family::SL => {
            let mut o = one.clone();
            for i in 0..nn {
                o *= big_pow(q, nn) - big_pow(q, i);
            }
            if family == Family::SL {
                o /= BigUint::from(q - 1);
            }
            o
        }
        Family::Sp => {
            let r = nn / 2;
            let mut o = big_pow(q, r * r);
            for i in 1..=r {
                o *= big_pow(q, 2 * i) - &one;
            }
            o
        }
        Family::GU | Family::SU => {
            let mut o = big_pow(q, nn * (nn - 1) / 2);
            for i in 1..=nn {
                let qi = big_pow(q, i);
                o *= if i % 2 == 0 { qi - &one } else { qi + &one };
            }
            if family == Family::SU {
                o /= BigUint::from(q + 1);
            }
            o
        }
    }
}

/// The symplectic Gram matrix of size `2r`: `[[0, J_r], [-J_r, 0]]`. In
/// characteristic two this coincides with `J_{2r}`.
pub fn symplectic_form(field: &Arc<FieldSpec>, size: usize) -> Mat {
    let r = size / 2;
    let mut m = Mat::zero(field, size);
    for i in 0..r {
        m.set(i, size - 1 - i, 1);
        m.set(size - 1 - i, i, field.neg(1));
    }
    m
}

/// Additive basis `1, theta, theta^2, ...` of `F_q` over `F_p`.
fn additive_basis(field: &FieldSpec) -> Vec<u32> {
    (0..field.m()).map(|k| field.p().pow(k)).collect()
}

/// Build a group of the given family; `n` is the matrix size.
pub fn group_spec(family: Family, n: usize, q: u64) -> Result<GroupSpec> {
    if n == 0 || n > 10 {
        return Err(Error::Unsupported(format!("matrix size {n}")));
    }
    let base = field_of_order(q)?;
    let (field, base_m) = if family.is_unitary() {
        (make_field(base.p() as u64, 2 * base.m())?, base.m())
    } else {
        (base.clone(), base.m())
    };
    let (form, generators) = match family {
        Family::GL | Family::SL => linear_generators(&field, n, family == Family::GL)?,
        Family::Sp => {
            if n % 2 != 0 || n < 2 {
                return Err(Error::Unsupported(format!("Sp needs an even size, got {n}")));
            }
            symplectic_generators(&field, n)?
        }
        Family::GU | Family::SU => {
            if n > 4 || q > 4 {
                return Err(Error::Unsupported(format!("unitary groups limited to n <= 4, q <= 4; got ({n}, {q})")));
            }
            unitary_generators(&field, n, base_m, family == Family::SU)?
        }
    };
    let generator_inverses = generators
        .iter()
        .map(|g| g.inverse().expect("generators are invertible"))
        .collect();
    let spec = GroupSpec {
        family,
        n,
        q: q as u32,
        field,
        form,
        generators,
        generator_inverses,
        order: order_formula(family, n, q),
        base_m,
    };
    for g in &spec.generators {
        if !spec.membership(g)? {
            return Err(Error::Verification(format!("generator {g:?} not in {}", spec.name())));
        }
    }
    Ok(spec)
}

fn linear_generators(field: &Arc<FieldSpec>, n: usize, general: bool) -> Result<(Mat, Vec<Mat>)> {
    let mut gens = Vec::new();
    if n >= 2 {
        let re = Realization::new(root_system_a(n)?, field);
        for alpha in &re.rs.simple {
            for &b in &additive_basis(field) {
                gens.push(re.x(alpha, b)?);
                gens.push(re.x(&alpha.neg(), b)?);
            }
        }
    }
    if general && field.q() > 2 {
        let mut d = vec![1; n];
        d[0] = field.generator();
        gens.push(Mat::diag(field, &d));
    }
    if gens.is_empty() {
        gens.push(Mat::identity(field, n));
    }
    Ok((Mat::identity(field, n), gens))
}

fn symplectic_generators(field: &Arc<FieldSpec>, size: usize) -> Result<(Mat, Vec<Mat>)> {
    let r = size / 2;
    let form = symplectic_form(field, size);
    let mut gens = Vec::new();
    if r == 1 {
        for &b in &additive_basis(field) {
            gens.push(Mat::elementary(field, 2, 0, 1, b));
            gens.push(Mat::elementary(field, 2, 1, 0, field.neg(b)));
        }
        return Ok((form, gens));
    }
    let re = Realization::new(root_system(r)?, field);
    for alpha in &re.rs.simple {
        for &b in &additive_basis(field) {
            gens.push(re.x(alpha, b)?);
            gens.push(re.x(&alpha.neg(), b)?);
        }
    }
    if field.q() > 2 {
        for alpha in &re.rs.simple {
            gens.push(re.coroot(alpha, field.generator())?);
        }
    }
    for alpha in &re.rs.simple {
        gens.push(re.weyl_rep(alpha)?);
    }
    Ok((form, gens))
}

/// Unitary groups for the Hermitian form `J_n`: all unitary upper
/// unitriangular matrices, their `J`-conjugates, the unitary diagonal matrices
/// (determinant one for SU) and `J` (or `-J` when `det J = -1` for SU).
fn unitary_generators(field: &Arc<FieldSpec>, n: usize, base_m: u32, special: bool) -> Result<(Mat, Vec<Mat>)> {
    let form = Mat::antidiag(field, n);
    let is_unitary = |x: &Mat| x.frobenius(base_m).transpose().mul(&form).mul(x) == form;
    let q2 = field.q();
    let slots: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let total = (q2 as u64).pow(slots.len() as u32);
    let mut gens = Vec::new();
    for code in 1..total {
        let mut x = Mat::identity(field, n);
        let mut c = code;
        for &(i, j) in &slots {
            x.set(i, j, (c % q2 as u64) as u32);
            c /= q2 as u64;
        }
        if is_unitary(&x) {
            gens.push(x.clone());
            gens.push(form.mul(&x).mul(&form));
        }
    }
    let half = n.div_ceil(2);
    let mut diag_count = 0;
    let total_d = ((q2 - 1) as u64).pow(half as u32);
    for code in 0..total_d {
        let mut d = vec![1u32; n];
        let mut c = code;
        for i in 0..half {
            let v = field.exp_gen((c % (q2 - 1) as u64) as i64);
            c /= (q2 - 1) as u64;
            d[i] = v;
        }
        let mut ok = true;
        for i in 0..n / 2 {
            let partner = n - 1 - i;
            d[partner] = field.inv(field.frobenius(d[i], base_m)).unwrap();
        }
        if n % 2 == 1 {
            let mid = n / 2;
            ok &= field.mul(d[mid], field.frobenius(d[mid], base_m)) == 1;
        }
        let m = Mat::diag(field, &d);
        if ok && !m.is_identity() && (!special || m.det() == 1) {
            gens.push(m);
            diag_count += 1;
            if diag_count > 64 {
                break;
            }
        }
    }
    let j = if special && form.det() != 1 { form.neg() } else { form.clone() };
    gens.push(j);
    Ok((form, gens))
}

impl GroupSpec {
    pub fn name(&self) -> String {
        format!("{}_{}({})", self.family, self.n, self.q)
    }

    /// Rank of the symplectic group (`n / 2`).
    pub fn rank(&self) -> usize {
        self.n / 2
    }

    pub fn identity(&self) -> Mat {
        Mat::identity(&self.field, self.n)
    }

    pub fn packer(&self) -> Packer {
        Packer::new(&self.field, self.n)
    }

    /// `q`-power Frobenius relevant to the unitary condition.
    pub fn frobenius_q(&self, x: &Mat) -> Mat {
        x.frobenius(self.base_m)
    }

    pub fn membership(&self, x: &Mat) -> Result<bool> {
        if x.n() != self.n {
            return Err(Error::Dimension(format!("{}x{} matrix in {}", x.n(), x.n(), self.name())));
        }
        x.same_shape(&self.form)?;
        Ok(match self.family {
            Family::GL => x.det() != 0,
            Family::SL => x.det() == 1,
            Family::Sp => x.det() == 1 && x.transpose().mul(&self.form).mul(x) == self.form,
            Family::GU | Family::SU => {
                let ok = self.frobenius_q(x).transpose().mul(&self.form).mul(x) == self.form;
                ok && (self.family == Family::GU || x.det() == 1)
            }
        })
    }

    /// Elements by breadth-first closure from the identity; `None` past `cap`.
    pub fn enumerate_keys(&self, cap: usize) -> Option<Vec<Key>> {
        let packer = self.packer();
        let id = self.identity();
        let mut seen: HashSet<Key> = HashSet::new();
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        seen.insert(packer.key(&id));
        order.push(packer.key(&id));
        queue.push_back(id);
        while let Some(x) = queue.pop_front() {
            for g in &self.generators {
                let y = x.mul(g);
                let k = packer.key(&y);
                if seen.insert(k.clone()) {
                    if seen.len() > cap {
                        return None;
                    }
                    order.push(k);
                    queue.push_back(y);
                }
            }
        }
        order.sort_unstable();
        Some(order)
    }

    /// Compare the order formula with a full enumeration (only for orders up
    /// to [`ENUMERATION_LIMIT`]). Returns the enumerated order when checked.
    pub fn cross_check_order(&self) -> Result<Option<u64>> {
        let limit = BigUint::from(ENUMERATION_LIMIT);
        if self.order > limit {
            return Ok(None);
        }
        let keys = self
            .enumerate_keys(ENUMERATION_LIMIT as usize + 1)
            .ok_or_else(|| Error::Verification("enumeration exceeded the formula order".into()))?;
        let got = keys.len() as u64;
        if BigUint::from(got) != self.order {
            return Err(Error::Verification(format!(
                "{}: enumerated {got}, formula {}",
                self.name(),
                self.order
            )));
        }
        Ok(Some(got))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "family": self.family.to_string(),
            "n": self.n,
            "q": self.q,
            "field": self.field.header(),
            "order": self.order.to_string(),
        })
    }
}

/// Steinberg-type endomorphisms of `GL_n` over a finite field.
#[derive(Clone, Debug)]
pub enum Endo {
    /// Entrywise `a -> a^{p^r}`.
    FrobeniusPower(u32),
    /// `X -> J ᵗ(Fr_q X)^{-1} J` with `q = p^base_m`.
    UnitaryTwist { base_m: u32 },
    /// `X -> g X g^{-1}`.
    ConjugationBy(Mat),
    /// Apply the listed maps left to right.
    Composite(Vec<Endo>),
}

pub fn apply_endo(x: &Mat, e: &Endo) -> Result<Mat> {
    match e {
        Endo::FrobeniusPower(r) => Ok(x.frobenius(*r)),
        Endo::UnitaryTwist { base_m } => {
            let j = Mat::antidiag(x.field(), x.n());
            let inv = x
                .frobenius(*base_m)
                .transpose()
                .inverse()
                .ok_or_else(|| Error::Precondition("unitary twist needs an invertible matrix".into()))?;
            Ok(j.mul(&inv).mul(&j))
        }
        Endo::ConjugationBy(g) => {
            x.same_shape(g)?;
            let gi = g
                .inverse()
                .ok_or_else(|| Error::Precondition("conjugating matrix is singular".into()))?;
            Ok(g.mul(x).mul(&gi))
        }
        Endo::Composite(list) => {
            let mut y = x.clone();
            for e in list {
                y = apply_endo(&y, e)?;
            }
            Ok(y)
        }
    }
}
