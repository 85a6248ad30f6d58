use std::sync::Arc;

use crate::chevalley::{root_system, Realization};
use crate::error::{Error, Result};
use crate::ffield::{field_of_order, FieldSpec};
use crate::matgroup::{jordan_block, jordan_partition, symplectic_form, GroupSpec, Mat};

use super::label::{Term, UnipotentLabel};

/// One orthogonal summand: `Reg(k)` is a regular unipotent of `Sp_{2k}`,
/// `Gl(m)` is `diag(X, J_m X^{-T} J_m)` with `X` a Jordan block of size `m`.
#[derive(Clone, Copy, Debug)]
enum Block {
    Reg(usize),
    Gl(usize),
}

impl Block {
    fn half(self) -> usize {
        match self {
            Block::Reg(k) | Block::Gl(k) => k,
        }
    }

    /// The block in `Sp_{2d}` for its own standard form, `d = half()`.
    fn local(self, field: &Arc<FieldSpec>) -> Result<Mat> {
        match self {
            Block::Reg(1) => Mat::from_int_rows(field, &[&[1, 1], &[0, 1]]),
            Block::Reg(k) => {
                let re = Realization::new(root_system(k)?, field);
                let mut m = Mat::identity(field, 2 * k);
                for a in re.rs.simple.clone() {
                    m = m.mul(&re.x(&a, 1)?);
                }
                Ok(m)
            }
            Block::Gl(m) => Ok(gl_embed(&jordan_block(field, m))),
        }
    }
}

/// `X -> diag(X, J X^{-T} J)`, the Levi embedding `GL_m -> Sp_{2m}`.
pub fn gl_embed(x: &Mat) -> Mat {
    let f = x.field();
    let j = Mat::antidiag(f, x.n());
    let lower = j.mul(&x.inverse().expect("invertible").transpose()).mul(&j);
    Mat::block_diag(f, &[x.clone(), lower])
}

/// Coordinates of a summand occupying half-slots `off..off + d` of `2n`.
pub fn summand_coords(n: usize, off: usize, d: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (off..off + d).collect();
    idx.extend((0..d).map(|t| 2 * n - off - d + t));
    idx
}

/// Orthogonal sum of blocks in `Sp_{2n}`, upper unitriangular.
fn assemble(field: &Arc<FieldSpec>, n: usize, blocks: &[Block]) -> Result<Mat> {
    let mut out = Mat::identity(field, 2 * n);
    let mut off = 0;
    for &b in blocks {
        let d = b.half();
        let local = b.local(field)?;
        out = out.mul(&local.embed(2 * n, &summand_coords(n, off, d)));
        off += d;
    }
    if off != n {
        return Err(Error::Dimension(format!("blocks fill {off} of {n} slots")));
    }
    Ok(out)
}

/// Blocks for a label: larger Jordan parts first, the `Sp`-regular block
/// before the `GL` block at equal size.
fn blocks_for(label: &UnipotentLabel) -> Vec<Block> {
    let mut keyed: Vec<(usize, u8, Block)> = Vec::new();
    match label {
        UnipotentLabel::Odd(p) => {
            for (&part, &r) in p.multiplicities().iter() {
                if part % 2 == 0 {
                    keyed.extend(std::iter::repeat_n((part, 0, Block::Reg(part / 2)), r));
                } else {
                    keyed.extend(std::iter::repeat_n((part, 1, Block::Gl(part)), r / 2));
                }
            }
        }
        UnipotentLabel::Even(ts) => {
            for t in ts {
                match *t {
                    Term::W { m, a } => keyed.extend(std::iter::repeat_n((m, 1, Block::Gl(m)), a)),
                    Term::V { size, b } => keyed.extend(std::iter::repeat_n((size, 0, Block::Reg(size / 2)), b)),
                }
            }
        }
    }
    keyed.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    keyed.into_iter().map(|k| k.2).collect()
}

/// Upper unitriangular representative of the label in `Sp_{2n}(q)`.
pub fn representative(label: &UnipotentLabel, n: usize, q: u64) -> Result<Mat> {
    label.check_for(n, q)?;
    let field = field_of_order(q)?;
    assemble(&field, n, &blocks_for(label))
}

/// Representatives of the rational classes with a known explicit form:
/// for odd `q` and partitions `(1^{r_1}, 2^{r_2})` the second class is the
/// first with its corner entry scaled by a non-square.
pub fn split_representatives(label: &UnipotentLabel, n: usize, q: u64) -> Result<Vec<Mat>> {
    let u = representative(label, n, q)?;
    match label {
        UnipotentLabel::Odd(p) if p.parts().iter().all(|&x| x <= 2) => {
            let f = u.field().clone();
            let zeta = (1..f.q()).find(|&z| !f.is_square(z)).expect("odd q has non-squares");
            let mut v = u.clone();
            v.set(0, 2 * n - 1, zeta);
            Ok(vec![u, v])
        }
        _ => Ok(vec![u]),
    }
}

/// Even-characteristic decomposition of a unipotent `u` in `Sp_{2n}(q)`.
/// Jordan multiplicities fix every term except the choice `W(2k)^{r/2}` vs
/// `W(2k)^{r/2-1} + V(2k)^2` at an even part of even multiplicity `r`; a
/// V-term there is detected by `B((u+1)^{2k-1} v, v) != 0` on `ker (u+1)^{2k}`.
pub fn decomposition_type(u: &Mat, spec: &GroupSpec) -> Result<UnipotentLabel> {
    let f = u.field().clone();
    if f.p() != 2 {
        return Err(Error::Precondition(format!("decomposition type needs even q, got q = {}", f.q())));
    }
    if !u.is_unipotent() {
        return Err(Error::Precondition("matrix is not unipotent".into()));
    }
    if !spec.membership(u)? {
        return Err(Error::Precondition(format!("matrix is not in {}", spec.name())));
    }
    let size = u.n();
    let form = symplectic_form(&f, size);
    let nil = u.sub(&Mat::identity(&f, size));
    let mut terms = Vec::new();
    for (&part, &r) in jordan_partition(u)?.multiplicities().iter() {
        if part % 2 == 1 {
            terms.push(Term::W { m: part, a: r / 2 });
            continue;
        }
        let b = if r % 2 == 1 {
            1
        } else if form_defect(&form, &nil, part) {
            2
        } else {
            0
        };
        terms.push(Term::W { m: part, a: (r - b) / 2 });
        terms.push(Term::V { size: part, b });
    }
    UnipotentLabel::even(terms)
}

/// Whether `v -> B(N^{s-1} v, v)` is nonzero on `ker N^s`. In characteristic
/// two this is a quadratic form, so it vanishes iff it vanishes on a basis
/// and its polarization vanishes on pairs of basis vectors.
fn form_defect(form: &Mat, nil: &Mat, s: usize) -> bool {
    let f = form.field();
    let ker = nil.pow(s as u64).kernel();
    let top = nil.pow(s as u64 - 1);
    let images: Vec<Vec<u32>> = ker.iter().map(|v| top.apply(v)).collect();
    for i in 0..ker.len() {
        if form.form(&images[i], &ker[i]) != 0 {
            return true;
        }
        for j in i + 1..ker.len() {
            let pol = f.add(form.form(&images[i], &ker[j]), form.form(&images[j], &ker[i]));
            if pol != 0 {
                return true;
            }
        }
    }
    false
}

/// Label of a unipotent element for either parity of `q`.
pub fn label_of(u: &Mat, spec: &GroupSpec) -> Result<UnipotentLabel> {
    if u.field().p() == 2 {
        decomposition_type(u, spec)
    } else {
        UnipotentLabel::odd(jordan_partition(u)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgroup::{group_spec, Family};

    fn sp(n: usize, q: u64) -> GroupSpec {
        group_spec(Family::Sp, 2 * n, q).unwrap()
    }

    fn label(s: &str) -> UnipotentLabel {
        s.parse().unwrap()
    }

    #[test]
    fn transvection_is_highest_root_element() {
        for q in [2, 3] {
            let l = if q == 2 { label("W(1)^2+V(2)") } else { label("(1^4,2)") };
            let u = representative(&l, 3, q).unwrap();
            let re = Realization::new(root_system(3).unwrap(), u.field());
            assert_eq!(u, re.x(&re.rs.highest_root(), 1).unwrap());
        }
    }

    #[test]
    fn mixed_involution_matches_root_product() {
        let u = representative(&label("W(2)+V(2)"), 3, 2).unwrap();
        let re = Realization::new(root_system(3).unwrap(), u.field());
        let a2 = re.rs.parse_label("a2").unwrap();
        let top = re.rs.highest_root();
        assert_eq!(u, re.x(&a2, 1).unwrap().mul(&re.x(&top, 1).unwrap()));
    }

    #[test]
    fn two_two_representatives_in_sp4_3() {
        let f = field_of_order(3).unwrap();
        let z = Mat::from_int_rows(&f, &[&[1, 0, 0, 1], &[0, 1, 1, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]).unwrap();
        let w = Mat::from_int_rows(&f, &[&[1, 0, 0, -1], &[0, 1, 1, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]).unwrap();
        assert_eq!(split_representatives(&label("2,2"), 2, 3).unwrap(), vec![z, w]);
    }

    #[test]
    fn representatives_are_members_with_matching_partition() {
        for (n, q) in [(2, 2), (2, 3), (3, 2), (3, 3), (2, 5)] {
            let g = sp(n, q);
            for l in super::super::enumerate_labels(n, q).unwrap() {
                let u = representative(&l, n, q).unwrap();
                assert!(g.membership(&u).unwrap(), "{l} in Sp{}({q})", 2 * n);
                assert_eq!(jordan_partition(&u).unwrap(), l.partition(), "{l}");
            }
        }
    }

    #[test]
    fn defect_separates_equal_jordan_types() {
        let g = sp(3, 2);
        let a = representative(&label("W(1)+V(2)^2"), 3, 2).unwrap();
        let b = representative(&label("W(1)+W(2)"), 3, 2).unwrap();
        assert_eq!(jordan_partition(&a).unwrap(), jordan_partition(&b).unwrap());
        assert_eq!(decomposition_type(&a, &g).unwrap(), label("W(1)+V(2)^2"));
        assert_eq!(decomposition_type(&b, &g).unwrap(), label("W(1)+W(2)"));
    }

    #[test]
    fn decomposition_rejects_odd_q() {
        let g = sp(2, 3);
        assert!(decomposition_type(&g.identity(), &g).is_err());
    }
}
