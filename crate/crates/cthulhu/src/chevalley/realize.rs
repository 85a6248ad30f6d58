use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ffield::FieldSpec;
use crate::matgroup::Mat;

use super::roots::{Root, RootKind, RootSystem};

/// Explicit matrices for root elements, torus elements and Weyl
/// representatives. For `C_n` the ambient space has coordinates `0..2n` with
/// `i' = 2n - 1 - i`; for `A_{n-1}` it is `F_q^n`.
#[derive(Clone, Debug)]
pub struct Realization {
    pub rs: RootSystem,
    pub field: Arc<FieldSpec>,
    pub size: usize,
}

impl Realization {
    pub fn new(rs: RootSystem, field: &Arc<FieldSpec>) -> Realization {
        let size = match rs.kind {
            RootKind::C => 2 * rs.rank,
            RootKind::A => rs.dim,
        };
        Realization { rs, field: field.clone(), size }
    }

    fn prime(&self, i: usize) -> usize {
        self.size - 1 - i
    }

    /// Entries `(row, col, sign)` of `x_alpha(1) - I`.
    pub fn pattern(&self, alpha: &Root) -> Result<Vec<(usize, usize, i64)>> {
        if !self.rs.is_root(alpha) {
            return Err(Error::Precondition(format!("{alpha} is not a root")));
        }
        let positive = self.rs.is_positive(alpha);
        let a = if positive { alpha.clone() } else { alpha.neg() };
        let nz: Vec<(usize, i32)> =
            a.0.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (i, c)).collect();
        let mut pat = match self.rs.kind {
            RootKind::A => {
                let i = nz.iter().find(|x| x.1 > 0).unwrap().0;
                let j = nz.iter().find(|x| x.1 < 0).unwrap().0;
                vec![(i, j, 1)]
            }
            RootKind::C => match nz.as_slice() {
                [(i, 2)] => vec![(*i, self.prime(*i), 1)],
                [(i, 1), (j, -1)] => vec![(*i, *j, 1), (self.prime(*j), self.prime(*i), -1)],
                [(i, 1), (j, 1)] => vec![(*i, self.prime(*j), 1), (*j, self.prime(*i), 1)],
                _ => unreachable!("positive root of C_n"),
            },
        };
        if !positive {
            for e in pat.iter_mut() {
                *e = (e.1, e.0, e.2);
            }
        }
        Ok(pat)
    }

    /// Position of the entry whose value reads off the coefficient of
    /// `x_alpha` in a root-subgroup product (the first pattern entry).
    pub fn pivot(&self, alpha: &Root) -> Result<(usize, usize)> {
        let p = self.pattern(alpha)?;
        Ok((p[0].0, p[0].1))
    }

    pub fn x(&self, alpha: &Root, t: u32) -> Result<Mat> {
        let f = &self.field;
        let mut m = Mat::identity(f, self.size);
        for (i, j, s) in self.pattern(alpha)? {
            let v = if s > 0 { t } else { f.neg(t) };
            m.set(i, j, f.add(m.get(i, j), v));
        }
        Ok(m)
    }

    /// Diagonal torus element from a cocharacter vector `c` and scalar `z`:
    /// coordinate `i` gets `z^{c_i}` (and `z^{-c_i}` at `i'` for `C_n`).
    pub fn cochar(&self, c: &[i32], z: u32) -> Result<Mat> {
        let f = &self.field;
        if z == 0 {
            return Err(Error::Precondition("torus scalar must be nonzero".into()));
        }
        let mut d = vec![1u32; self.size];
        for (i, &k) in c.iter().enumerate() {
            let v = f.pow(z, k as i64).unwrap();
            d[i] = f.mul(d[i], v);
            if self.rs.kind == RootKind::C {
                let vi = f.inv(v).unwrap();
                let ip = self.prime(i);
                d[ip] = f.mul(d[ip], vi);
            }
        }
        Ok(Mat::diag(f, &d))
    }

    /// `beta^vee(z)`.
    pub fn coroot(&self, beta: &Root, z: u32) -> Result<Mat> {
        if !self.rs.is_root(beta) {
            return Err(Error::Precondition(format!("{beta} is not a root")));
        }
        self.cochar(&beta.coroot(), z)
    }

    /// Product of coroot factors in the given order.
    pub fn torus(&self, word: &[(Root, u32)]) -> Result<Mat> {
        let mut m = Mat::identity(&self.field, self.size);
        for (b, z) in word {
            m = m.mul(&self.coroot(b, *z)?);
        }
        Ok(m)
    }

    /// `n_alpha = x_alpha(1) x_{-alpha}(-1) x_alpha(1)`.
    pub fn weyl_rep(&self, alpha: &Root) -> Result<Mat> {
        let one = 1;
        let m1 = self.field.neg(1);
        Ok(self.x(alpha, one)?.mul(&self.x(&alpha.neg(), m1)?).mul(&self.x(alpha, one)?))
    }

    /// Value of the character `alpha` on a diagonal matrix.
    pub fn character(&self, alpha: &Root, t: &Mat) -> u32 {
        let f = &self.field;
        let mut acc = 1;
        for (i, &c) in alpha.0.iter().enumerate() {
            if c != 0 {
                acc = f.mul(acc, f.pow(t.get(i, i), c as i64).unwrap());
            }
        }
        acc
    }

    /// Product of root elements in the given order.
    pub fn evaluate(&self, word: &[(Root, u32)]) -> Result<Mat> {
        let mut m = Mat::identity(&self.field, self.size);
        for (r, c) in word {
            m = m.mul(&self.x(r, *c)?);
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chevalley::roots::root_system;
    use crate::ffield::make_field;

    #[test]
    fn simple_root_element_matches_block_shape() {
        let f = make_field(3, 1).unwrap();
        let re = Realization::new(root_system(2).unwrap(), &f);
        let a1 = re.rs.simple[0].clone();
        let x = re.x(&a1, 1).unwrap();
        let expect = Mat::from_int_rows(
            &f,
            &[&[1, 1, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, -1], &[0, 0, 0, 1]],
        )
        .unwrap();
        assert_eq!(x, expect);
        let hr = re.rs.highest_root();
        let t = re.x(&hr, 1).unwrap();
        assert_eq!(t, Mat::elementary(&f, 4, 0, 3, 1));
    }

    #[test]
    fn x_is_additive() {
        let f = make_field(5, 1).unwrap();
        let re = Realization::new(root_system(3).unwrap(), &f);
        for r in re.rs.positive.clone() {
            for a in 0..5 {
                for b in 0..5 {
                    let lhs = re.x(&r, a).unwrap().mul(&re.x(&r, b).unwrap());
                    assert_eq!(lhs, re.x(&r, f.add(a, b)).unwrap());
                    let nr = r.neg();
                    let lhs = re.x(&nr, a).unwrap().mul(&re.x(&nr, b).unwrap());
                    assert_eq!(lhs, re.x(&nr, f.add(a, b)).unwrap());
                }
            }
        }
    }
}
