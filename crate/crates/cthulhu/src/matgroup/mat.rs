use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ffield::{same_field, FieldSpec};

/// A square matrix over a finite field, entries stored row-major in the
/// field's integer encoding.
#[derive(Clone)]
pub struct Mat {
    field: Arc<FieldSpec>,
    n: usize,
    e: Vec<u32>,
}

impl PartialEq for Mat {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.e == other.e
    }
}

impl Eq for Mat {}

impl Hash for Mat {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.e.hash(state);
    }
}

impl PartialOrd for Mat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mat {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| self.e.cmp(&other.e))
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl Mat {
    pub fn from_entries(field: &Arc<FieldSpec>, n: usize, e: Vec<u32>) -> Result<Mat> {
        if e.len() != n * n {
            return Err(Error::Dimension(format!("{} entries for a {n}x{n} matrix", e.len())));
        }
        if let Some(&bad) = e.iter().find(|&&v| v >= field.q()) {
            return Err(Error::Parse(format!("entry {bad} outside F_{}", field.q())));
        }
        Ok(Mat { field: field.clone(), n, e })
    }

    pub fn from_rows(field: &Arc<FieldSpec>, rows: &[Vec<u32>]) -> Result<Mat> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("rows of unequal length".into()));
        }
        Mat::from_entries(field, n, rows.concat())
    }

    /// Rows given as signed integers, read in the prime field.
    pub fn from_int_rows(field: &Arc<FieldSpec>, rows: &[&[i64]]) -> Result<Mat> {
        let rows: Vec<Vec<u32>> = rows
            .iter()
            .map(|r| r.iter().map(|&k| field.from_int(k)).collect())
            .collect();
        Mat::from_rows(field, &rows)
    }

    pub fn zero(field: &Arc<FieldSpec>, n: usize) -> Mat {
        Mat { field: field.clone(), n, e: vec![0; n * n] }
    }

    pub fn identity(field: &Arc<FieldSpec>, n: usize) -> Mat {
        let mut m = Mat::zero(field, n);
        for i in 0..n {
            m.e[i * n + i] = 1;
        }
        m
    }

    pub fn diag(field: &Arc<FieldSpec>, d: &[u32]) -> Mat {
        let n = d.len();
        let mut m = Mat::zero(field, n);
        for (i, &x) in d.iter().enumerate() {
            m.e[i * n + i] = x;
        }
        m
    }

    /// The anti-diagonal involution `J_n`.
    pub fn antidiag(field: &Arc<FieldSpec>, n: usize) -> Mat {
        let mut m = Mat::zero(field, n);
        for i in 0..n {
            m.e[i * n + (n - 1 - i)] = 1;
        }
        m
    }

    /// `I + t * e_{ij}` (0-based indices).
    pub fn elementary(field: &Arc<FieldSpec>, n: usize, i: usize, j: usize, t: u32) -> Mat {
        let mut m = Mat::identity(field, n);
        m.e[i * n + j] = field.add(m.e[i * n + j], t);
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn entries(&self) -> &[u32] {
        &self.e
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.e[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.e[i * self.n + j] = v;
    }

    pub fn same_shape(&self, other: &Mat) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension(format!("{} vs {}", self.n, other.n)));
        }
        if !same_field(&self.field, &other.field) {
            return Err(Error::Field(crate::ffield::FieldError::Mismatch(
                format!("{:?}", self.field),
                format!("{:?}", other.field),
            )));
        }
        Ok(())
    }

    pub fn is_identity(&self) -> bool {
        let n = self.n;
        self.e
            .iter()
            .enumerate()
            .all(|(k, &v)| v == u32::from(k / n == k % n))
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        debug_assert!(self.same_shape(o).is_ok());
        let n = self.n;
        let f = &*self.field;
        let mut out = vec![0u32; n * n];
        for i in 0..n {
            let row = &self.e[i * n..(i + 1) * n];
            let acc = &mut out[i * n..(i + 1) * n];
            for (k, &a) in row.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let orow = &o.e[k * n..(k + 1) * n];
                if a == 1 {
                    for j in 0..n {
                        if orow[j] != 0 {
                            acc[j] = f.add(acc[j], orow[j]);
                        }
                    }
                } else {
                    for j in 0..n {
                        if orow[j] != 0 {
                            acc[j] = f.add(acc[j], f.mul(a, orow[j]));
                        }
                    }
                }
            }
        }
        Mat { field: self.field.clone(), n, e: out }
    }

    pub fn try_mul(&self, o: &Mat) -> Result<Mat> {
        self.same_shape(o)?;
        Ok(self.mul(o))
    }

    pub fn add(&self, o: &Mat) -> Mat {
        let f = &*self.field;
        let e = self.e.iter().zip(&o.e).map(|(&a, &b)| f.add(a, b)).collect();
        Mat { field: self.field.clone(), n: self.n, e }
    }

    pub fn sub(&self, o: &Mat) -> Mat {
        let f = &*self.field;
        let e = self.e.iter().zip(&o.e).map(|(&a, &b)| f.sub(a, b)).collect();
        Mat { field: self.field.clone(), n: self.n, e }
    }

    pub fn scale(&self, c: u32) -> Mat {
        let f = &*self.field;
        let e = self.e.iter().map(|&a| f.mul(c, a)).collect();
        Mat { field: self.field.clone(), n: self.n, e }
    }

    pub fn neg(&self) -> Mat {
        let f = &*self.field;
        let e = self.e.iter().map(|&a| f.neg(a)).collect();
        Mat { field: self.field.clone(), n: self.n, e }
    }

    pub fn transpose(&self) -> Mat {
        let n = self.n;
        let mut e = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                e[j * n + i] = self.e[i * n + j];
            }
        }
        Mat { field: self.field.clone(), n, e }
    }

    /// Entrywise `a -> a^{p^r}`.
    pub fn frobenius(&self, r: u32) -> Mat {
        self.map(|a| self.field.frobenius(a, r))
    }

    pub fn map(&self, g: impl Fn(u32) -> u32) -> Mat {
        Mat { field: self.field.clone(), n: self.n, e: self.e.iter().map(|&a| g(a)).collect() }
    }

    /// Reinterpret entries in another field through a value map.
    pub fn map_into(&self, field: &Arc<FieldSpec>, g: impl Fn(u32) -> u32) -> Mat {
        Mat { field: field.clone(), n: self.n, e: self.e.iter().map(|&a| g(a)).collect() }
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<Mat> {
        let n = self.n;
        let f = &*self.field;
        let mut a = self.e.clone();
        let mut b = Mat::identity(&self.field, n).e;
        for col in 0..n {
            let piv = (col..n).find(|&r| a[r * n + col] != 0)?;
            if piv != col {
                for j in 0..n {
                    a.swap(piv * n + j, col * n + j);
                    b.swap(piv * n + j, col * n + j);
                }
            }
            let inv = f.inv(a[col * n + col])?;
            for j in 0..n {
                a[col * n + j] = f.mul(inv, a[col * n + j]);
                b[col * n + j] = f.mul(inv, b[col * n + j]);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let c = a[r * n + col];
                if c == 0 {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] = f.sub(a[r * n + j], f.mul(c, a[col * n + j]));
                    b[r * n + j] = f.sub(b[r * n + j], f.mul(c, b[col * n + j]));
                }
            }
        }
        Some(Mat { field: self.field.clone(), n, e: b })
    }

    /// Inverse of a unipotent matrix via the terminating series in `N = X - I`.
    pub fn unipotent_inverse(&self) -> Mat {
        let id = Mat::identity(&self.field, self.n);
        let nil = self.sub(&id);
        let mut term = id.clone();
        let mut acc = id;
        for k in 1..=self.n {
            term = term.mul(&nil);
            if term.e.iter().all(|&v| v == 0) {
                break;
            }
            acc = if k % 2 == 1 { acc.sub(&term) } else { acc.add(&term) };
        }
        acc
    }

    pub fn det(&self) -> u32 {
        let n = self.n;
        let f = &*self.field;
        let mut a = self.e.clone();
        let mut det = 1u32;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| a[r * n + col] != 0) else {
                return 0;
            };
            if piv != col {
                for j in 0..n {
                    a.swap(piv * n + j, col * n + j);
                }
                det = f.neg(det);
            }
            let d = a[col * n + col];
            det = f.mul(det, d);
            let inv = f.inv(d).unwrap();
            for r in col + 1..n {
                let c = f.mul(a[r * n + col], inv);
                if c == 0 {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] = f.sub(a[r * n + j], f.mul(c, a[col * n + j]));
                }
            }
        }
        det
    }

    pub fn rank(&self) -> usize {
        let n = self.n;
        let f = &*self.field;
        let mut a = self.e.clone();
        let mut rank = 0;
        for col in 0..n {
            let Some(piv) = (rank..n).find(|&r| a[r * n + col] != 0) else {
                continue;
            };
            for j in 0..n {
                a.swap(piv * n + j, rank * n + j);
            }
            let inv = f.inv(a[rank * n + col]).unwrap();
            for r in rank + 1..n {
                let c = f.mul(a[r * n + col], inv);
                if c == 0 {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] = f.sub(a[r * n + j], f.mul(c, a[rank * n + j]));
                }
            }
            rank += 1;
        }
        rank
    }

    /// Basis of the right null space `{v : self * v = 0}`.
    pub fn kernel(&self) -> Vec<Vec<u32>> {
        let n = self.n;
        let f = &*self.field;
        let mut a = self.e.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..n {
            let Some(piv) = (row..n).find(|&r| a[r * n + col] != 0) else {
                continue;
            };
            for j in 0..n {
                a.swap(piv * n + j, row * n + j);
            }
            let inv = f.inv(a[row * n + col]).unwrap();
            for j in 0..n {
                a[row * n + j] = f.mul(a[row * n + j], inv);
            }
            for r in 0..n {
                let c = a[r * n + col];
                if r == row || c == 0 {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] = f.sub(a[r * n + j], f.mul(c, a[row * n + j]));
                }
            }
            pivots.push(col);
            row += 1;
        }
        let mut basis = Vec::new();
        for free in (0..n).filter(|c| !pivots.contains(c)) {
            let mut v = vec![0u32; n];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(a[r * n + free]);
            }
            basis.push(v);
        }
        basis
    }

    /// `self * v` for a column vector `v`.
    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        let f = &*self.field;
        (0..self.n)
            .map(|i| (0..self.n).fold(0, |acc, j| f.add(acc, f.mul(self.e[i * self.n + j], v[j]))))
            .collect()
    }

    /// Bilinear form `x^T self y`.
    pub fn form(&self, x: &[u32], y: &[u32]) -> u32 {
        let f = &*self.field;
        let sy = self.apply(y);
        x.iter().zip(&sy).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
    }

    pub fn pow(&self, mut k: u64) -> Mat {
        let mut result = Mat::identity(&self.field, self.n);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        result
    }

    /// `g * self * g_inv`.
    pub fn conj(&self, g: &Mat, g_inv: &Mat) -> Mat {
        g.mul(self).mul(g_inv)
    }

    pub fn commutes_with(&self, o: &Mat) -> bool {
        self.mul(o) == o.mul(self)
    }

    /// True when `(X - I)^n = 0`.
    pub fn is_unipotent(&self) -> bool {
        let nil = self.sub(&Mat::identity(&self.field, self.n));
        nil.pow(self.n as u64).e.iter().all(|&v| v == 0)
    }

    /// True when the multiplicative order is a power of `p`, tested by
    /// repeated `p`-th powers.
    pub fn is_p_element(&self) -> bool {
        let p = self.field.p() as u64;
        let mut x = self.clone();
        let mut steps = 0;
        let mut bound = 1usize;
        while bound < self.n {
            bound *= p as usize;
            steps += 1;
        }
        for _ in 0..=steps {
            if x.is_identity() {
                return true;
            }
            x = x.pow(p);
        }
        x.is_identity()
    }

    /// Direct sum of square blocks placed on the diagonal.
    pub fn block_diag(field: &Arc<FieldSpec>, blocks: &[Mat]) -> Mat {
        let n: usize = blocks.iter().map(|b| b.n).sum();
        let mut m = Mat::zero(field, n);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.n {
                for j in 0..b.n {
                    m.e[(off + i) * n + off + j] = b.get(i, j);
                }
            }
            off += b.n;
        }
        m
    }

    /// Place `block` on the coordinates `idx` of an identity matrix of size `n`.
    pub fn embed(&self, n: usize, idx: &[usize]) -> Mat {
        let mut m = Mat::identity(&self.field, n);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m.e[i * n + j] = self.get(a, b);
            }
        }
        m
    }

    /// Row-major text, rows separated by `;`, entries by spaces.
    pub fn to_text(&self) -> String {
        let rows: Vec<String> = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.field.format(self.get(i, j)))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        rows.join("; ")
    }

    pub fn to_rows(&self) -> Vec<Vec<String>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.field.format(self.get(i, j))).collect())
            .collect()
    }

    pub fn parse(field: &Arc<FieldSpec>, s: &str) -> Result<Mat> {
        let rows: Vec<Vec<u32>> = s
            .split(';')
            .map(|row| {
                row.split_whitespace()
                    .map(|t| field.parse(t).map_err(Error::from))
                    .collect::<Result<Vec<u32>>>()
            })
            .collect::<Result<_>>()?;
        Mat::from_rows(field, &rows)
    }

    pub fn from_text_rows(field: &Arc<FieldSpec>, rows: &[Vec<String>]) -> Result<Mat> {
        let rows: Vec<Vec<u32>> = rows
            .iter()
            .map(|r| r.iter().map(|t| field.parse(t).map_err(Error::from)).collect())
            .collect::<Result<_>>()?;
        Mat::from_rows(field, &rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::make_field;

    #[test]
    fn inverse_and_det() {
        let f = make_field(3, 1).unwrap();
        let a = Mat::from_int_rows(&f, &[&[1, 2, 0], &[0, 1, 1], &[1, 0, 2]]).unwrap();
        let ai = a.inverse().unwrap();
        assert!(a.mul(&ai).is_identity());
        assert_eq!(a.det(), f.from_int(4));
        let sing = Mat::from_int_rows(&f, &[&[1, 2], &[2, 1]]).unwrap();
        assert_eq!(sing.det(), 0);
        assert!(sing.inverse().is_none());
    }

    #[test]
    fn unipotent_inverse_agrees() {
        let f = make_field(5, 1).unwrap();
        let u = Mat::from_int_rows(&f, &[&[1, 2, 3], &[0, 1, 4], &[0, 0, 1]]).unwrap();
        assert_eq!(u.unipotent_inverse(), u.inverse().unwrap());
        assert!(u.is_unipotent());
        assert!(u.is_p_element());
    }

    #[test]
    fn text_round_trip() {
        let f = make_field(2, 2).unwrap();
        let a = Mat::from_rows(&f, &[vec![1, 2], vec![3, 0]]).unwrap();
        assert_eq!(Mat::parse(&f, &a.to_text()).unwrap(), a);
    }
}
