use std::sync::Arc;

use crate::ffield::FieldSpec;

use super::Mat;

/// Compact hashable image of a matrix. Packed keys store entries most
/// significant first, so comparing keys compares matrices lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Key {
    Packed(u128),
    Wide(Box<[u32]>),
}

/// Converts between matrices of one shape and their keys.
#[derive(Clone, Debug)]
pub struct Packer {
    field: Arc<FieldSpec>,
    n: usize,
    bits: u32,
    packed: bool,
}

impl Packer {
    pub fn new(field: &Arc<FieldSpec>, n: usize) -> Packer {
        let bits = 32 - (field.q() - 1).leading_zeros();
        let packed = (n * n) as u32 * bits <= 128;
        Packer { field: field.clone(), n, bits, packed }
    }

    pub fn for_mat(m: &Mat) -> Packer {
        Packer::new(m.field(), m.n())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    #[inline]
    pub fn key(&self, m: &Mat) -> Key {
        if self.packed {
            let mut k = 0u128;
            for &v in m.entries() {
                k = (k << self.bits) | v as u128;
            }
            Key::Packed(k)
        } else {
            Key::Wide(m.entries().into())
        }
    }

    pub fn unpack(&self, k: &Key) -> Mat {
        let e = match k {
            Key::Packed(mut x) => {
                let total = self.n * self.n;
                let mask = (1u128 << self.bits) - 1;
                let mut e = vec![0u32; total];
                for slot in e.iter_mut().rev() {
                    *slot = (x & mask) as u32;
                    x >>= self.bits;
                }
                e
            }
            Key::Wide(w) => w.to_vec(),
        };
        Mat::from_entries(&self.field, self.n, e).expect("key produced by this packer")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::make_field;

    #[test]
    fn packing_preserves_order() {
        let f = make_field(3, 1).unwrap();
        let p = Packer::new(&f, 2);
        let a = Mat::from_rows(&f, &[vec![0, 2], vec![2, 2]]).unwrap();
        let b = Mat::from_rows(&f, &[vec![1, 0], vec![0, 0]]).unwrap();
        assert!(p.key(&a) < p.key(&b));
        assert!(a < b);
        assert_eq!(p.unpack(&p.key(&a)), a);
    }
}
