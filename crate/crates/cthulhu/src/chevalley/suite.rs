use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::ffield::field_of_order;

use super::calc::commutator_data;
use super::realize::Realization;
use super::roots::{root_system, Root};

/// Product-form check for one pair of positive roots with `alpha + beta` a root.
#[derive(Clone, Debug, Serialize)]
pub struct PairCheck {
    pub alpha: String,
    pub beta: String,
    pub degenerate: bool,
    pub c11: Option<u32>,
    pub pairs_verified: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub n: usize,
    pub q: u64,
    pub seed: u64,
    pub torus_samples: usize,
    pub torus_failures: usize,
    pub pairs: Vec<PairCheck>,
    /// Every pair checked on all of `F_q^2`.
    pub product_form_exhaustive: bool,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.torus_failures == 0
    }
}

/// `t x_a(c) t^{-1} = x_a(a(t) c)` on seeded random torus elements, roots and
/// scalars, then the commutator product form on every pair of positive roots
/// summing to a root.
pub fn chevalley_suite(n: usize, q: u64, samples: usize, seed: u64) -> Result<SuiteReport> {
    let field = field_of_order(q)?;
    let re = Realization::new(root_system(n)?, &field);
    let mut roots: Vec<Root> = re.rs.positive.clone();
    roots.extend(re.rs.positive.iter().map(Root::neg));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..samples {
        let word: Vec<(Root, u32)> = re
            .rs
            .simple
            .iter()
            .map(|b| (b.clone(), rng.random_range(1..field.q())))
            .collect();
        let t = re.torus(&word)?;
        let ti = t.inverse().expect("diagonal");
        let alpha = &roots[rng.random_range(0..roots.len())];
        let c = rng.random_range(0..field.q());
        let lhs = t.mul(&re.x(alpha, c)?).mul(&ti);
        let rhs = re.x(alpha, field.mul(re.character(alpha, &t), c))?;
        if lhs != rhs {
            failures += 1;
        }
    }
    let mut pairs = Vec::new();
    for a in &re.rs.positive {
        for b in &re.rs.positive {
            if a == b || !re.rs.is_root(&a.add(b)) {
                continue;
            }
            let d = commutator_data(&re, a, b)?;
            pairs.push(PairCheck {
                alpha: re.rs.label(a),
                beta: re.rs.label(b),
                degenerate: d.degenerate,
                c11: d.c11,
                pairs_verified: d.pairs_verified,
            });
        }
    }
    let full = q * q;
    let product_form_exhaustive = pairs.iter().all(|p| p.pairs_verified == full);
    Ok(SuiteReport { n, q, seed, torus_samples: samples, torus_failures: failures, pairs, product_form_exhaustive })
}

/// Commutator data of the orthogonal short roots `e1 - e2`, `e1 + e2` of `C_2`.
pub fn orthogonal_short_pair(q: u64) -> Result<super::calc::CommutatorData> {
    let field = field_of_order(q)?;
    let re = Realization::new(root_system(2)?, &field);
    commutator_data(&re, &Root(vec![1, -1]), &Root(vec![1, 1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_on_small_groups() {
        for (n, q) in [(2, 2), (2, 3), (3, 2)] {
            let r = chevalley_suite(n, q, 100, 7).unwrap();
            assert!(r.ok() && r.product_form_exhaustive, "{n} {q}");
        }
    }

    #[test]
    fn orthogonal_short_pair_by_characteristic() {
        assert!(orthogonal_short_pair(2).unwrap().degenerate);
        assert!(orthogonal_short_pair(4).unwrap().degenerate);
        let d = orthogonal_short_pair(3).unwrap();
        assert!(!d.degenerate && d.c11.is_some_and(|c| c != 0));
    }
}
