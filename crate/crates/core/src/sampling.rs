//! Random instances for property suites and experiments.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use crate::dyadic::DyadicScalar;
use crate::fourier::FunctionTable;
use crate::group::{CharMask, DualSubspace, GroupDim};
use crate::sets::PointSet;

/// A random subset whose density is itself drawn uniformly, so sparse and
/// dense sets both appear.
pub fn random_set<R: Rng>(n: GroupDim, rng: &mut R) -> PointSet {
    let p: f64 = rng.gen();
    let mut a = PointSet::empty(n);
    for x in n.masks() {
        if rng.gen::<f64>() < p {
            a.insert(x);
        }
    }
    a
}

/// Random subspace of dimension `dim` (rejection-sampled generators).
pub fn random_subspace<R: Rng>(n: GroupDim, dim: u32, rng: &mut R) -> DualSubspace {
    let mask = (n.order() - 1) as u32;
    let mut v = DualSubspace::trivial();
    while v.dim() < dim.min(n.n()) {
        v.insert_mut(rng.gen::<u32>() & mask);
    }
    v
}

/// `k` linearly independent characters.
pub fn random_independent<R: Rng>(n: GroupDim, k: u32, rng: &mut R) -> Vec<CharMask> {
    let mask = (n.order() - 1) as u32;
    let mut v = DualSubspace::trivial();
    let mut out = Vec::new();
    while out.len() < k.min(n.n()) as usize {
        let g = rng.gen::<u32>() & mask;
        if v.insert_mut(g) {
            out.push(g);
        }
    }
    out
}

/// Table with values `num / 2^exp`, `|num| <= 2^exp`.
pub fn random_table<R: Rng>(n: GroupDim, exp: u32, rng: &mut R) -> FunctionTable {
    let bound = 1i128 << exp;
    let nums = n.masks().map(|_| rng.gen_range(-bound..=bound)).collect();
    FunctionTable::from_nums(n, nums, exp).expect("length matches")
}

/// A mix of structured and unstructured test functions.
pub fn random_function<R: Rng>(n: GroupDim, rng: &mut R) -> FunctionTable {
    match rng.gen_range(0..4) {
        0 => random_set(n, rng).indicator(),
        1 => {
            let a = random_set(n, rng);
            let alpha = a.density();
            a.indicator()
                .checked_sub(&FunctionTable::constant(n, alpha))
                .expect("small values")
        }
        2 => {
            let k = rng.gen_range(0..=n.n());
            let v = random_subspace(n, k, rng);
            let perp = v.annihilator(n.n());
            let shift = rng.gen::<u32>() & (n.order() - 1) as u32;
            FunctionTable::indicator_from(n, |x| perp.contains(x ^ shift))
        }
        _ => random_table(n, rng.gen_range(0..6), rng),
    }
}

/// Random rationals in `[0, 1]` with denominators up to `max_den`.
pub fn random_deltas<R: Rng>(m: usize, max_den: i64, rng: &mut R) -> Vec<BigRational> {
    (0..m)
        .map(|_| {
            let den = rng.gen_range(1..=max_den);
            let num = rng.gen_range(0..=den);
            BigRational::new(BigInt::from(num), BigInt::from(den))
        })
        .collect()
}

/// A density on the `2^-n` grid.
pub fn random_density<R: Rng>(n: GroupDim, rng: &mut R) -> DyadicScalar {
    DyadicScalar::new(rng.gen_range(0..=n.order() as i128), n.n())
}
