//! Brute-force oracles shared by the integration tests. Nothing here calls the
//! library's transform or subspace code.
#![allow(dead_code)]

use std::collections::HashMap;

use f2norm::fourier::FunctionTable;
use f2norm::{DyadicScalar, PointSet};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sign(g: u32, x: u32) -> i64 {
    if (g & x).count_ones() & 1 == 0 {
        1
    } else {
        -1
    }
}

/// `2^n · χ̂_A(γ)` by direct summation.
pub fn hat_scaled(a: &PointSet, g: u32) -> i64 {
    a.iter().map(|x| sign(g, x)).sum()
}

/// `2^n · ‖χ_A‖_{A(G)}`.
pub fn norm_scaled(a: &PointSet) -> i64 {
    let n = a.dim().n();
    (0..1u32 << n).map(|g| hat_scaled(a, g).abs()).sum()
}

pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

pub fn pow2(e: u32) -> BigInt {
    BigInt::one() << e
}

pub fn to_ratio(d: DyadicScalar) -> BigRational {
    BigRational::new(BigInt::from(d.num()), pow2(d.exp()))
}

pub fn frac(q: &BigRational) -> BigRational {
    q - q.floor()
}

/// Rank over GF(2) by elimination on the highest set bit.
pub fn rank(vs: &[u32]) -> usize {
    let mut rows: Vec<u32> = Vec::new();
    for &v in vs {
        let mut v = v;
        for &r in &rows {
            v = v.min(v ^ r);
        }
        if v != 0 {
            rows.push(v);
            rows.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    rows.len()
}

pub fn in_span(gens: &[u32], g: u32) -> bool {
    let mut with = gens.to_vec();
    with.push(g);
    rank(&with) == rank(gens)
}

/// All elements of `span(gens)` by closure.
pub fn span_elements(gens: &[u32]) -> Vec<u32> {
    let mut elems = vec![0u32];
    for &g in gens {
        if !elems.contains(&g) {
            let shifted: Vec<u32> = elems.iter().map(|e| e ^ g).collect();
            elems.extend(shifted);
        }
    }
    elems.sort_unstable();
    elems
}

/// Label of the `V⊥`-coset of `x`: parities against the generators.
pub fn syndrome(gens: &[u32], x: u32) -> u64 {
    gens.iter()
        .enumerate()
        .map(|(i, &g)| ((g & x).count_ones() as u64 & 1) << i)
        .sum()
}

/// `(coset size m, |A ∩ coset| per coset)` for `V = span(gens)`.
pub fn coset_counts(a: &PointSet, gens: &[u32]) -> (u64, Vec<u64>) {
    let n = a.dim().n();
    let mut sizes: HashMap<u64, u64> = HashMap::new();
    let mut hits: HashMap<u64, u64> = HashMap::new();
    for x in 0..1u32 << n {
        let s = syndrome(gens, x);
        *sizes.entry(s).or_default() += 1;
        if a.contains(x) {
            *hits.entry(s).or_default() += 1;
        }
    }
    let m = (1u64 << n) / sizes.len() as u64;
    let counts = sizes
        .keys()
        .map(|s| hits.get(s).copied().unwrap_or(0))
        .collect();
    (m, counts)
}

/// `‖f_V‖₁` and `‖f_V‖₂²` from coset counts:
/// `f_V = 1 − c/m` on `A`, `−c/m` off `A`.
pub fn residual_norms(a: &PointSet, gens: &[u32]) -> (BigRational, BigRational) {
    let n = a.dim().n();
    let (m, counts) = coset_counts(a, gens);
    let total: u64 = counts.iter().map(|&c| c * (m - c)).sum();
    let den = BigInt::from(m) * pow2(n);
    (ratio(2 * total, den.clone()), ratio(total, den))
}

/// `2|V|⁻¹t(1 − t)` with `t = {α|V|}`.
pub fn physical_bound(alpha: &BigRational, order: u64) -> BigRational {
    let t = frac(&(alpha * BigInt::from(order)));
    ratio(2, order) * &t * (BigRational::one() - &t)
}

/// Values of a table as exact rationals.
pub fn table_ratios(f: &FunctionTable) -> Vec<BigRational> {
    let e = f.shared_exp();
    f.nums().iter().map(|&v| ratio(v, pow2(e))).collect()
}

pub fn is_zero(q: &BigRational) -> bool {
    q.is_zero()
}

/// Number of subspaces of each dimension of F₂ⁿ (Gaussian binomials).
pub fn subspace_counts(n: u32) -> Vec<u64> {
    (0..=n)
        .map(|k| {
            let mut num = 1u128;
            let mut den = 1u128;
            for i in 0..k {
                num *= (1u128 << n) - (1u128 << i);
                den *= (1u128 << k) - (1u128 << i);
            }
            (num / den) as u64
        })
        .collect()
}

/// Calls `f` with a generator list for every subspace of F₂ⁿ, once each.
///
/// Reduced echelon enumeration: choose the pivot positions, then every free
/// entry above each pivot that is not itself a pivot column.
pub fn for_each_subspace(n: u32, mut f: impl FnMut(&[u32])) {
    for pivots in 0u32..1 << n {
        let ps: Vec<u32> = (0..n).filter(|&b| pivots >> b & 1 == 1).collect();
        let free: Vec<Vec<u32>> = ps
            .iter()
            .map(|&p| (p + 1..n).filter(|&q| pivots >> q & 1 == 0).collect())
            .collect();
        let total: usize = free.iter().map(Vec::len).sum();
        let mut rows = vec![0u32; ps.len()];
        for assign in 0u64..1 << total {
            let mut bit = 0;
            for (i, &p) in ps.iter().enumerate() {
                let mut r = 1u32 << p;
                for &q in &free[i] {
                    if assign >> bit & 1 == 1 {
                        r |= 1 << q;
                    }
                    bit += 1;
                }
                rows[i] = r;
            }
            f(&rows);
        }
    }
}
