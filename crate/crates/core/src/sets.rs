//! Indicator functions, coset averages and the residual `f_V`.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dyadic::DyadicScalar;
use crate::error::{Error, Result};
use crate::fourier::{inner, l1_norm, FunctionTable};
use crate::group::{DualSubspace, GroupDim, PointMask};

/// A subset of F₂ⁿ stored as a `2^n`-bit set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    dim: GroupDim,
    words: Vec<u64>,
}

impl PointSet {
    pub fn empty(dim: GroupDim) -> Self {
        PointSet {
            dim,
            words: vec![0; dim.order().div_ceil(64)],
        }
    }

    pub fn full(dim: GroupDim) -> Self {
        Self::from_predicate(dim, |_| true)
    }

    pub fn from_predicate(dim: GroupDim, member: impl Fn(PointMask) -> bool) -> Self {
        let mut s = Self::empty(dim);
        for x in dim.masks() {
            if member(x) {
                s.insert(x);
            }
        }
        s
    }

    /// Builds a set, rejecting out-of-range points and duplicates.
    pub fn from_points(dim: GroupDim, points: &[PointMask]) -> Result<Self> {
        let mut s = Self::empty(dim);
        for &p in points {
            if p as usize >= dim.order() {
                return Err(Error::BadInput(format!(
                    "point {p:#x} outside F_2^{}",
                    dim.n()
                )));
            }
            if !s.insert(p) {
                return Err(Error::BadInput(format!("duplicate point {p:#x}")));
            }
        }
        Ok(s)
    }

    pub fn dim(&self) -> GroupDim {
        self.dim
    }

    pub fn contains(&self, x: PointMask) -> bool {
        let x = x as usize;
        x < self.dim.order() && self.words[x / 64] >> (x % 64) & 1 == 1
    }

    /// Returns whether `x` was newly inserted.
    pub fn insert(&mut self, x: PointMask) -> bool {
        let x = x as usize;
        assert!(x < self.dim.order(), "point outside group");
        let had = self.words[x / 64] >> (x % 64) & 1 == 1;
        self.words[x / 64] |= 1 << (x % 64);
        !had
    }

    pub fn remove(&mut self, x: PointMask) -> bool {
        let x = x as usize;
        let had = self.contains(x as u32);
        if had {
            self.words[x / 64] &= !(1 << (x % 64));
        }
        had
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = PointMask> + '_ {
        self.dim.masks().filter(move |&x| self.contains(x))
    }

    /// `|A| / 2^n`.
    pub fn density(&self) -> DyadicScalar {
        DyadicScalar::new(self.len() as i128, self.dim.n())
    }

    pub fn indicator(&self) -> FunctionTable {
        FunctionTable::indicator_from(self.dim, |x| self.contains(x))
    }

    pub fn is_disjoint(&self, other: &PointSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        PointSet {
            dim: self.dim,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a | b)
                .collect(),
        }
    }

    /// The `2^n`-bit integer `Σ_{x∈A} 2^x` as MSB-first hex, padded to
    /// `ceil(2^n / 4)` digits.
    pub fn to_hexbits(&self) -> String {
        let digits = self.dim.order().div_ceil(4);
        (0..digits)
            .rev()
            .map(|i| {
                let mut nib = 0u32;
                for b in 0..4 {
                    if self.contains((4 * i + b) as u32) {
                        nib |= 1 << b;
                    }
                }
                char::from_digit(nib, 16).unwrap()
            })
            .collect()
    }

    pub fn from_hexbits(dim: GroupDim, hex: &str) -> Result<Self> {
        let hex = hex.trim();
        let digits = dim.order().div_ceil(4);
        if hex.len() != digits {
            return Err(Error::BadInput(format!(
                "hexbits needs {digits} hex digits for n={}, got {}",
                dim.n(),
                hex.len()
            )));
        }
        let mut s = Self::empty(dim);
        for (pos, c) in hex.chars().enumerate() {
            let nib = c
                .to_digit(16)
                .ok_or_else(|| Error::BadInput(format!("bad hex digit '{c}'")))?;
            let i = digits - 1 - pos;
            for b in 0..4 {
                if nib >> b & 1 == 1 {
                    let x = 4 * i + b as usize;
                    if x >= dim.order() {
                        return Err(Error::BadInput("hexbits sets a bit beyond 2^n".into()));
                    }
                    s.insert(x as u32);
                }
            }
        }
        Ok(s)
    }
}

/// `f_V = χ_A − χ_A ∗ μ_{V⊥}` together with the data it was built from.
#[derive(Debug, Clone)]
pub struct ResidualTable {
    pub table: FunctionTable,
    pub subspace: DualSubspace,
    set: PointSet,
}

impl ResidualTable {
    pub fn set(&self) -> &PointSet {
        &self.set
    }
}

fn check_subspace(a: &PointSet, v: &DualSubspace) -> Result<()> {
    let n = a.dim().n();
    if v.dim() > n || v.basis().iter().any(|&g| g >> n != 0) {
        return Err(Error::BadInput(format!(
            "subspace does not live in the dual of F_2^{n}"
        )));
    }
    Ok(())
}

/// `x ↦ |A ∩ (x + V⊥)| / |V⊥|`, computed by counting per coset.
pub fn coset_average(a: &PointSet, v: &DualSubspace) -> Result<FunctionTable> {
    check_subspace(a, v)?;
    let dim = a.dim();
    let mut counts = vec![0i128; 1usize << v.dim()];
    for x in a.iter() {
        counts[v.coset_index(x)] += 1;
    }
    let nums = dim.masks().map(|x| counts[v.coset_index(x)]).collect();
    FunctionTable::from_nums(dim, nums, dim.n() - v.dim())
}

/// `f_V = χ_A − χ_A ∗ μ_{V⊥}`; with `V = {0}` this is the balanced function.
pub fn residual(a: &PointSet, v: &DualSubspace) -> Result<ResidualTable> {
    let avg = coset_average(a, v)?;
    let table = a.indicator().checked_sub(&avg)?;
    Ok(ResidualTable {
        table,
        subspace: v.clone(),
        set: a.clone(),
    })
}

/// `‖f_V‖₁`, cross-checked against `2⟨χ_A, f_V⟩`.
pub fn residual_l1(fv: &ResidualTable) -> Result<DyadicScalar> {
    let l1 = l1_norm(&fv.table)?;
    let pairing = inner(&fv.set.indicator(), &fv.table)?;
    let twice = pairing
        .checked_mul_int(2)
        .ok_or(Error::Overflow("residual_l1"))?;
    if l1 != twice {
        return Err(Error::InvariantViolation(format!(
            "‖f_V‖₁ = {l1:?} but 2⟨χ_A, f_V⟩ = {twice:?}"
        )));
    }
    Ok(l1)
}

/// `2·order⁻¹·{α·order}(1 − {α·order})`, exact.
pub fn physical_lower_bound(alpha: DyadicScalar, order: u64) -> Result<DyadicScalar> {
    if !order.is_power_of_two() {
        return Err(Error::BadInput(format!(
            "order {order} is not a power of two"
        )));
    }
    let k = order.trailing_zeros() as i32;
    let t = alpha
        .mul_pow2(k)
        .ok_or(Error::Overflow("physical_lower_bound"))?
        .frac();
    let prod = t * (DyadicScalar::ONE - t);
    prod.mul_pow2(1 - k)
        .ok_or(Error::Overflow("physical_lower_bound"))
}

/// `(Σ(δᵢ − δᵢ²), γ(1 − γ))` with `γ = {Σδᵢ}`; the first never falls below the
/// second.
pub fn frac_quadratic_gap(deltas: &[BigRational]) -> Result<(BigRational, BigRational)> {
    let zero = BigRational::zero();
    let one = BigRational::one();
    if let Some(bad) = deltas.iter().find(|d| **d < zero || **d > one) {
        return Err(Error::BadInput(format!("δ = {bad} outside [0, 1]")));
    }
    let lhs = deltas
        .iter()
        .fold(BigRational::zero(), |acc, d| acc + d - d * d);
    let total: BigRational = deltas.iter().fold(BigRational::zero(), |a, d| a + d);
    let gamma = &total - total.floor();
    let rhs = &gamma * (&one - &gamma);
    Ok((lhs, rhs))
}
