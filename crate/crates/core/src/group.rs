//! Points and characters of F₂ⁿ as bitmasks, and GF(2) subspace algebra.
//!
//! A character `γ` acts on a point `x` by `γ(x) = (-1)^popcount(γ & x)`, so
//! points and characters share one representation and every character is
//! real and ±1-valued.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard ceiling on the number of coordinates.
pub const MAX_DIM: u32 = 30;
/// Default configured ceiling.
pub const DEFAULT_DIM_CAP: u32 = 16;

/// Number of F₂ coordinates; the group has order `2^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupDim(u32);

impl GroupDim {
    pub fn new(n: u32) -> Result<Self> {
        Self::with_cap(n, MAX_DIM)
    }

    pub fn with_cap(n: u32, cap: u32) -> Result<Self> {
        let cap = cap.min(MAX_DIM);
        if n == 0 || n > cap {
            return Err(Error::InvalidDim { n, cap });
        }
        Ok(GroupDim(n))
    }

    pub fn n(self) -> u32 {
        self.0
    }

    pub fn order(self) -> usize {
        1usize << self.0
    }

    /// All points (or characters) `0..2^n`.
    pub fn masks(self) -> impl Iterator<Item = u32> {
        0..(1u32 << self.0)
    }
}

/// A point of F₂ⁿ.
pub type PointMask = u32;
/// A character of F₂ⁿ.
pub type CharMask = u32;

#[inline]
pub fn parity(v: u32) -> u32 {
    v.count_ones() & 1
}

/// `⟨γ, x⟩ ∈ {0, 1}`.
#[inline]
pub fn pairing(gamma: u32, x: u32) -> u32 {
    parity(gamma & x)
}

/// `γ(x) ∈ {1, -1}`.
#[inline]
pub fn char_value(gamma: u32, x: u32) -> i32 {
    1 - 2 * pairing(gamma, x) as i32
}

/// A subspace of the dual group, stored as a reduced row-echelon basis.
///
/// Each row's pivot is its lowest set bit, no other row has that bit set, and
/// rows are sorted by pivot. Equal subspaces therefore have equal bases.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DualSubspace {
    basis: Vec<u32>,
}

impl DualSubspace {
    /// The trivial subspace `{0}`.
    pub fn trivial() -> Self {
        Self::default()
    }

    /// The whole dual group of F₂ⁿ.
    pub fn full(n: u32) -> Self {
        DualSubspace {
            basis: (0..n).map(|i| 1u32 << i).collect(),
        }
    }

    pub fn span<I: IntoIterator<Item = u32>>(gens: I) -> Self {
        let mut v = Self::trivial();
        for g in gens {
            v.insert_mut(g);
        }
        v
    }

    pub fn basis(&self) -> &[u32] {
        &self.basis
    }

    pub fn dim(&self) -> u32 {
        self.basis.len() as u32
    }

    pub fn order(&self) -> u64 {
        1u64 << self.basis.len()
    }

    /// Reduces `v` against the basis; zero iff `v` lies in the span.
    pub fn reduce(&self, mut v: u32) -> u32 {
        for &row in &self.basis {
            if v & (row & row.wrapping_neg()) != 0 {
                v ^= row;
            }
        }
        v
    }

    pub fn contains(&self, v: u32) -> bool {
        self.reduce(v) == 0
    }

    /// `span(self ∪ {gamma})`.
    pub fn insert(&self, gamma: u32) -> Self {
        let mut out = self.clone();
        out.insert_mut(gamma);
        out
    }

    /// Inserts in place; returns whether the dimension grew.
    pub fn insert_mut(&mut self, gamma: u32) -> bool {
        let r = self.reduce(gamma);
        if r == 0 {
            return false;
        }
        let pivot = r & r.wrapping_neg();
        for row in self.basis.iter_mut() {
            if *row & pivot != 0 {
                *row ^= r;
            }
        }
        let pos = self
            .basis
            .partition_point(|row| (row & row.wrapping_neg()) < pivot);
        self.basis.insert(pos, r);
        true
    }

    /// `self + other`.
    pub fn join(&self, other: &DualSubspace) -> Self {
        let mut out = self.clone();
        for &g in &other.basis {
            out.insert_mut(g);
        }
        out
    }

    pub fn is_subspace_of(&self, other: &DualSubspace) -> bool {
        self.basis.iter().all(|&g| other.contains(g))
    }

    /// Every element of the subspace, in subset-of-basis order.
    pub fn elements(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(1usize << self.basis.len());
        out.push(0);
        for &row in &self.basis {
            let len = out.len();
            for i in 0..len {
                out.push(out[i] ^ row);
            }
        }
        out
    }

    /// Basis of `V⊥ = {x : γ(x) = 1 for all γ ∈ V}` inside F₂ⁿ.
    pub fn annihilator_basis(&self, n: u32) -> Vec<u32> {
        let pivots: u32 = self
            .basis
            .iter()
            .map(|r| r & r.wrapping_neg())
            .fold(0, |a, b| a | b);
        let mut out = Vec::with_capacity((n - self.dim().min(n)) as usize);
        for f in 0..n {
            let bit = 1u32 << f;
            if pivots & bit != 0 {
                continue;
            }
            let mut x = bit;
            for &row in &self.basis {
                if row & bit != 0 {
                    x |= row & row.wrapping_neg();
                }
            }
            out.push(x);
        }
        out
    }

    /// `V⊥` as a subspace (points and characters share a representation).
    pub fn annihilator(&self, n: u32) -> DualSubspace {
        DualSubspace::span(self.annihilator_basis(n))
    }

    /// The syndrome `(⟨γ_1,x⟩, …, ⟨γ_d,x⟩)` packed into `d` bits.
    ///
    /// Two points share an index iff they lie in the same `V⊥`-coset.
    pub fn coset_index(&self, x: u32) -> usize {
        let mut idx = 0usize;
        for (i, &row) in self.basis.iter().enumerate() {
            idx |= (pairing(row, x) as usize) << i;
        }
        idx
    }
}

/// Whether the masks are linearly independent over GF(2).
pub fn is_independent(masks: &[u32]) -> bool {
    let mut v = DualSubspace::trivial();
    masks.iter().all(|&m| v.insert_mut(m))
}
