//! Exact Walsh–Hadamard transform and the norms built on it.
//!
//! Functions and spectra are stored as integer numerators over one shared
//! power-of-two denominator, so the butterfly runs on plain integers.
//! Physical space carries the uniform probability measure:
//! `f̂(γ) = 2^-n Σ_x f(x) γ(x)` and `‖f‖_p = (2^-n Σ_x |f(x)|^p)^{1/p}`.

use crate::dyadic::DyadicScalar;
use crate::error::{Error, Result};
use crate::group::GroupDim;

/// Numerators over a shared denominator `2^exp`, kept normalized.
#[derive(Debug, Clone, PartialEq, Eq)]
struct SharedExpTable {
    dim: GroupDim,
    nums: Vec<i128>,
    exp: u32,
}

impl SharedExpTable {
    fn from_parts(dim: GroupDim, nums: Vec<i128>, exp: u32) -> Result<Self> {
        if nums.len() != dim.order() {
            return Err(Error::BadInput(format!(
                "table length {} does not match group order {}",
                nums.len(),
                dim.order()
            )));
        }
        let mut t = SharedExpTable { dim, nums, exp };
        t.normalize();
        Ok(t)
    }

    fn from_values(dim: GroupDim, values: &[DyadicScalar]) -> Result<Self> {
        let exp = values.iter().map(|v| v.exp()).max().unwrap_or(0);
        let nums = values
            .iter()
            .map(|v| {
                let k = exp - v.exp();
                if k >= 127 {
                    if v.is_zero() {
                        Some(0)
                    } else {
                        None
                    }
                } else {
                    v.num().checked_mul(1i128 << k)
                }
            })
            .collect::<Option<Vec<_>>>()
            .ok_or(Error::Overflow("table construction"))?;
        Self::from_parts(dim, nums, exp)
    }

    fn normalize(&mut self) {
        if self.exp == 0 {
            return;
        }
        let or = self.nums.iter().fold(0i128, |a, &b| a | b);
        if or == 0 {
            self.exp = 0;
            return;
        }
        let tz = or.trailing_zeros().min(self.exp);
        if tz > 0 {
            for v in self.nums.iter_mut() {
                *v >>= tz;
            }
            self.exp -= tz;
        }
    }

    fn get(&self, i: usize) -> DyadicScalar {
        DyadicScalar::new(self.nums[i], self.exp)
    }

    fn butterfly(&mut self) -> Result<()> {
        let len = self.nums.len();
        let mut h = 1;
        while h < len {
            for block in (0..len).step_by(2 * h) {
                for i in block..block + h {
                    let a = self.nums[i];
                    let b = self.nums[i + h];
                    self.nums[i] = a.checked_add(b).ok_or(Error::Overflow("fwht"))?;
                    self.nums[i + h] = a.checked_sub(b).ok_or(Error::Overflow("fwht"))?;
                }
            }
            h *= 2;
        }
        Ok(())
    }

    fn combine(&self, other: &Self, sign: i128) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::BadInput("dimension mismatch".into()));
        }
        let exp = self.exp.max(other.exp);
        let (sa, sb) = (exp - self.exp, exp - other.exp);
        let nums = self
            .nums
            .iter()
            .zip(&other.nums)
            .map(|(&a, &b)| {
                let a = shl(a, sa)?;
                let b = shl(b, sb)?.checked_mul(sign)?;
                a.checked_add(b)
            })
            .collect::<Option<Vec<_>>>()
            .ok_or(Error::Overflow("table add"))?;
        Self::from_parts(self.dim, nums, exp)
    }

    fn abs_sum(&self) -> Result<i128> {
        self.nums
            .iter()
            .try_fold(0i128, |acc, &v| {
                v.checked_abs().and_then(|a| acc.checked_add(a))
            })
            .ok_or(Error::Overflow("absolute sum"))
    }

    fn square_sum(&self) -> Result<i128> {
        self.nums
            .iter()
            .try_fold(0i128, |acc, &v| {
                v.checked_mul(v).and_then(|s| acc.checked_add(s))
            })
            .ok_or(Error::Overflow("square sum"))
    }
}

fn shl(v: i128, k: u32) -> Option<i128> {
    if v == 0 {
        Some(0)
    } else if k >= 127 {
        None
    } else {
        v.checked_mul(1i128 << k)
    }
}

macro_rules! table_api {
    ($ty:ident) => {
        impl $ty {
            pub fn from_values(dim: GroupDim, values: &[DyadicScalar]) -> Result<Self> {
                Ok($ty(SharedExpTable::from_values(dim, values)?))
            }

            /// Values `nums[i] / 2^exp`.
            pub fn from_nums(dim: GroupDim, nums: Vec<i128>, exp: u32) -> Result<Self> {
                Ok($ty(SharedExpTable::from_parts(dim, nums, exp)?))
            }

            pub fn zeros(dim: GroupDim) -> Self {
                $ty(SharedExpTable {
                    dim,
                    nums: vec![0; dim.order()],
                    exp: 0,
                })
            }

            pub fn dim(&self) -> GroupDim {
                self.0.dim
            }

            pub fn len(&self) -> usize {
                self.0.nums.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.nums.is_empty()
            }

            pub fn get(&self, i: u32) -> DyadicScalar {
                self.0.get(i as usize)
            }

            pub fn values(&self) -> impl Iterator<Item = DyadicScalar> + '_ {
                (0..self.0.nums.len()).map(move |i| self.0.get(i))
            }

            /// Raw numerators over the shared denominator `2^shared_exp()`.
            pub fn nums(&self) -> &[i128] {
                &self.0.nums
            }

            pub fn shared_exp(&self) -> u32 {
                self.0.exp
            }

            pub fn checked_add(&self, other: &Self) -> Result<Self> {
                Ok($ty(self.0.combine(&other.0, 1)?))
            }

            pub fn checked_sub(&self, other: &Self) -> Result<Self> {
                Ok($ty(self.0.combine(&other.0, -1)?))
            }

            pub fn to_f64(&self) -> Vec<f64> {
                self.values().map(|v| v.to_f64()).collect()
            }
        }
    };
}

/// A function on F₂ⁿ indexed by point mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionTable(SharedExpTable);

/// A function on the dual group indexed by character mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spectrum(SharedExpTable);

table_api!(FunctionTable);
table_api!(Spectrum);

impl FunctionTable {
    pub fn constant(dim: GroupDim, c: DyadicScalar) -> Self {
        FunctionTable(SharedExpTable {
            dim,
            nums: vec![c.num(); dim.order()],
            exp: c.exp(),
        })
    }

    /// 0/1 table from a membership predicate.
    pub fn indicator_from(dim: GroupDim, member: impl Fn(u32) -> bool) -> Self {
        FunctionTable(SharedExpTable {
            dim,
            nums: dim.masks().map(|x| member(x) as i128).collect(),
            exp: 0,
        })
    }

    /// Pointwise product.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::BadInput("dimension mismatch".into()));
        }
        let nums = self
            .0
            .nums
            .iter()
            .zip(&other.0.nums)
            .map(|(&a, &b)| a.checked_mul(b))
            .collect::<Option<Vec<_>>>()
            .ok_or(Error::Overflow("pointwise product"))?;
        let exp = self
            .0
            .exp
            .checked_add(other.0.exp)
            .ok_or(Error::Overflow("pointwise product"))?;
        FunctionTable::from_nums(self.dim(), nums, exp)
    }

    /// `2^-n Σ_x f(x)`.
    pub fn mean(&self) -> Result<DyadicScalar> {
        let s = self
            .0
            .nums
            .iter()
            .try_fold(0i128, |a, &b| a.checked_add(b))
            .ok_or(Error::Overflow("mean"))?;
        Ok(DyadicScalar::new(s, self.0.exp + self.dim().n()))
    }
}

/// Forward transform `f̂(γ) = 2^-n Σ_x f(x)(-1)^⟨γ,x⟩`.
pub fn fwht(f: &FunctionTable) -> Result<Spectrum> {
    let mut t = f.0.clone();
    t.butterfly()?;
    t.exp = t
        .exp
        .checked_add(t.dim.n())
        .ok_or(Error::Overflow("fwht exponent"))?;
    t.normalize();
    Ok(Spectrum(t))
}

/// Inverse transform `f(x) = Σ_γ f̂(γ)(-1)^⟨γ,x⟩`.
pub fn inverse_fwht(s: &Spectrum) -> Result<FunctionTable> {
    let mut t = s.0.clone();
    t.butterfly()?;
    t.normalize();
    Ok(FunctionTable(t))
}

/// `‖f‖_{A(G)} = Σ_γ |f̂(γ)|`.
pub fn a_norm(s: &Spectrum) -> Result<DyadicScalar> {
    Ok(DyadicScalar::new(s.0.abs_sum()?, s.0.exp))
}

/// `max_γ |f̂(γ)|`.
pub fn sup_norm(s: &Spectrum) -> DyadicScalar {
    let m = s.0.nums.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
    DyadicScalar::new(m as i128, s.0.exp)
}

/// `Σ_γ f̂(γ)²`.
pub fn spectral_energy(s: &Spectrum) -> Result<DyadicScalar> {
    Ok(DyadicScalar::new(s.0.square_sum()?, 2 * s.0.exp))
}

/// Exact `‖f‖₁`.
pub fn l1_norm(f: &FunctionTable) -> Result<DyadicScalar> {
    Ok(DyadicScalar::new(f.0.abs_sum()?, f.0.exp + f.dim().n()))
}

/// Exact `‖f‖₂²`.
pub fn l2_norm_sq(f: &FunctionTable) -> Result<DyadicScalar> {
    Ok(DyadicScalar::new(
        f.0.square_sum()?,
        2 * f.0.exp + f.dim().n(),
    ))
}

/// Exact `⟨f, g⟩ = 2^-n Σ_x f(x) g(x)` (real-valued functions).
pub fn inner(f: &FunctionTable, g: &FunctionTable) -> Result<DyadicScalar> {
    if f.dim() != g.dim() {
        return Err(Error::BadInput("dimension mismatch".into()));
    }
    let s =
        f.0.nums
            .iter()
            .zip(&g.0.nums)
            .try_fold(0i128, |acc, (&a, &b)| {
                a.checked_mul(b).and_then(|p| acc.checked_add(p))
            })
            .ok_or(Error::Overflow("inner product"))?;
    Ok(DyadicScalar::new(s, f.0.exp + g.0.exp + f.dim().n()))
}

/// Floating `‖f‖_p` for `p >= 1`.
pub fn lp_norm(f: &FunctionTable, p: f64) -> f64 {
    assert!(p >= 1.0, "lp_norm needs p >= 1, got {p}");
    let scale = 2f64.powi(-(f.0.exp as i32));
    let len = f.len() as f64;
    let s: f64 =
        f.0.nums
            .iter()
            .map(|&v| (v.unsigned_abs() as f64 * scale).powf(p))
            .sum();
    (s / len).powf(1.0 / p)
}
