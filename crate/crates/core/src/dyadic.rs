//! Exact dyadic rationals `num / 2^exp`.
//!
//! Every function value, Fourier coefficient and norm handled by this crate
//! is a dyadic rational, so all comparisons below are exact. Arithmetic that
//! leaves the `i128` numerator range is reported, never wrapped.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `num / 2^exp` in canonical form: `num` odd, or `num == 0 && exp == 0`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawDyadic", into = "RawDyadic")]
pub struct DyadicScalar {
    num: i128,
    exp: u32,
}

#[derive(Serialize, Deserialize)]
struct RawDyadic {
    num: i128,
    exp: u32,
}

impl TryFrom<RawDyadic> for DyadicScalar {
    type Error = Error;

    fn try_from(raw: RawDyadic) -> Result<Self> {
        if raw.exp > 1024 {
            return Err(Error::BadInput(format!(
                "dyadic exponent {} too large",
                raw.exp
            )));
        }
        Ok(DyadicScalar::new(raw.num, raw.exp))
    }
}

impl From<DyadicScalar> for RawDyadic {
    fn from(d: DyadicScalar) -> Self {
        RawDyadic {
            num: d.num,
            exp: d.exp,
        }
    }
}

impl DyadicScalar {
    pub const ZERO: DyadicScalar = DyadicScalar { num: 0, exp: 0 };
    pub const ONE: DyadicScalar = DyadicScalar { num: 1, exp: 0 };

    pub fn new(num: i128, exp: u32) -> Self {
        if num == 0 {
            return Self::ZERO;
        }
        let tz = num.trailing_zeros().min(exp);
        DyadicScalar {
            num: num >> tz,
            exp: exp - tz,
        }
    }

    pub fn from_int(v: i128) -> Self {
        Self::new(v, 0)
    }

    /// `2^-k`.
    pub fn pow2_inv(k: u32) -> Self {
        DyadicScalar { num: 1, exp: k }
    }

    pub fn num(&self) -> i128 {
        self.num
    }

    pub fn exp(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_negative(&self) -> bool {
        self.num < 0
    }

    pub fn is_integer(&self) -> bool {
        self.exp == 0
    }

    pub fn abs(&self) -> Self {
        DyadicScalar {
            num: self.num.abs(),
            exp: self.exp,
        }
    }

    pub fn signum(&self) -> i32 {
        self.num.signum() as i32
    }

    /// Numerator rescaled to exponent `target >= self.exp`.
    fn num_at(&self, target: u32) -> Option<i128> {
        debug_assert!(target >= self.exp);
        shl_checked(self.num, target - self.exp)
    }

    pub fn checked_add(self, rhs: Self) -> Option<Self> {
        let e = self.exp.max(rhs.exp);
        let a = self.num_at(e)?;
        let b = rhs.num_at(e)?;
        Some(Self::new(a.checked_add(b)?, e))
    }

    pub fn checked_sub(self, rhs: Self) -> Option<Self> {
        self.checked_add(rhs.checked_neg()?)
    }

    pub fn checked_neg(self) -> Option<Self> {
        Some(DyadicScalar {
            num: self.num.checked_neg()?,
            exp: self.exp,
        })
    }

    pub fn checked_mul(self, rhs: Self) -> Option<Self> {
        let num = self.num.checked_mul(rhs.num)?;
        let exp = self.exp.checked_add(rhs.exp)?;
        Some(Self::new(num, exp))
    }

    pub fn checked_mul_int(self, k: i128) -> Option<Self> {
        Some(Self::new(self.num.checked_mul(k)?, self.exp))
    }

    /// Multiply by `2^k` (k may be negative).
    pub fn mul_pow2(self, k: i32) -> Option<Self> {
        if self.num == 0 {
            return Some(self);
        }
        if k >= 0 {
            let k = k as u32;
            if k <= self.exp {
                Some(DyadicScalar {
                    num: self.num,
                    exp: self.exp - k,
                })
            } else {
                Some(Self::new(shl_checked(self.num, k - self.exp)?, 0))
            }
        } else {
            let exp = self.exp.checked_add(k.unsigned_abs())?;
            Some(DyadicScalar { num: self.num, exp })
        }
    }

    /// Largest integer `<= self`.
    pub fn floor(&self) -> i128 {
        if self.exp >= 127 {
            return if self.num < 0 { -1 } else { 0 };
        }
        self.num >> self.exp
    }

    /// Fractional part `self - floor(self)`, always in `[0, 1)`.
    pub fn frac(&self) -> Self {
        if self.exp == 0 {
            return Self::ZERO;
        }
        if self.exp >= 127 {
            // |num| < 2^127 <= 2^exp, so the value lies in (-1, 1).
            return if self.num >= 0 {
                *self
            } else {
                Self::ONE - self.abs()
            };
        }
        let mask = (1i128 << self.exp) - 1;
        Self::new(self.num & mask, self.exp)
    }

    pub fn to_f64(&self) -> f64 {
        let mut v = self.num as f64;
        let mut e = self.exp;
        while e > 1000 {
            v *= 2f64.powi(-1000);
            e -= 1000;
        }
        v * 2f64.powi(-(e as i32))
    }

    pub fn to_bigint_pair(&self) -> (BigInt, u32) {
        (BigInt::from(self.num), self.exp)
    }

    /// `p/q` with `q = 2^exp`, or a bare integer.
    pub fn to_fraction_string(&self) -> String {
        if self.exp == 0 {
            self.num.to_string()
        } else {
            format!("{}/{}", self.num, BigInt::from(1) << self.exp)
        }
    }

    /// Parses `NUM/2^EXP`, `P/Q` with `Q` a power of two, or an integer.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::BadInput(format!("cannot parse dyadic '{s}'"));
        match s.split_once('/') {
            None => Ok(Self::from_int(s.parse::<i128>().map_err(|_| bad())?)),
            Some((n, d)) => {
                let num = n.trim().parse::<i128>().map_err(|_| bad())?;
                let d = d.trim();
                let exp = if let Some(e) = d.strip_prefix("2^") {
                    e.parse::<u32>().map_err(|_| bad())?
                } else {
                    let q = d.parse::<u128>().map_err(|_| bad())?;
                    if q == 0 || !q.is_power_of_two() {
                        return Err(Error::BadInput(format!(
                            "denominator of '{s}' is not a power of two"
                        )));
                    }
                    q.trailing_zeros()
                };
                if exp > 1024 {
                    return Err(bad());
                }
                Ok(Self::new(num, exp))
            }
        }
    }
}

fn shl_checked(v: i128, k: u32) -> Option<i128> {
    if v == 0 {
        return Some(0);
    }
    if k >= 127 {
        return None;
    }
    let r = v.checked_mul(1i128 << k)?;
    Some(r)
}

impl Ord for DyadicScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.num.signum().cmp(&other.num.signum()) {
            Ordering::Equal => {}
            o => return o,
        }
        let e = self.exp.max(other.exp);
        match (self.num_at(e), other.num_at(e)) {
            (Some(a), Some(b)) => a.cmp(&b),
            _ => {
                let a = BigInt::from(self.num) << (e - self.exp);
                let b = BigInt::from(other.num) << (e - other.exp);
                a.cmp(&b)
            }
        }
    }
}

impl PartialOrd for DyadicScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Default for DyadicScalar {
    fn default() -> Self {
        Self::ZERO
    }
}

// Operator forms panic on overflow, matching integer overflow semantics.
// Table-sized accumulations use the checked forms and surface `Error::Overflow`.
impl Add for DyadicScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(rhs).expect("dyadic overflow in add")
    }
}

impl Sub for DyadicScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(rhs).expect("dyadic overflow in sub")
    }
}

impl Mul for DyadicScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(rhs).expect("dyadic overflow in mul")
    }
}

impl Neg for DyadicScalar {
    type Output = Self;
    fn neg(self) -> Self {
        self.checked_neg().expect("dyadic overflow in neg")
    }
}

impl std::iter::Sum for DyadicScalar {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for DyadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.num, self.exp)
    }
}

impl fmt::Debug for DyadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_fraction_string())
    }
}

/// Checked sum that reports overflow as an error.
pub fn try_sum<I: IntoIterator<Item = DyadicScalar>>(
    iter: I,
    ctx: &'static str,
) -> Result<DyadicScalar> {
    iter.into_iter().try_fold(DyadicScalar::ZERO, |a, b| {
        a.checked_add(b).ok_or(Error::Overflow(ctx))
    })
}
