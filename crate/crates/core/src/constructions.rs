//! Coset-union sets of prescribed dyadic density, the set attaining the
//! physical-space bound with equality, and the named density families.

use serde::Serialize;

use crate::dyadic::DyadicScalar;
use crate::error::{Error, Result};
use crate::group::{CharMask, DualSubspace, GroupDim, PointMask};
use crate::registry::{Named, Registry};
use crate::sets::PointSet;

/// `α = Σ 2^{-dᵢ}` for strictly increasing positive `dᵢ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DyadicDensity {
    exponents: Vec<u32>,
}

impl DyadicDensity {
    pub fn new(exponents: Vec<u32>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::InvalidDensity("no exponents".into()));
        }
        if exponents[0] == 0 {
            return Err(Error::InvalidDensity("exponents must be positive".into()));
        }
        if exponents.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidDensity(format!(
                "exponents {exponents:?} are not strictly increasing"
            )));
        }
        if *exponents.last().unwrap() > 120 {
            return Err(Error::InvalidDensity("exponent beyond 120".into()));
        }
        Ok(DyadicDensity { exponents })
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn terms(&self) -> usize {
        self.exponents.len()
    }

    pub fn value(&self) -> DyadicScalar {
        self.exponents
            .iter()
            .map(|&d| DyadicScalar::pow2_inv(d))
            .sum()
    }
}

/// A named family of dyadic densities indexed by `k >= 1`.
pub trait DensityFamily: Named + Send + Sync {
    fn exponents(&self, k: u32) -> Vec<u32>;

    /// Largest subspace order the family's density hypothesis is claimed for.
    fn hypothesis_order(&self, k: u32) -> u64;
}

/// `1/4 + 1/16 + … + 1/4^k`.
pub struct Geometric4;

impl Named for Geometric4 {
    fn name(&self) -> &'static str {
        "geometric4"
    }
}

impl DensityFamily for Geometric4 {
    fn exponents(&self, k: u32) -> Vec<u32> {
        (1..=k).map(|i| 2 * i).collect()
    }

    fn hypothesis_order(&self, k: u32) -> u64 {
        4u64.pow(k) - 1
    }
}

/// `1/2^{2^0} + 1/2^{2^1} + … + 1/2^{2^{k-1}}`.
pub struct DoubleExp;

impl Named for DoubleExp {
    fn name(&self) -> &'static str {
        "double_exp"
    }
}

impl DensityFamily for DoubleExp {
    fn exponents(&self, k: u32) -> Vec<u32> {
        (0..k).map(|m| 1u32 << m).collect()
    }

    fn hypothesis_order(&self, k: u32) -> u64 {
        1u64.checked_shl(1u32 << (k - 1))
            .map_or(u64::MAX, |v| v - 1)
    }
}

pub fn density_families() -> Registry<dyn DensityFamily> {
    Registry::new("density family")
        .with(Box::new(Geometric4) as Box<dyn DensityFamily>)
        .with(Box::new(DoubleExp) as Box<dyn DensityFamily>)
}

pub fn density_family(kind: &str, k: u32) -> Result<DyadicDensity> {
    if k == 0 {
        return Err(Error::InvalidDensity("k must be at least 1".into()));
    }
    if kind == "double_exp" && k > 7 {
        return Err(Error::InvalidDensity("double_exp supports k <= 7".into()));
    }
    let reg = density_families();
    DyadicDensity::new(reg.get(kind)?.exponents(k))
}

/// Certificate that a coset union has the claimed structure.
#[derive(Debug, Clone)]
pub struct CosetUnionWitness {
    pub exponents: Vec<u32>,
    /// `Λ₁ < … < Λ_k` with `dim Λᵢ = dᵢ`.
    pub lambdas: Vec<DualSubspace>,
    /// `γᵢ ∈ Λᵢ \ Λᵢ₋₁`.
    pub gammas: Vec<CharMask>,
    /// `x₁ … x_{k-1}` with `γⱼ(xᵢ) = -1` iff `i = j`.
    pub offsets: Vec<PointMask>,
    /// `Aᵢ = x₁ + … + x_{i-1} + Λᵢ⊥`.
    pub parts: Vec<PointSet>,
}

#[derive(Serialize)]
pub struct WitnessRecord {
    pub n: u32,
    pub exponents: Vec<u32>,
    pub lambdas: Vec<Vec<CharMask>>,
    pub gammas: Vec<CharMask>,
    pub offsets: Vec<PointMask>,
    pub parts_hexbits: Vec<String>,
}

impl CosetUnionWitness {
    pub fn to_record(&self, n: GroupDim) -> WitnessRecord {
        WitnessRecord {
            n: n.n(),
            exponents: self.exponents.clone(),
            lambdas: self.lambdas.iter().map(|l| l.basis().to_vec()).collect(),
            gammas: self.gammas.clone(),
            offsets: self.offsets.clone(),
            parts_hexbits: self.parts.iter().map(|p| p.to_hexbits()).collect(),
        }
    }

    /// Rechecks nesting, dimensions, the offset sign pattern and disjointness.
    pub fn validate(&self) -> Result<()> {
        let k = self.exponents.len();
        let bad = |m: String| Err(Error::InvariantViolation(m));
        if self.lambdas.len() != k || self.gammas.len() != k || self.parts.len() != k {
            return bad("witness lengths disagree".into());
        }
        if self.offsets.len() + 1 != k {
            return bad("expected k-1 offsets".into());
        }
        let mut prev = DualSubspace::trivial();
        for i in 0..k {
            let l = &self.lambdas[i];
            if l.dim() != self.exponents[i] || !prev.is_subspace_of(l) {
                return bad(format!("Λ_{} has wrong dimension or nesting", i + 1));
            }
            if !l.contains(self.gammas[i]) || prev.contains(self.gammas[i]) {
                return bad(format!("γ_{} not in Λ_i \\ Λ_(i-1)", i + 1));
            }
            prev = l.clone();
        }
        for (i, &x) in self.offsets.iter().enumerate() {
            for (j, &g) in self.gammas.iter().enumerate() {
                let odd = crate::group::pairing(g, x) == 1;
                if odd != (i == j) {
                    return bad(format!("γ_{}(x_{}) has the wrong sign", j + 1, i + 1));
                }
            }
        }
        for (i, p) in self.parts.iter().enumerate() {
            let expect = DyadicScalar::pow2_inv(self.exponents[i]);
            if p.density() != expect {
                return bad(format!("μ(A_{}) != 2^-{}", i + 1, self.exponents[i]));
            }
            for q in &self.parts[i + 1..] {
                if !p.is_disjoint(q) {
                    return bad("parts overlap".into());
                }
            }
        }
        Ok(())
    }
}

/// Disjoint union of cosets `A₁ ∪ … ∪ A_k` with `μ(Aᵢ) = 2^{-dᵢ}`.
///
/// Uses `Λᵢ = span(e_0 … e_{dᵢ-1})`, `γᵢ = e_{dᵢ-1}` and `xᵢ = e_{dᵢ-1}`.
pub fn build_coset_union(
    density: &DyadicDensity,
    n: GroupDim,
) -> Result<(PointSet, CosetUnionWitness)> {
    let exps = density.exponents();
    let last = *exps.last().unwrap();
    if last > n.n() {
        return Err(Error::ExponentOverflow {
            exponent: last,
            n: n.n(),
        });
    }
    let k = exps.len();
    let lambdas: Vec<_> = exps
        .iter()
        .map(|&d| DualSubspace::span((0..d).map(|b| 1u32 << b)))
        .collect();
    let gammas: Vec<_> = exps.iter().map(|&d| 1u32 << (d - 1)).collect();
    let offsets: Vec<_> = exps[..k - 1].iter().map(|&d| 1u32 << (d - 1)).collect();

    let mut parts = Vec::with_capacity(k);
    let mut shift = 0u32;
    for (i, lambda) in lambdas.iter().enumerate() {
        if i > 0 {
            shift ^= offsets[i - 1];
        }
        let perp = lambda.annihilator(n.n());
        let part = PointSet::from_predicate(n, |x| perp.contains(x ^ shift));
        parts.push(part);
    }
    let set = parts.iter().fold(PointSet::empty(n), |acc, p| acc.union(p));
    let witness = CosetUnionWitness {
        exponents: exps.to_vec(),
        lambdas,
        gammas,
        offsets,
        parts,
    };
    witness.validate()?;
    Ok((set, witness))
}

/// `⌊α|V|⌋` full `V⊥`-cosets plus the lexicographically smallest
/// `{α|V|}·|V⊥|` points of the next coset.
pub fn build_equality_case(alpha: DyadicScalar, v: &DualSubspace, n: GroupDim) -> Result<PointSet> {
    if alpha.is_negative() || alpha > DyadicScalar::ONE {
        return Err(Error::Resolution(format!("α = {alpha:?} outside [0, 1]")));
    }
    if v.dim() > n.n() || v.basis().iter().any(|&g| g >> n.n() != 0) {
        return Err(Error::BadInput("subspace does not fit F_2^n".into()));
    }
    if !alpha.mul_pow2(n.n() as i32).is_some_and(|s| s.is_integer()) {
        return Err(Error::Resolution(format!(
            "α = {alpha:?} is not a multiple of 2^-{}",
            n.n()
        )));
    }
    let scaled = alpha.mul_pow2(v.dim() as i32).expect("fits");
    let full = scaled.floor() as usize;
    let partial = scaled
        .frac()
        .mul_pow2((n.n() - v.dim()) as i32)
        .expect("fits");
    if !partial.is_integer() {
        return Err(Error::Resolution(format!(
            "{{α|V|}}·|V⊥| = {partial:?} is not an integer"
        )));
    }
    let mut remaining = partial.num() as usize;
    let mut set = PointSet::empty(n);
    for x in n.masks() {
        let c = v.coset_index(x);
        if c < full {
            set.insert(x);
        } else if c == full && remaining > 0 {
            set.insert(x);
            remaining -= 1;
        }
    }
    Ok(set)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProfileRow {
    pub d: u32,
    pub frac: DyadicScalar,
    pub product: DyadicScalar,
}

/// `{α2^d}` and `{α2^d}(1 − {α2^d})` for `d = 0..=max_dim`.
pub fn density_profile(alpha: DyadicScalar, max_dim: u32) -> Result<Vec<ProfileRow>> {
    if alpha.is_negative() || alpha > DyadicScalar::ONE {
        return Err(Error::BadInput(format!("α = {alpha:?} outside [0, 1]")));
    }
    (0..=max_dim)
        .map(|d| {
            let t = alpha
                .mul_pow2(d as i32)
                .ok_or(Error::Overflow("density_profile"))?
                .frac();
            Ok(ProfileRow {
                d,
                frac: t,
                product: t * (DyadicScalar::ONE - t),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{a_norm, fwht};
    use crate::sets::{physical_lower_bound, residual, residual_l1};

    fn dim(n: u32) -> GroupDim {
        GroupDim::new(n).unwrap()
    }

    fn d(s: &str) -> DyadicScalar {
        DyadicScalar::parse(s).unwrap()
    }

    fn norm(a: &PointSet) -> DyadicScalar {
        a_norm(&fwht(&a.indicator()).unwrap()).unwrap()
    }

    #[test]
    fn density_validation() {
        assert!(DyadicDensity::new(vec![]).is_err());
        assert!(DyadicDensity::new(vec![0, 2]).is_err());
        assert!(DyadicDensity::new(vec![2, 2]).is_err());
        assert_eq!(DyadicDensity::new(vec![2, 4]).unwrap().value(), d("5/16"));
    }

    #[test]
    fn family_examples() {
        let g = density_family("geometric4", 2).unwrap();
        assert_eq!((g.exponents(), g.value()), (&[2, 4][..], d("5/16")));
        let e = density_family("double_exp", 3).unwrap();
        assert_eq!((e.exponents(), e.value()), (&[1, 2, 4][..], d("13/16")));
        let one = density_family("geometric4", 1).unwrap();
        assert_eq!(one.value(), d("1/4"));
        assert!(density_family("nope", 1).is_err());
        assert!(density_family("geometric4", 0).is_err());
    }

    #[test]
    fn halfspace_union() {
        let (a, w) = build_coset_union(&DyadicDensity::new(vec![1]).unwrap(), dim(1)).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(norm(&a), DyadicScalar::ONE);
        assert!(w.offsets.is_empty());
    }

    #[test]
    fn two_term_union() {
        let dens = DyadicDensity::new(vec![2, 4]).unwrap();
        let (a, w) = build_coset_union(&dens, dim(4)).unwrap();
        assert_eq!(a.len(), 5);
        assert!(norm(&a) <= DyadicScalar::from_int(2));
        w.validate().unwrap();
    }

    #[test]
    fn union_exponent_overflow() {
        let dens = DyadicDensity::new(vec![2, 5]).unwrap();
        assert_eq!(
            build_coset_union(&dens, dim(4)).unwrap_err(),
            Error::ExponentOverflow { exponent: 5, n: 4 }
        );
    }

    #[test]
    fn equality_case_examples() {
        let v1 = DualSubspace::span([0b01]);
        let a = build_equality_case(d("1/2"), &v1, dim(2)).unwrap();
        assert_eq!(
            residual_l1(&residual(&a, &v1).unwrap()).unwrap(),
            DyadicScalar::ZERO
        );

        let v2 = DualSubspace::span([0b0001, 0b0010]);
        let a = build_equality_case(d("5/16"), &v2, dim(4)).unwrap();
        assert_eq!(a.len(), 5);
        let l1 = residual_l1(&residual(&a, &v2).unwrap()).unwrap();
        assert_eq!(l1, d("3/32"));
        assert_eq!(l1, physical_lower_bound(d("5/16"), 4).unwrap());

        let v3 = DualSubspace::span([0b001]);
        let a = build_equality_case(d("3/8"), &v3, dim(3)).unwrap();
        assert_eq!(residual_l1(&residual(&a, &v3).unwrap()).unwrap(), d("3/16"));
    }

    #[test]
    fn equality_case_resolution_error() {
        let v = DualSubspace::trivial();
        assert!(matches!(
            build_equality_case(d("1/8"), &v, dim(2)),
            Err(Error::Resolution(_))
        ));
    }

    #[test]
    fn profile_examples() {
        let rows = density_profile(d("5/16"), 3).unwrap();
        assert_eq!(rows[1].frac, d("5/8"));
        assert_eq!(rows[1].product, d("15/64"));
        assert!(rows[1].product * DyadicScalar::from_int(12) >= DyadicScalar::ONE);
        let half = density_profile(d("1/2"), 4).unwrap();
        assert!(half[1..].iter().all(|r| r.product.is_zero()));
    }
}
