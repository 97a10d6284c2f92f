//! Level-set decomposition of a residual spectrum, level selection
//! strategies, constructive Chang spans, Riesz products and Beckner checks.

use std::collections::BTreeMap;
use std::f64::consts::E;

use num_bigint::BigInt;

use crate::dyadic::{try_sum, DyadicScalar};
use crate::error::{Error, Result};
use crate::fourier::{fwht, inverse_fwht, l1_norm, l2_norm_sq, lp_norm, FunctionTable, Spectrum};
use crate::group::{char_value, is_independent, CharMask, DualSubspace, GroupDim};
use crate::registry::{Named, Registry};

/// `Γ_s = {γ : 2^-s·base >= |f̂_V(γ)| > 2^-(s+1)·base}` with `L_s = Σ_{Γ_s} |χ̂_A|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSet {
    pub s: u32,
    pub members: Vec<CharMask>,
    pub mass: DyadicScalar,
}

impl LevelSet {
    /// Whether `L_s >= (1/6)(4/3)^s`.
    pub fn qualifies(&self) -> bool {
        meets_level_threshold(self.s, self.mass)
    }
}

/// Exact test of `mass >= (1/6)(4/3)^s`, i.e. `6·3^s·mass >= 4^s`.
pub fn meets_level_threshold(s: u32, mass: DyadicScalar) -> bool {
    if mass.is_negative() || mass.is_zero() {
        return false;
    }
    let lhs = BigInt::from(6) * BigInt::from(3).pow(s) * BigInt::from(mass.num());
    let rhs = BigInt::from(1) << (2 * s as u64 + mass.exp() as u64);
    lhs >= rhs
}

/// `(1/6)(4/3)^s` as a float, for reporting.
pub fn level_threshold(s: u32) -> f64 {
    (4.0f64 / 3.0).powi(s as i32) / 6.0
}

/// Dyadic band index of `value` relative to `base`: the `s` with
/// `2^-s·base >= value > 2^-(s+1)·base`.
fn band(value: DyadicScalar, base: DyadicScalar) -> Result<u32> {
    if value > base {
        return Err(Error::InvariantViolation(format!(
            "|f̂_V| = {value:?} exceeds ‖f_V‖₁ = {base:?}"
        )));
    }
    let mut s = 0u32;
    loop {
        let scaled = value
            .mul_pow2(s as i32 + 1)
            .ok_or(Error::Overflow("level band"))?;
        if scaled > base {
            return Ok(s);
        }
        s += 1;
    }
}

/// Partitions the support of `fv_hat` into dyadic level sets, each carrying
/// its `χ̂_A` mass. Empty levels are omitted; output is sorted by `s`.
pub fn level_sets(
    fv_hat: &Spectrum,
    chi_hat: &Spectrum,
    base: DyadicScalar,
) -> Result<Vec<LevelSet>> {
    if base.is_zero() {
        return Err(Error::ZeroMass);
    }
    if fv_hat.dim() != chi_hat.dim() {
        return Err(Error::BadInput("dimension mismatch".into()));
    }
    let mut buckets: BTreeMap<u32, Vec<CharMask>> = BTreeMap::new();
    for g in fv_hat.dim().masks() {
        let v = fv_hat.get(g);
        if v.is_zero() {
            continue;
        }
        buckets.entry(band(v.abs(), base)?).or_default().push(g);
    }
    buckets
        .into_iter()
        .map(|(s, members)| {
            let mass = try_sum(members.iter().map(|&g| chi_hat.get(g).abs()), "level mass")?;
            Ok(LevelSet { s, members, mass })
        })
        .collect()
}

/// Chooses which qualifying level feeds the next iteration step.
pub trait LevelSelector: Named + Send + Sync {
    fn select<'a>(&self, levels: &'a [LevelSet], current: &DualSubspace) -> Option<&'a LevelSet>;
}

/// The smallest `s` with `L_s >= (1/6)(4/3)^s`.
pub struct SmallestS;

impl Named for SmallestS {
    fn name(&self) -> &'static str {
        "smallest-s"
    }
}

impl LevelSelector for SmallestS {
    fn select<'a>(&self, levels: &'a [LevelSet], _current: &DualSubspace) -> Option<&'a LevelSet> {
        levels.iter().filter(|l| l.qualifies()).min_by_key(|l| l.s)
    }
}

/// The qualifying level maximizing `L_s / (dim(V + span Γ_s) − dim V)`;
/// ties go to the smaller `s`.
pub struct BestRatio;

impl Named for BestRatio {
    fn name(&self) -> &'static str {
        "best-ratio"
    }
}

impl LevelSelector for BestRatio {
    fn select<'a>(&self, levels: &'a [LevelSet], current: &DualSubspace) -> Option<&'a LevelSet> {
        let mut best: Option<(&LevelSet, u32)> = None;
        for l in levels.iter().filter(|l| l.qualifies()) {
            let grown = current.join(&DualSubspace::span(l.members.iter().copied()));
            let inc = (grown.dim() - current.dim()).max(1);
            best = match best {
                None => Some((l, inc)),
                Some((b, binc)) => {
                    let lhs = l.mass.checked_mul_int(binc as i128);
                    let rhs = b.mass.checked_mul_int(inc as i128);
                    match (lhs, rhs) {
                        (Some(x), Some(y)) if x > y => Some((l, inc)),
                        _ => Some((b, binc)),
                    }
                }
            };
        }
        best.map(|(l, _)| l)
    }
}

pub fn level_selectors() -> Registry<dyn LevelSelector> {
    Registry::new("level strategy")
        .with(Box::new(SmallestS) as Box<dyn LevelSelector>)
        .with(Box::new(BestRatio) as Box<dyn LevelSelector>)
}

/// Applies `strategy`; failing to find a qualifying level means the exact
/// arithmetic upstream is broken, since one always exists.
pub fn select_level<'a>(
    levels: &'a [LevelSet],
    strategy: &dyn LevelSelector,
    current: &DualSubspace,
) -> Result<&'a LevelSet> {
    let picked = strategy
        .select(levels, current)
        .ok_or(Error::NoQualifyingLevel)?;
    if !picked.qualifies() {
        return Err(Error::InvariantViolation(format!(
            "strategy {} picked non-qualifying level s={}",
            strategy.name(),
            picked.s
        )));
    }
    Ok(picked)
}

/// `Σ_s 2^-s L_s`, which is at least 1/2 for any valid decomposition.
pub fn averaging_sum(levels: &[LevelSet]) -> Result<DyadicScalar> {
    try_sum(
        levels
            .iter()
            .map(|l| l.mass.mul_pow2(-(l.s as i32)).expect("shift right")),
        "averaging sum",
    )
}

/// The span of a large spectrum together with Chang's dimension ceiling.
#[derive(Debug, Clone)]
pub struct ChangSpan {
    pub w: DualSubspace,
    pub large: Vec<CharMask>,
    pub bound_dim: f64,
    /// The same ceiling with the log term read as `ln(‖f‖₂^-2‖f‖₁^-2)`.
    pub bound_dim_alt: f64,
}

impl ChangSpan {
    /// Whether `dim W` respects the ceiling (vacuous for an empty large spectrum).
    pub fn within_bound(&self) -> bool {
        self.large.is_empty() || self.w.dim() as f64 <= self.bound_dim
    }
}

struct NormPair {
    l1: DyadicScalar,
    l2_sq: DyadicScalar,
}

fn norms(f: &FunctionTable) -> Result<NormPair> {
    Ok(NormPair {
        l1: l1_norm(f)?,
        l2_sq: l2_norm_sq(f)?,
    })
}

fn log_ratio(p: &NormPair) -> f64 {
    // ln(‖f‖₂² / ‖f‖₁²)
    p.l2_sq.to_f64().ln() - 2.0 * p.l1.to_f64().ln()
}

fn log_ratio_alt(p: &NormPair) -> f64 {
    // ln(‖f‖₂^-2 ‖f‖₁^-2)
    -(p.l2_sq.to_f64().ln() + 2.0 * p.l1.to_f64().ln())
}

/// `e·ε⁻²·max{ln(‖f‖₂²/‖f‖₁²), 1}`.
pub fn chang_cardinality_bound(f: &FunctionTable, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::BadInput(format!("ε = {eps} outside (0, 1]")));
    }
    let p = norms(f)?;
    if p.l1.is_zero() {
        return Err(Error::BadInput("f vanishes identically".into()));
    }
    Ok(E * eps.powi(-2) * log_ratio(&p).max(1.0))
}

/// `W = span{γ : |f̂(γ)| >= threshold}` and the ceiling on `dim W` at
/// `ε = threshold / ‖f‖₁`.
pub fn chang_span(spec: &Spectrum, threshold: DyadicScalar) -> Result<ChangSpan> {
    if threshold.is_negative() || threshold.is_zero() {
        return Err(Error::BadInput("threshold must be positive".into()));
    }
    let large: Vec<CharMask> = spec
        .dim()
        .masks()
        .filter(|&g| spec.get(g).abs() >= threshold)
        .collect();
    let w = DualSubspace::span(large.iter().copied());
    let f = inverse_fwht(spec)?;
    let p = norms(&f)?;
    if p.l1.is_zero() {
        return Ok(ChangSpan {
            w,
            large,
            bound_dim: 0.0,
            bound_dim_alt: 0.0,
        });
    }
    let eps = threshold.to_f64() / p.l1.to_f64();
    Ok(ChangSpan {
        w,
        large,
        bound_dim: E * eps.powi(-2) * log_ratio(&p).max(1.0),
        bound_dim_alt: E * eps.powi(-2) * log_ratio_alt(&p).max(1.0),
    })
}

/// `p_η = Π_{λ∈Λ} (1 + ηλ)` over a linearly independent `Λ`.
#[derive(Debug, Clone)]
pub struct RieszProduct {
    pub table: FunctionTable,
    pub lambda: Vec<CharMask>,
    pub eta: DyadicScalar,
}

fn check_lambda(dim: GroupDim, lambda: &[CharMask]) -> Result<()> {
    if lambda.iter().any(|&l| l >> dim.n() != 0) {
        return Err(Error::BadInput("character outside the dual group".into()));
    }
    if !is_independent(lambda) {
        return Err(Error::DependentSet);
    }
    Ok(())
}

pub fn riesz_product(
    dim: GroupDim,
    lambda: &[CharMask],
    eta: DyadicScalar,
) -> Result<RieszProduct> {
    if eta.abs() > DyadicScalar::ONE {
        return Err(Error::BadInput(format!("|η| = {:?} exceeds 1", eta.abs())));
    }
    check_lambda(dim, lambda)?;
    let values = dim
        .masks()
        .map(|x| {
            lambda.iter().try_fold(DyadicScalar::ONE, |acc, &l| {
                let factor = DyadicScalar::ONE
                    .checked_add(eta.checked_mul_int(char_value(l, x) as i128)?)?;
                acc.checked_mul(factor)
            })
        })
        .collect::<Option<Vec<_>>>()
        .ok_or(Error::Overflow("riesz product"))?;
    Ok(RieszProduct {
        table: FunctionTable::from_values(dim, &values)?,
        lambda: lambda.to_vec(),
        eta,
    })
}

/// `(‖f ∗ p_η‖₂, ‖f‖_{1+η²})`; Beckner's inequality says the first is at most
/// the second.
///
/// The convolution is evaluated on the Fourier side:
/// `(f ∗ p_η)^(γ_S) = η^{|S|} f̂(γ_S)` for `γ_S = Σ_{λ∈S} λ`, zero elsewhere.
pub fn beckner_verify(f: &FunctionTable, lambda: &[CharMask], eta: f64) -> Result<(f64, f64)> {
    if !(-1.0..=1.0).contains(&eta) {
        return Err(Error::BadInput(format!("η = {eta} outside [-1, 1]")));
    }
    check_lambda(f.dim(), lambda)?;
    let fh = fwht(f)?;
    let mut energy = 0.0f64;
    let subsets = 1usize << lambda.len();
    for s in 0..subsets {
        let mut g = 0u32;
        for (i, &l) in lambda.iter().enumerate() {
            if s >> i & 1 == 1 {
                g ^= l;
            }
        }
        let c = fh.get(g).to_f64() * eta.powi(s.count_ones() as i32);
        energy += c * c;
    }
    Ok((energy.sqrt(), lp_norm(f, 1.0 + eta * eta)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::a_norm;
    use crate::sets::{residual, residual_l1, PointSet};

    fn dim(n: u32) -> GroupDim {
        GroupDim::new(n).unwrap()
    }

    fn d(s: &str) -> DyadicScalar {
        DyadicScalar::parse(s).unwrap()
    }

    fn levels_for(a: &PointSet, v: &DualSubspace) -> Vec<LevelSet> {
        let fv = residual(a, v).unwrap();
        let base = residual_l1(&fv).unwrap();
        let fvh = fwht(&fv.table).unwrap();
        let chi = fwht(&a.indicator()).unwrap();
        level_sets(&fvh, &chi, base).unwrap()
    }

    #[test]
    fn threshold_is_exact() {
        assert!(meets_level_threshold(0, d("11/64")));
        assert!(!meets_level_threshold(0, d("21/128")));
        assert!(!meets_level_threshold(0, d("1/8")));
        // (1/6)(4/3)^2 = 8/27 ≈ 0.2963.
        assert!(meets_level_threshold(2, d("19/64")));
        assert!(!meets_level_threshold(2, d("37/128")));
    }

    #[test]
    fn single_coefficient_lands_in_level_zero() {
        let f = Spectrum::from_values(dim(1), &[DyadicScalar::ZERO, d("1/2")]).unwrap();
        let levels = level_sets(&f, &f, d("1/2")).unwrap();
        assert_eq!(levels.len(), 1);
        assert_eq!((levels[0].s, &levels[0].members[..]), (0, &[1][..]));
    }

    #[test]
    fn halfspace_levels() {
        let a = PointSet::from_points(dim(1), &[0]).unwrap();
        let levels = levels_for(&a, &DualSubspace::trivial());
        assert_eq!(levels.len(), 1);
        assert_eq!(levels[0].s, 0);
        assert_eq!(levels[0].members, vec![1]);
        assert_eq!(levels[0].mass, d("1/2"));
        let picked = select_level(&levels, &SmallestS, &DualSubspace::trivial()).unwrap();
        assert_eq!(picked.s, 0);
    }

    #[test]
    fn coset_levels() {
        // A = Λ⊥ with Λ = span{e0, e1} in F_2^4.
        let lambda = DualSubspace::span([1, 2]);
        let perp = lambda.annihilator(4);
        let a = PointSet::from_predicate(dim(4), |x| perp.contains(x));
        let levels = levels_for(&a, &DualSubspace::trivial());
        assert_eq!(levels.len(), 1);
        assert_eq!(levels[0].s, 0);
        let mut m = levels[0].members.clone();
        m.sort();
        assert_eq!(m, vec![1, 2, 3]);
        assert_eq!(levels[0].mass, d("3/4"));
        assert!(levels[0].qualifies());
    }

    #[test]
    fn zero_base_rejected() {
        let f = Spectrum::zeros(dim(2));
        assert_eq!(level_sets(&f, &f, DyadicScalar::ZERO), Err(Error::ZeroMass));
    }

    #[test]
    fn no_qualifying_level_is_an_error() {
        let levels = vec![LevelSet {
            s: 0,
            members: vec![1],
            mass: d("1/8"),
        }];
        assert_eq!(
            select_level(&levels, &SmallestS, &DualSubspace::trivial()).unwrap_err(),
            Error::NoQualifyingLevel
        );
    }

    #[test]
    fn best_ratio_prefers_cheap_mass() {
        let levels = vec![
            LevelSet {
                s: 0,
                members: vec![1, 2, 4],
                mass: d("1/2"),
            },
            LevelSet {
                s: 1,
                members: vec![8],
                mass: d("1/2"),
            },
        ];
        let v = DualSubspace::trivial();
        assert_eq!(select_level(&levels, &SmallestS, &v).unwrap().s, 0);
        assert_eq!(select_level(&levels, &BestRatio, &v).unwrap().s, 1);
    }

    #[test]
    fn chang_span_examples() {
        // Empty large spectrum.
        let f = FunctionTable::indicator_from(dim(3), |x| x == 0);
        let s = fwht(&f).unwrap();
        let span = chang_span(&s, DyadicScalar::ONE).unwrap();
        assert_eq!(span.w.dim(), 0);
        assert!(span.within_bound());

        // Coset of V⊥ with dim V = 2, ε = 1.
        let v = DualSubspace::span([0b011, 0b100]);
        let perp = v.annihilator(3);
        let chi = FunctionTable::indicator_from(dim(3), |x| perp.contains(x));
        let s = fwht(&chi).unwrap();
        let span = chang_span(&s, d("1/4")).unwrap();
        assert_eq!(span.w, v);
        assert!((span.bound_dim - E * 4f64.ln()).abs() < 1e-12);
        assert!(span.within_bound());

        // Balanced halfspace, ε = 1/2.
        let bal = FunctionTable::from_values(dim(1), &[d("1/2"), d("-1/2")]).unwrap();
        let span = chang_span(&fwht(&bal).unwrap(), d("1/4")).unwrap();
        assert_eq!(span.w.basis(), &[1]);
    }

    #[test]
    fn cardinality_bound_examples() {
        let c = FunctionTable::constant(dim(2), d("1/2"));
        assert!((chang_cardinality_bound(&c, 1.0).unwrap() - E).abs() < 1e-12);
        let perp = DualSubspace::span([1, 2]).annihilator(3);
        let chi = FunctionTable::indicator_from(dim(3), |x| perp.contains(x));
        let b1 = chang_cardinality_bound(&chi, 1.0).unwrap();
        assert!((b1 - E * 4f64.ln()).abs() < 1e-12);
        assert!(b1 >= 2.0);
        let b2 = chang_cardinality_bound(&chi, 0.5).unwrap();
        assert!((b2 - 4.0 * b1).abs() < 1e-9);
        assert!(chang_cardinality_bound(&chi, 0.0).is_err());
    }

    #[test]
    fn riesz_examples() {
        let p0 = riesz_product(dim(2), &[1, 2], DyadicScalar::ZERO).unwrap();
        assert!(p0.table.values().all(|v| v == DyadicScalar::ONE));

        let p = riesz_product(dim(1), &[1], DyadicScalar::ONE).unwrap();
        assert_eq!(
            p.table.values().collect::<Vec<_>>(),
            vec![d("2"), DyadicScalar::ZERO]
        );
        let ph = fwht(&p.table).unwrap();
        assert_eq!(
            ph.values().collect::<Vec<_>>(),
            vec![DyadicScalar::ONE, DyadicScalar::ONE]
        );

        let q = riesz_product(dim(4), &[0b0011, 0b0101, 0b1000], d("3/4")).unwrap();
        assert_eq!(l1_norm(&q.table).unwrap(), DyadicScalar::ONE);
        assert_eq!(a_norm(&fwht(&q.table).unwrap()).unwrap(), d("343/64"));

        assert_eq!(
            riesz_product(dim(2), &[1, 2, 3], d("1/2")).unwrap_err(),
            Error::DependentSet
        );
    }

    #[test]
    fn beckner_examples() {
        let f = FunctionTable::from_values(dim(2), &[d("1"), d("-3/4"), d("1/2"), d("0")]).unwrap();
        let (lhs, rhs) = beckner_verify(&f, &[1, 2], 0.0).unwrap();
        assert!((lhs - f.mean().unwrap().abs().to_f64()).abs() < 1e-15);
        assert!(lhs <= rhs);
        let (lhs, rhs) = beckner_verify(&f, &[1, 2], 1.0).unwrap();
        assert!((rhs - lp_norm(&f, 2.0)).abs() < 1e-15);
        assert!(lhs <= rhs * (1.0 + 1e-9));

        let half = FunctionTable::indicator_from(dim(1), |x| x == 0);
        let (lhs, rhs) = beckner_verify(&half, &[1], 0.5).unwrap();
        assert!(lhs <= rhs);
        assert_eq!(
            beckner_verify(&half, &[1, 1], 0.5).unwrap_err(),
            Error::DependentSet
        );
    }
}
