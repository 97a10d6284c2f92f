//! The Fourier-space iteration: each step finds a level set of the residual
//! spectrum carrying enough `χ̂_A` mass, adds it to `V`, and records the
//! increase of `L = Σ_{γ∈V} |χ̂_A(γ)|`. The final `L` is a lower bound for
//! `‖χ_A‖_{A(G)}`.

use serde::{Deserialize, Serialize};

use crate::dyadic::{try_sum, DyadicScalar};
use crate::error::{Error, Result};
use crate::fourier::{fwht, l2_norm_sq, Spectrum};
use crate::group::{CharMask, DualSubspace};
use crate::sets::{residual, residual_l1, PointSet};
use crate::spectrum::{
    averaging_sum, chang_span, level_sets, meets_level_threshold, select_level, LevelSelector,
};

pub const DEFAULT_STEP_CAP: usize = 64;

#[derive(Debug, Clone)]
pub struct StepResult {
    pub s: u32,
    pub v_new: DualSubspace,
    /// `Σ_{V'} |χ̂_A| − Σ_V |χ̂_A|`.
    pub gain: DyadicScalar,
    pub level_mass: DyadicScalar,
    pub added: Vec<CharMask>,
    pub dim_before: u32,
    pub dim_after: u32,
    /// `e·4^{s+1}·max{ln(‖f_V‖₂²/‖f_V‖₁²), 1}`.
    pub chang_ceiling: f64,
    pub chang_ceiling_alt: f64,
    pub residual_l1: DyadicScalar,
    pub residual_l2_sq: DyadicScalar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    OrderCapReached,
    ResidualZero,
    StepCap,
}

#[derive(Debug, Clone)]
pub struct IterationTrace {
    pub max_order: u64,
    pub steps: Vec<StepResult>,
    /// `L_0, L_1, …` with `L_0 = α`.
    pub l_sequence: Vec<DyadicScalar>,
    pub final_bound: DyadicScalar,
    pub termination: Termination,
    pub final_subspace: DualSubspace,
}

impl IterationTrace {
    /// Empirical `c` in `L_K >= c·Σ s_l`; `None` when every step had `s = 0`.
    pub fn growth_constant(&self) -> Option<f64> {
        let total: u32 = self.steps.iter().map(|s| s.s).sum();
        (total > 0).then(|| self.final_bound.to_f64() / total as f64)
    }

    /// `final_bound / ln ln M`, defined once `ln ln M > 0`.
    pub fn loglog_ratio(&self) -> Option<f64> {
        let ll = (self.max_order as f64).ln().ln();
        (ll > 0.0).then(|| self.final_bound.to_f64() / ll)
    }
}

fn subspace_mass(chi_hat: &Spectrum, v: &DualSubspace) -> Result<DyadicScalar> {
    try_sum(
        v.elements().into_iter().map(|g| chi_hat.get(g).abs()),
        "subspace mass",
    )
}

/// One step from `V` given a precomputed `χ̂_A`.
pub fn iterate_step_with(
    a: &PointSet,
    chi_hat: &Spectrum,
    v: &DualSubspace,
    strategy: &dyn LevelSelector,
) -> Result<StepResult> {
    let fv = residual(a, v)?;
    let base = residual_l1(&fv)?;
    if base.is_zero() {
        return Err(Error::ZeroResidual);
    }
    let fv_hat = fwht(&fv.table)?;
    let levels = level_sets(&fv_hat, chi_hat, base)?;
    let avg = averaging_sum(&levels)?;
    if avg < DyadicScalar::pow2_inv(1) {
        return Err(Error::InvariantViolation(format!(
            "Σ 2^-s L_s = {avg:?} < 1/2"
        )));
    }
    let level = select_level(&levels, strategy, v)?;
    if let Some(g) = level.members.iter().find(|&&g| v.contains(g)) {
        return Err(Error::InvariantViolation(format!(
            "level set meets V at character {g:#x}"
        )));
    }

    let threshold = base
        .mul_pow2(-(level.s as i32 + 1))
        .ok_or(Error::Overflow("step threshold"))?;
    let chang = chang_span(&fv_hat, threshold)?;
    if !level.members.iter().all(|&g| chang.w.contains(g)) {
        return Err(Error::InvariantViolation(
            "Γ_s not inside the Chang span".into(),
        ));
    }

    let added = DualSubspace::span(level.members.iter().copied());
    let v_new = v.join(&added);
    let before = subspace_mass(chi_hat, v)?;
    let after = subspace_mass(chi_hat, &v_new)?;
    let gain = after
        .checked_sub(before)
        .ok_or(Error::Overflow("step gain"))?;

    if !meets_level_threshold(level.s, gain) {
        return Err(Error::InvariantViolation(format!(
            "gain {gain:?} below (1/6)(4/3)^{}",
            level.s
        )));
    }
    let growth = (v_new.dim() - v.dim()) as f64;
    if growth > chang.bound_dim {
        return Err(Error::InvariantViolation(format!(
            "dimension grew by {growth} beyond Chang ceiling {}",
            chang.bound_dim
        )));
    }

    Ok(StepResult {
        s: level.s,
        gain,
        level_mass: level.mass,
        added: level.members.clone(),
        dim_before: v.dim(),
        dim_after: v_new.dim(),
        v_new,
        chang_ceiling: chang.bound_dim,
        chang_ceiling_alt: chang.bound_dim_alt,
        residual_l1: base,
        residual_l2_sq: l2_norm_sq(&fv.table)?,
    })
}

/// One iteration step from `V`.
pub fn iterate_step(
    a: &PointSet,
    v: &DualSubspace,
    strategy: &dyn LevelSelector,
) -> Result<StepResult> {
    let chi_hat = fwht(&a.indicator())?;
    iterate_step_with(a, &chi_hat, v, strategy)
}

/// Iterates from `V_0 = {0}` while `|V_k| <= max_order`.
pub fn run_iteration(
    a: &PointSet,
    max_order: u64,
    strategy: &dyn LevelSelector,
    step_cap: usize,
) -> Result<IterationTrace> {
    if max_order == 0 {
        return Err(Error::BadInput("max order must be at least 1".into()));
    }
    let chi_hat = fwht(&a.indicator())?;
    let mut v = DualSubspace::trivial();
    let mut l_sequence = vec![subspace_mass(&chi_hat, &v)?];
    let mut steps = Vec::new();

    let termination = loop {
        if v.order() > max_order {
            break Termination::OrderCapReached;
        }
        if steps.len() >= step_cap {
            break Termination::StepCap;
        }
        match iterate_step_with(a, &chi_hat, &v, strategy) {
            Ok(step) => {
                let prev = *l_sequence.last().unwrap();
                let next = prev
                    .checked_add(step.gain)
                    .ok_or(Error::Overflow("L sequence"))?;
                if next <= prev {
                    return Err(Error::InvariantViolation("L sequence stalled".into()));
                }
                l_sequence.push(next);
                v = step.v_new.clone();
                steps.push(step);
            }
            Err(Error::ZeroResidual) => break Termination::ResidualZero,
            Err(e) => return Err(e),
        }
    };

    Ok(IterationTrace {
        max_order,
        steps,
        final_bound: *l_sequence.last().unwrap(),
        l_sequence,
        termination,
        final_subspace: v,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisRow {
    pub d: u32,
    pub product: DyadicScalar,
    pub scaled_product: DyadicScalar,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub alpha: DyadicScalar,
    pub max_order: u64,
    pub per_dim: Vec<HypothesisRow>,
    pub c_plain: DyadicScalar,
    pub c_scaled: DyadicScalar,
}

/// `{α2^d}(1 − {α2^d})` and its `2^d`-scaled form for every `2^d <= M`.
pub fn hypothesis_check(alpha: DyadicScalar, max_order: u64) -> Result<HypothesisReport> {
    if max_order == 0 {
        return Err(Error::BadInput("max order must be at least 1".into()));
    }
    let max_dim = 63 - max_order.leading_zeros();
    let rows = crate::constructions::density_profile(alpha, max_dim)?;
    let per_dim: Vec<HypothesisRow> = rows
        .into_iter()
        .map(|r| {
            Ok(HypothesisRow {
                d: r.d,
                scaled_product: r
                    .product
                    .mul_pow2(r.d as i32)
                    .ok_or(Error::Overflow("hypothesis scaling"))?,
                product: r.product,
            })
        })
        .collect::<Result<_>>()?;
    let c_plain = per_dim.iter().map(|r| r.product).min().unwrap();
    let c_scaled = per_dim.iter().map(|r| r.scaled_product).min().unwrap();
    Ok(HypothesisReport {
        alpha,
        max_order,
        per_dim,
        c_plain,
        c_scaled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_coset_union, density_family};
    use crate::fourier::a_norm;
    use crate::group::GroupDim;
    use crate::spectrum::SmallestS;

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
    fn halfspace_step() {
        let a = PointSet::from_points(dim(1), &[0]).unwrap();
        let step = iterate_step(&a, &DualSubspace::trivial(), &SmallestS).unwrap();
        assert_eq!(step.s, 0);
        assert_eq!(step.gain, d("1/2"));
        assert_eq!(step.v_new, DualSubspace::full(1));
    }

    #[test]
    fn coset_step() {
        for depth in 1..=3u32 {
            let lambda = DualSubspace::span((0..depth).map(|b| 1u32 << b));
            let perp = lambda.annihilator(4);
            let a = PointSet::from_predicate(dim(4), |x| perp.contains(x));
            let step = iterate_step(&a, &DualSubspace::trivial(), &SmallestS).unwrap();
            assert_eq!(step.s, 0);
            assert_eq!(step.v_new, lambda);
            let expect = DyadicScalar::new((1 << depth) - 1, depth);
            assert_eq!(step.gain, expect);
        }
    }

    #[test]
    fn union_of_cosets_has_zero_residual() {
        let v = DualSubspace::span([0b01]);
        let a = PointSet::from_points(dim(2), &[0b00, 0b10]).unwrap();
        assert_eq!(
            iterate_step(&a, &v, &SmallestS).unwrap_err(),
            Error::ZeroResidual
        );
    }

    #[test]
    fn halfspace_run() {
        let a = PointSet::from_points(dim(1), &[1]).unwrap();
        let t = run_iteration(&a, 4, &SmallestS, DEFAULT_STEP_CAP).unwrap();
        assert_eq!(t.steps.len(), 1);
        assert_eq!(t.termination, Termination::ResidualZero);
        assert_eq!(t.final_bound, DyadicScalar::ONE);
        assert_eq!(t.final_bound, norm(&a));
    }

    #[test]
    fn whole_group_run() {
        let a = PointSet::full(dim(3));
        let t = run_iteration(&a, 8, &SmallestS, DEFAULT_STEP_CAP).unwrap();
        assert!(t.steps.is_empty());
        assert_eq!(t.termination, Termination::ResidualZero);
        assert_eq!(t.final_bound, DyadicScalar::ONE);
    }

    #[test]
    fn geometric_union_run() {
        let dens = density_family("geometric4", 3).unwrap();
        let (a, _) = build_coset_union(&dens, dim(6)).unwrap();
        let t = run_iteration(&a, 1 << 6, &SmallestS, DEFAULT_STEP_CAP).unwrap();
        assert!(t.final_bound <= norm(&a));
        assert!(t.l_sequence.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(t.l_sequence[0], dens.value());
    }

    #[test]
    fn order_and_step_caps() {
        let a = PointSet::from_points(dim(4), &[0, 1, 2, 7, 9]).unwrap();
        let t = run_iteration(&a, 1, &SmallestS, DEFAULT_STEP_CAP).unwrap();
        assert_eq!(t.termination, Termination::OrderCapReached);
        assert_eq!(t.steps.len(), 1);
        let t = run_iteration(&a, 1 << 4, &SmallestS, 0).unwrap();
        assert_eq!(t.termination, Termination::StepCap);
        assert_eq!(t.final_bound, d("5/16"));
    }

    #[test]
    fn hypothesis_examples() {
        let g = density_family("geometric4", 3).unwrap();
        let r = hypothesis_check(g.value(), 63).unwrap();
        assert_eq!(r.per_dim.len(), 6);
        assert!(r.c_plain * DyadicScalar::from_int(12) >= DyadicScalar::ONE);
        assert!(r.c_plain <= r.c_scaled);

        let e = density_family("double_exp", 3).unwrap();
        let r = hypothesis_check(e.value(), 15).unwrap();
        assert!(r.c_scaled * DyadicScalar::from_int(8) >= DyadicScalar::ONE);

        let h = hypothesis_check(d("1/2"), 2).unwrap();
        assert_eq!(h.c_plain, DyadicScalar::ZERO);
    }
}
