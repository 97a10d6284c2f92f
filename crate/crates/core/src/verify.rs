//! Randomized property suites, registered by name and run by `verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::constructions::build_equality_case;
use crate::dyadic::DyadicScalar;
use crate::error::{Error, Result};
use crate::fourier::{fwht, l1_norm, FunctionTable};
use crate::group::GroupDim;
use crate::iteration::iterate_step;
use crate::registry::{Named, Registry};
use crate::sampling::{
    random_deltas, random_density, random_function, random_independent, random_set, random_subspace,
};
use crate::sets::{frac_quadratic_gap, physical_lower_bound, residual, residual_l1};
use crate::spectrum::{beckner_verify, chang_span, riesz_product, SmallestS};

/// One randomized property; a trial returns `Err` on any violation.
pub trait PropertySuite: Named + Send + Sync {
    fn trial(&self, rng: &mut ChaCha8Rng) -> Result<()>;
}

fn violation(msg: String) -> Result<()> {
    Err(Error::InvariantViolation(msg))
}

fn dim_in<R: Rng>(rng: &mut R, lo: u32, hi: u32) -> GroupDim {
    GroupDim::new(rng.gen_range(lo..=hi)).expect("range within cap")
}

/// `‖f_V‖₁ = 2⟨χ_A, f_V⟩` plus the pointwise structure of `f_V`.
pub struct ResidualIdentity;

impl Named for ResidualIdentity {
    fn name(&self) -> &'static str {
        "tA"
    }
}

impl PropertySuite for ResidualIdentity {
    fn trial(&self, rng: &mut ChaCha8Rng) -> Result<()> {
        let n = dim_in(rng, 4, 12);
        let a = random_set(n, rng);
        let v = random_subspace(n, rng.gen_range(0..=n.n()), rng);
        let fv = residual(&a, &v)?;
        residual_l1(&fv)?;
        if !fv.table.mean()?.is_zero() {
            return violation("f_V has nonzero mean".into());
        }
        for x in n.masks() {
            let val = fv.table.get(x);
            if val.abs() > DyadicScalar::ONE {
                return violation(format!("|f_V({x:#x})| > 1"));
            }
            if a.contains(x) == val.is_negative() && !val.is_zero() {
                return violation(format!("f_V({x:#x}) has the wrong sign"));
            }
        }
        let spec = fwht(&fv.table)?;
        if let Some(g) = v.elements().into_iter().find(|&g| !spec.get(g).is_zero()) {
            return violation(format!("f̂_V({g:#x}) != 0 for γ in V"));
        }
        Ok(())
    }
}

/// The physical-space lower bound and the set attaining it.
pub struct PhysicalBound;

impl Named for PhysicalBound {
    fn name(&self) -> &'static str {
        "lem1"
    }
}

impl PropertySuite for PhysicalBound {
    fn trial(&self, rng: &mut ChaCha8Rng) -> Result<()> {
        let n = dim_in(rng, 4, 12);
        let a = random_set(n, rng);
        let v = random_subspace(n, rng.gen_range(0..=n.n()), rng);
        let l1 = residual_l1(&residual(&a, &v)?)?;
        let bound = physical_lower_bound(a.density(), v.order())?;
        if l1 < bound {
            return violation(format!("‖f_V‖₁ = {l1:?} < bound {bound:?}"));
        }

        let m = dim_in(rng, 1, 10);
        let w = random_subspace(m, rng.gen_range(0..=m.n()), rng);
        let alpha = random_density(m, rng);
        let eq = build_equality_case(alpha, &w, m)?;
        let l1 = residual_l1(&residual(&eq, &w)?)?;
        let bound = physical_lower_bound(alpha, w.order())?;
        if eq.density() != alpha || l1 != bound {
            return violation(format!("equality case: ‖f_V‖₁ = {l1:?}, bound {bound:?}"));
        }
        Ok(())
    }
}

/// `Σ(δᵢ − δᵢ²) >= γ(1 − γ)` over random rationals.
pub struct FracQuadratic;

impl Named for FracQuadratic {
    fn name(&self) -> &'static str {
        "techlem"
    }
}

impl PropertySuite for FracQuadratic {
    fn trial(&self, rng: &mut ChaCha8Rng) -> Result<()> {
        let m = rng.gen_range(1..=8);
        let deltas = random_deltas(m, 64, rng);
        let (lhs, rhs) = frac_quadratic_gap(&deltas)?;
        if lhs < rhs {
            return violation(format!("δ = {deltas:?}: {lhs} < {rhs}"));
        }
        Ok(())
    }
}

/// Beckner's inequality and unit mass of Riesz products.
pub struct Beckner;

impl Named for Beckner {
    fn name(&self) -> &'static str {
        "beckner"
    }
}

pub const BECKNER_ETAS: [(i128, u32); 4] = [(1, 2), (1, 1), (3, 2), (1, 0)];

impl PropertySuite for Beckner {
    fn trial(&self, rng: &mut ChaCha8Rng) -> Result<()> {
        let n = dim_in(rng, 1, 8);
        let f = random_function(n, rng);
        let k = rng.gen_range(0..=n.n());
        let lambda = random_independent(n, k, rng);
        let (num, exp) = BECKNER_ETAS[rng.gen_range(0..BECKNER_ETAS.len())];
        let eta = DyadicScalar::new(num, exp);
        let (lhs, rhs) = beckner_verify(&f, &lambda, eta.to_f64())?;
        if lhs > rhs * (1.0 + 1e-9) {
            return violation(format!("‖T_η f‖₂ = {lhs} > ‖f‖_(1+η²) = {rhs}"));
        }
        let p = riesz_product(n, &lambda, eta)?;
        if p.table.values().any(|v| v.is_negative()) {
            return violation("Riesz product takes a negative value".into());
        }
        if l1_norm(&p.table)? != DyadicScalar::ONE {
            return violation("‖p_η‖₁ != 1".into());
        }
        Ok(())
    }
}

/// Large spectrum lies in its span and the span respects Chang's ceiling.
pub struct Chang;

impl Named for Chang {
    fn name(&self) -> &'static str {
        "chang"
    }
}

impl PropertySuite for Chang {
    fn trial(&self, rng: &mut ChaCha8Rng) -> Result<()> {
        let n = dim_in(rng, 1, 10);
        let mut f = random_function(n, rng);
        if l1_norm(&f)?.is_zero() {
            f = FunctionTable::constant(n, DyadicScalar::ONE);
        }
        let k = rng.gen_range(1..=64);
        let threshold = l1_norm(&f)?
            .checked_mul(DyadicScalar::new(k, 6))
            .expect("small");
        let spec = fwht(&f)?;
        let span = chang_span(&spec, threshold)?;
        if let Some(g) = span.large.iter().find(|&&g| !span.w.contains(g)) {
            return violation(format!("large character {g:#x} outside span"));
        }
        if !span.within_bound() {
            return violation(format!(
                "dim W = {} exceeds ceiling {} (ε = {k}/64)",
                span.w.dim(),
                span.bound_dim
            ));
        }
        Ok(())
    }
}

/// The iteration-step contract on random `(A, V)`.
pub struct StepContract;

impl Named for StepContract {
    fn name(&self) -> &'static str {
        "step"
    }
}

impl PropertySuite for StepContract {
    fn trial(&self, rng: &mut ChaCha8Rng) -> Result<()> {
        let n = dim_in(rng, 1, 10);
        let a = random_set(n, rng);
        let v = random_subspace(n, rng.gen_range(0..=n.n()), rng);
        match iterate_step(&a, &v, &SmallestS) {
            Ok(_) | Err(Error::ZeroResidual) => Ok(()),
            Err(e) => Err(e),
        }
    }
}

pub fn property_suites() -> Registry<dyn PropertySuite> {
    Registry::new("verify suite")
        .with(Box::new(ResidualIdentity) as Box<dyn PropertySuite>)
        .with(Box::new(PhysicalBound) as Box<dyn PropertySuite>)
        .with(Box::new(FracQuadratic) as Box<dyn PropertySuite>)
        .with(Box::new(Beckner) as Box<dyn PropertySuite>)
        .with(Box::new(Chang) as Box<dyn PropertySuite>)
        .with(Box::new(StepContract) as Box<dyn PropertySuite>)
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub trials: u64,
    pub failures: Vec<(u64, Error)>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// RNG for one trial; independent of how trials are scheduled.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Runs `trials` seeded trials on a pool of `jobs` threads; failures are
/// reported in trial order.
pub fn run_suite(
    suite: &dyn PropertySuite,
    trials: u64,
    seed: u64,
    jobs: usize,
) -> Result<SuiteReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::BadInput(format!("thread pool: {e}")))?;
    let outcomes: Vec<(u64, Result<()>)> = pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|t| (t, suite.trial(&mut trial_rng(seed, t))))
            .collect()
    });
    let failures = outcomes
        .into_iter()
        .filter_map(|(t, r)| r.err().map(|e| (t, e)))
        .collect();
    Ok(SuiteReport {
        name: suite.name(),
        trials,
        failures,
    })
}
