//! Small-scale search for minimum-norm sets of fixed size.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dyadic::DyadicScalar;
use crate::error::{Error, Result};
use crate::fourier::{a_norm, fwht};
use crate::group::{is_independent, GroupDim, PointMask};
use crate::registry::{Named, Registry};
use crate::sets::PointSet;

pub const DEFAULT_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealParams {
    pub t0: f64,
    pub ratio: f64,
    pub steps: u64,
}

impl Default for AnnealParams {
    fn default() -> Self {
        AnnealParams {
            t0: 1.0,
            ratio: 0.995,
            steps: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub budget: u128,
    pub anneal: AnnealParams,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: DEFAULT_BUDGET,
            anneal: AnnealParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchRecord {
    pub n: u32,
    pub set_size: usize,
    pub best_set: PointSet,
    pub best_norm: DyadicScalar,
    pub method: &'static str,
    pub evaluations: u64,
    pub seed: u64,
}

impl SearchRecord {
    /// Recomputes the norm of `best_set` and rejects a mismatch.
    pub fn new(
        best_set: PointSet,
        best_norm: DyadicScalar,
        method: &'static str,
        evaluations: u64,
        seed: u64,
    ) -> Result<Self> {
        let check = set_norm(&best_set)?;
        if check != best_norm {
            return Err(Error::InvariantViolation(format!(
                "recorded norm {best_norm:?} but set has norm {check:?}"
            )));
        }
        Ok(SearchRecord {
            n: best_set.dim().n(),
            set_size: best_set.len(),
            best_set,
            best_norm,
            method,
            evaluations,
            seed,
        })
    }

    /// Deterministic merge: lower norm wins, then the lexicographically
    /// smaller set.
    pub fn merge(self, other: SearchRecord) -> SearchRecord {
        match self.best_norm.cmp(&other.best_norm) {
            Ordering::Less => self,
            Ordering::Greater => other,
            Ordering::Equal => {
                if lex_cmp(&other.best_set, &self.best_set) == Ordering::Less {
                    other
                } else {
                    self
                }
            }
        }
    }
}

pub fn set_norm(a: &PointSet) -> Result<DyadicScalar> {
    a_norm(&fwht(&a.indicator())?)
}

fn lex_cmp(a: &PointSet, b: &PointSet) -> Ordering {
    a.iter().cmp(b.iter())
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// A search procedure for the minimum of `‖χ_A‖_{A(G)}` over `|A| = size`.
pub trait SearchMethod: Named + Send + Sync {
    fn search(
        &self,
        n: GroupDim,
        size: usize,
        seed: u64,
        cfg: &SearchConfig,
    ) -> Result<SearchRecord>;
}

/// Full enumeration over affine-orbit representatives.
///
/// Every nonempty `A` is affinely equivalent to a set containing
/// `{0, e_1, …, e_r}` and contained in `span(e_1, …, e_r)`, where `r` is the
/// affine rank of `A`. Only such sets are enumerated.
pub struct Exhaustive;

impl Named for Exhaustive {
    fn name(&self) -> &'static str {
        "exhaustive"
    }
}

impl SearchMethod for Exhaustive {
    fn search(
        &self,
        n: GroupDim,
        size: usize,
        seed: u64,
        cfg: &SearchConfig,
    ) -> Result<SearchRecord> {
        min_norm_exhaustive(n, size, cfg.budget).map(|mut r| {
            r.seed = seed;
            r
        })
    }
}

pub fn min_norm_exhaustive(n: GroupDim, size: usize, budget: u128) -> Result<SearchRecord> {
    if size > n.order() {
        return Err(Error::BadInput(format!("size {size} exceeds 2^{}", n.n())));
    }
    let needed = binomial(n.order() as u128, size as u128);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    if size == 0 {
        return SearchRecord::new(PointSet::empty(n), DyadicScalar::ZERO, "exhaustive", 1, 0);
    }

    let mut best: Option<(PointSet, DyadicScalar)> = None;
    let mut evaluations = 0u64;
    for r in 0..=n.n() {
        let base: Vec<PointMask> = std::iter::once(0).chain((0..r).map(|i| 1 << i)).collect();
        if base.len() > size {
            break;
        }
        let pool: Vec<PointMask> = (0..1u32 << r).filter(|x| !base.contains(x)).collect();
        let extra = size - base.len();
        if extra > pool.len() {
            continue;
        }
        for_each_combination(pool.len(), extra, |idx| {
            let mut a = PointSet::empty(n);
            for &p in &base {
                a.insert(p);
            }
            for &i in idx {
                a.insert(pool[i]);
            }
            let v = set_norm(&a)?;
            evaluations += 1;
            let better = match &best {
                None => true,
                Some((bs, bv)) => v < *bv || (v == *bv && lex_cmp(&a, bs) == Ordering::Less),
            };
            if better {
                best = Some((a, v));
            }
            Ok(())
        })?;
    }
    let (set, norm) = best.expect("at least one representative per size");
    SearchRecord::new(set, norm, "exhaustive", evaluations, 0)
}

fn for_each_combination(
    n: usize,
    k: usize,
    mut f: impl FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if k > n {
        return Ok(());
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx)?;
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Swap-move simulated annealing with geometric cooling.
pub struct Anneal;

impl Named for Anneal {
    fn name(&self) -> &'static str {
        "anneal"
    }
}

impl SearchMethod for Anneal {
    fn search(
        &self,
        n: GroupDim,
        size: usize,
        seed: u64,
        cfg: &SearchConfig,
    ) -> Result<SearchRecord> {
        min_norm_anneal(n, size, &cfg.anneal, seed)
    }
}

pub fn min_norm_anneal(
    n: GroupDim,
    size: usize,
    params: &AnnealParams,
    seed: u64,
) -> Result<SearchRecord> {
    if size == 0 || size >= n.order() {
        return Err(Error::BadInput(format!(
            "anneal needs 0 < size < 2^{}, got {size}",
            n.n()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<PointMask> = n.masks().collect();
    points.shuffle(&mut rng);
    let (mut inside, mut outside) = {
        let (a, b) = points.split_at(size);
        (a.to_vec(), b.to_vec())
    };
    let build = |members: &[PointMask]| {
        let mut s = PointSet::empty(n);
        for &p in members {
            s.insert(p);
        }
        s
    };

    let mut current = build(&inside);
    let mut current_norm = set_norm(&current)?;
    let mut best = (current.clone(), current_norm);
    let mut evaluations = 1u64;
    let mut temp = params.t0;

    for _ in 0..params.steps {
        let i = rng.gen_range(0..inside.len());
        let j = rng.gen_range(0..outside.len());
        let (p, q) = (inside[i], outside[j]);
        current.remove(p);
        current.insert(q);
        let cand = set_norm(&current)?;
        evaluations += 1;
        let delta = cand.to_f64() - current_norm.to_f64();
        let accept = delta <= 0.0 || (temp > 0.0 && rng.gen::<f64>() < (-delta / temp).exp());
        if accept {
            inside[i] = q;
            outside[j] = p;
            current_norm = cand;
            if cand < best.1 || (cand == best.1 && lex_cmp(&current, &best.0) == Ordering::Less) {
                best = (current.clone(), cand);
            }
        } else {
            current.remove(q);
            current.insert(p);
        }
        temp *= params.ratio;
    }
    SearchRecord::new(best.0, best.1, "anneal", evaluations, seed)
}

pub fn search_methods() -> Registry<dyn SearchMethod> {
    Registry::new("search method")
        .with(Box::new(Exhaustive) as Box<dyn SearchMethod>)
        .with(Box::new(Anneal) as Box<dyn SearchMethod>)
}

/// Image of `A` under `x ↦ Mx + shift`, where column `i` of `M` is
/// `columns[i]`. `M` must be invertible.
pub fn affine_image(a: &PointSet, columns: &[u32], shift: PointMask) -> Result<PointSet> {
    let n = a.dim();
    if columns.len() != n.n() as usize || !is_independent(columns) {
        return Err(Error::BadInput("affine map is not invertible".into()));
    }
    let mut out = PointSet::empty(n);
    for x in a.iter() {
        let mut y = shift;
        for (i, &c) in columns.iter().enumerate() {
            if x >> i & 1 == 1 {
                y ^= c;
            }
        }
        out.insert(y);
    }
    Ok(out)
}

/// A uniformly random invertible affine map on F₂ⁿ.
pub fn random_affine<R: Rng>(n: GroupDim, rng: &mut R) -> (Vec<u32>, PointMask) {
    let mask = (n.order() - 1) as u32;
    loop {
        let cols: Vec<u32> = (0..n.n()).map(|_| rng.gen::<u32>() & mask).collect();
        if is_independent(&cols) {
            return (cols, rng.gen::<u32>() & mask);
        }
    }
}
