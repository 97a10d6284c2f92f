//! Lower-bound certificates: emission and independent replay.

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::dyadic::{try_sum, DyadicScalar};
use crate::error::{Error, Result};
use crate::fourier::{a_norm, fwht, Spectrum};
use crate::group::{CharMask, DualSubspace};
use crate::iteration::{hypothesis_check, HypothesisReport, IterationTrace, Termination};
use crate::sets::PointSet;
use crate::spectrum::meets_level_threshold;

pub const CERT_VERSION: u32 = 1;

pub fn tool_commit() -> String {
    option_env!("F2NORM_TOOL_COMMIT")
        .map(str::to_owned)
        .unwrap_or_else(|| format!("v{}", env!("CARGO_PKG_VERSION")))
}

/// 17 significant digits in exponent form.
fn float_raw(x: f64) -> Box<RawValue> {
    RawValue::from_string(format!("{x:.16e}")).expect("finite float")
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CertStep {
    pub s: u32,
    pub dim_before: u32,
    pub dim_after: u32,
    pub added: Vec<CharMask>,
    pub gain: DyadicScalar,
    pub chang_ceiling: Box<RawValue>,
    pub chang_ceiling_alt: Box<RawValue>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub version: u32,
    pub n: u32,
    pub max_order: u64,
    pub alpha: DyadicScalar,
    pub a_norm: Option<DyadicScalar>,
    pub trace: Vec<CertStep>,
    pub final_bound: DyadicScalar,
    pub termination: Termination,
    pub hypothesis: Option<HypothesisReport>,
    pub tool_commit: String,
}

impl Certificate {
    pub fn build(a: &PointSet, trace: &IterationTrace) -> Result<Self> {
        let norm = match fwht(&a.indicator()).and_then(|s| a_norm(&s)) {
            Ok(v) => Some(v),
            Err(Error::Overflow(_)) => None,
            Err(e) => return Err(e),
        };
        let hypothesis = match hypothesis_check(a.density(), trace.max_order) {
            Ok(r) => Some(r),
            Err(Error::Overflow(_)) => None,
            Err(e) => return Err(e),
        };
        let trace_rows = trace
            .steps
            .iter()
            .map(|st| CertStep {
                s: st.s,
                dim_before: st.dim_before,
                dim_after: st.dim_after,
                added: st.added.clone(),
                gain: st.gain,
                chang_ceiling: float_raw(st.chang_ceiling),
                chang_ceiling_alt: float_raw(st.chang_ceiling_alt),
            })
            .collect();
        Ok(Certificate {
            version: CERT_VERSION,
            n: a.dim().n(),
            max_order: trace.max_order,
            alpha: a.density(),
            a_norm: norm,
            trace: trace_rows,
            final_bound: trace.final_bound,
            termination: trace.termination,
            hypothesis,
            tool_commit: tool_commit(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::BadInput(format!("certificate: {e}")))
    }
}

fn mass(chi_hat: &Spectrum, v: &DualSubspace) -> Result<DyadicScalar> {
    try_sum(
        v.elements().into_iter().map(|g| chi_hat.get(g).abs()),
        "certificate mass",
    )
}

/// What a replay established.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertCheck {
    pub final_bound: DyadicScalar,
    pub a_norm: DyadicScalar,
    pub steps: usize,
}

/// Replays the certificate against the set: each step's added characters
/// must avoid the current `V` and produce exactly the recorded gain, each gain
/// must clear `(1/6)(4/3)^s`, and the final bound must not exceed the norm.
pub fn check_certificate(a: &PointSet, cert: &Certificate) -> Result<CertCheck> {
    let fail = |m: String| Err(Error::InvariantViolation(m));
    if cert.n != a.dim().n() {
        return fail(format!(
            "certificate n={} but set has n={}",
            cert.n,
            a.dim().n()
        ));
    }
    if cert.alpha != a.density() {
        return fail(format!(
            "certificate α={:?} but set has α={:?}",
            cert.alpha,
            a.density()
        ));
    }
    let chi_hat = fwht(&a.indicator())?;
    let norm = a_norm(&chi_hat)?;
    if let Some(claimed) = cert.a_norm {
        if claimed != norm {
            return fail(format!(
                "certificate a_norm={claimed:?} but recomputed {norm:?}"
            ));
        }
    }

    let mut v = DualSubspace::trivial();
    let mut l = mass(&chi_hat, &v)?;
    for (i, st) in cert.trace.iter().enumerate() {
        if st.dim_before != v.dim() {
            return fail(format!(
                "step {i}: dim_before {} but replay has {}",
                st.dim_before,
                v.dim()
            ));
        }
        if let Some(g) = st
            .added
            .iter()
            .find(|&&g| g >> cert.n != 0 || v.contains(g))
        {
            return fail(format!(
                "step {i}: character {g:#x} is out of range or already in V"
            ));
        }
        let next = st.added.iter().fold(v.clone(), |acc, &g| acc.insert(g));
        if st.dim_after != next.dim() {
            return fail(format!(
                "step {i}: dim_after {} but replay has {}",
                st.dim_after,
                next.dim()
            ));
        }
        let next_l = mass(&chi_hat, &next)?;
        let gain = next_l
            .checked_sub(l)
            .ok_or(Error::Overflow("certificate gain"))?;
        if gain != st.gain {
            return fail(format!(
                "step {i}: recorded gain {:?} but replay gives {gain:?}",
                st.gain
            ));
        }
        if !meets_level_threshold(st.s, gain) {
            return fail(format!("step {i}: gain {gain:?} below (1/6)(4/3)^{}", st.s));
        }
        v = next;
        l = next_l;
    }
    if l != cert.final_bound {
        return fail(format!(
            "final_bound {:?} but replay gives {l:?}",
            cert.final_bound
        ));
    }
    if l > norm {
        return fail(format!("final_bound {l:?} exceeds a_norm {norm:?}"));
    }
    Ok(CertCheck {
        final_bound: l,
        a_norm: norm,
        steps: cert.trace.len(),
    })
}
