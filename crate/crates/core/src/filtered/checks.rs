//! Window certificates for leanness and insularity.

use rayon::prelude::*;

use crate::certificate::{CertificateKind, ControlCertificate, Counterexample};
use crate::error::{Error, Result};
use crate::space::group::{GroupElement, GroupSpec};
use crate::space::metric::{enlarge_elements, intersect_sorted, is_subset_sorted};

use super::filtration::FilteredWindow;
use super::sampling::SamplingPlan;

/// Which pairs an insularity certificate quantifies over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Insularity {
    /// Every sampled pair.
    Strict,
    /// Only pairs that are coarsely antithetic at window scale.
    Antithetic,
}

impl Insularity {
    fn kind(self) -> CertificateKind {
        match self {
            Insularity::Strict => CertificateKind::Insular,
            Insularity::Antithetic => CertificateKind::AntitheticInsular,
        }
    }
}

fn inner_radius(win: &FilteredWindow, c: u32) -> Result<u32> {
    win.radius().checked_sub(c).ok_or_else(|| Error::WindowTooSmall {
        radius: win.radius(),
        detail: format!("constant {c} exceeds the window"),
    })
}

/// `F(S) ⊆ Σ_{x∈S} F(x[D])` for every sampled `S ⊆ ball(e, r − D)`.
pub fn check_lean(win: &FilteredWindow, d: u32, plan: &SamplingPlan) -> Result<ControlCertificate> {
    let inner = inner_radius(win, d)?;
    let subsets = plan.subsets(win.space(), inner)?;
    let failure = subsets
        .par_iter()
        .map(|s| -> Result<Option<Counterexample>> {
            let lhs = win.evaluate(s)?;
            let rhs = win.evaluate_local_sum(s, d)?;
            Ok(lhs.first_outside(&rhs).map(|witness| Counterexample::Subsets { s: s.clone(), u: None, witness }))
        })
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        });
    finish(CertificateKind::Lean, d, win.radius(), plan, subsets.len(), failure)
}

fn finish(
    kind: CertificateKind,
    c: u32,
    radius: u32,
    plan: &SamplingPlan,
    count: usize,
    failure: Option<Result<Option<Counterexample>>>,
) -> Result<ControlCertificate> {
    let note = format!("{count} samples; {}", plan.describe());
    match failure {
        None => Ok(ControlCertificate::pass(kind, c, radius).with_note(note)),
        Some(Ok(Some(cx))) => Ok(ControlCertificate::fail(kind, c, radius, cx).with_note(note)),
        Some(Ok(None)) => unreachable!(),
        Some(Err(e)) => Err(e),
    }
}

/// Least `d′ ≤ bound` with `S[d] ∩ T[d] ⊆ (S ∩ T)[d′]`, or `None`.
pub fn check_antithetic_pair(
    space: &GroupSpec,
    s: &[GroupElement],
    t: &[GroupElement],
    d: u32,
    bound: u32,
) -> Result<Option<u32>> {
    let meet = intersect_sorted(&enlarge_elements(space, s, d)?, &enlarge_elements(space, t, d)?);
    if meet.is_empty() {
        return Ok(Some(0));
    }
    let mut core = intersect_sorted(s, t);
    if core.is_empty() {
        return Ok(None);
    }
    for k in 0..=bound {
        if is_subset_sorted(&meet, &core) {
            return Ok(Some(k));
        }
        core = enlarge_elements(space, &core, 1)?;
    }
    Ok(None)
}

/// Whether `d(S, T) > k`. Distances beyond the radius cap count as large when the cap is at least `k`.
fn far_apart(space: &GroupSpec, s: &[GroupElement], t: &[GroupElement], k: u32) -> Result<bool> {
    for a in s {
        for b in t {
            match space.distance(a, b) {
                Ok(x) if x <= k => return Ok(false),
                Ok(_) => {}
                Err(Error::RadiusCapExceeded { cap, .. }) if cap >= k => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(true)
}

/// Whether the pair passes [`check_antithetic_pair`] for every `d₀ ≤ margin` with `d′ ≤ bound`.
pub fn antithetic_in_window(
    space: &GroupSpec,
    s: &[GroupElement],
    t: &[GroupElement],
    margin: u32,
    bound: u32,
) -> Result<bool> {
    if s.is_empty() || t.is_empty() {
        return Ok(true);
    }
    if intersect_sorted(s, t).is_empty() {
        // In a path metric S[k] meets T[k] exactly when d(S, T) ≤ 2k.
        return far_apart(space, s, t, 2 * margin);
    }
    for d0 in 0..=margin {
        if check_antithetic_pair(space, s, t, d0, bound)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `F(S) ∩ F(U) ⊆ F(S[d] ∩ U[d])` on sampled pairs inside `ball(e, r − d)`.
pub fn check_insular(win: &FilteredWindow, d: u32, plan: &SamplingPlan, variant: Insularity) -> Result<ControlCertificate> {
    let inner = inner_radius(win, d)?;
    let space = win.space();
    let mut pairs = plan.pairs(space, inner)?;
    if variant == Insularity::Antithetic {
        let keep = pairs
            .par_iter()
            .map(|(s, u)| antithetic_in_window(space, s, u, inner, win.radius()))
            .collect::<Result<Vec<_>>>()?;
        let mut flags = keep.into_iter();
        pairs.retain(|_| flags.next().unwrap_or(false));
    }
    let failure = pairs
        .par_iter()
        .map(|(s, u)| -> Result<Option<Counterexample>> {
            let lhs = win.evaluate(s)?.intersect(&win.evaluate(u)?);
            if lhs.is_zero() {
                return Ok(None);
            }
            let target = intersect_sorted(&enlarge_elements(space, s, d)?, &enlarge_elements(space, u, d)?);
            let rhs = win.evaluate(&target)?;
            Ok(lhs
                .first_outside(&rhs)
                .map(|witness| Counterexample::Subsets { s: s.clone(), u: Some(u.clone()), witness }))
        })
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        });
    finish(variant.kind(), d, win.radius(), plan, pairs.len(), failure)
}

/// Scans `c = 0, 1, …, max` and returns the first passing certificate with every attempt.
pub fn minimal_constant(
    max: u32,
    mut check: impl FnMut(u32) -> Result<ControlCertificate>,
) -> Result<(Option<ControlCertificate>, Vec<ControlCertificate>)> {
    let mut tried = Vec::new();
    for c in 0..=max {
        let cert = check(c)?;
        let pass = cert.passed();
        tried.push(cert.clone());
        if pass {
            return Ok((Some(cert), tried));
        }
    }
    Ok((None, tried))
}

pub fn minimal_lean(win: &FilteredWindow, plan: &SamplingPlan) -> Result<(Option<ControlCertificate>, Vec<ControlCertificate>)> {
    minimal_constant(win.radius(), |c| check_lean(win, c, plan))
}

pub fn minimal_insular(
    win: &FilteredWindow,
    plan: &SamplingPlan,
    variant: Insularity,
) -> Result<(Option<ControlCertificate>, Vec<ControlCertificate>)> {
    minimal_constant(win.radius(), |c| check_insular(win, c, plan, variant))
}
