//! Bound estimation, bicontrol, admissibility and equivariance of filtered morphisms.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::certificate::{CertificateKind, ControlCertificate, Counterexample};
use crate::error::{Error, Result};
use crate::filtered::{FilteredWindow, FiltrationRule, SamplingPlan};
use crate::ring::vector::{add_scaled, sub, translate, ModuleVector};
use crate::ring::window::WindowSubmodule;
use crate::space::group::GroupElement;
use crate::space::metric::{ball_elements, enlarge_elements};

use super::morphism::{FilteredMorphism, MorphismAction};

/// Source window of radius `r` and a target window wide enough for the images.
fn windows(phi: &FilteredMorphism, r: u32) -> Result<(FilteredWindow, FilteredWindow)> {
    let src = phi.source.window(r)?;
    let tgt = phi.target.window(r + phi.reach()?)?;
    Ok((src, tgt))
}

fn images(phi: &FilteredMorphism, src: &FilteredWindow, tgt: &FilteredWindow, s: &[GroupElement]) -> Result<WindowSubmodule> {
    let raw = src.raw_generators(s)?;
    Ok(WindowSubmodule::new(tgt.context(), raw.iter().map(|v| phi.apply(v))))
}

type Found = Option<Result<Counterexample>>;

fn first_failure<T: Sync>(items: &[T], f: impl Fn(&T) -> Result<Option<Counterexample>> + Sync + Send) -> Found {
    items.par_iter().map(f).find_map_first(|r| match r {
        Ok(None) => None,
        Ok(Some(c)) => Some(Ok(c)),
        Err(e) => Some(Err(e)),
    })
}

/// `φ(F(S)) ⊆ F′(S[b])` for every sampled `S ⊆ ball(e, r − b)`.
pub fn check_bounded(phi: &FilteredMorphism, b: u32, r: u32, plan: &SamplingPlan) -> Result<ControlCertificate> {
    let (src, tgt) = windows(phi, r)?;
    check_bounded_in(phi, b, &src, &tgt, plan)
}

fn check_bounded_in(
    phi: &FilteredMorphism,
    b: u32,
    src: &FilteredWindow,
    tgt: &FilteredWindow,
    plan: &SamplingPlan,
) -> Result<ControlCertificate> {
    let r = src.radius();
    let space = src.space();
    let inner = r.checked_sub(b).ok_or_else(|| Error::WindowTooSmall { radius: r, detail: format!("bound {b}") })?;
    let subsets = plan.subsets(space, inner)?;
    let found = first_failure(&subsets, |s| {
        let lhs = images(phi, src, tgt, s)?;
        let rhs = tgt.evaluate(&enlarge_elements(space, s, b)?)?;
        Ok(lhs.first_outside(&rhs).map(|witness| Counterexample::Subsets { s: s.clone(), u: None, witness }))
    });
    let note = format!("{} samples; {}", subsets.len(), plan.describe());
    Ok(match found {
        None => ControlCertificate::pass(CertificateKind::Bounded, b, r).with_note(note),
        Some(Ok(cx)) => ControlCertificate::fail(CertificateKind::Bounded, b, r, cx).with_note(note),
        Some(Err(e)) => return Err(e),
    })
}

/// The least `b ≤ r` passing [`check_bounded`]; a failing certificate carries the last counterexample.
pub fn bound_of(phi: &FilteredMorphism, r: u32, plan: &SamplingPlan) -> Result<ControlCertificate> {
    let (src, tgt) = windows(phi, r)?;
    let mut last = None;
    for b in 0..=r {
        let cert = check_bounded_in(phi, b, &src, &tgt, plan)?;
        if cert.passed() {
            return Ok(cert);
        }
        last = Some(cert);
    }
    Ok(last.expect("at least one attempt"))
}

/// `φ(F) ∩ F′(S) ⊆ φ(F(S[b]))` for sampled `S ⊆ ball(e, r − b)`, with `φ(F)` truncated to
/// the image of the source window.
pub fn check_bicontrolled(phi: &FilteredMorphism, b: u32, r: u32, plan: &SamplingPlan) -> Result<ControlCertificate> {
    let (src, tgt) = windows(phi, r)?;
    let image = images(phi, &src, &tgt, &src.context().ball())?;
    check_bicontrolled_in(phi, b, &src, &tgt, &image, plan)
}

fn check_bicontrolled_in(
    phi: &FilteredMorphism,
    b: u32,
    src: &FilteredWindow,
    tgt: &FilteredWindow,
    image: &WindowSubmodule,
    plan: &SamplingPlan,
) -> Result<ControlCertificate> {
    let r = src.radius();
    let space = src.space();
    let inner = r.checked_sub(b).ok_or_else(|| Error::WindowTooSmall { radius: r, detail: format!("bound {b}") })?;
    let subsets = plan.subsets(space, inner)?;
    let found = first_failure(&subsets, |s| {
        let lhs = image.intersect(&tgt.evaluate(s)?);
        if lhs.is_zero() {
            return Ok(None);
        }
        let rhs = images(phi, src, tgt, &enlarge_elements(space, s, b)?)?;
        Ok(lhs.first_outside(&rhs).map(|witness| Counterexample::Subsets { s: s.clone(), u: None, witness }))
    });
    let note = format!("{} samples; {}", subsets.len(), plan.describe());
    Ok(match found {
        None => ControlCertificate::pass(CertificateKind::Bicontrolled, b, r).with_note(note),
        Some(Ok(cx)) => ControlCertificate::fail(CertificateKind::Bicontrolled, b, r, cx).with_note(note),
        Some(Err(e)) => return Err(e),
    })
}

/// The least `b` in `from..=to` passing [`check_bicontrolled`], or the last failure.
pub fn minimal_bicontrol(phi: &FilteredMorphism, from: u32, to: u32, r: u32, plan: &SamplingPlan) -> Result<ControlCertificate> {
    let (src, tgt) = windows(phi, r)?;
    let image = images(phi, &src, &tgt, &src.context().ball())?;
    let mut last = None;
    for b in from..=to.max(from) {
        let cert = check_bicontrolled_in(phi, b, &src, &tgt, &image, plan)?;
        if cert.passed() {
            return Ok(cert);
        }
        last = Some(cert);
    }
    Ok(last.expect("at least one attempt"))
}

/// The least `d` with `φ(σ) ∈ F′(e[d])` for every σ in Σ.
pub fn generator_bound(phi: &FilteredMorphism) -> Result<u32> {
    if matches!(phi.action, MorphismAction::Perturbed { .. }) || !phi.equivariant {
        return Err(Error::NotGroupRingLinear);
    }
    let sigma_ok = |m: &crate::filtered::FilteredModule| {
        matches!(m.rule, FiltrationRule::Standard | FiltrationRule::ProductCanonical | FiltrationRule::Image { .. } | FiltrationRule::Cokernel { .. })
    };
    if !sigma_ok(&phi.source) || !sigma_ok(&phi.target) {
        return Err(Error::NotGroupRingLinear);
    }
    let reach = phi.reach()?;
    let limit = reach + phi.target.base.sigma_radius()? + 1;
    let tgt = phi.target.window(limit + phi.target.base.sigma_radius()?)?;
    let space = tgt.space().clone();
    let imgs = phi.sigma_images();
    for d in 0..=limit {
        let piece = tgt.evaluate(&ball_elements(&space, &space.identity(), d)?)?;
        if imgs.iter().all(|v| piece.contains(v)) {
            return Ok(d);
        }
    }
    Err(Error::WindowTooSmall { radius: limit, detail: "generator images not reached".into() })
}

/// Window injectivity: every relation among images of generators over `ball(e, r/2)`
/// comes from a relation in the source.
pub fn check_injective(phi: &FilteredMorphism, r: u32) -> Result<ControlCertificate> {
    let (src, tgt) = windows(phi, r)?;
    let half = ball_elements(src.space(), &src.space().identity(), r / 2)?;
    let raw = src.raw_generators(&half)?;
    let imgs = WindowSubmodule::indexed(tgt.context(), raw.iter().map(|v| phi.apply(v)));
    let ring = &phi.group_ring().ring;
    for combo in imgs.syzygies() {
        let mut k = ModuleVector::new();
        for (i, c) in &combo {
            add_scaled(ring, &mut k, c, &raw[*i]);
        }
        if !src.context().is_zero_vector(&k) {
            let cx = Counterexample::Subsets { s: half.clone(), u: None, witness: src.context().reduce(&k) };
            return Ok(ControlCertificate::fail(CertificateKind::Injective, 0, r, cx).with_note("kernel element in the half window"));
        }
    }
    Ok(ControlCertificate::pass(CertificateKind::Injective, 0, r).with_note(format!("generators over radius {}", r / 2)))
}

/// Window surjectivity: target generators over `ball(e, r/2)` are images of source
/// generators over `ball(e, r/2 + b)`.
pub fn check_surjective(phi: &FilteredMorphism, b: u32, r: u32) -> Result<ControlCertificate> {
    let (src, tgt) = windows(phi, r.max(r / 2 + b))?;
    let space = src.space().clone();
    let half = ball_elements(&space, &space.identity(), r / 2)?;
    let wide = ball_elements(&space, &space.identity(), r / 2 + b)?;
    let image = images(phi, &src, &tgt, &wide)?;
    let wanted = tgt.evaluate(&half)?;
    let note = format!("enlargement {b}");
    Ok(match wanted.first_outside(&image) {
        None => ControlCertificate::pass(CertificateKind::Surjective, b, r).with_note(note),
        Some(witness) => {
            ControlCertificate::fail(CertificateKind::Surjective, b, r, Counterexample::Subsets { s: half, u: None, witness })
                .with_note(note)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Admissibility {
    AdmissibleMono,
    AdmissibleEpi,
    Both,
    Neither,
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub verdict: Admissibility,
    pub bound: ControlCertificate,
    pub bicontrol: ControlCertificate,
    pub injective: ControlCertificate,
    pub surjective: ControlCertificate,
}

impl Classification {
    pub fn certificates(&self) -> [&ControlCertificate; 4] {
        [&self.bound, &self.bicontrol, &self.injective, &self.surjective]
    }
}

/// Bicontrol is searched from the measured bound up to `(r − 1)/2`, the largest
/// constant a window of radius `r` can still separate from the next one.
pub fn classify_morphism(phi: &FilteredMorphism, r: u32, plan: &SamplingPlan) -> Result<Classification> {
    let top = r.saturating_sub(1) / 2;
    let bound = bound_of(phi, r, plan)?;
    let b = if bound.passed() { bound.constant } else { top };
    let bicontrol = minimal_bicontrol(phi, b.min(top), top, r, plan)?;
    let injective = check_injective(phi, r)?;
    let surjective = check_surjective(phi, b, r)?;
    let verdict = match (bicontrol.passed(), injective.passed(), surjective.passed()) {
        (true, true, true) => Admissibility::Both,
        (true, true, false) => Admissibility::AdmissibleMono,
        (true, false, true) => Admissibility::AdmissibleEpi,
        _ => Admissibility::Neither,
    };
    Ok(Classification { verdict, bound, bicontrol, injective, surjective })
}

/// `φ∘ψ(γ) = ψ′(γ)∘φ` with `ψ(γ)v = γ⁻¹v` on sampled `γ` and window vectors. Overridden
/// coordinates of a perturbed morphism are always among the samples.
pub fn check_equivariance(phi: &FilteredMorphism, r: u32, samples: usize, seed: u64) -> Result<ControlCertificate> {
    let (_, tgt) = windows(phi, r)?;
    let spec = phi.source.base.group().clone();
    let ring = phi.group_ring().ring.clone();
    let ball = ball_elements(&spec, &spec.identity(), r / 4)?;
    let sigma = phi.source.sigma_vectors();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases: Vec<(GroupElement, ModuleVector)> = Vec::new();
    if let MorphismAction::Perturbed { overrides, .. } = &phi.action {
        for (g, i) in overrides.keys() {
            let v = crate::ring::vector::unit(g.clone(), *i);
            for _ in 0..4 {
                let gamma = ball.choose(&mut rng).expect("nonempty").clone();
                cases.push((gamma.clone(), v.clone()));
                cases.push((spec.inverse(&gamma), translate(&spec, &gamma, &v)));
            }
        }
    }
    for _ in 0..samples {
        let gamma = ball.choose(&mut rng).expect("nonempty").clone();
        let mut v = ModuleVector::new();
        for _ in 0..rng.gen_range(1..=3) {
            let x = ball.choose(&mut rng).expect("nonempty");
            let s = sigma.choose(&mut rng).expect("nonempty");
            add_scaled(&ring, &mut v, &ring.from_int(rng.gen_range(-3..=3)), &translate(&spec, x, s));
        }
        cases.push((gamma, v));
    }
    for (gamma, v) in &cases {
        let inv = spec.inverse(gamma);
        let lhs = phi.apply(&translate(&spec, &inv, v));
        let rhs = translate(&spec, &inv, &phi.apply(v));
        if !tgt.context().is_zero_vector(&sub(&ring, &lhs, &rhs)) {
            let cx = Counterexample::Equivariance { gamma: gamma.clone(), vector: v.clone() };
            return Ok(ControlCertificate::fail(CertificateKind::Equivariance, 0, r, cx));
        }
    }
    Ok(ControlCertificate::pass(CertificateKind::Equivariance, 0, r).with_note(format!("{} sampled cases", cases.len())))
}
