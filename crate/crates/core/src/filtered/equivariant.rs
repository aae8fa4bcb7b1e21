//! The equivariant structure of a standard filtration and the action it induces.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::certificate::{CertificateKind, ControlCertificate, Counterexample};
use crate::error::{Error, Result};
use crate::ring::group_ring::GroupRingElement;
use crate::ring::vector::{add_scaled, sub, translate, ModuleVector};
use crate::ring::window::{WindowContext, WindowSubmodule};
use crate::space::group::GroupElement;
use crate::space::metric::ball_elements;

use super::filtration::FilteredModule;
use super::module::PresentedModule;
use super::sampling::SamplingPlan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PsiRule {
    /// `ψ(γ)(sσ) = γ⁻¹sσ`.
    InverseTranslation,
    /// Every `ψ(γ)` is the identity; a structure only for modules with trivial action.
    Identity,
}

#[derive(Debug, Clone)]
pub struct EquivariantStructure {
    pub carrier: FilteredModule,
    pub rule: PsiRule,
}

/// The structure `ψ(γ): sσ ↦ γ⁻¹sσ` on the standard filtration of `f`.
pub fn equivariant_of(f: &PresentedModule) -> EquivariantStructure {
    EquivariantStructure { carrier: FilteredModule::standard(f.clone()), rule: PsiRule::InverseTranslation }
}

/// Random small group elements and vectors for sampled checks.
struct Samples {
    gammas: Vec<GroupElement>,
    vectors: Vec<ModuleVector>,
}

fn samples(carrier: &FilteredModule, radius: u32, count: usize, seed: u64) -> Result<Samples> {
    let base = &carrier.base;
    let spec = base.group();
    let ball = ball_elements(spec, &spec.identity(), radius / 4)?;
    let sigma = base.sigma_vectors();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gammas = (0..2 * count).map(|_| ball.choose(&mut rng).expect("nonempty").clone()).collect();
    let vectors = (0..count)
        .map(|_| {
            let mut v = ModuleVector::new();
            for _ in 0..rng.gen_range(1..=3) {
                let x = ball.choose(&mut rng).expect("nonempty");
                let s = sigma.choose(&mut rng).expect("nonempty sigma");
                let c = base.gr.ring.from_int(rng.gen_range(-3..=3));
                add_scaled(&base.gr.ring, &mut v, &c, &translate(spec, x, s));
            }
            v
        })
        .collect();
    Ok(Samples { gammas, vectors })
}

impl EquivariantStructure {
    pub fn new(carrier: FilteredModule, rule: PsiRule) -> Self {
        EquivariantStructure { carrier, rule }
    }

    pub fn psi(&self, gamma: &GroupElement, v: &ModuleVector) -> ModuleVector {
        match self.rule {
            PsiRule::InverseTranslation => translate(self.carrier.base.group(), &self.carrier.base.group().inverse(gamma), v),
            PsiRule::Identity => v.clone(),
        }
    }

    /// `ψ(1) = id` and `ψ(γ₁γ₂) = ψ(γ₂)∘ψ(γ₁)` on sampled pairs, modulo the window relations.
    pub fn check_cocycle(&self, radius: u32, pairs: usize, seed: u64) -> Result<ControlCertificate> {
        let base = &self.carrier.base;
        let spec = base.group();
        let ctx = base.context(radius)?;
        let smp = samples(&self.carrier, radius, pairs, seed)?;
        let e = spec.identity();
        for (i, v) in smp.vectors.iter().enumerate() {
            if !ctx.is_zero_vector(&sub(&base.gr.ring, &self.psi(&e, v), v)) {
                return Ok(fail(CertificateKind::Cocycle, radius, e, v.clone()));
            }
            let (g1, g2) = (&smp.gammas[2 * i], &smp.gammas[2 * i + 1]);
            let lhs = self.psi(&spec.mul(g1, g2), v);
            let rhs = self.psi(g2, &self.psi(g1, v));
            if !ctx.is_zero_vector(&sub(&base.gr.ring, &lhs, &rhs)) {
                return Ok(fail(CertificateKind::Cocycle, radius, spec.mul(g1, g2), v.clone()));
            }
        }
        Ok(ControlCertificate::pass(CertificateKind::Cocycle, 0, radius).with_note(format!("{pairs} sampled pairs")))
    }

    /// `ψ(γ)F(S) ⊆ F(γ⁻¹S)` for sampled γ (and their inverses) and sampled `S`.
    pub fn check_degree_zero(&self, radius: u32, seed: u64) -> Result<ControlCertificate> {
        let base = &self.carrier.base;
        let spec = base.group();
        let ctx = std::sync::Arc::new(base.context(radius)?);
        let win = self.carrier.window_with(ctx.clone())?;
        let plan = SamplingPlan::light(seed);
        let subsets = plan.subsets(spec, radius / 4)?;
        let gammas = ball_elements(spec, &spec.identity(), radius / 4)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for s in &subsets {
            let g = gammas.choose(&mut rng).expect("nonempty").clone();
            for gamma in [g.clone(), spec.inverse(&g)] {
                let source = win.evaluate(s)?;
                let inv = spec.inverse(&gamma);
                let shifted: Vec<GroupElement> = s.iter().map(|x| spec.mul(&inv, x)).collect();
                let target = win.evaluate(&shifted)?;
                let moved = WindowSubmodule::new(&ctx, source.generators().iter().map(|v| self.psi(&gamma, v)));
                if let Some(w) = moved.first_outside(&target) {
                    return Ok(fail(CertificateKind::Equivariance, radius, gamma, w));
                }
            }
        }
        Ok(ControlCertificate::pass(CertificateKind::Equivariance, 0, radius).with_note(format!("{} sampled subsets", subsets.len())))
    }

    /// Both structure certificates, merged into one of kind `cocycle`.
    pub fn certify(&self, radius: u32, seed: u64) -> Result<ControlCertificate> {
        let a = self.check_cocycle(radius, 50, seed)?;
        let mut b = self.check_degree_zero(radius, seed)?;
        b.kind = CertificateKind::Cocycle;
        Ok(a.merge(b))
    }
}

fn fail(kind: CertificateKind, radius: u32, gamma: GroupElement, vector: ModuleVector) -> ControlCertificate {
    ControlCertificate::fail(kind, 0, radius, Counterexample::Equivariance { gamma, vector })
}

/// A module action rebuilt from an equivariant structure: `r·v = Σ r_γ ψ(γ⁻¹)v`.
#[derive(Debug, Clone)]
pub struct EquivariantAction {
    pub module: PresentedModule,
    pub structure: EquivariantStructure,
    pub certificate: ControlCertificate,
}

/// Requires a passing [`EquivariantStructure::certify`] at `radius`.
pub fn action_from_equivariant(e: &EquivariantStructure, radius: u32, seed: u64) -> Result<EquivariantAction> {
    let certificate = e.certify(radius, seed)?;
    if !certificate.passed() {
        return Err(Error::UncertifiedStructure);
    }
    Ok(EquivariantAction { module: e.carrier.base.clone(), structure: e.clone(), certificate })
}

impl EquivariantAction {
    pub fn act(&self, r: &GroupRingElement, v: &ModuleVector) -> ModuleVector {
        let spec = self.module.group();
        let ring = &self.module.gr.ring;
        let mut out = ModuleVector::new();
        for (g, c) in r.terms() {
            add_scaled(ring, &mut out, c, &self.structure.psi(&spec.inverse(g), v));
        }
        out
    }

    /// Compares `act` with the module's own action on sampled `r` and `v`.
    pub fn check_round_trip(&self, radius: u32, count: usize, seed: u64) -> Result<ControlCertificate> {
        let spec = self.module.group();
        let gr = &self.module.gr;
        let ctx = WindowContext::new(gr, self.module.rank, &self.module.relation_vectors(), radius)?;
        let smp = samples(&self.structure.carrier, radius, count, seed)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
        for v in &smp.vectors {
            let terms: Vec<(GroupElement, _)> = (0..rng.gen_range(1..=3))
                .map(|_| (smp.gammas.choose(&mut rng).expect("nonempty").clone(), gr.ring.from_int(rng.gen_range(-2..=2))))
                .collect();
            let r = gr.from_terms(terms);
            let mut direct = ModuleVector::new();
            for (g, c) in r.terms() {
                add_scaled(&gr.ring, &mut direct, c, &translate(spec, g, v));
            }
            if !ctx.is_zero_vector(&sub(&gr.ring, &self.act(&r, v), &direct)) {
                let gamma = r.support().next().cloned().unwrap_or_else(|| spec.identity());
                return Ok(fail(CertificateKind::Equivariance, radius, gamma, v.clone()));
            }
        }
        Ok(ControlCertificate::pass(CertificateKind::Equivariance, 0, radius).with_note(format!("{count} sampled products")))
    }
}
