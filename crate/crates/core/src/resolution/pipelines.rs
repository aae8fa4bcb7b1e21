//! Images, cokernels and idempotent images with their certificates.

use std::sync::Arc;

use crate::certificate::{CertificateKind, ControlCertificate, Counterexample};
use crate::control::{bound_of, check_bicontrolled, minimal_bicontrol, FilteredMorphism};
use crate::error::{Error, Result};
use crate::filtered::{check_insular, check_lean, minimal_constant, FilteredModule, FilteredWindow, Insularity, PresentedModule, SamplingPlan};
use crate::ring::group_ring::{GroupRing, GroupRingMatrix};
use crate::ring::vector::translate;
use crate::ring::window::{WindowContext, WindowSubmodule};
use crate::space::metric::ball_elements;

/// Lean and insular certificates with the least passing constants up to `(r − 1)/2`.
#[derive(Debug, Clone)]
pub struct ModuleCertificates {
    pub lean: ControlCertificate,
    pub insular: ControlCertificate,
}

impl ModuleCertificates {
    pub fn passed(&self) -> bool {
        self.lean.passed() && self.insular.passed()
    }

    fn tagged(mut self, note: &str) -> Self {
        for c in [&mut self.lean, &mut self.insular] {
            c.note = Some(match c.note.take() {
                Some(n) => format!("{note}; {n}"),
                None => note.to_string(),
            });
        }
        self
    }
}

pub fn certify_module(win: &FilteredWindow, plan: &SamplingPlan) -> Result<ModuleCertificates> {
    let top = win.radius().saturating_sub(1) / 2;
    let pick = |(found, tried): (Option<ControlCertificate>, Vec<ControlCertificate>)| {
        found.unwrap_or_else(|| tried.into_iter().last().expect("one attempt"))
    };
    let lean = pick(minimal_constant(top, |c| check_lean(win, c, plan))?);
    let insular = pick(minimal_constant(top, |c| check_insular(win, c, plan, Insularity::Strict))?);
    Ok(ModuleCertificates { lean, insular })
}

#[derive(Debug, Clone)]
pub struct ImageCokernel {
    pub image: FilteredModule,
    pub cokernel: FilteredModule,
    pub bicontrol: ControlCertificate,
    pub image_certificates: ModuleCertificates,
    pub cokernel_certificates: ModuleCertificates,
}

impl ImageCokernel {
    pub fn hypothesis_met(&self) -> bool {
        self.bicontrol.passed()
    }
}

/// Builds both objects; certificates carry "hypothesis unmet" when `φ` is not bicontrolled.
pub fn image_cokernel(phi: &FilteredMorphism, r: u32, plan: &SamplingPlan) -> Result<ImageCokernel> {
    let m = phi.matrix().ok_or(Error::NotGroupRingLinear)?.clone();
    let bound = bound_of(phi, r, plan)?;
    let top = r.saturating_sub(1) / 2;
    let bicontrol = minimal_bicontrol(phi, bound.constant.min(top), top, r, plan)?;
    let image = FilteredModule::image(phi.source.clone(), m.clone(), &phi.target.base)?;
    let cokernel = FilteredModule::cokernel(phi.source.clone(), m, &phi.target.base)?;
    let mut image_certificates = certify_module(&image.window(r)?, plan)?;
    let mut cokernel_certificates = certify_module(&cokernel.window(r)?, plan)?;
    if !bicontrol.passed() {
        image_certificates = image_certificates.tagged("hypothesis unmet");
        cokernel_certificates = cokernel_certificates.tagged("hypothesis unmet");
    }
    Ok(ImageCokernel { image, cokernel, bicontrol, image_certificates, cokernel_certificates })
}

#[derive(Debug, Clone)]
pub struct IdempotentReport {
    pub image: FilteredModule,
    pub idempotent: ControlCertificate,
    pub bound: ControlCertificate,
    pub bicontrol: ControlCertificate,
    pub certificates: ModuleCertificates,
    pub complement: ControlCertificate,
}

impl IdempotentReport {
    pub fn passed(&self) -> bool {
        self.bound.passed() && self.bicontrol.passed() && self.certificates.passed() && self.complement.passed()
    }

    pub fn all(&self) -> [&ControlCertificate; 6] {
        [&self.idempotent, &self.bound, &self.bicontrol, &self.certificates.lean, &self.certificates.insular, &self.complement]
    }
}

/// `im(e) + im(1 − e)` contains every window coordinate over `ball(e, r − s)` and
/// `im(e) ∩ im(1 − e) = 0`, where `s` is the support radius of `e`.
pub fn check_complement(gr: &GroupRing, e: &GroupRingMatrix, r: u32) -> Result<ControlCertificate> {
    let spec = &gr.group;
    let n = e.rows;
    let s = e.support_radius(gr)?;
    let f = GroupRingMatrix::identity(gr, n).add(gr, &e.neg(gr))?;
    let ctx = Arc::new(WindowContext::free(gr, n, r + s)?);
    let ball = ball_elements(spec, &spec.identity(), r)?;
    let span = |m: &GroupRingMatrix| {
        let rows: Vec<_> = (0..n).map(|i| m.row_vector(gr, i)).collect();
        WindowSubmodule::new(&ctx, ball.iter().flat_map(|x| rows.iter().map(move |v| translate(spec, x, v))).collect::<Vec<_>>())
    };
    let (a, b) = (span(e), span(&f));
    let meet = a.intersect(&b);
    if let Some(w) = meet.generators().iter().find(|g| !ctx.is_zero_vector(g)) {
        return Ok(ControlCertificate::fail(CertificateKind::Complement, s, r, Counterexample::Subsets { s: Vec::new(), u: None, witness: w.clone() })
            .with_note("images intersect"));
    }
    let sum = a.sum(&b);
    let inner = ball_elements(spec, &spec.identity(), r.saturating_sub(s))?;
    for x in &inner {
        for i in 0..n {
            let v = crate::ring::vector::unit(x.clone(), i);
            if !sum.contains(&v) {
                return Ok(ControlCertificate::fail(CertificateKind::Complement, s, r, Counterexample::Subsets { s: vec![x.clone()], u: None, witness: v })
                    .with_note("coordinate outside the sum"));
            }
        }
    }
    Ok(ControlCertificate::pass(CertificateKind::Complement, s, r).with_note(format!("coordinates over radius {}", r.saturating_sub(s))))
}

pub fn idempotent_image(e: &GroupRingMatrix, gr: &GroupRing, r: u32, plan: &SamplingPlan) -> Result<IdempotentReport> {
    if e.rows != e.cols {
        return Err(Error::DimensionMismatch(format!("idempotent must be square, got {}x{}", e.rows, e.cols)));
    }
    if !e.is_idempotent(gr)? {
        return Err(Error::NotIdempotent);
    }
    let idempotent = ControlCertificate::pass(CertificateKind::Idempotent, 0, r).with_note("e·e = e exactly");
    let free = PresentedModule::free(gr, e.rows);
    let phi = FilteredMorphism::between(&free, &free, e.clone())?;
    let bound = bound_of(&phi, r, plan)?;
    let bicontrol = check_bicontrolled(&phi, bound.constant, r, plan)?;
    let image = FilteredModule::image(FilteredModule::standard(free.clone()), e.clone(), &free)?;
    let certificates = certify_module(&image.window(r)?, plan)?;
    let complement = check_complement(gr, e, r)?;
    Ok(IdempotentReport { image, idempotent, bound, bicontrol, certificates, complement })
}
