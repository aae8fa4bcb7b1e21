//! Γ-filtrations `S ↦ F(S)` and their evaluation inside finite windows.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ring::group_ring::GroupRingMatrix;
use crate::ring::vector::{translate, ModuleVector};
use crate::ring::window::{WindowContext, WindowSubmodule};
use crate::space::embedding::UniformEmbedding;
use crate::space::group::{GroupElement, GroupSpec};
use crate::space::metric::MetricSubset;

use super::module::{Generator, PresentedModule};

#[derive(Debug, Clone)]
pub enum FiltrationRule {
    /// `F(S) = ⟨SΣ⟩_R`.
    Standard,
    /// Free module on Σ filtered by the product generating set `Γ × Σ`.
    ProductCanonical,
    /// `φ(F(S))` inside the target; realised as the standard filtration on `φ(Σ)`.
    Image { source: Box<FilteredModule>, morphism: GroupRingMatrix },
    /// Quotient image of the target filtration; relations gain `φ(Σ)`.
    Cokernel { source: Box<FilteredModule>, morphism: GroupRingMatrix },
    /// `F_*(S) = F(j⁻¹(S))` over the target space of `j`.
    Pushforward { inner: Box<FilteredModule>, embedding: UniformEmbedding },
}

impl FiltrationRule {
    pub fn name(&self) -> &'static str {
        match self {
            FiltrationRule::Standard => "standard",
            FiltrationRule::ProductCanonical => "product",
            FiltrationRule::Image { .. } => "image",
            FiltrationRule::Cokernel { .. } => "cokernel",
            FiltrationRule::Pushforward { .. } => "pushforward",
        }
    }
}

#[derive(Debug, Clone)]
pub struct FilteredModule {
    pub base: PresentedModule,
    pub rule: FiltrationRule,
}

/// `σ·M` for every σ in Σ.
fn map_sigma(source: &PresentedModule, morphism: &GroupRingMatrix) -> Result<Vec<Generator>> {
    if morphism.rows != source.rank {
        return Err(Error::DimensionMismatch(format!(
            "morphism has {} rows, source rank is {}",
            morphism.rows, source.rank
        )));
    }
    source
        .sigma
        .iter()
        .map(|g| {
            let row = GroupRingMatrix::from_rows(vec![g.value.clone()], source.rank)?;
            let image = row.mul(&source.gr, morphism)?;
            Ok(Generator { label: format!("φ({})", g.label), value: image.row(0) })
        })
        .collect()
}

fn sigma_based(m: &FilteredModule) -> Result<()> {
    match m.rule {
        FiltrationRule::Standard | FiltrationRule::ProductCanonical => Ok(()),
        _ => Err(Error::InvalidTask(format!("a {} filtration cannot be the source here", m.rule.name()))),
    }
}

impl FilteredModule {
    /// The standard filtration `s(F, Σ)`.
    pub fn standard(base: PresentedModule) -> Self {
        FilteredModule { base, rule: FiltrationRule::Standard }
    }

    pub fn product_canonical(base: PresentedModule) -> Result<Self> {
        if !base.is_free() {
            return Err(Error::InvalidTask("the product filtration needs a free module".into()));
        }
        Ok(FilteredModule { base, rule: FiltrationRule::ProductCanonical })
    }

    /// Image of `source` under `v ↦ v·M` inside `target`.
    pub fn image(source: FilteredModule, morphism: GroupRingMatrix, target: &PresentedModule) -> Result<Self> {
        sigma_based(&source)?;
        check_target(&source.base, &morphism, target)?;
        let sigma = map_sigma(&source.base, &morphism)?;
        let base = target.with_sigma(sigma)?;
        Ok(FilteredModule { base, rule: FiltrationRule::Image { source: Box::new(source), morphism } })
    }

    /// `target / φ(source)` filtered by the image of the target's standard filtration.
    pub fn cokernel(source: FilteredModule, morphism: GroupRingMatrix, target: &PresentedModule) -> Result<Self> {
        sigma_based(&source)?;
        check_target(&source.base, &morphism, target)?;
        let images = map_sigma(&source.base, &morphism)?;
        let mut rows: Vec<Vec<_>> = (0..target.relations.rows).map(|i| target.relations.row(i)).collect();
        rows.extend(images.into_iter().map(|g| g.value));
        let relations = GroupRingMatrix::from_rows(rows, target.rank)?;
        let base = PresentedModule::new(target.gr.clone(), target.rank, relations, target.sigma.clone())?;
        Ok(FilteredModule { base, rule: FiltrationRule::Cokernel { source: Box::new(source), morphism } })
    }

    pub fn pushforward(inner: FilteredModule, embedding: UniformEmbedding) -> Result<Self> {
        if &embedding.source != inner.space() {
            return Err(Error::InvalidEmbedding("embedding source differs from the filtration space".into()));
        }
        Ok(FilteredModule { base: inner.base.clone(), rule: FiltrationRule::Pushforward { inner: Box::new(inner), embedding } })
    }

    /// The metric space the filtration is indexed by.
    pub fn space(&self) -> &GroupSpec {
        match &self.rule {
            FiltrationRule::Pushforward { embedding, .. } => &embedding.target,
            _ => self.base.group(),
        }
    }

    /// Generators `σ` with `F(S) = ⟨SΣ⟩` for Σ-based rules.
    pub fn sigma_vectors(&self) -> Vec<ModuleVector> {
        match &self.rule {
            FiltrationRule::ProductCanonical => PresentedModule::free(&self.base.gr, self.base.rank).sigma_vectors(),
            _ => self.base.sigma_vectors(),
        }
    }

    /// Prepares evaluation inside the ball of radius `radius` of [`FilteredModule::space`].
    pub fn window(&self, radius: u32) -> Result<FilteredWindow> {
        match &self.rule {
            FiltrationRule::Pushforward { inner, embedding } => {
                let offset = embedding.target.length(&embedding.apply(&embedding.source.identity())?)?;
                let inner_radius = embedding.preimage_radius(radius + offset);
                let inner_window = inner.window(inner_radius)?;
                Ok(FilteredWindow {
                    module: self.clone(),
                    radius,
                    ctx: inner_window.ctx.clone(),
                    inner: Some(Box::new(inner_window)),
                    sigma: Vec::new(),
                })
            }
            _ => Ok(FilteredWindow {
                module: self.clone(),
                radius,
                ctx: Arc::new(self.base.context(radius)?),
                inner: None,
                sigma: self.sigma_vectors(),
            }),
        }
    }

    /// Same filtration over a window context that already exists.
    pub fn window_with(&self, ctx: Arc<WindowContext>) -> Result<FilteredWindow> {
        if matches!(self.rule, FiltrationRule::Pushforward { .. }) {
            return self.window(ctx.radius());
        }
        Ok(FilteredWindow { module: self.clone(), radius: ctx.radius(), ctx, inner: None, sigma: self.sigma_vectors() })
    }
}

fn check_target(source: &PresentedModule, morphism: &GroupRingMatrix, target: &PresentedModule) -> Result<()> {
    if source.gr != target.gr {
        return Err(if source.gr.group != target.gr.group { Error::GroupMismatch } else { Error::RingMismatch });
    }
    if morphism.cols != target.rank {
        return Err(Error::DimensionMismatch(format!("morphism has {} columns, target rank is {}", morphism.cols, target.rank)));
    }
    Ok(())
}

/// A filtration prepared for evaluation on subsets of one window ball.
#[derive(Debug, Clone)]
pub struct FilteredWindow {
    module: FilteredModule,
    radius: u32,
    ctx: Arc<WindowContext>,
    inner: Option<Box<FilteredWindow>>,
    sigma: Vec<ModuleVector>,
}

impl FilteredWindow {
    pub fn module(&self) -> &FilteredModule {
        &self.module
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn space(&self) -> &GroupSpec {
        self.module.space()
    }

    /// Window of the carrier module (the source window for pushforwards).
    pub fn context(&self) -> &Arc<WindowContext> {
        &self.ctx
    }

    /// `F(S)` truncated to the window. `S` must lie in the window ball.
    pub fn evaluate(&self, s: &[GroupElement]) -> Result<WindowSubmodule> {
        let space = self.space();
        for g in s {
            let inside = match self.inner {
                None => self.ctx.in_window(g),
                Some(_) => space.length(g)? <= self.radius,
            };
            if !inside {
                return Err(Error::WindowTooSmall {
                    radius: self.radius,
                    detail: format!("{} lies outside the window", space.format(g)),
                });
            }
        }
        match &self.inner {
            Some(inner) => {
                let FiltrationRule::Pushforward { embedding, .. } = &self.module.rule else { unreachable!() };
                let mut sorted = s.to_vec();
                sorted.sort();
                sorted.dedup();
                let pre = embedding.preimage(&MetricSubset::from_sorted(sorted), inner.radius)?;
                inner.evaluate(&pre)
            }
            None => Ok(WindowSubmodule::new(&self.ctx, self.translates(s))),
        }
    }

    fn translates(&self, s: &[GroupElement]) -> Vec<ModuleVector> {
        let group = self.module.base.group();
        s.iter().flat_map(|x| self.sigma.iter().map(move |sig| translate(group, x, sig))).collect()
    }

    /// Unreduced generators of `F(S)`: the translates `xσ` for Σ-based rules.
    pub fn raw_generators(&self, s: &[GroupElement]) -> Result<Vec<ModuleVector>> {
        match &self.inner {
            Some(_) => Ok(self.evaluate(s)?.generators().to_vec()),
            None => {
                self.evaluate(&[])?;
                for g in s {
                    if !self.ctx.in_window(g) {
                        return Err(Error::WindowTooSmall {
                            radius: self.radius,
                            detail: format!("{} lies outside the window", self.space().format(g)),
                        });
                    }
                }
                Ok(self.translates(s))
            }
        }
    }

    /// `Σ_{x ∈ S} F(x[d])`.
    pub fn evaluate_local_sum(&self, s: &[GroupElement], d: u32) -> Result<WindowSubmodule> {
        let space = self.space();
        let mut parts = Vec::with_capacity(s.len());
        for x in s {
            let ball = crate::space::metric::ball_elements(space, x, d)?;
            parts.push(self.evaluate(&ball)?);
        }
        Ok(WindowSubmodule::sum_all(&self.ctx, parts.iter()).dedup())
    }
}
