//! Homomorphisms of filtered modules acting on row vectors, `v ↦ v·M`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::filtered::{FilteredModule, PresentedModule};
use crate::ring::group_ring::{GroupRing, GroupRingElement, GroupRingMatrix};
use crate::ring::vector::{add_scaled, support_radius, unit, Coord, ModuleVector};

#[derive(Debug, Clone)]
pub enum MorphismAction {
    GroupRing(GroupRingMatrix),
    /// `base` everywhere except at the listed coordinates, whose images are given explicitly.
    Perturbed { base: GroupRingMatrix, overrides: BTreeMap<Coord, ModuleVector> },
}

#[derive(Debug, Clone)]
pub struct FilteredMorphism {
    pub source: FilteredModule,
    pub target: FilteredModule,
    pub action: MorphismAction,
    pub equivariant: bool,
}

impl FilteredMorphism {
    pub fn new(source: FilteredModule, target: FilteredModule, matrix: GroupRingMatrix) -> Result<Self> {
        if source.base.gr != target.base.gr {
            return Err(Error::GroupMismatch);
        }
        if matrix.rows != source.base.rank || matrix.cols != target.base.rank {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, modules have ranks {} and {}",
                matrix.rows, matrix.cols, source.base.rank, target.base.rank
            )));
        }
        Ok(FilteredMorphism { source, target, action: MorphismAction::GroupRing(matrix), equivariant: true })
    }

    /// `v ↦ v·M` between standard filtrations.
    pub fn between(source: &PresentedModule, target: &PresentedModule, matrix: GroupRingMatrix) -> Result<Self> {
        FilteredMorphism::new(FilteredModule::standard(source.clone()), FilteredModule::standard(target.clone()), matrix)
    }

    pub fn identity(module: &FilteredModule) -> Self {
        let m = GroupRingMatrix::identity(&module.base.gr, module.base.rank);
        FilteredMorphism { source: module.clone(), target: module.clone(), action: MorphismAction::GroupRing(m), equivariant: true }
    }

    /// Right multiplication by `r` on the free rank-one module.
    pub fn multiplication(gr: &GroupRing, r: GroupRingElement) -> Self {
        let free = PresentedModule::free(gr, 1);
        let m = GroupRingMatrix::from_rows(vec![vec![r]], 1).expect("1x1");
        FilteredMorphism::between(&free, &free, m).expect("same module")
    }

    /// Replaces the image of one coordinate. The result is no longer equivariant.
    pub fn perturb(mut self, at: Coord, image: ModuleVector) -> Self {
        let (base, mut overrides) = match self.action {
            MorphismAction::GroupRing(m) => (m, BTreeMap::new()),
            MorphismAction::Perturbed { base, overrides } => (base, overrides),
        };
        overrides.insert(at, image);
        self.action = MorphismAction::Perturbed { base, overrides };
        self.equivariant = false;
        self
    }

    pub fn group_ring(&self) -> &GroupRing {
        &self.source.base.gr
    }

    pub fn matrix(&self) -> Option<&GroupRingMatrix> {
        match &self.action {
            MorphismAction::GroupRing(m) => Some(m),
            MorphismAction::Perturbed { .. } => None,
        }
    }

    pub fn apply(&self, v: &ModuleVector) -> ModuleVector {
        let gr = self.group_ring();
        match &self.action {
            MorphismAction::GroupRing(m) => m.apply(gr, v),
            MorphismAction::Perturbed { base, overrides } => {
                let mut out = ModuleVector::new();
                for (coord, c) in v {
                    match overrides.get(coord) {
                        Some(image) => add_scaled(&gr.ring, &mut out, c, image),
                        None => add_scaled(&gr.ring, &mut out, c, &base.apply(gr, &unit(coord.0.clone(), coord.1))),
                    }
                }
                out
            }
        }
    }

    /// Images of the source generating set.
    pub fn sigma_images(&self) -> Vec<ModuleVector> {
        self.source.sigma_vectors().iter().map(|s| self.apply(s)).collect()
    }

    /// How far past the source window the images of window generators can reach.
    pub fn reach(&self) -> Result<u32> {
        let spec = self.source.base.group();
        let mut r = 0;
        for v in self.sigma_images() {
            r = r.max(support_radius(spec, &v)?);
        }
        if let MorphismAction::Perturbed { overrides, .. } = &self.action {
            for v in overrides.values() {
                r = r.max(support_radius(spec, v)?);
            }
        }
        Ok(r)
    }
}
