//! Geometric modules over a group and morphisms given by bounded block matrices.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ring::group_ring::{GroupRing, GroupRingMatrix};
use crate::ring::scalar::{RingSpec, Scalar};
use crate::ring::vector::{add_scaled, unit, ModuleVector};
use crate::space::group::{GroupElement, GroupSpec};
use crate::space::metric::ball_elements;

/// A free module `⊕_x R^{rank(x)}` over the points of a group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeometricModule {
    pub space: GroupSpec,
    pub ring: RingSpec,
    /// Rank at every point.
    pub rank: usize,
}

/// A dense block `rank(x) × rank(x′)`.
pub type Block = Vec<Vec<Scalar>>;

#[derive(Debug, Clone, PartialEq)]
pub struct GeometricMorphism {
    pub source: GeometricModule,
    pub target: GeometricModule,
    /// Nonzero components `φ_{x,x′}`, acting on row vectors.
    blocks: BTreeMap<(GroupElement, GroupElement), Block>,
    pub declared_bound: u32,
}

fn is_zero_block(b: &Block) -> bool {
    b.iter().all(|r| r.iter().all(Zero::is_zero))
}

impl GeometricModule {
    pub fn new(space: GroupSpec, ring: RingSpec, rank: usize) -> Self {
        GeometricModule { space, ring, rank }
    }
}

impl GeometricMorphism {
    /// Rejects blocks of the wrong shape and nonzero blocks beyond the declared bound.
    pub fn new(
        source: GeometricModule,
        target: GeometricModule,
        blocks: impl IntoIterator<Item = ((GroupElement, GroupElement), Block)>,
        declared_bound: u32,
    ) -> Result<Self> {
        if source.space != target.space {
            return Err(Error::GroupMismatch);
        }
        if source.ring != target.ring {
            return Err(Error::RingMismatch);
        }
        let mut out = BTreeMap::new();
        for ((x, y), block) in blocks {
            if block.len() != source.rank || block.iter().any(|r| r.len() != target.rank) {
                return Err(Error::DimensionMismatch(format!("block must be {}x{}", source.rank, target.rank)));
            }
            if is_zero_block(&block) {
                continue;
            }
            let d = source.space.distance(&x, &y)?;
            if d > declared_bound {
                return Err(Error::InvalidTask(format!(
                    "component at distance {d} exceeds the declared bound {declared_bound}"
                )));
            }
            let block = block.into_iter().map(|r| r.into_iter().map(|c| source.ring.normalize(c)).collect()).collect();
            out.insert((x, y), block);
        }
        Ok(GeometricMorphism { source, target, blocks: out, declared_bound })
    }

    pub fn identity(module: &GeometricModule, points: &[GroupElement]) -> Self {
        let id: Block = (0..module.rank)
            .map(|i| (0..module.rank).map(|j| if i == j { module.ring.one() } else { module.ring.zero() }).collect())
            .collect();
        GeometricMorphism::new(module.clone(), module.clone(), points.iter().map(|x| ((x.clone(), x.clone()), id.clone())), 0)
            .expect("identity is valid")
    }

    /// `x·e_i ↦ Σ m_{ij,h} (xh)·e_j` for `x` among `points`: right multiplication by `M`.
    pub fn from_matrix(gr: &GroupRing, m: &GroupRingMatrix, points: &[GroupElement]) -> Result<Self> {
        let module = |rank| GeometricModule::new(gr.group.clone(), gr.ring.clone(), rank);
        let mut blocks: BTreeMap<(GroupElement, GroupElement), Block> = BTreeMap::new();
        for x in points {
            for (&(i, j), entry) in m.entries() {
                for (h, c) in entry.terms() {
                    let y = gr.group.mul(x, h);
                    let b = blocks
                        .entry((x.clone(), y))
                        .or_insert_with(|| vec![vec![Scalar::zero(); m.cols]; m.rows]);
                    b[i][j] = gr.ring.add(&b[i][j], c);
                }
            }
        }
        GeometricMorphism::new(module(m.rows), module(m.cols), blocks, m.support_radius(gr)?)
    }

    /// Left translation-free shift `x ↦ x·g` on rank-one modules.
    pub fn shift(space: &GroupSpec, ring: &RingSpec, g: &GroupElement, points: &[GroupElement]) -> Result<Self> {
        let module = GeometricModule::new(space.clone(), ring.clone(), 1);
        let blocks = points.iter().map(|x| ((x.clone(), space.mul(x, g)), vec![vec![ring.one()]]));
        GeometricMorphism::new(module.clone(), module, blocks, space.length(g)?)
    }

    /// Random blocks on `points` with propagation at most `bound`.
    pub fn random(module: &GeometricModule, points: &[GroupElement], bound: u32, density: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let offsets = ball_elements(&module.space, &module.space.identity(), bound)?;
        let mut blocks = Vec::new();
        for x in points {
            for h in &offsets {
                if rng.gen_bool(density) {
                    let block: Block = (0..module.rank)
                        .map(|_| (0..module.rank).map(|_| module.ring.from_int(rng.gen_range(-2..=2))).collect())
                        .collect();
                    blocks.push(((x.clone(), module.space.mul(x, h)), block));
                }
            }
        }
        if let Some(x) = points.choose(&mut rng) {
            let h = offsets.last().expect("nonempty");
            blocks.push(((x.clone(), module.space.mul(x, h)), vec![vec![module.ring.one(); module.rank]; module.rank]));
        }
        GeometricMorphism::new(module.clone(), module.clone(), blocks, bound)
    }

    pub fn blocks(&self) -> &BTreeMap<(GroupElement, GroupElement), Block> {
        &self.blocks
    }

    pub fn block(&self, x: &GroupElement, y: &GroupElement) -> Option<&Block> {
        self.blocks.get(&(x.clone(), y.clone()))
    }

    /// Largest distance between `x` and `x′` over nonzero components.
    pub fn measured_bound(&self) -> Result<u32> {
        let mut d = 0;
        for (x, y) in self.blocks.keys() {
            d = d.max(self.source.space.distance(x, y)?);
        }
        Ok(d)
    }

    pub fn apply(&self, v: &ModuleVector) -> ModuleVector {
        let ring = &self.source.ring;
        let mut out = ModuleVector::new();
        for ((x, y), block) in &self.blocks {
            for (i, row) in block.iter().enumerate() {
                let Some(c) = v.get(&(x.clone(), i)) else { continue };
                for (j, a) in row.iter().enumerate() {
                    if !a.is_zero() {
                        add_scaled(ring, &mut out, &ring.mul(c, a), &unit(y.clone(), j));
                    }
                }
            }
        }
        out
    }
}

fn block_mul(ring: &RingSpec, a: &Block, b: &Block) -> Block {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).fold(Scalar::zero(), |acc, (x, brow)| ring.add(&acc, &ring.mul(x, &brow[j]))))
                .collect()
        })
        .collect()
}

fn block_add(ring: &RingSpec, a: &mut Block, b: &Block) {
    for (ra, rb) in a.iter_mut().zip(b) {
        for (x, y) in ra.iter_mut().zip(rb) {
            *x = ring.add(x, y);
        }
    }
}

/// `ψ∘φ` (apply φ first) with components `Σ_z φ_{x,z}·ψ_{z,x′}` and declared bound the sum.
pub fn compose_geometric(psi: &GeometricMorphism, phi: &GeometricMorphism) -> Result<GeometricMorphism> {
    if phi.target != psi.source {
        return Err(if phi.target.space != psi.source.space { Error::GroupMismatch } else { Error::DimensionMismatch("composable ranks".into()) });
    }
    let ring = &phi.source.ring;
    let mut by_source: BTreeMap<&GroupElement, Vec<(&GroupElement, &Block)>> = BTreeMap::new();
    for ((z, y), b) in &psi.blocks {
        by_source.entry(z).or_default().push((y, b));
    }
    let mut blocks: BTreeMap<(GroupElement, GroupElement), Block> = BTreeMap::new();
    for ((x, z), a) in &phi.blocks {
        for (y, b) in by_source.get(z).into_iter().flatten() {
            let prod = block_mul(ring, a, b);
            match blocks.get_mut(&(x.clone(), (*y).clone())) {
                Some(acc) => block_add(ring, acc, &prod),
                None => {
                    blocks.insert((x.clone(), (*y).clone()), prod);
                }
            }
        }
    }
    GeometricMorphism::new(phi.source.clone(), psi.target.clone(), blocks, phi.declared_bound + psi.declared_bound)
}
