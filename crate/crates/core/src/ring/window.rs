//! Finite windows of finitely presented modules.
//!
//! A module `R[Γ]^k / ⟨relations⟩` is truncated to the ball of radius `r`: the
//! relation submodule is replaced by the R-span of those translates `γρ` whose
//! support lies in the ball. Translates with a unit coefficient are eliminated
//! once, giving a substitution from eliminated coordinates to the surviving ones.
//! The leftover translates form a background that is pulled into individual
//! queries only over the coordinates they touch.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::{Arc, OnceLock};

use num_traits::Zero;

use super::group_ring::GroupRing;
use super::scalar::{RingSpec, Scalar};
use super::sparse::{add_scaled_sparse, recombine, Combo, SparseSpan};
use super::vector::{translate, Coord, ModuleVector};
use crate::error::{Error, Result};
use crate::space::group::{GroupElement, GroupSpec};
use crate::space::metric::ball_elements;

#[derive(Debug)]
pub struct WindowContext {
    gr: GroupRing,
    rank: usize,
    radius: u32,
    lengths: HashMap<GroupElement, u32>,
    subst: HashMap<Coord, ModuleVector>,
    uses: HashMap<Coord, HashSet<Coord>>,
    background: Vec<ModuleVector>,
    bg_index: HashMap<Coord, Vec<usize>>,
    translates: usize,
}

impl WindowContext {
    /// Window of the free module `R[Γ]^rank`.
    pub fn free(gr: &GroupRing, rank: usize, radius: u32) -> Result<Self> {
        Self::new(gr, rank, &[], radius)
    }

    pub fn new(gr: &GroupRing, rank: usize, relations: &[ModuleVector], radius: u32) -> Result<Self> {
        let spec = &gr.group;
        let mut ball = ball_elements(spec, &spec.identity(), radius)?;
        let mut lengths = HashMap::with_capacity(ball.len());
        for g in &ball {
            lengths.insert(g.clone(), spec.length(g)?);
        }
        ball.sort_by(|a, b| (lengths[a], a).cmp(&(lengths[b], b)));
        let mut ctx = WindowContext {
            gr: gr.clone(),
            rank,
            radius,
            lengths,
            subst: HashMap::new(),
            uses: HashMap::new(),
            background: Vec::new(),
            bg_index: HashMap::new(),
            translates: 0,
        };
        for rho in relations {
            if rho.keys().any(|(_, i)| *i >= rank) {
                return Err(Error::DimensionMismatch(format!("relation index outside rank {rank}")));
            }
            let Some(((anchor, _), _)) = rho.iter().next() else { continue };
            let anchor_inv = spec.inverse(anchor);
            let mut seen = HashSet::new();
            for h in &ball {
                let gamma = spec.mul(h, &anchor_inv);
                if !seen.insert(gamma.clone()) {
                    continue;
                }
                let moved = translate(spec, &gamma, rho);
                if moved.keys().all(|(g, _)| ctx.lengths.contains_key(g)) {
                    ctx.translates += 1;
                    ctx.absorb(moved);
                }
            }
        }
        loop {
            let before = ctx.subst.len();
            let pending = std::mem::take(&mut ctx.background);
            ctx.bg_index.clear();
            for row in pending {
                let row = ctx.reduce(&row);
                ctx.absorb(row);
            }
            if ctx.subst.len() == before {
                break;
            }
        }
        Ok(ctx)
    }

    fn rank_key(&self, c: &Coord) -> (u32, Coord) {
        (self.lengths.get(&c.0).copied().unwrap_or(u32::MAX), c.clone())
    }

    fn absorb(&mut self, rel: ModuleVector) {
        let rel = self.reduce(&rel);
        if rel.is_empty() {
            return;
        }
        let ring = self.gr.ring.clone();
        let pivot = rel.iter().filter(|(_, x)| ring.is_unit(x)).map(|(c, _)| self.rank_key(c)).max().map(|(_, c)| c);
        let Some(c) = pivot else {
            let idx = self.background.len();
            for k in rel.keys() {
                self.bg_index.entry(k.clone()).or_default().push(idx);
            }
            self.background.push(rel);
            return;
        };
        let a = rel[&c].clone();
        let minus_inv = ring.neg(&ring.inverse(&a).expect("unit"));
        let mut expr = ModuleVector::new();
        for (k, x) in &rel {
            if *k != c {
                expr.insert(k.clone(), ring.mul(x, &minus_inv));
            }
        }
        if let Some(users) = self.uses.remove(&c) {
            for u in users {
                let mut e = self.subst.remove(&u).expect("tracked expression");
                let coef = e.remove(&c).unwrap_or_else(Scalar::zero);
                add_scaled_sparse(&ring, &mut e, &coef, &expr);
                for k in e.keys() {
                    self.uses.entry(k.clone()).or_default().insert(u.clone());
                }
                self.subst.insert(u, e);
            }
        }
        if let Some(rows) = self.bg_index.remove(&c) {
            for idx in rows {
                let row = &mut self.background[idx];
                let Some(coef) = row.remove(&c) else { continue };
                add_scaled_sparse(&ring, row, &coef, &expr);
                let keys: Vec<Coord> = row.keys().cloned().collect();
                for k in keys {
                    let list = self.bg_index.entry(k).or_default();
                    if !list.contains(&idx) {
                        list.push(idx);
                    }
                }
            }
        }
        for k in expr.keys() {
            self.uses.entry(k.clone()).or_default().insert(c.clone());
        }
        self.subst.insert(c, expr);
    }

    pub fn group_ring(&self) -> &GroupRing {
        &self.gr
    }

    pub fn group(&self) -> &GroupSpec {
        &self.gr.group
    }

    pub fn ring(&self) -> &RingSpec {
        &self.gr.ring
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// Number of relation translates inside the window.
    pub fn translates(&self) -> usize {
        self.translates
    }

    pub fn eliminated(&self) -> usize {
        self.subst.len()
    }

    pub fn background_len(&self) -> usize {
        self.background.iter().filter(|r| !r.is_empty()).count()
    }

    /// Word length of a window element, if it lies in the window ball.
    pub fn length_in_window(&self, g: &GroupElement) -> Option<u32> {
        self.lengths.get(g).copied()
    }

    pub fn in_window(&self, g: &GroupElement) -> bool {
        self.lengths.contains_key(g)
    }

    /// Window ball elements in (length, normal form) order.
    pub fn ball(&self) -> Vec<GroupElement> {
        let mut b: Vec<GroupElement> = self.lengths.keys().cloned().collect();
        b.sort_by(|a, c| (self.lengths[a], a).cmp(&(self.lengths[c], c)));
        b
    }

    /// Normal form: eliminated coordinates replaced by their expressions.
    pub fn reduce(&self, v: &ModuleVector) -> ModuleVector {
        let ring = &self.gr.ring;
        let mut out = ModuleVector::new();
        for (c, x) in v {
            match self.subst.get(c) {
                Some(e) => add_scaled_sparse(ring, &mut out, x, e),
                None => {
                    let mut unit = ModuleVector::new();
                    unit.insert(c.clone(), x.clone());
                    add_scaled_sparse(ring, &mut out, &ring.one(), &unit);
                }
            }
        }
        out
    }

    /// Background rows reachable from the given coordinates through shared coordinates.
    fn closure<'a>(&self, seeds: impl IntoIterator<Item = &'a Coord>) -> (Vec<usize>, HashSet<Coord>) {
        let mut coords: HashSet<Coord> = HashSet::new();
        let mut queue: VecDeque<Coord> = VecDeque::new();
        for c in seeds {
            if coords.insert(c.clone()) {
                queue.push_back(c.clone());
            }
        }
        let mut rows = Vec::new();
        let mut taken = HashSet::new();
        while let Some(c) = queue.pop_front() {
            let Some(list) = self.bg_index.get(&c) else { continue };
            for &idx in list {
                if !self.background[idx].contains_key(&c) || !taken.insert(idx) {
                    continue;
                }
                rows.push(idx);
                for k in self.background[idx].keys() {
                    if coords.insert(k.clone()) {
                        queue.push_back(k.clone());
                    }
                }
            }
        }
        rows.sort_unstable();
        (rows, coords)
    }

    /// True when `v` vanishes in the window quotient.
    pub fn is_zero_vector(&self, v: &ModuleVector) -> bool {
        let nf = self.reduce(v);
        if nf.is_empty() {
            return true;
        }
        let (rows, _) = self.closure(nf.keys());
        let bg: Vec<ModuleVector> = rows.iter().map(|&i| self.background[i].clone()).collect();
        SparseSpan::untracked(&self.gr.ring, bg).contains(&nf)
    }
}

/// A submodule of a window quotient, given by generators in normal form.
#[derive(Debug)]
pub struct WindowSubmodule {
    ctx: Arc<WindowContext>,
    gens: Vec<ModuleVector>,
    form: OnceLock<Form>,
}

#[derive(Debug)]
struct Form {
    span: SparseSpan<Coord>,
    coords: HashSet<Coord>,
}

impl Clone for WindowSubmodule {
    fn clone(&self) -> Self {
        WindowSubmodule { ctx: self.ctx.clone(), gens: self.gens.clone(), form: OnceLock::new() }
    }
}

impl WindowSubmodule {
    /// Span of the given ambient vectors (reduced on entry).
    pub fn new(ctx: &Arc<WindowContext>, gens: impl IntoIterator<Item = ModuleVector>) -> Self {
        let gens = gens.into_iter().map(|g| ctx.reduce(&g)).filter(|g| !g.is_empty()).collect();
        WindowSubmodule { ctx: ctx.clone(), gens, form: OnceLock::new() }
    }

    /// Like [`WindowSubmodule::new`] but keeps zero generators, so indices match the input.
    pub fn indexed(ctx: &Arc<WindowContext>, gens: impl IntoIterator<Item = ModuleVector>) -> Self {
        let gens = gens.into_iter().map(|g| ctx.reduce(&g)).collect();
        WindowSubmodule { ctx: ctx.clone(), gens, form: OnceLock::new() }
    }

    pub fn zero(ctx: &Arc<WindowContext>) -> Self {
        WindowSubmodule { ctx: ctx.clone(), gens: Vec::new(), form: OnceLock::new() }
    }

    pub fn context(&self) -> &Arc<WindowContext> {
        &self.ctx
    }

    /// Generators in normal form.
    pub fn generators(&self) -> &[ModuleVector] {
        &self.gens
    }

    fn form(&self) -> &Form {
        self.form.get_or_init(|| {
            let seeds: Vec<Coord> = self.gens.iter().flat_map(|g| g.keys().cloned()).collect();
            let (rows, coords) = self.ctx.closure(seeds.iter());
            let mut all = self.gens.clone();
            all.extend(rows.iter().map(|&i| self.ctx.background[i].clone()));
            Form { span: SparseSpan::new(&self.ctx.gr.ring, all), coords }
        })
    }

    /// Coefficients over the generators reproducing `v` modulo window relations.
    pub fn membership(&self, v: &ModuleVector) -> Option<Combo> {
        let nf = self.ctx.reduce(v);
        if nf.is_empty() {
            return Some(Combo::new());
        }
        let form = self.form();
        let (inside, outside): (ModuleVector, ModuleVector) =
            nf.into_iter().partition(|(c, _)| form.coords.contains(c));
        if !outside.is_empty() && !self.ctx.is_zero_vector(&outside) {
            return None;
        }
        let combo = form.span.solve(&inside)?;
        Some(combo.into_iter().filter(|(i, _)| *i < self.gens.len()).collect())
    }

    pub fn contains(&self, v: &ModuleVector) -> bool {
        self.membership(v).is_some()
    }

    /// First generator of `self` outside `other`, if any.
    pub fn first_outside(&self, other: &WindowSubmodule) -> Option<ModuleVector> {
        self.gens.iter().find(|g| !other.contains(g)).cloned()
    }

    pub fn is_subset(&self, other: &WindowSubmodule) -> bool {
        self.first_outside(other).is_none()
    }

    pub fn span_eq(&self, other: &WindowSubmodule) -> bool {
        self.is_subset(other) && other.is_subset(self)
    }

    pub fn is_zero(&self) -> bool {
        self.gens.iter().all(|g| self.ctx.is_zero_vector(g))
    }

    /// Drops repeated generators.
    pub fn dedup(mut self) -> Self {
        self.gens.sort();
        self.gens.dedup();
        self.form = OnceLock::new();
        self
    }

    /// `Σ x_i · gen_i`.
    pub fn combine(&self, combo: &Combo) -> ModuleVector {
        recombine(&self.ctx.gr.ring, &self.gens, combo)
    }

    pub fn sum(&self, other: &WindowSubmodule) -> WindowSubmodule {
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        WindowSubmodule { ctx: self.ctx.clone(), gens, form: OnceLock::new() }
    }

    pub fn sum_all<'a>(ctx: &Arc<WindowContext>, parts: impl IntoIterator<Item = &'a WindowSubmodule>) -> WindowSubmodule {
        let gens = parts.into_iter().flat_map(|p| p.gens.iter().cloned()).collect();
        WindowSubmodule { ctx: ctx.clone(), gens, form: OnceLock::new() }
    }

    /// Intersection in the window quotient. The cached form of the larger side is
    /// reused, so intersecting one big submodule with many small ones is cheap.
    pub fn intersect(&self, other: &WindowSubmodule) -> WindowSubmodule {
        let (big, small) = if self.gens.len() >= other.gens.len() { (self, other) } else { (other, self) };
        if small.gens.is_empty() || big.gens.is_empty() {
            return WindowSubmodule::zero(&self.ctx);
        }
        let form = big.form();
        let k = small.gens.len();
        let mut rows: Vec<ModuleVector> = small.gens.iter().map(|g| form.span.remainder(g)).collect();
        rows.extend(form.span.residual_rows().cloned());
        let outside: Vec<Coord> =
            small.gens.iter().flat_map(|g| g.keys()).filter(|c| !form.coords.contains(*c)).cloned().collect();
        if !outside.is_empty() {
            let (extra, _) = self.ctx.closure(outside.iter());
            rows.extend(extra.iter().map(|&i| self.ctx.background[i].clone()));
        }
        let ring = &self.ctx.gr.ring;
        let gens: Vec<ModuleVector> = SparseSpan::new(ring, rows)
            .left_kernel()
            .into_iter()
            .map(|c| {
                let head: Combo = c.into_iter().filter(|(i, _)| *i < k).collect();
                recombine(ring, &small.gens, &head)
            })
            .filter(|v| !v.is_empty())
            .collect();
        WindowSubmodule { ctx: self.ctx.clone(), gens, form: OnceLock::new() }
    }

    /// Relations among the generators modulo the window relations.
    pub fn syzygies(&self) -> Vec<Combo> {
        let k = self.gens.len();
        self.form()
            .span
            .left_kernel()
            .into_iter()
            .map(|c| c.into_iter().filter(|(i, _)| *i < k).collect::<Combo>())
            .filter(|c| !c.is_empty())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::vector::unit;

    fn trivial_z(radius: u32) -> Arc<WindowContext> {
        let gr = GroupRing::new(GroupSpec::free_abelian(1), RingSpec::Integers);
        let rel = gr.row_to_vector(&[gr.parse("t - 1").unwrap()]);
        Arc::new(WindowContext::new(&gr, 1, &[rel], radius).unwrap())
    }

    #[test]
    fn trivial_module_collapses() {
        let ctx = trivial_z(10);
        assert_eq!(ctx.eliminated(), 20);
        let t = |k: i64| GroupElement::Abelian(vec![k]);
        assert_eq!(ctx.reduce(&unit(t(7), 0)), unit(t(0), 0));
        let a = WindowSubmodule::new(&ctx, [unit(t(8), 0)]);
        let b = WindowSubmodule::new(&ctx, [unit(t(-8), 0)]);
        let c = a.intersect(&b);
        assert!(!c.is_zero());
        assert!(c.span_eq(&a));
    }

    #[test]
    fn background_relations() {
        let gr = GroupRing::new(GroupSpec::free_abelian(1), RingSpec::Integers);
        let rel = gr.row_to_vector(&[gr.parse("2").unwrap()]);
        let ctx = Arc::new(WindowContext::new(&gr, 1, &[rel], 3).unwrap());
        assert_eq!(ctx.background_len(), 7);
        let e = GroupElement::Abelian(vec![0]);
        let m = WindowSubmodule::new(&ctx, [unit(e.clone(), 0)]);
        let mut three = unit(e.clone(), 0);
        three.insert((e, 0), crate::ring::scalar::int(3));
        assert!(m.contains(&three));
        let two = WindowSubmodule::new(&ctx, [crate::ring::vector::scale(&gr.ring, &crate::ring::scalar::int(2), &three)]);
        assert!(two.is_zero());
    }
}
