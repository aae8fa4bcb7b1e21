//! Kernels of group-ring morphisms: complete via Gröbner bases for `k[ℤⁿ]`, window-verified otherwise.

use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ring::group_ring::{GroupRing, GroupRingElement, GroupRingMatrix};
use crate::ring::vector::{add_scaled, support_radius, translate, ModuleVector};
use crate::ring::window::{WindowContext, WindowSubmodule};
use crate::space::metric::ball_elements;

use super::groebner::{groebner_basis, lead, reduce, PolyVec, Term};
use super::laurent::{inverse_relations, lift_row, lower_row};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelMode {
    /// Gröbner computation; only for free abelian groups over fields.
    Complete,
    /// Kernel elements supported in the window ball.
    Window(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Completeness {
    GroebnerComplete,
    WindowVerified(u32),
}

impl Completeness {
    pub fn to_json(self) -> Value {
        match self {
            Completeness::GroebnerComplete => json!("groebner-complete"),
            Completeness::WindowVerified(r) => json!(format!("window-verified({r})")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyzygyResult {
    /// Rows `s` with `s·M = 0` (modulo the target relations).
    pub generators: Vec<Vec<GroupRingElement>>,
    pub completeness: Completeness,
}

/// Free abelian group over a field: kernels are computed completely.
pub fn is_tier_a(gr: &GroupRing) -> bool {
    gr.group.is_free_abelian() && gr.ring.is_field()
}

fn rank_of_group(gr: &GroupRing) -> usize {
    gr.group.generators().len()
}

/// Shifts a row so the least support element of its first nonzero entry is `e`, and makes
/// the leading coefficient of that entry one when it is a unit.
pub fn normalize_row(gr: &GroupRing, row: Vec<GroupRingElement>) -> Vec<GroupRingElement> {
    let Some(first) = row.iter().find(|a| !a.is_zero()) else { return row };
    let low = first.support().next().expect("nonzero").clone();
    let (_, lc) = first.terms().last_key_value().expect("nonzero");
    let scale = gr.ring.inverse(lc).unwrap_or_else(|| gr.ring.one());
    let shift = gr.group.inverse(&low);
    row.iter().map(|a| gr.scale(&scale, &gr.left_translate(&shift, a))).collect()
}

fn row_weight(gr: &GroupRing, row: &[GroupRingElement]) -> (usize, u32) {
    let terms = row.iter().map(|a| a.terms().len()).sum();
    let radius = row.iter().map(|a| gr.support_radius(a).unwrap_or(u32::MAX)).max().unwrap_or(0);
    (terms, radius)
}

/// Gröbner basis of the Laurent submodule spanned by `rows` (lifted, with `x_i y_i − 1`).
fn laurent_basis(gr: &GroupRing, rows: &[Vec<GroupRingElement>], cols: usize) -> Vec<PolyVec> {
    let n = rank_of_group(gr);
    let mut gens: Vec<PolyVec> = rows
        .iter()
        .map(|r| {
            let mut v = PolyVec::new();
            lift_row(r, n, 0, &mut v);
            v
        })
        .collect();
    gens.extend(inverse_relations(gr, n, 0..cols));
    groebner_basis(&gr.ring, &gens)
}

/// Laurent membership of `row` in the span of `rows` (Tier A).
pub fn laurent_contains(gr: &GroupRing, rows: &[Vec<GroupRingElement>], row: &[GroupRingElement]) -> bool {
    let basis = laurent_basis(gr, rows, row.len());
    let mut v = PolyVec::new();
    lift_row(row, rank_of_group(gr), 0, &mut v);
    reduce(&gr.ring, &v, &basis).is_empty()
}

/// Keeps a generating subset: lighter rows first, then drops rows spanned by the others.
fn prune_complete(gr: &GroupRing, mut rows: Vec<Vec<GroupRingElement>>) -> Vec<Vec<GroupRingElement>> {
    rows.sort_by_key(|r| row_weight(gr, r));
    rows.dedup();
    let mut kept: Vec<Vec<GroupRingElement>> = Vec::new();
    for r in rows {
        if kept.is_empty() || !laurent_contains(gr, &kept, &r) {
            kept.push(r);
        }
    }
    let mut i = kept.len();
    while i > 0 {
        i -= 1;
        let others: Vec<_> = kept.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, r)| r.clone()).collect();
        if !others.is_empty() && laurent_contains(gr, &others, &kept[i]) {
            kept.remove(i);
        }
    }
    kept
}

/// All `s` with `Σ s_i·rows[i] = 0` in `k[ℤⁿ]^cols`.
fn complete_syzygies(gr: &GroupRing, rows: &[Vec<GroupRingElement>], cols: usize) -> Vec<Vec<GroupRingElement>> {
    let n = rank_of_group(gr);
    let k = rows.len();
    let mut gens: Vec<PolyVec> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut v = PolyVec::new();
            lift_row(r, n, 0, &mut v);
            v.insert(Term { pos: cols + i, mono: vec![0; 2 * n] }, gr.ring.one());
            v
        })
        .collect();
    gens.extend(inverse_relations(gr, n, 0..cols + k));
    groebner_basis(&gr.ring, &gens)
        .iter()
        .filter(|g| lead(g).is_some_and(|(t, _)| t.pos >= cols))
        .map(|g| lower_row(gr, g, n, cols, k))
        .filter(|r| r.iter().any(|a| !a.is_zero()))
        .collect()
}

fn check_rows(rows: &[Vec<GroupRingElement>], cols: usize) -> Result<()> {
    match rows.iter().find(|r| r.len() != cols) {
        Some(r) => Err(Error::DimensionMismatch(format!("row of length {}, expected {cols}", r.len()))),
        None => Ok(()),
    }
}

/// Kernel of `R[Γ]^k → R[Γ]^cols / ⟨relations⟩`, `e_i ↦ rows[i]`.
pub fn presentation_kernel(
    gr: &GroupRing,
    rows: &[Vec<GroupRingElement>],
    relations: &[Vec<GroupRingElement>],
    cols: usize,
    mode: KernelMode,
) -> Result<SyzygyResult> {
    check_rows(rows, cols)?;
    check_rows(relations, cols)?;
    let k = rows.len();
    match mode {
        KernelMode::Complete => {
            if !is_tier_a(gr) {
                return Err(Error::UnsupportedTier(format!(
                    "complete kernels need a free abelian group over a field, got {} over {}",
                    gr.group, gr.ring
                )));
            }
            let mut stacked = rows.to_vec();
            stacked.extend(relations.iter().cloned());
            let projected: Vec<Vec<GroupRingElement>> = complete_syzygies(gr, &stacked, cols)
                .into_iter()
                .map(|s| normalize_row(gr, s[..k].to_vec()))
                .filter(|s| s.iter().any(|a| !a.is_zero()))
                .collect();
            let generators = prune_complete(gr, projected).into_iter().map(|r| normalize_row(gr, r)).collect();
            Ok(SyzygyResult { generators, completeness: Completeness::GroebnerComplete })
        }
        KernelMode::Window(r) => window_kernel_rows(gr, rows, relations, cols, r),
    }
}

/// Kernel of `v ↦ v·M` between free modules.
pub fn kernel_of(gr: &GroupRing, m: &GroupRingMatrix, mode: KernelMode) -> Result<SyzygyResult> {
    let rows: Vec<_> = (0..m.rows).map(|i| m.row(i)).collect();
    presentation_kernel(gr, &rows, &[], m.cols, mode)
}

/// Kernel vectors of `e_i ↦ rows[i]` over `ball(e, r)`, as coordinates of the source.
pub fn window_kernel_vectors(
    gr: &GroupRing,
    rows: &[Vec<GroupRingElement>],
    relations: &[Vec<GroupRingElement>],
    cols: usize,
    r: u32,
) -> Result<Vec<ModuleVector>> {
    let spec = &gr.group;
    let images: Vec<ModuleVector> = rows.iter().map(|row| gr.row_to_vector(row)).collect();
    let mut reach = 0;
    for v in &images {
        reach = reach.max(support_radius(spec, v)?);
    }
    let rel: Vec<ModuleVector> = relations.iter().map(|row| gr.row_to_vector(row)).collect();
    let ctx = Arc::new(WindowContext::new(gr, cols, &rel, r + reach)?);
    let ball = ball_elements(spec, &spec.identity(), r)?;
    let mut sources = Vec::new();
    let mut targets = Vec::new();
    for x in &ball {
        for (i, v) in images.iter().enumerate() {
            sources.push((x.clone(), i));
            targets.push(translate(spec, x, v));
        }
    }
    let span = WindowSubmodule::indexed(&ctx, targets);
    Ok(span
        .syzygies()
        .into_iter()
        .map(|combo| {
            let mut k = ModuleVector::new();
            for (j, c) in combo {
                let (x, i) = &sources[j];
                add_scaled(&gr.ring, &mut k, &c, &crate::ring::vector::unit(x.clone(), *i));
            }
            k
        })
        .filter(|k| !k.is_empty())
        .collect())
}

fn window_kernel_rows(
    gr: &GroupRing,
    rows: &[Vec<GroupRingElement>],
    relations: &[Vec<GroupRingElement>],
    cols: usize,
    r: u32,
) -> Result<SyzygyResult> {
    let k = rows.len();
    let spec = &gr.group;
    let mut candidates = window_kernel_vectors(gr, rows, relations, cols, r)?;
    candidates.sort_by_key(|v| (v.len(), support_radius(spec, v).unwrap_or(u32::MAX)));
    let ctx = Arc::new(WindowContext::free(gr, k, r)?);
    let ball = ball_elements(spec, &spec.identity(), r)?;
    let mut kept: Vec<Vec<GroupRingElement>> = Vec::new();
    let mut span = WindowSubmodule::zero(&ctx);
    for v in candidates {
        if span.contains(&v) {
            continue;
        }
        // The normalised row is a translate of `v` by an element of the window, so its
        // translates still reach `v`.
        kept.push(normalize_row(gr, gr.vector_to_row(&v, k)));
        let translates: Vec<ModuleVector> = kept
            .iter()
            .flat_map(|g| {
                let gv = gr.row_to_vector(g);
                ball.iter().map(move |x| translate(spec, x, &gv)).collect::<Vec<_>>()
            })
            .collect();
        span = WindowSubmodule::new(&ctx, translates);
    }
    Ok(SyzygyResult { generators: kept, completeness: Completeness::WindowVerified(r) })
}
