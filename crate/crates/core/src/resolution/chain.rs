//! Free covers and resolutions `… → F₁ → F₀ → F → 0`.

use std::sync::Arc;

use serde_json::{json, Value};

use crate::certificate::{CertificateKind, ControlCertificate, Counterexample};
use crate::control::{minimal_bicontrol, FilteredMorphism};
use crate::error::Result;
use crate::filtered::{
    check_insular, check_lean, minimal_constant, FilteredModule, Generator, Insularity, PresentedModule, SamplingPlan,
};
use crate::ring::group_ring::{GroupRing, GroupRingElement, GroupRingMatrix};
use crate::ring::vector::translate;
use crate::ring::window::{WindowContext, WindowSubmodule};
use crate::space::metric::ball_elements;

use super::kernel::{is_tier_a, presentation_kernel, window_kernel_vectors, Completeness, KernelMode};

/// `F₀ = R[Γ]^|Σ|` with the product filtration and `π(e_i) = σ_i`.
#[derive(Debug, Clone)]
pub struct FreeCover {
    pub rank: usize,
    pub projection: FilteredMorphism,
}

pub fn free_cover(f: &PresentedModule) -> Result<FreeCover> {
    let rank = f.sigma.len();
    let rows: Vec<Vec<GroupRingElement>> = f.sigma.iter().map(|g| g.value.clone()).collect();
    let pi = GroupRingMatrix::from_rows(rows, f.rank)?;
    let source = FilteredModule::product_canonical(PresentedModule::free(&f.gr, rank))?;
    let projection = FilteredMorphism::new(source, FilteredModule::standard(f.clone()), pi)?;
    Ok(FreeCover { rank, projection })
}

impl FreeCover {
    pub fn matrix(&self) -> &GroupRingMatrix {
        self.projection.matrix().expect("group-ring projection")
    }

    /// Least bicontrol constant of `π` found in the window.
    pub fn certify(&self, r: u32, plan: &SamplingPlan) -> Result<ControlCertificate> {
        minimal_bicontrol(&self.projection, 0, r.saturating_sub(1) / 2, r, plan)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolveOptions {
    pub max_depth: usize,
    /// `None` picks complete kernels when available, window kernels otherwise.
    pub mode: Option<KernelMode>,
    /// Window for exactness and lean/insular certificates.
    pub radius: u32,
    pub plan: SamplingPlan,
    pub certify: bool,
}

impl Default for ResolveOptions {
    fn default() -> Self {
        ResolveOptions { max_depth: 4, mode: None, radius: 6, plan: SamplingPlan::light(0), certify: true }
    }
}

#[derive(Debug, Clone)]
pub struct StageReport {
    /// Stage `i` describes `d_i: F_i → F_{i−1}`; stage 0 is `π`.
    pub index: usize,
    pub bound: u32,
    /// `d_i ∘ d_{i−1} = 0`, exactly (`d₁∘π` vanishes in `F`).
    pub composition: Option<ControlCertificate>,
    /// Window kernel of `d_i` is hit by `d_{i+1}` (or is zero when the chain stops).
    pub exactness: ControlCertificate,
    /// Minimal constants of the kernel `im d_{i+1}` under its standard filtration.
    pub lean: Option<ControlCertificate>,
    pub insular: Option<ControlCertificate>,
}

#[derive(Debug, Clone)]
pub struct ResolutionChain {
    pub module: PresentedModule,
    pub completeness: Completeness,
    pub ranks: Vec<usize>,
    pub augmentation: GroupRingMatrix,
    /// `d₁, d₂, …` with `d_i` a `rank_i × rank_{i−1}` matrix.
    pub differentials: Vec<GroupRingMatrix>,
    pub terminated: bool,
    pub stages: Vec<StageReport>,
}

fn matrix_rows(m: &GroupRingMatrix) -> Vec<Vec<GroupRingElement>> {
    (0..m.rows).map(|i| m.row(i)).collect()
}

/// Every window kernel vector of `map` (rows over `relations`) lies in the span of
/// translates of `next`'s rows over `ball(e, r + slack)`.
fn window_exactness(
    gr: &GroupRing,
    map: &GroupRingMatrix,
    relations: &[Vec<GroupRingElement>],
    next: Option<&GroupRingMatrix>,
    r: u32,
    slack: u32,
) -> Result<ControlCertificate> {
    let kernel = window_kernel_vectors(gr, &matrix_rows(map), relations, map.cols, r)?;
    let note = format!("slack {slack}");
    let Some(next) = next else {
        return Ok(match kernel.into_iter().next() {
            None => ControlCertificate::pass(CertificateKind::Exactness, slack, r).with_note("window kernel is zero"),
            Some(k) => ControlCertificate::fail(
                CertificateKind::Exactness,
                slack,
                r,
                Counterexample::Subsets { s: Vec::new(), u: None, witness: k },
            )
            .with_note("nonzero kernel at the end of the chain"),
        });
    };
    let spec = &gr.group;
    let reach = next.support_radius(gr)?;
    let ctx = Arc::new(WindowContext::free(gr, map.rows, r + slack + reach)?);
    let ball = ball_elements(spec, &spec.identity(), r + slack)?;
    let rows: Vec<_> = (0..next.rows).map(|i| next.row_vector(gr, i)).collect();
    let image = WindowSubmodule::new(&ctx, ball.iter().flat_map(|x| rows.iter().map(move |v| translate(spec, x, v))));
    Ok(match kernel.into_iter().find(|k| !image.contains(k)) {
        None => ControlCertificate::pass(CertificateKind::Exactness, slack, r).with_note(note),
        Some(k) => ControlCertificate::fail(
            CertificateKind::Exactness,
            slack,
            r,
            Counterexample::Subsets { s: Vec::new(), u: None, witness: k },
        )
        .with_note(note),
    })
}

fn composition_certificate(gr: &GroupRing, product: &GroupRingMatrix, relations: &[Vec<GroupRingElement>], r: u32) -> Result<ControlCertificate> {
    let reach = product.support_radius(gr)?;
    let rel: Vec<_> = relations.iter().map(|row| gr.row_to_vector(row)).collect();
    let ctx = WindowContext::new(gr, product.cols, &rel, reach.max(r))?;
    for i in 0..product.rows {
        let v = product.row_vector(gr, i);
        if !ctx.is_zero_vector(&v) {
            return Ok(ControlCertificate::fail(
                CertificateKind::Exactness,
                0,
                ctx.radius(),
                Counterexample::Subsets { s: Vec::new(), u: None, witness: v },
            )
            .with_note("composition"));
        }
    }
    Ok(ControlCertificate::pass(CertificateKind::Exactness, 0, ctx.radius()).with_note("composition"))
}

fn kernel_certificates(
    gr: &GroupRing,
    ambient_rank: usize,
    gens: &[Vec<GroupRingElement>],
    opts: &ResolveOptions,
) -> Result<(Option<ControlCertificate>, Option<ControlCertificate>)> {
    if !opts.certify || gens.is_empty() {
        return Ok((None, None));
    }
    let sigma = gens
        .iter()
        .enumerate()
        .map(|(i, g)| Generator { label: format!("k{}", i + 1), value: g.clone() })
        .collect();
    let k = FilteredModule::standard(PresentedModule::free(gr, ambient_rank).with_sigma(sigma)?);
    let win = k.window(opts.radius)?;
    let top = opts.radius.saturating_sub(1) / 2;
    let pick = |(found, tried): (Option<ControlCertificate>, Vec<ControlCertificate>)| found.or_else(|| tried.last().cloned());
    let lean = pick(minimal_constant(top, |c| check_lean(&win, c, &opts.plan))?);
    let insular = pick(minimal_constant(top, |c| check_insular(&win, c, &opts.plan, Insularity::Strict))?);
    Ok((lean, insular))
}

/// Iterates free covers and kernels until the kernel vanishes or `max_depth` stages exist.
pub fn resolve(f: &PresentedModule, opts: &ResolveOptions) -> Result<ResolutionChain> {
    let gr = &f.gr;
    let mode = opts.mode.unwrap_or(if is_tier_a(gr) { KernelMode::Complete } else { KernelMode::Window(opts.radius) });
    let cover = free_cover(f)?;
    let augmentation = cover.matrix().clone();
    let relations = matrix_rows(&f.relations);
    let mut ranks = vec![cover.rank];
    let mut differentials: Vec<GroupRingMatrix> = Vec::new();
    let mut completeness = Completeness::GroebnerComplete;
    let mut terminated = false;
    for depth in 0..=opts.max_depth {
        let (map, rels) = match differentials.last() {
            None => (&augmentation, relations.as_slice()),
            Some(d) => (d, &[][..]),
        };
        let kernel = presentation_kernel(gr, &matrix_rows(map), rels, map.cols, mode)?;
        completeness = kernel.completeness;
        if kernel.generators.is_empty() {
            terminated = true;
            break;
        }
        if depth == opts.max_depth {
            break;
        }
        ranks.push(kernel.generators.len());
        differentials.push(GroupRingMatrix::from_rows(kernel.generators, map.rows)?);
    }

    let mut stages = Vec::new();
    let maps: Vec<&GroupRingMatrix> = std::iter::once(&augmentation).chain(differentials.iter()).collect();
    for (i, map) in maps.iter().enumerate() {
        let bound = map.support_radius(gr)?;
        let rels: &[Vec<GroupRingElement>] = if i == 0 { &relations } else { &[] };
        let composition = match i {
            0 => None,
            1 => Some(composition_certificate(gr, &map.mul(gr, &augmentation)?, &relations, opts.radius)?),
            _ => Some(composition_certificate(gr, &map.mul(gr, maps[i - 1])?, &[], opts.radius)?),
        };
        let next = maps.get(i + 1).copied();
        let slack = bound + next.map_or(Ok(0), |n| n.support_radius(gr))?;
        let exactness = if next.is_none() && !terminated {
            ControlCertificate::fail(
                CertificateKind::Exactness,
                slack,
                opts.radius,
                Counterexample::Message("depth exhausted before the kernel vanished".into()),
            )
        } else {
            window_exactness(gr, map, rels, next, opts.radius, slack)?
        };
        let (lean, insular) = match next {
            Some(n) => kernel_certificates(gr, map.rows, &matrix_rows(n), opts)?,
            None => (None, None),
        };
        stages.push(StageReport { index: i, bound, composition, exactness, lean, insular });
    }
    Ok(ResolutionChain { module: f.clone(), completeness, ranks, augmentation, differentials, terminated, stages })
}

impl ResolutionChain {
    pub fn length(&self) -> usize {
        self.differentials.len()
    }

    /// `d_{i+1}·d_i = 0` for every consecutive pair, as exact matrix products.
    pub fn composes_to_zero(&self) -> Result<bool> {
        let gr = &self.module.gr;
        for w in self.differentials.windows(2) {
            if !w[1].mul(gr, &w[0])?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn passed(&self) -> bool {
        self.terminated
            && self.stages.iter().all(|s| s.exactness.passed() && s.composition.as_ref().is_none_or(ControlCertificate::passed))
    }

    pub fn to_json(&self) -> Value {
        let gr = &self.module.gr;
        let spec = &gr.group;
        let cert = |c: &Option<ControlCertificate>| c.as_ref().map(|c| c.to_json(spec));
        json!({
            "module": self.module.to_json(),
            "completeness": self.completeness.to_json(),
            "ranks": self.ranks,
            "length": self.length(),
            "terminated": self.terminated,
            "augmentation": self.augmentation.to_json(gr),
            "differentials": self.differentials.iter().map(|d| d.to_json(gr)).collect::<Vec<_>>(),
            "stages": self.stages.iter().map(|s| json!({
                "index": s.index,
                "bound": s.bound,
                "composition": cert(&s.composition),
                "exactness": s.exactness.to_json(spec),
                "kernel_lean": cert(&s.lean),
                "kernel_insular": cert(&s.insular),
            })).collect::<Vec<_>>(),
        })
    }
}
