//! Uniformly bounded, R-disjoint covers certifying asymptotic dimension at window scale.
//!
//! `ℤ` is tiled by half-open intervals of side `R+1` in two alternating families.
//! Every other tree-like family (ℤⁿ as a product of lines, free groups, products of
//! trees) uses a layered construction with `m+1` families for `m` tree factors: each
//! factor has boundary levels at multiples of a cell length `L`, a point's colour is the
//! first threshold `τ_j = j·(R+1)` at which its set of near-boundary factors stabilises,
//! and members are keyed by that set plus per-factor anchors (the ancestor at a fixed
//! level). Distinct members of one colour differ in some factor by more than `R`.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde_json::{json, Value};

use super::group::{Family, GroupElement, GroupSpec, Letter};
use super::metric::{ball_elements, MetricSubset};
use crate::certificate::{CertificateKind, ControlCertificate, Counterexample};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum CoverScheme {
    /// Alternating intervals `[k·side, (k+1)·side)` of ℤ, family = parity of `k`.
    Intervals { side: i64 },
    /// Layered threshold construction over `factors` tree factors.
    Layered { factors: usize, gap: u64, cell: u64 },
    /// Explicitly listed members.
    Explicit(Vec<Vec<MetricSubset>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cover {
    pub scheme: CoverScheme,
    pub families: usize,
    /// Uniform diameter bound of members.
    pub bound: u32,
    pub separation: u32,
}

/// Identifies one member of one family.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MemberKey {
    Index(usize),
    Interval(i64),
    Layered { near: Vec<bool>, anchors: Vec<(u64, Vec<Letter>)> },
}

/// Reads a group element as one reduced tree word per factor. ℤ coordinates become
/// words in a single letter, so the line is a rooted tree with two branches.
fn tree_words(g: &GroupElement) -> Vec<Vec<Letter>> {
    match g {
        GroupElement::Abelian(v) => v
            .iter()
            .map(|x| vec![if *x >= 0 { 1 } else { -1 }; x.unsigned_abs() as usize])
            .collect(),
        GroupElement::Free(w) => vec![w.clone()],
        GroupElement::Product(ws) => ws.clone(),
        GroupElement::Bs(_) => unreachable!("no tree structure"),
    }
}

fn near_distance(level: u64, cell: u64) -> u64 {
    let r = level % cell;
    r.min(cell - r)
}

fn layered_label(words: &[Vec<Letter>], gap: u64, cell: u64) -> (usize, MemberKey) {
    let m = words.len();
    let levels: Vec<u64> = words.iter().map(|w| w.len() as u64).collect();
    let deltas: Vec<u64> = levels.iter().map(|l| near_distance(*l, cell)).collect();
    let count = |j: usize| deltas.iter().filter(|d| **d <= j as u64 * gap).count();
    let colour = (0..=m).find(|&j| count(j) == count(j + 1)).expect("pigeonhole on m+2 counts");
    let tau = colour as u64 * gap;
    let horizon = (m as u64 + 1) * gap;
    let mut near = Vec::with_capacity(m);
    let mut anchors = Vec::with_capacity(m);
    for (w, (&level, &delta)) in words.iter().zip(levels.iter().zip(&deltas)) {
        if delta <= tau {
            let boundary = ((level + cell / 2) / cell) * cell;
            let anchor_level = boundary.saturating_sub(horizon) as usize;
            near.push(true);
            anchors.push((boundary, w[..anchor_level.min(w.len())].to_vec()));
        } else {
            let q = level / cell;
            near.push(false);
            anchors.push((q, w[..(q * cell) as usize].to_vec()));
        }
    }
    (colour, MemberKey::Layered { near, anchors })
}

impl Cover {
    /// Labels of the members containing `x`, as (family, member) pairs.
    pub fn labels(&self, x: &GroupElement, explicit_index: Option<&HashMap<GroupElement, Vec<(usize, usize)>>>) -> Vec<(usize, MemberKey)> {
        match &self.scheme {
            CoverScheme::Intervals { side } => {
                let v = match x {
                    GroupElement::Abelian(v) => v[0],
                    _ => unreachable!(),
                };
                let k = v.div_euclid(*side);
                vec![(k.rem_euclid(2) as usize, MemberKey::Interval(k))]
            }
            CoverScheme::Layered { gap, cell, .. } => {
                let (c, key) = layered_label(&tree_words(x), *gap, *cell);
                vec![(c, key)]
            }
            CoverScheme::Explicit(_) => explicit_index
                .and_then(|idx| idx.get(x))
                .map(|v| v.iter().map(|(f, i)| (*f, MemberKey::Index(*i))).collect())
                .unwrap_or_default(),
        }
    }

    fn explicit_index(&self, spec: &GroupSpec) -> Result<Option<HashMap<GroupElement, Vec<(usize, usize)>>>> {
        let CoverScheme::Explicit(families) = &self.scheme else { return Ok(None) };
        let mut idx: HashMap<GroupElement, Vec<(usize, usize)>> = HashMap::new();
        for (f, fam) in families.iter().enumerate() {
            for (i, member) in fam.iter().enumerate() {
                for g in member.elements(spec)? {
                    idx.entry(g).or_default().push((f, i));
                }
            }
        }
        Ok(Some(idx))
    }

    /// Restricts the cover to a window, producing explicit members.
    pub fn restrict(&self, spec: &GroupSpec, window: &MetricSubset) -> Result<Cover> {
        let points = window.elements(spec)?;
        let idx = self.explicit_index(spec)?;
        let mut grouped: Vec<BTreeMap<MemberKey, Vec<GroupElement>>> = vec![BTreeMap::new(); self.families];
        for p in &points {
            for (f, key) in self.labels(p, idx.as_ref()) {
                grouped[f].entry(key).or_default().push(p.clone());
            }
        }
        let families = grouped
            .into_iter()
            .map(|fam| fam.into_values().map(MetricSubset::from_sorted).collect())
            .collect();
        Ok(Cover { scheme: CoverScheme::Explicit(families), families: self.families, bound: self.bound, separation: self.separation })
    }

    /// JSON shape `{"families":[[{"elements":[...]}, ...]], "bound":B, "separation":R}`,
    /// with scheme covers restricted to `window`.
    pub fn to_json(&self, spec: &GroupSpec, window: &MetricSubset) -> Result<Value> {
        let explicit = match &self.scheme {
            CoverScheme::Explicit(_) => self.clone(),
            _ => self.restrict(spec, window)?,
        };
        let CoverScheme::Explicit(families) = &explicit.scheme else { unreachable!() };
        let fams = families
            .iter()
            .map(|fam| fam.iter().map(|m| m.to_json(spec)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(json!({"families": fams, "bound": self.bound, "separation": self.separation}))
    }

    pub fn from_json(spec: &GroupSpec, v: &Value) -> Result<Cover> {
        let bad = |m: &str| Error::InvalidTask(format!("cover: {m}"));
        let fams = v.get("families").and_then(Value::as_array).ok_or_else(|| bad("missing families"))?;
        let families = fams
            .iter()
            .map(|f| {
                f.as_array()
                    .ok_or_else(|| bad("family must be a list"))?
                    .iter()
                    .map(|m| MetricSubset::from_json(spec, m))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let bound = v.get("bound").and_then(Value::as_u64).ok_or_else(|| bad("missing bound"))? as u32;
        let separation = v.get("separation").and_then(Value::as_u64).ok_or_else(|| bad("missing separation"))? as u32;
        Ok(Cover { families: families.len(), scheme: CoverScheme::Explicit(families), bound, separation })
    }
}

/// Builds an R-disjoint cover with `asdim + 1` families for the tree-like families.
pub fn build_cover(spec: &GroupSpec, separation: u32) -> Result<Cover> {
    let r = separation as u64;
    if let Family::FreeAbelian(1) = spec.family() {
        return Ok(Cover {
            scheme: CoverScheme::Intervals { side: r as i64 + 1 },
            families: 2,
            bound: separation,
            separation,
        });
    }
    let m = spec
        .tree_factors()
        .ok_or_else(|| Error::UnsupportedFamily(format!("no constructive cover for {spec}")))?;
    let gap = r + 1;
    let cell = 2 * (m as u64 + 1) * gap;
    // per factor: near pieces have diameter ≤ 2(horizon + τ_m) < 2·cell, far pieces ≤ 2·cell
    let bound = (m as u64 * 2 * cell) as u32;
    Ok(Cover { scheme: CoverScheme::Layered { factors: m, gap, cell }, families: m + 1, bound, separation })
}

/// Checks, inside `window`, that members are uniformly bounded by `cover.bound`, that each
/// family is `separation`-disjoint and that the families cover the window.
pub fn verify_cover(spec: &GroupSpec, cover: &Cover, separation: u32, window: &MetricSubset) -> Result<ControlCertificate> {
    let points = window.elements(spec)?;
    let radius = match window {
        MetricSubset::Ball { radius, .. } => *radius,
        MetricSubset::Explicit(_) => 0,
    };
    let idx = cover.explicit_index(spec)?;
    let labels: HashMap<&GroupElement, Vec<(usize, MemberKey)>> =
        points.par_iter().map(|p| (p, cover.labels(p, idx.as_ref()))).collect();

    let mut ordered: Vec<&GroupElement> = points.iter().collect();
    ordered.sort();
    for p in &ordered {
        if labels[p].is_empty() {
            return Ok(ControlCertificate::fail(CertificateKind::Cover, cover.bound, radius, Counterexample::UncoveredPoint {
                point: (*p).clone(),
            }));
        }
    }

    let mut members: BTreeMap<(usize, MemberKey), Vec<GroupElement>> = BTreeMap::new();
    for p in &ordered {
        for l in &labels[p] {
            members.entry(l.clone()).or_default().push((*p).clone());
        }
    }
    for ((family, _), pts) in &members {
        if let Some((a, b, d)) = diameter_violation(spec, pts, cover.bound)? {
            return Ok(ControlCertificate::fail(CertificateKind::Cover, cover.bound, radius, Counterexample::Diameter {
                family: *family,
                first: a,
                second: b,
                distance: d,
            }));
        }
    }

    let unit = ball_elements(spec, &spec.identity(), separation)?;
    let violation = ordered
        .par_iter()
        .map(|p| -> Result<Option<Counterexample>> {
            let lp = &labels[p];
            for w in &unit {
                let q = spec.mul(p, w);
                let Some(lq) = labels.get(&q) else { continue };
                for (fa, ka) in lp {
                    for (fb, kb) in lq {
                        if fa == fb && ka != kb {
                            return Ok(Some(Counterexample::Disjointness {
                                family: *fa,
                                first: (*p).clone(),
                                second: q,
                                distance: spec.distance(p, &spec.mul(p, w))?,
                            }));
                        }
                    }
                }
            }
            Ok(None)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .next();
    if let Some(c) = violation {
        return Ok(ControlCertificate::fail(CertificateKind::Cover, cover.bound, radius, c));
    }
    Ok(ControlCertificate::pass(CertificateKind::Cover, cover.bound, radius)
        .with_note(format!("{} families, separation {separation}", cover.families)))
}

fn diameter_violation(spec: &GroupSpec, pts: &[GroupElement], bound: u32) -> Result<Option<(GroupElement, GroupElement, u32)>> {
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            let d = spec.distance(a, b)?;
            if d > bound {
                return Ok(Some((a.clone(), b.clone(), d)));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::metric::ball;

    #[test]
    fn integer_intervals() {
        let z = GroupSpec::free_abelian(1);
        let c = build_cover(&z, 5).unwrap();
        assert_eq!(c.families, 2);
        let w = ball(&z, &z.identity(), 100).unwrap();
        assert!(verify_cover(&z, &c, 5, &w).unwrap().passed());
        let r = c.restrict(&z, &ball(&z, &z.identity(), 3).unwrap()).unwrap();
        let CoverScheme::Explicit(f) = r.scheme else { panic!() };
        assert_eq!(f[0][0].elements(&z).unwrap().len(), 4);
    }

    #[test]
    fn singletons_fail_one_disjointness() {
        let z = GroupSpec::free_abelian(1);
        let w = ball(&z, &z.identity(), 5).unwrap();
        let singles = w.elements(&z).unwrap().into_iter().map(MetricSubset::singleton).collect();
        let c = Cover { scheme: CoverScheme::Explicit(vec![singles]), families: 1, bound: 0, separation: 1 };
        let cert = verify_cover(&z, &c, 1, &w).unwrap();
        assert!(!cert.passed());
        assert!(matches!(cert.counterexample, Some(Counterexample::Disjointness { distance: 1, .. })));
    }

    #[test]
    fn unsupported_family() {
        let g = GroupSpec::baumslag_solitar(2, 3).unwrap();
        assert!(matches!(build_cover(&g, 2), Err(Error::UnsupportedFamily(_))));
    }
}
