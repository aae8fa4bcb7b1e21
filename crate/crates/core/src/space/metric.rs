//! Finite subsets of a group under its word metric: balls, enlargements, diameters.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde_json::{json, Value};

use super::bs;
use super::group::{push_letter, Family, GroupElement, GroupSpec, Letter};
use crate::error::{Error, Result};

/// A finite subset, either listed explicitly (sorted, no duplicates) or as a ball.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MetricSubset {
    Explicit(Vec<GroupElement>),
    Ball { center: GroupElement, radius: u32 },
}

impl MetricSubset {
    pub fn empty() -> Self {
        MetricSubset::Explicit(Vec::new())
    }

    pub fn singleton(g: GroupElement) -> Self {
        MetricSubset::Explicit(vec![g])
    }

    /// Builds an explicit subset, checking membership in the group and canonicalising order.
    pub fn explicit(spec: &GroupSpec, elements: impl IntoIterator<Item = GroupElement>) -> Result<Self> {
        let mut v: Vec<GroupElement> = elements.into_iter().collect();
        if let Some(bad) = v.iter().find(|g| !spec.contains(g)) {
            return Err(Error::MalformedWord(format!("{bad:?} is not a normal form of {spec}")));
        }
        v.sort();
        v.dedup();
        Ok(MetricSubset::Explicit(v))
    }

    pub(crate) fn from_sorted(v: Vec<GroupElement>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        MetricSubset::Explicit(v)
    }

    pub fn parse(spec: &GroupSpec, words: &[String]) -> Result<Self> {
        let elems = words.iter().map(|w| spec.parse_word(w)).collect::<Result<Vec<_>>>()?;
        MetricSubset::explicit(spec, elems)
    }

    /// Materialises the subset as a sorted element list.
    pub fn elements(&self, spec: &GroupSpec) -> Result<Vec<GroupElement>> {
        match self {
            MetricSubset::Explicit(v) => Ok(v.clone()),
            MetricSubset::Ball { center, radius } => ball_elements(spec, center, *radius),
        }
    }

    pub fn to_json(&self, spec: &GroupSpec) -> Result<Value> {
        let elems = self.elements(spec)?;
        Ok(json!({ "elements": elems.iter().map(|g| spec.format(g)).collect::<Vec<_>>() }))
    }

    pub fn from_json(spec: &GroupSpec, v: &Value) -> Result<Self> {
        let arr = v
            .get("elements")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidTask("subset must be {\"elements\":[...]}".into()))?;
        let words = arr
            .iter()
            .map(|w| w.as_str().map(str::to_string).ok_or_else(|| Error::InvalidTask("element must be a word string".into())))
            .collect::<Result<Vec<_>>>()?;
        MetricSubset::parse(spec, &words)
    }
}

/// Sorted intersection of two sorted element lists.
pub fn intersect_sorted(a: &[GroupElement], b: &[GroupElement]) -> Vec<GroupElement> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i].clone());
                i += 1;
                j += 1;
            }
        }
    }
    out
}

pub fn is_subset_sorted(a: &[GroupElement], b: &[GroupElement]) -> bool {
    intersect_sorted(a, b).len() == a.len()
}

fn abelian_ball(n: usize, r: u32) -> Vec<Vec<i64>> {
    fn rec(prefix: &mut Vec<i64>, left: usize, budget: i64, out: &mut Vec<Vec<i64>>) {
        if left == 0 {
            out.push(prefix.clone());
            return;
        }
        for x in -budget..=budget {
            prefix.push(x);
            rec(prefix, left - 1, budget - x.abs(), out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), n, r as i64, &mut out);
    out
}

/// Reduced words over `k` free generators grouped by length `0..=r`.
fn free_words_by_length(k: usize, r: u32) -> Vec<Vec<Vec<Letter>>> {
    let mut layers: Vec<Vec<Vec<Letter>>> = vec![vec![Vec::new()]];
    for _ in 0..r {
        let mut next = Vec::new();
        for w in layers.last().expect("nonempty") {
            for g in 1..=k as Letter {
                for l in [g, -g] {
                    if w.last() != Some(&-l) {
                        let mut v = w.clone();
                        v.push(l);
                        next.push(v);
                    }
                }
            }
        }
        layers.push(next);
    }
    layers
}

/// The ball `x[r]` as a sorted element list.
///
/// Closed-form families enumerate directly; Baumslag–Solitar balls come from the
/// breadth-first table and respect the radius cap.
pub fn ball_elements(spec: &GroupSpec, center: &GroupElement, r: u32) -> Result<Vec<GroupElement>> {
    let around_identity: Vec<GroupElement> = match spec.family() {
        Family::FreeAbelian(n) => abelian_ball(*n, r).into_iter().map(GroupElement::Abelian).collect(),
        Family::Free(k) => free_words_by_length(*k, r).into_iter().flatten().map(GroupElement::Free).collect(),
        Family::ProductOfTrees(ranks) => {
            let layers: Vec<_> = ranks.iter().map(|k| free_words_by_length(*k, r)).collect();
            let mut out: Vec<Vec<Vec<Letter>>> = vec![Vec::new()];
            let mut used: Vec<u32> = vec![0];
            for factor in &layers {
                let mut next = Vec::new();
                let mut next_used = Vec::new();
                for (prefix, u) in out.iter().zip(&used) {
                    for (len, words) in factor.iter().enumerate() {
                        if u + len as u32 > r {
                            break;
                        }
                        for w in words {
                            let mut p = prefix.clone();
                            p.push(w.clone());
                            next.push(p);
                            next_used.push(u + len as u32);
                        }
                    }
                }
                out = next;
                used = next_used;
            }
            out.into_iter().map(GroupElement::Product).collect()
        }
        Family::BaumslagSolitar(m, n) => {
            bs::ball(*m, *n, r, spec.radius_cap())?.into_iter().map(GroupElement::Bs).collect()
        }
    };
    let is_identity = *center == spec.identity();
    let mut out: Vec<GroupElement> = if is_identity {
        around_identity
    } else {
        around_identity.iter().map(|w| translate(spec, center, w)).collect()
    };
    out.sort();
    Ok(out)
}

fn translate(spec: &GroupSpec, center: &GroupElement, w: &GroupElement) -> GroupElement {
    match (center, w) {
        (GroupElement::Free(c), GroupElement::Free(x)) => {
            let mut v = c.clone();
            for &l in x {
                push_letter(&mut v, l);
            }
            GroupElement::Free(v)
        }
        _ => spec.mul(center, w),
    }
}

/// The ball `x[r]` as a metric subset.
pub fn ball(spec: &GroupSpec, center: &GroupElement, r: u32) -> Result<MetricSubset> {
    Ok(MetricSubset::from_sorted(ball_elements(spec, center, r)?))
}

/// The metric `b`-enlargement `S[b]`: the union of the balls of radius `b` about points of `S`.
pub fn enlarge(spec: &GroupSpec, s: &MetricSubset, b: u32) -> Result<MetricSubset> {
    let points = s.elements(spec)?;
    if b == 0 {
        return Ok(MetricSubset::from_sorted(points));
    }
    Ok(MetricSubset::from_sorted(enlarge_elements(spec, &points, b)?))
}

pub fn enlarge_elements(spec: &GroupSpec, points: &[GroupElement], b: u32) -> Result<Vec<GroupElement>> {
    if b == 0 {
        return Ok(points.to_vec());
    }
    let unit = ball_elements(spec, &spec.identity(), b)?;
    let set: BTreeSet<GroupElement> = points
        .par_iter()
        .map(|p| unit.iter().map(|w| translate(spec, p, w)).collect::<Vec<_>>())
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    Ok(set.into_iter().collect())
}

/// Largest pairwise distance; 0 for sets with fewer than two points.
pub fn diameter(spec: &GroupSpec, points: &[GroupElement]) -> Result<u32> {
    let mut best = 0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.max(spec.distance(a, b)?);
        }
    }
    Ok(best)
}

/// Distance from a point to a finite nonempty set.
pub fn distance_to_set(spec: &GroupSpec, p: &GroupElement, set: &[GroupElement]) -> Result<Option<u32>> {
    let mut best: Option<u32> = None;
    for q in set {
        let d = spec.distance(p, q)?;
        best = Some(best.map_or(d, |b| b.min(d)));
    }
    Ok(best)
}
