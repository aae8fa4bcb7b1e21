//! Laurent polynomials `k[t₁^{±1},…,t_n^{±1}]` as quotients of `k[x₁,…,x_n,y₁,…,y_n]` by `x_i y_i − 1`.

use std::collections::BTreeMap;

use crate::ring::group_ring::{GroupRing, GroupRingElement};
use crate::ring::scalar::Scalar;
use crate::space::group::GroupElement;

use super::groebner::{Monomial, PolyVec, Term};

/// `t^e ↦ x^e` for `e ≥ 0` and `y^{−e}` otherwise, coordinatewise.
pub fn lift_monomial(g: &GroupElement, n: usize) -> Monomial {
    let GroupElement::Abelian(e) = g else { panic!("Laurent lift needs a free abelian group") };
    let mut m = vec![0; 2 * n];
    for (i, &k) in e.iter().enumerate() {
        if k >= 0 {
            m[i] = k as u32;
        } else {
            m[n + i] = (-k) as u32;
        }
    }
    m
}

pub fn lower_monomial(m: &Monomial, n: usize) -> GroupElement {
    GroupElement::Abelian((0..n).map(|i| m[i] as i64 - m[n + i] as i64).collect())
}

/// Places `row` at positions `offset..offset + row.len()`.
pub fn lift_row(row: &[GroupRingElement], n: usize, offset: usize, out: &mut PolyVec) {
    for (j, a) in row.iter().enumerate() {
        for (g, c) in a.terms() {
            out.insert(Term { pos: offset + j, mono: lift_monomial(g, n) }, c.clone());
        }
    }
}

/// Reads positions `offset..offset + len` back as a Laurent row.
pub fn lower_row(gr: &GroupRing, v: &PolyVec, n: usize, offset: usize, len: usize) -> Vec<GroupRingElement> {
    let mut parts: Vec<BTreeMap<GroupElement, Scalar>> = vec![BTreeMap::new(); len];
    for (t, c) in v {
        if t.pos >= offset && t.pos < offset + len {
            let g = lower_monomial(&t.mono, n);
            let e = parts[t.pos - offset].entry(g).or_default();
            *e = gr.ring.add(e, c);
        }
    }
    parts.into_iter().map(|p| gr.from_terms(p)).collect()
}

/// `x_i y_i − 1` at every position in `positions` for every variable.
pub fn inverse_relations(gr: &GroupRing, n: usize, positions: std::ops::Range<usize>) -> Vec<PolyVec> {
    let mut out = Vec::new();
    for pos in positions {
        for i in 0..n {
            let mut m = vec![0; 2 * n];
            m[i] = 1;
            m[n + i] = 1;
            let mut v = PolyVec::new();
            v.insert(Term { pos, mono: m }, gr.ring.one());
            v.insert(Term { pos, mono: vec![0; 2 * n] }, gr.ring.from_int(-1));
            out.push(v);
        }
    }
    out
}
