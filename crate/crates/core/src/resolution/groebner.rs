//! Gröbner bases of submodules of `k[z₁,…,z_m]^p` over a field, position-over-term
//! with degree-reverse-lexicographic monomials.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::Zero;

use crate::ring::scalar::{RingSpec, Scalar};

pub type Monomial = Vec<u32>;

/// `mono·ε_pos`. Lower positions rank higher.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub pos: usize,
    pub mono: Monomial,
}

fn degrevlex(a: &Monomial, b: &Monomial) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| {
        for (x, y) in a.iter().zip(b).rev() {
            if x != y {
                return y.cmp(x);
            }
        }
        Ordering::Equal
    })
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        other.pos.cmp(&self.pos).then_with(|| degrevlex(&self.mono, &other.mono))
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Module element; the leading term is the last key.
pub type PolyVec = BTreeMap<Term, Scalar>;

fn divides(a: &Monomial, b: &Monomial) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn quotient(b: &Monomial, a: &Monomial) -> Monomial {
    b.iter().zip(a).map(|(y, x)| y - x).collect()
}

fn lcm(a: &Monomial, b: &Monomial) -> Monomial {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

pub fn lead(v: &PolyVec) -> Option<(&Term, &Scalar)> {
    v.last_key_value()
}

/// `v -= c·mono·w`.
fn sub_shifted(ring: &RingSpec, v: &mut PolyVec, c: &Scalar, mono: &Monomial, w: &PolyVec) {
    for (t, x) in w {
        let key = Term { pos: t.pos, mono: t.mono.iter().zip(mono).map(|(a, b)| a + b).collect() };
        let term = ring.mul(c, x);
        let entry = v.entry(key.clone()).or_insert_with(Scalar::zero);
        *entry = ring.sub(entry, &term);
        if entry.is_zero() {
            v.remove(&key);
        }
    }
}

fn monic(ring: &RingSpec, v: PolyVec) -> PolyVec {
    let Some((_, c)) = lead(&v) else { return v };
    let inv = ring.inverse(c).expect("field coefficient");
    v.into_iter().map(|(t, x)| (t, ring.mul(&inv, &x))).collect()
}

/// Full reduction of `v` by `basis`.
pub fn reduce(ring: &RingSpec, v: &PolyVec, basis: &[PolyVec]) -> PolyVec {
    let mut p = v.clone();
    let mut rest = PolyVec::new();
    while let Some((t, c)) = p.last_key_value().map(|(t, c)| (t.clone(), c.clone())) {
        let divisor = basis.iter().find(|g| {
            let (lt, _) = lead(g).expect("nonzero basis element");
            lt.pos == t.pos && divides(&lt.mono, &t.mono)
        });
        match divisor {
            Some(g) => {
                let (lt, lc) = lead(g).expect("nonzero");
                let factor = ring.mul(&c, &ring.inverse(lc).expect("field coefficient"));
                let shift = quotient(&t.mono, &lt.mono);
                sub_shifted(ring, &mut p, &factor, &shift, g);
            }
            None => {
                p.remove(&t);
                rest.insert(t, c);
            }
        }
    }
    rest
}

fn s_vector(ring: &RingSpec, f: &PolyVec, g: &PolyVec) -> Option<PolyVec> {
    let (tf, cf) = lead(f)?;
    let (tg, cg) = lead(g)?;
    if tf.pos != tg.pos {
        return None;
    }
    let l = lcm(&tf.mono, &tg.mono);
    let mut s = PolyVec::new();
    sub_shifted(ring, &mut s, &ring.neg(&ring.inverse(cf).expect("field")), &quotient(&l, &tf.mono), f);
    sub_shifted(ring, &mut s, &ring.inverse(cg).expect("field"), &quotient(&l, &tg.mono), g);
    Some(s)
}

/// Reduced Gröbner basis, sorted by leading term.
pub fn groebner_basis(ring: &RingSpec, gens: &[PolyVec]) -> Vec<PolyVec> {
    assert!(ring.is_field(), "Gröbner bases need field coefficients");
    let mut basis: Vec<PolyVec> = Vec::new();
    for g in gens {
        let r = reduce(ring, g, &basis);
        if !r.is_empty() {
            basis.push(monic(ring, r));
        }
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    while !pairs.is_empty() {
        // Normal strategy: the pair with the smallest lcm first.
        let key = |&(i, j): &(usize, usize)| {
            let (a, b) = (lead(&basis[i]).expect("nonzero").0, lead(&basis[j]).expect("nonzero").0);
            Term { pos: a.pos, mono: lcm(&a.mono, &b.mono) }
        };
        let best = (0..pairs.len()).min_by(|&x, &y| key(&pairs[x]).cmp(&key(&pairs[y])).then(pairs[x].cmp(&pairs[y]))).expect("nonempty");
        let (i, j) = pairs.swap_remove(best);
        let Some(s) = s_vector(ring, &basis[i], &basis[j]) else { continue };
        let r = reduce(ring, &s, &basis);
        if !r.is_empty() {
            let k = basis.len();
            basis.push(monic(ring, r));
            pairs.extend((0..k).map(|i| (i, k)));
        }
    }
    interreduce(ring, basis)
}

fn interreduce(ring: &RingSpec, mut basis: Vec<PolyVec>) -> Vec<PolyVec> {
    basis.sort_by(|a, b| lead(a).expect("nonzero").0.cmp(lead(b).expect("nonzero").0));
    let mut minimal: Vec<PolyVec> = Vec::new();
    for g in basis {
        let lt = lead(&g).expect("nonzero").0.clone();
        let redundant = minimal.iter().any(|h| {
            let lh = lead(h).expect("nonzero").0;
            lh.pos == lt.pos && divides(&lh.mono, &lt.mono)
        });
        if !redundant {
            minimal.push(g);
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<PolyVec> = minimal.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g.clone()).collect();
        let (lt, lc) = lead(&minimal[i]).map(|(t, c)| (t.clone(), c.clone())).expect("nonzero");
        let mut tail = minimal[i].clone();
        tail.remove(&lt);
        let mut r = reduce(ring, &tail, &others);
        r.insert(lt, lc);
        out.push(monic(ring, r));
    }
    out
}
