//! Sparse row spans with unit-pivot elimination.
//!
//! Rows with a unit coefficient are eliminated sparsely; whatever remains is
//! handed to the dense normal form of the coefficient ring. Every stored row
//! remembers the combination of input rows it came from, which gives membership
//! witnesses and left kernels.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::hash::Hash;

use num_traits::Zero;

use super::linalg::DenseSpan;
use super::scalar::{RingSpec, Scalar};

pub type SparseVec<K> = BTreeMap<K, Scalar>;

/// Coefficients over the input rows, by row index.
pub type Combo = BTreeMap<usize, Scalar>;

fn axpy<K: Ord + Clone>(ring: &RingSpec, v: &mut BTreeMap<K, Scalar>, c: &Scalar, w: &BTreeMap<K, Scalar>) {
    for (k, x) in w {
        let t = ring.mul(c, x);
        match v.get_mut(k) {
            Some(e) => {
                *e = ring.add(e, &t);
                if e.is_zero() {
                    v.remove(k);
                }
            }
            None => {
                if !t.is_zero() {
                    v.insert(k.clone(), t);
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Pivot<K> {
    key: K,
    row: SparseVec<K>,
    combo: Combo,
}

#[derive(Debug, Clone)]
pub struct SparseSpan<K: Ord + Clone + Hash> {
    ring: RingSpec,
    inputs: usize,
    track: bool,
    pivots: Vec<Pivot<K>>,
    pivot_of: HashMap<K, usize>,
    residual: Vec<(SparseVec<K>, Combo)>,
    residual_index: HashMap<K, usize>,
    dense: Option<DenseSpan>,
    zero_combos: Vec<Combo>,
}

impl<K: Ord + Clone + Hash> SparseSpan<K> {
    /// Span with membership witnesses and left kernel.
    pub fn new(ring: &RingSpec, rows: Vec<SparseVec<K>>) -> Self {
        Self::build(ring, rows, true)
    }

    /// Span for membership tests only; skips combination bookkeeping.
    pub fn untracked(ring: &RingSpec, rows: Vec<SparseVec<K>>) -> Self {
        Self::build(ring, rows, false)
    }

    fn build(ring: &RingSpec, rows: Vec<SparseVec<K>>, track: bool) -> Self {
        let mut s = SparseSpan {
            ring: ring.clone(),
            inputs: rows.len(),
            track,
            pivots: Vec::new(),
            pivot_of: HashMap::new(),
            residual: Vec::new(),
            residual_index: HashMap::new(),
            dense: None,
            zero_combos: Vec::new(),
        };
        for (i, row) in rows.into_iter().enumerate() {
            let mut combo = Combo::new();
            if track {
                combo.insert(i, ring.one());
            }
            s.insert(row, combo);
        }
        loop {
            let before = s.pivots.len();
            for (row, combo) in std::mem::take(&mut s.residual) {
                s.insert(row, combo);
            }
            if s.pivots.len() == before {
                break;
            }
        }
        let mut keys: Vec<K> = s.residual.iter().flat_map(|(r, _)| r.keys().cloned()).collect();
        keys.sort();
        keys.dedup();
        s.residual_index = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        if !s.residual.is_empty() {
            let dense_rows: Vec<Vec<Scalar>> = s
                .residual
                .iter()
                .map(|(r, _)| {
                    let mut d = vec![Scalar::zero(); keys.len()];
                    for (k, x) in r {
                        d[s.residual_index[k]] = x.clone();
                    }
                    d
                })
                .collect();
            s.dense = Some(DenseSpan::new(ring, &dense_rows, keys.len()));
        }
        s
    }

    fn insert(&mut self, mut row: SparseVec<K>, mut combo: Combo) {
        self.reduce(&mut row, self.track.then_some(&mut combo), false);
        if row.is_empty() {
            if self.track && !combo.is_empty() {
                self.zero_combos.push(combo);
            }
            return;
        }
        let unit = row.iter().rev().find(|(_, x)| self.ring.is_unit(x)).map(|(k, x)| (k.clone(), x.clone()));
        match unit {
            Some((key, x)) => {
                let inv = self.ring.inverse(&x).expect("unit");
                let row = row.into_iter().map(|(k, c)| (k, self.ring.mul(&c, &inv))).collect();
                let combo = combo.into_iter().map(|(k, c)| (k, self.ring.mul(&c, &inv))).collect();
                self.pivot_of.insert(key.clone(), self.pivots.len());
                self.pivots.push(Pivot { key, row, combo });
            }
            None => self.residual.push((row, combo)),
        }
    }

    /// Clears pivot coordinates from `v`. With `add` the removed multiples are
    /// added to `combo`, otherwise subtracted.
    fn reduce(&self, v: &mut SparseVec<K>, mut combo: Option<&mut Combo>, add: bool) {
        let mut heap: BinaryHeap<Reverse<usize>> = v.keys().filter_map(|k| self.pivot_of.get(k)).map(|&i| Reverse(i)).collect();
        let mut last = None;
        while let Some(Reverse(i)) = heap.pop() {
            if last == Some(i) {
                continue;
            }
            last = Some(i);
            let p = &self.pivots[i];
            let Some(c) = v.get(&p.key).cloned() else { continue };
            let neg = self.ring.neg(&c);
            axpy(&self.ring, v, &neg, &p.row);
            for k in p.row.keys() {
                if let Some(&j) = self.pivot_of.get(k) {
                    if j > i {
                        heap.push(Reverse(j));
                    }
                }
            }
            if let Some(cb) = combo.as_deref_mut() {
                axpy(&self.ring, cb, if add { &c } else { &neg }, &p.combo);
            }
        }
    }

    /// Rows left for the dense stage, already free of pivot coordinates.
    pub fn residual_rows(&self) -> impl Iterator<Item = &SparseVec<K>> {
        self.residual.iter().map(|(r, _)| r)
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    /// Remainder of `v` after clearing unit-pivot coordinates.
    pub fn remainder(&self, v: &SparseVec<K>) -> SparseVec<K> {
        let mut r = v.clone();
        self.reduce(&mut r, None, true);
        r
    }

    /// Coefficients over the input rows reproducing `v`, if `v` is in the span.
    /// Untracked spans return an empty combination on success.
    pub fn solve(&self, v: &SparseVec<K>) -> Option<Combo> {
        let mut r = v.clone();
        let mut combo = Combo::new();
        self.reduce(&mut r, self.track.then_some(&mut combo), true);
        if r.is_empty() {
            return Some(combo);
        }
        let dense = self.dense.as_ref()?;
        let mut d = vec![Scalar::zero(); self.residual_index.len()];
        for (k, x) in &r {
            d[*self.residual_index.get(k)?] = x.clone();
        }
        let y = dense.solve(&d)?;
        if self.track {
            for (yi, (_, rc)) in y.iter().zip(&self.residual) {
                if !yi.is_zero() {
                    axpy(&self.ring, &mut combo, yi, rc);
                }
            }
        }
        Some(combo)
    }

    pub fn contains(&self, v: &SparseVec<K>) -> bool {
        self.solve(v).is_some()
    }

    /// Generators of the relations among the input rows.
    pub fn left_kernel(&self) -> Vec<Combo> {
        assert!(self.track, "left kernel needs a tracked span");
        let mut out = self.zero_combos.clone();
        if let Some(dense) = &self.dense {
            for y in dense.left_kernel() {
                let mut combo = Combo::new();
                for (yi, (_, rc)) in y.iter().zip(&self.residual) {
                    if !yi.is_zero() {
                        axpy(&self.ring, &mut combo, yi, rc);
                    }
                }
                if !combo.is_empty() {
                    out.push(combo);
                }
            }
        }
        out
    }
}

/// `Σ c_i · rows[i]`.
pub fn recombine<K: Ord + Clone>(ring: &RingSpec, rows: &[SparseVec<K>], combo: &Combo) -> SparseVec<K> {
    let mut out = SparseVec::new();
    for (i, c) in combo {
        axpy(ring, &mut out, c, &rows[*i]);
    }
    out
}

/// `v += c·w` on sparse vectors.
pub fn add_scaled_sparse<K: Ord + Clone>(ring: &RingSpec, v: &mut SparseVec<K>, c: &Scalar, w: &SparseVec<K>) {
    axpy(ring, v, c, w)
}
