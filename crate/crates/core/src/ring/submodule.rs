//! Submodules of `R^n` given by generating rows.

use std::sync::OnceLock;

use num_traits::Zero;

use super::scalar::{RingSpec, Scalar};
use super::sparse::{recombine, Combo, SparseSpan, SparseVec};

#[derive(Debug)]
pub struct Submodule {
    ring: RingSpec,
    cols: usize,
    gens: Vec<Vec<Scalar>>,
    form: OnceLock<SparseSpan<usize>>,
}

impl Clone for Submodule {
    fn clone(&self) -> Self {
        Submodule::new(&self.ring, self.cols, self.gens.clone())
    }
}

fn to_sparse(v: &[Scalar]) -> SparseVec<usize> {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
}

fn to_dense(v: &SparseVec<usize>, n: usize) -> Vec<Scalar> {
    let mut d = vec![Scalar::zero(); n];
    for (i, x) in v {
        d[*i] = x.clone();
    }
    d
}

impl Submodule {
    pub fn new(ring: &RingSpec, cols: usize, gens: Vec<Vec<Scalar>>) -> Self {
        let gens = gens
            .into_iter()
            .map(|g| {
                assert_eq!(g.len(), cols, "generator length");
                g.into_iter().map(|x| ring.normalize(x)).collect::<Vec<_>>()
            })
            .collect();
        Submodule { ring: ring.clone(), cols, gens, form: OnceLock::new() }
    }

    pub fn zero(ring: &RingSpec, cols: usize) -> Self {
        Submodule::new(ring, cols, Vec::new())
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn generators(&self) -> &[Vec<Scalar>] {
        &self.gens
    }

    fn form(&self) -> &SparseSpan<usize> {
        self.form.get_or_init(|| SparseSpan::new(&self.ring, self.gens.iter().map(|g| to_sparse(g)).collect()))
    }

    /// Coefficients over the generators reproducing `v`, if `v` lies in the span.
    pub fn membership(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        let v: Vec<Scalar> = v.iter().map(|x| self.ring.normalize(x.clone())).collect();
        let combo = self.form().solve(&to_sparse(&v))?;
        Some(to_dense(&combo, self.gens.len()))
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.membership(v).is_some()
    }

    pub fn is_subset(&self, other: &Submodule) -> bool {
        self.gens.iter().all(|g| other.contains(g))
    }

    pub fn span_eq(&self, other: &Submodule) -> bool {
        self.is_subset(other) && other.is_subset(self)
    }

    pub fn is_zero(&self) -> bool {
        self.gens.iter().all(|g| g.iter().all(Zero::is_zero))
    }

    /// `Σ x_i · gen_i`.
    pub fn combine(&self, x: &[Scalar]) -> Vec<Scalar> {
        let combo: Combo = x.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).collect();
        let rows: Vec<SparseVec<usize>> = self.gens.iter().map(|g| to_sparse(g)).collect();
        to_dense(&recombine(&self.ring, &rows, &combo), self.cols)
    }

    /// `M1 ∩ M2` from the relations among the stacked generators.
    pub fn intersect(&self, other: &Submodule) -> Submodule {
        assert_eq!(self.cols, other.cols, "ambient mismatch");
        let mut rows: Vec<SparseVec<usize>> = self.gens.iter().map(|g| to_sparse(g)).collect();
        rows.extend(other.gens.iter().map(|g| to_sparse(g)));
        let k = self.gens.len();
        let own: Vec<SparseVec<usize>> = rows[..k].to_vec();
        let gens = SparseSpan::new(&self.ring, rows)
            .left_kernel()
            .into_iter()
            .map(|c| {
                let head: Combo = c.into_iter().filter(|(i, _)| *i < k).collect();
                recombine(&self.ring, &own, &head)
            })
            .filter(|v| !v.is_empty())
            .map(|v| to_dense(&v, self.cols))
            .collect();
        Submodule::new(&self.ring, self.cols, gens)
    }
}

/// Generators of `{v : A·v = 0}` for a matrix given by its rows.
pub fn window_kernel(ring: &RingSpec, a: &[Vec<Scalar>], cols: usize) -> Submodule {
    let transposed: Vec<SparseVec<usize>> = (0..cols)
        .map(|j| {
            a.iter()
                .enumerate()
                .filter_map(|(i, r)| {
                    let x = ring.normalize(r[j].clone());
                    (!x.is_zero()).then_some((i, x))
                })
                .collect()
        })
        .collect();
    let gens = SparseSpan::new(ring, transposed).left_kernel().iter().map(|c| to_dense(c, cols)).collect();
    Submodule::new(ring, cols, gens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::scalar::int;

    fn v(xs: &[i64]) -> Vec<Scalar> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn membership_depends_on_ring() {
        let gens = vec![v(&[4, 0]), v(&[0, 1])];
        let z = Submodule::new(&RingSpec::Integers, 2, gens.clone());
        assert!(z.membership(&v(&[2, 0])).is_none());
        let q = Submodule::new(&RingSpec::Rationals, 2, gens);
        assert_eq!(q.membership(&v(&[2, 0])).unwrap(), vec![Scalar::new(1.into(), 2.into()), int(0)]);
        assert!(z.contains(&v(&[0, 0])));
    }

    #[test]
    fn lcm_intersection() {
        let z = RingSpec::Integers;
        let a = Submodule::new(&z, 1, vec![v(&[2])]);
        let b = Submodule::new(&z, 1, vec![v(&[3])]);
        assert!(a.intersect(&b).span_eq(&Submodule::new(&z, 1, vec![v(&[6])])));
    }

    #[test]
    fn kernels() {
        assert!(window_kernel(&RingSpec::Integers, &[v(&[2])], 1).is_zero());
        let z4 = RingSpec::integers_mod(4).unwrap();
        assert!(window_kernel(&z4, &[v(&[2])], 1).span_eq(&Submodule::new(&z4, 1, vec![v(&[2])])));
        let q = RingSpec::Rationals;
        assert!(window_kernel(&q, &[v(&[1, 1])], 2).span_eq(&Submodule::new(&q, 2, vec![v(&[1, -1])])));
    }
}
