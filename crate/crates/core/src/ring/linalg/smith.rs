//! Smith normal form over ℤ with unimodular transforms `D = P·A·Q`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone)]
pub struct SmithForm {
    pub rows: usize,
    pub cols: usize,
    /// Row transform, `rows × rows`.
    pub p: Vec<Vec<BigInt>>,
    /// Column transform, `cols × cols`.
    pub q: Vec<Vec<BigInt>>,
    /// Positive invariant factors, each dividing the next.
    pub diag: Vec<BigInt>,
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

/// `m[dst] += c · m[src]`
fn row_axpy(m: &mut [Vec<BigInt>], dst: usize, src: usize, c: &BigInt) {
    if c.is_zero() {
        return;
    }
    let (a, b) = if dst < src {
        let (lo, hi) = m.split_at_mut(src);
        (&mut lo[dst], &hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(dst);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in a.iter_mut().zip(b.iter()) {
        if !y.is_zero() {
            *x += c * y;
        }
    }
}

/// `m[.][dst] += c · m[.][src]`
fn col_axpy(m: &mut [Vec<BigInt>], dst: usize, src: usize, c: &BigInt) {
    if c.is_zero() {
        return;
    }
    for row in m.iter_mut() {
        if !row[src].is_zero() {
            let t = c * &row[src];
            row[dst] += t;
        }
    }
}

fn swap_cols(m: &mut [Vec<BigInt>], a: usize, b: usize) {
    if a != b {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
    }
}

impl SmithForm {
    pub fn new(a: &[Vec<BigInt>], cols: usize) -> Self {
        let m = a.len();
        let n = cols;
        let mut d: Vec<Vec<BigInt>> = a.to_vec();
        let mut p = identity(m);
        let mut q = identity(n);
        let mut diag = Vec::new();
        for t in 0..m.min(n) {
            let Some((pi, pj)) = smallest(&d, t, t) else { break };
            d.swap(t, pi);
            p.swap(t, pi);
            swap_cols(&mut d, t, pj);
            swap_cols(&mut q, t, pj);
            loop {
                let mut clean = true;
                for i in t + 1..m {
                    if !d[i][t].is_zero() {
                        let f = -d[i][t].div_floor(&d[t][t]);
                        row_axpy(&mut d, i, t, &f);
                        row_axpy(&mut p, i, t, &f);
                        clean &= d[i][t].is_zero();
                    }
                }
                for j in t + 1..n {
                    if !d[t][j].is_zero() {
                        let f = -d[t][j].div_floor(&d[t][t]);
                        col_axpy(&mut d, j, t, &f);
                        col_axpy(&mut q, j, t, &f);
                        clean &= d[t][j].is_zero();
                    }
                }
                if !clean {
                    let (pi, pj) = smallest_cross(&d, t);
                    d.swap(t, pi);
                    p.swap(t, pi);
                    swap_cols(&mut d, t, pj);
                    swap_cols(&mut q, t, pj);
                    continue;
                }
                let pivot = d[t][t].clone();
                let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d[i][j].is_multiple_of(&pivot)));
                match bad {
                    Some(i) => {
                        row_axpy(&mut d, t, i, &BigInt::one());
                        row_axpy(&mut p, t, i, &BigInt::one());
                    }
                    None => break,
                }
            }
            if d[t][t].is_negative() {
                for x in d[t].iter_mut().chain(p[t].iter_mut()) {
                    *x = -&*x;
                }
            }
            diag.push(d[t][t].clone());
        }
        SmithForm { rows: m, cols: n, p, q, diag }
    }

    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    /// Some `x` with `x·A = v`, if one exists.
    pub fn solve(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let r = self.rank();
        let mut w = vec![BigInt::zero(); self.cols];
        for (k, vk) in v.iter().enumerate() {
            if vk.is_zero() {
                continue;
            }
            for (j, wj) in w.iter_mut().enumerate() {
                if !self.q[k][j].is_zero() {
                    *wj += vk * &self.q[k][j];
                }
            }
        }
        if w[r..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let mut x = vec![BigInt::zero(); self.rows];
        for i in 0..r {
            let (y, rem) = w[i].div_rem(&self.diag[i]);
            if !rem.is_zero() {
                return None;
            }
            if y.is_zero() {
                continue;
            }
            for (xk, pk) in x.iter_mut().zip(&self.p[i]) {
                if !pk.is_zero() {
                    *xk += &y * pk;
                }
            }
        }
        Some(x)
    }

    /// Basis of `{x : x·A = 0}`.
    pub fn left_kernel(&self) -> Vec<Vec<BigInt>> {
        self.p[self.rank()..].to_vec()
    }
}

fn smallest(d: &[Vec<BigInt>], r0: usize, c0: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in d.iter().enumerate().skip(r0) {
        for (j, x) in row.iter().enumerate().skip(c0) {
            if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < d[bi][bj].abs()) {
                best = Some((i, j));
                if x.abs().is_one() {
                    return best;
                }
            }
        }
    }
    best
}

/// Smallest nonzero entry in row `t` or column `t` (from `t` on).
fn smallest_cross(d: &[Vec<BigInt>], t: usize) -> (usize, usize) {
    let mut best = (t, t);
    let mut size = d[t][t].abs();
    for (i, row) in d.iter().enumerate().skip(t + 1) {
        if !row[t].is_zero() && row[t].abs() < size {
            size = row[t].abs();
            best = (i, t);
        }
    }
    for j in t + 1..d[t].len() {
        if !d[t][j].is_zero() && d[t][j].abs() < size {
            size = d[t][j].abs();
            best = (t, j);
        }
    }
    best
}
