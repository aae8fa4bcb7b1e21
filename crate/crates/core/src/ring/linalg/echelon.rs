//! Reduced row echelon form over a field, computed on `[A | I]`.

use num_traits::Zero;

use crate::ring::scalar::{RingSpec, Scalar};

#[derive(Debug, Clone)]
pub struct EchelonForm {
    pub ring: RingSpec,
    pub cols: usize,
    pub input_rows: usize,
    /// `(pivot column, data part, combination)` with unit pivots.
    pub rows: Vec<(usize, Vec<Scalar>, Vec<Scalar>)>,
    pub kernel: Vec<Vec<Scalar>>,
}

impl EchelonForm {
    pub fn new(ring: &RingSpec, a: &[Vec<Scalar>], cols: usize) -> Self {
        debug_assert!(ring.is_field());
        let m = a.len();
        let mut rows: Vec<Vec<Scalar>> = a
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row = r.clone();
                row.resize(cols, Scalar::zero());
                row.extend((0..m).map(|k| if k == i { ring.one() } else { ring.zero() }));
                row
            })
            .collect();
        let width = cols + m;
        let mut pivots = Vec::new();
        let mut r = 0;
        for j in 0..width {
            let Some(i0) = (r..rows.len()).find(|&i| !rows[i][j].is_zero()) else { continue };
            rows.swap(r, i0);
            let inv = ring.inverse(&rows[r][j]).expect("nonzero field element");
            for x in rows[r].iter_mut() {
                if !x.is_zero() {
                    *x = ring.mul(x, &inv);
                }
            }
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i == r || row[j].is_zero() {
                    continue;
                }
                let f = row[j].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *x = ring.sub(x, &ring.mul(&f, p));
                    }
                }
            }
            pivots.push(j);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        let mut data_rows = Vec::new();
        let mut kernel = Vec::new();
        for (mut row, &j) in rows.into_iter().zip(&pivots) {
            let comb = row.split_off(cols);
            if j < cols {
                data_rows.push((j, row, comb));
            } else {
                kernel.push(comb);
            }
        }
        EchelonForm { ring: ring.clone(), cols, input_rows: m, rows: data_rows, kernel }
    }

    pub fn solve(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        let ring = &self.ring;
        let mut v = v.to_vec();
        let mut x = vec![Scalar::zero(); self.input_rows];
        for (j, data, comb) in &self.rows {
            let f = v[*j].clone();
            if f.is_zero() {
                continue;
            }
            for (a, b) in v.iter_mut().zip(data) {
                if !b.is_zero() {
                    *a = ring.sub(a, &ring.mul(&f, b));
                }
            }
            for (a, b) in x.iter_mut().zip(comb) {
                if !b.is_zero() {
                    *a = ring.add(a, &ring.mul(&f, b));
                }
            }
        }
        v.iter().all(Zero::is_zero).then_some(x)
    }
}
