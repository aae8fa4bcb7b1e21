//! Howell form over `ℤ/n`.
//!
//! The form is computed for the augmented matrix `[A | I]`, so each row carries
//! the combination of input rows that produced it. Rows whose data part vanishes
//! generate the left kernel of `A` by the Howell property.

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `(g, s, t)` with `g = s·a + t·b` over the integers.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, s, t) = ext_gcd(b, a.rem_euclid(b));
        (g, t, s - (a.div_euclid(b)) * t)
    }
}

fn inv_mod(a: u64, n: u64) -> u64 {
    let (_, s, _) = ext_gcd(a as i128, n as i128);
    s.rem_euclid(n as i128) as u64
}

/// A unit `u` with `u·a ≡ gcd(a, n) (mod n)`.
fn unit_normalizer(a: u64, n: u64) -> u64 {
    let g = gcd(a, n);
    let np = n / g;
    let base = if np == 1 { 1 } else { inv_mod(a / g, np) };
    let mut u = base;
    while gcd(u, n) != 1 {
        u += np;
    }
    u % n
}

fn mulmod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

/// `dst = a·x + b·y (mod n)` componentwise.
fn combine(x: &[u64], y: &[u64], a: u64, b: u64, n: u64) -> Vec<u64> {
    x.iter().zip(y).map(|(&p, &q)| ((mulmod(a, p, n) as u128 + mulmod(b, q, n) as u128) % n as u128) as u64).collect()
}

#[derive(Debug, Clone)]
pub struct HowellForm {
    pub modulus: u64,
    pub cols: usize,
    pub input_rows: usize,
    /// `(pivot column, data part, combination)` in pivot order.
    pub rows: Vec<(usize, Vec<u64>, Vec<u64>)>,
    pub kernel: Vec<Vec<u64>>,
}

impl HowellForm {
    pub fn new(a: &[Vec<u64>], cols: usize, n: u64) -> Self {
        let m = a.len();
        let width = cols + m;
        let mut rows: Vec<Vec<u64>> = a
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row: Vec<u64> = r.iter().map(|x| x % n).collect();
                row.resize(cols, 0);
                row.extend((0..m).map(|k| u64::from(k == i) % n));
                row
            })
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for j in 0..width {
            let Some(i0) = (r..rows.len()).find(|&i| rows[i][j] != 0) else { continue };
            rows.swap(r, i0);
            for i in r + 1..rows.len() {
                if rows[i][j] == 0 {
                    continue;
                }
                let a = rows[r][j] as i128;
                let b = rows[i][j] as i128;
                let (g, s, t) = ext_gcd(a, b);
                let sm = s.rem_euclid(n as i128) as u64;
                let tm = t.rem_euclid(n as i128) as u64;
                let c = (-(b / g)).rem_euclid(n as i128) as u64;
                let d = ((a / g).rem_euclid(n as i128)) as u64;
                let new_r = combine(&rows[r], &rows[i], sm, tm, n);
                let new_i = combine(&rows[r], &rows[i], c, d, n);
                rows[r] = new_r;
                rows[i] = new_i;
            }
            let u = unit_normalizer(rows[r][j], n);
            for x in rows[r].iter_mut() {
                *x = mulmod(*x, u, n);
            }
            let p = rows[r][j];
            for i in 0..r {
                let f = rows[i][j] / p;
                if f != 0 {
                    let pivot_row = rows[r].clone();
                    rows[i] = combine(&rows[i], &pivot_row, 1, n - f % n, n);
                }
            }
            let extra: Vec<u64> = rows[r].iter().map(|&x| mulmod(x, n / p, n)).collect();
            if extra.iter().any(|&x| x != 0) {
                rows.push(extra);
            }
            pivots.push(j);
            r += 1;
        }
        let mut data_rows = Vec::new();
        let mut kernel = Vec::new();
        for (row, &j) in rows.into_iter().zip(&pivots) {
            if j < cols {
                data_rows.push((j, row[..cols].to_vec(), row[cols..].to_vec()));
            } else {
                kernel.push(row[cols..].to_vec());
            }
        }
        HowellForm { modulus: n, cols, input_rows: m, rows: data_rows, kernel }
    }

    /// Some `x` with `x·A = v`, if one exists.
    pub fn solve(&self, v: &[u64]) -> Option<Vec<u64>> {
        let n = self.modulus;
        let mut v: Vec<u64> = v.iter().map(|x| x % n).collect();
        let mut x = vec![0u64; self.input_rows];
        for (j, data, comb) in &self.rows {
            let p = data[*j];
            if v[*j] % p != 0 {
                return None;
            }
            let f = v[*j] / p;
            if f == 0 {
                continue;
            }
            v = combine(&v, data, 1, n - f, n);
            x = combine(&x, comb, 1, f, n);
        }
        v.iter().all(|&c| c == 0).then_some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizer() {
        for n in 2..40u64 {
            for a in 1..n {
                let u = unit_normalizer(a, n);
                assert_eq!(gcd(u, n), 1);
                assert_eq!(mulmod(u, a, n), gcd(a, n));
            }
        }
    }

    #[test]
    fn kernel_mod_four() {
        // x·[2] = 0 over ℤ/4 is generated by 2.
        let h = HowellForm::new(&[vec![2]], 1, 4);
        assert_eq!(h.kernel, vec![vec![2]]);
    }

    #[test]
    fn membership_needs_howell_rows() {
        // span{(2, 1)} over ℤ/4 contains (0, 2) = 2·(2, 1).
        let h = HowellForm::new(&[vec![2, 1]], 2, 4);
        assert_eq!(h.solve(&[0, 2]), Some(vec![2]));
        assert_eq!(h.solve(&[0, 1]), None);
    }
}
