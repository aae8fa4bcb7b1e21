//! Britton normal forms for Baumslag–Solitar groups `⟨x, y | x y^m x⁻¹ = y^n⟩`.
//!
//! An element is stored as `y^{r_1} x^{e_1} y^{r_2} x^{e_2} … y^{r_k} x^{e_k} y^{N}` where
//! `r_i ∈ [0, |n|)` before `x` and `r_i ∈ [0, |m|)` before `x⁻¹`, with no pinch
//! `x^{e} y^0 x^{-e}`. Word lengths come from a breadth-first table grown on demand
//! up to the radius cap of the group spec.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BsWord {
    syllables: Vec<(i64, i8)>,
    tail: i64,
}

impl BsWord {
    pub fn identity() -> Self {
        BsWord { syllables: Vec::new(), tail: 0 }
    }

    pub fn push_y(&mut self, exp: i64) {
        self.tail += exp;
    }

    pub fn push_x(&mut self, m: i64, n: i64, exp: i64) {
        let eps: i8 = if exp > 0 { 1 } else { -1 };
        for _ in 0..exp.unsigned_abs() {
            self.push_single_x(m, n, eps);
        }
    }

    fn push_single_x(&mut self, m: i64, n: i64, eps: i8) {
        // y^{qn} x = x y^{qm}  and  y^{qm} x⁻¹ = x⁻¹ y^{qn}
        let (modulus, other) = if eps > 0 { (n, m) } else { (m, n) };
        let r = self.tail.rem_euclid(modulus.abs());
        let q = (self.tail - r) / modulus;
        let pushed = q * other;
        if r == 0 && self.syllables.last().is_some_and(|(_, e)| *e == -eps) {
            let (rk, _) = self.syllables.pop().expect("nonempty");
            self.tail = rk + pushed;
        } else {
            self.syllables.push((r, eps));
            self.tail = pushed;
        }
    }

    pub fn is_normal(&self, m: i64, n: i64) -> bool {
        let mut prev: Option<i8> = None;
        for &(r, e) in &self.syllables {
            let modulus = if e > 0 { n.abs() } else if e < 0 { m.abs() } else { return false };
            if r < 0 || r >= modulus {
                return false;
            }
            if r == 0 && prev == Some(-e) {
                return false;
            }
            prev = Some(e);
        }
        true
    }

    /// Syllables over generator indices (`0 = x`, `1 = y`).
    pub fn syllables(&self) -> Vec<(usize, i64)> {
        let mut out: Vec<(usize, i64)> = Vec::new();
        let mut push = |g: usize, e: i64| {
            if e == 0 {
                return;
            }
            match out.last_mut() {
                Some((pg, pe)) if *pg == g && (g == 1 || pe.signum() == e.signum()) => *pe += e,
                _ => out.push((g, e)),
            }
        };
        for &(r, e) in &self.syllables {
            push(1, r);
            push(0, e as i64);
        }
        push(1, self.tail);
        out
    }

    fn neighbours(&self, m: i64, n: i64) -> [BsWord; 4] {
        let mut a = self.clone();
        a.push_single_x(m, n, 1);
        let mut b = self.clone();
        b.push_single_x(m, n, -1);
        let mut c = self.clone();
        c.push_y(1);
        let mut d = self.clone();
        d.push_y(-1);
        [a, b, c, d]
    }
}

struct BallTable {
    radius: u32,
    lengths: HashMap<BsWord, u32>,
    frontier: Vec<BsWord>,
}

impl BallTable {
    fn new() -> Self {
        let mut lengths = HashMap::new();
        lengths.insert(BsWord::identity(), 0);
        BallTable { radius: 0, lengths, frontier: vec![BsWord::identity()] }
    }

    fn grow(&mut self, m: i64, n: i64) {
        let next_len = self.radius + 1;
        let mut next = Vec::new();
        for w in &self.frontier {
            for nb in w.neighbours(m, n) {
                if !self.lengths.contains_key(&nb) {
                    self.lengths.insert(nb.clone(), next_len);
                    next.push(nb);
                }
            }
        }
        next.sort();
        self.frontier = next;
        self.radius = next_len;
    }
}

type TableRef = Arc<RwLock<BallTable>>;

fn table(m: i64, n: i64) -> TableRef {
    static TABLES: OnceLock<Mutex<HashMap<(i64, i64), TableRef>>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = tables.lock().expect("table registry poisoned");
    guard
        .entry((m, n))
        .or_insert_with(|| Arc::new(RwLock::new(BallTable::new())))
        .clone()
}

fn ensure_radius(t: &TableRef, m: i64, n: i64, radius: u32) {
    if t.read().expect("poisoned").radius >= radius {
        return;
    }
    let mut w = t.write().expect("poisoned");
    while w.radius < radius {
        w.grow(m, n);
    }
}

/// Word length by breadth-first search, bounded by `cap`.
pub fn length(m: i64, n: i64, w: &BsWord, cap: u32) -> Result<u32> {
    let t = table(m, n);
    if let Some(l) = t.read().expect("poisoned").lengths.get(w) {
        return Ok(*l);
    }
    loop {
        let radius = t.read().expect("poisoned").radius;
        if radius >= cap {
            return Err(Error::RadiusCapExceeded { cap, needed: cap + 1 });
        }
        ensure_radius(&t, m, n, radius + 1);
        if let Some(l) = t.read().expect("poisoned").lengths.get(w) {
            return Ok(*l);
        }
    }
}

/// All elements of word length at most `r`, sorted.
pub fn ball(m: i64, n: i64, r: u32, cap: u32) -> Result<Vec<BsWord>> {
    if r > cap {
        return Err(Error::RadiusCapExceeded { cap, needed: r });
    }
    let t = table(m, n);
    ensure_radius(&t, m, n, r);
    let guard = t.read().expect("poisoned");
    let mut out: Vec<BsWord> = guard.lengths.iter().filter(|(_, l)| **l <= r).map(|(w, _)| w.clone()).collect();
    out.sort();
    Ok(out)
}
