//! Group rings `R[Γ]`: finitely supported combinations of group elements, and
//! matrices over them acting on row vectors.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::scalar::{format_scalar, RingSpec, Scalar};
use super::vector::{add_scaled, Coord, ModuleVector};
use crate::error::{Error, Result};
use crate::space::group::{GroupElement, GroupSpec};

/// `Σ r_γ γ` with canonical (sorted) support and no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GroupRingElement {
    terms: BTreeMap<GroupElement, Scalar>,
}

impl GroupRingElement {
    pub fn zero() -> Self {
        GroupRingElement::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<GroupElement, Scalar> {
        &self.terms
    }

    pub fn coefficient(&self, g: &GroupElement) -> Option<&Scalar> {
        self.terms.get(g)
    }

    pub fn support(&self) -> impl Iterator<Item = &GroupElement> {
        self.terms.keys()
    }
}

/// The group ring of `group` with coefficients in `ring`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupRing {
    pub group: GroupSpec,
    pub ring: RingSpec,
}

impl GroupRing {
    pub fn new(group: GroupSpec, ring: RingSpec) -> Self {
        GroupRing { group, ring }
    }

    pub fn one(&self) -> GroupRingElement {
        self.monomial(self.ring.one(), self.group.identity())
    }

    pub fn monomial(&self, c: Scalar, g: GroupElement) -> GroupRingElement {
        let c = self.ring.normalize(c);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(g, c);
        }
        GroupRingElement { terms }
    }

    pub fn from_terms(&self, terms: impl IntoIterator<Item = (GroupElement, Scalar)>) -> GroupRingElement {
        let mut out = GroupRingElement::zero();
        for (g, c) in terms {
            self.add_term(&mut out, g, &c);
        }
        out
    }

    fn add_term(&self, a: &mut GroupRingElement, g: GroupElement, c: &Scalar) {
        let entry = a.terms.entry(g.clone()).or_insert_with(Scalar::zero);
        *entry = self.ring.add(entry, c);
        if entry.is_zero() {
            a.terms.remove(&g);
        }
    }

    pub fn add(&self, a: &GroupRingElement, b: &GroupRingElement) -> GroupRingElement {
        let mut out = a.clone();
        for (g, c) in &b.terms {
            self.add_term(&mut out, g.clone(), c);
        }
        out
    }

    pub fn neg(&self, a: &GroupRingElement) -> GroupRingElement {
        GroupRingElement { terms: a.terms.iter().map(|(g, c)| (g.clone(), self.ring.neg(c))).collect() }
    }

    pub fn sub(&self, a: &GroupRingElement, b: &GroupRingElement) -> GroupRingElement {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, c: &Scalar, a: &GroupRingElement) -> GroupRingElement {
        self.from_terms(a.terms.iter().map(|(g, x)| (g.clone(), self.ring.mul(c, x))))
    }

    /// Convolution product `(Σ a_g g)(Σ b_h h) = Σ a_g b_h gh`.
    pub fn mul(&self, a: &GroupRingElement, b: &GroupRingElement) -> GroupRingElement {
        let mut out = GroupRingElement::zero();
        for (g, x) in &a.terms {
            for (h, y) in &b.terms {
                self.add_term(&mut out, self.group.mul(g, h), &self.ring.mul(x, y));
            }
        }
        out
    }

    /// `γ·a`.
    pub fn left_translate(&self, gamma: &GroupElement, a: &GroupRingElement) -> GroupRingElement {
        GroupRingElement { terms: a.terms.iter().map(|(g, c)| (self.group.mul(gamma, g), c.clone())).collect() }
    }

    /// Largest word length in the support (0 for the zero element).
    pub fn support_radius(&self, a: &GroupRingElement) -> Result<u32> {
        let mut r = 0;
        for g in a.terms.keys() {
            r = r.max(self.group.length(g)?);
        }
        Ok(r)
    }

    pub fn format(&self, a: &GroupRingElement) -> String {
        if a.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (g, c)) in a.terms.iter().enumerate() {
            let word = self.group.format(g);
            let mut coeff = format_scalar(c);
            let negative = coeff.starts_with('-');
            if negative {
                coeff.remove(0);
            }
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            match (coeff.as_str(), word.as_str()) {
                (c, "1") => out.push_str(c),
                ("1", w) => out.push_str(w),
                (c, w) => out.push_str(&format!("{c}*{w}")),
            }
        }
        out
    }

    /// Parses expressions such as `t^2 - 3*a*b^-1 + 1/2` or `x*y - 1`.
    pub fn parse(&self, s: &str) -> Result<GroupRingElement> {
        let bad = || Error::MalformedWord(s.to_string());
        let mut pieces: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut pending: Option<bool> = None;
        let mut last = None;
        for ch in s.chars() {
            if (ch == '+' || ch == '-') && last != Some('^') && last != Some('(') {
                if current.trim().is_empty() {
                    if pending.is_some() || !pieces.is_empty() {
                        return Err(bad());
                    }
                } else {
                    pieces.push((pending.unwrap_or(false), std::mem::take(&mut current)));
                }
                pending = Some(ch == '-');
            } else {
                current.push(ch);
            }
            if !ch.is_whitespace() {
                last = Some(ch);
            }
        }
        if current.trim().is_empty() {
            return Err(bad());
        }
        pieces.push((pending.unwrap_or(false), current));
        let mut out = GroupRingElement::zero();
        for (negative, term) in pieces {
            let mut coeff = self.ring.one();
            let mut word = Vec::new();
            for tok in term.split(|c: char| c == '*' || c.is_whitespace()).filter(|t| !t.is_empty()) {
                if tok.chars().all(|c| c.is_ascii_digit() || c == '/') {
                    coeff = self.ring.mul(&coeff, &self.ring.parse_scalar(tok)?);
                } else {
                    word.push(tok);
                }
            }
            let g = self.group.parse_word(&word.join("*"))?;
            if negative {
                coeff = self.ring.neg(&coeff);
            }
            self.add_term(&mut out, g, &coeff);
        }
        Ok(out)
    }

    /// JSON list of `{"word": ..., "coeff": ...}` terms in canonical order.
    pub fn to_json(&self, a: &GroupRingElement) -> Value {
        Value::Array(
            a.terms
                .iter()
                .map(|(g, c)| json!({"word": self.group.format(g), "coeff": format_scalar(c)}))
                .collect(),
        )
    }

    /// Accepts either the term list or an expression string.
    pub fn from_json(&self, v: &Value) -> Result<GroupRingElement> {
        if let Some(s) = v.as_str() {
            return self.parse(s);
        }
        let bad = || Error::InvalidTask("group ring element must be a string or a list of {word, coeff}".into());
        let mut out = GroupRingElement::zero();
        for t in v.as_array().ok_or_else(bad)? {
            let w = t.get("word").and_then(Value::as_str).ok_or_else(bad)?;
            let c = t.get("coeff").and_then(Value::as_str).ok_or_else(bad)?;
            self.add_term(&mut out, self.group.parse_word(w)?, &self.ring.parse_scalar(c)?);
        }
        Ok(out)
    }

    /// Converts `(a_0, …, a_{k-1}) ∈ R[Γ]^k` into coordinate form.
    pub fn row_to_vector(&self, row: &[GroupRingElement]) -> ModuleVector {
        let mut v = ModuleVector::new();
        for (i, a) in row.iter().enumerate() {
            for (g, c) in &a.terms {
                v.insert((g.clone(), i), c.clone());
            }
        }
        v
    }

    pub fn vector_to_row(&self, v: &ModuleVector, rank: usize) -> Vec<GroupRingElement> {
        let mut row = vec![GroupRingElement::zero(); rank];
        for ((g, i), c) in v {
            self.add_term(&mut row[*i], g.clone(), c);
        }
        row
    }
}

/// Sparse matrix over a group ring. A `rows × cols` matrix `M` is the morphism
/// `R[Γ]^rows → R[Γ]^cols`, `v ↦ v·M`, which is left `R[Γ]`-linear.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupRingMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: BTreeMap<(usize, usize), GroupRingElement>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Triplet {
    row: usize,
    col: usize,
    entry: Value,
}

impl GroupRingMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        GroupRingMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(gr: &GroupRing, n: usize) -> Self {
        let mut m = GroupRingMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, gr.one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<GroupRingElement>>, cols: usize) -> Result<Self> {
        let mut m = GroupRingMatrix::zero(rows.len(), cols);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!("row {i} has {} entries, expected {cols}", r.len())));
            }
            for (j, a) in r.into_iter().enumerate() {
                m.set(i, j, a);
            }
        }
        Ok(m)
    }

    pub fn get(&self, i: usize, j: usize) -> GroupRingElement {
        self.entries.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, i: usize, j: usize, a: GroupRingElement) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        if a.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), a);
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &GroupRingElement)> {
        self.entries.iter()
    }

    pub fn row(&self, i: usize) -> Vec<GroupRingElement> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn mul(&self, gr: &GroupRing, other: &GroupRingMatrix) -> Result<GroupRingMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!("{}x{} * {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let mut out = GroupRingMatrix::zero(self.rows, other.cols);
        for (&(i, k), a) in &self.entries {
            for j in 0..other.cols {
                if let Some(b) = other.entries.get(&(k, j)) {
                    let cur = out.get(i, j);
                    out.set(i, j, gr.add(&cur, &gr.mul(a, b)));
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, gr: &GroupRing, other: &GroupRingMatrix) -> Result<GroupRingMatrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch("matrix sum".into()));
        }
        let mut out = self.clone();
        for (&(i, j), b) in &other.entries {
            let cur = out.get(i, j);
            out.set(i, j, gr.add(&cur, b));
        }
        Ok(out)
    }

    pub fn neg(&self, gr: &GroupRing) -> GroupRingMatrix {
        GroupRingMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|(k, a)| (*k, gr.neg(a))).collect() }
    }

    /// Exact check `M² = M`.
    pub fn is_idempotent(&self, gr: &GroupRing) -> Result<bool> {
        if self.rows != self.cols {
            return Ok(false);
        }
        Ok(self.mul(gr, self)? == *self)
    }

    /// Entrywise reduction into another coefficient ring (e.g. `ℤ → ℤ/n`).
    pub fn change_ring(&self, target: &GroupRing) -> GroupRingMatrix {
        let mut out = GroupRingMatrix::zero(self.rows, self.cols);
        for (&(i, j), a) in &self.entries {
            out.set(i, j, target.from_terms(a.terms.iter().map(|(g, c)| (g.clone(), c.clone()))));
        }
        out
    }

    /// Largest support radius over all entries.
    pub fn support_radius(&self, gr: &GroupRing) -> Result<u32> {
        let mut r = 0;
        for a in self.entries.values() {
            r = r.max(gr.support_radius(a)?);
        }
        Ok(r)
    }

    /// `v ↦ v·M` on coordinate vectors: `γ e_i ↦ Σ_j γ·M_ij`.
    pub fn apply(&self, gr: &GroupRing, v: &ModuleVector) -> ModuleVector {
        let mut out = ModuleVector::new();
        for ((gamma, i), c) in v {
            for j in 0..self.cols {
                if let Some(a) = self.entries.get(&(*i, j)) {
                    for (g, x) in &a.terms {
                        let coord: Coord = (gr.group.mul(gamma, g), j);
                        let mut term = ModuleVector::new();
                        term.insert(coord, x.clone());
                        add_scaled(&gr.ring, &mut out, c, &term);
                    }
                }
            }
        }
        out
    }

    /// Row `i` as a coordinate vector (the image of `e_i`).
    pub fn row_vector(&self, gr: &GroupRing, i: usize) -> ModuleVector {
        gr.row_to_vector(&self.row(i))
    }

    /// Sparse triplet list `[{"row":i,"col":j,"entry":[terms]}]`.
    pub fn to_json(&self, gr: &GroupRing) -> Value {
        json!({
            "rows": self.rows,
            "cols": self.cols,
            "entries": self.entries.iter().map(|(&(i, j), a)| json!({"row": i, "col": j, "entry": gr.to_json(a)})).collect::<Vec<_>>(),
        })
    }

    /// Parses triplets; entries may be term lists or expression strings.
    pub fn from_triplets(gr: &GroupRing, rows: usize, cols: usize, triplets: &Value) -> Result<GroupRingMatrix> {
        let list: Vec<Triplet> = serde_json::from_value(triplets.clone())
            .map_err(|e| Error::InvalidTask(format!("matrix triplets: {e}")))?;
        let mut m = GroupRingMatrix::zero(rows, cols);
        for t in list {
            if t.row >= rows || t.col >= cols {
                return Err(Error::DimensionMismatch(format!("triplet ({}, {}) outside {rows}x{cols}", t.row, t.col)));
            }
            let a = gr.from_json(&t.entry)?;
            let cur = m.get(t.row, t.col);
            m.set(t.row, t.col, gr.add(&cur, &a));
        }
        Ok(m)
    }

    /// Parses the compact form `[["1", "t-1"], ["0", "1"]]`.
    pub fn from_string_rows(gr: &GroupRing, rows: &[Vec<&str>]) -> Result<GroupRingMatrix> {
        let cols = rows.first().map_or(0, Vec::len);
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| gr.parse(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        GroupRingMatrix::from_rows(parsed, cols)
    }
}

/// `Σ_i r_i` with each scalar coefficient `1` replaced by the given group elements.
pub fn sum_of(gr: &GroupRing, elements: &[GroupElement]) -> GroupRingElement {
    gr.from_terms(elements.iter().map(|g| (g.clone(), Scalar::one())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::scalar::int;

    fn zz() -> GroupRing {
        GroupRing::new(GroupSpec::free_abelian(1), RingSpec::Integers)
    }

    #[test]
    fn parse_and_format() {
        let gr = zz();
        let a = gr.parse("t^2 - 3*t^-1 + 1/1").unwrap();
        assert_eq!(gr.format(&a), "-3*t^-1 + 1 + t^2");
        assert_eq!(gr.parse("-t").unwrap(), gr.monomial(int(-1), gr.group.parse_word("t").unwrap()));
        assert!(gr.parse("t +").is_err());
        assert!(gr.parse("t - - 1").is_err());
        assert_eq!(gr.parse("0").unwrap(), GroupRingElement::zero());
        assert_eq!(gr.parse("2*t*t").unwrap(), gr.parse("2 * t^2").unwrap());
    }

    #[test]
    fn difference_of_squares() {
        let gr = zz();
        let p = gr.mul(&gr.parse("t - 1").unwrap(), &gr.parse("t + 1").unwrap());
        assert_eq!(p, gr.parse("t^2 - 1").unwrap());
    }

    #[test]
    fn mod_two_square() {
        let gr = GroupRing::new(GroupSpec::free_abelian(1), RingSpec::integers_mod(2).unwrap());
        let a = gr.parse("t + 1").unwrap();
        assert_eq!(gr.mul(&a, &a), gr.parse("t^2 + 1").unwrap());
    }

    #[test]
    fn free_inverse() {
        let gr = GroupRing::new(GroupSpec::free(2), RingSpec::Integers);
        assert_eq!(gr.mul(&gr.parse("a").unwrap(), &gr.parse("a^-1").unwrap()), gr.one());
    }
}
