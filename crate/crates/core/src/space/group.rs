//! Group families with computable normal forms and word metrics.
//!
//! Every element is stored in normal form, so structural equality is group
//! equality. The metric is the left-invariant word metric
//! `d(g, h) = |g⁻¹h|` for the symmetric generating set of the family.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::bs::{self, BsWord};
use crate::error::{Error, Result};

/// Default cap on breadth-first radius for families without closed-form lengths.
pub const DEFAULT_RADIUS_CAP: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Family {
    FreeAbelian(usize),
    Free(usize),
    /// `⟨x, y | x y^m x⁻¹ = y^n⟩`
    BaumslagSolitar(i64, i64),
    /// Product of the Cayley trees of free groups of the given ranks,
    /// carrying the ℓ1 sum of the factor metrics. Rank 1 is the line.
    ProductOfTrees(Vec<usize>),
}

/// A letter of a reduced free word: `+(i+1)` for generator `i`, `-(i+1)` for its inverse.
pub type Letter = i32;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Abelian(Vec<i64>),
    Free(Vec<Letter>),
    Bs(BsWord),
    Product(Vec<Vec<Letter>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    family: Family,
    generators: Vec<String>,
    radius_cap: u32,
}

fn letter_names(count: usize) -> Vec<String> {
    (0..count)
        .map(|i| {
            if i < 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("g{i}")
            }
        })
        .collect()
}

impl GroupSpec {
    pub fn free_abelian(n: usize) -> Self {
        let generators = if n == 1 { vec!["t".to_string()] } else { letter_names(n) };
        GroupSpec { family: Family::FreeAbelian(n), generators, radius_cap: DEFAULT_RADIUS_CAP }
    }

    pub fn free(k: usize) -> Self {
        GroupSpec { family: Family::Free(k), generators: letter_names(k), radius_cap: DEFAULT_RADIUS_CAP }
    }

    pub fn baumslag_solitar(m: i64, n: i64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::MalformedGroup(format!("BS({m},{n})")));
        }
        Ok(GroupSpec {
            family: Family::BaumslagSolitar(m, n),
            generators: vec!["x".into(), "y".into()],
            radius_cap: DEFAULT_RADIUS_CAP,
        })
    }

    pub fn product_of_trees(ranks: Vec<usize>) -> Result<Self> {
        if ranks.is_empty() || ranks.contains(&0) {
            return Err(Error::MalformedGroup(format!("T{ranks:?}")));
        }
        let total = ranks.iter().sum();
        Ok(GroupSpec {
            family: Family::ProductOfTrees(ranks),
            generators: letter_names(total),
            radius_cap: DEFAULT_RADIUS_CAP,
        })
    }

    pub fn with_generators(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.generators.len() {
            return Err(Error::MalformedGroup(format!(
                "expected {} generator names, got {}",
                self.generators.len(),
                names.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for n in &names {
            let ok = !n.is_empty()
                && n.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok || !seen.insert(n.clone()) {
                return Err(Error::MalformedGroup(format!("bad generator name `{n}`")));
            }
        }
        self.generators = names;
        Ok(self)
    }

    pub fn with_radius_cap(mut self, cap: u32) -> Self {
        self.radius_cap = cap;
        self
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn radius_cap(&self) -> u32 {
        self.radius_cap
    }

    /// True for the abelian family, where group rings are Laurent polynomial rings.
    pub fn is_free_abelian(&self) -> bool {
        matches!(self.family, Family::FreeAbelian(_))
    }

    fn has_default_names(&self) -> bool {
        let default = match &self.family {
            Family::FreeAbelian(n) => GroupSpec::free_abelian(*n),
            Family::Free(k) => GroupSpec::free(*k),
            Family::BaumslagSolitar(m, n) => GroupSpec::baumslag_solitar(*m, *n).expect("valid"),
            Family::ProductOfTrees(r) => GroupSpec::product_of_trees(r.clone()).expect("valid"),
        };
        default.generators == self.generators
    }

    pub fn identity(&self) -> GroupElement {
        match &self.family {
            Family::FreeAbelian(n) => GroupElement::Abelian(vec![0; *n]),
            Family::Free(_) => GroupElement::Free(Vec::new()),
            Family::BaumslagSolitar(..) => GroupElement::Bs(BsWord::identity()),
            Family::ProductOfTrees(r) => GroupElement::Product(vec![Vec::new(); r.len()]),
        }
    }

    /// Checks that an element belongs to this family and is in normal form.
    pub fn contains(&self, g: &GroupElement) -> bool {
        match (&self.family, g) {
            (Family::FreeAbelian(n), GroupElement::Abelian(v)) => v.len() == *n,
            (Family::Free(k), GroupElement::Free(w)) => free_word_ok(w, *k),
            (Family::BaumslagSolitar(m, n), GroupElement::Bs(w)) => w.is_normal(*m, *n),
            (Family::ProductOfTrees(r), GroupElement::Product(ws)) => {
                ws.len() == r.len() && ws.iter().zip(r).all(|(w, k)| free_word_ok(w, *k))
            }
            _ => false,
        }
    }

    /// Right multiplication by `generator^sign` (sign is ±1).
    pub fn mul_generator(&self, g: &GroupElement, generator: usize, sign: i64) -> GroupElement {
        self.mul_generator_power(g, generator, sign)
    }

    fn mul_generator_power(&self, g: &GroupElement, generator: usize, exp: i64) -> GroupElement {
        let mut out = g.clone();
        self.push_power(&mut out, generator, exp);
        out
    }

    fn push_power(&self, g: &mut GroupElement, generator: usize, exp: i64) {
        if exp == 0 {
            return;
        }
        match (&self.family, g) {
            (Family::FreeAbelian(_), GroupElement::Abelian(v)) => v[generator] += exp,
            (Family::Free(_), GroupElement::Free(w)) => push_free(w, generator, exp),
            (Family::BaumslagSolitar(m, n), GroupElement::Bs(w)) => {
                if generator == 0 {
                    w.push_x(*m, *n, exp);
                } else {
                    w.push_y(exp);
                }
            }
            (Family::ProductOfTrees(ranks), GroupElement::Product(ws)) => {
                let (factor, local) = split_index(ranks, generator);
                push_free(&mut ws[factor], local, exp);
            }
            _ => unreachable!("element does not belong to this group"),
        }
    }

    /// Reduces a word, given as (generator index, exponent) syllables, to normal form.
    pub fn normal_form(&self, word: &[(usize, i64)]) -> Result<GroupElement> {
        let mut g = self.identity();
        for &(gen, exp) in word {
            if gen >= self.generators.len() {
                return Err(Error::UnknownGenerator(format!("#{gen}")));
            }
            self.push_power(&mut g, gen, exp);
        }
        Ok(g)
    }

    /// The element as a syllable word that reproduces it under [`GroupSpec::normal_form`].
    pub fn syllables(&self, g: &GroupElement) -> Vec<(usize, i64)> {
        match g {
            GroupElement::Abelian(v) => {
                v.iter().enumerate().filter(|(_, e)| **e != 0).map(|(i, e)| (i, *e)).collect()
            }
            GroupElement::Free(w) => free_syllables(w, 0),
            GroupElement::Bs(w) => w.syllables(),
            GroupElement::Product(ws) => {
                let ranks = match &self.family {
                    Family::ProductOfTrees(r) => r,
                    _ => unreachable!(),
                };
                let mut offset = 0;
                let mut out = Vec::new();
                for (w, k) in ws.iter().zip(ranks) {
                    out.extend(free_syllables(w, offset));
                    offset += k;
                }
                out
            }
        }
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        match (a, b) {
            (GroupElement::Abelian(x), GroupElement::Abelian(y)) => {
                GroupElement::Abelian(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            (GroupElement::Free(x), GroupElement::Free(y)) => {
                let mut w = x.clone();
                for &l in y {
                    push_letter(&mut w, l);
                }
                GroupElement::Free(w)
            }
            (GroupElement::Product(xs), GroupElement::Product(ys)) => GroupElement::Product(
                xs.iter()
                    .zip(ys)
                    .map(|(x, y)| {
                        let mut w = x.clone();
                        for &l in y {
                            push_letter(&mut w, l);
                        }
                        w
                    })
                    .collect(),
            ),
            _ => {
                let mut g = a.clone();
                for (gen, exp) in self.syllables(b) {
                    self.push_power(&mut g, gen, exp);
                }
                g
            }
        }
    }

    pub fn inverse(&self, g: &GroupElement) -> GroupElement {
        match g {
            GroupElement::Abelian(v) => GroupElement::Abelian(v.iter().map(|e| -e).collect()),
            GroupElement::Free(w) => GroupElement::Free(w.iter().rev().map(|l| -l).collect()),
            GroupElement::Product(ws) => GroupElement::Product(
                ws.iter().map(|w| w.iter().rev().map(|l| -l).collect()).collect(),
            ),
            GroupElement::Bs(_) => {
                let syl = self.syllables(g);
                let mut h = self.identity();
                for (gen, exp) in syl.into_iter().rev() {
                    self.push_power(&mut h, gen, -exp);
                }
                h
            }
        }
    }

    /// Word length `|g|`.
    pub fn length(&self, g: &GroupElement) -> Result<u32> {
        match g {
            GroupElement::Abelian(v) => Ok(v.iter().map(|e| e.unsigned_abs() as u32).sum()),
            GroupElement::Free(w) => Ok(w.len() as u32),
            GroupElement::Product(ws) => Ok(ws.iter().map(|w| w.len() as u32).sum()),
            GroupElement::Bs(w) => match &self.family {
                Family::BaumslagSolitar(m, n) => bs::length(*m, *n, w, self.radius_cap),
                _ => Err(Error::GroupMismatch),
            },
        }
    }

    /// Left-invariant word distance `|g⁻¹h|`.
    pub fn distance(&self, g: &GroupElement, h: &GroupElement) -> Result<u32> {
        match (g, h) {
            (GroupElement::Abelian(x), GroupElement::Abelian(y)) => {
                Ok(x.iter().zip(y).map(|(p, q)| (p - q).unsigned_abs() as u32).sum())
            }
            (GroupElement::Free(x), GroupElement::Free(y)) => Ok(free_distance(x, y)),
            (GroupElement::Product(xs), GroupElement::Product(ys)) => {
                Ok(xs.iter().zip(ys).map(|(x, y)| free_distance(x, y)).sum())
            }
            _ => self.length(&self.mul(&self.inverse(g), h)),
        }
    }

    /// Words of length exactly one: each generator and its inverse, in index order.
    pub fn unit_steps(&self) -> Vec<(usize, i64)> {
        (0..self.generators.len()).flat_map(|i| [(i, 1), (i, -1)]).collect()
    }

    pub fn format(&self, g: &GroupElement) -> String {
        let syl = self.syllables(g);
        if syl.is_empty() {
            return "1".to_string();
        }
        syl.iter()
            .map(|(gen, e)| {
                let name = &self.generators[*gen];
                if *e == 1 {
                    name.clone()
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }

    /// Parses a word such as `x*y^2*x^-1`, `a b a^-1` or `1` and reduces it.
    pub fn parse_word(&self, s: &str) -> Result<GroupElement> {
        let word = self.parse_syllables(s)?;
        self.normal_form(&word)
    }

    pub fn parse_syllables(&self, s: &str) -> Result<Vec<(usize, i64)>> {
        let trimmed = s.trim();
        if trimmed.is_empty() || trimmed == "1" || trimmed == "e" && !self.generators.iter().any(|g| g == "e") {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for tok in trimmed.split(|c: char| c == '*' || c == '·' || c.is_whitespace()) {
            if tok.is_empty() {
                continue;
            }
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => {
                    let e = e.trim_start_matches('(').trim_end_matches(')');
                    let exp: i64 = e.parse().map_err(|_| Error::MalformedWord(s.to_string()))?;
                    (n, exp)
                }
                None => (tok, 1),
            };
            if name == "1" {
                continue;
            }
            let gen = self
                .generators
                .iter()
                .position(|g| g == name)
                .ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
            out.push((gen, exp));
        }
        Ok(out)
    }

    /// Short textual name: `Z`, `Z2`, `F2`, `BS(2,3)`, `T(1,1)`.
    pub fn short_name(&self) -> String {
        match &self.family {
            Family::FreeAbelian(1) => "Z".into(),
            Family::FreeAbelian(n) => format!("Z{n}"),
            Family::Free(k) => format!("F{k}"),
            Family::BaumslagSolitar(m, n) => format!("BS({m},{n})"),
            Family::ProductOfTrees(r) => format!(
                "T({})",
                r.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",")
            ),
        }
    }

    /// Number of tree factors when the group is viewed as a product of trees
    /// (lines for the abelian family). `None` for families without tree structure.
    pub fn tree_factors(&self) -> Option<usize> {
        match &self.family {
            Family::FreeAbelian(n) => Some(*n),
            Family::Free(_) => Some(1),
            Family::ProductOfTrees(r) => Some(r.len()),
            Family::BaumslagSolitar(..) => None,
        }
    }
}

fn split_index(ranks: &[usize], generator: usize) -> (usize, usize) {
    let mut rest = generator;
    for (i, k) in ranks.iter().enumerate() {
        if rest < *k {
            return (i, rest);
        }
        rest -= k;
    }
    panic!("generator index out of range")
}

fn free_word_ok(w: &[Letter], k: usize) -> bool {
    w.iter().all(|l| *l != 0 && l.unsigned_abs() as usize <= k) && w.windows(2).all(|p| p[0] != -p[1])
}

pub(crate) fn push_letter(w: &mut Vec<Letter>, l: Letter) {
    if w.last() == Some(&-l) {
        w.pop();
    } else {
        w.push(l);
    }
}

fn push_free(w: &mut Vec<Letter>, generator: usize, exp: i64) {
    let l = (generator + 1) as Letter;
    let l = if exp > 0 { l } else { -l };
    for _ in 0..exp.unsigned_abs() {
        push_letter(w, l);
    }
}

fn free_syllables(w: &[Letter], offset: usize) -> Vec<(usize, i64)> {
    let mut out: Vec<(usize, i64)> = Vec::new();
    for &l in w {
        let gen = l.unsigned_abs() as usize - 1 + offset;
        let e = if l > 0 { 1 } else { -1 };
        match out.last_mut() {
            Some((g, x)) if *g == gen && x.signum() == e => *x += e,
            _ => out.push((gen, e)),
        }
    }
    out
}

fn free_distance(x: &[Letter], y: &[Letter]) -> u32 {
    let common = x.iter().zip(y).take_while(|(a, b)| a == b).count();
    (x.len() + y.len() - 2 * common) as u32
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.short_name())
    }
}

fn parse_int_list(inner: &str, orig: &str) -> Result<Vec<i64>> {
    inner
        .split(',')
        .map(|p| p.trim().parse::<i64>().map_err(|_| Error::MalformedGroup(orig.to_string())))
        .collect()
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::MalformedGroup(s.to_string());
        let paren = |prefix: &str| -> Option<&str> {
            t.strip_prefix(prefix).and_then(|r| r.strip_prefix('(')).and_then(|r| r.strip_suffix(')'))
        };
        if t == "Z" {
            return Ok(GroupSpec::free_abelian(1));
        }
        if let Some(inner) = paren("BS") {
            let v = parse_int_list(inner, s)?;
            if v.len() != 2 {
                return Err(bad());
            }
            return GroupSpec::baumslag_solitar(v[0], v[1]);
        }
        if let Some(inner) = paren("T") {
            let v = parse_int_list(inner, s)?;
            if v.iter().any(|k| *k <= 0) {
                return Err(bad());
            }
            return GroupSpec::product_of_trees(v.into_iter().map(|k| k as usize).collect());
        }
        if let Some(inner) = paren("F") {
            let k: usize = inner.parse().map_err(|_| bad())?;
            return if k == 0 { Err(bad()) } else { Ok(GroupSpec::free(k)) };
        }
        if let Some(inner) = paren("Z") {
            let n: usize = inner.parse().map_err(|_| bad())?;
            return if n == 0 { Err(bad()) } else { Ok(GroupSpec::free_abelian(n)) };
        }
        if let Some(rest) = t.strip_prefix("Z^").or_else(|| t.strip_prefix('Z')) {
            let n: usize = rest.parse().map_err(|_| bad())?;
            return if n == 0 { Err(bad()) } else { Ok(GroupSpec::free_abelian(n)) };
        }
        if let Some(rest) = t.strip_prefix('F') {
            let k: usize = rest.parse().map_err(|_| bad())?;
            return if k == 0 { Err(bad()) } else { Ok(GroupSpec::free(k)) };
        }
        Err(bad())
    }
}

/// Object form of a group spec, used when generator names are customised.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupSpecObject {
    family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generators: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radius_cap: Option<u32>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GroupSpecRepr {
    Short(String),
    Object(GroupSpecObject),
}

impl Serialize for GroupSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.has_default_names() && self.radius_cap == DEFAULT_RADIUS_CAP {
            s.serialize_str(&self.short_name())
        } else {
            GroupSpecObject {
                family: self.short_name(),
                generators: (!self.has_default_names()).then(|| self.generators.clone()),
                radius_cap: (self.radius_cap != DEFAULT_RADIUS_CAP).then_some(self.radius_cap),
            }
            .serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match GroupSpecRepr::deserialize(d)? {
            GroupSpecRepr::Short(s) => s.parse().map_err(D::Error::custom),
            GroupSpecRepr::Object(o) => {
                let mut g: GroupSpec = o.family.parse().map_err(D::Error::custom)?;
                if let Some(names) = o.generators {
                    g = g.with_generators(names).map_err(D::Error::custom)?;
                }
                if let Some(cap) = o.radius_cap {
                    g = g.with_radius_cap(cap);
                }
                Ok(g)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_reduction() {
        let f2 = GroupSpec::free(2);
        assert_eq!(f2.parse_word("a*a^-1*b").unwrap(), f2.parse_word("b").unwrap());
        assert_eq!(f2.format(&f2.parse_word("a a b^-1 b^-1 b").unwrap()), "a^2*b^-1");
    }

    #[test]
    fn abelian_commutes() {
        let z2 = GroupSpec::free_abelian(2);
        assert_eq!(z2.parse_word("a*b*a^-1").unwrap(), z2.parse_word("b").unwrap());
    }

    #[test]
    fn bs_relation() {
        let g = GroupSpec::baumslag_solitar(2, 3).unwrap();
        assert_eq!(g.parse_word("x*y*y*x^-1").unwrap(), g.parse_word("y^3").unwrap());
        assert_eq!(g.parse_word("x^-1*y^3*x").unwrap(), g.parse_word("y^2").unwrap());
    }

    #[test]
    fn unknown_symbol() {
        let f2 = GroupSpec::free(2);
        assert_eq!(f2.parse_word("a*q"), Err(Error::UnknownGenerator("q".into())));
    }

    #[test]
    fn spec_names_round_trip() {
        for s in ["Z", "Z2", "Z3", "F2", "BS(2,3)", "T(1,1)", "T(2,1)"] {
            let g: GroupSpec = s.parse().unwrap();
            assert_eq!(g.short_name(), s);
            let json = serde_json::to_string(&g).unwrap();
            let back: GroupSpec = serde_json::from_str(&json).unwrap();
            assert_eq!(back, g);
        }
        let custom = GroupSpec::free_abelian(2).with_generators(vec!["t1".into(), "t2".into()]).unwrap();
        let json = serde_json::to_string(&custom).unwrap();
        assert_eq!(serde_json::from_str::<GroupSpec>(&json).unwrap(), custom);
    }
}
