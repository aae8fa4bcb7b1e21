//! Sparse vectors of free group-ring modules `R[Γ]^k`, indexed by (group element, basis index).

use std::collections::BTreeMap;

use num_traits::Zero;
use serde_json::{json, Value};

use super::scalar::{format_scalar, RingSpec, Scalar};
use crate::error::{Error, Result};
use crate::space::group::{GroupElement, GroupSpec};

/// Coordinate `γ·e_i` of a free module.
pub type Coord = (GroupElement, usize);

/// R-linear combination of coordinates with no stored zeros.
pub type ModuleVector = BTreeMap<Coord, Scalar>;

pub fn unit(g: GroupElement, i: usize) -> ModuleVector {
    let mut v = ModuleVector::new();
    v.insert((g, i), Scalar::from_integer(1.into()));
    v
}

/// `v += c·w`.
pub fn add_scaled(ring: &RingSpec, v: &mut ModuleVector, c: &Scalar, w: &ModuleVector) {
    if c.is_zero() {
        return;
    }
    for (k, x) in w {
        let term = ring.mul(c, x);
        let entry = v.entry(k.clone()).or_insert_with(Scalar::zero);
        *entry = ring.add(entry, &term);
        if entry.is_zero() {
            v.remove(k);
        }
    }
}

pub fn scale(ring: &RingSpec, c: &Scalar, w: &ModuleVector) -> ModuleVector {
    let mut v = ModuleVector::new();
    add_scaled(ring, &mut v, c, w);
    v
}

pub fn sub(ring: &RingSpec, a: &ModuleVector, b: &ModuleVector) -> ModuleVector {
    let mut v = a.clone();
    add_scaled(ring, &mut v, &ring.from_int(-1), b);
    v
}

/// Left translation `γ·v`.
pub fn translate(spec: &GroupSpec, gamma: &GroupElement, v: &ModuleVector) -> ModuleVector {
    v.iter().map(|((g, i), c)| ((spec.mul(gamma, g), *i), c.clone())).collect()
}

/// Largest word length of a support element.
pub fn support_radius(spec: &GroupSpec, v: &ModuleVector) -> Result<u32> {
    let mut r = 0;
    for (g, _) in v.keys() {
        r = r.max(spec.length(g)?);
    }
    Ok(r)
}

pub fn vector_to_json(spec: &GroupSpec, v: &ModuleVector) -> Value {
    Value::Array(
        v.iter()
            .map(|((g, i), c)| json!({"index": i, "word": spec.format(g), "coeff": format_scalar(c)}))
            .collect(),
    )
}

pub fn vector_from_json(spec: &GroupSpec, ring: &RingSpec, v: &Value) -> Result<ModuleVector> {
    let bad = || Error::InvalidTask("vector must be a list of {index, word, coeff}".into());
    let mut out = ModuleVector::new();
    for t in v.as_array().ok_or_else(bad)? {
        let i = t.get("index").and_then(Value::as_u64).unwrap_or(0) as usize;
        let w = t.get("word").and_then(Value::as_str).ok_or_else(bad)?;
        let c = t.get("coeff").and_then(Value::as_str).ok_or_else(bad)?;
        let term = unit(spec.parse_word(w)?, i);
        add_scaled(ring, &mut out, &ring.parse_scalar(c)?, &term);
    }
    Ok(out)
}
