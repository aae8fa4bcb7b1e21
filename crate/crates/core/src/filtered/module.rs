//! Finitely presented modules `R[Γ]^rank / ⟨relations⟩` with a finite generating set Σ.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ring::group_ring::{GroupRing, GroupRingElement, GroupRingMatrix};
use crate::ring::vector::ModuleVector;
use crate::ring::window::WindowContext;
use crate::space::group::GroupSpec;

/// An element of Σ, given in ambient coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub label: String,
    pub value: Vec<GroupRingElement>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentedModule {
    pub gr: GroupRing,
    pub rank: usize,
    /// Rows are relations in `R[Γ]^rank`.
    pub relations: GroupRingMatrix,
    pub sigma: Vec<Generator>,
}

fn basis_sigma(gr: &GroupRing, rank: usize) -> Vec<Generator> {
    (0..rank)
        .map(|i| Generator {
            label: format!("e{}", i + 1),
            value: (0..rank).map(|j| if i == j { gr.one() } else { GroupRingElement::zero() }).collect(),
        })
        .collect()
}

impl PresentedModule {
    pub fn new(gr: GroupRing, rank: usize, relations: GroupRingMatrix, sigma: Vec<Generator>) -> Result<Self> {
        if sigma.is_empty() {
            return Err(Error::EmptyGeneratingSet);
        }
        if relations.cols != rank && !(relations.rows == 0) {
            return Err(Error::DimensionMismatch(format!("relations have {} columns, rank is {rank}", relations.cols)));
        }
        if let Some(g) = sigma.iter().find(|g| g.value.len() != rank) {
            return Err(Error::DimensionMismatch(format!("generator {} has {} entries", g.label, g.value.len())));
        }
        let relations = if relations.rows == 0 { GroupRingMatrix::zero(0, rank) } else { relations };
        Ok(PresentedModule { gr, rank, relations, sigma })
    }

    /// `R[Γ]^rank` with its standard basis as Σ.
    pub fn free(gr: &GroupRing, rank: usize) -> Self {
        PresentedModule { gr: gr.clone(), rank, relations: GroupRingMatrix::zero(0, rank), sigma: basis_sigma(gr, rank) }
    }

    /// `R` with every group element acting as the identity: relations `s − 1`.
    pub fn trivial(gr: &GroupRing) -> Self {
        let spec = &gr.group;
        let rows: Vec<Vec<GroupRingElement>> = (0..spec.generators().len())
            .map(|i| {
                let s = spec.normal_form(&[(i, 1)]).expect("generator index");
                vec![gr.sub(&gr.monomial(gr.ring.one(), s), &gr.one())]
            })
            .collect();
        let relations = GroupRingMatrix::from_rows(rows, 1).expect("rank one");
        PresentedModule { gr: gr.clone(), rank: 1, relations, sigma: basis_sigma(gr, 1) }
    }

    /// Same module, different generating set.
    pub fn with_sigma(&self, sigma: Vec<Generator>) -> Result<Self> {
        PresentedModule::new(self.gr.clone(), self.rank, self.relations.clone(), sigma)
    }

    pub fn group(&self) -> &GroupSpec {
        &self.gr.group
    }

    pub fn is_free(&self) -> bool {
        self.relations.is_zero()
    }

    pub fn sigma_vectors(&self) -> Vec<ModuleVector> {
        self.sigma.iter().map(|g| self.gr.row_to_vector(&g.value)).collect()
    }

    pub fn relation_vectors(&self) -> Vec<ModuleVector> {
        (0..self.relations.rows).map(|i| self.relations.row_vector(&self.gr, i)).collect()
    }

    /// Largest support radius of a generator in Σ.
    pub fn sigma_radius(&self) -> Result<u32> {
        let mut r = 0;
        for g in &self.sigma {
            for a in &g.value {
                r = r.max(self.gr.support_radius(a)?);
            }
        }
        Ok(r)
    }

    pub fn context(&self, radius: u32) -> Result<WindowContext> {
        WindowContext::new(&self.gr, self.rank, &self.relation_vectors(), radius)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ring": self.gr.ring,
            "group": self.gr.group,
            "rank": self.rank,
            "relations": self.relations.to_json(&self.gr)["entries"],
            "relation_rows": self.relations.rows,
            "sigma": self.sigma.iter().map(|g| json!({
                "label": g.label,
                "value": g.value.iter().map(|a| self.gr.format(a)).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }

    /// Reads the `ring`, `group`, `rank`, `relations` and `sigma` fields of a module spec.
    ///
    /// Relations are either sparse triplets or rows of expression strings. Σ entries
    /// are basis labels `e1`, `e2`, …, expressions (rank one), or objects with a
    /// `label` and a `value` row. Σ defaults to the standard basis.
    pub fn from_json(v: &Value) -> Result<Self> {
        let field = |k: &str| v.get(k).ok_or_else(|| Error::InvalidTask(format!("module spec: missing `{k}`")));
        let group: GroupSpec = serde_json::from_value(field("group")?.clone())
            .map_err(|e| Error::InvalidTask(format!("module spec `group`: {e}")))?;
        let ring = serde_json::from_value(field("ring")?.clone())
            .map_err(|e| Error::InvalidTask(format!("module spec `ring`: {e}")))?;
        let gr = GroupRing::new(group, ring);
        let rank = field("rank")?.as_u64().ok_or_else(|| Error::InvalidTask("module spec `rank` must be a natural".into()))? as usize;
        let relations = match v.get("relations") {
            None | Some(Value::Null) => GroupRingMatrix::zero(0, rank),
            Some(rel) => parse_matrix(&gr, rel, v.get("relation_rows").and_then(Value::as_u64).map(|r| r as usize), rank)?,
        };
        let sigma = match v.get("sigma") {
            None | Some(Value::Null) => basis_sigma(&gr, rank),
            Some(Value::Array(items)) => items.iter().enumerate().map(|(i, it)| parse_generator(&gr, rank, i, it)).collect::<Result<Vec<_>>>()?,
            Some(_) => return Err(Error::InvalidTask("module spec `sigma` must be a list".into())),
        };
        PresentedModule::new(gr, rank, relations, sigma)
    }
}

/// Sparse triplets (`rows` inferred when absent) or rows of expression strings.
pub fn parse_matrix(gr: &GroupRing, v: &Value, rows: Option<usize>, cols: usize) -> Result<GroupRingMatrix> {
    let items = v.as_array().ok_or_else(|| Error::InvalidTask("matrix must be a list".into()))?;
    if items.iter().all(Value::is_array) {
        let parsed = items
            .iter()
            .map(|r| {
                r.as_array()
                    .expect("checked")
                    .iter()
                    .map(|e| gr.from_json(e))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        return GroupRingMatrix::from_rows(parsed, cols);
    }
    let inferred = items.iter().filter_map(|t| t.get("row").and_then(Value::as_u64)).max().map_or(0, |r| r as usize + 1);
    let rows = rows.unwrap_or(inferred);
    GroupRingMatrix::from_triplets(gr, rows, cols, v)
}

fn parse_generator(gr: &GroupRing, rank: usize, i: usize, v: &Value) -> Result<Generator> {
    match v {
        Value::String(s) => {
            if let Some(k) = s.strip_prefix('e').and_then(|k| k.parse::<usize>().ok()) {
                if k == 0 || k > rank {
                    return Err(Error::InvalidTask(format!("basis label {s} outside rank {rank}")));
                }
                return Ok(basis_sigma(gr, rank).swap_remove(k - 1));
            }
            if rank != 1 {
                return Err(Error::InvalidTask(format!("generator `{s}` needs an explicit value row for rank {rank}")));
            }
            Ok(Generator { label: s.clone(), value: vec![gr.parse(s)?] })
        }
        Value::Object(_) => {
            let label = v.get("label").and_then(Value::as_str).map_or_else(|| format!("s{}", i + 1), str::to_string);
            let row = v.get("value").and_then(Value::as_array).ok_or_else(|| Error::InvalidTask("generator needs a `value` list".into()))?;
            let value = row.iter().map(|e| gr.from_json(e)).collect::<Result<Vec<_>>>()?;
            if value.len() != rank {
                return Err(Error::DimensionMismatch(format!("generator {label} has {} entries, rank {rank}", value.len())));
            }
            Ok(Generator { label, value })
        }
        _ => Err(Error::InvalidTask("generator must be a label or an object".into())),
    }
}
