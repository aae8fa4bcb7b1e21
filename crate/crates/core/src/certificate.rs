//! Window-scale certificates: "property P holds with constant c for every sampled
//! subset inside the ball of radius r".

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::ring::vector::{vector_to_json, ModuleVector};
use crate::space::group::{GroupElement, GroupSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    Lean,
    Insular,
    AntitheticInsular,
    Bounded,
    Bicontrolled,
    LocalFinite,
    Cover,
    UniformEmbedding,
    Equivariance,
    Cocycle,
    Injective,
    Surjective,
    Idempotent,
    Complement,
    Exactness,
}

/// A concrete witness that a property fails.
#[derive(Debug, Clone, PartialEq)]
pub enum Counterexample {
    UncoveredPoint { point: GroupElement },
    Disjointness { family: usize, first: GroupElement, second: GroupElement, distance: u32 },
    Diameter { family: usize, first: GroupElement, second: GroupElement, distance: u32 },
    Embedding { x: GroupElement, y: GroupElement, source_distance: u32, target_distance: u32, lower_side: bool },
    /// `witness` lies in the left-hand side computed from the subsets but not in the right-hand side.
    Subsets { s: Vec<GroupElement>, u: Option<Vec<GroupElement>>, witness: ModuleVector },
    Equivariance { gamma: GroupElement, vector: ModuleVector },
    Message(String),
}

impl Counterexample {
    pub fn to_json(&self, spec: &GroupSpec) -> Value {
        let fmt = |g: &GroupElement| spec.format(g);
        let fmt_set = |v: &Vec<GroupElement>| v.iter().map(|g| spec.format(g)).collect::<Vec<_>>();
        match self {
            Counterexample::UncoveredPoint { point } => json!({"type": "uncovered-point", "point": fmt(point)}),
            Counterexample::Disjointness { family, first, second, distance } => json!({
                "type": "disjointness", "family": family, "first": fmt(first), "second": fmt(second), "distance": distance
            }),
            Counterexample::Diameter { family, first, second, distance } => json!({
                "type": "diameter", "family": family, "first": fmt(first), "second": fmt(second), "distance": distance
            }),
            Counterexample::Embedding { x, y, source_distance, target_distance, lower_side } => json!({
                "type": "embedding", "x": fmt(x), "y": fmt(y),
                "source_distance": source_distance, "target_distance": target_distance,
                "side": if *lower_side { "lower" } else { "upper" }
            }),
            Counterexample::Subsets { s, u, witness } => json!({
                "type": "subsets", "s": fmt_set(s), "u": u.as_ref().map(fmt_set), "witness": vector_to_json(spec, witness)
            }),
            Counterexample::Equivariance { gamma, vector } => json!({
                "type": "equivariance", "gamma": fmt(gamma), "vector": vector_to_json(spec, vector)
            }),
            Counterexample::Message(m) => json!({"type": "message", "message": m}),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlCertificate {
    pub kind: CertificateKind,
    pub constant: u32,
    pub radius: u32,
    pub verdict: bool,
    pub counterexample: Option<Counterexample>,
    /// Free-form qualifier, e.g. the sampling plan or "hypothesis unmet".
    pub note: Option<String>,
}

impl ControlCertificate {
    pub fn pass(kind: CertificateKind, constant: u32, radius: u32) -> Self {
        ControlCertificate { kind, constant, radius, verdict: true, counterexample: None, note: None }
    }

    pub fn fail(kind: CertificateKind, constant: u32, radius: u32, counterexample: Counterexample) -> Self {
        ControlCertificate { kind, constant, radius, verdict: false, counterexample: Some(counterexample), note: None }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict
    }

    /// Merges two certificates of the same kind: max constant, min window, conjunction of verdicts.
    pub fn merge(self, other: ControlCertificate) -> ControlCertificate {
        let counterexample = self.counterexample.clone().or(other.counterexample.clone());
        ControlCertificate {
            kind: self.kind,
            constant: self.constant.max(other.constant),
            radius: self.radius.min(other.radius),
            verdict: self.verdict && other.verdict,
            counterexample,
            note: self.note.or(other.note),
        }
    }

    pub fn to_json(&self, spec: &GroupSpec) -> Value {
        json!({
            "kind": self.kind,
            "constant": self.constant,
            "radius": self.radius,
            "verdict": if self.verdict { "pass" } else { "fail" },
            "counterexample": self.counterexample.as_ref().map(|c| c.to_json(spec)),
            "note": self.note,
        })
    }
}
