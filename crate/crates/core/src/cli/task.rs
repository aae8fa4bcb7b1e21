//! Task files: one JSON object per task, resolved into a self-contained [`TaskSpec`].

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::filtered::{Insularity, PresentedModule, SamplingPlan};
use crate::resolution::is_tier_a;
use crate::ring::{GroupRing, RingSpec};
use crate::space::{Family, GroupSpec, MapRule, WitnessFn};

/// Environment variable naming the corpus root.
pub const CORPUS_ENV: &str = "CTRLMOD_CORPUS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Ball,
    Cover,
    EmbedCheck,
    Filtration,
    LeanCheck,
    InsularCheck,
    ControlCheck,
    Classify,
    Resolve,
    Idempotent,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Ball => "ball",
            Command::Cover => "cover",
            Command::EmbedCheck => "embed-check",
            Command::Filtration => "filtration",
            Command::LeanCheck => "lean-check",
            Command::InsularCheck => "insular-check",
            Command::ControlCheck => "control-check",
            Command::Classify => "classify",
            Command::Resolve => "resolve",
            Command::Idempotent => "idempotent",
        }
    }

    fn uses_window(self) -> bool {
        !matches!(self, Command::Ball)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Kernel tier of a resolution: `A` computes complete kernels, `B` window kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tier {
    A,
    B,
}

/// A module given inline or as a path to a module file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModuleSource {
    Path(String),
    Inline(Value),
}

impl ModuleSource {
    /// The inline object; paths are replaced by [`parse_spec`].
    pub fn value(&self) -> Result<&Value> {
        match self {
            ModuleSource::Inline(v) => Ok(v),
            ModuleSource::Path(p) => Err(Error::InvalidTask(format!("module path `{p}` was not resolved"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismSpec {
    /// `rank(source) × rank(target)` matrix, acting on row vectors.
    pub matrix: Value,
    #[serde(default)]
    pub equivariant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingSpec {
    pub source: GroupSpec,
    pub target: GroupSpec,
    pub rule: MapRule,
    pub lower: WitnessFn,
    pub upper: WitnessFn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<RingSpec>,
    /// Ball radius for `ball`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module: Option<ModuleSource>,
    /// Target module of a morphism; defaults to `module`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<ModuleSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub morphism: Option<MorphismSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<EmbeddingSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separation: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<u32>,
    /// `D` for lean-check, `d` for insular-check, `b` for control-check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<Insularity>,
    #[serde(default)]
    pub seed: u64,
    /// Sampled pairs for `embed-check`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<usize>,
    /// Words of the subset `S` for `filtration`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset: Option<Vec<String>>,
    /// Square matrix for `idempotent`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<SamplingPlan>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tier: Option<Tier>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

/// Window radius used when a task does not name one.
pub fn default_window(group: &GroupSpec) -> u32 {
    match group.family() {
        Family::FreeAbelian(1) | Family::FreeAbelian(2) => 20,
        Family::FreeAbelian(_) => 12,
        Family::Free(2) => 8,
        Family::Free(_) => 6,
        Family::BaumslagSolitar(..) => 6,
        Family::ProductOfTrees(_) => 8,
    }
}

/// The corpus root: `$CTRLMOD_CORPUS`, or the corpus shipped with the crate.
pub fn corpus_root() -> PathBuf {
    std::env::var_os(CORPUS_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join("v1"))
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidTask(format!("{}: {e}", path.display())))
}

/// Absolute paths as given; relative ones against `base`, then the corpus root.
fn locate(name: &str, base: Option<&Path>) -> Result<PathBuf> {
    let p = Path::new(name);
    if p.is_absolute() {
        return Ok(p.to_path_buf());
    }
    let candidates = base.map(|b| b.join(p)).into_iter().chain(std::iter::once(corpus_root().join(p)));
    for c in candidates {
        if c.is_file() {
            return Ok(c);
        }
    }
    Err(Error::Io(format!("module file `{name}` not found")))
}

/// Replaces module paths, including those nested in a `filtration` field, by file contents.
fn inline_module(v: &Value, base: Option<&Path>) -> Result<Value> {
    let (mut obj, dir) = match v {
        Value::String(name) => {
            let path = locate(name, base)?;
            let dir = path.parent().map(Path::to_path_buf);
            (read_json(&path)?, dir)
        }
        other => (other.clone(), base.map(Path::to_path_buf)),
    };
    if !obj.is_object() {
        return Err(Error::InvalidTask("module must be an object or a path".into()));
    }
    if let Some(Value::Object(f)) = obj.get_mut("filtration") {
        if let Some(src) = f.get("source").cloned() {
            f.insert("source".into(), inline_module(&src, dir.as_deref())?);
        }
    }
    Ok(obj)
}

impl TaskSpec {
    /// Parses a task from JSON text. `base` resolves relative module paths.
    pub fn from_json_str(text: &str, base: Option<&Path>) -> Result<TaskSpec> {
        let task: TaskSpec = serde_json::from_str(text).map_err(|e| Error::InvalidTask(e.to_string()))?;
        task.resolve(base)
    }

    /// Inlines modules, applies defaults and checks invariants.
    pub fn resolve(mut self, base: Option<&Path>) -> Result<TaskSpec> {
        for src in [&mut self.module, &mut self.target].into_iter().flatten() {
            let raw = match src {
                ModuleSource::Path(p) => Value::String(p.clone()),
                ModuleSource::Inline(v) => v.clone(),
            };
            *src = ModuleSource::Inline(inline_module(&raw, base)?);
        }
        self.require_fields()?;
        if self.command == Command::Resolve {
            let gr = self.module_ring()?;
            let inferred = if is_tier_a(&gr) { Tier::A } else { Tier::B };
            match self.tier {
                Some(t) if t != inferred => {
                    return Err(Error::InvalidTask(format!("tier {t:?} declared, but the module is tier {inferred:?}")));
                }
                _ => self.tier = Some(inferred),
            }
        } else if self.tier.is_some() {
            return Err(Error::InvalidTask("`tier` applies to resolve tasks only".into()));
        }
        if self.command.uses_window() && self.window.is_none() {
            self.window = Some(default_window(&self.space()?));
        }
        self.validate()?;
        Ok(self)
    }

    fn require_fields(&self) -> Result<()> {
        let need = |ok: bool, field: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidTask(format!("{} task needs `{field}`", self.command)))
            }
        };
        match self.command {
            Command::Ball => {
                need(self.group.is_some(), "group")?;
                need(self.r.is_some(), "r")
            }
            Command::Cover => {
                need(self.group.is_some(), "group")?;
                need(self.separation.is_some(), "separation")
            }
            Command::EmbedCheck => need(self.embedding.is_some(), "embedding"),
            Command::Filtration => {
                need(self.module.is_some(), "module")?;
                need(self.subset.is_some(), "subset")
            }
            Command::LeanCheck | Command::InsularCheck | Command::Resolve => need(self.module.is_some(), "module"),
            Command::ControlCheck | Command::Classify => {
                need(self.module.is_some(), "module")?;
                need(self.morphism.is_some(), "morphism")
            }
            Command::Idempotent => {
                need(self.group.is_some(), "group")?;
                need(self.ring.is_some(), "ring")?;
                need(self.matrix.is_some(), "matrix")
            }
        }
    }

    /// Rejects constants above the window.
    pub fn validate(&self) -> Result<()> {
        if let (Some(c), Some(w)) = (self.constant, self.window) {
            if c > w {
                return Err(Error::InvalidTask(format!("constant exceeds window ({c} > {w})")));
            }
        }
        Ok(())
    }

    /// The group of the metric space the task lives on.
    pub fn space(&self) -> Result<GroupSpec> {
        if let Some(e) = &self.embedding {
            return Ok(e.target.clone());
        }
        if let Some(m) = &self.module {
            return Ok(module_space(m.value()?)?);
        }
        self.group.clone().ok_or_else(|| Error::InvalidTask(format!("{} task needs `group`", self.command)))
    }

    fn module_ring(&self) -> Result<GroupRing> {
        let v = self.module.as_ref().expect("checked").value()?;
        Ok(PresentedModule::from_json(v)?.gr)
    }

    /// Pretty JSON of the resolved task; re-parses to an equal task.
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("task serializes")
    }
}

/// The space a module file is filtered over: the embedding target for pushforwards.
fn module_space(v: &Value) -> Result<GroupSpec> {
    if let Some(t) = v.get("filtration").and_then(|f| f.get("embedding")).and_then(|e| e.get("target")) {
        return serde_json::from_value(t.clone()).map_err(|e| Error::InvalidTask(format!("embedding target: {e}")));
    }
    let g = v.get("group").ok_or_else(|| Error::InvalidTask("module spec: missing `group`".into()))?;
    serde_json::from_value(g.clone()).map_err(|e| Error::InvalidTask(format!("module spec `group`: {e}")))
}

/// Reads and resolves a task file.
pub fn parse_spec(path: &Path) -> Result<TaskSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    TaskSpec::from_json_str(&text, path.parent())
}
