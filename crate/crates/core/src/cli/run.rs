//! Task dispatch and report assembly.

use std::time::Instant;

use serde_json::{json, Value};

use crate::certificate::{CertificateKind, ControlCertificate, Counterexample};
use crate::control::{
    bound_of, check_bicontrolled, check_bounded, check_equivariance, classify_morphism, minimal_bicontrol, FilteredMorphism,
};
use crate::error::{Error, Result};
use crate::filtered::{check_insular, check_lean, FilteredModule, Insularity, PresentedModule, SamplingPlan};
use crate::resolution::{idempotent_image, resolve, KernelMode, ResolveOptions, ResolutionChain};
use crate::ring::group_ring::GroupRingMatrix;
use crate::ring::vector::vector_to_json;
use crate::ring::GroupRing;
use crate::space::{
    ball_elements, build_cover, sample_pairs, verify_cover, verify_uniform_embedding, MetricSubset, UniformEmbedding,
};

use super::task::{Command, EmbeddingSpec, TaskSpec, Tier};

pub const TOOL: &str = "ctrlmod";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub task: TaskSpec,
    pub verdict: bool,
    /// Certificate JSON objects in the order they were produced.
    pub certificates: Vec<Value>,
    pub result: Value,
    /// Wall-clock milliseconds; only recorded on request, since it breaks byte-identity.
    pub elapsed_ms: Option<u128>,
    /// The full chain of a resolve task, for `--emit-chain`.
    pub chain: Option<Value>,
}

impl Report {
    /// Process exit code: 0 on pass, 1 on a failed property.
    pub fn exit_code(&self) -> i32 {
        if self.verdict {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "tool": TOOL,
            "version": VERSION,
            "task": self.task.to_json(),
            "verdict": if self.verdict { "pass" } else { "fail" },
            "certificates": self.certificates,
            "result": self.result,
        });
        if let Some(ms) = self.elapsed_ms {
            v["timings"] = json!({ "total_ms": ms });
        }
        v
    }

    pub fn to_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }
}

struct Outcome {
    certificates: Vec<ControlCertificate>,
    result: Value,
    verdict: Option<bool>,
    chain: Option<Value>,
}

impl Outcome {
    fn certs(certificates: Vec<ControlCertificate>, result: Value) -> Self {
        Outcome { certificates, result, verdict: None, chain: None }
    }
}

/// Runs a resolved task. `timings` adds wall-clock data to the report.
pub fn run(task: &TaskSpec, timings: bool) -> Result<Report> {
    let start = Instant::now();
    task.validate()?;
    let space = task.space()?;
    let out = dispatch(task)?;
    let verdict = out.verdict.unwrap_or_else(|| out.certificates.iter().all(ControlCertificate::passed));
    Ok(Report {
        task: task.clone(),
        verdict,
        certificates: out.certificates.iter().map(|c| c.to_json(&space)).collect(),
        result: out.result,
        elapsed_ms: timings.then(|| start.elapsed().as_millis()),
        chain: out.chain,
    })
}

fn window(task: &TaskSpec) -> u32 {
    task.window.expect("resolved tasks carry a window")
}

fn plan(task: &TaskSpec) -> SamplingPlan {
    task.plan.clone().map(|p| SamplingPlan { seed: task.seed, ..p }).unwrap_or_else(|| SamplingPlan::with_seed(task.seed))
}

fn dispatch(task: &TaskSpec) -> Result<Outcome> {
    match task.command {
        Command::Ball => run_ball(task),
        Command::Cover => run_cover(task),
        Command::EmbedCheck => run_embed(task),
        Command::Filtration => run_filtration(task),
        Command::LeanCheck => {
            let m = filtered_module(task.module.as_ref().expect("checked").value()?)?;
            let d = task.constant.unwrap_or(0);
            let cert = check_lean(&m.window(window(task))?, d, &plan(task))?;
            Ok(Outcome::certs(vec![cert], json!({ "filtration": m.rule.name() })))
        }
        Command::InsularCheck => {
            let m = filtered_module(task.module.as_ref().expect("checked").value()?)?;
            let d = task.constant.unwrap_or(0);
            let variant = task.variant.unwrap_or(Insularity::Strict);
            let cert = check_insular(&m.window(window(task))?, d, &plan(task), variant)?;
            Ok(Outcome::certs(vec![cert], json!({ "filtration": m.rule.name(), "variant": variant })))
        }
        Command::ControlCheck => run_control(task),
        Command::Classify => {
            let phi = morphism(task)?;
            let c = classify_morphism(&phi, window(task), &plan(task))?;
            let result = json!({ "classification": c.verdict, "bound": c.bound.constant, "bicontrol": c.bicontrol.constant });
            let certificates = c.certificates().into_iter().cloned().collect();
            Ok(Outcome { certificates, result, verdict: Some(true), chain: None })
        }
        Command::Resolve => run_resolve(task),
        Command::Idempotent => run_idempotent(task),
    }
}

fn run_ball(task: &TaskSpec) -> Result<Outcome> {
    let spec = task.group.as_ref().expect("checked");
    let center = match &task.center {
        Some(w) => spec.parse_word(w)?,
        None => spec.identity(),
    };
    let r = task.r.expect("checked");
    let pts = ball_elements(spec, &center, r)?;
    let result = json!({
        "center": spec.format(&center),
        "radius": r,
        "size": pts.len(),
        "elements": pts.iter().map(|g| spec.format(g)).collect::<Vec<_>>(),
    });
    Ok(Outcome { certificates: vec![], result, verdict: Some(true), chain: None })
}

fn run_cover(task: &TaskSpec) -> Result<Outcome> {
    let spec = task.group.as_ref().expect("checked");
    let sep = task.separation.expect("checked");
    let ball = MetricSubset::Ball { center: spec.identity(), radius: window(task) };
    let cover = build_cover(spec, sep)?;
    let cert = verify_cover(spec, &cover, sep, &ball)?;
    let result = json!({ "families": cover.families, "bound": cover.bound, "separation": sep });
    Ok(Outcome::certs(vec![cert], result))
}

fn embedding(e: &EmbeddingSpec) -> Result<UniformEmbedding> {
    UniformEmbedding::new(e.source.clone(), e.target.clone(), e.rule.clone(), e.lower.clone(), e.upper.clone())
}

fn run_embed(task: &TaskSpec) -> Result<Outcome> {
    let emb = embedding(task.embedding.as_ref().expect("checked"))?;
    let count = task.pairs.unwrap_or(200);
    let pairs = sample_pairs(&emb.source, window(task), count, task.seed)?;
    let cert = verify_uniform_embedding(&emb, &pairs)?;
    Ok(Outcome::certs(vec![cert], json!({ "pairs": pairs.len() })))
}

fn run_filtration(task: &TaskSpec) -> Result<Outcome> {
    let m = filtered_module(task.module.as_ref().expect("checked").value()?)?;
    let space = m.space().clone();
    let words = task.subset.as_ref().expect("checked");
    let s = MetricSubset::parse(&space, words)?.elements(&space)?;
    let win = m.window(window(task))?;
    let sub = win.evaluate(&s)?;
    let gens: Vec<Value> = sub.generators().iter().map(|v| vector_to_json(&space, v)).collect();
    let result = json!({
        "filtration": m.rule.name(),
        "subset": s.iter().map(|g| space.format(g)).collect::<Vec<_>>(),
        "generators": gens,
    });
    Ok(Outcome { certificates: vec![], result, verdict: Some(true), chain: None })
}

fn morphism(task: &TaskSpec) -> Result<FilteredMorphism> {
    let source = filtered_module(task.module.as_ref().expect("checked").value()?)?;
    let target = match &task.target {
        Some(t) => filtered_module(t.value()?)?,
        None => source.clone(),
    };
    let spec = task.morphism.as_ref().expect("checked");
    let m = parse_matrix_for(&source.base.gr, &spec.matrix, source.base.rank, target.base.rank)?;
    FilteredMorphism::new(source, target, m)
}

fn parse_matrix_for(gr: &GroupRing, v: &Value, rows: usize, cols: usize) -> Result<GroupRingMatrix> {
    let m = crate::filtered::module::parse_matrix(gr, v, Some(rows), cols)?;
    if m.rows != rows {
        return Err(Error::DimensionMismatch(format!("matrix has {} rows, expected {rows}", m.rows)));
    }
    Ok(m)
}

fn run_control(task: &TaskSpec) -> Result<Outcome> {
    let phi = morphism(task)?;
    let r = window(task);
    let p = plan(task);
    let top = r.saturating_sub(1) / 2;
    let mut certs = Vec::new();
    match task.constant {
        Some(b) => {
            certs.push(check_bounded(&phi, b, r, &p)?);
            certs.push(check_bicontrolled(&phi, b, r, &p)?);
        }
        None => {
            let bound = bound_of(&phi, r, &p)?;
            let from = if bound.passed() { bound.constant.min(top) } else { top };
            certs.push(bound);
            certs.push(minimal_bicontrol(&phi, from, top, r, &p)?);
        }
    }
    if task.morphism.as_ref().expect("checked").equivariant {
        certs.push(check_equivariance(&phi, r, 32, task.seed)?);
    }
    let result = json!({ "bound": certs[0].constant, "bicontrol": certs[1].constant });
    Ok(Outcome::certs(certs, result))
}

fn run_resolve(task: &TaskSpec) -> Result<Outcome> {
    let module = PresentedModule::from_json(task.module.as_ref().expect("checked").value()?)?;
    let r = window(task);
    let mode = match task.tier.expect("resolved") {
        Tier::A => KernelMode::Complete,
        Tier::B => KernelMode::Window(r),
    };
    let opts = ResolveOptions {
        max_depth: task.max_depth.unwrap_or(4),
        mode: Some(mode),
        radius: r,
        plan: task.plan.clone().map(|p| SamplingPlan { seed: task.seed, ..p }).unwrap_or_else(|| SamplingPlan::light(task.seed)),
        certify: true,
    };
    let chain = resolve(&module, &opts)?;
    resolve_outcome(&chain)
}

fn resolve_outcome(chain: &ResolutionChain) -> Result<Outcome> {
    let mut certs = Vec::new();
    for s in &chain.stages {
        certs.extend(s.composition.clone());
        certs.push(s.exactness.clone());
    }
    if !chain.terminated {
        certs.push(ControlCertificate::fail(
            CertificateKind::Exactness,
            0,
            0,
            Counterexample::Message(format!("no termination within depth {}", chain.differentials.len())),
        ));
    }
    let result = json!({
        "ranks": chain.ranks,
        "length": chain.length(),
        "terminated": chain.terminated,
        "completeness": chain.completeness.to_json(),
        "composes_to_zero": chain.composes_to_zero()?,
    });
    Ok(Outcome { certificates: certs, result, verdict: Some(chain.passed()), chain: Some(chain.to_json()) })
}

fn run_idempotent(task: &TaskSpec) -> Result<Outcome> {
    let gr = GroupRing::new(task.group.clone().expect("checked"), task.ring.clone().expect("checked"));
    let v = task.matrix.as_ref().expect("checked");
    let n = v.as_array().map_or(0, Vec::len);
    let e = parse_matrix_for(&gr, v, n, n)?;
    let rep = idempotent_image(&e, &gr, window(task), &plan(task))?;
    let result = json!({ "bound": rep.bound.constant, "bicontrol": rep.bicontrol.constant, "rank": n });
    let verdict = rep.passed();
    Ok(Outcome { certificates: rep.all().into_iter().cloned().collect(), result, verdict: Some(verdict), chain: None })
}

/// Builds a filtered module from a module object, honouring its optional `filtration` field.
pub fn filtered_module(v: &Value) -> Result<FilteredModule> {
    let base = PresentedModule::from_json(v)?;
    let Some(f) = v.get("filtration") else {
        return Ok(FilteredModule::standard(base));
    };
    let kind = match f {
        Value::String(s) => s.as_str(),
        other => other.get("kind").and_then(Value::as_str).ok_or_else(|| Error::InvalidTask("filtration needs a `kind`".into()))?,
    };
    let source_and_matrix = || -> Result<(FilteredModule, GroupRingMatrix)> {
        let src = f.get("source").ok_or_else(|| Error::InvalidTask(format!("{kind} filtration needs a `source`")))?;
        let source = filtered_module(src)?;
        let mv = f.get("matrix").ok_or_else(|| Error::InvalidTask(format!("{kind} filtration needs a `matrix`")))?;
        let m = parse_matrix_for(&base.gr, mv, source.base.rank, base.rank)?;
        Ok((source, m))
    };
    match kind {
        "standard" => Ok(FilteredModule::standard(base)),
        "product" => FilteredModule::product_canonical(base),
        "image" => {
            let (source, m) = source_and_matrix()?;
            FilteredModule::image(source, m, &base)
        }
        "cokernel" => {
            let (source, m) = source_and_matrix()?;
            FilteredModule::cokernel(source, m, &base)
        }
        "pushforward" => {
            let e = f.get("embedding").ok_or_else(|| Error::InvalidTask("pushforward filtration needs an `embedding`".into()))?;
            let spec: EmbeddingSpec = serde_json::from_value(e.clone()).map_err(|e| Error::InvalidTask(format!("embedding: {e}")))?;
            if &spec.source != base.group() {
                return Err(Error::GroupMismatch);
            }
            FilteredModule::pushforward(FilteredModule::standard(base), embedding(&spec)?)
        }
        other => Err(Error::InvalidTask(format!("unknown filtration `{other}`"))),
    }
}

