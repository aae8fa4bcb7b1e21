//! Acceptance suite. Runs without the libtest harness so that every criterion prints
//! exactly one PASS/FAIL line; the process fails if any criterion fails.

use std::path::Path;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use ctrlmod::certificate::Counterexample;
use ctrlmod::cli::{corpus_manifest, corpus_root, parse_spec, run, TaskSpec};
use ctrlmod::control::{
    bound_of, check_bicontrolled, compose_geometric, generator_bound, FilteredMorphism, GeometricModule, GeometricMorphism,
};
use ctrlmod::filtered::{check_insular, check_lean, FilteredModule, Insularity, PresentedModule, SamplingPlan};
use ctrlmod::resolution::{check_complement, resolve, ResolveOptions};
use ctrlmod::ring::group_ring::{GroupRing, GroupRingElement, GroupRingMatrix};
use ctrlmod::ring::scalar::{int, RingSpec};
use ctrlmod::ring::vector::ModuleVector;
use ctrlmod::space::metric::{ball_elements, enlarge_elements, intersect_sorted};
use ctrlmod::space::{build_cover, verify_cover, GroupElement, GroupSpec, MapRule, MetricSubset, UniformEmbedding, WitnessFn};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn gr(group: &str, ring: &str) -> GroupRing {
    GroupRing::new(group.parse().unwrap(), ring.parse().unwrap())
}

fn t(k: i64) -> GroupElement {
    GroupElement::Abelian(vec![k])
}

// 1. Zero-lean law on every corpus module, at the default window of its group.
fn zero_lean() -> Outcome {
    let root = corpus_root();
    let manifest = corpus_manifest(&root).map_err(e)?;
    let modules = manifest["modules"].as_array().ok_or("manifest has no modules")?;
    let mut groups = std::collections::BTreeSet::new();
    let mut rings = std::collections::BTreeSet::new();
    for m in modules {
        let file = root.join(m["file"].as_str().ok_or("module entry without file")?);
        let task = json!({"command": "lean-check", "module": file.to_str().unwrap(), "constant": 0});
        let spec = TaskSpec::from_json_str(&task.to_string(), None).map_err(e)?;
        let report = run(&spec, false).map_err(e)?;
        ensure(report.verdict, || format!("{} is not 0-lean at window {:?}", m["name"], spec.window))?;
        groups.insert(m["group"].as_str().unwrap_or_default().to_string());
        rings.insert(m["ring"].as_str().unwrap_or_default().to_string());
    }
    ensure(modules.len() >= 10, || format!("only {} corpus modules", modules.len()))?;
    for g in ["Z", "Z^2", "F2", "BS(2,3)"] {
        ensure(groups.contains(g), || format!("no corpus module over {g}"))?;
    }
    for r in ["Z", "Q", "Z/4"] {
        ensure(rings.contains(r), || format!("no corpus module with coefficients {r}"))?;
    }
    Ok(format!("{} modules over {:?} with coefficients {:?}", modules.len(), groups, rings))
}

// 2. The trivial module over Z[Z] is not d-insular for d <= 8, with antipodal witnesses.
fn insularity_falsified() -> Outcome {
    let g = gr("Z", "Z");
    let spec = g.group.clone();
    let win = FilteredModule::standard(PresentedModule::trivial(&g)).window(20).map_err(e)?;
    let mut sizes = Vec::new();
    for d in 0..=8 {
        let cert = check_insular(&win, d, &SamplingPlan::default(), Insularity::Strict).map_err(e)?;
        ensure(!cert.passed(), || format!("d = {d} passed"))?;
        let Some(Counterexample::Subsets { s, u: Some(u), witness }) = cert.counterexample else {
            return Err(format!("d = {d}: no subset witness"));
        };
        ensure(s.len() == 1 && u.len() == 1 && u[0] == spec.inverse(&s[0]), || format!("d = {d}: witness pair is not antipodal"))?;
        ensure(!witness.is_empty(), || format!("d = {d}: zero witness"))?;
        ensure(win.evaluate(&s).map_err(e)?.contains(&witness), || format!("d = {d}: witness not in F(S)"))?;
        ensure(win.evaluate(&u).map_err(e)?.contains(&witness), || format!("d = {d}: witness not in F(U)"))?;
        let core = intersect_sorted(&enlarge_elements(&spec, &s, d).map_err(e)?, &enlarge_elements(&spec, &u, d).map_err(e)?);
        ensure(!win.evaluate(&core).map_err(e)?.contains(&witness), || format!("d = {d}: witness lies in F(S[d] ∩ U[d])"))?;
        sizes.push(spec.length(&s[0]).map_err(e)?);
    }
    Ok(format!("d = 0..8 all fail; witness pairs {{x, x^-1}} with |x| = {sizes:?}"))
}

/// Exact preimage of `w` under multiplication by `t − 1` on Z[Z], or `None` when the
/// augmentation of `w` is nonzero.
fn divide_by_t_minus_1(w: &ModuleVector) -> Option<Vec<(i64, BigRational)>> {
    let total = w.values().fold(BigRational::zero(), |a, c| a + c);
    if !total.is_zero() {
        return None;
    }
    let coeffs: Vec<(i64, BigRational)> = w
        .iter()
        .map(|((g, _), c)| match g {
            GroupElement::Abelian(v) => (v[0], c.clone()),
            _ => unreachable!("Z coordinates"),
        })
        .collect();
    let (lo, hi) = (coeffs.first()?.0, coeffs.last()?.0);
    let mut p = Vec::new();
    let mut acc = BigRational::zero();
    for k in lo..hi {
        acc -= coeffs.iter().find(|(i, _)| *i == k).map_or(BigRational::zero(), |(_, c)| c.clone());
        if !acc.is_zero() {
            p.push((k, acc.clone()));
        }
    }
    Some(p)
}

// 3. Multiplication by t − 1 is bounded by exactly 1 but not bicontrolled for b <= 8.
fn bicontrol_falsified() -> Outcome {
    let g = gr("Z", "Z");
    let phi = FilteredMorphism::multiplication(&g, g.parse("t - 1").map_err(e)?);
    let plan = SamplingPlan::default();
    let bound = bound_of(&phi, 20, &plan).map_err(e)?;
    ensure(bound.passed() && bound.constant == 1, || format!("measured bound {} (pass {})", bound.constant, bound.passed()))?;
    let mut spans = Vec::new();
    for b in 0..=8 {
        let cert = check_bicontrolled(&phi, b, 20, &plan).map_err(e)?;
        ensure(!cert.passed(), || format!("b = {b} passed"))?;
        let Some(Counterexample::Subsets { s, witness, .. }) = cert.counterexample else {
            return Err(format!("b = {b}: no subset witness"));
        };
        let pre = divide_by_t_minus_1(&witness).ok_or_else(|| format!("b = {b}: witness has nonzero augmentation"))?;
        ensure(!pre.is_empty(), || format!("b = {b}: zero witness"))?;
        let reach = enlarge_elements(&g.group, &s, b).map_err(e)?;
        let outside = pre.iter().filter(|(k, _)| !reach.contains(&t(*k))).count();
        ensure(outside > 0, || format!("b = {b}: preimage lies in S[b]"))?;
        spans.push(pre.len());
    }
    Ok(format!("bound 1; b = 0..8 all fail; geometric-sum preimages of lengths {spans:?} leave S[b]"))
}

fn idempotent_family() -> Vec<(String, GroupRing, GroupRingMatrix)> {
    let mut out = Vec::new();
    let mut add = |label: String, g: &GroupRing, rows: Vec<Vec<String>>| {
        let refs: Vec<Vec<&str>> = rows.iter().map(|r| r.iter().map(String::as_str).collect()).collect();
        let m = GroupRingMatrix::from_string_rows(g, &refs).unwrap();
        out.push((label, g.clone(), m));
    };
    let s = |x: &str| x.to_string();
    // diagonal
    for (grp, ring) in [("Z", "Z"), ("Z^2", "Z"), ("F2", "Z")] {
        let g = gr(grp, ring);
        add(format!("diag(1,0) over {ring}[{grp}]"), &g, vec![vec![s("1"), s("0")], vec![s("0"), s("0")]]);
        add(format!("diag(1,0,1) over {ring}[{grp}]"), &g, vec![vec![s("1"), s("0"), s("0")], vec![s("0"), s("0"), s("0")], vec![s("0"), s("0"), s("1")]]);
    }
    // conjugates of diag(1,0) and diag(1,0,0) by elementary matrices
    let conj = |g: &GroupRing, d: &GroupRingMatrix, el: &GroupRingMatrix, inv: &GroupRingMatrix| {
        inv.mul(g, d).unwrap().mul(g, el).unwrap()
    };
    let mut conjugated = Vec::new();
    for (grp, words) in [("Z", ["t", "t^-2", "t^3"]), ("Z^2", ["a", "a*b^-1", "b^2"]), ("F2", ["a", "a*b", "b^-1*a"])] {
        let g = gr(grp, "Z");
        for w in words {
            let d = GroupRingMatrix::from_string_rows(&g, &[vec!["1", "0"], vec!["0", "0"]]).unwrap();
            let el = GroupRingMatrix::from_string_rows(&g, &[vec!["1", w], vec!["0", "1"]]).unwrap();
            let neg = format!("-{w}");
            let inv = GroupRingMatrix::from_string_rows(&g, &[vec!["1", &neg], vec!["0", "1"]]).unwrap();
            conjugated.push((format!("E({w}) diag(1,0) E({w})^-1 over Z[{grp}]"), g.clone(), conj(&g, &d, &inv, &el)));
        }
    }
    {
        let g = gr("F2", "Z");
        let d = GroupRingMatrix::from_string_rows(&g, &[vec!["1", "0", "0"], vec!["0", "0", "0"], vec!["0", "0", "0"]]).unwrap();
        let el = GroupRingMatrix::from_string_rows(&g, &[vec!["1", "a", "0"], vec!["0", "1", "b"], vec!["0", "0", "1"]]).unwrap();
        let inv = GroupRingMatrix::from_string_rows(&g, &[vec!["1", "-a", "a*b"], vec!["0", "1", "-b"], vec!["0", "0", "1"]]).unwrap();
        conjugated.push(("3x3 elementary conjugate of diag(1,0,0) over Z[F2]".into(), g.clone(), conj(&g, &d, &inv, &el)));
    }
    {
        let g = gr("F2", "Z");
        add(s("[[1,a],[0,0]] over Z[F2]"), &g, vec![vec![s("1"), s("a")], vec![s("0"), s("0")]]);
        add(s("[[0,0],[a*b,1]] over Z[F2]"), &g, vec![vec![s("0"), s("0")], vec![s("a*b"), s("1")]]);
    }
    // mod-n reductions
    let mut reduced = Vec::new();
    for (label, g, m) in &conjugated {
        if label.contains("t^3") || label.contains("a*b^-1") || label.contains("b^-1*a") || label.starts_with("3x3") {
            let rings: &[&str] = if label.starts_with("3x3") { &["Z/4"] } else { &["Z/2", "Z/4"] };
            for ring in rings {
                let target = GroupRing::new(g.group.clone(), ring.parse().unwrap());
                reduced.push((format!("{label}, reduced to {ring}"), target.clone(), m.change_ring(&target)));
            }
        }
    }
    out.extend(conjugated);
    out.extend(reduced);
    out
}

fn idempotent_window(g: &GroupRing) -> u32 {
    match g.group.short_name().as_str() {
        "Z" => 12,
        "Z2" => 7,
        _ => 5,
    }
}

// 4. Generated idempotents are exact, bicontrolled at their measured bound and split the window.
fn idempotent_law() -> Outcome {
    let family = idempotent_family();
    ensure(family.len() == 25, || format!("{} idempotents generated", family.len()))?;
    let plan = SamplingPlan::light(0);
    let mut bounds = Vec::new();
    for (label, g, m) in &family {
        ensure(m.is_idempotent(g).map_err(e)?, || format!("{label}: e^2 != e"))?;
        let r = idempotent_window(g);
        let free = PresentedModule::free(g, m.rows);
        let phi = FilteredMorphism::between(&free, &free, m.clone()).map_err(e)?;
        let bound = bound_of(&phi, r, &plan).map_err(e)?;
        ensure(bound.passed(), || format!("{label}: no bound found at window {r}"))?;
        let bi = check_bicontrolled(&phi, bound.constant, r, &plan).map_err(e)?;
        ensure(bi.passed(), || format!("{label}: not bicontrolled at b = {}", bound.constant))?;
        let comp = check_complement(g, m, r).map_err(e)?;
        ensure(comp.passed(), || format!("{label}: im(e) + im(1 - e) is not the free window"))?;
        bounds.push(bound.constant);
    }
    Ok(format!("{} idempotents; measured bounds {bounds:?}", family.len()))
}

// 5. Koszul resolutions of the trivial module over Q[Z] and Q[Z^2].
fn koszul() -> Outcome {
    let mut notes = Vec::new();
    for (grp, ranks) in [("Z", vec![1, 1]), ("Z^2", vec![1, 2, 1])] {
        let g = gr(grp, "Q");
        let opts = ResolveOptions { radius: 6, ..ResolveOptions::default() };
        let chain = resolve(&PresentedModule::trivial(&g), &opts).map_err(e)?;
        ensure(chain.ranks == ranks, || format!("Q[{grp}]: ranks {:?}", chain.ranks))?;
        ensure(chain.terminated, || format!("Q[{grp}]: did not terminate"))?;
        ensure(chain.composes_to_zero().map_err(e)?, || format!("Q[{grp}]: d∘d != 0"))?;
        for (i, s) in chain.stages.iter().enumerate() {
            let next = chain.stages.get(i + 1).map_or(0, |n| n.bound);
            ensure(s.exactness.passed(), || format!("Q[{grp}]: stage {i} not exact in the window"))?;
            ensure(s.exactness.constant == s.bound + next, || {
                format!("Q[{grp}]: stage {i} slack {} != {} + {next}", s.exactness.constant, s.bound)
            })?;
            if let Some(c) = &s.composition {
                ensure(c.passed(), || format!("Q[{grp}]: stage {i} composition fails"))?;
            }
        }
        notes.push(format!("Q[{grp}] ranks {ranks:?}"));
    }
    Ok(notes.join("; "))
}

// 6. Constructive covers pass verification for R in {2, 5, 10}.
fn covers() -> Outcome {
    let mut notes = Vec::new();
    for (grp, families, window) in [("Z", 2, 200), ("Z^2", 3, 40), ("Z^3", 4, 12)] {
        let spec: GroupSpec = grp.parse().unwrap();
        let ball = MetricSubset::Ball { center: spec.identity(), radius: window };
        for r in [2, 5, 10] {
            let cover = build_cover(&spec, r).map_err(e)?;
            ensure(cover.families == families, || format!("{grp}: {} families", cover.families))?;
            let cert = verify_cover(&spec, &cover, r, &ball).map_err(e)?;
            ensure(cert.passed(), || format!("{grp}, R = {r}: {:?}", cert.counterexample))?;
        }
        notes.push(format!("{grp}: {families} families on ball({window})"));
    }
    Ok(notes.join("; "))
}

// 7. Pushforward along the doubling map scales the constants by two.
fn pushforward_doubling() -> Outcome {
    let g = gr("Z", "Z");
    let doubling = || {
        let f = WitnessFn::new(vec![(0, 0), (1, 2)]).unwrap();
        UniformEmbedding::new(g.group.clone(), g.group.clone(), MapRule::Scale { factor: 2 }, f.clone(), f).unwrap()
    };
    let mixed = PresentedModule::from_json(&json!({
        "ring": "Z", "group": "Z", "rank": 2,
        "sigma": ["e1", "e2", {"label": "s", "value": ["t", "1 - t^-1"]}]
    }))
    .map_err(e)?;
    let plan = SamplingPlan::default();
    let (mut lean_cases, mut insular_cases) = (0, 0);
    for (name, base) in [("free", PresentedModule::free(&g, 1)), ("mixed", mixed)] {
        let inner = FilteredModule::standard(base);
        let inner_win = inner.window(12).map_err(e)?;
        let push = FilteredModule::pushforward(inner.clone(), doubling()).map_err(e)?;
        let push_win = push.window(20).map_err(e)?;
        for c in 0..=2u32 {
            // Transport is only claimed at constants the inner module is certified at.
            if check_lean(&inner_win, c, &plan).map_err(e)?.passed() {
                ensure(check_lean(&push_win, 2 * c, &plan).map_err(e)?.passed(), || format!("{name}: pushforward not {}-lean", 2 * c))?;
                lean_cases += 1;
            } else {
                ensure(name != "free", || format!("free module not {c}-lean"))?;
            }
            if check_insular(&inner_win, c, &plan, Insularity::Strict).map_err(e)?.passed() {
                let ins = check_insular(&push_win, 2 * c, &plan, Insularity::Strict).map_err(e)?;
                ensure(ins.passed(), || format!("{name}: pushforward not {}-insular", 2 * c))?;
                insular_cases += 1;
            } else {
                ensure(name != "free", || format!("free module not {c}-insular"))?;
            }
        }
    }
    let checked = format!("{lean_cases} lean and {insular_cases} insular");
    Ok(format!("{checked} certified cases over two modules; pushforward lean at 2D and insular at 2d"))
}

fn random_element(g: &GroupRing, rng: &mut ChaCha8Rng, pool: &[GroupElement]) -> GroupRingElement {
    let terms = rng.gen_range(0..=3);
    g.from_terms((0..terms).map(|_| (pool[rng.gen_range(0..pool.len())].clone(), int(rng.gen_range(-3..=3)))))
}

// 8. Generator bounds dominate measured bounds; composition respects declared bounds.
fn bound_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let plan = SamplingPlan::light(0);
    let mut slack = 0;
    for i in 0..50 {
        let (grp, r) = if i % 2 == 0 { ("Z", 12) } else { ("Z^2", 7) };
        let g = gr(grp, "Z");
        let pool = ball_elements(&g.group, &g.group.identity(), 2).map_err(e)?;
        let (rows, cols) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
        let entries = (0..rows).map(|_| (0..cols).map(|_| random_element(&g, &mut rng, &pool)).collect()).collect();
        let m = GroupRingMatrix::from_rows(entries, cols).map_err(e)?;
        let phi = FilteredMorphism::between(&PresentedModule::free(&g, rows), &PresentedModule::free(&g, cols), m).map_err(e)?;
        let declared = generator_bound(&phi).map_err(e)?;
        let measured = bound_of(&phi, r, &plan).map_err(e)?;
        ensure(measured.passed() && measured.constant <= declared, || {
            format!("morphism {i}: measured {} > generator bound {declared}", measured.constant)
        })?;
        slack += declared - measured.constant;
    }
    let spec: GroupSpec = "Z^2".parse().unwrap();
    let module = GeometricModule::new(spec.clone(), RingSpec::Integers, 2);
    for i in 0..50u64 {
        let (b1, b2) = (rng.gen_range(0..=3), rng.gen_range(0..=3));
        let pts = ball_elements(&spec, &spec.identity(), 4).map_err(e)?;
        let phi = GeometricMorphism::random(&module, &pts, b1, 0.2, 2 * i).map_err(e)?;
        let mid = ball_elements(&spec, &spec.identity(), 4 + b1).map_err(e)?;
        let psi = GeometricMorphism::random(&module, &mid, b2, 0.2, 2 * i + 1).map_err(e)?;
        let comp = compose_geometric(&psi, &phi).map_err(e)?;
        ensure(comp.declared_bound == b1 + b2, || format!("pair {i}: declared {}", comp.declared_bound))?;
        let measured = comp.measured_bound().map_err(e)?;
        ensure(measured <= b1 + b2, || format!("pair {i}: composite measured {measured} > {}", b1 + b2))?;
    }
    Ok(format!("50 morphisms (total generator-bound slack {slack}); 50 composable pairs"))
}

// 9. Ball sizes against closed forms and brute force.
fn ball_census() -> Outcome {
    let f2: GroupSpec = "F2".parse().unwrap();
    for r in 0..=6u32 {
        let n = ball_elements(&f2, &f2.identity(), r).map_err(e)?.len();
        ensure(n == 2 * 3usize.pow(r) - 1, || format!("F2 ball({r}) has {n} elements"))?;
    }
    for dim in 1..=2usize {
        let spec = GroupSpec::free_abelian(dim);
        for r in 0..=10i64 {
            let brute = match dim {
                1 => (-r..=r).count(),
                _ => (-r..=r).flat_map(|x| (-r..=r).map(move |y| (x, y))).filter(|(x, y)| x.abs() + y.abs() <= r).count(),
            };
            let n = ball_elements(&spec, &spec.identity(), r as u32).map_err(e)?.len();
            ensure(n == brute, || format!("Z^{dim} ball({r}): {n} != {brute}"))?;
        }
    }
    Ok("F2 r <= 6 matches 2*3^r - 1; Z and Z^2 r <= 10 match enumeration".into())
}

// 10. Every corpus task gives byte-identical reports across runs.
fn determinism() -> Outcome {
    let root = corpus_root();
    let manifest = corpus_manifest(&root).map_err(e)?;
    let tasks = manifest["tasks"].as_array().ok_or("manifest has no tasks")?;
    let mut bytes = 0;
    for entry in tasks {
        let path = root.join(entry["file"].as_str().ok_or("task entry without file")?);
        let once = run(&parse_spec(&path).map_err(e)?, false).map_err(e)?.to_pretty();
        let twice = run(&parse_spec(&path).map_err(e)?, false).map_err(e)?.to_pretty();
        ensure(once == twice, || format!("{} differs between runs", path.display()))?;
        bytes += once.len();
    }
    let bin = env!("CARGO_BIN_EXE_ctrlmod");
    let task = root.join("tasks/insular-z-trivial.json");
    let out = |jobs: &str| std::process::Command::new(bin).args(["run", task.to_str().unwrap(), "--jobs", jobs]).output().map(|o| o.stdout);
    ensure(out("1").map_err(e)? == out("4").map_err(e)?, || "report depends on --jobs".into())?;
    Ok(format!("{} tasks, {bytes} bytes compared; --jobs 1 and 4 agree", tasks.len()))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 10] = [
        ("zero-lean law", Duration::from_secs(60), zero_lean),
        ("insularity falsification", Duration::from_secs(10), insularity_falsified),
        ("bicontrol falsification", Duration::from_secs(10), bicontrol_falsified),
        ("idempotent bicontrol law", Duration::from_secs(120), idempotent_law),
        ("Koszul resolutions", Duration::from_secs(60), koszul),
        ("cover certification", Duration::from_secs(60), covers),
        ("embedding transport", Duration::from_secs(30), pushforward_doubling),
        ("bound laws", Duration::from_secs(60), bound_laws),
        ("ball census", Duration::from_secs(30), ball_census),
        ("determinism", Duration::from_secs(120), determinism),
    ];
    assert!(Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").is_dir());
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if took > *limit => Err(format!("{msg}; took {took:.1?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("criterion {:>2} PASS  {name} ({took:.2?}): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({took:.2?}): {msg}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
