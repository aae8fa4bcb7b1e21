use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use ctrlmod::control::{bound_of, classify_morphism, Admissibility, FilteredMorphism};
use ctrlmod::filtered::{FilteredModule, PresentedModule, SamplingPlan};
use ctrlmod::resolution::{resolve, KernelMode, ResolveOptions};
use ctrlmod::ring::group_ring::{GroupRing, GroupRingElement, GroupRingMatrix};
use ctrlmod::ring::scalar::{int, RingSpec, Scalar};
use ctrlmod::ring::submodule::window_kernel;
use ctrlmod::ring::vector::{add_scaled, sub, unit, ModuleVector};
use ctrlmod::ring::{WindowContext, WindowSubmodule};
use ctrlmod::space::metric::{ball_elements, enlarge_elements};
use ctrlmod::space::{sample_pairs, verify_uniform_embedding, GroupElement, GroupSpec, MapRule, UniformEmbedding, WitnessFn};

fn groups() -> Vec<GroupSpec> {
    ["Z", "Z^2", "F2", "BS(2,3)"].iter().map(|s| s.parse().unwrap()).collect()
}

fn word(spec: &GroupSpec, letters: &[(usize, bool)]) -> GroupElement {
    let k = spec.generators().len();
    let syl: Vec<(usize, i64)> = letters.iter().map(|&(g, pos)| (g % k, if pos { 1 } else { -1 })).collect();
    spec.normal_form(&syl).unwrap()
}

fn letters(max: usize) -> impl Strategy<Value = Vec<(usize, bool)>> {
    prop::collection::vec((0usize..3, any::<bool>()), 0..max)
}

/// Breadth-first ball through right multiplication by generators.
fn bfs_ball(spec: &GroupSpec, r: u32) -> BTreeSet<GroupElement> {
    let mut seen = BTreeSet::from([spec.identity()]);
    let mut queue = VecDeque::from([(spec.identity(), 0)]);
    while let Some((g, d)) = queue.pop_front() {
        if d == r {
            continue;
        }
        for (i, s) in spec.unit_steps() {
            let h = spec.mul_generator(&g, i, s);
            if seen.insert(h.clone()) {
                queue.push_back((h, d + 1));
            }
        }
    }
    seen
}

#[test]
fn balls_match_breadth_first_search() {
    for spec in groups() {
        let r = if matches!(spec.short_name().as_str(), "BS(2,3)") { 4 } else { 5 };
        let ours: BTreeSet<_> = ball_elements(&spec, &spec.identity(), r).unwrap().into_iter().collect();
        assert_eq!(ours, bfs_ball(&spec, r), "{spec}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn metric_is_left_invariant_and_satisfies_the_triangle_inequality(
        which in 0usize..4, a in letters(5), b in letters(5), c in letters(5), g in letters(4)
    ) {
        let spec = &groups()[which];
        let (x, y, z, gamma) = (word(spec, &a), word(spec, &b), word(spec, &c), word(spec, &g));
        let d = |p: &GroupElement, q: &GroupElement| spec.distance(p, q).unwrap();
        prop_assert!(d(&x, &y) <= d(&x, &z) + d(&z, &y));
        prop_assert_eq!(d(&spec.mul(&gamma, &x), &spec.mul(&gamma, &y)), d(&x, &y));
    }

    #[test]
    fn enlargements_compose(which in 0usize..3, pts in prop::collection::vec(letters(3), 1..3), a in 0u32..3, b in 0u32..3) {
        let spec = &groups()[which];
        let mut s: Vec<_> = pts.iter().map(|l| word(spec, l)).collect();
        s.sort();
        s.dedup();
        let twice = enlarge_elements(spec, &enlarge_elements(spec, &s, a).unwrap(), b).unwrap();
        prop_assert_eq!(twice, enlarge_elements(spec, &s, a + b).unwrap());
    }
}

#[test]
fn identity_embeddings_never_fail() {
    for spec in groups() {
        let f = WitnessFn::new(vec![(0, 0), (1, 1)]).unwrap();
        let emb = UniformEmbedding::new(spec.clone(), spec.clone(), MapRule::Identity, f.clone(), f).unwrap();
        let pairs = sample_pairs(&spec, 4, 100, 3).unwrap();
        assert!(verify_uniform_embedding(&emb, &pairs).unwrap().passed(), "{spec}");
    }
}

fn random_element(g: &GroupRing, rng: &mut ChaCha8Rng) -> GroupRingElement {
    let pool = ball_elements(&g.group, &g.group.identity(), 2).unwrap();
    let n = rng.gen_range(0..=4);
    g.from_terms((0..n).map(|_| (pool.choose(rng).unwrap().clone(), g.ring.from_int(rng.gen_range(-3..=3)))))
}

#[test]
fn group_ring_laws() {
    for (grp, ring) in [("Z", "Z"), ("Z^2", "Q"), ("F2", "Z"), ("F2", "Z/4"), ("BS(2,3)", "Q")] {
        let g = GroupRing::new(grp.parse().unwrap(), ring.parse().unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let (a, b, c) = (random_element(&g, &mut rng), random_element(&g, &mut rng), random_element(&g, &mut rng));
            assert_eq!(g.mul(&g.mul(&a, &b), &c), g.mul(&a, &g.mul(&b, &c)), "{grp} {ring}");
            assert_eq!(g.mul(&a, &g.add(&b, &c)), g.add(&g.mul(&a, &b), &g.mul(&a, &c)));
            assert_eq!(g.mul(&g.add(&a, &b), &c), g.add(&g.mul(&a, &c), &g.mul(&b, &c)));
        }
    }
}

fn random_vector(ctx: &WindowContext, rng: &mut ChaCha8Rng, terms: usize) -> ModuleVector {
    let ball = ctx.ball();
    let mut v = ModuleVector::new();
    for _ in 0..terms {
        let g = ball.choose(rng).unwrap().clone();
        let i = rng.gen_range(0..ctx.rank());
        add_scaled(ctx.ring(), &mut v, &ctx.ring().from_int(rng.gen_range(-3..=3)), &unit(g, i));
    }
    v
}

fn random_submodule(ctx: &Arc<WindowContext>, rng: &mut ChaCha8Rng) -> WindowSubmodule {
    let n = rng.gen_range(1..=4);
    WindowSubmodule::new(ctx, (0..n).map(|_| random_vector(ctx, rng, 3)).collect::<Vec<_>>())
}

fn contexts() -> Vec<Arc<WindowContext>> {
    let zz = GroupRing::new("Z".parse().unwrap(), RingSpec::Integers);
    let z4 = GroupRing::new("Z^2".parse().unwrap(), "Z/4".parse().unwrap());
    let qf = GroupRing::new("F2".parse().unwrap(), RingSpec::Rationals);
    let trivial = PresentedModule::trivial(&zz);
    vec![
        Arc::new(WindowContext::free(&zz, 2, 4).unwrap()),
        Arc::new(WindowContext::free(&z4, 1, 3).unwrap()),
        Arc::new(WindowContext::free(&qf, 1, 2).unwrap()),
        Arc::new(trivial.context(4).unwrap()),
    ]
}

#[test]
fn membership_witnesses_recombine() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for ctx in contexts() {
        for _ in 0..40 {
            let m = random_submodule(&ctx, &mut rng);
            let mut inside = ModuleVector::new();
            for g in m.generators() {
                add_scaled(ctx.ring(), &mut inside, &ctx.ring().from_int(rng.gen_range(-2..=2)), g);
            }
            let combo = m.membership(&inside).expect("combination of generators is a member");
            assert!(ctx.is_zero_vector(&sub(ctx.ring(), &m.combine(&combo), &inside)));
            for v in [random_vector(&ctx, &mut rng, 2)] {
                if let Some(combo) = m.membership(&v) {
                    assert!(ctx.is_zero_vector(&sub(ctx.ring(), &m.combine(&combo), &v)));
                }
            }
        }
    }
}

#[test]
fn intersection_is_commutative_and_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for ctx in contexts() {
        for _ in 0..25 {
            let (a, b) = (random_submodule(&ctx, &mut rng), random_submodule(&ctx, &mut rng));
            assert!(a.intersect(&b).span_eq(&b.intersect(&a)));
            assert!(a.intersect(&a).span_eq(&a));
            let both = a.intersect(&b);
            assert!(both.is_subset(&a) && both.is_subset(&b));
        }
    }
}

#[test]
fn syzygies_and_kernels_are_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for ctx in contexts() {
        for _ in 0..25 {
            let m = random_submodule(&ctx, &mut rng);
            for z in m.syzygies() {
                assert!(ctx.is_zero_vector(&m.combine(&z)));
            }
        }
    }
    for ring in [RingSpec::Integers, RingSpec::Rationals, "Z/4".parse().unwrap(), "F5".parse().unwrap()] {
        for _ in 0..50 {
            let (rows, cols) = (rng.gen_range(1..=4), rng.gen_range(1..=5));
            let a: Vec<Vec<Scalar>> = (0..rows).map(|_| (0..cols).map(|_| ring.from_int(rng.gen_range(-3..=3))).collect()).collect();
            for v in window_kernel(&ring, &a, cols).generators() {
                for row in &a {
                    let dot = row.iter().zip(v).fold(Scalar::from_integer(0.into()), |s, (x, y)| ring.add(&s, &ring.mul(x, y)));
                    assert_eq!(dot, ring.zero());
                }
            }
        }
    }
}

fn shipped_filtrations() -> Vec<FilteredModule> {
    let zz = GroupRing::new("Z".parse().unwrap(), RingSpec::Integers);
    let free = PresentedModule::free(&zz, 1);
    let m = GroupRingMatrix::from_string_rows(&zz, &[vec!["t - 1"]]).unwrap();
    let f = WitnessFn::new(vec![(0, 0), (1, 2)]).unwrap();
    let doubling = UniformEmbedding::new(zz.group.clone(), zz.group.clone(), MapRule::Scale { factor: 2 }, f.clone(), f).unwrap();
    vec![
        FilteredModule::standard(PresentedModule::trivial(&zz)),
        FilteredModule::product_canonical(PresentedModule::free(&zz, 2)).unwrap(),
        FilteredModule::image(FilteredModule::standard(free.clone()), m.clone(), &free).unwrap(),
        FilteredModule::cokernel(FilteredModule::standard(free.clone()), m, &free).unwrap(),
        FilteredModule::pushforward(FilteredModule::standard(free), doubling).unwrap(),
    ]
}

#[test]
fn filtrations_are_reduced_and_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for f in shipped_filtrations() {
        let win = f.window(8).unwrap();
        assert!(win.evaluate(&[]).unwrap().is_zero(), "{}", f.rule.name());
        let ball = ball_elements(f.space(), &f.space().identity(), 8).unwrap();
        for _ in 0..100 {
            let mut t: Vec<_> = (0..rng.gen_range(1..=5)).map(|_| ball.choose(&mut rng).unwrap().clone()).collect();
            t.sort();
            t.dedup();
            let s: Vec<_> = t.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
            assert!(win.evaluate(&s).unwrap().is_subset(&win.evaluate(&t).unwrap()), "{}", f.rule.name());
        }
    }
}

#[test]
fn generating_sets_are_boundedly_equivalent() {
    let zz = GroupRing::new("Z^2".parse().unwrap(), RingSpec::Integers);
    let basis = PresentedModule::free(&zz, 2);
    let mixed = PresentedModule::from_json(&json!({
        "ring": "Z", "group": "Z^2", "rank": 2,
        "sigma": [{"label": "u", "value": ["a", "1"]}, {"label": "v", "value": ["0", "b^-1"]}]
    }))
    .unwrap();
    let plan = SamplingPlan::light(0);
    let id = GroupRingMatrix::identity(&zz, 2);
    let there = FilteredMorphism::new(FilteredModule::standard(basis.clone()), FilteredModule::standard(mixed.clone()), id.clone()).unwrap();
    let back = FilteredMorphism::new(FilteredModule::standard(mixed), FilteredModule::standard(basis), id).unwrap();
    for phi in [there, back] {
        let cert = bound_of(&phi, 8, &plan).unwrap();
        assert!(cert.passed());
        assert!(cert.constant <= 2, "constant {}", cert.constant);
    }
}

#[test]
fn generators_near_the_identity_give_nearby_filtrations() {
    let g = GroupRing::new("Z^2".parse().unwrap(), RingSpec::Integers);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let ambient = FilteredModule::standard(PresentedModule::free(&g, 1)).window(9).unwrap();
    let ball = ball_elements(&g.group, &g.group.identity(), 4).unwrap();
    for d in 0..=2u32 {
        let near = ball_elements(&g.group, &g.group.identity(), d).unwrap();
        let sigma: Vec<serde_json::Value> = (0..3)
            .map(|_| {
                let terms: Vec<String> = (0..2).map(|_| format!("{}*{}", rng.gen_range(1..=3), g.group.format(near.choose(&mut rng).unwrap()))).collect();
                json!([terms.join(" + ")])
            })
            .map(|row| json!({"label": "s", "value": row}))
            .collect();
        let m = PresentedModule::from_json(&json!({"ring": "Z", "group": "Z^2", "rank": 1, "sigma": sigma})).unwrap();
        let win = FilteredModule::standard(m).window_with(ambient.context().clone()).unwrap();
        for _ in 0..30 {
            let mut s: Vec<_> = (0..rng.gen_range(1..=3)).map(|_| ball.choose(&mut rng).unwrap().clone()).collect();
            s.sort();
            s.dedup();
            let reach = enlarge_elements(&g.group, &s, d).unwrap();
            assert!(win.evaluate(&s).unwrap().is_subset(&ambient.evaluate(&reach).unwrap()));
        }
    }
}

#[test]
fn identities_classify_as_both() {
    let zz = GroupRing::new("Z".parse().unwrap(), RingSpec::Integers);
    let f2 = GroupRing::new("F2".parse().unwrap(), RingSpec::Integers);
    let plan = SamplingPlan::light(0);
    for (m, r) in [(PresentedModule::free(&zz, 1), 8), (PresentedModule::trivial(&zz), 8), (PresentedModule::free(&f2, 1), 4)] {
        let id = FilteredMorphism::identity(&FilteredModule::standard(m));
        assert_eq!(classify_morphism(&id, r, &plan).unwrap().verdict, Admissibility::Both);
    }
}

#[test]
fn tier_a_resolutions_stay_within_global_dimension() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..20 {
        let n = 1 + i % 2;
        let g = GroupRing::new(GroupSpec::free_abelian(n), RingSpec::Rationals);
        let count = rng.gen_range(1..=2);
        let rels: Vec<Vec<GroupRingElement>> = (0..count)
            .map(|_| {
                let e: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
                let mono = g.monomial(int(1), GroupElement::Abelian(e));
                vec![g.sub(&mono, &g.one())]
            })
            .filter(|r: &Vec<GroupRingElement>| !r[0].is_zero())
            .collect();
        let relations = GroupRingMatrix::from_rows(rels.clone(), 1).unwrap();
        let m = PresentedModule::new(g.clone(), 1, relations, PresentedModule::free(&g, 1).sigma).unwrap();
        let chain = resolve(&m, &ResolveOptions { radius: 4, certify: false, ..ResolveOptions::default() }).unwrap();
        assert!(chain.terminated);
        assert!(chain.length() <= n, "length {} over Q[Z^{n}]", chain.length());
        assert!(chain.composes_to_zero().unwrap());
        if i < 4 {
            let window = resolve(&m, &ResolveOptions { radius: 4, certify: false, mode: Some(KernelMode::Window(4)), ..ResolveOptions::default() }).unwrap();
            assert_eq!(window.ranks, chain.ranks);
        }
    }
}
