use std::str::FromStr;

use ctrlmod::certificate::Counterexample;
use ctrlmod::filtered::*;
use ctrlmod::ring::group_ring::{GroupRing, GroupRingMatrix};
use ctrlmod::ring::scalar::RingSpec;
use ctrlmod::ring::vector::unit;
use ctrlmod::space::embedding::{MapRule, UniformEmbedding, WitnessFn};
use ctrlmod::space::group::GroupSpec;

fn z() -> GroupSpec {
    GroupSpec::free_abelian(1)
}

fn zz() -> GroupRing {
    GroupRing::new(z(), RingSpec::Integers)
}

fn t(k: i64) -> ctrlmod::space::group::GroupElement {
    z().normal_form(&[(0, k)]).unwrap()
}

#[test]
fn free_rank_one_evaluates_to_coordinates() {
    let m = FilteredModule::standard(PresentedModule::free(&zz(), 1));
    let win = m.window(10).unwrap();
    let f = win.evaluate(&[t(0), t(1)]).unwrap();
    assert!(f.contains(&unit(t(0), 0)));
    assert!(f.contains(&unit(t(1), 0)));
    assert!(!f.contains(&unit(t(2), 0)));
    assert!(win.evaluate(&[]).unwrap().is_zero());
}

#[test]
fn trivial_module_is_everything_at_one_point() {
    let m = FilteredModule::standard(PresentedModule::trivial(&zz()));
    let win = m.window(10).unwrap();
    let f = win.evaluate(&[t(5)]).unwrap();
    for k in -10..=10 {
        assert!(f.contains(&unit(t(k), 0)));
    }
}

#[test]
fn diagonal_projection_image() {
    let gr = GroupRing::new(GroupSpec::free(2), RingSpec::Integers);
    let e = GroupRingMatrix::from_string_rows(&gr, &[vec!["1", "0"], vec!["0", "0"]]).unwrap();
    let free = PresentedModule::free(&gr, 2);
    let img = FilteredModule::image(FilteredModule::standard(free.clone()), e, &free).unwrap();
    let win = img.window(3).unwrap();
    let id = gr.group.identity();
    let f = win.evaluate(&[id.clone()]).unwrap();
    assert!(f.contains(&unit(id.clone(), 0)));
    assert!(!f.contains(&unit(id, 1)));
}

#[test]
fn zero_lean_for_standard_filtrations() {
    for m in [PresentedModule::free(&zz(), 1), PresentedModule::trivial(&zz())] {
        let win = FilteredModule::standard(m).window(12).unwrap();
        assert!(check_lean(&win, 0, &SamplingPlan::default()).unwrap().passed());
        assert!(check_lean(&win, 1, &SamplingPlan::default()).unwrap().passed());
    }
}

#[test]
fn trivial_module_is_not_insular() {
    let win = FilteredModule::standard(PresentedModule::trivial(&zz())).window(20).unwrap();
    let s = win.evaluate(&[t(8)]).unwrap();
    let u = win.evaluate(&[t(-8)]).unwrap();
    let meet = s.intersect(&u);
    assert!(meet.contains(&unit(t(0), 0)));
    assert!(win.evaluate(&[]).unwrap().is_zero());
    let cert = check_insular(&win, 3, &SamplingPlan::default(), Insularity::Strict).unwrap();
    assert!(!cert.passed());
    match cert.counterexample.unwrap() {
        Counterexample::Subsets { s, u: Some(u), .. } => {
            assert_eq!(s.len(), 1);
            assert_eq!(u, vec![z().inverse(&s[0])]);
        }
        other => panic!("unexpected {other:?}"),
    }
    // Antipodal pairs are not antithetic, so the variant survives.
    let anti = check_insular(&win, 3, &SamplingPlan::default(), Insularity::Antithetic).unwrap();
    assert!(anti.passed(), "{anti:?}");
}

#[test]
fn free_module_is_insular() {
    let win = FilteredModule::standard(PresentedModule::free(&zz(), 1)).window(12).unwrap();
    for d in 0..3 {
        assert!(check_insular(&win, d, &SamplingPlan::default(), Insularity::Strict).unwrap().passed());
    }
}

#[test]
fn antithetic_pairs() {
    let g = z();
    let s: Vec<_> = (0..=3).map(|k| t(k)).collect();
    assert_eq!(check_antithetic_pair(&g, &s, &s, 2, 10).unwrap(), Some(2));
    let right: Vec<_> = (5..=9).map(t).collect();
    let left: Vec<_> = (-9..=-5).map(t).collect();
    assert_eq!(check_antithetic_pair(&g, &right, &left, 4, 10).unwrap(), Some(0));
    assert_eq!(check_antithetic_pair(&g, &[t(8)], &[t(-8)], 8, 10).unwrap(), None);
}

#[test]
fn pushforward_along_doubling() {
    let doubling =
        UniformEmbedding::new(z(), z(), MapRule::Scale { factor: 2 }, WitnessFn::linear(2), WitnessFn::linear(2)).unwrap();
    let inner = FilteredModule::standard(PresentedModule::free(&zz(), 1));
    let push = FilteredModule::pushforward(inner, doubling).unwrap();
    let win = push.window(12).unwrap();
    let f = win.evaluate(&[t(2), t(3)]).unwrap();
    assert!(f.contains(&unit(t(1), 0)));
    assert!(!f.contains(&unit(t(2), 0)));
    assert!(check_lean(&win, 0, &SamplingPlan::default()).unwrap().passed());
    assert!(check_insular(&win, 0, &SamplingPlan::default(), Insularity::Strict).unwrap().passed());

    let id = FilteredModule::pushforward(FilteredModule::standard(PresentedModule::free(&zz(), 1)), UniformEmbedding::identity(&z())).unwrap();
    let a = id.window(8).unwrap().evaluate(&[t(1), t(4)]).unwrap();
    let b = FilteredModule::standard(PresentedModule::free(&zz(), 1)).window(8).unwrap().evaluate(&[t(1), t(4)]).unwrap();
    assert!(a.generators() == b.generators());
}

#[test]
fn equivariant_structures() {
    let free = PresentedModule::free(&zz(), 1);
    let e = equivariant_of(&free);
    assert_eq!(e.psi(&t(0), &unit(t(3), 0)), unit(t(3), 0));
    assert_eq!(e.psi(&t(1), &unit(t(3), 0)), unit(t(2), 0));
    assert!(e.certify(12, 0).unwrap().passed());
    let act = action_from_equivariant(&e, 12, 0).unwrap();
    assert!(act.check_round_trip(12, 30, 1).unwrap().passed());

    let bogus = EquivariantStructure::new(FilteredModule::standard(free), PsiRule::Identity);
    assert!(!bogus.certify(12, 0).unwrap().passed());
    assert!(action_from_equivariant(&bogus, 12, 0).is_err());

    let trivial = PresentedModule::trivial(&zz());
    let flat = EquivariantStructure::new(FilteredModule::standard(trivial.clone()), PsiRule::Identity);
    let act = action_from_equivariant(&flat, 12, 0).unwrap();
    let r = zz().parse("t - 1").unwrap();
    assert!(act.act(&r, &unit(t(0), 0)).is_empty());
    assert!(act.check_round_trip(12, 30, 2).unwrap().passed());
}

#[test]
fn module_specs_parse() {
    let v = serde_json::json!({"ring": "Z/4", "group": "Z^2", "rank": 1, "relations": [["a - 1"]], "sigma": ["e1"]});
    let m = PresentedModule::from_json(&v).unwrap();
    assert_eq!(m.gr.ring, RingSpec::from_str("Z/4").unwrap());
    assert_eq!(m.relations.rows, 1);
    let back = PresentedModule::from_json(&m.to_json()).unwrap();
    assert_eq!(back, m);
}
