use std::collections::BTreeSet;

use proptest::prelude::*;

use cylkit::dims::{neat_reduct, ra_reduct, RaCoords};
use cylkit::monk::{monk_atoms, monk_structure};
use cylkit::morphisms::{
    amalgam_check, ca2_frames, embeddings, find_isomorphism, find_isomorphism_with, Arrow,
    IsoOptions,
};
use cylkit::sets::full_set_algebra;
use cylkit::term::{
    ca_schema, eta_plus, eta_plus_equation, instantiate_schema, parse_term, IndexInjection,
    SchemaTemplate,
};
use cylkit::{Element, FiniteBao};

fn set_algebra(n: usize) -> FiniteBao {
    full_set_algebra(n, 2, &[]).unwrap()
}

fn canonical(eqs: Vec<cylkit::term::Equation>) -> BTreeSet<String> {
    eqs.into_iter().map(|e| e.canonical().to_string()).collect()
}

#[test]
fn iterated_neat_reducts() {
    for n in 2..=4 {
        let a = set_algebra(n);
        for j_mask in 1u32..1 << n {
            let j: Vec<usize> = (0..n).filter(|k| j_mask >> k & 1 == 1).collect();
            let nr_j = neat_reduct(&a, &j).unwrap();
            for i_mask in 1u32..1 << j.len() {
                let local: Vec<usize> = (0..j.len()).filter(|k| i_mask >> k & 1 == 1).collect();
                let global: Vec<usize> = local.iter().map(|&k| j[k]).collect();
                let twice = neat_reduct(&nr_j.algebra, &local).unwrap();
                let once = neat_reduct(&a, &global).unwrap();
                let w = find_isomorphism(&twice.algebra, &once.algebra).unwrap();
                assert!(w.is_some(), "n={n} J={j:?} I={global:?}");
            }
        }
    }
}

#[test]
fn neat_reduct_atoms_are_joint_classes() {
    for n in 2..=4 {
        let a = set_algebra(n);
        for keep in [vec![0], vec![0, 1], (0..n - 1).collect::<Vec<_>>()] {
            let nr = neat_reduct(&a, &keep).unwrap();
            let dropped: Vec<usize> = (0..n).filter(|k| !keep.contains(k)).collect();
            // classes of tuples agreeing on the kept coordinates
            let classes = 2usize.pow((n - dropped.len()) as u32);
            assert_eq!(nr.algebra.len(), classes);
            let total: usize = (0..nr.algebra.len()).map(|k| nr.block(k).count()).sum();
            assert_eq!(total, a.len());
        }
    }
}

#[test]
fn set_algebra_ra_reduct_is_associative() {
    let a = set_algebra(3);
    let r = ra_reduct(&a, RaCoords::standard(3), true).unwrap();
    let ra = &r.algebra;
    let elements: Vec<Element> = ra.elements().unwrap().collect();
    for x in &elements {
        for y in &elements {
            let xy = ra.compose(x, y).unwrap();
            for z in &elements {
                assert_eq!(
                    ra.compose(&xy, z).unwrap(),
                    ra.compose(x, &ra.compose(y, z).unwrap()).unwrap()
                );
            }
        }
    }
}

#[test]
fn monk_counts_grow_with_colours() {
    let counts: Vec<usize> = (3..=5).map(|n| monk_atoms(3, n).unwrap().len()).collect();
    assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{counts:?}");
    for n in 3..=4 {
        let f = monk_structure(3, n).unwrap();
        for (op, rel) in f.unary_ops() {
            assert!(rel.equivalence_classes().is_some(), "{op} at n={n}");
        }
    }
}

#[test]
fn schema_instances_ignore_index_names() {
    let s = ca_schema();
    let base = canonical(instantiate_schema(&s, 4).unwrap());
    for images in [[1, 0, 2], [2, 1, 0], [1, 2, 0], [2, 0, 1], [0, 2, 1]] {
        let rho = IndexInjection::from_images(&images).unwrap();
        let renamed = SchemaTemplate {
            templates: s
                .templates
                .iter()
                .map(|e| eta_plus_equation(&rho, e).unwrap())
                .collect(),
            ..s.clone()
        };
        assert_eq!(
            canonical(instantiate_schema(&renamed, 4).unwrap()),
            base,
            "{images:?}"
        );
    }
}

#[test]
fn superamalgams_are_amalgams() {
    let small = ca2_frames(2).unwrap();
    let pool = ca2_frames(3).unwrap();
    let a0 = &small[0];
    let mut checked = 0;
    for a1 in &small {
        for a2 in &small {
            let (Some(e1), Some(e2)) = (
                embeddings(a0, a1).unwrap().pop(),
                embeddings(a0, a2).unwrap().pop(),
            ) else {
                continue;
            };
            let i1 = Arrow::new(a0.clone(), a1.clone(), e1);
            let i2 = Arrow::new(a0.clone(), a2.clone(), e2);
            for d in &pool {
                for f1 in embeddings(a1, d).unwrap() {
                    for f2 in embeddings(a2, d).unwrap() {
                        let m1 = Arrow::new(a1.clone(), d.clone(), f1.clone());
                        let m2 = Arrow::new(a2.clone(), d.clone(), f2);
                        let r = amalgam_check(&i1, &i2, &m1, &m2).unwrap();
                        assert!(!r.superamalgam || r.amalgam);
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_subalgebras_are_idempotent_and_monotone(
        masks in prop::collection::vec(0u64..256, 0..3),
        extra in 0u64..256,
    ) {
        let a = set_algebra(3);
        let gens: Vec<Element> = masks.iter().map(|&m| Element::from_mask(8, m)).collect();
        let s = a.generated_subalgebra(&gens).unwrap();
        let again = a.generated_subalgebra(&s.atoms).unwrap();
        prop_assert_eq!(&again, &s);
        let mut more = gens.clone();
        more.push(Element::from_mask(8, extra));
        let bigger = a.generated_subalgebra(&more).unwrap();
        for x in s.elements().unwrap() {
            prop_assert!(bigger.contains(&x));
        }
    }

    #[test]
    fn eta_plus_keeps_shape(
        src in prop::sample::select(vec![
            "(c 0 (c 1 x))",
            "(s 0 1 (* x (c 2 y)))",
            "(+ d01 (- (c 1 d12)))",
            "(* (c 0 (* d01 x)) (c 0 (* d01 (- x))))",
            "(c 2 (* d02 d21))",
        ]),
        images in Just(vec![0usize, 1, 2, 3, 4]).prop_shuffle(),
    ) {
        let t = parse_term(src).unwrap();
        let rho = IndexInjection::from_images(&images[..3]).unwrap();
        let moved = eta_plus(&rho, &t).unwrap();
        prop_assert_eq!(moved.depth(), t.depth());
        let mut before = t.op_multiset();
        let mut after = moved.op_multiset();
        before.sort_unstable();
        after.sort_unstable();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn isomorphism_is_symmetric_and_pruning_is_sound(i in 0usize..20, j in 0usize..20) {
        let frames = ca2_frames(3).unwrap();
        let (a, b) = (&frames[i % frames.len()], &frames[j % frames.len()]);
        let plain = IsoOptions { prune: false, ..IsoOptions::default() };
        let ab = find_isomorphism(a, b).unwrap();
        let ba = find_isomorphism(b, a).unwrap();
        let ab_plain = find_isomorphism_with(a, b, plain).unwrap();
        prop_assert_eq!(ab.is_some(), ba.is_some());
        prop_assert_eq!(ab.is_some(), ab_plain.is_some());
        if let Some(w) = ab {
            prop_assert!(w.is_isomorphism());
        }
    }
}
