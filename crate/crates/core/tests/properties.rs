use proptest::prelude::*;

use cylkit::dims::ca_frame_correspondents;
use cylkit::morphisms::find_isomorphism;
use cylkit::term::{
    ca_axioms, check_variety, eta_plus, eval, Assignment, CheckMode, IndexInjection, Term,
};
use cylkit::{
    complex_algebra, json, AtomId, AtomStructure, Consistency, ConstName, Element, Relation,
    UnaryOp,
};

/// A two-dimensional frame given by explicit pair lists.
#[derive(Clone, Debug)]
struct RawFrame {
    n: usize,
    cyl: [Vec<(usize, usize)>; 2],
    diag: Vec<bool>,
    comp: Vec<(usize, usize, usize)>,
}

impl RawFrame {
    fn build(&self, relabel: &[usize]) -> AtomStructure {
        let n = self.n;
        let rel = |pairs: &[(usize, usize)]| {
            Relation::from_pairs(n, pairs.iter().map(|&(a, b)| (relabel[a], relabel[b])))
        };
        let d = Element::from_atoms(n, (0..n).filter(|&a| self.diag[a]).map(|a| relabel[a]));
        let comp = Consistency::from_consistent(
            n,
            self.comp
                .iter()
                .map(|&(a, b, c)| (relabel[a], relabel[b], relabel[c])),
        );
        AtomStructure::builder((0..n).map(AtomId::Index).collect(), 2)
            .unary(UnaryOp::Cyl(0), rel(&self.cyl[0]))
            .unary(UnaryOp::Cyl(1), rel(&self.cyl[1]))
            .constant(ConstName::Diag(0, 0), Element::one(n))
            .constant(ConstName::Diag(1, 1), Element::one(n))
            .constant(ConstName::Diag(0, 1), d.clone())
            .constant(ConstName::Diag(1, 0), d)
            .composition(comp)
            .build()
            .unwrap()
    }
}

fn raw_frame() -> impl Strategy<Value = RawFrame> {
    (1usize..=5).prop_flat_map(|n| {
        let pair = (0..n, 0..n);
        (
            Just(n),
            prop::collection::vec(pair.clone(), 0..=n * n),
            prop::collection::vec(pair, 0..=n * n),
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec((0..n, 0..n, 0..n), 0..=n * n),
        )
            .prop_map(|(n, c0, c1, diag, comp)| RawFrame {
                n,
                cyl: [c0, c1],
                diag,
                comp,
            })
    })
}

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::Var("x".into())),
        Just(Term::Var("y".into())),
        Just(Term::Zero),
        Just(Term::One),
        (0usize..2, 0usize..2).prop_map(|(i, j)| Term::Const(ConstName::Diag(i, j))),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (0usize..2, inner.clone()).prop_map(|(i, t)| Term::Unary(UnaryOp::Cyl(i), Box::new(t))),
            (0usize..2, 0usize..2, inner.clone()).prop_map(|(i, j, t)| Term::Subst(
                i,
                j,
                Box::new(t)
            )),
            (
                prop::sample::subsequence(vec![0usize, 1], 0..=2),
                inner.clone()
            )
                .prop_map(|(g, t)| Term::CylSet(g, Box::new(t))),
            inner.clone().prop_map(|t| Term::Not(Box::new(t))),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Term::Join(Box::new(l), Box::new(r))),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Term::Meet(Box::new(l), Box::new(r))),
            (inner.clone(), inner).prop_map(|(l, r)| Term::Compose(Box::new(l), Box::new(r))),
        ]
    })
}

/// Evaluation straight from the pair lists, with sets as boolean vectors.
fn naive(t: &Term, f: &RawFrame, x: &[bool], y: &[bool]) -> Vec<bool> {
    let n = f.n;
    let op = |pairs: &[(usize, usize)], s: &[bool]| {
        let mut out = vec![false; n];
        for &(a, b) in pairs {
            out[a] |= s[b];
        }
        out
    };
    let diag = |i: usize, j: usize| {
        if i == j {
            vec![true; n]
        } else {
            f.diag.clone()
        }
    };
    let rec = |t: &Term| naive(t, f, x, y);
    match t {
        Term::Var(v) if v == "x" => x.to_vec(),
        Term::Var(_) => y.to_vec(),
        Term::Zero => vec![false; n],
        Term::One => vec![true; n],
        Term::Const(ConstName::Diag(i, j)) => diag(*i, *j),
        Term::Unary(UnaryOp::Cyl(i), t) => op(&f.cyl[*i], &rec(t)),
        Term::Subst(i, j, t) => {
            let s = rec(t);
            if i == j {
                return s;
            }
            let d = diag(*i, *j);
            let meet: Vec<bool> = s.iter().zip(&d).map(|(a, b)| *a && *b).collect();
            op(&f.cyl[*i], &meet)
        }
        Term::CylSet(g, t) => g.iter().fold(rec(t), |s, &i| op(&f.cyl[i], &s)),
        Term::Not(t) => rec(t).into_iter().map(|b| !b).collect(),
        Term::Join(l, r) => rec(l).iter().zip(rec(r)).map(|(a, b)| *a || b).collect(),
        Term::Meet(l, r) => rec(l).iter().zip(rec(r)).map(|(a, b)| *a && b).collect(),
        Term::Compose(l, r) => {
            let (sl, sr) = (rec(l), rec(r));
            let mut out = vec![false; n];
            for &(a, b, c) in &f.comp {
                out[a] |= sl[b] && sr[c];
            }
            out
        }
        other => unreachable!("generator does not produce {other:?}"),
    }
}

fn element(bits: &[bool]) -> Element {
    Element::from_atoms(
        bits.len(),
        bits.iter().enumerate().filter(|(_, b)| **b).map(|(k, _)| k),
    )
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn eval_agrees_with_naive_evaluation(
        (f, x, y) in raw_frame().prop_flat_map(|f| {
            let n = f.n;
            (Just(f), prop::collection::vec(any::<bool>(), n), prop::collection::vec(any::<bool>(), n))
        }),
        t in term(),
    ) {
        let a = complex_algebra(f.build(&(0..f.n).collect::<Vec<_>>()));
        let env = Assignment::from([("x".to_string(), element(&x)), ("y".to_string(), element(&y))]);
        prop_assert_eq!(eval(&t, &a, &env).unwrap(), element(&naive(&t, &f, &x, &y)));
    }

    #[test]
    fn complex_operators_are_normal_and_additive(
        (f, x, y) in raw_frame().prop_flat_map(|f| {
            let n = f.n;
            (Just(f), prop::collection::vec(any::<bool>(), n), prop::collection::vec(any::<bool>(), n))
        }),
    ) {
        let a = complex_algebra(f.build(&(0..f.n).collect::<Vec<_>>()));
        let (x, y) = (element(&x), element(&y));
        for i in 0..2 {
            prop_assert!(a.cyl(i, &a.zero()).unwrap().is_zero());
            prop_assert_eq!(a.cyl(i, &(&x | &y)).unwrap(), &a.cyl(i, &x).unwrap() | &a.cyl(i, &y).unwrap());
        }
        prop_assert_eq!(a.compose(&(&x | &y), &x).unwrap(), &a.compose(&x, &x).unwrap() | &a.compose(&y, &x).unwrap());
    }

    #[test]
    fn json_round_trip(f in raw_frame()) {
        let frame = f.build(&(0..f.n).collect::<Vec<_>>());
        let text = json::to_string(&frame);
        let back = json::from_str(&text).unwrap();
        prop_assert_eq!(json::to_string(&back), text);
        prop_assert_eq!(back, frame);
    }

    #[test]
    fn relabelled_frames_are_isomorphic((f, perm) in raw_frame().prop_flat_map(|f| {
        let n = f.n;
        (Just(f), permutation(n))
    })) {
        let a = complex_algebra(f.build(&(0..f.n).collect::<Vec<_>>()));
        let b = complex_algebra(f.build(&perm));
        let w = find_isomorphism(&a, &b).unwrap();
        prop_assert!(w.is_some_and(|w| w.is_isomorphism()));
    }

    #[test]
    fn correspondents_match_equations(f in raw_frame()) {
        let frame = f.build(&(0..f.n).collect::<Vec<_>>());
        let corr = ca_frame_correspondents(&frame, 2).unwrap().holds();
        let eqs = check_variety(&complex_algebra(frame), &ca_axioms(2), CheckMode::Exhaustive { cap: 1 << 20 }).unwrap();
        prop_assert_eq!(corr, eqs.holds());
    }

    #[test]
    fn eta_plus_respects_composition(
        t in term(),
        rho in permutation(4).prop_map(|p| p[..2].to_vec()),
        sigma in permutation(6).prop_map(|p| p[..4].to_vec()),
    ) {
        let rho = IndexInjection::from_images(&rho).unwrap();
        let sigma = IndexInjection::from_images(&sigma).unwrap();
        let both = sigma.compose(&rho).unwrap();
        prop_assert_eq!(eta_plus(&both, &t).unwrap(), eta_plus(&sigma, &eta_plus(&rho, &t).unwrap()).unwrap());
    }
}
