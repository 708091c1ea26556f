use std::sync::Arc;

use super::*;
use crate::abgrp::AbGroup;
use crate::addcat::SkeletonSpec;
use crate::functor::{dims_on_skeleton, parse_functor};
use crate::polyfilt::cross_effect;

fn skel(p: u32, gens: &[&str], k: usize) -> Arc<Skeleton> {
    let g = gens.iter().map(|s| AbGroup::parse(p, s).unwrap()).collect();
    Arc::new(Skeleton::new(SkeletonSpec::new(p, g, k)).unwrap())
}

#[test]
fn words() {
    // w = 5 = (1,0,1) in base 2
    assert_eq!([1, 2, 3].map(|l| letter(5, l, 3, 2)), [1, 0, 1]);
    assert_eq!([1, 2, 3].map(|l| drop_letter(5, l, 3, 2)), [1, 3, 2]);
}

#[test]
fn first_term_is_cross_effect() {
    let sk = skel(2, &["Z/2"], 4);
    let f = parse_functor(&sk, "P(V1)").unwrap();
    let objs = default_objects(&sk, 1);
    let c = build_dcomplex(f.clone(), 1, 1, &objs).unwrap();
    for x in &c.at {
        let a = &x.object;
        assert_eq!(x.terms[0].dim(), f.dim(a).unwrap());
        assert_eq!(x.terms[1].dim(), cross_effect(f.as_ref(), &[a.clone(), a.clone()]).unwrap().dim());
    }
}

#[test]
fn linearization_n1() {
    let sk = skel(2, &["Z/2"], 4);
    let f = parse_functor(&sk, "P(V1)").unwrap();
    let r = dold_report(f, 1, 2, &default_objects(&sk, 1)).unwrap();
    assert!(r.h0_is_qn && r.dual_h0_is_pn && r.simplicial_identities && r.retractions);
    assert!(!r.higher_terms_vanish);
    // P(V1)(V1) = F_2[Z/2]: q_1 is everything
    assert_eq!(r.objects[0].homology[0], 2);
}

#[test]
fn low_degree_functors_are_stable() {
    let sk = skel(2, &["Z/2"], 4);
    for (e, n) in [("I", 1), ("k + I", 1), ("A(V2)", 1), ("S^2 . I", 2), ("I * I", 2)] {
        let f = parse_functor(&sk, e).unwrap();
        let r = dold_report(f.clone(), n, 2, &default_objects(&sk, n)).unwrap();
        assert!(r.higher_terms_vanish, "{e}");
        assert!(r.h0_is_qn && r.dual_h0_is_pn, "{e}");
        for o in &r.objects {
            assert_eq!(o.homology[0], f.dim(&o.object).unwrap());
            assert!(o.homology[1..].iter().all(|&h| h == 0));
            assert!(o.dual_cohomology[1..].iter().all(|&h| h == 0), "{e}");
        }
    }
}

#[test]
fn h0_matches_truncation_dims() {
    let sk = skel(2, &["Z/2"], 4);
    for (e, n) in [("Pbar(V1)", 1), ("S^2 . I", 1), ("L^2 . I + I", 1), ("P(V1)", 2)] {
        let f = parse_functor(&sk, e).unwrap();
        let objs = default_objects(&sk, n);
        let c = build_dcomplex(f.clone(), n, 1, &objs).unwrap();
        let q = dims_on_skeleton(crate::polyfilt::q_trunc(f, n).unwrap().as_ref()).unwrap();
        for x in &c.at {
            assert_eq!(x.homology_dims()[0], q[sk.object_index(&x.object).unwrap()], "{e}");
        }
    }
}

#[test]
fn skeleton_only_functors_are_guarded() {
    let sk = skel(2, &["Z/2"], 2);
    let p = parse_functor(&sk, "P(V1)").unwrap();
    let field = sk.field();
    let q = p.clone();
    let f: FunctorRef =
        Arc::new(crate::functor::SubFunctor::new("all", p, move |a| Ok(Subspace::full(field, q.dim(a)?))));
    let objs = vec![Object(vec![1])];
    assert!(matches!(build_dcomplex(f, 1, 2, &objs), Err(Error::Guard(_))));
}
