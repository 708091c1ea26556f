use std::sync::Arc;

use super::*;
use crate::abgrp::AbGroup;
use crate::addcat::SkeletonSpec;
use crate::functor::{dims_on_skeleton, nat_space_dim, parse_functor};

fn skel(p: u32, gens: &[&str], k: usize) -> Arc<Skeleton> {
    let g = gens.iter().map(|s| AbGroup::parse(p, s).unwrap()).collect();
    Arc::new(Skeleton::new(SkeletonSpec::new(p, g, k)).unwrap())
}

#[test]
fn projectives_have_no_higher_ext() {
    let sk = skel(2, &["Z/2"], 2);
    let p = parse_functor(&sk, "P(V1)").unwrap();
    for ge in ["I", "k", "S^2 . I", "P(V1)"] {
        let g = parse_functor(&sk, ge).unwrap();
        let t = ext(p.clone(), g.clone(), Mode::Full, 2).unwrap();
        assert_eq!(t.dims[0], g.dim(&Object(vec![1])).unwrap(), "{ge}");
        assert_eq!(&t.dims[1..], [0, 0], "{ge}");
        assert!(t.hom_check);
    }
}

#[test]
fn resolutions_are_exact() {
    let sk = skel(2, &["Z/2"], 2);
    for fe in ["I", "S^2 . I", "Pbar(V1)", "k"] {
        let f = parse_functor(&sk, fe).unwrap();
        let r = resolve(f, Mode::Full, 3).unwrap();
        assert!(r.is_exact().unwrap(), "{fe}");
    }
    let sk3 = skel(2, &["Z/2"], 3);
    let i = parse_functor(&sk3, "I").unwrap();
    assert!(resolve(i, Mode::Poly(1), 3).unwrap().is_exact().unwrap());
}

#[test]
fn ext_zero_is_hom() {
    let sk = skel(3, &["Z/3"], 2);
    for (fe, ge) in [("I", "I"), ("S^2 . I", "I * I"), ("I * I", "S^2 . I"), ("k + I", "P(V1)")] {
        let f = parse_functor(&sk, fe).unwrap();
        let g = parse_functor(&sk, ge).unwrap();
        let t = ext(f.clone(), g.clone(), Mode::Full, 0).unwrap();
        assert_eq!(t.dims[0], nat_space_dim(f.as_ref(), g.as_ref()).unwrap(), "{fe}, {ge}");
    }
}

#[test]
fn poly_ext_of_additive_functors() {
    // I is projective among degree <= 1 functors that vanish at 0
    let sk = skel(2, &["Z/2"], 3);
    let i = parse_functor(&sk, "I").unwrap();
    let t = ext(i.clone(), i.clone(), Mode::Poly(1), 2).unwrap();
    assert_eq!(t.dims, [1, 0, 0]);
}

#[test]
fn poly_mode_rejects_high_degree() {
    let sk = skel(2, &["Z/2"], 3);
    let f = parse_functor(&sk, "S^2 . I").unwrap();
    assert!(matches!(resolve(f, Mode::Poly(1), 1), Err(Error::Invalid(_))));
}

#[test]
fn expansion_inverts_group_elements() {
    let sk = skel(2, &["Z/4"], 2);
    let a = Object(vec![1]);
    let pi = ProjSum::new(sk.clone(), Mode::Poly(2), vec![a.clone()]).unwrap();
    let q = TruncatedPoly::quotient(sk.clone(), a.clone(), 2).unwrap();
    for b in sk.objects() {
        let n = q.dim(b).unwrap();
        for j in 0..n {
            let mut e = vec![0u8; n];
            e[j] = 1;
            let mut back = vec![0u8; n];
            for (u, c) in pi.expand(0, b, &e).unwrap() {
                for (x, y) in back.iter_mut().zip(q.group_element(&u).unwrap()) {
                    *x = sk.field().add(*x, sk.field().mul(c, y));
                }
            }
            assert_eq!(back, e);
        }
    }
}

#[test]
fn generators_of_whole_functor() {
    let sk = skel(2, &["Z/2"], 2);
    let f = parse_functor(&sk, "P(V1) + I").unwrap();
    let gens = generators_of(f.as_ref(), &|b| Ok(Arc::new(Subspace::full(sk.field(), f.dim(b)?)))).unwrap();
    // objects are visited from V0 up, so [0] ∈ P(V1)(V0) is picked before
    // the universal element; generators need not be minimal
    let objs: Vec<&Object> = gens.iter().map(|(a, _)| a).collect();
    assert_eq!(objs, [&Object(vec![0]), &Object(vec![1]), &Object(vec![1])]);
}

#[test]
fn comparison_is_iso_in_low_degree() {
    let sk = skel(2, &["Z/2"], 3);
    let i = parse_functor(&sk, "I").unwrap();
    let s2 = parse_functor(&sk, "S^2 . I").unwrap();
    for (f, g) in [(&i, &i), (&i, &s2), (&s2, &i)] {
        let m = compare(f.clone(), g.clone(), 2, 2).unwrap();
        for deg in &m.degrees[..2] {
            assert!(deg.injective && deg.surjective, "{} {} {deg:?}", f.name(), g.name());
        }
        assert!(m.degrees[2].injective);
        assert!(m.degrees.iter().all(|d| d.lift_independent));
    }
}

#[test]
fn frobenius_class() {
    let sk = skel(2, &["Z/2"], 3);
    let r = excl_class_check(&sk).unwrap();
    assert!(r.class_is_cocycle);
    assert!(r.class_nonzero);
    assert!(r.poly1_vanishes);
    assert_eq!(r.in_image_from_poly2, Some(true));
    assert!(r.split_class_zero);
    assert!(r.lift_independent);
}

#[test]
fn derived_pd_of_low_degree() {
    let sk = skel(2, &["Z/2"], 3);
    let f = parse_functor(&sk, "I").unwrap();
    let r = derived_pd(f.clone(), 1, 1).unwrap();
    assert!(r.r0_matches);
    assert_eq!(r.dims[0], dims_on_skeleton(f.as_ref()).unwrap());
    assert!(r.dims[1].iter().all(|&n| n == 0));
}

#[test]
fn presentation_agrees_with_resolution() {
    let sk = skel(2, &["Z/2"], 3);
    let fs = ["I", "S^2 . I", "I * I", "k + I", "Pbar(V1)"];
    for fe in fs {
        for ge in fs {
            let f = parse_functor(&sk, fe).unwrap();
            let g = parse_functor(&sk, ge).unwrap();
            let t = ext(f.clone(), g.clone(), Mode::Full, 1).unwrap();
            assert_eq!(ext_low(f, g).unwrap().to_vec(), t.dims, "{fe}, {ge}");
        }
    }
}

#[test]
fn ext_low_is_duality_invariant() {
    let sk = skel(2, &["Z/2"], 3);
    let fs = ["I", "S^2 . I", "A(V2) * I", "Pbar(V1)"];
    for fe in fs {
        for ge in fs {
            let f = parse_functor(&sk, fe).unwrap();
            let g = parse_functor(&sk, ge).unwrap();
            let df = parse_functor(&sk, &format!("D({fe})")).unwrap();
            let dg = parse_functor(&sk, &format!("D({ge})")).unwrap();
            let t = ext(f, g, Mode::Full, 1).unwrap();
            let d = ext(dg, df, Mode::Full, 1).unwrap();
            assert_eq!(t.dims, d.dims, "{fe}, {ge}");
        }
    }
}
