use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::abgrp::AbGroup;
use crate::addcat::SkeletonSpec;
use crate::grpalg::GroupAlgebra;

fn skel(p: u32, gens: &[&str], k: usize) -> Arc<Skeleton> {
    let g = gens.iter().map(|s| AbGroup::parse(p, s).unwrap()).collect();
    Arc::new(Skeleton::new(SkeletonSpec::new(p, g, k)).unwrap())
}

fn v(n: usize) -> Object {
    Object(vec![n])
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(7)
}

#[test]
fn linearization_values() {
    let sk = skel(2, &["Z/2"], 2);
    let p = parse_functor(&sk, "P(V1)").unwrap();
    assert_eq!(p.dim(&v(2)).unwrap(), 4);
    assert_eq!(parse_functor(&sk, "k").unwrap().dim(&v(0)).unwrap(), 1);
    assert_eq!(parse_functor(&sk, "Pbar(V1)").unwrap().dim(&v(0)).unwrap(), 0);
    assert!(parse_functor(&sk, "P(V3)").is_err());
}

#[test]
fn graded_piece_matches_group_algebra() {
    let sk = skel(2, &["Z/2 + Z/4"], 1);
    let a = Object(vec![1]);
    let g = AbGroup::parse(2, "Z/2 + Z/4").unwrap();
    let (hom, _) = g.hom_group(&g).unwrap();
    let alg = GroupAlgebra::new(&hom).unwrap();
    for d in 0..5 {
        let s = TruncatedPoly::graded(sk.clone(), a.clone(), d).unwrap();
        assert_eq!(s.dim(&a).unwrap(), alg.s_graded_dim(d), "d = {d}");
        let q = TruncatedPoly::quotient(sk.clone(), a.clone(), d).unwrap();
        assert_eq!(q.dim(&a).unwrap(), alg.q_dim(d), "d = {d}");
    }
}

#[test]
fn functoriality_of_constructions() {
    let mut r = rng();
    for (p, gens, k, exprs) in [
        (2, vec!["Z/2"], 3, vec!["P(V1)", "Pbar(V2)", "A(V1)", "I", "Q^2 . Hom(V1,-)", "S^2 . Hom(V2,-)", "S^2 . I", "L^2 . I", "G^2 . I"]),
        (2, vec!["Z/4"], 2, vec!["Q^3 . Hom(V1,-)", "S^2 . Hom(V1,-)", "A(V1) * I", "D(P(V1))", "D(S^2 . I) + k"]),
        (3, vec!["Z/3"], 2, vec!["S^3 . I", "G^3 . I", "L^2 . I", "Q^2 . Hom(V1,-)"]),
        (2, vec!["Z/2", "Z/4"], 1, vec!["P(V(1,0))", "Q^2 . Hom(V(0,1),-)", "I * I"]),
    ] {
        let sk = skel(p, &gens, k);
        for e in exprs {
            let f = parse_functor(&sk, e).unwrap();
            assert!(check_functoriality(f.as_ref(), 200, &mut r).unwrap(), "{e} over {gens:?}");
        }
    }
}

#[test]
fn augmentation_splitting() {
    let sk = skel(2, &["Z/2"], 2);
    let p = parse_functor(&sk, "P(V1)").unwrap();
    let split = parse_functor(&sk, "Pbar(V1) + k").unwrap();
    assert_eq!(dims_on_skeleton(p.as_ref()).unwrap(), dims_on_skeleton(split.as_ref()).unwrap());
    assert_eq!(nat_space_dim(p.as_ref(), split.as_ref()).unwrap(), nat_space_dim(p.as_ref(), p.as_ref()).unwrap());
}

#[test]
fn yoneda_dimension() {
    let sk = skel(2, &["Z/2"], 2);
    for g in ["k", "P(V2)", "S^2 . I", "Q^2 . Hom(V1,-)", "D(P(V1))"] {
        let g = parse_functor(&sk, g).unwrap();
        for a in sk.objects() {
            let p = Linearization::new(sk.clone(), a.clone()).unwrap();
            assert_eq!(nat_space_dim(&p, g.as_ref()).unwrap(), g.dim(a).unwrap());
        }
    }
}

#[test]
fn yoneda_transform_is_natural() {
    let sk = skel(3, &["Z/3"], 2);
    let g = parse_functor(&sk, "S^2 . I").unwrap();
    let eta = yoneda_transform(g.clone(), &v(1), vec![1]).unwrap();
    assert!(eta.is_natural().unwrap());
    let all = sk.hom_set(&v(2), &v(2), 1 << 12).unwrap();
    assert!(eta.is_natural_on(&all).unwrap());
}

#[test]
fn double_dual() {
    let sk = skel(2, &["Z/4"], 2);
    let f = parse_functor(&sk, "Q^2 . Hom(V1,-)").unwrap();
    let dd = parse_functor(&sk, "D(D(Q^2 . Hom(V1,-)))").unwrap();
    for g in sk.generating_set().unwrap() {
        assert_eq!(f.act(g).unwrap(), dd.act(g).unwrap());
    }
}

#[test]
fn tensor_dims() {
    let sk = skel(2, &["Z/2"], 3);
    let f = parse_functor(&sk, "P(V1)").unwrap();
    let g = parse_functor(&sk, "S^2 . I").unwrap();
    let t = parse_functor(&sk, "P(V1) * S^2 . I").unwrap();
    for a in sk.objects() {
        assert_eq!(t.dim(a).unwrap(), f.dim(a).unwrap() * g.dim(a).unwrap());
    }
}

#[test]
fn frobenius_sequence_p2() {
    let sk = skel(2, &["Z/2"], 3);
    let seq = FrobeniusSequence::new(&sk).unwrap();
    let dims: Vec<usize> = [&seq.identity, &seq.sym, &seq.divided].iter().map(|f| f.dim(&v(1)).unwrap()).collect();
    assert_eq!(dims, [1, 1, 1]);
    assert!(seq.is_natural().unwrap());
    assert!(seq.is_exact().unwrap());
    let all = sk.hom_set(&v(2), &v(2), 64).unwrap();
    assert!(seq.frobenius.is_natural_on(&all).unwrap());
    assert!(seq.norm.is_natural_on(&all).unwrap());
    assert!(seq.verschiebung.is_natural_on(&all).unwrap());
    assert!(FrobeniusSequence::new(&skel(2, &["Z/2"], 1)).is_err());
}

#[test]
fn frobenius_sequence_p3() {
    let sk = skel(3, &["Z/3"], 3);
    let seq = FrobeniusSequence::new(&sk).unwrap();
    assert!(seq.is_natural().unwrap());
    assert!(seq.is_exact().unwrap());
}

#[test]
fn kernel_and_cokernel_of_augmentation() {
    let sk = skel(2, &["Z/2"], 2);
    let p: FunctorRef = Arc::new(Linearization::new(sk.clone(), v(1)).unwrap());
    let k: FunctorRef = Arc::new(Constant::new(sk.clone(), 1));
    let eps = Arc::new(NatTransform::new(p.clone(), k, |a| {
        let n = p_dim(a);
        Ok(FpMatrix::from_fn(crate::linalg::Fp::new(2).unwrap(), 1, n, |_, _| 1))
    }));
    fn p_dim(a: &Object) -> usize {
        1 << a.0[0]
    }
    assert!(eps.is_natural().unwrap());
    let ker = Arc::new(eps.kernel());
    let pbar = parse_functor(&sk, "Pbar(V1)").unwrap();
    assert_eq!(dims_on_skeleton(ker.as_ref()).unwrap(), dims_on_skeleton(pbar.as_ref()).unwrap());
    assert!(check_functoriality(ker.as_ref(), 50, &mut rng()).unwrap());
    let inc = Arc::new(ker.inclusion());
    assert!(inc.is_natural().unwrap());
    assert!(inc.is_exact_with(&eps).unwrap());
    let coker = eps.cokernel();
    assert_eq!(dims_on_skeleton(&coker).unwrap(), [0, 0, 0]);
}

#[test]
fn expression_round_trip() {
    for s in ["S^2 . Hom(V1,-)", "D(P(V2)) + k^3", "(I + k) * A(V(1,2))", "G^3 . (I * I)", "L^2 . Pbar(V1)"] {
        let e = FunctorExpr::parse(s).unwrap();
        assert_eq!(FunctorExpr::parse(&e.to_string()).unwrap(), e, "{s}");
    }
    assert!(FunctorExpr::parse("S^2 Hom(V1,-)").is_err());
    assert!(FunctorExpr::parse("P(V1").is_err());
    let sk = skel(2, &["Z/2"], 1);
    assert!(parse_functor(&sk, "Q^2 . I").is_err());
}
