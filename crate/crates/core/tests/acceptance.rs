//! The acceptance grid: twelve criteria, each checked with exact equality and
//! reported on one line.

use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fhlab::abgrp::AbGroup;
use fhlab::addcat::{Object, Skeleton, SkeletonSpec};
use fhlab::doldpuppe::{build_dcomplex, default_objects, dold_report};
use fhlab::functor::{parse_functor, Functor, FunctorRef, FrobeniusSequence, TruncatedPoly};
use fhlab::grpalg::{pol_space, pol_space_by_differences, pol_stationarity, GroupAlgebra};
use fhlab::homalg::{compare, derived_pd, excl_class_check, ext_low};
use fhlab::koszul::{classical_koszul_and_dual, homology_table, verify_vanishing};
use fhlab::linalg::Fp;
use fhlab::polyfilt::{poly_degree, q_trunc};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn skel(p: u32, gens: &[&str], k: usize) -> Arc<Skeleton> {
    let g = gens.iter().map(|s| AbGroup::parse(p, s).unwrap()).collect();
    Arc::new(Skeleton::new(SkeletonSpec::new(p, g, k)).unwrap())
}

fn cyclic(p: u32, r: u32) -> AbGroup {
    AbGroup::cyclic(p, r).unwrap()
}

fn sum(gs: &[AbGroup]) -> AbGroup {
    gs[1..].iter().fold(gs[0].clone(), |acc, g| acc.direct_sum(g).unwrap())
}

/// Oracle: graded pieces of `⊗_j F_p[x_j]/(x_j^{p^{r_j}})`, counted directly.
fn truncated_poly_count(p: u32, exps: &[u32], d: usize) -> usize {
    fn rec(caps: &[usize], d: usize) -> usize {
        match caps.split_first() {
            None => usize::from(d == 0),
            Some((&c, rest)) => (0..c.min(d + 1)).map(|e| rec(rest, d - e)).sum(),
        }
    }
    let caps: Vec<usize> = exps.iter().map(|&r| (p as usize).pow(r)).collect();
    rec(&caps, d)
}

/// Oracle: `dim cr_n F(a, ..., a)` by inclusion-exclusion over subsets.
fn cross_effect_dim(f: &dyn Functor, a: &Object, n: usize) -> i64 {
    (0..=n)
        .map(|k| {
            let binom = (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64);
            let sign = if (n - k).is_multiple_of(2) { 1 } else { -1 };
            sign * binom * f.dim(&a.scale(k)).unwrap() as i64
        })
        .sum()
}

fn c1_s_dimension() -> Outcome {
    let mut checked = 0;
    for p in [2, 3] {
        for r in 1..=3 {
            let alg = GroupAlgebra::new(&cyclic(p, r)).unwrap();
            let q = (p as usize).pow(r);
            let dims = alg.s_graded_dims(q + 2);
            let want: Vec<usize> = (0..=q + 2).map(|d| usize::from(d < q)).collect();
            ensure(dims == want, || format!("Z/{q}: {dims:?}"))?;
            checked += dims.len();
        }
        for exps in [[1, 2], [2, 2]] {
            let v = sum(&exps.map(|r| cyclic(p, r)));
            let alg = GroupAlgebra::new(&v).unwrap();
            let top: usize = exps.iter().map(|&r| (p as usize).pow(r) - 1).sum();
            for (d, dim) in alg.s_graded_dims(top + 2).into_iter().enumerate() {
                ensure(dim == truncated_poly_count(p, &exps, d), || format!("{v} d={d}: {dim}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} dimensions"))
}

fn c2_exponential() -> Outcome {
    let mut checked = 0;
    for p in [2u32, 3] {
        for ru in 1..=3 {
            for rv in ru..=3 {
                let (u, v) = (cyclic(p, ru), cyclic(p, rv));
                let su = GroupAlgebra::new(&u).unwrap().s_graded_dims(10);
                let sv = GroupAlgebra::new(&v).unwrap().s_graded_dims(10);
                let suv = GroupAlgebra::new(&u.direct_sum(&v).unwrap()).unwrap().s_graded_dims(10);
                for n in 0..=10 {
                    let conv: usize = (0..=n).map(|i| su[i] * sv[n - i]).sum();
                    ensure(suv[n] == conv, || format!("{u} + {v}, n={n}: {} vs {conv}", suv[n]))?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} convolutions"))
}

fn c3_pol_stationarity() -> Outcome {
    let mut checked = 0;
    for (p, exps) in [(2, vec![2]), (2, vec![1, 3]), (3, vec![2])] {
        let v = sum(&exps.iter().map(|&r| cyclic(p, r)).collect::<Vec<_>>());
        let top = *exps.iter().max().unwrap();
        for d in 0..=6 {
            ensure(pol_space(&v, d).unwrap().subspace().same_as(pol_space_by_differences(&v, d).unwrap().subspace()), || {
                format!("{v} d={d}: the two constructions of Pol_d differ")
            })?;
            for i in 1..=top + 1 {
                if (p as usize).pow(i) <= d {
                    continue;
                }
                let s = pol_stationarity(&v, d, i).unwrap();
                ensure(s.equal, || format!("{v} d={d} i={i}: {s:?}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (V, d, i) cells"))
}

fn c4_koszul_grid() -> Outcome {
    let mut cells = 0;
    for p in [2, 3] {
        for exps in [vec![1], vec![2], vec![1, 2], vec![2, 2]] {
            let v = sum(&exps.iter().map(|&r| cyclic(p, r)).collect::<Vec<_>>());
            let rep = verify_vanishing(&v, 12).unwrap();
            ensure(rep.violations.is_empty(), || format!("{v}: {:?}", rep.violations))?;
            for n in 1..=12 {
                ensure(rep.table.get(n, 0) == 0, || format!("{v}: H_0({n}) != 0"))?;
            }
            cells += rep.table.entries.len();
        }
        for t in 1..=2 {
            let q = (p as usize).pow(t);
            let table = homology_table(&cyclic(p, t), q).unwrap();
            ensure(table.get(q, 1) == 1, || format!("H_1({q})(Z/{q}) = {}", table.get(q, 1)))?;
        }
    }
    Ok(format!("{cells} (n, i) cells"))
}

fn c5_classical_koszul() -> Outcome {
    let mut checked = 0;
    for p in [2, 3] {
        let field = Fp::new(p).unwrap();
        for m in 1..=4 {
            for n in 1..=4 {
                let (k, dual) = classical_koszul_and_dual(field, m, n).unwrap();
                let h = k.homology_dims();
                let c = dual.cohomology_dims();
                ensure(h.iter().all(|&x| x == 0), || format!("p={p} dim={m} n={n}: H = {h:?}"))?;
                ensure(c.iter().all(|&x| x == 0), || format!("p={p} dim={m} n={n}: dual H = {c:?}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} complexes and duals"))
}

fn c6_q_graded_pieces() -> Outcome {
    let mut checked = 0;
    for (gens, k) in [("Z/2", 3), ("Z/4", 2)] {
        let sk = skel(2, &[gens], k);
        for a in sk.objects().iter().filter(|a| !a.is_zero()) {
            let p: FunctorRef = Arc::new(fhlab::functor::Linearization::new(sk.clone(), a.clone()).unwrap());
            for b in sk.objects() {
                // Hom(a, b) as an abelian group; q_d P_a(b) = F_p[Hom(a, b)] / I^{d+1}
                let moduli = sk.hom_moduli(a, b);
                let exps: Vec<u32> = moduli.iter().filter(|&&m| m > 1).map(|&m| m.trailing_zeros()).collect();
                let hom = if exps.is_empty() {
                    AbGroup::trivial(2).unwrap()
                } else {
                    sum(&exps.iter().map(|&r| cyclic(2, r)).collect::<Vec<_>>())
                };
                let alg = GroupAlgebra::new(&hom).unwrap();
                let mut prev_q = 0;
                for d in 0..=3 {
                    let graded = TruncatedPoly::graded(sk.clone(), a.clone(), d).unwrap().dim(b).unwrap();
                    let q = alg.q_dim(d);
                    ensure(q - prev_q == graded, || format!("{gens} K={k} a={a} b={b} d={d}: {} vs {graded}", q - prev_q))?;
                    ensure(graded == truncated_poly_count(2, &exps, d), || format!("monomial count at a={a} b={b} d={d}"))?;
                    // the cross-effect construction wherever P_a((d+1)·b) stays small
                    if p.dim(&b.scale(d + 1)).is_ok_and(|n| n <= 4096) {
                        let qd = q_trunc(p.clone(), d).unwrap().dim(b).unwrap();
                        ensure(qd == q, || format!("q_{d} P_{a}({b}) = {qd}, group ring gives {q}"))?;
                    }
                    prev_q = q;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} (a, b, d) cells"))
}

/// Degree-≤2 functors on gens {Z/2}, K=3.
const POOL: [&str; 13] = [
    "k",
    "I",
    "A(V2)",
    "k + I",
    "S^2 . I",
    "L^2 . I",
    "G^2 . I",
    "I * I",
    "Q^2 . Hom(V1,-)",
    "Q^1 . Hom(V2,-)",
    "S^2 . Hom(V1,-)",
    "D(S^2 . I)",
    "I + S^2 . I",
];

fn sampled_pairs() -> Vec<(&'static str, &'static str)> {
    let mut all: Vec<(&str, &str)> = POOL.iter().flat_map(|&f| POOL.iter().map(move |&g| (f, g))).collect();
    all.shuffle(&mut ChaCha8Rng::seed_from_u64(7));
    all.truncate(20);
    all
}

fn c7_comparison() -> Outcome {
    let sk = skel(2, &["Z/2"], 3);
    for e in POOL {
        let f = parse_functor(&sk, e).unwrap();
        ensure(poly_degree(f.as_ref(), 2).unwrap().degree.is_some(), || format!("{e} has degree > 2"))?;
    }
    let pairs = sampled_pairs();
    let mut iso1 = 0;
    for (fe, ge) in &pairs {
        let f = parse_functor(&sk, fe).unwrap();
        let g = parse_functor(&sk, ge).unwrap();
        let m = compare(f, g, 2, 2).unwrap();
        let d = &m.degrees;
        ensure(d.iter().all(|x| x.lift_independent), || format!("({fe}, {ge}): lifts disagree"))?;
        ensure(d[0].injective && d[0].surjective, || format!("({fe}, {ge}) i=0: {:?}", d[0]))?;
        ensure(d[1].injective && d[1].surjective, || format!("({fe}, {ge}) i=1: {:?}", d[1]))?;
        ensure(d[2].injective, || format!("({fe}, {ge}) i=2: {:?}", d[2]))?;
        iso1 += usize::from(d[1].full_dim > 0);
    }
    Ok(format!("{} pairs, {iso1} with Ext^1 != 0", pairs.len()))
}

fn c8_excl() -> Outcome {
    let sk3 = skel(2, &["Z/2"], 3);
    let seq = FrobeniusSequence::new(&sk3).unwrap();
    ensure(seq.is_natural().unwrap() && seq.is_exact().unwrap(), || "sequence not exact".into())?;
    let r3 = excl_class_check(&sk3).unwrap();
    let r2 = excl_class_check(&skel(2, &["Z/2"], 2)).unwrap();
    ensure(r3.class_is_cocycle && r3.lift_independent, || format!("{r3:?}"))?;
    ensure(r3.class_nonzero, || "class vanishes at K=3".into())?;
    ensure(r3.poly1_vanishes, || format!("Ext^2_poly(1)(I, I) = {}", r3.ext_poly1[2]))?;
    ensure(r3.in_image_from_poly2 == Some(true), || "class not in the image from poly(2)".into())?;
    ensure(r3.split_class_zero, || "split extension has a nonzero class".into())?;
    Ok(format!("dim Ext^2_full(I, I): K=2 -> {}, K=3 -> {}", r2.ext_full[2], r3.ext_full[2]))
}

fn c9_dold_puppe() -> Outcome {
    let sk = skel(2, &["Z/2"], 4);
    let samples = [
        (1, vec!["I", "k + I", "A(V2)", "P(V1)", "Pbar(V1)", "S^2 . I"]),
        (2, vec!["I", "S^2 . I", "I * I", "L^2 . I + k", "P(V1)"]),
    ];
    let mut cells = 0;
    for (n, fs) in samples {
        let objs = default_objects(&sk, n);
        for e in fs {
            let f = parse_functor(&sk, e).unwrap();
            let r = dold_report(f.clone(), n, 2, &objs).unwrap();
            ensure(r.h0_is_qn, || format!("n={n} {e}: H_0 != q_n"))?;
            ensure(r.dual_h0_is_pn, || format!("n={n} {e}: H^0 != p_n"))?;
            ensure(r.simplicial_identities && r.retractions, || format!("n={n} {e}: face or retraction identities"))?;
            let low = poly_degree(f.as_ref(), n).unwrap().degree.is_some();
            ensure(r.higher_terms_vanish == low, || format!("n={n} {e}: degree <= n is {low}, D_>0 = 0 is {}", r.higher_terms_vanish))?;
            for o in &r.objects {
                let want = cross_effect_dim(f.as_ref(), &o.object, n + 1);
                ensure(o.term_dims[1] as i64 == want, || format!("n={n} {e} at {}: dim D_1 = {}, expected {want}", o.object, o.term_dims[1]))?;
                cells += 1;
            }
        }
        // H_0 of the linearization against the group-ring quotient
        let c = build_dcomplex(parse_functor(&sk, "P(V1)").unwrap(), n, 1, &objs).unwrap();
        for x in &c.at {
            let want = TruncatedPoly::quotient(sk.clone(), Object(vec![1]), n).unwrap().dim(&x.object).unwrap();
            ensure(x.homology_dims()[0] == want, || format!("H_0 D^({n}) P(V1) at {}", x.object))?;
        }
    }
    Ok(format!("{cells} (n, F, a) cells"))
}

fn c10_derived_pd() -> Outcome {
    let sk = skel(2, &["Z/2"], 3);
    let mut fs: Vec<&str> = sampled_pairs().into_iter().flat_map(|(f, g)| [f, g]).collect();
    fs.sort_unstable();
    fs.dedup();
    for e in &fs {
        let f = parse_functor(&sk, e).unwrap();
        let r = derived_pd(f, 2, 1).unwrap();
        ensure(r.r0_matches, || format!("{e}: R^0 p_2 != p_2"))?;
        ensure(r.dims[1].iter().all(|&x| x == 0), || format!("{e}: R^1 p_2 = {:?}", r.dims[1]))?;
    }
    Ok(format!("{} functors", fs.len()))
}

fn c11_stationarity() -> Outcome {
    for p in [2, 3] {
        for r in 1..=4 {
            let i = cyclic(p, r).stationarity_index().unwrap();
            ensure(i == Some(r), || format!("index(Z/{p}^{r}) = {i:?}"))?;
        }
    }
    let v = sum(&[cyclic(2, 1), cyclic(2, 3)]);
    ensure(v.stationarity_index().unwrap() == Some(3), || "index(Z/2 + Z/8) != 3".into())?;
    // rank of Ext^1(V/p^m, Z/p) → Ext^1(V, Z/p): the summands Z/p^r with r <= m
    for exps in [vec![1], vec![3], vec![1, 3], vec![2, 2, 4]] {
        let v = sum(&exps.iter().map(|&r| cyclic(2, r)).collect::<Vec<_>>());
        let top = *exps.iter().max().unwrap();
        let mut reached = None;
        for m in 0..=top + 2 {
            let rank = v.socle_map(m).unwrap().rank();
            let want = exps.iter().filter(|&&r| r <= m).count();
            ensure(rank == want, || format!("{v} m={m}: rank {rank}, expected {want}"))?;
            if rank == v.ext1_zp_dim() && reached.is_none() {
                reached = Some(m);
            }
        }
        ensure(reached == Some(top), || format!("{v}: full rank first at {reached:?}"))?;
    }
    Ok("indices and rank stabilization".into())
}

fn c12_pirashvili() -> Outcome {
    let sk = skel(2, &["Z/2"], 4);
    let reduced = ["I", "A(V2)", "S^2 . I"];
    let mut checked = 0;
    for a in ["V1", "V2"] {
        let add = parse_functor(&sk, &format!("A({a})")).unwrap();
        for (i, b) in reduced.iter().enumerate() {
            for c in &reduced[i..] {
                if *c == "S^2 . I" && *b == "S^2 . I" {
                    continue;
                }
                let t = parse_functor(&sk, &format!("{b} * {c}")).unwrap();
                for (f, g) in [(&add, &t), (&t, &add)] {
                    let e = ext_low(f.clone(), g.clone()).unwrap();
                    ensure(e == [0, 0], || format!("Hom/Ext^1({}, {}) = {e:?}", f.name(), g.name()))?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} ordered pairs"))
}

/// Writes past the test harness's output capture, so the lines show up in a
/// plain `cargo test`.
fn report(line: String) {
    let _ = writeln!(std::io::stdout(), "{line}");
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 12] = [
        ("S-dimension law", c1_s_dimension),
        ("exponential law", c2_exponential),
        ("Pol stationarity", c3_pol_stationarity),
        ("Koszul vanishing grid", c4_koszul_grid),
        ("classical Koszul exactness", c5_classical_koszul),
        ("graded pieces of q_d", c6_q_graded_pieces),
        ("comparison iso/iso/mono", c7_comparison),
        ("Frobenius extension class", c8_excl),
        ("Dold-Puppe properties", c9_dold_puppe),
        ("derived p_d", c10_derived_pd),
        ("stationarity index", c11_stationarity),
        ("additive vs tensor vanishing", c12_pirashvili),
    ];
    // ACCEPTANCE_ONLY=3,7 runs a subset
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let selected = |i: usize| only.as_ref().is_none_or(|o| o.contains(&(i + 1)));
    let results: Vec<Option<(Outcome, f64)>> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .enumerate()
            .map(|(i, (_, run))| {
                let on = selected(i);
                s.spawn(move || {
                    if !on {
                        return None;
                    }
                    let t = Instant::now();
                    let out = std::panic::catch_unwind(run).unwrap_or_else(|e| {
                        Err(e.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into()))
                    });
                    Some((out, t.elapsed().as_secs_f64()))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut failed = Vec::new();
    for (i, ((name, _), res)) in criteria.iter().zip(&results).enumerate() {
        let Some((out, secs)) = res else { continue };
        match out {
            Ok(msg) => report(format!("criterion {:>2} PASS  {name}: {msg} ({secs:.1}s)", i + 1)),
            Err(msg) => {
                report(format!("criterion {:>2} FAIL  {name}: {msg} ({secs:.1}s)", i + 1));
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

