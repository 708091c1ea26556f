use std::sync::Arc;

use anyhow::{bail, Result};
use fhlab::abgrp::AbGroup;
use fhlab::addcat::{Skeleton, SkeletonSpec};
use fhlab::doldpuppe::{default_objects, dold_report};
use fhlab::functor::{parse_functor, FrobeniusSequence, Functor, FunctorRef};
use fhlab::grpalg::{pol_space, pol_stationarity, GroupAlgebra, MonomialModel};
use fhlab::homalg::{compare, excl_class_check, ext, Mode};
use fhlab::koszul::verify_vanishing;
use fhlab::polyfilt::{poly_degree, truncate};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{ExtMode, SkeletonArgs, Task};
use crate::report::{Assertion, Guard, Outcome, SkeletonInfo};
use crate::verify;

pub fn skeleton(args: &SkeletonArgs) -> Result<Arc<Skeleton>> {
    let gens = args.gens.iter().map(|g| AbGroup::parse(args.p, g)).collect::<fhlab::Result<Vec<_>>>()?;
    Ok(Arc::new(Skeleton::new(SkeletonSpec::new(args.p, gens, args.k))?))
}

fn functor(sk: &Arc<Skeleton>, expr: &str) -> Result<FunctorRef> {
    Ok(parse_functor(sk, expr)?)
}

fn plain(result: serde_json::Value, assertions: Vec<Assertion>) -> Outcome {
    Outcome { skeleton: None, guard: Guard::ok(), assertions, result }
}

fn on(sk: &Skeleton, guard: Guard, result: serde_json::Value, assertions: Vec<Assertion>) -> Outcome {
    Outcome { skeleton: Some(SkeletonInfo::of(sk)), guard, assertions, result }
}

pub fn execute(task: &Task, seed: u64) -> Result<Outcome> {
    match task {
        Task::Sdim { p, group, dmax } => {
            let v = AbGroup::parse(*p, group)?;
            let dims = GroupAlgebra::new(&v)?.s_graded_dims(*dmax);
            let model = MonomialModel::from_group(&v)?;
            let monomial: Vec<usize> = (0..=*dmax).map(|d| model.s_dim(d)).collect();
            let agree = dims == monomial;
            Ok(plain(
                json!({ "group": v.to_string(), "dims": dims, "monomial_dims": monomial }),
                vec![Assertion::new("filtration agrees with the truncated polynomial model", agree)],
            ))
        }
        Task::Pol { p, group, d, i } => {
            let v = AbGroup::parse(*p, group)?;
            let levels: Vec<u32> = if i.is_empty() {
                (1..=v.torsion_exponent() + 1).filter(|&i| (*p as u64).pow(i) > *d as u64).collect()
            } else {
                i.clone()
            };
            let dim = pol_space(&v, *d)?.dim();
            let mut rows = Vec::new();
            let mut assertions = Vec::new();
            for &lvl in &levels {
                let s = pol_stationarity(&v, *d, lvl)?;
                assertions.push(Assertion::with(
                    format!("Pol_{d}(V/p^{lvl}) = Pol_{d}(V)"),
                    s.equal,
                    format!("dims {} and {}", s.quotient_dim, s.dim),
                ));
                rows.push(s);
            }
            Ok(plain(json!({ "group": v.to_string(), "d": d, "dim": dim, "stationarity": rows }), assertions))
        }
        Task::Koszul { p, group, nmax } => {
            let v = AbGroup::parse(*p, group)?;
            let rep = verify_vanishing(&v, *nmax)?;
            let a = Assertion::with(
                format!("H_i(n) = 0 for n > {} i", rep.bound),
                rep.violations.is_empty(),
                format!("{} violations", rep.violations.len()),
            );
            Ok(plain(
                json!({ "group": v.to_string(), "bound": rep.bound, "nonzero": rep.table.nonzero(), "table": rep.table, "violations": rep.violations }),
                vec![a],
            ))
        }
        Task::Degree { skeleton: sa, functor: e, dmax } => {
            let sk = skeleton(sa)?;
            let f = functor(&sk, e)?;
            let rep = poly_degree(f.as_ref(), *dmax)?;
            Ok(on(&sk, Guard::ok(), json!({ "functor": f.name(), "report": rep }), Vec::new()))
        }
        Task::Trunc { skeleton: sa, functor: e, d } => {
            let sk = skeleton(sa)?;
            let f = functor(&sk, e)?;
            let t = truncate(f.clone(), *d)?;
            let mut rows = Vec::new();
            for b in sk.objects() {
                rows.push(json!({
                    "object": b.to_string(),
                    "dim": f.dim(b)?,
                    "q": t.quotient.dim(b)?,
                    "p": t.sub.dim(b)?,
                }));
            }
            let natural = t.projection.is_natural()? && t.inclusion.is_natural()?;
            let guard = Guard::beyond(t.virtual_objects.iter().map(|o| o.scale(d + 1).to_string()).collect());
            Ok(on(
                &sk,
                guard,
                json!({ "functor": f.name(), "d": d, "objects": rows }),
                vec![Assertion::new("projection and inclusion are natural", natural)],
            ))
        }
        Task::Ext { skeleton: sa, source, target, mode, d, imax } => {
            let sk = skeleton(sa)?;
            let (f, g) = (functor(&sk, source)?, functor(&sk, target)?);
            let m = match mode {
                ExtMode::Full => Mode::Full,
                ExtMode::Poly => Mode::Poly(*d),
            };
            let t = ext(f, g, m, *imax)?;
            let a = Assertion::new("Ext^0 = Hom from the naturality system", t.hom_check);
            Ok(on(&sk, Guard::ok(), json!(t), vec![a]))
        }
        Task::Compare { skeleton: sa, source, target, d, imax, sweep } => {
            let sk = skeleton(sa)?;
            let m = compare(functor(&sk, source)?, functor(&sk, target)?, *d, *imax)?;
            let mut assertions = vec![Assertion::new("a second lift induces the same maps", m.degrees.iter().all(|x| x.lift_independent))];
            for x in &m.degrees {
                let (want, holds) = match x.i {
                    0 | 1 => ("iso", x.injective && x.surjective),
                    2 => ("mono", x.injective),
                    _ => continue,
                };
                assertions.push(Assertion::with(format!("i={} {want}", x.i), holds, format!("rank {} of {} -> {}", x.rank, x.poly_dim, x.full_dim)));
            }
            let sweep_rows = match sweep {
                Some(kmax) => (d + 1..=*kmax)
                    .into_par_iter()
                    .map(|k| {
                        let sk = skeleton(&SkeletonArgs { k, ..sa.clone() })?;
                        let m = compare(functor(&sk, source)?, functor(&sk, target)?, *d, *imax)?;
                        let full: Vec<usize> = m.degrees.iter().map(|x| x.full_dim).collect();
                        let poly: Vec<usize> = m.degrees.iter().map(|x| x.poly_dim).collect();
                        Ok(json!({ "k": k, "full": full, "poly": poly }))
                    })
                    .collect::<Result<Vec<_>>>()?,
                None => Vec::new(),
            };
            Ok(on(&sk, Guard::ok(), json!({ "comparison": m, "sweep": sweep_rows }), assertions))
        }
        Task::Excl { skeleton: sa } => {
            let sk = skeleton(sa)?;
            let seq = FrobeniusSequence::new(&sk)?;
            let exact = seq.is_natural()? && seq.is_exact()?;
            let r = excl_class_check(&sk)?;
            let mut assertions = vec![
                Assertion::new("0 -> I -> S^p -> G^p -> I -> 0 is exact", exact),
                Assertion::new("the class is a cocycle", r.class_is_cocycle),
                Assertion::new("the class is nonzero in the full truncated category", r.class_nonzero),
                Assertion::with("Ext^2_poly(1)(I, I) = 0", r.poly1_vanishes, format!("{:?}", r.ext_poly1)),
                Assertion::new("the split extension has class zero", r.split_class_zero),
                Assertion::new("a second lift gives the same class", r.lift_independent),
            ];
            if let Some(b) = r.in_image_from_poly2 {
                assertions.push(Assertion::new("the class comes from Ext^2_poly(2)", b));
            }
            Ok(on(&sk, Guard::ok(), json!(r), assertions))
        }
        Task::Dold { skeleton: sa, functor: e, n, imax } => {
            let sk = skeleton(sa)?;
            let f = functor(&sk, e)?;
            let objs = default_objects(&sk, *n);
            if objs.is_empty() {
                bail!(fhlab::Error::Guard(format!("no nonzero object a with {}·a in the skeleton", n + 1)));
            }
            let r = dold_report(f.clone(), *n, *imax, &objs)?;
            let mut assertions = vec![
                Assertion::new("H_0 = q_n F", r.h0_is_qn),
                Assertion::new("H^0 of the dual = p_n F", r.dual_h0_is_pn),
                Assertion::new("simplicial identities", r.simplicial_identities),
                Assertion::new("retractions", r.retractions),
            ];
            if *n < sk.k() {
                let low = poly_degree(f.as_ref(), *n)?.degree.is_some();
                if low {
                    assertions.push(Assertion::new("D_>0 = 0 for a functor of degree <= n", r.higher_terms_vanish));
                }
            }
            let guard = Guard::beyond(r.objects.iter().filter(|o| o.beyond_skeleton).map(|o| o.object.to_string()).collect());
            Ok(on(&sk, guard, json!(r), assertions))
        }
        Task::VerifyAll { only } => verify::run(only, seed),
    }
}
