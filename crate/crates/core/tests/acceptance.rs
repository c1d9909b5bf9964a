use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use skewfep::fep::{self, EmbeddingProblem, FiniteGroup, GroupHom, SolutionKind, SolutionMap};
use skewfep::galois::{
    self, build_galois_extension, check_product_conditions, restriction_map, tensor_check, twisted_corpus,
    witness_center, witness_commutative, witness_same_base, GaloisError, GaloisExtension, TwistedExtension,
};
use skewfep::linalg::{same_span, Q};
use skewfep::numfield::{automorphisms, embeddings_into, FieldElement, FieldMorphism, NumberField};
use skewfep::ore::{
    center_bounded, detect_recurrence, is_central, right_divide, series_expand, OreError, Ring, SkewFraction,
    SkewLaurent, SkewPoly, SkewRing,
};
use skewfep::qalg::{inner_order, scalar_extension, AlgebraAutomorphism, QuatElement, QuaternionAlgebra};

const HB: u64 = 20;

struct Outcome {
    pass: bool,
    note: String,
}

fn outcome(pass: bool, note: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        note: note.into(),
    }
}

fn run(n: usize, title: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let res = catch_unwind(AssertUnwindSafe(f));
    let took = start.elapsed();
    let (pass, note) = match res {
        Ok(o) => {
            let slow = took > budget;
            let note = if slow {
                format!("{}; over budget {:?}", o.note, budget)
            } else {
                o.note
            };
            (o.pass && !slow, note)
        }
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        }
    };
    println!(
        "criterion {n}: {} [{:.2}s] {title}: {note}",
        if pass { "PASS" } else { "FAIL" },
        took.as_secs_f64()
    );
    pass
}

fn over_q(f: &skewfep::numfield::Field) -> FieldMorphism {
    FieldMorphism::from_rationals(f)
}

fn q8_problem_and_field() -> (EmbeddingProblem, Arc<GaloisExtension>, FieldMorphism) {
    let f = NumberField::from_ints(&[36, 0, -144, 0, 108, 0, -24, 0, 1], "Q8 field").unwrap();
    let big = Arc::new(GaloisExtension::commutative(&f, &over_q(&f)).unwrap());
    let q2 = NumberField::quadratic(2).unwrap();
    let small = Arc::new(GaloisExtension::commutative(&q2, &over_q(&q2)).unwrap());
    let q8 = FiniteGroup::quaternion();
    let i = q8.index_of("i").unwrap();
    let j = q8.index_of("j").unwrap();
    let p = EmbeddingProblem::from_generators(&q8, &small, &[i, j], &[0, 1]).unwrap();
    let e = embeddings_into(&q2, &f).into_iter().next().unwrap();
    (p, big, e)
}

fn criterion_1() -> Outcome {
    let r = fep::q8_scenario(HB).unwrap();
    let mut notes = vec![
        format!("split={}", r.split),
        format!("Gal order {} cyclic={}", r.quartic_group_order, r.quartic_cyclic),
        format!("level {}", if r.level.is_infinite() { "infinite" } else { "not infinite" }),
        format!("weak solution {}", if r.weak_solution.pass() { "verified" } else { "rejected" }),
        format!(
            "fiber problem order {} split={} kernel order {} cyclic={}",
            r.fiber_order, r.fiber_split, r.fiber_kernel_order, r.fiber_kernel_cyclic
        ),
    ];
    // |G′| = |ker α| · |Gal(L′/H)| = 4 · 4
    let order_ok = r.fiber_order == 16;
    if order_ok {
        notes.push("|G′| = |ker α|·|Gal(L′/H)| = 16".into());
    }
    outcome(r.pass() && order_ok && r.fiber_kernel_cyclic, notes.join(", "))
}

fn criterion_2() -> Outcome {
    let x = galois::inner_twist_counterexample().unwrap();
    let r = check_product_conditions(&x).unwrap();
    let ok = r.ord_sigma == 2
        && r.ord_tau == 2
        && x.sigma_tilde().is_identity()
        && !x.tau_tilde().is_identity()
        && r.inner_order_sigma == 1
        && !r.star
        && !r.eq_produit
        && r.consistent();
    outcome(
        ok,
        format!(
            "ord σ={} ord τ={} inner order σ={} star={} eq_produit={}",
            r.ord_sigma, r.ord_tau, r.inner_order_sigma, r.star, r.eq_produit
        ),
    )
}

fn criterion_3() -> Outcome {
    let h = QuaternionAlgebra::hamilton();
    let cases: Vec<(&str, skewfep::numfield::Field, bool, usize)> = vec![
        ("Q(i)", NumberField::quadratic(-1).unwrap(), false, 0),
        ("Q(sqrt-2)", NumberField::quadratic(-2).unwrap(), false, 0),
        ("Q(sqrt2)", NumberField::quadratic(2).unwrap(), true, 2),
        ("Q(sqrt3)", NumberField::quadratic(3).unwrap(), true, 2),
        ("Q(sqrt(2+sqrt2))", fep::quartic_field(), true, 4),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, l, aniso, order) in cases {
        let v = scalar_extension(&h, &l, &over_q(&l), HB).verdict;
        let verdict_ok = if aniso { v.is_certified() } else { v.is_isotropic() };
        let built = build_galois_extension(&h, &l, &over_q(&l), HB);
        let build_ok = match (&built, aniso) {
            (Ok(e), true) => e.order() == order && e.artin_check() && e.is_outer(),
            (Err(GaloisError::NotAnisotropic(_)), false) => true,
            _ => false,
        };
        ok &= verdict_ok && build_ok;
        notes.push(format!(
            "{name}: {} {}",
            v.kind(),
            built.map(|e| format!("order {}", e.order())).unwrap_or_else(|_| "refused".into())
        ));
    }
    outcome(ok, notes.join(", "))
}

fn conj_ring() -> Ring {
    let f = NumberField::quadratic(2).unwrap();
    let h = QuaternionAlgebra::from_ints(&f, -1, -1).unwrap();
    let s = automorphisms(&f).into_iter().find(|m| !m.is_identity()).unwrap();
    SkewRing::new(AlgebraAutomorphism::from_center(&h, &s).unwrap()).unwrap()
}

fn criterion_4() -> Outcome {
    let r = conj_ring();
    let rep = center_bounded(&r, 6);
    let one = QuatElement::one(&r.algebra().clone());
    let expected: Vec<Vec<Q>> = [0, 2, 4, 6]
        .iter()
        .map(|&k| SkewPoly::monomial(&r, one.clone(), k).to_q_vec(6))
        .collect();
    let got: Vec<Vec<Q>> = rep.basis.iter().map(|p| p.to_q_vec(6)).collect();
    let span_ok = got.len() == 4 && same_span(&got, &expected);
    let alg = r.algebra().clone();
    let t2 = SkewPoly::monomial(&r, one.clone(), 2);
    let sqrt2 = SkewPoly::constant(&r, QuatElement::scalar(&alg, FieldElement::gen(alg.base())));
    let it = SkewPoly::monomial(&r, QuatElement::i(&alg), 1);
    let flags = (is_central(&t2), is_central(&sqrt2), is_central(&it));
    outcome(
        span_ok && flags == (true, false, false),
        format!("center basis size {} span ok={span_ok}, central(t², √2, i·t)={flags:?}", got.len()),
    )
}

fn random_elem(rng: &mut ChaCha8Rng, r: &Ring) -> QuatElement {
    let alg = r.algebra();
    let v: Vec<Q> = (0..alg.q_dim())
        .map(|_| if rng.gen_bool(0.5) { Q::from_integer(0.into()) } else { Q::from_integer(rng.gen_range(-2i64..=2).into()) })
        .collect();
    QuatElement::from_q_vec(alg, &v)
}

fn random_poly(rng: &mut ChaCha8Rng, r: &Ring, max_deg: usize) -> SkewPoly {
    let d = rng.gen_range(0..=max_deg);
    SkewPoly::new(r, (0..=d).map(|_| random_elem(rng, r)).collect())
}

fn random_nonzero(rng: &mut ChaCha8Rng, r: &Ring, max_deg: usize) -> SkewPoly {
    loop {
        let p = random_poly(rng, r, max_deg);
        if !p.is_zero() {
            return p;
        }
    }
}

fn criterion_5() -> Outcome {
    const CASES: usize = 1000;
    let r = conj_ring();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let t = SkewPoly::t(&r);
    let mut failures = [0usize; 4];
    for _ in 0..CASES {
        let (a, b, c) = (random_poly(&mut rng, &r, 2), random_poly(&mut rng, &r, 2), random_poly(&mut rng, &r, 2));
        let x = SkewPoly::constant(&r, random_elem(&mut rng, &r));
        let assoc = &(&a * &b) * &c == &a * &(&b * &c);
        let dist = &a * &(&b + &c) == &(&a * &b) + &(&a * &c) && &(&a + &b) * &c == &(&a * &c) + &(&b * &c);
        let twist = &t * &x == &SkewPoly::constant(&r, r.twist().apply(&x.coeff(0))) * &t;
        if !(assoc && dist && twist) {
            failures[0] += 1;
        }
    }
    for _ in 0..CASES {
        let a = random_poly(&mut rng, &r, 3);
        let b = random_nonzero(&mut rng, &r, 2);
        let (q, rem) = right_divide(&a, &b).unwrap();
        let small = rem.degree().is_none_or(|d| Some(d) < b.degree());
        if &(&q * &b) + &rem != a || !small {
            failures[1] += 1;
        }
    }
    for _ in 0..CASES {
        let a = random_poly(&mut rng, &r, 1);
        let b = random_nonzero(&mut rng, &r, 1);
        let c = random_nonzero(&mut rng, &r, 1);
        let e = random_nonzero(&mut rng, &r, 1);
        let f = SkewFraction::new(a.clone(), b.clone()).unwrap();
        let g = SkewFraction::new(&a * &c, &b * &c).unwrap();
        let h = SkewFraction::new(&(&a * &c) * &e, &(&b * &c) * &e).unwrap();
        if !(f.equals(&g) && g.equals(&h) && f.equals(&h)) {
            failures[2] += 1;
        }
    }
    for _ in 0..CASES {
        let num = random_poly(&mut rng, &r, 1);
        let den = random_nonzero(&mut rng, &r, 1);
        let f = SkewFraction::new(num.clone(), den.clone()).unwrap();
        let s = series_expand(&f, 20);
        let back = s.mul(&SkewLaurent::from_poly(&den, 20));
        if !back.agrees_with(&SkewLaurent::from_poly(&num, 20)) {
            failures[3] += 1;
        }
    }
    outcome(
        failures.iter().all(|&n| n == 0),
        format!("{CASES} cases each; failures axioms/division/transitivity/series = {failures:?}"),
    )
}

fn criterion_6() -> Outcome {
    let h = QuaternionAlgebra::hamilton();
    let r1 = SkewRing::untwisted(&h);
    let one_minus_t = SkewPoly::new(&r1, vec![QuatElement::one(&h), -&QuatElement::one(&h)]);
    let s1 = series_expand(&SkewFraction::new(SkewPoly::one(&r1), one_minus_t).unwrap(), 30);
    let c1 = detect_recurrence(&s1, 3).unwrap();
    let r2 = conj_ring();
    let alg = r2.algebra().clone();
    let den = SkewPoly::new(&r2, vec![QuatElement::one(&alg), -&QuatElement::i(&alg)]);
    let s2 = series_expand(&SkewFraction::new(SkewPoly::one(&r2), den).unwrap(), 30);
    let c2 = detect_recurrence(&s2, 3).unwrap();
    let squares: Vec<QuatElement> = (0..20i64)
        .map(|n| {
            let s = (n as f64).sqrt() as i64;
            QuatElement::from_ints(&h, [(s * s == n) as i64, 0, 0, 0])
        })
        .collect();
    let s3 = SkewLaurent::new(&r1, 0, squares);
    let c3 = detect_recurrence(&s3, 3).unwrap();
    let ok1 = c1.as_ref().is_some_and(|c| c.order == 1 && c.verify(&s1));
    let ok2 = c2.as_ref().is_some_and(|c| c.order == 1 && c.verify(&s2));
    let short = matches!(detect_recurrence(&s3, 10), Err(OreError::InsufficientPrecision { .. }));
    outcome(
        ok1 && ok2 && c3.is_none() && short,
        format!(
            "(1−t)⁻¹ order {:?}, (1−i·t)⁻¹ order {:?}, squares {}",
            c1.map(|c| c.order),
            c2.map(|c| c.order),
            if c3.is_none() { "none" } else { "found" }
        ),
    )
}

fn criterion_7() -> Outcome {
    let h = QuaternionAlgebra::hamilton();
    let q2 = NumberField::quadratic(2).unwrap();
    let small = Arc::new(GaloisExtension::commutative(&q2, &over_q(&q2)).unwrap());
    let mut cases: Vec<(&str, EmbeddingProblem, SolutionMap)> = Vec::new();
    let z2 = small.table().clone();
    let p2 = EmbeddingProblem::new(&z2, &small, GroupHom::identity(&z2)).unwrap();
    let s2 = SolutionMap {
        ext_big: small.clone(),
        beta: GroupHom::identity(&z2),
        l_to_f: FieldMorphism::identity(&q2),
        kind: SolutionKind::Full,
    };
    cases.push(("Z/2", p2, s2));
    let z4 = FiniteGroup::cyclic(4);
    let p4 = EmbeddingProblem::from_generators(&z4, &small, &[1], &[1]).unwrap();
    let f = fep::quartic_field();
    let big = Arc::new(GaloisExtension::commutative(&f, &over_q(&f)).unwrap());
    let e = embeddings_into(&q2, &f).into_iter().next().unwrap();
    let s4 = fep::find_solutions(&p4, &big, &e, SolutionKind::Full).unwrap().remove(0);
    cases.push(("Z/4", p4, s4));
    let (p8, big8, e8) = q8_problem_and_field();
    let s8 = fep::find_solutions(&p8, &big8, &e8, SolutionKind::Full).unwrap().remove(0);
    cases.push(("Q8", p8, s8));
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, p, s) in &cases {
        let rt = fep::round_trip_up_down(p, Some(s), &h, HB).unwrap();
        let full = rt.transported.as_ref().is_some_and(|r| r.kind == SolutionKind::Full && r.pass());
        let up = fep::transport_up(p, &h, HB).unwrap();
        let su = fep::sol_up(s, &h, HB).unwrap();
        let back = fep::round_trip_down_up(&up, Some(&su), HB).unwrap();
        ok &= rt.pass() && full && back.pass();
        notes.push(format!("{name}: α {} β {} lifted full={full}", rt.problem, rt.solution == Some(true)));
    }
    outcome(ok, notes.join(", "))
}

fn criterion_8() -> Outcome {
    let h = QuaternionAlgebra::hamilton();
    let q2 = NumberField::quadratic(2).unwrap();
    let f = fep::quartic_field();
    let l_to_f = embeddings_into(&q2, &f).into_iter().next().unwrap();
    let big = build_galois_extension(&h, &f, &over_q(&f), HB).unwrap();
    let small = build_galois_extension(&h, &q2, &over_q(&q2), HB).unwrap();
    let center = small.center_extension();
    let cf = GaloisExtension::commutative(&f, &over_q(&f)).unwrap();
    let res_ok = [
        witness_commutative(&cf, &center, &l_to_f).and_then(|w| restriction_map(&cf, &center, &w)),
        witness_center(&small, &center).and_then(|w| restriction_map(&small, &center, &w)),
        witness_same_base(&big, &small, &l_to_f).and_then(|w| restriction_map(&big, &small, &w)),
    ]
    .iter()
    .all(|r| r.as_ref().is_ok_and(|m| m.is_surjective()));

    let corpus = twisted_corpus(HB).unwrap();
    let mut lifted = Vec::new();
    let mut links = Vec::new();
    for (name, x) in &corpus {
        let r = check_product_conditions(x).unwrap();
        lifted.push(r.lifted_conditions_agree());
        if !r.eq_produit {
            continue;
        }
        for p in geometric_instances(x) {
            let gp = fep::geometric_problem(&p, x, 2).unwrap();
            links.push((name.to_string(), gp.link_holds));
        }
    }
    let ok = res_ok && lifted.iter().all(|&b| b) && !links.is_empty() && links.iter().all(|(_, b)| *b);
    outcome(
        ok,
        format!(
            "restriction post-checks on the three witness kinds {}, lifted-twist conditions agree on {}/{} corpus members, link on {}/{} problems",
            if res_ok { "pass" } else { "fail" },
            lifted.iter().filter(|&&b| b).count(),
            lifted.len(),
            links.iter().filter(|(_, b)| *b).count(),
            links.len()
        ),
    )
}

/// The identity problem and `Gal × Z/2 → Gal` over the base of `x`.
fn geometric_instances(x: &TwistedExtension) -> Vec<EmbeddingProblem> {
    let base = x.base();
    let gal = base.table().clone();
    let id = EmbeddingProblem::new(&gal, base, GroupHom::identity(&gal)).unwrap();
    let z2 = FiniteGroup::cyclic(2);
    let prod = FiniteGroup::direct_product(&gal, &z2);
    // direct_product indexes (a, b) as 2a + b
    let proj = GroupHom::new(&prod, &gal, (0..prod.order()).map(|k| k / 2).collect()).unwrap();
    let pr = EmbeddingProblem::new(&prod, base, proj).unwrap();
    vec![id, pr]
}

fn criterion_9() -> Outcome {
    let corpus = twisted_corpus(HB).unwrap();
    let pick = |n: &str| corpus.iter().find(|(name, _)| *name == n).unwrap().1.clone();
    let untwisted = tensor_check(&pick("untwisted Q(sqrt2)"), 4);
    let special = tensor_check(&pick("cyclic factor twist Q(sqrt2,sqrt3)"), 4);
    let bad = tensor_check(&pick("inner twist counterexample"), 4);
    let describe = |r: &Result<skewfep::ore::TensorReport, GaloisError>| match r {
        Ok(t) => format!(
            "injective={} surjective={} multiplicative={}",
            t.injective, t.surjective, t.multiplicative
        ),
        Err(e) => e.to_string(),
    };
    let ok = untwisted.as_ref().is_ok_and(|t| t.passed())
        && special.as_ref().is_ok_and(|t| t.passed())
        && matches!(bad, Err(GaloisError::Ore(OreError::HypothesisFailed(_))));
    outcome(
        ok,
        format!(
            "τ = id: {}; cyclic factor twist: {}; counterexample: {}",
            describe(&untwisted),
            describe(&special),
            if matches!(bad, Err(GaloisError::Ore(OreError::HypothesisFailed(_)))) { "HypothesisFailed" } else { "no refusal" }
        ),
    )
}

#[test]
fn acceptance() {
    let secs = Duration::from_secs;
    let results = [
        run(1, "Q8 regression", secs(10), criterion_1),
        run(2, "inner-twist counterexample", secs(5), criterion_2),
        run(3, "scalar extension instance matrix", secs(30), criterion_3),
        run(4, "bounded center", secs(60), criterion_4),
        run(5, "skew polynomial property suite", secs(600), criterion_5),
        run(6, "recurrence detection", secs(60), criterion_6),
        run(7, "transport round trips", secs(600), criterion_7),
        run(8, "restriction and product lemmas", secs(600), criterion_8),
        run(9, "tensor decomposition", secs(600), criterion_9),
    ];
    let passed = results.iter().filter(|&&b| b).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    assert_eq!(passed, results.len());
}

#[test]
fn inner_order_of_counterexample_twist() {
    let x = galois::inner_twist_counterexample().unwrap();
    assert_eq!(inner_order(x.sigma()), 1);
}
