use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use roby_core::freealg::{cayley_hamilton_check, FreeAlgebra};
use roby_core::error::LineError;
use roby_core::linegeom::{GradedModuleP1, Line, SplittingType};
use roby_core::pipeline::{run, PipelineSpec, Seed};
use roby_core::poly::{indexed_vars, HomForm, Poly, PolyMatrix, Var};
use roby_core::roby::{char_morphism, form_roby, graded_quotients, monomial_roby, split_roby, twisted_tensor, verify_roby, GradedRobyModule};
use roby_core::specfile::{self, ModuleFile};
use roby_core::surfnum::{beta_closed_form, beta_sequence, p1xp1_cohomology, quadric_delta_ulrich_test, quadric_h1_sequence, wlp_check, UlrichClass};
use roby_core::CycScalar;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn scalar() -> impl Strategy<Value = CycScalar> {
    (prop::sample::select(vec![1u32, 3, 4, 5, 6, 8]), prop::collection::vec((-5i64..=5, 1i64..=4), 4)).prop_map(|(e, cs)| {
        let phi = roby_core::scalar::euler_phi(e) as usize;
        let c = cs.into_iter().cycle().take(phi).map(|(n, d)| rat(n, d)).collect();
        CycScalar::from_coeffs(e, c).unwrap()
    })
}

fn var_names() -> Vec<Var> {
    ["x", "y", "w"].iter().map(|s| Var::new(s)).collect()
}

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec((-4i64..=4, 0u32..3, 0u32..3, 0u32..2), 0..5).prop_map(|terms| {
        let v = var_names();
        terms.into_iter().fold(Poly::zero(), |acc, (c, a, b, w)| {
            let m = &(&Poly::var(v[0]).pow(a) * &Poly::var(v[1]).pow(b)) * &Poly::var(v[2]).pow(w);
            &acc + &(&Poly::int(c) * &m)
        })
    })
}

fn matrix(n: usize) -> impl Strategy<Value = PolyMatrix> {
    prop::collection::vec(-2i64..=2, n * n).prop_map(move |cs| {
        let x = Poly::var(Var::new("x"));
        PolyMatrix::from_fn(n, n, |r, c| {
            let k = cs[r * n + c];
            if (r + c) % 2 == 0 { Poly::int(k) } else { &Poly::int(k) * &x }
        })
    })
}

/// Monic `z^d + Σ c_k z^k` with integer-linear coefficients in `x, y`.
fn monogenic_poly(max_deg: u32) -> impl Strategy<Value = Poly> {
    (2..=max_deg).prop_flat_map(|d| prop::collection::vec((-2i64..=2, -2i64..=2), d as usize)).prop_map(|cs| {
        let z = Poly::var(Var::new("z"));
        let (x, y) = (Poly::var(Var::new("x")), Poly::var(Var::new("y")));
        let d = cs.len() as u32;
        cs.iter().enumerate().fold(z.pow(d), |acc, (k, (a, b))| {
            let c = &(&Poly::int(*a) * &x) + &(&Poly::int(*b) * &y);
            &acc + &(&c * &z.pow(k as u32))
        })
    })
}

fn monomial_form(e: u32, s: usize) -> impl Strategy<Value = HomForm> {
    prop::collection::vec(0..s, e as usize).prop_map(move |idx| {
        let y = indexed_vars("y", s);
        let p = idx.iter().fold(Poly::one(), |acc, i| &acc * &Poly::var(y[*i]));
        HomForm::new(p, e, y).unwrap()
    })
}

fn small_form() -> impl Strategy<Value = HomForm> {
    (2u32..=3, prop::collection::vec((1i64..=3, 0usize..2, 0u32..=3), 1..=2)).prop_map(|(e, terms)| {
        let y = indexed_vars("y", 2);
        let p = terms.iter().fold(Poly::zero(), |acc, (c, first, k)| {
            let k = (*k).min(e);
            let (a, b) = if *first == 0 { (k, e - k) } else { (e - k, k) };
            &acc + &(&Poly::int(*c) * &(&Poly::var(y[0]).pow(a) * &Poly::var(y[1]).pow(b)))
        });
        HomForm::new(p, e, y).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        if let Some(i) = a.inv() {
            prop_assert!((&a * &i).is_one());
            prop_assert_eq!(b.checked_div(&a).unwrap(), &b * &i);
        } else {
            prop_assert!(a.is_zero());
        }
    }

    #[test]
    fn roots_embed_compatibly(e in 1u32..=6, m in 1u32..=4) {
        prop_assert_eq!(CycScalar::make_root(m * e).pow(m as u64), CycScalar::make_root(e));
        prop_assert!(CycScalar::make_root(e).pow(e as u64).is_one());
        // arithmetic across orders agrees with arithmetic in the common field
        let a = CycScalar::make_root(e);
        let b = CycScalar::make_root(m);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b).pow((e * m) as u64), &CycScalar::one());
    }

    #[test]
    fn poly_negation_cancels(p in poly()) {
        prop_assert_eq!((&p + &(-&p)).num_terms(), 0);
    }

    #[test]
    fn substitution_is_a_ring_morphism(p in poly(), q in poly(), r in poly()) {
        let b: HashMap<Var, Poly> = [(Var::new("w"), r.clone())].into_iter().collect();
        prop_assert_eq!((&p * &q).substitute(&b), &p.substitute(&b) * &q.substitute(&b));
        prop_assert_eq!((&p + &q).substitute(&b), &p.substitute(&b) + &q.substitute(&b));
    }

    #[test]
    fn matrix_powers_add(a in matrix(3), m in 0u64..4, n in 0u64..4) {
        prop_assert_eq!(a.pow(m + n).unwrap(), a.pow(m).unwrap().mul(&a.pow(n).unwrap()).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn monogenic_charpoly_at_the_generator(p in monogenic_poly(4)) {
        let z = Var::new("z");
        let alg = FreeAlgebra::monogenic(&p, z, None).unwrap();
        let chi = alg.char_poly();
        // a = z has Γ = (0, 1, 0, ...)
        let mut b: HashMap<Var, Poly> = alg.dual_vars().iter().enumerate().map(|(i, g)| (*g, if i == 1 { Poly::one() } else { Poly::zero() })).collect();
        b.insert(alg.t_var(), Poly::var(z));
        prop_assert_eq!(chi.poly().substitute(&b), p);
    }

    #[test]
    fn cayley_hamilton_on_monogenic(p in monogenic_poly(3)) {
        let alg = FreeAlgebra::monogenic(&p, Var::new("z"), None).unwrap();
        prop_assert!(cayley_hamilton_check(&alg).passed);
    }

    #[test]
    fn restriction_commutes_with_substitution(p in monogenic_poly(3), a in -3i64..=3, b in -3i64..=3) {
        let alg = FreeAlgebra::monogenic(&p, Var::new("z"), None).unwrap();
        let bind: HashMap<Var, Poly> = [(Var::new("y"), &Poly::int(a) * &Poly::var(Var::new("x")) + Poly::int(b))].into_iter().collect();
        prop_assert_eq!(alg.substitute(&bind).unwrap().char_poly(), alg.char_poly().restrict(&bind).unwrap());
    }

    #[test]
    fn twisted_tensor_of_monomials_is_roby(e in 2u32..=3, f in monomial_form(2, 2), g in monomial_form(2, 2)) {
        // the two factors must share degree and arguments
        let lift = |h: &HomForm| HomForm::new(h.poly().pow(e - 1).clone(), 2 * (e - 1), h.args().to_vec()).unwrap();
        let (f, g) = if e == 2 { (f, g) } else { (lift(&f), lift(&g)) };
        let m = twisted_tensor(&monomial_roby(&f).unwrap(), &monomial_roby(&g).unwrap(), &CycScalar::make_root(f.degree())).unwrap();
        let rep = verify_roby(&m);
        prop_assert!(rep.identity && rep.graded);
        prop_assert_eq!(m.target().poly(), &(f.poly() + g.poly()));
    }

    #[test]
    fn form_modules_round_trip_through_spec_files(f in small_form()) {
        let m = form_roby(&f).unwrap();
        prop_assert!(verify_roby(&m).passed());
        let text = specfile::to_string(&ModuleFile::from_module(&m)).unwrap();
        let back = specfile::from_str::<ModuleFile>(&text).unwrap().build().unwrap();
        prop_assert_eq!(back.actions(), m.actions());
        prop_assert_eq!(back.grading(), m.grading());
        prop_assert_eq!(back.target(), m.target());
    }
}

fn quadric_cover(c: i64, a: i64, b: i64) -> PipelineSpec {
    let p: Poly = format!("z^2 - ({c}*x*y + z2*({a}*x + {b}*y + z2))").parse().unwrap();
    let algebra = Arc::new(FreeAlgebra::monogenic(&p, Var::new("z"), Some(1)).unwrap());
    let line = Line::coordinate(Var::new("x"), Var::new("y"), &[Var::new("z2")]).unwrap();
    let m = PolyMatrix::parse_rows(&[vec!["0".to_string(), format!("{c}*x")], vec!["y".to_string(), "0".to_string()]]).unwrap();
    PipelineSpec { algebra, line, seed: Seed::CyclicCover(m) }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn quadric_covers_pass_the_pipeline(c in 1i64..=4, a in -2i64..=2, b in -2i64..=2) {
        let out = run(&quadric_cover(c, a, b)).unwrap();
        prop_assert!(out.passed());
        prop_assert_eq!(out.module.dim(), 4 << out.monomials.len());
        let q = graded_quotients(&out.restricted, &out.filtration);
        prop_assert!(q.iter().all(|m| m.as_slice() == out.seed_morphism.matrices()));
        prop_assert!(out.line_splitting_type.iter().all(|k| *k == 0));
    }
}

/// Block-diagonal sum of two modules over the same target.
fn direct_sum(a: &GradedRobyModule, b: &GradedRobyModule) -> GradedRobyModule {
    let grading = a.grading().iter().chain(b.grading()).copied().collect();
    let actions = a.actions().iter().zip(b.actions()).map(|(x, y)| PolyMatrix::direct_sum(x, y)).collect();
    GradedRobyModule::with_t_slot(grading, actions, a.target().clone()).unwrap().attach_algebra(a.algebra().unwrap().clone()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn c_extraction_respects_direct_sums(d in 2usize..=4) {
        let m = split_roby(d);
        let c = char_morphism(&m).unwrap();
        let cs = char_morphism(&direct_sum(&m, &m)).unwrap();
        for (x, y) in c.matrices().iter().zip(cs.matrices()) {
            prop_assert_eq!(&PolyMatrix::direct_sum(x, x), y);
        }
    }
}

fn presentation(gens: &[i64], cancel: Option<i64>) -> GradedModuleP1 {
    let (x, y) = (Var::new("x"), Var::new("y"));
    let mut g = gens.to_vec();
    let (rels, m) = match cancel {
        None => (vec![], PolyMatrix::zeros(g.len(), 0)),
        Some(k) => {
            g.push(k);
            let n = g.len();
            (vec![k], PolyMatrix::from_fn(n, 1, |r, _| if r == n - 1 { Poly::one() } else { Poly::zero() }))
        }
    };
    GradedModuleP1::new(x, y, g, rels, m).unwrap()
}

proptest! {
    #[test]
    fn splitting_type_of_a_sum_is_the_union(a in prop::collection::vec(-4i64..=4, 1..4), b in prop::collection::vec(-4i64..=4, 1..4), k in prop::option::of(-3i64..=3)) {
        let sa = presentation(&a, None).splitting_type().unwrap();
        let sb = presentation(&b, k).splitting_type().unwrap();
        let both: Vec<i64> = a.iter().chain(&b).copied().collect();
        let sum = presentation(&both, k).splitting_type().unwrap();
        prop_assert_eq!(sum, sa.direct_sum(&sb));
        prop_assert_eq!(sa.rank(), a.len());
    }

    #[test]
    fn torsion_is_not_a_bundle(d in 0i64..=3, e in 1u32..=3) {
        let rel = PolyMatrix::from_fn(1, 1, |_, _| Poly::var(Var::new("x")).pow(e));
        let t = GradedModuleP1::new(Var::new("x"), Var::new("y"), vec![d], vec![d + e as i64], rel).unwrap();
        prop_assert!(matches!(t.splitting_type(), Err(LineError::NotABundle(_))));
    }

    #[test]
    fn line_bundle_cohomology(a in -8i64..=8, b in -8i64..=8) {
        let h = p1xp1_cohomology(a, b);
        let dual = p1xp1_cohomology(-2 - a, -2 - b);
        prop_assert_eq!((h.h0, h.h1, h.h2), (dual.h2, dual.h1, dual.h0));
        prop_assert_eq!(h.euler(), (a + 1) * (b + 1));
        // down-twists of an effective bundle lose sections
        prop_assert!(p1xp1_cohomology(a - 1, b - 1).h0 <= h.h0);
    }

    #[test]
    fn delta_ulrich_twists_are_unimodal(a in -8i64..=8) {
        prop_assert_ne!(quadric_delta_ulrich_test(a, 1 - a), UlrichClass::NotDeltaUlrich);
        prop_assert!(wlp_check(&quadric_h1_sequence(a, 1 - a, -15, 15)).passed());
    }

    #[test]
    fn beta_recursion_matches_the_closed_form(n in -12i64..=12, d in 1i64..=6, steps in 0usize..12) {
        let b0 = rat(n, d);
        let seq = beta_sequence(&b0, steps);
        prop_assert_eq!(seq.len(), steps + 1);
        for (m, b) in seq.iter().enumerate() {
            prop_assert_eq!(b, &beta_closed_form(&b0, m as u32));
            if b0 <= rat(1, 1) {
                prop_assert!(*b <= rat(1, 1));
            }
        }
    }
}

#[test]
fn splitting_type_orders_parts() {
    assert_eq!(SplittingType::new(vec![2, -1, 0]).parts(), SplittingType::new(vec![0, 2, -1]).parts());
}
