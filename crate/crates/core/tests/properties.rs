mod common;

use proptest::prelude::*;

use linfty::calculus::{circle, mc_apply};
use linfty::fixtures::dgla::matrix_dgla;
use linfty::fixtures::generate::{kuranishi_fixture, random_context, random_pair, ContextRecipe};
use linfty::fixtures::named::fix_a;
use linfty::fixtures::oracles::{mc_enumerate_1d, McLine};
use linfty::fixtures::random::{random_differential, random_inhom, random_linmap, random_spaces, random_vector, rng};
use linfty::interchange::Document;
use linfty::linmap::check_linmap;
use linfty::scalar::{format_q, parse_q, q, Q};
use linfty::space::{filtration_distance, Vector};
use linfty::structure::{check_structure, from_dgla, mc_residual, CurvedStructure};
use linfty::symop::{hom_differential, koszul_sign};
use linfty::transfer::{solve_f, solve_f_global, transfer};

fn rational() -> impl Strategy<Value = Q> {
    (-50i64..=50, 1i64..=20).prop_map(|(n, d)| q(n, d))
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #[test]
    fn rationals_round_trip(n in any::<i64>(), d in 1i64..=i64::MAX) {
        let x = q(n, d);
        prop_assert_eq!(parse_q(&format_q(&x)).unwrap(), x);
    }

    #[test]
    fn weight_of_sum(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sp = &random_spaces(&mut r, &["L"], 4)[0];
        let x = random_vector(&mut r, sp, 0, 1, 0.5);
        let y = random_vector(&mut r, sp, 0, 1, 0.5);
        let sum = x.try_add(&y).unwrap();
        let low = x.weight().min(y.weight());
        prop_assert!(sum.weight() >= low);
        if x.weight() != y.weight() {
            prop_assert_eq!(sum.weight(), low);
        }
    }

    #[test]
    fn distance_is_an_ultrametric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sp = &random_spaces(&mut r, &["L"], 4)[0];
        let v: Vec<Vector> = (0..3).map(|_| random_vector(&mut r, sp, 0, 1, 0.5)).collect();
        let c = q(2, 1);
        let d = |a: &Vector, b: &Vector| filtration_distance(a, b, &c).unwrap();
        let (xz, xy, yz) = (d(&v[0], &v[2]), d(&v[0], &v[1]), d(&v[1], &v[2]));
        prop_assert!(xz <= xy.clone().max(yz));
        prop_assert_eq!(d(&v[0], &v[0]), Q::from_integer(0.into()));
    }

    #[test]
    fn filtered_maps_compose(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_spaces(&mut r, &["K", "L", "M"], 3);
        let f = random_linmap(&mut r, &s[0], &s[1], 0, 0, 0.6);
        let g = random_linmap(&mut r, &s[1], &s[2], 1, 0, 0.6);
        prop_assert!(check_linmap(&f).is_empty() && check_linmap(&g).is_empty());
        prop_assert!(check_linmap(&g.compose(&f).unwrap()).is_empty());
    }

    #[test]
    fn koszul_sign_is_multiplicative(
        (sigma, tau) in (1usize..=4).prop_flat_map(|n| (permutation(n), permutation(n))),
        raw in proptest::collection::vec(-2i32..=2, 4),
    ) {
        let degrees = &raw[..sigma.len()];
        let composite: Vec<usize> = sigma.iter().map(|&i| tau[i]).collect();
        let moved: Vec<i32> = tau.iter().map(|&i| degrees[i]).collect();
        prop_assert_eq!(koszul_sign(&composite, degrees), koszul_sign(&tau, degrees) * koszul_sign(&sigma, &moved));
    }

    #[test]
    fn evaluation_is_multilinear(seed in any::<u64>(), alpha in rational(), beta in rational()) {
        let mut r = rng(seed);
        let s = random_spaces(&mut r, &["L", "M"], 3);
        let op = random_inhom(&mut r, &s[0], &s[1], 0, 0, 0.8, 2..=2);
        let c = op.component(2).unwrap();
        let deg = s[0].degree(0);
        let x = random_vector(&mut r, &s[0], deg, 1, 0.8);
        let y = random_vector(&mut r, &s[0], deg, 1, 0.8);
        let z = random_vector(&mut r, &s[0], s[0].degree(s[0].dim() - 1), 1, 0.8);
        let mix = x.scale(&alpha).try_add(&y.scale(&beta)).unwrap();
        let lhs = c.eval(&[mix, z.clone()]).unwrap();
        let rhs = c.eval(&[x, z.clone()]).unwrap().scale(&alpha).try_add(&c.eval(&[y, z]).unwrap().scale(&beta)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn hom_differential_squares_to_zero(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_spaces(&mut r, &["L", "M"], 3);
        let (dl, dm) = (random_differential(&mut r, &s[0]), random_differential(&mut r, &s[1]));
        let a = common::op(&mut r, &s[0], &s[1], 0);
        let once = hom_differential(&a, &dl, &dm).unwrap();
        prop_assert!(hom_differential(&once, &dl, &dm).unwrap().is_zero());
        prop_assert!(once.s_filtration_degree() >= a.s_filtration_degree());
    }

    #[test]
    fn arities_past_the_cap_vanish(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_spaces(&mut r, &["L"], 3);
        let a = common::op(&mut r, &s[0], &s[0], 1);
        let n = s[0].filtration_length() as usize;
        prop_assert!(a.components().len() <= n);
        prop_assert!(a.component(n).map_or(true, |c| c.is_zero()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matrix_dglas_are_structures(degrees in proptest::collection::vec(0i32..=2, 3..=4), seed in any::<u64>()) {
        let mut r = rng(seed);
        let q: Vec<(usize, Q)> = (0..degrees.len() - 1)
            .filter(|&i| degrees[i] - degrees[i + 1] == 1 && i % 2 == 0)
            .map(|i| (i, linfty::fixtures::random::random_q(&mut r)))
            .collect();
        let g = matrix_dgla(&degrees, 3, &q).unwrap();
        let s = from_dgla(&g, "L").unwrap();
        prop_assert!(check_structure(s.delta(), s.lambda()).unwrap().is_valid());
        prop_assert!(mc_residual(&Vector::zero(s.space()), &s).unwrap().is_zero());
    }

    #[test]
    fn total_structure_squares_to_zero(seed in any::<u64>()) {
        let mut r = rng(seed);
        let recipe = ContextRecipe::random(&mut r);
        let (_, s) = random_pair(&mut r, &recipe).unwrap();
        let total = s.total().unwrap();
        prop_assert!(circle(&total, &total).unwrap().is_zero());
        prop_assert!(s.delta().compose(s.delta()).unwrap().is_zero());
    }

    #[test]
    fn iteration_schedules_agree_and_contract(seed in any::<u64>()) {
        let mut r = rng(seed);
        let recipe = ContextRecipe::random(&mut r);
        let (ctx, s) = random_pair(&mut r, &recipe).unwrap();
        let (by_arity, _) = solve_f(&ctx, &s).unwrap();
        let (global, degrees) = solve_f_global(&ctx, &s).unwrap();
        prop_assert_eq!(by_arity, global);
        prop_assert!(degrees.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn pushforward_preserves_mc(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = kuranishi_fixture(&mut r).unwrap();
        let t = transfer(&k.context, &k.structure).unwrap();
        let small = linfty::fixtures::samples::mc_samples(&mut r, &k.small, 3).unwrap();
        for x in small {
            let y = mc_apply(&t.big_f, &x).unwrap();
            prop_assert!(mc_residual(&y, &k.structure).unwrap().is_zero());
        }
    }

    #[test]
    fn generators_are_deterministic(seed in any::<u64>()) {
        let make = || {
            let mut r = rng(seed);
            let recipe = ContextRecipe::random(&mut r);
            (random_context(&mut r, &recipe), random_pair(&mut r, &recipe).unwrap())
        };
        prop_assert_eq!(make(), make());
    }

    #[test]
    fn documents_round_trip_exactly(seed in any::<u64>()) {
        let mut r = rng(seed);
        let recipe = ContextRecipe::random(&mut r);
        let (ctx, s) = random_pair(&mut r, &recipe).unwrap();
        for doc in [Document::from_context(&ctx), Document::from_structure(&s)] {
            let text = doc.to_text();
            let back = Document::parse(&text).unwrap();
            prop_assert_eq!(back.to_text(), text);
        }
        let back = Document::parse(&Document::from_structure(&s).to_text()).unwrap();
        let (delta, lambda) = back.structure_data().unwrap();
        prop_assert_eq!(CurvedStructure::new(delta, lambda).unwrap(), s);
        let back = Document::parse(&Document::from_context(&ctx).to_text()).unwrap();
        prop_assert_eq!(back.context_data().unwrap(), ctx);
    }
}

proptest! {
    #[test]
    fn one_dimensional_enumeration_matches_residuals(t in rational()) {
        let a = fix_a();
        let roots = match mc_enumerate_1d(&a).unwrap() {
            McLine::Points(p) => p,
            McLine::All(_) => unreachable!("FIX-A has isolated points"),
        };
        let x = Vector::basis(a.space(), "a").unwrap().scale(&t);
        prop_assert_eq!(mc_residual(&x, &a).unwrap().is_zero(), roots.contains(&x));
    }

    #[test]
    fn flat_structures_have_zero_as_mc(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sp = &random_spaces(&mut r, &["L"], 3)[0];
        let lambda = random_inhom(&mut r, sp, sp, 1, 1, 0.5, 2..=2);
        let s = CurvedStructure::unchecked(linfty::linmap::LinMap::zero(sp, sp, 1), lambda);
        prop_assert!(s.is_flat());
        prop_assert!(mc_residual(&Vector::zero(sp), &s).unwrap().is_zero());
    }
}
