mod common;

use common::*;
use dunkl_core::scalar::{dot, int, norm_sq, rat};
use dunkl_core::sde::{simulate_dunkl, BoundaryPolicy, Moments};
use dunkl_core::{
    reflect, DunklContext, Family, MultiPoly, PointFunction, PolyFunction, Rational, RootScale,
    RootSystem, SimConfig,
};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = (Family, usize)> {
    prop_oneof![
        (1usize..=3).prop_map(|r| (Family::A, r)),
        (1usize..=3).prop_map(|r| (Family::B, r)),
        (2usize..=4).prop_map(|r| (Family::D, r)),
        Just((Family::I2, 4)),
    ]
}

fn small_rat() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(a, b)| rat(a, b))
}

fn rat_vec(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec(small_rat(), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reflection_is_isometric_involution(
        alpha in rat_vec(4).prop_filter("nonzero", |a| a.iter().any(|v| *v != int(0))),
        x in rat_vec(4),
        y in rat_vec(4),
    ) {
        let rx = reflect(&alpha, &x).unwrap();
        prop_assert_eq!(reflect(&alpha, &rx).unwrap(), x.clone());
        let ry = reflect(&alpha, &y).unwrap();
        prop_assert_eq!(dot(&rx, &ry), dot(&x, &y));
        prop_assert_eq!(reflect(&alpha, &alpha).unwrap(), alpha.iter().map(|v| -v.clone()).collect::<Vec<_>>());
    }

    #[test]
    fn discriminant_is_alternating((f, rank) in family(), seed in any::<u64>()) {
        let sys = exact(f, rank, &ones(f));
        let mut r = rng(seed);
        let x = random_rational_point(&mut r, sys.dim());
        let a = sys.discriminant(&x).unwrap();
        for i in 0..sys.len() {
            prop_assert_eq!(sys.discriminant(&sys.reflect_by(i, &x).unwrap()).unwrap(), -a.clone());
        }
        // as a polynomial
        let mut d = MultiPoly::one(sys.dim());
        for root in sys.positive_roots() {
            d = &d * &MultiPoly::linear_form(&root.vector);
        }
        for root in sys.positive_roots() {
            prop_assert_eq!(d.compose_reflection(&root.vector).unwrap(), -&d);
        }
    }

    #[test]
    fn ring_axioms(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let (p, q, s) = (random_poly(&mut r, n, 3), random_poly(&mut r, n, 3), random_poly(&mut r, n, 2));
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p * &q) * &s, &p * &(&q * &s));
        prop_assert_eq!(&p * &(&q + &s), &(&p * &q) + &(&p * &s));
        prop_assert_eq!(&p - &p, MultiPoly::zero(n));
        prop_assert_eq!(&p * &MultiPoly::one(n), p.clone());
        let back: MultiPoly = dunkl_core::parse_poly(&p.to_string(), n).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn product_rule_and_evaluation(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let (p, q) = (random_poly(&mut r, n, 3), random_poly(&mut r, n, 3));
        for i in 0..n {
            let lhs = (&p * &q).partial(i).unwrap();
            let rhs = &(&p.partial(i).unwrap() * &q) + &(&p * &q.partial(i).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
        let x = random_rational_point(&mut r, n);
        prop_assert_eq!((&p * &q).eval(&x).unwrap(), p.eval(&x).unwrap() * q.eval(&x).unwrap());
        prop_assert_eq!((&p + &q).eval(&x).unwrap(), p.eval(&x).unwrap() + q.eval(&x).unwrap());
    }

    #[test]
    fn alternating_quotient_identity(
        seed in any::<u64>(),
        alpha in rat_vec(3).prop_filter("nonzero", |a| a.iter().any(|v| *v != int(0))),
    ) {
        let mut r = rng(seed);
        let p = random_poly(&mut r, 3, 4);
        let q = p.alternating_quotient(&alpha).unwrap();
        let diff = &p - &p.compose_reflection(&alpha).unwrap();
        prop_assert_eq!(&q * &MultiPoly::linear_form(&alpha), diff);
    }

    #[test]
    fn dunkl_operators_commute((f, rank) in family(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let sys = exact(f, rank, &random_ks(&mut r, f));
        let ctx = DunklContext::new(sys).unwrap();
        let n = ctx.dim();
        let p = random_poly(&mut r, n, 3);
        for i in 0..n {
            for j in (i + 1)..n {
                let a = ctx.dunkl_partial(i, &ctx.dunkl_partial(j, &p).unwrap()).unwrap();
                let b = ctx.dunkl_partial(j, &ctx.dunkl_partial(i, &p).unwrap()).unwrap();
                prop_assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn laplacian_forms_agree((f, rank) in family(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let sys = exact(f, rank, &random_ks(&mut r, f));
        let ctx = DunklContext::new(sys.clone()).unwrap();
        let p = random_poly(&mut r, ctx.dim(), 4);
        let direct = ctx.dunkl_laplacian_direct(&p).unwrap();
        let pf = PolyFunction::new(p);
        for _ in 0..3 {
            let x = generic_rational_point(&mut r, &sys);
            let expanded = ctx.dunkl_laplacian_expanded(&pf, &x).unwrap();
            prop_assert_eq!(direct.eval(&x).unwrap(), expanded);
        }
    }

    #[test]
    fn operators_ignore_root_length(seed in any::<u64>(), c in 1i64..=4) {
        // Replacing every root alpha by c alpha leaves T_xi unchanged.
        let mut r = rng(seed);
        let sys = exact(Family::B, 2, &random_ks(&mut r, Family::B));
        let scaled = RootSystem::from_roots(
            sys.roots().iter().map(|a| a.vector.iter().map(|v| v * int(c)).collect()).collect(),
            sys.roots().iter().map(|a| a.multiplicity.clone()).collect(),
        ).unwrap();
        let (a, b) = (DunklContext::new(sys).unwrap(), DunklContext::new(scaled).unwrap());
        let p = random_poly(&mut r, 2, 4);
        let xi = random_rational_point(&mut r, 2);
        prop_assert_eq!(a.dunkl_apply(&xi, &p).unwrap(), b.dunkl_apply(&xi, &p).unwrap());
    }

    #[test]
    fn reflection_covariance((f, rank) in family(), seed in any::<u64>()) {
        // T_xi (p o sigma) = (T_{sigma xi} p) o sigma
        let mut r = rng(seed);
        let sys = exact(f, rank, &random_ks(&mut r, f));
        let ctx = DunklContext::new(sys.clone()).unwrap();
        let n = ctx.dim();
        let p = random_poly(&mut r, n, 3);
        let xi = random_rational_point(&mut r, n);
        let i = sys.positive_indices()[0];
        let alpha = sys.root(i).vector.clone();
        let lhs = ctx.dunkl_apply(&xi, &p.compose_reflection(&alpha).unwrap()).unwrap();
        let sxi = reflect(&alpha, &xi).unwrap();
        let rhs = ctx.dunkl_apply(&sxi, &p).unwrap().compose_reflection(&alpha).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn multiplicity_orbits_are_invariant((f, rank) in family(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let sys = exact(f, rank, &random_ks(&mut r, f));
        prop_assert!(sys.multiplicities_invariant());
        prop_assert!(sys.check_closure().ok());
        let fs = RootSystem::<f64>::build(f, rank, &vec![1.0; f.multiplicity_count()], RootScale::Normalized).unwrap();
        let x = fs.sample_generic_point(seed, 0.1).unwrap();
        for i in 0..fs.len() {
            let y = fs.reflect_by(i, &x).unwrap();
            prop_assert!((norm_sq(&y) - norm_sq(&x)).abs() < 1e-12 * (1.0 + norm_sq(&x)));
        }
    }

    #[test]
    fn moment_merge_is_associative(xs in proptest::collection::vec(-1e3f64..1e3, 3..60), a in 1usize..20, b in 1usize..20) {
        let n = xs.len();
        let (i, j) = (a.min(n - 2), (a + b).min(n - 1));
        let (p, q, s): (Moments, Moments, Moments) = (
            xs[..i].iter().copied().collect(),
            xs[i..j].iter().copied().collect(),
            xs[j..].iter().copied().collect(),
        );
        let l = p.merge(&q).merge(&s);
        let r = p.merge(&q.merge(&s));
        let all: Moments = xs.iter().copied().collect();
        prop_assert_eq!(l.count, all.count);
        prop_assert!((l.mean - r.mean).abs() < 1e-9 && (l.mean - all.mean).abs() < 1e-9);
        prop_assert!((l.m2 - r.m2).abs() < 1e-6 * (1.0 + all.m2) && (l.m2 - all.m2).abs() < 1e-6 * (1.0 + all.m2));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn simulation_is_seed_deterministic(seed in any::<u64>(), k in 0.3f64..1.5) {
        let sys = RootSystem::build(Family::B, 2, &[k, 1.0], RootScale::IntegerRepresentatives).unwrap();
        let mut cfg = SimConfig::new(sys, vec![0.4, 1.1], 0.3, 1e-3);
        cfg.ensemble = 6;
        cfg.master_seed = seed;
        cfg.boundary = BoundaryPolicy::Fold;
        let a = simulate_dunkl(&cfg).unwrap();
        let b = simulate_dunkl(&cfg).unwrap();
        prop_assert_eq!(&a, &b);
        for t in &a {
            prop_assert!(t.final_state().iter().all(|v| v.is_finite()));
            prop_assert_eq!(t.times[0], 0.0);
        }
    }
}

#[test]
fn poly_function_matches_derivatives() {
    let mut r = rng(9);
    let p = random_poly(&mut r, 3, 4);
    let f = PolyFunction::new(p.clone());
    let x = [rat(1, 2), rat(-3, 1), rat(5, 7)];
    assert_eq!(PointFunction::<Rational>::laplacian(&f, &x).unwrap(), p.laplacian().eval(&x).unwrap());
}
