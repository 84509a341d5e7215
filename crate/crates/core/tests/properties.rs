use circle_rearrange_core::bohr::BohrSet;
use circle_rearrange_core::circle::{from_arcs, normalize, sumset0, symmetrize};
use circle_rearrange_core::flow::{flow_to_scale, terminal_scale};
use circle_rearrange_core::functionals::{defect_d, defect_dprime, sharpened_bound, triple_functional};
use circle_rearrange_core::oracle::{zn_sumset, zn_triple_functional, ZnSet};
use circle_rearrange_core::piecewise::{
    convolve_indicator, convolve_step, decreasing_rearrangement, integrate_over, pushforward,
};
use circle_rearrange_core::rational::{min_r, one, rat, zero};
use circle_rearrange_core::rearrange::{polarize, PolarizationAxis};
use circle_rearrange_core::reductions::overlap_translate;
use circle_rearrange_core::{IntervalSet, Rational, StepFn};
use proptest::prelude::*;

fn arb_set() -> impl Strategy<Value = IntervalSet> {
    prop::collection::vec((0i64..240, 1i64..48), 1..4).prop_map(|arcs| {
        let pairs: Vec<(Rational, Rational)> = arcs.into_iter().map(|(c, h)| (rat(c, 240), rat(h, 480))).collect();
        from_arcs(&pairs)
    })
}

fn arb_frac(den: i64) -> impl Strategy<Value = Rational> {
    (0..den).prop_map(move |k| rat(k, den))
}

fn arb_step() -> impl Strategy<Value = StepFn> {
    prop::collection::vec((0i64..120, 1i64..30, 0i64..=4), 1..4).prop_map(|pieces| {
        let segs = pieces.into_iter().map(|(l, w, v)| (rat(l, 120), rat(l + w, 120), rat(v, 4))).collect();
        StepFn::from_segments(segs)
    })
}

fn arb_zn(n: usize) -> impl Strategy<Value = ZnSet> {
    prop::collection::vec(0..n, 1..n).prop_map(move |v| ZnSet::from_residues(n, v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalize_is_a_fixed_point(s in arb_set()) {
        prop_assert_eq!(normalize(s.arcs()), s);
    }

    #[test]
    fn measure_is_additive(s1 in arb_set(), s2 in arb_set()) {
        prop_assert_eq!(
            s1.union(&s2).measure() + s1.intersect(&s2).measure(),
            s1.measure() + s2.measure()
        );
    }

    #[test]
    fn translation_keeps_measure(s in arb_set(), y in arb_frac(97)) {
        prop_assert_eq!(s.translate(&y).measure(), s.measure());
    }

    #[test]
    fn sumset_meets_kneser(s1 in arb_set(), s2 in arb_set()) {
        let sum = sumset0(&s1, &s2).unwrap();
        prop_assert!(sum.measure() >= min_r(&(s1.measure() + s2.measure()), &one()));
    }

    #[test]
    fn symmetrize_is_idempotent(s in arb_set()) {
        let t = symmetrize(&s);
        prop_assert_eq!(t.measure(), s.measure());
        prop_assert_eq!(symmetrize(&t), t);
    }

    #[test]
    fn convolution_symmetries(a in arb_set(), b in arb_set(), x in arb_frac(60)) {
        let f = convolve_indicator(&a, &b);
        prop_assert_eq!(&f, &convolve_indicator(&b, &a));
        prop_assert_eq!(f.integral(), a.measure() * b.measure());
        let g = convolve_indicator(&a.negate(), &b.negate());
        prop_assert_eq!(g.eval(&x), f.eval(&(-x.clone())));
        prop_assert!(f.max_value() <= min_r(&a.measure(), &b.measure()));
    }

    #[test]
    fn layer_cake(a in arb_set(), b in arb_set(), k in 0i64..=16) {
        let f = convolve_indicator(&a, &b);
        let tau = min_r(&a.measure(), &b.measure()) * rat(k, 16);
        let s = f.superlevel(&tau);
        let (below, above) = f.truncated_integrals(&tau);
        prop_assert_eq!(&below + &above, a.measure() * b.measure());
        prop_assert_eq!(integrate_over(&f, &s), &tau * s.measure() + above);
    }

    #[test]
    fn pushforward_respects_convolution(f in arb_step(), g in arb_step(), n in 1u64..4) {
        let pf = pushforward(&f, n);
        prop_assert_eq!(pf.integral(), f.integral());
        let lhs = convolve_step(&f, &g).unwrap().pushforward(n);
        let rhs = convolve_step(&pf, &pushforward(&g, n)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn rearrangement_is_equimeasurable(f in arb_step()) {
        let r = decreasing_rearrangement(&f).unwrap();
        prop_assert!(r.is_symmetric_nonincreasing());
        for v in f.values().iter().chain(r.values()) {
            prop_assert_eq!(r.superlevel_measure(v), f.superlevel_measure(v));
        }
        prop_assert_eq!(r.integral(), f.integral());
    }

    #[test]
    fn riesz_sobolev_and_tao(a in arb_set(), b in arb_set(), c in arb_set(), k in 0i64..=16) {
        prop_assert!(defect_d(&a, &b, &c) >= zero());
        let tau = min_r(&a.measure(), &b.measure()) * rat(k, 16);
        prop_assert!(defect_dprime(&a, &b, &tau).unwrap() >= zero());
    }

    #[test]
    fn triple_functional_is_symmetric(a in arb_set(), b in arb_set(), c in arb_set()) {
        let t = triple_functional(&a, &b, &c);
        prop_assert_eq!(triple_functional(&b, &a, &c), t.clone());
        prop_assert_eq!(triple_functional(&c, &b, &a), t.clone());
        prop_assert_eq!(triple_functional(&a, &c, &b), t);
    }

    #[test]
    fn sharpened_bound_holds(a in arb_set(), b in arb_set(), k in 0i64..=16) {
        let (ma, mb) = (a.measure(), b.measure());
        let tau = min_r(&ma, &mb) * rat(k, 16);
        let f = convolve_indicator(&a, &b);
        let s = f.superlevel(&tau).measure();
        if let Ok((rhs, _)) = sharpened_bound(&ma, &mb, &tau, &s) {
            prop_assert!(f.truncated_integrals(&tau).1 <= rhs);
        }
    }

    #[test]
    fn polarization_contracts(a in arb_set(), b in arb_set(), axis in arb_frac(64)) {
        let ax = PolarizationAxis::new(axis);
        let (pa, pb) = (polarize(&a, &ax), polarize(&b, &ax));
        prop_assert_eq!(pa.measure(), a.measure());
        prop_assert!(pa.symdiff(&pb).measure() <= a.symdiff(&b).measure());
        prop_assert_eq!(polarize(&pa, &ax), pa);
    }

    #[test]
    fn flow_scales_measure(e in arb_set(), k in 0i64..=8) {
        let end = terminal_scale(&e).unwrap();
        let s = one() + (&end - one()) * rat(k, 8);
        prop_assert_eq!(flow_to_scale(&e, &s).unwrap().measure(), &s * e.measure());
    }

    #[test]
    fn flow_keeps_bohr_sets(n in 1u64..4, c in arb_frac(48), r in 1i64..12) {
        let rho = rat(r, 48);
        let e = BohrSet::new(n, c.clone(), rho.clone()).unwrap().to_set();
        let s = rat(3, 2);
        let want = BohrSet::new(n, c, &s * &rho).unwrap().to_set();
        prop_assert_eq!(flow_to_scale(&e, &s).unwrap(), want);
    }

    #[test]
    fn overlap_translate_is_exact(b in arb_set(), k in 0i64..=8) {
        let mu = b.measure();
        let t = &mu * &mu + (&mu - &mu * &mu) * rat(k, 8);
        let x = overlap_translate(&b, &t).unwrap();
        prop_assert_eq!(b.intersect(&b.translate(x.value())).measure(), t);
    }

    #[test]
    fn zn_functional_is_symmetric(s1 in arb_zn(11), s2 in arb_zn(11), s3 in arb_zn(11)) {
        let t = zn_triple_functional(&s1, &s2, &s3).unwrap();
        prop_assert_eq!(zn_triple_functional(&s2, &s1, &s3).unwrap(), t);
        prop_assert_eq!(zn_triple_functional(&s3, &s2, &s1).unwrap(), t);
        prop_assert_eq!(zn_triple_functional(&s1, &s3, &s2).unwrap(), t);
    }

    #[test]
    fn cauchy_davenport(s1 in arb_zn(13), s2 in arb_zn(13)) {
        let sum = zn_sumset(&s1, &s2).unwrap();
        prop_assert!(sum.len() >= (s1.len() + s2.len() - 1).min(13));
    }
}

#[test]
fn sharpened_bound_value() {
    // the arc case is the equality case at σ = τ
    let (rhs, h) = sharpened_bound(&rat(1, 4), &rat(1, 4), &rat(1, 8), &rat(1, 4)).unwrap();
    assert_eq!(h, zero());
    assert_eq!(rhs, rat(1, 64));
}
