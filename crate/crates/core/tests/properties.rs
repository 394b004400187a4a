use frameunc::bounds::{entropic_rhs, lp_bound, support_bound, support_bound_at, weak_support_bound, FramePair};
use frameunc::coherence::{coherence_r, improvement_condition, uniform_grid, CrossGram, DEFAULT_TIE_TOL};
use frameunc::entropy::shannon;
use frameunc::frames::{change_of_frame, operator_norm, CoefficientSeq, Frame};
use frameunc::generators::{
    bmub, mdct_basis, mub_pair, random_frame, random_frame_pair, random_onb_pair, rotate_plane, tight_frame, TightKind,
};
use frameunc::separation::{certify_split, exhaustive_separate, feasible_splits, two_split_bound_check, DEFAULT_FEASIBILITY_TOL};
use frameunc::verify::{check_support, equality_conditions, trial_signals, TrialConfig};
use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;

fn signal(parts: &[(f64, f64)]) -> DVector<Complex64> {
    DVector::from_iterator(parts.len(), parts.iter().map(|&(re, im)| Complex64::new(re, im)))
}

fn unit_signal(n: usize) -> impl Strategy<Value = DVector<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| {
            let x = signal(&v);
            let n = x.norm();
            x.unscale(n)
        })
}

/// A generated frame of dimension 4, chosen by index.
fn catalog_frame(which: usize, seed: u64) -> Frame {
    match which % 5 {
        0 => random_frame(4, 6, seed).unwrap(),
        1 => random_onb_pair(4, seed).unwrap().0,
        2 => tight_frame(TightKind::Harmonic { count: 7 }, 4).unwrap(),
        3 => mdct_basis(4, 4).unwrap(),
        _ => bmub(&[1, 3]).unwrap().1,
    }
}

fn catalog_pair(which: usize, seed: u64) -> FramePair {
    let (u, v) = match which % 5 {
        0 => random_frame_pair(4, 7, seed).unwrap(),
        1 => random_onb_pair(4, seed).unwrap(),
        2 => mub_pair(4),
        3 => bmub(&[2, 2]).unwrap(),
        _ => {
            let t = tight_frame(TightKind::UnionOfTwoBases, 4).unwrap();
            let r = rotate_plane(&t, 0.1 + seed as f64 * 1e-3).unwrap();
            (t, r)
        }
    };
    FramePair::new(u, v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn analysis_energy_lies_between_frame_bounds(which in 0usize..5, seed in 0u64..1000, x in unit_signal(4)) {
        let f = catalog_frame(which, seed);
        let b = f.bounds();
        let e = f.analyze(&x).unwrap().norm2().powi(2);
        prop_assert!(e >= b.lower - 1e-10 && e <= b.upper + 1e-10);
    }

    #[test]
    fn dual_of_dual_is_the_frame(which in 0usize..5, seed in 0u64..1000) {
        let f = catalog_frame(which, seed);
        let dd = f.canonical_dual().unwrap().canonical_dual().unwrap();
        prop_assert!((dd.matrix() - f.matrix()).camax() <= 1e-9);
    }

    #[test]
    fn tight_synthesis_rescales_by_bound(x in unit_signal(4), count in 4usize..9) {
        let f = tight_frame(TightKind::Harmonic { count }, 4).unwrap();
        let b = f.bounds();
        prop_assert!(b.is_tight());
        let y = f.synthesize(&f.analyze(&x).unwrap()).unwrap();
        prop_assert!((y - x * Complex64::new(b.lower, 0.0)).norm() <= 1e-9);
    }

    #[test]
    fn change_of_frame_norm_is_bounded_by_rho(which in 0usize..5, seed in 0u64..1000) {
        let p = catalog_pair(which, seed);
        let t = change_of_frame(p.u(), p.v()).unwrap();
        prop_assert!(operator_norm(&t) <= p.rho() + 1e-9);
    }

    #[test]
    fn random_onb_is_orthonormal_and_reproducible(n in 2usize..12, seed in 0u64..1000) {
        let (u, v) = random_onb_pair(n, seed).unwrap();
        for f in [&u, &v] {
            let g = f.matrix() * f.matrix().adjoint();
            let defect = (g - nalgebra::DMatrix::<Complex64>::identity(n, n)).camax();
            prop_assert!(defect <= 1e-10);
        }
        let (u2, v2) = random_onb_pair(n, seed).unwrap();
        prop_assert_eq!(u, u2);
        prop_assert_eq!(v, v2);
    }

    #[test]
    fn onb_coherences(n in 2usize..16, seed in 0u64..1000) {
        let (u, v) = random_onb_pair(n, seed).unwrap();
        let mu1 = coherence_r(&u, &v, 1.0).unwrap();
        prop_assert!(mu1 >= 1.0 / (n as f64).sqrt() - 1e-12);
        prop_assert!((coherence_r(&u, &v, 2.0).unwrap() - 1.0).abs() <= 1e-10);
        let p = FramePair::new(u.clone(), v.clone()).unwrap();
        prop_assert!(p.mu_star().value <= mu1 + 1e-12);
        let cond = improvement_condition(&u, &v, DEFAULT_TIE_TOL).unwrap();
        if cond.predicted_improvement {
            let g = CrossGram::new(&u, &v).unwrap();
            let better = uniform_grid(1.0, 2.0, 201)[1..]
                .iter()
                .any(|&r| g.coherence(r).unwrap() < mu1 - 1e-12);
            prop_assert!(better);
        }
    }

    #[test]
    fn mu_star_never_exceeds_first_order_geomean(which in 0usize..5, seed in 0u64..1000) {
        let p = catalog_pair(which, seed);
        let first = (p.mu_r_uv(1.0).unwrap() * p.mu_r_vu(1.0).unwrap()).sqrt();
        prop_assert!(p.mu_star().value <= first * (1.0 + 1e-12));
        prop_assert!(support_bound(&p).product >= support_bound_at(&p, 1.0).unwrap() * (1.0 - 1e-12));
    }

    #[test]
    fn weak_support_bound_is_dominated(which in 0usize..5, seed in 0u64..1000, r in 1.0f64..1.99) {
        let p = catalog_pair(which, seed);
        let weak = weak_support_bound(&p, r).unwrap();
        let full = support_bound_at(&p, r).unwrap();
        prop_assert!(weak <= full * (1.0 + 1e-12));
        if p.sigma() <= 1.0 + 1e-10 {
            prop_assert!((weak - full).abs() <= 1e-12 * full);
        } else {
            prop_assert!(weak < full);
        }
    }

    #[test]
    fn tight_entropic_bound_ignores_alpha(n in 2usize..10, seed in 0u64..1000, r in 1.0f64..1.99) {
        let (u, v) = random_onb_pair(n, seed).unwrap();
        let p = FramePair::new(u, v).unwrap();
        let base = entropic_rhs(&p, r, 1.0).unwrap().rhs;
        for t in [0.0, 0.3, 0.7] {
            let alpha = r / 2.0 + t * (1.0 - r / 2.0);
            prop_assert!((entropic_rhs(&p, r, alpha).unwrap().rhs - base).abs() <= 1e-12);
        }
        prop_assert!((lp_bound(&p, 2.0, r).unwrap() - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn support_dominates_entropy_sum(which in 0usize..5, seed in 0u64..1000, x in unit_signal(4)) {
        let p = catalog_pair(which, seed);
        let rep = check_support(&p, &x).unwrap();
        let a = p.u().analyze(&x).unwrap();
        let b = p.v().analyze(&x).unwrap();
        prop_assert!(rep.lhs.ln() >= shannon(&a).unwrap() + shannon(&b).unwrap() - 1e-10);
    }

    #[test]
    fn equality_diagnostics_imply_support_equality(n in 2usize..9, seed in 0u64..1000) {
        let (u, v) = random_onb_pair(n, seed).unwrap();
        let p = FramePair::new(u, v).unwrap();
        let cfg = TrialConfig { trials: 20, seed, ..TrialConfig::default() };
        let (mu, mv) = mub_pair(n);
        let q = FramePair::new(mu, mv).unwrap();
        for pair in [&p, &q] {
            for x in trial_signals(pair, &cfg) {
                let d = equality_conditions(pair, &x, 1e-6).unwrap();
                if d.all_satisfied {
                    let rep = check_support(pair, &x).unwrap();
                    prop_assert!(rep.slack <= 1e-6, "{:?}", rep);
                }
            }
        }
    }

    #[test]
    fn certified_splits_are_the_unique_optimum(i in 0usize..6, j in 0usize..6, re in 0.2f64..3.0, im in -3.0f64..3.0) {
        let (u, v) = mub_pair(6);
        let p = FramePair::new(u, v).unwrap();
        let x = p.u().vector(i);
        let y = p.v().vector(j) * Complex64::new(re, im);
        let cert = certify_split(&p, &x, &y).unwrap();
        prop_assert!(cert.certified);
        let s = &x + &y;
        let res = exhaustive_separate(&p, &s, 3, DEFAULT_FEASIBILITY_TOL).unwrap();
        prop_assert!(res.unique);
        prop_assert_eq!(res.min_cost, cert.cost);
        prop_assert!((&res.candidates[0].x - &x).norm() <= 1e-8 * s.norm());
        for c in feasible_splits(&p, &s, 3, DEFAULT_FEASIBILITY_TOL).unwrap().iter().skip(1) {
            let rep = two_split_bound_check(&p, (&x, &y), (&c.x, &c.y), 1e-9).unwrap();
            prop_assert!(rep.pass, "{:?}", rep);
        }
    }
}

#[test]
fn mub_cross_gram_is_flat() {
    for n in [2, 3, 5, 8, 13] {
        let (u, v) = mub_pair(n);
        let g = CrossGram::new(&u, &v).unwrap();
        let target = 1.0 / (n as f64).sqrt();
        assert!(g.moduli().iter().all(|m| (m - target).abs() <= 1e-12));
        for r in uniform_grid(1.0, 2.0, 21) {
            assert!((g.coherence(r).unwrap() - (n as f64).powf(r / 2.0 - 1.0)).abs() <= 1e-12);
        }
    }
}

#[test]
fn coefficient_support_is_relative() {
    let a = CoefficientSeq::from_real(&[1e-3, 1e-12, 0.0, -2e-4]);
    assert_eq!(a.support(), vec![0, 3]);
}
