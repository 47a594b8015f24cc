use std::f64::consts::PI;

use mixmod_core::harness::{random_zero_mean_polynomial, ulyanov_rhs};
use mixmod_core::mixed_norm::{mixed_norm, norm_1d};
use mixmod_core::smoothness::ModulusEngine;
use mixmod_core::spectral::{
    frac_diff_multiplier, synthesize, vp_mean, vp_multiplier, weyl_derivative, weyl_multiplier,
};
use mixmod_core::{Exponent, ExponentPair, GridSpec2D, ModulusControls, Sample2D, UlyanovQuery, VpOrder};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn exponent() -> impl Strategy<Value = Exponent> {
    prop_oneof![
        (1.0f64..6.0).prop_map(Exponent::Finite),
        Just(Exponent::Finite(1.0)),
        Just(Exponent::Finite(2.0)),
        Just(Exponent::Infinity),
    ]
}

fn pair() -> impl Strategy<Value = ExponentPair> {
    (exponent(), exponent()).prop_map(|(a, b)| ExponentPair::new(a, b).unwrap())
}

fn trig(c: [f64; 4]) -> impl Fn(f64) -> f64 {
    move |x| c[0] + c[1] * x.cos() + c[2] * (2.0 * x).sin() + c[3] * (3.0 * x + 0.4).cos()
}

fn grid() -> GridSpec2D {
    GridSpec2D::new(32, 16).unwrap()
}

fn sample(f: impl Fn(f64, f64) -> f64) -> Sample2D {
    Sample2D::from_fn(grid(), f).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_is_absolutely_homogeneous(c in prop::array::uniform4(-2.0f64..2.0), lambda in -5.0f64..5.0, pp in pair()) {
        let g = trig(c);
        let f = sample(|x, y| g(x) * (y + 0.3).cos() + g(y));
        let scaled = sample(|x, y| lambda * (g(x) * (y + 0.3).cos() + g(y)));
        prop_assert!(close(mixed_norm(&scaled, pp).unwrap(), lambda.abs() * mixed_norm(&f, pp).unwrap(), 1e-12));
    }

    #[test]
    fn norm_satisfies_triangle_inequality(c in prop::array::uniform4(-2.0f64..2.0), d in prop::array::uniform4(-2.0f64..2.0), pp in pair()) {
        let (g, h) = (trig(c), trig(d));
        let f1 = sample(|x, y| g(x) * h(y));
        let f2 = sample(|x, y| h(x) + g(x + y));
        let sum = sample(|x, y| g(x) * h(y) + h(x) + g(x + y));
        let lhs = mixed_norm(&sum, pp).unwrap();
        let rhs = mixed_norm(&f1, pp).unwrap() + mixed_norm(&f2, pp).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn norm_of_product_factorises(c in prop::array::uniform4(-2.0f64..2.0), d in prop::array::uniform4(-2.0f64..2.0), pp in pair()) {
        let (g, h) = (trig(c), trig(d));
        let f = sample(|x, y| g(x) * h(y));
        let gs: Vec<f64> = (0..grid().n1()).map(|i| g(grid().x1(i))).collect();
        let hs: Vec<f64> = (0..grid().n2()).map(|j| h(grid().x2(j))).collect();
        let expected = norm_1d(&gs, pp.p1).unwrap() * norm_1d(&hs, pp.p2).unwrap();
        prop_assert!(close(mixed_norm(&f, pp).unwrap(), expected, 1e-12));
    }

    #[test]
    fn weyl_multipliers_compose(k in -50i64..50, a in 0.0f64..3.0, b in 0.0f64..3.0) {
        let lhs = weyl_multiplier(k, a) * weyl_multiplier(k, b);
        let rhs = weyl_multiplier(k, a + b);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
    }

    #[test]
    fn weyl_derivatives_compose_on_polynomials(seed in any::<u64>(), a in (0.1f64..2.0, 0.1f64..2.0), b in (0.1f64..2.0, 0.1f64..2.0)) {
        let s = random_zero_mean_polynomial(&mut ChaCha8Rng::seed_from_u64(seed), 5);
        let twice = weyl_derivative(&weyl_derivative(&s, a.0, a.1).unwrap(), b.0, b.1).unwrap();
        let once = weyl_derivative(&s, a.0 + b.0, a.1 + b.1).unwrap();
        prop_assert!(twice.max_abs_diff(&once) <= 1e-12 * once.max_abs());
    }

    #[test]
    fn difference_symbol_has_sine_magnitude(k in -40i64..40, h in -PI..PI, alpha in 0.05f64..4.0) {
        let m = frac_diff_multiplier(k, h, alpha).norm();
        let expected = (2.0 * (k as f64 * h / 2.0).sin()).abs().powf(alpha);
        prop_assert!((m - expected).abs() <= 1e-12 * expected.max(1.0));
    }

    #[test]
    fn vp_multiplier_reproduces_low_band(n in 1u32..64, k in -200i64..200) {
        let m = vp_multiplier(n, k);
        let a = k.unsigned_abs() as u32;
        if a <= n {
            prop_assert_eq!(m, 1.0);
        } else if a >= 2 * n {
            prop_assert_eq!(m, 0.0);
        } else {
            prop_assert!((0.0..=1.0).contains(&m));
        }
    }

    #[test]
    fn vp_mean_reproduces_polynomials(seed in any::<u64>(), band in 1usize..6, extra in 0u32..4) {
        let s = random_zero_mean_polynomial(&mut ChaCha8Rng::seed_from_u64(seed), band);
        let n = VpOrder::Finite(band as u32 + extra);
        prop_assert!(vp_mean(&s, n, n).max_abs_diff(&s) == 0.0);
    }

    #[test]
    fn modulus_is_homogeneous(seed in any::<u64>(), lambda in 0.1f64..10.0, pp in pair(), alpha in (0.3f64..2.5, 0.3f64..2.5)) {
        let s = random_zero_mean_polynomial(&mut ChaCha8Rng::seed_from_u64(seed), 3);
        let mut e1 = ModulusEngine::new(&s, pp, 4).unwrap();
        let mut e2 = ModulusEngine::new(&s.scale(lambda), pp, 4).unwrap();
        for (h1, h2) in [(0.3, -0.7), (1.1, 0.2), (-2.0, 2.5)] {
            let a = e1.difference_norm(alpha.0, alpha.1, h1, h2);
            let b = e2.difference_norm(alpha.0, alpha.1, h1, h2);
            prop_assert!(close(b, lambda * a, 1e-10));
        }
    }

    #[test]
    fn difference_norm_matches_synthesised_difference(seed in any::<u64>(), pp in pair(), h in (-3.0f64..3.0, -3.0f64..3.0)) {
        let s = random_zero_mean_polynomial(&mut ChaCha8Rng::seed_from_u64(seed), 3);
        let spec = GridSpec2D::for_band(3, 3, 4);
        let f = synthesize(&s, spec).unwrap();
        let shifted = |a: f64, b: f64| synthesize(&s.map_separable(
            |k| Complex64::from_polar(1.0, k as f64 * a),
            |k| Complex64::from_polar(1.0, k as f64 * b),
        ), spec).unwrap();
        let (h1, h2) = h;
        let g = shifted(h1, h2);
        let u = shifted(0.0, h2);
        let v = shifted(h1, 0.0);
        let diff = Sample2D::new(spec, f.values() - u.values() - v.values() + g.values()).unwrap();
        let mut e = ModulusEngine::with_grid(&s, pp, spec).unwrap();
        let via_engine = e.difference_norm(1.0, 1.0, h1, h2);
        prop_assert!((via_engine - mixed_norm(&diff, pp).unwrap()).abs() <= 1e-10 * via_engine.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn rhs_grows_with_dyadic_steps(seed in any::<u64>(), j in (1i32..4, 1i32..4), alpha in (0.5f64..2.0, 0.5f64..2.0)) {
        let s = random_zero_mean_polynomial(&mut ChaCha8Rng::seed_from_u64(seed), 2);
        let pp: ExponentPair = "1,2".parse().unwrap();
        let qq: ExponentPair = "inf,4".parse().unwrap();
        let mut q = UlyanovQuery::new(alpha, pp, qq);
        q.levels = 6;
        q.controls = ModulusControls { steps_per_axis: 9, refine_rounds: 1, oversample: 2 };
        let (d1, d2) = (2f64.powi(-j.0), 2f64.powi(-j.1));
        let base = ulyanov_rhs(&s, &q, d1, d2).unwrap();
        prop_assert!(ulyanov_rhs(&s, &q, 2.0 * d1, d2).unwrap() >= base * (1.0 - 1e-12));
        prop_assert!(ulyanov_rhs(&s, &q, d1, 2.0 * d2).unwrap() >= base * (1.0 - 1e-12));
    }
}
