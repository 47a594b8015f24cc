//! Realization functional built from de la Vallée-Poussin means, and best
//! approximation by angle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::eval::MultiplierNorm2D;
use crate::mixed_norm::{ExponentPair, GridSpec2D};
use crate::spectral::{vp_multiplier, weyl_multiplier, Spectrum2D};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Per-axis degrees `(m1, m2)` of the angle `T_{m1,∞} + T_{∞,m2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AngleDegrees {
    pub m1: u32,
    pub m2: u32,
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// The four terms, in order:
/// `n1^{−α1} n2^{−α2} ‖V^{(α1,α2)}_{n1,n2} f‖`,
/// `n1^{−α1} ‖V^{(α1,0)}_{n1,∞}(f − V_{∞,n2} f)‖`,
/// `n2^{−α2} ‖V^{(0,α2)}_{∞,n2}(f − V_{n1,∞} f)‖`,
/// `‖f − V_{n1,∞} f − V_{∞,n2} f + V_{n1,n2} f‖`.
pub fn realization_terms(
    s: &Spectrum2D,
    n: (u32, u32),
    alpha: (f64, f64),
    pp: ExponentPair,
    oversample: usize,
) -> Result<[f64; 4]> {
    let (n1, n2) = n;
    let (a1, a2) = alpha;
    if n1 == 0 || n2 == 0 {
        return Err(invalid("realization degrees must be positive"));
    }
    if !(a1 > 0.0 && a2 > 0.0) {
        return Err(invalid("realization orders must be positive"));
    }
    if !s.is_zero_mean(1e-12) {
        return Err(invalid("realization functional needs a zero-mean function"));
    }
    let grid = GridSpec2D::for_band(s.kmax1(), s.kmax2(), oversample);
    let mut norm = MultiplierNorm2D::new(s, grid, pp)?;
    // V_{n1,n2} and its complement factor as products of per-axis symbols.
    let mean1 = |k| real(vp_multiplier(n1, k)) * weyl_multiplier(k, a1);
    let mean2 = |k| real(vp_multiplier(n2, k)) * weyl_multiplier(k, a2);
    let rest1 = |k| real(1.0 - vp_multiplier(n1, k));
    let rest2 = |k| real(1.0 - vp_multiplier(n2, k));
    let w1 = (n1 as f64).powf(-a1);
    let w2 = (n2 as f64).powf(-a2);
    Ok([
        w1 * w2 * norm.norm(mean1, mean2),
        w1 * norm.norm(mean1, rest2),
        w2 * norm.norm(rest1, mean2),
        norm.norm(rest1, rest2),
    ])
}

/// Sum of [`realization_terms`].
pub fn realization_functional(
    s: &Spectrum2D,
    n: (u32, u32),
    alpha: (f64, f64),
    pp: ExponentPair,
    oversample: usize,
) -> Result<f64> {
    Ok(realization_terms(s, n, alpha, pp, oversample)?.iter().sum())
}

/// Orthogonal projection onto the cross `{|k1| ≤ m1} ∪ {|k2| ≤ m2}` and the
/// `L^{22}` distance to it, which is the exact best approximation by angle.
pub fn angle_best_l2(s: &Spectrum2D, deg: AngleDegrees) -> (Spectrum2D, f64) {
    let inside = |k1: i64, k2: i64| k1.unsigned_abs() <= deg.m1 as u64 || k2.unsigned_abs() <= deg.m2 as u64;
    let approximant = s.map_multiplier(|k1, k2| real(if inside(k1, k2) { 1.0 } else { 0.0 }));
    let outside: f64 = s
        .iter()
        .filter(|(k1, k2, _)| !inside(*k1, *k2))
        .map(|(_, _, c)| c.norm_sqr())
        .sum();
    (approximant, TWO_PI * outside.sqrt())
}

/// `‖f − V_{m1,∞} f − V_{∞,m2} f + V_{m1,m2} f‖_{p1 p2}`, an upper bound for
/// the best approximation by angle up to an absolute constant.
pub fn angle_near_best(s: &Spectrum2D, deg: AngleDegrees, pp: ExponentPair, oversample: usize) -> Result<f64> {
    let grid = GridSpec2D::for_band(s.kmax1(), s.kmax2(), oversample);
    let mut norm = MultiplierNorm2D::new(s, grid, pp)?;
    Ok(norm.norm(
        |k| real(1.0 - vp_multiplier(deg.m1, k)),
        |k| real(1.0 - vp_multiplier(deg.m2, k)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{make_f0, random_zero_mean_polynomial};
    use crate::mixed_norm::mixed_norm;
    use crate::spectral::{synthesize, vp_derivative_mean, vp_mean, VpOrder};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use std::f64::consts::PI;

    fn cos2cos2() -> Spectrum2D {
        let mut s = Spectrum2D::zeros(2, 2);
        for (a, b) in [(2, 2), (2, -2), (-2, 2), (-2, -2)] {
            s.set(a, b, real(0.25));
        }
        s
    }

    #[test]
    fn f0_keeps_only_the_first_term() {
        let pp = ExponentPair::finite(2.0, 4.0).unwrap();
        let t = realization_terms(&make_f0(), (4, 4), (0.5, 1.5), pp, 4).unwrap();
        assert_eq!(&t[1..], &[0.0, 0.0, 0.0]);
        // (sin x1 sin x2)^{(α1,α2)} = sin(x1 + α1π/2) sin(x2 + α2π/2)
        let sin2 = PI.sqrt();
        let sin4 = (3.0 * PI / 4.0).powf(0.25);
        assert_relative_eq!(t[0], 4f64.powf(-2.0) * sin2 * sin4, max_relative = 1e-12);
    }

    #[test]
    fn matches_composition_of_operators() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let s = random_zero_mean_polynomial(&mut rng, 6);
        let pp: ExponentPair = "1,3".parse().unwrap();
        let (n1, n2, a1, a2) = (2u32, 3u32, 0.8, 1.4);
        let grid = GridSpec2D::for_band(s.kmax1(), s.kmax2(), 4);
        let nrm = |x: &Spectrum2D| mixed_norm(&synthesize(x, grid).unwrap(), pp).unwrap();
        let (f1, f2) = (VpOrder::Finite(n1), VpOrder::Finite(n2));
        let v_n1 = vp_mean(&s, f1, VpOrder::All);
        let v_n2 = vp_mean(&s, VpOrder::All, f2);
        let want = [
            (n1 as f64).powf(-a1) * (n2 as f64).powf(-a2) * nrm(&vp_derivative_mean(&s, f1, f2, a1, a2).unwrap()),
            (n1 as f64).powf(-a1) * nrm(&vp_derivative_mean(&s.sub(&v_n2), f1, VpOrder::All, a1, 0.0).unwrap()),
            (n2 as f64).powf(-a2) * nrm(&vp_derivative_mean(&s.sub(&v_n1), VpOrder::All, f2, 0.0, a2).unwrap()),
            nrm(&s.sub(&v_n1).sub(&v_n2).add(&vp_mean(&s, f1, f2))),
        ];
        let got = realization_terms(&s, (n1, n2), (a1, a2), pp, 4).unwrap();
        for (g, w) in got.iter().zip(want) {
            assert_relative_eq!(*g, w, max_relative = 1e-11);
        }
    }

    #[test]
    fn angle_examples() {
        let deg = AngleDegrees { m1: 1, m2: 1 };
        assert_eq!(angle_best_l2(&make_f0(), deg).1, 0.0);
        assert_relative_eq!(angle_best_l2(&cos2cos2(), deg).1, PI, max_relative = 1e-14);
        assert_eq!(angle_best_l2(&Spectrum2D::zeros(3, 3), deg).1, 0.0);
        let pp = ExponentPair::finite(2.0, 2.0).unwrap();
        let wide = AngleDegrees { m1: 3, m2: 3 };
        assert_eq!(angle_near_best(&cos2cos2(), wide, pp, 4).unwrap(), 0.0);
        assert!(angle_near_best(&cos2cos2(), deg, pp, 4).unwrap() >= PI - 1e-10);
    }

    #[test]
    fn near_best_is_sandwiched_by_exact_l2() {
        // the VP approximant lies in the cross of degrees (2m1 − 1, 2m2 − 1)
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let pp = ExponentPair::finite(2.0, 2.0).unwrap();
        for _ in 0..10 {
            let s = random_zero_mean_polynomial(&mut rng, 8);
            for m in 1..6 {
                let deg = AngleDegrees { m1: m, m2: m.div_ceil(2) };
                let wide = AngleDegrees {
                    m1: 2 * deg.m1 - 1,
                    m2: 2 * deg.m2 - 1,
                };
                let near = angle_near_best(&s, deg, pp, 4).unwrap();
                assert!(near >= angle_best_l2(&s, wide).1 - 1e-10);
                assert!(near <= angle_best_l2(&s, deg).1 + 1e-10);
            }
        }
    }

    #[test]
    fn requires_zero_mean() {
        let mut s = make_f0();
        s = s.padded(1, 1);
        s.set(0, 1, real(1.0));
        let pp = ExponentPair::finite(2.0, 2.0).unwrap();
        assert!(realization_functional(&s, (2, 2), (1.0, 1.0), pp, 4).is_err());
    }
}
