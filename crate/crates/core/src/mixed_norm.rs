//! Uniform periodic grids, sampled functions and mixed `L^{p1 p2}` norms.
//!
//! The inner norm is taken over `x1` for every fixed `x2`, the outer norm over
//! the resulting profile in `x2`. Integrals use the periodic rectangle rule
//! `2π/n · Σ`, which is exact for trigonometric polynomials of degree below
//! `n` and spectrally accurate for `|f|^p` of smooth `f`. Essential suprema
//! are approximated by grid maxima.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::spectral::Spectrum2D;
use crate::sum::compensated_sum;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Uniform `n1 × n2` grid on `[0, 2π)²`; both counts are powers of two ≥ 8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec2D {
    n1: usize,
    n2: usize,
}

impl GridSpec2D {
    pub fn new(n1: usize, n2: usize) -> Result<Self> {
        for n in [n1, n2] {
            if n < 8 || !n.is_power_of_two() {
                return Err(invalid(format!(
                    "grid size {n} must be a power of two >= 8"
                )));
            }
        }
        Ok(Self { n1, n2 })
    }

    /// Smallest admissible grid whose Nyquist band holds `oversample` times
    /// the spectral band on each axis.
    pub fn for_band(kmax1: usize, kmax2: usize, oversample: usize) -> Self {
        Self {
            n1: size_for_band(kmax1, oversample),
            n2: size_for_band(kmax2, oversample),
        }
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn x1(&self, i: usize) -> f64 {
        TWO_PI * i as f64 / self.n1 as f64
    }

    pub fn x2(&self, j: usize) -> f64 {
        TWO_PI * j as f64 / self.n2 as f64
    }

    /// Same grid with both counts doubled.
    pub fn refined(&self) -> Self {
        Self {
            n1: 2 * self.n1,
            n2: 2 * self.n2,
        }
    }
}

/// One-axis grid size used for a band `kmax` with the given oversampling.
pub fn size_for_band(kmax: usize, oversample: usize) -> usize {
    (2 * oversample.max(1) * kmax).max(8).next_power_of_two()
}

/// Samples of a periodic function; `values[[i, j]] = f(x1_i, x2_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample2D {
    spec: GridSpec2D,
    values: Array2<f64>,
}

impl Sample2D {
    pub fn new(spec: GridSpec2D, values: Array2<f64>) -> Result<Self> {
        if values.dim() != (spec.n1, spec.n2) {
            return Err(invalid(format!(
                "sample matrix is {:?}, grid is {}x{}",
                values.dim(),
                spec.n1,
                spec.n2
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("non-finite sample value"));
        }
        Ok(Self { spec, values })
    }

    /// Samples `f` at every grid node.
    pub fn from_fn(spec: GridSpec2D, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = Array2::from_shape_fn((spec.n1, spec.n2), |(i, j)| f(spec.x1(i), spec.x2(j)));
        Self::new(spec, values)
    }

    pub fn zeros(spec: GridSpec2D) -> Self {
        Self {
            spec,
            values: Array2::zeros((spec.n1, spec.n2)),
        }
    }

    pub fn spec(&self) -> GridSpec2D {
        self.spec
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub(crate) fn from_parts_unchecked(spec: GridSpec2D, values: Array2<f64>) -> Self {
        Self { spec, values }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            spec: self.spec,
            values: &self.values * c,
        }
    }

    pub fn add(&self, other: &Sample2D) -> Result<Self> {
        if self.spec != other.spec {
            return Err(invalid("samples live on different grids"));
        }
        Ok(Self {
            spec: self.spec,
            values: &self.values + &other.values,
        })
    }
}

/// Integrability exponent `p ∈ [1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Self> {
        let e = Exponent::Finite(p);
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Exponent::Finite(p) if !(p >= 1.0 && p.is_finite()) => {
                Err(invalid(format!("exponent {p} must be a finite value >= 1 or inf")))
            }
            _ => Ok(()),
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    /// `1/p`, zero for `p = ∞`.
    pub fn reciprocal(&self) -> f64 {
        match *self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinity => 0.0,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") || s == "∞" {
            return Ok(Exponent::Infinity);
        }
        let p: f64 = s
            .parse()
            .map_err(|_| invalid(format!("cannot parse exponent {s:?}")))?;
        Exponent::finite(p)
    }
}

/// Exponent pair `(p1, p2)`: `p1` acts on `x1`, `p2` on `x2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub p1: Exponent,
    pub p2: Exponent,
}

impl ExponentPair {
    pub fn new(p1: Exponent, p2: Exponent) -> Result<Self> {
        p1.validate()?;
        p2.validate()?;
        Ok(Self { p1, p2 })
    }

    pub fn finite(p1: f64, p2: f64) -> Result<Self> {
        Self::new(Exponent::Finite(p1), Exponent::Finite(p2))
    }
}

impl fmt::Display for ExponentPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.p1, self.p2)
    }
}

impl FromStr for ExponentPair {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(',');
        match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => ExponentPair::new(a.parse()?, b.parse()?),
            _ => Err(invalid(format!("expected p1,p2 but got {s:?}"))),
        }
    }
}

/// `q* = q` for finite `q`, `1` for `q = ∞`.
pub fn q_star(p: Exponent) -> f64 {
    match p {
        Exponent::Finite(q) => q,
        Exponent::Infinity => 1.0,
    }
}

/// `(2π/n Σ |v_j|^p)^{1/p}`, or `max |v_j|` for `p = ∞`.
pub fn norm_1d(values: &[f64], p: Exponent) -> Result<f64> {
    if values.is_empty() {
        return Err(invalid("empty sample vector"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(invalid("non-finite sample value"));
    }
    p.validate()?;
    Ok(norm_1d_unchecked(values, p))
}

pub(crate) fn norm_1d_unchecked(values: &[f64], p: Exponent) -> f64 {
    let weight = TWO_PI / values.len() as f64;
    match p {
        Exponent::Infinity => values.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
        Exponent::Finite(1.0) => weight * compensated_sum(values.iter().map(|v| v.abs())),
        Exponent::Finite(2.0) => {
            (weight * compensated_sum(values.iter().map(|v| v * v))).sqrt()
        }
        Exponent::Finite(4.0) => {
            (weight * compensated_sum(values.iter().map(|v| (v * v) * (v * v)))).sqrt().sqrt()
        }
        Exponent::Finite(p) => {
            // Scale by the maximum so large p cannot overflow.
            let m = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if m == 0.0 {
                return 0.0;
            }
            let s = compensated_sum(values.iter().map(|v| (v.abs() / m).powf(p)));
            m * (weight * s).powf(1.0 / p)
        }
    }
}

/// `‖f‖_{p1 p2}`: inner norm over `x1` for each `x2`, outer norm over `x2`.
pub fn mixed_norm(f: &Sample2D, pp: ExponentPair) -> Result<f64> {
    pp.p1.validate()?;
    pp.p2.validate()?;
    let (n1, n2) = f.values.dim();
    let mut column = vec![0.0; n1];
    let mut profile = Vec::with_capacity(n2);
    for j in 0..n2 {
        for (i, c) in column.iter_mut().enumerate() {
            *c = f.values[[i, j]];
        }
        profile.push(norm_1d(&column, pp.p1)?);
    }
    norm_1d(&profile, pp.p2)
}

/// Mixed norm with respect to the probability measure `dx/(2π)` on each axis.
pub fn normalized_mixed_norm(f: &Sample2D, pp: ExponentPair) -> Result<f64> {
    let raw = mixed_norm(f, pp)?;
    Ok(raw * TWO_PI.powf(-pp.p1.reciprocal()) * TWO_PI.powf(-pp.p2.reciprocal()))
}

/// Annihilates every coefficient with `k1 = 0` or `k2 = 0`, projecting onto
/// functions with zero mean in each variable separately.
pub fn project_zero_mean(s: &Spectrum2D) -> Spectrum2D {
    let mut out = s.clone();
    let (k1max, k2max) = (s.kmax1() as i64, s.kmax2() as i64);
    for k2 in -k2max..=k2max {
        out.set(0, k2, Default::default());
    }
    for k1 in -k1max..=k1max {
        out.set(k1, 0, Default::default());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn sine(n: usize) -> Vec<f64> {
        (0..n).map(|j| (TWO_PI * j as f64 / n as f64).sin()).collect()
    }

    #[test]
    fn sine_l2_norm_is_sqrt_pi() {
        let v = sine(1 << 12);
        assert_relative_eq!(norm_1d(&v, Exponent::Finite(2.0)).unwrap(), PI.sqrt(), max_relative = 1e-10);
    }

    #[test]
    fn sine_sup_norm() {
        let v = sine(1 << 12);
        let m = norm_1d(&v, Exponent::Infinity).unwrap();
        assert!((m - 1.0).abs() < 1e-6 && m <= 1.0);
    }

    #[test]
    fn zero_vector_has_zero_norm() {
        let v = vec![0.0; 64];
        for p in [Exponent::Finite(1.0), Exponent::Finite(3.5), Exponent::Infinity] {
            assert_eq!(norm_1d(&v, p).unwrap(), 0.0);
        }
    }

    #[test]
    fn rejects_non_finite_values() {
        let v = vec![0.0, f64::NAN, 1.0];
        assert!(matches!(norm_1d(&v, Exponent::Finite(2.0)), Err(crate::Error::InvalidInput(_))));
        assert!(norm_1d(&[], Exponent::Finite(2.0)).is_err());
        assert!(Exponent::finite(0.5).is_err());
    }

    #[test]
    fn product_of_sines() {
        let spec = GridSpec2D::new(64, 32).unwrap();
        let f = Sample2D::from_fn(spec, |a, b| a.sin() * b.sin()).unwrap();
        let two = ExponentPair::finite(2.0, 2.0).unwrap();
        assert_relative_eq!(mixed_norm(&f, two).unwrap(), PI, max_relative = 1e-10);
        let inf = ExponentPair::new(Exponent::Infinity, Exponent::Infinity).unwrap();
        assert!((mixed_norm(&f, inf).unwrap() - 1.0).abs() < 1e-6);
        let zero = Sample2D::zeros(spec);
        assert_eq!(mixed_norm(&zero, two).unwrap(), 0.0);
    }

    #[test]
    fn q_star_convention() {
        assert_eq!(q_star(Exponent::Finite(2.0)), 2.0);
        assert_eq!(q_star(Exponent::Infinity), 1.0);
        assert_eq!(q_star(Exponent::Finite(1.0)), 1.0);
    }

    #[test]
    fn parses_exponents() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
        assert_eq!("2.5".parse::<Exponent>().unwrap(), Exponent::Finite(2.5));
        let pp: ExponentPair = "1,inf".parse().unwrap();
        assert_eq!(pp.p2, Exponent::Infinity);
        assert!("1".parse::<ExponentPair>().is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec2D::new(12, 16).is_err());
        assert!(GridSpec2D::new(4, 16).is_err());
        assert_eq!(GridSpec2D::for_band(4, 1, 4), GridSpec2D::new(32, 8).unwrap());
    }
}
