//! Fractional differences and mixed moduli of smoothness.
//!
//! Two independent routes compute `Δ^α_h`: the binomial series of
//! translates ([`frac_diff_series`]) and the closed-form symbol
//! ([`frac_diff_spectral`]). The modulus itself is evaluated spectrally and
//! its supremum over steps is approached from below by a symmetric grid
//! search followed by local refinement around the best cell.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, invalid_query, Result};
use crate::eval::{MultiplierNorm1D, MultiplierNorm2D};
use crate::mixed_norm::{size_for_band, Exponent, ExponentPair, GridSpec2D, Sample2D};
use crate::spectral::{analyze, frac_diff_multiplier, one_minus_unit, synthesize, Spectrum1D, Spectrum2D};
use crate::sum::CompensatedSum;

/// Hard cap on the number of binomial terms summed explicitly.
pub const SERIES_CAP: usize = 100_000;
/// Summation-by-parts steps used for the remainder of a capped series.
pub const REMAINDER_ORDERS: usize = 4;

/// `C(α, ν) = α(α−1)…(α−ν+1)/ν!` by the product recurrence.
pub fn binom_coeff(alpha: f64, nu: u64) -> f64 {
    let mut c = 1.0;
    for j in 1..=nu {
        c *= (alpha - j as f64 + 1.0) / j as f64;
    }
    c
}

/// Truncation data for `Σ_ν (−1)^ν C(α,ν) w^ν` on `|w| = 1`.
///
/// For `ν ≥ ⌈α⌉` the terms `(−1)^ν C(α,ν)` share one sign, so the absolute
/// tail after `N` terms equals `|C(α−1, N)|`. That bound picks `nu_max`.
/// When the cap is reached the remainder is estimated by summation by
/// parts: the differences of the coefficients of `(1−w)^α` are the
/// coefficients of `(1−w)^{α+1}`, which decay one order faster.
#[derive(Debug, Clone)]
pub struct BinomialTail {
    pub alpha: f64,
    pub tolerance: f64,
    pub nu_max: usize,
    /// `nu_max` hit the cap before the tail bound dropped below tolerance.
    pub capped: bool,
    signed: Vec<f64>,
    boundary: [f64; REMAINDER_ORDERS],
    dropped: f64,
}

impl BinomialTail {
    pub fn new(alpha: f64, tolerance: f64) -> Result<Self> {
        Self::with_cap(alpha, tolerance, SERIES_CAP)
    }

    pub fn with_cap(alpha: f64, tolerance: f64, cap: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid(format!("difference order {alpha} must be positive")));
        }
        if !(tolerance > 0.0) {
            return Err(invalid("series tolerance must be positive"));
        }
        let first = alpha.ceil() as usize;
        // running value of C(α−1, n)
        let mut tail = 1.0_f64;
        let mut n = 0usize;
        while n < cap && (n < first || tail.abs() >= tolerance) {
            n += 1;
            tail *= (alpha - n as f64) / n as f64;
        }
        let capped = n >= first && tail.abs() >= tolerance;
        let mut signed = Vec::with_capacity(n + 1);
        let mut a = 1.0;
        signed.push(a);
        for nu in 1..=n {
            a *= (nu as f64 - 1.0 - alpha) / nu as f64;
            signed.push(a);
        }
        let signed_coeff = |order: f64, m: usize| {
            let mut c = 1.0;
            for j in 1..=m {
                c *= (j as f64 - 1.0 - order) / j as f64;
            }
            c
        };
        let mut boundary = [0.0; REMAINDER_ORDERS];
        for (r, b) in boundary.iter_mut().enumerate() {
            *b = signed_coeff(alpha + r as f64, n + 1 + r);
        }
        let dropped = binom_coeff(alpha + REMAINDER_ORDERS as f64 - 1.0, (n + REMAINDER_ORDERS) as u64).abs();
        Ok(Self {
            alpha,
            tolerance,
            nu_max: n,
            capped,
            signed,
            boundary,
            dropped,
        })
    }

    /// `Σ_{ν > nu_max} |C(α, ν)|`.
    pub fn tail_bound(&self) -> f64 {
        binom_coeff(self.alpha - 1.0, self.nu_max as u64).abs()
    }

    /// Bound on the error of [`Self::series_factor`] at `θ = kh`.
    pub fn remainder_bound(&self, theta: f64) -> f64 {
        let gap = one_minus_unit(theta).norm();
        if gap * self.nu_max as f64 >= 64.0 {
            self.dropped / gap.powi(REMAINDER_ORDERS as i32)
        } else if gap == 0.0 {
            0.0
        } else {
            self.tail_bound()
        }
    }

    /// The series `Σ_ν (−1)^ν C(α,ν) e^{ik(α−ν)h}` acting on `e^{ikx}`.
    pub fn series_factor(&self, k: i64, h: f64) -> Complex64 {
        let theta = k as f64 * h;
        let (mut re, mut im) = (CompensatedSum::default(), CompensatedSum::default());
        for (nu, a) in self.signed.iter().enumerate() {
            let w = Complex64::cis(-(nu as f64) * theta) * *a;
            re.add(w.re);
            im.add(w.im);
        }
        let mut sum = Complex64::new(re.value(), im.value());
        let gap = one_minus_unit(theta);
        let n = self.nu_max;
        if gap.norm() == 0.0 {
            // every translate coincides and the alternating binomial sum is 0
            sum = Complex64::new(0.0, 0.0);
        } else if gap.norm() * n as f64 >= 64.0 {
            let mut denom = gap;
            for (r, b) in self.boundary.iter().enumerate() {
                let m = (n + 1 + r) as f64;
                sum += Complex64::cis(-m * theta) * *b / denom;
                denom *= gap;
            }
        }
        Complex64::cis(self.alpha * theta) * sum
    }
}


#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X1,
    X2,
}

fn apply_on_axis(s: &Spectrum2D, axis: Axis, m: impl Fn(i64) -> Complex64) -> Spectrum2D {
    let one = |_| Complex64::new(1.0, 0.0);
    match axis {
        Axis::X1 => s.map_separable(m, one),
        Axis::X2 => s.map_separable(one, m),
    }
}

/// Series route on a spectrum: each translate is an exact phase shift.
pub fn frac_diff_series_spectrum(
    s: &Spectrum2D,
    axis: Axis,
    h: f64,
    alpha: f64,
    tol: f64,
) -> Result<Spectrum2D> {
    let tail = BinomialTail::new(alpha, tol)?;
    let kmax = match axis {
        Axis::X1 => s.kmax1(),
        Axis::X2 => s.kmax2(),
    } as i64;
    let factors: Vec<Complex64> = (-kmax..=kmax).map(|k| tail.series_factor(k, h)).collect();
    Ok(apply_on_axis(s, axis, |k| factors[(k + kmax) as usize]))
}

/// `Δ^α_h f` along one axis from the truncated binomial series of translates.
pub fn frac_diff_series(f: &Sample2D, axis: Axis, h: f64, alpha: f64, tol: f64) -> Result<Sample2D> {
    let s = analyze(f);
    let d = frac_diff_series_spectrum(&s, axis, h, alpha, tol)?;
    synthesize(&d, f.spec())
}

/// `Δ^α_h` along one axis through its symbol.
pub fn frac_diff_spectral(s: &Spectrum2D, axis: Axis, h: f64, alpha: f64) -> Spectrum2D {
    apply_on_axis(s, axis, |k| frac_diff_multiplier(k, h, alpha))
}

/// `Δ^{α1}_{h1}(Δ^{α2}_{h2} f)`.
pub fn mixed_difference(s: &Spectrum2D, h1: f64, h2: f64, alpha1: f64, alpha2: f64) -> Spectrum2D {
    let inner = frac_diff_spectral(s, Axis::X2, h2, alpha2);
    frac_diff_spectral(&inner, Axis::X1, h1, alpha1)
}

/// Discretisation of the supremum over steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModulusControls {
    /// Odd number of grid steps per axis covering `[−δ, δ]`.
    pub steps_per_axis: usize,
    /// Local refinement rounds, each halving the spacing.
    pub refine_rounds: usize,
    /// Spatial oversampling relative to the spectral band.
    pub oversample: usize,
}

impl Default for ModulusControls {
    fn default() -> Self {
        Self {
            steps_per_axis: 17,
            refine_rounds: 3,
            oversample: 4,
        }
    }
}

impl ModulusControls {
    pub fn validate(&self) -> Result<()> {
        if self.steps_per_axis < 9 || self.steps_per_axis.is_multiple_of(2) {
            return Err(invalid_query(format!(
                "steps per axis must be odd and >= 9, got {}",
                self.steps_per_axis
            )));
        }
        if self.oversample == 0 {
            return Err(invalid_query("oversampling factor must be >= 1"));
        }
        Ok(())
    }

    /// Twice as many intervals per axis.
    pub fn denser(&self) -> Self {
        Self {
            steps_per_axis: 2 * self.steps_per_axis - 1,
            ..*self
        }
    }
}

/// Orders, step bounds and exponents of one modulus evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulusQuery {
    pub alpha1: f64,
    pub alpha2: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub pp: ExponentPair,
    pub controls: ModulusControls,
}

impl ModulusQuery {
    pub fn new(alpha: (f64, f64), delta: (f64, f64), pp: ExponentPair) -> Self {
        Self {
            alpha1: alpha.0,
            alpha2: alpha.1,
            delta1: delta.0,
            delta2: delta.1,
            pp,
            controls: ModulusControls::default(),
        }
    }

    pub fn with_controls(mut self, controls: ModulusControls) -> Self {
        self.controls = controls;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha1)?;
        check_alpha(self.alpha2)?;
        check_delta(self.delta1)?;
        check_delta(self.delta2)?;
        self.pp.p1.validate()?;
        self.pp.p2.validate()?;
        self.controls.validate()
    }
}

fn check_alpha(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(invalid_query(format!("smoothness order {a} must be positive")))
    }
}

fn check_delta(d: f64) -> Result<()> {
    if (0.0..=std::f64::consts::PI).contains(&d) {
        Ok(())
    } else {
        Err(invalid_query(format!("step bound {d} must lie in [0, π]")))
    }
}

/// Result of a supremum search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulusOutcome {
    pub value: f64,
    pub h1: f64,
    pub h2: f64,
    /// Relative increase contributed by the last refinement round.
    pub last_round_gain: f64,
    pub evaluations: usize,
}

/// `m` points `δ·(i − c)/c`, hitting `±δ` and `0` exactly.
fn step_grid(delta: f64, steps: usize) -> Vec<f64> {
    if delta == 0.0 {
        return vec![0.0];
    }
    let c = (steps / 2) as f64;
    (0..steps).map(|i| delta * (i as f64 - c) / c).collect()
}

fn search(
    delta1: f64,
    delta2: f64,
    controls: &ModulusControls,
    mut eval: impl FnMut(f64, f64) -> f64,
) -> ModulusOutcome {
    let g1 = step_grid(delta1, controls.steps_per_axis);
    let g2 = step_grid(delta2, controls.steps_per_axis);
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    let mut evaluations = 0;
    for &h1 in &g1 {
        for &h2 in &g2 {
            let v = eval(h1, h2);
            evaluations += 1;
            if v > best.0 {
                best = (v, h1, h2);
            }
        }
    }
    let c = (controls.steps_per_axis / 2) as f64;
    let (mut d1, mut d2) = (delta1 / c, delta2 / c);
    let mut last_round_gain = 0.0;
    for _ in 0..controls.refine_rounds {
        d1 /= 2.0;
        d2 /= 2.0;
        let before = best.0;
        let (c1, c2) = (best.1, best.2);
        for a in -2i32..=2 {
            for b in -2i32..=2 {
                if (a == 0 && b == 0) || (d1 == 0.0 && a != 0) || (d2 == 0.0 && b != 0) {
                    continue;
                }
                let h1 = c1 + a as f64 * d1;
                let h2 = c2 + b as f64 * d2;
                if h1.abs() > delta1 || h2.abs() > delta2 {
                    continue;
                }
                let v = eval(h1, h2);
                evaluations += 1;
                if v > best.0 {
                    best = (v, h1, h2);
                }
            }
        }
        last_round_gain = if best.0 > 0.0 { (best.0 - before) / best.0 } else { 0.0 };
    }
    ModulusOutcome {
        value: best.0.max(0.0),
        h1: best.1,
        h2: best.2,
        last_round_gain,
        evaluations,
    }
}

/// Prepared evaluator of mixed moduli for one function, exponent pair and
/// spatial grid. Reuse it across orders and step bounds.
#[derive(Clone)]
pub struct ModulusEngine {
    norm: MultiplierNorm2D,
}

impl ModulusEngine {
    pub fn new(s: &Spectrum2D, pp: ExponentPair, oversample: usize) -> Result<Self> {
        let grid = GridSpec2D::for_band(s.kmax1(), s.kmax2(), oversample);
        Self::with_grid(s, pp, grid)
    }

    pub fn with_grid(s: &Spectrum2D, pp: ExponentPair, grid: GridSpec2D) -> Result<Self> {
        Ok(Self {
            norm: MultiplierNorm2D::new(s, grid, pp)?,
        })
    }

    pub fn grid(&self) -> GridSpec2D {
        self.norm.grid()
    }

    /// `‖Δ^{α1}_{h1} Δ^{α2}_{h2} f‖_{p1 p2}`.
    pub fn difference_norm(&mut self, alpha1: f64, alpha2: f64, h1: f64, h2: f64) -> f64 {
        self.norm.norm(
            |k| frac_diff_multiplier(k, h1, alpha1),
            |k| frac_diff_multiplier(k, h2, alpha2),
        )
    }

    pub fn modulus(
        &mut self,
        alpha: (f64, f64),
        delta: (f64, f64),
        controls: &ModulusControls,
    ) -> Result<ModulusOutcome> {
        check_alpha(alpha.0)?;
        check_alpha(alpha.1)?;
        check_delta(delta.0)?;
        check_delta(delta.1)?;
        controls.validate()?;
        if delta.0 == 0.0 || delta.1 == 0.0 {
            return Ok(ModulusOutcome {
                value: 0.0,
                h1: 0.0,
                h2: 0.0,
                last_round_gain: 0.0,
                evaluations: 0,
            });
        }
        Ok(search(delta.0, delta.1, controls, |h1, h2| {
            self.difference_norm(alpha.0, alpha.1, h1, h2)
        }))
    }

    /// Moduli over nested step boxes of a single lattice: entry `(a, b)` is
    /// the maximum over `|i| ≤ a`, `|j| ≤ b` of the difference norm at
    /// `(i·d1, j·d2)`. Inclusion of boxes makes the result monotone.
    pub fn nested_moduli(
        &mut self,
        alpha: (f64, f64),
        spacing: (f64, f64),
        counts: (usize, usize),
    ) -> Array2<f64> {
        let (c1, c2) = (counts.0 as i64, counts.1 as i64);
        let mut values = Array2::zeros((2 * counts.0 + 1, 2 * counts.1 + 1));
        for i in -c1..=c1 {
            for j in -c2..=c2 {
                values[[(i + c1) as usize, (j + c2) as usize]] =
                    self.difference_norm(alpha.0, alpha.1, i as f64 * spacing.0, j as f64 * spacing.1);
            }
        }
        Array2::from_shape_fn((counts.0 + 1, counts.1 + 1), |(a, b)| {
            let mut m = 0.0_f64;
            for i in (c1 - a as i64)..=(c1 + a as i64) {
                for j in (c2 - b as i64)..=(c2 + b as i64) {
                    m = m.max(values[[i as usize, j as usize]]);
                }
            }
            m
        })
    }
}

/// `ω_{α1,α2}(f, δ1, δ2)_{p1 p2}` as a lower estimate of the supremum.
pub fn mixed_modulus(s: &Spectrum2D, q: &ModulusQuery) -> Result<f64> {
    Ok(mixed_modulus_detailed(s, q)?.value)
}

pub fn mixed_modulus_detailed(s: &Spectrum2D, q: &ModulusQuery) -> Result<ModulusOutcome> {
    q.validate()?;
    let mut engine = ModulusEngine::new(s, q.pp, q.controls.oversample)?;
    engine.modulus((q.alpha1, q.alpha2), (q.delta1, q.delta2), &q.controls)
}

/// Prepared one-variable modulus evaluator on an explicit grid size.
#[derive(Clone)]
pub struct Modulus1DEngine {
    norm: MultiplierNorm1D,
}

impl Modulus1DEngine {
    pub fn new(s: &Spectrum1D, n: usize, p: Exponent) -> Result<Self> {
        Ok(Self {
            norm: MultiplierNorm1D::new(s, n, p)?,
        })
    }

    pub fn difference_norm(&mut self, alpha: f64, h: f64) -> f64 {
        self.norm.norm(|k| frac_diff_multiplier(k, h, alpha))
    }

    pub fn modulus(&mut self, alpha: f64, delta: f64, controls: &ModulusControls) -> Result<ModulusOutcome> {
        check_alpha(alpha)?;
        check_delta(delta)?;
        controls.validate()?;
        if delta == 0.0 {
            return Ok(ModulusOutcome {
                value: 0.0,
                h1: 0.0,
                h2: 0.0,
                last_round_gain: 0.0,
                evaluations: 0,
            });
        }
        Ok(search(delta, 0.0, controls, |h, _| self.difference_norm(alpha, h)))
    }
}

/// `ω_α(f, δ)_p` for a one-variable spectrum, grid from the oversampling.
pub fn modulus_1d(
    s: &Spectrum1D,
    alpha: f64,
    delta: f64,
    p: Exponent,
    controls: &ModulusControls,
) -> Result<f64> {
    let n = size_for_band(s.kmax(), controls.oversample);
    Ok(Modulus1DEngine::new(s, n, p)?.modulus(alpha, delta, controls)?.value)
}
