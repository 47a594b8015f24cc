//! Fourier analysis and the diagonal multipliers acting on periodic spectra.
//!
//! Coefficients are stored in a centred layout: index `k + kmax` holds the
//! coefficient of `e^{ikx}`. All operators here are Fourier multipliers, so
//! they commute and are exact on the stored band.

use std::f64::consts::FRAC_PI_2;

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::mixed_norm::{GridSpec2D, Sample2D};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Coefficients `c(k1, k2)` for `|k1| ≤ kmax1`, `|k2| ≤ kmax2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum2D {
    kmax1: usize,
    kmax2: usize,
    coeffs: Array2<Complex64>,
}

impl Spectrum2D {
    pub fn zeros(kmax1: usize, kmax2: usize) -> Self {
        Self {
            kmax1,
            kmax2,
            coeffs: Array2::from_elem((2 * kmax1 + 1, 2 * kmax2 + 1), ZERO),
        }
    }

    pub fn from_coeffs(coeffs: Array2<Complex64>) -> Result<Self> {
        let (r, c) = coeffs.dim();
        if r % 2 == 0 || c % 2 == 0 {
            return Err(invalid("centred coefficient matrix must have odd dimensions"));
        }
        if coeffs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("non-finite Fourier coefficient"));
        }
        Ok(Self {
            kmax1: r / 2,
            kmax2: c / 2,
            coeffs,
        })
    }

    pub fn kmax1(&self) -> usize {
        self.kmax1
    }

    pub fn kmax2(&self) -> usize {
        self.kmax2
    }

    pub fn coeffs(&self) -> &Array2<Complex64> {
        &self.coeffs
    }

    /// Coefficient at `(k1, k2)`, zero outside the stored band.
    pub fn get(&self, k1: i64, k2: i64) -> Complex64 {
        if k1.unsigned_abs() as usize > self.kmax1 || k2.unsigned_abs() as usize > self.kmax2 {
            return ZERO;
        }
        self.coeffs[[(k1 + self.kmax1 as i64) as usize, (k2 + self.kmax2 as i64) as usize]]
    }

    /// Sets a coefficient; panics outside the band.
    pub fn set(&mut self, k1: i64, k2: i64, c: Complex64) {
        let i = (k1 + self.kmax1 as i64) as usize;
        let j = (k2 + self.kmax2 as i64) as usize;
        self.coeffs[[i, j]] = c;
    }

    /// Iterates `(k1, k2, c)` over the stored band.
    pub fn iter(&self) -> impl Iterator<Item = (i64, i64, Complex64)> + '_ {
        let (o1, o2) = (self.kmax1 as i64, self.kmax2 as i64);
        self.coeffs
            .indexed_iter()
            .map(move |((i, j), &c)| (i as i64 - o1, j as i64 - o2, c))
    }

    /// Multiplies every coefficient by `m(k1, k2)`.
    pub fn map_multiplier(&self, m: impl Fn(i64, i64) -> Complex64) -> Self {
        let (o1, o2) = (self.kmax1 as i64, self.kmax2 as i64);
        let mut out = self.clone();
        for ((i, j), c) in out.coeffs.indexed_iter_mut() {
            *c *= m(i as i64 - o1, j as i64 - o2);
        }
        out
    }

    /// Multiplies by a separable multiplier given per axis.
    pub fn map_separable(
        &self,
        m1: impl Fn(i64) -> Complex64,
        m2: impl Fn(i64) -> Complex64,
    ) -> Self {
        let a: Vec<Complex64> = (-(self.kmax1 as i64)..=self.kmax1 as i64).map(m1).collect();
        let b: Vec<Complex64> = (-(self.kmax2 as i64)..=self.kmax2 as i64).map(m2).collect();
        let mut out = self.clone();
        for ((i, j), c) in out.coeffs.indexed_iter_mut() {
            *c *= a[i] * b[j];
        }
        out
    }

    /// Copy widened to a larger band; extra coefficients are zero.
    pub fn padded(&self, kmax1: usize, kmax2: usize) -> Self {
        let kmax1 = kmax1.max(self.kmax1);
        let kmax2 = kmax2.max(self.kmax2);
        let mut out = Self::zeros(kmax1, kmax2);
        for (k1, k2, c) in self.iter() {
            out.set(k1, k2, c);
        }
        out
    }

    /// Smallest band holding every coefficient above `tol · max|c|`.
    pub fn trimmed(&self, tol: f64) -> Self {
        let cut = tol * self.max_abs();
        let (mut b1, mut b2) = (0usize, 0usize);
        for (k1, k2, c) in self.iter() {
            if c.norm() > cut {
                b1 = b1.max(k1.unsigned_abs() as usize);
                b2 = b2.max(k2.unsigned_abs() as usize);
            }
        }
        let mut out = Self::zeros(b1, b2);
        for k1 in -(b1 as i64)..=b1 as i64 {
            for k2 in -(b2 as i64)..=b2 as i64 {
                out.set(k1, k2, self.get(k1, k2));
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.norm()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    /// `c(−k) = conj c(k)` within `tol · max|c|`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let cut = tol * self.max_abs().max(f64::MIN_POSITIVE);
        self.iter()
            .all(|(k1, k2, c)| (self.get(-k1, -k2).conj() - c).norm() <= cut)
    }

    fn zip_with(&self, other: &Spectrum2D, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let b1 = self.kmax1.max(other.kmax1);
        let b2 = self.kmax2.max(other.kmax2);
        let mut out = Self::zeros(b1, b2);
        for k1 in -(b1 as i64)..=b1 as i64 {
            for k2 in -(b2 as i64)..=b2 as i64 {
                out.set(k1, k2, f(self.get(k1, k2), other.get(k1, k2)));
            }
        }
        out
    }

    pub fn add(&self, other: &Spectrum2D) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Spectrum2D) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            kmax1: self.kmax1,
            kmax2: self.kmax2,
            coeffs: self.coeffs.mapv(|z| z * c),
        }
    }

    /// `max |c − c'|` over the union of both bands.
    pub fn max_abs_diff(&self, other: &Spectrum2D) -> f64 {
        self.sub(other).max_abs()
    }

    /// Zero-mean in each variable: no mass on `k1 = 0` or `k2 = 0`.
    pub fn is_zero_mean(&self, tol: f64) -> bool {
        let cut = tol * self.max_abs();
        self.iter()
            .filter(|(k1, k2, _)| *k1 == 0 || *k2 == 0)
            .all(|(_, _, c)| c.norm() <= cut)
    }

    pub fn to_doc(&self) -> SpectrumDoc {
        SpectrumDoc {
            kmax1: self.kmax1,
            kmax2: self.kmax2,
            re: self.coeffs.rows().into_iter().map(|r| r.iter().map(|c| c.re).collect()).collect(),
            im: self.coeffs.rows().into_iter().map(|r| r.iter().map(|c| c.im).collect()).collect(),
        }
    }

    pub fn from_doc(doc: &SpectrumDoc) -> Result<Self> {
        let (r, c) = (2 * doc.kmax1 + 1, 2 * doc.kmax2 + 1);
        let shape_ok = |m: &Vec<Vec<f64>>| m.len() == r && m.iter().all(|row| row.len() == c);
        if !shape_ok(&doc.re) || !shape_ok(&doc.im) {
            return Err(invalid(format!(
                "spectrum document must hold {r}x{c} matrices for re and im"
            )));
        }
        let coeffs = Array2::from_shape_fn((r, c), |(i, j)| Complex64::new(doc.re[i][j], doc.im[i][j]));
        Self::from_coeffs(coeffs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("spectrum document is always serialisable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: SpectrumDoc =
            serde_json::from_str(s).map_err(|e| invalid(format!("bad spectrum document: {e}")))?;
        Self::from_doc(&doc)
    }
}

/// JSON form of a [`Spectrum2D`]: rows run over `k1 = −kmax1..kmax1`,
/// columns over `k2 = −kmax2..kmax2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDoc {
    pub kmax1: usize,
    pub kmax2: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// One-variable spectrum, `c(k)` for `|k| ≤ kmax`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum1D {
    kmax: usize,
    coeffs: Vec<Complex64>,
}

impl Spectrum1D {
    pub fn zeros(kmax: usize) -> Self {
        Self {
            kmax,
            coeffs: vec![ZERO; 2 * kmax + 1],
        }
    }

    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(invalid("centred coefficient vector must have odd length"));
        }
        if coeffs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("non-finite Fourier coefficient"));
        }
        Ok(Self {
            kmax: coeffs.len() / 2,
            coeffs,
        })
    }

    /// `Σ (a_k cos kx + b_k sin kx)` for `k = 1..`, given `(a_k, b_k)` pairs.
    pub fn from_cos_sin(ab: &[(f64, f64)]) -> Self {
        let mut s = Self::zeros(ab.len());
        for (i, &(a, b)) in ab.iter().enumerate() {
            let k = i as i64 + 1;
            s.set(k, Complex64::new(a / 2.0, -b / 2.0));
            s.set(-k, Complex64::new(a / 2.0, b / 2.0));
        }
        s
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn get(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.kmax {
            return ZERO;
        }
        self.coeffs[(k + self.kmax as i64) as usize]
    }

    pub fn set(&mut self, k: i64, c: Complex64) {
        let i = (k + self.kmax as i64) as usize;
        self.coeffs[i] = c;
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let o = self.kmax as i64;
        self.coeffs.iter().enumerate().map(move |(i, &c)| (i as i64 - o, c))
    }

    pub fn map_multiplier(&self, m: impl Fn(i64) -> Complex64) -> Self {
        let o = self.kmax as i64;
        Self {
            kmax: self.kmax,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| if c == ZERO { ZERO } else { c * m(i as i64 - o) })
                .collect(),
        }
    }

    pub fn add(&self, other: &Spectrum1D) -> Self {
        let b = self.kmax.max(other.kmax);
        let mut out = Self::zeros(b);
        for k in -(b as i64)..=b as i64 {
            out.set(k, self.get(k) + other.get(k));
        }
        out
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            kmax: self.kmax,
            coeffs: self.coeffs.iter().map(|z| z * c).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.norm()))
    }

    pub fn max_abs_diff(&self, other: &Spectrum1D) -> f64 {
        self.add(&other.scale(-1.0)).max_abs()
    }

    /// Weyl derivative of order `ρ ≥ 0`; requires `c(0) = 0` when `ρ > 0`.
    pub fn weyl_derivative(&self, rho: f64) -> Result<Self> {
        check_order(rho)?;
        if rho > 0.0 && self.get(0).norm() > 1e-12 * self.max_abs() {
            return Err(invalid("Weyl derivative of positive order needs a zero-mean function"));
        }
        Ok(self.map_multiplier(|k| weyl_multiplier(k, rho)))
    }

    /// Evaluates the series at the nodes `2πj/n`.
    pub fn synthesize(&self, n: usize) -> Result<Vec<f64>> {
        if n < 2 * self.kmax + 2 || !n.is_power_of_two() {
            return Err(Error::BandOverflow { band: self.kmax, n });
        }
        let mut buf = vec![ZERO; n];
        for (k, c) in self.iter() {
            buf[k.rem_euclid(n as i64) as usize] += c;
        }
        FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
        Ok(buf.into_iter().map(|z| z.re).collect())
    }

    /// Discrete coefficients of samples on `n` uniform nodes, band `n/2 − 1`.
    pub fn analyze(values: &[f64]) -> Result<Self> {
        let n = values.len();
        if n < 4 || !n.is_power_of_two() {
            return Err(invalid(format!("sample count {n} must be a power of two >= 4")));
        }
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let kmax = n / 2 - 1;
        let mut s = Self::zeros(kmax);
        for k in -(kmax as i64)..=kmax as i64 {
            s.set(k, buf[k.rem_euclid(n as i64) as usize] / n as f64);
        }
        Ok(s)
    }
}

fn check_order(rho: f64) -> Result<()> {
    if rho >= 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("derivative order {rho} must be finite and >= 0")))
    }
}

/// Discrete Fourier coefficients of `f`, band `n_i/2 − 1` on each axis.
pub fn analyze(f: &Sample2D) -> Spectrum2D {
    let spec = f.spec();
    let (n1, n2) = (spec.n1(), spec.n2());
    let mut planner = FftPlanner::new();
    let fft1 = planner.plan_fft_forward(n1);
    let fft2 = planner.plan_fft_forward(n2);
    let mut data: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    // rows are contiguous in x2
    for row in data.chunks_exact_mut(n2) {
        fft2.process(row);
    }
    let mut col = vec![ZERO; n1];
    for j in 0..n2 {
        for i in 0..n1 {
            col[i] = data[i * n2 + j];
        }
        fft1.process(&mut col);
        for i in 0..n1 {
            data[i * n2 + j] = col[i];
        }
    }
    let (b1, b2) = (n1 / 2 - 1, n2 / 2 - 1);
    let scale = 1.0 / (n1 * n2) as f64;
    let mut s = Spectrum2D::zeros(b1, b2);
    for k1 in -(b1 as i64)..=b1 as i64 {
        let i = k1.rem_euclid(n1 as i64) as usize;
        for k2 in -(b2 as i64)..=b2 as i64 {
            let j = k2.rem_euclid(n2 as i64) as usize;
            s.set(k1, k2, data[i * n2 + j] * scale);
        }
    }
    s
}

/// Complex values of `Σ c(k1,k2) e^{i(k1 x1 + k2 x2)}` on the grid.
pub fn synthesize_complex(s: &Spectrum2D, spec: GridSpec2D) -> Result<Array2<Complex64>> {
    let (n1, n2) = (spec.n1(), spec.n2());
    if n1 < 2 * s.kmax1() + 2 {
        return Err(Error::BandOverflow { band: s.kmax1(), n: n1 });
    }
    if n2 < 2 * s.kmax2() + 2 {
        return Err(Error::BandOverflow { band: s.kmax2(), n: n2 });
    }
    let mut planner = FftPlanner::new();
    let ifft1 = planner.plan_fft_inverse(n1);
    let ifft2 = planner.plan_fft_inverse(n2);
    let mut data = vec![ZERO; n1 * n2];
    for (k1, k2, c) in s.iter() {
        let i = k1.rem_euclid(n1 as i64) as usize;
        let j = k2.rem_euclid(n2 as i64) as usize;
        data[i * n2 + j] += c;
    }
    for k1 in -(s.kmax1() as i64)..=s.kmax1() as i64 {
        let i = k1.rem_euclid(n1 as i64) as usize;
        ifft2.process(&mut data[i * n2..(i + 1) * n2]);
    }
    let mut col = vec![ZERO; n1];
    for j in 0..n2 {
        for i in 0..n1 {
            col[i] = data[i * n2 + j];
        }
        ifft1.process(&mut col);
        for i in 0..n1 {
            data[i * n2 + j] = col[i];
        }
    }
    Ok(Array2::from_shape_vec((n1, n2), data).expect("buffer matches grid"))
}

/// Real samples of the series on `spec`. Fails when the band does not fit the
/// grid or when a Hermitian spectrum leaves an imaginary residue.
pub fn synthesize(s: &Spectrum2D, spec: GridSpec2D) -> Result<Sample2D> {
    let z = synthesize_complex(s, spec)?;
    if s.is_hermitian(1e-12) {
        let scale = s.coeffs().iter().map(|c| c.norm()).sum::<f64>().max(f64::MIN_POSITIVE);
        let residue = z.iter().fold(0.0_f64, |m, c| m.max(c.im.abs()));
        if residue > 1e-12 * scale.max(1.0) {
            return Err(Error::Numerical(format!(
                "imaginary residue {residue:e} after synthesis of a real spectrum"
            )));
        }
    }
    Ok(Sample2D::from_parts_unchecked(spec, z.mapv(|c| c.re)))
}

/// `|k|^ρ e^{i sign(k) ρπ/2}`; this maps `cos kx` to `k^ρ cos(kx + ρπ/2)`.
pub fn weyl_multiplier(k: i64, rho: f64) -> Complex64 {
    if rho == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    if k == 0 {
        return ZERO;
    }
    let phase = k.signum() as f64 * rho * FRAC_PI_2;
    Complex64::from_polar((k.unsigned_abs() as f64).powf(rho), phase)
}

/// Weyl derivative `f^{(ρ1, ρ2)}`. A positive order on an axis requires the
/// spectrum to vanish on the corresponding zero-frequency line.
pub fn weyl_derivative(s: &Spectrum2D, rho1: f64, rho2: f64) -> Result<Spectrum2D> {
    check_order(rho1)?;
    check_order(rho2)?;
    let cut = 1e-12 * s.max_abs();
    for (k1, k2, c) in s.iter() {
        if c.norm() > cut && ((rho1 > 0.0 && k1 == 0) || (rho2 > 0.0 && k2 == 0)) {
            return Err(invalid(format!(
                "Weyl derivative of order ({rho1}, {rho2}) needs zero mean, found c({k1},{k2}) = {c}"
            )));
        }
    }
    Ok(s.map_separable(|k| weyl_multiplier(k, rho1), |k| weyl_multiplier(k, rho2)))
}

/// Conjugate function: multiplies `c(k)` by `−i sign(k)`.
pub fn conjugate_axis(s: &Spectrum1D) -> Spectrum1D {
    s.map_multiplier(|k| Complex64::new(0.0, -(k.signum() as f64)))
}

/// de la Vallée-Poussin multiplier: 1 for `|k| ≤ n`, `(2n − |k|)/n` on the
/// ramp, 0 from `2n` on. For `n = 0` only the constant term survives.
pub fn vp_multiplier(n: u32, k: i64) -> f64 {
    let a = k.unsigned_abs();
    let n = n as u64;
    if n == 0 {
        return if a == 0 { 1.0 } else { 0.0 };
    }
    if a <= n {
        1.0
    } else if a < 2 * n {
        (2 * n - a) as f64 / n as f64
    } else {
        0.0
    }
}

/// Per-axis order of a de la Vallée-Poussin mean; `All` leaves the axis alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VpOrder {
    Finite(u32),
    All,
}

impl VpOrder {
    pub fn multiplier(self, k: i64) -> f64 {
        match self {
            VpOrder::Finite(n) => vp_multiplier(n, k),
            VpOrder::All => 1.0,
        }
    }
}

/// `V_{m1,m2}(f)`, with `V_{m1,∞}` and `V_{∞,m2}` when an axis is `All`.
pub fn vp_mean(s: &Spectrum2D, m1: VpOrder, m2: VpOrder) -> Spectrum2D {
    s.map_separable(
        |k| Complex64::new(m1.multiplier(k), 0.0),
        |k| Complex64::new(m2.multiplier(k), 0.0),
    )
}

/// Weyl derivative of the de la Vallée-Poussin mean, `V^{(α1,α2)}_{m1,m2}(f)`.
pub fn vp_derivative_mean(
    s: &Spectrum2D,
    m1: VpOrder,
    m2: VpOrder,
    alpha1: f64,
    alpha2: f64,
) -> Result<Spectrum2D> {
    weyl_derivative(s, alpha1, alpha2)?;
    Ok(s.map_separable(
        |k| m1.multiplier(k) * weyl_multiplier(k, alpha1),
        |k| m2.multiplier(k) * weyl_multiplier(k, alpha2),
    ))
}

/// Symbol of the fractional difference on `e^{ikx}`:
/// `e^{ikαh} (1 − e^{−ikh})^α` with the principal branch.
pub fn frac_diff_multiplier(k: i64, h: f64, alpha: f64) -> Complex64 {
    let theta = k as f64 * h;
    let base = one_minus_unit(theta);
    if base.norm() == 0.0 {
        return ZERO;
    }
    let power = Complex64::from_polar(base.norm().powf(alpha), alpha * base.arg());
    Complex64::from_polar(1.0, alpha * theta) * power
}

/// `1 − e^{−iθ}` without cancellation. Steps that are a multiple of `2π` up
/// to the rounding of `θ` give exactly zero.
pub(crate) fn one_minus_unit(theta: f64) -> Complex64 {
    let s = (theta / 2.0).sin();
    if s.abs() <= 8.0 * f64::EPSILON * theta.abs().max(1.0) {
        return ZERO;
    }
    Complex64::new(2.0 * s * s, theta.sin())
}

/// Dirichlet kernel `D_m(t) = sin((m + 1/2)t) / (2 sin(t/2))`.
pub fn dirichlet_kernel(m: u32, t: f64) -> f64 {
    let half = (t / 2.0).sin();
    if half.abs() < 1e-300 {
        return m as f64 + 0.5;
    }
    ((m as f64 + 0.5) * t).sin() / (2.0 * half)
}

/// `V_n^{2n}(t) = (D_n + … + D_{2n−1})/n`, and `V_0^0 = D_0`.
pub fn vp_kernel(n: u32, t: f64) -> f64 {
    if n == 0 {
        return dirichlet_kernel(0, t);
    }
    (n..2 * n).map(|m| dirichlet_kernel(m, t)).sum::<f64>() / n as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    Cos,
    Sin,
}

/// `Σ_{ν=1}^n ν^{−α} cos νx` (or `sin νx`).
pub fn kernel_partial_sum(n: u32, alpha: f64, x: f64, kind: KernelKind) -> f64 {
    crate::sum::compensated_sum((1..=n).map(|nu| {
        let v = nu as f64;
        let trig = match kind {
            KernelKind::Cos => (v * x).cos(),
            KernelKind::Sin => (v * x).sin(),
        };
        trig / v.powf(alpha)
    }))
}

/// All partial sums `S_n` for `n = 1..=nmax`, evaluated in one pass.
pub fn kernel_partial_sums(nmax: u32, alpha: f64, x: f64, kind: KernelKind) -> Vec<f64> {
    let mut acc = crate::sum::CompensatedSum::default();
    (1..=nmax)
        .map(|nu| {
            let v = nu as f64;
            let trig = match kind {
                KernelKind::Cos => (v * x).cos(),
                KernelKind::Sin => (v * x).sin(),
            };
            acc.add(trig / v.powf(alpha));
            acc.value()
        })
        .collect()
}
