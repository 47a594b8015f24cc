//! Reusable evaluators for `‖M f‖` where `M` is a separable Fourier
//! multiplier. FFT plans and buffers are set up once; every evaluation then
//! costs one band-limited inverse transform plus the norm reduction.
//!
//! When the inner exponent is 2 the inner norm is read off Parseval's
//! identity along `x1`, which coincides with the rectangle rule because the
//! grid resolves `|g|²` exactly.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::mixed_norm::{norm_1d_unchecked, Exponent, ExponentPair, GridSpec2D};
use crate::spectral::{Spectrum1D, Spectrum2D};
use crate::sum::compensated_sum;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone)]
pub(crate) struct MultiplierNorm2D {
    kmax1: i64,
    kmax2: i64,
    /// `(k1, row of coefficients over k2)` for every k1 carrying mass
    rows: Vec<(i64, Vec<Complex64>)>,
    grid: GridSpec2D,
    pp: ExponentPair,
    ifft1: Arc<dyn Fft<f64>>,
    ifft2: Arc<dyn Fft<f64>>,
    transformed: Vec<Complex64>,
    column: Vec<Complex64>,
    values: Vec<f64>,
    profile: Vec<f64>,
    scratch: Vec<Complex64>,
    m1: Vec<Complex64>,
    m2: Vec<Complex64>,
}

impl MultiplierNorm2D {
    pub(crate) fn new(s: &Spectrum2D, grid: GridSpec2D, pp: ExponentPair) -> Result<Self> {
        pp.p1.validate()?;
        pp.p2.validate()?;
        let (n1, n2) = (grid.n1(), grid.n2());
        if n1 < 2 * s.kmax1() + 2 {
            return Err(Error::BandOverflow { band: s.kmax1(), n: n1 });
        }
        if n2 < 2 * s.kmax2() + 2 {
            return Err(Error::BandOverflow { band: s.kmax2(), n: n2 });
        }
        let (kmax1, kmax2) = (s.kmax1() as i64, s.kmax2() as i64);
        let rows: Vec<(i64, Vec<Complex64>)> = (-kmax1..=kmax1)
            .filter_map(|k1| {
                let row: Vec<Complex64> = (-kmax2..=kmax2).map(|k2| s.get(k1, k2)).collect();
                row.iter().any(|c| *c != ZERO).then_some((k1, row))
            })
            .collect();
        let mut planner = FftPlanner::new();
        let ifft1 = planner.plan_fft_inverse(n1);
        let ifft2 = planner.plan_fft_inverse(n2);
        let scratch_len = ifft1
            .get_inplace_scratch_len()
            .max(ifft2.get_inplace_scratch_len());
        Ok(Self {
            kmax1,
            kmax2,
            transformed: vec![ZERO; rows.len() * n2],
            rows,
            grid,
            pp,
            ifft1,
            ifft2,
            column: vec![ZERO; n1],
            values: vec![0.0; n1],
            profile: vec![0.0; n2],
            scratch: vec![ZERO; scratch_len],
            m1: vec![ZERO; 2 * kmax1 as usize + 1],
            m2: vec![ZERO; 2 * kmax2 as usize + 1],
        })
    }

    pub(crate) fn grid(&self) -> GridSpec2D {
        self.grid
    }

    /// `‖M f‖_{p1 p2}` for the separable multiplier `m1(k1) m2(k2)`.
    pub(crate) fn norm(
        &mut self,
        m1: impl Fn(i64) -> Complex64,
        m2: impl Fn(i64) -> Complex64,
    ) -> f64 {
        for (slot, k) in self.m1.iter_mut().zip(-self.kmax1..=self.kmax1) {
            *slot = m1(k);
        }
        for (slot, k) in self.m2.iter_mut().zip(-self.kmax2..=self.kmax2) {
            *slot = m2(k);
        }
        let two = Exponent::Finite(2.0);
        if self.pp.p1 == two && self.pp.p2 == two {
            let total = compensated_sum(self.rows.iter().flat_map(|(k1, row)| {
                let a = self.m1[(k1 + self.kmax1) as usize];
                row.iter()
                    .zip(&self.m2)
                    .map(move |(c, b)| (c * a * b).norm_sqr())
            }));
            return TWO_PI * total.sqrt();
        }

        let (n1, n2) = (self.grid.n1(), self.grid.n2());
        for (r, (k1, row)) in self.rows.iter().enumerate() {
            let a = self.m1[(k1 + self.kmax1) as usize];
            let buf = &mut self.transformed[r * n2..(r + 1) * n2];
            buf.fill(ZERO);
            for (idx, (c, b)) in row.iter().zip(&self.m2).enumerate() {
                let k2 = idx as i64 - self.kmax2;
                buf[k2.rem_euclid(n2 as i64) as usize] = c * a * b;
            }
            self.ifft2.process_with_scratch(buf, &mut self.scratch);
        }

        if self.pp.p1 == two {
            for j in 0..n2 {
                let s = compensated_sum((0..self.rows.len()).map(|r| self.transformed[r * n2 + j].norm_sqr()));
                self.profile[j] = (TWO_PI * s).sqrt();
            }
        } else {
            for j in 0..n2 {
                self.column.fill(ZERO);
                for (r, (k1, _)) in self.rows.iter().enumerate() {
                    self.column[k1.rem_euclid(n1 as i64) as usize] = self.transformed[r * n2 + j];
                }
                self.ifft1.process_with_scratch(&mut self.column, &mut self.scratch);
                for (v, z) in self.values.iter_mut().zip(&self.column) {
                    *v = z.re;
                }
                self.profile[j] = norm_1d_unchecked(&self.values, self.pp.p1);
            }
        }
        norm_1d_unchecked(&self.profile, self.pp.p2)
    }
}

#[derive(Clone)]
pub(crate) struct MultiplierNorm1D {
    active: Vec<(i64, Complex64)>,
    n: usize,
    p: Exponent,
    ifft: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
    values: Vec<f64>,
}

impl MultiplierNorm1D {
    pub(crate) fn new(s: &Spectrum1D, n: usize, p: Exponent) -> Result<Self> {
        p.validate()?;
        if n < 2 * s.kmax() + 2 || !n.is_power_of_two() {
            return Err(Error::BandOverflow { band: s.kmax(), n });
        }
        let ifft = FftPlanner::new().plan_fft_inverse(n);
        let scratch = vec![ZERO; ifft.get_inplace_scratch_len()];
        Ok(Self {
            active: s.iter().filter(|(_, c)| *c != ZERO).collect(),
            n,
            p,
            ifft,
            buf: vec![ZERO; n],
            scratch,
            values: vec![0.0; n],
        })
    }

    pub(crate) fn norm(&mut self, m: impl Fn(i64) -> Complex64) -> f64 {
        if self.p == Exponent::Finite(2.0) {
            let s = compensated_sum(self.active.iter().map(|(k, c)| (c * m(*k)).norm_sqr()));
            return (TWO_PI * s).sqrt();
        }
        self.buf.fill(ZERO);
        for (k, c) in &self.active {
            self.buf[k.rem_euclid(self.n as i64) as usize] = c * m(*k);
        }
        self.ifft.process_with_scratch(&mut self.buf, &mut self.scratch);
        for (v, z) in self.values.iter_mut().zip(&self.buf) {
            *v = z.re;
        }
        norm_1d_unchecked(&self.values, self.p)
    }
}
