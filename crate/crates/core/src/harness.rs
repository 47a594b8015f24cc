//! Example functions, discretised right-hand sides of the Ulyanov-type
//! inequalities, ratio reports and power-log rate fits.
//!
//! Right-hand sides are evaluated in logarithmic coordinates: each axis is
//! sampled at `t = δ·2^{−ℓ}`, `ℓ = 0..J−1`, and every sample carries the
//! measure `ln 2` of its dyadic cell. Moduli on the resulting lattice are
//! cached, so sweeps over dyadic `δ` share almost all of their work.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, LN_2};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, invalid_query, Error, Result};
use crate::mixed_norm::{q_star, size_for_band, Exponent, ExponentPair, GridSpec2D};
use crate::smoothness::{Modulus1DEngine, ModulusControls, ModulusEngine};
use crate::spectral::{weyl_derivative, Spectrum1D, Spectrum2D};
use crate::sum::CompensatedSum;

/// `sin x1 sin x2`.
pub fn make_f0() -> Spectrum2D {
    let sin = Spectrum1D::from_cos_sin(&[(0.0, 1.0)]);
    make_product(&sin, &sin)
}

/// Coefficients of `u(x1) v(x2)`.
pub fn make_product(u: &Spectrum1D, v: &Spectrum1D) -> Spectrum2D {
    let mut s = Spectrum2D::zeros(u.kmax(), v.kmax());
    for (k1, a) in u.iter() {
        for (k2, b) in v.iter() {
            s.set(k1, k2, a * b);
        }
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    /// `cos 2^ν x`
    Plain,
    /// `cos(2^ν x − πα/2)`
    Shifted,
}

/// `Σ_{ν<terms} (ν+1)^β 2^{−να} cos(2^ν x − φ)` with `φ = 0` or `πα/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LacunaryParams {
    pub alpha: f64,
    pub beta: f64,
    pub terms: u32,
    pub phase: Phase,
}

impl LacunaryParams {
    pub fn top_frequency(&self) -> u64 {
        1u64 << self.terms.saturating_sub(1)
    }
}

/// Lacunary series sized for a grid of `grid_n` points.
pub fn make_lacunary(p: &LacunaryParams, grid_n: usize) -> Result<Spectrum1D> {
    if p.terms == 0 || p.terms > 40 {
        return Err(invalid(format!("lacunary terms must be in 1..=40, got {}", p.terms)));
    }
    if !(p.alpha > 0.0) || !p.beta.is_finite() {
        return Err(invalid("lacunary series needs α > 0 and finite β"));
    }
    let top = p.top_frequency();
    if 2 * top + 2 > grid_n as u64 {
        return Err(Error::BandOverflow {
            band: top as usize,
            n: grid_n,
        });
    }
    let phase = match p.phase {
        Phase::Plain => 0.0,
        Phase::Shifted => -p.alpha * FRAC_PI_2,
    };
    let mut s = Spectrum1D::zeros(top as usize);
    for nu in 0..p.terms {
        let w = (nu as f64 + 1.0).powf(p.beta) * 2f64.powf(-(nu as f64) * p.alpha) / 2.0;
        let c = Complex64::from_polar(w, phase);
        let k = 1i64 << nu;
        s.set(k, c);
        s.set(-k, c.conj());
    }
    Ok(s)
}

/// Real trigonometric polynomial vanishing on both zero-frequency lines,
/// with random band `≤ max_band` per axis and decaying random coefficients.
pub fn random_zero_mean_polynomial<R: Rng>(rng: &mut R, max_band: usize) -> Spectrum2D {
    let max_band = max_band.max(1);
    let b1 = rng.random_range(1..=max_band) as i64;
    let b2 = rng.random_range(1..=max_band) as i64;
    let mut s = Spectrum2D::zeros(b1 as usize, b2 as usize);
    for k1 in 1..=b1 {
        for k2 in -b2..=b2 {
            if k2 == 0 || !rng.random_bool(0.6) {
                continue;
            }
            let scale = 1.0 / (1.0 + (k1 + k2.abs()) as f64);
            let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale;
            s.set(k1, k2, c);
            s.set(-k1, -k2, c.conj());
        }
    }
    if s.is_zero() {
        s.set(1, 1, Complex64::new(0.5, 0.0));
        s.set(-1, -1, Complex64::new(0.5, 0.0));
    }
    s.trimmed(0.0)
}

/// `sin x1 · g1(x2)` with `g1` plain lacunary, `α = 1`, `β = 0`.
pub fn make_f1(terms: u32) -> Result<Spectrum2D> {
    let p = LacunaryParams {
        alpha: 1.0,
        beta: 0.0,
        terms,
        phase: Phase::Plain,
    };
    let g = make_lacunary(&p, 4 * p.top_frequency() as usize)?;
    Ok(make_product(&Spectrum1D::from_cos_sin(&[(0.0, 1.0)]), &g))
}

/// Named test functions: `f0`, truncated `f1`, then `count` seeded random
/// zero-mean polynomials.
pub fn standard_corpus(seed: u64, count: usize, max_band: usize, f1_terms: u32) -> Result<Vec<(String, Spectrum2D)>> {
    let mut corpus = vec![("f0".to_string(), make_f0()), ("f1".to_string(), make_f1(f1_terms)?)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        corpus.push((format!("random{i:02}"), random_zero_mean_polynomial(&mut rng, max_band)));
    }
    Ok(corpus)
}

/// Orders, exponents and dyadic ranges of one inequality check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UlyanovQuery {
    pub alpha: (f64, f64),
    pub rho: (f64, f64),
    pub from: ExponentPair,
    pub to: ExponentPair,
    /// `δ = 2^{−j}` for `j_range.0 ≤ j ≤ j_range.1` on both axes
    pub j_range: (u32, u32),
    /// Dyadic levels `J` per axis in the right-hand side
    pub levels: usize,
    pub controls: ModulusControls,
}

impl UlyanovQuery {
    pub fn new(alpha: (f64, f64), from: ExponentPair, to: ExponentPair) -> Self {
        Self {
            alpha,
            rho: (0.0, 0.0),
            from,
            to,
            j_range: (1, 6),
            levels: 10,
            controls: ModulusControls::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for a in [self.alpha.0, self.alpha.1] {
            if !(a > 0.0 && a.is_finite()) {
                return Err(invalid_query(format!("smoothness order {a} must be positive")));
            }
        }
        for r in [self.rho.0, self.rho.1] {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(invalid_query(format!("derivative order {r} must be nonnegative")));
            }
        }
        check_pattern(self.from.p1, self.to.p1)?;
        check_pattern(self.from.p2, self.to.p2)?;
        if self.j_range.0 > self.j_range.1 || self.j_range.1 > 40 {
            return Err(invalid_query(format!("bad dyadic range {}:{}", self.j_range.0, self.j_range.1)));
        }
        if self.levels < 4 {
            return Err(invalid_query(format!("need at least 4 dyadic levels, got {}", self.levels)));
        }
        self.controls.validate()
    }

    /// `θ_i = 1/p_i − 1/q_i`
    pub fn theta(&self) -> (f64, f64) {
        (
            self.from.p1.reciprocal() - self.to.p1.reciprocal(),
            self.from.p2.reciprocal() - self.to.p2.reciprocal(),
        )
    }

    /// Orders of the modulus inside the right-hand side.
    pub fn rhs_orders(&self) -> (f64, f64) {
        let th = self.theta();
        (self.alpha.0 + self.rho.0 + th.0, self.alpha.1 + self.rho.1 + th.1)
    }

    pub fn deltas(&self) -> Vec<f64> {
        (self.j_range.0..=self.j_range.1).map(|j| 2f64.powi(-(j as i32))).collect()
    }
}

/// Each axis needs `1 < p < q < ∞` or `p = 1, q = ∞`.
pub fn check_pattern(p: Exponent, q: Exponent) -> Result<()> {
    let ok = match (p, q) {
        (Exponent::Finite(p), Exponent::Finite(q)) => 1.0 < p && p < q,
        (Exponent::Finite(p), Exponent::Infinity) => p == 1.0,
        (Exponent::Infinity, _) => false,
    };
    if ok {
        Ok(())
    } else {
        Err(invalid_query(format!(
            "exponent pattern {p} -> {q} is not admissible: need 1 < p < q < inf or p = 1, q = inf"
        )))
    }
}

fn key(t1: f64, t2: f64) -> (u64, u64) {
    (t1.to_bits(), t2.to_bits())
}

/// Cached moduli of one function at fixed orders.
struct ModulusTable {
    engine: ModulusEngine,
    alpha: (f64, f64),
    controls: ModulusControls,
    values: BTreeMap<(u64, u64), f64>,
}

impl ModulusTable {
    fn new(s: &Spectrum2D, pp: ExponentPair, alpha: (f64, f64), controls: ModulusControls) -> Result<Self> {
        let grid = GridSpec2D::for_band(s.kmax1(), s.kmax2(), controls.oversample);
        Ok(Self {
            engine: ModulusEngine::with_grid(s, pp, grid)?,
            alpha,
            controls,
            values: BTreeMap::new(),
        })
    }

    /// Evaluates all missing points, in parallel, in a fixed order.
    fn fill(&mut self, points: impl IntoIterator<Item = (f64, f64)>) -> Result<()> {
        let mut missing: Vec<(f64, f64)> = points
            .into_iter()
            .filter(|&(a, b)| !self.values.contains_key(&key(a, b)))
            .collect();
        missing.sort_by_key(|&(a, b)| key(a, b));
        missing.dedup_by_key(|p| key(p.0, p.1));
        let (alpha, controls) = (self.alpha, self.controls);
        let computed: Vec<Result<f64>> = missing
            .par_iter()
            .map_init(
                || self.engine.clone(),
                |engine, &(t1, t2)| engine.modulus(alpha, (t1, t2), &controls).map(|o| o.value),
            )
            .collect();
        for (&(t1, t2), v) in missing.iter().zip(computed) {
            self.values.insert(key(t1, t2), v?);
        }
        Ok(())
    }

    fn get(&self, t1: f64, t2: f64) -> f64 {
        self.values[&key(t1, t2)]
    }
}

fn dyadic_points(delta: f64, levels: usize) -> impl Iterator<Item = f64> + Clone {
    (0..levels).map(move |l| delta * 2f64.powi(-(l as i32)))
}

/// Right-hand side evaluator with a lattice cache shared across step bounds.
struct RhsEvaluator {
    table: ModulusTable,
    weight: (f64, f64),
    qstar: (f64, f64),
}

impl RhsEvaluator {
    fn new(s: &Spectrum2D, q: &UlyanovQuery) -> Result<Self> {
        let th = q.theta();
        Ok(Self {
            table: ModulusTable::new(s, q.from, q.rhs_orders(), q.controls)?,
            weight: (-q.rho.0 - th.0, -q.rho.1 - th.1),
            qstar: (q_star(q.to.p1), q_star(q.to.p2)),
        })
    }

    fn prepare(&mut self, deltas: &[(f64, f64)], levels: usize) -> Result<()> {
        let pts: Vec<(f64, f64)> = deltas
            .iter()
            .flat_map(|&(d1, d2)| {
                dyadic_points(d1, levels).flat_map(move |t1| dyadic_points(d2, levels).map(move |t2| (t1, t2)))
            })
            .collect();
        self.table.fill(pts)
    }

    fn value(&self, d1: f64, d2: f64, levels: usize) -> f64 {
        let (q1, q2) = self.qstar;
        let mut outer = CompensatedSum::default();
        for t2 in dyadic_points(d2, levels) {
            let mut inner = CompensatedSum::default();
            for t1 in dyadic_points(d1, levels) {
                let g = t1.powf(self.weight.0) * t2.powf(self.weight.1) * self.table.get(t1, t2);
                inner.add(g.powf(q1) * LN_2);
            }
            outer.add(inner.value().powf(q2 / q1) * LN_2);
        }
        outer.value().powf(1.0 / q2)
    }
}

/// Right-hand side with its level self-check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhsValue {
    pub value: f64,
    /// Value with `2J` levels per axis
    pub doubled: f64,
    /// `|doubled − value| / doubled`, zero when both vanish
    pub relative_change: f64,
}

fn relative_change(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (a - b).abs() / m
    }
}

pub fn ulyanov_rhs(s: &Spectrum2D, q: &UlyanovQuery, delta1: f64, delta2: f64) -> Result<f64> {
    q.validate()?;
    check_step(delta1)?;
    check_step(delta2)?;
    let mut rhs = RhsEvaluator::new(s, q)?;
    rhs.prepare(&[(delta1, delta2)], q.levels)?;
    Ok(rhs.value(delta1, delta2, q.levels))
}

pub fn ulyanov_rhs_checked(s: &Spectrum2D, q: &UlyanovQuery, delta1: f64, delta2: f64) -> Result<RhsValue> {
    q.validate()?;
    check_step(delta1)?;
    check_step(delta2)?;
    let mut rhs = RhsEvaluator::new(s, q)?;
    rhs.prepare(&[(delta1, delta2)], 2 * q.levels)?;
    let value = rhs.value(delta1, delta2, q.levels);
    let doubled = rhs.value(delta1, delta2, 2 * q.levels);
    Ok(RhsValue {
        value,
        doubled,
        relative_change: relative_change(value, doubled),
    })
}

fn check_step(d: f64) -> Result<()> {
    if d > 0.0 && d <= std::f64::consts::PI {
        Ok(())
    } else {
        Err(invalid_query(format!("step bound {d} must lie in (0, π]")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UlyanovRow {
    pub delta1: f64,
    pub delta2: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UlyanovReport {
    pub rows: Vec<UlyanovRow>,
    pub max_ratio: f64,
    pub argmax: (f64, f64),
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Left side `ω_α(f^{(ρ)}, δ)_{q1 q2}` against the right-hand side over the
/// dyadic grid of the query, `δ1` varying slowest.
pub fn ulyanov_report(s: &Spectrum2D, q: &UlyanovQuery) -> Result<UlyanovReport> {
    q.validate()?;
    let deltas = q.deltas();
    let pairs: Vec<(f64, f64)> = deltas
        .iter()
        .flat_map(|&d1| deltas.iter().map(move |&d2| (d1, d2)))
        .collect();

    let derivative = if q.rho == (0.0, 0.0) {
        s.clone()
    } else {
        weyl_derivative(s, q.rho.0, q.rho.1)?
    };
    let mut lhs = ModulusTable::new(&derivative, q.to, q.alpha, q.controls)?;
    lhs.fill(pairs.iter().copied())?;
    let mut rhs = RhsEvaluator::new(s, q)?;
    rhs.prepare(&pairs, q.levels)?;

    let rows: Vec<UlyanovRow> = pairs
        .iter()
        .map(|&(d1, d2)| {
            let (l, r) = (lhs.get(d1, d2), rhs.value(d1, d2, q.levels));
            UlyanovRow {
                delta1: d1,
                delta2: d2,
                lhs: l,
                rhs: r,
                ratio: ratio(l, r),
            }
        })
        .collect();
    let mut max_ratio = 0.0;
    let mut argmax = pairs[0];
    for r in &rows {
        if r.ratio > max_ratio {
            max_ratio = r.ratio;
            argmax = (r.delta1, r.delta2);
        }
    }
    Ok(UlyanovReport { rows, max_ratio, argmax })
}

/// Maximal ratio under the base settings and under each refinement: twice
/// the dyadic levels, a denser step grid, a finer spatial grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinementCheck {
    pub base: f64,
    pub levels: f64,
    pub steps: f64,
    pub spatial: f64,
    pub max_relative_change: f64,
}

pub fn ulyanov_refinement(s: &Spectrum2D, q: &UlyanovQuery) -> Result<RefinementCheck> {
    let base = ulyanov_report(s, q)?.max_ratio;
    let levels = ulyanov_report(
        s,
        &UlyanovQuery {
            levels: 2 * q.levels,
            ..*q
        },
    )?
    .max_ratio;
    let steps = ulyanov_report(
        s,
        &UlyanovQuery {
            controls: q.controls.denser(),
            ..*q
        },
    )?
    .max_ratio;
    let spatial = ulyanov_report(
        s,
        &UlyanovQuery {
            controls: ModulusControls {
                oversample: 2 * q.controls.oversample,
                ..q.controls
            },
            ..*q
        },
    )?
    .max_ratio;
    let max_relative_change = [levels, steps, spatial]
        .iter()
        .map(|&v| relative_change(base, v))
        .fold(0.0, f64::max);
    Ok(RefinementCheck {
        base,
        levels,
        steps,
        spatial,
        max_relative_change,
    })
}

/// `value ≈ c·δ^a·(log₂(2/δ))^b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Largest relative deviation of the model from the data
    pub residual: f64,
    pub points: Vec<(f64, f64)>,
}

/// Least-squares fit of `ln v` against `1, ln δ, ln log₂(2/δ)`.
pub fn rate_fit(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 5 {
        return Err(invalid(format!("rate fit needs at least 5 points, got {}", points.len())));
    }
    for &(d, v) in points {
        if !(d > 0.0 && d < 2.0) {
            return Err(invalid(format!("step {d} outside (0, 2)")));
        }
        if !(v > 0.0 && v.is_finite()) {
            return Err(invalid(format!("rate fit needs positive values, got {v} at δ = {d}")));
        }
    }
    let n = points.len();
    let design = DMatrix::from_fn(n, 3, |i, j| {
        let d = points[i].0;
        match j {
            0 => 1.0,
            1 => d.ln(),
            _ => (2.0 / d).log2().ln(),
        }
    });
    let rhs = DVector::from_iterator(n, points.iter().map(|p| p.1.ln()));
    let coef = design
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::Numerical(format!("rate fit: {e}")))?;
    let (c, a, b) = (coef[0].exp(), coef[1], coef[2]);
    let residual = points
        .iter()
        .map(|&(d, v)| (c * d.powf(a) * (2.0 / d).log2().powf(b) / v - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(RateFit {
        a,
        b,
        c,
        residual,
        points: points.to_vec(),
    })
}

/// Hardy-type integral in one variable,
/// `(Σ_ℓ (t^{−w} ω_order(g, t)_p)^{q*} ln 2)^{1/q*}` over `t = δ 2^{−ℓ}`.
struct Hardy1D {
    engine: Modulus1DEngine,
    order: f64,
    weight: f64,
    qstar: f64,
    controls: ModulusControls,
    values: BTreeMap<u64, f64>,
}

impl Hardy1D {
    fn new(g: &Spectrum1D, n: usize, p: Exponent, q: Exponent, alpha: f64, controls: ModulusControls) -> Result<Self> {
        let theta = p.reciprocal() - q.reciprocal();
        Ok(Self {
            engine: Modulus1DEngine::new(g, n, p)?,
            order: alpha + theta,
            weight: -theta,
            qstar: q_star(q),
            controls,
            values: BTreeMap::new(),
        })
    }

    fn fill(&mut self, ts: impl IntoIterator<Item = f64>) -> Result<()> {
        let mut missing: Vec<f64> = ts.into_iter().filter(|t| !self.values.contains_key(&t.to_bits())).collect();
        missing.sort_by_key(|t| t.to_bits());
        missing.dedup_by_key(|t| t.to_bits());
        let (order, controls) = (self.order, self.controls);
        let computed: Vec<Result<f64>> = missing
            .par_iter()
            .map_init(
                || self.engine.clone(),
                |engine, &t| engine.modulus(order, t, &controls).map(|o| o.value),
            )
            .collect();
        for (t, v) in missing.iter().zip(computed) {
            self.values.insert(t.to_bits(), v?);
        }
        Ok(())
    }

    fn value(&mut self, delta: f64, levels: usize) -> Result<f64> {
        self.fill(dyadic_points(delta, levels))?;
        let mut acc = CompensatedSum::default();
        for t in dyadic_points(delta, levels) {
            let g = t.powf(self.weight) * self.values[&t.to_bits()];
            acc.add(g.powf(self.qstar) * LN_2);
        }
        Ok(acc.value().powf(1.0 / self.qstar))
    }
}

/// One-variable right-hand side for `g` with orders and exponents `(α, p, q)`.
pub fn hardy_integral_1d(
    g: &Spectrum1D,
    alpha: f64,
    p: Exponent,
    q: Exponent,
    delta: f64,
    levels: usize,
    controls: &ModulusControls,
) -> Result<f64> {
    check_pattern(p, q)?;
    check_step(delta)?;
    let n = size_for_band(g.kmax(), controls.oversample);
    Hardy1D::new(g, n, p, q, alpha, *controls)?.value(delta, levels)
}

/// Sweep of a lacunary series over `δ = 2^{−j}`: left side `ω_α(g, δ)_q`
/// and right side the one-variable Hardy integral in `L^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LacunaryExperiment {
    pub series: LacunaryParams,
    pub p: Exponent,
    pub q: Exponent,
    pub j_range: (u32, u32),
    pub levels: usize,
    pub grid_n: usize,
    /// Coarsest points left out of the fits
    pub drop_coarsest: usize,
    pub controls: ModulusControls,
}

impl LacunaryExperiment {
    /// Sixteen terms on a grid of `2^17` points, `δ = 2^{−3} … 2^{−12}`.
    pub fn new(series: LacunaryParams, p: Exponent, q: Exponent) -> Self {
        Self {
            series,
            p,
            q,
            j_range: (3, 12),
            levels: 10,
            grid_n: 1 << 17,
            drop_coarsest: 2,
            controls: ModulusControls::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LacunaryProfile {
    pub deltas: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
}

pub fn lacunary_profile(e: &LacunaryExperiment) -> Result<LacunaryProfile> {
    check_pattern(e.p, e.q)?;
    e.controls.validate()?;
    if e.j_range.0 > e.j_range.1 || e.levels < 4 {
        return Err(invalid_query("bad dyadic range or level count"));
    }
    let g = make_lacunary(&e.series, e.grid_n)?;
    let deltas: Vec<f64> = (e.j_range.0..=e.j_range.1).map(|j| 2f64.powi(-(j as i32))).collect();
    let lhs_engine = Modulus1DEngine::new(&g, e.grid_n, e.q)?;
    let lhs: Vec<Result<f64>> = deltas
        .par_iter()
        .map_init(
            || lhs_engine.clone(),
            |engine, &d| engine.modulus(e.series.alpha, d, &e.controls).map(|o| o.value),
        )
        .collect();
    let lhs = lhs.into_iter().collect::<Result<Vec<f64>>>()?;
    let mut hardy = Hardy1D::new(&g, e.grid_n, e.p, e.q, e.series.alpha, e.controls)?;
    hardy.fill(deltas.iter().flat_map(|&d| dyadic_points(d, e.levels)))?;
    let rhs = deltas
        .iter()
        .map(|&d| hardy.value(d, e.levels))
        .collect::<Result<Vec<f64>>>()?;
    Ok(LacunaryProfile { deltas, lhs, rhs })
}

/// Rate fit of `values` over `deltas`, leaving out the `drop` largest steps.
pub fn fit_sweep(deltas: &[f64], values: &[f64], drop: usize) -> Result<RateFit> {
    let mut pts: Vec<(f64, f64)> = deltas.iter().copied().zip(values.iter().copied()).collect();
    pts.sort_by(|a, b| b.0.total_cmp(&a.0));
    rate_fit(&pts[drop.min(pts.len())..])
}

/// Fits of both sides in `δ2` at fixed `δ1` and the exponent gaps
/// `Δa = a_lhs − a_rhs`, `Δb = b_lhs − b_rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Separation {
    pub lhs_fit: RateFit,
    pub rhs_fit: RateFit,
    pub delta_a: f64,
    pub delta_b: f64,
}

impl Separation {
    pub fn from_fits(lhs_fit: RateFit, rhs_fit: RateFit) -> Self {
        Self {
            delta_a: lhs_fit.a - rhs_fit.a,
            delta_b: lhs_fit.b - rhs_fit.b,
            lhs_fit,
            rhs_fit,
        }
    }
}

/// Both sides for `sin x1 · g(x2)`, where `g` is the lacunary series of the
/// experiment (order `α2 = series.alpha`, exponents `p2 → q2`) and the first
/// axis uses order `alpha1`, exponents `p1 → q1`, fixed step `delta1`. Both
/// sides factor into one-variable quantities, which is how they are computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationQuery {
    pub alpha1: f64,
    pub p1: Exponent,
    pub q1: Exponent,
    pub delta1: f64,
    pub second: LacunaryExperiment,
}

pub fn separation_gaps(q: &SeparationQuery) -> Result<Separation> {
    check_pattern(q.p1, q.q1)?;
    check_step(q.delta1)?;
    let e = &q.second;
    let sin = Spectrum1D::from_cos_sin(&[(0.0, 1.0)]);
    let n = size_for_band(1, e.controls.oversample);
    let left = Modulus1DEngine::new(&sin, n, q.q1)?
        .modulus(q.alpha1, q.delta1, &e.controls)?
        .value;
    let right = Hardy1D::new(&sin, n, q.p1, q.q1, q.alpha1, e.controls)?.value(q.delta1, e.levels)?;
    let profile = lacunary_profile(e)?;
    let lhs: Vec<f64> = profile.lhs.iter().map(|v| left * v).collect();
    let rhs: Vec<f64> = profile.rhs.iter().map(|v| right * v).collect();
    Ok(Separation::from_fits(
        fit_sweep(&profile.deltas, &lhs, e.drop_coarsest)?,
        fit_sweep(&profile.deltas, &rhs, e.drop_coarsest)?,
    ))
}
