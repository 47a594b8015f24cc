//! Seeded property suites: the modulus properties in checkable form, the
//! conjugate phase identity and the stabilisation of weighted kernel partial
//! sums.
//!
//! Properties whose constants are not explicit are checked as empirical
//! constants: the worst ratio over a fixed step grid must move by less than
//! [`STABILITY_TOLERANCE`] when the step grid is refined.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::harness::random_zero_mean_polynomial;
use crate::mixed_norm::{ExponentPair, GridSpec2D};
use crate::realization::{angle_best_l2, AngleDegrees};
use crate::smoothness::{ModulusControls, ModulusEngine};
use crate::spectral::{conjugate_axis, kernel_partial_sums, weyl_multiplier, KernelKind, Spectrum1D, Spectrum2D};

pub const STABILITY_TOLERANCE: f64 = 0.05;
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

pub const PROPERTY_NAMES: [&str; 11] = [
    "modulus-zero-step",
    "modulus-subadditive",
    "modulus-monotone",
    "modulus-dyadic-step",
    "modulus-dilation",
    "angle-below-modulus",
    "order-comparison",
    "normalized-order-comparison",
    "derivative-transfer",
    "conjugate-phase-identity",
    "kernel-partial-sums",
];

/// Deliberate defects used to make sure the suites can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    #[default]
    None,
    /// Weyl derivative with the phase `e^{−i sign(k) ρπ/2}`
    WeylPhaseFlip,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropertyConfig {
    pub seed: u64,
    pub count: usize,
    pub max_band: usize,
    pub controls: ModulusControls,
    pub fault: Fault,
}

impl Default for PropertyConfig {
    fn default() -> Self {
        Self {
            seed: 2024,
            count: 50,
            max_band: 4,
            controls: ModulusControls {
                steps_per_axis: 9,
                refine_rounds: 2,
                oversample: 8,
            },
            fault: Fault::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyOutcome {
    pub name: String,
    pub passed: bool,
    /// Worst observed value of the checked quantity
    pub worst: f64,
    /// Threshold the worst value is compared against
    pub bound: f64,
    pub witness: String,
}

const PAIRS: [&str; 6] = ["2,2", "1,2", "2,1", "inf,4", "1,inf", "3,1.5"];
const ORDERS: [(f64, f64); 4] = [(1.0, 1.0), (0.5, 1.5), (1.3, 0.7), (2.0, 0.4)];
const STEPS: [(f64, f64); 5] = [(0.5, 0.5), (0.25, 0.5), (0.5, 0.125), (0.125, 0.125), (0.0625, 0.25)];

struct Member {
    name: String,
    s: Spectrum2D,
    pp: ExponentPair,
    alpha: (f64, f64),
}

fn corpus(cfg: &PropertyConfig) -> Vec<Member> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.count)
        .map(|i| Member {
            name: format!("poly{i:02}"),
            s: random_zero_mean_polynomial(&mut rng, cfg.max_band),
            pp: PAIRS[i % PAIRS.len()].parse().expect("static exponent pair"),
            alpha: ORDERS[i % ORDERS.len()],
        })
        .collect()
}

/// Worst value of one member and where it happened.
#[derive(Debug, Clone)]
struct Worst {
    value: f64,
    witness: String,
}

impl Worst {
    fn new() -> Self {
        Self {
            value: f64::NEG_INFINITY,
            witness: String::new(),
        }
    }

    fn offer(&mut self, value: f64, witness: impl FnOnce() -> String) {
        if value > self.value || value.is_nan() {
            self.value = value;
            self.witness = witness();
        }
    }
}

fn engine(m: &Member, s: &Spectrum2D, pp: ExponentPair, c: &ModulusControls) -> Result<ModulusEngine> {
    let grid = GridSpec2D::for_band(s.kmax1(), s.kmax2(), c.oversample);
    ModulusEngine::with_grid(s, pp, grid).map_err(|e| invalid(format!("{}: {e}", m.name)))
}

fn omega(e: &mut ModulusEngine, alpha: (f64, f64), d: (f64, f64), c: &ModulusControls) -> Result<f64> {
    Ok(e.modulus(alpha, d, c)?.value)
}

fn literal(c: &ModulusControls) -> ModulusControls {
    ModulusControls {
        refine_rounds: 0,
        ..*c
    }
}

fn rel_change(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (a - b).abs() / m
    }
}

fn weyl(s: &Spectrum2D, rho: (f64, f64), fault: Fault) -> Spectrum2D {
    let m = |k: i64, r: f64| match fault {
        Fault::None => weyl_multiplier(k, r),
        Fault::WeylPhaseFlip => weyl_multiplier(k, r).conj(),
    };
    s.map_separable(|k| m(k, rho.0), |k| m(k, rho.1))
}

/// Per-member check returning the worst value; `bound` is applied afterwards.
type Check = fn(&Member, &PropertyConfig) -> Result<Worst>;

fn zero_step(m: &Member, cfg: &PropertyConfig) -> Result<Worst> {
    let c = cfg.controls;
    let mut e = engine(m, &m.s, m.pp, &c)?;
    let mut w = Worst::new();
    for d in [0.5, 0.125] {
        for steps in [(0.0, d), (d, 0.0)] {
            let v = omega(&mut e, m.alpha, steps, &c)?;
            w.offer(v, || format!("{} pp={} delta={steps:?}", m.name, m.pp));
        }
    }
    Ok(w)
}

fn subadditive(m: &Member, cfg: &PropertyConfig) -> Result<Worst> {
    let c = literal(&cfg.controls);
    // partner: same support, rotated phases
    let g = m.s.map_multiplier(|k1, k2| Complex64::from_polar(1.0, (7 * k1 + 3 * k2) as f64));
    let sum = m.s.add(&g);
    let mut ef = engine(m, &m.s, m.pp, &c)?;
    let mut eg = engine(m, &g, m.pp, &c)?;
    let mut es = engine(m, &sum, m.pp, &c)?;
    let mut w = Worst::new();
    for d in STEPS {
        let excess = omega(&mut es, m.alpha, d, &c)? - omega(&mut ef, m.alpha, d, &c)? - omega(&mut eg, m.alpha, d, &c)?;
        w.offer(excess, || format!("{} pp={} delta={d:?}", m.name, m.pp));
    }
    Ok(w)
}

fn monotone(m: &Member, cfg: &PropertyConfig) -> Result<Worst> {
    let mut e = engine(m, &m.s, m.pp, &cfg.controls)?;
    let table = e.nested_moduli(m.alpha, (0.05, 0.07), (8, 8));
    let mut w = Worst::new();
    let (r, c) = table.dim();
    for i in 0..r {
        for j in 0..c {
            if i + 1 < r {
                let drop = table[[i, j]] - table[[i + 1, j]];
                w.offer(drop, || format!("{} pp={} box=({i},{j}) axis 1", m.name, m.pp));
            }
            if j + 1 < c {
                let drop = table[[i, j]] - table[[i, j + 1]];
                w.offer(drop, || format!("{} pp={} box=({i},{j}) axis 2", m.name, m.pp));
            }
        }
    }
    Ok(w)
}

/// `ω(f, 2δ1, 2δ2) / (2^{α1+α2} ω(f, δ1, δ2))`.
fn dyadic_step(m: &Member, cfg: &PropertyConfig) -> Result<Worst> {
    let c = literal(&cfg.controls);
    let mut e = engine(m, &m.s, m.pp, &c)?;
    let scale = 2f64.powf(m.alpha.0 + m.alpha.1);
    let mut w = Worst::new();
    for d in STEPS {
        let big = omega(&mut e, m.alpha, (2.0 * d.0, 2.0 * d.1), &c)?;
        let small = omega(&mut e, m.alpha, d, &c)?;
        w.offer(big / (scale * small), || format!("{} pp={} delta={d:?}", m.name, m.pp));
    }
    Ok(w)
}

/// `ω(f, 2δ1, δ2) / (3^{α1} ω(f, δ1, δ2))` and the same on the second axis.
fn dilation(m: &Member, cfg: &PropertyConfig) -> Result<Worst> {
    let c = literal(&cfg.controls);
    let mut e = engine(m, &m.s, m.pp, &c)?;
    let mut w = Worst::new();
    for d in STEPS {
        let small = omega(&mut e, m.alpha, d, &c)?;
        let r1 = omega(&mut e, m.alpha, (2.0 * d.0, d.1), &c)? / (3f64.powf(m.alpha.0) * small);
        let r2 = omega(&mut e, m.alpha, (d.0, 2.0 * d.1), &c)? / (3f64.powf(m.alpha.1) * small);
        w.offer(r1, || format!("{} pp={} delta={d:?} axis 1", m.name, m.pp));
        w.offer(r2, || format!("{} pp={} delta={d:?} axis 2", m.name, m.pp));
    }
    Ok(w)
}

/// Relative change of a worst ratio when the step grid is refined.
fn stability(m: &Member, cfg: &PropertyConfig, ratio: impl Fn(&ModulusControls) -> Result<f64>) -> Result<Worst> {
    let base = ratio(&cfg.controls)?;
    let dense = ratio(&cfg.controls.denser())?;
    let mut w = Worst::new();
    let change = if base.is_finite() && dense.is_finite() {
        rel_change(base, dense)
    } else {
        f64::INFINITY
    };
    w.offer(change, || format!("{} pp={} constant {base:.6e} -> {dense:.6e}", m.name, m.pp));
    Ok(w)
}

/// `Y_{n−1,n−1}(f)_{22} / ω(f, 1/n, 1/n)_{22}`, worst over `n`.
fn angle_below_modulus(m: &Member, cfg: &PropertyConfig) -> Result<Worst> {
    let pp = ExponentPair::finite(2.0, 2.0)?;
    stability(m, cfg, |c| {
        let mut e = engine(m, &m.s, pp, c)?;
        let mut worst = 0.0_f64;
        for n in [1u32, 2, 4, 8] {
            let y = angle_best_l2(&m.s, AngleDegrees { m1: n - 1, m2: n - 1 }).1;
            let d = 1.0 / n as f64;
            worst = worst.max(y / omega(&mut e, m.alpha, (d, d), c)?);
        }
        Ok(worst)
    })
}

fn raised(alpha: (f64, f64)) -> (f64, f64) {
    (alpha.0 + 0.5, alpha.1 + 1.0)
}

/// `ω_β / ω_α` with `β > α`.
fn order_comparison(m: &Member, cfg: &PropertyConfig) -> Result<Worst> {
    stability(m, cfg, |c| {
        let mut e = engine(m, &m.s, m.pp, c)?;
        let mut worst = 0.0_f64;
        for d in STEPS {
            worst = worst.max(omega(&mut e, raised(m.alpha), d, c)? / omega(&mut e, m.alpha, d, c)?);
        }
        Ok(worst)
    })
}

/// `δ^{−α} ω_α / (δ^{−β} ω_β)` with `β > α`.
fn normalized_order_comparison(m: &Member, cfg: &PropertyConfig) -> Result<Worst> {
    stability(m, cfg, |c| {
        let mut e = engine(m, &m.s, m.pp, c)?;
        let b = raised(m.alpha);
        let mut worst = 0.0_f64;
        for d in STEPS {
            let lower = d.0.powf(-m.alpha.0) * d.1.powf(-m.alpha.1) * omega(&mut e, m.alpha, d, c)?;
            let upper = d.0.powf(-b.0) * d.1.powf(-b.1) * omega(&mut e, b, d, c)?;
            worst = worst.max(lower / upper);
        }
        Ok(worst)
    })
}

/// `δ1^{−r} ω_{α1+r, α2}(f) / ω_{α1,α2}(f^{(r,0)})` for `r ∈ {1/2, 1}`.
fn derivative_transfer(m: &Member, cfg: &PropertyConfig) -> Result<Worst> {
    stability(m, cfg, |c| {
        let mut e = engine(m, &m.s, m.pp, c)?;
        let mut worst = 0.0_f64;
        for r in [0.5, 1.0] {
            let d = weyl(&m.s, (r, 0.0), cfg.fault);
            let mut ed = engine(m, &d, m.pp, c)?;
            for s in STEPS {
                let lhs = s.0.powf(-r) * omega(&mut e, (m.alpha.0 + r, m.alpha.1), s, c)?;
                worst = worst.max(lhs / omega(&mut ed, m.alpha, s, c)?);
            }
        }
        Ok(worst)
    })
}

fn run_members(cfg: &PropertyConfig, members: &[Member], check: Check, name: &str, bound: f64) -> Result<PropertyOutcome> {
    let results: Vec<Result<Worst>> = members.par_iter().map(|m| check(m, cfg)).collect();
    let mut worst = Worst::new();
    for r in results {
        let w = r?;
        worst.offer(w.value, || w.witness.clone());
    }
    Ok(PropertyOutcome {
        name: name.to_string(),
        passed: worst.value <= bound,
        worst: worst.value,
        bound,
        witness: worst.witness,
    })
}

/// Random real one-variable polynomial without constant term, as
/// `(a_k, b_k)` pairs for `k = 1..`.
fn random_cos_sin<R: Rng>(rng: &mut R, band: usize) -> Vec<(f64, f64)> {
    (0..band)
        .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

/// `Σ k^α A_k(x)` against `cos(πα/2) f^{(α)} + sin(πα/2) f̃^{(α)}`, largest
/// pointwise deviation.
pub fn conjugate_phase_identity(seed: u64, count: usize, fault: Fault) -> Result<PropertyOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let n = 64;
    let mut worst = Worst::new();
    for i in 0..count {
        let band = rng.random_range(1..=12);
        let ab = random_cos_sin(&mut rng, band);
        let f = Spectrum1D::from_cos_sin(&ab);
        for alpha in [0.3, 1.0, 1.7] {
            let d = |s: &Spectrum1D| match fault {
                Fault::None => s.weyl_derivative(alpha),
                Fault::WeylPhaseFlip => Ok(s.map_multiplier(|k| weyl_multiplier(k, alpha).conj())),
            };
            let (c, s) = ((alpha * FRAC_PI_2).cos(), (alpha * FRAC_PI_2).sin());
            let combined = d(&f)?.scale(c).add(&d(&conjugate_axis(&f))?.scale(s));
            let values = combined.synthesize(n)?;
            for (j, v) in values.iter().enumerate() {
                let x = 2.0 * PI * j as f64 / n as f64;
                let direct: f64 = ab
                    .iter()
                    .enumerate()
                    .map(|(k, &(a, b))| {
                        let k = k as f64 + 1.0;
                        k.powf(alpha) * (a * (k * x).cos() + b * (k * x).sin())
                    })
                    .sum();
                worst.offer((v - direct).abs(), || format!("poly{i:02} alpha={alpha} x={x:.6}"));
            }
        }
    }
    Ok(PropertyOutcome {
        name: "conjugate-phase-identity".into(),
        passed: worst.value <= IDENTITY_TOLERANCE,
        worst: worst.value,
        bound: IDENTITY_TOLERANCE,
        witness: worst.witness,
    })
}

/// Largest `|Σ_{ν≤n} ν^{−α} cos νx| · |x|^{1−α}` over a geometric `x` grid
/// in `(0, π]`, for each `n = 2^4, …, 2^12`.
pub fn kernel_weighted_maxima(alpha: f64, kind: KernelKind) -> Vec<(u32, f64)> {
    let levels: Vec<u32> = (4..=12).map(|e| 1u32 << e).collect();
    let nmax = *levels.last().expect("nonempty");
    let mut best = vec![0.0_f64; levels.len()];
    for i in 0..=(8 * 14) {
        let x = PI * 2f64.powf(-(i as f64) / 8.0);
        let sums = kernel_partial_sums(nmax, alpha, x, kind);
        let w = x.powf(1.0 - alpha);
        for (b, &n) in best.iter_mut().zip(&levels) {
            *b = b.max(sums[n as usize - 1].abs() * w);
        }
    }
    levels.into_iter().zip(best).collect()
}

/// The maximum over `n ≥ 2^6` must be within 10% of the maximum over all `n`.
pub fn kernel_partial_sums_stabilise() -> PropertyOutcome {
    let mut worst = Worst::new();
    for alpha in [0.3, 0.5, 0.7] {
        for kind in [KernelKind::Cos, KernelKind::Sin] {
            let maxima = kernel_weighted_maxima(alpha, kind);
            let all = maxima.iter().fold(0.0_f64, |m, p| m.max(p.1));
            let late = maxima.iter().filter(|p| p.0 >= 64).fold(0.0_f64, |m, p| m.max(p.1));
            worst.offer(rel_change(all, late), || format!("alpha={alpha} kind={kind:?} all={all:.6} late={late:.6}"));
        }
    }
    PropertyOutcome {
        name: "kernel-partial-sums".into(),
        passed: worst.value <= 0.1,
        worst: worst.value,
        bound: 0.1,
        witness: worst.witness,
    }
}

/// Runs the named suites in the order given; unknown names are an error.
pub fn run_properties(cfg: &PropertyConfig, names: &[&str]) -> Result<Vec<PropertyOutcome>> {
    for n in names {
        if !PROPERTY_NAMES.contains(n) {
            return Err(invalid(format!("unknown property {n:?}")));
        }
    }
    cfg.controls.validate()?;
    let members = corpus(cfg);
    let eps = 1e-9;
    names
        .iter()
        .map(|&name| {
            let (check, bound): (Check, f64) = match name {
                "modulus-zero-step" => (zero_step, 0.0),
                "modulus-subadditive" => (subadditive, eps),
                "modulus-monotone" => (monotone, 1e-12),
                "modulus-dyadic-step" => (dyadic_step, 1.0 + 1e-6),
                "modulus-dilation" => (dilation, 1.0 + 1e-6),
                "angle-below-modulus" => (angle_below_modulus, STABILITY_TOLERANCE),
                "order-comparison" => (order_comparison, STABILITY_TOLERANCE),
                "normalized-order-comparison" => (normalized_order_comparison, STABILITY_TOLERANCE),
                "derivative-transfer" => (derivative_transfer, STABILITY_TOLERANCE),
                "conjugate-phase-identity" => return conjugate_phase_identity(cfg.seed, cfg.count, cfg.fault),
                _ => return Ok(kernel_partial_sums_stabilise()),
            };
            run_members(cfg, &members, check, name, bound)
        })
        .collect()
}
