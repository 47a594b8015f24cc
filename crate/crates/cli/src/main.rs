use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mixmod_core::harness::{
    fit_sweep, lacunary_profile, make_f0, make_f1, random_zero_mean_polynomial, rate_fit, separation_gaps,
    ulyanov_report, LacunaryExperiment, SeparationQuery,
};
use mixmod_core::properties::{run_properties, Fault, PropertyConfig, PROPERTY_NAMES};
use mixmod_core::report::{csv, json, modulus_csv, properties_csv, ulyanov_csv};
use mixmod_core::smoothness::ModulusEngine;
use mixmod_core::{
    Error, Exponent, ExponentPair, GridSpec2D, LacunaryParams, ModulusControls, Phase, RateFit, Spectrum2D,
    UlyanovQuery,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Mixed moduli of smoothness and Ulyanov-type inequality experiments.
#[derive(Parser, Debug)]
#[command(name = "mixmod", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Table of ω_{α1,α2}(f, δ1, δ2) over a dyadic grid of steps.
    Modulus(ModulusArgs),
    /// Left side, right side and ratio of the Ulyanov-type inequality.
    Ulyanov(UlyanovArgs),
    /// Power-log rate fits of lacunary moduli, separation gaps or given data.
    Ratefit(RatefitArgs),
    /// Seeded property suites; exits 1 when any property fails.
    Properties(PropertiesArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
enum Preset {
    F0,
    Zero,
    F1,
    Random,
}

#[derive(Args, Debug)]
struct Output {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args, Debug)]
struct FunctionArgs {
    /// Built-in test function.
    #[arg(long, value_enum, default_value = "f0", conflicts_with = "input")]
    function: Preset,
    /// Spectrum document (JSON with kmax1, kmax2, re, im).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Band per axis of the random polynomial.
    #[arg(long, default_value_t = 8)]
    band: usize,
    /// Lacunary terms of f1.
    #[arg(long, default_value_t = 5)]
    terms: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// Odd number of step-grid points per axis.
    #[arg(long, default_value_t = 17)]
    steps: usize,
    /// Local refinement rounds.
    #[arg(long, default_value_t = 3)]
    refine: usize,
    /// Spatial grid points per axis (power of two); sized from the band when absent.
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Args, Debug)]
struct ModulusArgs {
    #[command(flatten)]
    function: FunctionArgs,
    #[command(flatten)]
    search: SearchArgs,
    /// Orders α1,α2.
    #[arg(long, default_value = "1,1", value_parser = parse_reals)]
    alpha: (f64, f64),
    /// Exponents p1,p2 of the norm (`inf` allowed).
    #[arg(long, default_value = "2,2")]
    from: ExponentPair,
    /// Steps δ = 2^{−j} for j in jmin:jmax on both axes.
    #[arg(long, default_value = "0:4", value_parser = parse_range)]
    delta_range: (u32, u32),
    /// Repeat with twice as many step intervals and report the change.
    #[arg(long)]
    refinement_check: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct UlyanovArgs {
    #[command(flatten)]
    function: FunctionArgs,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long, default_value = "1,1", value_parser = parse_reals)]
    alpha: (f64, f64),
    /// Weyl derivative orders ρ1,ρ2 on the left side.
    #[arg(long, default_value = "0,0", value_parser = parse_reals)]
    rho: (f64, f64),
    #[arg(long, default_value = "2,2")]
    from: ExponentPair,
    #[arg(long, default_value = "4,4")]
    to: ExponentPair,
    #[arg(long, default_value = "1:6", value_parser = parse_range)]
    delta_range: (u32, u32),
    /// Dyadic levels per axis in the right-hand side.
    #[arg(long, default_value_t = 10)]
    levels: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
enum FitMode {
    /// Fits of ω_α(g, δ)_q and of the one-variable Hardy integral.
    Lacunary,
    /// Exponent gaps for sin x1 · g(x2).
    Separation,
}

#[derive(Args, Debug)]
struct RatefitArgs {
    /// CSV of `delta,value` rows to fit instead of running an experiment.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "lacunary")]
    mode: FitMode,
    /// Lacunary phase: plain or shifted.
    #[arg(long, default_value = "plain")]
    family: String,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    #[arg(long, default_value_t = 16)]
    terms: u32,
    /// Exponent p of the lacunary axis.
    #[arg(long, default_value = "2")]
    from: Exponent,
    /// Exponent q of the lacunary axis.
    #[arg(long, default_value = "4")]
    to: Exponent,
    #[arg(long, default_value = "3:12", value_parser = parse_range)]
    delta_range: (u32, u32),
    #[arg(long, default_value_t = 10)]
    levels: usize,
    /// One-variable grid size (power of two).
    #[arg(long, default_value_t = 1 << 17)]
    grid: usize,
    #[arg(long, default_value_t = 17)]
    steps: usize,
    #[arg(long, default_value_t = 3)]
    refine: usize,
    /// Coarsest steps left out of the fits.
    #[arg(long, default_value_t = 2)]
    drop: usize,
    /// Fixed first-axis step in separation mode.
    #[arg(long, default_value_t = 0.125)]
    delta1: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct PropertiesArgs {
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    /// Number of random polynomials.
    #[arg(long, default_value_t = 50)]
    count: usize,
    #[arg(long, default_value_t = 4)]
    band: usize,
    #[arg(long, default_value_t = 9)]
    steps: usize,
    #[arg(long, default_value_t = 2)]
    refine: usize,
    /// Spatial oversampling relative to the band.
    #[arg(long, default_value_t = 8)]
    oversample: usize,
    /// Comma-separated property names; all when absent, none when empty.
    #[arg(long)]
    only: Option<String>,
    /// Flip the Weyl phase to check that the suites can fail.
    #[arg(long, hide = true)]
    inject_fault: bool,
    #[command(flatten)]
    output: Output,
}

fn parse_reals(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected two comma-separated numbers, got {s:?}"))?;
    let p = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    Ok((p(a)?, p(b)?))
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected jmin:jmax, got {s:?}"))?;
    let p = |x: &str| x.trim().parse::<u32>().map_err(|e| format!("{x:?}: {e}"));
    let (lo, hi) = (p(a)?, p(b)?);
    if lo > hi {
        return Err(format!("empty range {s}"));
    }
    Ok((lo, hi))
}

enum Failure {
    Usage(String),
    Numerical(String),
    Properties(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Numerical(_) => Failure::Numerical(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn load_function(f: &FunctionArgs) -> Result<Spectrum2D, Failure> {
    if let Some(path) = &f.input {
        let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        return Ok(Spectrum2D::from_json(&text)?);
    }
    Ok(match f.function {
        Preset::F0 => make_f0(),
        Preset::Zero => Spectrum2D::zeros(1, 1),
        Preset::F1 => make_f1(f.terms)?,
        Preset::Random => random_zero_mean_polynomial(&mut ChaCha8Rng::seed_from_u64(f.seed), f.band),
    })
}

fn controls(search: &SearchArgs, s: &Spectrum2D) -> Result<ModulusControls, Failure> {
    let oversample = match search.grid {
        None => 4,
        Some(n) => {
            if !n.is_power_of_two() {
                return Err(Failure::Usage(format!("--grid {n} must be a power of two")));
            }
            (n / (2 * s.kmax1().max(s.kmax2()).max(1))).max(1)
        }
    };
    let c = ModulusControls {
        steps_per_axis: search.steps,
        refine_rounds: search.refine,
        oversample,
    };
    c.validate()?;
    Ok(c)
}

fn emit(output: &Output, text: &str) -> Outcome {
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Numerical(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn deltas(range: (u32, u32)) -> Vec<f64> {
    (range.0..=range.1).map(|j| 2f64.powi(-(j as i32))).collect()
}

#[derive(Serialize)]
struct ModulusRow {
    delta1: f64,
    delta2: f64,
    omega: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega_refined: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    relative_change: Option<f64>,
}

fn cmd_modulus(a: &ModulusArgs) -> Outcome {
    let s = load_function(&a.function)?;
    let c = controls(&a.search, &s)?;
    let grid = match a.search.grid {
        Some(n) => GridSpec2D::new(n, n)?,
        None => GridSpec2D::for_band(s.kmax1(), s.kmax2(), c.oversample),
    };
    let mut engine = ModulusEngine::with_grid(&s, a.from, grid)?;
    let ds = deltas(a.delta_range);
    let mut rows = Vec::new();
    for &d1 in &ds {
        for &d2 in &ds {
            let omega = engine.modulus(a.alpha, (d1, d2), &c)?.value;
            let (omega_refined, relative_change) = if a.refinement_check {
                let r = engine.modulus(a.alpha, (d1, d2), &c.denser())?.value;
                let m = omega.max(r);
                (Some(r), Some(if m == 0.0 { 0.0 } else { (r - omega).abs() / m }))
            } else {
                (None, None)
            };
            rows.push(ModulusRow {
                delta1: d1,
                delta2: d2,
                omega,
                omega_refined,
                relative_change,
            });
        }
    }
    let text = match (a.output.format, a.refinement_check) {
        (Format::Json, _) => json(&rows),
        (Format::Csv, false) => modulus_csv(&rows.iter().map(|r| (r.delta1, r.delta2, r.omega)).collect::<Vec<_>>()),
        (Format::Csv, true) => csv(
            ["delta1", "delta2", "omega", "omega_refined", "relative_change"],
            rows.iter().map(|r| {
                [
                    r.delta1,
                    r.delta2,
                    r.omega,
                    r.omega_refined.unwrap_or(f64::NAN),
                    r.relative_change.unwrap_or(f64::NAN),
                ]
            }),
        ),
    };
    emit(&a.output, &text)
}

fn cmd_ulyanov(a: &UlyanovArgs) -> Outcome {
    let s = load_function(&a.function)?;
    let q = UlyanovQuery {
        alpha: a.alpha,
        rho: a.rho,
        from: a.from,
        to: a.to,
        j_range: a.delta_range,
        levels: a.levels,
        controls: controls(&a.search, &s)?,
    };
    q.validate()?;
    let report = ulyanov_report(&s, &q)?;
    eprintln!(
        "max ratio {} at delta = ({}, {})",
        report.max_ratio, report.argmax.0, report.argmax.1
    );
    let text = match a.output.format {
        Format::Csv => ulyanov_csv(&report),
        Format::Json => json(&report),
    };
    emit(&a.output, &text)
}

#[derive(Serialize)]
struct FitPair<'a> {
    lhs: &'a RateFit,
    rhs: &'a RateFit,
}

fn fit_csv(fits: &[(&str, &RateFit)]) -> String {
    let mut out = String::from("fit,a,b,c,residual\n");
    for (name, f) in fits {
        let row = csv(["a", "b", "c", "residual"], [[f.a, f.b, f.c, f.residual]]);
        out.push_str(name);
        out.push(',');
        out.push_str(row.lines().nth(1).unwrap_or_default());
        out.push('\n');
    }
    out
}

fn read_points(path: &PathBuf) -> Result<Vec<(f64, f64)>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let mut pts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || (i == 0 && line.chars().any(|c| c.is_ascii_alphabetic() && c != 'e')) {
            continue;
        }
        let (a, b) = parse_reals(line).map_err(|e| Failure::Usage(format!("line {}: {e}", i + 1)))?;
        pts.push((a, b));
    }
    Ok(pts)
}

fn cmd_ratefit(a: &RatefitArgs) -> Outcome {
    if let Some(path) = &a.input {
        let fit = rate_fit(&read_points(path)?)?;
        let text = match a.output.format {
            Format::Csv => fit_csv(&[("data", &fit)]),
            Format::Json => json(&fit),
        };
        return emit(&a.output, &text);
    }
    let phase = match a.family.as_str() {
        "plain" => Phase::Plain,
        "shifted" => Phase::Shifted,
        other => return Err(Failure::Usage(format!("unknown family {other:?}; use plain or shifted"))),
    };
    let series = LacunaryParams {
        alpha: a.alpha,
        beta: a.beta,
        terms: a.terms,
        phase,
    };
    let controls = ModulusControls {
        steps_per_axis: a.steps,
        refine_rounds: a.refine,
        oversample: 4,
    };
    controls.validate()?;
    let experiment = LacunaryExperiment {
        series,
        p: a.from,
        q: a.to,
        j_range: a.delta_range,
        levels: a.levels,
        grid_n: a.grid,
        drop_coarsest: a.drop,
        controls,
    };
    let text = match a.mode {
        FitMode::Lacunary => {
            let p = lacunary_profile(&experiment)?;
            let lhs = fit_sweep(&p.deltas, &p.lhs, a.drop)?;
            let rhs = fit_sweep(&p.deltas, &p.rhs, a.drop)?;
            match a.output.format {
                Format::Csv => fit_csv(&[("lhs", &lhs), ("rhs", &rhs)]),
                Format::Json => json(&FitPair { lhs: &lhs, rhs: &rhs }),
            }
        }
        FitMode::Separation => {
            let q = SeparationQuery {
                alpha1: 1.0,
                p1: Exponent::Finite(2.0),
                q1: Exponent::Finite(4.0),
                delta1: a.delta1,
                second: experiment,
            };
            let s = separation_gaps(&q)?;
            match a.output.format {
                Format::Csv => {
                    let mut t = fit_csv(&[("lhs", &s.lhs_fit), ("rhs", &s.rhs_fit)]);
                    t.push_str(&format!("gap,{},{},,\n", s.delta_a, s.delta_b));
                    t
                }
                Format::Json => json(&s),
            }
        }
    };
    emit(&a.output, &text)
}

fn cmd_properties(a: &PropertiesArgs) -> Outcome {
    let cfg = PropertyConfig {
        seed: a.seed,
        count: a.count,
        max_band: a.band,
        controls: ModulusControls {
            steps_per_axis: a.steps,
            refine_rounds: a.refine,
            oversample: a.oversample,
        },
        fault: if a.inject_fault { Fault::WeylPhaseFlip } else { Fault::None },
    };
    let names: Vec<&str> = match &a.only {
        None => PROPERTY_NAMES.to_vec(),
        Some(list) => list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect(),
    };
    let outcomes = run_properties(&cfg, &names)?;
    let text = match a.output.format {
        Format::Csv => properties_csv(&outcomes),
        Format::Json => json(&outcomes),
    };
    emit(&a.output, &text)?;
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    if failed > 0 {
        return Err(Failure::Properties(failed));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Modulus(a) => cmd_modulus(a),
        Command::Ulyanov(a) => cmd_ulyanov(a),
        Command::Ratefit(a) => cmd_ratefit(a),
        Command::Properties(a) => cmd_properties(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Properties(n)) => {
            eprintln!("{n} properties failed");
            ExitCode::from(1)
        }
    }
}
