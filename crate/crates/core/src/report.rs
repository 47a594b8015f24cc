//! CSV and JSON emission. CSV numbers carry 17 significant digits; JSON
//! objects keep field declaration order.

use std::fmt::Write;

use serde::Serialize;

use crate::harness::UlyanovReport;
use crate::properties::PropertyOutcome;

/// Row-oriented CSV: a header line, then one line per row.
pub fn csv<const N: usize>(header: [&str; N], rows: impl IntoIterator<Item = [f64; N]>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            first = false;
            write!(out, "{}", number(v)).expect("writing to a String");
        }
        out.push('\n');
    }
    out
}

/// `{:.16e}` for finite values, `inf`/`-inf`/`nan` otherwise.
pub fn number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn ulyanov_csv(r: &UlyanovReport) -> String {
    csv(
        ["delta1", "delta2", "lhs", "rhs", "ratio"],
        r.rows.iter().map(|row| [row.delta1, row.delta2, row.lhs, row.rhs, row.ratio]),
    )
}

pub fn modulus_csv(rows: &[(f64, f64, f64)]) -> String {
    csv(["delta1", "delta2", "omega"], rows.iter().map(|&(a, b, w)| [a, b, w]))
}

pub fn properties_csv(outcomes: &[PropertyOutcome]) -> String {
    let mut out = String::from("name,passed,worst,bound,witness\n");
    for o in outcomes {
        writeln!(
            out,
            "{},{},{},{},\"{}\"",
            o.name,
            o.passed,
            number(o.worst),
            number(o.bound),
            o.witness.replace('"', "\"\"")
        )
        .expect("writing to a String");
    }
    out
}

/// Pretty JSON with a trailing newline. Non-finite floats become `null`.
pub fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types are always serialisable");
    s.push('\n');
    s
}
