//! CSV and JSON artifact formats.
//!
//! Floats are written as the shortest decimal that round-trips to the same
//! binary64 value, so identical runs give byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::dynamics::ContinuousTrajectory;
use crate::lyapunov::MonotonicityReport;
use crate::optimizers::DiscreteTrajectory;
use crate::rates::BoundReport;

/// Shortest round-trip decimal; `NaN`, `inf`, `-inf` for non-finite values.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        ryu::Buffer::new().format_finite(x).to_string()
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn row(out: &mut String, cells: impl IntoIterator<Item = String>) {
    let mut first = true;
    for c in cells {
        if !first {
            out.push(',');
        }
        out.push_str(&c);
        first = false;
    }
    out.push('\n');
}

/// Columns `k, x_1..x_d, f`.
pub fn discrete_csv(traj: &DiscreteTrajectory) -> String {
    let d = traj.dim();
    let mut out = String::new();
    row(
        &mut out,
        std::iter::once("k".to_string())
            .chain((1..=d).map(|i| format!("x_{i}")))
            .chain(std::iter::once("f".to_string())),
    );
    for (k, (x, f)) in traj.iterates.iter().zip(&traj.values).enumerate() {
        row(
            &mut out,
            std::iter::once(k.to_string())
                .chain(x.iter().map(|v| fmt_f64(*v)))
                .chain(std::iter::once(fmt_f64(*f))),
        );
    }
    out
}

/// Columns `t, X_1..X_d, V_1..V_d`.
pub fn continuous_csv(ct: &ContinuousTrajectory) -> String {
    let d = ct.states.first().map_or(0, |x| x.len());
    let mut out = String::new();
    row(
        &mut out,
        std::iter::once("t".to_string())
            .chain((1..=d).map(|i| format!("X_{i}")))
            .chain((1..=d).map(|i| format!("V_{i}"))),
    );
    for i in 0..ct.len() {
        row(
            &mut out,
            std::iter::once(fmt_f64(ct.times[i]))
                .chain(ct.states[i].iter().map(|v| fmt_f64(*v)))
                .chain(ct.velocities[i].iter().map(|v| fmt_f64(*v))),
        );
    }
    out
}

/// Columns `k, gap, bound`.
pub fn margin_csv(report: &BoundReport) -> String {
    let mut out = String::from("k,gap,bound\n");
    for p in &report.margins {
        let _ = writeln!(out, "{},{},{}", p.k, fmt_f64(p.gap), fmt_f64(p.bound));
    }
    out
}

/// Columns `t, V, Gamma, E, bound`.
pub fn monotonicity_csv(report: &MonotonicityReport) -> String {
    let mut out = String::from("t,V,Gamma,E,bound\n");
    for i in 0..report.times.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(report.times[i]),
            fmt_f64(report.potential[i]),
            fmt_f64(report.gamma_term[i]),
            fmt_f64(report.values[i]),
            fmt_f64(report.bound[i])
        );
    }
    out
}

/// Serializes a vector as a plain JSON array.
pub fn serialize_vector<S: serde::Serializer>(v: &crate::Vector, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter())
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: serde::Serialize>(value: &T) -> serde_json::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> std::io::Result<String> {
    Ok(sha256_hex(&std::fs::read(path)?))
}
