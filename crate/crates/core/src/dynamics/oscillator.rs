use serde::{Deserialize, Serialize};

use super::DynamicsError;
use crate::objectives::{Objective, Quadratic};
use crate::Vector;

/// Relative band around `c² = 4mK` treated as critical.
const CRITICAL_BAND: f64 = 1e-9;
/// `c² >= EXTREME_FACTOR · 4mK` is treated as extremely over-damped.
const EXTREME_FACTOR: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DampingClass {
    Under,
    Critical,
    Over,
    ExtremeOver,
}

/// `c / (2√(mK))`.
pub fn damping_ratio(m: f64, c: f64, hooke_k: f64) -> f64 {
    c / (2.0 * (m * hooke_k).sqrt())
}

pub fn classify_damping(m: f64, c: f64, hooke_k: f64) -> DampingClass {
    let c2 = c * c;
    let crit = 4.0 * m * hooke_k;
    if c2 >= EXTREME_FACTOR * crit {
        DampingClass::ExtremeOver
    } else if (c2 - crit).abs() <= CRITICAL_BAND * crit {
        DampingClass::Critical
    } else if c2 > crit {
        DampingClass::Over
    } else {
        DampingClass::Under
    }
}

/// Decay exponent of the oscillation amplitude, `|X(t)| ~ exp(-rate · t)`.
///
/// `c/(2m)` for under- and critically damped systems,
/// `½[c/m - √(c²/m² - 4K/m)]` when over-damped. As `c → ∞` this tends
/// to `K/c`; the energy, quadratic in `X`, decays at twice that rate,
/// tending to `2K/c`.
pub fn energy_decay_exponent(m: f64, c: f64, hooke_k: f64) -> f64 {
    match classify_damping(m, c, hooke_k) {
        DampingClass::Under | DampingClass::Critical => c / (2.0 * m),
        DampingClass::Over | DampingClass::ExtremeOver => {
            let disc = c * c / (m * m) - 4.0 * hooke_k / m;
            // c/m - √disc loses digits for large c; use the product form
            let sum = c / m + disc.sqrt();
            0.5 * (4.0 * hooke_k / m) / sum
        }
    }
}

/// `½ m v² + ½ K x²`.
pub fn oscillator_energy(m: f64, hooke_k: f64, x: f64, v: f64) -> f64 {
    0.5 * m * v * v + 0.5 * hooke_k * x * x
}

/// Exact `(X(t), Ẋ(t))` of `m Ẍ + c Ẋ + K X = 0` with `X(0) = x0`, `Ẋ(0) = v0`.
///
/// With `m = 0` this is the first-order decay `x0 · exp(-Kt/c)` and `v0`
/// is ignored.
pub fn analytic_quadratic_solution(
    m: f64,
    c: f64,
    hooke_k: f64,
    x0: f64,
    v0: f64,
    t: f64,
) -> Result<(f64, f64), DynamicsError> {
    if m == 0.0 {
        if !(c > 0.0) {
            return Err(DynamicsError::NoDamping(c));
        }
        let x = x0 * (-hooke_k * t / c).exp();
        return Ok((x, -hooke_k / c * x));
    }
    let r = c / (2.0 * m);
    let w2 = hooke_k / m;
    let e = (-r * t).exp();
    Ok(match classify_damping(m, c, hooke_k) {
        DampingClass::Under => {
            let wd = (w2 - r * r).sqrt();
            let (s, co) = (wd * t).sin_cos();
            (
                e * (x0 * co + (v0 + r * x0) / wd * s),
                e * (v0 * co - (w2 * x0 + r * v0) / wd * s),
            )
        }
        DampingClass::Critical => {
            let b = v0 + r * x0;
            (e * (x0 + b * t), e * (v0 - r * b * t))
        }
        DampingClass::Over | DampingClass::ExtremeOver => {
            let s = (r * r - w2).sqrt();
            // l1 = -r + s computed without cancellation
            let l1 = -w2 / (r + s);
            let l2 = -r - s;
            let a = (v0 - l2 * x0) / (l1 - l2);
            let b = x0 - a;
            let (e1, e2) = ((l1 * t).exp(), (l2 * t).exp());
            (a * e1 + b * e2, a * l1 * e1 + b * l2 * e2)
        }
    })
}

/// Exact solution for a quadratic `½(x-x*)ᵀH(x-x*)`: each eigenmode of `H`
/// is an independent 1-D oscillator with `K = λ_i`.
pub fn analytic_modes(
    q: &Quadratic,
    m: f64,
    c: f64,
    x0: &Vector,
    v0: &Vector,
    t: f64,
) -> Result<(Vector, Vector), DynamicsError> {
    let d = q.dim();
    if x0.len() != d || v0.len() != d {
        return Err(DynamicsError::Dimension {
            expected: d,
            got: x0.len().min(v0.len()),
        });
    }
    let eig = q.matrix().clone().symmetric_eigen();
    let q_mat = &eig.eigenvectors;
    let z0 = q_mat.transpose() * (x0 - q.minimizer());
    let w0 = q_mat.transpose() * v0;
    let mut z = Vector::zeros(d);
    let mut w = Vector::zeros(d);
    for i in 0..d {
        let (zi, wi) = analytic_quadratic_solution(m, c, eig.eigenvalues[i], z0[i], w0[i], t)?;
        z[i] = zi;
        w[i] = wi;
    }
    Ok((q_mat * z + q.minimizer(), q_mat * w))
}
