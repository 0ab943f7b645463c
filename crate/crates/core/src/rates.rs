//! Closed-form convergence bounds and empirical rate fits.

use serde::Serialize;

use crate::objectives::ConditionConstants;
use crate::optimizers::DiscreteTrajectory;

/// Relative slack when comparing a gap against a bound.
pub const BOUND_SLACK: f64 = 1e-9;
/// Gaps at or below this are not used as the denominator of a Newton ratio.
pub const NEWTON_GAP_FLOOR: f64 = 1e-14;
/// Minimum usable pairs for a conclusive Newton check.
pub const NEWTON_MIN_PAIRS: usize = 3;

#[derive(Debug, thiserror::Error)]
pub enum RateError {
    #[error("unknown bound id `{0}`")]
    UnknownId(String),
    #[error("bound `{0}` has no explicit constant; use calibrated mode")]
    NoConstant(&'static str),
    #[error("bound `{id}` needs {what}")]
    MissingConstant { id: &'static str, what: &'static str },
    #[error("f* is not finite")]
    NoMinimum,
    #[error("trajectory diverged; bounds apply to convergent runs")]
    Diverged,
    #[error("fit window [{lo}, {hi}] has {usable} usable points (need 2){}", if *.shrunk { ", after shrinking past non-positive gaps" } else { "" })]
    TooFewPoints {
        lo: usize,
        hi: usize,
        usable: usize,
        shrunk: bool,
    },
    #[error("window [{lo}, {hi}] outside a sequence of length {len}")]
    BadWindow { lo: usize, hi: usize, len: usize },
    #[error("no trajectories given")]
    Empty,
    #[error("bound `{0}` is a recurrence; use check_newton_quadratic")]
    Recurrence(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BoundForm {
    /// `C / k^power`.
    SublinearPower { power: f64 },
    /// `C · base^k`.
    LinearBase { base: f64 },
    /// `C · exp(-exponent · k)`.
    LinearExponent { exponent: f64 },
    /// `gap(k+1) <= ξ gap(k)²`.
    QuadraticRecurrence,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateBound {
    pub id: &'static str,
    pub form: BoundForm,
    /// Explicit constant in front of the shape, when the formula has one.
    pub constant: Option<f64>,
    pub formula: &'static str,
    /// Whether the bound is on the expected gap (randomized methods).
    pub expectation: bool,
}

impl RateBound {
    /// Shape without the constant, at iteration `k`.
    pub fn shape(&self, k: f64) -> f64 {
        match self.form {
            BoundForm::SublinearPower { power } => k.powf(-power),
            BoundForm::LinearBase { base } => base.powf(k),
            BoundForm::LinearExponent { exponent } => (-exponent * k).exp(),
            BoundForm::QuadraticRecurrence => f64::NAN,
        }
    }

    /// `B(k)` with the explicit constant.
    pub fn eval(&self, k: f64) -> Option<f64> {
        self.constant.map(|c| c * self.shape(k))
    }

    /// Per-iteration exponential rate for linear forms.
    pub fn linear_exponent(&self) -> Option<f64> {
        match self.form {
            BoundForm::LinearBase { base } => Some(-base.ln()),
            BoundForm::LinearExponent { exponent } => Some(exponent),
            _ => None,
        }
    }
}

/// `(id, formula)` for every catalog entry.
pub const BOUND_IDS: [(&str, &str); 14] = [
    ("VGD_CONVEX", "L‖x0-x*‖²/(2k)"),
    ("VGD_SC", "(1 - 1/κ)^k · L‖x0-x*‖²/2"),
    ("VGD_PL", "C·exp(-2μk/L), C calibrated"),
    ("NAG_CONVEX", "2L‖x0-x*‖²/k²"),
    ("NAG_SC", "(1 - √(1/(4κ)))^k · L‖x0-x*‖²/2"),
    ("NAG_QG", "C·exp(-(2/5)√(μ/L)·k), C calibrated"),
    ("RCGD_CONVEX", "E: d·L_max‖x0-x*‖²/(2k)"),
    ("RCGD_SC", "E: C·exp(-2μk/(d·L_max)), C calibrated"),
    ("RCGD_PL", "E: C·exp(-2μk/(d·L_max)), C calibrated"),
    ("ARCG_CONVEX", "E: C·d/k², C calibrated"),
    ("ARCG_CONVEX_EXPLICIT", "E: 2d√(L_max)‖x0-x*‖²/k²"),
    ("ARCG_QG", "E: C·exp(-(2/(5d))√(μ/L_max)·k), C calibrated"),
    ("ARCG_SC", "E: (1 - (1/d)√(μ/L_max))^k · L‖x0-x*‖²/2"),
    ("NEWTON_QUADRATIC", "gap(k+1) <= ξ·gap(k)²"),
];

/// Looks up a bound by id. `r0 = ‖x0 - x*‖`, `d` the dimension.
pub fn bound_catalog(id: &str, consts: &ConditionConstants, r0: f64, d: usize) -> Result<RateBound, RateError> {
    let (id, formula) = BOUND_IDS
        .iter()
        .copied()
        .find(|(i, _)| *i == id)
        .ok_or_else(|| RateError::UnknownId(id.to_string()))?;
    let (l, mu, lmax, d) = (consts.l, consts.mu, consts.l_max, d as f64);
    let need_mu = || {
        if mu.is_finite() && mu > 0.0 {
            Ok(mu)
        } else {
            Err(RateError::MissingConstant { id, what: "mu > 0" })
        }
    };
    let r2 = r0 * r0;
    let b = |form, constant: Option<f64>, expectation| RateBound {
        id,
        form,
        constant,
        formula,
        expectation,
    };
    use BoundForm::*;
    Ok(match id {
        "VGD_CONVEX" => b(SublinearPower { power: 1.0 }, Some(l * r2 / 2.0), false),
        "VGD_SC" => b(
            LinearBase {
                base: 1.0 - need_mu()? / l,
            },
            Some(l * r2 / 2.0),
            false,
        ),
        "VGD_PL" => b(
            LinearExponent {
                exponent: 2.0 * need_mu()? / l,
            },
            None,
            false,
        ),
        "NAG_CONVEX" => b(SublinearPower { power: 2.0 }, Some(2.0 * l * r2), false),
        "NAG_SC" => b(
            LinearBase {
                base: 1.0 - (need_mu()? / (4.0 * l)).sqrt(),
            },
            Some(l * r2 / 2.0),
            false,
        ),
        "NAG_QG" => b(
            LinearExponent {
                exponent: 0.4 * (need_mu()? / l).sqrt(),
            },
            None,
            false,
        ),
        "RCGD_CONVEX" => b(SublinearPower { power: 1.0 }, Some(d * lmax * r2 / 2.0), true),
        "RCGD_SC" | "RCGD_PL" => b(
            LinearExponent {
                exponent: 2.0 * need_mu()? / (d * lmax),
            },
            None,
            true,
        ),
        "ARCG_CONVEX" => b(SublinearPower { power: 2.0 }, None, true),
        "ARCG_CONVEX_EXPLICIT" => b(SublinearPower { power: 2.0 }, Some(2.0 * d * lmax.sqrt() * r2), true),
        "ARCG_QG" => b(
            LinearExponent {
                exponent: 2.0 / (5.0 * d) * (need_mu()? / lmax).sqrt(),
            },
            None,
            true,
        ),
        "ARCG_SC" => b(
            LinearBase {
                base: 1.0 - (need_mu()? / lmax).sqrt() / d,
            },
            Some(l * r2 / 2.0),
            true,
        ),
        "NEWTON_QUADRATIC" => b(QuadraticRecurrence, None, false),
        _ => unreachable!("id comes from BOUND_IDS"),
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantMode {
    /// Use the formula's explicit constant.
    #[default]
    PaperConstant,
    /// Choose `C` so that `B(k0) = gap(k0)` at `k0 = 1`.
    CalibratedAtK0,
}

/// One row of a margin curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MarginPoint {
    pub k: usize,
    pub gap: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub bound_id: String,
    pub pass: bool,
    pub first_violation_k: Option<usize>,
    pub violations: usize,
    pub k0: usize,
    pub constant: f64,
    pub margins: Vec<MarginPoint>,
}

impl BoundReport {
    /// `min_k (B(k) - gap(k)) / B(k)`.
    pub fn worst_relative_margin(&self) -> f64 {
        self.margins
            .iter()
            .map(|p| (p.bound - p.gap) / p.bound)
            .fold(f64::INFINITY, f64::min)
    }
}

const K0: usize = 1;

fn resolve_constant(bound: &RateBound, mode: ConstantMode, gap_k0: f64) -> Result<f64, RateError> {
    match bound.form {
        BoundForm::QuadraticRecurrence => return Err(RateError::Recurrence(bound.id)),
        _ => {}
    }
    match mode {
        ConstantMode::PaperConstant => bound.constant.ok_or(RateError::NoConstant(bound.id)),
        ConstantMode::CalibratedAtK0 => Ok(gap_k0 / bound.shape(K0 as f64)),
    }
}

fn compare(bound: &RateBound, constant: f64, gaps: &[f64], slack: Option<&[f64]>) -> BoundReport {
    let mut margins = Vec::with_capacity(gaps.len().saturating_sub(K0));
    let mut first = None;
    let mut violations = 0;
    for (k, &gap) in gaps.iter().enumerate().skip(K0) {
        let b = constant * bound.shape(k as f64);
        let allowed = b * (1.0 + BOUND_SLACK) + slack.map_or(0.0, |s| s[k]);
        if !(gap <= allowed) {
            violations += 1;
            first.get_or_insert(k);
        }
        margins.push(MarginPoint { k, gap, bound: b });
    }
    BoundReport {
        bound_id: bound.id.to_string(),
        pass: violations == 0,
        first_violation_k: first,
        violations,
        k0: K0,
        constant,
        margins,
    }
}

/// Checks `f(x(k)) - f* <= B(k)(1 + 1e-9)` for all `k >= 1`.
pub fn check_bound(
    bound: &RateBound,
    traj: &DiscreteTrajectory,
    f_star: f64,
    mode: ConstantMode,
) -> Result<BoundReport, RateError> {
    if !f_star.is_finite() {
        return Err(RateError::NoMinimum);
    }
    if traj.diverged {
        return Err(RateError::Diverged);
    }
    let gaps = traj.gaps(f_star);
    let c = resolve_constant(bound, mode, gaps.get(K0).copied().unwrap_or(0.0))?;
    Ok(compare(bound, c, &gaps, None))
}

/// Mean gap and its standard error at every `k`, over equal-length runs.
pub fn mean_gaps(trajs: &[DiscreteTrajectory], f_star: f64) -> Result<(Vec<f64>, Vec<f64>), RateError> {
    let n = trajs.len();
    if n == 0 {
        return Err(RateError::Empty);
    }
    if trajs.iter().any(|t| t.diverged) {
        return Err(RateError::Diverged);
    }
    let len = trajs.iter().map(|t| t.len()).min().unwrap();
    let mut mean = vec![0.0; len];
    let mut se = vec![0.0; len];
    for k in 0..len {
        let xs = trajs.iter().map(|t| t.values[k] - f_star);
        let m = xs.clone().sum::<f64>() / n as f64;
        let var = if n > 1 {
            xs.map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        mean[k] = m;
        se[k] = (var / n as f64).sqrt();
    }
    Ok((mean, se))
}

/// Expectation version of [`check_bound`]: the mean gap over seeds must stay
/// below `B(k) + 3 standard errors`.
pub fn check_expectation_bound(
    bound: &RateBound,
    trajs: &[DiscreteTrajectory],
    f_star: f64,
    mode: ConstantMode,
) -> Result<BoundReport, RateError> {
    if !f_star.is_finite() {
        return Err(RateError::NoMinimum);
    }
    let (mean, se) = mean_gaps(trajs, f_star)?;
    let c = resolve_constant(bound, mode, mean.get(K0).copied().unwrap_or(0.0))?;
    let slack: Vec<f64> = se.iter().map(|s| 3.0 * s).collect();
    Ok(compare(bound, c, &mean, Some(&slack)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitKind {
    LogLinear,
    LogLog,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Window {
    /// Middle 50% of the indices.
    #[default]
    MiddleHalf,
    /// Inclusive index range.
    Range(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateFit {
    pub kind: FitKind,
    /// Linear fits: `-slope` of `log gap` vs `x`. Sublinear fits: the power `p`.
    pub exponent: f64,
    /// `exp(intercept)`.
    pub constant: f64,
    pub window: (usize, usize),
    /// RMS residual in log space.
    pub residual: f64,
    pub points: usize,
    pub shrunk: bool,
}

fn window_bounds(window: Window, len: usize) -> Result<(usize, usize), RateError> {
    if len == 0 {
        return Err(RateError::BadWindow { lo: 0, hi: 0, len });
    }
    match window {
        Window::MiddleHalf => {
            let lo = len / 4;
            let hi = ((3 * len) / 4).max(lo + 1).min(len - 1);
            Ok((lo, hi))
        }
        Window::Range(lo, hi) if lo <= hi && hi < len => Ok((lo, hi)),
        Window::Range(lo, hi) => Err(RateError::BadWindow { lo, hi, len }),
    }
}

/// Least-squares fit of `log gap = a + b·g(x)` over `window`, where `x` is
/// `xs[i]` (log-linear) or `ln xs[i]` (log-log). Points with non-positive
/// gap (or `x <= 0` in log-log) shrink the window to its longest run of
/// usable points.
pub fn fit_rate(xs: &[f64], gaps: &[f64], window: Window, kind: FitKind) -> Result<RateFit, RateError> {
    let len = xs.len().min(gaps.len());
    let (lo, hi) = window_bounds(window, len)?;
    let usable = |i: usize| gaps[i] > 0.0 && gaps[i].is_finite() && (kind == FitKind::LogLinear || xs[i] > 0.0);
    // longest run of usable indices inside [lo, hi]
    let (mut best, mut cur) = ((lo, 0usize), (lo, 0usize));
    for i in lo..=hi {
        if usable(i) {
            if cur.1 == 0 {
                cur = (i, 0);
            }
            cur.1 += 1;
            if cur.1 > best.1 {
                best = cur;
            }
        } else {
            cur.1 = 0;
        }
    }
    let shrunk = best.1 != hi - lo + 1;
    if best.1 < 2 {
        return Err(RateError::TooFewPoints {
            lo,
            hi,
            usable: best.1,
            shrunk,
        });
    }
    let (a, n) = best;
    let idx = a..a + n;
    let xv: Vec<f64> = idx
        .clone()
        .map(|i| if kind == FitKind::LogLog { xs[i].ln() } else { xs[i] })
        .collect();
    let yv: Vec<f64> = idx.map(|i| gaps[i].ln()).collect();
    let nf = n as f64;
    let mx = xv.iter().sum::<f64>() / nf;
    let my = yv.iter().sum::<f64>() / nf;
    let sxx: f64 = xv.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xv.iter().zip(&yv).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rss: f64 = xv
        .iter()
        .zip(&yv)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(RateFit {
        kind,
        exponent: -slope,
        constant: intercept.exp(),
        window: (a, a + n - 1),
        residual: (rss / nf).sqrt(),
        points: n,
        shrunk,
    })
}

fn indices(n: usize) -> Vec<f64> {
    (0..n).map(|k| k as f64).collect()
}

/// Per-iteration exponent `r` in `gap ≈ C·exp(-r k)`.
pub fn fit_linear_rate(traj: &DiscreteTrajectory, f_star: f64, window: Window) -> Result<RateFit, RateError> {
    let gaps = traj.gaps(f_star);
    fit_rate(&indices(gaps.len()), &gaps, window, FitKind::LogLinear)
}

/// Power `p` in `gap ≈ C / k^p`.
pub fn fit_sublinear_rate(traj: &DiscreteTrajectory, f_star: f64, window: Window) -> Result<RateFit, RateError> {
    let gaps = traj.gaps(f_star);
    fit_rate(&indices(gaps.len()), &gaps, window, FitKind::LogLog)
}

#[derive(Clone, Debug, Serialize)]
pub struct NewtonReport {
    /// `max gap(k+1)/gap(k)²` over usable pairs.
    pub xi: f64,
    pub ratios: Vec<(usize, f64)>,
    pub usable_pairs: usize,
    pub inconclusive: bool,
    pub pass: bool,
}

/// Looks for a single `ξ` with `gap(k+1) <= ξ gap(k)²` over all pairs with
/// `gap(k) > 1e-14`. Fewer than three such pairs is inconclusive.
pub fn check_newton_quadratic(gaps: &[f64]) -> NewtonReport {
    let ratios: Vec<(usize, f64)> = gaps
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] > NEWTON_GAP_FLOOR)
        .map(|(k, w)| (k, w[1].max(0.0) / (w[0] * w[0])))
        .collect();
    let xi = ratios.iter().map(|r| r.1).fold(0.0, f64::max);
    let inconclusive = ratios.len() < NEWTON_MIN_PAIRS;
    NewtonReport {
        xi,
        usable_pairs: ratios.len(),
        pass: !inconclusive && xi.is_finite(),
        inconclusive,
        ratios,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn consts() -> ConditionConstants {
        ConditionConstants::new(300.004, 300.004 / 6.0008, 300.0, None)
    }

    #[test]
    fn catalog_spot_values() {
        let c = consts();
        let b = bound_catalog("VGD_CONVEX", &c, 1.0, 2).unwrap();
        assert!((b.eval(100.0).unwrap() - 1.50002).abs() < 1e-9);
        assert!((b.eval(1.0).unwrap() - 150.002).abs() < 1e-9);
        assert!((b.eval(10.0).unwrap() - 15.0002).abs() < 1e-9);

        let b = bound_catalog("NAG_SC", &c, 1.0, 2).unwrap();
        let BoundForm::LinearBase { base } = b.form else {
            panic!()
        };
        assert!((base - (1.0 - (1.0f64 / 24.0032).sqrt())).abs() < 1e-12);
        assert!((base - 0.7959).abs() < 1e-4);

        let b = bound_catalog("NAG_CONVEX", &c, 2.0, 2).unwrap();
        assert!((b.eval(10.0).unwrap() - 2.0 * 300.004 * 4.0 / 100.0).abs() < 1e-9);

        let b = bound_catalog("RCGD_CONVEX", &c, 1.0, 2).unwrap();
        assert!((b.eval(100.0).unwrap() - 3.0).abs() < 1e-12);

        let b = bound_catalog("ARCG_CONVEX_EXPLICIT", &c, 1.0, 2).unwrap();
        assert!((b.eval(10.0).unwrap() - 4.0 * 300f64.sqrt() / 100.0).abs() < 1e-12);

        let b = bound_catalog("ARCG_SC", &c, 1.0, 2).unwrap();
        assert!((b.shape(1.0) - (1.0 - 0.5 * (c.mu / 300.0).sqrt())).abs() < 1e-12);

        let b = bound_catalog("NAG_QG", &c, 1.0, 2).unwrap();
        assert!((b.linear_exponent().unwrap() - 0.4 / 6.0008f64.sqrt()).abs() < 1e-12);
        assert!(b.constant.is_none());

        assert!(matches!(bound_catalog("FOO", &c, 1.0, 2), Err(RateError::UnknownId(_))));
    }

    #[test]
    fn catalog_shapes_are_nonincreasing() {
        let c = consts();
        for (id, _) in BOUND_IDS {
            let b = bound_catalog(id, &c, 1.0, 2).unwrap();
            if b.form == BoundForm::QuadraticRecurrence {
                continue;
            }
            let s: Vec<f64> = (1..200).map(|k| b.shape(k as f64)).collect();
            assert!(s.iter().all(|v| *v > 0.0), "{id}");
            assert!(s.windows(2).all(|w| w[1] <= w[0]), "{id}");
        }
    }

    #[test]
    fn synthetic_linear_fit() {
        let gaps: Vec<f64> = (0..100).map(|k| 0.9f64.powi(k)).collect();
        let fit = fit_rate(&indices(100), &gaps, Window::MiddleHalf, FitKind::LogLinear).unwrap();
        assert!((fit.exponent + 0.9f64.ln()).abs() < 1e-12);
        assert!((fit.exponent - 0.10536).abs() < 1e-5);
        assert!(fit.residual < 1e-12);
        let flat = vec![2.0; 50];
        let fit = fit_rate(&indices(50), &flat, Window::MiddleHalf, FitKind::LogLinear).unwrap();
        assert_eq!(fit.exponent, 0.0);
    }

    #[test]
    fn synthetic_sublinear_fits() {
        let xs = indices(1000);
        let inv: Vec<f64> = xs.iter().map(|k| 1.0 / k).collect();
        let fit = fit_rate(&xs, &inv, Window::MiddleHalf, FitKind::LogLog).unwrap();
        assert!((fit.exponent - 1.0).abs() < 0.01);
        let inv2: Vec<f64> = xs.iter().map(|k| 5.0 / (k * k)).collect();
        let fit = fit_rate(&xs, &inv2, Window::MiddleHalf, FitKind::LogLog).unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-9);
        assert!((fit.constant - 5.0).abs() < 1e-6);
        let flat = vec![3.0; 100];
        let fit = fit_rate(&indices(100), &flat, Window::MiddleHalf, FitKind::LogLog).unwrap();
        assert!(fit.exponent.abs() < 1e-12);
    }

    #[test]
    fn loglog_skips_k_zero() {
        let xs = indices(10);
        let g: Vec<f64> = xs.iter().map(|k| 1.0 / (k + 1.0)).collect();
        let fit = fit_rate(&xs, &g, Window::Range(0, 9), FitKind::LogLog).unwrap();
        assert!(fit.shrunk);
        assert_eq!(fit.window, (1, 9));
    }

    #[test]
    fn window_shrinks_at_zero_gaps() {
        let mut gaps: Vec<f64> = (0..20).map(|k| 0.5f64.powi(k)).collect();
        gaps[15] = 0.0;
        let fit = fit_rate(&indices(20), &gaps, Window::Range(5, 19), FitKind::LogLinear).unwrap();
        assert!(fit.shrunk);
        assert_eq!(fit.window, (5, 14));
        assert!((fit.exponent - 2f64.ln()).abs() < 1e-12);

        let zeros = vec![1.0, 0.0, 0.0, 0.0];
        let err = fit_rate(&indices(4), &zeros, Window::Range(0, 3), FitKind::LogLinear).unwrap_err();
        assert!(matches!(err, RateError::TooFewPoints { shrunk: true, .. }));
    }

    #[test]
    fn newton_ratio_check() {
        // x -> -x² on x - ln(1+x), from 0.3
        let mut x: f64 = 0.3;
        let mut gaps = vec![];
        for _ in 0..7 {
            gaps.push(x - x.ln_1p());
            x = -x * x;
        }
        let r = check_newton_quadratic(&gaps);
        assert!(r.pass && !r.inconclusive);
        assert!(r.usable_pairs >= 3);
        assert!(r.xi < 5.0);

        let r = check_newton_quadratic(&[1.0, 0.0, 0.0]);
        assert!(r.inconclusive && !r.pass);
    }
}
