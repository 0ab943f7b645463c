//! Energy certificates `E(t) = γ(t)(V(t) + Γ(t))`, with `V = f(X) - f*`.
//!
//! If `E` is non-increasing along a trajectory then
//! `f(X(t)) - f* <= E(t0)/γ(t)`, so `1/γ` is the convergence rate.

use serde::{Deserialize, Serialize};

use crate::dynamics::{ContinuousTrajectory, Damping, PhysicalParams, Regime};
use crate::objectives::Problem;
use crate::Vector;

/// Relative tolerance on `c² = 4mμ` for the momentum certificate.
pub const CRITICAL_TOLERANCE: f64 = 1e-9;
/// Absolute floor of the monotonicity tolerance.
pub const TOLERANCE_FLOOR: f64 = 1e-10;

#[derive(Debug, thiserror::Error)]
pub enum LyapunovError {
    #[error("{setting:?} needs {what}")]
    Missing { setting: Setting, what: &'static str },
    #[error("NAG_QG needs critical damping c² = 4mμ; got c² = {c2}, 4mμ = {four_m_mu}")]
    NotCritical { c2: f64, four_m_mu: f64 },
    #[error("certificate is valid from t0 = {t0}, asked at t = {t}")]
    BeforeStart { t: f64, t0: f64 },
    #[error("{setting:?} certificate does not match a trajectory of `{label}`: {reason}")]
    Mismatch {
        setting: Setting,
        label: String,
        reason: String,
    },
    #[error("trajectory has no samples at or after t0 = {0}")]
    NoSamples(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Setting {
    VgdConvex,
    VgdPl,
    NagQg,
    NewtonSc,
    CompositeProxpl,
}

impl Setting {
    pub const ALL: [Setting; 5] = [
        Setting::VgdConvex,
        Setting::VgdPl,
        Setting::NagQg,
        Setting::NewtonSc,
        Setting::CompositeProxpl,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Setting::VgdConvex => "VGD_CONVEX",
            Setting::VgdPl => "VGD_PL",
            Setting::NagQg => "NAG_QG",
            Setting::NewtonSc => "NEWTON_SC",
            Setting::CompositeProxpl => "COMPOSITE_PROXPL",
        }
    }
}

/// `(γ, Γ)` pair for one setting. All fields are plain numbers so the
/// certificate can be serialized next to the trajectory it checks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LyapunovCertificate {
    pub setting: Setting,
    pub t0: f64,
    pub mu: f64,
    pub c: f64,
    pub m: f64,
    pub h: f64,
    /// NAG only.
    pub lambda: f64,
    /// NAG only.
    pub sigma: f64,
    #[serde(serialize_with = "crate::io::serialize_vector")]
    pub x_star: Vector,
    pub f_star: f64,
}

/// Builds the certificate for `setting` from the problem's constants and the
/// flow's physical parameters.
///
/// | setting | γ(t) | Γ | t0 |
/// |---|---|---|---|
/// | VGD_CONVEX | `t` | `c‖X-x*‖²/(2t)` | `h` |
/// | VGD_PL | `exp(2μt/c)` | 0 | 0 |
/// | NAG_QG | `exp(λct)` | `m/2 ‖Ẋ + σc(X-x*)‖²` | 0 |
/// | NEWTON_SC | `exp(t/(2h))` | 0 | 0 |
/// | COMPOSITE_PROXPL | `exp(2μt/c)` | 0 | 0 |
///
/// NAG_QG uses `σ = 4/(5m)`, `λ = 1/(5m)` and requires `c² = 4mμ`.
pub fn certificate(
    setting: Setting,
    problem: &Problem,
    params: &PhysicalParams,
) -> Result<LyapunovCertificate, LyapunovError> {
    let mu = problem.constants().mu;
    let scalar_c = params.damping.constant();
    let need_c = || {
        scalar_c.filter(|c| *c > 0.0).ok_or(LyapunovError::Missing {
            setting,
            what: "a positive constant damping c",
        })
    };
    let need_mu = || {
        if mu.is_finite() && mu > 0.0 {
            Ok(mu)
        } else {
            Err(LyapunovError::Missing {
                setting,
                what: "a positive condition constant mu",
            })
        }
    };
    let mut cert = LyapunovCertificate {
        setting,
        t0: 0.0,
        mu,
        c: scalar_c.unwrap_or(0.0),
        m: params.mass,
        h: params.h,
        lambda: 0.0,
        sigma: 0.0,
        x_star: problem.minimizer().clone(),
        f_star: problem.minimum(),
    };
    match setting {
        Setting::VgdConvex => {
            cert.c = need_c()?;
            cert.t0 = params.h;
        }
        Setting::VgdPl | Setting::CompositeProxpl => {
            cert.c = need_c()?;
            cert.mu = need_mu()?;
        }
        Setting::NagQg => {
            let c = need_c()?;
            let mu = need_mu()?;
            let m = params.mass;
            if !(m > 0.0) {
                return Err(LyapunovError::Missing {
                    setting,
                    what: "a positive mass",
                });
            }
            let four_m_mu = 4.0 * m * mu;
            if (c * c - four_m_mu).abs() > CRITICAL_TOLERANCE * four_m_mu {
                return Err(LyapunovError::NotCritical { c2: c * c, four_m_mu });
            }
            cert.c = c;
            cert.sigma = 4.0 / (5.0 * m);
            cert.lambda = 1.0 / (5.0 * m);
        }
        Setting::NewtonSc => {
            if !(params.h > 0.0) {
                return Err(LyapunovError::Missing {
                    setting,
                    what: "a positive time scale h",
                });
            }
        }
    }
    Ok(cert)
}

impl LyapunovCertificate {
    /// Same certificate with a different `μ` (for falsification runs).
    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn gamma(&self, t: f64) -> f64 {
        match self.setting {
            Setting::VgdConvex => t,
            Setting::VgdPl | Setting::CompositeProxpl => (2.0 * self.mu * t / self.c).exp(),
            Setting::NagQg => (self.lambda * self.c * t).exp(),
            Setting::NewtonSc => (t / (2.0 * self.h)).exp(),
        }
    }

    #[allow(non_snake_case)]
    pub fn Gamma(&self, t: f64, x: &Vector, v: &Vector) -> f64 {
        match self.setting {
            Setting::VgdConvex => self.c * (x - &self.x_star).norm_squared() / (2.0 * t),
            Setting::NagQg => {
                let w = v + (x - &self.x_star) * (self.sigma * self.c);
                0.5 * self.m * w.norm_squared()
            }
            _ => 0.0,
        }
    }

    /// Exponential rate of `γ` where it is exponential.
    pub fn rate(&self) -> Option<f64> {
        match self.setting {
            Setting::VgdConvex => None,
            Setting::VgdPl | Setting::CompositeProxpl => Some(2.0 * self.mu / self.c),
            Setting::NagQg => Some(self.lambda * self.c),
            Setting::NewtonSc => Some(1.0 / (2.0 * self.h)),
        }
    }

    /// Checks the trajectory's recorded parameters against this certificate.
    pub fn check_pairing(&self, ct: &ContinuousTrajectory) -> Result<(), LyapunovError> {
        match ct.params.as_ref() {
            Some(p) => self.check_params(p, &ct.label),
            None => Ok(()),
        }
    }

    /// Checks that a flow with parameters `p` is the one this certificate is for.
    pub fn check_params(&self, p: &PhysicalParams, label: &str) -> Result<(), LyapunovError> {
        let mismatch = |reason: String| LyapunovError::Mismatch {
            setting: self.setting,
            label: label.to_string(),
            reason,
        };
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300);
        match (self.setting, p.regime, p.damping) {
            (Setting::NewtonSc, _, Damping::HessianTensor { h }) if close(h, self.h) => Ok(()),
            (Setting::NewtonSc, _, _) => Err(mismatch("needs the Newton viscosity-tensor flow".into())),
            (_, _, Damping::HessianTensor { .. }) => Err(mismatch("Newton flow".into())),
            (Setting::NagQg, Regime::Massive, Damping::Constant { c }) if close(c, self.c) && close(p.mass, self.m) => {
                Ok(())
            }
            (Setting::NagQg, _, _) => Err(mismatch(format!(
                "needs a massive flow with m = {}, c = {}",
                self.m, self.c
            ))),
            (_, Regime::Massless, Damping::Constant { c }) if close(c, self.c) => Ok(()),
            _ => Err(mismatch(format!("needs a massless flow with c = {}", self.c))),
        }
    }
}

/// `γ(t)(f(X) - f* + Γ(t, X, Ẋ))`.
pub fn certificate_value(
    cert: &LyapunovCertificate,
    problem: &Problem,
    t: f64,
    x: &Vector,
    v: &Vector,
) -> Result<f64, LyapunovError> {
    if t < cert.t0 {
        return Err(LyapunovError::BeforeStart { t, t0: cert.t0 });
    }
    Ok(cert.gamma(t) * (problem.value(x) - cert.f_star + cert.Gamma(t, x, v)))
}

/// `f(X) + ½ m ‖Ẋ‖²`.
pub fn mechanical_energy(problem: &Problem, m: f64, x: &Vector, v: &Vector) -> f64 {
    problem.value(x) + 0.5 * m * v.norm_squared()
}

/// `10 · error + 1e-10`.
pub fn monotonicity_tolerance(error_estimate: f64) -> f64 {
    10.0 * error_estimate + TOLERANCE_FLOOR
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport {
    pub setting: Setting,
    pub times: Vec<f64>,
    pub potential: Vec<f64>,
    #[serde(rename = "Gamma")]
    pub gamma_term: Vec<f64>,
    pub values: Vec<f64>,
    pub bound: Vec<f64>,
    pub max_increment: f64,
    pub tolerance: f64,
    /// `γ` positive and nondecreasing on the grid.
    pub gamma_ok: bool,
    pub pass: bool,
    pub e0: f64,
}

impl MonotonicityReport {
    /// Largest amount by which `f - f*` exceeds the implied bound.
    pub fn bound_violation(&self) -> f64 {
        self.potential
            .iter()
            .zip(&self.bound)
            .map(|(v, b)| v - b)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Evaluates `E` on the trajectory grid (from `cert.t0` on) and checks that
/// no step increases it by more than `tolerance`.
pub fn verify_monotone(
    cert: &LyapunovCertificate,
    problem: &Problem,
    ct: &ContinuousTrajectory,
    tolerance: f64,
) -> Result<MonotonicityReport, LyapunovError> {
    cert.check_pairing(ct)?;
    let slack = 1e-12 * cert.t0.abs().max(1.0);
    let start = ct.times.partition_point(|&t| t < cert.t0 - slack);
    if start >= ct.len() {
        return Err(LyapunovError::NoSamples(cert.t0));
    }
    let n = ct.len() - start;
    let mut times = Vec::with_capacity(n);
    let mut potential = Vec::with_capacity(n);
    let mut gamma_term = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for i in start..ct.len() {
        // clamp so a sample a rounding error before t0 is still admissible
        let t = ct.times[i].max(cert.t0);
        let (x, v) = (&ct.states[i], &ct.velocities[i]);
        let pot = problem.value(x) - cert.f_star;
        let g = cert.Gamma(t, x, v);
        times.push(ct.times[i]);
        potential.push(pot);
        gamma_term.push(g);
        values.push(cert.gamma(t) * (pot + g));
    }
    let e0 = values[0];
    let g0 = times[0].max(cert.t0);
    let bound = times.iter().map(|&t| implied_bound_from(cert, e0, g0, t)).collect();
    let max_increment = values
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    let gammas: Vec<f64> = times.iter().map(|&t| cert.gamma(t.max(cert.t0))).collect();
    let gamma_ok = gammas.iter().all(|g| *g > 0.0) && gammas.windows(2).all(|w| w[1] >= w[0]);
    let pass = gamma_ok && values.iter().all(|e| e.is_finite()) && max_increment <= tolerance;
    Ok(MonotonicityReport {
        setting: cert.setting,
        times,
        potential,
        gamma_term,
        values,
        bound,
        max_increment,
        tolerance,
        gamma_ok,
        pass,
        e0,
    })
}

fn implied_bound_from(cert: &LyapunovCertificate, e0: f64, _t_start: f64, t: f64) -> f64 {
    e0 / cert.gamma(t.max(cert.t0))
}

/// `E(t0)/γ(t)`: the bound on `f(X(t)) - f*` implied by a passing report.
pub fn implied_bound(cert: &LyapunovCertificate, report: &MonotonicityReport, t: f64) -> f64 {
    implied_bound_from(cert, report.e0, report.times[0], t)
}

/// `max_k |E_coarse(t_k) - E_fine(t_k)|` over the coarse grid, where the
/// fine trajectory uses half the step. Both must start at the same time.
pub fn energy_error_estimate(
    cert: &LyapunovCertificate,
    problem: &Problem,
    coarse: &ContinuousTrajectory,
    fine: &ContinuousTrajectory,
) -> f64 {
    let mut worst: f64 = 0.0;
    let mut j = 0;
    for (i, &t) in coarse.times.iter().enumerate() {
        if t < cert.t0 - 1e-12 * cert.t0.abs().max(1.0) {
            continue;
        }
        let tol = 1e-9 * coarse.dt;
        while j < fine.len() && fine.times[j] < t - tol {
            j += 1;
        }
        if j >= fine.len() {
            break;
        }
        if (fine.times[j] - t).abs() > tol {
            continue;
        }
        let tt = t.max(cert.t0);
        let e = |s: &Vector, v: &Vector| cert.gamma(tt) * (problem.value(s) - cert.f_star + cert.Gamma(tt, s, v));
        let diff = (e(&coarse.states[i], &coarse.velocities[i]) - e(&fine.states[j], &fine.velocities[j])).abs();
        if diff.is_finite() {
            worst = worst.max(diff);
        } else {
            return f64::INFINITY;
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{build_ode, integrate, physical_params};
    use crate::objectives::make_quadratic;
    use crate::optimizers::{AlgorithmConfig, AlgorithmKind};
    use crate::Matrix;

    fn scalar_quadratic(k: f64) -> Problem {
        Problem::smooth(make_quadratic(Matrix::from_element(1, 1, k)).unwrap())
    }

    fn one(x: f64) -> Vector {
        Vector::from_element(1, x)
    }

    fn nag_params(mass: f64, c: f64) -> PhysicalParams {
        PhysicalParams {
            kind: AlgorithmKind::NagSc,
            mass,
            damping: Damping::Constant { c },
            h: 0.01,
            eta: 1e-4,
            alpha: None,
            regime: Regime::Massive,
            convention: Default::default(),
        }
    }

    fn vgd_params(c: f64, h: f64) -> PhysicalParams {
        PhysicalParams {
            kind: AlgorithmKind::Vgd,
            mass: 0.0,
            damping: Damping::Constant { c },
            h,
            eta: h / c,
            alpha: Some(0.0),
            regime: Regime::Massless,
            convention: Default::default(),
        }
    }

    #[test]
    fn nag_parameters() {
        let cert = certificate(Setting::NagQg, &scalar_quadratic(1.0), &nag_params(1.0, 2.0)).unwrap();
        assert!((cert.sigma - 0.8).abs() < 1e-15);
        assert!((cert.lambda - 0.2).abs() < 1e-15);
        assert_eq!(cert.m * (cert.lambda + cert.sigma), 1.0);
        let c2 = cert.c * cert.c;
        assert!(cert.lambda * (1.0 + cert.m * cert.sigma.powi(2) * c2 / cert.mu) <= cert.sigma);
    }

    #[test]
    fn nag_rejects_non_critical_damping() {
        let err = certificate(Setting::NagQg, &scalar_quadratic(1.0), &nag_params(1.0, 2.1)).unwrap_err();
        assert!(matches!(err, LyapunovError::NotCritical { .. }));
    }

    #[test]
    fn pl_gamma() {
        let p = Problem::smooth(make_quadratic(Matrix::from_diagonal(&Vector::from_vec(vec![60.0, 50.0]))).unwrap());
        let cert = certificate(Setting::VgdPl, &p, &vgd_params(100.0, 0.01)).unwrap();
        assert!((cert.gamma(1.0) - 1f64.exp()).abs() < 1e-14);
    }

    #[test]
    fn plug_in_values() {
        let p = scalar_quadratic(1.0);
        let cert = certificate(Setting::VgdConvex, &p, &vgd_params(1.0, 0.1)).unwrap();
        assert_eq!(cert.Gamma(3.0, &one(0.0), &one(0.0)), 0.0);
        let e = certificate_value(&cert, &p, 1.0, &one(1.0), &one(0.0)).unwrap();
        assert!((e - 1.0).abs() < 1e-15);
        assert!(matches!(
            certificate_value(&cert, &p, 0.05, &one(1.0), &one(0.0)),
            Err(LyapunovError::BeforeStart { .. })
        ));

        let cert = certificate(Setting::NagQg, &p, &nag_params(1.0, 2.0)).unwrap();
        let e = certificate_value(&cert, &p, 0.0, &one(1.0), &one(0.0)).unwrap();
        assert!((e - 1.78).abs() < 1e-12);

        let cert = certificate(Setting::VgdPl, &p, &vgd_params(1.0, 0.1)).unwrap();
        assert_eq!(certificate_value(&cert, &p, 2.0, &one(0.0), &one(0.0)).unwrap(), 0.0);
    }

    #[test]
    fn vgd_convex_bound_on_half_square() {
        let p = scalar_quadratic(1.0);
        let cfg = AlgorithmConfig::new(AlgorithmKind::Vgd, 0.01, 1);
        let sys = build_ode(&cfg, &p, 0.01).unwrap();
        let ct = integrate(&sys, &one(1.0), &one(0.0), 10.0, 1e-3).unwrap();
        let cert = certificate(Setting::VgdConvex, &p, sys.params.as_ref().unwrap()).unwrap();
        let report = verify_monotone(&cert, &p, &ct, 1e-10).unwrap();
        assert!(report.pass);
        let b = implied_bound(&cert, &report, 10.0);
        // E(h) ≈ h(f + ‖x‖²/(2h)) ≈ 0.5, so the bound is close to c‖x0‖²/(2t) = 0.05
        assert!((b - 0.05).abs() < 1e-3);
        assert!(report.bound_violation() <= 0.0);
        assert!((implied_bound(&cert, &report, cert.t0) - (report.potential[0] + report.gamma_term[0])).abs() < 1e-15);
    }

    #[test]
    fn pairing_is_checked() {
        let p = scalar_quadratic(1.0);
        let cfg = AlgorithmConfig::new(AlgorithmKind::NagSc, 1e-4, 1);
        let sys = build_ode(&cfg, &p, 0.01).unwrap();
        let ct = integrate(&sys, &one(1.0), &one(0.0), 0.1, 1e-3).unwrap();
        let cert = certificate(Setting::VgdPl, &p, &vgd_params(1.0, 0.01)).unwrap();
        assert!(matches!(
            verify_monotone(&cert, &p, &ct, 1e-10),
            Err(LyapunovError::Mismatch { .. })
        ));
        let params = physical_params(&cfg, &p, 0.01).unwrap();
        let cert = certificate(Setting::NagQg, &p, &params).unwrap();
        assert!(verify_monotone(&cert, &p, &ct, 1e-10).unwrap().pass);
    }

    #[test]
    fn mechanical_energy_dissipates_under_damping() {
        let p = scalar_quadratic(4.0);
        let cfg = AlgorithmConfig::new(AlgorithmKind::NagGc, 1e-4, 1);
        let sys = build_ode(&cfg, &p, 0.01).unwrap();
        let m = sys.params.as_ref().unwrap().mass;
        let ct = integrate(&sys, &one(1.0), &one(0.0), 5.0, 1e-3).unwrap();
        let e: Vec<f64> = (0..ct.len())
            .map(|i| mechanical_energy(&p, m, &ct.states[i], &ct.velocities[i]))
            .collect();
        assert!(e.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }
}
