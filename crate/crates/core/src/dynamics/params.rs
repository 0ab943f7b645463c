use serde::{Deserialize, Serialize};

use super::DynamicsError;
use crate::objectives::Problem;
use crate::optimizers::{AlgorithmConfig, AlgorithmKind, Momentum};

/// Damping coefficient of the oscillator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Damping {
    Constant {
        c: f64,
    },
    /// `c(t) = numerator / t`, the `3m/t` schedule of the convex case.
    InverseTime {
        numerator: f64,
    },
    /// Viscosity tensor `C = h ∇²f(X)` (Newton).
    HessianTensor {
        h: f64,
    },
}

impl Damping {
    /// Scalar damping at time `t`; `None` for the tensor case.
    pub fn at(&self, t: f64) -> Option<f64> {
        match *self {
            Damping::Constant { c } => Some(c),
            Damping::InverseTime { numerator } => Some(numerator / t),
            Damping::HessianTensor { .. } => None,
        }
    }

    pub fn constant(&self) -> Option<f64> {
        match *self {
            Damping::Constant { c } => Some(c),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Massless,
    Massive,
}

/// Mass convention for constant-momentum methods.
///
/// `Effective` uses `m = h²/η` and `c = 2√(mμ)` (the strongly convex
/// analysis); `Generic` evaluates `m = (1+α)/2 · h²/η`, `c = (1-α) h/η`
/// at the configured `α`. They agree as `α → 1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassConvention {
    #[default]
    Effective,
    Generic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub kind: AlgorithmKind,
    pub mass: f64,
    pub damping: Damping,
    pub h: f64,
    /// Step size seen by the flow: `η`, or `η/d` for coordinate methods.
    pub eta: f64,
    pub alpha: Option<f64>,
    pub regime: Regime,
    pub convention: MassConvention,
}

impl PhysicalParams {
    pub fn is_massless(&self) -> bool {
        self.regime == Regime::Massless
    }

    pub fn damping_at(&self, t: f64) -> Option<f64> {
        self.damping.at(t)
    }
}

/// `ln h / ln η`, the exponent `p` in `h = η^p`.
pub fn scaling_exponent(h: f64, eta: f64) -> f64 {
    h.ln() / eta.ln()
}

/// Steps at or above this size are not checked against the scaling rule;
/// `ln h / ln η` carries no asymptotic information there.
const SCALING_CHECK_MAX_ETA: f64 = 0.5;

fn check_scaling(kind: AlgorithmKind, h: f64, eta: f64, massless: bool) -> Result<(), DynamicsError> {
    if eta >= SCALING_CHECK_MAX_ETA {
        return Ok(());
    }
    let p = scaling_exponent(h, eta);
    let (ok, expected) = if massless {
        ((0.75..=1.25).contains(&p), "h = Θ(η), i.e. exponent in [0.75, 1.25]")
    } else {
        (p > 0.25 && p < 0.75, "h = Θ(√η), i.e. exponent in (0.25, 0.75)")
    };
    if ok {
        Ok(())
    } else {
        Err(DynamicsError::InvalidScaling {
            kind,
            h,
            eta,
            exponent: p,
            expected,
        })
    }
}

/// Physical parameters with the default [`MassConvention::Effective`].
pub fn physical_params(config: &AlgorithmConfig, problem: &Problem, h: f64) -> Result<PhysicalParams, DynamicsError> {
    physical_params_with(config, problem, h, MassConvention::Effective)
}

/// Maps `(kind, η, α, h)` to `(m, c)`.
///
/// Massless kinds (VGD, RCGD, proximal gradient) get `m = 0`, `c = h/η'`.
/// The strongly convex momentum kinds get a constant `c`, the convex ones
/// `c(t) = 3m/t`. Newton gets the viscosity tensor `h ∇²f`.
pub fn physical_params_with(
    config: &AlgorithmConfig,
    problem: &Problem,
    h: f64,
    convention: MassConvention,
) -> Result<PhysicalParams, DynamicsError> {
    if !(h.is_finite() && h > 0.0) {
        return Err(DynamicsError::BadTimeScale(h));
    }
    let eta = config.eta;
    if !(eta.is_finite() && eta > 0.0) {
        return Err(crate::optimizers::OptimError::BadStep(eta).into());
    }
    let kind = config.kind;
    let consts = problem.constants();
    let d = problem.dim() as f64;
    let eta_eff = if kind.is_coordinate() { eta / d } else { eta };
    let momentum = config.resolve_momentum(consts)?;
    let alpha = momentum.constant();

    let massless = |c: f64| PhysicalParams {
        kind,
        mass: 0.0,
        damping: Damping::Constant { c },
        h,
        eta: eta_eff,
        alpha: Some(0.0),
        regime: Regime::Massless,
        convention,
    };

    let params = match kind {
        AlgorithmKind::Vgd | AlgorithmKind::Rcgd | AlgorithmKind::ProxGrad => {
            check_scaling(kind, h, eta_eff, true)?;
            massless(h / eta_eff)
        }
        AlgorithmKind::Newton => PhysicalParams {
            damping: Damping::HessianTensor { h },
            ..massless(0.0)
        },
        AlgorithmKind::NagSc | AlgorithmKind::ArcgSc => {
            check_scaling(kind, h, eta_eff, false)?;
            let a = alpha.unwrap_or(0.0);
            let (mass, c) = match convention {
                MassConvention::Effective => {
                    let m = h * h / eta_eff;
                    let mu_eff = if kind.is_coordinate() { consts.mu / d } else { consts.mu };
                    (m, 2.0 * (m * mu_eff).sqrt())
                }
                MassConvention::Generic => ((1.0 + a) / 2.0 * h * h / eta_eff, (1.0 - a) * h / eta_eff),
            };
            PhysicalParams {
                kind,
                mass,
                damping: Damping::Constant { c },
                h,
                eta: eta_eff,
                alpha: Some(a),
                regime: Regime::Massive,
                convention,
            }
        }
        AlgorithmKind::NagGc | AlgorithmKind::ArcgGc => {
            check_scaling(kind, h, eta_eff, false)?;
            let m = match (momentum, convention) {
                (Momentum::Constant(a), MassConvention::Generic) => (1.0 + a) / 2.0 * h * h / eta_eff,
                _ => h * h / eta_eff,
            };
            PhysicalParams {
                kind,
                mass: m,
                damping: Damping::InverseTime { numerator: 3.0 * m },
                h,
                eta: eta_eff,
                alpha,
                regime: Regime::Massive,
                convention,
            }
        }
    };
    Ok(params)
}

/// Inverts `m = (1+α)/2 · h²/η`, `c = (1-α) h/η` for `(α, η)`.
pub fn invert_params(m: f64, c: f64, h: f64) -> (f64, f64) {
    let denom = 2.0 * m + c * h;
    ((2.0 * m - c * h) / denom, 2.0 * h * h / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::make_quadratic;
    use crate::{Matrix, Vector};

    fn test_quadratic() -> Problem {
        Problem::smooth(make_quadratic(Matrix::from_row_slice(2, 2, &[300.0, 1.0, 1.0, 50.0])).unwrap())
    }

    fn diag(l: f64, mu: f64) -> Problem {
        Problem::smooth(make_quadratic(Matrix::from_diagonal(&Vector::from_vec(vec![l, mu]))).unwrap())
    }

    #[test]
    fn vgd_is_massless_with_unit_damping() {
        let cfg = AlgorithmConfig::new(AlgorithmKind::Vgd, 0.01, 10);
        let p = physical_params(&cfg, &test_quadratic(), 0.01).unwrap();
        assert!(p.is_massless());
        assert_eq!(p.mass, 0.0);
        assert_eq!(p.damping.constant(), Some(1.0));
    }

    #[test]
    fn nag_sc_mass_and_damping() {
        let cfg = AlgorithmConfig::new(AlgorithmKind::NagSc, 1e-4, 10);
        let p = physical_params(&cfg, &diag(300.0, 50.0), 0.01).unwrap();
        assert!((p.mass - 1.0).abs() < 1e-12);
        let c = p.damping.constant().unwrap();
        assert!((c - 2.0 * 50f64.sqrt()).abs() < 1e-10);
        assert!((c - 14.142).abs() < 1e-3);
    }

    #[test]
    fn momentum_free_massive_scaling_rejected() {
        let cfg = AlgorithmConfig::new(AlgorithmKind::Vgd, 1e-4, 10);
        let err = physical_params(&cfg, &test_quadratic(), 1e-2).unwrap_err();
        assert!(matches!(err, DynamicsError::InvalidScaling { .. }));
        let cfg = AlgorithmConfig::new(AlgorithmKind::NagSc, 1e-4, 10);
        assert!(physical_params(&cfg, &test_quadratic(), 1e-4).is_err());
    }

    #[test]
    fn gc_schedule_and_coordinate_variants() {
        let p = test_quadratic();
        let cfg = AlgorithmConfig::new(AlgorithmKind::NagGc, 1e-4, 10);
        let pp = physical_params(&cfg, &p, 0.01).unwrap();
        assert!((pp.damping.at(3.0 * pp.mass).unwrap() - 1.0).abs() < 1e-12);

        let cfg = AlgorithmConfig::new(AlgorithmKind::ArcgGc, 2e-4, 10);
        let pp = physical_params(&cfg, &p, 0.01).unwrap();
        assert!((pp.eta - 1e-4).abs() < 1e-18);
        assert!((pp.mass - 1.0).abs() < 1e-12);
        assert!((pp.damping.at(3.0).unwrap() - 1.0).abs() < 1e-12);

        let cfg = AlgorithmConfig::new(AlgorithmKind::Rcgd, 2e-4, 10);
        let pp = physical_params(&cfg, &p, 2e-4).unwrap();
        assert!((pp.damping.constant().unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn arcg_sc_damping_uses_mu_over_d() {
        let cfg = AlgorithmConfig::new(AlgorithmKind::ArcgSc, 2e-4, 10);
        let p = test_quadratic();
        let pp = physical_params(&cfg, &p, 0.01).unwrap();
        assert!((pp.mass - 1.0).abs() < 1e-12);
        let mu = p.constants().mu;
        assert!((pp.damping.constant().unwrap() - 2.0 * (mu / 2.0).sqrt()).abs() < 1e-10);
        assert!((2.0 * 24.998f64.sqrt() - 9.9996).abs() < 1e-4);
    }

    #[test]
    fn generic_convention_inverts_exactly() {
        let p = test_quadratic();
        for &(eta, h) in &[(1e-4, 1e-2), (2.5e-3, 0.05), (1e-6, 1e-3)] {
            let cfg = AlgorithmConfig::new(AlgorithmKind::NagSc, eta, 10);
            let pp = physical_params_with(&cfg, &p, h, MassConvention::Generic).unwrap();
            let (a, e) = invert_params(pp.mass, pp.damping.constant().unwrap(), h);
            assert!((a - pp.alpha.unwrap()).abs() < 1e-12);
            assert!((e - eta).abs() / eta < 1e-12);
        }
    }

    #[test]
    fn newton_uses_viscosity_tensor() {
        let cfg = AlgorithmConfig::new(AlgorithmKind::Newton, 1.0, 10);
        let pp = physical_params(&cfg, &test_quadratic(), 0.1).unwrap();
        assert_eq!(pp.damping, Damping::HessianTensor { h: 0.1 });
        assert!(pp.damping.at(1.0).is_none());
    }

    #[test]
    fn rejects_bad_h() {
        let cfg = AlgorithmConfig::new(AlgorithmKind::Vgd, 0.01, 10);
        assert!(matches!(
            physical_params(&cfg, &test_quadratic(), 0.0),
            Err(DynamicsError::BadTimeScale(_))
        ));
    }
}
