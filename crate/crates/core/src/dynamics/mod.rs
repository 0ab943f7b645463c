//! Damped-oscillator view of the optimizers.
//!
//! A method with step size `η` and momentum `α`, observed at times `t = kh`,
//! approximates `m Ẍ + c Ẋ + ∇f(X) = 0` with
//! `m = (1+α)/2 · h²/η` and `c = (1-α) h/η`. Only two scalings keep both
//! finite: `h ≍ η` (massless, first-order flow) and `h ≍ √η` with
//! `1 - α ≍ √η` (massive, second-order flow).

mod integrate;
mod ode;
mod oscillator;
mod params;

pub use integrate::{discrete_continuous_deviation, integrate, ContinuousTrajectory, RK4};
pub use ode::{build_ode, build_ode_from_params, coordinate_limit_field, newton_flow_field, OdeSystem, Order};
pub use oscillator::{
    analytic_modes, analytic_quadratic_solution, classify_damping, damping_ratio, energy_decay_exponent,
    oscillator_energy, DampingClass,
};
pub use params::{
    invert_params, physical_params, physical_params_with, scaling_exponent, Damping, MassConvention, PhysicalParams,
    Regime,
};

use crate::optimizers::{AlgorithmKind, OptimError};

#[derive(Debug, thiserror::Error)]
pub enum DynamicsError {
    #[error("time scale h must be positive and finite, got {0}")]
    BadTimeScale(f64),
    #[error(
        "{kind}: h = {h} with effective step {eta} gives ln h / ln η = {exponent:.3}; \
         a finite physical system needs {expected}, otherwise mass or damping diverges as η → 0"
    )]
    InvalidScaling {
        kind: AlgorithmKind,
        h: f64,
        eta: f64,
        exponent: f64,
        expected: &'static str,
    },
    #[error("damping c(t) = 3m/t is singular at t0 = {0}; start time must be positive")]
    SingularStart(f64),
    #[error("massless system needs positive damping, got c = {0}")]
    NoDamping(f64),
    #[error("{0} is not supported for this problem")]
    Unsupported(String),
    #[error("objective has no Hessian")]
    MissingHessian,
    #[error("dt must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("t_end = {t_end} must exceed t0 = {t0}")]
    BadSpan { t0: f64, t_end: f64 },
    #[error("initial state has dimension {got}, system expects {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("discrete times [0, {discrete_end}] and continuous times [{t0}, {t_end}] do not overlap")]
    DisjointTimes { discrete_end: f64, t0: f64, t_end: f64 },
    #[error(transparent)]
    Optim(#[from] OptimError),
}
