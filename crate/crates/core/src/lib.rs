//! Optimization algorithms viewed as damped oscillators.
//!
//! The crate pairs each discrete method (gradient descent, Nesterov
//! momentum, randomized coordinate descent and its accelerated variant,
//! Newton, proximal gradient) with the continuous-time damped-oscillator
//! ODE it approximates, integrates those ODEs, and checks convergence
//! claims two ways: Lyapunov-energy certificates along continuous
//! trajectories, and closed-form rate bounds along discrete ones.
//!
//! Modules:
//!
//! - [`objectives`]: test functions with declared constants and
//!   sample-based condition checkers (PL, QG, proximal-PL).
//! - [`optimizers`]: update rules and a deterministic runner.
//! - [`dynamics`]: physical parameters, ODE fields, RK4 integration,
//!   damping regimes and closed-form oscillator solutions.
//! - [`lyapunov`]: energy certificates and monotonicity verification.
//! - [`rates`]: bound catalog, bound checks and rate fitting.
//! - [`experiment`]: declarative experiment runner, presets and manifests.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod dynamics;
pub mod experiment;
pub mod io;
pub mod lyapunov;
pub mod objectives;
pub mod optimizers;
pub mod rates;

pub type Vector = nalgebra::DVector<f64>;
pub type Matrix = nalgebra::DMatrix<f64>;

pub use objectives::{ConditionConstants, Objective, Problem};
