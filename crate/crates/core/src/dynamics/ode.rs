use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::params::{physical_params, Damping, PhysicalParams};
use super::DynamicsError;
use crate::objectives::{CompositeObjective, Objective, Problem};
use crate::optimizers::{newton_direction, AlgorithmConfig, AlgorithmKind};
use crate::Vector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    First,
    Second,
}

type FieldFn = dyn Fn(f64, &Vector, &Vector) -> Result<Vector, String> + Send + Sync;

/// An autonomous or time-dependent ODE in `ℝᵈ`.
///
/// First order: the field returns `Ẋ` and ignores the velocity argument.
/// Second order: it returns `Ẍ` given `(t, X, Ẋ)`.
#[derive(Clone)]
pub struct OdeSystem {
    pub order: Order,
    pub dim: usize,
    pub t0: f64,
    pub label: String,
    pub params: Option<PhysicalParams>,
    field: Arc<FieldFn>,
}

impl fmt::Debug for OdeSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OdeSystem")
            .field("order", &self.order)
            .field("dim", &self.dim)
            .field("t0", &self.t0)
            .field("label", &self.label)
            .field("params", &self.params)
            .finish()
    }
}

impl OdeSystem {
    pub fn first_order<F>(label: impl Into<String>, dim: usize, t0: f64, field: F) -> Self
    where
        F: Fn(f64, &Vector) -> Result<Vector, String> + Send + Sync + 'static,
    {
        Self {
            order: Order::First,
            dim,
            t0,
            label: label.into(),
            params: None,
            field: Arc::new(move |t, x, _v| field(t, x)),
        }
    }

    pub fn second_order<F>(label: impl Into<String>, dim: usize, t0: f64, field: F) -> Self
    where
        F: Fn(f64, &Vector, &Vector) -> Result<Vector, String> + Send + Sync + 'static,
    {
        Self {
            order: Order::Second,
            dim,
            t0,
            label: label.into(),
            params: None,
            field: Arc::new(field),
        }
    }

    pub fn with_params(mut self, params: PhysicalParams) -> Self {
        self.params = Some(params);
        self
    }

    /// Moves the start time. Fails for `c(t) = 3m/t` systems when `t0 <= 0`.
    pub fn with_t0(mut self, t0: f64) -> Result<Self, DynamicsError> {
        if matches!(
            self.params.as_ref().map(|p| p.damping),
            Some(Damping::InverseTime { .. })
        ) && !(t0 > 0.0)
        {
            return Err(DynamicsError::SingularStart(t0));
        }
        self.t0 = t0;
        Ok(self)
    }

    /// `Ẋ` (first order) or `Ẍ` (second order).
    pub fn eval(&self, t: f64, x: &Vector, v: &Vector) -> Result<Vector, String> {
        (self.field)(t, x, v)
    }
}

/// Builds the flow a configuration approximates at time scale `h`.
///
/// Start time is `0`, except for the `3m/t` damping schedule, which starts
/// at `t0 = 3h`.
pub fn build_ode(config: &AlgorithmConfig, problem: &Problem, h: f64) -> Result<OdeSystem, DynamicsError> {
    let params = physical_params(config, problem, h)?;
    let t0 = match params.damping {
        Damping::InverseTime { .. } => 3.0 * h,
        _ => 0.0,
    };
    build_ode_from_params(params, problem, t0)
}

/// Builds the ODE for given physical parameters.
pub fn build_ode_from_params(params: PhysicalParams, problem: &Problem, t0: f64) -> Result<OdeSystem, DynamicsError> {
    let dim = problem.dim();
    let label = format!("{}:{}", params.kind, problem.name());
    let sys = match (problem, params.damping, params.mass) {
        (_, Damping::HessianTensor { h }, _) => {
            let f = problem
                .as_smooth()
                .ok_or_else(|| DynamicsError::Unsupported(format!("{} flow on a composite objective", params.kind)))?;
            newton_flow_field(f.clone(), h)?
        }
        (Problem::Smooth(f), Damping::Constant { c }, m) if m == 0.0 => massless_field(f.clone(), c, &label)?,
        (Problem::Composite(cf), Damping::Constant { c }, m) if m == 0.0 => subgradient_field(cf.clone(), c, &label)?,
        (Problem::Smooth(f), damping, m) => oscillator_field(f.clone(), m, damping, &label),
        (Problem::Composite(_), _, _) => {
            return Err(DynamicsError::Unsupported(format!(
                "massive {} flow on a composite objective",
                params.kind
            )))
        }
    };
    debug_assert_eq!(sys.dim, dim);
    sys.with_params(params).with_t0(t0)
}

fn massless_field(f: Arc<dyn Objective>, c: f64, label: &str) -> Result<OdeSystem, DynamicsError> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(DynamicsError::NoDamping(c));
    }
    let dim = f.dim();
    Ok(OdeSystem::first_order(label, dim, 0.0, move |_t, x| {
        Ok(f.gradient(x) * (-1.0 / c))
    }))
}

/// `c Ẋ = -G_min(X)`, the minimum-norm subgradient flow of a composite objective.
fn subgradient_field(cf: Arc<CompositeObjective>, c: f64, label: &str) -> Result<OdeSystem, DynamicsError> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(DynamicsError::NoDamping(c));
    }
    let dim = cf.dim();
    Ok(OdeSystem::first_order(label, dim, 0.0, move |_t, x| {
        Ok(cf.min_norm_subgradient(x) * (-1.0 / c))
    }))
}

fn oscillator_field(f: Arc<dyn Objective>, m: f64, damping: Damping, label: &str) -> OdeSystem {
    let dim = f.dim();
    OdeSystem::second_order(label, dim, 0.0, move |t, x, v| {
        let c = damping.at(t).expect("scalar damping");
        Ok((v * c + f.gradient(x)) * (-1.0 / m))
    })
}

/// Limit flow of a coordinate method; same as [`build_ode`] for the coordinate kinds.
///
/// RCGD gives `Ẋ = -(h/η)/d · ∇f`, i.e. `Ẋ = -(1/d)∇f` at `h = η`; the
/// accelerated variants give the oscillator with `η' = η/d`.
pub fn coordinate_limit_field(config: &AlgorithmConfig, problem: &Problem, h: f64) -> Result<OdeSystem, DynamicsError> {
    if !config.kind.is_coordinate() {
        return Err(DynamicsError::Unsupported(format!(
            "{} is not a coordinate method",
            config.kind
        )));
    }
    build_ode(config, problem, h)
}

/// `Ẋ = -(1/h) (∇²f(X))⁻¹ ∇f(X)`, from `h ∇²f(X) Ẋ + ∇f(X) = 0`.
pub fn newton_flow_field(f: Arc<dyn Objective>, h: f64) -> Result<OdeSystem, DynamicsError> {
    if !(h.is_finite() && h > 0.0) {
        return Err(DynamicsError::BadTimeScale(h));
    }
    let probe = f.minimizer().clone();
    if f.hessian(&probe).is_none() {
        return Err(DynamicsError::MissingHessian);
    }
    let dim = f.dim();
    let label = format!("{}:{}", AlgorithmKind::Newton, f.name());
    Ok(OdeSystem::first_order(label, dim, 0.0, move |_t, x| {
        newton_direction(f.as_ref(), x)
            .map(|s| s * (-1.0 / h))
            .map_err(|e| e.to_string())
    }))
}
