//! Test-function zoo with known constants, plus sample-based verifiers for
//! the regularity conditions the convergence analysis relies on.
//!
//! Every objective is immutable after construction and `Send + Sync`, so a
//! single instance can be shared across concurrent runs.

mod composite;
mod conditions;
mod registry;
mod zoo;

use std::fmt;
use std::sync::Arc;

use crate::{Matrix, Vector};

pub use composite::{CompositeObjective, ConvexTerm, L1Norm, ZeroTerm};
pub use conditions::{check_pl, check_proximal_pl, check_qg, direction_grid, Condition, ConditionReport};
pub use registry::{parse_matrix_csv, resolve, OBJECTIVE_IDS};
pub use zoo::{
    make_lasso, make_pl_nonconvex, make_quadratic, make_self_concordant, PlNonconvex, Quadratic, SelfConcordant,
    LASSO_TARGET, SELF_CONCORDANT_BOX,
};

#[derive(Debug, thiserror::Error)]
pub enum ObjectiveError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric: H[{row},{col}] = {upper} but H[{col},{row}] = {lower}")]
    NotSymmetric {
        row: usize,
        col: usize,
        upper: f64,
        lower: f64,
    },
    #[error("matrix is not positive definite: smallest eigenvalue {min_eigenvalue}")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("point outside the domain of {objective}: coordinate {index} = {value}")]
    Domain {
        objective: &'static str,
        index: usize,
        value: f64,
    },
    #[error("invalid condition constants: {0}")]
    Constants(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("direction-grid infimum only supported for d <= 3 (got d = {0})")]
    DimensionTooLarge(usize),
    #[error("unknown objective id `{0}`")]
    UnknownId(String),
    #[error("bad objective parameter in `{id}`: {reason}")]
    BadParameter { id: String, reason: String },
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Declared regularity constants of an objective.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ConditionConstants {
    /// Gradient Lipschitz constant.
    pub l: f64,
    /// Strong convexity / PL / QG modulus.
    pub mu: f64,
    /// Coordinate-wise Lipschitz constant, `|∇_j f(x) - ∇_j f(x + t e_j)| <= L_max |t|`.
    pub l_max: f64,
    /// Self-concordance constant, when declared.
    pub nu: Option<f64>,
}

impl ConditionConstants {
    pub fn new(l: f64, mu: f64, l_max: f64, nu: Option<f64>) -> Self {
        Self { l, mu, l_max, nu }
    }

    pub fn kappa(&self) -> f64 {
        self.l / self.mu
    }

    pub fn kappa_max(&self) -> f64 {
        self.l_max / self.mu
    }

    /// Checks positivity and `L_max <= L <= d L_max`.
    pub fn validate(&self, dim: usize) -> Result<(), ObjectiveError> {
        let named = [("L", self.l), ("mu", self.mu), ("L_max", self.l_max)];
        for (name, v) in named {
            if !(v.is_finite() && v > 0.0) {
                return Err(ObjectiveError::Constants(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        if let Some(nu) = self.nu {
            if !(nu.is_finite() && nu > 0.0) {
                return Err(ObjectiveError::Constants(format!(
                    "nu must be finite and > 0, got {nu}"
                )));
            }
        }
        let slack = 1e-12 * self.l;
        if self.l_max > self.l + slack || self.l > dim as f64 * self.l_max + slack {
            return Err(ObjectiveError::Constants(format!(
                "expected L_max <= L <= d L_max, got L_max = {}, L = {}, d = {dim}",
                self.l_max, self.l
            )));
        }
        Ok(())
    }
}

/// A smooth objective with value, gradient and coordinate-gradient oracles.
pub trait Objective: Send + Sync + fmt::Debug {
    /// Short identifier, e.g. `"quadratic"`.
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    /// Objective value. Returns NaN outside the domain; use
    /// [`Objective::check_domain`] for a diagnostic.
    fn value(&self, x: &Vector) -> f64;

    fn gradient(&self, x: &Vector) -> Vector;

    /// Component `j` of the gradient. Implementations must agree bitwise
    /// with `gradient(x)[j]`.
    fn coordinate_gradient(&self, x: &Vector, j: usize) -> f64 {
        self.gradient(x)[j]
    }

    /// Hessian, for objectives that provide one.
    fn hessian(&self, _x: &Vector) -> Option<Matrix> {
        None
    }

    fn minimizer(&self) -> &Vector;

    fn minimum(&self) -> f64;

    fn constants(&self) -> &ConditionConstants;

    fn is_convex(&self) -> bool {
        true
    }

    fn check_domain(&self, x: &Vector) -> Result<(), ObjectiveError> {
        if x.len() != self.dim() {
            return Err(ObjectiveError::Dimension {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }
}

/// Either a smooth objective or a smooth + nonsmooth composite.
#[derive(Clone, Debug)]
pub enum Problem {
    Smooth(Arc<dyn Objective>),
    Composite(Arc<CompositeObjective>),
}

impl Problem {
    pub fn smooth(f: impl Objective + 'static) -> Self {
        Problem::Smooth(Arc::new(f))
    }

    pub fn composite(cf: CompositeObjective) -> Self {
        Problem::Composite(Arc::new(cf))
    }

    pub fn name(&self) -> &str {
        match self {
            Problem::Smooth(f) => f.name(),
            Problem::Composite(_) => "composite",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Problem::Smooth(f) => f.dim(),
            Problem::Composite(cf) => cf.dim(),
        }
    }

    pub fn value(&self, x: &Vector) -> f64 {
        match self {
            Problem::Smooth(f) => f.value(x),
            Problem::Composite(cf) => cf.value(x),
        }
    }

    /// `f(x) - f*`.
    pub fn gap(&self, x: &Vector) -> f64 {
        self.value(x) - self.minimum()
    }

    pub fn minimizer(&self) -> &Vector {
        match self {
            Problem::Smooth(f) => f.minimizer(),
            Problem::Composite(cf) => cf.minimizer(),
        }
    }

    pub fn minimum(&self) -> f64 {
        match self {
            Problem::Smooth(f) => f.minimum(),
            Problem::Composite(cf) => cf.minimum(),
        }
    }

    /// Constants of the smooth part.
    pub fn constants(&self) -> &ConditionConstants {
        match self {
            Problem::Smooth(f) => f.constants(),
            Problem::Composite(cf) => cf.smooth().constants(),
        }
    }

    pub fn as_smooth(&self) -> Option<&Arc<dyn Objective>> {
        match self {
            Problem::Smooth(f) => Some(f),
            Problem::Composite(_) => None,
        }
    }

    pub fn as_composite(&self) -> Option<&Arc<CompositeObjective>> {
        match self {
            Problem::Composite(cf) => Some(cf),
            Problem::Smooth(_) => None,
        }
    }
}

/// Euclidean norm of a plain vector.
pub(crate) fn norm2(v: &Vector) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}
