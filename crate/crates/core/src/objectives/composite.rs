use std::fmt;
use std::sync::Arc;

use super::zoo::Quadratic;
use super::{Objective, ObjectiveError};
use crate::{Matrix, Vector};

/// A convex, coordinate-separable nonsmooth term `h`.
pub trait ConvexTerm: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    fn value(&self, x: &Vector) -> f64;

    /// Subdifferential interval `[lo, hi]` of the `j`-th summand at `x_j`.
    fn subdifferential(&self, xj: f64, j: usize) -> (f64, f64);

    /// `prox_{step·h}(v)`, when it has a closed form.
    fn prox(&self, _v: &Vector, _step: f64) -> Option<Vector> {
        None
    }
}

/// `weight · ‖x‖₁`.
#[derive(Clone, Debug, PartialEq)]
pub struct L1Norm {
    pub weight: f64,
}

impl ConvexTerm for L1Norm {
    fn name(&self) -> &str {
        "l1"
    }

    fn value(&self, x: &Vector) -> f64 {
        self.weight * x.iter().map(|v| v.abs()).sum::<f64>()
    }

    fn subdifferential(&self, xj: f64, _j: usize) -> (f64, f64) {
        if xj > 0.0 {
            (self.weight, self.weight)
        } else if xj < 0.0 {
            (-self.weight, -self.weight)
        } else {
            (-self.weight, self.weight)
        }
    }

    fn prox(&self, v: &Vector, step: f64) -> Option<Vector> {
        let t = step * self.weight;
        Some(v.map(|a| soft_threshold(a, t)))
    }
}

/// `h = 0`.
#[derive(Clone, Debug, Default)]
pub struct ZeroTerm;

impl ConvexTerm for ZeroTerm {
    fn name(&self) -> &str {
        "zero"
    }

    fn value(&self, _x: &Vector) -> f64 {
        0.0
    }

    fn subdifferential(&self, _xj: f64, _j: usize) -> (f64, f64) {
        (0.0, 0.0)
    }

    fn prox(&self, v: &Vector, _step: f64) -> Option<Vector> {
        Some(v.clone())
    }
}

pub fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// `f = g + h` with `g` smooth and `h` convex and separable.
#[derive(Clone, Debug)]
pub struct CompositeObjective {
    smooth: Arc<dyn Objective>,
    nonsmooth: Arc<dyn ConvexTerm>,
    minimizer: Vector,
    minimum: f64,
}

impl CompositeObjective {
    /// `minimizer` must be a minimizer of `g + h`; the minimum is evaluated there.
    pub fn new(
        smooth: Arc<dyn Objective>,
        nonsmooth: Arc<dyn ConvexTerm>,
        minimizer: Vector,
    ) -> Result<Self, ObjectiveError> {
        if minimizer.len() != smooth.dim() {
            return Err(ObjectiveError::Dimension {
                expected: smooth.dim(),
                got: minimizer.len(),
            });
        }
        let minimum = smooth.value(&minimizer) + nonsmooth.value(&minimizer);
        Ok(Self {
            smooth,
            nonsmooth,
            minimizer,
            minimum,
        })
    }

    /// `½‖x - a‖² + λ‖x‖₁`, minimized at `soft_threshold(a, λ)`.
    pub fn separable_lasso(target: Vector, lambda: f64) -> Result<Self, ObjectiveError> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(ObjectiveError::BadParameter {
                id: "lasso".into(),
                reason: format!("lambda must be finite and >= 0, got {lambda}"),
            });
        }
        let d = target.len();
        let minimizer = target.map(|a| soft_threshold(a, lambda));
        let smooth = Quadratic::centered(Matrix::identity(d, d), target)?;
        Self::new(Arc::new(smooth), Arc::new(L1Norm { weight: lambda }), minimizer)
    }

    pub fn smooth(&self) -> &Arc<dyn Objective> {
        &self.smooth
    }

    pub fn nonsmooth(&self) -> &Arc<dyn ConvexTerm> {
        &self.nonsmooth
    }

    pub fn dim(&self) -> usize {
        self.smooth.dim()
    }

    pub fn value(&self, x: &Vector) -> f64 {
        self.smooth.value(x) + self.nonsmooth.value(x)
    }

    pub fn minimizer(&self) -> &Vector {
        &self.minimizer
    }

    pub fn minimum(&self) -> f64 {
        self.minimum
    }

    /// Box `∂f(x) = ∇g(x) + ∂h(x)`, one interval per coordinate.
    pub fn subdifferential(&self, x: &Vector) -> Vec<(f64, f64)> {
        let g = self.smooth.gradient(x);
        (0..x.len())
            .map(|j| {
                let (lo, hi) = self.nonsmooth.subdifferential(x[j], j);
                (g[j] + lo, g[j] + hi)
            })
            .collect()
    }

    /// `G(x, p) ∈ ∂f(x)` attaining `sup_{ξ ∈ ∂f(x)} ⟨ξ, p⟩`.
    ///
    /// The subdifferential is a box, so the sup picks the upper end where
    /// `p_j > 0` and the lower end where `p_j < 0`. Where `p_j = 0` every
    /// element attains it and the one closest to zero is returned.
    pub fn directional_subgradient(&self, x: &Vector, p: &Vector) -> Vector {
        let boxes = self.subdifferential(x);
        Vector::from_fn(x.len(), |j, _| {
            let (lo, hi) = boxes[j];
            if p[j] > 0.0 {
                hi
            } else if p[j] < 0.0 {
                lo
            } else {
                0.0f64.clamp(lo, hi)
            }
        })
    }

    /// Minimum-norm element of `∂f(x)`.
    ///
    /// With `p = -G_min` this is also `G(x, p)`, which makes it the force of
    /// the massless flow `c Ẋ + G(X, Ẋ) = 0`.
    pub fn min_norm_subgradient(&self, x: &Vector) -> Vector {
        let boxes = self.subdifferential(x);
        Vector::from_fn(x.len(), |j, _| {
            let (lo, hi) = boxes[j];
            0.0f64.clamp(lo, hi)
        })
    }

    /// `prox_{ηh}(x - η∇g(x))`, or `None` when `h` has no closed-form prox.
    pub fn prox_gradient_step(&self, x: &Vector, eta: f64) -> Option<Vector> {
        let v = x - self.smooth.gradient(x) * eta;
        self.nonsmooth.prox(&v, eta)
    }
}
