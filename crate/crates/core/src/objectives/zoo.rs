use nalgebra::SymmetricEigen;

use super::composite::CompositeObjective;
use super::{ConditionConstants, Objective, ObjectiveError};
use crate::{Matrix, Vector};

/// `½ (x - x*)ᵀ H (x - x*)` with `H` symmetric positive definite.
#[derive(Clone, Debug)]
pub struct Quadratic {
    hessian: Matrix,
    center: Vector,
    eigenvalues: Vector,
    constants: ConditionConstants,
}

/// Builds `½ xᵀ H x` after checking symmetry and positive definiteness.
pub fn make_quadratic(h: Matrix) -> Result<Quadratic, ObjectiveError> {
    let d = h.nrows();
    Quadratic::centered(h, Vector::zeros(d))
}

impl Quadratic {
    pub fn centered(h: Matrix, center: Vector) -> Result<Self, ObjectiveError> {
        let (rows, cols) = h.shape();
        if rows != cols || rows == 0 {
            return Err(ObjectiveError::NotSquare { rows, cols });
        }
        if center.len() != rows {
            return Err(ObjectiveError::Dimension {
                expected: rows,
                got: center.len(),
            });
        }
        if h.iter().chain(center.iter()).any(|v| !v.is_finite()) {
            return Err(ObjectiveError::NonFinite);
        }
        let scale = h.amax();
        for i in 0..rows {
            for j in (i + 1)..rows {
                if (h[(i, j)] - h[(j, i)]).abs() > 1e-12 * scale {
                    return Err(ObjectiveError::NotSymmetric {
                        row: i,
                        col: j,
                        upper: h[(i, j)],
                        lower: h[(j, i)],
                    });
                }
            }
        }
        let eigenvalues = SymmetricEigen::new(h.clone()).eigenvalues;
        let min = eigenvalues.min();
        let max = eigenvalues.max();
        if min <= 0.0 {
            return Err(ObjectiveError::NotPositiveDefinite { min_eigenvalue: min });
        }
        let l_max = (0..rows).map(|j| h[(j, j)]).fold(f64::MIN, f64::max);
        let constants = ConditionConstants::new(max, min, l_max, None);
        constants.validate(rows)?;
        Ok(Self {
            hessian: h,
            center,
            eigenvalues,
            constants,
        })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.hessian
    }

    /// Eigenvalues of `H` (unordered).
    pub fn eigenvalues(&self) -> &Vector {
        &self.eigenvalues
    }

    fn row_dot(&self, x: &Vector, j: usize) -> f64 {
        let mut acc = 0.0;
        for i in 0..x.len() {
            acc += self.hessian[(j, i)] * (x[i] - self.center[i]);
        }
        acc
    }
}

impl Objective for Quadratic {
    fn name(&self) -> &str {
        "quadratic"
    }

    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &Vector) -> f64 {
        let mut acc = 0.0;
        for j in 0..x.len() {
            acc += (x[j] - self.center[j]) * self.row_dot(x, j);
        }
        0.5 * acc
    }

    fn gradient(&self, x: &Vector) -> Vector {
        Vector::from_fn(x.len(), |j, _| self.row_dot(x, j))
    }

    fn coordinate_gradient(&self, x: &Vector, j: usize) -> f64 {
        self.row_dot(x, j)
    }

    fn hessian(&self, _x: &Vector) -> Option<Matrix> {
        Some(self.hessian.clone())
    }

    fn minimizer(&self) -> &Vector {
        &self.center
    }

    fn minimum(&self) -> f64 {
        0.0
    }

    fn constants(&self) -> &ConditionConstants {
        &self.constants
    }
}

/// `f(x) = x² + 3 sin²(x)` on the real line: PL but not convex.
#[derive(Clone, Debug)]
pub struct PlNonconvex {
    minimizer: Vector,
    constants: ConditionConstants,
}

pub fn make_pl_nonconvex() -> PlNonconvex {
    // f'' = 2 + 6 cos 2x ranges over [-4, 8]; the PL modulus is declared
    // conservatively and verified on a dense grid by `check_pl`.
    PlNonconvex {
        minimizer: Vector::zeros(1),
        constants: ConditionConstants::new(8.0, 0.125, 8.0, None),
    }
}

impl Objective for PlNonconvex {
    fn name(&self) -> &str {
        "pl_nonconvex"
    }

    fn dim(&self) -> usize {
        1
    }

    fn value(&self, x: &Vector) -> f64 {
        let s = x[0].sin();
        x[0] * x[0] + 3.0 * s * s
    }

    fn gradient(&self, x: &Vector) -> Vector {
        Vector::from_element(1, 2.0 * x[0] + 3.0 * (2.0 * x[0]).sin())
    }

    fn hessian(&self, x: &Vector) -> Option<Matrix> {
        Some(Matrix::from_element(1, 1, 2.0 + 6.0 * (2.0 * x[0]).cos()))
    }

    fn minimizer(&self) -> &Vector {
        &self.minimizer
    }

    fn minimum(&self) -> f64 {
        0.0
    }

    fn constants(&self) -> &ConditionConstants {
        &self.constants
    }

    fn is_convex(&self) -> bool {
        false
    }
}

/// Box on which the self-concordant objective's `L` and `mu` are declared.
pub const SELF_CONCORDANT_BOX: (f64, f64) = (-0.5, 1.0);

/// `f(x) = Σ (x_i - log(1 + x_i))`, defined for `x_i > -1`.
///
/// Each coordinate has `g'' = 1/(1+x)²` and `|g'''| = 2 g''^{3/2}`, so the
/// self-concordance constant is exactly 2. `L = 4` and `mu = 1/4` hold on
/// [`SELF_CONCORDANT_BOX`].
#[derive(Clone, Debug)]
pub struct SelfConcordant {
    minimizer: Vector,
    constants: ConditionConstants,
}

pub fn make_self_concordant(dim: usize) -> Result<SelfConcordant, ObjectiveError> {
    if dim == 0 {
        return Err(ObjectiveError::Dimension { expected: 1, got: 0 });
    }
    let (lo, hi) = SELF_CONCORDANT_BOX;
    let l = 1.0 / ((1.0 + lo) * (1.0 + lo));
    let mu = 1.0 / ((1.0 + hi) * (1.0 + hi));
    let constants = ConditionConstants::new(l, mu, l, Some(2.0));
    constants.validate(dim)?;
    Ok(SelfConcordant {
        minimizer: Vector::zeros(dim),
        constants,
    })
}

impl SelfConcordant {
    /// Value with a domain diagnostic instead of NaN.
    pub fn try_value(&self, x: &Vector) -> Result<f64, ObjectiveError> {
        self.check_domain(x)?;
        Ok(self.value(x))
    }

    /// Whether `x` lies in the box where the declared constants hold.
    pub fn in_box(&self, x: &Vector) -> bool {
        let (lo, hi) = SELF_CONCORDANT_BOX;
        x.iter().all(|&v| (lo..=hi).contains(&v))
    }
}

impl Objective for SelfConcordant {
    fn name(&self) -> &str {
        "self_concordant"
    }

    fn dim(&self) -> usize {
        self.minimizer.len()
    }

    fn value(&self, x: &Vector) -> f64 {
        x.iter().map(|&v| if v > -1.0 { v - v.ln_1p() } else { f64::NAN }).sum()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        x.map(|v| v / (1.0 + v))
    }

    fn coordinate_gradient(&self, x: &Vector, j: usize) -> f64 {
        x[j] / (1.0 + x[j])
    }

    fn hessian(&self, x: &Vector) -> Option<Matrix> {
        Some(Matrix::from_diagonal(&x.map(|v| 1.0 / ((1.0 + v) * (1.0 + v)))))
    }

    fn minimizer(&self) -> &Vector {
        &self.minimizer
    }

    fn minimum(&self) -> f64 {
        0.0
    }

    fn constants(&self) -> &ConditionConstants {
        &self.constants
    }

    fn check_domain(&self, x: &Vector) -> Result<(), ObjectiveError> {
        if x.len() != self.dim() {
            return Err(ObjectiveError::Dimension {
                expected: self.dim(),
                got: x.len(),
            });
        }
        match x.iter().position(|&v| !(v > -1.0)) {
            Some(index) => Err(ObjectiveError::Domain {
                objective: "self_concordant",
                index,
                value: x[index],
            }),
            None => Ok(()),
        }
    }
}

/// Target `a` of the shipped lasso instance `½‖x - a‖² + λ‖x‖₁`.
pub const LASSO_TARGET: [f64; 2] = [1.0, -0.5];

/// `½‖x - a‖² + λ‖x‖₁` with `a =` [`LASSO_TARGET`]; the minimizer is the
/// soft-thresholded target.
pub fn make_lasso(lambda: f64) -> Result<CompositeObjective, ObjectiveError> {
    let target = Vector::from_column_slice(&LASSO_TARGET);
    CompositeObjective::separable_lasso(target, lambda)
}
