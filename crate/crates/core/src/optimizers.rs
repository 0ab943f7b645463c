//! Discrete update rules and a deterministic trajectory runner.
//!
//! Every method is written in the generic two-sequence form
//!
//! ```text
//! x(k) = y(k-1) - η ∇f(y(k-1)),   y(k) = x(k) + α (x(k) - x(k-1)),   y(0) = x(0)
//! ```
//!
//! with `α = 0` for the momentum-free methods. Coordinate methods replace
//! the full gradient step by a step along one uniformly drawn coordinate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::objectives::{CompositeObjective, ConditionConstants, Objective, Problem};
use crate::Vector;

/// Largest Hessian condition number accepted by a Newton step.
pub const NEWTON_MAX_CONDITION: f64 = 1e12;

#[derive(Debug, thiserror::Error)]
pub enum OptimError {
    #[error("{kind:?} needs a positive, finite mu; objective declares {mu}")]
    MissingMu { kind: AlgorithmKind, mu: f64 },
    #[error("momentum must lie in [0, 1), got {0}")]
    BadMomentum(f64),
    #[error("step size must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("objective has no Hessian")]
    MissingHessian,
    #[error("Hessian at x = {x:?} is numerically singular (condition number {condition:e})")]
    SingularHessian { x: Vec<f64>, condition: f64 },
    #[error("nonsmooth term `{0}` has no closed-form prox")]
    NoProx(String),
    #[error("{kind:?} cannot run on a {problem} problem")]
    Unsupported { kind: AlgorithmKind, problem: &'static str },
    #[error("x0 has dimension {got}, objective has {expected}")]
    Dimension { expected: usize, got: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AlgorithmKind {
    Vgd,
    NagSc,
    NagGc,
    Rcgd,
    ArcgSc,
    ArcgGc,
    Newton,
    ProxGrad,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 8] = [
        AlgorithmKind::Vgd,
        AlgorithmKind::NagSc,
        AlgorithmKind::NagGc,
        AlgorithmKind::Rcgd,
        AlgorithmKind::ArcgSc,
        AlgorithmKind::ArcgGc,
        AlgorithmKind::Newton,
        AlgorithmKind::ProxGrad,
    ];

    pub fn id(self) -> &'static str {
        match self {
            AlgorithmKind::Vgd => "VGD",
            AlgorithmKind::NagSc => "NAG_SC",
            AlgorithmKind::NagGc => "NAG_GC",
            AlgorithmKind::Rcgd => "RCGD",
            AlgorithmKind::ArcgSc => "ARCG_SC",
            AlgorithmKind::ArcgGc => "ARCG_GC",
            AlgorithmKind::Newton => "NEWTON",
            AlgorithmKind::ProxGrad => "PROX_GRAD",
        }
    }

    pub fn is_coordinate(self) -> bool {
        matches!(
            self,
            AlgorithmKind::Rcgd | AlgorithmKind::ArcgSc | AlgorithmKind::ArcgGc
        )
    }

    pub fn has_momentum(self) -> bool {
        matches!(
            self,
            AlgorithmKind::NagSc | AlgorithmKind::NagGc | AlgorithmKind::ArcgSc | AlgorithmKind::ArcgGc
        )
    }
}

impl std::fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// Momentum coefficient: a constant, or the `(k-1)/(k+2)` schedule with `k`
/// starting at 1 (so the first step is a pure gradient step).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Momentum {
    Constant(f64),
    Schedule,
}

impl Momentum {
    /// `α_k` for iteration `k >= 1`.
    pub fn at(self, k: usize) -> f64 {
        match self {
            Momentum::Constant(a) => a,
            Momentum::Schedule => (k as f64 - 1.0) / (k as f64 + 2.0),
        }
    }

    pub fn constant(self) -> Option<f64> {
        match self {
            Momentum::Constant(a) => Some(a),
            Momentum::Schedule => None,
        }
    }
}

/// `(√(1/(μη)) - 1)/(√(1/(μη)) + 1)`.
pub fn nag_strongly_convex_momentum(mu: f64, eta: f64) -> f64 {
    let s = (1.0 / (mu * eta)).sqrt();
    (s - 1.0) / (s + 1.0)
}

/// `(√κ_max - 1)/(√κ_max + 1)`.
pub fn arcg_strongly_convex_momentum(kappa_max: f64) -> f64 {
    let s = kappa_max.sqrt();
    (s - 1.0) / (s + 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmConfig {
    pub kind: AlgorithmKind,
    pub eta: f64,
    /// Overrides the kind's default momentum when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub momentum: Option<Momentum>,
    #[serde(default)]
    pub seed: u64,
    pub max_iterations: usize,
}

impl AlgorithmConfig {
    pub fn new(kind: AlgorithmKind, eta: f64, max_iterations: usize) -> Self {
        Self {
            kind,
            eta,
            momentum: None,
            seed: 0,
            max_iterations,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_momentum(mut self, momentum: Momentum) -> Self {
        self.momentum = Some(momentum);
        self
    }

    /// Momentum actually used: the override, or the kind's default.
    pub fn resolve_momentum(&self, consts: &ConditionConstants) -> Result<Momentum, OptimError> {
        let m = match (self.momentum, self.kind) {
            (Some(m), _) => m,
            (None, AlgorithmKind::NagSc) => {
                require_mu(self.kind, consts)?;
                Momentum::Constant(nag_strongly_convex_momentum(consts.mu, self.eta))
            }
            (None, AlgorithmKind::ArcgSc) => {
                require_mu(self.kind, consts)?;
                Momentum::Constant(arcg_strongly_convex_momentum(consts.kappa_max()))
            }
            (None, AlgorithmKind::NagGc | AlgorithmKind::ArcgGc) => Momentum::Schedule,
            (None, _) => Momentum::Constant(0.0),
        };
        if let Momentum::Constant(a) = m {
            if !(0.0..1.0).contains(&a) {
                return Err(OptimError::BadMomentum(a));
            }
        }
        Ok(m)
    }

    /// Step-size warnings (`η <= 1/L`, or `η <= 1/L_max` for coordinate kinds).
    pub fn step_warnings(&self, consts: &ConditionConstants) -> Vec<String> {
        let (bound, name) = match self.kind {
            AlgorithmKind::Newton => return Vec::new(),
            k if k.is_coordinate() => (1.0 / consts.l_max, "1/L_max"),
            _ => (1.0 / consts.l, "1/L"),
        };
        if self.eta > bound * (1.0 + 1e-12) {
            vec![format!(
                "step size {} exceeds {name} = {bound} for {}",
                self.eta, self.kind
            )]
        } else {
            Vec::new()
        }
    }
}

fn require_mu(kind: AlgorithmKind, consts: &ConditionConstants) -> Result<(), OptimError> {
    if consts.mu.is_finite() && consts.mu > 0.0 {
        Ok(())
    } else {
        Err(OptimError::MissingMu { kind, mu: consts.mu })
    }
}

/// `x - η ∇f(x)`.
pub fn update_vgd(f: &dyn Objective, x: &Vector, eta: f64) -> Vector {
    x - f.gradient(x) * eta
}

/// One step of the generic form: `x = y_prev - η∇f(y_prev)`,
/// `y = x + α(x - x_prev)`. Returns `(x, y)`.
pub fn update_nag(f: &dyn Objective, x_prev: &Vector, y_prev: &Vector, alpha: f64, eta: f64) -> (Vector, Vector) {
    let x = update_vgd(f, y_prev, eta);
    let y = extrapolate(&x, x_prev, alpha);
    (x, y)
}

fn extrapolate(x: &Vector, x_prev: &Vector, alpha: f64) -> Vector {
    if alpha == 0.0 {
        x.clone()
    } else {
        x + (x - x_prev) * alpha
    }
}

/// Coordinate step along `j`: `x_j - η ∇_j f(x)`, other coordinates kept.
pub fn update_rcgd_at(f: &dyn Objective, x: &Vector, eta: f64, j: usize) -> Vector {
    let mut next = x.clone();
    next[j] = x[j] - eta * f.coordinate_gradient(x, j);
    next
}

/// RCGD step with `j` drawn uniformly from `0..d`. Returns `(x', j)`.
pub fn update_rcgd<R: Rng + ?Sized>(f: &dyn Objective, x: &Vector, eta: f64, rng: &mut R) -> (Vector, usize) {
    let j = rng.gen_range(0..x.len());
    (update_rcgd_at(f, x, eta, j), j)
}

/// ARCG step along a given coordinate `j`. Returns `(x, y)`.
pub fn update_arcg_at(
    f: &dyn Objective,
    x_prev: &Vector,
    y_prev: &Vector,
    alpha: f64,
    eta: f64,
    j: usize,
) -> (Vector, Vector) {
    let x = update_rcgd_at(f, y_prev, eta, j);
    let y = extrapolate(&x, x_prev, alpha);
    (x, y)
}

/// ARCG step with a uniformly drawn coordinate. Returns `(x, y, j)`.
pub fn update_arcg<R: Rng + ?Sized>(
    f: &dyn Objective,
    x_prev: &Vector,
    y_prev: &Vector,
    alpha: f64,
    eta: f64,
    rng: &mut R,
) -> (Vector, Vector, usize) {
    let j = rng.gen_range(0..x_prev.len());
    let (x, y) = update_arcg_at(f, x_prev, y_prev, alpha, eta, j);
    (x, y, j)
}

/// Solves `∇²f(x) s = ∇f(x)`, rejecting numerically singular Hessians.
pub(crate) fn newton_direction(f: &dyn Objective, x: &Vector) -> Result<Vector, OptimError> {
    let h = f.hessian(x).ok_or(OptimError::MissingHessian)?;
    let sv = h.clone().singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= NEWTON_MAX_CONDITION) {
        return Err(OptimError::SingularHessian {
            x: x.iter().copied().collect(),
            condition,
        });
    }
    h.lu().solve(&f.gradient(x)).ok_or_else(|| OptimError::SingularHessian {
        x: x.iter().copied().collect(),
        condition,
    })
}

/// `x - η (∇²f(x))⁻¹ ∇f(x)`, solved as a linear system.
pub fn update_newton(f: &dyn Objective, x: &Vector, eta: f64) -> Result<Vector, OptimError> {
    Ok(x - newton_direction(f, x)? * eta)
}

/// `prox_{ηh}(x - η∇g(x))`.
pub fn update_prox_grad(cf: &CompositeObjective, x: &Vector, eta: f64) -> Result<Vector, OptimError> {
    cf.prox_gradient_step(x, eta)
        .ok_or_else(|| OptimError::NoProx(cf.nonsmooth().name().to_string()))
}

/// Iterates, objective values and run metadata.
#[derive(Clone, Debug)]
pub struct DiscreteTrajectory {
    pub iterates: Vec<Vector>,
    /// `y(k)` for momentum methods.
    pub auxiliary: Option<Vec<Vector>>,
    pub values: Vec<f64>,
    /// Coordinate drawn at each step (coordinate methods).
    pub coordinates: Option<Vec<usize>>,
    pub config: AlgorithmConfig,
    pub momentum: Momentum,
    pub seed: u64,
    /// Run stopped early on a non-finite value or gradient.
    pub diverged: bool,
    /// Run stopped early on an update error (e.g. singular Hessian).
    pub failure: Option<String>,
    pub warnings: Vec<String>,
}

impl DiscreteTrajectory {
    pub fn len(&self) -> usize {
        self.iterates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterates.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.iterates.first().map_or(0, |x| x.len())
    }

    /// `f(x(k)) - f*` for every recorded iterate.
    pub fn gaps(&self, f_star: f64) -> Vec<f64> {
        self.values.iter().map(|v| v - f_star).collect()
    }

    /// Completed all configured iterations.
    pub fn completed(&self) -> bool {
        !self.diverged && self.failure.is_none()
    }
}

fn finite(v: &Vector) -> bool {
    v.iter().all(|a| a.is_finite())
}

/// Applies `config.kind`'s update `config.max_iterations` times from `x0`.
///
/// Deterministic given `config.seed`. A non-finite value or gradient ends
/// the run early with `diverged = true`; the partial trajectory is kept.
pub fn run(config: &AlgorithmConfig, problem: &Problem, x0: &Vector) -> Result<DiscreteTrajectory, OptimError> {
    if x0.len() != problem.dim() {
        return Err(OptimError::Dimension {
            expected: problem.dim(),
            got: x0.len(),
        });
    }
    if !(config.eta.is_finite() && config.eta >= 0.0) {
        return Err(OptimError::BadStep(config.eta));
    }
    let consts = problem.constants();
    let momentum = config.resolve_momentum(consts)?;
    let smooth = match (problem, config.kind) {
        (Problem::Composite(_), AlgorithmKind::ProxGrad) => None,
        (Problem::Composite(_), kind) => {
            return Err(OptimError::Unsupported {
                kind,
                problem: "composite",
            })
        }
        (Problem::Smooth(f), _) => Some(f.as_ref()),
    };
    if config.kind == AlgorithmKind::Newton && smooth.and_then(|f| f.hessian(x0)).is_none() {
        return Err(OptimError::MissingHessian);
    }

    let k_max = config.max_iterations;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut iterates = Vec::with_capacity(k_max + 1);
    let mut values = Vec::with_capacity(k_max + 1);
    let mut auxiliary = config.kind.has_momentum().then(|| Vec::with_capacity(k_max + 1));
    let mut coordinates = config.kind.is_coordinate().then(|| Vec::with_capacity(k_max));
    let mut diverged = false;
    let mut failure = None;

    let v0 = problem.value(x0);
    iterates.push(x0.clone());
    values.push(v0);
    if let Some(aux) = auxiliary.as_mut() {
        aux.push(x0.clone());
    }
    if !v0.is_finite() {
        diverged = true;
    }

    let mut x = x0.clone();
    let mut y = x0.clone();
    for k in 1..=k_max {
        if diverged {
            break;
        }
        let alpha = momentum.at(k);
        let step: Result<(Vector, Vector), OptimError> = match (config.kind, smooth, problem) {
            (AlgorithmKind::Vgd, Some(f), _) => {
                let next = update_vgd(f, &x, config.eta);
                Ok((next.clone(), next))
            }
            (AlgorithmKind::NagSc | AlgorithmKind::NagGc, Some(f), _) => Ok(update_nag(f, &x, &y, alpha, config.eta)),
            (AlgorithmKind::Rcgd, Some(f), _) => {
                let (next, j) = update_rcgd(f, &x, config.eta, &mut rng);
                coordinates.as_mut().unwrap().push(j);
                Ok((next.clone(), next))
            }
            (AlgorithmKind::ArcgSc | AlgorithmKind::ArcgGc, Some(f), _) => {
                let (nx, ny, j) = update_arcg(f, &x, &y, alpha, config.eta, &mut rng);
                coordinates.as_mut().unwrap().push(j);
                Ok((nx, ny))
            }
            (AlgorithmKind::Newton, Some(f), _) => update_newton(f, &x, config.eta).map(|n| (n.clone(), n)),
            (AlgorithmKind::ProxGrad, Some(f), _) => {
                // smooth problem: h = 0, so the prox step is a gradient step
                let next = update_vgd(f, &x, config.eta);
                Ok((next.clone(), next))
            }
            (AlgorithmKind::ProxGrad, None, Problem::Composite(cf)) => {
                update_prox_grad(cf, &x, config.eta).map(|n| (n.clone(), n))
            }
            _ => unreachable!("problem/kind pairing validated above"),
        };
        let (nx, ny) = match step {
            Ok(s) => s,
            Err(e) => {
                failure = Some(e.to_string());
                break;
            }
        };
        let value = problem.value(&nx);
        if !(value.is_finite() && finite(&nx) && finite(&ny)) {
            diverged = true;
            break;
        }
        iterates.push(nx.clone());
        values.push(value);
        if let Some(aux) = auxiliary.as_mut() {
            aux.push(ny.clone());
        }
        x = nx;
        y = ny;
    }

    Ok(DiscreteTrajectory {
        iterates,
        auxiliary,
        values,
        coordinates,
        config: config.clone(),
        momentum,
        seed: config.seed,
        diverged,
        failure,
        warnings: config.step_warnings(consts),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{make_lasso, make_quadratic, make_self_concordant};
    use crate::Matrix;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    fn half_square() -> Problem {
        Problem::smooth(make_quadratic(Matrix::identity(1, 1)).unwrap())
    }

    fn test_quadratic() -> Problem {
        Problem::smooth(make_quadratic(Matrix::from_row_slice(2, 2, &[300.0, 1.0, 1.0, 50.0])).unwrap())
    }

    #[test]
    fn vgd_hand_values() {
        let p = half_square();
        let f = p.as_smooth().unwrap().as_ref();
        assert!((update_vgd(f, &v(&[1.0]), 0.1)[0] - 0.9).abs() < 1e-15);
        assert_eq!(update_vgd(f, &v(&[0.0]), 0.1)[0], 0.0);

        let p = test_quadratic();
        let f = p.as_smooth().unwrap().as_ref();
        let next = update_vgd(f, &v(&[1.0, 0.0]), 1e-4);
        assert!((next[0] - 0.97).abs() < 1e-15);
        assert!((next[1] + 1e-4).abs() < 1e-18);
    }

    #[test]
    fn nag_momentum_formulas() {
        assert_eq!(nag_strongly_convex_momentum(2.0, 0.5), 0.0);
        let l = 300.004;
        let alpha = nag_strongly_convex_momentum(l / 6.0008, 1.0 / l);
        let s = 6.0008f64.sqrt();
        assert!((alpha - (s - 1.0) / (s + 1.0)).abs() < 1e-12);
        assert!((alpha - 0.4202).abs() < 1e-4);
        assert!((arcg_strongly_convex_momentum(4.0) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn nag_with_zero_momentum_is_vgd() {
        let p = test_quadratic();
        let f = p.as_smooth().unwrap().as_ref();
        let x = v(&[1.0, 1.0]);
        let prev = v(&[2.0, -1.0]);
        let (nx, ny) = update_nag(f, &prev, &x, 0.0, 1e-3);
        assert_eq!(nx, update_vgd(f, &x, 1e-3));
        assert_eq!(nx, ny);
    }

    #[test]
    fn rcgd_forced_coordinate() {
        let p = test_quadratic();
        let f = p.as_smooth().unwrap().as_ref();
        let next = update_rcgd_at(f, &v(&[1.0, 0.0]), 2e-4, 0);
        assert!((next[0] - 0.94).abs() < 1e-15);
        assert_eq!(next[1], 0.0);
    }

    #[test]
    fn rcgd_single_dimension_is_vgd() {
        let p = half_square();
        let f = p.as_smooth().unwrap().as_ref();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (next, j) = update_rcgd(f, &v(&[1.0]), 0.1, &mut rng);
        assert_eq!(j, 0);
        assert_eq!(next, update_vgd(f, &v(&[1.0]), 0.1));
    }

    #[test]
    fn arcg_degenerate_reductions() {
        let p = test_quadratic();
        let f = p.as_smooth().unwrap().as_ref();
        let x = v(&[0.4, -0.2]);
        for j in 0..2 {
            let (nx, ny) = update_arcg_at(f, &x, &x, 0.0, 1e-3, j);
            assert_eq!(nx, update_rcgd_at(f, &x, 1e-3, j));
            assert_eq!(nx, ny);
        }
    }

    #[test]
    fn newton_steps() {
        let p = test_quadratic();
        let f = p.as_smooth().unwrap().as_ref();
        let x = v(&[3.0, -7.0]);
        assert!(update_newton(f, &x, 1.0).unwrap().norm() <= 1e-10);
        assert_eq!(update_newton(f, &x, 0.0).unwrap(), x);

        let sc = make_self_concordant(1).unwrap();
        let x = v(&[0.5]);
        // g'(0.5) = 1/3, g''(0.5) = 4/9
        let expected = 0.5 - (1.0 / 3.0) / (4.0 / 9.0);
        assert!((update_newton(&sc, &x, 1.0).unwrap()[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn newton_rejects_singular_hessian() {
        let q = make_quadratic(Matrix::from_diagonal(&v(&[1.0, 1e-13]))).unwrap();
        let err = update_newton(&q, &v(&[1.0, 1.0]), 1.0).unwrap_err();
        assert!(matches!(err, OptimError::SingularHessian { .. }));
        assert!(err.to_string().contains("[1.0, 1.0]"));
    }

    #[test]
    fn prox_grad_cases() {
        let cf = CompositeObjective::separable_lasso(Vector::zeros(1), 0.4).unwrap();
        assert!((update_prox_grad(&cf, &v(&[1.0]), 0.5).unwrap()[0] - 0.3).abs() < 1e-15);
        // threshold region
        assert_eq!(update_prox_grad(&cf, &v(&[0.2]), 0.5).unwrap()[0], 0.0);

        let cf0 = CompositeObjective::separable_lasso(Vector::zeros(1), 0.0).unwrap();
        let g = cf0.smooth().as_ref();
        assert_eq!(
            update_prox_grad(&cf0, &v(&[0.7]), 0.3).unwrap(),
            update_vgd(g, &v(&[0.7]), 0.3)
        );
    }

    #[test]
    fn run_edge_cases() {
        let p = half_square();
        let t = run(&AlgorithmConfig::new(AlgorithmKind::Vgd, 0.1, 0), &p, &v(&[1.0])).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.iterates[0], v(&[1.0]));

        let t = run(&AlgorithmConfig::new(AlgorithmKind::Vgd, 0.1, 2), &p, &v(&[1.0])).unwrap();
        let xs: Vec<f64> = t.iterates.iter().map(|x| x[0]).collect();
        assert!((xs[1] - 0.9).abs() < 1e-15 && (xs[2] - 0.81).abs() < 1e-15);
        assert_eq!(t.values.len(), 3);
    }

    #[test]
    fn run_records_divergence() {
        let p = half_square();
        let t = run(&AlgorithmConfig::new(AlgorithmKind::Vgd, 3.0, 5000), &p, &v(&[1.0])).unwrap();
        assert!(t.diverged);
        assert!(t.len() < 5001);
        assert!(!t.warnings.is_empty());
        assert!(t.values.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn run_rejects_bad_pairings() {
        let lasso = Problem::composite(make_lasso(0.1).unwrap());
        let err = run(
            &AlgorithmConfig::new(AlgorithmKind::Newton, 1.0, 3),
            &lasso,
            &v(&[0.0, 0.0]),
        )
        .unwrap_err();
        assert!(matches!(err, OptimError::Unsupported { .. }));
        let err = run(
            &AlgorithmConfig::new(AlgorithmKind::Vgd, 0.1, 3),
            &half_square(),
            &v(&[0.0, 0.0]),
        )
        .unwrap_err();
        assert!(matches!(err, OptimError::Dimension { .. }));
        let err = run(
            &AlgorithmConfig::new(AlgorithmKind::NagSc, 0.1, 3).with_momentum(Momentum::Constant(1.0)),
            &half_square(),
            &v(&[1.0]),
        )
        .unwrap_err();
        assert!(matches!(err, OptimError::BadMomentum(_)));
    }

    #[test]
    fn momentum_schedule_starts_with_gradient_step() {
        assert_eq!(Momentum::Schedule.at(1), 0.0);
        assert!((Momentum::Schedule.at(4) - 0.5).abs() < 1e-15);
    }

    #[derive(Debug)]
    struct NoMu(crate::objectives::Quadratic, ConditionConstants);

    impl Objective for NoMu {
        fn name(&self) -> &str {
            "no_mu"
        }
        fn dim(&self) -> usize {
            self.0.dim()
        }
        fn value(&self, x: &Vector) -> f64 {
            self.0.value(x)
        }
        fn gradient(&self, x: &Vector) -> Vector {
            self.0.gradient(x)
        }
        fn minimizer(&self) -> &Vector {
            self.0.minimizer()
        }
        fn minimum(&self) -> f64 {
            0.0
        }
        fn constants(&self) -> &ConditionConstants {
            &self.1
        }
    }

    #[test]
    fn nag_sc_requires_mu() {
        let q = make_quadratic(Matrix::identity(1, 1)).unwrap();
        let p = Problem::smooth(NoMu(q, ConditionConstants::new(1.0, f64::NAN, 1.0, None)));
        let err = run(&AlgorithmConfig::new(AlgorithmKind::NagSc, 0.1, 3), &p, &v(&[1.0])).unwrap_err();
        assert!(matches!(err, OptimError::MissingMu { .. }));
    }
}
