use serde::Serialize;

use super::{norm2, CompositeObjective, Objective, ObjectiveError};
use crate::Vector;

/// Gradient norms below this are treated as stationary and skipped.
const STATIONARY_GRAD: f64 = 1e-12;
/// Relative slack for equality cases (e.g. PL on an isotropic quadratic).
const REL_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Condition {
    Pl,
    Qg,
    ProximalPl,
}

/// Outcome of a sample-based condition check.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub mu: f64,
    /// PL: largest `(f - f*)/‖∇f‖²` (compare with `threshold = 1/(2mu)`).
    /// QG and proximal-PL: smallest margin `lhs - rhs` (threshold 0).
    pub worst: f64,
    pub threshold: f64,
    pub worst_index: Option<usize>,
    pub evaluated: usize,
    /// Indices of samples skipped as stationary or degenerate.
    pub skipped: Vec<usize>,
    /// Number of directions used for the proximal-PL infimum.
    pub grid_size: Option<usize>,
    pub pass: bool,
}

/// Checks `(f(x) - f*)/‖∇f(x)‖² <= 1/(2μ)` at every sample.
pub fn check_pl(f: &dyn Objective, samples: &[Vector], mu: f64) -> ConditionReport {
    let threshold = 1.0 / (2.0 * mu);
    let mut worst = f64::NEG_INFINITY;
    let mut worst_index = None;
    let mut skipped = Vec::new();
    for (i, x) in samples.iter().enumerate() {
        let g = f.gradient(x);
        let gn = norm2(&g);
        if gn < STATIONARY_GRAD {
            skipped.push(i);
            continue;
        }
        let ratio = (f.value(x) - f.minimum()) / (gn * gn);
        if ratio > worst || ratio.is_nan() {
            worst = ratio;
            worst_index = Some(i);
        }
    }
    let evaluated = samples.len() - skipped.len();
    let pass = evaluated == 0 || worst <= threshold * (1.0 + REL_SLACK);
    ConditionReport {
        condition: Condition::Pl,
        mu,
        worst,
        threshold,
        worst_index,
        evaluated,
        skipped,
        grid_size: None,
        pass,
    }
}

/// Checks `f(x) - f* >= μ/2 ‖x - x*‖²` at every sample.
pub fn check_qg(f: &dyn Objective, samples: &[Vector], mu: f64) -> ConditionReport {
    let mut worst = f64::INFINITY;
    let mut worst_index = None;
    let mut skipped = Vec::new();
    let mut scale: f64 = 0.0;
    for (i, x) in samples.iter().enumerate() {
        let r = norm2(&(x - f.minimizer()));
        if r == 0.0 {
            skipped.push(i);
            continue;
        }
        let gap = f.value(x) - f.minimum();
        let rhs = 0.5 * mu * r * r;
        scale = scale.max(rhs);
        let margin = gap - rhs;
        if margin < worst || margin.is_nan() {
            worst = margin;
            worst_index = Some(i);
        }
    }
    let evaluated = samples.len() - skipped.len();
    let pass = evaluated == 0 || worst >= -REL_SLACK * scale;
    ConditionReport {
        condition: Condition::Qg,
        mu,
        worst,
        threshold: 0.0,
        worst_index,
        evaluated,
        skipped,
        grid_size: None,
        pass,
    }
}

/// Unit directions used for infima over the sphere `S^{d-1}`.
///
/// `d = 1` gives `±1`; `d = 2` gives `n` equally spaced angles; `d = 3`
/// gives a Fibonacci lattice of `n` points plus the six axis directions.
pub fn direction_grid(dim: usize, n: usize) -> Result<Vec<Vector>, ObjectiveError> {
    match dim {
        1 => Ok(vec![Vector::from_element(1, 1.0), Vector::from_element(1, -1.0)]),
        2 => Ok((0..n)
            .map(|i| {
                let th = std::f64::consts::TAU * i as f64 / n as f64;
                Vector::from_vec(vec![th.cos(), th.sin()])
            })
            .collect()),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
            let mut dirs: Vec<Vector> = (0..n)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
                    let r = (1.0 - z * z).sqrt();
                    let th = golden * i as f64;
                    Vector::from_vec(vec![r * th.cos(), r * th.sin(), z])
                })
                .collect();
            for j in 0..3 {
                for s in [1.0, -1.0] {
                    let mut e = Vector::zeros(3);
                    e[j] = s;
                    dirs.push(e);
                }
            }
            Ok(dirs)
        }
        d => Err(ObjectiveError::DimensionTooLarge(d)),
    }
}

/// Directions per circle (d = 2) or sphere lattice size (d = 3).
const DIRECTIONS: usize = 720;

/// Checks `(1/2μ) inf_{p ∈ S^{d-1}} ‖G(x, p)‖² >= f(x) - f*`, with the
/// infimum taken over [`direction_grid`].
pub fn check_proximal_pl(
    cf: &CompositeObjective,
    samples: &[Vector],
    mu: f64,
) -> Result<ConditionReport, ObjectiveError> {
    let dirs = direction_grid(cf.dim(), DIRECTIONS)?;
    let mut worst = f64::INFINITY;
    let mut worst_index = None;
    let mut skipped = Vec::new();
    let mut scale: f64 = 0.0;
    for (i, x) in samples.iter().enumerate() {
        let gap = cf.value(x) - cf.minimum();
        let inf_sq = dirs
            .iter()
            .map(|p| cf.directional_subgradient(x, p).norm_squared())
            .fold(f64::INFINITY, f64::min);
        if gap.abs() <= 1e-15 && cf.min_norm_subgradient(x).norm() <= STATIONARY_GRAD {
            skipped.push(i);
            continue;
        }
        scale = scale.max(gap.abs());
        let margin = inf_sq / (2.0 * mu) - gap;
        if margin < worst || margin.is_nan() {
            worst = margin;
            worst_index = Some(i);
        }
    }
    let evaluated = samples.len() - skipped.len();
    let pass = evaluated == 0 || worst >= -REL_SLACK * scale;
    Ok(ConditionReport {
        condition: Condition::ProximalPl,
        mu,
        worst,
        threshold: 0.0,
        worst_index,
        evaluated,
        skipped,
        grid_size: Some(dirs.len()),
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{make_pl_nonconvex, make_quadratic, ConditionConstants};
    use crate::Matrix;

    #[derive(Debug)]
    struct Quartic {
        x_star: Vector,
        consts: ConditionConstants,
    }

    impl Quartic {
        fn new() -> Self {
            Self {
                x_star: Vector::zeros(1),
                consts: ConditionConstants::new(1.0, 1.0, 1.0, None),
            }
        }
    }

    impl Objective for Quartic {
        fn name(&self) -> &str {
            "quartic"
        }
        fn dim(&self) -> usize {
            1
        }
        fn value(&self, x: &Vector) -> f64 {
            x[0].powi(4)
        }
        fn gradient(&self, x: &Vector) -> Vector {
            Vector::from_element(1, 4.0 * x[0].powi(3))
        }
        fn minimizer(&self) -> &Vector {
            &self.x_star
        }
        fn minimum(&self) -> f64 {
            0.0
        }
        fn constants(&self) -> &ConditionConstants {
            &self.consts
        }
    }

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    fn test_h() -> Matrix {
        Matrix::from_row_slice(2, 2, &[300.0, 1.0, 1.0, 50.0])
    }

    #[test]
    fn pl_equality_on_isotropic_quadratic() {
        let mu = 3.0;
        let q = make_quadratic(Matrix::identity(2, 2) * mu).unwrap();
        let r = check_pl(&q, &[v(&[1.0, -2.0]), v(&[0.1, 0.0])], mu);
        assert!(r.pass);
        assert!((r.worst - 1.0 / (2.0 * mu)).abs() < 1e-15);
    }

    #[test]
    fn pl_direct_evaluation_on_test_quadratic() {
        let q = make_quadratic(test_h()).unwrap();
        let r = check_pl(&q, &[v(&[1.0, 1.0])], q.constants().mu);
        // f = 176, Hx = (301, 51), ‖Hx‖² = 93202
        assert!((r.worst - 176.0 / 93202.0).abs() < 1e-15);
        assert!(r.pass);
    }

    #[test]
    fn pl_fails_for_quartic_near_minimum() {
        let r = check_pl(&Quartic::new(), &[v(&[0.1])], 1.0);
        assert!(!r.pass);
        assert!((r.worst - 1.0 / (16.0 * 0.01)).abs() < 1e-9);
    }

    #[test]
    fn pl_skips_stationary_samples() {
        let q = make_quadratic(test_h()).unwrap();
        let r = check_pl(&q, &[v(&[0.0, 0.0]), v(&[1.0, 0.0])], q.constants().mu);
        assert_eq!(r.skipped, vec![0]);
        assert_eq!(r.evaluated, 1);
    }

    #[test]
    fn pl_nonconvex_declared_mu_holds_on_dense_grid() {
        let f = make_pl_nonconvex();
        let samples: Vec<Vector> = (0..=20000)
            .map(|i| -10.0 + 20.0 * i as f64 / 20000.0)
            .filter(|x| *x != 0.0)
            .map(|x| v(&[x]))
            .collect();
        let r = check_pl(&f, &samples, f.constants().mu);
        assert!(r.pass, "worst ratio {} vs {}", r.worst, r.threshold);
        // the grid minimum of f'^2/(2f) is about 0.1755, near |x| = 2.2
        assert!(!check_pl(&f, &samples, 0.2).pass);
    }

    #[test]
    fn qg_cases() {
        let mu = 2.0;
        let q = make_quadratic(Matrix::identity(2, 2) * mu).unwrap();
        assert!(check_qg(&q, &[v(&[1.0, 0.0])], mu).pass);

        let q = make_quadratic(test_h()).unwrap();
        let r = check_qg(&q, &[v(&[0.0, 1.0])], 49.996);
        assert!(r.pass);
        assert!((r.worst - (25.0 - 24.998)).abs() < 1e-12);

        let r = check_qg(&Quartic::new(), &[v(&[0.5])], 1.0);
        assert!(!r.pass);
        assert!((r.worst - (0.0625 - 0.125)).abs() < 1e-15);
    }

    #[test]
    fn proximal_pl_reduces_to_pl_for_zero_term() {
        let cf = CompositeObjective::separable_lasso(Vector::zeros(1), 0.0).unwrap();
        let r = check_proximal_pl(&cf, &[v(&[1.0]), v(&[-0.3])], 1.0).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn proximal_pl_l1_one_dimensional() {
        let cf = CompositeObjective::separable_lasso(Vector::zeros(1), 0.1).unwrap();
        // |G(1, p)| = 1.1 for both directions; gap = 0.6
        let r = check_proximal_pl(&cf, &[v(&[1.0])], 1.0).unwrap();
        assert!(r.pass);
        assert!((r.worst - (1.21 / 2.0 - 0.6)).abs() < 1e-12);
        assert!(!check_proximal_pl(&cf, &[v(&[1.0])], 1.1).unwrap().pass);
    }

    #[test]
    fn proximal_pl_skips_minimizer_and_rejects_high_dim() {
        let cf = CompositeObjective::separable_lasso(Vector::zeros(1), 0.1).unwrap();
        let r = check_proximal_pl(&cf, &[v(&[0.0])], 1.0).unwrap();
        assert_eq!(r.skipped, vec![0]);

        let cf = CompositeObjective::separable_lasso(Vector::zeros(4), 0.1).unwrap();
        assert!(matches!(
            check_proximal_pl(&cf, &[Vector::zeros(4)], 1.0),
            Err(ObjectiveError::DimensionTooLarge(4))
        ));
    }

    #[test]
    fn proximal_pl_two_dimensional_grid() {
        let cf = crate::objectives::make_lasso(0.1).unwrap();
        let samples: Vec<Vector> = (-4..=4)
            .flat_map(|i| (-4..=4).map(move |j| v(&[0.5 * i as f64, 0.5 * j as f64])))
            .collect();
        let r = check_proximal_pl(&cf, &samples, 1.0).unwrap();
        assert!(r.pass, "worst margin {}", r.worst);
        assert_eq!(r.grid_size, Some(DIRECTIONS));
    }
}
