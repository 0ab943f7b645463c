//! Randomized coordinate descent: expectation bound over seeds and the
//! averaged iterate against its limit flow.
//!
//!     cargo run --release --example coordinate_descent

use oscillab::dynamics::{coordinate_limit_field, discrete_continuous_deviation, integrate};
use oscillab::objectives::make_quadratic;
use oscillab::optimizers::{run, AlgorithmConfig, AlgorithmKind, DiscreteTrajectory};
use oscillab::rates::{bound_catalog, check_expectation_bound, ConstantMode};
use oscillab::{Matrix, Problem, Vector};

fn main() {
    let p = Problem::smooth(make_quadratic(Matrix::from_row_slice(2, 2, &[300.0, 1.0, 1.0, 50.0])).unwrap());
    let x0 = Vector::from_column_slice(&[1.0, 1.0]);
    let l_max = p.constants().l_max;

    let cfg = AlgorithmConfig::new(AlgorithmKind::Rcgd, 1.0 / l_max, 2000);
    let runs: Vec<DiscreteTrajectory> = (0..200)
        .map(|s| run(&cfg.clone().with_seed(s), &p, &x0).unwrap())
        .collect();
    let b = bound_catalog("RCGD_CONVEX", p.constants(), x0.norm(), 2).unwrap();
    let r = check_expectation_bound(&b, &runs, 0.0, ConstantMode::PaperConstant).unwrap();
    println!("{}: {} violations of mean gap <= B(k) + 3 SE", b.formula, r.violations);

    for eta in [4e-4, 2e-4, 1e-4] {
        let k = (0.1 / eta) as usize;
        let cfg = AlgorithmConfig::new(AlgorithmKind::Rcgd, eta, k);
        let runs: Vec<DiscreteTrajectory> = (0..200)
            .map(|s| run(&cfg.clone().with_seed(s), &p, &x0).unwrap())
            .collect();
        let mut mean = runs[0].clone();
        for i in 0..mean.iterates.len() {
            mean.iterates[i] = runs.iter().map(|r| &r.iterates[i]).sum::<Vector>() / runs.len() as f64;
        }
        let ct = integrate(
            &coordinate_limit_field(&cfg, &p, eta).unwrap(),
            &x0,
            &Vector::zeros(2),
            0.1,
            eta / 4.0,
        )
        .unwrap();
        println!(
            "eta = {eta:.0e}: mean iterate vs limit flow {:.3e}",
            discrete_continuous_deviation(&mean, &ct, eta).unwrap()
        );
    }
}
