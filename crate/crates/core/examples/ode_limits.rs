//! Physical parameters of each method and how closely the iterates follow
//! their ODE as the step shrinks.
//!
//!     cargo run --example ode_limits

use oscillab::dynamics::{build_ode, discrete_continuous_deviation, integrate, physical_params};
use oscillab::objectives::make_quadratic;
use oscillab::optimizers::{run, AlgorithmConfig, AlgorithmKind};
use oscillab::{Matrix, Problem, Vector};

fn main() {
    let p = Problem::smooth(make_quadratic(Matrix::from_row_slice(2, 2, &[300.0, 1.0, 1.0, 50.0])).unwrap());
    let x0 = Vector::from_column_slice(&[1.0, 1.0]);

    for kind in [
        AlgorithmKind::Vgd,
        AlgorithmKind::NagSc,
        AlgorithmKind::NagGc,
        AlgorithmKind::ArcgSc,
    ] {
        let cfg = AlgorithmConfig::new(kind, 1e-4, 1);
        let h = if kind.has_momentum() { 1e-2 } else { 1e-4 };
        let pp = physical_params(&cfg, &p, h).unwrap();
        println!(
            "{:<8} m = {:<10.4} damping = {:?} regime = {:?}",
            kind.id(),
            pp.mass,
            pp.damping,
            pp.regime
        );
    }

    // fixed horizon, shrinking step
    for kind in [AlgorithmKind::Vgd, AlgorithmKind::NagSc] {
        for eta in [4e-4_f64, 2e-4, 1e-4] {
            let h = if kind == AlgorithmKind::Vgd { eta } else { eta.sqrt() };
            let t_end = if kind == AlgorithmKind::Vgd { 0.05 } else { 0.5 };
            let k = (t_end / h).round() as usize;
            let cfg = AlgorithmConfig::new(kind, eta, k);
            let traj = run(&cfg, &p, &x0).unwrap();
            let sys = build_ode(&cfg, &p, h).unwrap();
            let ct = integrate(&sys, &x0, &Vector::zeros(2), t_end, h / 4.0).unwrap();
            let dev = discrete_continuous_deviation(&traj, &ct, h).unwrap();
            println!("{:<7} eta = {eta:.0e}: max |x(k) - X(kh)| = {dev:.3e}", kind.id());
        }
    }
}
