//! Discrete Newton is quadratically convergent; its ODE limit is only linear.
//!
//!     cargo run --example newton

use oscillab::dynamics::{build_ode, integrate};
use oscillab::objectives::make_self_concordant;
use oscillab::optimizers::{run, AlgorithmConfig, AlgorithmKind};
use oscillab::rates::{check_newton_quadratic, fit_rate, FitKind, Window};
use oscillab::{Problem, Vector};

fn main() {
    let p = Problem::smooth(make_self_concordant(2).unwrap());
    let x0 = Vector::from_column_slice(&[0.5, -0.3]);

    let cfg = AlgorithmConfig::new(AlgorithmKind::Newton, 1.0, 8);
    let t = run(&cfg, &p, &x0).unwrap();
    for (k, g) in t.gaps(0.0).iter().enumerate() {
        println!("k = {k}: gap {g:.3e}");
    }
    let r = check_newton_quadratic(&t.gaps(0.0));
    println!(
        "gap(k+1) <= xi gap(k)^2 with xi = {:.3} ({} pairs)",
        r.xi, r.usable_pairs
    );

    for h in [0.25, 0.5, 1.0] {
        let sys = build_ode(&cfg, &p, h).unwrap();
        let ct = integrate(&sys, &x0, &Vector::zeros(2), 10.0 * h, 1e-3).unwrap();
        let gaps: Vec<f64> = ct.states.iter().map(|x| p.value(x)).collect();
        let fit = fit_rate(&ct.times, &gaps, Window::MiddleHalf, FitKind::LogLinear).unwrap();
        println!(
            "flow h = {h}: f decays like exp(-{:.3} t), 2/h = {}",
            fit.exponent,
            2.0 / h
        );
    }
}
