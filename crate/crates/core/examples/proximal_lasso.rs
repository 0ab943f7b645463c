//! Proximal gradient on a small lasso and its subgradient flow.
//!
//!     cargo run --example proximal_lasso

use oscillab::dynamics::{build_ode, integrate};
use oscillab::lyapunov::{certificate, verify_monotone, Setting};
use oscillab::objectives::make_lasso;
use oscillab::optimizers::{run, AlgorithmConfig, AlgorithmKind};
use oscillab::{Problem, Vector};

fn main() {
    let p = Problem::composite(make_lasso(0.1).unwrap());
    let x0 = Vector::from_column_slice(&[-1.0, 1.0]);
    let cfg = AlgorithmConfig::new(AlgorithmKind::ProxGrad, 0.5, 20);
    let t = run(&cfg, &p, &x0).unwrap();
    for k in [0, 1, 2, 5, 20] {
        println!(
            "k = {k:>2}: x = {:?}, F - F* = {:.3e}",
            t.iterates[k].as_slice(),
            t.values[k] - p.minimum()
        );
    }
    println!("minimizer {:?}", p.minimizer().as_slice());

    let sys = build_ode(&AlgorithmConfig::new(AlgorithmKind::ProxGrad, 0.1, 1), &p, 0.1).unwrap();
    let ct = integrate(&sys, &x0, &Vector::zeros(2), 3.0, 1e-3).unwrap();
    let cert = certificate(Setting::CompositeProxpl, &p, sys.params.as_ref().unwrap()).unwrap();
    let r = verify_monotone(&cert, &p, &ct, 1e-9).unwrap();
    println!(
        "subgradient flow: X(3) = {:?}, certificate pass = {}",
        ct.states.last().unwrap().as_slice(),
        r.pass
    );
}
