//! Every discrete method on the 2x2 test quadratic.
//!
//!     cargo run --example discrete_methods

use oscillab::objectives::make_quadratic;
use oscillab::optimizers::{run, AlgorithmConfig, AlgorithmKind};
use oscillab::{Matrix, Problem, Vector};

fn main() {
    let p = Problem::smooth(make_quadratic(Matrix::from_row_slice(2, 2, &[300.0, 1.0, 1.0, 50.0])).unwrap());
    let x0 = Vector::from_column_slice(&[1.0, 1.0]);
    let c = p.constants().clone();

    println!("{:<10} {:>10} {:>14} {:>14}", "method", "eta", "gap(100)", "gap(1000)");
    for kind in AlgorithmKind::ALL {
        if kind == AlgorithmKind::ProxGrad {
            continue; // same as VGD on a smooth problem
        }
        let eta = match kind {
            AlgorithmKind::Newton => 1.0,
            k if k.is_coordinate() => 1.0 / c.l_max,
            _ => 1.0 / c.l,
        };
        let cfg = AlgorithmConfig::new(kind, eta, 1000).with_seed(7);
        let t = run(&cfg, &p, &x0).unwrap();
        let gaps = t.gaps(p.minimum());
        println!(
            "{:<10} {:>10.3e} {:>14.3e} {:>14.3e}",
            kind.id(),
            eta,
            gaps[100.min(gaps.len() - 1)],
            gaps.last().unwrap()
        );
        for w in &t.warnings {
            println!("    warning: {w}");
        }
    }
}
