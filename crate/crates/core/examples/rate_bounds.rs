//! Closed-form rate bounds against measured gaps, plus log-linear fits.
//!
//!     cargo run --example rate_bounds

use oscillab::objectives::make_quadratic;
use oscillab::optimizers::{run, AlgorithmConfig, AlgorithmKind};
use oscillab::rates::{bound_catalog, check_bound, fit_linear_rate, ConstantMode, Window};
use oscillab::{Matrix, Problem, Vector};

fn main() {
    let p = Problem::smooth(make_quadratic(Matrix::from_row_slice(2, 2, &[300.0, 1.0, 1.0, 50.0])).unwrap());
    let x0 = Vector::from_column_slice(&[1.0, 1.0]);
    let c = p.constants().clone();
    let r0 = x0.norm();

    for (kind, ids) in [
        (AlgorithmKind::Vgd, ["VGD_CONVEX", "VGD_SC", "VGD_PL"]),
        (AlgorithmKind::NagSc, ["NAG_CONVEX", "NAG_SC", "NAG_QG"]),
    ] {
        let t = run(&AlgorithmConfig::new(kind, 1.0 / c.l, 2000), &p, &x0).unwrap();
        for id in ids {
            let b = bound_catalog(id, &c, r0, 2).unwrap();
            let mode = if b.constant.is_some() {
                ConstantMode::PaperConstant
            } else {
                ConstantMode::CalibratedAtK0
            };
            let r = check_bound(&b, &t, 0.0, mode).unwrap();
            println!(
                "{:<6} {:<11} {:<45} violations {:>4}  C = {:.3}",
                kind.id(),
                id,
                b.formula,
                r.violations,
                r.constant
            );
        }
        let fit = fit_linear_rate(&t, 0.0, Window::Range(0, 100)).unwrap();
        println!("       fitted exponent over k in [0, 100]: {:.5}", fit.exponent);
    }
}
