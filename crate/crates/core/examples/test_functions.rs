//! The objective zoo and its regularity checks.
//!
//!     cargo run --example test_functions

use oscillab::objectives::{
    check_pl, check_proximal_pl, check_qg, make_lasso, make_pl_nonconvex, make_quadratic, make_self_concordant,
};
use oscillab::{Matrix, Objective, Vector};

fn main() {
    let q = make_quadratic(Matrix::from_row_slice(2, 2, &[300.0, 1.0, 1.0, 50.0])).unwrap();
    let c = q.constants();
    println!(
        "quadratic: L = {:.4}, mu = {:.4}, L_max = {}, kappa = {:.3}",
        c.l,
        c.mu,
        c.l_max,
        c.kappa()
    );

    let f = make_pl_nonconvex();
    let grid: Vec<Vector> = (-400..=400).map(|i| Vector::from_element(1, i as f64 * 0.02)).collect();
    let pl = check_pl(&f, &grid, f.constants().mu);
    println!(
        "pl_nonconvex: worst f/|grad f|^2 = {:.4} (limit {}), pass = {}",
        pl.worst, pl.threshold, pl.pass
    );
    let qg = check_qg(&f, &grid, f.constants().mu);
    println!("pl_nonconvex QG margin {:.4}, pass = {}", qg.worst, qg.pass);
    let mid = |a: f64, b: f64| f.value(&Vector::from_element(1, 0.5 * (a + b)));
    let chord = |a: f64, b: f64| 0.5 * (f.value(&Vector::from_element(1, a)) + f.value(&Vector::from_element(1, b)));
    println!(
        "convexity probe on [1.5, 2.5]: f(mid) = {:.4} vs chord {:.4}",
        mid(1.5, 2.5),
        chord(1.5, 2.5)
    );

    let sc = make_self_concordant(2).unwrap();
    println!(
        "self_concordant: nu = {:?}, f(-2, 0) = {:?}",
        sc.constants().nu,
        sc.try_value(&Vector::from_column_slice(&[-2.0, 0.0]))
            .map_err(|e| e.to_string())
    );

    let lasso = make_lasso(0.1).unwrap();
    let pts: Vec<Vector> = (-4..=4)
        .flat_map(|i| (-4..=4).map(move |j| Vector::from_column_slice(&[0.5 * i as f64, 0.5 * j as f64])))
        .collect();
    let r = check_proximal_pl(&lasso, &pts, 1.0).unwrap();
    println!(
        "lasso: minimizer {:?}, proximal-PL margin {:.3e} over {} points, pass = {}",
        lasso.minimizer().as_slice(),
        r.worst,
        r.evaluated,
        r.pass
    );
}
