//! Certificates γ(t)(f - f* + Γ) along matched flows, and what happens when
//! the certificate over-claims the rate.
//!
//!     cargo run --example lyapunov_certificates

use oscillab::dynamics::{build_ode, integrate};
use oscillab::lyapunov::{
    certificate, energy_error_estimate, implied_bound, monotonicity_tolerance, verify_monotone, Setting,
};
use oscillab::objectives::{make_pl_nonconvex, make_quadratic};
use oscillab::optimizers::{AlgorithmConfig, AlgorithmKind};
use oscillab::{Matrix, Problem, Vector};

fn main() {
    let f = Problem::smooth(make_pl_nonconvex());
    let cfg = AlgorithmConfig::new(AlgorithmKind::Vgd, 1e-2, 1);
    let sys = build_ode(&cfg, &f, 1e-2).unwrap();
    let x0 = Vector::from_element(1, 3.0);
    let coarse = integrate(&sys, &x0, &Vector::zeros(1), 3.0, 1e-3).unwrap();
    let fine = integrate(&sys, &x0, &Vector::zeros(1), 3.0, 5e-4).unwrap();
    let cert = certificate(Setting::VgdPl, &f, sys.params.as_ref().unwrap()).unwrap();
    let tol = monotonicity_tolerance(energy_error_estimate(&cert, &f, &coarse, &fine));
    let ok = verify_monotone(&cert, &f, &coarse, tol).unwrap();
    println!(
        "VGD_PL mu = {}: pass = {}, max increment {:.2e}",
        cert.mu, ok.pass, ok.max_increment
    );
    println!(
        "  implied f(X(3)) <= {:.3e}, actual {:.3e}",
        implied_bound(&cert, &ok, 3.0),
        f.value(coarse.states.last().unwrap())
    );
    let bad = cert.clone().with_mu(2.0 * cert.mu);
    let r = verify_monotone(&bad, &f, &coarse, tol).unwrap();
    println!(
        "VGD_PL mu = {}: pass = {}, max increment {:.2e}",
        bad.mu, r.pass, r.max_increment
    );

    let q = Problem::smooth(make_quadratic(Matrix::from_row_slice(2, 2, &[300.0, 1.0, 1.0, 50.0])).unwrap());
    let nag = build_ode(&AlgorithmConfig::new(AlgorithmKind::NagSc, 1e-2, 1), &q, 0.1).unwrap();
    let x0 = Vector::from_column_slice(&[1.0, 1.0]);
    let ct = integrate(&nag, &x0, &Vector::zeros(2), 1.0, 1e-4).unwrap();
    let cert = certificate(Setting::NagQg, &q, nag.params.as_ref().unwrap()).unwrap();
    let r = verify_monotone(&cert, &q, &ct, 1e-8).unwrap();
    println!(
        "NAG_QG sigma = {:.4}, lambda = {:.4}: pass = {}",
        cert.sigma, cert.lambda, r.pass
    );

    // VGD_PL does not apply to the massive NAG flow
    let vgd_pl = certificate(Setting::VgdPl, &q, nag.params.as_ref().unwrap()).unwrap();
    println!(
        "VGD_PL on NAG flow: {}",
        verify_monotone(&vgd_pl, &q, &ct, 1e-8).unwrap_err()
    );
}
