//! The scalar damped oscillator m x'' + c x' + K x = 0: damping classes,
//! decay exponents and the closed-form solution against RK4.
//!
//!     cargo run --example damped_oscillator

use oscillab::dynamics::{analytic_quadratic_solution, classify_damping, energy_decay_exponent, integrate, OdeSystem};
use oscillab::Vector;

fn main() {
    let (m, k) = (1.0, 1.0);
    println!("{:>5} {:>12} {:>10} {:>12}", "c", "class", "rate", "|X(5) err|");
    for c in [0.5, 1.0, 2.0, 4.0, 20.0] {
        let sys = OdeSystem::second_order("oscillator", 1, 0.0, move |_t, x, v| Ok((x * (-k) - v * c) / m));
        let ct = integrate(&sys, &Vector::from_element(1, 1.0), &Vector::zeros(1), 5.0, 1e-3).unwrap();
        let (exact, _) = analytic_quadratic_solution(m, c, k, 1.0, 0.0, 5.0).unwrap();
        println!(
            "{:>5} {:>12} {:>10.5} {:>12.2e}",
            c,
            format!("{:?}", classify_damping(m, c, k)),
            energy_decay_exponent(m, c, k),
            (ct.states.last().unwrap()[0] - exact).abs()
        );
    }
}
