//! Builds a config in code, runs it, and re-verifies the manifest.
//!
//!     cargo run --example experiment -- /tmp/oscillab-demo

use std::path::PathBuf;

use oscillab::experiment::{
    run_experiment, verify_manifest, BoundSpec, ExperimentConfig, OdeSpec, RunSpec, MANIFEST_FILE,
};
use oscillab::lyapunov::Setting;
use oscillab::optimizers::AlgorithmKind;
use oscillab::rates::ConstantMode;

fn main() {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("oscillab-demo"));
    let config = ExperimentConfig {
        name: "demo".into(),
        objective: "pl_nonconvex".into(),
        matrix: None,
        x0: vec![3.0],
        seed: 1,
        dt: 1e-3,
        runs: vec![RunSpec {
            kind: AlgorithmKind::Vgd,
            eta: 0.125,
            iterations: 60,
            momentum: None,
            repeats: 1,
            ode: Some(OdeSpec::default()),
            certificates: vec![Setting::VgdPl],
            bounds: vec![BoundSpec {
                id: "VGD_PL".into(),
                mode: ConstantMode::CalibratedAtK0,
            }],
        }],
        output_dir: None,
        notes: Default::default(),
    };
    print!("{}", config.to_json().unwrap());
    let m = run_experiment(&config, None, &out).unwrap();
    for c in &m.checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let v = verify_manifest(&out.join(MANIFEST_FILE)).unwrap();
    println!(
        "{} artifacts in {}, checksums ok = {}",
        v.checked,
        out.display(),
        v.ok()
    );
}
