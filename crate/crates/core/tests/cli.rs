use std::path::Path;
use std::process::{Command, Output};

fn oscillab(args: &[&str], seed: Option<&str>, cwd: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_oscillab"));
    cmd.args(args).current_dir(cwd).env_remove("OSCILLAB_SEED");
    if let Some(s) = seed {
        cmd.env("OSCILLAB_SEED", s);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const CONFIG: &str = r#"{
  "name": "small",
  "objective": "quadratic:h.csv",
  "x0": [1.0, 1.0],
  "seed": 5,
  "dt": 0.01,
  "runs": [
    {"kind": "VGD", "eta": 0.25, "iterations": 40,
     "ode": {}, "certificates": ["VGD_PL"],
     "bounds": [{"id": "VGD_SC"}, {"id": "VGD_CONVEX"}]},
    {"kind": "RCGD", "eta": 0.25, "iterations": 40, "repeats": 4,
     "bounds": [{"id": "RCGD_CONVEX"}]}
  ]
}"#;

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("h.csv"), "4,0\n0,1\n").unwrap();
    std::fs::write(dir.path().join("small.json"), CONFIG).unwrap();
    dir
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn run_writes_artifacts_and_passes() {
    let dir = setup();
    let o = oscillab(&["run", "small.json", "--out", "out"], None, dir.path());
    assert!(
        o.status.success(),
        "{}{}",
        stdout(&o),
        String::from_utf8_lossy(&o.stderr)
    );
    let out = dir.path().join("out");
    let m = manifest(&out);
    assert_eq!(m["pass"], true);
    assert_eq!(m["runs"].as_array().unwrap().len(), 2);
    assert_eq!(m["runs"][1]["seeds"], serde_json::json!([5 ^ 1, 5 ^ 2, 5 ^ 3, 5 ^ 4]));
    assert!(out.join("run00_vgd.csv").exists());
    assert!(out.join("run01_rcgd_mean.csv").exists());
    let head = std::fs::read_to_string(out.join("run00_vgd.csv")).unwrap();
    assert!(head.starts_with("k,x_1,x_2,f\n0,1.0,1.0,2.5\n"), "{head}");
    let ode = std::fs::read_to_string(out.join("run00_vgd_ode.csv")).unwrap();
    assert!(ode.starts_with("t,X_1,X_2,V_1,V_2\n"));
    let bound: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("run00_vgd_bound_vgd_sc.json")).unwrap()).unwrap();
    assert_eq!(bound["pass"], true);
    assert_eq!(bound["margin_curve_path"], "run00_vgd_bound_vgd_sc.csv");

    let v = oscillab(&["verify", "out/manifest.json"], None, dir.path());
    assert!(v.status.success());
    std::fs::write(out.join("run00_vgd.csv"), "tampered").unwrap();
    let v = oscillab(&["verify", "out/manifest.json"], None, dir.path());
    assert_eq!(v.status.code(), Some(1));
    assert!(stdout(&v).contains("MODIFIED run00_vgd.csv"));
}

#[test]
fn seed_env_and_dt_flag_override_config() {
    let dir = setup();
    let o = oscillab(
        &["--dt", "0.005", "run", "small.json", "--out", "a"],
        Some("100"),
        dir.path(),
    );
    assert!(o.status.success());
    let m = manifest(&dir.path().join("a"));
    assert_eq!(m["seed"], 100);
    assert_eq!(m["dt"], 0.005);
    assert_eq!(m["runs"][0]["seeds"], serde_json::json!([100]));
    let bad = oscillab(&["run", "small.json", "--out", "b"], Some("abc"), dir.path());
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = setup();
    for out in ["a", "b"] {
        assert!(oscillab(&["run", "small.json", "--out", out], None, dir.path())
            .status
            .success());
    }
    let names: Vec<_> = std::fs::read_dir(dir.path().join("a"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert!(names.len() > 10);
    for n in names {
        assert_eq!(
            std::fs::read(dir.path().join("a").join(&n)).unwrap(),
            std::fs::read(dir.path().join("b").join(&n)).unwrap(),
            "{n:?}"
        );
    }
}

#[test]
fn failing_check_gives_exit_one() {
    let dir = setup();
    // η = 1/(4L) is slower than the (1 - 1/κ)^k bound assumes
    let cfg = CONFIG.replace(
        r#""eta": 0.25, "iterations": 40,
     "ode""#,
        r#""eta": 0.0625, "iterations": 40,
     "ode""#,
    );
    std::fs::write(dir.path().join("slow.json"), cfg).unwrap();
    let o = oscillab(&["run", "slow.json", "--out", "out"], None, dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("[FAIL] run 0 bound VGD_SC"));
    assert_eq!(manifest(&dir.path().join("out"))["pass"], false);
}

#[test]
fn config_errors_give_exit_two_before_any_output() {
    let dir = setup();
    let cases = [
        CONFIG.replace(r#""kind": "VGD""#, r#""kind": "NAG_SC""#),
        CONFIG.replace("quadratic:h.csv", "quadratic:missing.csv"),
        CONFIG.replace(r#""kind": "RCGD""#, r#""kind": "ADAM""#),
        CONFIG.replace("RCGD_CONVEX", "RCGD_TYPO"),
    ];
    for (i, cfg) in cases.iter().enumerate() {
        let name = format!("bad{i}.json");
        std::fs::write(dir.path().join(&name), cfg).unwrap();
        let out = format!("out{i}");
        let o = oscillab(&["run", &name, "--out", &out], None, dir.path());
        assert_eq!(o.status.code(), Some(2), "case {i}: {}", stdout(&o));
        assert!(!dir.path().join(&out).exists(), "case {i}");
    }
}

#[test]
fn empty_run_list_exits_zero() {
    let dir = setup();
    std::fs::write(
        dir.path().join("empty.json"),
        r#"{"name": "empty", "objective": "pl_nonconvex", "x0": [1.0]}"#,
    )
    .unwrap();
    let o = oscillab(&["run", "empty.json", "--out", "out"], None, dir.path());
    assert!(o.status.success());
    let m = manifest(&dir.path().join("out"));
    assert_eq!(m["runs"].as_array().unwrap().len(), 0);
    assert_eq!(m["artifacts"].as_array().unwrap().len(), 0);
}

#[test]
fn list_prints_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let o = oscillab(&["list"], None, dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    for id in [
        "VGD",
        "NAG_SC",
        "NAG_GC",
        "RCGD",
        "ARCG_SC",
        "ARCG_GC",
        "NEWTON",
        "PROX_GRAD",
        "NAG_QG",
        "NEWTON_QUADRATIC",
    ] {
        assert!(text.contains(id), "{id}");
    }
}

#[test]
fn preset_figure2_runs() {
    let dir = tempfile::tempdir().unwrap();
    let o = oscillab(&["preset", "figure2", "--out", "f2"], None, dir.path());
    assert!(o.status.success(), "{}", stdout(&o));
    let m = manifest(&dir.path().join("f2"));
    assert_eq!(m["runs"].as_array().unwrap().len(), 4);
    assert!(m["notes"]["x0"].as_str().unwrap().contains("chosen here"));
    let unknown = oscillab(&["preset", "figure3"], None, dir.path());
    assert!(!unknown.status.success());
}
