//! Declarative experiments: a JSON config in, CSV/JSON artifacts and a
//! checksummed manifest out.
//!
//! Everything is validated (objective, algorithms, certificate pairings,
//! bound ids, output directory) before the first run starts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    build_ode, discrete_continuous_deviation, integrate, ContinuousTrajectory, DynamicsError, OdeSystem, PhysicalParams,
};
use crate::io;
use crate::lyapunov::{
    certificate, energy_error_estimate, monotonicity_tolerance, verify_monotone, LyapunovCertificate, LyapunovError,
    Setting,
};
use crate::objectives::{make_quadratic, resolve, ObjectiveError, Problem, OBJECTIVE_IDS};
use crate::optimizers::{run, AlgorithmConfig, AlgorithmKind, DiscreteTrajectory, Momentum, OptimError};
use crate::rates::{
    bound_catalog, check_bound, check_expectation_bound, check_newton_quadratic, mean_gaps, BoundForm, ConstantMode,
    RateBound, RateError, BOUND_IDS,
};
use crate::{Matrix, Vector};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const SEED_ENV: &str = "OSCILLAB_SEED";

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
    #[error(transparent)]
    Optim(#[from] OptimError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Lyapunov(#[from] LyapunovError),
    #[error(transparent)]
    Rate(#[from] RateError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn default_dt() -> f64 {
    1e-3
}

fn default_repeats() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    /// Objective id, e.g. `quadratic:H.csv`, `pl_nonconvex`, `lasso:0.1`.
    /// Plain `quadratic` takes its Hessian from `matrix`.
    pub objective: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    pub x0: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    /// Integrator step for all ODE companions.
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default)]
    pub runs: Vec<RunSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    /// Free-form metadata copied into the manifest.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub kind: AlgorithmKind,
    pub eta: f64,
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub momentum: Option<Momentum>,
    /// Independent seeded repetitions; more than one gives mean-gap artifacts.
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ode: Option<OdeSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub certificates: Vec<Setting>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bounds: Vec<BoundSpec>,
}

/// ODE companion of a run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeSpec {
    /// Time per iteration. Defaults to `η` for massless and Newton flows and
    /// `√η` for massive ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    /// Defaults to `iterations · h`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    /// Initial velocity; zero by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v0: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundSpec {
    pub id: String,
    #[serde(default)]
    pub mode: ConstantMode,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        Self::from_json(&std::fs::read_to_string(path).map_err(io_err(path))?)
    }

    pub fn to_json(&self) -> Result<String, ExperimentError> {
        Ok(io::to_json(self)?)
    }
}

/// Reads the seed override from `OSCILLAB_SEED`, if set.
pub fn seed_from_env() -> Result<Option<u64>, ExperimentError> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|e| ExperimentError::Config(format!("{SEED_ENV}=`{s}`: {e}"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(ExperimentError::Config(format!("{SEED_ENV}: {e}"))),
    }
}

/// 2×2 quadratic of the original figure, four methods, ODE companions for
/// the two full-gradient methods. `x0 = (1, 1)` and `K = 5000` are our
/// choices and are flagged as such in the manifest notes.
pub fn figure2_preset() -> ExperimentConfig {
    let spec = |kind, eta, ode: Option<OdeSpec>, certificates: Vec<Setting>| RunSpec {
        kind,
        eta,
        iterations: 5000,
        momentum: None,
        repeats: 1,
        ode,
        certificates,
        bounds: Vec::new(),
    };
    let mut notes = BTreeMap::new();
    notes.insert(
        "x0".to_string(),
        "(1, 1): not given with the original figure; chosen here".to_string(),
    );
    notes.insert(
        "iterations".to_string(),
        "5000: not given with the original figure; chosen here".to_string(),
    );
    ExperimentConfig {
        name: "figure2".into(),
        objective: "quadratic".into(),
        matrix: Some(vec![vec![300.0, 1.0], vec![1.0, 50.0]]),
        x0: vec![1.0, 1.0],
        seed: 0,
        dt: 1e-3,
        runs: vec![
            spec(AlgorithmKind::Vgd, 1e-4, Some(OdeSpec::default()), vec![Setting::VgdPl]),
            spec(
                AlgorithmKind::NagSc,
                1e-4,
                Some(OdeSpec::default()),
                vec![Setting::NagQg],
            ),
            spec(AlgorithmKind::Rcgd, 2e-4, None, vec![]),
            spec(AlgorithmKind::ArcgSc, 2e-4, None, vec![]),
        ],
        output_dir: Some("out/figure2".into()),
        notes,
    }
}

/// Presets by name.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    match name {
        "figure2" => Some(figure2_preset()),
        _ => None,
    }
}

pub const PRESETS: [&str; 1] = ["figure2"];

fn algorithm_blurb(kind: AlgorithmKind) -> &'static str {
    match kind {
        AlgorithmKind::Vgd => "gradient descent; massless flow c Ẋ + ∇f = 0, c = h/η",
        AlgorithmKind::NagSc => "Nesterov, α = (√(1/(μη)) - 1)/(√(1/(μη)) + 1); m = h²/η, c = 2√(mμ)",
        AlgorithmKind::NagGc => "Nesterov, α_k = (k-1)/(k+2); m = h²/η, c(t) = 3m/t",
        AlgorithmKind::Rcgd => "random coordinate descent; limit flow Ẋ = -(1/d)∇f at h = η",
        AlgorithmKind::ArcgSc => "accelerated coordinate, α = (√κ_max - 1)/(√κ_max + 1); η' = η/d, c = 2√(mμ/d)",
        AlgorithmKind::ArcgGc => "accelerated coordinate, α_k = (k-1)/(k+2); η' = η/d, c(t) = 3m/t",
        AlgorithmKind::Newton => "Newton; flow h∇²f(X) Ẋ + ∇f(X) = 0",
        AlgorithmKind::ProxGrad => "proximal gradient; flow c Ẋ = -G_min(X)",
    }
}

fn certificate_blurb(s: Setting) -> &'static str {
    match s {
        Setting::VgdConvex => "γ = t, Γ = c‖X-x*‖²/(2t), t0 = h",
        Setting::VgdPl => "γ = exp(2μt/c), Γ = 0",
        Setting::NagQg => "γ = exp(λct), Γ = m/2‖Ẋ + σc(X-x*)‖², σ = 4/(5m), λ = 1/(5m), needs c² = 4mμ",
        Setting::NewtonSc => "γ = exp(t/(2h)), Γ = 0",
        Setting::CompositeProxpl => "γ = exp(2μt/c), Γ = 0, flow c Ẋ = -G_min(X)",
    }
}

/// Human-readable catalog of every id the runner accepts.
pub fn list_settings() -> String {
    let mut out = String::new();
    out.push_str("objectives:\n");
    for id in OBJECTIVE_IDS {
        let _ = writeln!(out, "  {id}");
    }
    out.push_str("  quadratic (with \"matrix\" in the config)\n");
    out.push_str("algorithms:\n");
    for k in AlgorithmKind::ALL {
        let _ = writeln!(out, "  {:<10} {}", k.id(), algorithm_blurb(k));
    }
    out.push_str("certificates:\n");
    for s in Setting::ALL {
        let _ = writeln!(out, "  {:<17} {}", s.id(), certificate_blurb(s));
    }
    out.push_str("bounds:\n");
    for (id, formula) in BOUND_IDS {
        let _ = writeln!(out, "  {id:<21} {formula}");
    }
    out.push_str("presets:\n");
    for p in PRESETS {
        let _ = writeln!(out, "  {p}");
    }
    out
}

fn resolve_problem(config: &ExperimentConfig, base_dir: Option<&Path>) -> Result<Problem, ExperimentError> {
    match (config.objective.as_str(), &config.matrix) {
        ("quadratic", Some(rows)) => {
            let n = rows.len();
            if rows.iter().any(|r| r.len() != n) {
                return Err(ObjectiveError::NotSquare {
                    rows: n,
                    cols: rows.iter().map(|r| r.len()).find(|&c| c != n).unwrap_or(n),
                }
                .into());
            }
            let flat: Vec<f64> = rows.iter().flatten().copied().collect();
            Ok(Problem::smooth(make_quadratic(Matrix::from_row_slice(n, n, &flat))?))
        }
        (_, Some(_)) => Err(ExperimentError::Config(
            "`matrix` is only used with objective `quadratic`".into(),
        )),
        (id, None) => Ok(resolve(id, base_dir)?),
    }
}

/// Default time scale `h` for a kind's ODE companion.
pub fn default_time_scale(kind: AlgorithmKind, eta: f64) -> f64 {
    match kind {
        AlgorithmKind::Vgd | AlgorithmKind::Rcgd | AlgorithmKind::ProxGrad | AlgorithmKind::Newton => eta,
        _ => eta.sqrt(),
    }
}

struct PlannedRun {
    spec: RunSpec,
    stem: String,
    config: AlgorithmConfig,
    ode: Option<PlannedOde>,
    bounds: Vec<(RateBound, ConstantMode)>,
}

struct PlannedOde {
    sys: OdeSystem,
    h: f64,
    t_end: f64,
    v0: Vector,
    certs: Vec<LyapunovCertificate>,
}

struct Plan {
    problem: Problem,
    x0: Vector,
    runs: Vec<PlannedRun>,
}

fn plan(config: &ExperimentConfig, base_dir: Option<&Path>) -> Result<Plan, ExperimentError> {
    let problem = resolve_problem(config, base_dir)?;
    let d = problem.dim();
    if config.x0.len() != d {
        return Err(ExperimentError::Config(format!(
            "x0 has {} entries, objective `{}` has dimension {d}",
            config.x0.len(),
            problem.name()
        )));
    }
    let x0 = Vector::from_column_slice(&config.x0);
    if !(config.dt.is_finite() && config.dt > 0.0) {
        return Err(ExperimentError::Config(format!(
            "dt must be positive, got {}",
            config.dt
        )));
    }
    let r0 = (&x0 - problem.minimizer()).norm();
    let mut runs = Vec::with_capacity(config.runs.len());
    for (i, spec) in config.runs.iter().enumerate() {
        let ctx = |msg: String| ExperimentError::Config(format!("run {i} ({}): {msg}", spec.kind));
        if spec.repeats == 0 {
            return Err(ctx("repeats must be at least 1".into()));
        }
        let mut algo = AlgorithmConfig::new(spec.kind, spec.eta, spec.iterations);
        algo.momentum = spec.momentum;
        if !(spec.eta.is_finite() && spec.eta > 0.0) {
            return Err(ctx(format!("eta must be positive, got {}", spec.eta)));
        }
        algo.resolve_momentum(problem.constants())
            .map_err(|e| ctx(e.to_string()))?;
        match (&problem, spec.kind) {
            (Problem::Composite(_), AlgorithmKind::ProxGrad) | (Problem::Smooth(_), _) => {}
            (Problem::Composite(_), k) => return Err(ctx(format!("{k} cannot run on a composite objective"))),
        }

        let ode = match &spec.ode {
            None => {
                if !spec.certificates.is_empty() {
                    return Err(ctx("certificates need an `ode` companion".into()));
                }
                None
            }
            Some(o) => {
                let h = o.h.unwrap_or_else(|| default_time_scale(spec.kind, spec.eta));
                let sys = build_ode(&algo, &problem, h).map_err(|e| ctx(e.to_string()))?;
                let t_end = o.t_end.unwrap_or(spec.iterations as f64 * h);
                if !(t_end > sys.t0) {
                    return Err(ctx(format!("ODE t_end = {t_end} must exceed t0 = {}", sys.t0)));
                }
                let v0 = match &o.v0 {
                    Some(v) if v.len() == d => Vector::from_column_slice(v),
                    Some(v) => return Err(ctx(format!("v0 has {} entries, expected {d}", v.len()))),
                    None => Vector::zeros(d),
                };
                let params: &PhysicalParams = sys.params.as_ref().expect("built systems carry params");
                let mut certs = Vec::new();
                for &setting in &spec.certificates {
                    let composite = matches!(problem, Problem::Composite(_));
                    if composite != (setting == Setting::CompositeProxpl) {
                        return Err(ctx(format!(
                            "{} does not apply to a {} objective",
                            setting.id(),
                            if composite { "composite" } else { "smooth" }
                        )));
                    }
                    let cert = certificate(setting, &problem, params).map_err(|e| ctx(e.to_string()))?;
                    cert.check_params(params, &sys.label).map_err(|e| ctx(e.to_string()))?;
                    if sys.t0 > cert.t0 {
                        return Err(ctx(format!(
                            "{} starts at t0 = {} but the flow starts at {}",
                            setting.id(),
                            cert.t0,
                            sys.t0
                        )));
                    }
                    certs.push(cert);
                }
                Some(PlannedOde {
                    sys,
                    h,
                    t_end,
                    v0,
                    certs,
                })
            }
        };

        let mut bounds = Vec::new();
        for b in &spec.bounds {
            let bound = bound_catalog(&b.id, problem.constants(), r0, d).map_err(|e| ctx(e.to_string()))?;
            if b.mode == ConstantMode::PaperConstant
                && bound.constant.is_none()
                && bound.form != BoundForm::QuadraticRecurrence
            {
                return Err(ctx(format!(
                    "bound {} has no explicit constant; use calibrated_at_k0",
                    b.id
                )));
            }
            bounds.push((bound, b.mode));
        }

        runs.push(PlannedRun {
            stem: format!("run{i:02}_{}", spec.kind.id().to_lowercase()),
            spec: spec.clone(),
            config: algo,
            ode,
            bounds,
        });
    }
    Ok(Plan { problem, x0, runs })
}

/// Checks a config without running it.
pub fn validate(config: &ExperimentConfig, base_dir: Option<&Path>) -> Result<(), ExperimentError> {
    plan(config, base_dir).map(|_| ())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub run: usize,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub index: usize,
    pub kind: AlgorithmKind,
    pub eta: f64,
    pub iterations: usize,
    pub seeds: Vec<u64>,
    pub diverged: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    /// `max_k ‖x(k) - X(kh)‖` against the ODE companion (mean iterate for repeats).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deviation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub seed: u64,
    pub dt: f64,
    pub pass: bool,
    pub config: ExperimentConfig,
    pub runs: Vec<RunRecord>,
    pub checks: Vec<CheckRecord>,
    pub artifacts: Vec<Artifact>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, String>,
}

impl Manifest {
    pub fn failed_checks(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

struct Writer {
    dir: PathBuf,
    artifacts: Vec<Artifact>,
}

impl Writer {
    fn write(&mut self, name: &str, contents: &str) -> Result<(), ExperimentError> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(io_err(&path))?;
        self.artifacts.push(Artifact {
            path: name.to_string(),
            sha256: io::sha256_hex(contents.as_bytes()),
            bytes: contents.len() as u64,
        });
        Ok(())
    }
}

#[derive(Serialize)]
struct DiscreteSidecar<'a> {
    kind: AlgorithmKind,
    eta: f64,
    iterations: usize,
    momentum: Momentum,
    seed: u64,
    diverged: bool,
    failure: &'a Option<String>,
    warnings: &'a [String],
    coordinates: &'a Option<Vec<usize>>,
}

#[derive(Serialize)]
struct OdeSidecar<'a> {
    label: &'a str,
    params: &'a Option<PhysicalParams>,
    h: f64,
    t0: f64,
    t_end: f64,
    dt: f64,
    method: &'a str,
    diverged: bool,
    failure: &'a Option<String>,
}

#[derive(Serialize)]
struct CertificateSummary<'a> {
    setting: Setting,
    pass: bool,
    max_increment: f64,
    tolerance: f64,
    certificate: &'a LyapunovCertificate,
}

#[derive(Serialize)]
struct BoundSummary<'a> {
    bound_id: &'a str,
    pass: bool,
    first_violation_k: Option<usize>,
    margin_curve_path: &'a str,
    constant: f64,
    mode: ConstantMode,
    expectation: bool,
}

fn mean_iterates(trajs: &[DiscreteTrajectory]) -> DiscreteTrajectory {
    let mut mean = trajs[0].clone();
    let len = trajs.iter().map(|t| t.len()).min().unwrap_or(0);
    let n = trajs.len() as f64;
    mean.iterates.truncate(len);
    mean.values.truncate(len);
    for k in 0..len {
        let mut acc = Vector::zeros(mean.dim());
        for t in trajs {
            acc += &t.iterates[k];
        }
        mean.iterates[k] = acc / n;
        mean.values[k] = trajs.iter().map(|t| t.values[k]).sum::<f64>() / n;
    }
    mean
}

/// Runs every configured algorithm, ODE companion and check, writing
/// artifacts and `manifest.json` to `out_dir`.
///
/// `base_dir` resolves relative objective paths. The manifest's `pass` is
/// false iff some selected check failed.
pub fn run_experiment(
    config: &ExperimentConfig,
    base_dir: Option<&Path>,
    out_dir: &Path,
) -> Result<Manifest, ExperimentError> {
    let plan = plan(config, base_dir)?;
    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut w = Writer {
        dir: out_dir.to_path_buf(),
        artifacts: Vec::new(),
    };
    let problem = &plan.problem;
    let f_star = problem.minimum();
    let mut records = Vec::new();
    let mut checks = Vec::new();
    let mut run_index: u64 = 0;

    for (i, pr) in plan.runs.iter().enumerate() {
        let mut trajs = Vec::with_capacity(pr.spec.repeats);
        for _ in 0..pr.spec.repeats {
            let cfg = pr.config.clone().with_seed(config.seed ^ run_index);
            run_index += 1;
            trajs.push(run(&cfg, problem, &plan.x0)?);
        }
        let stem = &pr.stem;
        let seeds: Vec<u64> = trajs.iter().map(|t| t.seed).collect();
        for (r, t) in trajs.iter().enumerate() {
            let name = if trajs.len() == 1 {
                stem.clone()
            } else {
                format!("{stem}_seed{r:03}")
            };
            w.write(&format!("{name}.csv"), &io::discrete_csv(t))?;
            let side = DiscreteSidecar {
                kind: t.config.kind,
                eta: t.config.eta,
                iterations: t.config.max_iterations,
                momentum: t.momentum,
                seed: t.seed,
                diverged: t.diverged,
                failure: &t.failure,
                warnings: &t.warnings,
                coordinates: &t.coordinates,
            };
            w.write(&format!("{name}.json"), &io::to_json(&side)?)?;
        }
        if trajs.len() > 1 {
            if let Ok((mean, se)) = mean_gaps(&trajs, f_star) {
                let mut csv = String::from("k,mean_gap,stderr\n");
                for k in 0..mean.len() {
                    let _ = writeln!(csv, "{k},{},{}", io::fmt_f64(mean[k]), io::fmt_f64(se[k]));
                }
                w.write(&format!("{stem}_mean.csv"), &csv)?;
            }
        }
        let reference = if trajs.len() == 1 {
            trajs[0].clone()
        } else {
            mean_iterates(&trajs)
        };
        let mut record = RunRecord {
            index: i,
            kind: pr.spec.kind,
            eta: pr.spec.eta,
            iterations: pr.spec.iterations,
            seeds,
            diverged: trajs.iter().any(|t| t.diverged || t.failure.is_some()),
            warnings: trajs[0].warnings.clone(),
            deviation: None,
        };

        if let Some(ode) = &pr.ode {
            let ct = integrate(&ode.sys, &plan.x0, &ode.v0, ode.t_end, config.dt)?;
            w.write(&format!("{stem}_ode.csv"), &io::continuous_csv(&ct))?;
            let side = OdeSidecar {
                label: &ct.label,
                params: &ct.params,
                h: ode.h,
                t0: ode.sys.t0,
                t_end: ode.t_end,
                dt: ct.dt,
                method: ct.method,
                diverged: ct.diverged,
                failure: &ct.failure,
            };
            w.write(&format!("{stem}_ode.json"), &io::to_json(&side)?)?;
            record.deviation = discrete_continuous_deviation(&reference, &ct, ode.h).ok();
            if !ode.certs.is_empty() {
                let fine = integrate(&ode.sys, &plan.x0, &ode.v0, ode.t_end, config.dt / 2.0)?;
                for cert in &ode.certs {
                    checks.push(certificate_check(&mut w, i, stem, cert, problem, &ct, &fine)?);
                }
            }
        }

        for (bound, mode) in &pr.bounds {
            checks.push(bound_check(&mut w, i, stem, bound, *mode, &trajs, f_star)?);
        }
        records.push(record);
    }

    let mut manifest = Manifest {
        name: config.name.clone(),
        seed: config.seed,
        dt: config.dt,
        pass: checks.iter().all(|c| c.pass),
        config: config.clone(),
        runs: records,
        checks,
        artifacts: w.artifacts,
        notes: config.notes.clone(),
    };
    manifest.artifacts.sort_by(|a, b| a.path.cmp(&b.path));
    let path = out_dir.join(MANIFEST_FILE);
    std::fs::write(&path, io::to_json(&manifest)?).map_err(io_err(&path))?;
    Ok(manifest)
}

fn certificate_check(
    w: &mut Writer,
    run: usize,
    stem: &str,
    cert: &LyapunovCertificate,
    problem: &Problem,
    ct: &ContinuousTrajectory,
    fine: &ContinuousTrajectory,
) -> Result<CheckRecord, ExperimentError> {
    let err = energy_error_estimate(cert, problem, ct, fine);
    let report = verify_monotone(cert, problem, ct, monotonicity_tolerance(err))?;
    let pass = report.pass && !ct.diverged && ct.failure.is_none();
    let name = format!("{stem}_cert_{}", cert.setting.id().to_lowercase());
    w.write(&format!("{name}.csv"), &io::monotonicity_csv(&report))?;
    let summary = CertificateSummary {
        setting: cert.setting,
        pass,
        max_increment: report.max_increment,
        tolerance: report.tolerance,
        certificate: cert,
    };
    w.write(&format!("{name}.json"), &io::to_json(&summary)?)?;
    Ok(CheckRecord {
        run,
        name: format!("certificate {}", cert.setting.id()),
        pass,
        detail: format!(
            "max increment {:e}, tolerance {:e}",
            report.max_increment, report.tolerance
        ),
    })
}

fn bound_check(
    w: &mut Writer,
    run: usize,
    stem: &str,
    bound: &RateBound,
    mode: ConstantMode,
    trajs: &[DiscreteTrajectory],
    f_star: f64,
) -> Result<CheckRecord, ExperimentError> {
    let name = format!("{stem}_bound_{}", bound.id.to_lowercase());
    let check_name = format!("bound {}", bound.id);
    if bound.form == BoundForm::QuadraticRecurrence {
        let r = check_newton_quadratic(&trajs[0].gaps(f_star));
        let mut csv = String::from("k,ratio\n");
        for (k, ratio) in &r.ratios {
            let _ = writeln!(csv, "{k},{}", io::fmt_f64(*ratio));
        }
        w.write(&format!("{name}.csv"), &csv)?;
        w.write(&format!("{name}.json"), &io::to_json(&r)?)?;
        let detail = if r.inconclusive {
            format!("inconclusive: {} usable pairs", r.usable_pairs)
        } else {
            format!("xi = {}", r.xi)
        };
        return Ok(CheckRecord {
            run,
            name: check_name,
            pass: r.pass,
            detail,
        });
    }
    let expectation = trajs.len() > 1;
    let result = if expectation {
        check_expectation_bound(bound, trajs, f_star, mode)
    } else {
        check_bound(bound, &trajs[0], f_star, mode)
    };
    let report = match result {
        Ok(r) => r,
        Err(RateError::Diverged) => {
            return Ok(CheckRecord {
                run,
                name: check_name,
                pass: false,
                detail: "trajectory diverged".into(),
            })
        }
        Err(e) => return Err(e.into()),
    };
    let csv_name = format!("{name}.csv");
    w.write(&csv_name, &io::margin_csv(&report))?;
    let summary = BoundSummary {
        bound_id: bound.id,
        pass: report.pass,
        first_violation_k: report.first_violation_k,
        margin_curve_path: &csv_name,
        constant: report.constant,
        mode,
        expectation,
    };
    w.write(&format!("{name}.json"), &io::to_json(&summary)?)?;
    Ok(CheckRecord {
        run,
        name: check_name,
        pass: report.pass,
        detail: match report.first_violation_k {
            Some(k) => format!("{} violations, first at k = {k}", report.violations),
            None => format!("no violations over {} iterations", report.margins.len()),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ArtifactProblem {
    Missing,
    Modified { actual: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub checked: usize,
    pub problems: Vec<(String, ArtifactProblem)>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Recomputes every listed checksum relative to the manifest's directory.
pub fn verify_manifest(path: &Path) -> Result<VerifyReport, ExperimentError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let manifest: Manifest = serde_json::from_str(&text)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut problems = Vec::new();
    for a in &manifest.artifacts {
        match std::fs::read(dir.join(&a.path)) {
            Ok(bytes) => {
                let actual = io::sha256_hex(&bytes);
                if actual != a.sha256 {
                    problems.push((a.path.clone(), ArtifactProblem::Modified { actual }));
                }
            }
            Err(_) => problems.push((a.path.clone(), ArtifactProblem::Missing)),
        }
    }
    Ok(VerifyReport {
        checked: manifest.artifacts.len(),
        problems,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            name: "small".into(),
            objective: "quadratic".into(),
            matrix: Some(vec![vec![2.0, 0.0], vec![0.0, 1.0]]),
            x0: vec![1.0, 1.0],
            seed: 3,
            dt: 1e-2,
            runs: vec![],
            output_dir: None,
            notes: BTreeMap::new(),
        }
    }

    fn vgd(iterations: usize) -> RunSpec {
        RunSpec {
            kind: AlgorithmKind::Vgd,
            eta: 0.1,
            iterations,
            momentum: None,
            repeats: 1,
            ode: None,
            certificates: vec![],
            bounds: vec![],
        }
    }

    #[test]
    fn empty_run_list() {
        let dir = tempfile::tempdir().unwrap();
        let m = run_experiment(&small(), None, dir.path()).unwrap();
        assert!(m.pass);
        assert!(m.runs.is_empty() && m.artifacts.is_empty());
        assert!(dir.path().join(MANIFEST_FILE).exists());
    }

    #[test]
    fn preset_contents() {
        let p = figure2_preset();
        assert_eq!(p.matrix, Some(vec![vec![300.0, 1.0], vec![1.0, 50.0]]));
        let etas: Vec<f64> = p.runs.iter().map(|r| r.eta).collect();
        assert_eq!(etas, vec![1e-4, 1e-4, 2e-4, 2e-4]);
        assert_eq!(p.x0, vec![1.0, 1.0]);
        assert!(p.notes.contains_key("x0"));
        assert_eq!(p.runs.iter().filter(|r| r.ode.is_some()).count(), 2);
    }

    #[test]
    fn certificate_pairing_is_a_config_error() {
        let mut c = small();
        let mut r = vgd(10);
        r.kind = AlgorithmKind::NagSc;
        r.eta = 1e-2;
        r.ode = Some(OdeSpec::default());
        r.certificates = vec![Setting::VgdPl];
        c.runs.push(r);
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        assert!(matches!(
            run_experiment(&c, None, &out),
            Err(ExperimentError::Config(_))
        ));
        assert!(!out.exists());
    }

    #[test]
    fn unknown_ids_fail_before_running() {
        let mut c = small();
        c.objective = "rosenbrock".into();
        c.matrix = None;
        assert!(validate(&c, None).is_err());
        let mut c = small();
        let mut r = vgd(10);
        r.bounds.push(BoundSpec {
            id: "NOPE".into(),
            mode: ConstantMode::PaperConstant,
        });
        c.runs.push(r);
        assert!(validate(&c, None).is_err());
        assert!(ExperimentConfig::from_json(
            r#"{"name":"x","objective":"pl_nonconvex","x0":[1],"runs":[{"kind":"FOO","eta":1,"iterations":1}]}"#
        )
        .is_err());
    }

    #[test]
    fn listed_ids_are_accepted() {
        let text = list_settings();
        assert!(text.contains("NAG_QG") && text.contains("σ = 4/(5m)") && text.contains("λ = 1/(5m)"));
        for k in AlgorithmKind::ALL {
            assert!(text.contains(k.id()));
        }
        for (id, _) in BOUND_IDS {
            let mut c = small();
            let mut r = vgd(5);
            r.bounds.push(BoundSpec {
                id: id.into(),
                mode: ConstantMode::CalibratedAtK0,
            });
            c.runs.push(r);
            validate(&c, None).unwrap();
        }
        for k in AlgorithmKind::ALL {
            let mut c = small();
            let mut r = vgd(5);
            r.kind = k;
            r.eta = 0.01;
            c.runs.push(r);
            validate(&c, None).unwrap_or_else(|e| panic!("{k}: {e}"));
        }
        for id in ["pl_nonconvex", "self_concordant:2", "lasso:0.1"] {
            let mut c = small();
            c.objective = id.into();
            c.matrix = None;
            c.x0 = vec![0.5; if id == "pl_nonconvex" { 1 } else { 2 }];
            validate(&c, None).unwrap();
        }
    }

    #[test]
    fn manifest_detects_tampering() {
        let mut c = small();
        let mut r = vgd(20);
        r.eta = 0.5;
        r.ode = Some(OdeSpec::default());
        r.certificates = vec![Setting::VgdPl];
        r.bounds.push(BoundSpec {
            id: "VGD_SC".into(),
            mode: ConstantMode::PaperConstant,
        });
        c.runs.push(r);
        let dir = tempfile::tempdir().unwrap();
        let m = run_experiment(&c, None, dir.path()).unwrap();
        assert!(m.pass, "{:?}", m.checks);
        let mpath = dir.path().join(MANIFEST_FILE);
        assert!(verify_manifest(&mpath).unwrap().ok());
        let victim = dir.path().join(&m.artifacts[0].path);
        let mut bytes = std::fs::read(&victim).unwrap();
        bytes.push(b'\n');
        std::fs::write(&victim, bytes).unwrap();
        let report = verify_manifest(&mpath).unwrap();
        assert_eq!(report.problems.len(), 1);
    }

    #[test]
    fn per_run_seeds_follow_run_index() {
        let mut c = small();
        let mut r = vgd(5);
        r.kind = AlgorithmKind::Rcgd;
        r.repeats = 3;
        c.runs.push(vgd(2));
        c.runs.push(r);
        let dir = tempfile::tempdir().unwrap();
        let m = run_experiment(&c, None, dir.path()).unwrap();
        assert_eq!(m.runs[0].seeds, vec![3]);
        assert_eq!(m.runs[1].seeds, vec![3 ^ 1, 3 ^ 2, 3 ^ 3]);
    }

    #[test]
    fn config_round_trips_through_json() {
        let p = figure2_preset();
        let back = ExperimentConfig::from_json(&p.to_json().unwrap()).unwrap();
        assert_eq!(back, p);
    }
}
