use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use oscillab::experiment::{
    list_settings, preset, run_experiment, seed_from_env, verify_manifest, ArtifactProblem, ExperimentConfig,
    ExperimentError, Manifest, PRESETS,
};

/// Optimizer trajectories, their ODE limits, and convergence checks.
#[derive(Parser)]
#[command(name = "oscillab", version)]
struct Cli {
    /// Override the integrator step of every ODE companion.
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config.
    Run {
        config: PathBuf,
        /// Output directory; defaults to the config's `output_dir`, then `out/<name>`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a built-in experiment.
    Preset {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(PRESETS))]
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print every accepted objective, algorithm, certificate and bound id.
    List,
    /// Recompute artifact checksums listed in a manifest.
    Verify { manifest: PathBuf },
}

fn execute(
    mut config: ExperimentConfig,
    dt: Option<f64>,
    base_dir: Option<&Path>,
    out: Option<PathBuf>,
) -> Result<Manifest, ExperimentError> {
    if let Some(seed) = seed_from_env()? {
        config.seed = seed;
    }
    if let Some(dt) = dt {
        config.dt = dt;
    }
    let out = out
        .or_else(|| config.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out").join(&config.name));
    let manifest = run_experiment(&config, base_dir, &out)?;
    for r in &manifest.runs {
        let dev = r.deviation.map(|d| format!(", deviation {d:e}")).unwrap_or_default();
        println!(
            "run {:>2} {:<9} eta={} K={}{}{}",
            r.index,
            r.kind.id(),
            r.eta,
            r.iterations,
            if r.diverged { " DIVERGED" } else { "" },
            dev
        );
        for w in &r.warnings {
            println!("         warning: {w}");
        }
    }
    for c in &manifest.checks {
        println!(
            "[{}] run {} {}: {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.run,
            c.name,
            c.detail
        );
    }
    println!(
        "{} artifacts, manifest at {}",
        manifest.artifacts.len(),
        out.join(oscillab::experiment::MANIFEST_FILE).display()
    );
    Ok(manifest)
}

fn finish(result: Result<Manifest, ExperimentError>) -> ExitCode {
    match result {
        Ok(m) if m.pass => ExitCode::SUCCESS,
        Ok(m) => {
            eprintln!("{} check(s) failed", m.failed_checks().count());
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out } => {
            let loaded = ExperimentConfig::load(&config);
            let base = config.parent().map(Path::to_path_buf);
            finish(loaded.and_then(|c| execute(c, cli.dt, base.as_deref(), out)))
        }
        Command::Preset { name, out } => {
            let config = preset(&name).expect("clap restricts preset names");
            finish(execute(config, cli.dt, None, out))
        }
        Command::List => {
            print!("{}", list_settings());
            ExitCode::SUCCESS
        }
        Command::Verify { manifest } => match verify_manifest(&manifest) {
            Ok(report) => {
                for (path, problem) in &report.problems {
                    match problem {
                        ArtifactProblem::Missing => println!("MISSING  {path}"),
                        ArtifactProblem::Modified { actual } => println!("MODIFIED {path} (sha256 {actual})"),
                    }
                }
                println!(
                    "{} artifacts checked, {} problems",
                    report.checked,
                    report.problems.len()
                );
                if report.ok() {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
    }
}
