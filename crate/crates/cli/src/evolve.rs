use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use spin7geom::pde::{
    dude4_study, evolve_dude4, evolve_monge_ampere, monge_ampere_study, ConvergenceStudy, Dude4Case, Dude4Config, EvolutionReport, GridField,
    MaCase, MongeAmpereConfig, PdeError,
};

use crate::{Failure, EXIT_ABORT, EXIT_USAGE};

/// Monge-Ampère config: a refinement study of a closed-form case, or one run
/// from CSV grids (paths relative to the config file).
#[derive(Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
enum MaConfig {
    Study {
        case: MaCase,
        resolutions: Vec<usize>,
        #[serde(default)]
        min_steps: usize,
    },
    Grid {
        f0: PathBuf,
        f1: PathBuf,
        c: f64,
        s_range: (f64, f64),
        steps: usize,
        background: [[f64; 2]; 2],
    },
}

#[derive(Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
enum Dude4FileConfig {
    Study { case: Dude4Case, resolutions: Vec<usize>, steps: usize },
    Grid { u0: PathBuf, u1: PathBuf, g: PathBuf, y_range: (f64, f64), steps: usize },
}

#[derive(Serialize)]
struct StudyOutput<'a> {
    schema_version: u32,
    study: &'a ConvergenceStudy,
}

fn read_config<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::new(EXIT_USAGE, format!("config schema: {e}")))
}

fn read_grid(config: &Path, rel: &Path) -> Result<GridField, Failure> {
    let path = config.parent().unwrap_or(Path::new(".")).join(rel);
    let text = std::fs::read_to_string(&path).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    GridField::from_csv(&text).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn pde_failure(e: PdeError) -> Failure {
    match e.step() {
        Some(step) => Failure::new(EXIT_ABORT, format!("solver abort at step {step}: {e}")),
        None => Failure::new(EXIT_USAGE, e.to_string()),
    }
}

fn write(out: &Path, name: &str, text: &str) -> Result<(), Failure> {
    std::fs::create_dir_all(out).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", out.display())))?;
    let p = out.join(name);
    std::fs::write(&p, text).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", p.display())))
}

fn write_report(out: &Path, r: &EvolutionReport) -> Result<(), Failure> {
    write(out, "report.json", &serde_json::to_string_pretty(r).expect("report serializes"))?;
    write(out, "final.csv", &r.final_field.to_csv())
}

fn finish_study(out: &Path, st: ConvergenceStudy) -> Result<(), Failure> {
    print!("{}", st.table());
    let json = serde_json::to_string_pretty(&StudyOutput { schema_version: 1, study: &st }).expect("study serializes");
    write(out, "convergence.json", &json)?;
    match &st.finest {
        Some(r) => write_report(out, r),
        None => Err(Failure::new(EXIT_USAGE, "no resolutions given")),
    }
}

fn summarize(r: &EvolutionReport) {
    let worst = r.max_residual_per_step.iter().copied().fold(0.0, f64::max);
    println!("steps {} dt {:e} max staggered residual {:e}", r.steps, r.dt, worst);
    for (k, v) in &r.conserved_diagnostics {
        println!("{k} {v:e}");
    }
}

pub fn run_ma(config: &Path, out: &Path) -> Result<(), Failure> {
    match read_config::<MaConfig>(config)? {
        MaConfig::Study { case, resolutions, min_steps } => finish_study(out, monge_ampere_study(&case, &resolutions, min_steps).map_err(pde_failure)?),
        MaConfig::Grid { f0, f1, c, s_range, steps, background } => {
            let (f0, f1) = (read_grid(config, &f0)?, read_grid(config, &f1)?);
            let cfg = MongeAmpereConfig { c, s_range, steps, background };
            let outcome = evolve_monge_ampere(&f0, &f1, &cfg).map_err(pde_failure)?;
            summarize(&outcome.report);
            write_report(out, &outcome.report)?;
            write(out, "u_final.csv", &outcome.u_final.to_csv())
        }
    }
}

pub fn run_dude4(config: &Path, out: &Path) -> Result<(), Failure> {
    match read_config::<Dude4FileConfig>(config)? {
        Dude4FileConfig::Study { case, resolutions, steps } => finish_study(out, dude4_study(&case, &resolutions, steps).map_err(pde_failure)?),
        Dude4FileConfig::Grid { u0, u1, g, y_range, steps } => {
            let (u0, u1, g) = (read_grid(config, &u0)?, read_grid(config, &u1)?, read_grid(config, &g)?);
            let r = evolve_dude4(&u0, &u1, &g, &Dude4Config { y_range, steps }).map_err(pde_failure)?;
            summarize(&r);
            write_report(out, &r)
        }
    }
}
