mod evolve;
mod verify;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use spin7geom::catalog::{self, CatalogError, StructureBundle};
use spin7geom::curvature::{curvature_operator_rank, CertificateStatus};
use spin7geom::pde::{hitchin_check, solve_s_of_h, ode1_residual};

/// Stable exit-code contract.
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INCONCLUSIVE: u8 = 3;
pub const EXIT_ABORT: u8 = 4;

#[derive(Parser)]
#[command(name = "spin7geom", version, about = "Build and certify explicit Spin(7), G2, SU(3) and SU(4) structures")]
struct Cli {
    /// Run every parallel loop on one thread (bitwise reproducible reference path).
    #[arg(long, global = true)]
    single_thread: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List catalog entries with their section tags and kinds.
    List,
    /// Print an entry's descriptor as JSON.
    Describe {
        name: String,
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, f64)>,
    },
    /// Run the invariant suite of an entry.
    Verify(verify::VerifyArgs),
    /// Certify the curvature-operator rank of an entry.
    Holonomy {
        name: String,
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, f64)>,
        #[arg(long, default_value_t = 4)]
        points: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Solve an algebraic relation.
    Solve {
        #[command(subcommand)]
        what: Solve,
    },
    /// Evolve a reduction PDE from a JSON config.
    Evolve {
        which: Evolver,
        #[arg(long)]
        config: PathBuf,
        /// Directory for report.json, final.csv and (for studies) convergence.json.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Hitchin-flow residuals along an entry's foliation coordinate.
    HitchinCheck {
        name: String,
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, f64)>,
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

#[derive(Subcommand)]
enum Solve {
    /// s(H) from AH = s^(1/3)(s + c).
    Ode1 {
        #[arg(long = "a", allow_hyphen_values = true)]
        a: f64,
        #[arg(long = "c", allow_hyphen_values = true)]
        c: f64,
        /// H values; defaults to 12 log-spaced samples in [0.1, 10].
        #[arg(long = "h", allow_hyphen_values = true, value_delimiter = ',')]
        h: Vec<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Evolver {
    Ma,
    Dude4,
}

pub fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("`{v}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

/// Error carrying its exit code.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<CatalogError> for Failure {
    fn from(e: CatalogError) -> Self {
        let code = match e {
            CatalogError::Structure(_) => EXIT_FAIL,
            _ => EXIT_USAGE,
        };
        Failure::new(code, e.to_string())
    }
}

pub fn build(name: &str, params: &[(String, f64)]) -> Result<StructureBundle, Failure> {
    let overrides: BTreeMap<String, f64> = params.iter().cloned().collect();
    Ok(catalog::build(name, &overrides)?)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::List => {
            for e in catalog::REGISTRY {
                let defaults: Vec<String> = e.defaults.iter().map(|(k, v)| format!("{k}={v}")).collect();
                println!("{} {}\t{}\t{}", e.name, e.provenance, e.kind, defaults.join(" "));
            }
            Ok(())
        }
        Command::Describe { name, params } => {
            let b = build(&name, &params)?;
            println!("{}", serde_json::to_string_pretty(&b.descriptor()).expect("descriptor serializes"));
            Ok(())
        }
        Command::Verify(args) => verify::run(&args),
        Command::Holonomy { name, params, points, seed } => {
            if points == 0 {
                return Err(Failure::new(EXIT_USAGE, "--points must be positive"));
            }
            let b = build(&name, &params)?;
            let cert = curvature_operator_rank(b.metric(), &b.sample(points, seed)).map_err(|e| Failure::new(EXIT_FAIL, e.to_string()))?;
            let status = match cert.status {
                CertificateStatus::Certified => "certified",
                CertificateStatus::Inconclusive => "inconclusive",
            };
            println!("entry {name}");
            println!("rank {}", cert.operator_rank);
            println!("pointwise ranks {:?}", cert.pointwise_ranks);
            println!("gap {:e}", cert.gap_ratio);
            println!("status {status}");
            println!("expected {:?}", b.expected_holonomy_rank);
            match cert.status {
                CertificateStatus::Inconclusive => Err(Failure::new(EXIT_INCONCLUSIVE, "rank certificate inconclusive")),
                CertificateStatus::Certified if !b.expected_holonomy_rank.admits(cert.operator_rank) => {
                    Err(Failure::new(EXIT_FAIL, format!("rank {} contradicts expected {:?}", cert.operator_rank, b.expected_holonomy_rank)))
                }
                _ => Ok(()),
            }
        }
        Command::Solve { what: Solve::Ode1 { a, c, h } } => {
            let hs = if h.is_empty() { (0..12).map(|k| 0.1 * 100f64.powf(k as f64 / 11.0)).collect() } else { h };
            for hv in hs {
                let s = solve_s_of_h(a, c, hv).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
                println!("H={hv} s={s} residual={:e}", ode1_residual(a, c, hv, s).abs());
            }
            Ok(())
        }
        Command::Evolve { which, config, out } => match which {
            Evolver::Ma => evolve::run_ma(&config, &out),
            Evolver::Dude4 => evolve::run_dude4(&config, &out),
        },
        Command::HitchinCheck { name, params, points, seed, tol } => {
            if points == 0 {
                return Err(Failure::new(EXIT_USAGE, "--points must be positive"));
            }
            let b = build(&name, &params)?;
            let r = hitchin_check(&b, &b.sample(points, seed)).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
            for (k, (v, _)) in &r.entries {
                println!("{k} {v:e}");
            }
            let worst = r.get("hit1").max(r.get("hit2"));
            if worst <= tol {
                Ok(())
            } else {
                Err(Failure::new(EXIT_FAIL, format!("hitchin residual {worst:e} exceeds {tol:e}")))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.single_thread {
        if let Err(e) = spin7geom::use_single_thread() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
