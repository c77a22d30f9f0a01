//! Solvers and residual checkers for the reduction equations: the algebraic relation
//! between s and H, the s-evolution of a Kähler potential, the y-evolution of the
//! curve equation and the Hitchin-flow split of a Spin(7) form.

mod dude4;
mod grid;
mod hitchin;
mod monge_ampere;
mod ode1;
mod reduction;
mod studies;

pub use dude4::{evolve_dude4, Dude4Config};
pub use grid::{EvolutionReport, GridField};
pub use hitchin::{hitchin_check, hitchin_split, HitchinSplit};
pub use monge_ampere::{evolve_monge_ampere, kahler_form_on_grid, MongeAmpereConfig, MongeAmpereOutcome};
pub use ode1::{ode1_residual, solve_s_of_h};
pub use reduction::{apostolov_salamon_g2, check_reduction_i, check_reduction_ii};
pub use studies::{dude4_study, monge_ampere_study, ConvergenceRow, ConvergenceStudy, Dude4Case, MaCase, ROUNDOFF_FLOOR};

use thiserror::Error;

use crate::catalog::CatalogError;
use crate::exterior::ExteriorError;
use crate::structures::StructureError;

#[derive(Debug, Error)]
pub enum PdeError {
    #[error("no positive root of AH = s^(1/3)(s+c) for A={a}, c={c}, H={h}")]
    Root { a: f64, c: f64, h: f64 },
    #[error("grid: {0}")]
    Grid(String),
    #[error("Kähler positivity lost at step {step}, grid index {index:?}")]
    Positivity { step: usize, index: Vec<usize> },
    #[error("step {step}: dt = {dt:e} exceeds the stability bound {bound:e}")]
    Cfl { step: usize, dt: f64, bound: f64 },
    #[error("u ≤ 0 reached at step {step}, grid index {index:?}")]
    Validity { step: usize, index: Vec<usize> },
    #[error("bad configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

impl From<ExteriorError> for PdeError {
    fn from(e: ExteriorError) -> Self {
        PdeError::Structure(e.into())
    }
}

impl From<crate::fields::FieldError> for PdeError {
    fn from(e: crate::fields::FieldError) -> Self {
        PdeError::Structure(e.into())
    }
}

impl PdeError {
    /// Step index of a solver abort, if this is one.
    pub fn step(&self) -> Option<usize> {
        match self {
            PdeError::Positivity { step, .. } | PdeError::Cfl { step, .. } | PdeError::Validity { step, .. } => Some(*step),
            _ => None,
        }
    }
}
