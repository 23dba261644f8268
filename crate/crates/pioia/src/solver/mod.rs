//! Uniform solving contract over the continuous conic engines and the
//! branch-and-bound mixed-integer layer.
//!
//! Two engines sit behind [`Backend`]: Clarabel (sparse interior point, the
//! default) and Totsu (first-order, used for cross-checking). Both consume
//! the same conic lowering of a [`ModelSpec`]. Mixed-integer solves run an
//! own branch-and-bound over the continuous relaxations, honoring a relative
//! MIP gap, a wall-clock limit and an optional warm start.

mod branch_bound;
mod clarabel_backend;
mod lowering;
mod totsu_backend;

pub use branch_bound::solve_mixed;
pub use lowering::{ConeBlock, ConicProblem};

use crate::formulation::ModelSpec;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    #[default]
    Clarabel,
    Totsu,
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "clarabel" => Ok(Backend::Clarabel),
            "totsu" => Ok(Backend::Totsu),
            other => Err(format!(
                "unknown backend '{other}' (expected clarabel or totsu)"
            )),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Clarabel => write!(f, "clarabel"),
            Backend::Totsu => write!(f, "totsu"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    GapReached,
    TimeLimit,
    Infeasible,
    Unbounded,
    NumericError,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::GapReached => "gap_reached",
            SolveStatus::TimeLimit => "time_limit",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::NumericError => "numeric_error",
        };
        write!(f, "{s}")
    }
}

/// Controls for mixed-integer solves.
#[derive(Debug, Clone)]
pub struct SolveControls {
    /// Relative MIP gap at which the solve may stop.
    pub mip_gap: f64,
    /// Wall-clock limit in seconds.
    pub time_limit: f64,
    /// Full primal assignment used as the initial incumbent when feasible.
    pub warm_start: Option<Vec<f64>>,
    /// Advisory thread count; the branch-and-bound itself is sequential.
    pub threads: usize,
}

impl Default for SolveControls {
    fn default() -> Self {
        SolveControls {
            mip_gap: 0.0,
            time_limit: f64::INFINITY,
            warm_start: None,
            threads: 1,
        }
    }
}

/// Result of a continuous or mixed solve.
///
/// For minimization `dual_bound <= objective` whenever both are finite;
/// `duals` (one value per spec row, sign convention dV/d(rhs)) are present
/// only for converged continuous solves.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub primal: Option<Vec<f64>>,
    pub objective: f64,
    pub dual_bound: f64,
    pub duals: Option<Vec<f64>>,
    pub warnings: Vec<String>,
}

#[derive(Debug)]
pub enum BackendError {
    /// Model violates a precondition of the requested solve.
    InvalidModel(String),
    /// The integrality set contains ids outside the commitment partition.
    InvalidIntegralitySet { bad_id: usize },
}

impl fmt::Display for BackendError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BackendError::InvalidModel(m) => write!(f, "invalid model: {m}"),
            BackendError::InvalidIntegralitySet { bad_id } => {
                write!(f, "integrality set contains non-commitment id {bad_id}")
            }
        }
    }
}

impl std::error::Error for BackendError {}

/// Returns a copy of the spec whose integrality set is exactly `binary_ids`.
/// An empty set yields the continuous relaxation; the full commitment
/// partition yields the original MILP.
pub fn restrict_integrality(
    spec: &ModelSpec,
    binary_ids: impl IntoIterator<Item = usize>,
) -> Result<ModelSpec, BackendError> {
    let mut out = spec.clone();
    out.integrality.clear();
    for id in binary_ids {
        if !spec.index.is_x(id) {
            return Err(BackendError::InvalidIntegralitySet { bad_id: id });
        }
        out.integrality.insert(id);
    }
    Ok(out)
}

/// Solves a spec as a continuous LP/SOCP, ignoring nothing: the integrality
/// set must be empty (relax explicitly via [`restrict_integrality`]).
pub fn solve_continuous(spec: &ModelSpec, backend: Backend) -> Result<SolveOutcome, BackendError> {
    if !spec.integrality.is_empty() {
        return Err(BackendError::InvalidModel(
            "continuous solve on a spec with integrality; relax it first".into(),
        ));
    }
    Ok(solve_relaxation(spec, backend))
}

/// Continuous solve that silently drops integrality; shared by the public
/// continuous path and the branch-and-bound node solver.
pub(crate) fn solve_relaxation(spec: &ModelSpec, backend: Backend) -> SolveOutcome {
    let prob = lowering::lower(spec);
    let conic = match backend {
        Backend::Clarabel => clarabel_backend::solve(&prob),
        Backend::Totsu => totsu_backend::solve(&prob),
    };
    let mut warnings = Vec::new();
    if let Some(msg) = conic.message {
        warnings.push(msg);
    }
    match conic.status {
        SolveStatus::Optimal => {
            let duals = prob.map_duals(&conic.dual);
            SolveOutcome {
                status: SolveStatus::Optimal,
                objective: conic.objective,
                dual_bound: conic.objective,
                primal: Some(conic.primal),
                duals: Some(duals),
                warnings,
            }
        }
        SolveStatus::Infeasible => SolveOutcome {
            status: SolveStatus::Infeasible,
            objective: f64::INFINITY,
            dual_bound: f64::INFINITY,
            primal: None,
            duals: None,
            warnings,
        },
        SolveStatus::Unbounded => SolveOutcome {
            status: SolveStatus::Unbounded,
            objective: f64::NEG_INFINITY,
            dual_bound: f64::NEG_INFINITY,
            primal: None,
            duals: None,
            warnings,
        },
        _ => SolveOutcome {
            status: SolveStatus::NumericError,
            objective: f64::NAN,
            dual_bound: f64::NEG_INFINITY,
            primal: None,
            duals: None,
            warnings,
        },
    }
}

/// Raw result of one conic engine call.
pub(crate) struct ConicOutcome {
    pub status: SolveStatus,
    pub primal: Vec<f64>,
    pub dual: Vec<f64>,
    pub objective: f64,
    pub message: Option<String>,
}
