//! Clarabel adapter: sparse interior-point solves of the lowered conic form.

use super::lowering::{ConeBlock, ConicProblem};
use super::{ConicOutcome, SolveStatus};
use clarabel::algebra::CscMatrix;
use clarabel::solver::{DefaultSettings, DefaultSolver, IPSolver, SolverStatus, SupportedConeT};

pub(crate) fn solve(prob: &ConicProblem) -> ConicOutcome {
    let (colptr, rowval, nzval) = prob.to_csc();
    let a = CscMatrix::new(prob.num_rows, prob.num_vars, colptr, rowval, nzval);
    let p = CscMatrix::<f64>::zeros((prob.num_vars, prob.num_vars));

    let cones: Vec<SupportedConeT<f64>> = prob
        .cones
        .iter()
        .map(|c| match *c {
            ConeBlock::Zero(n) => SupportedConeT::ZeroConeT(n),
            ConeBlock::Nonneg(n) => SupportedConeT::NonnegativeConeT(n),
            ConeBlock::Soc(n) => SupportedConeT::SecondOrderConeT(n),
        })
        .collect();

    let settings = DefaultSettings {
        verbose: false,
        tol_gap_abs: 1e-10,
        tol_gap_rel: 1e-10,
        tol_feas: 1e-10,
        max_iter: 200,
        ..Default::default()
    };

    let mut solver = match DefaultSolver::new(&p, &prob.objective, &a, &prob.rhs, &cones, settings)
    {
        Ok(s) => s,
        Err(e) => {
            return ConicOutcome {
                status: SolveStatus::NumericError,
                primal: Vec::new(),
                dual: Vec::new(),
                objective: f64::NAN,
                message: Some(format!("solver setup failed: {e:?}")),
            }
        }
    };
    solver.solve();

    let sol = &solver.solution;
    let status = match sol.status {
        SolverStatus::Solved | SolverStatus::AlmostSolved => SolveStatus::Optimal,
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
            SolveStatus::Infeasible
        }
        SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => SolveStatus::Unbounded,
        other => {
            return ConicOutcome {
                status: SolveStatus::NumericError,
                primal: Vec::new(),
                dual: Vec::new(),
                objective: f64::NAN,
                message: Some(format!("solver stopped with status {other:?}")),
            }
        }
    };
    let message = if sol.status == SolverStatus::AlmostSolved {
        Some("reduced-accuracy solution".to_string())
    } else {
        None
    };

    ConicOutcome {
        status,
        primal: sol.x.clone(),
        dual: sol.z.clone(),
        objective: sol.obj_val,
        message,
    }
}
