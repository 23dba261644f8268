//! Run-quality measurements: relative gap, relative optimality gap, maximum
//! constraint violation and milestone crossing times.

use crate::formulation::{build_misocp, FormulationVariant};
use crate::model::UcInstance;
use crate::trace::RunTrace;
use serde::Serialize;

/// Relative gap (UB - LB) / UB. Infinite UB gives an infinite gap; the
/// all-zero UB = LB = 0 case counts as closed.
pub fn gap(ub: f64, lb: f64) -> f64 {
    if ub == 0.0 && lb == 0.0 {
        return 0.0;
    }
    if ub.is_infinite() {
        return f64::INFINITY;
    }
    (ub - lb) / ub
}

/// Relative optimality gap (UB - obj*) / UB; tiny negative values from
/// solver noise are clamped to zero.
pub fn optg(ub: f64, obj_star: f64) -> f64 {
    if ub.is_infinite() {
        return f64::INFINITY;
    }
    if ub == 0.0 && obj_star == 0.0 {
        return 0.0;
    }
    let v = (ub - obj_star) / ub;
    if (-1e-9..0.0).contains(&v) {
        0.0
    } else {
        v
    }
}

/// Maximum violation of any original constraint (commitment, dispatch,
/// network, balance, both nonlinear families and variable bounds) at a full
/// primal assignment, recomputed from the instance rather than trusting the
/// solver. Zero when feasible.
pub fn violation(inst: &UcInstance, variant: FormulationVariant, solution: &[f64]) -> f64 {
    let spec = build_misocp(inst, variant);
    assert_eq!(
        solution.len(),
        spec.num_vars(),
        "assignment length {} does not match model {}",
        solution.len(),
        spec.num_vars()
    );
    spec.max_violation(solution)
}

/// First wall-clock times at which the run crossed the reporting thresholds:
/// gap below 1% and 0.1%, optimality gap below 0.1% and below `eps`
/// ("reaching the optimum" in floating point). `None` means never crossed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Milestones {
    #[serde(rename = "Gap-1")]
    pub gap_1: Option<f64>,
    #[serde(rename = "Gap-0.1")]
    pub gap_01: Option<f64>,
    #[serde(rename = "OptG-0.1")]
    pub optg_01: Option<f64>,
    #[serde(rename = "OptG-0")]
    pub optg_0: Option<f64>,
}

pub fn milestones(trace: &RunTrace, obj_star: Option<f64>, eps: f64) -> Milestones {
    let mut out = Milestones {
        gap_1: None,
        gap_01: None,
        optg_01: None,
        optg_0: None,
    };
    for row in trace.rows() {
        let g = gap(row.ub, row.lb);
        if g <= 0.01 && out.gap_1.is_none() {
            out.gap_1 = Some(row.wall_time_s);
        }
        if g <= 0.001 && out.gap_01.is_none() {
            out.gap_01 = Some(row.wall_time_s);
        }
        if let Some(star) = obj_star {
            let o = optg(row.ub, star);
            if o <= 0.001 && out.optg_01.is_none() {
                out.optg_01 = Some(row.wall_time_s);
            }
            if o <= eps && out.optg_0.is_none() {
                out.optg_0 = Some(row.wall_time_s);
            }
        }
    }
    out
}
