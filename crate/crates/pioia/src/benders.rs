//! Time-block Benders machinery: per-period convex subproblems, dual
//! extraction on the coupling rows and optimality cuts on the epigraph
//! variables.
//!
//! The subproblem for period t keeps only that period's network, balance and
//! slack constraints, fixes the active injections to the anchor through
//! coupling equalities and relaxes reactive output to its full range
//! (commitment-free). Its value function is therefore a convex relaxation of
//! the true recourse in the injections alone, which keeps the subgradient
//! cuts globally valid in the outer model.

use crate::cuts::{Cut, CutKey, CutOrigin};
use crate::formulation::{
    balance_rows, network_rows, ConeRow, FormulationVariant, LinearRow, ModelSpec, RowSense,
    RowTag, VariableIndex, DIRS,
};
use crate::model::{Load, UcInstance};
use crate::solver::{solve_continuous, Backend, SolveStatus};
use crate::trace::Stage;
use std::fmt;

/// Value and sensitivity of one period's recourse at a fixed injection.
#[derive(Debug, Clone)]
pub struct TimeBlockDual {
    /// 0-based period.
    pub t: usize,
    /// Subproblem optimal value.
    pub psi_star: f64,
    /// Dual of the coupling row per generator: d psi / d anchor.
    pub pi_star: Vec<f64>,
    /// Injections the subproblem was anchored at.
    pub p_anchor: Vec<f64>,
}

#[derive(Debug)]
pub enum BendersError {
    /// Subproblem reported infeasible (possible under F1/F2 for injections
    /// the network cannot absorb).
    Infeasible {
        t: usize,
    },
    Numeric {
        t: usize,
        message: String,
    },
}

impl fmt::Display for BendersError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BendersError::Infeasible { t } => write!(f, "period {} subproblem infeasible", t + 1),
            BendersError::Numeric { t, message } => {
                write!(f, "period {} subproblem failed: {message}", t + 1)
            }
        }
    }
}

impl std::error::Error for BendersError {}

/// Single-period instance view used to index the subproblem variables.
fn period_view(inst: &UcInstance, t: usize) -> UcInstance {
    let loads = inst
        .loads
        .iter()
        .filter(|l| l.t == t + 1)
        .map(|l| Load {
            bus: l.bus.clone(),
            t: 1,
            p: l.p,
            q: l.q,
        })
        .collect();
    UcInstance {
        base_mva: inst.base_mva,
        horizon: 1,
        buses: inst.buses.clone(),
        lines: inst.lines.clone(),
        generators: inst.generators.clone(),
        loads,
        reserves: Vec::new(),
        penalty: inst.penalty,
    }
}

/// Builds the period-t subproblem: balance, flow-definition, slack and cone
/// constraints with `p` pinned to the anchor and `q` free in its full range.
fn build_time_block(
    inst: &UcInstance,
    variant: FormulationVariant,
    t: usize,
    p_anchor: &[f64],
) -> (ModelSpec, UcInstance) {
    assert_eq!(
        p_anchor.len(),
        inst.n_gens(),
        "anchor must cover all generators"
    );
    let view = period_view(inst, t);
    let ix = VariableIndex::new(&view, false);
    let loads = view.load_matrix();
    let penalty = view.penalty_cost();

    let mut bounds = vec![(f64::NEG_INFINITY, f64::INFINITY); ix.num_vars()];
    // commitment and headroom variables exist in the layout but play no role
    for g in 0..view.n_gens() {
        bounds[ix.u(g, 0)] = (0.0, 0.0);
        bounds[ix.y(g, 0)] = (0.0, 0.0);
        bounds[ix.z(g, 0)] = (0.0, 0.0);
        bounds[ix.p_bar(g, 0)] = (0.0, 0.0);
        let gen = &view.generators[g];
        bounds[ix.q(g, 0)] = (gen.q_min, gen.q_max);
    }
    let bus_idx = view.bus_index();
    for (li, line) in view.lines.iter().enumerate() {
        let bn = &view.buses[bus_idx[line.from.as_str()]];
        let bm = &view.buses[bus_idx[line.to.as_str()]];
        let lim = bn.v_max * bm.v_max;
        bounds[ix.c_off(li, 0)] = (-lim, lim);
        bounds[ix.s_off(li, 0)] = (-lim, lim);
    }
    for (ni, bus) in view.buses.iter().enumerate() {
        bounds[ix.c_diag(ni, 0)] = (bus.v_min * bus.v_min, bus.v_max * bus.v_max);
        let (pd, qd) = loads[ni][0];
        bounds[ix.p_unserved(ni, 0)] = if variant.fixes_unserved() {
            (0.0, 0.0)
        } else {
            (0.0, pd)
        };
        bounds[ix.q_unserved(ni, 0)] = if variant.fixes_unserved() {
            (0.0, 0.0)
        } else {
            (0.0, qd)
        };
        let over = if variant.fixes_over() {
            (0.0, 0.0)
        } else {
            (0.0, f64::INFINITY)
        };
        bounds[ix.p_over(ni, 0)] = over;
        bounds[ix.q_over(ni, 0)] = over;
    }

    let mut rows = Vec::new();
    for (g, &anchor) in p_anchor.iter().enumerate() {
        rows.push(LinearRow {
            coeffs: vec![(ix.p(g, 0), 1.0)],
            sense: RowSense::Eq,
            rhs: anchor,
            tag: RowTag::Coupling { gen: g },
        });
    }
    network_rows(&view, &ix, &mut rows);
    balance_rows(&view, &ix, &loads, &mut rows);

    let mut cones = Vec::new();
    for (li, line) in view.lines.iter().enumerate() {
        let n = bus_idx[line.from.as_str()];
        let m = bus_idx[line.to.as_str()];
        cones.push(ConeRow::Soc {
            c_off: ix.c_off(li, 0),
            s_off: ix.s_off(li, 0),
            c_from: ix.c_diag(n, 0),
            c_to: ix.c_diag(m, 0),
            line: li,
            t: 0,
        });
        for dir in DIRS {
            cones.push(ConeRow::Cap {
                p: ix.flow_p(li, dir, 0),
                q: ix.flow_q(li, dir, 0),
                s_max: line.s_max,
                line: li,
                dir,
                t: 0,
            });
        }
    }

    let mut objective = vec![0.0; ix.num_vars()];
    for (g, gen) in view.generators.iter().enumerate() {
        objective[ix.p(g, 0)] = gen.cost_variable;
    }
    for n in 0..view.n_buses() {
        objective[ix.p_unserved(n, 0)] = penalty;
        objective[ix.q_unserved(n, 0)] = penalty;
        objective[ix.p_over(n, 0)] = penalty;
        objective[ix.q_over(n, 0)] = penalty;
    }

    let spec = ModelSpec {
        index: ix,
        bounds,
        integrality: Default::default(),
        rows,
        cones,
        objective,
    };
    (spec, view)
}

/// Solves the period-t subproblem at an injection anchor, returning its
/// value and the coupling duals.
pub fn solve_time_block(
    inst: &UcInstance,
    variant: FormulationVariant,
    t: usize,
    p_anchor: &[f64],
    backend: Backend,
) -> Result<TimeBlockDual, BendersError> {
    let (spec, _view) = build_time_block(inst, variant, t, p_anchor);
    let out = solve_continuous(&spec, backend).map_err(|e| BendersError::Numeric {
        t,
        message: e.to_string(),
    })?;
    match out.status {
        SolveStatus::Optimal => {
            let duals = out.duals.expect("continuous optimal solve has duals");
            // coupling rows were pushed first, one per generator
            let pi_star = duals[..inst.n_gens()].to_vec();
            Ok(TimeBlockDual {
                t,
                psi_star: out.objective,
                pi_star,
                p_anchor: p_anchor.to_vec(),
            })
        }
        SolveStatus::Infeasible => Err(BendersError::Infeasible { t }),
        other => Err(BendersError::Numeric {
            t,
            message: format!("solver status {other}"),
        }),
    }
}

/// Optimality cut `psi_t >= psi* + pi*ᵀ (p_{.,t} - p*)` over the epigraph
/// model's ids, rearranged to the pool's `<=` convention. Tight at the
/// anchor by construction.
pub fn benders_cut(dual: &TimeBlockDual, index: &VariableIndex, iteration: usize) -> Cut {
    assert!(
        index.epigraph,
        "Benders cuts require an epigraph outer model"
    );
    let mut coeffs = Vec::with_capacity(dual.pi_star.len() + 1);
    let mut rhs = -dual.psi_star;
    for (g, &pi) in dual.pi_star.iter().enumerate() {
        coeffs.push((index.p(g, dual.t), pi));
        rhs += pi * dual.p_anchor[g];
    }
    coeffs.push((index.psi(dual.t), -1.0));
    Cut::new_benders(
        coeffs,
        rhs,
        CutOrigin {
            key: CutKey::Period { t: dual.t },
            iteration,
            stage: Stage::Oia,
        },
    )
}
