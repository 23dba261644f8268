//! Alternating outer-inner loop: outer MILP for lower bounds, inner conic
//! solve at the outer commitment for upper bounds, cut generation at the
//! outer point with an active-set restriction for capacity cuts, dynamic
//! MIP-gap/time-limit controls and warm starts.

use crate::benders::{benders_cut, solve_time_block};
use crate::cuts::{
    line_capacity_cut, select_violated, soc_cut, CutKey, CutKind, CutOrigin, CutPool,
};
use crate::formulation::{
    build_inner, build_outer_base, cap_residuals, soc_residuals, Dir, FormulationVariant,
    ModelSpec, VariableIndex,
};
use crate::metrics::gap;
use crate::model::{CommitmentSchedule, UcInstance};
use crate::solver::{solve_continuous, solve_mixed, Backend, SolveControls, SolveStatus};
use crate::trace::{RunTrace, Stage, TraceRow};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::Instant;

/// Algorithm parameters; defaults follow the reported configuration
/// (convergence 1e-4, violation tolerance 1e-5, parallel tolerance 0.5e-5,
/// 55% cut selection, 1% initial MIP gap, 200 s initial MILP limit, 5% LP
/// and 1% IG improvement thresholds).
#[derive(Debug, Clone)]
pub struct AlgoParams {
    pub eps: f64,
    pub eps_tol: f64,
    pub eps_par: f64,
    pub p_cut: f64,
    pub mip_gap_init: f64,
    pub solver_time_init: f64,
    pub eps_lp: f64,
    pub eps_ig: f64,
    /// Generators enforced binary per IG round; `None` picks ceil(|G|/4).
    pub k_ig: Option<usize>,
    pub max_iter: usize,
    /// Global wall-clock budget in seconds, distinct from the per-solve
    /// MILP limit.
    pub time_budget: f64,
    pub gap_shrink: f64,
    pub gap_quarter: f64,
    pub time_growth: f64,
    pub threads: usize,
}

impl Default for AlgoParams {
    fn default() -> Self {
        AlgoParams {
            eps: 1e-4,
            eps_tol: 1e-5,
            eps_par: 5e-6,
            p_cut: 0.55,
            mip_gap_init: 0.01,
            solver_time_init: 200.0,
            eps_lp: 0.05,
            eps_ig: 0.01,
            k_ig: None,
            max_iter: 100,
            time_budget: f64::INFINITY,
            gap_shrink: 0.9,
            gap_quarter: 4.0,
            time_growth: 1.1,
            threads: 0,
        }
    }
}

impl AlgoParams {
    pub fn k_ig_for(&self, n_gens: usize) -> usize {
        self.k_ig.unwrap_or_else(|| n_gens.div_ceil(4)).max(1)
    }
}

/// Best feasible solution found so far: the commitment plus the inner
/// model's full assignment (plain, non-epigraph variable space).
#[derive(Debug, Clone)]
pub struct Incumbent {
    pub schedule: CommitmentSchedule,
    pub values: Vec<f64>,
    pub objective: f64,
}

/// Mutable algorithm state carried across stages.
#[derive(Debug)]
pub struct SolverState {
    pub pool: CutPool,
    pub binary_ids: BTreeSet<usize>,
    pub ub: f64,
    pub lb: f64,
    pub incumbent: Option<Incumbent>,
    pub trace: RunTrace,
    pub mip_gap: f64,
    pub solver_time: f64,
    pub iteration: usize,
    pub events: Vec<String>,
    started: Instant,
}

impl SolverState {
    pub fn new(params: &AlgoParams) -> Self {
        SolverState {
            pool: CutPool::new(params.eps_par),
            binary_ids: BTreeSet::new(),
            ub: f64::INFINITY,
            lb: f64::NEG_INFINITY,
            incumbent: None,
            trace: RunTrace::new(),
            mip_gap: params.mip_gap_init,
            solver_time: params.solver_time_init,
            iteration: 0,
            events: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn elapsed(&self) -> f64 {
        self.started.elapsed().as_secs_f64()
    }

    pub(crate) fn record(&mut self, stage: Stage, status: &str) {
        let row = TraceRow {
            iter: self.iteration,
            stage,
            wall_time_s: self.elapsed(),
            lb: self.lb,
            ub: self.ub,
            gap: gap(self.ub, self.lb),
            soc_cuts: self.pool.count(CutKind::Soc),
            cap_cuts: self.pool.count(CutKind::Cap),
            benders_cuts: self.pool.count(CutKind::Benders),
            n_binary: self.binary_ids.len(),
            mip_gap: self.mip_gap,
            solver_limit: self.solver_time,
            status: status.to_string(),
        };
        self.trace.push(row);
    }
}

#[derive(Debug)]
pub enum AlgoError {
    OuterInfeasible {
        stage: Stage,
    },
    OuterFailed {
        message: String,
    },
    /// The method/variant combination is not allowed (Benders cuts need the
    /// slack-backed subproblems of F2/F3).
    BendersNeedsSlacks,
    /// An internal invariant failed; aborting is safer than continuing.
    InvariantViolated {
        message: String,
    },
}

impl fmt::Display for AlgoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgoError::OuterInfeasible { stage } => {
                write!(f, "outer model infeasible in {stage} stage")
            }
            AlgoError::OuterFailed { message } => write!(f, "outer solve failed: {message}"),
            AlgoError::BendersNeedsSlacks => {
                write!(
                    f,
                    "method m4 requires slack variables; use variant f2 or f3"
                )
            }
            AlgoError::InvariantViolated { message } => write!(f, "invariant violated: {message}"),
        }
    }
}

impl std::error::Error for AlgoError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIter,
    TimeBudget,
}

#[derive(Debug, Clone, Copy)]
pub struct OiaOptions {
    pub backend: Backend,
    pub benders: bool,
}

/// MIP-gap and time-limit schedule: the gap shrinks geometrically and chases
/// a quarter of the current relative gap, floored at eps/10 to keep solves
/// well posed; the time limit grows geometrically. An infinite or
/// nonpositive upper bound leaves the gap untouched.
pub fn update_controls(
    mip_gap: f64,
    solver_time: f64,
    ub: f64,
    lb: f64,
    params: &AlgoParams,
) -> (f64, f64) {
    let grown = params.time_growth * solver_time;
    if !ub.is_finite() || ub <= 0.0 {
        return (mip_gap, grown);
    }
    let chased = (ub - lb) / (params.gap_quarter * ub);
    let next = (params.gap_shrink * mip_gap)
        .min(chased)
        .max(params.eps / 10.0);
    (next, grown)
}

/// Directed line-periods whose capacity constraint is within `eps_tol` of
/// binding (or violated) at an assignment, usually the inner solution.
pub fn active_capacity_keys(
    inst: &UcInstance,
    index: &VariableIndex,
    vals: &[f64],
    eps_tol: f64,
) -> BTreeSet<(usize, Dir, usize)> {
    cap_residuals(inst, index, vals)
        .into_iter()
        .filter(|&(_, r)| r >= -eps_tol)
        .map(|(k, _)| k)
        .collect()
}

/// One alternating outer-inner run at full integrality. Stage handoff comes
/// through `state` (cut pool, bounds, controls); `state.binary_ids` is reset
/// to the whole commitment partition.
pub fn run_oia(
    state: &mut SolverState,
    inst: &UcInstance,
    variant: FormulationVariant,
    params: &AlgoParams,
    opts: &OiaOptions,
) -> Result<Termination, AlgoError> {
    if opts.benders && variant == FormulationVariant::F1 {
        return Err(AlgoError::BendersNeedsSlacks);
    }
    let epigraph = opts.benders;
    let base = build_outer_base(inst, variant, epigraph);
    let plain_index = VariableIndex::new(inst, false);
    state.binary_ids = (0..base.index.x_len()).collect();

    // first outer MILP
    let mut schedule = solve_outer(state, &base, inst, params, opts)?;

    let mut iters = 0usize;
    while gap(state.ub, state.lb) > params.eps {
        if iters >= params.max_iter {
            return Ok(Termination::MaxIter);
        }
        if state.elapsed() > params.time_budget {
            return Ok(Termination::TimeBudget);
        }
        iters += 1;
        state.iteration += 1;

        // inner conic solve at the outer commitment
        let (outer_vals, inner_ok) = {
            let outer_vals = schedule.1.clone();
            let inner = match build_inner(inst, &schedule.0, variant) {
                Ok(spec) => spec,
                Err(e) => {
                    return Err(AlgoError::InvariantViolated {
                        message: format!("outer solution fails the commitment check: {e}"),
                    })
                }
            };
            match solve_continuous(&inner, opts.backend) {
                Ok(out) if out.status == SolveStatus::Optimal => {
                    let values = out.primal.expect("optimal inner solve has a primal");
                    if out.objective < state.ub {
                        state.ub = out.objective;
                        state.incumbent = Some(Incumbent {
                            schedule: schedule.0.clone(),
                            values: values.clone(),
                            objective: out.objective,
                        });
                    }
                    (outer_vals, Some(values))
                }
                Ok(out) => {
                    state.events.push(format!(
                        "iter {}: inner solve {}",
                        state.iteration, out.status
                    ));
                    (outer_vals, None)
                }
                Err(e) => {
                    state
                        .events
                        .push(format!("iter {}: inner solve error {e}", state.iteration));
                    (outer_vals, None)
                }
            }
        };

        // cone cuts at the outer point over all constraints
        let soc_res = soc_residuals(inst, &base.index, &outer_vals);
        for key in select_violated(&soc_res, params.eps_tol, params.p_cut) {
            let (li, t) = key;
            let cone = find_soc_ids(&base.index, inst, li, t);
            let origin = CutOrigin {
                key: CutKey::Line { line: li, t },
                iteration: state.iteration,
                stage: Stage::Oia,
            };
            let cut = soc_cut(
                outer_vals[cone.0],
                outer_vals[cone.1],
                outer_vals[cone.2],
                outer_vals[cone.3],
                cone,
                origin,
            )
            .expect("selected keys are violated");
            state.pool.try_add(cut);
        }

        // capacity cuts at the outer point, restricted to lines active at
        // the inner point
        if let Some(inner_vals) = &inner_ok {
            let active = active_capacity_keys(inst, &plain_index, inner_vals, params.eps_tol);
            let outer_cap = cap_residuals(inst, &base.index, &outer_vals);
            let restricted: BTreeMap<_, _> = outer_cap
                .into_iter()
                .filter(|(k, _)| active.contains(k))
                .collect();
            for key in select_violated(&restricted, params.eps_tol, params.p_cut) {
                let (li, dir, t) = key;
                let ids = (base.index.flow_p(li, dir, t), base.index.flow_q(li, dir, t));
                let origin = CutOrigin {
                    key: CutKey::DirectedLine { line: li, dir, t },
                    iteration: state.iteration,
                    stage: Stage::Oia,
                };
                let cut = line_capacity_cut(
                    outer_vals[ids.0],
                    outer_vals[ids.1],
                    inst.lines[li].s_max,
                    ids,
                    origin,
                )
                .expect("selected keys are violated");
                state.pool.try_add(cut);
            }

            // time-block Benders cuts from the inner dispatch
            if opts.benders {
                add_benders_cuts(state, inst, variant, &base.index, inner_vals, opts.backend);
            }
        }

        let controls =
            update_controls(state.mip_gap, state.solver_time, state.ub, state.lb, params);
        state.mip_gap = controls.0;
        state.solver_time = controls.1;

        schedule = solve_outer(state, &base, inst, params, opts)?;
    }
    Ok(Termination::Converged)
}

/// One per-period Benders cut from the inner solution's injections.
/// Subproblems are independent and solved in parallel when enabled; pool
/// insertion stays in period order for determinism.
fn add_benders_cuts(
    state: &mut SolverState,
    inst: &UcInstance,
    variant: FormulationVariant,
    outer_index: &VariableIndex,
    inner_vals: &[f64],
    backend: Backend,
) {
    let plain = VariableIndex::new(inst, false);
    let anchors: Vec<Vec<f64>> = (0..inst.horizon)
        .map(|t| {
            (0..inst.n_gens())
                .map(|g| inner_vals[plain.p(g, t)])
                .collect()
        })
        .collect();

    let solve_t = |t: usize| solve_time_block(inst, variant, t, &anchors[t], backend);
    #[cfg(feature = "parallel")]
    let duals: Vec<_> = {
        use rayon::prelude::*;
        (0..inst.horizon).into_par_iter().map(solve_t).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let duals: Vec<_> = (0..inst.horizon).map(solve_t).collect();

    for dual in duals {
        match dual {
            Ok(d) => {
                state
                    .pool
                    .try_add(benders_cut(&d, outer_index, state.iteration));
            }
            Err(e) => state.events.push(format!("iter {}: {e}", state.iteration)),
        }
    }
}

fn find_soc_ids(
    ix: &VariableIndex,
    inst: &UcInstance,
    line: usize,
    t: usize,
) -> (usize, usize, usize, usize) {
    let bus_idx = inst.bus_index();
    let l = &inst.lines[line];
    (
        ix.c_off(line, t),
        ix.s_off(line, t),
        ix.c_diag(bus_idx[l.from.as_str()], t),
        ix.c_diag(bus_idx[l.to.as_str()], t),
    )
}

/// Solves the outer MILP with the pooled cuts, warm-started from the
/// incumbent, updates the running lower bound and returns the rounded
/// commitment with the primal values.
fn solve_outer(
    state: &mut SolverState,
    base: &ModelSpec,
    inst: &UcInstance,
    params: &AlgoParams,
    opts: &OiaOptions,
) -> Result<(CommitmentSchedule, Vec<f64>), AlgoError> {
    let mut spec = base.clone();
    for cut in state.pool.cuts() {
        spec.rows.push(cut.to_row());
    }

    let warm = state.incumbent.as_ref().map(|inc| {
        let vals = extend_to_outer(base, inst, inc);
        // valid cuts never exclude an inner-feasible point; measured as a
        // hyperplane distance so penalty-scaled cuts do not amplify solver
        // noise
        let worst = state.pool.max_distance_violation(&vals);
        (vals, worst)
    });
    if let Some((_, worst)) = &warm {
        if *worst > 1e-7 {
            return Err(AlgoError::InvariantViolated {
                message: format!("incumbent violates the cut pool by {worst:.3e}"),
            });
        }
    }

    let controls = SolveControls {
        mip_gap: state.mip_gap,
        time_limit: state.solver_time,
        warm_start: warm.map(|(v, _)| v),
        threads: params.threads,
    };
    let out = solve_mixed(&spec, &controls, opts.backend).map_err(|e| AlgoError::OuterFailed {
        message: e.to_string(),
    })?;

    match out.status {
        SolveStatus::Infeasible => return Err(AlgoError::OuterInfeasible { stage: Stage::Oia }),
        SolveStatus::Optimal | SolveStatus::GapReached | SolveStatus::TimeLimit => {}
        other => {
            return Err(AlgoError::OuterFailed {
                message: format!("outer solve status {other}"),
            })
        }
    }
    state.lb = state.lb.max(out.dual_bound);
    // an incumbent-less time limit leaves nothing to fix the commitment to
    let primal = out.primal.ok_or_else(|| AlgoError::OuterFailed {
        message: "outer MILP hit its limit without an incumbent".into(),
    })?;
    let schedule = extract_schedule(&base.index, inst, &primal)?;
    state.record(Stage::Oia, &out.status.to_string());
    Ok((schedule, primal))
}

/// Incumbent values live in the plain variable space; the outer model may
/// carry epigraph variables after them. The shared prefix has identical ids
/// by construction, so extension only appends the per-period epigraph values
/// implied by the linking rows.
fn extend_to_outer(base: &ModelSpec, inst: &UcInstance, inc: &Incumbent) -> Vec<f64> {
    let mut vals = inc.values.clone();
    if base.index.epigraph {
        let penalty = inst.penalty_cost();
        let plain = VariableIndex::new(inst, false);
        debug_assert_eq!(base.index.num_vars(), plain.num_vars() + inst.horizon);
        for t in 0..inst.horizon {
            let mut psi = 0.0;
            for (g, gen) in inst.generators.iter().enumerate() {
                psi += gen.cost_variable * inc.values[plain.p(g, t)];
            }
            for n in 0..inst.n_buses() {
                psi += penalty
                    * (inc.values[plain.p_unserved(n, t)]
                        + inc.values[plain.q_unserved(n, t)]
                        + inc.values[plain.p_over(n, t)]
                        + inc.values[plain.q_over(n, t)]);
            }
            vals.push(psi);
        }
    }
    vals
}

fn extract_schedule(
    ix: &VariableIndex,
    inst: &UcInstance,
    primal: &[f64],
) -> Result<CommitmentSchedule, AlgoError> {
    let mut u = vec![vec![0u8; inst.horizon]; inst.n_gens()];
    let mut y = u.clone();
    let mut z = u.clone();
    for g in 0..inst.n_gens() {
        for t in 0..inst.horizon {
            for (arr, id) in [
                (&mut u, ix.u(g, t)),
                (&mut y, ix.y(g, t)),
                (&mut z, ix.z(g, t)),
            ] {
                let v = primal[id];
                if (v - v.round()).abs() > 1e-5 {
                    return Err(AlgoError::OuterFailed {
                        message: format!("fractional commitment value {v} in a MILP solution"),
                    });
                }
                arr[g][t] = v.round() as u8;
            }
        }
    }
    Ok(CommitmentSchedule { u, y, z })
}
