//! Row-by-row assembly of the SOC-NCUC model.

use super::vars::{Dir, VariableIndex};
use super::{
    ConeRow, FormulationError, FormulationVariant, LinearRow, ModelSpec, RowSense, RowTag,
};
use crate::model::{CommitmentSchedule, GenKind, UcInstance};

/// Builds the outer linear base: all linear constraints, full integrality on
/// the commitment partition and no cone rows. With `epigraph` set, the
/// per-period dispatch and penalty costs are replaced by epigraph variables
/// psi_t with linking rows, leaving the optimal value unchanged until cuts on
/// psi are added.
pub fn build_outer_base(
    inst: &UcInstance,
    variant: FormulationVariant,
    epigraph: bool,
) -> ModelSpec {
    let mut spec = assemble(inst, variant, epigraph);
    spec.integrality = (0..spec.index.x_len()).collect();
    spec
}

/// Builds the original mixed-integer conic problem: all linear constraints,
/// both cone families, full integrality.
pub fn build_misocp(inst: &UcInstance, variant: FormulationVariant) -> ModelSpec {
    let mut spec = assemble(inst, variant, false);
    add_cones(inst, &mut spec);
    spec.integrality = (0..spec.index.x_len()).collect();
    spec
}

/// Builds the convex inner restriction at a fixed commitment: cone rows
/// present, commitment variables pinned, no integrality. The commitment is
/// checked against the commitment constraints first and rejected with the
/// violated rule named.
pub fn build_inner(
    inst: &UcInstance,
    schedule: &CommitmentSchedule,
    variant: FormulationVariant,
) -> Result<ModelSpec, FormulationError> {
    check_commitment(inst, schedule)?;
    let mut spec = assemble(inst, variant, false);
    add_cones(inst, &mut spec);
    let ix = spec.index.clone();
    for g in 0..inst.n_gens() {
        for t in 0..inst.horizon {
            spec.fix_var(ix.u(g, t), schedule.u[g][t] as f64);
            spec.fix_var(ix.y(g, t), schedule.y[g][t] as f64);
            spec.fix_var(ix.z(g, t), schedule.z[g][t] as f64);
        }
    }
    spec.integrality.clear();
    Ok(spec)
}

/// Evaluates the commitment constraint rows at a schedule; the first violated
/// rule is reported by name. Values are exact binaries, so any violation
/// beyond rounding noise is real.
pub fn check_commitment(
    inst: &UcInstance,
    schedule: &CommitmentSchedule,
) -> Result<(), FormulationError> {
    let g = inst.n_gens();
    let t = inst.horizon;
    if schedule.u.len() != g
        || schedule.u.iter().any(|r| r.len() != t)
        || schedule.y.len() != g
        || schedule.z.len() != g
    {
        return Err(FormulationError::DimensionMismatch {
            expected: (g, t),
            got: (schedule.u.len(), schedule.u.first().map_or(0, |r| r.len())),
        });
    }
    let ix = VariableIndex::new(inst, false);
    let mut vals = vec![0.0; ix.num_vars()];
    for gi in 0..g {
        for ti in 0..t {
            vals[ix.u(gi, ti)] = schedule.u[gi][ti] as f64;
            vals[ix.y(gi, ti)] = schedule.y[gi][ti] as f64;
            vals[ix.z(gi, ti)] = schedule.z[gi][ti] as f64;
        }
    }
    let mut rows = Vec::new();
    commitment_rows(inst, &ix, &mut rows);
    for row in &rows {
        let v = row.violation(&vals);
        if v > 1e-9 {
            return Err(FormulationError::InfeasibleCommitment {
                rule: row.tag.to_string(),
                violation: v,
            });
        }
    }
    Ok(())
}

fn assemble(inst: &UcInstance, variant: FormulationVariant, epigraph: bool) -> ModelSpec {
    let ix = VariableIndex::new(inst, epigraph);
    let t_max = inst.horizon;
    let loads = inst.load_matrix();
    let penalty = inst.penalty_cost();

    let mut bounds = vec![(f64::NEG_INFINITY, f64::INFINITY); ix.num_vars()];
    for g in 0..inst.n_gens() {
        for t in 0..t_max {
            bounds[ix.u(g, t)] = (0.0, 1.0);
            bounds[ix.y(g, t)] = (0.0, 1.0);
            bounds[ix.z(g, t)] = (0.0, 1.0);
        }
    }
    let bus_idx = inst.bus_index();
    for (li, line) in inst.lines.iter().enumerate() {
        let bn = &inst.buses[bus_idx[line.from.as_str()]];
        let bm = &inst.buses[bus_idx[line.to.as_str()]];
        let lim = bn.v_max * bm.v_max;
        for t in 0..t_max {
            bounds[ix.c_off(li, t)] = (-lim, lim);
            bounds[ix.s_off(li, t)] = (-lim, lim);
        }
    }
    for (ni, bus) in inst.buses.iter().enumerate() {
        for t in 0..t_max {
            bounds[ix.c_diag(ni, t)] = (bus.v_min * bus.v_min, bus.v_max * bus.v_max);
            let (pd, qd) = loads[ni][t];
            bounds[ix.p_unserved(ni, t)] = if variant.fixes_unserved() {
                (0.0, 0.0)
            } else {
                (0.0, pd)
            };
            bounds[ix.q_unserved(ni, t)] = if variant.fixes_unserved() {
                (0.0, 0.0)
            } else {
                (0.0, qd)
            };
            let over = if variant.fixes_over() {
                (0.0, 0.0)
            } else {
                (0.0, f64::INFINITY)
            };
            bounds[ix.p_over(ni, t)] = over;
            bounds[ix.q_over(ni, t)] = over;
        }
    }

    let mut rows = Vec::new();
    commitment_rows(inst, &ix, &mut rows);
    dispatch_rows(inst, &ix, &mut rows);
    network_rows(inst, &ix, &mut rows);
    balance_rows(inst, &ix, &loads, &mut rows);

    let mut objective = vec![0.0; ix.num_vars()];
    for (g, gen) in inst.generators.iter().enumerate() {
        for t in 0..t_max {
            objective[ix.u(g, t)] = gen.cost_fixed;
            objective[ix.y(g, t)] = gen.cost_startup;
            objective[ix.z(g, t)] = gen.cost_shutdown;
        }
    }
    if epigraph {
        for t in 0..t_max {
            objective[ix.psi(t)] = 1.0;
            // psi_t >= dispatch + penalty cost of period t
            let mut coeffs = vec![(ix.psi(t), 1.0)];
            for (g, gen) in inst.generators.iter().enumerate() {
                coeffs.push((ix.p(g, t), -gen.cost_variable));
            }
            for n in 0..inst.n_buses() {
                coeffs.push((ix.p_unserved(n, t), -penalty));
                coeffs.push((ix.q_unserved(n, t), -penalty));
                coeffs.push((ix.p_over(n, t), -penalty));
                coeffs.push((ix.q_over(n, t), -penalty));
            }
            rows.push(LinearRow {
                coeffs,
                sense: RowSense::Ge,
                rhs: 0.0,
                tag: RowTag::PsiLink { t },
            });
        }
    } else {
        for (g, gen) in inst.generators.iter().enumerate() {
            for t in 0..t_max {
                objective[ix.p(g, t)] = gen.cost_variable;
            }
        }
        for n in 0..inst.n_buses() {
            for t in 0..t_max {
                objective[ix.p_unserved(n, t)] = penalty;
                objective[ix.q_unserved(n, t)] = penalty;
                objective[ix.p_over(n, t)] = penalty;
                objective[ix.q_over(n, t)] = penalty;
            }
        }
    }

    ModelSpec {
        index: ix,
        bounds,
        integrality: Default::default(),
        rows,
        cones: Vec::new(),
        objective,
    }
}

fn add_cones(inst: &UcInstance, spec: &mut ModelSpec) {
    let ix = &spec.index;
    let bus_idx = inst.bus_index();
    for (li, line) in inst.lines.iter().enumerate() {
        let n = bus_idx[line.from.as_str()];
        let m = bus_idx[line.to.as_str()];
        for t in 0..inst.horizon {
            spec.cones.push(ConeRow::Soc {
                c_off: ix.c_off(li, t),
                s_off: ix.s_off(li, t),
                c_from: ix.c_diag(n, t),
                c_to: ix.c_diag(m, t),
                line: li,
                t,
            });
        }
    }
    for (li, line) in inst.lines.iter().enumerate() {
        for dir in super::DIRS {
            for t in 0..inst.horizon {
                spec.cones.push(ConeRow::Cap {
                    p: ix.flow_p(li, dir, t),
                    q: ix.flow_q(li, dir, t),
                    s_max: line.s_max,
                    line: li,
                    dir,
                    t,
                });
            }
        }
    }
}

/// Commitment logic, initial status and minimum up/down rows.
fn commitment_rows(inst: &UcInstance, ix: &VariableIndex, rows: &mut Vec<LinearRow>) {
    let t_max = inst.horizon as isize;
    for (g, gen) in inst.generators.iter().enumerate() {
        for t in 0..inst.horizon {
            // y - z = u_t - u_{t-1}; u_0 is a constant.
            let (mut coeffs, rhs) = if t == 0 {
                (vec![(ix.u(g, 0), -1.0)], -(gen.u0 as f64))
            } else {
                (vec![(ix.u(g, t), -1.0), (ix.u(g, t - 1), 1.0)], 0.0)
            };
            coeffs.push((ix.y(g, t), 1.0));
            coeffs.push((ix.z(g, t), -1.0));
            rows.push(LinearRow {
                coeffs,
                sense: RowSense::Eq,
                rhs,
                tag: RowTag::Logic { gen: g, t },
            });

            rows.push(LinearRow {
                coeffs: vec![(ix.y(g, t), 1.0), (ix.z(g, t), 1.0)],
                sense: RowSense::Le,
                rhs: 1.0,
                tag: RowTag::Exclusion { gen: g, t },
            });
        }

        if gen.kind != GenKind::Thermal {
            continue;
        }
        let tu = gen.min_up as isize;
        let td = gen.min_down as isize;
        let l0 = gen.init_up_time as isize;
        let f0 = gen.init_down_time as isize;

        if l0 > 0 {
            let upto = l0.min(t_max);
            rows.push(LinearRow {
                coeffs: (0..upto).map(|t| (ix.u(g, t as usize), 1.0)).collect(),
                sense: RowSense::Eq,
                rhs: upto as f64,
                tag: RowTag::InitUp { gen: g },
            });
        }
        if f0 > 0 {
            let upto = f0.min(t_max);
            rows.push(LinearRow {
                coeffs: (0..upto).map(|t| (ix.u(g, t as usize), 1.0)).collect(),
                sense: RowSense::Eq,
                rhs: 0.0,
                tag: RowTag::InitDown { gen: g },
            });
        }
        if tu >= 1 {
            // sum_{t=tt}^{tt+tu-1} u >= tu * y_tt
            for tt in (l0 + 1)..=(t_max - tu + 1) {
                let mut coeffs: Vec<(usize, f64)> = (tt..tt + tu)
                    .map(|t| (ix.u(g, (t - 1) as usize), 1.0))
                    .collect();
                coeffs.push((ix.y(g, (tt - 1) as usize), -(tu as f64)));
                rows.push(LinearRow {
                    coeffs,
                    sense: RowSense::Ge,
                    rhs: 0.0,
                    tag: RowTag::MinUp {
                        gen: g,
                        t: (tt - 1) as usize,
                    },
                });
            }
            // tail: sum_{t=tt}^{T} (u_t - y_t) >= 0
            for tt in (t_max - tu + 2).max(1)..=t_max {
                let mut coeffs = Vec::new();
                for t in tt..=t_max {
                    coeffs.push((ix.u(g, (t - 1) as usize), 1.0));
                    coeffs.push((ix.y(g, (t - 1) as usize), -1.0));
                }
                rows.push(LinearRow {
                    coeffs,
                    sense: RowSense::Ge,
                    rhs: 0.0,
                    tag: RowTag::MinUpTail {
                        gen: g,
                        t: (tt - 1) as usize,
                    },
                });
            }
        }
        if td >= 1 {
            // sum_{t=tt}^{tt+td-1} (1 - u) >= td * z_tt
            for tt in (f0 + 1)..=(t_max - td + 1) {
                let mut coeffs: Vec<(usize, f64)> = (tt..tt + td)
                    .map(|t| (ix.u(g, (t - 1) as usize), -1.0))
                    .collect();
                coeffs.push((ix.z(g, (tt - 1) as usize), -(td as f64)));
                rows.push(LinearRow {
                    coeffs,
                    sense: RowSense::Ge,
                    rhs: -(td as f64),
                    tag: RowTag::MinDown {
                        gen: g,
                        t: (tt - 1) as usize,
                    },
                });
            }
            // tail: sum_{t=tt}^{T} (1 - u_t - z_t) >= 0
            for tt in (t_max - td + 2).max(1)..=t_max {
                let mut coeffs = Vec::new();
                for t in tt..=t_max {
                    coeffs.push((ix.u(g, (t - 1) as usize), -1.0));
                    coeffs.push((ix.z(g, (t - 1) as usize), -1.0));
                }
                rows.push(LinearRow {
                    coeffs,
                    sense: RowSense::Ge,
                    rhs: -((t_max - tt + 1) as f64),
                    tag: RowTag::MinDownTail {
                        gen: g,
                        t: (tt - 1) as usize,
                    },
                });
            }
        }
    }
}

/// Output bounds, ramping and reserve rows.
fn dispatch_rows(inst: &UcInstance, ix: &VariableIndex, rows: &mut Vec<LinearRow>) {
    for (g, gen) in inst.generators.iter().enumerate() {
        for t in 0..inst.horizon {
            rows.push(LinearRow {
                coeffs: vec![(ix.p(g, t), 1.0), (ix.u(g, t), -gen.p_min)],
                sense: RowSense::Ge,
                rhs: 0.0,
                tag: RowTag::PLower { gen: g, t },
            });
            rows.push(LinearRow {
                coeffs: vec![(ix.p(g, t), 1.0), (ix.u(g, t), -gen.p_max)],
                sense: RowSense::Le,
                rhs: 0.0,
                tag: RowTag::PUpper { gen: g, t },
            });
            rows.push(LinearRow {
                coeffs: vec![(ix.p_bar(g, t), 1.0), (ix.p(g, t), -1.0)],
                sense: RowSense::Ge,
                rhs: 0.0,
                tag: RowTag::PBarLower { gen: g, t },
            });
            rows.push(LinearRow {
                coeffs: vec![(ix.p_bar(g, t), 1.0), (ix.u(g, t), -gen.p_max)],
                sense: RowSense::Le,
                rhs: 0.0,
                tag: RowTag::PBarUpper { gen: g, t },
            });
            rows.push(LinearRow {
                coeffs: vec![(ix.q(g, t), 1.0), (ix.u(g, t), -gen.q_min)],
                sense: RowSense::Ge,
                rhs: 0.0,
                tag: RowTag::QLower { gen: g, t },
            });
            rows.push(LinearRow {
                coeffs: vec![(ix.q(g, t), 1.0), (ix.u(g, t), -gen.q_max)],
                sense: RowSense::Le,
                rhs: 0.0,
                tag: RowTag::QUpper { gen: g, t },
            });
        }

        if gen.kind != GenKind::Thermal {
            continue;
        }
        for t in 0..inst.horizon {
            // p_t - p_{t-1} <= RU * u_{t-1} + RSU * y_t, with t = 1 constants.
            let (prev_p, prev_u_rhs): (Option<usize>, f64) = if t == 0 {
                (None, gen.p0 + gen.ramp_up * gen.u0 as f64)
            } else {
                (Some(t - 1), 0.0)
            };
            let mut coeffs = vec![(ix.p(g, t), 1.0), (ix.y(g, t), -gen.ramp_startup)];
            if let Some(tp) = prev_p {
                coeffs.push((ix.p(g, tp), -1.0));
                coeffs.push((ix.u(g, tp), -gen.ramp_up));
            }
            rows.push(LinearRow {
                coeffs,
                sense: RowSense::Le,
                rhs: prev_u_rhs,
                tag: RowTag::RampUp { gen: g, t },
            });

            // pbar_t <= p_{t-1} + RU * u_{t-1} + RSU * y_t
            let mut coeffs = vec![(ix.p_bar(g, t), 1.0), (ix.y(g, t), -gen.ramp_startup)];
            if let Some(tp) = prev_p {
                coeffs.push((ix.p(g, tp), -1.0));
                coeffs.push((ix.u(g, tp), -gen.ramp_up));
            }
            rows.push(LinearRow {
                coeffs,
                sense: RowSense::Le,
                rhs: prev_u_rhs,
                tag: RowTag::RampUpBar { gen: g, t },
            });

            // p_{t-1} - p_t <= RD * u_{t-1} + RSD * z_t
            let mut coeffs = vec![(ix.p(g, t), -1.0), (ix.z(g, t), -gen.ramp_shutdown)];
            let rhs = if t == 0 {
                gen.ramp_down * gen.u0 as f64 - gen.p0
            } else {
                coeffs.push((ix.p(g, t - 1), 1.0));
                coeffs.push((ix.u(g, t - 1), -gen.ramp_down));
                0.0
            };
            rows.push(LinearRow {
                coeffs,
                sense: RowSense::Le,
                rhs,
                tag: RowTag::RampDown { gen: g, t },
            });

            // pbar_t <= pmax * (u_t - z_{t+1}) + RSD * z_{t+1}; z_{T+1} := 0.
            let mut coeffs = vec![(ix.p_bar(g, t), 1.0), (ix.u(g, t), -gen.p_max)];
            if t + 1 < inst.horizon {
                coeffs.push((ix.z(g, t + 1), gen.p_max - gen.ramp_shutdown));
            }
            rows.push(LinearRow {
                coeffs,
                sense: RowSense::Le,
                rhs: 0.0,
                tag: RowTag::ShutdownBar { gen: g, t },
            });
        }
    }

    for (ai, area) in inst.reserve_areas().iter().enumerate() {
        for t in 0..inst.horizon {
            if area.requirement[t] <= 0.0 {
                continue;
            }
            let mut coeffs = Vec::with_capacity(2 * area.members.len());
            for &g in &area.members {
                coeffs.push((ix.p_bar(g, t), 1.0));
                coeffs.push((ix.p(g, t), -1.0));
            }
            rows.push(LinearRow {
                coeffs,
                sense: RowSense::Ge,
                rhs: area.requirement[t],
                tag: RowTag::Reserve { area: ai, t },
            });
        }
    }
}

/// Flow definition rows tying directed flows to the c/s variables. The
/// reverse orientation reuses c_{n,m} and negates s_{n,m}.
pub(crate) fn network_rows(inst: &UcInstance, ix: &VariableIndex, rows: &mut Vec<LinearRow>) {
    let bus_idx = inst.bus_index();
    for (li, line) in inst.lines.iter().enumerate() {
        let n = bus_idx[line.from.as_str()];
        let m = bus_idx[line.to.as_str()];
        let (g, b, bsh) = (line.g, line.b, line.b_shunt);
        for t in 0..inst.horizon {
            let c_nn = ix.c_diag(n, t);
            let c_mm = ix.c_diag(m, t);
            let c_nm = ix.c_off(li, t);
            let s_nm = ix.s_off(li, t);

            // p_nm = -G c_nn + G c_nm - B s_nm
            rows.push(LinearRow {
                coeffs: vec![
                    (ix.flow_p(li, Dir::Forward, t), 1.0),
                    (c_nn, g),
                    (c_nm, -g),
                    (s_nm, b),
                ],
                sense: RowSense::Eq,
                rhs: 0.0,
                tag: RowTag::FlowDefP {
                    line: li,
                    dir: Dir::Forward,
                    t,
                },
            });
            // p_mn = -G c_mm + G c_nm + B s_nm  (s_mn = -s_nm)
            rows.push(LinearRow {
                coeffs: vec![
                    (ix.flow_p(li, Dir::Reverse, t), 1.0),
                    (c_mm, g),
                    (c_nm, -g),
                    (s_nm, -b),
                ],
                sense: RowSense::Eq,
                rhs: 0.0,
                tag: RowTag::FlowDefP {
                    line: li,
                    dir: Dir::Reverse,
                    t,
                },
            });
            // q_nm = (B - bsh) c_nn - G s_nm - B c_nm
            rows.push(LinearRow {
                coeffs: vec![
                    (ix.flow_q(li, Dir::Forward, t), 1.0),
                    (c_nn, bsh - b),
                    (s_nm, g),
                    (c_nm, b),
                ],
                sense: RowSense::Eq,
                rhs: 0.0,
                tag: RowTag::FlowDefQ {
                    line: li,
                    dir: Dir::Forward,
                    t,
                },
            });
            // q_mn = (B - bsh) c_mm + G s_nm - B c_nm
            rows.push(LinearRow {
                coeffs: vec![
                    (ix.flow_q(li, Dir::Reverse, t), 1.0),
                    (c_mm, bsh - b),
                    (s_nm, -g),
                    (c_nm, b),
                ],
                sense: RowSense::Eq,
                rhs: 0.0,
                tag: RowTag::FlowDefQ {
                    line: li,
                    dir: Dir::Reverse,
                    t,
                },
            });
        }
    }
}

/// Active and reactive balance per bus and period.
pub(crate) fn balance_rows(
    inst: &UcInstance,
    ix: &VariableIndex,
    loads: &[Vec<(f64, f64)>],
    rows: &mut Vec<LinearRow>,
) {
    let bus_idx = inst.bus_index();
    let gens_at = inst.gens_at_bus();
    // directed line ends leaving each bus
    let mut leaving: Vec<Vec<(usize, Dir)>> = vec![Vec::new(); inst.n_buses()];
    for (li, line) in inst.lines.iter().enumerate() {
        leaving[bus_idx[line.from.as_str()]].push((li, Dir::Forward));
        leaving[bus_idx[line.to.as_str()]].push((li, Dir::Reverse));
    }

    for n in 0..inst.n_buses() {
        for (t, &(pd, qd)) in loads[n].iter().enumerate() {
            let mut coeffs: Vec<(usize, f64)> = Vec::new();
            for &g in &gens_at[n] {
                coeffs.push((ix.p(g, t), 1.0));
            }
            coeffs.push((ix.p_unserved(n, t), 1.0));
            coeffs.push((ix.p_over(n, t), -1.0));
            for &(li, dir) in &leaving[n] {
                coeffs.push((ix.flow_p(li, dir, t), -1.0));
            }
            rows.push(LinearRow {
                coeffs,
                sense: RowSense::Eq,
                rhs: pd,
                tag: RowTag::BalanceP { bus: n, t },
            });

            let mut coeffs: Vec<(usize, f64)> = Vec::new();
            for &g in &gens_at[n] {
                coeffs.push((ix.q(g, t), 1.0));
            }
            coeffs.push((ix.q_unserved(n, t), 1.0));
            coeffs.push((ix.q_over(n, t), -1.0));
            for &(li, dir) in &leaving[n] {
                coeffs.push((ix.flow_q(li, dir, t), -1.0));
            }
            rows.push(LinearRow {
                coeffs,
                sense: RowSense::Eq,
                rhs: qd,
                tag: RowTag::BalanceQ { bus: n, t },
            });
        }
    }
}
