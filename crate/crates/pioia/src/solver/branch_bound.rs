//! Branch-and-bound MILP layer over the continuous engines.
//!
//! Best-first search branching on the most fractional binary. Node bounds
//! come from continuous relaxations, so the reported dual bound is always a
//! valid lower bound of the mixed problem regardless of where the search
//! stopped.

use super::{solve_relaxation, Backend, BackendError, SolveControls, SolveOutcome, SolveStatus};
use crate::formulation::ModelSpec;
use std::collections::BinaryHeap;
use std::time::Instant;

const INT_TOL: f64 = 1e-6;
const FEAS_TOL: f64 = 1e-7;

struct Node {
    bound: f64,
    seq: u64,
    fixings: Vec<(usize, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.seq == other.seq
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // reversed: BinaryHeap is a max-heap, we pop the lowest bound first,
        // ties broken by insertion order for determinism
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Solves a no-cone spec as a MILP over its integrality set. Stops when the
/// relative gap reaches `controls.mip_gap` or the time limit expires; the
/// warm start seeds the incumbent when it is feasible, otherwise a warning
/// is recorded and the solve proceeds cold.
pub fn solve_mixed(
    spec: &ModelSpec,
    controls: &SolveControls,
    backend: Backend,
) -> Result<SolveOutcome, BackendError> {
    if !spec.cones.is_empty() {
        return Err(BackendError::InvalidModel(
            "mixed solve requires a cone-free (outer) model".into(),
        ));
    }
    let start = Instant::now();
    let mut warnings = Vec::new();

    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    if let Some(warm) = &controls.warm_start {
        if warm.len() != spec.num_vars() {
            warnings.push("warm start ignored: wrong length".into());
        } else if let Some(v) = warm_violation(spec, warm) {
            warnings.push(format!(
                "warm start infeasible (violation {v:.2e}), solving cold"
            ));
        } else {
            incumbent = Some((spec.objective_value(warm), warm.clone()));
        }
    }

    let binaries: Vec<usize> = spec.integrality.iter().copied().collect();
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    heap.push(Node {
        bound: f64::NEG_INFINITY,
        seq,
        fixings: Vec::new(),
    });
    let mut global_lb = f64::NEG_INFINITY;
    let mut work = spec.clone();

    loop {
        // the proven bound is the best open node capped by the incumbent:
        // open nodes above the incumbent only await pruning
        let ub = incumbent.as_ref().map_or(f64::INFINITY, |(o, _)| *o);
        let open_lb = match heap.peek() {
            Some(n) => n.bound.max(global_lb).min(ub),
            None => ub,
        };
        if heap.is_empty() {
            let status = if incumbent.is_some() {
                SolveStatus::Optimal
            } else {
                SolveStatus::Infeasible
            };
            let dual_bound = if incumbent.is_some() {
                ub
            } else {
                f64::INFINITY
            };
            return Ok(finish(status, incumbent, dual_bound, warnings));
        }
        if ub.is_finite() {
            let gap = relative_gap(ub, open_lb);
            if gap <= controls.mip_gap {
                let status = if gap <= 1e-9 {
                    SolveStatus::Optimal
                } else {
                    SolveStatus::GapReached
                };
                return Ok(finish(status, incumbent, open_lb, warnings));
            }
        }
        if start.elapsed().as_secs_f64() > controls.time_limit {
            return Ok(finish(SolveStatus::TimeLimit, incumbent, open_lb, warnings));
        }

        let node = heap.pop().expect("checked nonempty");
        global_lb = global_lb.max(node.bound.max(f64::NEG_INFINITY));
        if let Some((obj, _)) = &incumbent {
            if node.bound >= obj - 1e-9 * obj.abs().max(1.0) {
                continue;
            }
        }

        // solve the node relaxation with its fixings applied
        for &(id, v) in &node.fixings {
            work.bounds[id] = (v, v);
        }
        let rel = solve_relaxation(&work, backend);
        for &(id, _) in &node.fixings {
            work.bounds[id] = spec.bounds[id];
        }

        match rel.status {
            SolveStatus::Infeasible => continue,
            SolveStatus::Unbounded => {
                if node.fixings.is_empty() && incumbent.is_none() {
                    return Ok(finish(
                        SolveStatus::Unbounded,
                        None,
                        f64::NEG_INFINITY,
                        warnings,
                    ));
                }
                // an unbounded node with binaries still free: branch blind
                warnings.push("unbounded node relaxation".into());
                continue;
            }
            SolveStatus::Optimal => {}
            _ => {
                warnings.extend(rel.warnings);
                return Ok(finish(
                    SolveStatus::NumericError,
                    incumbent,
                    global_lb,
                    warnings,
                ));
            }
        }
        let primal = rel.primal.expect("optimal relaxation has a primal");
        // keep child bounds monotone under solver noise
        let bound = rel.objective.max(node.bound);

        if let Some((obj, _)) = &incumbent {
            if bound >= obj - 1e-9 * obj.abs().max(1.0) {
                continue;
            }
        }

        // most fractional binary, ties to the smallest id
        let mut branch: Option<(usize, f64)> = None;
        for &id in &binaries {
            let frac = (primal[id] - primal[id].round()).abs();
            if frac > INT_TOL && branch.is_none_or(|(_, best)| frac > best + 1e-12) {
                branch = Some((id, frac));
            }
        }

        match branch {
            None => {
                // integral: snap the binaries and take it as an incumbent
                let mut sol = primal;
                for &id in &binaries {
                    sol[id] = sol[id].round();
                }
                if incumbent.as_ref().is_none_or(|(obj, _)| bound < *obj) {
                    incumbent = Some((bound, sol));
                }
            }
            Some((id, _)) => {
                for v in [0.0, 1.0] {
                    seq += 1;
                    let mut fixings = node.fixings.clone();
                    fixings.push((id, v));
                    heap.push(Node {
                        bound,
                        seq,
                        fixings,
                    });
                }
            }
        }
    }
}

fn relative_gap(ub: f64, lb: f64) -> f64 {
    if ub - lb <= 1e-9 {
        return 0.0;
    }
    (ub - lb) / ub.abs().max(1e-10)
}

fn finish(
    status: SolveStatus,
    incumbent: Option<(f64, Vec<f64>)>,
    dual_bound: f64,
    warnings: Vec<String>,
) -> SolveOutcome {
    let (objective, primal) = match incumbent {
        Some((o, p)) => (o, Some(p)),
        None => (f64::INFINITY, None),
    };
    SolveOutcome {
        status,
        primal,
        objective,
        dual_bound,
        duals: None,
        warnings,
    }
}

/// Returns the largest violation when the assignment is not feasible. Row
/// violations are scaled by the coefficient norm so that penalty-weighted
/// rows do not amplify solver noise.
fn warm_violation(spec: &ModelSpec, vals: &[f64]) -> Option<f64> {
    let mut worst: f64 = 0.0;
    for row in &spec.rows {
        let norm = row.coeffs.iter().map(|&(_, c)| c * c).sum::<f64>().sqrt();
        worst = worst.max(row.violation(vals) / norm.max(1.0));
    }
    for (id, &(lb, ub)) in spec.bounds.iter().enumerate() {
        worst = worst.max(lb - vals[id]);
        worst = worst.max(vals[id] - ub);
    }
    for &id in &spec.integrality {
        worst = worst.max((vals[id] - vals[id].round()).abs());
    }
    (worst > FEAS_TOL).then_some(worst)
}

#[cfg(test)]
mod tests {
    use super::super::lowering::tests::scalar_spec;
    use super::*;
    use crate::formulation::{build_outer_base, FormulationVariant, LinearRow, RowSense, RowTag};
    use crate::model::generate_synthetic;

    #[test]
    fn binary_rounding_up() {
        // min x, x binary, x >= 0.5 -> x = 1
        let mut spec = scalar_spec(0);
        let id = 0usize; // u(0,0): a genuine commitment id
        spec.bounds[id] = (0.0, 1.0);
        spec.objective[id] = 1.0;
        spec.rows.push(LinearRow {
            coeffs: vec![(id, 1.0)],
            sense: RowSense::Ge,
            rhs: 0.5,
            tag: RowTag::SocCut,
        });
        spec.integrality.insert(id);
        let out = solve_mixed(&spec, &SolveControls::default(), Backend::Clarabel).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert!((out.objective - 1.0).abs() < 1e-6);
        assert_eq!(out.primal.unwrap()[id], 1.0);
        assert!(out.dual_bound <= out.objective + 1e-9);
    }

    #[test]
    fn gap_contract_holds() {
        // LP bound 0.5, integer optimum 1: with a 50% gap target the solver
        // may stop early but the dual bound stays valid.
        let mut spec = scalar_spec(0);
        let id = 0usize;
        spec.bounds[id] = (0.0, 1.0);
        spec.objective[id] = 1.0;
        spec.rows.push(LinearRow {
            coeffs: vec![(id, 1.0)],
            sense: RowSense::Ge,
            rhs: 0.5,
            tag: RowTag::SocCut,
        });
        spec.integrality.insert(id);
        let controls = SolveControls {
            mip_gap: 0.5,
            ..Default::default()
        };
        let out = solve_mixed(&spec, &controls, Backend::Clarabel).unwrap();
        assert!(out.dual_bound <= 1.0 + 1e-9);
        assert!(out.objective >= 1.0 - 1e-9);
    }

    #[test]
    fn feasible_warm_start_bounds_objective() {
        let inst = generate_synthetic(2, 2, 3, 11).unwrap();
        let spec = build_outer_base(&inst, FormulationVariant::F2, false);
        let cold = solve_mixed(&spec, &SolveControls::default(), Backend::Clarabel).unwrap();
        assert_eq!(cold.status, SolveStatus::Optimal);
        let warm_vec = cold.primal.clone().unwrap();
        let warm = SolveControls {
            warm_start: Some(warm_vec),
            ..Default::default()
        };
        let out = solve_mixed(&spec, &warm, Backend::Clarabel).unwrap();
        assert!(out.objective <= cold.objective + 1e-7);
        assert!(out.warnings.is_empty(), "{:?}", out.warnings);
    }

    #[test]
    fn infeasible_warm_start_recorded_and_ignored() {
        let inst = generate_synthetic(1, 1, 2, 3).unwrap();
        let spec = build_outer_base(&inst, FormulationVariant::F2, false);
        let bad = vec![5.0; spec.num_vars()];
        let controls = SolveControls {
            warm_start: Some(bad),
            ..Default::default()
        };
        let out = solve_mixed(&spec, &controls, Backend::Clarabel).unwrap();
        assert!(out
            .warnings
            .iter()
            .any(|w| w.contains("warm start infeasible")));
        assert_eq!(out.status, SolveStatus::Optimal);
    }

    #[test]
    fn outer_milp_on_synthetic_instance() {
        let inst = generate_synthetic(3, 2, 3, 5).unwrap();
        let spec = build_outer_base(&inst, FormulationVariant::F2, false);
        let out = solve_mixed(&spec, &SolveControls::default(), Backend::Clarabel).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        let sol = out.primal.unwrap();
        for &id in &spec.integrality {
            assert!(sol[id] == 0.0 || sol[id] == 1.0);
        }
        // relaxation value never exceeds the MILP value
        let relaxed = super::super::restrict_integrality(&spec, []).unwrap();
        let lp = super::super::solve_continuous(&relaxed, Backend::Clarabel).unwrap();
        assert!(lp.objective <= out.objective + 1e-6);
    }

    #[test]
    fn mixed_solve_rejects_cone_rows() {
        let inst = generate_synthetic(2, 1, 2, 0).unwrap();
        let spec = crate::formulation::build_misocp(&inst, FormulationVariant::F2);
        assert!(solve_mixed(&spec, &SolveControls::default(), Backend::Clarabel).is_err());
    }

    #[test]
    fn subset_integrality_bound_ordering() {
        // optimal value with B1 <= optimal value with B2 when B1 is a subset
        let inst = generate_synthetic(2, 2, 2, 9).unwrap();
        let spec = build_outer_base(&inst, FormulationVariant::F2, false);
        let b0 = super::super::restrict_integrality(&spec, []).unwrap();
        let b1 = super::super::restrict_integrality(&spec, spec.index.gen_x_ids(0)).unwrap();
        let v0 = solve_mixed(&b0, &SolveControls::default(), Backend::Clarabel).unwrap();
        let v1 = solve_mixed(&b1, &SolveControls::default(), Backend::Clarabel).unwrap();
        let v2 = solve_mixed(&spec, &SolveControls::default(), Backend::Clarabel).unwrap();
        assert!(v0.objective <= v1.objective + 1e-6);
        assert!(v1.objective <= v2.objective + 1e-6);
    }
}
