//! Totsu adapter: first-order solves of the lowered conic form, used as the
//! independent cross-check engine.

use super::lowering::{ConeBlock, ConicProblem};
use super::{ConicOutcome, SolveStatus};
use totsu::prelude::FloatGeneric;
use totsu_core::solver::{Cone, Operator, Solver, SolverError};
use totsu_core::{ConeRPos, ConeSOC, ConeZero};

type La = FloatGeneric<f64>;

/// Sparse matrix as a totsu linear operator.
struct TripletOp<'a> {
    rows: usize,
    cols: usize,
    triplets: &'a [(usize, usize, f64)],
}

impl Operator<La> for TripletOp<'_> {
    fn size(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    fn op(&self, alpha: f64, x: &[f64], beta: f64, y: &mut [f64]) {
        if beta == 0.0 {
            y.fill(0.0);
        } else {
            for v in y.iter_mut() {
                *v *= beta;
            }
        }
        for &(r, c, v) in self.triplets {
            y[r] += alpha * v * x[c];
        }
    }

    fn trans_op(&self, alpha: f64, x: &[f64], beta: f64, y: &mut [f64]) {
        if beta == 0.0 {
            y.fill(0.0);
        } else {
            for v in y.iter_mut() {
                *v *= beta;
            }
        }
        for &(r, c, v) in self.triplets {
            y[c] += alpha * v * x[r];
        }
    }

    fn absadd_cols(&self, tau: &mut [f64]) {
        for &(_, c, v) in self.triplets {
            tau[c] += v.abs();
        }
    }

    fn absadd_rows(&self, sigma: &mut [f64]) {
        for &(r, _, v) in self.triplets {
            sigma[r] += v.abs();
        }
    }
}

/// Column vector as a totsu linear operator.
struct VecOp<'a>(&'a [f64]);

impl Operator<La> for VecOp<'_> {
    fn size(&self) -> (usize, usize) {
        (self.0.len(), 1)
    }

    fn op(&self, alpha: f64, x: &[f64], beta: f64, y: &mut [f64]) {
        for (yi, vi) in y.iter_mut().zip(self.0) {
            let base = if beta == 0.0 { 0.0 } else { beta * *yi };
            *yi = base + alpha * vi * x[0];
        }
    }

    fn trans_op(&self, alpha: f64, x: &[f64], beta: f64, y: &mut [f64]) {
        let dot: f64 = self.0.iter().zip(x).map(|(v, xi)| v * xi).sum();
        let base = if beta == 0.0 { 0.0 } else { beta * y[0] };
        y[0] = base + alpha * dot;
    }

    fn absadd_cols(&self, tau: &mut [f64]) {
        tau[0] += self.0.iter().map(|v| v.abs()).sum::<f64>();
    }

    fn absadd_rows(&self, sigma: &mut [f64]) {
        for (si, vi) in sigma.iter_mut().zip(self.0) {
            *si += vi.abs();
        }
    }
}

/// Product cone matching the lowered block layout.
struct BlockCone<'a> {
    blocks: &'a [ConeBlock],
    zero: ConeZero<La>,
    rpos: ConeRPos<La>,
    soc: ConeSOC<La>,
}

impl Cone<La> for BlockCone<'_> {
    fn proj(&mut self, dual_cone: bool, x: &mut [f64]) -> Result<(), ()> {
        let mut pos = 0;
        for &block in self.blocks {
            match block {
                ConeBlock::Zero(n) => {
                    self.zero.proj(dual_cone, &mut x[pos..pos + n])?;
                    pos += n;
                }
                ConeBlock::Nonneg(n) => {
                    self.rpos.proj(dual_cone, &mut x[pos..pos + n])?;
                    pos += n;
                }
                ConeBlock::Soc(n) => {
                    self.soc.proj(dual_cone, &mut x[pos..pos + n])?;
                    pos += n;
                }
            }
        }
        Ok(())
    }

    fn product_group<G: Fn(&mut [f64]) + Copy>(&self, dp_tau: &mut [f64], group: G) {
        let mut pos = 0;
        for &block in self.blocks {
            match block {
                ConeBlock::Zero(n) | ConeBlock::Nonneg(n) => pos += n,
                ConeBlock::Soc(n) => {
                    group(&mut dp_tau[pos..pos + n]);
                    pos += n;
                }
            }
        }
    }
}

pub(crate) fn solve(prob: &ConicProblem) -> ConicOutcome {
    let op_c = VecOp(&prob.objective);
    let op_a = TripletOp {
        rows: prob.num_rows,
        cols: prob.num_vars,
        triplets: &prob.triplets,
    };
    let op_b = VecOp(&prob.rhs);
    let cone = BlockCone {
        blocks: &prob.cones,
        zero: ConeZero::new(),
        rpos: ConeRPos::new(),
        soc: ConeSOC::new(),
    };

    let solver = Solver::<La>::new().par(|p| {
        p.eps_acc = 1e-9;
        p.max_iter = Some(4_000_000);
    });
    let mut work = vec![0.0; Solver::<La>::query_worklen((prob.num_rows, prob.num_vars))];
    match solver.solve((op_c, op_a, op_b, cone, &mut work)) {
        Ok((x, _y)) => {
            let objective = prob.objective.iter().zip(x).map(|(c, v)| c * v).sum();
            let primal = x.to_vec();
            let dual = _y.to_vec();
            ConicOutcome {
                status: SolveStatus::Optimal,
                primal,
                dual,
                objective,
                message: None,
            }
        }
        Err(SolverError::Infeasible) => ConicOutcome {
            status: SolveStatus::Infeasible,
            primal: Vec::new(),
            dual: Vec::new(),
            objective: f64::INFINITY,
            message: None,
        },
        Err(SolverError::Unbounded) => ConicOutcome {
            status: SolveStatus::Unbounded,
            primal: Vec::new(),
            dual: Vec::new(),
            objective: f64::NEG_INFINITY,
            message: None,
        },
        Err(e) => ConicOutcome {
            status: SolveStatus::NumericError,
            primal: Vec::new(),
            dual: Vec::new(),
            objective: f64::NAN,
            message: Some(format!("first-order solve failed: {e:?}")),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::super::lowering::lower;
    use super::super::lowering::tests::scalar_spec;
    use super::*;
    use crate::formulation::{ConeRow, Dir, LinearRow, RowSense, RowTag};

    #[test]
    fn lp_with_dual() {
        let mut spec = scalar_spec(1);
        spec.objective[0] = 1.0;
        spec.rows.push(LinearRow {
            coeffs: vec![(0, 1.0)],
            sense: RowSense::Ge,
            rhs: 3.0,
            tag: RowTag::SocCut,
        });
        let prob = lower(&spec);
        let out = solve(&prob);
        assert_eq!(out.status, SolveStatus::Optimal);
        assert!((out.objective - 3.0).abs() < 1e-6, "{}", out.objective);
        let duals = prob.map_duals(&out.dual);
        assert!((duals[0] - 1.0).abs() < 1e-5, "{}", duals[0]);
    }

    #[test]
    fn cone_row_binds() {
        let mut spec = scalar_spec(2);
        spec.objective[0] = -1.0;
        spec.cones.push(ConeRow::Cap {
            p: 0,
            q: 1,
            s_max: 1.0,
            line: 0,
            dir: Dir::Forward,
            t: 0,
        });
        let prob = lower(&spec);
        let out = solve(&prob);
        assert_eq!(out.status, SolveStatus::Optimal);
        assert!((out.objective + 1.0).abs() < 1e-6, "{}", out.objective);
    }
}
