//! Lowering of a [`ModelSpec`] to standard conic form
//! `min c'x  s.t.  Ax + s = b, s in K`.
//!
//! Row order: one zero-cone block (equality rows, then fixed variables), one
//! nonnegative block (inequality rows, then finite variable bounds), then one
//! second-order cone block per cone row. Both engines consume this form, so
//! their duals share the same layout.

use crate::formulation::{ConeRow, ModelSpec, RowSense};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeBlock {
    Zero(usize),
    Nonneg(usize),
    Soc(usize),
}

/// Sparse conic problem plus the bookkeeping to map duals back to spec rows.
#[derive(Debug, Clone)]
pub struct ConicProblem {
    pub num_vars: usize,
    pub num_rows: usize,
    pub objective: Vec<f64>,
    /// (row, col, value) triplets, sorted by row then col.
    pub triplets: Vec<(usize, usize, f64)>,
    pub rhs: Vec<f64>,
    pub cones: Vec<ConeBlock>,
    /// conic row index of each spec row, aligned with `ModelSpec::rows`.
    spec_row_map: Vec<usize>,
    spec_row_sense: Vec<RowSense>,
}

impl ConicProblem {
    /// Duals per spec row in the dV/d(rhs) convention: conic duals are
    /// negated for equality and <= rows and taken as-is for >= rows (their
    /// conic row is the negated inequality).
    pub fn map_duals(&self, conic_dual: &[f64]) -> Vec<f64> {
        self.spec_row_map
            .iter()
            .zip(&self.spec_row_sense)
            .map(|(&row, sense)| match sense {
                RowSense::Eq | RowSense::Le => -conic_dual[row],
                RowSense::Ge => conic_dual[row],
            })
            .collect()
    }

    /// CSC arrays (column pointers, row indices, values) for sparse engines.
    pub fn to_csc(&self) -> (Vec<usize>, Vec<usize>, Vec<f64>) {
        let mut by_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.num_vars];
        for &(r, c, v) in &self.triplets {
            by_col[c].push((r, v));
        }
        let mut colptr = Vec::with_capacity(self.num_vars + 1);
        let mut rowval = Vec::with_capacity(self.triplets.len());
        let mut nzval = Vec::with_capacity(self.triplets.len());
        colptr.push(0);
        for col in &mut by_col {
            col.sort_unstable_by_key(|&(r, _)| r);
            for &(r, v) in col.iter() {
                rowval.push(r);
                nzval.push(v);
            }
            colptr.push(rowval.len());
        }
        (colptr, rowval, nzval)
    }
}

/// Lowers a spec, ignoring its integrality set (relaxation).
pub(crate) fn lower(spec: &ModelSpec) -> ConicProblem {
    let n = spec.num_vars();
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    let mut spec_row_map = vec![usize::MAX; spec.rows.len()];
    let mut spec_row_sense = vec![RowSense::Eq; spec.rows.len()];
    let mut row = 0usize;

    // zero cone: equality rows, then fixed variables
    for (i, r) in spec.rows.iter().enumerate() {
        if r.sense == RowSense::Eq {
            for &(id, c) in &r.coeffs {
                triplets.push((row, id, c));
            }
            rhs.push(r.rhs);
            spec_row_map[i] = row;
            spec_row_sense[i] = RowSense::Eq;
            row += 1;
        }
    }
    for (id, &(lb, ub)) in spec.bounds.iter().enumerate() {
        if lb == ub {
            triplets.push((row, id, 1.0));
            rhs.push(lb);
            row += 1;
        }
    }
    let zero_len = row;

    // nonnegative cone: <= rows as-is, >= rows negated, then finite bounds
    for (i, r) in spec.rows.iter().enumerate() {
        match r.sense {
            RowSense::Eq => {}
            RowSense::Le => {
                for &(id, c) in &r.coeffs {
                    triplets.push((row, id, c));
                }
                rhs.push(r.rhs);
                spec_row_map[i] = row;
                spec_row_sense[i] = RowSense::Le;
                row += 1;
            }
            RowSense::Ge => {
                for &(id, c) in &r.coeffs {
                    triplets.push((row, id, -c));
                }
                rhs.push(-r.rhs);
                spec_row_map[i] = row;
                spec_row_sense[i] = RowSense::Ge;
                row += 1;
            }
        }
    }
    for (id, &(lb, ub)) in spec.bounds.iter().enumerate() {
        if lb == ub {
            continue;
        }
        if ub.is_finite() {
            triplets.push((row, id, 1.0));
            rhs.push(ub);
            row += 1;
        }
        if lb.is_finite() {
            triplets.push((row, id, -1.0));
            rhs.push(-lb);
            row += 1;
        }
    }
    let nonneg_len = row - zero_len;

    let mut cones = Vec::new();
    if zero_len > 0 {
        cones.push(ConeBlock::Zero(zero_len));
    }
    if nonneg_len > 0 {
        cones.push(ConeBlock::Nonneg(nonneg_len));
    }

    // one SOC block per cone row
    for cone in &spec.cones {
        match *cone {
            ConeRow::Cap { p, q, s_max, .. } => {
                // s = (s_max, p, q) in SOC(3)
                rhs.push(s_max);
                row += 1;
                triplets.push((row, p, -1.0));
                rhs.push(0.0);
                row += 1;
                triplets.push((row, q, -1.0));
                rhs.push(0.0);
                row += 1;
                cones.push(ConeBlock::Soc(3));
            }
            ConeRow::Soc {
                c_off,
                s_off,
                c_from,
                c_to,
                ..
            } => {
                // rotated cone as SOC(4): s = (cf + ct, 2c, 2s, cf - ct)
                triplets.push((row, c_from, -1.0));
                triplets.push((row, c_to, -1.0));
                rhs.push(0.0);
                row += 1;
                triplets.push((row, c_off, -2.0));
                rhs.push(0.0);
                row += 1;
                triplets.push((row, s_off, -2.0));
                rhs.push(0.0);
                row += 1;
                triplets.push((row, c_from, -1.0));
                triplets.push((row, c_to, 1.0));
                rhs.push(0.0);
                row += 1;
                cones.push(ConeBlock::Soc(4));
            }
        }
    }

    triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));

    ConicProblem {
        num_vars: n,
        num_rows: row,
        objective: spec.objective.clone(),
        triplets,
        rhs,
        cones,
        spec_row_map,
        spec_row_sense,
    }
}
