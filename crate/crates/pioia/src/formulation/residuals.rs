//! Residual evaluation for the two nonlinear constraint families.

use super::vars::{Dir, VariableIndex, DIRS};
use crate::model::UcInstance;
use std::collections::BTreeMap;

/// Residuals c_nm^2 + s_nm^2 - c_nn * c_mm per (line, period); positive
/// means the cone constraint is violated at the assignment.
pub fn soc_residuals(
    inst: &UcInstance,
    ix: &VariableIndex,
    vals: &[f64],
) -> BTreeMap<(usize, usize), f64> {
    let bus_idx = inst.bus_index();
    let mut out = BTreeMap::new();
    for (li, line) in inst.lines.iter().enumerate() {
        let n = bus_idx[line.from.as_str()];
        let m = bus_idx[line.to.as_str()];
        for t in 0..inst.horizon {
            let c = vals[ix.c_off(li, t)];
            let s = vals[ix.s_off(li, t)];
            let r = c * c + s * s - vals[ix.c_diag(n, t)] * vals[ix.c_diag(m, t)];
            out.insert((li, t), r);
        }
    }
    out
}

/// Residuals p^2 + q^2 - s_max^2 per (line, direction, period).
pub fn cap_residuals(
    inst: &UcInstance,
    ix: &VariableIndex,
    vals: &[f64],
) -> BTreeMap<(usize, Dir, usize), f64> {
    let mut out = BTreeMap::new();
    for (li, line) in inst.lines.iter().enumerate() {
        for dir in DIRS {
            for t in 0..inst.horizon {
                let p = vals[ix.flow_p(li, dir, t)];
                let q = vals[ix.flow_q(li, dir, t)];
                out.insert((li, dir, t), p * p + q * q - line.s_max * line.s_max);
            }
        }
    }
    out
}
