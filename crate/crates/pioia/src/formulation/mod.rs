//! Solver-agnostic model construction for the SOC-NCUC problem.
//!
//! [`build_outer_base`] produces the linear outer model (no cone rows, full
//! integrality), [`build_misocp`] the original mixed-integer conic problem,
//! and [`build_inner`] the convex conic restriction at a fixed commitment.
//! The two nonlinear families keep dedicated residual evaluators.

mod build;
mod residuals;
mod vars;

pub(crate) use build::{balance_rows, network_rows};
pub use build::{build_inner, build_misocp, build_outer_base, check_commitment};
pub use residuals::{cap_residuals, soc_residuals};
pub use vars::{Dir, VariableIndex, DIRS};

use std::collections::BTreeSet;
use std::fmt;

/// Slack-variable policy of the formulation.
///
/// F1 fixes all four slack families to zero, F2 allows unserved power only,
/// F3 allows unserved and over-produced power.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormulationVariant {
    F1,
    F2,
    F3,
}

impl FormulationVariant {
    /// Unserved-power slacks fixed to zero?
    pub fn fixes_unserved(self) -> bool {
        matches!(self, FormulationVariant::F1)
    }

    /// Over-production slacks fixed to zero?
    pub fn fixes_over(self) -> bool {
        matches!(self, FormulationVariant::F1 | FormulationVariant::F2)
    }
}

impl fmt::Display for FormulationVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormulationVariant::F1 => write!(f, "f1"),
            FormulationVariant::F2 => write!(f, "f2"),
            FormulationVariant::F3 => write!(f, "f3"),
        }
    }
}

impl std::str::FromStr for FormulationVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "f1" => Ok(FormulationVariant::F1),
            "f2" => Ok(FormulationVariant::F2),
            "f3" => Ok(FormulationVariant::F3),
            other => Err(format!("unknown variant '{other}' (expected f1, f2 or f3)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Eq,
    Le,
    Ge,
}

/// Identifies which constraint family a row came from; periods are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowTag {
    Logic {
        gen: usize,
        t: usize,
    },
    Exclusion {
        gen: usize,
        t: usize,
    },
    InitUp {
        gen: usize,
    },
    InitDown {
        gen: usize,
    },
    MinUp {
        gen: usize,
        t: usize,
    },
    MinUpTail {
        gen: usize,
        t: usize,
    },
    MinDown {
        gen: usize,
        t: usize,
    },
    MinDownTail {
        gen: usize,
        t: usize,
    },
    PLower {
        gen: usize,
        t: usize,
    },
    PUpper {
        gen: usize,
        t: usize,
    },
    PBarLower {
        gen: usize,
        t: usize,
    },
    PBarUpper {
        gen: usize,
        t: usize,
    },
    QLower {
        gen: usize,
        t: usize,
    },
    QUpper {
        gen: usize,
        t: usize,
    },
    RampUp {
        gen: usize,
        t: usize,
    },
    RampUpBar {
        gen: usize,
        t: usize,
    },
    RampDown {
        gen: usize,
        t: usize,
    },
    ShutdownBar {
        gen: usize,
        t: usize,
    },
    Reserve {
        area: usize,
        t: usize,
    },
    FlowDefP {
        line: usize,
        dir: Dir,
        t: usize,
    },
    FlowDefQ {
        line: usize,
        dir: Dir,
        t: usize,
    },
    BalanceP {
        bus: usize,
        t: usize,
    },
    BalanceQ {
        bus: usize,
        t: usize,
    },
    PsiLink {
        t: usize,
    },
    SocCut,
    CapCut,
    BendersCut,
    /// Benders subproblem coupling row p_{g,t} = anchor.
    Coupling {
        gen: usize,
    },
}

impl RowTag {
    /// True for rows of the commitment-only family (Ax <= b in the compact
    /// form): logic, exclusion, initial status and minimum up/down times.
    pub fn is_commitment(&self) -> bool {
        matches!(
            self,
            RowTag::Logic { .. }
                | RowTag::Exclusion { .. }
                | RowTag::InitUp { .. }
                | RowTag::InitDown { .. }
                | RowTag::MinUp { .. }
                | RowTag::MinUpTail { .. }
                | RowTag::MinDown { .. }
                | RowTag::MinDownTail { .. }
        )
    }
}

impl fmt::Display for RowTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowTag::Logic { gen, t } => write!(f, "logic(g{gen}, t{})", t + 1),
            RowTag::Exclusion { gen, t } => {
                write!(f, "startup-shutdown-exclusion(g{gen}, t{})", t + 1)
            }
            RowTag::InitUp { gen } => write!(f, "initial-up-time(g{gen})"),
            RowTag::InitDown { gen } => write!(f, "initial-down-time(g{gen})"),
            RowTag::MinUp { gen, t } => write!(f, "min-up(g{gen}, t{})", t + 1),
            RowTag::MinUpTail { gen, t } => write!(f, "min-up-tail(g{gen}, t{})", t + 1),
            RowTag::MinDown { gen, t } => write!(f, "min-down(g{gen}, t{})", t + 1),
            RowTag::MinDownTail { gen, t } => write!(f, "min-down-tail(g{gen}, t{})", t + 1),
            RowTag::PLower { gen, t } => write!(f, "p-lower(g{gen}, t{})", t + 1),
            RowTag::PUpper { gen, t } => write!(f, "p-upper(g{gen}, t{})", t + 1),
            RowTag::PBarLower { gen, t } => write!(f, "pbar-lower(g{gen}, t{})", t + 1),
            RowTag::PBarUpper { gen, t } => write!(f, "pbar-upper(g{gen}, t{})", t + 1),
            RowTag::QLower { gen, t } => write!(f, "q-lower(g{gen}, t{})", t + 1),
            RowTag::QUpper { gen, t } => write!(f, "q-upper(g{gen}, t{})", t + 1),
            RowTag::RampUp { gen, t } => write!(f, "ramp-up(g{gen}, t{})", t + 1),
            RowTag::RampUpBar { gen, t } => write!(f, "ramp-up-pbar(g{gen}, t{})", t + 1),
            RowTag::RampDown { gen, t } => write!(f, "ramp-down(g{gen}, t{})", t + 1),
            RowTag::ShutdownBar { gen, t } => write!(f, "shutdown-pbar(g{gen}, t{})", t + 1),
            RowTag::Reserve { area, t } => write!(f, "reserve(area{area}, t{})", t + 1),
            RowTag::FlowDefP { line, dir, t } => {
                write!(f, "flow-def-p(l{line}, {dir:?}, t{})", t + 1)
            }
            RowTag::FlowDefQ { line, dir, t } => {
                write!(f, "flow-def-q(l{line}, {dir:?}, t{})", t + 1)
            }
            RowTag::BalanceP { bus, t } => write!(f, "balance-p(n{bus}, t{})", t + 1),
            RowTag::BalanceQ { bus, t } => write!(f, "balance-q(n{bus}, t{})", t + 1),
            RowTag::PsiLink { t } => write!(f, "psi-link(t{})", t + 1),
            RowTag::SocCut => write!(f, "soc-cut"),
            RowTag::CapCut => write!(f, "cap-cut"),
            RowTag::BendersCut => write!(f, "benders-cut"),
            RowTag::Coupling { gen } => write!(f, "coupling(g{gen})"),
        }
    }
}

/// One linear constraint: sum of coeffs * vars (sense) rhs.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRow {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
    pub tag: RowTag,
}

impl LinearRow {
    pub fn lhs(&self, vals: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(id, c)| c * vals[id]).sum()
    }

    /// Signed violation: positive means the row is violated by that amount.
    pub fn violation(&self, vals: &[f64]) -> f64 {
        let lhs = self.lhs(vals);
        match self.sense {
            RowSense::Eq => (lhs - self.rhs).abs(),
            RowSense::Le => lhs - self.rhs,
            RowSense::Ge => self.rhs - lhs,
        }
    }
}

/// One of the two nonlinear constraint families, kept in semantic form.
#[derive(Debug, Clone, PartialEq)]
pub enum ConeRow {
    /// p^2 + q^2 <= s_max^2 for one directed line-period.
    Cap {
        p: usize,
        q: usize,
        s_max: f64,
        line: usize,
        dir: Dir,
        t: usize,
    },
    /// c_nm^2 + s_nm^2 <= c_nn * c_mm for one line-period.
    Soc {
        c_off: usize,
        s_off: usize,
        c_from: usize,
        c_to: usize,
        line: usize,
        t: usize,
    },
}

impl ConeRow {
    /// Residual at an assignment; positive means violated.
    pub fn residual(&self, vals: &[f64]) -> f64 {
        match *self {
            ConeRow::Cap { p, q, s_max, .. } => {
                vals[p] * vals[p] + vals[q] * vals[q] - s_max * s_max
            }
            ConeRow::Soc {
                c_off,
                s_off,
                c_from,
                c_to,
                ..
            } => vals[c_off] * vals[c_off] + vals[s_off] * vals[s_off] - vals[c_from] * vals[c_to],
        }
    }
}

/// Solver-agnostic LP/MILP/SOCP description.
///
/// Bounds with `lb == ub` fix a variable; infinite bounds are free. The
/// integrality set holds ids required binary (always a subset of the
/// commitment partition). Cone rows appear only in inner-style models.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub index: VariableIndex,
    pub bounds: Vec<(f64, f64)>,
    pub integrality: BTreeSet<usize>,
    pub rows: Vec<LinearRow>,
    pub cones: Vec<ConeRow>,
    /// Dense linear objective, one coefficient per variable.
    pub objective: Vec<f64>,
}

impl ModelSpec {
    pub fn num_vars(&self) -> usize {
        self.bounds.len()
    }

    pub fn objective_value(&self, vals: &[f64]) -> f64 {
        self.objective.iter().zip(vals).map(|(c, v)| c * v).sum()
    }

    /// Fixes a variable to a value by collapsing its bounds.
    pub fn fix_var(&mut self, id: usize, val: f64) {
        self.bounds[id] = (val, val);
    }

    /// Largest violation of any row, bound or cone at an assignment.
    pub fn max_violation(&self, vals: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for row in &self.rows {
            worst = worst.max(row.violation(vals));
        }
        for (id, &(lb, ub)) in self.bounds.iter().enumerate() {
            worst = worst.max(lb - vals[id]);
            worst = worst.max(vals[id] - ub);
        }
        for cone in &self.cones {
            worst = worst.max(cone.residual(vals));
        }
        worst
    }
}

#[derive(Debug)]
pub enum FormulationError {
    /// The supplied commitment violates a commitment constraint.
    InfeasibleCommitment { rule: String, violation: f64 },
    /// Schedule dimensions do not match the instance.
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
}

impl fmt::Display for FormulationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormulationError::InfeasibleCommitment { rule, violation } => {
                write!(f, "commitment violates {rule} by {violation:.3e}")
            }
            FormulationError::DimensionMismatch { expected, got } => write!(
                f,
                "schedule shape {got:?} does not match instance shape {expected:?}"
            ),
        }
    }
}

impl std::error::Error for FormulationError {}
