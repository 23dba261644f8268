//! Brute-force ground truth for desk-scale instances: enumerate every
//! commitment-feasible schedule and minimize the inner conic problem over
//! them.
//!
//! Feasibility screening uses a direct implementation of the commitment
//! constraints on the schedule arrays, independent of the row-based model
//! path, so the two can cross-validate each other.

use crate::formulation::{build_inner, FormulationVariant};
use crate::model::{CommitmentSchedule, GenKind, UcInstance};
use crate::solver::{solve_continuous, Backend, SolveStatus};
use serde::{Deserialize, Serialize};
use std::fmt;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Largest commitment grid (generators x periods) the enumerator accepts.
pub const ENUMERATION_GUARD: usize = 24;

#[derive(Debug)]
pub enum OracleError {
    GuardExceeded {
        cells: usize,
    },
    /// No enumerated schedule admits a feasible inner problem.
    NoFeasibleSchedule,
    Solve {
        schedule_index: usize,
        message: String,
    },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::GuardExceeded { cells } => write!(
                f,
                "commitment grid has {cells} cells, enumeration guard is {ENUMERATION_GUARD}"
            ),
            OracleError::NoFeasibleSchedule => write!(f, "no feasible commitment schedule"),
            OracleError::Solve {
                schedule_index,
                message,
            } => {
                write!(
                    f,
                    "inner solve failed on schedule {schedule_index}: {message}"
                )
            }
        }
    }
}

impl std::error::Error for OracleError {}

/// Direct check of the commitment constraints (logic, exclusion, initial
/// status, minimum up/down and their horizon tails) on binary arrays.
pub fn commitment_feasible(inst: &UcInstance, sched: &CommitmentSchedule) -> bool {
    let t_max = inst.horizon;
    for (g, gen) in inst.generators.iter().enumerate() {
        let (u, y, z) = (&sched.u[g], &sched.y[g], &sched.z[g]);
        let mut prev = gen.u0 as i32;
        for t in 0..t_max {
            // y - z = u_t - u_{t-1} and y + z <= 1
            if y[t] as i32 - z[t] as i32 != u[t] as i32 - prev {
                return false;
            }
            if y[t] + z[t] > 1 {
                return false;
            }
            prev = u[t] as i32;
        }

        if gen.kind != GenKind::Thermal {
            continue;
        }
        let tu = gen.min_up;
        let td = gen.min_down;
        if u.iter()
            .take(gen.init_up_time.min(t_max))
            .any(|&ut| ut != 1)
        {
            return false;
        }
        if u.iter()
            .take(gen.init_down_time.min(t_max))
            .any(|&ut| ut != 0)
        {
            return false;
        }
        if tu >= 1 {
            // on for tu periods after a startup; pinned on through T when the
            // window overruns the horizon
            for tt in gen.init_up_time + 1..=(t_max + 1).saturating_sub(tu) {
                let run: u32 = (tt..tt + tu).map(|t| u[t - 1] as u32).sum();
                if run < tu as u32 * y[tt - 1] as u32 {
                    return false;
                }
            }
            let tail_from = (t_max + 2).saturating_sub(tu).max(1);
            for tt in tail_from..=t_max {
                let sum: i32 = (tt..=t_max)
                    .map(|t| u[t - 1] as i32 - y[t - 1] as i32)
                    .sum();
                if sum < 0 {
                    return false;
                }
            }
        }
        if td >= 1 {
            for tt in gen.init_down_time + 1..=(t_max + 1).saturating_sub(td) {
                let off: u32 = (tt..tt + td).map(|t| 1 - u[t - 1] as u32).sum();
                if off < td as u32 * z[tt - 1] as u32 {
                    return false;
                }
            }
            let tail_from = (t_max + 2).saturating_sub(td).max(1);
            for tt in tail_from..=t_max {
                let sum: i32 = (tt..=t_max)
                    .map(|t| 1 - u[t - 1] as i32 - z[t - 1] as i32)
                    .sum();
                if sum < 0 {
                    return false;
                }
            }
        }
    }
    true
}

/// All commitment-feasible schedules in lexicographic order of the on/off
/// grid flattened by (generator, period).
pub fn enumerate_feasible_commitments(
    inst: &UcInstance,
) -> Result<Vec<CommitmentSchedule>, OracleError> {
    let cells = inst.n_gens() * inst.horizon;
    if cells > ENUMERATION_GUARD {
        return Err(OracleError::GuardExceeded { cells });
    }
    let t_max = inst.horizon;
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << cells) {
        let mut u = vec![vec![0u8; t_max]; inst.n_gens()];
        for i in 0..cells {
            // most significant enumeration bit is (g, t) = (0, 0)
            let bit = (mask >> (cells - 1 - i)) & 1;
            u[i / t_max][i % t_max] = bit as u8;
        }
        let sched = CommitmentSchedule::from_u(u, inst);
        if commitment_feasible(inst, &sched) {
            out.push(sched);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub objective: f64,
    pub schedule: CommitmentSchedule,
    /// Commitment-feasible schedules enumerated (including inner-infeasible
    /// ones under F1).
    pub n_schedules: usize,
}

/// Minimizes the inner conic value over every feasible schedule. Ties keep
/// the earliest schedule in enumeration order. Inner-infeasible schedules
/// (possible under F1) are skipped.
pub fn brute_force_optimum(
    inst: &UcInstance,
    variant: FormulationVariant,
    backend: Backend,
) -> Result<OracleResult, OracleError> {
    let schedules = enumerate_feasible_commitments(inst)?;
    let n_schedules = schedules.len();

    let evaluate =
        |(idx, sched): (usize, &CommitmentSchedule)| -> Result<(usize, f64), OracleError> {
            let spec = build_inner(inst, sched, variant).map_err(|e| OracleError::Solve {
                schedule_index: idx,
                message: e.to_string(),
            })?;
            let out = solve_continuous(&spec, backend).map_err(|e| OracleError::Solve {
                schedule_index: idx,
                message: e.to_string(),
            })?;
            match out.status {
                SolveStatus::Optimal => Ok((idx, out.objective)),
                SolveStatus::Infeasible => Ok((idx, f64::INFINITY)),
                other => Err(OracleError::Solve {
                    schedule_index: idx,
                    message: format!("solver status {other}"),
                }),
            }
        };

    #[cfg(feature = "parallel")]
    let results: Result<Vec<(usize, f64)>, OracleError> =
        schedules.par_iter().enumerate().map(evaluate).collect();
    #[cfg(not(feature = "parallel"))]
    let results: Result<Vec<(usize, f64)>, OracleError> =
        schedules.iter().enumerate().map(evaluate).collect();

    let best = results?
        .into_iter()
        .filter(|&(_, obj)| obj.is_finite())
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .ok_or(OracleError::NoFeasibleSchedule)?;

    Ok(OracleResult {
        objective: best.1,
        schedule: schedules[best.0].clone(),
        n_schedules,
    })
}

/// Golden-file payload: the instance fingerprint, the variant, the optimal
/// value and the optimal schedule.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GoldenRecord {
    pub instance_hash: String,
    pub variant: String,
    pub obj_star: f64,
    pub schedule: CommitmentSchedule,
}

impl GoldenRecord {
    pub fn new(inst: &UcInstance, variant: FormulationVariant, result: &OracleResult) -> Self {
        GoldenRecord {
            instance_hash: instance_hash(inst),
            variant: variant.to_string(),
            obj_star: result.objective,
            schedule: result.schedule.clone(),
        }
    }

    /// True when the record was produced from this exact instance/variant.
    pub fn matches(&self, inst: &UcInstance, variant: FormulationVariant) -> bool {
        self.instance_hash == instance_hash(inst) && self.variant == variant.to_string()
    }
}

/// FNV-1a over the canonical JSON encoding; stable across platforms and
/// toolchain versions, unlike the std hasher.
pub fn instance_hash(inst: &UcInstance) -> String {
    let bytes = serde_json::to_vec(inst).expect("instance serializes");
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}
