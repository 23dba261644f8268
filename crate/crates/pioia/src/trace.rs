//! Per-iteration run records and the trace CSV format.

use serde::Serialize;
use std::fmt;
use std::io::Write;

/// Which stage of the progressive pipeline emitted a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Lp,
    Ig,
    Oia,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stage::Lp => write!(f, "lp"),
            Stage::Ig => write!(f, "ig"),
            Stage::Oia => write!(f, "oia"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TraceRow {
    pub iter: usize,
    pub stage: Stage,
    pub wall_time_s: f64,
    pub lb: f64,
    pub ub: f64,
    pub gap: f64,
    pub soc_cuts: usize,
    pub cap_cuts: usize,
    pub benders_cuts: usize,
    pub n_binary: usize,
    pub mip_gap: f64,
    pub solver_limit: f64,
    pub status: String,
}

/// Append-only iteration trace. Pushing keeps the bound columns monotone
/// (lower bounds never decrease, upper bounds never increase) and the clock
/// strictly increasing.
#[derive(Debug, Clone, Default)]
pub struct RunTrace {
    rows: Vec<TraceRow>,
}

pub const CSV_HEADER: &str =
    "iter,stage,wall_time_s,lb,ub,gap,soc_cuts,cap_cuts,benders_cuts,n_binary,mip_gap,solver_limit,status";

impl RunTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rows(&self) -> &[TraceRow] {
        &self.rows
    }

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    pub fn push(&mut self, mut row: TraceRow) {
        if let Some(prev) = self.rows.last() {
            debug_assert!(
                row.lb >= prev.lb - 1e-12,
                "lb regressed: {} -> {}",
                prev.lb,
                row.lb
            );
            debug_assert!(
                row.ub <= prev.ub + 1e-12,
                "ub regressed: {} -> {}",
                prev.ub,
                row.ub
            );
            if row.wall_time_s <= prev.wall_time_s {
                row.wall_time_s = prev.wall_time_s + 1e-9;
            }
        }
        self.rows.push(row);
    }

    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.iter,
                r.stage,
                r.wall_time_s,
                r.lb,
                r.ub,
                r.gap,
                r.soc_cuts,
                r.cap_cuts,
                r.benders_cuts,
                r.n_binary,
                r.mip_gap,
                r.solver_limit,
                r.status
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to vec");
        String::from_utf8(buf).expect("csv is utf8")
    }
}
