//! Solver framework for the second-order-cone-relaxed AC network-constrained
//! unit commitment problem (SOC-NCUC).
//!
//! The solver alternates a mixed-integer linear outer approximation with a
//! convex conic inner approximation, progressively enforcing integrality
//! (LP stage, integrality-generation stage, full MILP) and optionally
//! strengthening the outer model with per-period Benders cuts. Desk-scale
//! instances can be checked against a brute-force commitment-enumeration
//! oracle.

pub mod benders;
pub mod cli;
pub mod cuts;
pub mod formulation;
pub mod metrics;
pub mod model;
pub mod oia;
pub mod oracle;
pub mod progressive;
pub mod solver;
pub mod trace;
