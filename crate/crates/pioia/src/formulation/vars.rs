//! Contiguous variable numbering for one instance.

use crate::model::UcInstance;

/// Direction of a line flow variable. `Forward` is the stored (from, to)
/// orientation, `Reverse` the opposite one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    Forward,
    Reverse,
}

impl Dir {
    pub fn index(self) -> usize {
        match self {
            Dir::Forward => 0,
            Dir::Reverse => 1,
        }
    }
}

pub const DIRS: [Dir; 2] = [Dir::Forward, Dir::Reverse];

/// Bijection between semantic coordinates and contiguous variable ids.
///
/// Layout: the commitment block (u, y, z) comes first so that the binary
/// partition is `0..x_len()`. The symmetric pair c_{m,n} shares the id of
/// c_{n,m}; s_{m,n} is the negation of s_{n,m} and also shares one id, with
/// the sign handled at row-construction time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableIndex {
    pub n_gens: usize,
    pub n_buses: usize,
    pub n_lines: usize,
    pub horizon: usize,
    pub epigraph: bool,
    off_p: usize,
    off_pbar: usize,
    off_q: usize,
    off_flow_p: usize,
    off_flow_q: usize,
    off_c_diag: usize,
    off_c_off: usize,
    off_s_off: usize,
    off_p_unserved: usize,
    off_q_unserved: usize,
    off_p_over: usize,
    off_q_over: usize,
    off_psi: usize,
    num_vars: usize,
}

impl VariableIndex {
    pub fn new(inst: &UcInstance, epigraph: bool) -> Self {
        let g = inst.n_gens();
        let n = inst.n_buses();
        let l = inst.n_lines();
        let t = inst.horizon;
        let gt = g * t;
        let nt = n * t;
        let lt = l * t;
        let off_p = 3 * gt;
        let off_pbar = off_p + gt;
        let off_q = off_pbar + gt;
        let off_flow_p = off_q + gt;
        let off_flow_q = off_flow_p + 2 * lt;
        let off_c_diag = off_flow_q + 2 * lt;
        let off_c_off = off_c_diag + nt;
        let off_s_off = off_c_off + lt;
        let off_p_unserved = off_s_off + lt;
        let off_q_unserved = off_p_unserved + nt;
        let off_p_over = off_q_unserved + nt;
        let off_q_over = off_p_over + nt;
        let off_psi = off_q_over + nt;
        let num_vars = off_psi + if epigraph { t } else { 0 };
        VariableIndex {
            n_gens: g,
            n_buses: n,
            n_lines: l,
            horizon: t,
            epigraph,
            off_p,
            off_pbar,
            off_q,
            off_flow_p,
            off_flow_q,
            off_c_diag,
            off_c_off,
            off_s_off,
            off_p_unserved,
            off_q_unserved,
            off_p_over,
            off_q_over,
            off_psi,
            num_vars,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Size of the commitment partition (ids `0..x_len()`).
    pub fn x_len(&self) -> usize {
        3 * self.n_gens * self.horizon
    }

    pub fn is_x(&self, id: usize) -> bool {
        id < self.x_len()
    }

    // All period arguments are 0-based.

    pub fn u(&self, g: usize, t: usize) -> usize {
        g * self.horizon + t
    }

    pub fn y(&self, g: usize, t: usize) -> usize {
        self.n_gens * self.horizon + g * self.horizon + t
    }

    pub fn z(&self, g: usize, t: usize) -> usize {
        2 * self.n_gens * self.horizon + g * self.horizon + t
    }

    pub fn p(&self, g: usize, t: usize) -> usize {
        self.off_p + g * self.horizon + t
    }

    pub fn p_bar(&self, g: usize, t: usize) -> usize {
        self.off_pbar + g * self.horizon + t
    }

    pub fn q(&self, g: usize, t: usize) -> usize {
        self.off_q + g * self.horizon + t
    }

    pub fn flow_p(&self, line: usize, dir: Dir, t: usize) -> usize {
        self.off_flow_p + (line * 2 + dir.index()) * self.horizon + t
    }

    pub fn flow_q(&self, line: usize, dir: Dir, t: usize) -> usize {
        self.off_flow_q + (line * 2 + dir.index()) * self.horizon + t
    }

    /// c_{n,n,t} for a bus.
    pub fn c_diag(&self, bus: usize, t: usize) -> usize {
        self.off_c_diag + bus * self.horizon + t
    }

    /// c_{n,m,t} for a line, shared by both orientations.
    pub fn c_off(&self, line: usize, t: usize) -> usize {
        self.off_c_off + line * self.horizon + t
    }

    /// s_{n,m,t} for a line in the stored orientation; the reverse
    /// orientation uses the same id negated.
    pub fn s_off(&self, line: usize, t: usize) -> usize {
        self.off_s_off + line * self.horizon + t
    }

    pub fn p_unserved(&self, bus: usize, t: usize) -> usize {
        self.off_p_unserved + bus * self.horizon + t
    }

    pub fn q_unserved(&self, bus: usize, t: usize) -> usize {
        self.off_q_unserved + bus * self.horizon + t
    }

    pub fn p_over(&self, bus: usize, t: usize) -> usize {
        self.off_p_over + bus * self.horizon + t
    }

    pub fn q_over(&self, bus: usize, t: usize) -> usize {
        self.off_q_over + bus * self.horizon + t
    }

    /// Epigraph variable for one period; only present when built with
    /// `epigraph = true`.
    pub fn psi(&self, t: usize) -> usize {
        debug_assert!(self.epigraph);
        self.off_psi + t
    }

    /// All (u, y, z) ids of one generator across the horizon.
    pub fn gen_x_ids(&self, g: usize) -> Vec<usize> {
        let mut ids = Vec::with_capacity(3 * self.horizon);
        for t in 0..self.horizon {
            ids.push(self.u(g, t));
            ids.push(self.y(g, t));
            ids.push(self.z(g, t));
        }
        ids
    }
}
