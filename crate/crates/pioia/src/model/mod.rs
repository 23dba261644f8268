//! Problem data model: buses, lines, generators, loads, reserves.
//!
//! All electrical quantities are stored per-unit on the instance-wide
//! `base_mva`; costs are per per-unit-hour. Instances are immutable after
//! construction and safe to share across threads.

mod io;
mod synthetic;

pub use io::{load_instance, write_instance};
pub use synthetic::{generate_synthetic, perturb_loads, perturb_loads_with};

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt;

#[derive(Debug)]
pub enum ModelError {
    Io(std::io::Error),
    Parse(serde_json::Error),
    /// The instance parsed but failed validation; one message per violation.
    Validation(Vec<String>),
    InfeasibleRequest(String),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::Io(e) => write!(f, "i/o error: {e}"),
            ModelError::Parse(e) => write!(f, "parse error: {e}"),
            ModelError::Validation(v) => {
                write!(
                    f,
                    "instance validation failed ({} violations): {}",
                    v.len(),
                    v.join("; ")
                )
            }
            ModelError::InfeasibleRequest(s) => write!(f, "infeasible request: {s}"),
        }
    }
}

impl std::error::Error for ModelError {}

impl From<std::io::Error> for ModelError {
    fn from(e: std::io::Error) -> Self {
        ModelError::Io(e)
    }
}

impl From<serde_json::Error> for ModelError {
    fn from(e: serde_json::Error) -> Self {
        ModelError::Parse(e)
    }
}

/// Network node with voltage magnitude bounds (per-unit) and a reserve-area tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: String,
    pub v_min: f64,
    pub v_max: f64,
    pub area: String,
}

/// Transmission line in per-unit admittance form.
///
/// `g`/`b` are the series conductance/susceptance, `b_shunt` is half of the
/// shunt susceptance, `s_max` the apparent-power capacity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub from: String,
    pub to: String,
    pub g: f64,
    pub b: f64,
    pub b_shunt: f64,
    pub s_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GenKind {
    Thermal,
    Renewable,
}

/// Generating unit. Minimum up/down times, ramping and initial up/down times
/// only constrain thermal units; renewables keep output bounds scaled by the
/// commitment variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub id: String,
    pub bus: String,
    pub kind: GenKind,
    pub p_min: f64,
    pub p_max: f64,
    pub q_min: f64,
    pub q_max: f64,
    pub ramp_up: f64,
    pub ramp_down: f64,
    pub ramp_startup: f64,
    pub ramp_shutdown: f64,
    pub min_up: usize,
    pub min_down: usize,
    /// Commitment status at t = 0.
    pub u0: u8,
    /// Output at t = 0.
    pub p0: f64,
    /// Periods the unit must remain on at the start of the horizon.
    pub init_up_time: usize,
    /// Periods the unit must remain off at the start of the horizon.
    pub init_down_time: usize,
    pub cost_fixed: f64,
    pub cost_startup: f64,
    pub cost_shutdown: f64,
    pub cost_variable: f64,
}

/// Demand at one bus in one period (1-based `t`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Load {
    pub bus: String,
    pub t: usize,
    pub p: f64,
    pub q: f64,
}

/// Spinning-reserve requirement for one area in one period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReserveReq {
    pub area: String,
    pub t: usize,
    pub requirement: f64,
}

/// A complete unit-commitment instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UcInstance {
    pub base_mva: f64,
    pub horizon: usize,
    pub buses: Vec<Bus>,
    pub lines: Vec<Line>,
    pub generators: Vec<Generator>,
    pub loads: Vec<Load>,
    pub reserves: Vec<ReserveReq>,
    /// Penalty cost for unserved or over-produced power. Defaults to
    /// 100 x the largest variable cost when absent from the file.
    #[serde(default)]
    pub penalty: Option<f64>,
}

impl UcInstance {
    pub fn n_buses(&self) -> usize {
        self.buses.len()
    }

    pub fn n_gens(&self) -> usize {
        self.generators.len()
    }

    pub fn n_lines(&self) -> usize {
        self.lines.len()
    }

    /// Penalty cost with the default applied.
    pub fn penalty_cost(&self) -> f64 {
        self.penalty.unwrap_or_else(|| {
            100.0
                * self
                    .generators
                    .iter()
                    .map(|g| g.cost_variable)
                    .fold(0.0, f64::max)
        })
    }

    pub fn bus_index(&self) -> HashMap<&str, usize> {
        self.buses
            .iter()
            .enumerate()
            .map(|(i, b)| (b.id.as_str(), i))
            .collect()
    }

    /// Generators connected to each bus, by index.
    pub fn gens_at_bus(&self) -> Vec<Vec<usize>> {
        let idx = self.bus_index();
        let mut out = vec![Vec::new(); self.buses.len()];
        for (gi, g) in self.generators.iter().enumerate() {
            if let Some(&bi) = idx.get(g.bus.as_str()) {
                out[bi].push(gi);
            }
        }
        out
    }

    /// Dense (bus, period) -> (p, q) demand, zero where no load entry exists.
    /// Periods are 1-based in the data; column `t-1` holds period `t`.
    pub fn load_matrix(&self) -> Vec<Vec<(f64, f64)>> {
        let idx = self.bus_index();
        let mut out = vec![vec![(0.0, 0.0); self.horizon]; self.buses.len()];
        for l in &self.loads {
            if let Some(&bi) = idx.get(l.bus.as_str()) {
                if l.t >= 1 && l.t <= self.horizon {
                    out[bi][l.t - 1] = (l.p, l.q);
                }
            }
        }
        out
    }

    /// Reserve areas in sorted order with member generator indices and
    /// per-period requirements. Membership is derived from bus areas.
    pub fn reserve_areas(&self) -> Vec<ReserveArea> {
        let bus_idx = self.bus_index();
        let mut areas: BTreeMap<&str, ReserveArea> = BTreeMap::new();
        for b in &self.buses {
            areas.entry(b.area.as_str()).or_insert_with(|| ReserveArea {
                area: b.area.clone(),
                members: Vec::new(),
                requirement: vec![0.0; self.horizon],
            });
        }
        for (gi, g) in self.generators.iter().enumerate() {
            if let Some(&bi) = bus_idx.get(g.bus.as_str()) {
                let area = self.buses[bi].area.as_str();
                if let Some(a) = areas.get_mut(area) {
                    a.members.push(gi);
                }
            }
        }
        for r in &self.reserves {
            if let Some(a) = areas.get_mut(r.area.as_str()) {
                if r.t >= 1 && r.t <= self.horizon {
                    a.requirement[r.t - 1] = r.requirement;
                }
            }
        }
        areas.into_values().collect()
    }

    /// Total demand over all buses in one 1-based period.
    pub fn total_demand(&self, t: usize) -> (f64, f64) {
        self.loads
            .iter()
            .filter(|l| l.t == t)
            .fold((0.0, 0.0), |(p, q), l| (p + l.p, q + l.q))
    }
}

/// Reserve area with derived membership.
#[derive(Debug, Clone)]
pub struct ReserveArea {
    pub area: String,
    pub members: Vec<usize>,
    pub requirement: Vec<f64>,
}

/// Binary commitment values per generator and period: the on/off status `u`,
/// startup indicator `y` and shutdown indicator `z`. Indexed `[gen][t-1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitmentSchedule {
    pub u: Vec<Vec<u8>>,
    pub y: Vec<Vec<u8>>,
    pub z: Vec<Vec<u8>>,
}

impl CommitmentSchedule {
    /// Derives startup/shutdown indicators from an on/off pattern and the
    /// initial statuses. This is the unique completion satisfying the
    /// commitment logic when one exists.
    pub fn from_u(u: Vec<Vec<u8>>, inst: &UcInstance) -> Self {
        let mut y = Vec::with_capacity(u.len());
        let mut z = Vec::with_capacity(u.len());
        for (gi, ug) in u.iter().enumerate() {
            let u0 = inst.generators[gi].u0;
            let mut yg = vec![0u8; ug.len()];
            let mut zg = vec![0u8; ug.len()];
            let mut prev = u0;
            for (t, &ut) in ug.iter().enumerate() {
                if ut > prev {
                    yg[t] = 1;
                } else if ut < prev {
                    zg[t] = 1;
                }
                prev = ut;
            }
            y.push(yg);
            z.push(zg);
        }
        CommitmentSchedule { u, y, z }
    }
}

/// Checks every type invariant; returns one message per violation.
/// An empty result means the instance is structurally sound.
pub fn validate_instance(inst: &UcInstance) -> Vec<String> {
    let mut v = Vec::new();

    if inst.horizon < 1 {
        v.push("instance: horizon must be >= 1".to_string());
    }
    if inst.base_mva <= 0.0 {
        v.push("instance: base_mva must be positive".to_string());
    }

    let mut seen_bus: HashMap<&str, usize> = HashMap::new();
    for b in &inst.buses {
        if seen_bus.insert(b.id.as_str(), 1).is_some() {
            v.push(format!("bus {}: duplicate id", b.id));
        }
        if b.v_min <= 0.0 {
            v.push(format!("bus {}: v_min must be positive", b.id));
        }
        if b.v_min > b.v_max {
            v.push(format!("bus {}: v_min > v_max", b.id));
        }
    }
    let bus_idx = inst.bus_index();

    let mut seen_pair: HashMap<(String, String), usize> = HashMap::new();
    for (li, l) in inst.lines.iter().enumerate() {
        if l.from == l.to {
            v.push(format!(
                "line {li} ({}-{}): endpoints must differ",
                l.from, l.to
            ));
        }
        if l.s_max <= 0.0 {
            v.push(format!(
                "line {li} ({}-{}): s_max must be positive",
                l.from, l.to
            ));
        }
        for end in [&l.from, &l.to] {
            if !bus_idx.contains_key(end.as_str()) {
                v.push(format!(
                    "line {li} ({}-{}): unknown bus {end}",
                    l.from, l.to
                ));
            }
        }
        let key = if l.from <= l.to {
            (l.from.clone(), l.to.clone())
        } else {
            (l.to.clone(), l.from.clone())
        };
        if seen_pair.insert(key, li).is_some() {
            v.push(format!(
                "line {li} ({}-{}): duplicate bus pair",
                l.from, l.to
            ));
        }
    }

    let mut seen_gen: HashMap<&str, usize> = HashMap::new();
    for g in &inst.generators {
        if seen_gen.insert(g.id.as_str(), 1).is_some() {
            v.push(format!("generator {}: duplicate id", g.id));
        }
        if !bus_idx.contains_key(g.bus.as_str()) {
            v.push(format!("generator {}: unknown bus {}", g.id, g.bus));
        }
        if g.p_min > g.p_max {
            v.push(format!("generator {}: p_min > p_max", g.id));
        }
        if g.q_min > g.q_max {
            v.push(format!("generator {}: q_min > q_max", g.id));
        }
        if g.init_up_time > 0 && g.init_down_time > 0 {
            v.push(format!("generator {}: L*F = 0 violated", g.id));
        }
        if g.init_up_time > 0 && g.u0 != 1 {
            v.push(format!(
                "generator {}: init_up_time > 0 requires u0 = 1",
                g.id
            ));
        }
        if g.init_down_time > 0 && g.u0 != 0 {
            v.push(format!(
                "generator {}: init_down_time > 0 requires u0 = 0",
                g.id
            ));
        }
        if g.u0 > 1 {
            v.push(format!("generator {}: u0 must be 0 or 1", g.id));
        }
        for (name, r) in [
            ("ramp_up", g.ramp_up),
            ("ramp_down", g.ramp_down),
            ("ramp_startup", g.ramp_startup),
            ("ramp_shutdown", g.ramp_shutdown),
        ] {
            if r < 0.0 {
                v.push(format!("generator {}: {name} must be nonnegative", g.id));
            }
        }
    }

    // Every (bus, t) must carry exactly one load record.
    let mut load_count: HashMap<(&str, usize), usize> = HashMap::new();
    for l in &inst.loads {
        if !bus_idx.contains_key(l.bus.as_str()) {
            v.push(format!("load at ({}, t={}): unknown bus", l.bus, l.t));
            continue;
        }
        if l.t < 1 || l.t > inst.horizon {
            v.push(format!(
                "load at ({}, t={}): period out of range",
                l.bus, l.t
            ));
            continue;
        }
        *load_count.entry((l.bus.as_str(), l.t)).or_insert(0) += 1;
    }
    for b in &inst.buses {
        for t in 1..=inst.horizon {
            match load_count.get(&(b.id.as_str(), t)) {
                None => v.push(format!("load at ({}, t={t}): missing", b.id)),
                Some(1) => {}
                Some(n) => v.push(format!("load at ({}, t={t}): {n} duplicate records", b.id)),
            }
        }
    }

    let known_areas: std::collections::HashSet<&str> =
        inst.buses.iter().map(|b| b.area.as_str()).collect();
    for r in &inst.reserves {
        if !known_areas.contains(r.area.as_str()) {
            v.push(format!("reserve ({}, t={}): unknown area", r.area, r.t));
        }
        if r.t < 1 || r.t > inst.horizon {
            v.push(format!(
                "reserve ({}, t={}): period out of range",
                r.area, r.t
            ));
        }
    }

    v
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn single_bus_instance(t: usize) -> UcInstance {
        UcInstance {
            base_mva: 100.0,
            horizon: t,
            buses: vec![Bus {
                id: "b0".into(),
                v_min: 0.95,
                v_max: 1.05,
                area: "A1".into(),
            }],
            lines: vec![],
            generators: vec![Generator {
                id: "g0".into(),
                bus: "b0".into(),
                kind: GenKind::Thermal,
                p_min: 0.1,
                p_max: 1.0,
                q_min: -0.3,
                q_max: 0.5,
                ramp_up: 1.0,
                ramp_down: 1.0,
                ramp_startup: 1.0,
                ramp_shutdown: 1.0,
                min_up: 1,
                min_down: 1,
                u0: 0,
                p0: 0.0,
                init_up_time: 0,
                init_down_time: 0,
                cost_fixed: 2.0,
                cost_startup: 5.0,
                cost_shutdown: 1.0,
                cost_variable: 20.0,
            }],
            loads: (1..=t)
                .map(|tt| Load {
                    bus: "b0".into(),
                    t: tt,
                    p: 0.0,
                    q: 0.0,
                })
                .collect(),
            reserves: vec![],
            penalty: Some(2000.0),
        }
    }

    #[test]
    fn valid_fixture_passes() {
        let inst = single_bus_instance(2);
        assert!(validate_instance(&inst).is_empty());
    }

    #[test]
    fn pmin_above_pmax_flagged() {
        let mut inst = single_bus_instance(1);
        inst.generators[0].p_min = 2.0;
        let v = validate_instance(&inst);
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("g0"));
        assert!(v[0].contains("p_min > p_max"));
    }

    #[test]
    fn unknown_load_bus_flagged() {
        let mut inst = single_bus_instance(1);
        inst.loads.push(Load {
            bus: "nope".into(),
            t: 1,
            p: 0.1,
            q: 0.0,
        });
        let v = validate_instance(&inst);
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("unknown bus"));
    }

    #[test]
    fn initial_times_must_not_overlap() {
        let mut inst = single_bus_instance(2);
        inst.generators[0].u0 = 1;
        inst.generators[0].init_up_time = 2;
        inst.generators[0].init_down_time = 1;
        let v = validate_instance(&inst);
        assert!(v.iter().any(|m| m.contains("L*F = 0")));
    }

    #[test]
    fn penalty_default_is_100x_max_variable_cost() {
        let mut inst = single_bus_instance(1);
        inst.penalty = None;
        assert_eq!(inst.penalty_cost(), 2000.0);
    }

    #[test]
    fn derived_transitions_match_status_changes() {
        let inst = single_bus_instance(4);
        let sched = CommitmentSchedule::from_u(vec![vec![1, 1, 0, 1]], &inst);
        assert_eq!(sched.y[0], vec![1, 0, 0, 1]);
        assert_eq!(sched.z[0], vec![0, 0, 1, 0]);
    }
}
