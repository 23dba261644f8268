//! Synthetic instance generation and Gaussian load perturbation.

use super::{Bus, GenKind, Generator, Load, ModelError, ReserveReq, UcInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Scales every load by an independent draw of (1 + xi), xi ~ N(0, sigma^2).
/// Reactive demand is scaled by the same factor as the co-located active
/// demand, preserving the power factor.
pub fn perturb_loads(inst: &UcInstance, sigma: f64, seed: u64) -> UcInstance {
    perturb_loads_with(inst, sigma, seed, true)
}

/// [`perturb_loads`] with the reactive scaling made optional; `scale_q = false`
/// perturbs active demand only.
pub fn perturb_loads_with(inst: &UcInstance, sigma: f64, seed: u64, scale_q: bool) -> UcInstance {
    assert!(sigma >= 0.0, "sigma must be nonnegative");
    let mut out = inst.clone();
    if sigma == 0.0 {
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("valid normal");
    for load in &mut out.loads {
        let factor = 1.0 + normal.sample(&mut rng);
        load.p *= factor;
        if scale_q {
            load.q *= factor;
        }
    }
    out
}

/// Builds a valid desk-scale instance with a connected topology, demand kept
/// below 80% of total capacity and per-period reserve requirements at 110% of
/// area load. Deterministic for a fixed seed.
pub fn generate_synthetic(
    n_buses: usize,
    n_gens: usize,
    horizon: usize,
    seed: u64,
) -> Result<UcInstance, ModelError> {
    if n_buses < 1 || n_gens < 1 || horizon < 1 {
        return Err(ModelError::InfeasibleRequest(format!(
            "need n_buses >= 1, n_gens >= 1, horizon >= 1 (got {n_buses}, {n_gens}, {horizon})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let buses: Vec<Bus> = (0..n_buses)
        .map(|i| Bus {
            id: format!("b{i}"),
            v_min: 0.95,
            v_max: 1.05,
            area: "A1".to_string(),
        })
        .collect();

    // Ring for 3+, single edge for 2, none for 1. Line g/b use the
    // bus-admittance off-diagonal sign convention (g < 0, b > 0).
    let mut lines = Vec::new();
    if n_buses >= 2 {
        let n_lines = if n_buses == 2 { 1 } else { n_buses };
        for i in 0..n_lines {
            let from = i;
            let to = (i + 1) % n_buses;
            let g_series: f64 = rng.random_range(2.0..6.0);
            let x_over_r: f64 = rng.random_range(2.5..3.5);
            lines.push(Line2 {
                from: format!("b{from}"),
                to: format!("b{to}"),
                g: -g_series,
                b: g_series * x_over_r,
                b_shunt: rng.random_range(0.01..0.04),
                s_max: rng.random_range(1.0..2.0),
            });
        }
    }

    let mut generators = Vec::new();
    let mut total_pmax = 0.0;
    for i in 0..n_gens {
        let p_max: f64 = rng.random_range(0.6..1.2);
        total_pmax += p_max;
        let p_min = p_max * rng.random_range(0.05..0.15);
        let renewable = n_gens >= 2 && i == n_gens - 1 && rng.random_bool(0.25);
        let u0: u8 = if rng.random_bool(0.5) { 1 } else { 0 };
        let min_up = if horizon >= 2 && rng.random_bool(0.5) {
            2
        } else {
            1
        };
        let min_down = if horizon >= 2 && rng.random_bool(0.3) {
            2
        } else {
            1
        };
        // Only initial up-time is randomized; forced-off periods could make
        // the reserve rows unsatisfiable on single-generator instances.
        let init_up_time = if u0 == 1 && rng.random_bool(0.5) {
            1
        } else {
            0
        };
        let p0 = if u0 == 1 {
            rng.random_range(p_min..(0.4 * p_max).max(p_min * 1.01))
        } else {
            0.0
        };
        generators.push(Generator {
            id: format!("g{i}"),
            bus: format!("b{}", i % n_buses),
            kind: if renewable {
                GenKind::Renewable
            } else {
                GenKind::Thermal
            },
            p_min: if renewable { 0.0 } else { p_min },
            p_max,
            q_min: -0.2 * p_max,
            q_max: 0.6 * p_max,
            ramp_up: 0.6 * p_max,
            ramp_down: 0.6 * p_max,
            ramp_startup: p_max,
            ramp_shutdown: p_max,
            min_up: if renewable { 1 } else { min_up },
            min_down: if renewable { 1 } else { min_down },
            u0,
            p0,
            init_up_time: if renewable { 0 } else { init_up_time },
            init_down_time: 0,
            cost_fixed: rng.random_range(1.0..6.0),
            cost_startup: rng.random_range(3.0..15.0),
            cost_shutdown: rng.random_range(1.0..4.0),
            cost_variable: if renewable {
                rng.random_range(1.0..5.0)
            } else {
                rng.random_range(10.0..40.0)
            },
        });
    }

    // Demand sized so the reserve headroom (110% of load) stays reachable:
    // serving D plus 1.1*D of headroom needs about 2.1*D <= total capacity.
    let target_total = 0.22 * total_pmax;
    let shares: Vec<f64> = (0..n_buses).map(|_| rng.random_range(0.5..1.0)).collect();
    let share_sum: f64 = shares.iter().sum();
    let profile: Vec<f64> = (0..horizon).map(|_| rng.random_range(0.7..1.0)).collect();

    let mut loads = Vec::new();
    let mut reserves = Vec::new();
    for t in 1..=horizon {
        let mut area_load = 0.0;
        for (bi, share) in shares.iter().enumerate() {
            let p = target_total * share / share_sum * profile[t - 1];
            area_load += p;
            loads.push(Load {
                bus: format!("b{bi}"),
                t,
                p,
                q: 0.25 * p,
            });
        }
        reserves.push(ReserveReq {
            area: "A1".to_string(),
            t,
            requirement: 1.1 * area_load,
        });
    }

    let inst = UcInstance {
        base_mva: 100.0,
        horizon,
        buses,
        lines: lines
            .into_iter()
            .map(|l| super::Line {
                from: l.from,
                to: l.to,
                g: l.g,
                b: l.b,
                b_shunt: l.b_shunt,
                s_max: l.s_max,
            })
            .collect(),
        generators,
        loads,
        reserves,
        penalty: None,
    };
    debug_assert!(super::validate_instance(&inst).is_empty());
    Ok(inst)
}

struct Line2 {
    from: String,
    to: String,
    g: f64,
    b: f64,
    b_shunt: f64,
    s_max: f64,
}
