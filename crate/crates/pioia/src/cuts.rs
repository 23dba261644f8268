//! Cut generation, selection and pooling for the three cut families:
//! line-capacity cuts, second-order-cone cuts and time-block Benders cuts.

use crate::formulation::{Dir, LinearRow, RowSense, RowTag};
use crate::trace::Stage;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CutKind {
    Soc,
    Cap,
    Benders,
}

/// Constraint coordinate a cut was generated for; the parallelism filter
/// only compares cuts sharing the same key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CutKey {
    Line { line: usize, t: usize },
    DirectedLine { line: usize, dir: Dir, t: usize },
    Period { t: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutOrigin {
    pub key: CutKey,
    pub iteration: usize,
    pub stage: Stage,
}

#[derive(Debug)]
pub enum CutError {
    /// The generating point does not violate the constraint.
    NotViolated { residual: f64 },
    /// The generating values cannot define a cut direction.
    DegenerateGenerator,
}

impl fmt::Display for CutError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CutError::NotViolated { residual } => {
                write!(
                    f,
                    "generating point is not violated (residual {residual:.3e})"
                )
            }
            CutError::DegenerateGenerator => write!(f, "degenerate generating point"),
        }
    }
}

impl std::error::Error for CutError {}

/// A linear inequality `sum coeffs * vars <= rhs` over model variable ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    pub kind: CutKind,
    /// Sparse coefficients sorted by variable id.
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
    /// Euclidean norm of the coefficient vector.
    pub norm: f64,
    /// Coefficient vector normalized to unit length, aligned with `coeffs`.
    pub unit_direction: Vec<f64>,
    pub origin: CutOrigin,
}

impl Cut {
    fn new(kind: CutKind, mut coeffs: Vec<(usize, f64)>, rhs: f64, origin: CutOrigin) -> Self {
        coeffs.sort_unstable_by_key(|&(id, _)| id);
        let norm = coeffs.iter().map(|&(_, c)| c * c).sum::<f64>().sqrt();
        debug_assert!(norm > 0.0);
        let unit_direction = coeffs.iter().map(|&(_, c)| c / norm).collect();
        Cut {
            kind,
            coeffs,
            rhs,
            norm,
            unit_direction,
            origin,
        }
    }

    /// Benders optimality cut in the pool's `<=` convention.
    pub(crate) fn new_benders(coeffs: Vec<(usize, f64)>, rhs: f64, origin: CutOrigin) -> Self {
        Cut::new(CutKind::Benders, coeffs, rhs, origin)
    }

    pub fn lhs(&self, vals: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(id, c)| c * vals[id]).sum()
    }

    /// Positive when `vals` violates the cut.
    pub fn violation(&self, vals: &[f64]) -> f64 {
        self.lhs(vals) - self.rhs
    }

    /// Violation divided by the coefficient norm: the euclidean distance of
    /// the point past the cut hyperplane. Scale-free, unlike `violation`,
    /// which grows with the coefficient magnitudes (penalty-weighted Benders
    /// cuts have norms in the thousands).
    pub fn distance_violation(&self, vals: &[f64]) -> f64 {
        self.violation(vals) / self.norm
    }

    pub fn to_row(&self) -> LinearRow {
        let tag = match self.kind {
            CutKind::Soc => RowTag::SocCut,
            CutKind::Cap => RowTag::CapCut,
            CutKind::Benders => RowTag::BendersCut,
        };
        LinearRow {
            coeffs: self.coeffs.clone(),
            sense: RowSense::Le,
            rhs: self.rhs,
            tag,
        }
    }

    /// Cosine of the angle between two cuts' coefficient vectors.
    pub fn cosine(&self, other: &Cut) -> f64 {
        let mut dot = 0.0;
        let (mut i, mut j) = (0, 0);
        while i < self.coeffs.len() && j < other.coeffs.len() {
            match self.coeffs[i].0.cmp(&other.coeffs[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    dot += self.unit_direction[i] * other.unit_direction[j];
                    i += 1;
                    j += 1;
                }
            }
        }
        dot
    }
}

/// Supporting-hyperplane cut for a violated line-capacity point:
/// `pbar*p + qbar*q <= s_max * ||(pbar, qbar)||`. Every flow pair inside the
/// capacity circle satisfies it; the generating point always violates it.
pub fn line_capacity_cut(
    p_bar: f64,
    q_bar: f64,
    s_max: f64,
    ids: (usize, usize),
    origin: CutOrigin,
) -> Result<Cut, CutError> {
    let norm = (p_bar * p_bar + q_bar * q_bar).sqrt();
    if norm == 0.0 {
        return Err(CutError::DegenerateGenerator);
    }
    let residual = norm * norm - s_max * s_max;
    if residual <= 0.0 {
        return Err(CutError::NotViolated { residual });
    }
    Ok(Cut::new(
        CutKind::Cap,
        vec![(ids.0, p_bar), (ids.1, q_bar)],
        s_max * norm,
        origin,
    ))
}

/// Cut for a violated second-order-cone point (c_nm, s_nm, c_nn, c_mm):
///
/// `4*cb*c_nm + 4*sb*s_nm + (cnn - cmm - n0)*c_nn - (cnn - cmm + n0)*c_mm <= 0`
///
/// with `n0 = ||(2cb, 2sb, cnn, cmm)||`. That normalizer keeps the cut valid
/// for the cone but can leave a mildly violated generating point on the
/// feasible side (e.g. (sqrt(1.1), 0, 1, 1)); when that happens the
/// supporting-hyperplane normalizer `||(2cb, 2sb, cnn - cmm)||` is used
/// instead, which always separates.
pub fn soc_cut(
    c_bar: f64,
    s_bar: f64,
    c_nn_bar: f64,
    c_mm_bar: f64,
    ids: (usize, usize, usize, usize),
    origin: CutOrigin,
) -> Result<Cut, CutError> {
    let residual = c_bar * c_bar + s_bar * s_bar - c_nn_bar * c_mm_bar;
    if residual <= 0.0 {
        return Err(CutError::NotViolated { residual });
    }
    let gen_sq = 4.0 * (c_bar * c_bar + s_bar * s_bar) + c_nn_bar * c_nn_bar + c_mm_bar * c_mm_bar;
    if gen_sq == 0.0 {
        return Err(CutError::DegenerateGenerator);
    }

    let build = |n0: f64| {
        Cut::new(
            CutKind::Soc,
            vec![
                (ids.0, 4.0 * c_bar),
                (ids.1, 4.0 * s_bar),
                (ids.2, c_nn_bar - c_mm_bar - n0),
                (ids.3, -(c_nn_bar - c_mm_bar + n0)),
            ],
            0.0,
            origin,
        )
    };
    let value_at_generator = |cut: &Cut| {
        // evaluate without materializing a dense assignment
        let v = [c_bar, s_bar, c_nn_bar, c_mm_bar];
        let id_order = [ids.0, ids.1, ids.2, ids.3];
        cut.coeffs
            .iter()
            .map(|&(id, c)| {
                let k = id_order.iter().position(|&x| x == id).expect("cut id");
                c * v[k]
            })
            .sum::<f64>()
            - cut.rhs
    };

    let n0 = gen_sq.sqrt();
    let cut = build(n0);
    if value_at_generator(&cut) > 0.0 {
        return Ok(cut);
    }
    let d = c_nn_bar - c_mm_bar;
    let m0 = (4.0 * (c_bar * c_bar + s_bar * s_bar) + d * d).sqrt();
    if m0 == 0.0 {
        return Err(CutError::DegenerateGenerator);
    }
    let cut = build(m0);
    debug_assert!(value_at_generator(&cut) > 0.0);
    Ok(cut)
}

/// Keys whose residual exceeds `eps_tol`, sorted by decreasing residual with
/// ties in key order, truncated to ceil(p_cut * violated-count).
pub fn select_violated<K: Ord + Copy>(
    residuals: &BTreeMap<K, f64>,
    eps_tol: f64,
    p_cut: f64,
) -> Vec<K> {
    assert!(p_cut > 0.0 && p_cut <= 1.0, "p_cut must be in (0, 1]");
    let mut violated: Vec<(K, f64)> = residuals
        .iter()
        .filter(|&(_, &r)| r > eps_tol)
        .map(|(&k, &r)| (k, r))
        .collect();
    violated.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite residuals"));
    // the epsilon keeps ceil exact when p_cut * count is integral up to
    // floating-point noise (0.55 * 100 must give 55, not 56)
    let keep = (p_cut * violated.len() as f64 - 1e-9).ceil().max(0.0) as usize;
    violated.truncate(keep);
    violated.into_iter().map(|(k, _)| k).collect()
}

/// Cache of accepted cuts. Within one (kind, key) group, a new cut is
/// rejected when its direction is more than `1 - eps_par` cosine-parallel
/// to a stored cut.
#[derive(Debug, Clone)]
pub struct CutPool {
    eps_par: f64,
    cuts: Vec<Cut>,
}

impl CutPool {
    pub fn new(eps_par: f64) -> Self {
        CutPool {
            eps_par,
            cuts: Vec::new(),
        }
    }

    pub fn try_add(&mut self, cut: Cut) -> bool {
        let too_parallel = self
            .cuts
            .iter()
            .filter(|c| c.kind == cut.kind && c.origin.key == cut.origin.key)
            .any(|c| c.cosine(&cut) > 1.0 - self.eps_par);
        if too_parallel {
            return false;
        }
        self.cuts.push(cut);
        true
    }

    /// All cuts in insertion order.
    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    pub fn count(&self, kind: CutKind) -> usize {
        self.cuts.iter().filter(|c| c.kind == kind).count()
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    /// Largest violation of any pooled cut at an assignment.
    pub fn max_violation(&self, vals: &[f64]) -> f64 {
        self.cuts
            .iter()
            .map(|c| c.violation(vals))
            .fold(0.0, f64::max)
    }

    /// Largest scale-free (distance) violation of any pooled cut.
    pub fn max_distance_violation(&self, vals: &[f64]) -> f64 {
        self.cuts
            .iter()
            .map(|c| c.distance_violation(vals))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn origin() -> CutOrigin {
        CutOrigin {
            key: CutKey::Line { line: 0, t: 0 },
            iteration: 0,
            stage: Stage::Oia,
        }
    }

    fn cap_origin() -> CutOrigin {
        CutOrigin {
            key: CutKey::DirectedLine {
                line: 0,
                dir: Dir::Forward,
                t: 0,
            },
            iteration: 0,
            stage: Stage::Oia,
        }
    }

    fn eval(cut: &Cut, pairs: &[(usize, f64)]) -> f64 {
        cut.coeffs
            .iter()
            .map(|&(id, c)| {
                c * pairs
                    .iter()
                    .find(|&&(i, _)| i == id)
                    .map_or(0.0, |&(_, v)| v)
            })
            .sum::<f64>()
            - cut.rhs
    }

    #[test]
    fn cap_cut_along_axis() {
        // S = 1, generator (2, 0): cut 2p <= 2, violated at the generator,
        // tight at (1, 0)
        let cut = line_capacity_cut(2.0, 0.0, 1.0, (0, 1), cap_origin()).unwrap();
        assert_eq!(cut.coeffs, vec![(0, 2.0), (1, 0.0)]);
        assert!((cut.rhs - 2.0).abs() < 1e-15);
        assert!(eval(&cut, &[(0, 2.0), (1, 0.0)]) > 0.0);
        assert!(eval(&cut, &[(0, 1.0), (1, 0.0)]).abs() < 1e-15);
    }

    #[test]
    fn cap_cut_diagonal() {
        // S = 1, generator (1, 1): cut p + q <= sqrt(2)
        let cut = line_capacity_cut(1.0, 1.0, 1.0, (0, 1), cap_origin()).unwrap();
        assert!((cut.rhs - 2f64.sqrt()).abs() < 1e-12);
        assert!(eval(&cut, &[(0, 1.0), (1, 1.0)]) > 0.0);
    }

    #[test]
    fn cap_cut_requires_violation() {
        assert!(matches!(
            line_capacity_cut(0.5, 0.5, 1.0, (0, 1), cap_origin()),
            Err(CutError::NotViolated { .. })
        ));
        assert!(matches!(
            line_capacity_cut(0.0, 0.0, 1.0, (0, 1), cap_origin()),
            Err(CutError::DegenerateGenerator)
        ));
    }

    #[test]
    fn cap_cuts_valid_on_sampled_disk() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = 1.3;
        let mut cuts = Vec::new();
        while cuts.len() < 100 {
            let ang: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let r: f64 = s * rng.random_range(1.001..3.0);
            if let Ok(c) = line_capacity_cut(r * ang.cos(), r * ang.sin(), s, (0, 1), cap_origin())
            {
                cuts.push(c);
            }
        }
        for _ in 0..10_000 {
            let ang: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let r: f64 = s * rng.random_range(0.0..1.0f64).sqrt();
            let (p, q) = (r * ang.cos(), r * ang.sin());
            for c in &cuts {
                assert!(eval(c, &[(0, p), (1, q)]) <= 1e-9);
            }
        }
    }

    #[test]
    fn soc_cut_matches_pinned_example() {
        // generator (1, 0, 0.5, 0.5): n0 = sqrt(4.5), cut
        // 4 c_nm - sqrt(4.5) c_nn - sqrt(4.5) c_mm <= 0
        let n0 = 4.5f64.sqrt();
        let cut = soc_cut(1.0, 0.0, 0.5, 0.5, (0, 1, 2, 3), origin()).unwrap();
        assert!((cut.coeffs[0].1 - 4.0).abs() < 1e-12);
        assert!((cut.coeffs[1].1 - 0.0).abs() < 1e-12);
        assert!((cut.coeffs[2].1 + n0).abs() < 1e-12);
        assert!((cut.coeffs[3].1 + n0).abs() < 1e-12);
        // violated by its generator: 4 - sqrt(4.5) > 0
        let at_gen = eval(&cut, &[(0, 1.0), (1, 0.0), (2, 0.5), (3, 0.5)]);
        assert!((at_gen - (4.0 - n0)).abs() < 1e-12);
        // satisfied at the cone point (1, 0, 1, 1): 4 - 2 sqrt(4.5) < 0
        let at_cone = eval(&cut, &[(0, 1.0), (1, 0.0), (2, 1.0), (3, 1.0)]);
        assert!((at_cone - (4.0 - 2.0 * n0)).abs() < 1e-12);
        assert!(at_cone < 0.0);
    }

    #[test]
    fn soc_cut_boundary_point_rejected() {
        assert!(matches!(
            soc_cut(1.0, 0.0, 1.0, 1.0, (0, 1, 2, 3), origin()),
            Err(CutError::NotViolated { .. })
        ));
    }

    #[test]
    fn soc_cut_falls_back_to_separating_normalizer() {
        // (sqrt(1.1), 0, 1, 1) violates the cone but not the printed cut;
        // the fallback must separate it.
        let c = 1.1f64.sqrt();
        let cut = soc_cut(c, 0.0, 1.0, 1.0, (0, 1, 2, 3), origin()).unwrap();
        let at_gen = eval(&cut, &[(0, c), (1, 0.0), (2, 1.0), (3, 1.0)]);
        assert!(at_gen > 0.0, "fallback must separate, got {at_gen}");
    }

    #[test]
    fn soc_cuts_valid_on_sampled_cone() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut cuts = Vec::new();
        while cuts.len() < 100 {
            let cnn: f64 = rng.random_range(0.8..1.2);
            let cmm: f64 = rng.random_range(0.8..1.2);
            let ang: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let r = (cnn * cmm).sqrt() * rng.random_range(1.001..1.6);
            if let Ok(c) = soc_cut(
                r * ang.cos(),
                r * ang.sin(),
                cnn,
                cmm,
                (0, 1, 2, 3),
                origin(),
            ) {
                cuts.push(c);
            }
        }
        for _ in 0..10_000 {
            let cnn: f64 = rng.random_range(0.8..1.2);
            let cmm: f64 = rng.random_range(0.8..1.2);
            let ang: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let r = (cnn * cmm).sqrt() * rng.random_range(0.0..1.0f64).sqrt();
            let pt = [(0, r * ang.cos()), (1, r * ang.sin()), (2, cnn), (3, cmm)];
            for c in &cuts {
                assert!(eval(c, &pt) <= 1e-9);
            }
        }
    }

    #[test]
    fn selection_orders_and_truncates() {
        let mut residuals = BTreeMap::new();
        residuals.insert("a", 0.5);
        residuals.insert("b", 0.2);
        residuals.insert("c", 1e-7);
        // two violated keys, ceil(0.55 * 2) = 2
        assert_eq!(select_violated(&residuals, 1e-5, 0.55), vec!["a", "b"]);

        let none: BTreeMap<&str, f64> = residuals.iter().map(|(&k, _)| (k, 0.0)).collect();
        assert!(select_violated(&none, 1e-5, 0.55).is_empty());

        let many: BTreeMap<usize, f64> = (0..100).map(|i| (i, 1.0 + i as f64)).collect();
        let picked = select_violated(&many, 1e-5, 0.55);
        assert_eq!(picked.len(), 55);
        assert_eq!(picked[0], 99);
        assert_eq!(picked[54], 45);
    }

    #[test]
    fn pool_rejects_identical_and_near_parallel() {
        let mut pool = CutPool::new(5e-6);
        let cut = line_capacity_cut(2.0, 1.0, 1.0, (0, 1), cap_origin()).unwrap();
        assert!(pool.try_add(cut.clone()));
        assert!(!pool.try_add(cut.clone()), "identical cut must be rejected");

        // orthogonal directions are fine
        let ortho = line_capacity_cut(-1.0, 2.0, 1.0, (0, 1), cap_origin()).unwrap();
        assert!((cut.cosine(&ortho)).abs() < 1e-12);
        assert!(pool.try_add(ortho));
        assert_eq!(pool.count(CutKind::Cap), 2);
    }

    #[test]
    fn pool_threshold_is_one_minus_eps_par() {
        let eps = 1e-3;
        let mut pool = CutPool::new(eps);
        let base = line_capacity_cut(2.0, 0.0, 1.0, (0, 1), cap_origin()).unwrap();
        assert!(pool.try_add(base));
        // rotate by the angle whose cosine is exactly 1 - eps/2: too parallel
        let phi = (1.0 - eps / 2.0).acos();
        let near =
            line_capacity_cut(2.0 * phi.cos(), 2.0 * phi.sin(), 1.0, (0, 1), cap_origin()).unwrap();
        assert!(!pool.try_add(near));
        // a clearly larger angle passes
        let phi = (1.0 - 4.0 * eps).acos();
        let far =
            line_capacity_cut(2.0 * phi.cos(), 2.0 * phi.sin(), 1.0, (0, 1), cap_origin()).unwrap();
        assert!(pool.try_add(far));
    }

    #[test]
    fn pool_scopes_parallelism_by_key() {
        let mut pool = CutPool::new(5e-6);
        let a = line_capacity_cut(2.0, 0.0, 1.0, (0, 1), cap_origin()).unwrap();
        let mut other = cap_origin();
        other.key = CutKey::DirectedLine {
            line: 1,
            dir: Dir::Forward,
            t: 0,
        };
        let b = line_capacity_cut(2.0, 0.0, 1.0, (2, 3), other).unwrap();
        assert!(pool.try_add(a));
        assert!(
            pool.try_add(b),
            "same direction on a different key is allowed"
        );
    }

    proptest! {
        #[test]
        fn cap_cut_separates_and_is_valid(
            ang in 0.0..std::f64::consts::TAU,
            scale in 1.0001f64..4.0,
            pang in 0.0..std::f64::consts::TAU,
            pr in 0.0f64..1.0,
        ) {
            let s = 1.0;
            let (pb, qb) = (s * scale * ang.cos(), s * scale * ang.sin());
            let cut = line_capacity_cut(pb, qb, s, (0, 1), cap_origin()).unwrap();
            prop_assert!(eval(&cut, &[(0, pb), (1, qb)]) > 0.0);
            let r = s * pr.sqrt();
            prop_assert!(eval(&cut, &[(0, r * pang.cos()), (1, r * pang.sin())]) <= 1e-9);
        }

        #[test]
        fn soc_cut_always_separates_its_generator(
            cnn in 0.5f64..1.5,
            cmm in 0.5f64..1.5,
            ang in 0.0..std::f64::consts::TAU,
            scale in 1.0001f64..2.0,
        ) {
            let r = (cnn * cmm).sqrt() * scale;
            let (cb, sb) = (r * ang.cos(), r * ang.sin());
            let cut = soc_cut(cb, sb, cnn, cmm, (0, 1, 2, 3), origin()).unwrap();
            let at_gen = eval(&cut, &[(0, cb), (1, sb), (2, cnn), (3, cmm)]);
            prop_assert!(at_gen > 0.0);
        }

        #[test]
        fn soc_cut_valid_on_cone_points(
            cnn in 0.5f64..1.5,
            cmm in 0.5f64..1.5,
            ang in 0.0..std::f64::consts::TAU,
            scale in 1.0001f64..2.0,
            pnn in 0.5f64..1.5,
            pmm in 0.5f64..1.5,
            pang in 0.0..std::f64::consts::TAU,
            pfrac in 0.0f64..1.0,
        ) {
            let r = (cnn * cmm).sqrt() * scale;
            let cut = soc_cut(r * ang.cos(), r * ang.sin(), cnn, cmm, (0, 1, 2, 3), origin()).unwrap();
            let pr = (pnn * pmm).sqrt() * pfrac.sqrt();
            let pt = [(0, pr * pang.cos()), (1, pr * pang.sin()), (2, pnn), (3, pmm)];
            prop_assert!(eval(&cut, &pt) <= 1e-9);
        }
    }
}
