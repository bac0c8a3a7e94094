//! Battery duty cycle: recharge reachability radius and recharge grouping.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{PointId, StreetGraph};

#[derive(Debug, Error, PartialEq)]
pub enum EnergyError {
    #[error("no recharge points configured")]
    NoRechargePoints,
    #[error("recharge point {0} is not a street point")]
    UnknownRechargePoint(PointId),
    #[error("invalid energy config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergyConfig {
    pub speed_mps: f64,
    pub lambda_s: f64,
    pub lambda_f: f64,
    pub lambda_r: f64,
    pub slot_seconds: f64,
    pub pole_height_m: f64,
    /// Energy consumed per slot.
    pub p_consume: f64,
    /// Energy recharged per slot, same unit as `p_consume`.
    pub q_recharge: f64,
    pub recharge_point_ids: Vec<PointId>,
    /// Hover altitude; taken from the radio section when a run config is resolved.
    #[serde(skip)]
    pub altitude_m: f64,
}

impl Default for EnergyConfig {
    fn default() -> Self {
        Self {
            speed_mps: 6.0,
            lambda_s: 0.45,
            lambda_f: 0.05,
            lambda_r: 0.50,
            slot_seconds: 3600.0,
            pole_height_m: 10.0,
            p_consume: 1.0,
            q_recharge: 1.0,
            recharge_point_ids: Vec::new(),
            altitude_m: 50.0,
        }
    }
}

impl EnergyConfig {
    pub fn validate(&self) -> Result<(), EnergyError> {
        let bad = |m: &str| Err(EnergyError::InvalidConfig(m.to_string()));
        let fractions = [self.lambda_s, self.lambda_f, self.lambda_r];
        if fractions.iter().any(|f| !(0.0..=1.0).contains(f)) {
            return bad("duty-cycle fractions must lie in [0, 1]");
        }
        if (fractions.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return bad("lambda_s + lambda_f + lambda_r must equal 1");
        }
        if !(self.speed_mps > 0.0) || !(self.slot_seconds > 0.0) {
            return bad("speed and slot length must be positive");
        }
        if !(self.p_consume > 0.0) || !(self.q_recharge > 0.0) {
            return bad("consumption and recharge power must be positive");
        }
        if !(0.0..=self.altitude_m).contains(&self.pole_height_m) {
            return bad("pole height must lie in [0, altitude]");
        }
        Ok(())
    }
}

/// Maximum graph distance from a recharge pole that still leaves the
/// serving share of the slot intact.
///
/// The flying budget `s * lambda_f * slot` pays for `2 * (g + h - h_R)`,
/// which gives `g_R = s * lambda_f * slot / 2 + h_R - h`, floored at zero.
pub fn compute_g_r(cfg: &EnergyConfig) -> f64 {
    let raw =
        0.5 * cfg.speed_mps * cfg.lambda_f * cfg.slot_seconds + cfg.pole_height_m - cfg.altitude_m;
    if raw < 0.0 {
        log::warn!("flying budget cannot cover the descent to the pole (g_R = {raw} m); no position is reachable");
        return 0.0;
    }
    raw
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RechargeGroups {
    /// Fewest drones that must be recharging at any time.
    pub n_min: usize,
    /// Number of groups taking turns at the poles.
    pub group_count: usize,
}

/// Smallest `n` with `p * (k - n) <= q * n`, and `floor((q + p) / q)` groups.
pub fn recharge_groups(k: usize, p: f64, q: f64) -> RechargeGroups {
    // Linear scan keeps the bound exact where q/(q+p)*k would round.
    let n_min = (0..=k)
        .find(|&n| p * (k - n) as f64 <= q * n as f64)
        .unwrap_or(k);
    let group_count = ((q + p) / q).floor() as usize;
    RechargeGroups { n_min, group_count }
}

/// Round-robin group index for each drone in pick order.
pub fn group_assignment(drones: usize, group_count: usize) -> Vec<usize> {
    let groups = group_count.max(1);
    (0..drones).map(|i| i % groups).collect()
}

/// Nearest recharge point to `v` by graph distance, ties to the smaller id.
pub fn nearest_recharge(
    graph: &StreetGraph,
    v: PointId,
    recharge_points: &[PointId],
) -> Option<(PointId, f64)> {
    let mut best: Option<(PointId, f64)> = None;
    for &r in recharge_points {
        if let Some(d) = graph.distance(v, r).finite() {
            let better = match best {
                None => true,
                Some((br, bd)) => d < bd || (d == bd && r < br),
            };
            if better {
                best = Some((r, d));
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RechargeCheck {
    pub feasible: bool,
    /// Nearest reachable pole and its graph distance; `None` if no pole is connected.
    pub nearest: Option<(PointId, f64)>,
}

pub fn validate_recharge_points(
    graph: &StreetGraph,
    points: &[PointId],
) -> Result<(), EnergyError> {
    if points.is_empty() {
        return Err(EnergyError::NoRechargePoints);
    }
    match points.iter().find(|&&r| !graph.contains(r)) {
        Some(&r) => Err(EnergyError::UnknownRechargePoint(r)),
        None => Ok(()),
    }
}

/// Whether a drone serving at `v` can reach a pole within `g_R`.
pub fn check_recharge_feasible(
    graph: &StreetGraph,
    v: PointId,
    cfg: &EnergyConfig,
) -> Result<RechargeCheck, EnergyError> {
    check_recharge_within(graph, v, &cfg.recharge_point_ids, compute_g_r(cfg))
}

pub fn check_recharge_within(
    graph: &StreetGraph,
    v: PointId,
    recharge_points: &[PointId],
    g_r: f64,
) -> Result<RechargeCheck, EnergyError> {
    validate_recharge_points(graph, recharge_points)?;
    let nearest = nearest_recharge(graph, v, recharge_points);
    Ok(RechargeCheck {
        feasible: nearest.is_some_and(|(_, d)| d <= g_r),
        nearest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::covered_set;
    use crate::graph::{EdgeSpec, StreetPoint};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn with_speed(s: f64) -> EnergyConfig {
        EnergyConfig {
            speed_mps: s,
            ..EnergyConfig::default()
        }
    }

    #[test]
    fn g_r_examples() {
        assert_abs_diff_eq!(compute_g_r(&with_speed(6.0)), 500.0, epsilon = 1e-9);
        assert_abs_diff_eq!(compute_g_r(&with_speed(4.0)), 320.0, epsilon = 1e-9);
        let grounded = EnergyConfig {
            lambda_s: 0.5,
            lambda_f: 0.0,
            ..EnergyConfig::default()
        };
        assert_eq!(compute_g_r(&grounded), 0.0);
    }

    #[test]
    fn group_examples() {
        for k in 1..20 {
            assert_eq!(
                recharge_groups(k, 1.0, 1.0),
                RechargeGroups {
                    n_min: k.div_ceil(2),
                    group_count: 2
                }
            );
        }
        assert_eq!(
            recharge_groups(6, 2.0, 1.0),
            RechargeGroups {
                n_min: 4,
                group_count: 3
            }
        );
        let fast = recharge_groups(10, 0.01, 1.0);
        assert_eq!(fast.group_count, 1);
        assert_eq!(fast.n_min, 1);
        assert_eq!(group_assignment(5, 2), vec![0, 1, 0, 1, 0]);
    }

    #[test]
    fn validation() {
        assert!(EnergyConfig::default().validate().is_ok());
        let bad = EnergyConfig {
            lambda_r: 0.6,
            ..EnergyConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = EnergyConfig {
            pole_height_m: 60.0,
            ..EnergyConfig::default()
        };
        assert!(bad.validate().is_err());
        assert!(with_speed(0.0).validate().is_err());
    }

    fn grid(rows: usize, cols: usize, spacing: f64) -> StreetGraph {
        let mut pts = Vec::new();
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let id = r * cols + c;
                pts.push(StreetPoint::new(id, c as f64 * spacing, r as f64 * spacing));
                if c + 1 < cols {
                    edges.push(EdgeSpec::new(id, id + 1));
                }
                if r + 1 < rows {
                    edges.push(EdgeSpec::new(id, id + cols));
                }
            }
        }
        StreetGraph::build(pts, edges).unwrap()
    }

    #[test]
    fn feasibility_examples() {
        let g = grid(3, 3, 100.0);
        let cfg = EnergyConfig {
            recharge_point_ids: vec![0],
            ..with_speed(4.0)
        };
        let at_pole = check_recharge_feasible(&g, 0, &cfg).unwrap();
        assert!(at_pole.feasible);
        assert_eq!(at_pole.nearest, Some((0, 0.0)));
        assert!(!check_recharge_within(&g, 1, &[0], 0.0).unwrap().feasible);
        assert_eq!(
            check_recharge_within(&g, 1, &[], 10.0),
            Err(EnergyError::NoRechargePoints)
        );
        assert_eq!(
            check_recharge_within(&g, 1, &[42], 10.0),
            Err(EnergyError::UnknownRechargePoint(42))
        );
    }

    #[test]
    fn corner_poles_match_covered_sets() {
        // 11 x 15 grid at 50 m, poles at the four corners, g_R = 320 m.
        let (rows, cols) = (11, 15);
        let g = grid(rows, cols, 50.0);
        let corners = vec![0, cols - 1, (rows - 1) * cols, rows * cols - 1];
        let cfg = EnergyConfig {
            recharge_point_ids: corners.clone(),
            ..with_speed(4.0)
        };
        let g_r = compute_g_r(&cfg);
        assert_eq!(g_r, 320.0);
        let union: BTreeSet<_> = corners
            .iter()
            .flat_map(|&r| covered_set(&g, r, g_r))
            .collect();
        for v in 0..g.len() {
            assert_eq!(
                check_recharge_feasible(&g, v, &cfg).unwrap().feasible,
                union.contains(&v),
                "v={v}"
            );
        }
        assert!(union.len() < g.len());
    }

    proptest! {
        #[test]
        fn n_min_is_tight(k in 1usize..200, p in 0.01..100.0f64, q in 0.01..100.0f64) {
            let RechargeGroups { n_min, group_count } = recharge_groups(k, p, q);
            prop_assert!(p * (k - n_min) as f64 <= q * n_min as f64);
            if n_min > 0 {
                let n = n_min - 1;
                prop_assert!(p * (k - n) as f64 > q * n as f64);
            }
            prop_assert!(group_count >= 1);
        }

        #[test]
        fn g_r_monotone(
            s in 0.5..20.0f64, ds in 0.0..5.0f64,
            lf in 0.0..0.5f64, dlf in 0.0..0.2f64,
            slot in 60.0..7200.0f64, dslot in 0.0..600.0f64,
            hr in 0.0..20.0f64, dhr in 0.0..10.0f64,
            h in 30.0..120.0f64, dh in 0.0..30.0f64,
        ) {
            let base = EnergyConfig {
                speed_mps: s, lambda_f: lf, slot_seconds: slot, pole_height_m: hr, altitude_m: h,
                ..EnergyConfig::default()
            };
            let g0 = compute_g_r(&base);
            let with = |f: &dyn Fn(&mut EnergyConfig)| {
                let mut c = base.clone();
                f(&mut c);
                compute_g_r(&c)
            };
            prop_assert!(with(&|c| c.speed_mps += ds) >= g0);
            prop_assert!(with(&|c| c.lambda_f += dlf) >= g0);
            prop_assert!(with(&|c| c.slot_seconds += dslot) >= g0);
            prop_assert!(with(&|c| c.pole_height_m += dhr) >= g0);
            prop_assert!(with(&|c| c.altitude_m += dh) <= g0);
        }
    }
}
