//! Evaluation of a deployment: served ratio, spectral efficiency, capacity.
//!
//! UE-bearing points are visited in ascending id order and all sums are
//! sequential, so floating-point results are reproducible bit for bit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coverage::Deployment;
use crate::graph::{PointId, StreetGraph};
use crate::radio::{received_power_at, sinr_from_powers, Propagation, RadioConfig};

/// Propagation of the serving link, matching how the coverage radius is derived.
pub const SERVING_MODE: Propagation = Propagation::Nlos;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("no UE is served by the deployment")]
    NoServedUes,
    #[error("the deployment has no drones")]
    EmptyDeployment,
    #[error("area must be positive, got {0} km^2")]
    InvalidArea(f64),
}

/// Which UEs the ASE mean runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AseDenominator {
    /// Served UEs only.
    #[default]
    Served,
    /// Every UE in the slot; unserved ones contribute zero.
    All,
}

impl std::str::FromStr for AseDenominator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "served" => Ok(Self::Served),
            "all" => Ok(Self::All),
            _ => Err(format!(
                "unknown ASE denominator `{s}` (expected served or all)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    /// Total bandwidth of one drone, MHz.
    pub w_total_mhz: f64,
    /// Per-UE bandwidth cap, MHz.
    pub w_max_mhz: f64,
    /// Area for capacity normalization; `None` uses the scenario bounding box.
    pub area_km2: Option<f64>,
    pub ase_denominator: AseDenominator,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            w_total_mhz: 100.0,
            w_max_mhz: 2.0,
            area_km2: None,
            ase_denominator: AseDenominator::Served,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub served_ratio: f64,
    /// bits/s/Hz; `None` when no UE is served.
    pub ase: Option<f64>,
    /// `None` for an empty deployment.
    pub ue_per_drone: Option<f64>,
    /// Mbps per km^2.
    pub nc: f64,
    pub per_drone_load: Vec<u64>,
    pub area_km2: f64,
    pub served: u64,
    pub total: u64,
    pub drones: usize,
}

/// UEs within `g_max` of at least one drone.
pub fn covered_ues(
    deployment: &Deployment,
    counts: &[u64],
    graph: &StreetGraph,
    g_max: f64,
) -> u64 {
    counts
        .iter()
        .enumerate()
        .filter(|&(w, &c)| {
            c > 0
                && deployment
                    .positions
                    .iter()
                    .any(|&p| graph.distance(p, w).within(g_max))
        })
        .map(|(_, &c)| c)
        .sum()
}

/// Covered UEs over all UEs; 0 when the slot has no UEs.
pub fn served_ratio(
    deployment: &Deployment,
    counts: &[u64],
    graph: &StreetGraph,
    g_max: f64,
) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    covered_ues(deployment, counts, graph, g_max) as f64 / total as f64
}

pub fn ue_per_drone(
    deployment: &Deployment,
    counts: &[u64],
    graph: &StreetGraph,
    g_max: f64,
) -> Result<f64, MetricsError> {
    if deployment.positions.is_empty() {
        return Err(MetricsError::EmptyDeployment);
    }
    Ok(covered_ues(deployment, counts, graph, g_max) as f64 / deployment.positions.len() as f64)
}

/// SINR in dB at `ue` served by drone `serving`, every other drone interfering.
///
/// Interferers in another connected component contribute nothing.
pub fn ue_sinr(
    deployment: &Deployment,
    graph: &StreetGraph,
    ue: PointId,
    serving: usize,
    cfg: &RadioConfig,
) -> Option<f64> {
    let h = cfg.altitude_m;
    let slant = graph
        .spatial_distance(deployment.positions[serving], h, ue)
        .finite()?;
    let signal = received_power_at(slant, SERVING_MODE, cfg).ok()?;
    let interferers = deployment
        .positions
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != serving)
        .filter_map(|(_, &p)| graph.spatial_distance(p, h, ue).finite())
        .filter_map(|d| received_power_at(d, cfg.interferer_mode, cfg).ok());
    Some(sinr_from_powers(signal, interferers, cfg.n0_dbm))
}

/// Spectral efficiency `log2(1 + SINR)` of every assigned point, in id order.
fn spectral_efficiencies(
    deployment: &Deployment,
    graph: &StreetGraph,
    cfg: &RadioConfig,
) -> Vec<(PointId, usize, f64)> {
    let assigned: Vec<(PointId, usize)> = deployment
        .assignments
        .iter()
        .map(|(&w, &j)| (w, j))
        .collect();
    assigned
        .par_iter()
        .map(|&(w, j)| {
            let se = ue_sinr(deployment, graph, w, j, cfg)
                .map(|db| (1.0 + 10f64.powf(db / 10.0)).log2())
                .unwrap_or(0.0);
            (w, j, se)
        })
        .collect()
}

pub fn average_spectral_efficiency(
    deployment: &Deployment,
    counts: &[u64],
    graph: &StreetGraph,
    cfg: &RadioConfig,
    denominator: AseDenominator,
) -> Result<f64, MetricsError> {
    let per_point = spectral_efficiencies(deployment, graph, cfg);
    let served: u64 = per_point.iter().map(|&(w, _, _)| counts[w]).sum();
    if served == 0 {
        return Err(MetricsError::NoServedUes);
    }
    let sum: f64 = per_point
        .iter()
        .map(|&(w, _, se)| counts[w] as f64 * se)
        .sum();
    let m = match denominator {
        AseDenominator::Served => served,
        AseDenominator::All => counts.iter().sum(),
    };
    Ok(sum / m as f64)
}

/// Per-UE bandwidth `min(W / M_j, W_max)`.
pub fn per_ue_bandwidth(w_total_mhz: f64, w_max_mhz: f64, load: u64) -> f64 {
    if load == 0 {
        return 0.0;
    }
    (w_total_mhz / load as f64).min(w_max_mhz)
}

/// Sum over served UEs of `SE * W_i`, per km^2.
pub fn network_capacity(
    deployment: &Deployment,
    counts: &[u64],
    graph: &StreetGraph,
    cfg: &RadioConfig,
    w_total_mhz: f64,
    w_max_mhz: f64,
    area_km2: f64,
) -> Result<f64, MetricsError> {
    if !(area_km2 > 0.0) {
        return Err(MetricsError::InvalidArea(area_km2));
    }
    let loads = deployment.loads(counts);
    let bits: f64 = spectral_efficiencies(deployment, graph, cfg)
        .iter()
        .map(|&(w, j, se)| {
            counts[w] as f64 * se * per_ue_bandwidth(w_total_mhz, w_max_mhz, loads[j])
        })
        .sum();
    Ok(bits / area_km2)
}

pub fn evaluate(
    deployment: &Deployment,
    counts: &[u64],
    graph: &StreetGraph,
    g_max: f64,
    radio: &RadioConfig,
    cfg: &MetricsConfig,
    area_km2: f64,
) -> Result<MetricsReport, MetricsError> {
    let area_km2 = cfg.area_km2.unwrap_or(area_km2);
    let total: u64 = counts.iter().sum();
    let served = covered_ues(deployment, counts, graph, g_max);
    let ase =
        match average_spectral_efficiency(deployment, counts, graph, radio, cfg.ase_denominator) {
            Ok(v) => Some(v),
            Err(MetricsError::NoServedUes) => None,
            Err(e) => return Err(e),
        };
    Ok(MetricsReport {
        served_ratio: if total == 0 {
            0.0
        } else {
            served as f64 / total as f64
        },
        ase,
        ue_per_drone: ue_per_drone(deployment, counts, graph, g_max).ok(),
        nc: network_capacity(
            deployment,
            counts,
            graph,
            radio,
            cfg.w_total_mhz,
            cfg.w_max_mhz,
            area_km2,
        )?,
        per_drone_load: deployment.loads(counts),
        area_km2,
        served,
        total,
        drones: deployment.positions.len(),
    })
}

/// Bounding-box area of the graph's points in km^2.
pub fn bounding_box_area_km2(graph: &StreetGraph) -> f64 {
    let pts = graph.points();
    if pts.is_empty() {
        return 0.0;
    }
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for p in pts {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    (x1 - x0) * (y1 - y0) / 1e6
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{EdgeSpec, StreetPoint};
    use crate::radio::compute_g_max;
    use approx::assert_abs_diff_eq;

    fn path(xs: &[f64]) -> StreetGraph {
        let pts = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| StreetPoint::new(i, x, 0.0))
            .collect();
        let edges = (1..xs.len()).map(|i| EdgeSpec::new(i - 1, i)).collect();
        StreetGraph::build(pts, edges).unwrap()
    }

    #[test]
    fn served_ratio_examples() {
        let g = path(&[0.0, 50.0, 400.0, 450.0]);
        let counts = [3, 1, 2, 2];
        let all = Deployment::new(&g, vec![0, 2], &counts, 0, 95.0);
        assert_eq!(served_ratio(&all, &counts, &g, 95.0), 1.0);
        let none = Deployment::new(&g, vec![], &counts, 0, 95.0);
        assert_eq!(served_ratio(&none, &counts, &g, 95.0), 0.0);
        let half = Deployment::new(&g, vec![0], &counts, 0, 95.0);
        assert_eq!(served_ratio(&half, &counts, &g, 95.0), 0.5);
        assert_eq!(served_ratio(&half, &[0, 0, 0, 0], &g, 95.0), 0.0);
    }

    #[test]
    fn ue_per_drone_examples() {
        let g = path(&[0.0, 400.0, 410.0]);
        let one = Deployment::new(&g, vec![0], &[40, 0, 0], 0, 95.0);
        assert_eq!(ue_per_drone(&one, &[40, 0, 0], &g, 95.0).unwrap(), 40.0);
        let counts = [30, 10, 0];
        let two = Deployment::new(&g, vec![0, 1], &counts, 0, 95.0);
        assert_eq!(ue_per_drone(&two, &counts, &g, 95.0).unwrap(), 20.0);
        // Both drones cover point 1 and 2; union counts them once.
        let counts = [0, 10, 10];
        let overlap = Deployment::new(&g, vec![1, 2], &counts, 0, 95.0);
        assert_eq!(ue_per_drone(&overlap, &counts, &g, 95.0).unwrap(), 10.0);
        let empty = Deployment::new(&g, vec![], &counts, 0, 95.0);
        assert_eq!(
            ue_per_drone(&empty, &counts, &g, 95.0),
            Err(MetricsError::EmptyDeployment)
        );
    }

    #[test]
    fn ase_single_drone_at_threshold() {
        let cfg = RadioConfig::default();
        let g_max = compute_g_max(&cfg).g_max;
        let g = path(&[0.0, g_max]);
        let counts = [0, 4];
        let dep = Deployment::new(&g, vec![0], &counts, 0, g_max + 1e-9);
        let ase =
            average_spectral_efficiency(&dep, &counts, &g, &cfg, AseDenominator::Served).unwrap();
        // log2(1 + 10^1.5)
        assert_abs_diff_eq!(ase, 5.027_807_673_350_52, epsilon = 1e-6);
        let none = Deployment::new(&g, vec![0], &[0, 0], 0, g_max);
        assert_eq!(
            average_spectral_efficiency(&none, &[0, 0], &g, &cfg, AseDenominator::Served),
            Err(MetricsError::NoServedUes)
        );
    }

    #[test]
    fn ase_symmetric_pair() {
        let cfg = RadioConfig {
            n0_dbm: -250.0,
            ..RadioConfig::default()
        };
        let g = path(&[0.0, 40.0, 80.0]);
        let counts = [0, 1, 0];
        let dep = Deployment::new(&g, vec![0, 2], &counts, 0, 95.0);
        let ase =
            average_spectral_efficiency(&dep, &counts, &g, &cfg, AseDenominator::Served).unwrap();
        assert_abs_diff_eq!(ase, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn ase_interference_free_reduction() {
        let cfg = RadioConfig::default();
        let g = path(&[0.0, 20.0, 45.0, 70.0]);
        let counts = [2, 1, 3, 5];
        let dep = Deployment::new(&g, vec![1], &counts, 0, 95.0);
        let got =
            average_spectral_efficiency(&dep, &counts, &g, &cfg, AseDenominator::Served).unwrap();
        let mut num = 0.0;
        for (w, &c) in counts.iter().enumerate() {
            let slant = g.spatial_distance(1, cfg.altitude_m, w).finite().unwrap();
            let snr = received_power_at(slant, Propagation::Nlos, &cfg).unwrap() - cfg.n0_dbm;
            num += c as f64 * (1.0 + 10f64.powf(snr / 10.0)).log2();
        }
        assert_abs_diff_eq!(got, num / 11.0, epsilon = 1e-12);
        let all = average_spectral_efficiency(&dep, &[2, 1, 3, 5], &g, &cfg, AseDenominator::All)
            .unwrap();
        assert_abs_diff_eq!(all, got, epsilon = 1e-12);
    }

    #[test]
    fn bandwidth_split() {
        assert_abs_diff_eq!(
            per_ue_bandwidth(100.0, 2.0, 60),
            100.0 / 60.0,
            epsilon = 1e-12
        );
        assert_eq!(per_ue_bandwidth(100.0, 2.0, 10), 2.0);
        assert_eq!(per_ue_bandwidth(100.0, 2.0, 0), 0.0);
    }

    #[test]
    fn capacity_single_ue() {
        // One UE directly below the drone: W_i = 2 MHz (cap binds).
        let cfg = RadioConfig::default();
        let g = path(&[0.0]);
        let counts = [1];
        let dep = Deployment::new(&g, vec![0], &counts, 0, 95.0);
        let snr = received_power_at(cfg.altitude_m, Propagation::Nlos, &cfg).unwrap() - cfg.n0_dbm;
        let se = (1.0 + 10f64.powf(snr / 10.0)).log2();
        let nc = network_capacity(&dep, &counts, &g, &cfg, 100.0, 2.0, 1.0).unwrap();
        assert_abs_diff_eq!(nc, se * 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            network_capacity(&dep, &counts, &g, &cfg, 100.0, 2.0, 0.5).unwrap(),
            se * 4.0,
            epsilon = 1e-12
        );
        assert_eq!(
            network_capacity(&dep, &counts, &g, &cfg, 100.0, 2.0, 0.0),
            Err(MetricsError::InvalidArea(0.0))
        );
        let empty = Deployment::new(&g, vec![], &counts, 0, 95.0);
        assert_eq!(
            network_capacity(&empty, &counts, &g, &cfg, 100.0, 2.0, 1.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn doubling_density() {
        let cfg = RadioConfig::default();
        let g = path(&[0.0, 30.0, 60.0, 200.0, 230.0, 500.0]);
        let counts = [1, 2, 3, 4, 5, 6];
        let doubled: Vec<u64> = counts.iter().map(|c| c * 2).collect();
        let dep = Deployment::new(&g, vec![1, 4], &counts, 0, 95.0);
        let dep2 = Deployment::new(&g, vec![1, 4], &doubled, 0, 95.0);
        let a = evaluate(
            &dep,
            &counts,
            &g,
            95.0,
            &cfg,
            &MetricsConfig::default(),
            1.0,
        )
        .unwrap();
        let b = evaluate(
            &dep2,
            &doubled,
            &g,
            95.0,
            &cfg,
            &MetricsConfig::default(),
            1.0,
        )
        .unwrap();
        assert_eq!(a.served_ratio, b.served_ratio);
        assert_abs_diff_eq!(a.ase.unwrap(), b.ase.unwrap(), epsilon = 1e-12);
        assert_eq!(b.served, 2 * a.served);
        assert_eq!(a.per_drone_load.iter().sum::<u64>(), a.served);
    }

    #[test]
    fn capacity_invariant_under_drone_order() {
        let cfg = RadioConfig::default();
        let g = path(&[0.0, 30.0, 60.0, 90.0, 200.0, 230.0]);
        let counts = [1, 7, 3, 4, 2, 6];
        let a = Deployment::new(&g, vec![1, 4], &counts, 0, 95.0);
        let b = Deployment::new(&g, vec![4, 1], &counts, 0, 95.0);
        let nca = network_capacity(&a, &counts, &g, &cfg, 100.0, 2.0, 1.0).unwrap();
        let ncb = network_capacity(&b, &counts, &g, &cfg, 100.0, 2.0, 1.0).unwrap();
        assert_abs_diff_eq!(nca, ncb, epsilon = 1e-9);
    }

    #[test]
    fn served_ratio_grows_with_drones() {
        let g = path(&[0.0, 100.0, 200.0, 300.0, 400.0, 500.0]);
        let counts = [1, 2, 3, 4, 5, 6];
        let mut positions = Vec::new();
        let mut last = 0.0;
        for p in [3, 0, 5, 1] {
            positions.push(p);
            let dep = Deployment::new(&g, positions.clone(), &counts, 0, 95.0);
            let r = served_ratio(&dep, &counts, &g, 95.0);
            assert!(r >= last);
            last = r;
        }
    }

    #[test]
    fn bbox_area() {
        let pts = vec![
            StreetPoint::new(0, 0.0, 0.0),
            StreetPoint::new(1, 1000.0, 500.0),
        ];
        let g = StreetGraph::build(pts, vec![]).unwrap();
        assert_eq!(bounding_box_area_km2(&g), 0.5);
    }
}
