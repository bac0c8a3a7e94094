//! Link budget for the drone-to-UE downlink.
//!
//! Path loss follows `A + B * log10(d_km)` with the slant range expressed in
//! kilometers. Everything up to SNR is computed in dB; SINR is the one place
//! where powers are summed in milliwatts.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Distance, PointId, StreetGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Propagation {
    Los,
    #[default]
    Nlos,
}

#[derive(Debug, Error, PartialEq)]
pub enum RadioError {
    #[error("path loss needs a positive slant range, got {0} m")]
    NonPositiveDistance(f64),
    #[error("points {0} and {1} are not connected")]
    Unreachable(PointId, PointId),
    #[error("invalid radio config: {0}")]
    InvalidConfig(&'static str),
}

/// Radio parameters. Defaults are the published urban-macro values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioConfig {
    pub a_los: f64,
    pub b_los: f64,
    pub a_nlos: f64,
    pub b_nlos: f64,
    pub p_tx_dbm: f64,
    pub n0_dbm: f64,
    pub altitude_m: f64,
    pub alpha_db: f64,
    /// Propagation assumed for non-serving drones in SINR.
    pub interferer_mode: Propagation,
}

impl Default for RadioConfig {
    fn default() -> Self {
        Self {
            a_los: 103.8,
            b_los: 20.9,
            a_nlos: 145.4,
            b_nlos: 37.5,
            p_tx_dbm: 20.0,
            n0_dbm: -104.0,
            altitude_m: 50.0,
            alpha_db: 15.0,
            interferer_mode: Propagation::Nlos,
        }
    }
}

impl RadioConfig {
    pub fn validate(&self) -> Result<(), RadioError> {
        let all = [
            self.a_los,
            self.b_los,
            self.a_nlos,
            self.b_nlos,
            self.p_tx_dbm,
            self.n0_dbm,
            self.altitude_m,
            self.alpha_db,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(RadioError::InvalidConfig(
                "all radio parameters must be finite",
            ));
        }
        if self.b_los <= 0.0 || self.b_nlos <= 0.0 {
            return Err(RadioError::InvalidConfig(
                "path-loss slopes must be positive",
            ));
        }
        if self.altitude_m < 0.0 {
            return Err(RadioError::InvalidConfig("altitude must be non-negative"));
        }
        Ok(())
    }

    fn coefficients(&self, mode: Propagation) -> (f64, f64) {
        match mode {
            Propagation::Los => (self.a_los, self.b_los),
            Propagation::Nlos => (self.a_nlos, self.b_nlos),
        }
    }
}

/// Coverage radius implied by the SNR threshold under NLoS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    /// Largest graph distance that still meets the threshold, meters.
    pub g_max: f64,
    /// Slant range at which SNR equals the threshold, meters.
    pub slant_range: f64,
}

impl LinkBudget {
    pub fn covers(&self, graph_distance: Distance) -> bool {
        graph_distance.within(self.g_max)
    }
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Path loss in dB for a slant range in meters.
pub fn path_loss(slant_m: f64, mode: Propagation, cfg: &RadioConfig) -> Result<f64, RadioError> {
    if !(slant_m > 0.0) {
        return Err(RadioError::NonPositiveDistance(slant_m));
    }
    let (a, b) = cfg.coefficients(mode);
    Ok(a + b * (slant_m / 1000.0).log10())
}

/// Received power in dBm at a given slant range.
pub fn received_power_at(
    slant_m: f64,
    mode: Propagation,
    cfg: &RadioConfig,
) -> Result<f64, RadioError> {
    Ok(cfg.p_tx_dbm - path_loss(slant_m, mode, cfg)?)
}

/// Received power in dBm at UE point `ue` from a drone hovering above `drone`.
pub fn received_power(
    graph: &StreetGraph,
    drone: PointId,
    ue: PointId,
    mode: Propagation,
    cfg: &RadioConfig,
) -> Result<f64, RadioError> {
    let slant = graph
        .spatial_distance(drone, cfg.altitude_m, ue)
        .finite()
        .ok_or(RadioError::Unreachable(drone, ue))?;
    received_power_at(slant, mode, cfg)
}

pub fn snr(
    graph: &StreetGraph,
    drone: PointId,
    ue: PointId,
    mode: Propagation,
    cfg: &RadioConfig,
) -> Result<f64, RadioError> {
    Ok(received_power(graph, drone, ue, mode, cfg)? - cfg.n0_dbm)
}

/// Closed-form inversion of the NLoS link budget.
///
/// The slant range meeting `alpha` exactly is
/// `1000 * 10^((p_tx - n0 - alpha - A) / B)`; projecting out the altitude
/// gives the graph radius, floored at zero when the drone cannot serve even
/// the point directly below it.
pub fn compute_g_max(cfg: &RadioConfig) -> LinkBudget {
    let exponent = (cfg.p_tx_dbm - cfg.n0_dbm - cfg.alpha_db - cfg.a_nlos) / cfg.b_nlos;
    let slant_range = 1000.0 * 10f64.powf(exponent);
    let h = cfg.altitude_m;
    let g_max = if slant_range > h {
        (slant_range * slant_range - h * h).sqrt()
    } else {
        0.0
    };
    LinkBudget { g_max, slant_range }
}

/// SINR in dB from powers in dBm: `S / (sum(I) + N0)` in the linear domain.
pub fn sinr_from_powers(
    signal_dbm: f64,
    interferers_dbm: impl IntoIterator<Item = f64>,
    n0_dbm: f64,
) -> f64 {
    let interference: f64 = interferers_dbm.into_iter().map(dbm_to_mw).sum();
    mw_to_dbm(dbm_to_mw(signal_dbm) / (interference + dbm_to_mw(n0_dbm)))
}

/// SINR at `ue` served by `serving`, with every drone in `others` interfering.
///
/// `mode` applies to the serving link; interferers use
/// [`RadioConfig::interferer_mode`].
pub fn sinr(
    graph: &StreetGraph,
    ue: PointId,
    serving: PointId,
    others: &[PointId],
    mode: Propagation,
    cfg: &RadioConfig,
) -> Result<f64, RadioError> {
    let signal = received_power(graph, serving, ue, mode, cfg)?;
    let interferers = others
        .iter()
        .map(|&o| received_power(graph, o, ue, cfg.interferer_mode, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(sinr_from_powers(signal, interferers, cfg.n0_dbm))
}

/// How much the graph distance overstates path loss on an L-shaped route.
///
/// Two perpendicular street segments `a` and `b`: the graph distance between
/// the far ends is `a + b`, the straight line is `sqrt(a^2 + b^2)`. Returns
/// `PL(a + b) - PL(sqrt(a^2 + b^2))` in dB.
pub fn path_loss_gap(
    a: f64,
    b: f64,
    mode: Propagation,
    cfg: &RadioConfig,
) -> Result<f64, RadioError> {
    Ok(path_loss(a + b, mode, cfg)? - path_loss(a.hypot(b), mode, cfg)?)
}
