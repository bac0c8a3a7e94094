//! Drone placement solvers.
//!
//! * [`solve_sdd`]: exhaustive search for the single best position.
//! * [`solve_kdd`]: greedy max-k-cover with a strict inter-drone spacing `beta`.
//! * [`solve_ekdd`]: as kDD, and every drone must also be within `g_r` of a
//!   recharge pole.
//! * [`solve_mindd`]: greedy set cover until a fraction `gamma` of all UEs is
//!   served.
//!
//! The greedy loops follow the textbook procedure literally. Each iteration
//! takes the unused candidate with the largest marginal gain and removes it
//! from the pool; it is committed only if it passes the constraints. A
//! rejected candidate still consumes an iteration, so kDD/EkDD can end with
//! fewer than `k` drones. [`PlannerConfig::fill`] switches to iterating until
//! `k` drones are placed or the pool runs dry.
//!
//! Ties on marginal gain go to the smallest point id. The inner argmax runs
//! in parallel and reduces on `(gain, -id)`, so results do not depend on the
//! thread count.
//!
//! [`brute_force_kdd`] and [`brute_force_mindd`] are exhaustive oracles for
//! small instances. They compute coverage straight from the distance matrix
//! and refuse to run past a subset-count guard.

use std::cmp::Reverse;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coverage::{CoverageError, CoverageIndex, CoveredMask, DensityProfile, Deployment};
use crate::energy::{nearest_recharge, validate_recharge_points, EnergyError};
use crate::graph::{PointId, StreetGraph};

/// Default cap on the number of subsets an oracle may enumerate.
pub const DEFAULT_SUBSET_GUARD: u64 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Sdd,
    Kdd,
    Ekdd,
    Mindd,
}

impl Problem {
    pub const ALL: [Problem; 4] = [Problem::Sdd, Problem::Kdd, Problem::Ekdd, Problem::Mindd];

    pub fn as_str(self) -> &'static str {
        match self {
            Problem::Sdd => "sdd",
            Problem::Kdd => "kdd",
            Problem::Ekdd => "ekdd",
            Problem::Mindd => "mindd",
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Problem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Problem::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown problem `{s}` (expected sdd, kdd, ekdd or mindd)"))
    }
}

#[derive(Debug, Error)]
pub enum PlannerError {
    #[error("the street graph is empty")]
    EmptyGraph,
    #[error("invalid planner config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Coverage(#[from] CoverageError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(
        "instance too large for exhaustive search: {subsets} subsets exceed the guard of {guard}"
    )]
    TooLarge { subsets: u64, guard: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    /// Drone budget for kDD/EkDD.
    pub k: usize,
    /// Strict minimum graph distance between two drones, meters.
    pub beta: f64,
    /// Target served fraction for MinDD, in (0, 1].
    pub gamma: f64,
    /// Keep iterating after constraint rejections until `k` drones are placed.
    pub fill: bool,
    /// Recharge reachability radius for EkDD; derived from the energy section.
    #[serde(skip)]
    pub g_r: f64,
    /// Recharge pole positions for EkDD; taken from the energy section.
    #[serde(skip)]
    pub recharge_points: Vec<PointId>,
    /// Serving share of a slot; scales the reported EkDD objective only.
    #[serde(skip)]
    pub serving_fraction: Option<f64>,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            k: 1,
            beta: 0.0,
            gamma: 0.9,
            fill: false,
            g_r: f64::INFINITY,
            recharge_points: Vec::new(),
            serving_fraction: None,
        }
    }
}

impl PlannerConfig {
    pub fn kdd(k: usize, beta: f64) -> Self {
        Self {
            k,
            beta,
            ..Self::default()
        }
    }

    pub fn ekdd(k: usize, beta: f64, g_r: f64, recharge_points: Vec<PointId>) -> Self {
        Self {
            k,
            beta,
            g_r,
            recharge_points,
            ..Self::default()
        }
    }

    pub fn mindd(gamma: f64, beta: f64) -> Self {
        Self {
            gamma,
            beta,
            ..Self::default()
        }
    }

    fn check_k(&self) -> Result<(), PlannerError> {
        if self.k == 0 {
            return Err(PlannerError::InvalidConfig("k must be at least 1".into()));
        }
        self.check_beta()
    }

    fn check_beta(&self) -> Result<(), PlannerError> {
        if !(self.beta >= 0.0) {
            return Err(PlannerError::InvalidConfig(
                "beta must be non-negative".into(),
            ));
        }
        Ok(())
    }

    fn check_gamma(&self) -> Result<(), PlannerError> {
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(PlannerError::InvalidConfig(
                "gamma must lie in (0, 1]".into(),
            ));
        }
        self.check_beta()
    }

    fn check_recharge(&self, graph: &StreetGraph) -> Result<(), PlannerError> {
        if !(self.g_r >= 0.0) {
            return Err(PlannerError::InvalidConfig(
                "g_r must be non-negative".into(),
            ));
        }
        validate_recharge_points(graph, &self.recharge_points)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    BetaViolation,
    RechargeViolation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub point: PointId,
    pub reason: SkipReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerResult {
    pub problem: Problem,
    pub deployment: Deployment,
    /// UEs covered by the union of the committed drones.
    pub covered_count: u64,
    /// UEs in the slot.
    pub total_ues: u64,
    /// Marginal gain of each committed drone, in pick order.
    pub per_pick_marginals: Vec<u64>,
    pub skipped: Vec<Skipped>,
    /// `serving_fraction * covered_count` for EkDD when a fraction is known.
    pub objective: Option<f64>,
}

impl PlannerResult {
    pub fn positions(&self) -> &[PointId] {
        &self.deployment.positions
    }

    pub fn drones(&self) -> usize {
        self.deployment.positions.len()
    }

    pub fn served_ratio(&self) -> f64 {
        if self.total_ues == 0 {
            0.0
        } else {
            self.covered_count as f64 / self.total_ues as f64
        }
    }
}

/// MinDD could not reach its target before the candidate pool ran out.
#[derive(Debug, Clone, Error)]
#[error("coverage target of {target} UEs unreachable; best achieved {} of {} with {} drones", best.covered_count, best.total_ues, best.drones())]
pub struct Infeasible {
    pub target: f64,
    pub best: Box<PlannerResult>,
}

#[derive(Debug, Error)]
pub enum MinddError {
    #[error(transparent)]
    Planner(#[from] PlannerError),
    #[error(transparent)]
    Infeasible(#[from] Infeasible),
}

/// Solver bound to one graph and coverage radius; reusable across slots
/// and configurations.
pub struct Planner<'g> {
    graph: &'g StreetGraph,
    index: CoverageIndex,
}

impl<'g> Planner<'g> {
    pub fn new(graph: &'g StreetGraph, g_max: f64) -> Self {
        Self {
            graph,
            index: CoverageIndex::new(graph, g_max),
        }
    }

    pub fn graph(&self) -> &StreetGraph {
        self.graph
    }

    pub fn index(&self) -> &CoverageIndex {
        &self.index
    }

    pub fn g_max(&self) -> f64 {
        self.index.g_max()
    }

    pub fn sdd(
        &self,
        density: &DensityProfile,
        slot: usize,
    ) -> Result<PlannerResult, PlannerError> {
        if self.graph.is_empty() {
            return Err(PlannerError::EmptyGraph);
        }
        let counts = density.slot(slot)?;
        let (best, gain) = (0..self.graph.len())
            .into_par_iter()
            .map(|v| (self.index.benefit(v, counts), Reverse(v)))
            .max()
            .map(|(gain, Reverse(v))| (v, gain))
            .expect("non-empty graph");
        Ok(self.finish(
            Problem::Sdd,
            counts,
            slot,
            vec![best],
            vec![gain],
            Vec::new(),
            None,
        ))
    }

    pub fn kdd(
        &self,
        density: &DensityProfile,
        slot: usize,
        cfg: &PlannerConfig,
    ) -> Result<PlannerResult, PlannerError> {
        cfg.check_k()?;
        self.budgeted(Problem::Kdd, density, slot, cfg, None)
    }

    pub fn ekdd(
        &self,
        density: &DensityProfile,
        slot: usize,
        cfg: &PlannerConfig,
    ) -> Result<PlannerResult, PlannerError> {
        cfg.check_k()?;
        cfg.check_recharge(self.graph)?;
        self.budgeted(
            Problem::Ekdd,
            density,
            slot,
            cfg,
            Some((&cfg.recharge_points, cfg.g_r)),
        )
    }

    pub fn mindd(
        &self,
        density: &DensityProfile,
        slot: usize,
        cfg: &PlannerConfig,
    ) -> Result<PlannerResult, MinddError> {
        cfg.check_gamma()?;
        if self.graph.is_empty() {
            return Err(PlannerError::EmptyGraph.into());
        }
        let counts = density.slot(slot).map_err(PlannerError::from)?;
        let total: u64 = counts.iter().sum();
        let target = cfg.gamma * total as f64;
        let mut run = GreedyRun::new(self, counts, cfg.beta, None);
        while (run.covered as f64) < target {
            match run.step() {
                Some(Step::Committed { gain: 0 }) | None => {
                    // Marginal gains only shrink, so nothing left can help.
                    if run.marginals.last() == Some(&0) {
                        run.retract_last();
                    }
                    let best = self.finish(
                        Problem::Mindd,
                        counts,
                        slot,
                        run.positions,
                        run.marginals,
                        run.skipped,
                        None,
                    );
                    return Err(Infeasible {
                        target,
                        best: Box::new(best),
                    }
                    .into());
                }
                Some(_) => {}
            }
        }
        Ok(self.finish(
            Problem::Mindd,
            counts,
            slot,
            run.positions,
            run.marginals,
            run.skipped,
            None,
        ))
    }

    fn budgeted(
        &self,
        problem: Problem,
        density: &DensityProfile,
        slot: usize,
        cfg: &PlannerConfig,
        recharge: Option<(&[PointId], f64)>,
    ) -> Result<PlannerResult, PlannerError> {
        if self.graph.is_empty() {
            return Err(PlannerError::EmptyGraph);
        }
        let counts = density.slot(slot)?;
        let mut run = GreedyRun::new(self, counts, cfg.beta, recharge);
        if cfg.fill {
            while run.positions.len() < cfg.k && run.step().is_some() {}
        } else {
            for _ in 0..cfg.k {
                if run.step().is_none() {
                    break;
                }
            }
        }
        let objective = match problem {
            Problem::Ekdd => cfg.serving_fraction.map(|f| f * run.covered as f64),
            _ => None,
        };
        Ok(self.finish(
            problem,
            counts,
            slot,
            run.positions,
            run.marginals,
            run.skipped,
            objective,
        ))
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        &self,
        problem: Problem,
        counts: &[u64],
        slot: usize,
        positions: Vec<PointId>,
        marginals: Vec<u64>,
        skipped: Vec<Skipped>,
        objective: Option<f64>,
    ) -> PlannerResult {
        let deployment = Deployment::new(self.graph, positions, counts, slot, self.g_max());
        PlannerResult {
            problem,
            deployment,
            covered_count: marginals.iter().sum(),
            total_ues: counts.iter().sum(),
            per_pick_marginals: marginals,
            skipped,
            objective,
        }
    }
}

enum Step {
    Committed { gain: u64 },
    Rejected,
}

struct GreedyRun<'a> {
    graph: &'a StreetGraph,
    index: &'a CoverageIndex,
    counts: &'a [u64],
    beta: f64,
    recharge: Option<(&'a [PointId], f64)>,
    available: Vec<bool>,
    mask: CoveredMask,
    covered: u64,
    positions: Vec<PointId>,
    marginals: Vec<u64>,
    skipped: Vec<Skipped>,
}

impl<'a> GreedyRun<'a> {
    fn new(
        planner: &'a Planner<'_>,
        counts: &'a [u64],
        beta: f64,
        recharge: Option<(&'a [PointId], f64)>,
    ) -> Self {
        let n = planner.graph.len();
        Self {
            graph: planner.graph,
            index: &planner.index,
            counts,
            beta,
            recharge,
            available: vec![true; n],
            mask: CoveredMask::new(n),
            covered: 0,
            positions: Vec::new(),
            marginals: Vec::new(),
            skipped: Vec::new(),
        }
    }

    /// One iteration of the greedy loop; `None` once the pool is empty.
    fn step(&mut self) -> Option<Step> {
        let (gain, Reverse(v)) = self
            .available
            .par_iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(v, _)| (self.index.marginal(v, &self.mask, self.counts), Reverse(v)))
            .max()?;
        self.available[v] = false;

        if self
            .positions
            .iter()
            .any(|&w| !self.graph.distance(v, w).exceeds(self.beta))
        {
            self.skipped.push(Skipped {
                point: v,
                reason: SkipReason::BetaViolation,
            });
            return Some(Step::Rejected);
        }
        if let Some((poles, g_r)) = self.recharge {
            if !nearest_recharge(self.graph, v, poles).is_some_and(|(_, d)| d <= g_r) {
                self.skipped.push(Skipped {
                    point: v,
                    reason: SkipReason::RechargeViolation,
                });
                return Some(Step::Rejected);
            }
        }
        let gained = self.mask.cover(self.index.members(v), self.counts);
        debug_assert_eq!(gained, gain);
        self.covered += gained;
        self.positions.push(v);
        self.marginals.push(gained);
        Some(Step::Committed { gain: gained })
    }

    /// Drops a zero-gain commit; the mask is unchanged by it.
    fn retract_last(&mut self) {
        if self.marginals.last() == Some(&0) {
            self.marginals.pop();
            self.positions.pop();
        }
    }
}

pub fn solve_sdd(
    graph: &StreetGraph,
    density: &DensityProfile,
    slot: usize,
    g_max: f64,
) -> Result<PlannerResult, PlannerError> {
    Planner::new(graph, g_max).sdd(density, slot)
}

pub fn solve_kdd(
    graph: &StreetGraph,
    density: &DensityProfile,
    slot: usize,
    g_max: f64,
    cfg: &PlannerConfig,
) -> Result<PlannerResult, PlannerError> {
    Planner::new(graph, g_max).kdd(density, slot, cfg)
}

pub fn solve_ekdd(
    graph: &StreetGraph,
    density: &DensityProfile,
    slot: usize,
    g_max: f64,
    cfg: &PlannerConfig,
) -> Result<PlannerResult, PlannerError> {
    Planner::new(graph, g_max).ekdd(density, slot, cfg)
}

pub fn solve_mindd(
    graph: &StreetGraph,
    density: &DensityProfile,
    slot: usize,
    g_max: f64,
    cfg: &PlannerConfig,
) -> Result<PlannerResult, MinddError> {
    Planner::new(graph, g_max).mindd(density, slot, cfg)
}

/// A constraint broken by a deployment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    DuplicatePosition(PointId),
    TooClose {
        a: PointId,
        b: PointId,
        distance: Option<f64>,
    },
    OutOfRechargeReach {
        point: PointId,
        nearest: Option<f64>,
    },
    UnknownPoint(PointId),
}

/// Post-hoc audit of a deployment against spacing and recharge constraints.
///
/// Recomputes every pairwise distance and pole distance from the graph; it
/// shares no state with the solvers.
pub fn check_feasibility(
    graph: &StreetGraph,
    positions: &[PointId],
    beta: f64,
    recharge: Option<(&[PointId], f64)>,
) -> Vec<Violation> {
    let mut out = Vec::new();
    if let Some(&p) = positions.iter().find(|&&p| !graph.contains(p)) {
        out.push(Violation::UnknownPoint(p));
        return out;
    }
    for (i, &a) in positions.iter().enumerate() {
        for &b in &positions[i + 1..] {
            if a == b {
                out.push(Violation::DuplicatePosition(a));
                continue;
            }
            let d = graph.distance(a, b);
            if !d.exceeds(beta) {
                out.push(Violation::TooClose {
                    a,
                    b,
                    distance: d.finite(),
                });
            }
        }
        if let Some((poles, g_r)) = recharge {
            let nearest = poles
                .iter()
                .filter_map(|&r| graph.distance(a, r).finite())
                .fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.min(d))));
            if !nearest.is_some_and(|d| d <= g_r) {
                out.push(Violation::OutOfRechargeReach { point: a, nearest });
            }
        }
    }
    out
}

/// Exact optimum of kDD (or EkDD) over constraint-feasible subsets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KddOptimum {
    pub covered: u64,
    /// Lexicographically smallest optimal subset.
    pub subset: Vec<PointId>,
    /// Set when no feasible subset of size `k` exists; the optimum is then
    /// taken over the largest feasible size.
    pub diagnostic: Option<String>,
}

/// Exact optimum of MinDD.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinddOptimum {
    /// Minimum drone count, `None` if no feasible subset reaches the target.
    pub k_star: Option<usize>,
    pub subset: Vec<PointId>,
    pub covered: u64,
    pub target: f64,
}

/// Number of subsets of size `<= k` of `n` items, saturating.
pub fn subsets_up_to(n: usize, k: usize) -> u64 {
    (0..=k.min(n)).fold(0u64, |acc, s| acc.saturating_add(binomial(n, s)))
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

struct Oracle<'a> {
    graph: &'a StreetGraph,
    counts: &'a [u64],
    beta: f64,
    // covers[v]: points within g_max of v, read straight off the matrix.
    covers: Vec<Vec<PointId>>,
    candidates: Vec<PointId>,
}

impl<'a> Oracle<'a> {
    fn new(
        graph: &'a StreetGraph,
        counts: &'a [u64],
        g_max: f64,
        beta: f64,
        recharge: Option<(&[PointId], f64)>,
    ) -> Self {
        let n = graph.len();
        let covers = (0..n)
            .map(|v| {
                (0..n)
                    .filter(|&w| graph.distance(v, w).within(g_max))
                    .collect()
            })
            .collect();
        let candidates = (0..n)
            .filter(|&v| match recharge {
                None => true,
                Some((poles, g_r)) => poles.iter().any(|&r| graph.distance(v, r).within(g_r)),
            })
            .collect();
        Self {
            graph,
            counts,
            beta,
            covers,
            candidates,
        }
    }

    fn coverage(&self, subset: &[PointId]) -> u64 {
        let mut seen = vec![false; self.graph.len()];
        let mut total = 0;
        for &v in subset {
            for &w in &self.covers[v] {
                if !seen[w] {
                    seen[w] = true;
                    total += self.counts[w];
                }
            }
        }
        total
    }

    fn compatible(&self, subset: &[PointId], v: PointId) -> bool {
        subset
            .iter()
            .all(|&w| self.graph.distance(v, w).exceeds(self.beta))
    }

    /// Visits every feasible subset of size `<= max_size` in lexicographic order.
    fn enumerate(&self, max_size: usize, visit: &mut impl FnMut(&[PointId])) {
        let mut current = Vec::with_capacity(max_size);
        self.descend(0, max_size, &mut current, visit);
    }

    fn descend(
        &self,
        from: usize,
        max_size: usize,
        current: &mut Vec<PointId>,
        visit: &mut impl FnMut(&[PointId]),
    ) {
        visit(current);
        if current.len() == max_size {
            return;
        }
        for i in from..self.candidates.len() {
            let v = self.candidates[i];
            if self.compatible(current, v) {
                current.push(v);
                self.descend(i + 1, max_size, current, visit);
                current.pop();
            }
        }
    }
}

/// Exhaustive kDD optimum. With `with_recharge`, candidates are restricted
/// to points within `cfg.g_r` of a recharge pole (EkDD).
pub fn brute_force_kdd(
    graph: &StreetGraph,
    density: &DensityProfile,
    slot: usize,
    g_max: f64,
    cfg: &PlannerConfig,
    with_recharge: bool,
    guard: u64,
) -> Result<KddOptimum, PlannerError> {
    cfg.check_k()?;
    if with_recharge {
        cfg.check_recharge(graph)?;
    }
    let counts = density.slot(slot)?;
    let subsets = subsets_up_to(graph.len(), cfg.k);
    if subsets > guard {
        return Err(PlannerError::TooLarge { subsets, guard });
    }
    let recharge = with_recharge.then_some((cfg.recharge_points.as_slice(), cfg.g_r));
    let oracle = Oracle::new(graph, counts, g_max, cfg.beta, recharge);

    // best[s] = (coverage, subset) over feasible subsets of size s.
    let mut best: Vec<Option<(u64, Vec<PointId>)>> = vec![None; cfg.k + 1];
    oracle.enumerate(cfg.k, &mut |subset| {
        let value = oracle.coverage(subset);
        let slot = &mut best[subset.len()];
        if slot.as_ref().is_none_or(|(b, _)| value > *b) {
            *slot = Some((value, subset.to_vec()));
        }
    });
    let size = (0..=cfg.k).rev().find(|&s| best[s].is_some()).unwrap_or(0);
    let (covered, subset) = best[size].take().unwrap_or_default();
    let diagnostic = (size < cfg.k).then(|| {
        format!(
            "no feasible subset of size {}; optimum taken over size {size}",
            cfg.k
        )
    });
    Ok(KddOptimum {
        covered,
        subset,
        diagnostic,
    })
}

/// Exhaustive MinDD optimum by iterative deepening on the subset size.
pub fn brute_force_mindd(
    graph: &StreetGraph,
    density: &DensityProfile,
    slot: usize,
    g_max: f64,
    cfg: &PlannerConfig,
    guard: u64,
) -> Result<MinddOptimum, PlannerError> {
    cfg.check_gamma()?;
    let counts = density.slot(slot)?;
    let total: u64 = counts.iter().sum();
    let target = cfg.gamma * total as f64;
    let oracle = Oracle::new(graph, counts, g_max, cfg.beta, None);
    let mut spent = 0u64;
    let mut best_covered = 0;
    for size in 0..=graph.len() {
        spent = spent.saturating_add(binomial(graph.len(), size));
        if spent > guard {
            return Err(PlannerError::TooLarge {
                subsets: spent,
                guard,
            });
        }
        let mut found: Option<(u64, Vec<PointId>)> = None;
        let mut any_of_size = false;
        oracle.enumerate(size, &mut |subset| {
            if subset.len() != size || found.is_some() {
                return;
            }
            any_of_size = true;
            let value = oracle.coverage(subset);
            best_covered = best_covered.max(value);
            if value as f64 >= target {
                found = Some((value, subset.to_vec()));
            }
        });
        if let Some((covered, subset)) = found {
            return Ok(MinddOptimum {
                k_star: Some(size),
                subset,
                covered,
                target,
            });
        }
        if !any_of_size {
            break;
        }
    }
    Ok(MinddOptimum {
        k_star: None,
        subset: Vec::new(),
        covered: best_covered,
        target,
    })
}
