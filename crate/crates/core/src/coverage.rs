//! Covered sets, benefits and UE-to-drone association.
//!
//! UEs are integer counts attached to street points, so the covered UE set of
//! a drone is the multiset of counts over its covered street points and its
//! cardinality is the plain sum. All union/cardinality operations of the
//! planners work on street points weighted by those counts.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{PointId, StreetGraph};

#[derive(Debug, Error)]
pub enum CoverageError {
    #[error("density references unknown point {0}")]
    UnknownPoint(PointId),
    #[error("slot {slot} out of range (profile has {num_slots} slots)")]
    SlotOutOfRange { slot: usize, num_slots: usize },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Csv {
        context: String,
        #[source]
        source: csv::Error,
    },
}

/// UE counts per street point and time slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityProfile {
    num_points: usize,
    // counts[slot][point]
    counts: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityRow {
    pub point_id: PointId,
    pub slot: usize,
    pub count: u64,
}

impl DensityProfile {
    pub fn new(num_points: usize, num_slots: usize) -> Self {
        Self {
            num_points,
            counts: vec![vec![0; num_points]; num_slots],
        }
    }

    /// Single-slot profile from per-point counts.
    pub fn from_counts(counts: Vec<u64>) -> Self {
        Self {
            num_points: counts.len(),
            counts: vec![counts],
        }
    }

    pub fn from_rows(
        num_points: usize,
        rows: impl IntoIterator<Item = DensityRow>,
    ) -> Result<Self, CoverageError> {
        let mut profile = Self::new(num_points, 0);
        for row in rows {
            profile.add(row.point_id, row.slot, row.count)?;
        }
        Ok(profile)
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn num_slots(&self) -> usize {
        self.counts.len()
    }

    /// Adds `count` UEs at `point` in `slot`, growing the slot range as needed.
    pub fn add(&mut self, point: PointId, slot: usize, count: u64) -> Result<(), CoverageError> {
        if point >= self.num_points {
            return Err(CoverageError::UnknownPoint(point));
        }
        if slot >= self.counts.len() {
            self.counts.resize(slot + 1, vec![0; self.num_points]);
        }
        self.counts[slot][point] += count;
        Ok(())
    }

    pub fn get(&self, point: PointId, slot: usize) -> u64 {
        self.counts
            .get(slot)
            .and_then(|s| s.get(point))
            .copied()
            .unwrap_or(0)
    }

    pub fn slot(&self, slot: usize) -> Result<&[u64], CoverageError> {
        self.counts
            .get(slot)
            .map(Vec::as_slice)
            .ok_or(CoverageError::SlotOutOfRange {
                slot,
                num_slots: self.counts.len(),
            })
    }

    pub fn total(&self, slot: usize) -> u64 {
        self.counts.get(slot).map_or(0, |s| s.iter().sum())
    }

    pub fn scaled(&self, factor: u64) -> Self {
        Self {
            num_points: self.num_points,
            counts: self
                .counts
                .iter()
                .map(|s| s.iter().map(|c| c * factor).collect())
                .collect(),
        }
    }

    /// Non-zero entries in (slot, point) order.
    pub fn rows(&self) -> impl Iterator<Item = DensityRow> + '_ {
        self.counts.iter().enumerate().flat_map(|(slot, s)| {
            s.iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(move |(point_id, &count)| DensityRow {
                    point_id,
                    slot,
                    count,
                })
        })
    }

    pub fn read_csv_from(
        input: impl Read,
        num_points: usize,
        context: &str,
    ) -> Result<Self, CoverageError> {
        let rows: Vec<DensityRow> = csv::Reader::from_reader(input)
            .deserialize()
            .collect::<Result<_, _>>()
            .map_err(|source| CoverageError::Csv {
                context: context.to_string(),
                source,
            })?;
        Self::from_rows(num_points, rows)
    }

    pub fn read_csv(path: impl AsRef<Path>, num_points: usize) -> Result<Self, CoverageError> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| CoverageError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::read_csv_from(file, num_points, &path.display().to_string())
    }

    pub fn write_csv_to(&self, out: impl Write) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        // Header goes out even for an all-zero profile.
        w.write_record(["point_id", "slot", "count"])?;
        for row in self.rows() {
            w.write_record([
                row.point_id.to_string(),
                row.slot.to_string(),
                row.count.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<(), CoverageError> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|source| CoverageError::Io {
            path: path.display().to_string(),
            source,
        })?;
        self.write_csv_to(file)
            .map_err(|source| CoverageError::Csv {
                context: path.display().to_string(),
                source,
            })
    }
}

/// Street points within `g_max` of `center` (inclusive), ascending ids.
pub fn covered_set(graph: &StreetGraph, center: PointId, g_max: f64) -> Vec<PointId> {
    graph.within(center, g_max)
}

/// A covered set together with its benefit for one slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageSet {
    pub center: PointId,
    pub members: Vec<PointId>,
    pub benefit: u64,
}

impl CoverageSet {
    pub fn new(graph: &StreetGraph, center: PointId, counts: &[u64], g_max: f64) -> Self {
        let members = covered_set(graph, center, g_max);
        let benefit = members.iter().map(|&w| counts[w]).sum();
        Self {
            center,
            members,
            benefit,
        }
    }
}

pub fn benefit(
    graph: &StreetGraph,
    v: PointId,
    density: &DensityProfile,
    slot: usize,
    g_max: f64,
) -> Result<u64, CoverageError> {
    let counts = density.slot(slot)?;
    Ok(covered_set(graph, v, g_max)
        .iter()
        .map(|&w| counts[w])
        .sum())
}

/// UEs that `v` would add on top of those at `already_covered` points.
pub fn marginal_benefit(
    graph: &StreetGraph,
    v: PointId,
    already_covered: &BTreeSet<PointId>,
    density: &DensityProfile,
    slot: usize,
    g_max: f64,
) -> Result<u64, CoverageError> {
    let counts = density.slot(slot)?;
    Ok(covered_set(graph, v, g_max)
        .iter()
        .filter(|w| !already_covered.contains(w))
        .map(|&w| counts[w])
        .sum())
}

/// Precomputed covered sets for every candidate center.
#[derive(Debug, Clone)]
pub struct CoverageIndex {
    g_max: f64,
    members: Vec<Vec<PointId>>,
}

impl CoverageIndex {
    pub fn new(graph: &StreetGraph, g_max: f64) -> Self {
        let members = (0..graph.len())
            .into_par_iter()
            .map(|v| covered_set(graph, v, g_max))
            .collect();
        Self { g_max, members }
    }

    pub fn g_max(&self) -> f64 {
        self.g_max
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self, v: PointId) -> &[PointId] {
        &self.members[v]
    }

    pub fn benefit(&self, v: PointId, counts: &[u64]) -> u64 {
        self.members[v].iter().map(|&w| counts[w]).sum()
    }

    pub fn marginal(&self, v: PointId, covered: &CoveredMask, counts: &[u64]) -> u64 {
        self.members[v]
            .iter()
            .filter(|&&w| !covered.contains(w))
            .map(|&w| counts[w])
            .sum()
    }
}

/// Street points already covered by committed drones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveredMask {
    bits: Vec<bool>,
}

impl CoveredMask {
    pub fn new(num_points: usize) -> Self {
        Self {
            bits: vec![false; num_points],
        }
    }

    pub fn contains(&self, point: PointId) -> bool {
        self.bits[point]
    }

    /// Marks `points` covered and returns the UEs newly gained.
    pub fn cover(&mut self, points: &[PointId], counts: &[u64]) -> u64 {
        let mut gained = 0;
        for &w in points {
            if !self.bits[w] {
                self.bits[w] = true;
                gained += counts[w];
            }
        }
        gained
    }

    pub fn covered_ues(&self, counts: &[u64]) -> u64 {
        self.bits
            .iter()
            .zip(counts)
            .filter(|(&b, _)| b)
            .map(|(_, &c)| c)
            .sum()
    }
}

/// UE-bearing point → index (in pick order) of the serving drone.
pub type Assignments = BTreeMap<PointId, usize>;

/// Nearest-drone association by graph distance.
///
/// Every point with UEs that lies within `g_max` of at least one drone goes
/// to the closest such drone; ties go to the earlier pick. Uncovered points
/// are left out.
pub fn associate(
    graph: &StreetGraph,
    positions: &[PointId],
    counts: &[u64],
    g_max: f64,
) -> Assignments {
    let mut out = Assignments::new();
    for (w, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let mut best: Option<(f64, usize)> = None;
        for (j, &p) in positions.iter().enumerate() {
            if let Some(d) = graph.distance(p, w).finite() {
                if d <= g_max && best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, j));
                }
            }
        }
        if let Some((_, j)) = best {
            out.insert(w, j);
        }
    }
    out
}

/// Drone positions for one slot with their UE association.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deployment {
    pub slot: usize,
    /// Chosen street points in pick order.
    pub positions: Vec<PointId>,
    pub assignments: Assignments,
}

impl Deployment {
    pub fn new(
        graph: &StreetGraph,
        positions: Vec<PointId>,
        counts: &[u64],
        slot: usize,
        g_max: f64,
    ) -> Self {
        let assignments = associate(graph, &positions, counts, g_max);
        Self {
            slot,
            positions,
            assignments,
        }
    }

    /// UEs served by each drone, indexed like `positions`.
    pub fn loads(&self, counts: &[u64]) -> Vec<u64> {
        let mut loads = vec![0; self.positions.len()];
        for (&w, &j) in &self.assignments {
            loads[j] += counts[w];
        }
        loads
    }

    pub fn served(&self, counts: &[u64]) -> u64 {
        self.assignments.keys().map(|&w| counts[w]).sum()
    }
}
