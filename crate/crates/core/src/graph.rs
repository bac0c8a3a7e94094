//! Street graph: points, weighted edges and shortest-path distances.
//!
//! Drones hover above street points only, so every distance used by the
//! planners is a graph distance (shortest path along the streets), never a
//! straight line. The graph is immutable once built. Single-source
//! shortest-path rows are computed with Dijkstra and cached; for graphs up to
//! [`BuildOptions::all_pairs_cap`] points the whole matrix is materialized at
//! construction, above that rows are filled on first use.
//!
//! Only path lengths matter anywhere in the crate, so ties between equally
//! short paths are never resolved.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense index of a street point, in `[0, |V|)`.
pub type PointId = usize;

/// Default cap below which the all-pairs matrix is built eagerly.
pub const DEFAULT_ALL_PAIRS_CAP: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StreetPoint {
    pub id: PointId,
    /// Planar easting in meters.
    pub x: f64,
    /// Planar northing in meters.
    pub y: f64,
}

impl StreetPoint {
    pub fn new(id: PointId, x: f64, y: f64) -> Self {
        Self { id, x, y }
    }
}

/// An input edge; a missing length is filled with the Euclidean distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub u: PointId,
    pub v: PointId,
    #[serde(default)]
    pub length: Option<f64>,
}

impl EdgeSpec {
    pub fn new(u: PointId, v: PointId) -> Self {
        Self { u, v, length: None }
    }

    pub fn with_length(u: PointId, v: PointId, length: f64) -> Self {
        Self {
            u,
            v,
            length: Some(length),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: PointId,
    pub v: PointId,
    pub length: f64,
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("duplicate point id {0}")]
    DuplicateId(PointId),
    #[error("point ids must be dense in [0, {count}); missing id {missing}")]
    SparseIds { count: usize, missing: PointId },
    #[error("point {0} has a non-finite coordinate")]
    NonFiniteCoordinate(PointId),
    #[error("dangling endpoint {0}")]
    DanglingEndpoint(PointId),
    #[error("self-loop on point {0}")]
    SelfLoop(PointId),
    #[error("edge ({u}, {v}) has invalid length {length}")]
    InvalidLength { u: PointId, v: PointId, length: f64 },
    #[error("duplicate edge between {u} and {v}")]
    DuplicateEdge { u: PointId, v: PointId },
    #[error("unknown point id {0}")]
    UnknownPoint(PointId),
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

/// A graph distance.
///
/// Points in different connected components are [`Distance::Unreachable`],
/// which orders after every finite distance.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum Distance {
    Finite(f64),
    Unreachable,
}

impl Distance {
    fn from_raw(raw: f64) -> Self {
        if raw.is_finite() {
            Distance::Finite(raw)
        } else {
            Distance::Unreachable
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Unreachable => None,
        }
    }

    pub fn is_reachable(self) -> bool {
        matches!(self, Distance::Finite(_))
    }

    /// `true` iff reachable and `<= limit`.
    pub fn within(self, limit: f64) -> bool {
        matches!(self, Distance::Finite(d) if d <= limit)
    }

    /// `true` iff unreachable or strictly greater than `limit`.
    pub fn exceeds(self, limit: f64) -> bool {
        match self {
            Distance::Finite(d) => d > limit,
            Distance::Unreachable => true,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d} m"),
            Distance::Unreachable => f.write_str("unreachable"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BuildOptions {
    /// Graphs with at most this many points get an eager all-pairs matrix.
    pub all_pairs_cap: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            all_pairs_cap: DEFAULT_ALL_PAIRS_CAP,
        }
    }
}

/// Immutable street graph with cached shortest-path rows.
pub struct StreetGraph {
    points: Vec<StreetPoint>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(PointId, f64)>>,
    // Raw row storage keeps `f64::INFINITY` for unreachable targets; it never
    // leaves this module without being wrapped in `Distance`.
    rows: Vec<OnceLock<Box<[f64]>>>,
}

impl fmt::Debug for StreetGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StreetGraph")
            .field("points", &self.points.len())
            .field("edges", &self.edges.len())
            .finish()
    }
}

impl StreetGraph {
    pub fn build(points: Vec<StreetPoint>, edges: Vec<EdgeSpec>) -> Result<Self, GraphError> {
        Self::build_with(points, edges, BuildOptions::default())
    }

    pub fn build_with(
        mut points: Vec<StreetPoint>,
        edges: Vec<EdgeSpec>,
        options: BuildOptions,
    ) -> Result<Self, GraphError> {
        points.sort_by_key(|p| p.id);
        for (i, p) in points.iter().enumerate() {
            if i > 0 && points[i - 1].id == p.id {
                return Err(GraphError::DuplicateId(p.id));
            }
            if p.id != i {
                return Err(GraphError::SparseIds {
                    count: points.len(),
                    missing: i,
                });
            }
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(GraphError::NonFiniteCoordinate(p.id));
            }
        }

        let n = points.len();
        let mut seen = HashSet::with_capacity(edges.len());
        let mut built = Vec::with_capacity(edges.len());
        let mut adjacency = vec![Vec::new(); n];
        for spec in edges {
            for end in [spec.u, spec.v] {
                if end >= n {
                    return Err(GraphError::DanglingEndpoint(end));
                }
            }
            if spec.u == spec.v {
                return Err(GraphError::SelfLoop(spec.u));
            }
            let key = (spec.u.min(spec.v), spec.u.max(spec.v));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge { u: key.0, v: key.1 });
            }
            let length = match spec.length {
                Some(l) if l.is_finite() && l > 0.0 => l,
                Some(l) => {
                    return Err(GraphError::InvalidLength {
                        u: spec.u,
                        v: spec.v,
                        length: l,
                    })
                }
                None => {
                    let l = euclid(&points[spec.u], &points[spec.v]);
                    if l <= 0.0 {
                        return Err(GraphError::InvalidLength {
                            u: spec.u,
                            v: spec.v,
                            length: l,
                        });
                    }
                    l
                }
            };
            adjacency[spec.u].push((spec.v, length));
            adjacency[spec.v].push((spec.u, length));
            built.push(Edge {
                u: spec.u,
                v: spec.v,
                length,
            });
        }

        let graph = StreetGraph {
            points,
            edges: built,
            adjacency,
            rows: (0..n).map(|_| OnceLock::new()).collect(),
        };
        if n <= options.all_pairs_cap {
            let mut matrix: Vec<Box<[f64]>> = (0..n)
                .into_par_iter()
                .map(|source| graph.dijkstra(source))
                .collect();
            // Mirror the upper triangle so that d(v, w) and d(w, v) agree bit for bit.
            for v in 0..n {
                for w in 0..v {
                    matrix[v][w] = matrix[w][v];
                }
            }
            for (cell, row) in graph.rows.iter().zip(matrix) {
                let _ = cell.set(row);
            }
        }
        Ok(graph)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[StreetPoint] {
        &self.points
    }

    pub fn point(&self, id: PointId) -> &StreetPoint {
        &self.points[id]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, id: PointId) -> &[(PointId, f64)] {
        &self.adjacency[id]
    }

    pub fn contains(&self, id: PointId) -> bool {
        id < self.points.len()
    }

    pub fn check_id(&self, id: PointId) -> Result<(), GraphError> {
        if self.contains(id) {
            Ok(())
        } else {
            Err(GraphError::UnknownPoint(id))
        }
    }

    /// Shortest-path length between `v` and `w`.
    ///
    /// Panics if either id is out of range.
    pub fn distance(&self, v: PointId, w: PointId) -> Distance {
        assert!(
            self.contains(v) && self.contains(w),
            "point id out of range: ({v}, {w}) in a graph of {} points",
            self.len()
        );
        Distance::from_raw(self.row(v.min(w))[v.max(w)])
    }

    /// Hypotenuse of the graph distance and the hover altitude `h`.
    pub fn spatial_distance(&self, v: PointId, h: f64, w: PointId) -> Distance {
        match self.distance(v, w) {
            Distance::Finite(g) => Distance::Finite(spatial_distance(g, h)),
            Distance::Unreachable => Distance::Unreachable,
        }
    }

    /// Straight-line distance between two points.
    pub fn euclidean(&self, v: PointId, w: PointId) -> f64 {
        euclid(&self.points[v], &self.points[w])
    }

    /// All points within graph distance `radius` of `v` (inclusive), ascending ids.
    pub fn within(&self, v: PointId, radius: f64) -> Vec<PointId> {
        self.row(v)
            .iter()
            .enumerate()
            .filter(|(_, &d)| d <= radius)
            .map(|(w, _)| w)
            .collect()
    }

    /// Distances from `v` to every point, in id order.
    pub fn distances_from(&self, v: PointId) -> impl Iterator<Item = Distance> + '_ {
        self.row(v).iter().map(|&d| Distance::from_raw(d))
    }

    pub(crate) fn row(&self, source: PointId) -> &[f64] {
        self.rows[source].get_or_init(|| self.dijkstra(source))
    }

    fn dijkstra(&self, source: PointId) -> Box<[f64]> {
        let mut dist = vec![f64::INFINITY; self.points.len()];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(Frontier {
            dist: 0.0,
            node: source,
        });
        while let Some(Frontier { dist: d, node }) = heap.pop() {
            if d > dist[node] {
                continue;
            }
            for &(next, len) in &self.adjacency[node] {
                let cand = d + len;
                if cand < dist[next] {
                    dist[next] = cand;
                    heap.push(Frontier {
                        dist: cand,
                        node: next,
                    });
                }
            }
        }
        dist.into_boxed_slice()
    }

    /// Read `nodes.csv` (`id,x,y`) and `edges.csv` (`u,v[,length]`).
    pub fn read_csv(nodes: impl AsRef<Path>, edges: impl AsRef<Path>) -> Result<Self, GraphError> {
        let open = |p: &Path| {
            std::fs::File::open(p).map_err(|source| GraphError::Io {
                path: p.display().to_string(),
                source,
            })
        };
        let nodes = nodes.as_ref();
        let edges = edges.as_ref();
        let points = read_nodes(open(nodes)?, &nodes.display().to_string())?;
        let specs = read_edges(open(edges)?, &edges.display().to_string())?;
        Self::build(points, specs)
    }

    pub fn write_csv(
        &self,
        nodes: impl AsRef<Path>,
        edges: impl AsRef<Path>,
    ) -> Result<(), GraphError> {
        let create = |p: &Path| {
            std::fs::File::create(p).map_err(|source| GraphError::Io {
                path: p.display().to_string(),
                source,
            })
        };
        let nodes = nodes.as_ref();
        let edges = edges.as_ref();
        self.write_nodes(create(nodes)?)
            .map_err(|source| csv_err(nodes.display(), source))?;
        self.write_edges(create(edges)?)
            .map_err(|source| csv_err(edges.display(), source))?;
        Ok(())
    }

    pub fn write_nodes(&self, out: impl Write) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        for p in &self.points {
            w.serialize(p)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_edges(&self, out: impl Write) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        for e in &self.edges {
            w.serialize(e)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `sqrt(g^2 + h^2)`.
pub fn spatial_distance(graph_distance: f64, altitude: f64) -> f64 {
    graph_distance.hypot(altitude)
}

pub fn read_nodes(input: impl Read, context: &str) -> Result<Vec<StreetPoint>, GraphError> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|source| csv_err(context, source))
}

pub fn read_edges(input: impl Read, context: &str) -> Result<Vec<EdgeSpec>, GraphError> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|source| csv_err(context, source))
}

fn csv_err(context: impl fmt::Display, source: csv::Error) -> GraphError {
    GraphError::Csv {
        context: context.to_string(),
        source,
    }
}

fn euclid(a: &StreetPoint, b: &StreetPoint) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

#[derive(Debug, Clone, Copy)]
struct Frontier {
    dist: f64,
    node: PointId,
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Frontier {}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frontier {
    // Reversed so the max-heap pops the nearest node first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}
