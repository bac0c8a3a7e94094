//! Scenario ingestion and synthetic scenario generation.
//!
//! GPS updates are projected to local planar meters, filtered to a bounding
//! box, snapped to the nearest street point (updates too far from any street
//! are treated as indoor and dropped), bucketed into time slots and scaled.

use std::collections::{HashMap, HashSet};
use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coverage::{CoverageError, DensityProfile};
use crate::graph::{EdgeSpec, GraphError, PointId, StreetGraph, StreetPoint};

pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid scenario config: {0}")]
    InvalidConfig(String),
    #[error("degenerate synthetic spec: {0}")]
    DegenerateSpec(String),
    #[error("{bad} of {total} update rows are malformed (limit {limit:.1}%)", limit = .max_ratio * 100.0)]
    TooManyBadRows {
        bad: usize,
        total: usize,
        max_ratio: f64,
    },
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
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Coverage(#[from] CoverageError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpdateRecord {
    pub user_id: String,
    /// Seconds since the Unix epoch.
    pub timestamp: f64,
    pub lat: f64,
    pub lon: f64,
}

impl UpdateRecord {
    fn is_valid(&self) -> bool {
        self.timestamp.is_finite()
            && (-90.0..=90.0).contains(&self.lat)
            && (-180.0..=180.0).contains(&self.lon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub lat_min: f64,
    pub lat_max: f64,
    pub lon_min: f64,
    pub lon_max: f64,
}

impl BoundingBox {
    pub fn contains(&self, lat: f64, lon: f64) -> bool {
        (self.lat_min..=self.lat_max).contains(&lat) && (self.lon_min..=self.lon_max).contains(&lon)
    }

    fn lat_mid_rad(&self) -> f64 {
        (0.5 * (self.lat_min + self.lat_max)).to_radians()
    }

    /// Projected width and height in meters.
    pub fn extent_m(&self) -> (f64, f64) {
        project(self.lat_max, self.lon_max, self)
    }

    pub fn area_km2(&self) -> f64 {
        let (w, h) = self.extent_m();
        w * h / 1e6
    }
}

impl Default for BoundingBox {
    /// A residential neighbourhood in central Beijing.
    fn default() -> Self {
        Self {
            lat_min: 39.9176,
            lat_max: 39.9242,
            lon_min: 116.4406,
            lon_max: 116.4501,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub bbox: BoundingBox,
    /// Updates farther than this from every street point are dropped as indoor.
    pub snap_radius_m: f64,
    pub slot_seconds: f64,
    /// Multiplier applied to every UE count.
    pub scale: u64,
    /// Keep one update per user and slot.
    pub dedup_per_slot: bool,
    /// Ingestion fails once malformed rows exceed this fraction of the input.
    pub max_bad_row_ratio: f64,
    /// Offset of local time from UTC; slots start at local midnight.
    pub utc_offset_s: i64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            bbox: BoundingBox::default(),
            snap_radius_m: 20.0,
            slot_seconds: 3600.0,
            scale: 5,
            dedup_per_slot: false,
            max_bad_row_ratio: 0.05,
            utc_offset_s: 0,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let b = &self.bbox;
        let bad = |m: &str| Err(ScenarioError::InvalidConfig(m.into()));
        if !(b.lat_min < b.lat_max && b.lon_min < b.lon_max) {
            return bad("bounding box is degenerate");
        }
        if !(self.snap_radius_m > 0.0) {
            return bad("snap radius must be positive");
        }
        if !(self.slot_seconds > 0.0) {
            return bad("slot length must be positive");
        }
        if self.scale < 1 {
            return bad("scale must be at least 1");
        }
        Ok(())
    }
}

/// Local equirectangular projection with origin at the box's south-west corner.
pub fn project(lat: f64, lon: f64, bbox: &BoundingBox) -> (f64, f64) {
    let x = EARTH_RADIUS_M * (lon - bbox.lon_min) * bbox.lat_mid_rad().cos() * PI / 180.0;
    let y = EARTH_RADIUS_M * (lat - bbox.lat_min) * PI / 180.0;
    (x, y)
}

/// Inverse of [`project`]; returns `(lat, lon)`.
pub fn unproject(x: f64, y: f64, bbox: &BoundingBox) -> (f64, f64) {
    let lat = bbox.lat_min + y * 180.0 / (PI * EARTH_RADIUS_M);
    let lon = bbox.lon_min + x * 180.0 / (PI * EARTH_RADIUS_M * bbox.lat_mid_rad().cos());
    (lat, lon)
}

/// Uniform-grid bucket index for nearest-street-point queries.
pub struct PointIndex<'g> {
    graph: &'g StreetGraph,
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<PointId>>,
}

impl<'g> PointIndex<'g> {
    pub fn new(graph: &'g StreetGraph, cell: f64) -> Self {
        let mut buckets: HashMap<(i64, i64), Vec<PointId>> = HashMap::new();
        for p in graph.points() {
            buckets
                .entry(Self::key(p.x, p.y, cell))
                .or_default()
                .push(p.id);
        }
        Self {
            graph,
            cell,
            buckets,
        }
    }

    fn key(x: f64, y: f64, cell: f64) -> (i64, i64) {
        ((x / cell).floor() as i64, (y / cell).floor() as i64)
    }

    /// Nearest street point within `cell` meters; ties go to the smaller id.
    pub fn nearest_within(&self, x: f64, y: f64) -> Option<(PointId, f64)> {
        let (cx, cy) = Self::key(x, y, self.cell);
        let mut best: Option<(PointId, f64)> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                let Some(ids) = self.buckets.get(&(cx + dx, cy + dy)) else {
                    continue;
                };
                for &id in ids {
                    let p = self.graph.point(id);
                    let d = (p.x - x).hypot(p.y - y);
                    if d <= self.cell
                        && best.is_none_or(|(bid, bd)| d < bd || (d == bd && id < bid))
                    {
                        best = Some((id, d));
                    }
                }
            }
        }
        best
    }
}

/// Row accounting of one ingestion run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub total_rows: usize,
    pub malformed: usize,
    pub outside_bbox: usize,
    /// Farther than the snap radius from every street point.
    pub indoor: usize,
    pub duplicates: usize,
    pub kept: usize,
    /// Start of slot 0, seconds since the epoch.
    pub t0: Option<i64>,
}

impl IngestReport {
    pub fn discarded(&self) -> usize {
        self.outside_bbox + self.indoor + self.duplicates
    }
}

/// Snap updates to street points and aggregate them into per-slot counts.
///
/// Slot 0 starts at local midnight of the day of the earliest kept update.
/// Malformed rows arrive as `Err` items and are counted, not fatal, until they
/// exceed [`ScenarioConfig::max_bad_row_ratio`].
pub fn snap_and_aggregate<I, E>(
    records: I,
    graph: &StreetGraph,
    cfg: &ScenarioConfig,
) -> Result<(DensityProfile, IngestReport), ScenarioError>
where
    I: IntoIterator<Item = Result<UpdateRecord, E>>,
{
    cfg.validate()?;
    let index = PointIndex::new(graph, cfg.snap_radius_m);
    let mut report = IngestReport::default();
    let mut snapped = Vec::new();
    for record in records {
        report.total_rows += 1;
        let record = match record {
            Ok(r) if r.is_valid() => r,
            _ => {
                report.malformed += 1;
                continue;
            }
        };
        if !cfg.bbox.contains(record.lat, record.lon) {
            report.outside_bbox += 1;
            continue;
        }
        let (x, y) = project(record.lat, record.lon, &cfg.bbox);
        match index.nearest_within(x, y) {
            Some((point, _)) => snapped.push((record.user_id, record.timestamp, point)),
            None => report.indoor += 1,
        }
    }
    if report.total_rows > 0
        && report.malformed as f64 / report.total_rows as f64 > cfg.max_bad_row_ratio
    {
        return Err(ScenarioError::TooManyBadRows {
            bad: report.malformed,
            total: report.total_rows,
            max_ratio: cfg.max_bad_row_ratio,
        });
    }

    let mut density = DensityProfile::new(graph.len(), 0);
    let Some(first) = snapped.iter().map(|s| s.1).min_by(f64::total_cmp) else {
        return Ok((density, report));
    };
    let t0 = local_midnight(first, cfg.utc_offset_s);
    report.t0 = Some(t0);
    let mut seen: HashSet<(String, usize)> = HashSet::new();
    for (user, ts, point) in snapped {
        let slot = ((ts - t0 as f64) / cfg.slot_seconds).floor() as usize;
        if cfg.dedup_per_slot && !seen.insert((user, slot)) {
            report.duplicates += 1;
            continue;
        }
        report.kept += 1;
        density.add(point, slot, cfg.scale)?;
    }
    Ok((density, report))
}

fn local_midnight(ts: f64, utc_offset_s: i64) -> i64 {
    let local = ts.floor() as i64 + utc_offset_s;
    local.div_euclid(86_400) * 86_400 - utc_offset_s
}

/// Reads `user_id,timestamp,lat,lon` rows; unparsable rows become `Err`.
pub fn read_updates(input: impl Read) -> Vec<Result<UpdateRecord, String>> {
    csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(input)
        .deserialize::<UpdateRecord>()
        .map(|r| r.map_err(|e| e.to_string()))
        .collect()
}

pub fn read_updates_csv(
    path: impl AsRef<Path>,
) -> Result<Vec<Result<UpdateRecord, String>>, ScenarioError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(read_updates(file))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GraphSpec {
    /// Lattice of `rows x cols` points with 4-neighbour edges.
    Grid {
        rows: usize,
        cols: usize,
        spacing_m: f64,
    },
    /// Blocks of streets: intersections `block_m` apart, each street
    /// discretized every `spacing_m`.
    Streets {
        rows: usize,
        cols: usize,
        block_m: f64,
        spacing_m: f64,
    },
    /// Uniform points joined when closer than `radius_m`.
    Geometric {
        n_points: usize,
        radius_m: f64,
        #[serde(default = "default_extent")]
        width_m: f64,
        #[serde(default = "default_extent")]
        height_m: f64,
    },
}

fn default_extent() -> f64 {
    1000.0
}

fn default_sigma() -> f64 {
    60.0
}

fn default_background() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub graph: GraphSpec,
    /// Number of Gaussian demand hotspots; 0 gives uniform density.
    pub hotspots: usize,
    /// UE total of each slot.
    pub slots: Vec<u64>,
    #[serde(default = "default_sigma")]
    pub hotspot_sigma_m: f64,
    /// Baseline weight per point relative to a hotspot peak.
    #[serde(default = "default_background")]
    pub background: f64,
}

impl SyntheticSpec {
    pub fn read_json(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text)
            .map_err(|e| ScenarioError::InvalidConfig(format!("{}: {e}", path.display())))
    }
}

/// Hour-of-day demand shape: quiet nights, a climb from morning to a late
/// afternoon peak, then a decline.
pub fn diurnal_totals(peak: u64) -> Vec<u64> {
    const SHAPE: [f64; 24] = [
        0.15, 0.10, 0.08, 0.06, 0.06, 0.08, 0.15, 0.25, 0.35, 0.45, 0.55, 0.62, 0.70, 0.74, 0.80,
        0.90, 1.00, 0.95, 0.88, 0.80, 0.72, 0.62, 0.45, 0.28,
    ];
    SHAPE
        .iter()
        .map(|s| (s * peak as f64).round() as u64)
        .collect()
}

/// Deterministic street graph and density from a seed.
pub fn generate_synthetic(
    spec: &SyntheticSpec,
) -> Result<(StreetGraph, DensityProfile), ScenarioError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let graph = build_graph(&spec.graph, &mut rng)?;
    if graph.is_empty() {
        return Err(ScenarioError::DegenerateSpec("graph has no points".into()));
    }
    if spec.slots.is_empty() {
        return Err(ScenarioError::DegenerateSpec(
            "at least one slot total is required".into(),
        ));
    }
    if !(spec.hotspot_sigma_m > 0.0) || !(spec.background >= 0.0) {
        return Err(ScenarioError::DegenerateSpec(
            "hotspot sigma must be positive and background non-negative".into(),
        ));
    }

    struct Hotspot {
        x: f64,
        y: f64,
        amplitude: f64,
        phase: f64,
    }
    let hotspots: Vec<Hotspot> = (0..spec.hotspots)
        .map(|_| {
            let p = graph.point(rng.random_range(0..graph.len()));
            Hotspot {
                x: p.x,
                y: p.y,
                amplitude: rng.random_range(0.5..1.5),
                phase: rng.random_range(0.0..2.0 * PI),
            }
        })
        .collect();

    let slots = spec.slots.len();
    let mut density = DensityProfile::new(graph.len(), slots);
    let two_sigma_sq = 2.0 * spec.hotspot_sigma_m * spec.hotspot_sigma_m;
    for (t, &total) in spec.slots.iter().enumerate() {
        let weights: Vec<f64> = if hotspots.is_empty() {
            vec![1.0; graph.len()]
        } else {
            // Each hotspot's intensity drifts over the day with its own phase.
            let angle = 2.0 * PI * t as f64 / slots as f64;
            graph
                .points()
                .iter()
                .map(|p| {
                    spec.background
                        + hotspots
                            .iter()
                            .map(|h| {
                                let d2 = (p.x - h.x).powi(2) + (p.y - h.y).powi(2);
                                h.amplitude
                                    * (1.0 + 0.5 * (angle + h.phase).sin())
                                    * (-d2 / two_sigma_sq).exp()
                            })
                            .sum::<f64>()
                })
                .collect()
        };
        for (point, count) in apportion(total, &weights).into_iter().enumerate() {
            if count > 0 {
                density.add(point, t, count)?;
            }
        }
    }
    Ok((graph, density))
}

/// Largest-remainder apportionment of `total` by `weights`; sums to `total`
/// exactly. Remainder ties go to the smaller index.
pub fn apportion(total: u64, weights: &[f64]) -> Vec<u64> {
    let sum: f64 = weights.iter().sum();
    if weights.is_empty() {
        return Vec::new();
    }
    if !(sum > 0.0) {
        return apportion(total, &vec![1.0; weights.len()]);
    }
    let quotas: Vec<f64> = weights.iter().map(|w| total as f64 * w / sum).collect();
    let mut counts: Vec<u64> = quotas.iter().map(|q| q.floor() as u64).collect();
    let assigned: u64 = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let mut remaining = total.saturating_sub(assigned);
    for &i in order.iter().cycle() {
        if remaining == 0 {
            break;
        }
        counts[i] += 1;
        remaining -= 1;
    }
    counts
}

fn build_graph(spec: &GraphSpec, rng: &mut ChaCha8Rng) -> Result<StreetGraph, ScenarioError> {
    let degenerate = |m: &str| Err(ScenarioError::DegenerateSpec(m.into()));
    match *spec {
        GraphSpec::Grid {
            rows,
            cols,
            spacing_m,
        } => {
            if rows == 0 || cols == 0 || !(spacing_m > 0.0) {
                return degenerate("grid needs positive rows, cols and spacing");
            }
            let mut points = Vec::with_capacity(rows * cols);
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    let id = r * cols + c;
                    points.push(StreetPoint::new(
                        id,
                        c as f64 * spacing_m,
                        r as f64 * spacing_m,
                    ));
                    if c + 1 < cols {
                        edges.push(EdgeSpec::new(id, id + 1));
                    }
                    if r + 1 < rows {
                        edges.push(EdgeSpec::new(id, id + cols));
                    }
                }
            }
            Ok(StreetGraph::build(points, edges)?)
        }
        GraphSpec::Streets {
            rows,
            cols,
            block_m,
            spacing_m,
        } => {
            if rows == 0
                || cols == 0
                || !(block_m > 0.0)
                || !(spacing_m > 0.0)
                || spacing_m > block_m
            {
                return degenerate("streets need positive rows, cols and spacing <= block");
            }
            let steps = (block_m / spacing_m).round().max(1.0) as usize;
            let step = block_m / steps as f64;
            let mut points = Vec::new();
            let mut edges = Vec::new();
            let intersection = |r: usize, c: usize| r * cols + c;
            for r in 0..rows {
                for c in 0..cols {
                    points.push(StreetPoint::new(
                        intersection(r, c),
                        c as f64 * block_m,
                        r as f64 * block_m,
                    ));
                }
            }
            let mut street = |from: PointId, to: PointId, points: &mut Vec<StreetPoint>| {
                let (a, b) = (points[from], points[to]);
                let mut prev = from;
                for s in 1..steps {
                    let f = s as f64 / steps as f64;
                    let id = points.len();
                    points.push(StreetPoint::new(
                        id,
                        a.x + (b.x - a.x) * f,
                        a.y + (b.y - a.y) * f,
                    ));
                    edges.push(EdgeSpec::with_length(prev, id, step));
                    prev = id;
                }
                edges.push(EdgeSpec::with_length(prev, to, step));
            };
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        street(intersection(r, c), intersection(r, c + 1), &mut points);
                    }
                    if r + 1 < rows {
                        street(intersection(r, c), intersection(r + 1, c), &mut points);
                    }
                }
            }
            Ok(StreetGraph::build(points, edges)?)
        }
        GraphSpec::Geometric {
            n_points,
            radius_m,
            width_m,
            height_m,
        } => {
            if n_points == 0 || !(radius_m > 0.0) || !(width_m > 0.0) || !(height_m > 0.0) {
                return degenerate("geometric graph needs points, a positive radius and extent");
            }
            let points: Vec<StreetPoint> = (0..n_points)
                .map(|id| {
                    StreetPoint::new(
                        id,
                        rng.random_range(0.0..width_m),
                        rng.random_range(0.0..height_m),
                    )
                })
                .collect();
            let mut edges = Vec::new();
            for a in 0..n_points {
                for b in a + 1..n_points {
                    let d = (points[a].x - points[b].x).hypot(points[a].y - points[b].y);
                    if d > 0.0 && d <= radius_m {
                        edges.push(EdgeSpec::with_length(a, b, d));
                    }
                }
            }
            Ok(StreetGraph::build(points, edges)?)
        }
    }
}

/// Street points nearest to the four corners of the graph's bounding box
/// (SW, SE, NW, NE), deduplicated.
pub fn corner_points(graph: &StreetGraph) -> Vec<PointId> {
    let pts = graph.points();
    if pts.is_empty() {
        return Vec::new();
    }
    let fold = |f: fn(f64, f64) -> f64, init: f64, get: fn(&StreetPoint) -> f64| {
        pts.iter().map(get).fold(init, f)
    };
    let (x0, x1) = (
        fold(f64::min, f64::INFINITY, |p| p.x),
        fold(f64::max, f64::NEG_INFINITY, |p| p.x),
    );
    let (y0, y1) = (
        fold(f64::min, f64::INFINITY, |p| p.y),
        fold(f64::max, f64::NEG_INFINITY, |p| p.y),
    );
    let mut out = Vec::new();
    for (cx, cy) in [(x0, y0), (x1, y0), (x0, y1), (x1, y1)] {
        let nearest = pts
            .iter()
            .min_by(|a, b| {
                let da = (a.x - cx).hypot(a.y - cy);
                let db = (b.x - cx).hypot(b.y - cy);
                da.total_cmp(&db).then(a.id.cmp(&b.id))
            })
            .map(|p| p.id)
            .expect("non-empty");
        if !out.contains(&nearest) {
            out.push(nearest);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn bbox() -> BoundingBox {
        BoundingBox::default()
    }

    #[test]
    fn projection_examples() {
        let b = bbox();
        assert_eq!(project(b.lat_min, b.lon_min, &b), (0.0, 0.0));
        let (x, y) = project(b.lat_max, b.lon_max, &b);
        assert_abs_diff_eq!(x, 810.149_068_053, epsilon = 1e-6);
        assert_abs_diff_eq!(y, 733.886_515_854, epsilon = 1e-6);
        let (_, y1) = project(b.lat_min + 0.001, b.lon_min, &b);
        assert_abs_diff_eq!(y1, 111.194_926_644_6, epsilon = 1e-6);
    }

    /// Street along the x axis every 10 m, 0..200 m, inside the default box.
    fn street() -> StreetGraph {
        let pts = (0..21)
            .map(|i| StreetPoint::new(i, i as f64 * 10.0, 100.0))
            .collect();
        let edges = (1..21).map(|i| EdgeSpec::new(i - 1, i)).collect();
        StreetGraph::build(pts, edges).unwrap()
    }

    fn record_at(user: &str, ts: f64, x: f64, y: f64) -> UpdateRecord {
        let (lat, lon) = unproject(x, y, &bbox());
        UpdateRecord {
            user_id: user.into(),
            timestamp: ts,
            lat,
            lon,
        }
    }

    fn ok(records: Vec<UpdateRecord>) -> Vec<Result<UpdateRecord, String>> {
        records.into_iter().map(Ok).collect()
    }

    #[test]
    fn snapping_examples() {
        let g = street();
        let cfg = ScenarioConfig {
            scale: 1,
            ..ScenarioConfig::default()
        };
        let near = record_at("a", 1000.0, 50.0, 103.0);
        let far = record_at("b", 1000.0, 50.0, 600.0);
        let (d, report) = snap_and_aggregate(ok(vec![near, far]), &g, &cfg).unwrap();
        assert_eq!(d.get(5, 0), 1);
        assert_eq!(d.total(0), 1);
        assert_eq!(report.indoor, 1);
        assert_eq!(report.kept, 1);
    }

    #[test]
    fn scaling_by_five() {
        let g = street();
        let records: Vec<_> = (0..10)
            .map(|i| record_at(&format!("u{i}"), 100.0 * i as f64, i as f64 * 15.0, 101.0))
            .collect();
        let (d, report) = snap_and_aggregate(ok(records), &g, &ScenarioConfig::default()).unwrap();
        assert_eq!(d.total(0), 50);
        assert_eq!(report.kept, 10);
    }

    #[test]
    fn slots_dedup_and_accounting() {
        let g = street();
        // 2012-05-21 00:00:00 UTC
        let midnight = 1_337_558_400.0;
        let cfg = ScenarioConfig {
            scale: 1,
            dedup_per_slot: true,
            ..ScenarioConfig::default()
        };
        let mut records = ok(vec![
            record_at("a", midnight + 10.0, 0.0, 100.0),
            record_at("a", midnight + 20.0, 10.0, 100.0),
            record_at("a", midnight + 3700.0, 10.0, 100.0),
            record_at("b", midnight + 7300.0, 30.0, 100.0),
        ]);
        records.push(Err("bad row".into()));
        records.push(Ok(UpdateRecord {
            user_id: "c".into(),
            timestamp: midnight,
            lat: 10.0,
            lon: 10.0,
        }));
        let loose = ScenarioConfig {
            max_bad_row_ratio: 0.5,
            ..cfg.clone()
        };
        let (d, report) = snap_and_aggregate(records.clone(), &g, &loose).unwrap();
        assert_eq!(report.t0, Some(midnight as i64));
        assert_eq!((d.total(0), d.total(1), d.total(2)), (1, 1, 1));
        assert_eq!(report.duplicates, 1);
        assert_eq!(report.malformed, 1);
        assert_eq!(report.outside_bbox, 1);
        assert_eq!(
            report.kept + report.discarded() + report.malformed,
            report.total_rows
        );

        assert!(matches!(
            snap_and_aggregate(records, &g, &cfg),
            Err(ScenarioError::TooManyBadRows {
                bad: 1,
                total: 6,
                ..
            })
        ));
    }

    #[test]
    fn local_midnight_offsets() {
        // 2012-05-21 01:00 UTC is 09:00 in UTC+8; local midnight is 16:00 UTC the day before.
        let ts = 1_337_562_000.0;
        assert_eq!(local_midnight(ts, 0), 1_337_558_400);
        assert_eq!(local_midnight(ts, 8 * 3600), 1_337_558_400 - 8 * 3600);
    }

    #[test]
    fn update_csv_parsing() {
        let text = "user_id,timestamp,lat,lon\nu1,1000,39.92,116.445\nu2,notanumber,39.92,116.445\nu3,1000,39.92\n";
        let rows = read_updates(text.as_bytes());
        assert_eq!(rows.len(), 3);
        assert!(rows[0].is_ok());
        assert!(rows[1].is_err());
        assert!(rows[2].is_err());
    }

    fn spec(graph: GraphSpec, hotspots: usize, slots: Vec<u64>) -> SyntheticSpec {
        SyntheticSpec {
            seed: 42,
            graph,
            hotspots,
            slots,
            hotspot_sigma_m: 60.0,
            background: 0.05,
        }
    }

    #[test]
    fn synthetic_is_deterministic() {
        let s = spec(
            GraphSpec::Geometric {
                n_points: 80,
                radius_m: 150.0,
                width_m: 800.0,
                height_m: 600.0,
            },
            3,
            vec![10, 70, 40],
        );
        let dump = |s: &SyntheticSpec| {
            let (g, d) = generate_synthetic(s).unwrap();
            let mut nodes = Vec::new();
            let mut edges = Vec::new();
            let mut dens = Vec::new();
            g.write_nodes(&mut nodes).unwrap();
            g.write_edges(&mut edges).unwrap();
            d.write_csv_to(&mut dens).unwrap();
            (nodes, edges, dens)
        };
        assert_eq!(dump(&s), dump(&s));
        let (_, d) = generate_synthetic(&s).unwrap();
        assert_eq!([d.total(0), d.total(1), d.total(2)], [10, 70, 40]);
    }

    #[test]
    fn synthetic_uniform_without_hotspots() {
        let s = spec(
            GraphSpec::Grid {
                rows: 4,
                cols: 5,
                spacing_m: 10.0,
            },
            0,
            vec![40, 45],
        );
        let (g, d) = generate_synthetic(&s).unwrap();
        assert_eq!(g.len(), 20);
        assert!((0..20).all(|p| d.get(p, 0) == 2));
        // 45 = 20 * 2 + 5: the five leftover UEs go to the smallest ids.
        assert!((0..5).all(|p| d.get(p, 1) == 3));
        assert!((5..20).all(|p| d.get(p, 1) == 2));
    }

    #[test]
    fn streets_layout() {
        let s = spec(
            GraphSpec::Streets {
                rows: 3,
                cols: 4,
                block_m: 100.0,
                spacing_m: 20.0,
            },
            2,
            vec![100],
        );
        let (g, _) = generate_synthetic(&s).unwrap();
        // 12 intersections plus 4 interior points on each of 17 streets.
        assert_eq!(g.len(), 12 + 17 * 4);
        assert_eq!(g.distance(0, 11).finite().unwrap().round(), 500.0);
        assert_eq!(corner_points(&g), vec![0, 3, 8, 11]);
    }

    #[test]
    fn degenerate_specs() {
        let bad_grid = spec(
            GraphSpec::Grid {
                rows: 0,
                cols: 3,
                spacing_m: 1.0,
            },
            0,
            vec![1],
        );
        assert!(matches!(
            generate_synthetic(&bad_grid),
            Err(ScenarioError::DegenerateSpec(_))
        ));
        let no_slots = spec(
            GraphSpec::Grid {
                rows: 2,
                cols: 3,
                spacing_m: 1.0,
            },
            0,
            vec![],
        );
        assert!(matches!(
            generate_synthetic(&no_slots),
            Err(ScenarioError::DegenerateSpec(_))
        ));
    }

    #[test]
    fn spec_json_shape() {
        let text = r#"{"seed": 7, "graph": {"kind": "grid", "rows": 3, "cols": 3, "spacing_m": 25}, "hotspots": 1, "slots": [5, 6]}"#;
        let s: SyntheticSpec = serde_json::from_str(text).unwrap();
        assert_eq!(s.hotspot_sigma_m, 60.0);
        let text = r#"{"seed": 7, "graph": {"kind": "geometric", "n_points": 12, "radius_m": 200}, "hotspots": 0, "slots": [5]}"#;
        let s: SyntheticSpec = serde_json::from_str(text).unwrap();
        assert!(matches!(s.graph, GraphSpec::Geometric { width_m, .. } if width_m == 1000.0));
    }

    proptest! {
        #[test]
        fn projection_round_trips(fy in 0.0..1.0f64, fx in 0.0..1.0f64) {
            let b = bbox();
            let lat = b.lat_min + fy * (b.lat_max - b.lat_min);
            let lon = b.lon_min + fx * (b.lon_max - b.lon_min);
            let (x, y) = project(lat, lon, &b);
            let (lat2, lon2) = unproject(x, y, &b);
            prop_assert!((lat - lat2).abs() < 1e-9);
            prop_assert!((lon - lon2).abs() < 1e-9);
        }

        #[test]
        fn apportion_sums_exactly(total in 0u64..10_000, weights in prop::collection::vec(0.0..10.0f64, 1..50)) {
            let counts = apportion(total, &weights);
            prop_assert_eq!(counts.iter().sum::<u64>(), total);
        }

        #[test]
        fn snapping_is_idempotent(points in prop::collection::vec((0.0..210.0f64, 80.0..120.0f64), 1..40)) {
            let g = street();
            let cfg = ScenarioConfig { scale: 1, ..ScenarioConfig::default() };
            let records: Vec<_> = points.iter().enumerate().map(|(i, &(x, y))| record_at(&i.to_string(), 0.0, x, y)).collect();
            let (first, report) = snap_and_aggregate(ok(records), &g, &cfg).unwrap();
            prop_assert_eq!(report.kept + report.discarded() + report.malformed, report.total_rows);
            prop_assert_eq!(first.total(0), report.kept as u64);
            // Re-emit every kept UE at its street point's coordinates.
            let again: Vec<_> = first
                .rows()
                .flat_map(|r| {
                    let p = *g.point(r.point_id);
                    (0..r.count).map(move |i| record_at(&format!("{}-{i}", r.point_id), 0.0, p.x, p.y))
                })
                .collect();
            let (second, _) = snap_and_aggregate(ok(again), &g, &cfg).unwrap();
            prop_assert_eq!(first, second);
        }
    }
}
