//! Command implementations behind the `streetcover` binary.
//!
//! A run is configured by one JSON document with sections `radio`, `energy`,
//! `planner`, `scenario`, `metrics` and `inputs`. Any key can be overridden on
//! the command line as `--section.key value` (or `--section.key=value`); the
//! merged configuration is echoed to `resolved_config.json` in the output
//! directory.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::coverage::{CoverageError, DensityProfile};
use crate::energy::{
    compute_g_r, group_assignment, recharge_groups, EnergyConfig, EnergyError, RechargeGroups,
};
use crate::graph::{GraphError, StreetGraph};
use crate::metrics::{bounding_box_area_km2, evaluate, MetricsConfig, MetricsError, MetricsReport};
use crate::planners::{
    brute_force_kdd, brute_force_mindd, check_feasibility, MinddError, Planner, PlannerConfig,
    PlannerError, PlannerResult, Problem, Violation, DEFAULT_SUBSET_GUARD,
};
use crate::radio::{compute_g_max, LinkBudget, RadioConfig, RadioError};
use crate::scenario::{
    generate_synthetic, read_updates_csv, snap_and_aggregate, IngestReport, ScenarioConfig,
    ScenarioError, SyntheticSpec,
};

pub const THREADS_ENV: &str = "STREETCOVER_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Coverage(#[from] CoverageError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Planner(#[from] PlannerError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Radio(#[from] RadioError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Input files of a run. Either `synthetic` or the `nodes` + `edges` pair
/// supplies the graph; `density` is required unless the graph is synthetic.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputPaths {
    pub nodes: Option<PathBuf>,
    pub edges: Option<PathBuf>,
    pub density: Option<PathBuf>,
    pub updates: Option<PathBuf>,
    pub synthetic: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub radio: RadioConfig,
    pub energy: EnergyConfig,
    pub planner: PlannerConfig,
    pub scenario: ScenarioConfig,
    pub metrics: MetricsConfig,
    pub inputs: InputPaths,
    /// Time slot solved by `solve` and `oracle`.
    pub slot: usize,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            radio: RadioConfig::default(),
            energy: EnergyConfig::default(),
            planner: PlannerConfig::default(),
            scenario: ScenarioConfig::default(),
            metrics: MetricsConfig::default(),
            inputs: InputPaths::default(),
            slot: 0,
            output_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    /// Defaults, then the config file, then the dotted overrides, in that order.
    /// Relative input paths in the file are taken relative to the file.
    pub fn load(path: Option<&Path>, overrides: &[(String, String)]) -> Result<Self, CliError> {
        let mut value =
            serde_json::to_value(RunConfig::default()).expect("default config serializes");
        if let Some(path) = path {
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            let mut file: Value = serde_json::from_str(&text).map_err(|e| CliError::Input {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            if let Some(base) = path.parent() {
                rebase_inputs(&mut file, base);
            }
            merge(&mut value, file);
        }
        for (key, raw) in overrides {
            set_dotted(&mut value, key, raw)?;
        }
        let mut cfg: RunConfig =
            serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.resolve()?;
        Ok(cfg)
    }

    /// Validates every section and fills the derived planner fields.
    pub fn resolve(&mut self) -> Result<(), CliError> {
        self.radio.validate()?;
        self.energy.altitude_m = self.radio.altitude_m;
        self.energy.validate()?;
        self.scenario.validate()?;
        self.planner.g_r = compute_g_r(&self.energy);
        self.planner.recharge_points = self.energy.recharge_point_ids.clone();
        self.planner.serving_fraction = Some(self.energy.lambda_s);
        Ok(())
    }

    pub fn link_budget(&self) -> LinkBudget {
        compute_g_max(&self.radio)
    }

    pub fn write_resolved(&self, dir: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).expect("config serializes");
        write_file(&dir.join("resolved_config.json"), &(text + "\n"))
    }
}

fn rebase_inputs(file: &mut Value, base: &Path) {
    let Some(inputs) = file.get_mut("inputs").and_then(Value::as_object_mut) else {
        return;
    };
    for v in inputs.values_mut() {
        if let Some(s) = v.as_str() {
            let p = Path::new(s);
            if p.is_relative() {
                *v = Value::String(base.join(p).display().to_string());
            }
        }
    }
}

fn merge(into: &mut Value, from: Value) {
    match (into, from) {
        (Value::Object(a), Value::Object(b)) => {
            for (k, v) in b {
                merge(a.entry(k).or_insert(Value::Null), v);
            }
        }
        (slot, v) => *slot = v,
    }
}

fn set_dotted(root: &mut Value, key: &str, raw: &str) -> Result<(), CliError> {
    let parsed = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut at = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let obj = at.as_object_mut().ok_or_else(|| {
            CliError::Config(format!(
                "`{key}`: `{}` is not a section",
                parts[..i].join(".")
            ))
        })?;
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), parsed);
            return Ok(());
        }
        at = obj
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    Err(CliError::Config("empty override key".into()))
}

/// Splits `--section.key value` and `--section.key=value` pairs out of an
/// argument list; everything else is returned untouched.
pub fn split_overrides(
    args: impl IntoIterator<Item = String>,
) -> Result<(Vec<String>, Vec<(String, String)>), CliError> {
    let mut rest = Vec::new();
    let mut overrides = Vec::new();
    let mut args = args.into_iter();
    while let Some(arg) = args.next() {
        let Some(flag) = arg
            .strip_prefix("--")
            .filter(|f| f.split('=').next().is_some_and(|k| k.contains('.')))
        else {
            rest.push(arg);
            continue;
        };
        match flag.split_once('=') {
            Some((k, v)) => overrides.push((k.to_string(), v.to_string())),
            None => {
                let v = args
                    .next()
                    .ok_or_else(|| CliError::Config(format!("--{flag} needs a value")))?;
                overrides.push((flag.to_string(), v));
            }
        }
    }
    Ok((rest, overrides))
}

/// Parses a spacing value: meters, or a multiple of `g_max` such as `gmax`,
/// `2gmax` or `1.5gmax`.
pub fn parse_beta(token: &str, g_max: f64) -> Result<f64, CliError> {
    let t = token.trim();
    let value = match t.strip_suffix("gmax") {
        Some("") => Ok(g_max),
        Some(m) => m.trim_end_matches('*').parse::<f64>().map(|m| m * g_max),
        None => t.parse::<f64>(),
    };
    match value {
        Ok(v) if v >= 0.0 => Ok(v),
        _ => Err(CliError::Config(format!("invalid beta `{token}`"))),
    }
}

/// Loaded graph and density for a run.
pub struct Scenario {
    pub graph: StreetGraph,
    pub density: DensityProfile,
}

pub fn load_scenario(inputs: &InputPaths) -> Result<Scenario, CliError> {
    if let Some(spec_path) = &inputs.synthetic {
        let spec = SyntheticSpec::read_json(spec_path)?;
        let (graph, density) = generate_synthetic(&spec)?;
        return Ok(Scenario { graph, density });
    }
    let graph = load_graph(inputs)?;
    let density_path = inputs
        .density
        .as_ref()
        .ok_or_else(|| CliError::Config("inputs.density is required".into()))?;
    require_file(density_path)?;
    let density = DensityProfile::read_csv(density_path, graph.len())?;
    Ok(Scenario { graph, density })
}

fn load_graph(inputs: &InputPaths) -> Result<StreetGraph, CliError> {
    let (Some(nodes), Some(edges)) = (&inputs.nodes, &inputs.edges) else {
        return Err(CliError::Config(
            "inputs.nodes and inputs.edges (or inputs.synthetic) are required".into(),
        ));
    };
    require_file(nodes)?;
    require_file(edges)?;
    Ok(StreetGraph::read_csv(nodes, edges)?)
}

fn require_file(path: &Path) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Input {
            path: path.display().to_string(),
            message: "file not found".into(),
        })
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(path, contents).map_err(io_err(path))
}

/// Runs one planner on one slot. MinDD infeasibility yields the best partial
/// deployment together with the flag.
fn run_planner(
    planner: &Planner<'_>,
    problem: Problem,
    density: &DensityProfile,
    slot: usize,
    cfg: &PlannerConfig,
) -> Result<(PlannerResult, bool), PlannerError> {
    let result = match problem {
        Problem::Sdd => planner.sdd(density, slot),
        Problem::Kdd => planner.kdd(density, slot, cfg),
        Problem::Ekdd => planner.ekdd(density, slot, cfg),
        Problem::Mindd => {
            return match planner.mindd(density, slot, cfg) {
                Ok(r) => Ok((r, false)),
                Err(MinddError::Infeasible(inf)) => Ok((*inf.best, true)),
                Err(MinddError::Planner(e)) => Err(e),
            }
        }
    };
    result.map(|r| (r, false))
}

fn audit(
    graph: &StreetGraph,
    problem: Problem,
    result: &PlannerResult,
    cfg: &PlannerConfig,
) -> Vec<Violation> {
    let beta = if problem == Problem::Sdd {
        0.0
    } else {
        cfg.beta
    };
    let recharge = (problem == Problem::Ekdd).then_some((cfg.recharge_points.as_slice(), cfg.g_r));
    check_feasibility(graph, result.positions(), beta, recharge)
}

#[derive(Debug, Clone, Serialize)]
pub struct RechargePlan {
    #[serde(flatten)]
    pub groups: RechargeGroups,
    /// Group index of each drone, in pick order.
    pub assignment: Vec<usize>,
    pub g_r: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveOutcome {
    pub problem: Problem,
    pub slot: usize,
    pub g_max: f64,
    pub infeasible: bool,
    pub result: PlannerResult,
    pub metrics: MetricsReport,
    pub violations: Vec<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recharge: Option<RechargePlan>,
}

impl SolveOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.infeasible {
            2
        } else {
            0
        }
    }
}

const REPORT_HEADER: &str = "problem,slot,k,beta,gamma,speed_mps,g_r,drones,covered,total,served_ratio,ase,nc_mbps_km2,ue_per_drone,violations,status";

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Solves one problem on the configured slot and writes `deployment.json`,
/// `metrics.csv` and `resolved_config.json` into the output directory.
pub fn cmd_solve(cfg: &RunConfig, problem: Problem) -> Result<SolveOutcome, CliError> {
    let scenario = load_scenario(&cfg.inputs)?;
    let g_max = cfg.link_budget().g_max;
    let planner = Planner::new(&scenario.graph, g_max);
    if scenario.density.slot(cfg.slot)?.iter().all(|&c| c == 0) {
        log::warn!(
            "slot {} has no UEs; the deployment has zero benefit",
            cfg.slot
        );
    }
    let (result, infeasible) =
        run_planner(&planner, problem, &scenario.density, cfg.slot, &cfg.planner)?;
    let counts = scenario.density.slot(cfg.slot)?;
    let area = bounding_box_area_km2(&scenario.graph);
    let metrics = evaluate(
        &result.deployment,
        counts,
        &scenario.graph,
        g_max,
        &cfg.radio,
        &cfg.metrics,
        area,
    )?;
    let violations = audit(&scenario.graph, problem, &result, &cfg.planner);
    let recharge = (problem == Problem::Ekdd).then(|| {
        let groups = recharge_groups(result.drones(), cfg.energy.p_consume, cfg.energy.q_recharge);
        RechargePlan {
            assignment: group_assignment(result.drones(), groups.group_count),
            groups,
            g_r: cfg.planner.g_r,
        }
    });
    let outcome = SolveOutcome {
        problem,
        slot: cfg.slot,
        g_max,
        infeasible,
        result,
        metrics,
        violations,
        recharge,
    };

    let dir = &cfg.output_dir;
    let status = if infeasible { "infeasible" } else { "ok" };
    let row = metrics_row(
        problem,
        cfg,
        &outcome.result,
        Some(&outcome.metrics),
        outcome.violations.len(),
        status,
    );
    write_file(
        &dir.join("metrics.csv"),
        &format!("{REPORT_HEADER}\n{row}\n"),
    )?;
    let json = serde_json::to_string_pretty(&outcome).expect("outcome serializes");
    write_file(&dir.join("deployment.json"), &(json + "\n"))?;
    cfg.write_resolved(dir)?;
    Ok(outcome)
}

fn metrics_row(
    problem: Problem,
    cfg: &RunConfig,
    result: &PlannerResult,
    metrics: Option<&MetricsReport>,
    violations: usize,
    status: &str,
) -> String {
    let p = &cfg.planner;
    format!(
        "{problem},{},{},{},{},{},{},{},{},{},{},{},{},{},{violations},{status}",
        cfg.slot,
        p.k,
        p.beta,
        p.gamma,
        cfg.energy.speed_mps,
        p.g_r,
        result.drones(),
        result.covered_count,
        result.total_ues,
        result.served_ratio(),
        fmt_opt(metrics.and_then(|m| m.ase)),
        fmt_opt(metrics.map(|m| m.nc)),
        fmt_opt(metrics.and_then(|m| m.ue_per_drone)),
    )
}

/// Swept parameters, each an ordered list of values. An empty axis keeps the
/// configured value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepAxes {
    pub slot: Vec<usize>,
    pub k: Vec<usize>,
    /// Tokens accepted by [`parse_beta`].
    pub beta: Vec<String>,
    pub gamma: Vec<f64>,
    /// Drone speeds, m/s.
    pub s: Vec<f64>,
}

impl SweepAxes {
    /// Parses `name=v1,v2,...` or `name=start:stop[:step]` (inclusive).
    pub fn push_spec(&mut self, spec: &str) -> Result<(), CliError> {
        let (name, values) = spec
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("axis `{spec}` must look like name=values")))?;
        let tokens =
            expand_values(values).map_err(|m| CliError::Config(format!("axis `{name}`: {m}")))?;
        let bad = |t: &str| CliError::Config(format!("axis `{name}`: invalid value `{t}`"));
        match name {
            "slot" => {
                self.slot = tokens
                    .iter()
                    .map(|t| t.parse().map_err(|_| bad(t)))
                    .collect::<Result<_, _>>()?
            }
            "k" => {
                self.k = tokens
                    .iter()
                    .map(|t| t.parse().map_err(|_| bad(t)))
                    .collect::<Result<_, _>>()?
            }
            "beta" => self.beta = tokens,
            "gamma" => {
                self.gamma = tokens
                    .iter()
                    .map(|t| t.parse().map_err(|_| bad(t)))
                    .collect::<Result<_, _>>()?
            }
            "s" => {
                self.s = tokens
                    .iter()
                    .map(|t| t.parse().map_err(|_| bad(t)))
                    .collect::<Result<_, _>>()?
            }
            _ => {
                return Err(CliError::Config(format!(
                    "unknown sweep axis `{name}` (slot, k, beta, gamma, s)"
                )))
            }
        }
        Ok(())
    }

    /// Number of cells in the Cartesian product.
    pub fn cells(&self) -> usize {
        [
            self.slot.len(),
            self.k.len(),
            self.beta.len(),
            self.gamma.len(),
            self.s.len(),
        ]
        .iter()
        .map(|&n| n.max(1))
        .product()
    }
}

fn expand_values(values: &str) -> Result<Vec<String>, String> {
    let parts: Vec<&str> = values.split(':').collect();
    if parts.len() == 1 {
        return Ok(values
            .split(',')
            .map(|t| t.trim().to_string())
            .filter(|t| !t.is_empty())
            .collect());
    }
    if parts.len() > 3 {
        return Err("ranges are start:stop[:step]".into());
    }
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| format!("invalid number `{s}`"))
    };
    let (start, stop) = (num(parts[0])?, num(parts[1])?);
    let step = parts.get(2).map(|s| num(s)).transpose()?.unwrap_or(1.0);
    if !(step > 0.0) || stop < start {
        return Err("range needs start <= stop and a positive step".into());
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| {
            let v = start + i as f64 * step;
            // Trim float noise such as 0.9200000000000002.
            let rounded = (v * 1e9).round() / 1e9;
            rounded.to_string()
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepCell {
    pub slot: usize,
    pub k: usize,
    pub beta: f64,
    pub gamma: f64,
    pub speed_mps: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub cell: SweepCell,
    pub g_r: f64,
    pub result: Option<PlannerResult>,
    pub metrics: Option<MetricsReport>,
    pub violations: Vec<Violation>,
    pub infeasible: bool,
    pub error: Option<String>,
}

pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub csv: String,
}

/// Thread cap from `STREETCOVER_THREADS`; `None` means hardware default.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
}

/// Runs the Cartesian product of `axes` and writes `sweep.csv`.
///
/// Cells run in parallel on a dedicated pool of `threads` workers; rows are
/// emitted in axis order (slot, k, beta, gamma, s), so the CSV does not
/// depend on the thread count.
pub fn cmd_sweep(
    cfg: &RunConfig,
    problem: Problem,
    axes: &SweepAxes,
    threads: Option<usize>,
) -> Result<SweepOutput, CliError> {
    let scenario = load_scenario(&cfg.inputs)?;
    let out = sweep_scenario(cfg, problem, axes, threads, &scenario)?;
    write_file(&cfg.output_dir.join("sweep.csv"), &out.csv)?;
    cfg.write_resolved(&cfg.output_dir)?;
    Ok(out)
}

/// [`cmd_sweep`] on an already loaded scenario, without writing files.
pub fn sweep_scenario(
    cfg: &RunConfig,
    problem: Problem,
    axes: &SweepAxes,
    threads: Option<usize>,
    scenario: &Scenario,
) -> Result<SweepOutput, CliError> {
    let g_max = cfg.link_budget().g_max;
    let or = |v: &[usize], d: usize| if v.is_empty() { vec![d] } else { v.to_vec() };
    let orf = |v: &[f64], d: f64| if v.is_empty() { vec![d] } else { v.to_vec() };
    let betas = if axes.beta.is_empty() {
        vec![cfg.planner.beta]
    } else {
        axes.beta
            .iter()
            .map(|t| parse_beta(t, g_max))
            .collect::<Result<_, _>>()?
    };
    let mut cells = Vec::new();
    for &slot in &or(&axes.slot, cfg.slot) {
        for &k in &or(&axes.k, cfg.planner.k) {
            for &beta in &betas {
                for &gamma in &orf(&axes.gamma, cfg.planner.gamma) {
                    for &speed_mps in &orf(&axes.s, cfg.energy.speed_mps) {
                        cells.push(SweepCell {
                            slot,
                            k,
                            beta,
                            gamma,
                            speed_mps,
                        });
                    }
                }
            }
        }
    }

    let planner = Planner::new(&scenario.graph, g_max);
    let area = bounding_box_area_km2(&scenario.graph);
    let run_all = || -> Vec<SweepRow> {
        cells
            .par_iter()
            .map(|&cell| sweep_cell(cfg, problem, cell, &planner, scenario, area))
            .collect()
    };
    let rows = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?
            .install(run_all),
        None => run_all(),
    };

    let mut csv = String::from(REPORT_HEADER);
    csv.push('\n');
    for row in &rows {
        let _ = writeln!(csv, "{}", sweep_csv_row(problem, row));
    }
    Ok(SweepOutput { rows, csv })
}

fn sweep_cell(
    cfg: &RunConfig,
    problem: Problem,
    cell: SweepCell,
    planner: &Planner<'_>,
    scenario: &Scenario,
    area: f64,
) -> SweepRow {
    let energy = EnergyConfig {
        speed_mps: cell.speed_mps,
        ..cfg.energy.clone()
    };
    let g_r = compute_g_r(&energy);
    let pcfg = PlannerConfig {
        k: cell.k,
        beta: cell.beta,
        gamma: cell.gamma,
        g_r,
        ..cfg.planner.clone()
    };
    let mut row = SweepRow {
        cell,
        g_r,
        result: None,
        metrics: None,
        violations: Vec::new(),
        infeasible: false,
        error: None,
    };
    let outcome = energy
        .validate()
        .map_err(PlannerError::from)
        .and_then(|_| run_planner(planner, problem, &scenario.density, cell.slot, &pcfg));
    match outcome {
        Ok((result, infeasible)) => {
            let counts = scenario
                .density
                .slot(cell.slot)
                .expect("slot checked by planner");
            match evaluate(
                &result.deployment,
                counts,
                &scenario.graph,
                planner.g_max(),
                &cfg.radio,
                &cfg.metrics,
                area,
            ) {
                Ok(m) => row.metrics = Some(m),
                Err(e) => row.error = Some(e.to_string()),
            }
            row.violations = audit(&scenario.graph, problem, &result, &pcfg);
            row.infeasible = infeasible;
            row.result = Some(result);
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn sweep_csv_row(problem: Problem, row: &SweepRow) -> String {
    let c = row.cell;
    let head = format!(
        "{problem},{},{},{},{},{},{}",
        c.slot, c.k, c.beta, c.gamma, c.speed_mps, row.g_r
    );
    let status = match (&row.error, row.infeasible) {
        (Some(e), _) => csv_field(&format!("error: {e}")),
        (None, true) => "infeasible".into(),
        (None, false) => "ok".into(),
    };
    match &row.result {
        Some(r) => {
            let m = row.metrics.as_ref();
            format!(
                "{head},{},{},{},{},{},{},{},{},{status}",
                r.drones(),
                r.covered_count,
                r.total_ues,
                r.served_ratio(),
                fmt_opt(m.and_then(|m| m.ase)),
                fmt_opt(m.map(|m| m.nc)),
                fmt_opt(m.and_then(|m| m.ue_per_drone)),
                row.violations.len(),
            )
        }
        None => format!("{head},,,,,,,,,{status}"),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub problem: Problem,
    /// Greedy coverage (kDD/EkDD) or drone count (MinDD).
    pub greedy: f64,
    /// Optimal coverage or minimum drone count; `None` when MinDD is infeasible.
    pub optimum: Option<f64>,
    /// greedy / optimum (kDD/EkDD) or greedy / k* (MinDD).
    pub ratio: Option<f64>,
    /// `1 - 1/e` for kDD/EkDD, `ln(m) + 1` for MinDD.
    pub bound: f64,
    /// MinDD only: the target `gamma * |U|`.
    pub m: Option<f64>,
    pub bound_holds: bool,
    pub greedy_positions: Vec<usize>,
    pub optimal_positions: Vec<usize>,
    pub diagnostic: Option<String>,
}

/// Compares the greedy planner with the exhaustive optimum on a small instance.
pub fn cmd_oracle(
    cfg: &RunConfig,
    problem: Problem,
    guard: Option<u64>,
) -> Result<OracleReport, CliError> {
    let scenario = load_scenario(&cfg.inputs)?;
    oracle_report(
        &scenario.graph,
        &scenario.density,
        cfg.slot,
        cfg.link_budget().g_max,
        &cfg.planner,
        problem,
        guard,
    )
}

pub fn oracle_report(
    graph: &StreetGraph,
    density: &DensityProfile,
    slot: usize,
    g_max: f64,
    pcfg: &PlannerConfig,
    problem: Problem,
    guard: Option<u64>,
) -> Result<OracleReport, CliError> {
    let guard = guard.unwrap_or(DEFAULT_SUBSET_GUARD);
    let planner = Planner::new(graph, g_max);
    match problem {
        Problem::Sdd | Problem::Kdd | Problem::Ekdd => {
            let pcfg = if problem == Problem::Sdd {
                PlannerConfig::kdd(1, 0.0)
            } else {
                pcfg.clone()
            };
            let with_recharge = problem == Problem::Ekdd;
            let opt = brute_force_kdd(graph, density, slot, g_max, &pcfg, with_recharge, guard)?;
            let (greedy, _) = run_planner(&planner, problem, density, slot, &pcfg)?;
            let bound = 1.0 - (-1.0f64).exp();
            let ratio = if opt.covered == 0 {
                1.0
            } else {
                greedy.covered_count as f64 / opt.covered as f64
            };
            Ok(OracleReport {
                problem,
                greedy: greedy.covered_count as f64,
                optimum: Some(opt.covered as f64),
                ratio: Some(ratio),
                bound,
                m: None,
                bound_holds: ratio >= bound,
                greedy_positions: greedy.positions().to_vec(),
                optimal_positions: opt.subset,
                diagnostic: opt.diagnostic,
            })
        }
        Problem::Mindd => {
            let opt = brute_force_mindd(graph, density, slot, g_max, pcfg, guard)?;
            let (greedy, infeasible) = run_planner(&planner, problem, density, slot, pcfg)?;
            let bound = opt.target.ln() + 1.0;
            let drones = greedy.drones() as f64;
            let (ratio, holds, diagnostic) = match opt.k_star {
                Some(0) => (Some(1.0), greedy.drones() == 0, None),
                Some(k) => {
                    let holds = !infeasible && drones <= bound * k as f64;
                    (
                        Some(drones / k as f64),
                        holds,
                        infeasible.then(|| "greedy missed a reachable target".into()),
                    )
                }
                None => (
                    None,
                    infeasible,
                    Some("no subset reaches the target".into()),
                ),
            };
            Ok(OracleReport {
                problem,
                greedy: drones,
                optimum: opt.k_star.map(|k| k as f64),
                ratio,
                bound,
                m: Some(opt.target),
                bound_holds: holds,
                greedy_positions: greedy.positions().to_vec(),
                optimal_positions: opt.subset,
                diagnostic,
            })
        }
    }
}

/// Ingests `inputs.updates` against the `inputs.nodes`/`inputs.edges` graph
/// and writes `density.csv` and `ingest_report.json`.
pub fn cmd_ingest(cfg: &RunConfig) -> Result<IngestReport, CliError> {
    let graph = load_graph(&cfg.inputs)?;
    let updates = cfg
        .inputs
        .updates
        .as_ref()
        .ok_or_else(|| CliError::Config("inputs.updates is required".into()))?;
    require_file(updates)?;
    let records = read_updates_csv(updates)?;
    let (density, report) = snap_and_aggregate(records, &graph, &cfg.scenario)?;
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    density.write_csv(dir.join("density.csv"))?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_file(&dir.join("ingest_report.json"), &(json + "\n"))?;
    Ok(report)
}

/// Generates a synthetic scenario and writes `nodes.csv`, `edges.csv` and
/// `density.csv` into `out_dir`.
pub fn cmd_synth(spec_path: &Path, out_dir: &Path) -> Result<Scenario, CliError> {
    let spec = SyntheticSpec::read_json(spec_path)?;
    let (graph, density) = generate_synthetic(&spec)?;
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    graph.write_csv(out_dir.join("nodes.csv"), out_dir.join("edges.csv"))?;
    density.write_csv(out_dir.join("density.csv"))?;
    Ok(Scenario { graph, density })
}

pub fn cmd_gmax(radio: &RadioConfig) -> Result<LinkBudget, CliError> {
    radio.validate()?;
    Ok(compute_g_max(radio))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_tokens() {
        assert_eq!(parse_beta("0", 95.0).unwrap(), 0.0);
        assert_eq!(parse_beta("gmax", 95.0).unwrap(), 95.0);
        assert_eq!(parse_beta("2gmax", 95.0).unwrap(), 190.0);
        assert_eq!(parse_beta("1.5gmax", 10.0).unwrap(), 15.0);
        assert_eq!(parse_beta("40.5", 95.0).unwrap(), 40.5);
        assert!(parse_beta("-1", 95.0).is_err());
        assert!(parse_beta("xgmax", 95.0).is_err());
    }

    #[test]
    fn override_splitting() {
        let args = [
            "solve",
            "kdd",
            "--radio.alpha_db",
            "10",
            "--k",
            "3",
            "--planner.beta=95",
        ]
        .map(String::from);
        let (rest, ov) = split_overrides(args).unwrap();
        assert_eq!(rest, ["solve", "kdd", "--k", "3"]);
        assert_eq!(
            ov,
            [
                ("radio.alpha_db".into(), "10".into()),
                ("planner.beta".into(), "95".into())
            ]
        );
        assert!(split_overrides(["--radio.alpha_db".to_string()]).is_err());
    }

    #[test]
    fn overrides_apply_and_typos_fail() {
        let cfg = RunConfig::load(
            None,
            &[
                ("radio.alpha_db".into(), "10".into()),
                ("energy.speed_mps".into(), "4".into()),
            ],
        )
        .unwrap();
        assert_eq!(cfg.radio.alpha_db, 10.0);
        assert!((cfg.planner.g_r - 320.0).abs() < 1e-9);
        assert_eq!(cfg.planner.serving_fraction, Some(0.45));
        assert!(matches!(
            RunConfig::load(None, &[("radio.alpha".into(), "10".into())]),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            RunConfig::load(None, &[("radio.alpha_db.x".into(), "10".into())]),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn file_then_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.json");
        fs::write(
            &path,
            r#"{"planner": {"k": 4, "beta": 30}, "inputs": {"density": "d.csv"}}"#,
        )
        .unwrap();
        let cfg = RunConfig::load(Some(&path), &[("planner.k".into(), "6".into())]).unwrap();
        assert_eq!(cfg.planner.k, 6);
        assert_eq!(cfg.planner.beta, 30.0);
        assert_eq!(cfg.inputs.density, Some(dir.path().join("d.csv")));
    }

    #[test]
    fn axis_parsing() {
        let mut axes = SweepAxes::default();
        axes.push_spec("k=2:8").unwrap();
        axes.push_spec("beta=0,gmax,2gmax,3gmax").unwrap();
        assert_eq!(axes.k, vec![2, 3, 4, 5, 6, 7, 8]);
        assert_eq!(axes.cells(), 28);
        axes.push_spec("gamma=0.9:0.98:0.02").unwrap();
        assert_eq!(axes.gamma, vec![0.9, 0.92, 0.94, 0.96, 0.98]);
        assert!(axes.push_spec("q=1").is_err());
        assert!(axes.push_spec("k=a").is_err());
        assert!(axes.push_spec("k=3:1").is_err());
    }

    #[test]
    fn missing_density_names_path() {
        let dir = tempfile::tempdir().unwrap();
        let inputs = InputPaths {
            nodes: Some(dir.path().join("n.csv")),
            edges: Some(dir.path().join("e.csv")),
            ..Default::default()
        };
        fs::write(inputs.nodes.as_ref().unwrap(), "id,x,y\n0,0,0\n").unwrap();
        fs::write(inputs.edges.as_ref().unwrap(), "u,v\n").unwrap();
        let inputs = InputPaths {
            density: Some(dir.path().join("nope.csv")),
            ..inputs
        };
        let err = load_scenario(&inputs).err().unwrap().to_string();
        assert!(err.contains("nope.csv"), "{err}");
    }
}
