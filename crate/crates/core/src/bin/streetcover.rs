use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use streetcover::cli::{self, CliError, RunConfig, SweepAxes};
use streetcover::planners::Problem;

#[derive(Parser)]
#[command(version, about = "Drone base station placement over street graphs")]
#[command(
    after_help = "Any config key can be overridden as --section.key VALUE, e.g. --radio.alpha_db 10."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Output directory (config key `output_dir`).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Knobs {
    #[arg(long)]
    k: Option<usize>,
    /// Meters, or a multiple of g_max such as `2gmax`.
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    slot: Option<usize>,
    /// Keep placing drones after constraint rejections until k are placed.
    #[arg(long)]
    fill: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one placement problem on one slot.
    Solve {
        problem: Problem,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        knobs: Knobs,
    },
    /// Run a parameter grid and write sweep.csv.
    Sweep {
        problem: Problem,
        #[command(flatten)]
        common: Common,
        /// Axis as name=v1,v2 or name=start:stop[:step]; names: slot, k, beta, gamma, s.
        #[arg(long = "axis", short = 'a')]
        axes: Vec<String>,
        /// Worker threads; defaults to STREETCOVER_THREADS, then all cores.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Compare greedy with the exhaustive optimum on a small instance.
    Oracle {
        problem: Problem,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        knobs: Knobs,
        /// Maximum number of subsets to enumerate.
        #[arg(long)]
        guard: Option<u64>,
    },
    /// Snap GPS updates to the street graph and write density.csv.
    Ingest {
        #[command(flatten)]
        common: Common,
    },
    /// Generate a synthetic scenario from a JSON spec.
    Synth {
        spec: PathBuf,
        #[arg(long, short, default_value = ".")]
        out: PathBuf,
    },
    /// Print the coverage radius of the configured radio.
    Gmax {
        #[command(flatten)]
        common: Common,
    },
}

fn load(
    common: &Common,
    knobs: Option<&Knobs>,
    mut overrides: Vec<(String, String)>,
) -> Result<RunConfig, CliError> {
    if let Some(out) = &common.out {
        overrides.push((
            "output_dir".into(),
            serde_json::to_string(out).expect("path serializes"),
        ));
    }
    let beta = knobs.and_then(|k| k.beta.clone());
    if let Some(k) = knobs {
        let mut set = |key: &str, v: Option<String>| {
            if let Some(v) = v {
                overrides.push((key.into(), v));
            }
        };
        set("planner.k", k.k.map(|v| v.to_string()));
        set("planner.gamma", k.gamma.map(|v| v.to_string()));
        set("slot", k.slot.map(|v| v.to_string()));
        set("planner.fill", k.fill.then(|| "true".into()));
    }
    let mut cfg = RunConfig::load(common.config.as_deref(), &overrides)?;
    if let Some(beta) = beta {
        cfg.planner.beta = cli::parse_beta(&beta, cfg.link_budget().g_max)?;
    }
    Ok(cfg)
}

fn run() -> Result<i32, CliError> {
    let (args, overrides) = cli::split_overrides(std::env::args())?;
    match Cli::parse_from(args).command {
        Command::Solve {
            problem,
            common,
            knobs,
        } => {
            let cfg = load(&common, Some(&knobs), overrides)?;
            let outcome = cli::cmd_solve(&cfg, problem)?;
            let m = &outcome.metrics;
            println!(
                "{problem}: {} drones at {:?}, served {}/{} ({:.4}); output in {}",
                m.drones,
                outcome.result.positions(),
                m.served,
                m.total,
                m.served_ratio,
                cfg.output_dir.display()
            );
            if outcome.infeasible {
                eprintln!(
                    "error: coverage target of {} UEs is unreachable",
                    cfg.planner.gamma * m.total as f64
                );
            }
            Ok(outcome.exit_code())
        }
        Command::Sweep {
            problem,
            common,
            axes,
            threads,
        } => {
            let cfg = load(&common, None, overrides)?;
            let mut parsed = SweepAxes::default();
            for a in &axes {
                parsed.push_spec(a)?;
            }
            let out = cli::cmd_sweep(
                &cfg,
                problem,
                &parsed,
                threads.or_else(cli::threads_from_env),
            )?;
            let failed = out.rows.iter().filter(|r| r.error.is_some()).count();
            println!(
                "{} cells written to {} ({failed} failed)",
                out.rows.len(),
                cfg.output_dir.join("sweep.csv").display()
            );
            Ok(0)
        }
        Command::Oracle {
            problem,
            common,
            knobs,
            guard,
        } => {
            let cfg = load(&common, Some(&knobs), overrides)?;
            let report = cli::cmd_oracle(&cfg, problem, guard)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
            Ok(0)
        }
        Command::Ingest { common } => {
            let cfg = load(&common, None, overrides)?;
            let report = cli::cmd_ingest(&cfg)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
            Ok(0)
        }
        Command::Synth { spec, out } => {
            let scenario = cli::cmd_synth(&spec, &out)?;
            println!(
                "{} points, {} edges written to {}",
                scenario.graph.len(),
                scenario.graph.edges().len(),
                out.display()
            );
            Ok(0)
        }
        Command::Gmax { common } => {
            let cfg = load(&common, None, overrides)?;
            let budget = cli::cmd_gmax(&cfg.radio)?;
            println!(
                "g_max = {:.3} m (slant range {:.3} m)",
                budget.g_max, budget.slant_range
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
