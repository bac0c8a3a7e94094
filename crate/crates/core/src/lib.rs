//! Placement of drone base stations above city streets.
//!
//! Drones hover at a fixed altitude over points of a street graph and serve
//! the ground users (UEs) within a coverage radius derived from the radio
//! link budget. The crate provides greedy planners for four placement
//! problems, each with an exhaustive oracle for small instances:
//!
//! * SDD: best single drone;
//! * kDD: `k` drones, pairwise graph distance above a spacing `beta`;
//! * EkDD: kDD restricted to points within the flying range of a recharge pole;
//! * MinDD: fewest drones serving a fraction `gamma` of all UEs.
//!
//! Around them sit the street graph ([`graph`]), the propagation model
//! ([`radio`]), coverage bookkeeping ([`coverage`]), the battery duty cycle
//! ([`energy`]), network metrics ([`metrics`]), GPS ingestion and synthetic
//! scenarios ([`scenario`]) and the command implementations ([`cli`]).
//!
//! ```
//! use streetcover::prelude::*;
//!
//! let points = (0..5).map(|i| StreetPoint::new(i, i as f64 * 60.0, 0.0)).collect();
//! let edges = (1..5).map(|i| EdgeSpec::new(i - 1, i)).collect();
//! let graph = StreetGraph::build(points, edges).unwrap();
//! let density = DensityProfile::from_counts(vec![3, 1, 0, 4, 9]);
//!
//! let g_max = compute_g_max(&RadioConfig::default()).g_max;
//! let plan = solve_kdd(&graph, &density, 0, g_max, &PlannerConfig::kdd(2, g_max)).unwrap();
//! assert_eq!(plan.positions(), &[3, 0]);
//! assert_eq!(plan.covered_count, 17);
//! ```

pub mod cli;
pub mod coverage;
pub mod energy;
pub mod graph;
pub mod metrics;
pub mod planners;
pub mod radio;
pub mod scenario;

pub mod prelude {
    pub use crate::coverage::{CoverageIndex, DensityProfile, Deployment};
    pub use crate::energy::{compute_g_r, recharge_groups, EnergyConfig};
    pub use crate::graph::{Distance, EdgeSpec, PointId, StreetGraph, StreetPoint};
    pub use crate::metrics::{evaluate, MetricsConfig, MetricsReport};
    pub use crate::planners::{
        brute_force_kdd, brute_force_mindd, check_feasibility, solve_ekdd, solve_kdd, solve_mindd,
        solve_sdd, Planner, PlannerConfig, PlannerResult, Problem,
    };
    pub use crate::radio::{compute_g_max, Propagation, RadioConfig};
    pub use crate::scenario::{generate_synthetic, GraphSpec, SyntheticSpec};
}
