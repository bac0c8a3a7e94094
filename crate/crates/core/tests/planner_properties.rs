use proptest::prelude::*;
use streetcover::coverage::DensityProfile;
use streetcover::graph::{EdgeSpec, StreetGraph, StreetPoint};
use streetcover::planners::{check_feasibility, MinddError, Planner, PlannerConfig};

const G_MAX: f64 = 94.585;

/// Random geometric graph with UE counts.
fn instance(max_points: usize) -> impl Strategy<Value = (StreetGraph, DensityProfile)> {
    (4..=max_points)
        .prop_flat_map(|n| {
            (
                prop::collection::vec((0.0..500.0f64, 0.0..500.0f64), n),
                prop::collection::vec(0u64..30, n),
            )
        })
        .prop_map(|(pts, counts)| {
            let mut edges = Vec::new();
            for a in 0..pts.len() {
                for b in a + 1..pts.len() {
                    let d = (pts[a].0 - pts[b].0).hypot(pts[a].1 - pts[b].1);
                    if d > 0.0 && d <= 120.0 {
                        edges.push(EdgeSpec::with_length(a, b, d));
                    }
                }
            }
            let points = pts
                .iter()
                .enumerate()
                .map(|(i, &(x, y))| StreetPoint::new(i, x, y))
                .collect();
            (
                StreetGraph::build(points, edges).unwrap(),
                DensityProfile::from_counts(counts),
            )
        })
}

fn beta() -> impl Strategy<Value = f64> {
    prop_oneof![
        Just(0.0),
        Just(G_MAX / 2.0),
        Just(G_MAX),
        Just(2.0 * G_MAX),
        0.0..300.0f64
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn literal_runs_are_nested_in_k((g, d) in instance(25), beta in beta(), k in 1usize..8) {
        let planner = Planner::new(&g, G_MAX);
        let small = planner.kdd(&d, 0, &PlannerConfig::kdd(k, beta)).unwrap();
        let large = planner.kdd(&d, 0, &PlannerConfig::kdd(k + 1, beta)).unwrap();
        prop_assert!(large.positions().starts_with(small.positions()));
        prop_assert!(large.covered_count >= small.covered_count);
    }

    #[test]
    fn committed_marginals_never_increase((g, d) in instance(25), beta in beta(), k in 1usize..10) {
        let r = Planner::new(&g, G_MAX).kdd(&d, 0, &PlannerConfig { fill: true, ..PlannerConfig::kdd(k, beta) }).unwrap();
        prop_assert!(r.per_pick_marginals.windows(2).all(|w| w[1] <= w[0]));
        prop_assert_eq!(r.per_pick_marginals.iter().sum::<u64>(), r.covered_count);
    }

    #[test]
    fn zero_beta_places_exactly_k((g, d) in instance(25), k in 1usize..10) {
        let r = Planner::new(&g, G_MAX).kdd(&d, 0, &PlannerConfig::kdd(k, 0.0)).unwrap();
        prop_assert_eq!(r.drones(), k.min(g.len()));
        prop_assert!(r.skipped.is_empty());
    }

    #[test]
    fn fill_extends_the_literal_run((g, d) in instance(25), beta in beta(), k in 1usize..8) {
        let planner = Planner::new(&g, G_MAX);
        let literal = planner.kdd(&d, 0, &PlannerConfig::kdd(k, beta)).unwrap();
        let filled = planner.kdd(&d, 0, &PlannerConfig { fill: true, ..PlannerConfig::kdd(k, beta) }).unwrap();
        prop_assert!(filled.positions().starts_with(literal.positions()));
        prop_assert!(filled.drones() <= k);
    }

    #[test]
    fn every_output_is_feasible(
        (g, d) in instance(25),
        beta in beta(),
        k in 1usize..8,
        g_r in 0.0..400.0f64,
        pole in any::<prop::sample::Index>(),
        fill in any::<bool>(),
    ) {
        let planner = Planner::new(&g, G_MAX);
        let poles = vec![pole.index(g.len())];
        let kdd = planner.kdd(&d, 0, &PlannerConfig { fill, ..PlannerConfig::kdd(k, beta) }).unwrap();
        prop_assert!(check_feasibility(&g, kdd.positions(), beta, None).is_empty());
        let cfg = PlannerConfig { fill, ..PlannerConfig::ekdd(k, beta, g_r, poles.clone()) };
        let ekdd = planner.ekdd(&d, 0, &cfg).unwrap();
        prop_assert!(check_feasibility(&g, ekdd.positions(), beta, Some((&poles, g_r))).is_empty());
        let mindd = match planner.mindd(&d, 0, &PlannerConfig::mindd(0.8, beta)) {
            Ok(r) => r,
            Err(MinddError::Infeasible(inf)) => *inf.best,
            Err(e) => panic!("{e}"),
        };
        prop_assert!(check_feasibility(&g, mindd.positions(), beta, None).is_empty());
    }

    #[test]
    fn mindd_count_grows_with_gamma((g, d) in instance(25), beta in beta(), a in 0.05..1.0f64, b in 0.05..1.0f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let planner = Planner::new(&g, G_MAX);
        let drones = |gamma| match planner.mindd(&d, 0, &PlannerConfig::mindd(gamma, beta)) {
            Ok(r) => Some(r.drones()),
            Err(MinddError::Infeasible(_)) => None,
            Err(e) => panic!("{e}"),
        };
        match (drones(lo), drones(hi)) {
            (Some(x), Some(y)) => prop_assert!(x <= y),
            (None, Some(_)) => prop_assert!(false, "lower target infeasible, higher feasible"),
            _ => {}
        }
    }

    #[test]
    fn results_are_deterministic((g, d) in instance(25), beta in beta(), k in 1usize..8) {
        let cfg = PlannerConfig::kdd(k, beta);
        let a = Planner::new(&g, G_MAX).kdd(&d, 0, &cfg).unwrap();
        let planner = Planner::new(&g, G_MAX);
        let _ = planner.mindd(&d, 0, &PlannerConfig::mindd(0.5, beta));
        let b = planner.kdd(&d, 0, &cfg).unwrap();
        prop_assert_eq!(a, b);
    }
}
