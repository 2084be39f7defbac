use std::collections::HashSet;

use proptest::prelude::*;

use mrdrrt::drrt::{plan, DrrtParams, GeometricGraph, IdentityConnector};
use mrdrrt::geometry::{Point2, Polygon2};
use mrdrrt::oracle::validate_path;
use mrdrrt::planner::{solve, PlannerOptions};
use mrdrrt::prm::PrmConfig;
use mrdrrt::scenario::{RobotSpec, Scenario};
use mrdrrt::{Drrt, ProductMode};

fn disjoint_rooms() -> Scenario {
    Scenario {
        name: "disjoint-rooms".into(),
        workspace: Polygon2::rect(0.0, 0.0, 12.0, 5.0),
        obstacles: vec![Polygon2::rect(5.8, 0.0, 6.2, 5.0)],
        robots: vec![
            RobotSpec { radius: 0.5, start: Point2::new(1.0, 1.0), target: Point2::new(4.8, 4.0) },
            RobotSpec { radius: 0.5, start: Point2::new(11.0, 1.0), target: Point2::new(7.2, 4.0) },
        ],
    }
}

#[test]
fn disjoint_rooms_solve_in_the_first_round() {
    let sc = disjoint_rooms();
    let mut first = 0;
    for seed in 0..20 {
        let opts = PlannerOptions { seed, prm: PrmConfig { n: 80, k: 8, ..Default::default() }, ..Default::default() };
        let (maps, run) = solve(&sc, &opts).unwrap();
        assert!(run.report.success, "seed {seed}: {:?}", run.report);
        assert!(validate_path(&sc, &maps, run.path.as_ref().unwrap()).ok);
        first += usize::from(run.report.iterations == 1);
    }
    assert!(first >= 15, "only {first}/20 solved in round 1");
}

#[test]
fn cartesian_plans_validate() {
    let sc = mrdrrt::scenarios::corridor_swap();
    for seed in 0..3 {
        let opts = PlannerOptions { seed, mode: ProductMode::Cartesian, ..Default::default() };
        let (maps, run) = solve(&sc, &opts).unwrap();
        assert!(run.report.success, "{:?}", run.report);
        let path = run.path.unwrap();
        assert!(validate_path(&sc, &maps, &path).ok);
        assert!(path.steps().iter().all(|s| matches!(s, mrdrrt::StepKind::Single(_))));
    }
}

fn arb_graph() -> impl Strategy<Value = GeometricGraph> {
    (4usize..30).prop_flat_map(|n| {
        (
            prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), n),
            prop::collection::vec((0..n, 0..n), n..3 * n),
        )
            .prop_map(|(pts, raw)| {
                let edges: Vec<(usize, usize)> = raw.into_iter().filter(|(a, b)| a != b).collect();
                GeometricGraph::new(pts.into_iter().map(|(x, y)| vec![x, y]).collect(), &edges, vec![(0.0, 1.0); 2])
                    .unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tree_stays_a_subtree(g in arb_graph(), seed in any::<u64>(), fallback in any::<bool>()) {
        let t = g.len() - 1;
        let params = DrrtParams { seed, fallback, max_iterations: 8, ..Default::default() };
        let out = plan(&g, &0, &t, &params, &mut IdentityConnector).unwrap();
        let nodes = out.tree.nodes();
        prop_assert_eq!(nodes[0].vertex, 0);
        prop_assert!(nodes[0].parent.is_none());
        let mut seen = HashSet::new();
        for (i, n) in nodes.iter().enumerate() {
            prop_assert!(seen.insert(n.vertex));
            if i > 0 {
                let p = n.parent.unwrap();
                prop_assert!(p < i);
                prop_assert!(g.has_edge(nodes[p].vertex, n.vertex));
            }
        }
        prop_assert_eq!(out.tree.edges().count() + 1, nodes.len());
        if let Ok(path) = out.result {
            prop_assert_eq!(*path.first(), 0);
            prop_assert_eq!(*path.last(), t);
            for w in path.vertices().windows(2) {
                prop_assert!(g.has_edge(w[0], w[1]));
            }
        }
    }

    #[test]
    fn same_seed_same_tree(g in arb_graph(), seed in any::<u64>()) {
        let grow = || {
            let mut d = Drrt::new(&g, 0, seed);
            d.expand(200);
            d.tree().nodes().iter().map(|n| (n.vertex, n.parent)).collect::<Vec<_>>()
        };
        prop_assert_eq!(grow(), grow());
    }
}
