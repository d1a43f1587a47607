use proptest::prelude::*;

use spartite::cover::build_support_graph;
use spartite::exact::{brute_force_n, components, exact_solve, prune_low_degree};
use spartite::lp::build_double_cover;
use spartite::simulate::{sbm_sample, PRule, SimConfig};
use spartite::skeleton::{apply_incidence, build_incidence_matrix};
use spartite::verify::{
    brute_force_lp_optimum, verify_2_regular_subgraph, verify_cycle_cover, verify_lp_solution,
};
use spartite::{
    blow_up, build_cycle_cover, exact_n, solve_lp, EdgeCoefficients, ExactConfig, GeneralGraph,
    NodeAllocation, SkeletonGraph,
};

fn all_pairs(q: usize) -> Vec<(usize, usize)> {
    (0..q).flat_map(|i| (i..q).map(move |j| (i, j))).collect()
}

/// Skeleton on `q` nodes with a non-empty random edge subset.
fn skeleton(max_q: usize) -> impl Strategy<Value = SkeletonGraph> {
    (1..=max_q).prop_flat_map(|q| {
        let pairs = all_pairs(q);
        proptest::sample::subsequence(pairs.clone(), 1..=pairs.len())
            .prop_map(move |edges| SkeletonGraph::new(q, edges).unwrap())
    })
}

fn skeleton_with_alloc(
    max_q: usize,
    lo: u64,
    hi: u64,
) -> impl Strategy<Value = (SkeletonGraph, NodeAllocation)> {
    skeleton(max_q).prop_flat_map(move |s| {
        let q = s.node_count();
        (
            Just(s),
            proptest::collection::vec(lo..=hi, q).prop_map(NodeAllocation::new),
        )
    })
}

fn skeleton_with_c(max_q: usize) -> impl Strategy<Value = (SkeletonGraph, EdgeCoefficients)> {
    skeleton(max_q).prop_flat_map(|s| {
        let m = s.edge_count();
        (
            Just(s),
            proptest::collection::vec(0u64..20, m).prop_map(EdgeCoefficients::on_skeleton),
        )
    })
}

fn graph(max_n: usize) -> impl Strategy<Value = GeneralGraph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        let len = pairs.len();
        proptest::sample::subsequence(pairs, 0..=len)
            .prop_map(move |edges| GeneralGraph::new(n, edges).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn incidence_preserves_total((s, c) in skeleton_with_c(6)) {
        let z = build_incidence_matrix(&s);
        for j in 0..z.cols() {
            prop_assert_eq!(z.column_sum_doubled(j), 2);
        }
        let y = apply_incidence(&z, &c).unwrap();
        prop_assert_eq!(y.total_doubled(), 2 * c.total());
    }

    #[test]
    fn phi_undoes_psi((s, c) in skeleton_with_c(6)) {
        let b = build_double_cover(&s, &NodeAllocation::new(vec![1; s.node_count()])).unwrap();
        let back = b.phi_doubled(&b.psi(&c).unwrap()).unwrap();
        let twice: Vec<u64> = c.values().iter().map(|&v| 2 * v).collect();
        prop_assert_eq!(back.doubled(), twice.as_slice());
    }

    #[test]
    fn cover_loads_average_to_y(
        (s, d) in skeleton(6).prop_flat_map(|s| {
            let b = build_double_cover(&s, &NodeAllocation::new(vec![1; s.node_count()])).unwrap();
            let m = b.edge_count();
            (Just(s), proptest::collection::vec(0u64..20, m))
        })
    ) {
        let q = s.node_count();
        let b = build_double_cover(&s, &NodeAllocation::new(vec![1; q])).unwrap();
        let d = EdgeCoefficients::new(spartite::skeleton::Host::DoubleCover, d);
        let load = b.load(&d).unwrap();
        let y = apply_incidence(&build_incidence_matrix(&s), &b.phi(&d).unwrap()).unwrap();
        for i in 0..q {
            prop_assert_eq!(y.doubled()[i], load[i] + load[q + i]);
        }
    }

    #[test]
    fn half_integer_nodes_pair_up_per_component((s, c) in skeleton_with_c(6)) {
        let y = apply_incidence(&build_incidence_matrix(&s), &c).unwrap();
        let support = build_support_graph(&s, &c).unwrap();
        let mut odd = vec![0usize; support.components().len()];
        for i in y.half_integer_nodes() {
            odd[support.component_of(i)] += 1;
        }
        prop_assert!(odd.iter().all(|k| k % 2 == 0), "{:?}", odd);
    }

    #[test]
    fn lp_solution_is_valid_and_optimal((s, x) in skeleton_with_alloc(4, 0, 4)) {
        let sol = solve_lp(&s, &x).unwrap();
        let report = verify_lp_solution(&s, &x, &sol, true);
        prop_assert!(report.overall, "{}", report);
    }

    #[test]
    fn lp_optimum_is_monotone_in_x(
        (s, x, bump) in skeleton_with_alloc(5, 0, 10).prop_flat_map(|(s, x)| {
            let q = s.node_count();
            (Just(s), Just(x), proptest::collection::vec(0u64..4, q))
        })
    ) {
        let bigger = NodeAllocation::new(
            x.values().iter().zip(&bump).map(|(a, b)| a + b).collect(),
        );
        let small = solve_lp(&s, &x).unwrap().objective;
        let large = solve_lp(&s, &bigger).unwrap().objective;
        prop_assert!(small <= large);
        prop_assert!(large <= bigger.total());
    }

    #[test]
    fn covers_verify((s, x) in skeleton_with_alloc(6, 3, 8)) {
        let sol = solve_lp(&s, &x).unwrap();
        let cover = build_cycle_cover(&s, &x, &sol).unwrap();
        let k = blow_up(&s, &x).unwrap();
        let report = verify_cycle_cover(&k, &cover, sol.objective as usize);
        prop_assert!(report.overall, "{}", report);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lp_optimum_equals_n_of_blowup((s, x) in skeleton_with_alloc(3, 3, 4)) {
        let k = blow_up(&s, &x).unwrap();
        let g = GeneralGraph::new(k.vertex_count(), k.edges()).unwrap();
        prop_assert_eq!(exact_n(&g).unwrap() as u64, solve_lp(&s, &x).unwrap().objective);
    }

    #[test]
    fn exact_matches_brute_force(g in graph(11)) {
        let sol = exact_solve(&g, &ExactConfig::default()).unwrap();
        prop_assert_eq!(sol.order, brute_force_n(&g).unwrap());
        let report = verify_2_regular_subgraph(&g, &sol.edges);
        prop_assert!(report.overall, "{}", report);
        prop_assert_eq!(report.covered, Some(sol.order));
    }

    #[test]
    fn matching_reduction_matches_brute_force(g in graph(12)) {
        let config = ExactConfig { node_budget: 0, matching_fallback: true };
        let sol = exact_solve(&g, &config).unwrap();
        prop_assert_eq!(sol.order, brute_force_n(&g).unwrap());
        let report = verify_2_regular_subgraph(&g, &sol.edges);
        prop_assert!(report.overall, "{}", report);
        prop_assert_eq!(report.covered, Some(sol.order));
    }

    #[test]
    fn pruning_and_splitting_preserve_n(g in graph(11)) {
        let n = brute_force_n(&g).unwrap();
        let pruned = prune_low_degree(&g);
        prop_assert_eq!(brute_force_n(&pruned).unwrap(), n);
        let total: usize = components(&pruned).iter().map(|c| brute_force_n(c).unwrap()).sum();
        prop_assert_eq!(total, n);
        prop_assert!(pruned.degrees().iter().all(|&d| d >= 2));
    }

    #[test]
    fn samples_stay_below_lp_optimum(
        (s, x) in skeleton_with_alloc(3, 1, 5),
        p in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let n_star = solve_lp(&s, &x).unwrap().objective;
        let cfg = SimConfig::new(s, x, PRule::Constant(p), 1, seed);
        let g = sbm_sample(&cfg, 0).unwrap();
        prop_assert!(exact_n(&g).unwrap() as u64 <= n_star);
    }
}

#[test]
fn brute_force_lp_oracle_agrees_on_loop_allocation() {
    let s = SkeletonGraph::new(2, [(0, 0), (0, 1)]).unwrap();
    for a in 0..=4 {
        for b in 0..=4 {
            let x = NodeAllocation::new(vec![a, b]);
            assert_eq!(
                brute_force_lp_optimum(&s, &x),
                Some(solve_lp(&s, &x).unwrap().objective),
                "x = ({a}, {b})"
            );
        }
    }
}
