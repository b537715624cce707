use proptest::prelude::*;
use ridepool::bnb::{branch_solve, solve_bnb, split_components, BnbOptions, SearchGraph, WEIGHT_EPS};
use ridepool::flownet::{assign_passengers_to_taxis, build_flow_network, solve_modified_ff};
use ridepool::grouping::partition_stable_groups;
use ridepool::io::generate::{desk_config, generate_random_instance};
use ridepool::model::{driver_economics, validate_assignment};
use ridepool::oracle::{brute_force_optimal, exhaustive_trip_sets};
use ridepool::vtg::build_vtg;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn trip_graph_matches_enumeration(seed in any::<u64>(), n in 1usize..=10, b in 1usize..=4) {
        let cfg = desk_config();
        let p = &cfg.params;
        let inst = generate_random_instance(seed, n, b, &cfg);
        let vtg = build_vtg(&inst, p);
        prop_assert_eq!(vtg.member_sets(), exhaustive_trip_sets(&inst, p).unwrap());
        prop_assert!(vtg.closure_violation().is_none());
        for (vid, trips) in vtg.vehicle_edges() {
            let v = inst.vehicle(*vid).unwrap();
            for &t in trips {
                prop_assert!(driver_economics(v, &vtg.trip(t).plan, p).willing);
            }
        }
    }

    #[test]
    fn exact_search_matches_oracle(seed in any::<u64>(), n in 1usize..=8, b in 1usize..=4, dominance in any::<bool>()) {
        let cfg = desk_config();
        let p = &cfg.params;
        let inst = generate_random_instance(seed, n, b, &cfg);
        let vtg = build_vtg(&inst, p);
        let oracle = brute_force_optimal(&vtg, &inst, p).unwrap();
        let opts = BnbOptions { dominance, ..cfg.bnb_options() };
        let (assignment, sol, g) = solve_bnb(&vtg, &inst, p, opts).unwrap();
        prop_assert_eq!(sol.served, oracle.best_served);
        prop_assert!((sol.weight - oracle.best_weight).abs() < 1e-6);
        prop_assert_eq!(assignment.served, sol.served);
        prop_assert!(validate_assignment(&assignment, &inst, p, cfg.validation_options()).is_empty());
        prop_assert!(sol.stats.max_depth <= g.table_len());
        prop_assert_eq!(sol.stats.reduction_bound_misses, 0);
        if g.table_len() < 60 {
            prop_assert!(sol.stats.nodes_expanded <= 1u64 << (g.table_len() + 1));
        }
    }

    #[test]
    fn components_add_up(seed in any::<u64>(), n in 1usize..=10, b in 1usize..=5) {
        let cfg = desk_config();
        let p = &cfg.params;
        let inst = generate_random_instance(seed, n, b, &cfg);
        let g = SearchGraph::from_vtg(&build_vtg(&inst, p), &inst, p).unwrap();
        let whole = branch_solve(&g, BnbOptions::default()).unwrap();
        let parts: Vec<_> = split_components(&g).iter().map(|c| branch_solve(c, BnbOptions::default()).unwrap()).collect();
        prop_assert_eq!(whole.served, parts.iter().map(|s| s.served).sum::<usize>());
        prop_assert!((whole.weight - parts.iter().map(|s| s.weight).sum::<f64>()).abs() < WEIGHT_EPS * 1e3);
        let mut chosen: Vec<usize> = parts.iter().flat_map(|s| s.chosen.iter().copied()).collect();
        chosen.sort();
        let mut whole_chosen = whole.chosen.clone();
        whole_chosen.sort();
        prop_assert_eq!(chosen, whole_chosen);
    }

    #[test]
    fn flow_is_sound_and_bounded_by_oracle(seed in any::<u64>(), n in 1usize..=8, b in 1usize..=4) {
        let cfg = desk_config();
        let p = &cfg.params;
        let inst = generate_random_instance(seed, n, b, &cfg);
        let groups = partition_stable_groups(&inst.requests, p, cfg.mode).unwrap();
        let mut net = build_flow_network(&groups, &inst, p).unwrap();
        let sol = solve_modified_ff(&mut net);
        let (assignment, _) = assign_passengers_to_taxis(&net, &sol.scores, &inst, p).unwrap();
        let oracle = brute_force_optimal(&build_vtg(&inst, p), &inst, p).unwrap();
        prop_assert!(assignment.served <= oracle.best_served);
        prop_assert!(assignment.served <= sol.scores.total() as usize);
        prop_assert!(validate_assignment(&assignment, &inst, p, cfg.validation_options()).is_empty());
    }
}
