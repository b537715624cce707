//! Scaling runs for the flow solver and node counts for branch-and-bound.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::InstanceConfig;
use super::generate::{desk_config, generate_clustered_instance, generate_random_instance};
use super::report::{log10_ratio, within_trivial_bound};
use crate::bnb::{branch_solve, BnbError, SearchGraph};
use crate::flownet::{assign_passengers_to_taxis, build_flow_network, solve_modified_ff};
use crate::grouping::{partition_stable_groups, StableGroups};
use crate::model::{EconomicParams, Instance};
use crate::vtg::build_vtg;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub requests: usize,
    pub vehicles: usize,
    /// `|B||P| + |B|^2`.
    pub work: f64,
    /// Fastest of the repeats: network build, solve and passenger assignment.
    pub seconds: f64,
    pub served: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub points: Vec<ScalingPoint>,
    pub slope: f64,
    pub intercept: f64,
}

/// Least-squares line through `(ln x, ln y)`: `(slope, intercept)`.
pub fn fit_loglog(xy: &[(f64, f64)]) -> (f64, f64) {
    let n = xy.len() as f64;
    let pts: Vec<(f64, f64)> = xy.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Seconds for one flow run on pre-computed groups, and riders served.
pub fn time_flow_stage(groups: &StableGroups, instance: &Instance, p: &EconomicParams) -> (f64, usize) {
    let start = Instant::now();
    let mut net = build_flow_network(groups, instance, p).expect("generated instances are valid");
    let sol = solve_modified_ff(&mut net);
    let (assignment, _) = assign_passengers_to_taxis(&net, &sol.scores, instance, p).expect("bookkeeping holds");
    (start.elapsed().as_secs_f64(), assignment.served)
}

/// Clustered instances (cliques of four) over every `(|P|, |B|)` combination,
/// each timed `repeats` times.
pub fn run_scaling_bench(cfg: &InstanceConfig, requests: &[usize], vehicles: &[usize], repeats: usize) -> ScalingFit {
    let mut points = Vec::new();
    for &n in requests {
        for &b in vehicles {
            let inst = generate_clustered_instance(cfg.seed, n, b, 4, cfg);
            let groups = partition_stable_groups(&inst.requests, &cfg.params, cfg.mode)
                .expect("greedy grouping cannot fail");
            let mut best = f64::INFINITY;
            let mut served = 0;
            for _ in 0..repeats.max(1) {
                let (secs, s) = time_flow_stage(&groups, &inst, &cfg.params);
                best = best.min(secs);
                served = s;
            }
            points.push(ScalingPoint {
                requests: n,
                vehicles: b,
                work: (b * n + b * b) as f64,
                seconds: best,
                served,
            });
        }
    }
    let (slope, intercept) = fit_loglog(&points.iter().map(|p| (p.work, p.seconds)).collect::<Vec<_>>());
    ScalingFit {
        points,
        slope,
        intercept,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub seed: u64,
    pub requests: usize,
    pub vehicles: usize,
    pub edges: usize,
    pub nodes_expanded: u64,
    pub log10_nodes_over_growth: f64,
    pub within_trivial_bound: bool,
    pub served: usize,
}

/// Branch-and-bound on random desk-scale instances, one per seed.
pub fn run_branch_report(seeds: std::ops::Range<u64>, requests: usize, vehicles: usize) -> Result<Vec<BranchPoint>, BnbError> {
    let cfg = desk_config();
    seeds
        .map(|seed| {
            let inst = generate_random_instance(seed, requests, vehicles, &cfg);
            let vtg = build_vtg(&inst, &cfg.params);
            let g = SearchGraph::from_vtg(&vtg, &inst, &cfg.params)?;
            let sol = branch_solve(&g, cfg.bnb_options())?;
            let edges = g.table_len();
            Ok(BranchPoint {
                seed,
                requests,
                vehicles,
                edges,
                nodes_expanded: sol.stats.nodes_expanded,
                log10_nodes_over_growth: log10_ratio(sol.stats.nodes_expanded, edges),
                within_trivial_bound: within_trivial_bound(sol.stats.nodes_expanded, edges),
                served: sol.served,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_a_power_law() {
        let xy: Vec<(f64, f64)> = [1.0, 10.0, 100.0, 1000.0].iter().map(|&x: &f64| (x, 3.0 * x.powf(1.5))).collect();
        let (slope, intercept) = fit_loglog(&xy);
        assert!((slope - 1.5).abs() < 1e-12);
        assert!((intercept - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn tiny_bench_runs() {
        let fit = run_scaling_bench(&super::super::generate::bench_config(), &[40], &[5, 10], 1);
        assert_eq!(fit.points.len(), 2);
        let report = run_branch_report(0..3, 6, 3).unwrap();
        assert!(report.iter().all(|p| p.within_trivial_bound));
    }
}
