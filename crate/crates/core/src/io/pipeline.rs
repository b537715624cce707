//! Grouping, both solvers, validation and the oracle in one run.

use std::time::Instant;

use thiserror::Error;

use super::config::InstanceConfig;
use super::report::{
    log10_ratio, summarize_matches, within_trivial_bound, BnbReport, FlowReport, InstanceSummary, OracleSummary,
    RunReport,
};
use crate::bnb::{solve_bnb, BnbError};
use crate::flownet::{assign_passengers_to_taxis, build_flow_network, solve_modified_ff, FlowError};
use crate::grouping::{partition_stable_groups, GroupingError, StableGroups};
use crate::model::{validate_assignment, Assignment, Instance};
use crate::oracle::{brute_force_optimal, within_guard};
use crate::vtg::{build_vtg, VtGraph};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Grouping(#[from] GroupingError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Bnb(#[from] BnbError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineOptions {
    /// Record wall-clock times in the report. Off keeps reports byte-stable.
    pub timings: bool,
    /// Compare against exhaustive enumeration when the instance is small.
    pub oracle: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            timings: false,
            oracle: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub report: RunReport,
    pub groups: StableGroups,
    pub vtg: Option<VtGraph>,
    pub flow: Option<Assignment>,
    pub bnb: Option<Assignment>,
}

pub fn run_pipeline(
    instance: &Instance,
    cfg: &InstanceConfig,
    opts: PipelineOptions,
) -> Result<PipelineOutput, PipelineError> {
    let p = &cfg.params;
    let vopts = cfg.validation_options();
    let groups = partition_stable_groups(&instance.requests, p, cfg.mode)?;
    let mut report = RunReport {
        instance: InstanceSummary {
            requests: instance.requests.len(),
            vehicles: instance.vehicles.len(),
            groups: groups.groups.len(),
            super_nodes: groups.super_nodes().len(),
            ..Default::default()
        },
        ..Default::default()
    };
    let timed = |start: Instant| opts.timings.then(|| start.elapsed().as_secs_f64());

    let mut flow_assignment = None;
    if cfg.solver.flow() {
        let start = Instant::now();
        let mut net = build_flow_network(&groups, instance, p)?;
        let sol = solve_modified_ff(&mut net);
        let (assignment, astats) = assign_passengers_to_taxis(&net, &sol.scores, instance, p)?;
        let elapsed = timed(start);
        report.flow = Some(FlowReport {
            served: assignment.served,
            weight: assignment.weight,
            violations: validate_assignment(&assignment, instance, p, vopts),
            elapsed,
            flow_value: sol.flow_value,
            score: sol.scores.total(),
            augmentations: sol.stats.augmentations,
            reallocation_moves: sol.stats.reallocation_moves,
            shrunk_blocks: astats.shrunk_blocks,
            idle_taxis: astats.idle_taxis,
            matches: summarize_matches(&assignment),
        });
        flow_assignment = Some(assignment);
    }

    let want_oracle = opts.oracle && within_guard(instance);
    let mut vtg = None;
    let mut bnb_assignment = None;
    if cfg.solver.bnb() || want_oracle {
        let start = Instant::now();
        let graph = build_vtg(instance, p);
        report.instance.trips = Some(graph.len());
        report.instance.vehicle_trip_edges = Some(graph.edge_count());
        if cfg.solver.bnb() {
            let (assignment, sol, g) = solve_bnb(&graph, instance, p, cfg.bnb_options())?;
            let edges = g.table_len();
            report.bnb = Some(BnbReport {
                served: assignment.served,
                weight: assignment.weight,
                violations: validate_assignment(&assignment, instance, p, vopts),
                elapsed: timed(start),
                edges,
                nodes_expanded: sol.stats.nodes_expanded,
                max_depth: sol.stats.max_depth,
                log10_nodes_over_growth: log10_ratio(sol.stats.nodes_expanded, edges),
                within_trivial_bound: within_trivial_bound(sol.stats.nodes_expanded, edges),
                matches: summarize_matches(&assignment),
            });
            bnb_assignment = Some(assignment);
        }
        vtg = Some(graph);
    }

    if want_oracle {
        let graph = vtg.as_ref().expect("built above");
        let o = brute_force_optimal(graph, instance, p).expect("guard checked");
        let gap = |served: usize| o.best_served as i64 - served as i64;
        report.oracle = Some(OracleSummary {
            best_served: o.best_served,
            best_weight: o.best_weight,
            optimal_assignments: o.optimal_assignments,
            flow_gap: report.flow.as_ref().map(|f| gap(f.served)),
            bnb_gap: report.bnb.as_ref().map(|b| gap(b.served)),
        });
    }

    Ok(PipelineOutput {
        report,
        groups,
        vtg,
        flow: flow_assignment,
        bnb: bnb_assignment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::generate::{desk_config, generate_random_instance};
    use crate::model::test_util::{req, veh};

    #[test]
    fn empty_instance() {
        let out = run_pipeline(&Instance::default(), &InstanceConfig::default(), PipelineOptions::default()).unwrap();
        assert_eq!(out.report.flow.as_ref().unwrap().served, 0);
        assert_eq!(out.report.bnb.as_ref().unwrap().served, 0);
        assert_eq!(out.report.oracle.as_ref().unwrap().best_served, 0);
    }

    #[test]
    fn guarded_random_instance_matches_oracle() {
        let cfg = desk_config();
        let inst = generate_random_instance(3, 8, 3, &cfg);
        let out = run_pipeline(&inst, &cfg, PipelineOptions::default()).unwrap();
        assert_eq!(out.report.oracle.as_ref().unwrap().bnb_gap, Some(0));
        assert!(out.report.oracle.as_ref().unwrap().flow_gap.unwrap() >= 0);
        assert_eq!(out.report.violation_count(), 0);
    }

    #[test]
    fn five_clique_two_vehicles_all_agree() {
        let reqs = (0..5)
            .map(|k| req(k, (10.0 * k as f64, 0.0), (3000.0 + 10.0 * k as f64, 0.0), 5.0 * k as f64))
            .collect();
        let inst = Instance::new(reqs, vec![veh(0, (0.0, 100.0)), veh(1, (100.0, 0.0))]).unwrap();
        let out = run_pipeline(&inst, &InstanceConfig::default(), PipelineOptions::default()).unwrap();
        let r = &out.report;
        assert_eq!(r.instance.groups, 1);
        assert_eq!(r.flow.as_ref().unwrap().served, 5);
        assert_eq!(r.bnb.as_ref().unwrap().served, 5);
        assert_eq!(r.oracle.as_ref().unwrap().best_served, 5);
    }

    #[test]
    fn reports_are_byte_stable() {
        let cfg = desk_config();
        let inst = generate_random_instance(9, 8, 4, &cfg);
        let a = run_pipeline(&inst, &cfg, PipelineOptions::default()).unwrap().report.to_json();
        let b = run_pipeline(&inst, &cfg, PipelineOptions::default()).unwrap().report.to_json();
        assert_eq!(a, b);
        assert!(!a.contains("elapsed"));
    }
}
