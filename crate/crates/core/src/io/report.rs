//! Run reports and their JSON form.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::model::{Assignment, RequestId, VehicleId, Violation};

/// Growth rate the branch counts are compared against.
pub const BRANCH_GROWTH: f64 = 1.2321;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub requests: usize,
    pub vehicles: usize,
    /// Stable groups with two or more members.
    pub groups: usize,
    pub super_nodes: usize,
    pub trips: Option<usize>,
    pub vehicle_trip_edges: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchSummary {
    pub vehicle: VehicleId,
    pub members: Vec<RequestId>,
}

pub fn summarize_matches(a: &Assignment) -> Vec<MatchSummary> {
    a.matches
        .iter()
        .map(|m| MatchSummary {
            vehicle: m.vehicle,
            members: m.trip.members.clone(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowReport {
    pub served: usize,
    pub weight: f64,
    pub violations: Vec<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed: Option<f64>,
    pub flow_value: u32,
    pub score: u32,
    pub augmentations: usize,
    pub reallocation_moves: usize,
    pub shrunk_blocks: usize,
    pub idle_taxis: usize,
    pub matches: Vec<MatchSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BnbReport {
    pub served: usize,
    pub weight: f64,
    pub violations: Vec<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed: Option<f64>,
    pub edges: usize,
    pub nodes_expanded: u64,
    pub max_depth: usize,
    /// `log10(nodes / 1.2321^edges)`.
    pub log10_nodes_over_growth: f64,
    pub within_trivial_bound: bool,
    pub matches: Vec<MatchSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub best_served: usize,
    pub best_weight: f64,
    pub optimal_assignments: u64,
    pub flow_gap: Option<i64>,
    pub bnb_gap: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunReport {
    pub instance: InstanceSummary,
    pub flow: Option<FlowReport>,
    pub bnb: Option<BnbReport>,
    pub oracle: Option<OracleSummary>,
}

impl RunReport {
    pub fn violation_count(&self) -> usize {
        self.flow.as_ref().map_or(0, |f| f.violations.len()) + self.bnb.as_ref().map_or(0, |b| b.violations.len())
    }

    pub fn to_json(&self) -> String {
        to_stable_json(self)
    }
}

/// `log10(nodes / growth^edges)`, finite for any edge count.
pub fn log10_ratio(nodes: u64, edges: usize) -> f64 {
    (nodes.max(1) as f64).log10() - edges as f64 * BRANCH_GROWTH.log10()
}

/// `nodes <= 2^(edges + 1)`, compared in log space past `u64` range.
pub fn within_trivial_bound(nodes: u64, edges: usize) -> bool {
    if edges < 63 {
        nodes <= 1u64 << (edges + 1)
    } else {
        true
    }
}

/// Pretty JSON with every float rounded to six decimals, so that output
/// depends only on the values, never on float noise.
pub fn to_stable_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("report types serialize");
    round_floats(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    s
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap();
            let r = (x * 1e6).round() / 1e6;
            let r = if r == 0.0 { 0.0 } else { r };
            *v = serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_are_rounded() {
        let s = to_stable_json(&vec![0.1 + 0.2, 1.0 / 3.0, -1e-9, 2.0]);
        assert_eq!(s, "[\n  0.3,\n  0.333333,\n  0.0,\n  2.0\n]\n");
    }

    #[test]
    fn trivial_bound() {
        assert!(within_trivial_bound(1, 0));
        assert!(!within_trivial_bound(3, 0));
        assert!(within_trivial_bound(8, 2));
        assert!(within_trivial_bound(u64::MAX, 100));
        assert!((log10_ratio(1, 0)).abs() < 1e-12);
    }
}
