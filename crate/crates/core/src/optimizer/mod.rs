//! Latency-minimizing MEC destination selection and routing.
//!
//! One [`ProblemInstance`] covers one snapshot and one use case. Each
//! commodity (an IFECS flow or a satellite's offloaded tasks) is assigned a
//! MEC destination and a single simple path such that
//!
//! * the per-commodity delay bound holds,
//! * the summed demand on every directed arc stays within its capacity,
//! * each gateway receives traffic from at most one satellite, and a
//!   satellite-to-gateway arc is only ever the last hop towards that gateway.
//!
//! The objective is the sum of per-arc flow latencies over all chosen arcs,
//! plus the MEC compute time for offloading.

mod exact;
mod oracle;
mod problem;
mod routing;
mod validate;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geom::SPEED_OF_LIGHT;
use crate::topology::{LinkType, NodeId};

pub use exact::{greedy_heuristic, individually_feasible, solve_exact};
pub use oracle::{solve_oracle, ORACLE_LIMIT};
pub use problem::{build_airborne_problem, build_offload_problem};
pub use validate::{validate_solution, ConstraintCheck, ValidationReport};

/// Absolute tolerance on latency comparisons, seconds.
pub const LATENCY_EPS: f64 = 1e-12;
/// Relative slack on arc capacities.
pub const CAPACITY_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UseCase {
    Airborne,
    Offload,
}

impl fmt::Display for UseCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UseCase::Airborne => "airborne",
            UseCase::Offload => "offload",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveLimits {
    /// search work units (branch nodes plus path expansions)
    pub node_budget: u64,
    /// seconds of wall time
    pub time_budget: f64,
    /// when false the first feasible leaf is accepted
    pub require_optimal: bool,
}

impl Default for SolveLimits {
    fn default() -> Self {
        Self {
            node_budget: 20_000_000,
            time_budget: 120.0,
            require_optimal: true,
        }
    }
}

/// Directed arc; every physical link contributes one arc per direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub tail: NodeId,
    pub head: NodeId,
    pub link_type: LinkType,
    /// meters
    pub distance: f64,
    /// bits/s
    pub capacity: f64,
}

impl Arc {
    pub fn is_sat_to_gateway(&self) -> bool {
        self.tail.is_satellite() && self.head.is_gateway()
    }

    /// Two-way propagation term.
    pub fn round_trip_propagation(&self) -> f64 {
        2.0 * self.distance / SPEED_OF_LIGHT
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub node: NodeId,
    /// seconds added to both objective and delay check when chosen
    pub compute_latency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Commodity {
    pub id: String,
    /// service name, or "offload"
    pub class: String,
    pub source: NodeId,
    /// bits/s consumed on every traversed arc; also the transmission numerator
    pub demand: f64,
    /// transmission numerator of the delay check (packet size for flows)
    pub delay_bits: f64,
    /// seconds
    pub delay_bound: f64,
    /// sorted by node
    pub candidates: Vec<Candidate>,
}

impl Commodity {
    pub fn candidate(&self, node: NodeId) -> Option<&Candidate> {
        self.candidates.iter().find(|c| c.node == node)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub id: String,
    pub use_case: UseCase,
    pub snapshot: usize,
    /// seconds
    pub time: f64,
    /// sorted
    pub nodes: Vec<NodeId>,
    /// sorted by (tail, head)
    pub arcs: Vec<Arc>,
    pub commodities: Vec<Commodity>,
}

impl ProblemInstance {
    pub fn arc_between(&self, tail: NodeId, head: NodeId) -> Option<&Arc> {
        self.arcs
            .binary_search_by(|a| (a.tail, a.head).cmp(&(tail, head)))
            .ok()
            .map(|i| &self.arcs[i])
    }

    /// Pin a commodity's destination, dropping every other candidate.
    /// Returns false if `node` was not a candidate.
    pub fn restrict_destination(&mut self, commodity: usize, node: NodeId) -> bool {
        let c = &mut self.commodities[commodity];
        let keep: Vec<_> = c
            .candidates
            .iter()
            .filter(|x| x.node == node)
            .cloned()
            .collect();
        let found = !keep.is_empty();
        c.candidates = keep;
        found
    }

    /// Keep only the commodities whose index passes `keep`.
    pub fn retain_commodities(&mut self, mut keep: impl FnMut(usize, &Commodity) -> bool) {
        let mut i = 0;
        self.commodities.retain(|c| {
            let k = keep(i, c);
            i += 1;
            k
        });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LatencyBreakdown {
    pub propagation: f64,
    pub transmission: f64,
    pub compute: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub commodity: String,
    pub destination: NodeId,
    /// node sequence from source to destination
    pub path: Vec<NodeId>,
    pub latency: LatencyBreakdown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub instance_id: String,
    /// seconds
    pub objective: f64,
    /// one per commodity, in instance order
    pub assignments: Vec<Assignment>,
    /// (satellite, gateway) pairs allowed to carry traffic
    pub gateway_matching: Vec<(NodeId, NodeId)>,
}

impl Solution {
    pub fn empty(instance: &ProblemInstance) -> Self {
        Self {
            instance_id: instance.id.clone(),
            objective: 0.0,
            assignments: Vec::new(),
            gateway_matching: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Summed demand over every traversed arc, bits/s.
    pub fn consumed_bandwidth(&self, instance: &ProblemInstance) -> f64 {
        self.assignments
            .iter()
            .zip(&instance.commodities)
            .map(|(a, c)| c.demand * a.path.len().saturating_sub(1) as f64)
            .sum()
    }
}

/// Per-commodity latency along `path` towards `dest`, from raw arc data.
pub(crate) fn breakdown_along(
    instance: &ProblemInstance,
    commodity: &Commodity,
    path: &[NodeId],
) -> Option<LatencyBreakdown> {
    let mut out = LatencyBreakdown::default();
    for w in path.windows(2) {
        let arc = instance.arc_between(w[0], w[1])?;
        out.propagation += arc.round_trip_propagation();
        out.transmission += commodity.demand / arc.capacity;
    }
    out.compute = commodity
        .candidate(*path.last()?)
        .map_or(0.0, |c| c.compute_latency);
    out.total = out.propagation + out.transmission + out.compute;
    Some(out)
}

/// Canonical (objective, tie key) ordering shared by every solver: lower
/// objective wins; within [`LATENCY_EPS`] the lexicographically smaller
/// (destination, path) sequence wins.
pub(crate) fn better(a: &Solution, b: &Solution) -> bool {
    if a.objective < b.objective - LATENCY_EPS {
        return true;
    }
    if a.objective > b.objective + LATENCY_EPS {
        return false;
    }
    let key = |s: &Solution| {
        s.assignments
            .iter()
            .map(|x| (x.destination, x.path.clone()))
            .collect::<Vec<_>>()
    };
    key(a) < key(b)
}
