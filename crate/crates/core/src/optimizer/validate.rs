//! Independent feasibility checker. Every quantity is recomputed from the
//! instance's raw arc and commodity data.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ProblemInstance, Solution, CAPACITY_SLACK, LATENCY_EPS};
use crate::geom::SPEED_OF_LIGHT;
use crate::topology::NodeId;

/// Objective agreement tolerance, seconds.
const OBJECTIVE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub name: String,
    pub passed: bool,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub instance_id: String,
    pub checks: Vec<ConstraintCheck>,
    pub feasible: bool,
}

impl ValidationReport {
    pub fn check(&self, name: &str) -> Option<&ConstraintCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed(&self) -> impl Iterator<Item = &ConstraintCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "instance {}", self.instance_id)?;
        for c in &self.checks {
            writeln!(
                f,
                "  {:<20} {}",
                c.name,
                if c.passed { "ok" } else { "VIOLATED" }
            )?;
            for v in &c.violations {
                writeln!(f, "    - {v}")?;
            }
        }
        write!(f, "feasible: {}", self.feasible)
    }
}

struct Checks(Vec<ConstraintCheck>);

impl Checks {
    fn record(&mut self, name: &str, violations: Vec<String>) {
        self.0.push(ConstraintCheck {
            name: name.into(),
            passed: violations.is_empty(),
            violations,
        });
    }
}

pub fn validate_solution(problem: &ProblemInstance, solution: &Solution) -> ValidationReport {
    let mut checks = Checks(Vec::new());
    let arcs: BTreeMap<(NodeId, NodeId), (f64, f64)> = problem
        .arcs
        .iter()
        .map(|a| ((a.tail, a.head), (a.distance, a.capacity)))
        .collect();

    // one destination per commodity, drawn from its candidates
    let mut v = Vec::new();
    if solution.instance_id != problem.id {
        v.push(format!(
            "solution is for `{}`, instance is `{}`",
            solution.instance_id, problem.id
        ));
    }
    let mut by_id: BTreeMap<&str, usize> = BTreeMap::new();
    for a in &solution.assignments {
        *by_id.entry(a.commodity.as_str()).or_default() += 1;
    }
    for c in &problem.commodities {
        match by_id.get(c.id.as_str()) {
            None => v.push(format!("{}: no destination", c.id)),
            Some(&n) if n > 1 => v.push(format!("{}: {n} destinations", c.id)),
            _ => {}
        }
    }
    let known: BTreeSet<&str> = problem.commodities.iter().map(|c| c.id.as_str()).collect();
    for a in &solution.assignments {
        if !known.contains(a.commodity.as_str()) {
            v.push(format!("{}: unknown commodity", a.commodity));
        }
    }
    let pairs: Vec<_> = problem
        .commodities
        .iter()
        .filter_map(|c| {
            solution
                .assignments
                .iter()
                .find(|a| a.commodity == c.id)
                .map(|a| (c, a))
        })
        .collect();
    for (c, a) in &pairs {
        if c.candidate(a.destination).is_none() {
            v.push(format!(
                "{}: {} is not an admissible destination",
                c.id, a.destination
            ));
        }
    }
    checks.record("single_destination", v);

    // path continuity from source to destination over existing arcs
    let mut v = Vec::new();
    for (c, a) in &pairs {
        if a.path.first() != Some(&c.source) {
            v.push(format!(
                "{}: path does not start at source {}",
                c.id, c.source
            ));
        }
        if a.path.last() != Some(&a.destination) {
            v.push(format!("{}: path does not end at {}", c.id, a.destination));
        }
        if a.path.len() < 2 {
            v.push(format!("{}: empty path", c.id));
        }
        let distinct: BTreeSet<_> = a.path.iter().collect();
        if distinct.len() != a.path.len() {
            v.push(format!("{}: path revisits a node", c.id));
        }
        for w in a.path.windows(2) {
            if !arcs.contains_key(&(w[0], w[1])) {
                v.push(format!("{}: edge {}->{} not in snapshot", c.id, w[0], w[1]));
            }
        }
    }
    checks.record("flow_conservation", v);

    // delay bound
    let mut v = Vec::new();
    for (c, a) in &pairs {
        let mut delay: f64 = a
            .path
            .windows(2)
            .filter_map(|w| arcs.get(&(w[0], w[1])))
            .map(|&(d, cap)| c.delay_bits / cap + 2.0 * d / SPEED_OF_LIGHT)
            .sum();
        delay += c
            .candidate(a.destination)
            .map_or(0.0, |x| x.compute_latency);
        if delay > c.delay_bound + LATENCY_EPS {
            v.push(format!(
                "{}: delay {:.6e} s exceeds bound {:.6e} s",
                c.id, delay, c.delay_bound
            ));
        }
    }
    checks.record("delay_bound", v);

    // bandwidth per directed arc
    let mut load: BTreeMap<(NodeId, NodeId), f64> = BTreeMap::new();
    for (c, a) in &pairs {
        for w in a.path.windows(2) {
            *load.entry((w[0], w[1])).or_default() += c.demand;
        }
    }
    let mut v = Vec::new();
    for (edge, used) in &load {
        if let Some(&(_, cap)) = arcs.get(edge) {
            if *used > cap * (1.0 + CAPACITY_SLACK) {
                v.push(format!(
                    "arc {}->{}: load {:.6e} bit/s exceeds capacity {:.6e}",
                    edge.0, edge.1, used, cap
                ));
            }
        }
    }
    checks.record("bandwidth", v);

    // at most one satellite per gateway
    let mut v = Vec::new();
    let mut per_gw: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
    for &(s, g) in &solution.gateway_matching {
        if !s.is_satellite() || !g.is_gateway() {
            v.push(format!("matching pair ({s}, {g}) is not satellite-gateway"));
        }
        per_gw.entry(g).or_default().insert(s);
    }
    for (g, sats) in &per_gw {
        if sats.len() > 1 {
            let list: Vec<_> = sats.iter().map(ToString::to_string).collect();
            v.push(format!("gateway {g} matched to {}", list.join(", ")));
        }
    }
    checks.record("gateway_matching", v);

    // satellite-to-gateway hops follow the matching and end the path there
    let matched: BTreeSet<(NodeId, NodeId)> = solution.gateway_matching.iter().copied().collect();
    let mut v = Vec::new();
    for (c, a) in &pairs {
        let n = a.path.len();
        for (i, w) in a.path.windows(2).enumerate() {
            if w[0].is_satellite() && w[1].is_gateway() {
                if !matched.contains(&(w[0], w[1])) {
                    v.push(format!(
                        "{}: uses {}->{} without matching",
                        c.id, w[0], w[1]
                    ));
                }
                if i + 2 != n || a.destination != w[1] {
                    v.push(format!(
                        "{}: traverses {}->{} but is destined to {}",
                        c.id, w[0], w[1], a.destination
                    ));
                }
            }
        }
    }
    checks.record("gateway_gating", v);

    // objective and per-commodity latency recomputation
    let mut v = Vec::new();
    let mut objective = 0.0;
    for (c, a) in &pairs {
        let mut prop = 0.0;
        let mut trans = 0.0;
        for w in a.path.windows(2) {
            if let Some(&(d, cap)) = arcs.get(&(w[0], w[1])) {
                prop += 2.0 * d / SPEED_OF_LIGHT;
                trans += c.demand / cap;
            }
        }
        let compute = c
            .candidate(a.destination)
            .map_or(0.0, |x| x.compute_latency);
        let total = prop + trans + compute;
        objective += total;
        if (total - a.latency.total).abs() > OBJECTIVE_TOL {
            v.push(format!(
                "{}: reported latency {:.9e} s, recomputed {:.9e} s",
                c.id, a.latency.total, total
            ));
        }
    }
    if (objective - solution.objective).abs() > OBJECTIVE_TOL {
        v.push(format!(
            "reported objective {:.9e} s, recomputed {:.9e} s",
            solution.objective, objective
        ));
    }
    checks.record("objective", v);

    let feasible = checks.0.iter().all(|c| c.passed);
    ValidationReport {
        instance_id: problem.id.clone(),
        checks: checks.0,
        feasible,
    }
}
