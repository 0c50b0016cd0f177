//! Exhaustive reference solver for small instances.
//!
//! Shares nothing with the branch-and-bound beyond the instance and solution
//! types: it walks every simple path to every candidate, keeps the
//! delay-feasible ones, and tries every combination.

use std::collections::{BTreeMap, HashMap};

use super::{
    better, Arc, Assignment, Commodity, LatencyBreakdown, ProblemInstance, Solution,
    CAPACITY_SLACK, LATENCY_EPS,
};
use crate::error::SolveError;
use crate::topology::NodeId;

/// Largest number of combinations the oracle will enumerate.
pub const ORACLE_LIMIT: f64 = 1e6;

struct Route<'a> {
    dest: NodeId,
    arcs: Vec<&'a Arc>,
    cost: f64,
    latency: LatencyBreakdown,
}

fn routes_for<'a>(
    commodity: &Commodity,
    adjacency: &HashMap<NodeId, Vec<&'a Arc>>,
) -> Vec<Route<'a>> {
    fn walk<'a>(
        at: NodeId,
        commodity: &Commodity,
        adjacency: &HashMap<NodeId, Vec<&'a Arc>>,
        stack: &mut Vec<&'a Arc>,
        out: &mut Vec<Route<'a>>,
    ) {
        for &arc in adjacency.get(&at).map(Vec::as_slice).unwrap_or(&[]) {
            let next = arc.head;
            if next == commodity.source || stack.iter().any(|a| a.head == next) {
                continue;
            }
            stack.push(arc);
            if let Some(cand) = commodity.candidate(next) {
                let mut lat = LatencyBreakdown::default();
                let mut delay = 0.0;
                for a in stack.iter() {
                    let prop = 2.0 * a.distance / crate::geom::SPEED_OF_LIGHT;
                    lat.propagation += prop;
                    lat.transmission += commodity.demand / a.capacity;
                    delay += commodity.delay_bits / a.capacity + prop;
                }
                lat.compute = cand.compute_latency;
                lat.total = lat.propagation + lat.transmission + lat.compute;
                if delay + cand.compute_latency <= commodity.delay_bound + LATENCY_EPS {
                    out.push(Route {
                        dest: next,
                        arcs: stack.clone(),
                        cost: lat.total,
                        latency: lat,
                    });
                }
            }
            // a satellite-to-gateway hop always terminates the path
            if !(arc.tail.is_satellite() && arc.head.is_gateway()) {
                walk(next, commodity, adjacency, stack, out);
            }
            stack.pop();
        }
    }
    let mut out = Vec::new();
    walk(
        commodity.source,
        commodity,
        adjacency,
        &mut Vec::new(),
        &mut out,
    );
    out
}

struct Enumeration<'a> {
    instance: &'a ProblemInstance,
    routes: Vec<Vec<Route<'a>>>,
    load: BTreeMap<(NodeId, NodeId), f64>,
    feeders: BTreeMap<NodeId, BTreeMap<NodeId, u32>>,
    picked: Vec<usize>,
    best: Option<Solution>,
}

impl Enumeration<'_> {
    fn fits(&self, k: usize, r: &Route<'_>) -> bool {
        let demand = self.instance.commodities[k].demand;
        for a in &r.arcs {
            let used = self.load.get(&(a.tail, a.head)).copied().unwrap_or(0.0);
            if used + demand > a.capacity * (1.0 + CAPACITY_SLACK) {
                return false;
            }
            if a.tail.is_satellite() && a.head.is_gateway() {
                if let Some(f) = self.feeders.get(&a.head) {
                    if f.keys().any(|s| *s != a.tail) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn place(&mut self, k: usize, i: usize, sign: f64) {
        let demand = self.instance.commodities[k].demand;
        for a in &self.routes[k][i].arcs {
            *self.load.entry((a.tail, a.head)).or_default() += sign * demand;
            if a.tail.is_satellite() && a.head.is_gateway() {
                let f = self.feeders.entry(a.head).or_default();
                if sign > 0.0 {
                    *f.entry(a.tail).or_default() += 1;
                } else {
                    let c = f.get_mut(&a.tail).expect("placed before");
                    *c -= 1;
                    if *c == 0 {
                        f.remove(&a.tail);
                    }
                }
            }
        }
    }

    fn leaf(&mut self) {
        let mut objective = 0.0;
        let mut assignments = Vec::new();
        let mut matching = Vec::new();
        for (k, &i) in self.picked.iter().enumerate() {
            let r = &self.routes[k][i];
            objective += r.cost;
            let mut path = vec![self.instance.commodities[k].source];
            path.extend(r.arcs.iter().map(|a| a.head));
            for a in &r.arcs {
                if a.tail.is_satellite() && a.head.is_gateway() {
                    matching.push((a.tail, a.head));
                }
            }
            assignments.push(Assignment {
                commodity: self.instance.commodities[k].id.clone(),
                destination: r.dest,
                path,
                latency: r.latency,
            });
        }
        matching.sort();
        matching.dedup();
        let sol = Solution {
            instance_id: self.instance.id.clone(),
            objective,
            assignments,
            gateway_matching: matching,
        };
        if self.best.as_ref().is_none_or(|b| better(&sol, b)) {
            self.best = Some(sol);
        }
    }

    fn recurse(&mut self, k: usize) {
        if k == self.routes.len() {
            self.leaf();
            return;
        }
        for i in 0..self.routes[k].len() {
            if !self.fits(k, &self.routes[k][i]) {
                continue;
            }
            self.place(k, i, 1.0);
            self.picked.push(i);
            self.recurse(k + 1);
            self.picked.pop();
            self.place(k, i, -1.0);
        }
    }
}

/// Brute-force optimum with the same tie-breaking as the exact solver.
pub fn solve_oracle(problem: &ProblemInstance) -> Result<Solution, SolveError> {
    let mut adjacency: HashMap<NodeId, Vec<&Arc>> = HashMap::new();
    for a in &problem.arcs {
        adjacency.entry(a.tail).or_default().push(a);
    }
    let routes: Vec<Vec<Route<'_>>> = problem
        .commodities
        .iter()
        .map(|c| routes_for(c, &adjacency))
        .collect();
    let combinations: f64 = routes.iter().map(|r| r.len() as f64).product();
    if combinations > ORACLE_LIMIT {
        return Err(SolveError::TooLarge { combinations });
    }
    let mut e = Enumeration {
        instance: problem,
        routes,
        load: BTreeMap::new(),
        feeders: BTreeMap::new(),
        picked: Vec::new(),
        best: None,
    };
    e.recurse(0);
    e.best.ok_or(SolveError::Infeasible)
}
