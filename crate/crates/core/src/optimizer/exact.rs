//! Exact depth-first branch-and-bound and the greedy incumbent.
//!
//! Commodities are branched in a fixed order (descending demand, then
//! instance order). At each depth the current commodity's delay-feasible
//! simple paths to every admissible destination are enumerated cheapest
//! first on the residual network; the gateway matching follows from the
//! satellite-to-gateway arcs chosen so far. The bound at every node is the
//! running cost plus, for each unrouted commodity, its cheapest
//! delay-feasible option on the current residual network, which also detects
//! dead ends early.

use std::collections::BTreeSet;
use std::time::Instant;

use super::routing::{Compiled, PathEnumerator, PathOption, State};
use super::{
    better, breakdown_along, Assignment, ProblemInstance, Solution, SolveLimits, LATENCY_EPS,
};
use crate::error::{ModelError, SolveError};

fn branch_order(compiled: &Compiled<'_>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..compiled.commodities.len()).collect();
    order.sort_by(|&a, &b| {
        compiled.commodities[b]
            .demand
            .total_cmp(&compiled.commodities[a].demand)
            .then(a.cmp(&b))
    });
    order
}

/// Build a [`Solution`] from one option per commodity (instance order).
fn assemble(compiled: &Compiled<'_>, chosen: &[PathOption]) -> Solution {
    let instance = compiled.instance;
    let mut matching = BTreeSet::new();
    let mut assignments = Vec::with_capacity(chosen.len());
    let mut objective = 0.0;
    for (c, opt) in instance.commodities.iter().zip(chosen) {
        let path: Vec<_> = opt.nodes.iter().map(|&v| instance.nodes[v]).collect();
        for &a in &opt.arcs {
            if let Some(g) = compiled.gateway_of[a] {
                matching.insert((instance.nodes[compiled.tail[a]], instance.nodes[g]));
            }
        }
        let latency = breakdown_along(instance, c, &path).expect("path arcs exist");
        objective += latency.total;
        assignments.push(Assignment {
            commodity: c.id.clone(),
            destination: instance.nodes[opt.dest],
            path,
            latency,
        });
    }
    Solution {
        instance_id: instance.id.clone(),
        objective,
        assignments,
        gateway_matching: matching.into_iter().collect(),
    }
}

fn greedy_options(compiled: &Compiled<'_>, work: &mut u64) -> Option<Vec<PathOption>> {
    let mut state = compiled.empty_state();
    let mut chosen: Vec<Option<PathOption>> = vec![None; compiled.commodities.len()];
    for k in branch_order(compiled) {
        let opt = compiled.best_option(k, &state, work)?;
        compiled.apply(k, &opt, &mut state);
        chosen[k] = Some(opt);
    }
    chosen.into_iter().collect()
}

/// Route commodities one at a time, largest demand first, each on its
/// cheapest delay-feasible option over the residual network. Incomplete: it
/// can report `Infeasible` for feasible instances.
pub fn greedy_heuristic(problem: &ProblemInstance) -> Result<Solution, SolveError> {
    let compiled = Compiled::new(problem)?;
    if compiled.commodities.is_empty() {
        return Ok(Solution::empty(problem));
    }
    let mut work = 0;
    greedy_options(&compiled, &mut work)
        .map(|opts| assemble(&compiled, &opts))
        .ok_or(SolveError::Infeasible)
}

/// Per commodity: whether it has any delay-feasible option when routed
/// alone on the unloaded network.
pub fn individually_feasible(problem: &ProblemInstance) -> Result<Vec<bool>, ModelError> {
    let compiled = Compiled::new(problem)?;
    let state = compiled.empty_state();
    let mut work = 0;
    Ok((0..compiled.commodities.len())
        .map(|k| compiled.best_option(k, &state, &mut work).is_some())
        .collect())
}

struct Search<'c, 'a> {
    compiled: &'c Compiled<'a>,
    order: Vec<usize>,
    state: State,
    chosen: Vec<Option<PathOption>>,
    incumbent: Option<Solution>,
    limits: &'c SolveLimits,
    work: u64,
    started: Instant,
    exhausted: bool,
}

impl Search<'_, '_> {
    fn out_of_budget(&mut self) -> bool {
        if self.exhausted {
            return true;
        }
        if self.work >= self.limits.node_budget
            || self.started.elapsed().as_secs_f64() >= self.limits.time_budget
        {
            self.exhausted = true;
        }
        self.exhausted
    }

    fn done(&self) -> bool {
        self.exhausted || (!self.limits.require_optimal && self.incumbent.is_some())
    }

    fn incumbent_value(&self) -> f64 {
        self.incumbent
            .as_ref()
            .map_or(f64::INFINITY, |s| s.objective)
    }

    fn offer(&mut self, candidate: Solution) {
        if self
            .incumbent
            .as_ref()
            .is_none_or(|inc| better(&candidate, inc))
        {
            self.incumbent = Some(candidate);
        }
    }

    /// Lower bounds for commodities at positions `from..` of the order.
    fn remaining_bounds(&mut self, from: usize) -> Option<Vec<f64>> {
        let mut out = Vec::with_capacity(self.order.len() - from);
        for &k in &self.order[from..] {
            let opt = self.compiled.best_option(k, &self.state, &mut self.work)?;
            out.push(opt.cost);
        }
        Some(out)
    }

    fn dfs(&mut self, depth: usize, acc: f64) {
        self.work += 1;
        if self.out_of_budget() || self.done() {
            return;
        }
        if depth == self.order.len() {
            let opts: Vec<PathOption> = self.chosen.iter().cloned().map(Option::unwrap).collect();
            let sol = assemble(self.compiled, &opts);
            self.offer(sol);
            return;
        }
        let Some(bounds) = self.remaining_bounds(depth) else {
            return;
        };
        let total: f64 = bounds.iter().sum();
        if acc + total > self.incumbent_value() + LATENCY_EPS {
            return;
        }
        let rest = total - bounds[0];
        let k = self.order[depth];
        let mut paths = PathEnumerator::new(self.compiled, k);
        loop {
            if self.done() {
                return;
            }
            let budget = self.incumbent_value() - acc - rest;
            let Some(opt) = paths.next(self.compiled, &self.state, budget, &mut self.work) else {
                return;
            };
            if self.out_of_budget() {
                return;
            }
            self.compiled.apply(k, &opt, &mut self.state);
            let cost = opt.cost;
            self.chosen[k] = Some(opt);
            self.dfs(depth + 1, acc + cost);
            let opt = self.chosen[k].take().expect("set above");
            self.compiled.undo(k, &opt, &mut self.state);
        }
    }
}

/// Globally optimal solution, `Infeasible`, or `BudgetExceeded` carrying the
/// best incumbent found.
pub fn solve_exact(
    problem: &ProblemInstance,
    limits: &SolveLimits,
) -> Result<Solution, SolveError> {
    let compiled = Compiled::new(problem)?;
    if compiled.commodities.is_empty() {
        return Ok(Solution::empty(problem));
    }
    let mut search = Search {
        order: branch_order(&compiled),
        state: compiled.empty_state(),
        chosen: vec![None; compiled.commodities.len()],
        incumbent: None,
        limits,
        work: 0,
        started: Instant::now(),
        exhausted: false,
        compiled: &compiled,
    };
    let Some(root) = search.remaining_bounds(0) else {
        return Err(SolveError::Infeasible);
    };
    let root_bound: f64 = root.iter().sum();
    if let Some(opts) = greedy_options(&compiled, &mut search.work) {
        let sol = assemble(&compiled, &opts);
        search.offer(sol);
    }
    search.dfs(0, 0.0);

    if search.exhausted {
        let gap = search.incumbent_value() - root_bound;
        return Err(SolveError::BudgetExceeded {
            incumbent: search.incumbent.map(Box::new),
            gap,
        });
    }
    search.incumbent.ok_or(SolveError::Infeasible)
}
