//! Index-based view of a [`ProblemInstance`] plus the two path searches the
//! branch-and-bound relies on: a label-setting delay-constrained shortest
//! path, and a lazy best-first enumeration of delay-feasible simple paths in
//! nondecreasing cost order.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap};

use super::{ProblemInstance, CAPACITY_SLACK, LATENCY_EPS};
use crate::error::ModelError;

pub(crate) struct CompiledCommodity {
    pub source: usize,
    pub demand: f64,
    pub cost: Vec<f64>,
    pub delay: Vec<f64>,
    /// compute latency per node index when the node is a candidate
    pub extra: Vec<Option<f64>>,
    pub bound: f64,
    /// lower bound on remaining cost (including compute) to any candidate
    pub h_cost: Vec<f64>,
    /// lower bound on remaining delay (including compute) to any candidate
    pub h_delay: Vec<f64>,
}

pub(crate) struct Compiled<'a> {
    pub instance: &'a ProblemInstance,
    pub n: usize,
    pub tail: Vec<usize>,
    pub head: Vec<usize>,
    pub capacity: Vec<f64>,
    /// outgoing arcs per node, ordered by head
    pub out: Vec<Vec<usize>>,
    pub incoming: Vec<Vec<usize>>,
    /// head gateway of satellite-to-gateway arcs
    pub gateway_of: Vec<Option<usize>>,
    pub commodities: Vec<CompiledCommodity>,
}

/// Residual capacities and the gateway matching built up so far.
#[derive(Clone)]
pub(crate) struct State {
    pub load: Vec<f64>,
    /// per node index: satellite currently matched to this gateway
    pub matched: Vec<Option<usize>>,
    pub match_uses: Vec<u32>,
}

#[derive(Debug, Clone)]
pub(crate) struct PathOption {
    pub dest: usize,
    pub nodes: Vec<usize>,
    pub arcs: Vec<usize>,
    /// path cost plus compute latency
    pub cost: f64,
}

impl<'a> Compiled<'a> {
    pub fn new(instance: &'a ProblemInstance) -> Result<Self, ModelError> {
        let n = instance.nodes.len();
        let index = |id| {
            instance
                .nodes
                .binary_search(&id)
                .map_err(|_| ModelError::MissingSource {
                    commodity: String::new(),
                    node: id.to_string(),
                })
        };
        let mut tail = Vec::with_capacity(instance.arcs.len());
        let mut head = Vec::with_capacity(instance.arcs.len());
        let mut out = vec![Vec::new(); n];
        let mut incoming = vec![Vec::new(); n];
        let mut gateway_of = Vec::with_capacity(instance.arcs.len());
        for (i, a) in instance.arcs.iter().enumerate() {
            if !(a.capacity > 0.0) {
                return Err(ModelError::ZeroCapacity(format!("{}->{}", a.tail, a.head)));
            }
            let (t, h) = (index(a.tail)?, index(a.head)?);
            tail.push(t);
            head.push(h);
            out[t].push(i);
            incoming[h].push(i);
            gateway_of.push(a.is_sat_to_gateway().then_some(h));
        }
        for list in &mut out {
            list.sort_by_key(|&a| head[a]);
        }
        let capacity = instance.arcs.iter().map(|a| a.capacity).collect();

        let mut compiled = Compiled {
            instance,
            n,
            tail,
            head,
            capacity,
            out,
            incoming,
            gateway_of,
            commodities: Vec::new(),
        };
        for c in &instance.commodities {
            let source = index(c.source).map_err(|_| ModelError::MissingSource {
                commodity: c.id.clone(),
                node: c.source.to_string(),
            })?;
            let mut extra = vec![None; n];
            for cand in &c.candidates {
                extra[index(cand.node)?] = Some(cand.compute_latency);
            }
            let cost: Vec<f64> = instance
                .arcs
                .iter()
                .map(|a| c.demand / a.capacity + a.round_trip_propagation())
                .collect();
            let delay: Vec<f64> = instance
                .arcs
                .iter()
                .map(|a| c.delay_bits / a.capacity + a.round_trip_propagation())
                .collect();
            let h_cost = compiled.reverse_distances(&cost, &extra);
            let h_delay = compiled.reverse_distances(&delay, &extra);
            compiled.commodities.push(CompiledCommodity {
                source,
                demand: c.demand,
                cost,
                delay,
                extra,
                bound: c.delay_bound,
                h_cost,
                h_delay,
            });
        }
        Ok(compiled)
    }

    /// Multi-source reverse Dijkstra from every candidate, seeded with its
    /// compute latency. Ignores capacity and matching, so it underestimates.
    fn reverse_distances(&self, weight: &[f64], extra: &[Option<f64>]) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.n];
        let mut heap = BinaryHeap::new();
        for (v, e) in extra.iter().enumerate() {
            if let Some(e) = e {
                dist[v] = *e;
                heap.push(Reverse((Key(*e), v)));
            }
        }
        while let Some(Reverse((Key(d), v))) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &a in &self.incoming[v] {
                let u = self.tail[a];
                let nd = d + weight[a];
                if nd < dist[u] {
                    dist[u] = nd;
                    heap.push(Reverse((Key(nd), u)));
                }
            }
        }
        dist
    }

    pub fn empty_state(&self) -> State {
        State {
            load: vec![0.0; self.tail.len()],
            matched: vec![None; self.n],
            match_uses: vec![0; self.n],
        }
    }

    fn arc_usable(&self, k: usize, a: usize, state: &State) -> bool {
        let demand = self.commodities[k].demand;
        if state.load[a] + demand > self.capacity[a] * (1.0 + CAPACITY_SLACK) {
            return false;
        }
        match self.gateway_of[a] {
            Some(g) => state.matched[g].is_none_or(|s| s == self.tail[a]),
            None => true,
        }
    }

    pub fn apply(&self, k: usize, option: &PathOption, state: &mut State) {
        let demand = self.commodities[k].demand;
        for &a in &option.arcs {
            state.load[a] += demand;
            if let Some(g) = self.gateway_of[a] {
                state.matched[g] = Some(self.tail[a]);
                state.match_uses[g] += 1;
            }
        }
    }

    pub fn undo(&self, k: usize, option: &PathOption, state: &mut State) {
        let demand = self.commodities[k].demand;
        for &a in &option.arcs {
            state.load[a] -= demand;
            if let Some(g) = self.gateway_of[a] {
                state.match_uses[g] -= 1;
                if state.match_uses[g] == 0 {
                    state.matched[g] = None;
                }
            }
        }
    }

    /// Cheapest delay-feasible option for commodity `k` on the residual
    /// network, by Pareto label setting over (cost, delay).
    pub fn best_option(&self, k: usize, state: &State, work: &mut u64) -> Option<PathOption> {
        let c = &self.commodities[k];
        struct Label {
            node: usize,
            cost: f64,
            delay: f64,
            pred: Option<(usize, usize)>,
            alive: bool,
        }
        let mut labels = vec![Label {
            node: c.source,
            cost: 0.0,
            delay: 0.0,
            pred: None,
            alive: true,
        }];
        let mut at: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        at[c.source].push(0);
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((Key(0.0), 0usize)));
        // (total cost, dest, label, final arc)
        let mut best: Option<(f64, usize, usize, usize)> = None;

        while let Some(Reverse((_, li))) = heap.pop() {
            *work += 1;
            if !labels[li].alive {
                continue;
            }
            let (v, cost, delay) = (labels[li].node, labels[li].cost, labels[li].delay);
            if let Some((b, ..)) = best {
                if cost + c.h_cost[v] > b + LATENCY_EPS {
                    break;
                }
            }
            for &a in &self.out[v] {
                if !self.arc_usable(k, a, state) {
                    continue;
                }
                let w = self.head[a];
                if w == c.source {
                    continue;
                }
                let nc = cost + c.cost[a];
                let nd = delay + c.delay[a];
                if nd + c.h_delay[w] > c.bound + LATENCY_EPS {
                    continue;
                }
                if let Some(e) = c.extra[w] {
                    let total = nc + e;
                    if nd + e <= c.bound + LATENCY_EPS {
                        let improves = match best {
                            None => true,
                            Some((b, d, ..)) => {
                                total < b - LATENCY_EPS || (total <= b + LATENCY_EPS && w < d)
                            }
                        };
                        if improves {
                            best = Some((total, w, li, a));
                        }
                    }
                }
                if self.gateway_of[a].is_some() {
                    continue;
                }
                if at[w]
                    .iter()
                    .any(|&o| labels[o].alive && labels[o].cost <= nc && labels[o].delay <= nd)
                {
                    continue;
                }
                for &o in &at[w] {
                    if labels[o].cost >= nc && labels[o].delay >= nd {
                        labels[o].alive = false;
                    }
                }
                at[w].retain(|&o| labels[o].alive);
                let id = labels.len();
                labels.push(Label {
                    node: w,
                    cost: nc,
                    delay: nd,
                    pred: Some((li, a)),
                    alive: true,
                });
                at[w].push(id);
                heap.push(Reverse((Key(nc + c.h_cost[w]), id)));
            }
        }

        let (cost, dest, li, last) = best?;
        let mut arcs = vec![last];
        let mut cur = li;
        while let Some((p, a)) = labels[cur].pred {
            arcs.push(a);
            cur = p;
        }
        arcs.reverse();
        let mut nodes = vec![c.source];
        nodes.extend(arcs.iter().map(|&a| self.head[a]));
        Some(PathOption {
            dest,
            nodes,
            arcs,
            cost,
        })
    }
}

/// Total order on finite floats for heap keys.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Key(pub f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

struct Partial {
    nodes: Vec<usize>,
    arcs: Vec<usize>,
    cost: f64,
    delay: f64,
}

/// Lazily yields every delay-feasible simple path option of one commodity in
/// nondecreasing total cost, restricted to options within a caller-supplied
/// budget. The residual state must be identical at every call.
pub(crate) struct PathEnumerator {
    k: usize,
    /// (f, is_partial, seq) -> entry id
    heap: BinaryHeap<Reverse<(Key, bool, u64)>>,
    entries: BTreeMap<u64, (Partial, Option<usize>)>,
    seq: u64,
}

impl PathEnumerator {
    pub fn new(compiled: &Compiled<'_>, k: usize) -> Self {
        let c = &compiled.commodities[k];
        let mut e = PathEnumerator {
            k,
            heap: BinaryHeap::new(),
            entries: BTreeMap::new(),
            seq: 0,
        };
        if c.h_cost[c.source].is_finite() {
            e.push(
                c.h_cost[c.source],
                Partial {
                    nodes: vec![c.source],
                    arcs: Vec::new(),
                    cost: 0.0,
                    delay: 0.0,
                },
                None,
            );
        }
        e
    }

    fn push(&mut self, f: f64, p: Partial, end: Option<usize>) {
        self.seq += 1;
        self.heap.push(Reverse((Key(f), end.is_none(), self.seq)));
        self.entries.insert(self.seq, (p, end));
    }

    pub fn next(
        &mut self,
        compiled: &Compiled<'_>,
        state: &State,
        budget: f64,
        work: &mut u64,
    ) -> Option<PathOption> {
        let c = &compiled.commodities[self.k];
        while let Some(Reverse((Key(f), _, id))) = self.heap.pop() {
            *work += 1;
            let (p, end) = self.entries.remove(&id).expect("entry present");
            if f > budget + LATENCY_EPS {
                self.heap.clear();
                self.entries.clear();
                return None;
            }
            if let Some(dest) = end {
                return Some(PathOption {
                    dest,
                    nodes: p.nodes,
                    arcs: p.arcs,
                    cost: f,
                });
            }
            let v = *p.nodes.last().expect("non-empty");
            for &a in &compiled.out[v] {
                if !compiled.arc_usable(self.k, a, state) {
                    continue;
                }
                let w = compiled.head[a];
                if p.nodes.contains(&w) {
                    continue;
                }
                let nc = p.cost + c.cost[a];
                let nd = p.delay + c.delay[a];
                if nd + c.h_delay[w] > c.bound + LATENCY_EPS {
                    continue;
                }
                let extend = |p: &Partial| {
                    let mut nodes = p.nodes.clone();
                    nodes.push(w);
                    let mut arcs = p.arcs.clone();
                    arcs.push(a);
                    Partial {
                        nodes,
                        arcs,
                        cost: nc,
                        delay: nd,
                    }
                };
                if let Some(e) = c.extra[w] {
                    if nd + e <= c.bound + LATENCY_EPS && nc + e <= budget + LATENCY_EPS {
                        self.push(nc + e, extend(&p), Some(w));
                    }
                }
                if compiled.gateway_of[a].is_some() {
                    continue;
                }
                let f = nc + c.h_cost[w];
                if f.is_finite() && f <= budget + LATENCY_EPS {
                    self.push(f, extend(&p), None);
                }
            }
        }
        None
    }
}
