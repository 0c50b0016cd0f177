//! Static-vs-dynamic comparisons and MEC deployment sweeps over snapshot
//! series, plus metric aggregation.
//!
//! A dynamic run re-optimizes destinations and paths at every snapshot. A
//! static run pins each commodity to the destination chosen the first time it
//! is solved and only re-routes afterwards; commodities whose pinned
//! destination can no longer be reached are dropped with reason
//! [`UNREACHABLE`]. In either mode a commodity that cannot be routed even on
//! an unloaded network is dropped with reason [`NO_FEASIBLE_PATH`] before the
//! joint solve.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::statistics::{Data, Distribution, Median, OrderStatistics};
use thiserror::Error;

use crate::demand::{build_flows, keyed_rng, offload_load, sample_task_arrivals, SatTaskLoad};
use crate::error::{ConfigError, ModelError, SolveError};
use crate::optimizer::{
    build_airborne_problem, build_offload_problem, individually_feasible, solve_exact,
    LatencyBreakdown, ProblemInstance, Solution, SolveLimits, UseCase, LATENCY_EPS,
};
use crate::topology::{assign_mec_aircraft, build_snapshot, NodeId, NodeKind, Scenario, Snapshot};

/// Drop reason: a static run's pinned destination has no feasible path.
pub const UNREACHABLE: &str = "unreachable";
/// Drop reason: no admissible destination is reachable within the bound.
pub const NO_FEASIBLE_PATH: &str = "no_feasible_path";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Dynamic,
    Static,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Dynamic => "dynamic",
            Mode::Static => "static",
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// worker threads; 0 lets the pool decide
    pub jobs: usize,
    /// keep every solved instance in the result (for dumping)
    pub keep_instances: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "lowercase")]
pub enum CommodityStatus {
    Solved,
    Dropped(String),
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommodityRecord {
    pub id: String,
    pub class: String,
    pub source: NodeId,
    /// bits/s
    pub demand: f64,
    #[serde(flatten)]
    pub status: CommodityStatus,
    pub destination: Option<NodeId>,
    /// gateway name, or aircraft name for aerial MEC
    pub destination_name: Option<String>,
    pub latency: Option<LatencyBreakdown>,
    pub hops: usize,
}

impl CommodityRecord {
    pub fn is_solved(&self) -> bool {
        self.status == CommodityStatus::Solved
    }

    pub fn is_aerial(&self) -> bool {
        self.destination.is_some_and(|d| d.is_aircraft())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnapshotStatus {
    Optimal,
    /// search budget ran out; the best incumbent (if any) is reported
    BudgetExceeded,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotResult {
    pub index: usize,
    /// seconds
    pub time: f64,
    /// task arrival rate for offloading runs
    pub lambda: Option<f64>,
    pub status: SnapshotStatus,
    /// summed latency of solved commodities, seconds
    pub objective: f64,
    /// summed demand over traversed arcs, bits/s
    pub bandwidth: f64,
    pub records: Vec<CommodityRecord>,
    pub solution: Option<Solution>,
    /// the jointly solved instance, when requested
    pub instance: Option<ProblemInstance>,
    /// seconds spent in the solver
    pub wall_time: f64,
}

impl SnapshotResult {
    pub fn solved_ids(&self) -> BTreeSet<&str> {
        self.records
            .iter()
            .filter(|r| r.is_solved())
            .map(|r| r.id.as_str())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub use_case: UseCase,
    pub mode: Mode,
    pub mec_aircraft_ratio: f64,
    pub seed: u64,
    /// snapshot-major, and λ-major before that for offloading runs
    pub snapshots: Vec<SnapshotResult>,
}

impl RunResult {
    /// True when every snapshot was solved to proven optimality.
    pub fn is_complete(&self) -> bool {
        self.snapshots
            .iter()
            .all(|s| s.status == SnapshotStatus::Optimal)
    }
}

/// MEC-capable nodes for a scenario: its MEC aircraft plus every gateway.
pub fn mec_node_set(scenario: &Scenario) -> BTreeSet<NodeId> {
    let mut set = assign_mec_aircraft(scenario);
    set.extend((0..scenario.gateways.len() as u32).map(NodeId::Gateway));
    set
}

/// Satellite offloading loads for one snapshot. Each satellite draws from
/// its own stream keyed by (satellite index, snapshot index), so the same
/// uniforms drive every λ.
pub fn offload_loads(scenario: &Scenario, snapshot: &Snapshot, lambda: f64) -> Vec<SatTaskLoad> {
    let capacity = scenario
        .satellite_processor
        .task_capacity(&scenario.task_model);
    let per_plane = scenario.shell.sats_per_plane as u64;
    snapshot
        .nodes
        .iter()
        .filter_map(|n| match n.id {
            NodeId::Satellite { plane, slot } => {
                let index = u64::from(plane) * per_plane + u64::from(slot);
                let mut rng = keyed_rng(scenario.rng_seed, &[index, snapshot.index as u64]);
                let arrivals = sample_task_arrivals(lambda, &mut rng);
                let (offload, bandwidth) = offload_load(arrivals, capacity, &scenario.task_model);
                Some(SatTaskLoad {
                    satellite: n.id,
                    lambda,
                    arrivals,
                    offload,
                    offload_bandwidth: bandwidth,
                })
            }
            _ => None,
        })
        .collect()
}

/// Full instance for one snapshot, before any screening.
pub fn snapshot_problem(
    scenario: &Scenario,
    snapshot: &Snapshot,
    use_case: UseCase,
    lambda: f64,
) -> Result<ProblemInstance, ModelError> {
    let mec = mec_node_set(scenario);
    match use_case {
        UseCase::Airborne => {
            let aircraft: Vec<_> = snapshot
                .nodes
                .iter()
                .filter_map(|n| match &n.kind {
                    NodeKind::Aircraft { passengers, .. } => Some((n.id, *passengers)),
                    _ => None,
                })
                .collect();
            let flows = build_flows(&aircraft, &scenario.services, scenario.passenger_ratio);
            build_airborne_problem(snapshot, &flows, &mec)
        }
        UseCase::Offload => {
            let loads = offload_loads(scenario, snapshot, lambda);
            let mut p = build_offload_problem(
                snapshot,
                &loads,
                &mec,
                &scenario.mec_processor,
                &scenario.task_model,
            )?;
            p.id = format!("offload-l{lambda}-r{}", snapshot.index);
            Ok(p)
        }
    }
}

fn node_name(snapshot: &Snapshot, id: NodeId) -> Option<String> {
    snapshot.node(id).and_then(|n| match &n.kind {
        NodeKind::Gateway { name, .. } | NodeKind::Aircraft { name, .. } => Some(name.clone()),
        NodeKind::Satellite { .. } => None,
    })
}

/// Screen, solve and record one snapshot. `pinned` maps commodity ids to a
/// fixed destination (static runs).
fn solve_snapshot(
    snapshot: &Snapshot,
    mut problem: ProblemInstance,
    lambda: Option<f64>,
    pinned: &BTreeMap<String, NodeId>,
    limits: &SolveLimits,
    keep_instance: bool,
) -> Result<SnapshotResult, ModelError> {
    let mut dropped: BTreeMap<String, &'static str> = BTreeMap::new();
    for k in 0..problem.commodities.len() {
        let id = problem.commodities[k].id.clone();
        if let Some(&dest) = pinned.get(&id) {
            if !problem.restrict_destination(k, dest) {
                dropped.insert(id, UNREACHABLE);
            }
        }
    }
    let alone = individually_feasible(&problem)?;
    for (c, ok) in problem.commodities.iter().zip(&alone) {
        if !ok && !dropped.contains_key(&c.id) {
            let reason = if pinned.contains_key(&c.id) {
                UNREACHABLE
            } else {
                NO_FEASIBLE_PATH
            };
            dropped.insert(c.id.clone(), reason);
        }
    }
    let all = problem.commodities.clone();
    problem.retain_commodities(|_, c| !dropped.contains_key(&c.id));

    let started = Instant::now();
    let outcome = solve_exact(&problem, limits);
    let wall_time = started.elapsed().as_secs_f64();
    let (status, solution) = match outcome {
        Ok(s) => (SnapshotStatus::Optimal, Some(s)),
        Err(SolveError::BudgetExceeded { incumbent, .. }) => {
            (SnapshotStatus::BudgetExceeded, incumbent.map(|b| *b))
        }
        Err(SolveError::Infeasible) | Err(SolveError::TooLarge { .. }) => {
            (SnapshotStatus::Infeasible, None)
        }
        Err(SolveError::Model(e)) => return Err(e),
    };

    let records = all
        .iter()
        .map(|c| {
            let base = CommodityRecord {
                id: c.id.clone(),
                class: c.class.clone(),
                source: c.source,
                demand: c.demand,
                status: CommodityStatus::Infeasible,
                destination: None,
                destination_name: None,
                latency: None,
                hops: 0,
            };
            if let Some(reason) = dropped.get(&c.id) {
                return CommodityRecord {
                    status: CommodityStatus::Dropped(reason.to_string()),
                    ..base
                };
            }
            match solution
                .as_ref()
                .and_then(|s| s.assignments.iter().find(|a| a.commodity == c.id))
            {
                Some(a) => CommodityRecord {
                    status: CommodityStatus::Solved,
                    destination: Some(a.destination),
                    destination_name: node_name(snapshot, a.destination),
                    latency: Some(a.latency),
                    hops: a.path.len() - 1,
                    ..base
                },
                None => base,
            }
        })
        .collect();

    let (objective, bandwidth) = solution.as_ref().map_or((0.0, 0.0), |s| {
        (s.objective, s.consumed_bandwidth(&problem))
    });
    Ok(SnapshotResult {
        index: snapshot.index,
        time: snapshot.time,
        lambda,
        status,
        objective,
        bandwidth,
        records,
        solution,
        instance: keep_instance.then_some(problem),
        wall_time,
    })
}

fn lambda_grid(scenario: &Scenario, use_case: UseCase) -> Vec<Option<f64>> {
    match use_case {
        UseCase::Airborne => vec![None],
        UseCase::Offload => scenario.lambdas.iter().copied().map(Some).collect(),
    }
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T, ExperimentError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| ExperimentError::Pool(e.to_string()))?;
    Ok(pool.install(f))
}

/// Re-optimize destinations and paths independently at every snapshot.
pub fn run_dynamic(
    scenario: &Scenario,
    use_case: UseCase,
    options: &RunOptions,
) -> Result<RunResult, ExperimentError> {
    scenario.validate()?;
    let lambdas = lambda_grid(scenario, use_case);
    let tasks: Vec<(Option<f64>, usize)> = lambdas
        .iter()
        .flat_map(|&l| (0..scenario.snapshot_count()).map(move |r| (l, r)))
        .collect();
    let none = BTreeMap::new();
    let snapshots = with_pool(options.jobs, || {
        tasks
            .par_iter()
            .map(|&(lambda, r)| {
                let snap = build_snapshot(scenario, r);
                let problem = snapshot_problem(scenario, &snap, use_case, lambda.unwrap_or(0.0))?;
                solve_snapshot(
                    &snap,
                    problem,
                    lambda,
                    &none,
                    &scenario.limits,
                    options.keep_instances,
                )
            })
            .collect::<Result<Vec<_>, ModelError>>()
    })??;
    Ok(RunResult {
        use_case,
        mode: Mode::Dynamic,
        mec_aircraft_ratio: scenario.mec_aircraft_ratio,
        seed: scenario.rng_seed,
        snapshots,
    })
}

/// Pin destinations at first solve, re-route only afterwards.
pub fn run_static(
    scenario: &Scenario,
    use_case: UseCase,
    options: &RunOptions,
) -> Result<RunResult, ExperimentError> {
    scenario.validate()?;
    let series: Vec<Snapshot> = (0..scenario.snapshot_count())
        .map(|r| build_snapshot(scenario, r))
        .collect();
    let mut snapshots = Vec::new();
    for lambda in lambda_grid(scenario, use_case) {
        let problems = series
            .iter()
            .map(|s| snapshot_problem(scenario, s, use_case, lambda.unwrap_or(0.0)))
            .collect::<Result<Vec<_>, _>>()?;
        snapshots.extend(static_chain(
            &series,
            problems,
            lambda,
            &scenario.limits,
            options.keep_instances,
        )?);
    }
    Ok(RunResult {
        use_case,
        mode: Mode::Static,
        mec_aircraft_ratio: scenario.mec_aircraft_ratio,
        seed: scenario.rng_seed,
        snapshots,
    })
}

/// Sequential static policy over prepared per-snapshot instances.
pub fn static_chain(
    series: &[Snapshot],
    problems: Vec<ProblemInstance>,
    lambda: Option<f64>,
    limits: &SolveLimits,
    keep_instances: bool,
) -> Result<Vec<SnapshotResult>, ModelError> {
    let mut pinned: BTreeMap<String, NodeId> = BTreeMap::new();
    let mut out = Vec::with_capacity(problems.len());
    for (snap, problem) in series.iter().zip(problems) {
        let result = solve_snapshot(snap, problem, lambda, &pinned, limits, keep_instances)?;
        for r in &result.records {
            if let (CommodityStatus::Solved, Some(d)) = (&r.status, r.destination) {
                pinned.entry(r.id.clone()).or_insert(d);
            }
        }
        out.push(result);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub ratio: f64,
    pub result: RunResult,
    pub metrics: Metrics,
}

/// One dynamic run per MEC aircraft ratio with the same seed; because MEC
/// aircraft are a prefix of one seeded permutation, nested ratios give nested
/// MEC sets.
pub fn sweep_mec_ratio(
    scenario: &Scenario,
    ratios: &[f64],
    use_case: UseCase,
    options: &RunOptions,
) -> Result<Vec<SweepPoint>, ExperimentError> {
    ratios
        .iter()
        .map(|&ratio| {
            let s = Scenario {
                mec_aircraft_ratio: ratio,
                ..scenario.clone()
            };
            let result = run_dynamic(&s, use_case, options)?;
            let metrics = aggregate_metrics(&result);
            Ok(SweepPoint {
                ratio,
                result,
                metrics,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LatencyStats {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub p5: f64,
    pub p95: f64,
}

impl LatencyStats {
    pub fn from_samples(samples: &[f64]) -> LatencyStats {
        if samples.is_empty() {
            return LatencyStats::default();
        }
        let mut data = Data::new(samples.to_vec());
        LatencyStats {
            count: samples.len(),
            mean: data.mean().unwrap_or(0.0),
            median: data.median(),
            p5: data.quantile(0.05),
            p95: data.quantile(0.95),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub commodities: usize,
    pub solved: usize,
    pub dropped: usize,
    pub infeasible: usize,
    /// per-commodity total latency over every solved record
    pub overall: LatencyStats,
    pub by_class: BTreeMap<String, LatencyStats>,
    /// keyed by the formatted arrival rate
    pub by_lambda: BTreeMap<String, LatencyStats>,
    /// "gateway" and "aerial" shares of solved commodities
    pub destination_shares: BTreeMap<String, f64>,
    /// shares per gateway name, plus "aerial"
    pub location_shares: BTreeMap<String, f64>,
    /// bits/s, one entry per snapshot result
    pub bandwidth_per_snapshot: Vec<f64>,
    pub total_bandwidth: f64,
    pub objective_per_snapshot: Vec<f64>,
}

pub fn aggregate_metrics(result: &RunResult) -> Metrics {
    let mut m = Metrics::default();
    let mut all = Vec::new();
    let mut by_class: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut by_lambda: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut classes: BTreeMap<String, usize> = BTreeMap::new();
    let mut locations: BTreeMap<String, usize> = BTreeMap::new();
    for s in &result.snapshots {
        m.bandwidth_per_snapshot.push(s.bandwidth);
        m.objective_per_snapshot.push(s.objective);
        m.total_bandwidth += s.bandwidth;
        for r in &s.records {
            m.commodities += 1;
            match &r.status {
                CommodityStatus::Solved => m.solved += 1,
                CommodityStatus::Dropped(_) => m.dropped += 1,
                CommodityStatus::Infeasible => m.infeasible += 1,
            }
            let Some(lat) = r.latency.filter(|_| r.is_solved()) else {
                continue;
            };
            all.push(lat.total);
            by_class.entry(r.class.clone()).or_default().push(lat.total);
            if let Some(l) = s.lambda {
                by_lambda.entry(format!("{l}")).or_default().push(lat.total);
            }
            let (class, location) = if r.is_aerial() {
                ("aerial", "aerial".to_string())
            } else {
                ("gateway", r.destination_name.clone().unwrap_or_default())
            };
            *classes.entry(class.into()).or_default() += 1;
            *locations.entry(location).or_default() += 1;
        }
    }
    m.overall = LatencyStats::from_samples(&all);
    m.by_class = by_class
        .into_iter()
        .map(|(k, v)| (k, LatencyStats::from_samples(&v)))
        .collect();
    m.by_lambda = by_lambda
        .into_iter()
        .map(|(k, v)| (k, LatencyStats::from_samples(&v)))
        .collect();
    if m.solved > 0 {
        let n = m.solved as f64;
        for c in ["gateway", "aerial"] {
            let count = classes.get(c).copied().unwrap_or(0);
            m.destination_shares.insert(c.into(), count as f64 / n);
        }
        m.location_shares = locations
            .into_iter()
            .map(|(k, v)| (k, v as f64 / n))
            .collect();
    }
    m
}

/// (base − new) / base; zero when the base is zero.
pub fn relative_improvement(base: f64, new: f64) -> f64 {
    if base == 0.0 {
        0.0
    } else {
        (base - new) / base
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Improvement {
    pub mean_latency: f64,
    pub median_latency: f64,
    pub total_bandwidth: f64,
}

pub fn improvement(base: &Metrics, new: &Metrics) -> Improvement {
    Improvement {
        mean_latency: relative_improvement(base.overall.mean, new.overall.mean),
        median_latency: relative_improvement(base.overall.median, new.overall.median),
        total_bandwidth: relative_improvement(base.total_bandwidth, new.total_bandwidth),
    }
}

/// Snapshots where `better` should not lose to `worse` but does. Only
/// snapshots where both are optimal and solve the same commodities are
/// comparable.
pub fn objective_violations(worse: &RunResult, better: &RunResult) -> Vec<String> {
    let mut out = Vec::new();
    for (w, b) in worse.snapshots.iter().zip(&better.snapshots) {
        if w.status != SnapshotStatus::Optimal || b.status != SnapshotStatus::Optimal {
            continue;
        }
        if w.solved_ids() != b.solved_ids() {
            continue;
        }
        if b.objective > w.objective + LATENCY_EPS * (1.0 + w.records.len() as f64) {
            out.push(format!(
                "snapshot {} (lambda {:?}): {:.9} s > {:.9} s",
                w.index, w.lambda, b.objective, w.objective
            ));
        }
    }
    out
}

/// Number of snapshot pairs [`objective_violations`] actually compares.
pub fn comparable_snapshots(a: &RunResult, b: &RunResult) -> usize {
    a.snapshots
        .iter()
        .zip(&b.snapshots)
        .filter(|(x, y)| {
            x.status == SnapshotStatus::Optimal
                && y.status == SnapshotStatus::Optimal
                && x.solved_ids() == y.solved_ids()
        })
        .count()
}

/// Violations of non-increasing objectives along a sweep with nested MEC
/// sets.
pub fn monotonicity_violations(points: &[SweepPoint]) -> Vec<String> {
    points
        .windows(2)
        .flat_map(|w| {
            objective_violations(&w[0].result, &w[1].result)
                .into_iter()
                .map(move |v| format!("ratio {} -> {}: {v}", w[0].ratio, w[1].ratio))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::desk_scenario;
    use crate::geom::EcefPosition;
    use crate::optimizer::{validate_solution, Arc, Candidate, Commodity};
    use crate::topology::{LinkType, Node};

    fn sat(slot: u16) -> NodeId {
        NodeId::Satellite { plane: 0, slot }
    }

    fn bare_snapshot(index: usize, ids: &[NodeId]) -> Snapshot {
        Snapshot {
            index,
            time: index as f64 * 300.0,
            nodes: ids
                .iter()
                .map(|&id| Node {
                    id,
                    kind: match id {
                        NodeId::Satellite { plane, slot } => NodeKind::Satellite { plane, slot },
                        NodeId::Gateway(i) => NodeKind::Gateway {
                            name: format!("gw{i}"),
                            location: crate::geom::GeodeticPoint {
                                latitude: 0.0,
                                longitude: 0.0,
                                altitude: 0.0,
                            },
                            has_mec: true,
                        },
                        NodeId::Aircraft(_) => unreachable!(),
                    },
                    position: EcefPosition::new(0.0, 0.0, 0.0),
                })
                .collect(),
            links: Vec::new(),
        }
    }

    fn arc(tail: NodeId, head: NodeId, distance: f64) -> Arc {
        Arc {
            tail,
            head,
            link_type: LinkType::between(tail, head).unwrap(),
            distance,
            capacity: LinkType::between(tail, head).unwrap().capacity(),
        }
    }

    /// s0 offloads to either gateway; gateway 1 sits behind one ISL hop.
    fn two_gateway_instance(index: usize, g0_distance: f64, g0_present: bool) -> ProblemInstance {
        let mut arcs = vec![
            arc(sat(0), sat(1), 1e6),
            arc(sat(1), sat(0), 1e6),
            arc(sat(1), NodeId::Gateway(1), 8e5),
        ];
        let mut nodes = vec![sat(0), sat(1), NodeId::Gateway(1)];
        let mut candidates = vec![Candidate {
            node: NodeId::Gateway(1),
            compute_latency: 0.0,
        }];
        if g0_present {
            arcs.push(arc(sat(0), NodeId::Gateway(0), g0_distance));
            nodes.push(NodeId::Gateway(0));
            candidates.insert(
                0,
                Candidate {
                    node: NodeId::Gateway(0),
                    compute_latency: 0.0,
                },
            );
        }
        arcs.sort_by_key(|a| (a.tail, a.head));
        nodes.sort();
        ProblemInstance {
            id: format!("offload-r{index}"),
            use_case: UseCase::Offload,
            snapshot: index,
            time: 0.0,
            nodes,
            arcs,
            commodities: vec![Commodity {
                id: "S0.0".into(),
                class: "offload".into(),
                source: sat(0),
                demand: 8e6,
                delay_bits: 8e6,
                delay_bound: 1.0,
                candidates,
            }],
        }
    }

    #[test]
    fn static_pins_first_destination_and_drops_when_unreachable() {
        let ids = [sat(0), sat(1), NodeId::Gateway(0), NodeId::Gateway(1)];
        let series: Vec<_> = (0..3).map(|r| bare_snapshot(r, &ids)).collect();
        let problems = vec![
            two_gateway_instance(0, 8e5, true),
            // gateway 0 still visible but far; dynamic switches
            two_gateway_instance(1, 1.5e7, true),
            // gateway 0 lost entirely
            two_gateway_instance(2, 0.0, false),
        ];
        let limits = SolveLimits::default();
        let stat = static_chain(&series, problems.clone(), None, &limits, false).unwrap();
        let none = BTreeMap::new();
        let dynamic: Vec<_> = series
            .iter()
            .zip(problems)
            .map(|(s, p)| solve_snapshot(s, p, None, &none, &limits, false).unwrap())
            .collect();

        assert_eq!(stat[0].records[0].destination, Some(NodeId::Gateway(0)));
        assert_eq!(stat[1].records[0].destination, Some(NodeId::Gateway(0)));
        assert_eq!(dynamic[1].records[0].destination, Some(NodeId::Gateway(1)));
        assert!(dynamic[1].objective < stat[1].objective);
        assert_eq!(
            stat[2].records[0].status,
            CommodityStatus::Dropped(UNREACHABLE.into())
        );
        assert_eq!(dynamic[2].records[0].status, CommodityStatus::Solved);
        assert_eq!(stat[0].objective, dynamic[0].objective);
    }

    #[test]
    fn improvement_arithmetic() {
        assert!((relative_improvement(10e-3, 9e-3) - 0.1).abs() < 1e-12);
        assert_eq!(relative_improvement(5.0, 5.0), 0.0);
        assert_eq!(relative_improvement(0.0, 1.0), 0.0);
    }

    #[test]
    fn empty_result_gives_empty_metrics() {
        let r = RunResult {
            use_case: UseCase::Airborne,
            mode: Mode::Dynamic,
            mec_aircraft_ratio: 0.0,
            seed: 1,
            snapshots: Vec::new(),
        };
        let m = aggregate_metrics(&r);
        assert_eq!(m, Metrics::default());
        assert_eq!(m.commodities, 0);
    }

    #[test]
    fn stats_match_hand_computation() {
        let s = LatencyStats::from_samples(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.count, 4);
        assert_eq!(s.mean, 2.5);
        assert_eq!(s.median, 2.5);
        assert!(s.p5 >= 1.0 && s.p5 < 1.5);
        assert!(s.p95 > 3.5 && s.p95 <= 4.0);
    }

    fn short_desk() -> Scenario {
        Scenario {
            horizon: 1200.0,
            ..desk_scenario()
        }
    }

    #[test]
    fn single_snapshot_matches_one_solve() {
        let s = Scenario {
            horizon: 900.0,
            snapshot_interval: 1000.0,
            ..desk_scenario()
        };
        assert_eq!(s.snapshot_count(), 1);
        let opts = RunOptions {
            jobs: 1,
            keep_instances: true,
        };
        let run = run_dynamic(&s, UseCase::Airborne, &opts).unwrap();
        assert_eq!(run.snapshots.len(), 1);
        let p = run.snapshots[0].instance.as_ref().unwrap();
        assert!(!p.commodities.is_empty());
        let direct = solve_exact(p, &s.limits).unwrap();
        assert_eq!(run.snapshots[0].solution.as_ref(), Some(&direct));
    }

    #[test]
    fn records_conserve_commodities_and_validate() {
        let s = short_desk();
        for uc in [UseCase::Airborne, UseCase::Offload] {
            let opts = RunOptions {
                jobs: 2,
                keep_instances: true,
            };
            for run in [
                run_dynamic(&s, uc, &opts).unwrap(),
                run_static(&s, uc, &opts).unwrap(),
            ] {
                for snap in &run.snapshots {
                    let p = snap.instance.as_ref().unwrap();
                    let solved = snap.records.iter().filter(|r| r.is_solved()).count();
                    assert_eq!(solved, p.commodities.len());
                    let sol = snap.solution.as_ref().unwrap();
                    let report = validate_solution(p, sol);
                    assert!(report.feasible, "{report}");
                    assert!((snap.bandwidth - sol.consumed_bandwidth(p)).abs() < 1e-6);
                }
                let m = aggregate_metrics(&run);
                assert_eq!(m.solved + m.dropped + m.infeasible, m.commodities);
                if m.solved > 0 {
                    let sum: f64 = m.destination_shares.values().sum();
                    assert!((sum - 1.0).abs() < 1e-12);
                    let sum: f64 = m.location_shares.values().sum();
                    assert!((sum - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn ratio_zero_is_gateway_only() {
        let s = short_desk();
        let points =
            sweep_mec_ratio(&s, &[0.0], UseCase::Airborne, &RunOptions::default()).unwrap();
        let m = &points[0].metrics;
        assert_eq!(m.destination_shares.get("aerial"), Some(&0.0));
        assert_eq!(m.destination_shares.get("gateway"), Some(&1.0));
    }

    #[test]
    fn offload_loads_are_keyed_per_satellite_and_snapshot() {
        let s = desk_scenario();
        let snap = build_snapshot(&s, 3);
        let a = offload_loads(&s, &snap, 80.0);
        let b = offload_loads(&s, &snap, 80.0);
        assert_eq!(a, b);
        assert_eq!(a.len(), 11);
        let other = offload_loads(&s, &build_snapshot(&s, 4), 80.0);
        assert_ne!(a, other);
        for l in &a {
            assert_eq!(l.offload, l.arrivals.saturating_sub(80));
        }
    }
}
