use std::collections::BTreeSet;

use super::{Arc, Candidate, Commodity, ProblemInstance, UseCase};
use crate::demand::{mec_compute_latency, Flow, ProcessorSpec, SatTaskLoad, TaskModel};
use crate::error::ModelError;
use crate::topology::{NodeId, Snapshot};

fn directed_arcs(snapshot: &Snapshot) -> Result<Vec<Arc>, ModelError> {
    let mut arcs = Vec::with_capacity(2 * snapshot.links.len());
    for l in &snapshot.links {
        if !(l.capacity > 0.0) {
            return Err(ModelError::ZeroCapacity(format!("{}-{}", l.a, l.b)));
        }
        for (tail, head) in [(l.a, l.b), (l.b, l.a)] {
            arcs.push(Arc {
                tail,
                head,
                link_type: l.link_type,
                distance: l.distance,
                capacity: l.capacity,
            });
        }
    }
    arcs.sort_by_key(|x| (x.tail, x.head));
    Ok(arcs)
}

fn skeleton(snapshot: &Snapshot, use_case: UseCase) -> Result<ProblemInstance, ModelError> {
    Ok(ProblemInstance {
        id: format!("{use_case}-r{}", snapshot.index),
        use_case,
        snapshot: snapshot.index,
        time: snapshot.time,
        nodes: snapshot.nodes.iter().map(|n| n.id).collect(),
        arcs: directed_arcs(snapshot)?,
        commodities: Vec::new(),
    })
}

/// MEC-capable destinations present in the snapshot, minus `source`.
fn destinations(snapshot: &Snapshot, mec_nodes: &BTreeSet<NodeId>, source: NodeId) -> Vec<NodeId> {
    mec_nodes
        .iter()
        .copied()
        .filter(|&n| n != source && !n.is_satellite() && snapshot.node(n).is_some())
        .collect()
}

/// Airborne IFECS instance: one commodity per flow, destinations are MEC
/// aircraft and gateways.
pub fn build_airborne_problem(
    snapshot: &Snapshot,
    flows: &[Flow],
    mec_nodes: &BTreeSet<NodeId>,
) -> Result<ProblemInstance, ModelError> {
    let mut instance = skeleton(snapshot, UseCase::Airborne)?;
    for f in flows {
        if snapshot.node(f.source).is_none() {
            return Err(ModelError::MissingSource {
                commodity: f.id.clone(),
                node: f.source.to_string(),
            });
        }
        instance.commodities.push(Commodity {
            id: f.id.clone(),
            class: f.service.clone(),
            source: f.source,
            demand: f.demand,
            delay_bits: f.packet_size,
            delay_bound: f.delay_bound,
            candidates: destinations(snapshot, mec_nodes, f.source)
                .into_iter()
                .map(|node| Candidate {
                    node,
                    compute_latency: 0.0,
                })
                .collect(),
        });
    }
    Ok(instance)
}

/// Satellite offloading instance: one commodity per satellite with tasks
/// beyond its onboard capacity.
pub fn build_offload_problem(
    snapshot: &Snapshot,
    loads: &[SatTaskLoad],
    mec_nodes: &BTreeSet<NodeId>,
    mec: &ProcessorSpec,
    task: &TaskModel,
) -> Result<ProblemInstance, ModelError> {
    let mut instance = skeleton(snapshot, UseCase::Offload)?;
    for load in loads.iter().filter(|l| l.offload > 0) {
        if snapshot.node(load.satellite).is_none() {
            return Err(ModelError::MissingSource {
                commodity: load.satellite.to_string(),
                node: load.satellite.to_string(),
            });
        }
        let compute = mec_compute_latency(load.offload, mec, task);
        instance.commodities.push(Commodity {
            id: load.satellite.to_string(),
            class: "offload".into(),
            source: load.satellite,
            demand: load.offload_bandwidth,
            delay_bits: load.offload_bandwidth,
            delay_bound: task.deadline,
            candidates: destinations(snapshot, mec_nodes, load.satellite)
                .into_iter()
                .map(|node| Candidate {
                    node,
                    compute_latency: compute,
                })
                .collect(),
        });
    }
    Ok(instance)
}
