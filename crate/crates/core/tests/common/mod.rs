//! Seeded tiny-instance generator shared by the integration tests.

#![allow(dead_code)]

use aamec::optimizer::{Arc, Candidate, Commodity, ProblemInstance, UseCase};
use aamec::topology::{LinkType, NodeId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const MAX_NODES: usize = 6;
pub const MAX_ARCS: usize = 10;
pub const MAX_COMMODITIES: usize = 4;

fn pick_nodes(rng: &mut ChaCha8Rng) -> Vec<NodeId> {
    let n = rng.random_range(3..=MAX_NODES);
    let sats = rng.random_range(1..=n - 1);
    let mut out = Vec::with_capacity(n);
    for s in 0..sats {
        out.push(NodeId::Satellite {
            plane: 0,
            slot: s as u16,
        });
    }
    let mut air = 0;
    let mut gw = 0;
    for _ in sats..n {
        if rng.random_bool(0.5) {
            out.push(NodeId::Aircraft(air));
            air += 1;
        } else {
            out.push(NodeId::Gateway(gw));
            gw += 1;
        }
    }
    out.sort();
    out
}

/// Random instance with at most 6 nodes, 10 directed arcs and 4 commodities.
/// Demands are drawn against the smallest link capacities so that capacity
/// and gateway-matching constraints actually bind.
pub fn random_instance(seed: u64, use_case: UseCase) -> ProblemInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = pick_nodes(&mut rng);
    let mut pairs = Vec::new();
    for &u in &nodes {
        for &v in &nodes {
            if u != v && LinkType::between(u, v).is_some() {
                pairs.push((u, v));
            }
        }
    }
    pairs.shuffle(&mut rng);
    let m = rng.random_range(2..=MAX_ARCS).min(pairs.len());
    let mut arcs: Vec<Arc> = pairs[..m]
        .iter()
        .map(|&(tail, head)| {
            let t = LinkType::between(tail, head).unwrap();
            Arc {
                tail,
                head,
                link_type: t,
                distance: rng.random_range(1e5..3e6),
                capacity: t.capacity(),
            }
        })
        .collect();
    arcs.sort_by_key(|a| (a.tail, a.head));

    let sources: Vec<NodeId> = match use_case {
        UseCase::Airborne => nodes.iter().copied().filter(|n| n.is_aircraft()).collect(),
        UseCase::Offload => nodes.iter().copied().filter(|n| n.is_satellite()).collect(),
    };
    let mec: Vec<NodeId> = nodes
        .iter()
        .copied()
        .filter(|n| !n.is_satellite())
        .collect();
    let k = if sources.is_empty() {
        0
    } else {
        rng.random_range(1..=MAX_COMMODITIES)
    };
    let mut commodities = Vec::with_capacity(k);
    for i in 0..k {
        let source = sources[rng.random_range(0..sources.len())];
        let mut candidates = Vec::new();
        for &node in &mec {
            if node == source || !rng.random_bool(0.8) {
                continue;
            }
            let compute_latency = match use_case {
                UseCase::Airborne => 0.0,
                UseCase::Offload => rng.random_range(0.0..0.02),
            };
            candidates.push(Candidate {
                node,
                compute_latency,
            });
        }
        let demand = rng.random_range(10e6..70e6);
        let (class, delay_bits, delay_bound) = match use_case {
            UseCase::Airborne => (
                ["web", "gaming", "voip", "video"][i % 4].to_string(),
                rng.random_range(192.0..12_000.0),
                rng.random_range(0.02..0.12),
            ),
            UseCase::Offload => ("offload".to_string(), demand, rng.random_range(0.2..1.0)),
        };
        commodities.push(Commodity {
            id: format!("c{i}"),
            class,
            source,
            demand,
            delay_bits,
            delay_bound,
            candidates,
        });
    }
    ProblemInstance {
        id: format!("{use_case}-seed{seed}"),
        use_case,
        snapshot: 0,
        time: 0.0,
        nodes,
        arcs,
        commodities,
    }
}

/// Seeds 0..count, alternating use cases.
pub fn instance_suite(count: u64) -> Vec<ProblemInstance> {
    (0..count)
        .map(|s| {
            let uc = if s % 2 == 0 {
                UseCase::Airborne
            } else {
                UseCase::Offload
            };
            random_instance(s, uc)
        })
        .collect()
}
