//! Traffic and workload models: IFECS flows per aircraft and service, and
//! satellite task offloading loads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::ModelError;
use crate::geom::propagation_latency;
use crate::topology::NodeId;

/// A passenger-facing service class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Service {
    pub name: String,
    /// bits/s per active user
    pub bandwidth_per_user: f64,
    /// seconds
    pub delay_bound: f64,
    /// share of active passengers using this service
    pub utilization: f64,
    /// bits
    pub packet_size: f64,
}

impl Service {
    fn new(name: &str, kbps: f64, delay_ms: f64, utilization: f64, packet_bytes: f64) -> Self {
        Self {
            name: name.to_string(),
            bandwidth_per_user: kbps * 1e3,
            delay_bound: delay_ms * 1e-3,
            utilization,
            packet_size: packet_bytes * 8.0,
        }
    }

    /// Web, online gaming, VoIP and video streaming.
    pub fn defaults() -> Vec<Service> {
        vec![
            Service::new("web", 100.0, 500.0, 0.14, 933.0),
            Service::new("gaming", 50.0, 60.0, 0.04, 24.0),
            Service::new("voip", 64.0, 100.0, 0.15, 829.0),
            Service::new("video", 1500.0, 300.0, 0.67, 1378.0),
        ]
    }

    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("bandwidth", self.bandwidth_per_user),
            ("delay_bound", self.delay_bound),
            ("packet_size", self.packet_size),
        ];
        for (what, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(format!("service {}: {what} must be positive", self.name));
            }
        }
        if !(self.utilization > 0.0 && self.utilization <= 1.0) {
            return Err(format!(
                "service {}: utilization {} out of (0, 1]",
                self.name, self.utilization
            ));
        }
        Ok(())
    }
}

/// One routable IFECS demand: a service on one aircraft.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flow {
    pub id: String,
    pub source: NodeId,
    pub service: String,
    /// bits/s
    pub demand: f64,
    /// bits
    pub packet_size: f64,
    /// seconds
    pub delay_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessorSpec {
    /// cycles/s
    pub freq: f64,
    /// instructions/cycle/core
    pub ipc: f64,
    pub cores: u32,
}

impl ProcessorSpec {
    pub const CORTEX_A8: ProcessorSpec = ProcessorSpec {
        freq: 1.0e9,
        ipc: 2.0,
        cores: 1,
    };
    pub const CORTEX_A73: ProcessorSpec = ProcessorSpec {
        freq: 2.8e9,
        ipc: 6.35,
        cores: 4,
    };

    /// Million instructions per second.
    pub fn mips(&self) -> f64 {
        // rounded to micro-MIPS so decimal inputs such as 6.35 IPC land on
        // their exact tabulated value
        let raw = self.freq * self.ipc * f64::from(self.cores) / 1e6;
        (raw * 1e6).round() / 1e6
    }

    pub fn instructions_per_second(&self) -> f64 {
        self.mips() * 1e6
    }

    /// Whole tasks completed per second.
    pub fn task_capacity(&self, task: &TaskModel) -> u64 {
        (self.instructions_per_second() / task.instructions).floor() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskModel {
    /// instructions per task
    pub instructions: f64,
    /// bits per task
    pub task_size: f64,
    /// seconds
    pub deadline: f64,
}

impl Default for TaskModel {
    fn default() -> Self {
        Self {
            instructions: 25e6,
            // 0.2 MB, decimal
            task_size: 0.2e6 * 8.0,
            deadline: 1.0,
        }
    }
}

/// Per-satellite workload within one snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatTaskLoad {
    pub satellite: NodeId,
    /// tasks/s
    pub lambda: f64,
    pub arrivals: u64,
    pub offload: u64,
    /// bits/s
    pub offload_bandwidth: f64,
}

/// Share of passengers that use IFECS at all.
pub const DEFAULT_PASSENGER_RATIO: f64 = 0.2;

pub fn flow_demand(passengers: u32, rho: f64, service: &Service) -> f64 {
    service.bandwidth_per_user * service.utilization * f64::from(passengers) * rho
}

/// One flow per (aircraft, service), aircraft-major.
pub fn build_flows(aircraft: &[(NodeId, u32)], services: &[Service], rho: f64) -> Vec<Flow> {
    aircraft
        .iter()
        .flat_map(|(node, passengers)| {
            services.iter().map(move |s| Flow {
                id: format!("{node}/{}", s.name),
                source: *node,
                service: s.name.clone(),
                demand: flow_demand(*passengers, rho, s),
                packet_size: s.packet_size,
                delay_bound: s.delay_bound,
            })
        })
        .collect()
}

/// (MIPS, tasks/s) for a processor under a task model.
pub fn processor_capacity(spec: &ProcessorSpec, task: &TaskModel) -> (f64, u64) {
    (spec.mips(), spec.task_capacity(task))
}

/// Threshold between sequential-search inversion and PTRS rejection.
const INVERSION_LIMIT: f64 = 30.0;

/// Draw a Poisson(`lambda`) variate.
///
/// Small rates use inversion by sequential search; larger rates use Hörmann's
/// transformed rejection with squeeze (PTRS), which is exact.
pub fn sample_task_arrivals<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u64 {
    if !(lambda > 0.0) {
        return 0;
    }
    if lambda <= INVERSION_LIMIT {
        poisson_inversion(lambda, rng)
    } else {
        poisson_ptrs(lambda, rng)
    }
}

fn poisson_inversion<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u64 {
    let u: f64 = rng.random();
    let mut k = 0u64;
    let mut p = (-lambda).exp();
    let mut cdf = p;
    while u > cdf {
        k += 1;
        p *= lambda / k as f64;
        cdf += p;
        if p == 0.0 && cdf < u {
            // underflowed tail; cdf is 1 up to rounding
            break;
        }
    }
    k
}

fn poisson_ptrs<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u64 {
    let slam = lambda.sqrt();
    let loglam = lambda.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.024_83 * b;
    let inv_alpha = 1.123_9 + 1.132_8 / (b - 3.4);
    let v_r = 0.927_7 - 3.622_4 / (b - 2.0);
    loop {
        let u = rng.random::<f64>() - 0.5;
        let v: f64 = rng.random();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + lambda + 0.43).floor();
        if us >= 0.07 && v <= v_r {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        if v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln()
            <= -lambda + k * loglam - ln_gamma(k + 1.0)
        {
            return k as u64;
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator keyed by a run seed and a tuple of integers. Streams for
/// different keys are independent of evaluation order.
pub fn keyed_rng(seed: u64, key: &[u64]) -> ChaCha8Rng {
    let mut h = splitmix64(seed);
    for &k in key {
        h = splitmix64(h ^ k);
    }
    ChaCha8Rng::seed_from_u64(h)
}

/// (O_s, O^B_s): tasks beyond onboard capacity and the bandwidth to ship them.
pub fn offload_load(arrivals: u64, capacity: u64, task: &TaskModel) -> (u64, f64) {
    let offload = arrivals.saturating_sub(capacity);
    (offload, task.task_size * offload as f64 / task.deadline)
}

/// Time for a MEC server to process `offload` tasks.
pub fn mec_compute_latency(offload: u64, mec: &ProcessorSpec, task: &TaskModel) -> f64 {
    task.instructions * offload as f64 / mec.instructions_per_second()
}

pub fn transmission_latency(bits: f64, capacity: f64) -> Result<f64, ModelError> {
    if !(capacity > 0.0) {
        return Err(ModelError::ZeroCapacity(format!("{capacity} bit/s")));
    }
    Ok(bits / capacity)
}

/// Flow and packet latency over one link: transmission plus the two-way
/// propagation term.
pub fn link_total_latency(
    demand: f64,
    packet: f64,
    distance: f64,
    capacity: f64,
) -> Result<(f64, f64), ModelError> {
    let prop = 2.0 * propagation_latency(distance);
    Ok((
        transmission_latency(demand, capacity)? + prop,
        transmission_latency(packet, capacity)? + prop,
    ))
}
