//! Acceptance checks. Runs without the libtest harness and prints one
//! PASS/FAIL line per criterion; exits non-zero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use aamec::config::{desk_scenario, parse_scenario_str};
use aamec::demand::{
    keyed_rng, processor_capacity, sample_task_arrivals, ProcessorSpec, Service, TaskModel,
};
use aamec::experiments::{
    aggregate_metrics, comparable_snapshots, improvement, mec_node_set, objective_violations,
    run_dynamic, run_static, sweep_mec_ratio, RunOptions, RunResult, SnapshotStatus,
};
use aamec::geom::{
    distance, geodetic_to_ecef, propagate_satellite, propagation_latency, GeodeticPoint, OrbitShell,
};
use aamec::optimizer::{solve_exact, solve_oracle, validate_solution, SolveLimits, UseCase};
use aamec::report::metrics_csv;
use aamec::topology::{build_snapshot, Gateway, LinkType, NodeId, Scenario};
use aamec::SolveError;
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, DiscreteCDF, Poisson};

type Outcome = Result<String, String>;

const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
const RATIOS: [f64; 3] = [0.0, 0.2, 0.4];

fn desk(seed: u64, ratio: f64) -> Scenario {
    Scenario {
        rng_seed: seed,
        mec_aircraft_ratio: ratio,
        ..desk_scenario()
    }
}

fn keep() -> RunOptions {
    RunOptions {
        jobs: 0,
        keep_instances: true,
    }
}

fn all_optimal(run: &RunResult) -> Result<(), String> {
    match run
        .snapshots
        .iter()
        .find(|s| s.status != SnapshotStatus::Optimal)
    {
        Some(s) => Err(format!(
            "{} {} seed {} snapshot {} is {:?}",
            run.use_case, run.mode, run.seed, s.index, s.status
        )),
        None => Ok(()),
    }
}

fn oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let suite = common::instance_suite(200);
    let mut feasible = 0;
    let mut by_case = [0usize; 2];
    for p in &suite {
        by_case[(p.use_case == UseCase::Offload) as usize] += 1;
        let arcs = p.arcs.len();
        if p.nodes.len() > 6 || arcs > 10 || p.commodities.len() > 4 {
            return Err(format!("{} exceeds the size limits", p.id));
        }
        match (solve_exact(p, &SolveLimits::default()), solve_oracle(p)) {
            (Ok(e), Ok(o)) => {
                if (e.objective - o.objective).abs() > 1e-9 {
                    return Err(format!(
                        "{}: exact {} vs oracle {}",
                        p.id, e.objective, o.objective
                    ));
                }
                feasible += 1;
            }
            (Err(SolveError::Infeasible), Err(SolveError::Infeasible)) => {}
            (e, o) => {
                return Err(format!(
                    "{}: exact {:?} vs oracle {:?}",
                    p.id,
                    e.map(|s| s.objective),
                    o.map(|s| s.objective)
                ))
            }
        }
    }
    let secs = started.elapsed().as_secs_f64();
    if secs >= 60.0 {
        return Err(format!("took {secs:.1} s"));
    }
    Ok(format!(
        "200 instances ({} airborne, {} offload, {feasible} feasible) agree within 1e-9 s in {secs:.2} s",
        by_case[0], by_case[1]
    ))
}

fn validator_clean() -> Outcome {
    let mut checked = 0;
    let mut check = |p: &aamec::optimizer::ProblemInstance, s: &aamec::optimizer::Solution| {
        let r = validate_solution(p, s);
        checked += 1;
        let violations: usize = r.checks.iter().map(|c| c.violations.len()).sum();
        if r.feasible && violations == 0 {
            Ok(())
        } else {
            Err(format!("{r}"))
        }
    };
    for p in common::instance_suite(200) {
        if let Ok(s) = solve_exact(&p, &SolveLimits::default()) {
            check(&p, &s)?;
        }
        if let Ok(s) = solve_oracle(&p) {
            check(&p, &s)?;
        }
    }
    for seed in SEEDS {
        for ratio in [0.0, 0.4] {
            let sc = desk(seed, ratio);
            for uc in [UseCase::Airborne, UseCase::Offload] {
                for run in [
                    run_dynamic(&sc, uc, &keep()).map_err(|e| e.to_string())?,
                    run_static(&sc, uc, &keep()).map_err(|e| e.to_string())?,
                ] {
                    for snap in &run.snapshots {
                        if let (Some(p), Some(s)) = (&snap.instance, &snap.solution) {
                            check(p, s)?;
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{checked} solver outputs, zero violations"))
}

fn dominance() -> Outcome {
    let mut compared = 0;
    let mut fewer_static = 0;
    let mut positive = Vec::new();
    for seed in SEEDS {
        for uc in [UseCase::Airborne, UseCase::Offload] {
            for ratio in RATIOS {
                let sc = desk(seed, ratio);
                let opts = RunOptions::default();
                let dynamic = run_dynamic(&sc, uc, &opts).map_err(|e| e.to_string())?;
                let stat = run_static(&sc, uc, &opts).map_err(|e| e.to_string())?;
                all_optimal(&dynamic)?;
                all_optimal(&stat)?;
                if dynamic.snapshots.len() != 25 * if uc == UseCase::Offload { 3 } else { 1 } {
                    return Err("unexpected snapshot count".into());
                }
                let v = objective_violations(&stat, &dynamic);
                if !v.is_empty() {
                    return Err(format!("{uc} seed {seed} ratio {ratio}: {}", v.join("; ")));
                }
                compared += comparable_snapshots(&stat, &dynamic);
                // where the solved sets differ, static must have lost commodities
                for (s, d) in stat.snapshots.iter().zip(&dynamic.snapshots) {
                    let (a, b) = (s.solved_ids(), d.solved_ids());
                    if a != b {
                        if !a.is_subset(&b) {
                            return Err(format!(
                                "{uc} seed {seed} snapshot {}: static solves commodities dynamic does not",
                                s.index
                            ));
                        }
                        fewer_static += 1;
                    }
                }
                let gain = improvement(&aggregate_metrics(&stat), &aggregate_metrics(&dynamic));
                if gain.mean_latency > 0.0 {
                    positive.push((uc, seed, ratio, gain.mean_latency));
                }
            }
        }
    }
    for uc in [UseCase::Airborne, UseCase::Offload] {
        if !positive.iter().any(|p| p.0 == uc) {
            return Err(format!("{uc}: no seed with positive mean improvement"));
        }
    }
    let best = positive
        .iter()
        .map(|p| p.3)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(format!(
        "{compared} comparable snapshots dominate, {fewer_static} where static dropped more; \
         {} of 30 runs improve (best {:.1}%)",
        positive.len(),
        100.0 * best
    ))
}

fn ratio_monotonicity() -> Outcome {
    let mut compared = 0;
    let mut aerial_at_04 = Vec::new();
    for seed in SEEDS {
        // nested MEC sets
        let sets: Vec<BTreeSet<NodeId>> = RATIOS
            .iter()
            .map(|&r| mec_node_set(&desk(seed, r)))
            .collect();
        if !(sets[0].is_subset(&sets[1]) && sets[1].is_subset(&sets[2])) {
            return Err(format!("seed {seed}: MEC sets are not nested"));
        }
        for uc in [UseCase::Airborne, UseCase::Offload] {
            let points = sweep_mec_ratio(&desk(seed, 0.0), &RATIOS, uc, &RunOptions::default())
                .map_err(|e| e.to_string())?;
            for p in &points {
                all_optimal(&p.result)?;
            }
            for w in points.windows(2) {
                let v = objective_violations(&w[0].result, &w[1].result);
                if !v.is_empty() {
                    return Err(format!("{uc} seed {seed}: {}", v.join("; ")));
                }
                compared += comparable_snapshots(&w[0].result, &w[1].result);
            }
            let aerial = |i: usize| {
                points[i]
                    .metrics
                    .destination_shares
                    .get("aerial")
                    .copied()
                    .unwrap_or(0.0)
            };
            if aerial(0) != 0.0 {
                return Err(format!(
                    "{uc} seed {seed}: aerial share {} at ratio 0",
                    aerial(0)
                ));
            }
            aerial_at_04.push((uc, aerial(2)));
        }
    }
    let total = SEEDS.len() * 2 * 2 * 25 + SEEDS.len() * 2 * 2 * 50;
    for uc in [UseCase::Airborne, UseCase::Offload] {
        if !aerial_at_04.iter().any(|(u, a)| *u == uc && *a > 0.0) {
            return Err(format!(
                "{uc}: aerial share is 0 at ratio 0.4 for every seed"
            ));
        }
    }
    let max = |uc| {
        aerial_at_04
            .iter()
            .filter(|(u, _)| *u == uc)
            .map(|p| p.1)
            .fold(0.0, f64::max)
    };
    Ok(format!(
        "{compared}/{total} snapshot pairs comparable and non-increasing; aerial share 0 at ratio 0, \
         up to {:.1}% (airborne) / {:.1}% (offload) at 0.4",
        100.0 * max(UseCase::Airborne),
        100.0 * max(UseCase::Offload)
    ))
}

fn table_roundtrips() -> Outcome {
    let task = TaskModel::default();
    let a8 = processor_capacity(&ProcessorSpec::CORTEX_A8, &task);
    let a73 = processor_capacity(&ProcessorSpec::CORTEX_A73, &task);
    if a8 != (2000.0, 80) || a73 != (71120.0, 2844) {
        return Err(format!("processors {a8:?} {a73:?}"));
    }
    // same processors entered in table units through a scenario file
    let base = r#"
[constellation]
planes = 1
sats_per_plane = 2
altitude = "781 km"
inclination = 86.4
raan_spacing = 0.0

[task_model]
instructions = 25e6
task_size = "0.2 MB"
deadline = "1 s"

[processors.satellite]
frequency = "1 GHz"
ipc = 2.0
cores = 1

[processors.mec]
frequency = "2.8 GHz"
ipc = 6.35
cores = 4

[[services]]
name = "web"
bandwidth = "100 kbps"
delay_bound = "500 ms"
utilization = 0.14
packet_size = "933 B"

[[services]]
name = "gaming"
bandwidth = "50 kbps"
delay_bound = "60 ms"
utilization = 0.04
packet_size = "24 B"

[[services]]
name = "voip"
bandwidth = "64 kbps"
delay_bound = "100 ms"
utilization = 0.15
packet_size = "829 B"

[[services]]
name = "video"
bandwidth = "1.5 Mbps"
delay_bound = "300 ms"
utilization = 0.67
packet_size = "1378 B"
"#;
    let s = parse_scenario_str(base).map_err(|e| e.to_string())?;
    if processor_capacity(&s.satellite_processor, &s.task_model) != (2000.0, 80)
        || processor_capacity(&s.mec_processor, &s.task_model) != (71120.0, 2844)
    {
        return Err("processors from file differ".into());
    }
    let expected = [
        ("web", 100e3, 0.5, 0.14, 7464.0),
        ("gaming", 50e3, 0.06, 0.04, 192.0),
        ("voip", 64e3, 0.1, 0.15, 6632.0),
        ("video", 1.5e6, 0.3, 0.67, 11024.0),
    ];
    for services in [&s.services, &Service::defaults()] {
        for (svc, (name, bw, delay, util, bits)) in services.iter().zip(expected) {
            let got = (
                svc.name.as_str(),
                svc.bandwidth_per_user,
                svc.delay_bound,
                svc.utilization,
                svc.packet_size,
            );
            if got != (name, bw, delay, util, bits) {
                return Err(format!("service row {got:?}"));
            }
        }
    }
    let links = [
        (LinkType::SatSat, 125e6),
        (LinkType::SatAir, 112e6),
        (LinkType::SatGw, 500e6),
        (LinkType::AirAir, 45e6),
        (LinkType::AirGw, 75e6),
    ];
    for (t, cap) in links {
        if t.capacity() != cap {
            return Err(format!("{t:?} capacity {}", t.capacity()));
        }
    }
    Ok("processors 2000/80 and 71120/2844, 5 link capacities, 4 service rows".into())
}

fn physics() -> Outcome {
    // a one-satellite shell whose only satellite starts over (0, 0)
    let shell = OrbitShell {
        plane_count: 1,
        sats_per_plane: 1,
        inclination: 86.4,
        raan_spacing: 0.0,
        phase_offset: 0.0,
        ..OrbitShell::iridium_next()
    };
    let scenario = Scenario {
        shell: shell.clone(),
        gateways: vec![Gateway {
            name: "equator".into(),
            location: GeodeticPoint::new(0.0, 0.0, 0.0).unwrap(),
        }],
        horizon: 0.0,
        ..Scenario::default()
    };
    let snap = build_snapshot(&scenario, 0);
    let link = snap
        .links
        .iter()
        .find(|l| l.link_type == LinkType::SatGw)
        .ok_or("no overhead satellite-gateway link")?;
    let latency = propagation_latency(link.distance);
    if !(2.604e-3..=2.606e-3).contains(&latency) {
        return Err(format!("latency {latency}"));
    }
    let direct = distance(
        &geodetic_to_ecef(&GeodeticPoint::new(0.0, 0.0, 0.0).unwrap()),
        &geodetic_to_ecef(&GeodeticPoint::new(0.0, 0.0, 781e3).unwrap()),
    );
    if (direct - link.distance).abs() > 1e-6 {
        return Err(format!("overhead distance {} vs {direct}", link.distance));
    }

    let full = OrbitShell::iridium_next();
    let period = full.period();
    let mut worst: f64 = 0.0;
    for p in 0..full.plane_count {
        for s in 0..full.sats_per_plane {
            for t0 in [0.0, 1234.5] {
                let a = propagate_satellite(&full, p, s, t0).map_err(|e| e.to_string())?;
                let b = propagate_satellite(&full, p, s, t0 + period).map_err(|e| e.to_string())?;
                worst = worst.max(distance(&a, &b));
            }
        }
    }
    if worst > 1e-6 {
        return Err(format!("period return error {worst} m"));
    }
    Ok(format!(
        "overhead latency {:.5} ms, period {period:.1} s returns within {worst:.1e} m",
        latency * 1e3
    ))
}

fn poisson_sampler() -> Outcome {
    let lambda = 80.0;
    let n = 100_000;
    let mut rng = keyed_rng(2024, &[80]);
    let draws: Vec<u64> = (0..n)
        .map(|_| sample_task_arrivals(lambda, &mut rng))
        .collect();
    let mean = draws.iter().sum::<u64>() as f64 / n as f64;
    if !(79.5..=80.5).contains(&mean) {
        return Err(format!("mean {mean}"));
    }
    // pool tails so every bin expects at least 5 draws
    let pois = Poisson::new(lambda).unwrap();
    let nf = n as f64;
    let lo = (0..).find(|&k| pois.cdf(k) * nf >= 5.0).unwrap();
    let hi = (lo..).find(|&k| pois.sf(k) * nf < 5.0).unwrap();
    let mut probs = vec![pois.cdf(lo)];
    probs.extend((lo + 1..hi).map(|k| pois.pmf(k)));
    probs.push(pois.sf(hi - 1));
    let mut observed = vec![0.0; probs.len()];
    for &k in &draws {
        let bin = if k <= lo {
            0
        } else if k >= hi {
            probs.len() - 1
        } else {
            (k - lo) as usize
        };
        observed[bin] += 1.0;
    }
    let stat: f64 = observed
        .iter()
        .zip(&probs)
        .map(|(o, p)| (o - nf * p).powi(2) / (nf * p))
        .sum();
    let dof = (probs.len() - 1) as f64;
    let critical = ChiSquared::new(dof).unwrap().inverse_cdf(0.99);
    if stat > critical {
        return Err(format!("chi-squared {stat:.1} > {critical:.1} ({dof} dof)"));
    }
    Ok(format!(
        "mean {mean:.3}, chi-squared {stat:.1} <= {critical:.1} at alpha 0.01 ({dof} dof)"
    ))
}

fn determinism() -> Outcome {
    let mut bytes = 0;
    for uc in [UseCase::Airborne, UseCase::Offload] {
        let sc = desk(3, 0.4);
        let csv = |jobs: usize| -> Result<String, String> {
            let opts = RunOptions {
                jobs,
                keep_instances: false,
            };
            let s = run_static(&sc, uc, &opts).map_err(|e| e.to_string())?;
            let d = run_dynamic(&sc, uc, &opts).map_err(|e| e.to_string())?;
            Ok(metrics_csv(&[&s, &d]))
        };
        let one = csv(1)?;
        let four = csv(4)?;
        let again = csv(4)?;
        if one != four || four != again {
            return Err(format!("{uc}: metrics CSV differs between runs"));
        }
        bytes += one.len();
    }
    Ok(format!(
        "metrics CSVs identical for jobs 1 and 4 ({bytes} bytes)"
    ))
}

fn bandwidth_direction() -> Outcome {
    let mut lines = Vec::new();
    for seed in SEEDS {
        let sc = Scenario {
            lambdas: vec![80.0],
            ..desk(seed, 0.0)
        };
        let points = sweep_mec_ratio(&sc, &[0.0, 0.4], UseCase::Offload, &keep())
            .map_err(|e| e.to_string())?;
        let (base, aerial) = (&points[0], &points[1]);
        let (b0, b4) = (base.metrics.total_bandwidth, aerial.metrics.total_bandwidth);
        if b4 > b0 {
            return Err(format!("seed {seed}: {b4} bit/s at 0.4 > {b0} bit/s at 0"));
        }
        if b4 == b0 {
            let dests = |r: &RunResult| {
                r.snapshots
                    .iter()
                    .flat_map(|s| {
                        s.records
                            .iter()
                            .map(|c| (s.index, c.id.clone(), c.destination))
                    })
                    .collect::<Vec<_>>()
            };
            if dests(&base.result) != dests(&aerial.result) {
                return Err(format!(
                    "seed {seed}: equal bandwidth although destinations changed"
                ));
            }
        }
        lines.push(format!("{:.2}%", 100.0 * (b0 - b4) / b0));
    }
    Ok(format!(
        "bandwidth reduction at ratio 0.4 vs 0, seeds 1..5: {}",
        lines.join(", ")
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("oracle equivalence", oracle_equivalence),
        ("constraint validator", validator_clean),
        ("static vs dynamic dominance", dominance),
        ("MEC-ratio monotonicity", ratio_monotonicity),
        ("table round-trips", table_roundtrips),
        ("physics sanity", physics),
        ("Poisson sampler", poisson_sampler),
        ("determinism", determinism),
        ("bandwidth reduction direction", bandwidth_direction),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} ({name}): PASS - {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL - {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
