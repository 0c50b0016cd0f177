//! Machine-readable run artifacts: per-snapshot metrics CSV, a JSON summary
//! and whitespace-separated plot data.
//!
//! Nothing written here depends on wall time, so identical inputs produce
//! byte-identical files.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::experiments::{
    aggregate_metrics, comparable_snapshots, improvement, objective_violations, CommodityStatus,
    Improvement, Metrics, Mode, RunResult,
};
use crate::optimizer::UseCase;

/// Metrics CSV header; one row per snapshot × commodity class.
pub const CSV_COLUMNS: [&str; 15] = [
    "mode",
    "ratio",
    "lambda",
    "snapshot",
    "time_s",
    "class",
    "commodities",
    "solved",
    "dropped",
    "infeasible",
    "mean_latency_s",
    "median_latency_s",
    "max_latency_s",
    "bandwidth_bps",
    "status",
];

#[derive(Default)]
struct ClassRow {
    commodities: usize,
    solved: usize,
    dropped: usize,
    infeasible: usize,
    latencies: Vec<f64>,
    bandwidth: f64,
}

fn num(v: f64) -> String {
    format!("{v}")
}

/// Metrics CSV for several runs, in the order given.
pub fn metrics_csv(runs: &[&RunResult]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).expect("write to memory");
    for run in runs {
        for s in &run.snapshots {
            let mut rows: BTreeMap<&str, ClassRow> = BTreeMap::new();
            for r in &s.records {
                let row = rows.entry(r.class.as_str()).or_default();
                row.commodities += 1;
                match &r.status {
                    CommodityStatus::Solved => {
                        row.solved += 1;
                        if let Some(l) = r.latency {
                            row.latencies.push(l.total);
                        }
                        row.bandwidth += r.demand * r.hops as f64;
                    }
                    CommodityStatus::Dropped(_) => row.dropped += 1,
                    CommodityStatus::Infeasible => row.infeasible += 1,
                }
            }
            let status = serde_json::to_value(s.status)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default();
            for (class, mut row) in rows {
                row.latencies.sort_by(f64::total_cmp);
                let n = row.latencies.len();
                let (mean, median, max) = if n == 0 {
                    (String::new(), String::new(), String::new())
                } else {
                    let mean = row.latencies.iter().sum::<f64>() / n as f64;
                    let median = if n % 2 == 1 {
                        row.latencies[n / 2]
                    } else {
                        (row.latencies[n / 2 - 1] + row.latencies[n / 2]) / 2.0
                    };
                    (num(mean), num(median), num(row.latencies[n - 1]))
                };
                w.write_record([
                    run.mode.to_string(),
                    num(run.mec_aircraft_ratio),
                    s.lambda.map(num).unwrap_or_default(),
                    s.index.to_string(),
                    num(s.time),
                    class.to_string(),
                    row.commodities.to_string(),
                    row.solved.to_string(),
                    row.dropped.to_string(),
                    row.infeasible.to_string(),
                    mean,
                    median,
                    max,
                    num(row.bandwidth),
                    status.clone(),
                ])
                .expect("write to memory");
            }
        }
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
}

/// Columnar latency-vs-snapshot series for one run.
pub fn plot_data(run: &RunResult) -> String {
    let mut out =
        String::from("# snapshot time_s lambda objective_s mean_latency_s bandwidth_bps solved\n");
    for s in &run.snapshots {
        let lat: Vec<f64> = s
            .records
            .iter()
            .filter(|r| r.is_solved())
            .filter_map(|r| r.latency.map(|l| l.total))
            .collect();
        let mean = if lat.is_empty() {
            f64::NAN
        } else {
            lat.iter().sum::<f64>() / lat.len() as f64
        };
        out.push_str(&format!(
            "{} {} {} {} {} {} {}\n",
            s.index,
            s.time,
            s.lambda.map_or("-".to_string(), num),
            s.objective,
            mean,
            s.bandwidth,
            lat.len()
        ));
    }
    out
}

/// Wall-time per solve; kept apart from the deterministic artifacts.
pub fn timings_csv(runs: &[&RunResult]) -> String {
    let mut out = String::from("mode,ratio,lambda,snapshot,wall_time_s\n");
    for run in runs {
        for s in &run.snapshots {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                run.mode,
                run.mec_aircraft_ratio,
                s.lambda.map(num).unwrap_or_default(),
                s.index,
                s.wall_time
            ));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub label: String,
    pub mode: Mode,
    pub ratio: f64,
    pub snapshots: usize,
    pub complete: bool,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub base: String,
    pub new: String,
    pub improvement: Improvement,
    /// snapshots where both runs are optimal over the same commodities
    pub comparable_snapshots: usize,
    /// comparable snapshots where `new` has a larger objective than `base`
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub use_case: UseCase,
    pub seed: u64,
    pub runs: Vec<RunSummary>,
    pub comparisons: Vec<Comparison>,
}

pub fn run_label(run: &RunResult) -> String {
    format!("{}-r{}", run.mode, run.mec_aircraft_ratio)
}

pub fn summarize_run(run: &RunResult) -> RunSummary {
    RunSummary {
        label: run_label(run),
        mode: run.mode,
        ratio: run.mec_aircraft_ratio,
        snapshots: run.snapshots.len(),
        complete: run.is_complete(),
        metrics: aggregate_metrics(run),
    }
}

/// `new` is expected to be no worse than `base` snapshot by snapshot.
pub fn compare(base: &RunResult, new: &RunResult) -> Comparison {
    Comparison {
        base: run_label(base),
        new: run_label(new),
        improvement: improvement(&aggregate_metrics(base), &aggregate_metrics(new)),
        comparable_snapshots: comparable_snapshots(base, new),
        violations: objective_violations(base, new),
    }
}

impl Summary {
    pub fn new(use_case: UseCase, seed: u64) -> Self {
        Self {
            use_case,
            seed,
            runs: Vec::new(),
            comparisons: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}
