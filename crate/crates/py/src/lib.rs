//! Python bindings. Structured values cross the boundary as JSON or TOML
//! strings; scalars are plain floats and ints in SI units.

use aamec::config::{desk_scenario_text, emit_scenario, parse_scenario_str};
use aamec::demand::{flow_demand as core_flow_demand, processor_capacity as core_capacity};
use aamec::demand::{ProcessorSpec, Service, TaskModel, DEFAULT_PASSENGER_RATIO};
use aamec::experiments::{run_dynamic, run_static, snapshot_problem, RunOptions};
use aamec::geom;
use aamec::optimizer::{
    solve_exact, solve_oracle, validate_solution, ProblemInstance, Solution, UseCase,
};
use aamec::report::{compare, summarize_run, Summary};
use aamec::topology::build_snapshot;
use aamec::SolveError;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn use_case(name: &str) -> PyResult<UseCase> {
    match name {
        "airborne" => Ok(UseCase::Airborne),
        "offload" => Ok(UseCase::Offload),
        other => Err(PyValueError::new_err(format!(
            "use case must be `airborne` or `offload`, got `{other}`"
        ))),
    }
}

/// A resolved scenario.
#[pyclass(name = "Scenario", module = "aamec_py")]
struct PyScenario {
    inner: aamec::topology::Scenario,
}

#[pymethods]
impl PyScenario {
    /// Parse a TOML scenario document.
    #[new]
    fn new(toml: &str) -> PyResult<Self> {
        Ok(Self {
            inner: parse_scenario_str(toml).map_err(value_err)?,
        })
    }

    #[staticmethod]
    fn desk() -> Self {
        Self {
            inner: aamec::config::desk_scenario(),
        }
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.rng_seed
    }

    #[setter]
    fn set_seed(&mut self, seed: u64) {
        self.inner.rng_seed = seed;
    }

    #[getter]
    fn mec_aircraft_ratio(&self) -> f64 {
        self.inner.mec_aircraft_ratio
    }

    #[setter]
    fn set_mec_aircraft_ratio(&mut self, ratio: f64) -> PyResult<()> {
        let mut s = self.inner.clone();
        s.mec_aircraft_ratio = ratio;
        s.validate().map_err(value_err)?;
        self.inner = s;
        Ok(())
    }

    fn snapshot_count(&self) -> usize {
        self.inner.snapshot_count()
    }

    /// Fully resolved TOML.
    fn to_toml(&self) -> String {
        emit_scenario(&self.inner)
    }

    fn snapshot_json(&self, index: usize) -> PyResult<String> {
        if index >= self.inner.snapshot_count() {
            return Err(PyValueError::new_err(format!(
                "snapshot {index} out of range"
            )));
        }
        Ok(build_snapshot(&self.inner, index).to_json())
    }

    /// Instance JSON for one snapshot; `lambda_` only matters for offload.
    #[pyo3(signature = (index, use_case_name, lambda_ = 80.0))]
    fn problem_json(&self, index: usize, use_case_name: &str, lambda_: f64) -> PyResult<String> {
        if index >= self.inner.snapshot_count() {
            return Err(PyValueError::new_err(format!(
                "snapshot {index} out of range"
            )));
        }
        let snap = build_snapshot(&self.inner, index);
        let p = snapshot_problem(&self.inner, &snap, use_case(use_case_name)?, lambda_)
            .map_err(value_err)?;
        Ok(p.to_json())
    }

    /// Run one experiment and return its JSON summary. `mode` is
    /// `dynamic`, `static` or `both`.
    #[pyo3(signature = (use_case_name, mode = "dynamic", jobs = 0))]
    fn run(&self, use_case_name: &str, mode: &str, jobs: usize) -> PyResult<String> {
        let uc = use_case(use_case_name)?;
        let opts = RunOptions {
            jobs,
            keep_instances: false,
        };
        let err = |e: aamec::experiments::ExperimentError| PyRuntimeError::new_err(e.to_string());
        let mut summary = Summary::new(uc, self.inner.rng_seed);
        match mode {
            "dynamic" => {
                let d = run_dynamic(&self.inner, uc, &opts).map_err(err)?;
                summary.runs.push(summarize_run(&d));
            }
            "static" => {
                let s = run_static(&self.inner, uc, &opts).map_err(err)?;
                summary.runs.push(summarize_run(&s));
            }
            "both" => {
                let s = run_static(&self.inner, uc, &opts).map_err(err)?;
                let d = run_dynamic(&self.inner, uc, &opts).map_err(err)?;
                summary.runs.push(summarize_run(&s));
                summary.runs.push(summarize_run(&d));
                summary.comparisons.push(compare(&s, &d));
            }
            other => {
                return Err(PyValueError::new_err(format!(
                    "mode must be dynamic, static or both, got `{other}`"
                )))
            }
        }
        Ok(summary.to_json())
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario(satellites={}, gateways={}, flights={}, snapshots={}, seed={})",
            self.inner.shell.total_satellites(),
            self.inner.gateways.len(),
            self.inner.flights.len(),
            self.inner.snapshot_count(),
            self.inner.rng_seed
        )
    }
}

/// Aggregate demand of one default service on an aircraft, bits/s.
#[pyfunction]
#[pyo3(signature = (passengers, service, passenger_ratio = DEFAULT_PASSENGER_RATIO))]
fn flow_demand(passengers: u32, service: &str, passenger_ratio: f64) -> PyResult<f64> {
    let s = Service::defaults()
        .into_iter()
        .find(|s| s.name == service)
        .ok_or_else(|| PyValueError::new_err(format!("unknown service `{service}`")))?;
    Ok(core_flow_demand(passengers, passenger_ratio, &s))
}

/// (MIPS, tasks per second) for a processor under the default task model.
#[pyfunction]
#[pyo3(signature = (frequency_hz, ipc, cores, instructions_per_task = 25e6))]
fn processor_capacity(
    frequency_hz: f64,
    ipc: f64,
    cores: u32,
    instructions_per_task: f64,
) -> (f64, u64) {
    let spec = ProcessorSpec {
        freq: frequency_hz,
        ipc,
        cores,
    };
    let task = TaskModel {
        instructions: instructions_per_task,
        ..TaskModel::default()
    };
    core_capacity(&spec, &task)
}

/// One-way propagation latency in seconds over `distance_m` meters.
#[pyfunction]
fn propagation_latency(distance_m: f64) -> f64 {
    geom::propagation_latency(distance_m)
}

#[pyfunction]
fn desk_scenario_toml() -> &'static str {
    desk_scenario_text()
}

/// Solve an instance given as JSON; returns the solution as JSON.
#[pyfunction]
#[pyo3(signature = (instance_json, oracle = false))]
fn solve(instance_json: &str, oracle: bool) -> PyResult<String> {
    let p = ProblemInstance::from_json(instance_json).map_err(value_err)?;
    let limits = aamec::optimizer::SolveLimits::default();
    let out = if oracle {
        solve_oracle(&p)
    } else {
        solve_exact(&p, &limits)
    };
    match out {
        Ok(s) => Ok(s.to_json()),
        Err(SolveError::Infeasible) => Err(PyValueError::new_err("instance is infeasible")),
        Err(e) => Err(PyRuntimeError::new_err(e.to_string())),
    }
}

/// Validate a solution against its instance; returns (feasible, report JSON).
#[pyfunction]
fn validate(instance_json: &str, solution_json: &str) -> PyResult<(bool, String)> {
    let p = ProblemInstance::from_json(instance_json).map_err(value_err)?;
    let s = Solution::from_json(solution_json).map_err(value_err)?;
    let report = validate_solution(&p, &s);
    let json = serde_json::to_string_pretty(&report).map_err(value_err)?;
    Ok((report.feasible, json))
}

#[pymodule]
fn aamec_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add_function(wrap_pyfunction!(flow_demand, m)?)?;
    m.add_function(wrap_pyfunction!(processor_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(propagation_latency, m)?)?;
    m.add_function(wrap_pyfunction!(desk_scenario_toml, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add("SPEED_OF_LIGHT", geom::SPEED_OF_LIGHT)?;
    m.add("EARTH_RADIUS", geom::EARTH_RADIUS)?;
    Ok(())
}
