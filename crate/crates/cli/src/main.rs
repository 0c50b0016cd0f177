//! `aamec`: run airborne and offloading experiments, validate dumped
//! solutions, export snapshots.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aamec::config::{desk_scenario_text, emit_scenario, parse_scenario};
use aamec::experiments::{
    monotonicity_violations, run_dynamic, run_static, Mode, RunOptions, RunResult, SnapshotStatus,
    SweepPoint,
};
use aamec::optimizer::{validate_solution, ProblemInstance, Solution, UseCase};
use aamec::report::{
    compare, metrics_csv, plot_data, run_label, summarize_run, timings_csv, Summary,
};
use aamec::topology::{build_snapshot, Scenario};
use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_CONFIG: u8 = 1;
const EXIT_PARTIAL: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "aamec",
    version,
    about = "Aerial-aided MEC simulator and exact optimizer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Route IFECS flows from aircraft to MEC servers.
    Airborne(RunArgs),
    /// Offload satellite tasks beyond onboard capacity to MEC servers.
    Offload(OffloadArgs),
    /// Check a dumped solution against its instance.
    Validate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Write one snapshot of a scenario as JSON.
    ExportSnapshot {
        #[arg(long)]
        scenario: PathBuf,
        /// snapshot index
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the built-in desk scenario.
    ExampleScenario,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Dynamic,
    Static,
    Both,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Dynamic)]
    mode: ModeArg,
    /// aerial MEC deployment ratios, e.g. 0,0.2,0.4; defaults to the
    /// scenario's mec_aircraft_ratio
    #[arg(long, value_delimiter = ',')]
    ratios: Option<Vec<f64>>,
    #[arg(long, env = "AAMEC_OUT_DIR", default_value = "aamec-out")]
    out: PathBuf,
    /// overrides the scenario seed
    #[arg(long)]
    seed: Option<u64>,
    /// worker threads (0 = all cores)
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long)]
    node_budget: Option<u64>,
    /// seconds per snapshot solve
    #[arg(long)]
    time_budget: Option<f64>,
    /// accept the first feasible assignment instead of proving optimality
    #[arg(long)]
    first_feasible: bool,
    /// write every solved instance and its solution as JSON
    #[arg(long)]
    dump_instances: bool,
}

#[derive(Args)]
struct OffloadArgs {
    #[command(flatten)]
    run: RunArgs,
    /// task arrival rates (tasks/s), e.g. 72,76,80
    #[arg(long, value_delimiter = ',')]
    lambdas: Option<Vec<f64>>,
}

enum Failure {
    Config(anyhow::Error),
    Violation,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Config(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Airborne(args) => cmd_run(UseCase::Airborne, &args, None),
        Command::Offload(args) => cmd_run(UseCase::Offload, &args.run, args.lambdas.as_deref()),
        Command::Validate { instance, solution } => cmd_validate(&instance, &solution),
        Command::ExportSnapshot {
            scenario,
            index,
            out,
        } => cmd_export(&scenario, index, out.as_deref()).map(|_| 0),
        Command::ExampleScenario => {
            print!("{}", desk_scenario_text());
            Ok(0)
        }
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Violation) => ExitCode::from(EXIT_VIOLATION),
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn load_scenario(path: &Path) -> anyhow::Result<Scenario> {
    parse_scenario(path).with_context(|| format!("scenario {}", path.display()))
}

fn configure(
    use_case: UseCase,
    args: &RunArgs,
    lambdas: Option<&[f64]>,
) -> anyhow::Result<Scenario> {
    let mut s = load_scenario(&args.scenario)?;
    if let Some(seed) = args.seed {
        s.rng_seed = seed;
    }
    if let Some(r) = &args.ratios {
        if r.is_empty() {
            bail!("--ratios needs at least one value");
        }
        s.ratios = r.clone();
        s.mec_aircraft_ratio = r[0];
    }
    if let Some(l) = lambdas {
        s.lambdas = l.to_vec();
    }
    if let Some(b) = args.node_budget {
        s.limits.node_budget = b;
    }
    if let Some(t) = args.time_budget {
        s.limits.time_budget = t;
    }
    if args.first_feasible {
        s.limits.require_optimal = false;
    }
    if use_case == UseCase::Offload && s.lambdas.is_empty() {
        bail!("offloading needs at least one task arrival rate");
    }
    s.validate()?;
    Ok(s)
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn dump_instances(dir: &Path, run: &RunResult) -> anyhow::Result<()> {
    let dir = dir.join("instances").join(run_label(run));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    for s in &run.snapshots {
        if let (Some(p), Some(sol)) = (&s.instance, &s.solution) {
            write(&dir.join(format!("{}.instance.json", p.id)), &p.to_json())?;
            write(&dir.join(format!("{}.solution.json", p.id)), &sol.to_json())?;
        }
    }
    Ok(())
}

fn cmd_run(use_case: UseCase, args: &RunArgs, lambdas: Option<&[f64]>) -> Result<u8, Failure> {
    let scenario = configure(use_case, args, lambdas)?;
    let ratios = if args.ratios.is_some() {
        scenario.ratios.clone()
    } else {
        vec![scenario.mec_aircraft_ratio]
    };
    let modes: &[Mode] = match args.mode {
        ModeArg::Dynamic => &[Mode::Dynamic],
        ModeArg::Static => &[Mode::Static],
        ModeArg::Both => &[Mode::Static, Mode::Dynamic],
    };
    let options = RunOptions {
        jobs: args.jobs,
        keep_instances: args.dump_instances,
    };

    let out = &args.out;
    fs::create_dir_all(out.join("plot")).with_context(|| format!("creating {}", out.display()))?;
    write(
        &out.join("scenario.resolved.toml"),
        &emit_scenario(&scenario),
    )?;

    let mut runs: Vec<RunResult> = Vec::new();
    for &ratio in &ratios {
        let s = Scenario {
            mec_aircraft_ratio: ratio,
            ..scenario.clone()
        };
        for &mode in modes {
            let run = match mode {
                Mode::Dynamic => run_dynamic(&s, use_case, &options),
                Mode::Static => run_static(&s, use_case, &options),
            }
            .map_err(anyhow::Error::from)?;
            runs.push(run);
        }
    }

    let mut summary = Summary::new(use_case, scenario.rng_seed);
    for run in &runs {
        summary.runs.push(summarize_run(run));
        write(
            &out.join("plot").join(format!("{}.dat", run_label(run))),
            &plot_data(run),
        )?;
        if args.dump_instances {
            dump_instances(out, run)?;
        }
    }
    if modes.len() == 2 {
        for pair in runs.chunks(2) {
            summary.comparisons.push(compare(&pair[0], &pair[1]));
        }
    }
    // nested MEC sets only guarantee monotone objectives when re-optimizing
    let sweep: Vec<&RunResult> = runs.iter().filter(|r| r.mode == Mode::Dynamic).collect();
    for w in sweep.windows(2) {
        summary.comparisons.push(compare(w[0], w[1]));
    }

    let refs: Vec<&RunResult> = runs.iter().collect();
    write(&out.join("metrics.csv"), &metrics_csv(&refs))?;
    write(&out.join("summary.json"), &summary.to_json())?;
    write(&out.join("timings.csv"), &timings_csv(&refs))?;

    for r in &summary.runs {
        let m = &r.metrics;
        println!(
            "{:<14} solved {:>5}/{:<5} dropped {:>4} mean {:.6} s median {:.6} s aerial share {:.4} bandwidth {:.6e} bit/s",
            r.label,
            m.solved,
            m.commodities,
            m.dropped,
            m.overall.mean,
            m.overall.median,
            m.destination_shares.get("aerial").copied().unwrap_or(0.0),
            m.total_bandwidth
        );
    }
    for c in &summary.comparisons {
        println!(
            "{} -> {}: mean latency improvement {:.2}%, bandwidth {:.2}%, {} comparable snapshots, {} violations",
            c.base,
            c.new,
            100.0 * c.improvement.mean_latency,
            100.0 * c.improvement.total_bandwidth,
            c.comparable_snapshots,
            c.violations.len()
        );
    }
    if ratios.len() > 1 && modes.contains(&Mode::Dynamic) {
        let points: Vec<SweepPoint> = runs
            .iter()
            .filter(|r| r.mode == Mode::Dynamic)
            .map(|r| SweepPoint {
                ratio: r.mec_aircraft_ratio,
                result: r.clone(),
                metrics: aamec::experiments::aggregate_metrics(r),
            })
            .collect();
        let v = monotonicity_violations(&points);
        println!(
            "ratio monotonicity: {}",
            if v.is_empty() {
                "holds".to_string()
            } else {
                v.join("; ")
            }
        );
    }
    println!("artifacts in {}", out.display());

    let partial = runs
        .iter()
        .flat_map(|r| &r.snapshots)
        .filter(|s| s.status != SnapshotStatus::Optimal)
        .count();
    if partial > 0 {
        eprintln!("{partial} snapshot solve(s) infeasible or over budget");
        return Ok(EXIT_PARTIAL);
    }
    Ok(0)
}

fn cmd_validate(instance: &Path, solution: &Path) -> Result<u8, Failure> {
    let read = |p: &Path| fs::read_to_string(p).with_context(|| format!("reading {}", p.display()));
    let problem = ProblemInstance::from_json(&read(instance)?)
        .with_context(|| format!("malformed instance {}", instance.display()))?;
    let sol = Solution::from_json(&read(solution)?)
        .with_context(|| format!("malformed solution {}", solution.display()))?;
    if sol.instance_id != problem.id {
        return Err(Failure::Config(anyhow::anyhow!(
            "solution is for instance `{}` but {} holds `{}`",
            sol.instance_id,
            instance.display(),
            problem.id
        )));
    }
    let report = validate_solution(&problem, &sol);
    println!("{report}");
    if report.feasible {
        Ok(0)
    } else {
        for c in report.failed() {
            eprintln!("violated: {}", c.name);
        }
        Err(Failure::Violation)
    }
}

fn cmd_export(scenario: &Path, index: usize, out: Option<&Path>) -> Result<(), Failure> {
    let s = load_scenario(scenario)?;
    if index >= s.snapshot_count() {
        return Err(Failure::Config(anyhow::anyhow!(
            "snapshot {index} out of range (scenario has {})",
            s.snapshot_count()
        )));
    }
    let json = build_snapshot(&s, index).to_json();
    match out {
        Some(p) => write(p, &json)?,
        None => println!("{json}"),
    }
    Ok(())
}
