use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use ldesvc_core::analytics::{
    compute_state_metrics, histogram, national_rollup, RollupRecord, StateMetrics,
    StateRollupInput,
};
use ldesvc_core::formulate::{
    build_baseline_lp, build_opportunity_lp, DispatchSolution, ModelMode, ObjectiveBreakdown,
};
use ldesvc_core::ingest::{
    build_candidates, cluster_generators, load_system, RunConfig, Season, StorageKind, SystemSpec,
};
use ldesvc_core::solve::{backend_by_name, Backend};
use ldesvc_core::sweep::{
    default_grid, max_viability, min_viable_capacity, refinement_grid, replacement_without_ldes,
    run_baseline, sweep_curve, viability_at, BaselineResult, ViabilityCurve,
};
use ldesvc_core::{Error, Result};

use crate::RunArgs;

const SCHEMA_VERSION: u32 = 1;
const DEFAULT_GRID_POINTS: usize = 40;
const REFINEMENT_POINTS: usize = 8;
const HISTOGRAM_BIN_KW: f64 = 50.0;

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

/// A state directory holds load.csv directly; a fleet directory holds one
/// subdirectory per state.
fn discover_states(input_dir: &Path, filter: &[String]) -> Result<Vec<(String, PathBuf)>> {
    if input_dir.join("load.csv").exists() {
        let name = input_dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "state".into());
        return Ok(vec![(name, input_dir.to_path_buf())]);
    }
    let mut states = Vec::new();
    let entries = fs::read_dir(input_dir).map_err(io_err(input_dir))?;
    for entry in entries {
        let entry = entry.map_err(io_err(input_dir))?;
        let path = entry.path();
        if path.is_dir() && path.join("load.csv").exists() {
            states.push((entry.file_name().to_string_lossy().into_owned(), path));
        }
    }
    states.sort();
    if !filter.is_empty() {
        states.retain(|(name, _)| filter.iter().any(|f| f == name));
        for wanted in filter {
            if !states.iter().any(|(name, _)| name == wanted) {
                return Err(Error::Validation(format!("state {wanted} not found under {}", input_dir.display())));
            }
        }
    }
    if states.is_empty() {
        return Err(Error::Validation(format!(
            "no state inputs under {} (expected load.csv or per-state subdirectories)",
            input_dir.display()
        )));
    }
    Ok(states)
}

fn load_state(dir: &Path, args: &RunArgs) -> Result<(RunConfig, SystemSpec)> {
    let config = RunConfig::from_dir(dir)?;
    let mut spec = load_system(dir, &config)?;
    if let Some(k) = config.cluster_k {
        spec.generators = cluster_generators(&spec.generators, k, args.seed)?;
        spec.validate()?;
    }
    let mut spec = build_candidates(&spec, &config.candidates)?;
    if args.duration_h.is_some() || args.rte.is_some() {
        for s in &mut spec.storages {
            if s.kind == StorageKind::Ldes {
                if let Some(d) = args.duration_h {
                    s.duration_h = d;
                }
                if let Some(r) = args.rte {
                    s.rte = r;
                }
            }
        }
        spec.validate()?;
    }
    Ok((config, spec))
}

pub fn cmd_validate(input_dir: &Path, states: &[String]) -> Result<u8> {
    let default_args = RunArgs {
        input_dir: input_dir.to_path_buf(),
        out: PathBuf::new(),
        states: states.to_vec(),
        grid: Vec::new(),
        duration_h: None,
        rte: None,
        seed: 0,
        backend: "microlp".into(),
        jobs: 1,
        export_lp: false,
    };
    for (name, dir) in discover_states(input_dir, states)? {
        let (_, spec) = load_state(&dir, &default_args)?;
        println!(
            "{name}: ok ({} hours, {} generators, {} storages, state {})",
            spec.horizon_h,
            spec.generators.len(),
            spec.storages.len(),
            spec.state
        );
    }
    Ok(0)
}

struct StateRun {
    name: String,
    spec: SystemSpec,
    baseline: BaselineResult,
    curve: ViabilityCurve,
    metrics: StateMetrics,
    no_ldes: (ObjectiveBreakdown, DispatchSolution),
    timings: BTreeMap<&'static str, f64>,
    digests: BTreeMap<String, String>,
}

#[derive(Debug, Serialize)]
struct FailureRecord {
    state: String,
    stage: &'static str,
    message: String,
    #[serde(skip)]
    code: u8,
}

fn timed<T>(timings: &mut BTreeMap<&'static str, f64>, stage: &'static str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    *timings.entry(stage).or_insert(0.0) += start.elapsed().as_secs_f64();
    out
}

fn input_digests(dir: &Path) -> Result<BTreeMap<String, String>> {
    let mut digests = BTreeMap::new();
    for file in ["load.csv", "generators.csv", "storages.csv", "profiles.csv", "config.toml"] {
        let path = dir.join(file);
        if !path.exists() {
            continue;
        }
        let bytes = fs::read(&path).map_err(io_err(&path))?;
        digests.insert(file.to_string(), format!("{:x}", Sha256::digest(&bytes)));
    }
    Ok(digests)
}

fn run_state(name: &str, dir: &Path, args: &RunArgs, backend: &dyn Backend) -> std::result::Result<StateRun, FailureRecord> {
    let fail = |stage: &'static str| {
        move |err: Error| FailureRecord {
            state: name.to_string(),
            stage,
            message: err.to_string(),
            code: crate::exit_code(&err),
        }
    };
    let mut timings = BTreeMap::new();

    let (spec, digests) = timed(&mut timings, "ingest", || -> Result<_> {
        let (_, spec) = load_state(dir, args)?;
        Ok((spec, input_digests(dir)?))
    })
    .map_err(fail("ingest"))?;

    let baseline = timed(&mut timings, "baseline", || run_baseline(&spec, backend))
        .map_err(fail("baseline"))?;

    let curve = timed(&mut timings, "sweep", || -> Result<ViabilityCurve> {
        let explicit = !args.grid.is_empty();
        let grid = if explicit { args.grid.clone() } else { default_grid(DEFAULT_GRID_POINTS) };
        let mut curve = parallel_sweep(&spec, &grid, &baseline, backend)?;
        if !explicit {
            let extra = refinement_grid(&curve, REFINEMENT_POINTS);
            if !extra.is_empty() {
                let more = parallel_sweep(&spec, &extra, &baseline, backend)?;
                let mut points = curve.points;
                points.extend(more.points);
                curve = ViabilityCurve::assemble(&spec.state, points, baseline.q_star)?;
            }
        }
        Ok(curve)
    })
    .map_err(fail("sweep"))?;

    let (metrics, no_ldes) = timed(&mut timings, "analytics", || -> Result<_> {
        let metrics = compute_state_metrics(&spec, &baseline, &curve);
        let no_ldes = replacement_without_ldes(&spec, baseline.q_star, backend)?;
        Ok((metrics, no_ldes))
    })
    .map_err(fail("analytics"))?;

    Ok(StateRun {
        name: name.to_string(),
        spec,
        baseline,
        curve,
        metrics,
        no_ldes,
        timings,
        digests,
    })
}

fn parallel_sweep(
    spec: &SystemSpec,
    grid: &[f64],
    baseline: &BaselineResult,
    backend: &dyn Backend,
) -> Result<ViabilityCurve> {
    if grid.is_empty() {
        return Err(Error::Argument("sweep grid is empty".into()));
    }
    if grid.len() == 1 {
        return sweep_curve(spec, grid, baseline, backend);
    }
    let points = grid
        .par_iter()
        .map(|&x| viability_at(spec, x, baseline.q_star, backend))
        .collect::<Result<Vec<_>>>()?;
    ViabilityCurve::assemble(&spec.state, points, baseline.q_star)
}

#[derive(Serialize)]
struct BaselineReport<'a> {
    schema_version: u32,
    state: &'a str,
    q_star: f64,
    thermal_capacity_mw: f64,
    breakdown: &'a ObjectiveBreakdown,
    shed_mwh: f64,
    surplus_mwh: f64,
    reserve_shortage_mwh: f64,
}

#[derive(Serialize)]
struct CurvePointOut {
    x_power_mw: f64,
    c_vc_per_kw: f64,
    avoided_cost: f64,
    q_over: f64,
}

#[derive(Serialize)]
struct CurveReport<'a> {
    schema_version: u32,
    state: &'a str,
    q_star: f64,
    points: Vec<CurvePointOut>,
    c_vc_max: f64,
    x_at_max_mw: f64,
    min_viable_mw: Option<f64>,
    alpha: Option<f64>,
    diagnostics: &'a [String],
}

#[derive(Serialize)]
struct MetricsReport<'a> {
    schema_version: u32,
    #[serde(flatten)]
    metrics: &'a StateMetrics,
}

#[derive(Serialize)]
struct RollupReport<'a> {
    schema_version: u32,
    #[serde(flatten)]
    rollup: &'a RollupRecord,
}

#[derive(Serialize)]
struct Manifest<'a> {
    schema_version: u32,
    tool_version: &'static str,
    backend: &'a str,
    seed: u64,
    jobs: usize,
    grid: &'a [f64],
    duration_h_override: Option<f64>,
    rte_override: Option<f64>,
    states: BTreeMap<&'a str, &'a BTreeMap<String, String>>,
    timings_s: BTreeMap<&'static str, f64>,
    failures: &'a [FailureRecord],
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Consistency(format!("{}: {e}", path.display())))?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(io_err(path))
}

fn season_name(season: Season) -> &'static str {
    match season {
        Season::Winter => "winter",
        Season::Spring => "spring",
        Season::Summer => "summer",
        Season::Fall => "fall",
    }
}

fn write_state_outputs(out: &Path, run: &StateRun, args: &RunArgs) -> Result<()> {
    let dir = out.join(&run.name);
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;

    write_json(
        &dir.join("baseline.json"),
        &BaselineReport {
            schema_version: SCHEMA_VERSION,
            state: &run.spec.state,
            q_star: run.baseline.q_star,
            thermal_capacity_mw: run.baseline.thermal_capacity_mw,
            breakdown: &run.baseline.breakdown,
            shed_mwh: run.baseline.dispatch.shed.iter().sum(),
            surplus_mwh: run.baseline.dispatch.surplus.iter().sum(),
            reserve_shortage_mwh: run.baseline.dispatch.reserve_shortage.iter().sum(),
        },
    )?;

    let max = max_viability(&run.curve);
    write_json(
        &dir.join("curve.json"),
        &CurveReport {
            schema_version: SCHEMA_VERSION,
            state: &run.spec.state,
            q_star: run.baseline.q_star,
            points: run
                .curve
                .points
                .iter()
                .map(|p| CurvePointOut {
                    x_power_mw: p.x_power_mw,
                    c_vc_per_kw: p.c_vc_per_kw,
                    avoided_cost: p.avoided_cost,
                    q_over: p.q_over,
                })
                .collect(),
            c_vc_max: max.c_vc_max_per_kw,
            x_at_max_mw: max.x_at_max_mw,
            min_viable_mw: min_viable_capacity(&run.curve).map(|m| m.x_power_mw),
            alpha: run.metrics.alpha,
            diagnostics: &run.curve.diagnostics,
        },
    )?;

    write_json(
        &dir.join("metrics.json"),
        &MetricsReport { schema_version: SCHEMA_VERSION, metrics: &run.metrics },
    )?;

    if args.export_lp {
        let model = build_baseline_lp(&run.spec)?;
        let mut buf = Vec::new();
        model.lp.export_lp(&mut buf).map_err(io_err(&dir))?;
        write_text(&dir.join("baseline.lp"), &String::from_utf8_lossy(&buf))?;

        let mode = ModelMode::opportunity(max.x_at_max_mw, run.baseline.q_star)?;
        let model = build_opportunity_lp(&run.spec, mode)?;
        let mut buf = Vec::new();
        model.lp.export_lp(&mut buf).map_err(io_err(&dir))?;
        write_text(&dir.join("opportunity_at_max.lp"), &String::from_utf8_lossy(&buf))?;
    }
    Ok(())
}

fn write_plot_csvs(out: &Path, runs: &[StateRun]) -> Result<()> {
    let mut curve_csv = String::from("state,x_power_mw,c_vc_per_kw,avoided_cost,q_over\n");
    for run in runs {
        for p in &run.curve.points {
            curve_csv.push_str(&format!(
                "{},{},{},{},{}\n",
                run.spec.state, p.x_power_mw, p.c_vc_per_kw, p.avoided_cost, p.q_over
            ));
        }
    }
    write_text(&out.join("curve_points.csv"), &curve_csv)?;

    let maxima: Vec<f64> = runs.iter().map(|r| max_viability(&r.curve).c_vc_max_per_kw).collect();
    let mut hist_csv = String::from("bin_start_per_kw,count\n");
    for bin in histogram(&maxima, HISTOGRAM_BIN_KW, 0.0) {
        hist_csv.push_str(&format!("{},{}\n", bin.bin_start, bin.count));
    }
    write_text(&out.join("histogram.csv"), &hist_csv)?;

    let mut seasonal_csv = String::from("state,season,ies_avg_cf,ies_rel_availability,ldes_soc_diff\n");
    for run in runs {
        for (&season, ies) in &run.metrics.seasonal_ies_availability {
            let soc = run
                .metrics
                .seasonal_soc_diff
                .as_ref()
                .and_then(|m| m.get(&season))
                .map(|v| v.to_string())
                .unwrap_or_default();
            seasonal_csv.push_str(&format!(
                "{},{},{},{},{}\n",
                run.spec.state,
                season_name(season),
                ies.avg_cf,
                ies.rel_availability,
                soc
            ));
        }
    }
    write_text(&out.join("seasonal.csv"), &seasonal_csv)
}

pub fn cmd_run(args: &RunArgs) -> Result<u8> {
    let backend = backend_by_name(&args.backend)?;
    let states = discover_states(&args.input_dir, &args.states)?;
    fs::create_dir_all(&args.out).map_err(io_err(&args.out))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.max(1))
        .build()
        .map_err(|e| Error::State(format!("thread pool: {e}")))?;
    let outcomes: Vec<std::result::Result<StateRun, FailureRecord>> = pool.install(|| {
        states
            .par_iter()
            .map(|(name, dir)| run_state(name, dir, args, backend.as_ref()))
            .collect()
    });

    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(run) => runs.push(run),
            Err(failure) => {
                eprintln!("{}: {} failed: {}", failure.state, failure.stage, failure.message);
                failures.push(failure);
            }
        }
    }

    let mut timings: BTreeMap<&'static str, f64> = BTreeMap::new();
    let write_start = Instant::now();
    for run in &runs {
        write_state_outputs(&args.out, run, args)?;
        for (&stage, &secs) in &run.timings {
            *timings.entry(stage).or_insert(0.0) += secs;
        }
        let max = max_viability(&run.curve);
        println!(
            "{}: q* = {:.3}, c_vc_max = {:.6} $/kW at {:.1} MW",
            run.spec.state, run.baseline.q_star, max.c_vc_max_per_kw, max.x_at_max_mw
        );
    }
    write_plot_csvs(&args.out, &runs)?;

    if states.len() > 1 && !runs.is_empty() {
        let inputs: Vec<StateRollupInput> = runs
            .iter()
            .map(|run| {
                let chosen = max_viability(&run.curve);
                StateRollupInput {
                    spec: &run.spec,
                    baseline: &run.baseline,
                    chosen: run
                        .curve
                        .points
                        .iter()
                        .find(|p| p.x_power_mw == chosen.x_at_max_mw)
                        .expect("argmax point is on the curve"),
                    without_ldes: Some((&run.no_ldes.0, &run.no_ldes.1)),
                }
            })
            .collect();
        let rollup = national_rollup(&inputs)?;
        write_json(
            &args.out.join("rollup.json"),
            &RollupReport { schema_version: SCHEMA_VERSION, rollup: &rollup },
        )?;
    }
    timings.insert("write", write_start.elapsed().as_secs_f64());

    write_json(
        &args.out.join("manifest.json"),
        &Manifest {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION"),
            backend: &args.backend,
            seed: args.seed,
            jobs: args.jobs,
            grid: &args.grid,
            duration_h_override: args.duration_h,
            rte_override: args.rte,
            states: runs.iter().map(|r| (r.name.as_str(), &r.digests)).collect(),
            timings_s: timings,
            failures: &failures,
        },
    )?;

    if failures.is_empty() {
        Ok(0)
    } else if failures.iter().any(|f| f.code == 3) {
        Ok(3)
    } else {
        Ok(failures[0].code)
    }
}
