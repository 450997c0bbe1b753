//! Command implementations. Every artifact is rendered fully in memory and
//! written once, so reruns with the same inputs produce identical files.

use std::fs;
use std::path::{Path, PathBuf};

use airmax::analysis::{
    lyapunov_values, ratio_csv, ratio_experiment, verify_run, Density, RatioSettings, DEFAULT_MEAN_DEGREE,
};
use airmax::engine::{
    run_batch, simulate_any, trace_csv, trace_json, AnyRun, Instance, NumericMode, SimulationConfig, TraceLevel,
};
use airmax::with_run;
use anyhow::{Context, Result};
use log::{info, warn};
use serde::Serialize;

use crate::scenario::{CheckKind, ConfigError, ScenarioFile};
use crate::{BatchArgs, NumericArg, Overrides, RatioArgs, RunArgs, Status, ValidateArgs};

const DEFAULT_OUT: &str = "out";

fn numeric_mode(arg: NumericArg) -> NumericMode {
    match arg {
        NumericArg::Exact => NumericMode::Exact,
        NumericArg::Float => NumericMode::float(),
    }
}

/// Loads the scenario and applies command-line overrides. Returns the output directory too.
fn load(common: &Overrides) -> Result<(ScenarioFile, PathBuf)> {
    let mut scenario = ScenarioFile::load(&common.scenario)?;
    let sim = &mut scenario.simulation;
    if let Some(seed) = common.seed {
        sim.seed = seed;
    }
    if let Some(numeric) = common.numeric {
        sim.numeric = numeric_mode(numeric);
    }
    if let Some(cap) = common.cap {
        sim.round_cap = Some(cap);
    }
    sim.validate().map_err(|e| ConfigError(e.to_string()))?;
    let out = common.out.clone().or_else(|| scenario.output.dir.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    Ok((scenario, out))
}

fn resolve(cfg: &SimulationConfig) -> Result<Instance> {
    Ok(cfg.resolve().map_err(|e| ConfigError(e.to_string()))?)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    info!("wrote {}", path.display());
    Ok(())
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write(dir, name, &text)
}

pub fn run(args: RunArgs) -> Result<Status> {
    let (mut scenario, out) = load(&args.common)?;
    if let Some(trace) = args.trace {
        scenario.simulation.trace_level = trace.into();
    }
    let instance = resolve(&scenario.simulation)?;
    let run = simulate_any(&instance)?;
    let mut outcome = run.outcome();
    if scenario.wants(CheckKind::Lyapunov) {
        outcome.lyapunov = Some(with_run!(&run, r => lyapunov_values(r)));
    }
    write_json(&out, "outcome.json", &outcome)?;

    // a capped run always leaves its partial trace behind
    if scenario.simulation.trace_level == TraceLevel::Full || !outcome.converged {
        write(&out, "trace.csv", &with_run!(&run, r => trace_csv(r)))?;
        write_json(&out, "trace.json", &with_run!(&run, r => trace_json(r)))?;
    }
    if scenario.wants(CheckKind::Invariants) {
        write_checks(&run, &out)?;
    }

    println!(
        "{} n={} converged={} rounds={} slots={}",
        outcome.protocol, outcome.n, outcome.converged, outcome.rounds, outcome.slots_used
    );
    Ok(if outcome.converged { Status::Done } else { Status::CapExhausted })
}

fn write_checks(run: &AnyRun, out: &Path) -> Result<()> {
    let protocol = with_run!(run, r => r.protocol);
    if !protocol.is_broadcast() {
        warn!("trace checks apply to broadcast protocols only; skipping checks.json");
        return Ok(());
    }
    let checks = with_run!(run, r => verify_run(r));
    if !checks.passed() {
        warn!("trace checks reported violations; see checks.json");
    }
    write_json(out, "checks.json", &checks)
}

pub fn batch(args: BatchArgs) -> Result<Status> {
    let (scenario, out) = load(&args.common)?;
    // surface configuration errors once instead of per trial
    if args.trials > 0 {
        resolve(&scenario.simulation)?;
    }
    let summary = run_batch(&scenario.simulation, args.trials);
    write_json(&out, "batch.json", &summary)?;

    let mut csv = String::from("trial,seed,converged,rounds,slots_used,error\n");
    for t in &summary.trials {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            t.trial,
            t.seed,
            t.converged,
            t.rounds,
            t.slots_used,
            t.error.as_deref().unwrap_or("").replace([',', '\n'], " ")
        ));
    }
    write(&out, "batch.csv", &csv)?;

    let agg = &summary.aggregate;
    println!(
        "{} trials={} converged={} failed={} rate={}",
        summary.protocol, agg.trials, agg.converged, agg.failed, agg.convergence_rate
    );
    Ok(Status::Done)
}

pub fn ratio(args: RatioArgs) -> Result<Status> {
    if args.sizes.is_empty() {
        return Err(ConfigError("sizes: at least one network size is required".into()).into());
    }
    let density = match (args.edge_probability, args.mean_degree) {
        (Some(p), _) => Density::Probability(p),
        (None, d) => Density::MeanDegree(d.unwrap_or(DEFAULT_MEAN_DEGREE)),
    };
    let settings = RatioSettings {
        sizes: args.sizes,
        trials: args.trials,
        density,
        seed: args.seed,
        numeric: numeric_mode(args.numeric),
        broadcast: args.protocol,
        ..RatioSettings::default()
    };
    let study = ratio_experiment(&settings).map_err(|e| match e {
        airmax::Error::Config(_)
        | airmax::Error::EdgeProbability(_)
        | airmax::Error::TooFewAgents { .. }
        | airmax::Error::EmptyNetwork
        | airmax::Error::RetryCapExceeded { .. } => anyhow::Error::new(ConfigError(e.to_string())),
        other => anyhow::Error::new(other),
    })?;
    write(&args.out, "ratio.csv", &ratio_csv(&study.results))?;
    write_json(&args.out, "ratio.json", &study.summary())?;

    for agg in &study.aggregates {
        match &agg.r {
            Some(q) => println!("n={} median_r={} kept={}/{}", agg.n, q.median, agg.trials - agg.excluded, agg.trials),
            None => println!("n={} no usable trials", agg.n),
        }
    }
    Ok(Status::Done)
}

pub fn validate(args: ValidateArgs) -> Result<Status> {
    let scenario = ScenarioFile::load(&args.scenario)?;
    let instance = resolve(&scenario.simulation)?;
    println!(
        "ok: {} n={} edges={} round_cap={} numeric={}",
        instance.protocol,
        instance.topology.n(),
        instance.topology.edge_count(),
        instance.round_cap,
        instance.numeric.name()
    );
    Ok(Status::Done)
}
