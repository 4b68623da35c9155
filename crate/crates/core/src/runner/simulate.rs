//! Seeded simulation study over scenarios x methods x replicates.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, SCHEMA_VERSION};
use super::format::fmt_sig6;
use super::plot::emit_plots;
use crate::error::{Error, Result};
use crate::estimators::{select, FitOptions, Method, SelectorSpec};
use crate::metrics::{eval_selection, fd_tp_curve, FdTpCurve, ReplicateEval};
use crate::simdata::{derive_seed, generate, ScenarioConfig, SimulatedDataset};
use crate::solver::standardize;

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateRow {
    pub scenario_index: usize,
    pub method_index: usize,
    pub replicate: usize,
    pub eval: ReplicateEval,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FailureRow {
    pub scenario_index: usize,
    pub method_index: usize,
    pub replicate: usize,
    pub kind: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub scenario_index: usize,
    pub method_index: usize,
    pub curve: FdTpCurve,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub scenario_index: usize,
    pub method_index: usize,
    pub replicates_ok: usize,
    pub mean_r: f64,
    pub mean_v: f64,
    pub mean_s: f64,
    pub fdr: f64,
    pub power: f64,
    pub mean_nmp: f64,
    pub mean_wall_time: f64,
}

/// Everything a simulation run produced, in deterministic order.
#[derive(Debug, Clone)]
pub struct SimulationReport {
    pub scenarios: Vec<ScenarioConfig>,
    pub methods: Vec<SelectorSpec>,
    pub labels: Vec<String>,
    pub rows: Vec<ReplicateRow>,
    pub failures: Vec<FailureRow>,
    pub curves: Vec<CurveRow>,
    pub output_dir: Option<PathBuf>,
    pub files: Vec<String>,
}

impl SimulationReport {
    pub fn not_converged(&self) -> usize {
        self.failures.iter().filter(|f| f.kind == "not_converged").count()
    }

    pub fn aggregate(&self) -> Vec<AggregateRow> {
        let mut out = Vec::new();
        for s in 0..self.scenarios.len() {
            for m in 0..self.methods.len() {
                let rows: Vec<&ReplicateRow> = self
                    .rows
                    .iter()
                    .filter(|r| r.scenario_index == s && r.method_index == m)
                    .collect();
                let k = rows.len();
                let mean = |f: &dyn Fn(&ReplicateRow) -> f64| {
                    if k == 0 {
                        f64::NAN
                    } else {
                        rows.iter().map(|r| f(r)).sum::<f64>() / k as f64
                    }
                };
                out.push(AggregateRow {
                    scenario_index: s,
                    method_index: m,
                    replicates_ok: k,
                    mean_r: mean(&|r| r.eval.r as f64),
                    mean_v: mean(&|r| r.eval.v as f64),
                    mean_s: mean(&|r| r.eval.s as f64),
                    fdr: mean(&|r| r.eval.fdp),
                    power: mean(&|r| r.eval.tpp),
                    mean_nmp: mean(&|r| r.eval.nmp as f64),
                    mean_wall_time: mean(&|r| r.wall_time),
                });
            }
        }
        out
    }

    /// Aggregate entry for the first spec using `method` in scenario `s`.
    pub fn mean_for(&self, s: usize, method: Method) -> Option<AggregateRow> {
        let m = self.methods.iter().position(|x| x.method == method)?;
        self.aggregate()
            .into_iter()
            .find(|a| a.scenario_index == s && a.method_index == m)
    }

    /// Per-scenario mean wall time of LAD over rL.
    pub fn timing_ratios(&self) -> Vec<(usize, f64)> {
        (0..self.scenarios.len())
            .filter_map(|s| {
                let lad = self.mean_for(s, Method::LadLasso)?;
                let rl = self.mean_for(s, Method::RankLasso)?;
                Some((s, lad.mean_wall_time / rl.mean_wall_time))
            })
            .collect()
    }
}

/// Labels used in the output files; repeated methods get a `_k` suffix.
pub fn method_labels(methods: &[SelectorSpec]) -> Vec<String> {
    methods
        .iter()
        .enumerate()
        .map(|(k, spec)| {
            let dup = methods.iter().filter(|m| m.method == spec.method).count() > 1;
            if dup {
                format!("{}_{k}", spec.method.label())
            } else {
                spec.method.label().to_string()
            }
        })
        .collect()
}

pub fn dataset_seed(master: u64, scenario_index: usize, replicate: usize) -> u64 {
    derive_seed(master, &[0, scenario_index as u64, replicate as u64])
}

pub fn method_seed(master: u64, scenario_index: usize, method_index: usize, replicate: usize) -> u64 {
    derive_seed(
        master,
        &[1, scenario_index as u64, method_index as u64, replicate as u64],
    )
}

/// Dataset for one replicate with a standardized design.
pub fn replicate_dataset(
    scenario: &ScenarioConfig,
    master: u64,
    scenario_index: usize,
    replicate: usize,
) -> Result<SimulatedDataset> {
    let mut cfg = *scenario;
    cfg.seed = dataset_seed(master, scenario_index, replicate);
    let mut data = generate(&cfg)?;
    if !data.x.is_standardized() {
        data.x = standardize(&data.x)?;
    }
    Ok(data)
}

fn failure_kind(e: &Error) -> &'static str {
    match e {
        Error::NotConverged { .. } => "not_converged",
        Error::Data(_) | Error::DegenerateColumn { .. } => "data",
        Error::InvalidInput(_) | Error::InvalidFolds(_) => "invalid_input",
        _ => "other",
    }
}

struct TaskOutput {
    rows: Vec<ReplicateRow>,
    failures: Vec<FailureRow>,
    curves: Vec<CurveRow>,
}

fn run_task(cfg: &ExperimentConfig, opts: &FitOptions, s: usize, r: usize) -> TaskOutput {
    let mut out = TaskOutput {
        rows: Vec::new(),
        failures: Vec::new(),
        curves: Vec::new(),
    };
    let scenario = &cfg.scenarios[s];
    let data = match replicate_dataset(scenario, cfg.master_seed, s, r) {
        Ok(d) => d,
        Err(e) => {
            for m in 0..cfg.methods.len() {
                out.failures.push(FailureRow {
                    scenario_index: s,
                    method_index: m,
                    replicate: r,
                    kind: failure_kind(&e),
                    message: e.to_string(),
                });
            }
            return out;
        }
    };
    for (m, spec) in cfg.methods.iter().enumerate() {
        let spec = spec.with_seed(method_seed(cfg.master_seed, s, m, r));
        let start = Instant::now();
        let fit = select(&data.x, &data.y, &spec, opts);
        let wall_time = start.elapsed().as_secs_f64();
        match fit {
            Ok(fit) => {
                out.rows.push(ReplicateRow {
                    scenario_index: s,
                    method_index: m,
                    replicate: r,
                    eval: eval_selection(&fit.support, &data.support, scenario.p0),
                    wall_time,
                });
                if r == cfg.fdtp_replicate {
                    out.curves.push(CurveRow {
                        scenario_index: s,
                        method_index: m,
                        curve: fd_tp_curve(&fit.coefficients, &data.support),
                    });
                }
            }
            Err(e) => {
                log::warn!(
                    "scenario {s} method {} replicate {r}: {e}",
                    spec.method.label()
                );
                out.failures.push(FailureRow {
                    scenario_index: s,
                    method_index: m,
                    replicate: r,
                    kind: failure_kind(&e),
                    message: e.to_string(),
                });
            }
        }
    }
    out
}

/// Runs every (scenario, replicate) task without touching the filesystem.
pub fn simulate(cfg: &ExperimentConfig) -> Result<SimulationReport> {
    cfg.validate()?;
    let opts = cfg.solver.fit_options();
    let tasks: Vec<(usize, usize)> = (0..cfg.scenarios.len())
        .flat_map(|s| (0..cfg.replicates).map(move |r| (s, r)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| Error::Config(format!("parallelism: {e}")))?;
    let outputs: Vec<TaskOutput> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(s, r)| run_task(cfg, &opts, s, r))
            .collect()
    });
    let mut report = SimulationReport {
        scenarios: cfg.scenarios.clone(),
        methods: cfg.methods.clone(),
        labels: method_labels(&cfg.methods),
        rows: Vec::new(),
        failures: Vec::new(),
        curves: Vec::new(),
        output_dir: None,
        files: Vec::new(),
    };
    for o in outputs {
        report.rows.extend(o.rows);
        report.failures.extend(o.failures);
        report.curves.extend(o.curves);
    }
    // task order is scenario-major; present rows method-major within a scenario
    report
        .rows
        .sort_by_key(|r| (r.scenario_index, r.method_index, r.replicate));
    report
        .failures
        .sort_by_key(|f| (f.scenario_index, f.method_index, f.replicate));
    Ok(report)
}

fn scenario_cols(s: &ScenarioConfig) -> String {
    format!("{},{},{},{}", s.scenario, s.n, s.p, s.p0)
}

pub fn replicates_csv(rep: &SimulationReport) -> String {
    let mut out = String::from("scenario,n,p,p0,method,replicate,R,V,S,FDP,TPP,NMP\n");
    for r in &rep.rows {
        let e = &r.eval;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            scenario_cols(&rep.scenarios[r.scenario_index]),
            rep.labels[r.method_index],
            r.replicate,
            e.r,
            e.v,
            e.s,
            fmt_sig6(e.fdp),
            fmt_sig6(e.tpp),
            e.nmp
        )
        .unwrap();
    }
    out
}

pub fn aggregate_csv(rep: &SimulationReport) -> String {
    let mut out = String::from(
        "scenario,n,p,p0,method,replicates_ok,mean_R,mean_V,mean_S,FDR,Power,mean_NMP\n",
    );
    for a in rep.aggregate() {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            scenario_cols(&rep.scenarios[a.scenario_index]),
            rep.labels[a.method_index],
            a.replicates_ok,
            fmt_sig6(a.mean_r),
            fmt_sig6(a.mean_v),
            fmt_sig6(a.mean_s),
            fmt_sig6(a.fdr),
            fmt_sig6(a.power),
            fmt_sig6(a.mean_nmp)
        )
        .unwrap();
    }
    out
}

pub fn timings_csv(rep: &SimulationReport) -> String {
    let mut out = String::from("scenario,n,p,p0,method,replicate,wall_time\n");
    for r in &rep.rows {
        writeln!(
            out,
            "{},{},{},{}",
            scenario_cols(&rep.scenarios[r.scenario_index]),
            rep.labels[r.method_index],
            r.replicate,
            fmt_sig6(r.wall_time)
        )
        .unwrap();
    }
    out
}

pub fn timing_ratio_csv(rep: &SimulationReport) -> String {
    let mut out = String::from("scenario,n,p,p0,mean_time_rL,mean_time_LAD,ratio\n");
    for (s, ratio) in rep.timing_ratios() {
        let rl = rep.mean_for(s, Method::RankLasso).unwrap();
        let lad = rep.mean_for(s, Method::LadLasso).unwrap();
        writeln!(
            out,
            "{},{},{},{}",
            scenario_cols(&rep.scenarios[s]),
            fmt_sig6(rl.mean_wall_time),
            fmt_sig6(lad.mean_wall_time),
            fmt_sig6(ratio)
        )
        .unwrap();
    }
    out
}

pub fn fdtp_csv(rep: &SimulationReport) -> String {
    let mut out = String::from("scenario_index,scenario,n,p,p0,method,k,tp,fd\n");
    for c in &rep.curves {
        for (k, &(tp, fd)) in c.curve.points.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                c.scenario_index,
                scenario_cols(&rep.scenarios[c.scenario_index]),
                rep.labels[c.method_index],
                k + 1,
                tp,
                fd
            )
            .unwrap();
        }
    }
    out
}

pub fn failures_csv(rep: &SimulationReport) -> String {
    let mut out = String::from("scenario,n,p,p0,method,replicate,kind,message\n");
    for f in &rep.failures {
        writeln!(
            out,
            "{},{},{},{},\"{}\"",
            scenario_cols(&rep.scenarios[f.scenario_index]),
            rep.labels[f.method_index],
            f.replicate,
            f.kind,
            f.message.replace('"', "\"\"")
        )
        .unwrap();
    }
    out
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    schema_version: u32,
    config_sha256: String,
    master_seed: u64,
    replicates: usize,
    rows: usize,
    failures: usize,
    not_converged: usize,
    /// Excluded from reproducibility comparisons.
    timing_files: [&'static str; 2],
    files: &'a [String],
}

pub(crate) fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))
}

/// Runs the study and writes CSVs, SVGs and `manifest.json` to the
/// configured output directory.
pub fn run_simulation(cfg: &ExperimentConfig) -> Result<SimulationReport> {
    let dir = cfg.output_dir();
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut rep = simulate(cfg)?;
    write_file(&dir, "replicates.csv", &replicates_csv(&rep))?;
    write_file(&dir, "aggregate.csv", &aggregate_csv(&rep))?;
    write_file(&dir, "fdtp.csv", &fdtp_csv(&rep))?;
    write_file(&dir, "failures.csv", &failures_csv(&rep))?;
    write_file(&dir, "timings.csv", &timings_csv(&rep))?;
    write_file(&dir, "timing_ratio.csv", &timing_ratio_csv(&rep))?;
    let mut files: BTreeSet<String> = [
        "replicates.csv",
        "aggregate.csv",
        "fdtp.csv",
        "failures.csv",
        "timings.csv",
        "timing_ratio.csv",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    files.extend(emit_plots(&dir, &dir)?);
    let files: Vec<String> = files.into_iter().collect();
    let manifest = Manifest {
        tool: "ranklasso",
        version: env!("CARGO_PKG_VERSION"),
        schema_version: SCHEMA_VERSION,
        config_sha256: cfg.content_hash(),
        master_seed: cfg.master_seed,
        replicates: cfg.replicates,
        rows: rep.rows.len(),
        failures: rep.failures.len(),
        not_converged: rep.not_converged(),
        timing_files: ["timings.csv", "timing_ratio.csv"],
        files: &files,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    write_file(&dir, "manifest.json", &json)?;
    log::info!(
        "wrote {} files to {} ({} rows, {} failures)",
        files.len() + 1,
        dir.display(),
        rep.rows.len(),
        rep.failures.len()
    );
    rep.files = files;
    rep.output_dir = Some(dir);
    Ok(rep)
}
