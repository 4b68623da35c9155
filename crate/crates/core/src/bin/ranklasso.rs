use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ranklasso::runner::config::{resolve_output_dir, ExperimentConfig, RealDataConfig, Screening};
use ranklasso::runner::{emit_plots, run_realdata, run_simulation};
use ranklasso::simdata::{dataset_to_csv, generate, ScenarioConfig};
use ranklasso::theory::{theory_report, Link, Noise, PopulationModel, TheorySettings};
use ranklasso::Error;

#[derive(Parser)]
#[command(name = "ranklasso", version, about = "Rank-based Lasso experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation study described by a TOML config.
    Simulate(SimulateArgs),
    /// Evaluate the selectors on a CSV data set with random train/test splits.
    Realdata(RealdataArgs),
    /// Monte-Carlo check of the population parameter on a Gaussian design.
    TheoryCheck(TheoryArgs),
    /// Re-render SVG plots from aggregate.csv / fdtp.csv.
    Plot(PlotArgs),
    /// Write one simulated data set as CSV (response in the last column).
    Generate(GenerateArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    master_seed: Option<u64>,
    #[arg(long)]
    parallelism: Option<usize>,
}

#[derive(Args)]
struct RealdataArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    n_screen: Option<usize>,
    #[arg(long)]
    splits: Option<usize>,
    #[arg(long)]
    train_size: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Screen by rank correlation instead of Pearson correlation.
    #[arg(long)]
    spearman: bool,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    parallelism: Option<usize>,
}

#[derive(Args)]
struct TheoryArgs {
    #[arg(long, default_value_t = 6)]
    p: usize,
    #[arg(long, default_value_t = 3)]
    p0: usize,
    #[arg(long, default_value_t = 0.3)]
    corr: f64,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 1_000_000)]
    n_mc: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3.0)]
    xi: f64,
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long)]
    input_dir: PathBuf,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    scenario: u8,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: usize,
    #[arg(long)]
    p0: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
}

fn simulate(a: SimulateArgs) -> Result<i32, Error> {
    let mut cfg = ExperimentConfig::load(&a.config)?;
    if let Some(d) = a.output_dir {
        cfg.output_dir = Some(d);
    }
    if let Some(r) = a.replicates {
        cfg.replicates = r;
    }
    if let Some(s) = a.master_seed {
        cfg.master_seed = s;
    }
    if let Some(p) = a.parallelism {
        cfg.parallelism = p;
    }
    cfg.validate()?;
    let rep = run_simulation(&cfg)?;
    println!(
        "{} rows, {} failures -> {}",
        rep.rows.len(),
        rep.failures.len(),
        cfg.output_dir().display()
    );
    Ok(if rep.not_converged() > 0 { 4 } else { 0 })
}

fn realdata(a: RealdataArgs) -> Result<i32, Error> {
    let mut cfg = match (&a.config, &a.csv, &a.target) {
        (Some(path), _, _) => RealDataConfig::load(path)?,
        (None, Some(csv), Some(t)) => RealDataConfig::new(csv, t),
        _ => {
            return Err(Error::Config(
                "either --config or both --csv and --target are required".into(),
            ))
        }
    };
    if let Some(v) = a.csv {
        cfg.csv_path = v;
    }
    if let Some(v) = a.target {
        cfg.target_column = v;
    }
    if let Some(v) = a.n_screen {
        cfg.n_screen = v;
    }
    if let Some(v) = a.splits {
        cfg.splits = v;
    }
    if let Some(v) = a.train_size {
        cfg.train_size = v;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if a.spearman {
        cfg.screening = Screening::Spearman;
    }
    if let Some(v) = a.output_dir {
        cfg.output_dir = Some(v);
    }
    if let Some(v) = a.parallelism {
        cfg.parallelism = v;
    }
    let rep = run_realdata(&cfg)?;
    for s in rep.summary() {
        println!(
            "{:<6} selected {:>7.2}  OPQ {:.4}  ({} splits)",
            s.label, s.mean_selected, s.mean_opq, s.splits_ok
        );
    }
    Ok(if rep.not_converged() > 0 { 4 } else { 0 })
}

fn theory(a: TheoryArgs) -> Result<i32, Error> {
    if a.p0 > a.p {
        return Err(Error::Config(format!("p0 = {} exceeds p = {}", a.p0, a.p)));
    }
    let beta: Vec<f64> = (0..a.p).map(|j| if j < a.p0 { 3.0 } else { 0.0 }).collect();
    let model = PopulationModel::equicorrelated(a.corr, beta)?;
    let settings = TheorySettings {
        n: a.n,
        n_mc: a.n_mc,
        seed: a.seed,
        xi: a.xi,
        q: a.q,
    };
    let cases = [
        ("linear", "gaussian", Link::Linear, Noise::Gaussian { sd: 1.0 }),
        ("linear", "cauchy", Link::Linear, Noise::Cauchy),
        ("exp", "gaussian", Link::Exp { intercept: 4.0, slope: 0.05 }, Noise::Gaussian { sd: 1.0 }),
        ("exp", "cauchy", Link::Exp { intercept: 4.0, slope: 0.05 }, Noise::Cauchy),
    ];
    let mut out = serde_json::Map::new();
    for (link_name, noise_name, link, noise) in cases {
        let r = theory_report(&model, link, noise, settings)?;
        println!(
            "{link_name:<6} {noise_name:<8} cos {:.5}  signs {:.2}  gamma {:.5} (se {:.2e})",
            r.cosine_similarity, r.sign_agreement, r.gamma_beta_hat, r.gamma_beta_std_error
        );
        out.insert(
            format!("{link_name}_{noise_name}"),
            serde_json::to_value(&r).expect("report serializes"),
        );
    }
    let dir = resolve_output_dir(a.output_dir.as_deref());
    std::fs::create_dir_all(&dir).map_err(|e| Error::Io {
        path: dir.display().to_string(),
        source: e,
    })?;
    let path = dir.join("theory.json");
    let text = serde_json::to_string_pretty(&out).expect("json") + "\n";
    std::fs::write(&path, text).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    Ok(0)
}

fn plot(a: PlotArgs) -> Result<i32, Error> {
    let out = a.output_dir.unwrap_or_else(|| a.input_dir.clone());
    let files = emit_plots(&a.input_dir, &out)?;
    println!("wrote {} plots to {}", files.len(), out.display());
    Ok(0)
}

fn generate_cmd(a: GenerateArgs) -> Result<i32, Error> {
    let cfg = ScenarioConfig::new(a.scenario, a.n, a.p, a.p0, a.seed);
    cfg.validate().map_err(|e| Error::Config(e.to_string()))?;
    let data = generate(&cfg)?;
    std::fs::write(&a.output, dataset_to_csv(&data)).map_err(|e| Error::Io {
        path: a.output.display().to_string(),
        source: e,
    })?;
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Realdata(a) => realdata(a),
        Command::TheoryCheck(a) => theory(a),
        Command::Plot(a) => plot(a),
        Command::Generate(a) => generate_cmd(a),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
