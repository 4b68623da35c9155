//! Train/test evaluation of the selectors on a CSV data set.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{RealDataConfig, Screening, SCHEMA_VERSION};
use super::format::fmt_sig6;
use super::simulate::{method_labels, write_file};
use crate::error::{Error, Result};
use crate::estimators::select;
use crate::metrics::opq;
use crate::rank::ranks;
use crate::simdata::{derive_seed, rng_for};
use crate::solver::{standardize, DesignMatrix};

const MISSING: [&str; 6] = ["", "NA", "NaN", "nan", "null", "NULL"];

/// Complete rows of a CSV file split into predictors and target.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvData {
    pub predictor_names: Vec<String>,
    pub x: DesignMatrix,
    pub y: Vec<f64>,
    pub rows_dropped: usize,
}

pub fn read_csv_data(path: &Path, target: &str) -> Result<CsvData> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    parse_csv_data(&text, target)
}

pub fn parse_csv_data(text: &str, target: &str) -> Result<CsvData> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Data(format!("header: {e}")))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let t = headers
        .iter()
        .position(|h| h == target)
        .ok_or_else(|| Error::Data(format!("target column '{target}' not found")))?;
    let p = headers.len() - 1;
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); p];
    let mut y = Vec::new();
    let mut dropped = 0;
    let mut fields = vec![0.0; headers.len()];
    for (k, rec) in rdr.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| Error::Data(format!("row {line}: {e}")))?;
        let mut missing = false;
        for (c, raw) in rec.iter().enumerate() {
            let v = raw.trim();
            if MISSING.contains(&v) {
                missing = true;
                continue;
            }
            fields[c] = v.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| {
                Error::Data(format!(
                    "row {line}, column {} ('{}'): cannot parse '{v}' as a number",
                    c + 1,
                    headers[c]
                ))
            })?;
        }
        if missing {
            dropped += 1;
            continue;
        }
        let mut j = 0;
        for (c, &v) in fields.iter().enumerate() {
            if c == t {
                y.push(v);
            } else {
                cols[j].push(v);
                j += 1;
            }
        }
    }
    let n = y.len();
    if n < 2 {
        return Err(Error::Data(format!(
            "only {n} complete rows ({dropped} dropped for missing values)"
        )));
    }
    if y.iter().all(|&v| v == y[0]) {
        return Err(Error::Data(format!(
            "target column '{target}' is constant; its ranks are all tied"
        )));
    }
    let predictor_names = headers
        .iter()
        .enumerate()
        .filter(|&(c, _)| c != t)
        .map(|(_, h)| h.clone())
        .collect();
    Ok(CsvData {
        predictor_names,
        x: DesignMatrix::from_column_major(n, p, cols.concat())?,
        y,
        rows_dropped: dropped,
    })
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return 0.0;
    }
    sab / (saa * sbb).sqrt()
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Columns that survive the optional filters and are not constant.
pub fn filter_columns(x: &DesignMatrix, max_below_quantile: Option<f64>, min_range: Option<f64>) -> Vec<usize> {
    let cut = max_below_quantile.map(|q| {
        let mut all: Vec<f64> = (0..x.p()).flat_map(|j| x.column(j).to_vec()).collect();
        all.sort_by(f64::total_cmp);
        quantile(&all, q)
    });
    (0..x.p())
        .filter(|&j| {
            let col = x.column(j);
            let max = col.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
            let min = col.iter().fold(f64::INFINITY, |m, &v| m.min(v));
            max > min
                && cut.map_or(true, |c| max >= c)
                && min_range.map_or(true, |r| max - min >= r)
        })
        .collect()
}

/// The `k` candidate columns most correlated with `y` in absolute value
/// (ties by index), returned in index order.
pub fn screen(x: &DesignMatrix, y: &[f64], candidates: &[usize], k: usize, method: Screening) -> Result<Vec<usize>> {
    let target: Vec<f64> = match method {
        Screening::Pearson => y.to_vec(),
        Screening::Spearman => ranks(y)?.into_iter().map(|r| r as f64).collect(),
    };
    let mut scored: Vec<(usize, f64)> = candidates
        .iter()
        .map(|&j| {
            let col = x.column(j);
            let c = match method {
                Screening::Pearson => pearson(col, &target),
                Screening::Spearman => {
                    let r: Vec<f64> = ranks(col)?.into_iter().map(|v| v as f64).collect();
                    pearson(&r, &target)
                }
            };
            Ok((j, c.abs()))
        })
        .collect::<Result<_>>()?;
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut keep: Vec<usize> = scored.into_iter().take(k).map(|(j, _)| j).collect();
    keep.sort_unstable();
    Ok(keep)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitRow {
    pub split: usize,
    pub method_index: usize,
    pub selected: usize,
    pub opq: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitFailure {
    pub split: usize,
    pub method_index: usize,
    pub message: String,
    pub not_converged: bool,
}

#[derive(Debug, Clone)]
pub struct RealDataReport {
    pub labels: Vec<String>,
    pub rows: Vec<SplitRow>,
    pub failures: Vec<SplitFailure>,
    pub n: usize,
    pub rows_dropped: usize,
    pub predictors_total: usize,
    pub predictors_filtered: usize,
    pub screened: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub label: String,
    pub splits_ok: usize,
    pub mean_selected: f64,
    pub mean_opq: f64,
}

impl RealDataReport {
    pub fn summary(&self) -> Vec<MethodSummary> {
        self.labels
            .iter()
            .enumerate()
            .map(|(m, label)| {
                let rows: Vec<&SplitRow> = self.rows.iter().filter(|r| r.method_index == m).collect();
                let k = rows.len();
                let mean = |f: &dyn Fn(&SplitRow) -> f64| {
                    if k == 0 {
                        f64::NAN
                    } else {
                        rows.iter().map(|r| f(r)).sum::<f64>() / k as f64
                    }
                };
                MethodSummary {
                    label: label.clone(),
                    splits_ok: k,
                    mean_selected: mean(&|r| r.selected as f64),
                    mean_opq: mean(&|r| r.opq),
                }
            })
            .collect()
    }

    pub fn not_converged(&self) -> usize {
        self.failures.iter().filter(|f| f.not_converged).count()
    }
}

/// Train rows first, then test rows, for split `k`.
pub fn split_indices(n: usize, train_size: usize, seed: u64, k: usize) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng_for(derive_seed(seed, &[2, k as u64]), 0));
    let mut train = idx[..train_size].to_vec();
    let mut test = idx[train_size..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

fn run_split(cfg: &RealDataConfig, x: &DesignMatrix, y: &[f64], k: usize) -> (Vec<SplitRow>, Vec<SplitFailure>) {
    let (train, test) = split_indices(x.n(), cfg.train_size, cfg.seed, k);
    let xtr = x.select_rows(&train);
    let ytr: Vec<f64> = train.iter().map(|&i| y[i]).collect();
    let yte: Vec<f64> = test.iter().map(|&i| y[i]).collect();
    // columns constant on this training half carry no information
    let live: Vec<usize> = (0..x.p())
        .filter(|&j| {
            let c = xtr.column(j);
            c.iter().any(|&v| v != c[0])
        })
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let prepared = standardize(&xtr.select_columns(&live)).and_then(|xs| {
        let xt = xs.apply_standardization(&x.select_rows(&test).select_columns(&live))?;
        Ok((xs, xt))
    });
    let (xs, xt) = match prepared {
        Ok(v) => v,
        Err(e) => {
            for m in 0..cfg.methods.len() {
                failures.push(SplitFailure {
                    split: k,
                    method_index: m,
                    message: e.to_string(),
                    not_converged: false,
                });
            }
            return (rows, failures);
        }
    };
    let opts = cfg.solver.fit_options();
    for (m, spec) in cfg.methods.iter().enumerate() {
        let spec = spec.with_seed(derive_seed(cfg.seed, &[3, k as u64, m as u64]));
        match select(&xs, &ytr, &spec, &opts).and_then(|fit| {
            let q = opq(&fit.coefficients, &xt, &yte)?;
            Ok((fit.support.len(), q))
        }) {
            Ok((selected, q)) => rows.push(SplitRow {
                split: k,
                method_index: m,
                selected,
                opq: q,
            }),
            Err(e) => failures.push(SplitFailure {
                split: k,
                method_index: m,
                not_converged: matches!(e, Error::NotConverged { .. }),
                message: e.to_string(),
            }),
        }
    }
    (rows, failures)
}

/// Screening and split evaluation on already-parsed data.
pub fn evaluate(cfg: &RealDataConfig, data: &CsvData) -> Result<RealDataReport> {
    cfg.validate()?;
    let n = data.y.len();
    if n < cfg.train_size + 2 {
        return Err(Error::Data(format!(
            "train_size = {} leaves fewer than 2 of the {n} complete rows for testing",
            cfg.train_size
        )));
    }
    let candidates = filter_columns(&data.x, cfg.max_below_quantile, cfg.min_range);
    if candidates.is_empty() {
        return Err(Error::Data("no predictor survives the filters".into()));
    }
    let keep = screen(&data.x, &data.y, &candidates, cfg.n_screen, cfg.screening)?;
    let x = data.x.select_columns(&keep);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| Error::Config(format!("parallelism: {e}")))?;
    let results: Vec<_> = pool.install(|| {
        (0..cfg.splits)
            .into_par_iter()
            .map(|k| run_split(cfg, &x, &data.y, k))
            .collect()
    });
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (r, f) in results {
        rows.extend(r);
        failures.extend(f);
    }
    Ok(RealDataReport {
        labels: method_labels(&cfg.methods),
        rows,
        failures,
        n,
        rows_dropped: data.rows_dropped,
        predictors_total: data.x.p(),
        predictors_filtered: candidates.len(),
        screened: keep.iter().map(|&j| data.predictor_names[j].clone()).collect(),
    })
}

pub fn splits_csv(rep: &RealDataReport) -> String {
    let mut out = String::from("split,method,selected,OPQ\n");
    for r in &rep.rows {
        writeln!(out, "{},{},{},{}", r.split, rep.labels[r.method_index], r.selected, fmt_sig6(r.opq)).unwrap();
    }
    out
}

pub fn summary_csv(rep: &RealDataReport) -> String {
    let mut out = String::from("method,splits_ok,mean_selected,mean_OPQ\n");
    for s in rep.summary() {
        writeln!(
            out,
            "{},{},{},{}",
            s.label,
            s.splits_ok,
            fmt_sig6(s.mean_selected),
            fmt_sig6(s.mean_opq)
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
    seed: u64,
    rows_used: usize,
    rows_dropped: usize,
    predictors_total: usize,
    predictors_after_filters: usize,
    predictors_screened: &'a [String],
    failures: Vec<String>,
}

/// Reads the CSV named in `cfg`, evaluates every split and writes
/// `realdata_splits.csv`, `realdata_summary.csv` and `realdata_manifest.json`.
pub fn run_realdata(cfg: &RealDataConfig) -> Result<RealDataReport> {
    cfg.validate()?;
    let data = read_csv_data(&cfg.csv_path, &cfg.target_column)?;
    if data.rows_dropped > 0 {
        log::warn!("dropped {} rows with missing values", data.rows_dropped);
    }
    let rep = evaluate(cfg, &data)?;
    let dir = cfg.output_dir();
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    write_file(&dir, "realdata_splits.csv", &splits_csv(&rep))?;
    write_file(&dir, "realdata_summary.csv", &summary_csv(&rep))?;
    let manifest = Manifest {
        tool: "ranklasso",
        version: env!("CARGO_PKG_VERSION"),
        schema_version: SCHEMA_VERSION,
        config_sha256: cfg.content_hash(),
        seed: cfg.seed,
        rows_used: rep.n,
        rows_dropped: rep.rows_dropped,
        predictors_total: rep.predictors_total,
        predictors_after_filters: rep.predictors_filtered,
        predictors_screened: &rep.screened,
        failures: rep
            .failures
            .iter()
            .map(|f| format!("split {} {}: {}", f.split, rep.labels[f.method_index], f.message))
            .collect(),
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    write_file(&dir, "realdata_manifest.json", &json)?;
    Ok(rep)
}
