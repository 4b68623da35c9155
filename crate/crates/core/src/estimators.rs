//! Selection procedures built on the two solvers.
//!
//! | label  | procedure                                                        |
//! |--------|------------------------------------------------------------------|
//! | `rL`   | Lasso on centered ranks, `lambda = 0.3 sqrt(log p / n)`           |
//! | `arL`  | weighted rank Lasso at `2 lambda_rL`, weights from an `rL` fit    |
//! | `thrL` | cross-validated rank Lasso cut down to the `arL` model size       |
//! | `LAD`  | LAD-Lasso, `lambda = 1.5 sqrt(log p / n)`                         |
//! | `cv`   | plain Lasso on the raw response, lambda by cross-validation       |
//! | `cvrL` | rank Lasso, lambda by cross-validation                            |

use std::fmt;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lad::{default_lad_lambda, fit_lad_lasso, LadOptions};
use crate::rank::{centered_ranks, ecdf_sorted};
use crate::simdata::rng_for;
use crate::solver::{
    fit_weighted_lasso, lambda_max, lambda_path, DesignMatrix, FitResult, PenaltySpec,
    SolverOptions,
};

const CV_GRID_POINTS: usize = 100;
const CV_GRID_DECADES: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "rL")]
    RankLasso,
    #[serde(rename = "arL")]
    AdaptiveRankLasso,
    #[serde(rename = "thrL")]
    ThresholdedRankLasso,
    #[serde(rename = "LAD")]
    LadLasso,
    #[serde(rename = "cv")]
    CvLasso,
    #[serde(rename = "cvrL")]
    CvRankLasso,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::RankLasso,
        Method::AdaptiveRankLasso,
        Method::ThresholdedRankLasso,
        Method::LadLasso,
        Method::CvLasso,
        Method::CvRankLasso,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Method::RankLasso => "rL",
            Method::AdaptiveRankLasso => "arL",
            Method::ThresholdedRankLasso => "thrL",
            Method::LadLasso => "LAD",
            Method::CvLasso => "cv",
            Method::CvRankLasso => "cvrL",
        }
    }

    pub fn from_label(s: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.label() == s)
    }

    /// True for the methods that only see the response through its ranks.
    pub fn is_rank_based(self) -> bool {
        !matches!(self, Method::LadLasso | Method::CvLasso)
    }

    fn default_rule(self) -> LambdaRule {
        match self {
            Method::CvLasso | Method::CvRankLasso | Method::ThresholdedRankLasso => {
                LambdaRule::CrossValidated
            }
            _ => LambdaRule::Formula,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaRule {
    Formula,
    Fixed(f64),
    CrossValidated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectorSpec {
    pub method: Method,
    #[serde(default = "LambdaRule::unset")]
    pub lambda_rule: LambdaRule,
    #[serde(default = "default_folds")]
    pub cv_folds: usize,
    #[serde(default)]
    pub seed: u64,
}

impl LambdaRule {
    // placeholder replaced by the method default in `SelectorSpec::normalized`
    fn unset() -> LambdaRule {
        LambdaRule::Fixed(f64::NAN)
    }
}

fn default_folds() -> usize {
    5
}

impl SelectorSpec {
    pub fn new(method: Method) -> Self {
        SelectorSpec {
            method,
            lambda_rule: method.default_rule(),
            cv_folds: default_folds(),
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Fills in the method's default rule when none was given.
    pub fn normalized(mut self) -> Self {
        if matches!(self.lambda_rule, LambdaRule::Fixed(v) if v.is_nan()) {
            self.lambda_rule = self.method.default_rule();
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let cross_validated = matches!(
            self.method,
            Method::CvLasso | Method::CvRankLasso | Method::ThresholdedRankLasso
        ) || self.lambda_rule == LambdaRule::CrossValidated;
        if cross_validated && self.cv_folds < 2 {
            return Err(Error::InvalidFolds(format!(
                "{} needs cv_folds >= 2, got {}",
                self.method, self.cv_folds
            )));
        }
        match self.lambda_rule {
            LambdaRule::Fixed(v) if !(v >= 0.0) || !v.is_finite() => Err(Error::invalid(format!(
                "fixed lambda for {} must be finite and >= 0, got {v}",
                self.method
            ))),
            LambdaRule::CrossValidated
                if matches!(self.method, Method::AdaptiveRankLasso | Method::LadLasso) =>
            {
                Err(Error::invalid(format!(
                    "{} does not support a cross-validated lambda",
                    self.method
                )))
            }
            LambdaRule::Formula | LambdaRule::Fixed(_)
                if matches!(self.method, Method::CvLasso | Method::CvRankLasso) =>
            {
                Err(Error::invalid(format!(
                    "{} always selects lambda by cross-validation",
                    self.method
                )))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CvDiagnostics {
    pub lambdas: Vec<f64>,
    pub errors: Vec<f64>,
    pub best_index: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    /// Penalty level of the final fit (on the response scale for `cv`).
    pub lambda: Option<f64>,
    pub initial_lambda: Option<f64>,
    pub initial_support: Option<Vec<usize>>,
    pub weights: Option<Vec<f64>>,
    pub threshold: Option<f64>,
    pub target_size: Option<usize>,
    pub threshold_tie: bool,
    pub target_exceeds_support: bool,
    pub stage1_empty: bool,
    pub cv: Option<CvDiagnostics>,
    pub iterations: usize,
    pub max_kkt_violation: Option<f64>,
    pub objective: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub coefficients: Vec<f64>,
    pub support: Vec<usize>,
    pub spec: SelectorSpec,
    pub diagnostics: Diagnostics,
}

impl SelectionResult {
    fn new(coefficients: Vec<f64>, spec: SelectorSpec, diagnostics: Diagnostics) -> Self {
        let support = support_of(&coefficients);
        SelectionResult {
            coefficients,
            support,
            spec,
            diagnostics,
        }
    }
}

fn support_of(coef: &[f64]) -> Vec<usize> {
    (0..coef.len()).filter(|&j| coef[j] != 0.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FitOptions {
    pub solver: SolverOptions,
    pub lad: LadOptions,
}

/// `0.3 sqrt(log p / n)`.
pub fn default_rank_lambda(n: usize, p: usize) -> f64 {
    0.3 * ((p as f64).ln() / n as f64).sqrt()
}

fn check_inputs(x: &DesignMatrix, y: &[f64]) -> Result<()> {
    if !x.is_standardized() {
        return Err(Error::invalid(
            "design must be standardized before selection",
        ));
    }
    if y.len() != x.n() {
        return Err(Error::invalid(format!(
            "response has {} entries but the design has {} rows",
            y.len(),
            x.n()
        )));
    }
    if x.n() < 2 {
        return Err(Error::invalid("need at least 2 observations"));
    }
    Ok(())
}

fn fit_diagnostics(fit: &FitResult) -> Diagnostics {
    Diagnostics {
        lambda: Some(fit.lambda),
        iterations: fit.iterations,
        max_kkt_violation: Some(fit.max_kkt_violation),
        objective: Some(fit.objective),
        ..Default::default()
    }
}

fn rank_fit(x: &DesignMatrix, y: &[f64], lambda: f64, opts: SolverOptions) -> Result<FitResult> {
    let target = centered_ranks(y)?;
    fit_weighted_lasso(x, &target.values, &PenaltySpec::uniform(lambda, x.p())?, opts)
}

/// Lasso on the centered ranks of `y`; `lambda` defaults to `0.3 sqrt(log p / n)`.
pub fn rank_lasso(
    x: &DesignMatrix,
    y: &[f64],
    lambda: Option<f64>,
    opts: SolverOptions,
) -> Result<SelectionResult> {
    check_inputs(x, y)?;
    let lam = lambda.unwrap_or_else(|| default_rank_lambda(x.n(), x.p()));
    let fit = rank_fit(x, y, lam, opts)?;
    let mut spec = SelectorSpec::new(Method::RankLasso);
    if lambda.is_some() {
        spec.lambda_rule = LambdaRule::Fixed(lam);
    }
    let diag = fit_diagnostics(&fit);
    Ok(SelectionResult::new(fit.coefficients, spec, diag))
}

/// Second-stage weights: `0.1 lambda / |theta|` above `0.1 lambda`,
/// `1 / |theta|` below it, infinite (feature dropped) at zero.
pub fn adaptive_weights(initial: &[f64], lambda_rl: f64) -> Vec<f64> {
    let cap = 0.1 * lambda_rl;
    initial
        .iter()
        .map(|t| {
            let a = t.abs();
            if a == 0.0 {
                f64::INFINITY
            } else if a > cap {
                cap / a
            } else {
                1.0 / a
            }
        })
        .collect()
}

/// Weighted rank Lasso at `2 lambda_rL` with weights from an initial rank
/// Lasso fit at `lambda_rL` (default `0.3 sqrt(log p / n)`).
pub fn adaptive_rank_lasso(
    x: &DesignMatrix,
    y: &[f64],
    lambda_rl: Option<f64>,
    opts: SolverOptions,
) -> Result<SelectionResult> {
    check_inputs(x, y)?;
    let lam = lambda_rl.unwrap_or_else(|| default_rank_lambda(x.n(), x.p()));
    let mut spec = SelectorSpec::new(Method::AdaptiveRankLasso);
    if lambda_rl.is_some() {
        spec.lambda_rule = LambdaRule::Fixed(lam);
    }
    let target = centered_ranks(y)?;
    let initial = fit_weighted_lasso(x, &target.values, &PenaltySpec::uniform(lam, x.p())?, opts)?;
    let mut diag = Diagnostics {
        initial_lambda: Some(lam),
        initial_support: Some(initial.support.clone()),
        iterations: initial.iterations,
        ..Default::default()
    };
    if initial.support.is_empty() {
        diag.stage1_empty = true;
        diag.lambda = Some(2.0 * lam);
        return Ok(SelectionResult::new(vec![0.0; x.p()], spec, diag));
    }
    let weights = adaptive_weights(&initial.coefficients, lam);
    let fit = fit_weighted_lasso(
        x,
        &target.values,
        &PenaltySpec::new(2.0 * lam, weights.clone())?,
        opts,
    )?;
    diag.lambda = Some(fit.lambda);
    diag.weights = Some(weights);
    diag.iterations += fit.iterations;
    diag.max_kkt_violation = Some(fit.max_kkt_violation);
    diag.objective = Some(fit.objective);
    Ok(SelectionResult::new(fit.coefficients, spec, diag))
}

/// Outcome of keeping the `k` largest coefficients in magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct Thresholded {
    pub coefficients: Vec<f64>,
    pub threshold: f64,
    /// More than `k` coefficients share the cut magnitude; all of them were kept.
    pub tie: bool,
    /// `k` exceeded the number of nonzero coefficients.
    pub exceeds_support: bool,
}

/// Hard threshold at the smallest `delta` that keeps `k` coefficients:
/// `theta_j * 1{|theta_j| >= delta}`.
pub fn threshold_to_size(coefficients: &[f64], k: usize) -> Thresholded {
    let mut mags: Vec<f64> = coefficients
        .iter()
        .map(|c| c.abs())
        .filter(|&a| a > 0.0)
        .collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    if k == 0 {
        return Thresholded {
            coefficients: vec![0.0; coefficients.len()],
            threshold: f64::INFINITY,
            tie: false,
            exceeds_support: false,
        };
    }
    if k >= mags.len() {
        return Thresholded {
            coefficients: coefficients.to_vec(),
            threshold: mags.last().copied().unwrap_or(0.0),
            tie: false,
            exceeds_support: k > mags.len(),
        };
    }
    let delta = mags[k - 1];
    let kept = coefficients
        .iter()
        .map(|&c| if c.abs() >= delta { c } else { 0.0 })
        .collect();
    Thresholded {
        coefficients: kept,
        threshold: delta,
        tie: mags[k] == delta,
        exceeds_support: false,
    }
}

/// Cross-validated rank Lasso, then hard thresholding down to `target_size`
/// coefficients (default: the size of the adaptive rank Lasso model).
pub fn thresholded_rank_lasso(
    x: &DesignMatrix,
    y: &[f64],
    target_size: Option<usize>,
    folds: usize,
    seed: u64,
    opts: SolverOptions,
) -> Result<SelectionResult> {
    check_inputs(x, y)?;
    let k = match target_size {
        Some(k) => k,
        None => adaptive_rank_lasso(x, y, None, opts)?.support.len(),
    };
    let stage1 = cv_rank_lasso(x, y, folds, seed, opts)?;
    let cut = threshold_to_size(&stage1.coefficients, k);
    let mut spec = SelectorSpec::new(Method::ThresholdedRankLasso).with_seed(seed);
    spec.cv_folds = folds;
    let diag = Diagnostics {
        lambda: stage1.diagnostics.lambda,
        initial_lambda: stage1.diagnostics.lambda,
        initial_support: Some(stage1.support.clone()),
        threshold: Some(cut.threshold),
        target_size: Some(k),
        threshold_tie: cut.tie,
        target_exceeds_support: cut.exceeds_support,
        cv: stage1.diagnostics.cv,
        iterations: stage1.diagnostics.iterations,
        max_kkt_violation: stage1.diagnostics.max_kkt_violation,
        ..Default::default()
    };
    Ok(SelectionResult::new(cut.coefficients, spec, diag))
}

/// Fold label for every observation: a seeded shuffle dealt round-robin.
pub fn fold_assignment(n: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng_for(seed, 3));
    let mut label = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        label[i] = pos % folds;
    }
    label
}

fn validate_folds(n: usize, folds: usize) -> Result<()> {
    if folds < 2 {
        return Err(Error::InvalidFolds(format!("need at least 2 folds, got {folds}")));
    }
    if folds > n {
        return Err(Error::InvalidFolds(format!(
            "{folds} folds for {n} observations"
        )));
    }
    let largest = n.div_ceil(folds);
    if n - largest < 2 {
        return Err(Error::InvalidFolds(format!(
            "a training split would keep {} observation(s); at least 2 are needed",
            n - largest
        )));
    }
    Ok(())
}

/// 100 log-spaced values from `lmax` down to `lmax / 1000`, strictly descending.
pub fn cv_lambda_grid(lmax: f64) -> Vec<f64> {
    let mut grid: Vec<f64> = (0..CV_GRID_POINTS)
        .map(|k| {
            let e = -CV_GRID_DECADES * k as f64 / (CV_GRID_POINTS - 1) as f64;
            lmax * 10f64.powf(e)
        })
        .filter(|l| *l > 0.0 && l.is_finite())
        .collect();
    grid.dedup_by(|next, prev| !(*next < *prev));
    grid
}

/// Centers and scales `train` columns, applying the same map to `val`.
/// Columns constant on the training rows become zero.
fn fold_designs(x: &DesignMatrix, train: &[usize], val: &[usize]) -> Result<(DesignMatrix, DesignMatrix)> {
    let (nt, nv, p) = (train.len(), val.len(), x.p());
    let mut dt = Vec::with_capacity(nt * p);
    let mut dv = Vec::with_capacity(nv * p);
    for j in 0..p {
        let col = x.column(j);
        let m = train.iter().map(|&i| col[i]).sum::<f64>() / nt as f64;
        let var = train.iter().map(|&i| (col[i] - m).powi(2)).sum::<f64>() / nt as f64;
        let s = var.sqrt();
        let scale = if s > 1e-12 { s } else { f64::INFINITY };
        dt.extend(train.iter().map(|&i| (col[i] - m) / scale));
        dv.extend(val.iter().map(|&i| (col[i] - m) / scale));
    }
    Ok((
        DesignMatrix::from_column_major(nt, p, dt)?,
        DesignMatrix::from_column_major(nv, p, dv)?,
    ))
}

#[derive(Clone, Copy, PartialEq)]
enum CvTarget {
    Ranks,
    /// Raw response, centered per training split and divided by this scale.
    Raw { scale: f64 },
}

struct CvOutcome {
    fit: Option<FitResult>,
    diagnostics: CvDiagnostics,
}

fn cross_validate(
    x: &DesignMatrix,
    y: &[f64],
    folds: usize,
    seed: u64,
    kind: CvTarget,
    opts: SolverOptions,
) -> Result<CvOutcome> {
    let n = x.n();
    validate_folds(n, folds)?;
    let full_target: Vec<f64> = match kind {
        CvTarget::Ranks => centered_ranks(y)?.values,
        CvTarget::Raw { scale } => {
            let m = y.iter().sum::<f64>() / n as f64;
            y.iter().map(|v| (v - m) / scale).collect()
        }
    };
    let ones = vec![1.0; x.p()];
    let lmax = lambda_max(x, &full_target, &ones);
    let grid = cv_lambda_grid(lmax);
    if grid.is_empty() {
        return Ok(CvOutcome {
            fit: None,
            diagnostics: CvDiagnostics::default(),
        });
    }

    let labels = fold_assignment(n, folds, seed);
    let mut sse = vec![0.0; grid.len()];
    for f in 0..folds {
        let train: Vec<usize> = (0..n).filter(|&i| labels[i] != f).collect();
        let val: Vec<usize> = (0..n).filter(|&i| labels[i] == f).collect();
        let (xt, xv) = fold_designs(x, &train, &val)?;
        let yt: Vec<f64> = train.iter().map(|&i| y[i]).collect();
        let (t_train, t_val): (Vec<f64>, Vec<f64>) = match kind {
            CvTarget::Ranks => {
                let mut sorted = yt.clone();
                sorted.sort_by(f64::total_cmp);
                let tv = val.iter().map(|&i| ecdf_sorted(&sorted, y[i]) - 0.5).collect();
                (centered_ranks(&yt)?.values, tv)
            }
            CvTarget::Raw { scale } => {
                let m = yt.iter().sum::<f64>() / yt.len() as f64;
                (
                    yt.iter().map(|v| (v - m) / scale).collect(),
                    val.iter().map(|&i| (y[i] - m) / scale).collect(),
                )
            }
        };
        let path = lambda_path(&xt, &t_train, &ones, &grid, opts)?;
        for (k, fit) in path.iter().enumerate() {
            let pred = xv.matvec(&fit.coefficients);
            sse[k] += pred
                .iter()
                .zip(&t_val)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>();
        }
    }
    let errors: Vec<f64> = sse.iter().map(|s| s / n as f64).collect();
    let best = errors
        .iter()
        .enumerate()
        .fold(0, |b, (k, e)| if *e < errors[b] { k } else { b });
    let path = lambda_path(x, &full_target, &ones, &grid[..=best], opts)?;
    Ok(CvOutcome {
        fit: path.into_iter().last(),
        diagnostics: CvDiagnostics {
            lambdas: grid,
            errors,
            best_index: best,
        },
    })
}

fn cv_result(
    outcome: CvOutcome,
    p: usize,
    spec: SelectorSpec,
    coef_scale: f64,
) -> SelectionResult {
    match outcome.fit {
        Some(fit) => {
            let mut diag = fit_diagnostics(&fit);
            diag.lambda = Some(fit.lambda * coef_scale);
            diag.cv = Some(outcome.diagnostics);
            let coef = fit.coefficients.iter().map(|c| c * coef_scale).collect();
            SelectionResult::new(coef, spec, diag)
        }
        None => SelectionResult::new(
            vec![0.0; p],
            spec,
            Diagnostics {
                lambda: Some(0.0),
                cv: Some(outcome.diagnostics),
                ..Default::default()
            },
        ),
    }
}

/// Rank Lasso with lambda chosen by K-fold cross-validation. Held-out
/// responses are scored against `F_train(y) - 0.5`, the training empirical
/// CDF.
pub fn cv_rank_lasso(
    x: &DesignMatrix,
    y: &[f64],
    folds: usize,
    seed: u64,
    opts: SolverOptions,
) -> Result<SelectionResult> {
    check_inputs(x, y)?;
    let outcome = cross_validate(x, y, folds, seed, CvTarget::Ranks, opts)?;
    let mut spec = SelectorSpec::new(Method::CvRankLasso).with_seed(seed);
    spec.cv_folds = folds;
    Ok(cv_result(outcome, x.p(), spec, 1.0))
}

/// Plain Lasso (with intercept) on the raw response, lambda by K-fold
/// cross-validation on squared error.
pub fn cv_plain_lasso(
    x: &DesignMatrix,
    y: &[f64],
    folds: usize,
    seed: u64,
    opts: SolverOptions,
) -> Result<SelectionResult> {
    check_inputs(x, y)?;
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("response entry {i} is not finite")));
    }
    let n = y.len() as f64;
    let m = y.iter().sum::<f64>() / n;
    let sd = (y.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n).sqrt();
    // the problem is solved on y / sd and mapped back
    let scale = if sd > 0.0 { sd } else { 1.0 };
    let outcome = cross_validate(x, y, folds, seed, CvTarget::Raw { scale }, opts)?;
    let mut spec = SelectorSpec::new(Method::CvLasso).with_seed(seed);
    spec.cv_folds = folds;
    Ok(cv_result(outcome, x.p(), spec, scale))
}

/// LAD-Lasso with an unpenalized intercept; `lambda` defaults to
/// `1.5 sqrt(log p / n)`.
pub fn lad_lasso(
    x: &DesignMatrix,
    y: &[f64],
    lambda: Option<f64>,
    opts: LadOptions,
) -> Result<SelectionResult> {
    check_inputs(x, y)?;
    let lam = lambda.unwrap_or_else(|| default_lad_lambda(x.n(), x.p()));
    let fit = fit_lad_lasso(
        x,
        y,
        lam,
        LadOptions {
            intercept: true,
            ..opts
        },
    )?;
    let mut spec = SelectorSpec::new(Method::LadLasso);
    if lambda.is_some() {
        spec.lambda_rule = LambdaRule::Fixed(lam);
    }
    let diag = Diagnostics {
        lambda: Some(lam),
        iterations: fit.iterations,
        objective: Some(fit.objective),
        ..Default::default()
    };
    Ok(SelectionResult::new(fit.coefficients, spec, diag))
}

/// Runs the procedure described by `spec`.
pub fn select(
    x: &DesignMatrix,
    y: &[f64],
    spec: &SelectorSpec,
    opts: &FitOptions,
) -> Result<SelectionResult> {
    let spec = spec.normalized();
    spec.validate()?;
    let fixed = match spec.lambda_rule {
        LambdaRule::Fixed(v) => Some(v),
        _ => None,
    };
    let mut out = match spec.method {
        Method::RankLasso => rank_lasso(x, y, fixed, opts.solver)?,
        Method::AdaptiveRankLasso => adaptive_rank_lasso(x, y, fixed, opts.solver)?,
        Method::ThresholdedRankLasso => {
            let k = match fixed {
                Some(_) => Some(adaptive_rank_lasso(x, y, fixed, opts.solver)?.support.len()),
                None => None,
            };
            thresholded_rank_lasso(x, y, k, spec.cv_folds, spec.seed, opts.solver)?
        }
        Method::LadLasso => lad_lasso(x, y, fixed, opts.lad)?,
        Method::CvLasso => cv_plain_lasso(x, y, spec.cv_folds, spec.seed, opts.solver)?,
        Method::CvRankLasso => cv_rank_lasso(x, y, spec.cv_folds, spec.seed, opts.solver)?,
    };
    out.spec = spec;
    Ok(out)
}
