//! Python bindings for `ranklasso`.
//!
//! Designs are passed as lists of rows (anything sequence-like, including
//! 2-D numpy arrays). Fitting functions standardize the design first, so
//! coefficients are on the standardized scale.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ranklasso::estimators::{default_rank_lambda, FitOptions};
use ranklasso::lad::LadOptions;
use ranklasso::runner::config::ExperimentConfig;
use ranklasso::{
    DesignMatrix, Error, LambdaRule, Method, PenaltySpec, ScenarioConfig, SelectorSpec,
    SolverOptions,
};

create_exception!(pyranklasso, NotConvergedError, PyRuntimeError);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::NotConverged { .. } => NotConvergedError::new_err(e.to_string()),
        Error::Io { .. } | Error::LinearAlgebra(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn design(rows: Vec<Vec<f64>>) -> PyResult<DesignMatrix> {
    let x = DesignMatrix::from_rows(&rows).map_err(py_err)?;
    ranklasso::standardize(&x).map_err(py_err)
}

fn solver_options(tol: f64, max_iter: usize) -> SolverOptions {
    SolverOptions { tol, max_iter, ..SolverOptions::default() }
}

/// A single weighted Lasso fit.
#[pyclass(get_all, frozen, module = "pyranklasso")]
#[derive(Clone)]
struct LassoFit {
    coefficients: Vec<f64>,
    support: Vec<usize>,
    lambda_: f64,
    objective: f64,
    iterations: usize,
    max_kkt_violation: f64,
}

#[pymethods]
impl LassoFit {
    fn __repr__(&self) -> String {
        format!("LassoFit(lambda_={:.4e}, support={:?}, objective={:.6e})", self.lambda_, self.support, self.objective)
    }
}

impl From<ranklasso::FitResult> for LassoFit {
    fn from(f: ranklasso::FitResult) -> Self {
        LassoFit {
            coefficients: f.coefficients,
            support: f.support,
            lambda_: f.lambda,
            objective: f.objective,
            iterations: f.iterations,
            max_kkt_violation: f.max_kkt_violation,
        }
    }
}

/// Output of one selection procedure.
#[pyclass(get_all, frozen, module = "pyranklasso")]
#[derive(Clone)]
struct Selection {
    method: String,
    coefficients: Vec<f64>,
    support: Vec<usize>,
    lambda_: Option<f64>,
    threshold: Option<f64>,
    weights: Option<Vec<f64>>,
    cv_lambdas: Option<Vec<f64>>,
    cv_errors: Option<Vec<f64>>,
    threshold_tie: bool,
}

#[pymethods]
impl Selection {
    fn __repr__(&self) -> String {
        let lam = self.lambda_.map_or("None".to_string(), |l| format!("{l:.4e}"));
        format!("Selection(method={:?}, support={:?}, lambda_={lam})", self.method, self.support)
    }
}

impl From<ranklasso::SelectionResult> for Selection {
    fn from(s: ranklasso::SelectionResult) -> Self {
        let d = s.diagnostics;
        Selection {
            method: s.spec.method.label().to_string(),
            coefficients: s.coefficients,
            support: s.support,
            lambda_: d.lambda,
            threshold: d.threshold,
            weights: d.weights,
            cv_lambdas: d.cv.as_ref().map(|c| c.lambdas.clone()),
            cv_errors: d.cv.map(|c| c.errors),
            threshold_tie: d.threshold_tie,
        }
    }
}

/// LAD-Lasso fit with an optional unpenalized intercept.
#[pyclass(get_all, frozen, module = "pyranklasso")]
#[derive(Clone)]
struct LadResult {
    coefficients: Vec<f64>,
    intercept: f64,
    support: Vec<usize>,
    lambda_: f64,
    objective: f64,
    iterations: usize,
}

#[pymethods]
impl LadResult {
    fn __repr__(&self) -> String {
        format!("LadResult(lambda_={:.4e}, support={:?}, objective={:.6e})", self.lambda_, self.support, self.objective)
    }
}

/// Ranks `R_i = #{j : y_j <= y_i}`.
#[pyfunction]
fn ranks(y: Vec<f64>) -> PyResult<Vec<usize>> {
    ranklasso::ranks(&y).map_err(py_err)
}

/// Centered ranks `R_i / n - 0.5`.
#[pyfunction]
fn centered_ranks(y: Vec<f64>) -> PyResult<Vec<f64>> {
    ranklasso::centered_ranks(&y).map(|c| c.values).map_err(py_err)
}

/// Columns centered to mean 0 and scaled to unit variance.
#[pyfunction]
fn standardize(x: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    Ok(design(x)?.to_rows())
}

#[pyfunction]
fn default_lambda(n: usize, p: usize) -> f64 {
    default_rank_lambda(n, p)
}

/// Minimizes `|r - X theta|^2 / (2n) + lambda * sum w_j |theta_j|`.
#[pyfunction]
#[pyo3(signature = (x, r, lambda_, weights=None, tol=1e-7, max_iter=100_000))]
fn fit_weighted_lasso(
    x: Vec<Vec<f64>>,
    r: Vec<f64>,
    lambda_: f64,
    weights: Option<Vec<f64>>,
    tol: f64,
    max_iter: usize,
) -> PyResult<LassoFit> {
    let x = design(x)?;
    let pen = match weights {
        Some(w) => PenaltySpec::new(lambda_, w),
        None => PenaltySpec::uniform(lambda_, x.p()),
    }
    .map_err(py_err)?;
    ranklasso::fit_weighted_lasso(&x, &r, &pen, solver_options(tol, max_iter))
        .map(LassoFit::from)
        .map_err(py_err)
}

/// Warm-started fits along a descending sequence of penalty levels.
#[pyfunction]
#[pyo3(signature = (x, r, lambdas, weights=None, tol=1e-7, max_iter=100_000))]
fn lambda_path(
    x: Vec<Vec<f64>>,
    r: Vec<f64>,
    lambdas: Vec<f64>,
    weights: Option<Vec<f64>>,
    tol: f64,
    max_iter: usize,
) -> PyResult<Vec<LassoFit>> {
    let x = design(x)?;
    let w = weights.unwrap_or_else(|| vec![1.0; x.p()]);
    ranklasso::lambda_path(&x, &r, &w, &lambdas, solver_options(tol, max_iter))
        .map(|v| v.into_iter().map(LassoFit::from).collect())
        .map_err(py_err)
}

/// Runs one selection procedure: "rL", "arL", "thrL", "cvrL", "cv" or "LAD".
///
/// `lambda_` fixes the penalty for the formula-based methods; it is
/// ignored by the cross-validated ones.
#[pyfunction]
#[pyo3(signature = (x, y, method="rL", lambda_=None, folds=5, seed=0))]
fn select(
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
    method: &str,
    lambda_: Option<f64>,
    folds: usize,
    seed: u64,
) -> PyResult<Selection> {
    let m = Method::from_label(method)
        .ok_or_else(|| PyValueError::new_err(format!("unknown method {method:?}")))?;
    let x = design(x)?;
    let mut spec = SelectorSpec::new(m).with_seed(seed);
    spec.cv_folds = folds;
    if let Some(l) = lambda_ {
        spec.lambda_rule = LambdaRule::Fixed(l);
    }
    ranklasso::select(&x, &y, &spec, &FitOptions::default())
        .map(Selection::from)
        .map_err(py_err)
}

/// LAD-Lasso, `sum |y - b0 - X theta| / n + lambda |theta|_1`.
#[pyfunction]
#[pyo3(signature = (x, y, lambda_=None, intercept=true, exact=true))]
fn lad_lasso(
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
    lambda_: Option<f64>,
    intercept: bool,
    exact: bool,
) -> PyResult<LadResult> {
    let x = design(x)?;
    let lam = lambda_.unwrap_or_else(|| ranklasso::lad::default_lad_lambda(x.n(), x.p()));
    let opts = LadOptions { intercept, exact, ..LadOptions::default() };
    let f = ranklasso::fit_lad_lasso(&x, &y, lam, opts).map_err(py_err)?;
    Ok(LadResult {
        coefficients: f.coefficients,
        intercept: f.intercept,
        support: f.support,
        lambda_: f.lambda,
        objective: f.objective,
        iterations: f.iterations,
    })
}

/// R, V, S, FDP, TPP and NMP of a selected support.
#[pyfunction]
fn eval_selection<'py>(py: Python<'py>, support: Vec<usize>, truth: Vec<usize>, p0: usize) -> PyResult<Bound<'py, PyDict>> {
    let e = ranklasso::eval_selection(&support, &truth, p0);
    let d = PyDict::new_bound(py);
    d.set_item("R", e.r)?;
    d.set_item("V", e.v)?;
    d.set_item("S", e.s)?;
    d.set_item("FDP", e.fdp)?;
    d.set_item("TPP", e.tpp)?;
    d.set_item("NMP", e.nmp)?;
    Ok(d)
}

/// Cumulative (true positives, false discoveries) as features enter by decreasing |coefficient|.
#[pyfunction]
fn fd_tp_curve(coefficients: Vec<f64>, truth: Vec<usize>) -> Vec<(usize, usize)> {
    ranklasso::fd_tp_curve(&coefficients, &truth).points
}

/// Fraction of concordant test pairs between `X theta` and `y`.
#[pyfunction]
fn opq(theta: Vec<f64>, x_test: Vec<Vec<f64>>, y_test: Vec<f64>) -> PyResult<f64> {
    let x = DesignMatrix::from_rows(&x_test).map_err(py_err)?;
    ranklasso::opq(&theta, &x, &y_test).map_err(py_err)
}

/// Simulated dataset for scenario 1-4; returns `(x_rows, y, beta, support)`.
#[pyfunction]
#[pyo3(signature = (scenario, n, p, p0, seed=0))]
fn generate(
    scenario: u8,
    n: usize,
    p: usize,
    p0: usize,
    seed: u64,
) -> PyResult<(Vec<Vec<f64>>, Vec<f64>, Vec<f64>, Vec<usize>)> {
    let d = ranklasso::simdata::generate(&ScenarioConfig::new(scenario, n, p, p0, seed)).map_err(py_err)?;
    Ok((d.x.to_rows(), d.y, d.beta, d.support))
}

/// Runs a simulation config (TOML text) in memory and returns one dict per
/// (scenario, method, replicate).
#[pyfunction]
fn simulate<'py>(py: Python<'py>, config_toml: &str) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let cfg = ExperimentConfig::from_toml(config_toml).map_err(py_err)?;
    let rep = py.allow_threads(|| ranklasso::runner::simulate(&cfg)).map_err(py_err)?;
    let mut out = Vec::with_capacity(rep.rows.len());
    for row in &rep.rows {
        let sc = &rep.scenarios[row.scenario_index];
        let d = PyDict::new_bound(py);
        d.set_item("scenario", sc.scenario)?;
        d.set_item("n", sc.n)?;
        d.set_item("p", sc.p)?;
        d.set_item("p0", sc.p0)?;
        d.set_item("method", &rep.labels[row.method_index])?;
        d.set_item("replicate", row.replicate)?;
        d.set_item("R", row.eval.r)?;
        d.set_item("V", row.eval.v)?;
        d.set_item("S", row.eval.s)?;
        d.set_item("FDP", row.eval.fdp)?;
        d.set_item("TPP", row.eval.tpp)?;
        d.set_item("NMP", row.eval.nmp)?;
        out.push(d);
    }
    Ok(out)
}

#[pymodule]
fn pyranklasso(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NotConvergedError", m.py().get_type_bound::<NotConvergedError>())?;
    m.add_class::<LassoFit>()?;
    m.add_class::<Selection>()?;
    m.add_class::<LadResult>()?;
    m.add_function(wrap_pyfunction!(ranks, m)?)?;
    m.add_function(wrap_pyfunction!(centered_ranks, m)?)?;
    m.add_function(wrap_pyfunction!(standardize, m)?)?;
    m.add_function(wrap_pyfunction!(default_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(fit_weighted_lasso, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_path, m)?)?;
    m.add_function(wrap_pyfunction!(select, m)?)?;
    m.add_function(wrap_pyfunction!(lad_lasso, m)?)?;
    m.add_function(wrap_pyfunction!(eval_selection, m)?)?;
    m.add_function(wrap_pyfunction!(fd_tp_curve, m)?)?;
    m.add_function(wrap_pyfunction!(opq, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}
