//! Weighted-l1 penalized least squares by cyclic coordinate descent.
//!
//! Minimizes `(1/2n) |r - X theta|^2 + lambda * sum_j w_j |theta_j|` and only
//! returns iterates whose KKT violation is below the requested tolerance.

use std::cell::RefCell;

use crate::error::{Error, Result};

/// Dense column-major design matrix.
///
/// A standardized matrix carries the means and scales that map its columns
/// back to the raw input: `raw_ij = mean_j + scale_j * x_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    n: usize,
    p: usize,
    data: Vec<f64>,
    column_means: Vec<f64>,
    column_scales: Vec<f64>,
    standardized: bool,
}

impl DesignMatrix {
    /// Builds a raw matrix from column-major data.
    pub fn from_column_major(n: usize, p: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * p {
            return Err(Error::invalid(format!(
                "expected {} entries for a {n}x{p} matrix, got {}",
                n * p,
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "design entry (row {}, column {}) is not finite",
                k % n.max(1),
                k / n.max(1)
            )));
        }
        Ok(DesignMatrix {
            n,
            p,
            data,
            column_means: vec![0.0; p],
            column_scales: vec![1.0; p],
            standardized: false,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != p) {
            return Err(Error::invalid(format!(
                "row {i} has {} entries, expected {p}",
                rows[i].len()
            )));
        }
        let mut data = vec![0.0; n * p];
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                data[j * n + i] = v;
            }
        }
        Self::from_column_major(n, p, data)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn is_standardized(&self) -> bool {
        self.standardized
    }

    pub fn column_means(&self) -> &[f64] {
        &self.column_means
    }

    pub fn column_scales(&self) -> &[f64] {
        &self.column_scales
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.n..(j + 1) * self.n]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.n + i]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.p).map(|j| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i)).collect()
    }

    /// Copies the given rows into a new matrix that keeps this matrix's
    /// standardization metadata.
    pub fn select_rows(&self, rows: &[usize]) -> DesignMatrix {
        let m = rows.len();
        let mut data = Vec::with_capacity(m * self.p);
        for j in 0..self.p {
            let col = self.column(j);
            data.extend(rows.iter().map(|&i| col[i]));
        }
        DesignMatrix {
            n: m,
            p: self.p,
            data,
            column_means: self.column_means.clone(),
            column_scales: self.column_scales.clone(),
            standardized: self.standardized,
        }
    }

    /// Raw matrix made of the given columns.
    pub fn select_columns(&self, cols: &[usize]) -> DesignMatrix {
        let mut data = Vec::with_capacity(self.n * cols.len());
        for &j in cols {
            data.extend_from_slice(self.column(j));
        }
        DesignMatrix {
            n: self.n,
            p: cols.len(),
            data,
            column_means: vec![0.0; cols.len()],
            column_scales: vec![1.0; cols.len()],
            standardized: false,
        }
    }

    /// Maps `other` (same raw coordinates this matrix was standardized from)
    /// through this matrix's centering and scaling.
    pub fn apply_standardization(&self, other: &DesignMatrix) -> Result<DesignMatrix> {
        if other.p != self.p {
            return Err(Error::invalid(format!(
                "column count mismatch: {} vs {}",
                other.p, self.p
            )));
        }
        let mut data = other.data.clone();
        for j in 0..self.p {
            let (m, s) = (self.column_means[j], self.column_scales[j]);
            for v in &mut data[j * other.n..(j + 1) * other.n] {
                *v = (*v - m) / s;
            }
        }
        Ok(DesignMatrix {
            n: other.n,
            p: other.p,
            data,
            column_means: self.column_means.clone(),
            column_scales: self.column_scales.clone(),
            standardized: true,
        })
    }

    /// Coefficients on the standardized scale mapped to raw columns.
    pub fn coefficients_to_original(&self, coef: &[f64]) -> Vec<f64> {
        coef.iter()
            .zip(&self.column_scales)
            .map(|(c, s)| c / s)
            .collect()
    }

    /// `X theta`.
    pub fn matvec(&self, theta: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (j, &t) in theta.iter().enumerate() {
            if t != 0.0 {
                axpy(t, self.column(j), &mut out);
            }
        }
        out
    }

    /// `X' v / n`.
    pub fn correlations(&self, v: &[f64]) -> Vec<f64> {
        let nf = self.n as f64;
        (0..self.p).map(|j| dot(self.column(j), v) / nf).collect()
    }
}

/// Inner product with four independent accumulators so the loop vectorizes.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    (acc[0] + acc[2]) + (acc[1] + acc[3]) + tail
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Centers every column and scales it to unit second moment (1/n).
pub fn standardize(raw: &DesignMatrix) -> Result<DesignMatrix> {
    let n = raw.n;
    if n < 2 {
        return Err(Error::invalid(format!(
            "standardization needs at least 2 rows, got {n}"
        )));
    }
    let nf = n as f64;
    let mut data = raw.data.clone();
    let mut means = Vec::with_capacity(raw.p);
    let mut scales = Vec::with_capacity(raw.p);
    for j in 0..raw.p {
        let col = &mut data[j * n..(j + 1) * n];
        let m = col.iter().sum::<f64>() / nf;
        let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / nf;
        let s = var.sqrt();
        if !(s > 1e-12 * (1.0 + m.abs())) {
            return Err(Error::DegenerateColumn { column: j });
        }
        for v in col.iter_mut() {
            *v = (*v - m) / s;
        }
        // compose with any earlier standardization so back-mapping stays exact
        means.push(raw.column_means[j] + raw.column_scales[j] * m);
        scales.push(raw.column_scales[j] * s);
    }
    Ok(DesignMatrix {
        n,
        p: raw.p,
        data,
        column_means: means,
        column_scales: scales,
        standardized: true,
    })
}

/// Penalty level and per-feature weights. An infinite weight removes the
/// feature from the problem.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltySpec {
    lambda: f64,
    weights: Vec<f64>,
}

impl PenaltySpec {
    pub fn new(lambda: f64, weights: Vec<f64>) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::invalid(format!(
                "lambda must be finite and >= 0, got {lambda}"
            )));
        }
        if let Some(j) = weights.iter().position(|w| !(*w > 0.0)) {
            return Err(Error::invalid(format!(
                "weight {j} must be strictly positive, got {}",
                weights[j]
            )));
        }
        Ok(PenaltySpec { lambda, weights })
    }

    pub fn uniform(lambda: f64, p: usize) -> Result<Self> {
        Self::new(lambda, vec![1.0; p])
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(lambda, self.weights.clone())
    }

    fn penalty_value(&self, theta: &[f64]) -> f64 {
        self.lambda
            * theta
                .iter()
                .zip(&self.weights)
                .filter(|(_, w)| w.is_finite())
                .map(|(t, w)| w * t.abs())
                .sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Bound on both the largest coordinate change in a sweep and the KKT
    /// violation of the returned iterate.
    pub tol: f64,
    /// Budget of coordinate sweeps (full or active-set).
    pub max_iter: usize,
    /// Keep the penalized objective after every sweep in `objective_trace`.
    pub record_objective: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-7,
            max_iter: 100_000,
            record_objective: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub coefficients: Vec<f64>,
    pub lambda: f64,
    pub weights: Vec<f64>,
    pub support: Vec<usize>,
    pub iterations: usize,
    pub max_kkt_violation: f64,
    pub objective: f64,
    pub objective_trace: Vec<f64>,
}

/// `(1/2n) |r - X theta|^2 + lambda * sum_j w_j |theta_j|`.
pub fn objective(x: &DesignMatrix, r: &[f64], theta: &[f64], penalty: &PenaltySpec) -> f64 {
    let fitted = x.matvec(theta);
    let rss: f64 = r.iter().zip(&fitted).map(|(a, b)| (a - b) * (a - b)).sum();
    rss / (2.0 * x.n as f64) + penalty.penalty_value(theta)
}

/// Largest `|c_j| / w_j`-style bound at which the zero vector is optimal:
/// `|X'r/n|_inf / min_j w_j` over finite weights.
pub fn lambda_max(x: &DesignMatrix, r: &[f64], weights: &[f64]) -> f64 {
    let corr = x.correlations(r);
    let cmax = corr
        .iter()
        .zip(weights)
        .filter(|(_, w)| w.is_finite())
        .fold(0.0f64, |m, (c, _)| m.max(c.abs()));
    let wmin = weights
        .iter()
        .filter(|w| w.is_finite())
        .fold(f64::INFINITY, |m, &w| m.min(w));
    if wmin.is_finite() {
        cmax / wmin
    } else {
        0.0
    }
}

/// Maximum KKT violation of `theta` given correlations `corr = X'(r - X theta)/n`.
fn kkt_violation(theta: &[f64], corr: &[f64], penalty: &PenaltySpec) -> f64 {
    let lam = penalty.lambda;
    let mut worst = 0.0f64;
    for j in 0..theta.len() {
        let w = penalty.weights[j];
        if !w.is_finite() {
            continue;
        }
        let t = lam * w;
        let v = if theta[j] != 0.0 {
            (corr[j] - t * theta[j].signum()).abs()
        } else {
            (corr[j].abs() - t).max(0.0)
        };
        worst = worst.max(v);
    }
    worst
}

#[inline]
fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

const POLISH_EVERY: usize = 10;
const MAX_POLISH_STEPS: usize = 20;

/// Lazily computed columns of `X'X/n` and a Cholesky factor of the Gram
/// matrix of the last active set, shared along a path.
struct GramCache {
    cols: Vec<Option<Vec<f64>>>,
    set: Vec<usize>,
    /// Row `i` holds `L[i][0..=i]`.
    rows: Vec<Vec<f64>>,
}

impl GramCache {
    fn new(p: usize) -> Self {
        GramCache {
            cols: vec![None; p],
            set: Vec::new(),
            rows: Vec::new(),
        }
    }

    fn column(&mut self, x: &DesignMatrix, j: usize) -> &[f64] {
        self.cols[j].get_or_insert_with(|| x.correlations(x.column(j)))
    }

    /// Factors the Gram matrix of `active`, reusing rows shared with the
    /// previous factor. On failure returns the position of the first column
    /// that is numerically in the span of the ones before it; the factor then
    /// covers exactly those earlier columns.
    fn factor(&mut self, x: &DesignMatrix, active: &[usize]) -> std::result::Result<(), usize> {
        let keep = self
            .set
            .iter()
            .zip(active)
            .take_while(|(a, b)| a == b)
            .count();
        self.set.truncate(keep);
        self.rows.truncate(keep);
        for &j in &active[keep..] {
            self.column(x, j);
        }
        for i in keep..active.len() {
            let gi = self.cols[active[i]].as_ref().expect("cached");
            let mut row = Vec::with_capacity(i + 1);
            for j in 0..i {
                let lj = &self.rows[j];
                let v = (gi[active[j]] - dot(&row[..j], &lj[..j])) / lj[j];
                row.push(v);
            }
            let d2 = gi[active[i]] - dot(&row, &row);
            if !(d2 > 1e-10 * gi[active[i]]) {
                return Err(i);
            }
            row.push(d2.sqrt());
            self.rows.push(row);
            self.set.push(active[i]);
        }
        Ok(())
    }

    /// Solves `G z = b` with the current factor.
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let k = b.len();
        let mut z = vec![0.0; k];
        for i in 0..k {
            let row = &self.rows[i];
            z[i] = (b[i] - dot(&row[..i], &z[..i])) / row[i];
        }
        for i in (0..k).rev() {
            let mut v = z[i];
            for m in (i + 1)..k {
                v -= self.rows[m][i] * z[m];
            }
            z[i] = v / self.rows[i][i];
        }
        z
    }
}

struct Problem<'a> {
    x: &'a DesignMatrix,
    r: &'a [f64],
    penalty: &'a PenaltySpec,
    col_sq: Vec<f64>,
    opts: SolverOptions,
    gram: RefCell<GramCache>,
}

struct State {
    theta: Vec<f64>,
    resid: Vec<f64>,
    iterations: usize,
    trace: Vec<f64>,
}

impl<'a> Problem<'a> {
    fn new(
        x: &'a DesignMatrix,
        r: &'a [f64],
        penalty: &'a PenaltySpec,
        opts: SolverOptions,
        gram: GramCache,
    ) -> Result<Self> {
        if r.len() != x.n {
            return Err(Error::invalid(format!(
                "target has {} entries but the design has {} rows",
                r.len(),
                x.n
            )));
        }
        if penalty.weights.len() != x.p {
            return Err(Error::invalid(format!(
                "{} weights for {} features",
                penalty.weights.len(),
                x.p
            )));
        }
        if !(opts.tol > 0.0) {
            return Err(Error::invalid("tolerance must be positive"));
        }
        if let Some(i) = r.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("target entry {i} is not finite")));
        }
        let nf = x.n as f64;
        let col_sq = (0..x.p)
            .map(|j| dot(x.column(j), x.column(j)) / nf)
            .collect();
        Ok(Problem {
            x,
            r,
            penalty,
            col_sq,
            opts,
            gram: RefCell::new(gram),
        })
    }

    fn is_free(&self, j: usize) -> bool {
        self.penalty.weights[j].is_finite() && self.col_sq[j] > 0.0
    }

    fn residual(&self, theta: &[f64]) -> Vec<f64> {
        let fitted = self.x.matvec(theta);
        self.r.iter().zip(&fitted).map(|(a, b)| a - b).collect()
    }

    fn current_objective(&self, st: &State) -> f64 {
        let rss: f64 = st.resid.iter().map(|v| v * v).sum();
        rss / (2.0 * self.x.n as f64) + self.penalty.penalty_value(&st.theta)
    }

    /// One pass over `coords`; returns the largest absolute coefficient change.
    fn sweep(&self, st: &mut State, coords: &[usize]) -> f64 {
        let nf = self.x.n as f64;
        let lam = self.penalty.lambda;
        let mut max_change = 0.0f64;
        for &j in coords {
            let col = self.x.column(j);
            let cj = self.col_sq[j];
            let old = st.theta[j];
            let z = dot(col, &st.resid) / nf + cj * old;
            let new = soft_threshold(z, lam * self.penalty.weights[j]) / cj;
            let delta = new - old;
            if delta != 0.0 {
                axpy(-delta, col, &mut st.resid);
                st.theta[j] = new;
                max_change = max_change.max(delta.abs());
            }
        }
        st.iterations += 1;
        if self.opts.record_objective {
            let obj = self.current_objective(st);
            st.trace.push(obj);
        }
        max_change
    }

    fn not_converged(&self, st: &State) -> Error {
        let resid = self.residual(&st.theta);
        let corr = self.x.correlations(&resid);
        Error::NotConverged {
            iterations: st.iterations,
            violation: kkt_violation(&st.theta, &corr, self.penalty),
            coefficients: st.theta.clone(),
        }
    }

    /// Coordinate descent restricted to `candidates`, enlarged whenever the
    /// KKT check finds a violating feature outside it.
    fn solve(&self, mut st: State, candidate: &mut [bool]) -> Result<FitResult> {
        let tol = self.opts.tol;
        let p = self.x.p;
        loop {
            let coords: Vec<usize> = (0..p).filter(|&j| candidate[j]).collect();
            let change = self.sweep(&mut st, &coords);
            if st.iterations >= self.opts.max_iter {
                return Err(self.not_converged(&st));
            }
            if change <= tol {
                st.resid = self.residual(&st.theta);
                let corr = self.x.correlations(&st.resid);
                let mut grew = false;
                for j in 0..p {
                    if !candidate[j]
                        && self.is_free(j)
                        && corr[j].abs() > self.penalty.lambda * self.penalty.weights[j]
                    {
                        candidate[j] = true;
                        grew = true;
                    }
                }
                if grew {
                    continue;
                }
                let violation = kkt_violation(&st.theta, &corr, self.penalty);
                if violation <= tol {
                    let objective = self.current_objective(&st);
                    let support = (0..p).filter(|&j| st.theta[j] != 0.0).collect();
                    return Ok(FitResult {
                        coefficients: st.theta,
                        lambda: self.penalty.lambda,
                        weights: self.penalty.weights.clone(),
                        support,
                        iterations: st.iterations,
                        max_kkt_violation: violation,
                        objective,
                        objective_trace: st.trace,
                    });
                }
                // sweeps have stalled short of the certificate
                let active: Vec<usize> = coords.iter().copied().filter(|&j| st.theta[j] != 0.0).collect();
                self.polish(&mut st, &active);
                continue;
            }
            // cycle on the active set until it settles, then re-check everything
            let mut cycles = 0usize;
            loop {
                let active: Vec<usize> = coords
                    .iter()
                    .copied()
                    .filter(|&j| st.theta[j] != 0.0)
                    .collect();
                cycles += 1;
                if cycles == 2 || cycles % POLISH_EVERY == 0 {
                    self.polish(&mut st, &active);
                }
                let change = self.sweep(&mut st, &active);
                if st.iterations >= self.opts.max_iter {
                    return Err(self.not_converged(&st));
                }
                if change <= tol {
                    break;
                }
            }
        }
    }

    /// Moves the active coefficients toward the minimizer of the objective
    /// with their signs held fixed, stopping where the first coefficient
    /// would change sign. The objective is convex along that segment, so it
    /// never increases. Coefficients that hit zero leave the active set and
    /// the step is repeated on the rest.
    fn polish(&self, st: &mut State, active: &[usize]) {
        let mut active = active.to_vec();
        for _ in 0..active.len().min(MAX_POLISH_STEPS) {
            match self.polish_step(st, &active) {
                Some(true) => active.retain(|&j| st.theta[j] != 0.0),
                _ => return,
            }
        }
    }

    /// `None` if no step was taken, `Some(truncated)` otherwise.
    fn polish_step(&self, st: &mut State, active: &[usize]) -> Option<bool> {
        if active.is_empty() {
            return None;
        }
        let nf = self.x.n as f64;
        let lam = self.penalty.lambda;
        let mut cache = self.gram.borrow_mut();
        if let Err(i) = cache.factor(self.x, active) {
            let g = cache.cols[active[i]].as_ref().expect("cached");
            let b: Vec<f64> = active[..i].iter().map(|&j| g[j]).collect();
            let z = cache.solve(&b);
            drop(cache);
            let mut v: Vec<f64> = z.iter().map(|c| -c).collect();
            v.push(1.0);
            return self.null_step(st, &active[..=i], &v);
        }
        let rhs: Vec<f64> = active
            .iter()
            .map(|&j| {
                dot(self.x.column(j), self.r) / nf
                    - lam * self.penalty.weights[j] * st.theta[j].signum()
            })
            .collect();
        let target = cache.solve(&rhs);
        drop(cache);
        if target.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let mut step = 1.0f64;
        for (a, &j) in active.iter().enumerate() {
            let (old, new) = (st.theta[j], target[a]);
            if new * old <= 0.0 {
                step = step.min(old / (old - new));
            }
        }
        let before = self.current_objective(st);
        let saved = st.theta.clone();
        for (a, &j) in active.iter().enumerate() {
            let old = st.theta[j];
            let new = old + step * (target[a] - old);
            st.theta[j] = if new * old <= 0.0 { 0.0 } else { new };
        }
        st.resid = self.residual(&st.theta);
        if !(self.current_objective(st) <= before) {
            st.theta = saved;
            st.resid = self.residual(&st.theta);
            return None;
        }
        Some(step < 1.0)
    }

    /// With `X v = 0` on `coords` the loss is flat along `v` and the penalty
    /// is linear, so moving downhill until the first coefficient reaches
    /// zero lowers the objective and shrinks the active set.
    fn null_step(&self, st: &mut State, coords: &[usize], v: &[f64]) -> Option<bool> {
        if v.iter().any(|c| !c.is_finite()) {
            return None;
        }
        let slope: f64 = coords
            .iter()
            .zip(v)
            .map(|(&j, c)| self.penalty.weights[j] * st.theta[j].signum() * c)
            .sum();
        let dir = if slope > 0.0 { -1.0 } else { 1.0 };
        let mut step = f64::INFINITY;
        let mut hit = None;
        for (a, &j) in coords.iter().enumerate() {
            let d = dir * v[a];
            if st.theta[j] * d < 0.0 {
                let t = -st.theta[j] / d;
                if t < step {
                    step = t;
                    hit = Some(j);
                }
            }
        }
        let hit = hit?;
        let before = self.current_objective(st);
        let saved = st.theta.clone();
        for (a, &j) in coords.iter().enumerate() {
            st.theta[j] += step * dir * v[a];
        }
        st.theta[hit] = 0.0;
        st.resid = self.residual(&st.theta);
        if !(self.current_objective(st) <= before) {
            st.theta = saved;
            st.resid = self.residual(&st.theta);
            return None;
        }
        Some(true)
    }

    /// Strong-rule candidate set for `lambda` given the previous penalty level.
    fn screen(&self, theta: &[f64], resid: &[f64], lambda_prev: f64) -> Vec<bool> {
        let corr = self.x.correlations(resid);
        let lam = self.penalty.lambda;
        (0..self.x.p)
            .map(|j| {
                self.is_free(j)
                    && (theta[j] != 0.0
                        || corr[j].abs() >= self.penalty.weights[j] * (2.0 * lam - lambda_prev))
            })
            .collect()
    }

    fn run(&self, warm: Option<&[f64]>, lambda_prev: f64) -> Result<FitResult> {
        let p = self.x.p;
        let mut theta = match warm {
            Some(w) => w.to_vec(),
            None => vec![0.0; p],
        };
        for j in 0..p {
            if !self.is_free(j) {
                theta[j] = 0.0;
            }
        }
        let resid = self.residual(&theta);
        let mut candidate = self.screen(&theta, &resid, lambda_prev);
        let st = State {
            theta,
            resid,
            iterations: 0,
            trace: Vec::new(),
        };
        self.solve(st, &mut candidate)
    }
}

/// Certified weighted Lasso fit from a cold start.
pub fn fit_weighted_lasso(
    x: &DesignMatrix,
    r: &[f64],
    penalty: &PenaltySpec,
    opts: SolverOptions,
) -> Result<FitResult> {
    let prob = Problem::new(x, r, penalty, opts, GramCache::new(x.p))?;
    let lmax = lambda_max(x, r, &penalty.weights);
    prob.run(None, lmax)
}

/// Certified weighted Lasso fit started from `warm`.
pub fn fit_weighted_lasso_from(
    x: &DesignMatrix,
    r: &[f64],
    penalty: &PenaltySpec,
    opts: SolverOptions,
    warm: &[f64],
) -> Result<FitResult> {
    if warm.len() != x.p {
        return Err(Error::invalid("warm start has the wrong length"));
    }
    let prob = Problem::new(x, r, penalty, opts, GramCache::new(x.p))?;
    // no usable previous level: screen as if coming from lambda itself
    prob.run(Some(warm), penalty.lambda)
}

/// Warm-started fits along a strictly descending sequence of positive
/// penalty levels.
pub fn lambda_path(
    x: &DesignMatrix,
    r: &[f64],
    weights: &[f64],
    lambdas: &[f64],
    opts: SolverOptions,
) -> Result<Vec<FitResult>> {
    if lambdas.is_empty() {
        return Err(Error::invalid("lambda path is empty"));
    }
    if let Some(k) = lambdas.iter().position(|l| !(*l > 0.0) || !l.is_finite()) {
        return Err(Error::invalid(format!(
            "lambda path entry {k} must be positive, got {}",
            lambdas[k]
        )));
    }
    if let Some(k) = lambdas.windows(2).position(|w| !(w[1] < w[0])) {
        return Err(Error::invalid(format!(
            "lambda path must be strictly descending (entries {k} and {})",
            k + 1
        )));
    }
    let mut lambda_prev = lambda_max(x, r, weights).max(lambdas[0]);
    let mut warm: Option<Vec<f64>> = None;
    let mut out = Vec::with_capacity(lambdas.len());
    let mut gram = GramCache::new(x.p);
    for &lam in lambdas {
        let penalty = PenaltySpec::new(lam, weights.to_vec())?;
        let prob = Problem::new(x, r, &penalty, opts, gram)?;
        let fit = prob.run(warm.as_deref(), lambda_prev);
        gram = prob.gram.into_inner();
        let fit = fit?;
        warm = Some(fit.coefficients.clone());
        lambda_prev = lam;
        out.push(fit);
    }
    Ok(out)
}
