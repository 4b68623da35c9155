//! LAD-Lasso by coordinate-wise weighted medians.
//!
//! Each coordinate update minimizes `(1/n) sum_i |u_i - x_ij t| + lambda |t|`
//! exactly: the minimizer is a weighted median of the points `u_i / x_ij`
//! (weights `|x_ij| / n`) together with the pseudo-observation `0` carrying
//! weight `lambda`. Coordinate descent on this non-smooth objective can stop
//! at a non-optimal kink, so by default the fit is finished by solving the
//! equivalent linear program exactly.

use crate::error::{Error, Result};
use crate::solver::DesignMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct LadFit {
    pub coefficients: Vec<f64>,
    /// Unpenalized offset; zero unless requested.
    pub intercept: f64,
    pub lambda: f64,
    pub objective: f64,
    pub support: Vec<usize>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadOptions {
    /// Stop once a full sweep lowers the objective by at most this much.
    pub tol: f64,
    pub max_iter: usize,
    /// Fit an unpenalized intercept (updated as the median residual).
    pub intercept: bool,
    /// Solve the linear program after coordinate descent and keep its
    /// solution when it is better.
    pub exact: bool,
}

impl Default for LadOptions {
    fn default() -> Self {
        LadOptions {
            tol: 1e-7,
            max_iter: 10_000,
            intercept: false,
            exact: true,
        }
    }
}

/// `1.5 * sqrt(log p / n)`.
pub fn default_lad_lambda(n: usize, p: usize) -> f64 {
    1.5 * ((p as f64).ln() / n as f64).sqrt()
}

/// `(1/n) sum_i |y_i - theta'x_i| + lambda * |theta|_1`.
pub fn lad_objective(x: &DesignMatrix, y: &[f64], theta: &[f64], lambda: f64) -> f64 {
    lad_objective_with_intercept(x, y, 0.0, theta, lambda)
}

pub fn lad_objective_with_intercept(
    x: &DesignMatrix,
    y: &[f64],
    intercept: f64,
    theta: &[f64],
    lambda: f64,
) -> f64 {
    let fitted = x.matvec(theta);
    let loss: f64 = y
        .iter()
        .zip(&fitted)
        .map(|(a, b)| (a - intercept - b).abs())
        .sum();
    loss / x.n() as f64 + lambda * theta.iter().map(|t| t.abs()).sum::<f64>()
}

/// Lower weighted median: the smallest point at which the cumulative weight
/// reaches half of the total.
pub(crate) fn weighted_median(points: &mut [(f64, f64)]) -> f64 {
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = points.iter().map(|p| p.1).sum();
    let half = 0.5 * total;
    let mut acc = 0.0;
    for &(v, w) in points.iter() {
        acc += w;
        if acc >= half {
            return v;
        }
    }
    points.last().map_or(0.0, |p| p.0)
}

pub fn fit_lad_lasso(
    x: &DesignMatrix,
    y: &[f64],
    lambda: f64,
    opts: LadOptions,
) -> Result<LadFit> {
    let n = x.n();
    let p = x.p();
    if y.len() != n {
        return Err(Error::invalid(format!(
            "response has {} entries but the design has {n} rows",
            y.len()
        )));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::invalid(format!(
            "lambda must be finite and >= 0, got {lambda}"
        )));
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("response entry {i} is not finite")));
    }
    let nf = n as f64;
    let mut theta = vec![0.0; p];
    let mut resid = y.to_vec();
    let mut b0 = 0.0;
    let mut obj = lad_objective(x, y, &theta, lambda);
    let mut buf: Vec<(f64, f64)> = Vec::with_capacity(n + 1);
    let mut iterations = 0;

    loop {
        if opts.intercept {
            buf.clear();
            buf.extend(resid.iter().map(|r| (r + b0, 1.0)));
            let new = weighted_median(&mut buf);
            for r in resid.iter_mut() {
                *r -= new - b0;
            }
            b0 = new;
        }
        for j in 0..p {
            let col = x.column(j);
            let old = theta[j];
            if old == 0.0 {
                // zero stays optimal iff the subgradient of the loss at 0
                // is dominated by lambda
                let mut s = 0.0;
                let mut slack = 0.0;
                for (r, xv) in resid.iter().zip(col) {
                    if *r > 0.0 {
                        s += xv;
                    } else if *r < 0.0 {
                        s -= xv;
                    } else {
                        slack += xv.abs();
                    }
                }
                if s.abs() <= lambda * nf + slack {
                    continue;
                }
            }
            buf.clear();
            for (r, &xv) in resid.iter().zip(col) {
                if xv != 0.0 {
                    let u = r + xv * old;
                    buf.push((u / xv, xv.abs() / nf));
                }
            }
            if buf.is_empty() {
                continue;
            }
            if lambda > 0.0 {
                buf.push((0.0, lambda));
            }
            let new = weighted_median(&mut buf);
            let delta = new - old;
            if delta != 0.0 {
                for (r, xv) in resid.iter_mut().zip(col) {
                    *r -= delta * xv;
                }
                theta[j] = new;
            }
        }
        iterations += 1;
        // recompute from scratch so drift in the residual cannot stall the stop rule
        let new_obj = lad_objective_with_intercept(x, y, b0, &theta, lambda);
        let fitted = x.matvec(&theta);
        for (r, (yi, fi)) in resid.iter_mut().zip(y.iter().zip(&fitted)) {
            *r = yi - b0 - fi;
        }
        let improvement = obj - new_obj;
        obj = new_obj;
        if improvement <= opts.tol {
            break;
        }
        if iterations >= opts.max_iter {
            return Err(Error::NotConverged {
                iterations,
                violation: improvement,
                coefficients: theta,
            });
        }
    }
    if opts.exact {
        match lp_solution(x, y, lambda, opts.intercept) {
            Ok((t, b)) => {
                let o = lad_objective_with_intercept(x, y, b, &t, lambda);
                if o < obj {
                    theta = t;
                    b0 = b;
                    obj = o;
                }
            }
            Err(e) => log::warn!("LAD linear program failed, keeping the descent iterate: {e}"),
        }
    }
    let support = (0..p).filter(|&j| theta[j] != 0.0).collect();
    Ok(LadFit {
        coefficients: theta,
        intercept: b0,
        lambda,
        objective: obj,
        support,
        iterations,
    })
}

/// `min (1/n) sum (u_i + v_i) + lambda sum (a_j + b_j)` subject to
/// `y_i - b0 - x_i'(a - b) = u_i - v_i`, all of `u, v, a, b` nonnegative.
fn lp_solution(x: &DesignMatrix, y: &[f64], lambda: f64, intercept: bool) -> Result<(Vec<f64>, f64)> {
    use microlp::{ComparisonOp, OptimizationDirection, Problem, SolveOutcome};
    let (n, p) = (x.n(), x.p());
    let nf = n as f64;
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let b0 = intercept.then(|| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)));
    let pos: Vec<_> = (0..p).map(|_| lp.add_var(lambda, (0.0, f64::INFINITY))).collect();
    let neg: Vec<_> = (0..p).map(|_| lp.add_var(lambda, (0.0, f64::INFINITY))).collect();
    let mut row = Vec::with_capacity(2 * p + 3);
    for i in 0..n {
        let u = lp.add_var(1.0 / nf, (0.0, f64::INFINITY));
        let v = lp.add_var(1.0 / nf, (0.0, f64::INFINITY));
        row.clear();
        row.extend([(u, 1.0), (v, -1.0)]);
        row.extend(b0.map(|b| (b, 1.0)));
        for j in 0..p {
            let xv = x.get(i, j);
            if xv != 0.0 {
                row.push((pos[j], xv));
                row.push((neg[j], -xv));
            }
        }
        lp.add_constraint(&row[..], ComparisonOp::Eq, y[i]);
    }
    let sol = match lp.solve() {
        Ok(SolveOutcome::Solution(s)) => s,
        Ok(other) => return Err(Error::LinearAlgebra(format!("LAD linear program: {other:?}"))),
        Err(e) => return Err(Error::LinearAlgebra(format!("LAD linear program: {e}"))),
    };
    let theta = (0..p)
        .map(|j| {
            let t = sol[pos[j]] - sol[neg[j]];
            // degenerate basic variables come back as rounding noise
            if t.abs() < 1e-12 { 0.0 } else { t }
        })
        .collect();
    Ok((theta, b0.map_or(0.0, |b| sol[b])))
}
