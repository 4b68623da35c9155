//! Population quantities behind the rank Lasso and Monte-Carlo estimators
//! for them.
//!
//! The rank Lasso estimates `theta0 = ((n-1)/n) H^{-1} mu`, where
//! `mu = E[1{Y_2 <= Y_1} X_1]` is the mean of the U-statistic
//! `A = 1/(n(n-1)) sum_{i != j} 1{y_j <= y_i} x_i`. For elliptical designs and
//! increasing links `theta0 = gamma_beta * beta` with `gamma_beta > 0`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rank::ranks;
use crate::simdata::{cauchy, rng_for};
use crate::solver::DesignMatrix;

const MAX_MC_ENTRIES: usize = 60_000_000;
const MAX_CIF_DIM: usize = 20;

/// Predictor covariance `H` (unit diagonal) and true coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationModel {
    h: DMatrix<f64>,
    chol: DMatrix<f64>,
    beta: Vec<f64>,
}

impl PopulationModel {
    pub fn new(h: Vec<Vec<f64>>, beta: Vec<f64>) -> Result<Self> {
        let p = beta.len();
        if h.len() != p || h.iter().any(|r| r.len() != p) {
            return Err(Error::invalid(format!("H must be {p}x{p}")));
        }
        let m = DMatrix::from_fn(p, p, |i, j| h[i][j]);
        for i in 0..p {
            if (m[(i, i)] - 1.0).abs() > 1e-12 {
                return Err(Error::invalid(format!("H[{i}][{i}] must equal 1")));
            }
            for j in 0..i {
                if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 {
                    return Err(Error::invalid("H must be symmetric"));
                }
            }
        }
        let chol = m
            .clone()
            .cholesky()
            .ok_or_else(|| Error::LinearAlgebra("H is not positive definite".into()))?
            .l();
        Ok(PopulationModel { h: m, chol, beta })
    }

    /// `H = (1-b) I + b 11'`.
    pub fn equicorrelated(b: f64, beta: Vec<f64>) -> Result<Self> {
        if !(0.0..1.0).contains(&b) {
            return Err(Error::invalid(format!("b must lie in [0, 1), got {b}")));
        }
        let p = beta.len();
        let h = (0..p)
            .map(|i| (0..p).map(|j| if i == j { 1.0 } else { b }).collect())
            .collect();
        Self::new(h, beta)
    }

    pub fn p(&self) -> usize {
        self.beta.len()
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn h(&self) -> Vec<Vec<f64>> {
        (0..self.p())
            .map(|i| (0..self.p()).map(|j| self.h[(i, j)]).collect())
            .collect()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.p()).filter(|&j| self.beta[j] != 0.0).collect()
    }

    pub fn p0(&self) -> usize {
        self.support().len()
    }

    /// `beta' H beta`.
    pub fn index_variance(&self) -> f64 {
        let b = DVector::from_column_slice(&self.beta);
        (b.transpose() * &self.h * &b)[(0, 0)]
    }

    pub fn smallest_eigenvalue(&self) -> f64 {
        self.h
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .fold(f64::INFINITY, |m, &v| m.min(v))
    }
}

/// `Y = g(beta'X, eps)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Link {
    /// `u + eps`
    Linear,
    /// `exp(intercept + slope * u) + eps`
    Exp { intercept: f64, slope: f64 },
    /// `-u + eps`
    Negated,
}

impl Link {
    pub fn apply(self, u: f64, eps: f64) -> f64 {
        match self {
            Link::Linear => u + eps,
            Link::Exp { intercept, slope } => (intercept + slope * u).exp() + eps,
            Link::Negated => -u + eps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Noise {
    Gaussian { sd: f64 },
    Cauchy,
}

impl Noise {
    fn draw(self, rng: &mut impl Rng) -> f64 {
        match self {
            Noise::Gaussian { sd } => sd * rng.sample::<f64, _>(StandardNormal),
            Noise::Cauchy => cauchy(rng),
        }
    }
}

/// Draws `n_mc` observations `X ~ N(0, H)`, `Y = g(beta'X, eps)`.
pub fn sample_population(
    model: &PopulationModel,
    link: Link,
    noise: Noise,
    n_mc: usize,
    seed: u64,
) -> Result<(DesignMatrix, Vec<f64>)> {
    let p = model.p();
    if n_mc.saturating_mul(p) > MAX_MC_ENTRIES {
        return Err(Error::invalid(format!(
            "Monte-Carlo sample of {n_mc}x{p} exceeds the memory guard"
        )));
    }
    let mut xr = rng_for(seed, 0);
    let mut er = rng_for(seed, 2);
    let mut data = vec![0.0; n_mc * p];
    let mut y = Vec::with_capacity(n_mc);
    let mut z = vec![0.0; p];
    for i in 0..n_mc {
        for v in z.iter_mut() {
            *v = xr.sample(StandardNormal);
        }
        let mut u = 0.0;
        for r in 0..p {
            let mut v = 0.0;
            for c in 0..=r {
                v += model.chol[(r, c)] * z[c];
            }
            data[r * n_mc + i] = v;
            u += model.beta[r] * v;
        }
        y.push(link.apply(u, noise.draw(&mut er)));
    }
    Ok((DesignMatrix::from_column_major(n_mc, p, data)?, y))
}

/// `A = 1/(n(n-1)) sum_{i != j} 1{y_j <= y_i} x_i = 1/(n(n-1)) sum_i (R_i - 1) x_i`.
pub fn ustat_a(x: &DesignMatrix, y: &[f64]) -> Result<Vec<f64>> {
    let n = check_pairs(x, y)?;
    let r = ranks(y)?;
    let denom = (n * (n - 1)) as f64;
    Ok((0..x.p())
        .map(|j| {
            let col = x.column(j);
            r.iter()
                .zip(col)
                .map(|(&ri, v)| (ri - 1) as f64 * v)
                .sum::<f64>()
                / denom
        })
        .collect())
}

fn check_pairs(x: &DesignMatrix, y: &[f64]) -> Result<usize> {
    let n = y.len();
    if n < 2 {
        return Err(Error::invalid(format!(
            "U-statistic needs at least 2 observations, got {n}"
        )));
    }
    if x.n() != n {
        return Err(Error::invalid("design and response lengths differ"));
    }
    Ok(n)
}

/// `A` with a covariance estimate from its Hoeffding projection:
/// `Var(A) ~ (4/n) Cov(h1(Z))`, `h1(z) = E f(z, Z')` for the symmetric kernel
/// `f(z_i, z_j) = (1{y_j <= y_i} x_i + 1{y_i <= y_j} x_j) / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct UstatEstimate {
    pub a: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
}

pub fn ustat_a_with_covariance(x: &DesignMatrix, y: &[f64]) -> Result<UstatEstimate> {
    let n = check_pairs(x, y)?;
    let p = x.p();
    let a = ustat_a(x, y)?;
    let r = ranks(y)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| y[i].total_cmp(&y[j]));
    // start of each observation's tie group in sorted order
    let mut group_start = vec![0usize; n];
    let mut s = 0;
    for k in 0..n {
        if k > 0 && y[order[k]] != y[order[k - 1]] {
            s = k;
        }
        group_start[order[k]] = s;
    }
    let nm1 = (n - 1) as f64;
    let mut h1 = vec![vec![0.0; p]; n];
    let mut suffix = vec![0.0; n + 1];
    for j in 0..p {
        let col = x.column(j);
        for k in (0..n).rev() {
            suffix[k] = suffix[k + 1] + col[order[k]];
        }
        for i in 0..n {
            // sum of x_j over observations with y >= y_i, excluding i itself
            let above = suffix[group_start[i]] - col[i];
            h1[i][j] = 0.5 * ((r[i] - 1) as f64 / nm1 * col[i] + above / nm1);
        }
    }
    let mean: Vec<f64> = (0..p)
        .map(|j| h1.iter().map(|h| h[j]).sum::<f64>() / n as f64)
        .collect();
    let mut cov = vec![vec![0.0; p]; p];
    for h in &h1 {
        for a_ in 0..p {
            for b in 0..=a_ {
                cov[a_][b] += (h[a_] - mean[a_]) * (h[b] - mean[b]);
            }
        }
    }
    let scale = 4.0 / (n as f64 * nm1.max(1.0));
    for a_ in 0..p {
        for b in 0..=a_ {
            cov[a_][b] *= scale;
            cov[b][a_] = cov[a_][b];
        }
    }
    Ok(UstatEstimate { a, covariance: cov })
}

/// `theta0 = ((n-1)/n) H^{-1} mu`.
pub fn theta0(h: &[Vec<f64>], mu: &[f64], n: usize) -> Result<Vec<f64>> {
    let p = mu.len();
    if h.len() != p || h.iter().any(|r| r.len() != p) {
        return Err(Error::invalid(format!("H must be {p}x{p}")));
    }
    if n < 1 {
        return Err(Error::invalid("n must be positive"));
    }
    let m = DMatrix::from_fn(p, p, |i, j| h[i][j]);
    if (0..p).any(|i| (0..i).any(|j| (m[(i, j)] - m[(j, i)]).abs() > 1e-12)) {
        return Err(Error::LinearAlgebra("H is not symmetric".into()));
    }
    let chol = m
        .cholesky()
        .ok_or_else(|| Error::LinearAlgebra("H is not positive definite".into()))?;
    let v = chol.solve(&DVector::from_column_slice(mu));
    let c = (n as f64 - 1.0) / n as f64;
    Ok(v.iter().map(|t| c * t).collect())
}

/// Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theta0Estimate {
    pub theta: Vec<f64>,
    pub std_error: Vec<f64>,
    pub a: Vec<f64>,
}

/// `theta0` with `mu` replaced by `A` over a Monte-Carlo sample of size `n_mc`.
pub fn theta0_mc(
    model: &PopulationModel,
    link: Link,
    noise: Noise,
    n: usize,
    n_mc: usize,
    seed: u64,
) -> Result<Theta0Estimate> {
    if n_mc < 100 {
        return Err(Error::invalid(format!("n_mc must be >= 100, got {n_mc}")));
    }
    let (x, y) = sample_population(model, link, noise, n_mc, seed)?;
    let est = ustat_a_with_covariance(&x, &y)?;
    let theta = theta0(&model.h(), &est.a, n)?;
    let p = model.p();
    let c = (n as f64 - 1.0) / n as f64;
    let hinv = model
        .h
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::LinearAlgebra("H is singular".into()))?;
    let cov = DMatrix::from_fn(p, p, |i, j| est.covariance[i][j]);
    let tcov = &hinv * cov * &hinv;
    let std_error = (0..p).map(|j| c * tcov[(j, j)].max(0.0).sqrt()).collect();
    Ok(Theta0Estimate {
        theta,
        std_error,
        a: est.a,
    })
}

/// `((n-1)/n) Cov(F(Y), beta'X) / (beta' H beta)` with `F` the empirical CDF
/// of the Monte-Carlo sample.
pub fn gamma_beta_mc(
    model: &PopulationModel,
    link: Link,
    noise: Noise,
    n: usize,
    n_mc: usize,
    seed: u64,
) -> Result<Estimate> {
    if n_mc < 100 {
        return Err(Error::invalid(format!("n_mc must be >= 100, got {n_mc}")));
    }
    let denom = model.index_variance();
    if !(denom > 0.0) {
        return Err(Error::invalid("beta' H beta must be positive"));
    }
    let (x, y) = sample_population(model, link, noise, n_mc, seed)?;
    let u = x.matvec(model.beta());
    let r = ranks(&y)?;
    let m = n_mc as f64;
    let f: Vec<f64> = r.iter().map(|&ri| ri as f64 / m).collect();
    let fbar = f.iter().sum::<f64>() / m;
    let ubar = u.iter().sum::<f64>() / m;
    let prods: Vec<f64> = f
        .iter()
        .zip(&u)
        .map(|(a, b)| (a - fbar) * (b - ubar))
        .collect();
    let cov = prods.iter().sum::<f64>() / m;
    let var = prods.iter().map(|v| (v - cov).powi(2)).sum::<f64>() / (m - 1.0);
    let c = (n as f64 - 1.0) / n as f64 / denom;
    Ok(Estimate {
        value: c * cov,
        std_error: c * (var / m).sqrt(),
    })
}

fn q_norm(theta: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        theta.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    } else {
        theta.iter().map(|v| v.abs().powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

fn check_cif_params(xi: f64, q: f64) -> Result<()> {
    if !(xi > 1.0) || !xi.is_finite() {
        return Err(Error::invalid(format!("xi must be > 1, got {xi}")));
    }
    if !(q >= 1.0) {
        return Err(Error::invalid(format!("q must be >= 1, got {q}")));
    }
    Ok(())
}

/// `(1+xi)^{-1} p0^{1/q - 1/2} (1-b)` for equicorrelated designs; `q` may be
/// `f64::INFINITY`.
pub fn cif_lower_bound_equicorr(p0: usize, b: f64, xi: f64, q: f64) -> Result<f64> {
    check_cif_params(xi, q)?;
    if !(0.0..1.0).contains(&b) {
        return Err(Error::invalid(format!("b must lie in [0, 1), got {b}")));
    }
    if q < 2.0 {
        return Err(Error::invalid(format!("q must be >= 2, got {q}")));
    }
    if p0 == 0 {
        return Err(Error::invalid("p0 must be positive"));
    }
    Ok(cif_bound_from_eigen(p0, 1.0 - b, xi, q))
}

fn cif_bound_from_eigen(p0: usize, lambda_min: f64, xi: f64, q: f64) -> f64 {
    (p0 as f64).powf(1.0 / q - 0.5) * lambda_min / (1.0 + xi)
}

/// `p0^{1/q} |H theta|_inf / |theta|_q`.
pub fn cif_ratio(h: &[Vec<f64>], theta: &[f64], p0: usize, q: f64) -> f64 {
    let ht: Vec<f64> = h
        .iter()
        .map(|row| row.iter().zip(theta).map(|(a, b)| a * b).sum())
        .collect();
    let inv_q = if q.is_infinite() { 0.0 } else { 1.0 / q };
    (p0 as f64).powf(inv_q) * q_norm(&ht, f64::INFINITY) / q_norm(theta, q)
}

/// Randomized search for the cone invertibility factor
/// `inf { p0^{1/q} |H theta|_inf / |theta|_q : |theta_{T'}|_1 <= xi |theta_T|_1 }`.
/// The result is attained at a feasible point, so it bounds the true
/// infimum from above.
pub fn cif_empirical(
    h: &[Vec<f64>],
    support: &[usize],
    xi: f64,
    q: f64,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    check_cif_params(xi, q)?;
    let p = h.len();
    if p > MAX_CIF_DIM {
        return Err(Error::invalid(format!(
            "cif_empirical is limited to p <= {MAX_CIF_DIM}, got {p}"
        )));
    }
    if support.is_empty() || support.iter().any(|&j| j >= p) {
        return Err(Error::invalid("support must be a non-empty subset of 0..p"));
    }
    let p0 = support.len();
    let on_t: Vec<bool> = (0..p).map(|j| support.contains(&j)).collect();
    let project = |theta: &mut Vec<f64>| {
        let t1: f64 = (0..p).filter(|&j| on_t[j]).map(|j| theta[j].abs()).sum();
        let o1: f64 = (0..p).filter(|&j| !on_t[j]).map(|j| theta[j].abs()).sum();
        if o1 > xi * t1 {
            let s = if o1 > 0.0 { xi * t1 / o1 } else { 0.0 };
            for j in 0..p {
                if !on_t[j] {
                    theta[j] *= s;
                }
            }
        }
    };
    let value = |theta: &[f64]| {
        let r = cif_ratio(h, theta, p0, q);
        if r.is_finite() {
            r
        } else {
            f64::INFINITY
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<(f64, Vec<f64>)> = Vec::new();
    for _ in 0..n_samples.max(1) {
        let mut theta: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
        // spread draws between the interior and the cone boundary
        let t1: f64 = (0..p).filter(|&j| on_t[j]).map(|j| theta[j].abs()).sum();
        let o1: f64 = (0..p).filter(|&j| !on_t[j]).map(|j| theta[j].abs()).sum();
        if o1 > 0.0 {
            let u: f64 = if rng.gen_bool(0.5) { 1.0 } else { rng.gen() };
            let s = u * xi * t1 / o1;
            for j in 0..p {
                if !on_t[j] {
                    theta[j] *= s;
                }
            }
        }
        let v = value(&theta);
        pool.push((v, theta));
    }
    pool.sort_by(|a, b| a.0.total_cmp(&b.0));
    pool.truncate(8);

    let mut best = pool[0].0;
    for (mut cur_v, mut cur) in pool {
        let mut step = 0.5;
        while step > 1e-9 {
            let mut improved = false;
            for _ in 0..40 {
                let scale = q_norm(&cur, 2.0).max(1e-300);
                let mut cand: Vec<f64> = cur
                    .iter()
                    .map(|v| v + step * scale * rng.sample::<f64, _>(StandardNormal))
                    .collect();
                project(&mut cand);
                let v = value(&cand);
                if v < cur_v {
                    cur_v = v;
                    cur = cand;
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best = best.min(cur_v);
    }
    Ok(best)
}

/// `grad Q(theta) = -(1/n) sum_i (R_i/n - 0.5 - theta'x_i) x_i`.
pub fn rank_gradient(x: &DesignMatrix, y: &[f64], theta: &[f64]) -> Result<Vec<f64>> {
    let n = check_pairs(x, y)?;
    if theta.len() != x.p() {
        return Err(Error::invalid("theta length does not match the design"));
    }
    let r = ranks(y)?;
    let fitted = x.matvec(theta);
    let nf = n as f64;
    let resid: Vec<f64> = (0..n)
        .map(|i| r[i] as f64 / nf - 0.5 - fitted[i])
        .collect();
    Ok(x.correlations(&resid).into_iter().map(|c| -c).collect())
}

/// Evaluates `grad Q(theta)` through the rank sum
/// `-(1/n^2) sum R_i x_i + (1/(2n)) sum x_i + (1/n) sum x_i x_i' theta` and
/// through the U-statistic form
/// `-((n-1)/n) A + ((n-2)/(2n^2)) sum x_i + (1/n) sum x_i x_i' theta`,
/// returning the largest componentwise difference.
pub fn grad_decomposition_check(x: &DesignMatrix, y: &[f64], theta: &[f64]) -> Result<f64> {
    let n = check_pairs(x, y)?;
    if theta.len() != x.p() {
        return Err(Error::invalid("theta length does not match the design"));
    }
    let nf = n as f64;
    let r = ranks(y)?;
    let a = ustat_a(x, y)?;
    let fitted = x.matvec(theta);
    let mut worst = 0.0f64;
    for j in 0..x.p() {
        let col = x.column(j);
        let rank_sum: f64 = r.iter().zip(col).map(|(&ri, v)| ri as f64 * v).sum();
        let sum_x: f64 = col.iter().sum();
        let quad: f64 = col.iter().zip(&fitted).map(|(a, b)| a * b).sum::<f64>() / nf;
        let by_ranks = -rank_sum / (nf * nf) + sum_x / (2.0 * nf) + quad;
        let by_ustat = -(nf - 1.0) / nf * a[j] + (nf - 2.0) / (2.0 * nf * nf) * sum_x + quad;
        worst = worst.max((by_ranks - by_ustat).abs());
    }
    Ok(worst)
}

pub fn cosine_similarity(a: &[f64], b: &[f64]) -> f64 {
    let ab: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let aa: f64 = a.iter().map(|x| x * x).sum();
    let bb: f64 = b.iter().map(|x| x * x).sum();
    ab / (aa * bb).sqrt()
}

/// Fraction of `support` on which `theta` and `beta` have equal signs.
pub fn sign_agreement(theta: &[f64], beta: &[f64], support: &[usize]) -> f64 {
    if support.is_empty() {
        return 1.0;
    }
    let agree = support
        .iter()
        .filter(|&&j| theta[j].signum() == beta[j].signum() && theta[j] != 0.0)
        .count();
    agree as f64 / support.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryReport {
    pub a_hat: Vec<f64>,
    pub theta0_hat: Vec<f64>,
    pub theta0_std_error: Vec<f64>,
    pub gamma_beta_hat: f64,
    pub gamma_beta_std_error: f64,
    pub sign_agreement: f64,
    pub cosine_similarity: f64,
    /// `(1+xi)^{-1} p0^{1/q-1/2} lambda_min(H)`.
    pub cif_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheorySettings {
    pub n: usize,
    pub n_mc: usize,
    pub seed: u64,
    pub xi: f64,
    pub q: f64,
}

pub fn theory_report(
    model: &PopulationModel,
    link: Link,
    noise: Noise,
    settings: TheorySettings,
) -> Result<TheoryReport> {
    let th = theta0_mc(model, link, noise, settings.n, settings.n_mc, settings.seed)?;
    let gamma = gamma_beta_mc(
        model,
        link,
        noise,
        settings.n,
        settings.n_mc,
        settings.seed.wrapping_add(1),
    )?;
    let support = model.support();
    let p0 = support.len().max(1);
    check_cif_params(settings.xi, settings.q)?;
    Ok(TheoryReport {
        sign_agreement: sign_agreement(&th.theta, model.beta(), &support),
        cosine_similarity: cosine_similarity(&th.theta, model.beta()),
        cif_bound: cif_bound_from_eigen(p0, model.smallest_eigenvalue(), settings.xi, settings.q),
        a_hat: th.a,
        theta0_hat: th.theta,
        theta0_std_error: th.std_error,
        gamma_beta_hat: gamma.value,
        gamma_beta_std_error: gamma.std_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_design(n: usize, p: usize, seed: u64) -> (DesignMatrix, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<f64> = (0..n * p).map(|_| rng.sample(StandardNormal)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        (DesignMatrix::from_column_major(n, p, data).unwrap(), y)
    }

    fn a_by_pairs(x: &DesignMatrix, y: &[f64]) -> Vec<f64> {
        let n = y.len();
        (0..x.p())
            .map(|j| {
                let mut s = 0.0;
                for i in 0..n {
                    for k in 0..n {
                        if i != k && y[k] <= y[i] {
                            s += x.get(i, j);
                        }
                    }
                }
                s / (n * (n - 1)) as f64
            })
            .collect()
    }

    #[test]
    fn two_point_a() {
        let x = DesignMatrix::from_rows(&[vec![0.3, -1.0], vec![2.0, 5.0]]).unwrap();
        assert_eq!(ustat_a(&x, &[1.0, 2.0]).unwrap(), vec![1.0, 2.5]);
        assert!(ustat_a(&x.select_rows(&[0]), &[1.0]).is_err());
    }

    #[test]
    fn sorted_a_matches_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for seed in 0..30 {
            let n = 2 + seed as usize % 19;
            let (x, mut y) = random_design(n, 3, seed);
            if seed % 3 == 0 {
                // force ties
                for v in y.iter_mut() {
                    *v = (rng.gen_range(0..4)) as f64;
                }
            }
            let fast = ustat_a(&x, &y).unwrap();
            let slow = a_by_pairs(&x, &y);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn theta0_examples() {
        let id = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let t = theta0(&id, &[1.0, 0.0], 1_000_000).unwrap();
        assert!((t[0] - 1.0).abs() < 1e-5 && t[1] == 0.0);
        assert_eq!(theta0(&id, &[0.0, 0.0], 10).unwrap(), vec![0.0, 0.0]);
        let bad = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
        assert!(matches!(theta0(&bad, &[1.0, 1.0], 10), Err(Error::LinearAlgebra(_))));

        let m = PopulationModel::equicorrelated(0.3, vec![0.0; 5]).unwrap();
        let h = m.h();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mu: Vec<f64> = (0..5).map(|_| rng.sample(StandardNormal)).collect();
        let n = 37;
        let t = theta0(&h, &mu, n).unwrap();
        for i in 0..5 {
            let hv: f64 = (0..5).map(|j| h[i][j] * t[j]).sum::<f64>() * n as f64 / (n - 1) as f64;
            assert!((hv - mu[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn gamma_closed_form_gaussian() {
        // X ~ N(0, I), Y = beta'X + sigma Z: gamma * n/(n-1) = 1 / (2 sqrt(pi) tau)
        let beta = vec![1.0, -0.5, 0.0];
        let sigma = 0.8;
        let tau = (1.25f64 + sigma * sigma).sqrt();
        let expected = 1.0 / (2.0 * std::f64::consts::PI.sqrt() * tau);
        let m = PopulationModel::equicorrelated(0.0, beta).unwrap();
        let n = 50;
        let g = gamma_beta_mc(&m, Link::Linear, Noise::Gaussian { sd: sigma }, n, 400_000, 3).unwrap();
        let scaled = g.value * n as f64 / (n - 1) as f64;
        let se = g.std_error * n as f64 / (n - 1) as f64;
        assert!((scaled - expected).abs() < 4.0 * se, "{scaled} vs {expected} (se {se})");
    }

    #[test]
    fn gamma_sign_follows_link() {
        let m = PopulationModel::equicorrelated(0.2, vec![1.0, 1.0, 0.0]).unwrap();
        let dec = gamma_beta_mc(&m, Link::Negated, Noise::Gaussian { sd: 1.0 }, 100, 20_000, 1).unwrap();
        assert!(dec.value < 0.0);
        let inc = gamma_beta_mc(
            &m,
            Link::Exp { intercept: 0.0, slope: 1.0 },
            Noise::Cauchy,
            100,
            100_000,
            1,
        )
        .unwrap();
        assert!(inc.value - 3.0 * inc.std_error > 0.0);
        assert!(gamma_beta_mc(&m, Link::Linear, Noise::Cauchy, 100, 99, 1).is_err());
    }

    #[test]
    fn cif_bound_examples() {
        assert!((cif_lower_bound_equicorr(4, 0.3, 3.0, 2.0).unwrap() - 0.175).abs() < 1e-15);
        assert!(cif_lower_bound_equicorr(4, 1.0, 3.0, 2.0).is_err());
        assert!(cif_lower_bound_equicorr(4, 0.3, 1.0, 2.0).is_err());
        assert!(cif_lower_bound_equicorr(4, 0.3, 3.0, 1.5).is_err());
        let near_one = cif_lower_bound_equicorr(4, 1.0 - 1e-9, 3.0, 2.0).unwrap();
        assert!(near_one < 1e-9);
        assert!(cif_lower_bound_equicorr(3, 0.3, 2.0, f64::INFINITY).is_ok());
    }

    #[test]
    fn cif_identity_sup_norm() {
        let id: Vec<Vec<f64>> = (0..6)
            .map(|i| (0..6).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let v = cif_empirical(&id, &[0, 1], 3.0, f64::INFINITY, 500, 1).unwrap();
        assert!((v - 1.0).abs() < 0.05);
    }

    #[test]
    fn cif_equicorrelated_above_bound() {
        for (p0, xi, q) in [(2, 2.0, 2.0), (3, 3.0, 2.0), (2, 1.5, 4.0), (3, 2.0, f64::INFINITY)] {
            let m = PopulationModel::equicorrelated(0.3, vec![0.0; 8]).unwrap();
            let support: Vec<usize> = (0..p0).collect();
            let v = cif_empirical(&m.h(), &support, xi, q, 2_000, 9).unwrap();
            let lb = cif_lower_bound_equicorr(p0, 0.3, xi, q).unwrap();
            assert!(v >= lb, "p0={p0} xi={xi} q={q}: {v} < {lb}");
        }
    }

    #[test]
    fn cif_whole_space_against_eigenvectors() {
        let h = vec![
            vec![1.0, 0.4, -0.2],
            vec![0.4, 1.0, 0.1],
            vec![-0.2, 0.1, 1.0],
        ];
        let m = DMatrix::from_fn(3, 3, |i, j| h[i][j]);
        let eig = m.symmetric_eigen();
        let (kmin, lmin) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |b, (k, &v)| if v < b.1 { (k, v) } else { b });
        let vmin: Vec<f64> = eig.eigenvectors.column(kmin).iter().copied().collect();
        let at_eigvec = cif_ratio(&h, &vmin, 3, 2.0);
        let v = cif_empirical(&h, &[0, 1, 2], 2.0, 2.0, 3_000, 5).unwrap();
        // sqrt(p)|H t|_inf >= |H t|_2 >= lambda_min |t|_2
        assert!(v >= lmin - 1e-12);
        assert!(v <= at_eigvec + 1e-9);
    }

    #[test]
    fn cif_guards() {
        let big: Vec<Vec<f64>> = (0..21)
            .map(|i| (0..21).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        assert!(cif_empirical(&big, &[0], 2.0, 2.0, 10, 0).is_err());
    }

    #[test]
    fn gradient_forms_agree() {
        for (seed, n, p) in [(1u64, 15usize, 4usize), (2, 2, 3), (3, 40, 2)] {
            let (x, y) = random_design(n, p, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
            let theta: Vec<f64> = (0..p).map(|_| rng.sample(StandardNormal)).collect();
            assert!(grad_decomposition_check(&x, &y, &theta).unwrap() <= 1e-12);
            assert!(grad_decomposition_check(&x, &y, &vec![0.0; p]).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn gradient_matches_objective_derivative() {
        let (x, y) = random_design(12, 3, 8);
        let theta = [0.1, -0.2, 0.05];
        let g = rank_gradient(&x, &y, &theta).unwrap();
        let r = ranks(&y).unwrap();
        let q = |t: &[f64]| {
            let f = x.matvec(t);
            (0..12)
                .map(|i| (r[i] as f64 / 12.0 - 0.5 - f[i]).powi(2))
                .sum::<f64>()
                / 24.0
        };
        for j in 0..3 {
            let h = 1e-6;
            let mut tp = theta;
            let mut tm = theta;
            tp[j] += h;
            tm[j] -= h;
            let fd = (q(&tp) - q(&tm)) / (2.0 * h);
            assert!((fd - g[j]).abs() < 1e-8);
        }
    }

    #[test]
    fn hoeffding_variance_matches_replication() {
        // spread of A over independent samples vs the projection estimate
        let m = PopulationModel::equicorrelated(0.3, vec![1.0, 0.0]).unwrap();
        let reps: Vec<f64> = (0..200)
            .map(|s| {
                let (x, y) = sample_population(&m, Link::Linear, Noise::Cauchy, 400, 1000 + s).unwrap();
                ustat_a(&x, &y).unwrap()[0]
            })
            .collect();
        let mean = reps.iter().sum::<f64>() / 200.0;
        let var = reps.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 199.0;
        let (x, y) = sample_population(&m, Link::Linear, Noise::Cauchy, 400, 7).unwrap();
        let est = ustat_a_with_covariance(&x, &y).unwrap();
        let ratio = est.covariance[0][0] / var;
        assert!((0.6..1.6).contains(&ratio), "ratio {ratio}");
    }
}
