#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use ranklasso::DesignMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_rows(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..p).map(|_| rng.sample(StandardNormal)).collect())
        .collect()
}

pub fn design(rows: &[Vec<f64>]) -> DesignMatrix {
    DesignMatrix::from_rows(rows).unwrap()
}

pub fn lasso_objective(rows: &[Vec<f64>], r: &[f64], lambda: f64, w: &[f64], theta: &[f64]) -> f64 {
    let n = rows.len() as f64;
    let rss: f64 = rows
        .iter()
        .zip(r)
        .map(|(x, ri)| {
            let fit: f64 = x.iter().zip(theta).map(|(a, b)| a * b).sum();
            (ri - fit).powi(2)
        })
        .sum();
    let pen: f64 = w.iter().zip(theta).map(|(wj, t)| wj * t.abs()).sum();
    rss / (2.0 * n) + lambda * pen
}

/// Minimizes a convex function of up to 3 variables by repeated grid search
/// on a box that halves around the incumbent.
pub fn grid_refine(p: usize, half_width: f64, f: impl Fn(&[f64]) -> f64) -> (Vec<f64>, f64) {
    const K: i64 = 10;
    let mut center = vec![0.0; p];
    let mut best = f(&center);
    let mut h = half_width;
    let total = (2 * K + 1).pow(p as u32);
    let mut point = vec![0.0; p];
    while h > 1e-12 {
        let step = h / K as f64;
        let base = center.clone();
        for idx in 0..total {
            let mut rest = idx;
            for j in 0..p {
                let k = rest % (2 * K + 1);
                rest /= 2 * K + 1;
                point[j] = base[j] + (k - K) as f64 * step;
            }
            let v = f(&point);
            if v < best {
                best = v;
                center.copy_from_slice(&point);
            }
        }
        h *= 0.5;
    }
    (center, best)
}

/// Weighted-lasso minimum by grid refinement. The box comes from
/// `lambda * w_j |theta_j| <= objective(0)`.
pub fn lasso_oracle(rows: &[Vec<f64>], r: &[f64], lambda: f64, w: &[f64]) -> (Vec<f64>, f64) {
    let p = w.len();
    let f0 = lasso_objective(rows, r, lambda, w, &vec![0.0; p]);
    let wmin = w.iter().cloned().fold(f64::INFINITY, f64::min);
    let bound = f0 / (lambda * wmin);
    grid_refine(p, bound, |t| lasso_objective(rows, r, lambda, w, t))
}

pub fn lad_objective(rows: &[Vec<f64>], y: &[f64], lambda: f64, theta: &[f64]) -> f64 {
    let n = rows.len() as f64;
    let loss: f64 = rows
        .iter()
        .zip(y)
        .map(|(x, yi)| (yi - x.iter().zip(theta).map(|(a, b)| a * b).sum::<f64>()).abs())
        .sum();
    loss / n + lambda * theta.iter().map(|t| t.abs()).sum::<f64>()
}

fn solve_small(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let p = b.len();
    for c in 0..p {
        let piv = (c..p).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[piv][c].abs() < 1e-12 {
            return None;
        }
        a.swap(c, piv);
        b.swap(c, piv);
        for r in 0..p {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..p {
                    a[r][k] -= f * a[c][k];
                }
                b[r] -= f * b[c];
            }
        }
    }
    Some((0..p).map(|i| b[i] / a[i][i]).collect())
}

/// LAD-lasso minimum by enumerating the vertices of the piecewise-linear
/// objective: every point where `p` of the kinks `y_i = x_i'theta` and
/// `theta_j = 0` meet.
pub fn lad_oracle(rows: &[Vec<f64>], y: &[f64], lambda: f64) -> (Vec<f64>, f64) {
    let p = rows[0].len();
    let mut planes: Vec<(Vec<f64>, f64)> = rows.iter().cloned().zip(y.iter().cloned()).collect();
    for j in 0..p {
        let mut e = vec![0.0; p];
        e[j] = 1.0;
        planes.push((e, 0.0));
    }
    let m = planes.len();
    let mut best = (vec![0.0; p], lad_objective(rows, y, lambda, &vec![0.0; p]));
    let mut pick = vec![0usize; p];
    fn rec(
        start: usize,
        depth: usize,
        m: usize,
        pick: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if depth == pick.len() {
            visit(pick);
            return;
        }
        for k in start..m {
            pick[depth] = k;
            rec(k + 1, depth + 1, m, pick, visit);
        }
    }
    rec(0, 0, m, &mut pick, &mut |idx: &[usize]| {
        let a: Vec<Vec<f64>> = idx.iter().map(|&k| planes[k].0.clone()).collect();
        let b: Vec<f64> = idx.iter().map(|&k| planes[k].1).collect();
        if let Some(t) = solve_small(a, b) {
            let v = lad_objective(rows, y, lambda, &t);
            if v < best.1 {
                best = (t, v);
            }
        }
    });
    best
}

/// `1/(n(n-1)) sum_{i != j} 1{y_j <= y_i} x_i` by the double loop.
pub fn ustat_pairs(rows: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let n = rows.len();
    let p = rows[0].len();
    let mut a = vec![0.0; p];
    for i in 0..n {
        for j in 0..n {
            if i != j && y[j] <= y[i] {
                for k in 0..p {
                    a[k] += rows[i][k];
                }
            }
        }
    }
    let d = (n * (n - 1)) as f64;
    a.iter().map(|v| v / d).collect()
}

/// `R_i = #{j : y_j <= y_i}` by counting.
pub fn ranks_by_counting(y: &[f64]) -> Vec<usize> {
    y.iter()
        .map(|yi| y.iter().filter(|yj| *yj <= yi).count())
        .collect()
}
