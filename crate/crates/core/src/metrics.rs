//! Selection quality, FD-TP curves and ordering prediction quality.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::{dot, DesignMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicateEval {
    /// Selected predictors.
    pub r: usize,
    /// Selected irrelevant predictors.
    pub v: usize,
    /// Selected relevant predictors.
    pub s: usize,
    pub fdp: f64,
    pub tpp: f64,
    pub nmp: usize,
}

/// FDP = V / max(R, 1), TPP = S / p0, NMP = V + p0 - S.
///
/// With `p0 == 0` the TPP is reported as 1 (nothing to find).
pub fn eval_selection(support: &[usize], truth: &[usize], p0: usize) -> ReplicateEval {
    let r = support.len();
    let s = support.iter().filter(|j| truth.contains(j)).count();
    let v = r - s;
    ReplicateEval {
        r,
        v,
        s,
        fdp: v as f64 / r.max(1) as f64,
        tpp: if p0 == 0 { 1.0 } else { s as f64 / p0 as f64 },
        nmp: v + p0 - s,
    }
}

/// Cumulative (TP, FD) counts along features sorted by decreasing |coefficient|.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FdTpCurve {
    pub points: Vec<(usize, usize)>,
}

/// Zero coefficients are skipped; equal magnitudes are visited in index order.
pub fn fd_tp_curve(coefficients: &[f64], truth: &[usize]) -> FdTpCurve {
    let mut order: Vec<usize> = (0..coefficients.len())
        .filter(|&j| coefficients[j] != 0.0)
        .collect();
    order.sort_by(|&a, &b| {
        coefficients[b]
            .abs()
            .total_cmp(&coefficients[a].abs())
            .then(a.cmp(&b))
    });
    let (mut tp, mut fd) = (0, 0);
    let points = order
        .into_iter()
        .map(|j| {
            if truth.contains(&j) {
                tp += 1;
            } else {
                fd += 1;
            }
            (tp, fd)
        })
        .collect();
    FdTpCurve { points }
}

/// Fraction of test pairs `{i, j}` whose response order agrees in sign with
/// the order of the scores `theta'x`. Pairs with a zero difference on either
/// side count as misordered.
pub fn opq(theta: &[f64], x_test: &DesignMatrix, y_test: &[f64]) -> Result<f64> {
    let nt = x_test.n();
    if nt < 2 {
        return Err(Error::invalid(format!(
            "OPQ needs at least 2 test observations, got {nt}"
        )));
    }
    if y_test.len() != nt || theta.len() != x_test.p() {
        return Err(Error::invalid("OPQ input dimensions disagree"));
    }
    let scores: Vec<f64> = (0..nt).map(|i| dot(&x_test.row(i), theta)).collect();
    Ok(opq_scores(&scores, y_test))
}

pub(crate) fn opq_scores(scores: &[f64], y: &[f64]) -> f64 {
    let nt = y.len();
    let mut good = 0usize;
    for i in 0..nt {
        for j in (i + 1)..nt {
            let dy = y[i] - y[j];
            let ds = scores[i] - scores[j];
            if dy != 0.0 && ds != 0.0 && (dy > 0.0) == (ds > 0.0) {
                good += 1;
            }
        }
    }
    good as f64 / (nt * (nt - 1) / 2) as f64
}
