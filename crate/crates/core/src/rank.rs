//! Ranks and centered ranks of a response vector.
//!
//! `R_i = #{j : y_j <= y_i}`, evaluated literally, so tied values share the
//! largest rank of their group. The centered rank `R_i/n - 0.5` is the only
//! representation of the response the rank-based estimators see.

use crate::error::{Error, Result};

/// A validated response: at least one entry, every entry finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseVector(Vec<f64>);

impl ResponseVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_finite(&values)?;
        Ok(ResponseVector(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CenteredRanks {
    pub values: Vec<f64>,
    pub n: usize,
    /// At least two responses compared equal.
    pub has_ties: bool,
}

fn check_finite(y: &[f64]) -> Result<()> {
    if y.is_empty() {
        return Err(Error::invalid("response vector is empty"));
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid(format!(
            "response entry {i} is not finite ({})",
            y[i]
        )));
    }
    Ok(())
}

/// Ranks plus a flag telling whether any ties were found.
fn ranks_with_ties(y: &[f64]) -> Result<(Vec<usize>, bool)> {
    check_finite(y)?;
    let n = y.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| y[a].total_cmp(&y[b]));

    let mut ranks = vec![0usize; n];
    let mut has_ties = false;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        // -0.0 and 0.0 compare equal under `<=`, so group on `==`.
        while end < n && y[order[end]] == y[order[start]] {
            end += 1;
        }
        if end - start > 1 {
            has_ties = true;
        }
        for &idx in &order[start..end] {
            ranks[idx] = end;
        }
        start = end;
    }
    Ok((ranks, has_ties))
}

/// `R_i = #{j : y_j <= y_i}` in O(n log n).
pub fn ranks(y: &[f64]) -> Result<Vec<usize>> {
    ranks_with_ties(y).map(|(r, _)| r)
}

/// `R_i/n - 0.5` for every observation. Requires `n >= 2`.
pub fn centered_ranks(y: &[f64]) -> Result<CenteredRanks> {
    if y.len() < 2 {
        return Err(Error::invalid(format!(
            "centered ranks need at least 2 observations, got {}",
            y.len()
        )));
    }
    let (r, has_ties) = ranks_with_ties(y)?;
    if has_ties {
        log::warn!("response contains ties; tied values share the maximal rank");
    }
    let n = y.len();
    let nf = n as f64;
    let values = r.iter().map(|&ri| ri as f64 / nf - 0.5).collect();
    Ok(CenteredRanks {
        values,
        n,
        has_ties,
    })
}

/// Empirical CDF of `sample` evaluated at `t`: `#{s in sample : s <= t} / len`.
/// `sorted` must be ascending.
pub(crate) fn ecdf_sorted(sorted: &[f64], t: f64) -> f64 {
    let count = sorted.partition_point(|&s| s <= t);
    count as f64 / sorted.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ranks_by_definition(y: &[f64]) -> Vec<usize> {
        y.iter()
            .map(|&yi| y.iter().filter(|&&yj| yj <= yi).count())
            .collect()
    }

    #[test]
    fn small_examples() {
        assert_eq!(ranks(&[3.0, 1.0, 2.0]).unwrap(), vec![3, 1, 2]);
        assert_eq!(ranks(&[10.0]).unwrap(), vec![1]);
        assert_eq!(ranks(&[1.0, 1.0, 2.0]).unwrap(), vec![2, 2, 3]);
    }

    #[test]
    fn centered_examples() {
        assert_eq!(centered_ranks(&[5.0, 7.0]).unwrap().values, vec![0.0, 0.5]);
        assert_eq!(centered_ranks(&[7.0, 5.0]).unwrap().values, vec![0.5, 0.0]);
        let c = centered_ranks(&[2.0, 9.0, 4.0]).unwrap().values;
        let expected = [-1.0 / 6.0, 0.5, 1.0 / 6.0];
        for (a, b) in c.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_non_finite_and_short_input() {
        assert!(matches!(ranks(&[1.0, f64::NAN]), Err(Error::InvalidInput(_))));
        assert!(matches!(
            ranks(&[f64::INFINITY]),
            Err(Error::InvalidInput(_))
        ));
        assert!(ranks(&[]).is_err());
        assert!(centered_ranks(&[1.0]).is_err());
        assert!(ResponseVector::new(vec![0.0, f64::NEG_INFINITY]).is_err());
    }

    #[test]
    fn ties_flagged() {
        assert!(centered_ranks(&[1.0, 1.0, 2.0]).unwrap().has_ties);
        assert!(!centered_ranks(&[1.0, 3.0, 2.0]).unwrap().has_ties);
        // signed zeros are equal values
        assert_eq!(ranks(&[0.0, -0.0]).unwrap(), vec![2, 2]);
    }

    #[test]
    fn sorted_ranks_match_pairwise_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=50 {
            for _ in 0..20 {
                // coarse values so ties show up regularly
                let y: Vec<f64> = (0..n).map(|_| rng.gen_range(0..8) as f64).collect();
                assert_eq!(ranks(&y).unwrap(), ranks_by_definition(&y));
                let y: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
                assert_eq!(ranks(&y).unwrap(), ranks_by_definition(&y));
            }
        }
    }

    #[test]
    fn tie_free_sum_is_one_half() {
        let y: Vec<f64> = (0..37).map(|i| ((i * 17) % 37) as f64).collect();
        let c = centered_ranks(&y).unwrap();
        let s: f64 = c.values.iter().sum();
        assert!((s - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ecdf_counts_le() {
        let s = [1.0, 2.0, 2.0, 5.0];
        assert_eq!(ecdf_sorted(&s, 0.0), 0.0);
        assert_eq!(ecdf_sorted(&s, 2.0), 0.75);
        assert_eq!(ecdf_sorted(&s, 9.0), 1.0);
    }

    fn distinct_vec() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::hash_set(-10_000i64..10_000, 2..60)
            .prop_map(|s| s.into_iter().map(|v| v as f64 / 7.0).collect())
    }

    proptest! {
        #[test]
        fn monotone_invariance(y in distinct_vec()) {
            let base = centered_ranks(&y).unwrap();
            let cubed: Vec<f64> = y.iter().map(|v| v * v * v + 5.0).collect();
            let expd: Vec<f64> = y.iter().map(|v| (v / 2000.0).exp()).collect();
            prop_assert_eq!(&centered_ranks(&cubed).unwrap().values, &base.values);
            prop_assert_eq!(&centered_ranks(&expd).unwrap().values, &base.values);
        }

        #[test]
        fn permutation_equivariance(y in distinct_vec(), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            let mut perm: Vec<usize> = (0..y.len()).collect();
            perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            let permuted: Vec<f64> = perm.iter().map(|&i| y[i]).collect();
            let base = centered_ranks(&y).unwrap().values;
            let got = centered_ranks(&permuted).unwrap().values;
            for (k, &i) in perm.iter().enumerate() {
                prop_assert_eq!(got[k], base[i]);
            }
        }

        #[test]
        fn range_and_permutation(y in distinct_vec()) {
            let n = y.len();
            let c = centered_ranks(&y).unwrap();
            let lo = 1.0 / n as f64 - 0.5;
            for &v in &c.values {
                prop_assert!(v >= lo && v <= 0.5);
            }
            let mut r = ranks(&y).unwrap();
            r.sort_unstable();
            prop_assert_eq!(r, (1..=n).collect::<Vec<_>>());
        }
    }
}
