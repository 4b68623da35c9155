mod common;

use common::*;
use rand::Rng;
use rand_distr::StandardNormal;
use ranklasso::lad::{fit_lad_lasso, lad_objective, LadOptions};

#[test]
fn single_feature_matches_vertex_oracle() {
    let mut g = rng(4);
    for _ in 0..40 {
        let n = g.gen_range(3..12);
        let rows = gaussian_rows(&mut g, n, 1);
        let y: Vec<f64> = (0..n).map(|_| g.sample::<f64, _>(StandardNormal) * 2.0).collect();
        let lambda = g.gen_range(0.0..0.5);
        let fit = fit_lad_lasso(&design(&rows), &y, lambda, LadOptions::default()).unwrap();
        let (_, best) = lad_oracle(&rows, &y, lambda);
        assert!((fit.objective - best).abs() < 1e-10, "{} vs {best}", fit.objective);
    }
}

#[test]
fn small_problems_match_vertex_oracle() {
    let mut g = rng(9);
    for _ in 0..60 {
        let n = g.gen_range(3..14);
        let p = g.gen_range(2..=3);
        let rows = gaussian_rows(&mut g, n, p);
        let y: Vec<f64> = rows
            .iter()
            .map(|r| r[0] - 0.5 * r[1] + 0.3 * g.sample::<f64, _>(StandardNormal))
            .collect();
        let lambda = g.gen_range(0.0..0.3);
        let x = design(&rows);
        let fit = fit_lad_lasso(&x, &y, lambda, LadOptions::default()).unwrap();
        let (_, best) = lad_oracle(&rows, &y, lambda);
        assert!((fit.objective - best).abs() <= 1e-9 * (1.0 + best), "{} vs {best}", fit.objective);
        // plain descent never beats the exact answer
        let cd = fit_lad_lasso(&x, &y, lambda, LadOptions { exact: false, ..LadOptions::default() }).unwrap();
        assert!(cd.objective >= best - 1e-10);
    }
}

#[test]
fn intercept_absorbs_offset() {
    let mut g = rng(13);
    let rows = gaussian_rows(&mut g, 80, 3);
    let y: Vec<f64> = rows.iter().map(|r| 10.0 + 2.0 * r[0] + 0.1 * g.sample::<f64, _>(StandardNormal)).collect();
    let opts = LadOptions { intercept: true, ..LadOptions::default() };
    let fit = fit_lad_lasso(&design(&rows), &y, 0.01, opts).unwrap();
    assert!((fit.intercept - 10.0).abs() < 0.1);
    assert!((fit.coefficients[0] - 2.0).abs() < 0.1);
    let plain = fit_lad_lasso(&design(&rows), &y, 0.01, LadOptions::default()).unwrap();
    assert!(plain.objective > fit.objective);
    assert_eq!(plain.intercept, 0.0);
}

#[test]
fn objective_is_reported_consistently() {
    let mut g = rng(17);
    let rows = gaussian_rows(&mut g, 30, 5);
    let y: Vec<f64> = (0..30).map(|_| g.gen_range(-2.0..2.0)).collect();
    let x = design(&rows);
    let fit = fit_lad_lasso(&x, &y, 0.1, LadOptions::default()).unwrap();
    assert!((lad_objective(&x, &y, &fit.coefficients, 0.1) - fit.objective).abs() < 1e-12);
}
