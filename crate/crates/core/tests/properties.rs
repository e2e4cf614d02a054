use nowcast_core::forecast::{dm_test, dm_test_differential, mae, rmse, DmOptions};
use nowcast_core::ols::{hac_covariance, joint_f_test, ols_fit, DesignMatrix};
use nowcast_core::series::{
    aggregate_weekly_to_monthly, cumulate, first_difference, log_transform, month_weights, MonthlySeries,
    WeeklySeries, YearMonth,
};
use nowcast_core::stationarity::{adf_test_values, kpss_test_values, AdfSpec, KpssSpec};
use nowcast_core::var::{ar_forecast, fit_ar_values, fit_nowcast, fit_var_values, granger_test, NowcastSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn normals(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn ar1(seed: u64, n: usize, phi: f64) -> Vec<f64> {
    let e = normals(seed, n);
    let mut y = vec![0.0; n];
    y[0] = e[0];
    for t in 1..n {
        y[t] = phi * y[t - 1] + e[t];
    }
    y
}

fn coupled(seed: u64, n: usize, beta: f64) -> (Vec<f64>, Vec<f64>) {
    let x = ar1(seed, n, 0.5);
    let e = normals(seed.wrapping_add(7_919), n);
    let mut y = vec![0.0; n];
    for t in 1..n {
        y[t] = 0.3 * y[t - 1] + beta * x[t - 1] + e[t];
    }
    (x, y)
}

fn ym(y: i32, m: u32) -> YearMonth {
    YearMonth::new(y, m).unwrap()
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn design(x: &[f64], z: &[f64]) -> DesignMatrix {
    DesignMatrix::new(vec![("const", vec![1.0; x.len()]), ("x", x.to_vec()), ("z", z.to_vec())]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn difference_then_cumulate_round_trips(values in prop::collection::vec(-1e3f64..1e3, 2..80)) {
        let s = MonthlySeries::unrestricted("s", ym(2004, 1), values.clone()).unwrap();
        let back = cumulate(&first_difference(&s).unwrap(), values[0]);
        prop_assert_eq!(back.len(), values.len());
        prop_assert_eq!(back.start(), s.start());
        for (a, b) in back.values().iter().zip(&values) {
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn log_difference_matches_log_ratio(values in prop::collection::vec(1e-3f64..1e4, 2..80)) {
        let s = MonthlySeries::unrestricted("s", ym(2004, 1), values.clone()).unwrap();
        let dlog = first_difference(&log_transform(&s).unwrap()).unwrap();
        for (k, d) in dlog.values().iter().enumerate() {
            prop_assert!((d - (values[k + 1] / values[k]).ln()).abs() <= 1e-12);
        }
    }

    #[test]
    fn constant_weekly_series_aggregates_to_constant(c in 0.0f64..100.0, offset in 0i64..400, weeks in 10usize..120) {
        let first = chrono::NaiveDate::from_ymd_opt(2004, 1, 4).unwrap() + chrono::Duration::days(offset);
        let w = WeeklySeries::new("w", first, vec![c; weeks]).unwrap();
        for (month, (_, days)) in month_weights(&w) {
            prop_assert!(days <= month.days_in_month());
        }
        if let Ok(m) = aggregate_weekly_to_monthly(&w) {
            for v in m.values() {
                prop_assert!((v - c).abs() <= 1e-12 * c.max(1.0));
            }
        }
    }

    #[test]
    fn hac_bandwidth_zero_is_white(seed in any::<u64>(), n in 12usize..80) {
        let x = normals(seed, n);
        let z = ar1(seed ^ 0xabc, n, 0.6);
        let e = normals(seed ^ 0xdef, n);
        let y: Vec<f64> = (0..n).map(|t| 1.0 + 2.0 * x[t] - z[t] + e[t] * (1.0 + x[t].abs())).collect();
        let d = design(&x, &z);
        let fit = ols_fit(&d, &y).unwrap();
        let hac = hac_covariance(&fit, &d, Some(0)).unwrap();

        let rows: Vec<[f64; 3]> = (0..n).map(|t| [1.0, x[t], z[t]]).collect();
        let mut meat = [[0.0; 3]; 3];
        for (r, e) in rows.iter().zip(&fit.residuals) {
            for i in 0..3 {
                for j in 0..3 {
                    meat[i][j] += e * e * r[i] * r[j];
                }
            }
        }
        let b = &fit.xtx_inv;
        for i in 0..3 {
            for j in 0..3 {
                let mut white = 0.0;
                for a in 0..3 {
                    for c in 0..3 {
                        white += b[(i, a)] * meat[a][c] * b[(c, j)];
                    }
                }
                prop_assert!((hac.matrix[(i, j)] - white).abs() <= 1e-12 * white.abs().max(1.0));
            }
        }
    }

    #[test]
    fn single_restriction_f_is_squared_t(seed in any::<u64>(), n in 10usize..80) {
        let x = normals(seed, n);
        let z = normals(seed ^ 0x55, n);
        let e = normals(seed ^ 0x99, n);
        let y: Vec<f64> = (0..n).map(|t| 0.5 + x[t] + 0.3 * z[t] + e[t]).collect();
        let d = design(&x, &z);
        let u = ols_fit(&d, &y).unwrap();
        let r = ols_fit(&d.without(&["z"]).unwrap(), &y).unwrap();
        let f = joint_f_test(&u, &r, 1).unwrap();
        let t = u.t_ratios()[2];
        prop_assert!(rel_close(f.statistic, t * t, 1e-10));
    }

    #[test]
    fn scaling_y_scales_coefficients_only(seed in any::<u64>(), c in 1e-3f64..1e3) {
        let n = 40;
        let x = normals(seed, n);
        let z = normals(seed ^ 0x1234, n);
        let e = normals(seed ^ 0x4321, n);
        let y: Vec<f64> = (0..n).map(|t| 2.0 - x[t] + 0.4 * z[t] + e[t]).collect();
        let ys: Vec<f64> = y.iter().map(|v| c * v).collect();
        let d = design(&x, &z);
        let a = ols_fit(&d, &y).unwrap();
        let b = ols_fit(&d, &ys).unwrap();
        for (p, q) in a.coefficients.iter().zip(&b.coefficients) {
            prop_assert!(rel_close(c * p, *q, 1e-10));
        }
        prop_assert!((a.r2 - b.r2).abs() <= 1e-10);
        prop_assert!((a.adj_r2 - b.adj_r2).abs() <= 1e-10);
        for (p, q) in a.t_ratios().iter().zip(&b.t_ratios()) {
            prop_assert!(rel_close(*p, *q, 1e-10));
        }
        let dr = d.without(&["z"]).unwrap();
        let fa = joint_f_test(&a, &ols_fit(&dr, &y).unwrap(), 1).unwrap();
        let fb = joint_f_test(&b, &ols_fit(&dr, &ys).unwrap(), 1).unwrap();
        prop_assert!(rel_close(fa.statistic, fb.statistic, 1e-10));
    }

    #[test]
    fn adjusted_r2_follows_its_formula(seed in any::<u64>(), n in 8usize..60) {
        let x = normals(seed, n);
        let z = normals(seed ^ 0x77, n);
        let y: Vec<f64> = normals(seed ^ 0x88, n).iter().zip(&x).map(|(e, x)| x + e).collect();
        let fit = ols_fit(&design(&x, &z), &y).unwrap();
        let expected = 1.0 - (1.0 - fit.r2) * (n as f64 - 1.0) / (n as f64 - 3.0);
        prop_assert!((fit.adj_r2 - expected).abs() <= 1e-12);
        prop_assert!(fit.adj_r2 <= fit.r2 + 1e-15);
        prop_assert!((0.0..=1.0).contains(&fit.r2));
    }

    #[test]
    fn adf_is_scale_invariant(seed in any::<u64>(), c in 1e-3f64..1e3) {
        let z = ar1(seed, 100, 0.8);
        let zs: Vec<f64> = z.iter().map(|v| c * v).collect();
        let a = adf_test_values(&z, AdfSpec::default()).unwrap();
        let b = adf_test_values(&zs, AdfSpec::default()).unwrap();
        prop_assert!(rel_close(a.statistic, b.statistic, 1e-10));
    }

    #[test]
    fn kpss_ignores_level_and_trend_shifts(seed in any::<u64>(), shift in -50.0f64..50.0, slope in -2.0f64..2.0) {
        let z = ar1(seed, 100, 0.5);
        let level = KpssSpec { trend: false, ..KpssSpec::default() };
        let shifted: Vec<f64> = z.iter().map(|v| v + shift).collect();
        let a = kpss_test_values(&z, level).unwrap();
        let b = kpss_test_values(&shifted, level).unwrap();
        prop_assert!(rel_close(a.statistic, b.statistic, 1e-10));

        let trend = KpssSpec::default();
        let tilted: Vec<f64> = z.iter().enumerate().map(|(t, v)| v + shift + slope * t as f64).collect();
        let a = kpss_test_values(&z, trend).unwrap();
        let b = kpss_test_values(&tilted, trend).unwrap();
        prop_assert!(rel_close(a.statistic, b.statistic, 1e-10));
    }

    #[test]
    fn granger_is_scale_invariant(seed in any::<u64>(), cx in 1e-2f64..1e2, cy in 1e-2f64..1e2, p in 1usize..4) {
        let (x, y) = coupled(seed, 120, 0.3);
        let xs: Vec<f64> = x.iter().map(|v| cx * v).collect();
        let ys: Vec<f64> = y.iter().map(|v| cy * v).collect();
        let a = fit_var_values(&["x", "y"], &[&x, &y], p).unwrap();
        let b = fit_var_values(&["x", "y"], &[&xs, &ys], p).unwrap();
        for (cause, effect) in [("x", "y"), ("y", "x")] {
            let fa = granger_test(&a, cause, effect).unwrap();
            let fb = granger_test(&b, cause, effect).unwrap();
            prop_assert!(rel_close(fa.statistic, fb.statistic, 1e-10));
        }
    }

    #[test]
    fn var_equations_match_standalone_ols(seed in any::<u64>(), p in 1usize..5) {
        let (x, y) = coupled(seed, 100, 0.5);
        let fit = fit_var_values(&["x", "y"], &[&x, &y], p).unwrap();
        let t = x.len();
        let mut cols = vec![("c".to_string(), vec![1.0; t - p])];
        for lag in 1..=p {
            cols.push((format!("x{lag}"), (p..t).map(|r| x[r - lag]).collect()));
            cols.push((format!("y{lag}"), (p..t).map(|r| y[r - lag]).collect()));
        }
        let standalone = ols_fit(&DesignMatrix::new(cols).unwrap(), &y[p..]).unwrap();
        prop_assert_eq!(fit.t_eff(), t - p);
        prop_assert!(rel_close(fit.intercepts[1], standalone.coefficients[0], 1e-10));
        for lag in 0..p {
            prop_assert!(rel_close(fit.coefficients[lag][(1, 0)], standalone.coefficients[1 + 2 * lag], 1e-10));
            prop_assert!(rel_close(fit.coefficients[lag][(1, 1)], standalone.coefficients[2 + 2 * lag], 1e-10));
        }
    }

    #[test]
    fn ar_forecast_recomputes_from_lags(seed in any::<u64>(), p in 1usize..6) {
        let y = ar1(seed, 80, 0.6);
        let fit = fit_ar_values("y", &y, p).unwrap();
        let mut manual = fit.coefficients[0];
        for lag in 1..=p {
            manual += fit.coefficients[lag] * y[y.len() - lag];
        }
        prop_assert!((ar_forecast(&fit, &y) - manual).abs() <= 1e-12 * manual.abs().max(1.0));
    }

    #[test]
    fn nowcast_fits_share_rows(seed in any::<u64>()) {
        let (x, y) = coupled(seed, 120, 0.4);
        let t = MonthlySeries::unrestricted("y", ym(2004, 1), y).unwrap();
        let i = MonthlySeries::unrestricted("x", ym(2004, 1), x).unwrap();
        let fit = fit_nowcast(&t, &i, NowcastSpec::default()).unwrap();
        prop_assert_eq!(&fit.unrestricted.dependent, &fit.restricted.dependent);
        prop_assert_eq!(fit.unrestricted.n, 108);
    }

    #[test]
    fn rmse_dominates_mae(pairs in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..60)) {
        let m = mae(&pairs).unwrap();
        let r = rmse(&pairs).unwrap();
        prop_assert!(m >= 0.0);
        prop_assert!(r >= m - 1e-12 * r.max(1.0));
    }

    #[test]
    fn equal_absolute_errors_give_equal_mae_and_rmse(
        c in 0.0f64..100.0,
        signs in prop::collection::vec(any::<bool>(), 1..40),
    ) {
        let pairs: Vec<(f64, f64)> = signs.iter().map(|s| if *s { (c, 0.0) } else { (0.0, c) }).collect();
        let m = mae(&pairs).unwrap();
        prop_assert!((rmse(&pairs).unwrap() - m).abs() <= 1e-12 * m.max(1.0));
    }

    #[test]
    fn dm_is_antisymmetric(seed in any::<u64>(), t in 6usize..60) {
        let e1 = normals(seed, t);
        let e2 = normals(seed ^ 0x5eed, t);
        let a = dm_test(&e1, &e2, DmOptions::default()).unwrap();
        let b = dm_test(&e2, &e1, DmOptions::default()).unwrap();
        prop_assert_eq!(a.statistic, -b.statistic);
    }

    #[test]
    fn dm_depends_only_on_loss_differential(seed in any::<u64>(), t in 6usize..60) {
        let e1 = normals(seed, t);
        let e2 = normals(seed ^ 0xbeef, t);
        let d: Vec<f64> = e1.iter().zip(&e2).map(|(a, b)| a * a - b * b).collect();
        // same differential built from different error pairs: e1' = sqrt(d + k), e2' = sqrt(k)
        let k = d.iter().fold(0.0f64, |m, v| m.max(-v)) + 1.0;
        let f1: Vec<f64> = d.iter().map(|v| (v + k).sqrt()).collect();
        let f2 = vec![k.sqrt(); t];
        let a = dm_test(&e1, &e2, DmOptions::default()).unwrap();
        let b = dm_test(&f1, &f2, DmOptions::default()).unwrap();
        let c = dm_test_differential(&d, DmOptions::default()).unwrap();
        prop_assert!(rel_close(a.statistic, b.statistic, 1e-9));
        prop_assert_eq!(a.statistic, c.statistic);
    }

    #[test]
    fn dm_squared_loss_is_scale_invariant(seed in any::<u64>(), t in 6usize..60, c in 1e-3f64..1e3) {
        let e1 = normals(seed, t);
        let e2 = normals(seed ^ 0xfeed, t);
        let s1: Vec<f64> = e1.iter().map(|v| c * v).collect();
        let s2: Vec<f64> = e2.iter().map(|v| c * v).collect();
        let a = dm_test(&e1, &e2, DmOptions::default()).unwrap();
        let b = dm_test(&s1, &s2, DmOptions::default()).unwrap();
        prop_assert!(rel_close(a.statistic, b.statistic, 1e-10));
    }
}

#[test]
fn leap_february_weights_sum_to_29_days() {
    let first = chrono::NaiveDate::from_ymd_opt(2008, 1, 27).unwrap();
    let w = WeeklySeries::new("w", first, vec![1.0; 6]).unwrap();
    let weights = month_weights(&w);
    assert_eq!(weights[&ym(2008, 2)].1, 29);
    let m = aggregate_weekly_to_monthly(&w).unwrap();
    assert_eq!(m.start(), ym(2008, 2));
    assert_eq!(m.values(), &[1.0]);
}
