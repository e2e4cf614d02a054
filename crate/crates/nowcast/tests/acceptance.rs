//! Acceptance gate. Each test checks one criterion at its stated tolerance
//! and writes a PASS/FAIL line straight to stderr so it shows even when the
//! harness captures output.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nowcast::config::Config;
use nowcast::montecarlo::{power_study, size_study, Design, DEFAULT_SEED};
use nowcast::pipeline::{run_pipeline, Execution, Stages};
use nowcast::report::render;
use nowcast_core::forecast::{dm_test, dm_test_differential, mae, rmse, DmOptions};
use nowcast_core::ols::{hac_covariance, joint_f_test, ols_fit, ols_fit_hac, DesignMatrix};
use nowcast_core::series::{cumulate, first_difference, log_transform, MonthlySeries, YearMonth};
use nowcast_core::stationarity::{adf_test_values, kpss_test_values, AdfSpec, KpssSpec};
use nowcast_core::var::{fit_nowcast, fit_var_values, granger_test, NowcastSpec};
use proptest::prelude::*;
use proptest::test_runner::{Config as RunnerConfig, TestRunner};
use serde_json::Value;

fn verdict(id: u32, name: &str, ok: bool, detail: &str) {
    let status = if ok { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr().lock(), "acceptance {id} {name}: {status} ({detail})");
    assert!(ok, "acceptance {id} {name} failed: {detail}");
}

fn manifest_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn ym(y: i32, m: u32) -> YearMonth {
    YearMonth::new(y, m).unwrap()
}

fn read_pair(path: &Path) -> (Vec<f64>, Vec<f64>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y"));
    lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse::<f64>().unwrap(), b.parse::<f64>().unwrap())
        })
        .unzip()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

struct Deviation {
    worst: f64,
    at: String,
    checks: usize,
}

impl Deviation {
    fn check(&mut self, label: impl Into<String>, ours: f64, oracle: f64) {
        let d = (ours - oracle).abs();
        self.checks += 1;
        if d.is_nan() || d > self.worst {
            self.worst = d;
            self.at = label.into();
        }
    }
}

#[test]
fn oracle_equivalence() {
    let dir = manifest_dir().join("tests/fixtures/oracle");
    let mut dev = Deviation { worst: 0.0, at: String::new(), checks: 0 };
    for k in 1..=6 {
        let (x, y) = read_pair(&dir.join(format!("fixture_{k}.csv")));
        let o: Value = serde_json::from_str(&std::fs::read_to_string(dir.join(format!("fixture_{k}.json"))).unwrap()).unwrap();
        let bw = o["kpss_bandwidth"].as_u64().unwrap() as usize;
        for (name, z) in [("x", &x), ("y", &y)] {
            for (key, trend) in [("adf_ct", true), ("adf_c", false)] {
                let t = adf_test_values(z, AdfSpec { lags: 3, intercept: true, trend }).unwrap();
                dev.check(format!("{k}/{key}/{name}"), t.statistic, o[key][name].as_f64().unwrap());
            }
            for (key, trend) in [("kpss_ct", true), ("kpss_c", false)] {
                let t = kpss_test_values(z, KpssSpec { trend, bandwidth: Some(bw) }).unwrap();
                dev.check(format!("{k}/{key}/{name}"), t.statistic, o[key][name].as_f64().unwrap());
            }
        }
        for block in o["var"].as_array().unwrap() {
            let p = block["p"].as_u64().unwrap() as usize;
            let fit = fit_var_values(&["x", "y"], &[&x, &y], p).unwrap();
            for (eq, key) in [(0, "coef_x_equation"), (1, "coef_y_equation")] {
                let want = floats(&block[key]);
                assert_eq!(want.len(), fit.equations[eq].coefficients.len());
                for (i, (a, b)) in fit.equations[eq].coefficients.iter().zip(&want).enumerate() {
                    dev.check(format!("{k}/var{p}/{key}[{i}]"), *a, *b);
                }
            }
            let xy = granger_test(&fit, "x", "y").unwrap();
            let yx = granger_test(&fit, "y", "x").unwrap();
            dev.check(format!("{k}/var{p}/granger x->y"), xy.statistic, block["granger_x_to_y_f"].as_f64().unwrap());
            dev.check(format!("{k}/var{p}/granger y->x"), yx.statistic, block["granger_y_to_x_f"].as_f64().unwrap());
        }
        let ys = MonthlySeries::unrestricted("y", ym(2000, 1), y.clone()).unwrap();
        let xs = MonthlySeries::unrestricted("x", ym(2000, 1), x.clone()).unwrap();
        let nc = fit_nowcast(&ys, &xs, NowcastSpec::default()).unwrap();
        assert_eq!(nc.unrestricted.n as u64, o["nowcast"]["n"].as_u64().unwrap());
        dev.check(format!("{k}/nowcast F"), nc.indicator_joint_f.statistic, o["nowcast"]["f"].as_f64().unwrap());
        dev.check(format!("{k}/nowcast adj_r2_with"), nc.adj_r2_with, o["nowcast"]["adj_r2_with"].as_f64().unwrap());
        dev.check(format!("{k}/nowcast adj_r2_without"), nc.adj_r2_without, o["nowcast"]["adj_r2_without"].as_f64().unwrap());

        let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
        let dx: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let design = DesignMatrix::new(vec![("const", vec![1.0; dx.len()]), ("dx", dx)]).unwrap();
        let el = &o["elasticity"];
        let fit = ols_fit_hac(&design, &dy, Some(el["bandwidth"].as_u64().unwrap() as usize)).unwrap();
        let white = hac_covariance(&fit, &design, Some(0)).unwrap();
        for i in 0..2 {
            dev.check(format!("{k}/elasticity coef[{i}]"), fit.coefficients[i], floats(&el["coef"])[i]);
            dev.check(format!("{k}/elasticity hac_se[{i}]"), fit.hac_std_errors().unwrap()[i], floats(&el["hac_se"])[i]);
            dev.check(format!("{k}/elasticity white_se[{i}]"), white.matrix[(i, i)].sqrt(), floats(&el["white_se"])[i]);
        }
    }
    let detail = format!("{} values, max |diff| {:.2e} at {}, tolerance 1e-6", dev.checks, dev.worst, dev.at);
    verdict(1, "oracle equivalence", dev.worst <= 1e-6, &detail);
}

#[test]
fn closed_form_checks() {
    let design = DesignMatrix::new(vec![("const", vec![1.0; 3]), ("x", vec![0.0, 1.0, 2.0])]).unwrap();
    let fit = ols_fit(&design, &[1.0, 3.0, 4.0]).unwrap();
    let ols_ok = (fit.coefficients[1] - 1.5).abs() <= 1e-10 && (fit.coefficients[0] - 7.0 / 6.0).abs() <= 1e-10;
    let dm = dm_test_differential(&[2.0, 0.0, 2.0, 0.0], DmOptions::default()).unwrap();
    let dm_ok = (dm.statistic - 2.0).abs() <= 1e-10;
    let pairs = [(1.0, 2.0), (2.0, 4.0)];
    let m = mae(&pairs).unwrap();
    let r = rmse(&pairs).unwrap();
    let metrics_ok = m == 1.5 && r == 2.5f64.sqrt();
    let detail = format!(
        "slope {:.12}, intercept {:.12}, DM {:.12}, MAE {m}, RMSE {r}",
        fit.coefficients[1], fit.coefficients[0], dm.statistic
    );
    verdict(2, "closed-form checks", ols_ok && dm_ok && metrics_ok, &detail);
}

#[test]
fn size_control() {
    let start = Instant::now();
    let s = size_study(DEFAULT_SEED, 2000, Design::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let inside = |r: f64| (0.03..=0.07).contains(&r);
    let ok = inside(s.granger) && inside(s.nowcast) && inside(s.dm) && secs < 60.0;
    let detail = format!(
        "2000 reps at 5%: Granger {:.4}, nowcast F {:.4}, DM {:.4}; band [0.03, 0.07]; {secs:.1}s of 60s",
        s.granger, s.nowcast, s.dm
    );
    verdict(3, "size control", ok, &detail);
}

#[test]
fn power() {
    let mut ok = true;
    let mut parts = Vec::new();
    for coupling in [0.5, 0.8] {
        let p = power_study(DEFAULT_SEED + 1, 500, Design { coupling, ..Design::default() }).unwrap();
        ok &= p.granger > 0.9 && p.nowcast > 0.9 && p.var_beats_ar > 0.9;
        parts.push(format!(
            "coupling {coupling}: Granger {:.3}, nowcast F {:.3}, VAR beats AR {:.3}",
            p.granger, p.nowcast, p.var_beats_ar
        ));
    }
    verdict(4, "power", ok, &format!("500 reps, n = 120; {}; threshold > 0.9", parts.join("; ")));
}

fn normals(seed: u64, n: usize) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect()
}

#[test]
fn round_trip_invariants() {
    let mut runner = TestRunner::new(RunnerConfig { cases: 256, ..RunnerConfig::default() });
    let mut failures = Vec::new();

    let r = runner.run(&prop::collection::vec(-1e3f64..1e3, 2..100), |v| {
        let s = MonthlySeries::unrestricted("s", ym(2004, 1), v.clone()).unwrap();
        let back = cumulate(&first_difference(&s).unwrap(), v[0]);
        for (a, b) in back.values().iter().zip(&v) {
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
        Ok(())
    });
    if let Err(e) = r {
        failures.push(format!("difference/cumulate: {e}"));
    }

    let r = runner.run(&prop::collection::vec(1e-3f64..1e4, 2..100), |v| {
        let s = MonthlySeries::unrestricted("s", ym(2004, 1), v.clone()).unwrap();
        let d = first_difference(&log_transform(&s).unwrap()).unwrap();
        for (k, x) in d.values().iter().enumerate() {
            prop_assert!((x - (v[k + 1] / v[k]).ln()).abs() <= 1e-12);
        }
        Ok(())
    });
    if let Err(e) = r {
        failures.push(format!("log difference: {e}"));
    }

    let r = runner.run(&(any::<u64>(), 8usize..80), |(seed, n)| {
        let x = normals(seed, n);
        let e = normals(seed ^ 1, n);
        let y: Vec<f64> = (0..n).map(|t| 1.0 + x[t] + e[t] * (1.0 + x[t].abs())).collect();
        let d = DesignMatrix::new(vec![("const", vec![1.0; n]), ("x", x.clone())]).unwrap();
        let fit = ols_fit(&d, &y).unwrap();
        let hac = hac_covariance(&fit, &d, Some(0)).unwrap();
        let mut meat = [[0.0; 2]; 2];
        for t in 0..n {
            let row = [1.0, x[t]];
            let e2 = fit.residuals[t] * fit.residuals[t];
            for i in 0..2 {
                for j in 0..2 {
                    meat[i][j] += e2 * row[i] * row[j];
                }
            }
        }
        let b = &fit.xtx_inv;
        for i in 0..2 {
            for j in 0..2 {
                let mut white = 0.0;
                for a in 0..2 {
                    for c in 0..2 {
                        white += b[(i, a)] * meat[a][c] * b[(c, j)];
                    }
                }
                prop_assert!((hac.matrix[(i, j)] - white).abs() <= 1e-12 * white.abs().max(1.0));
            }
        }
        Ok(())
    });
    if let Err(e) = r {
        failures.push(format!("HAC bandwidth 0 vs White: {e}"));
    }

    let r = runner.run(&(any::<u64>(), 8usize..80), |(seed, n)| {
        let x = normals(seed, n);
        let z = normals(seed ^ 2, n);
        let e = normals(seed ^ 3, n);
        let y: Vec<f64> = (0..n).map(|t| x[t] + 0.2 * z[t] + e[t]).collect();
        let d = DesignMatrix::new(vec![("const", vec![1.0; n]), ("x", x), ("z", z)]).unwrap();
        let u = ols_fit(&d, &y).unwrap();
        let restricted = ols_fit(&d.without(&["z"]).unwrap(), &y).unwrap();
        let f = joint_f_test(&u, &restricted, 1).unwrap().statistic;
        let t = u.t_ratios()[2];
        prop_assert!((f - t * t).abs() <= 1e-10 * f.abs().max(1.0));
        Ok(())
    });
    if let Err(e) = r {
        failures.push(format!("F(q=1) vs t^2: {e}"));
    }

    let r = runner.run(&(any::<u64>(), 6usize..80), |(seed, t)| {
        let e1 = normals(seed, t);
        let e2 = normals(seed ^ 4, t);
        let a = dm_test(&e1, &e2, DmOptions::default()).unwrap().statistic;
        let b = dm_test(&e2, &e1, DmOptions::default()).unwrap().statistic;
        prop_assert_eq!(a, -b);
        Ok(())
    });
    if let Err(e) = r {
        failures.push(format!("DM antisymmetry: {e}"));
    }

    let detail = if failures.is_empty() {
        "256 cases each: difference/cumulate 1e-12, log difference 1e-12, HAC(0) = White 1e-12, F = t^2 1e-10, DM antisymmetry exact".to_string()
    } else {
        failures.join("; ")
    };
    verdict(5, "round-trip invariants", failures.is_empty(), &detail);
}

fn synthetic_config() -> Config {
    Config::load(&manifest_dir().join("tests/fixtures/synthetic/config.toml")).unwrap()
}

#[test]
fn pipeline_determinism() {
    let config = synthetic_config();
    let golden = std::fs::read_to_string(manifest_dir().join("tests/fixtures/synthetic/golden/report.txt")).unwrap();
    let a = render(&run_pipeline(&config, Stages::ALL, Execution::Sequential).unwrap());
    let b = render(&run_pipeline(&config, Stages::ALL, Execution::Sequential).unwrap());
    let c = render(&run_pipeline(&config, Stages::ALL, Execution::Concurrent).unwrap());
    let ok = a == golden && b == golden && c == golden;
    let detail = format!(
        "golden {} bytes; sequential x2 {}, concurrent {}",
        golden.len(),
        if a == golden && b == golden { "identical" } else { "differs" },
        if c == golden { "identical" } else { "differs" }
    );
    verdict(6, "pipeline determinism", ok, &detail);
}

/// Where a user-exported real-data snapshot is looked up.
fn snapshot_config() -> PathBuf {
    manifest_dir().join("../../data/snapshot/config.toml")
}

#[test]
fn real_snapshot_direction() {
    let path = snapshot_config();
    if !path.exists() {
        let _ = writeln!(
            std::io::stderr().lock(),
            "acceptance 7 real-data direction: SKIP (environment-dependent; no snapshot at data/snapshot/config.toml)"
        );
        return;
    }
    let config = Config::load(&path).unwrap();
    let report = run_pipeline(&config, Stages::ALL, Execution::Concurrent).unwrap();
    let mut ok = !report.countries.is_empty();
    let mut parts = Vec::new();
    for c in &report.countries {
        let e = c.elasticity.as_ref().unwrap().coefficient;
        let n = c.nowcast.as_ref().unwrap();
        let f = c.forecast.as_ref().unwrap();
        ok &= e > 0.0 && n.adj_r2_with > n.adj_r2_without && f.var.rmse < f.ar.rmse;
        parts.push(format!(
            "{}: elasticity {:.4}, adj R2 {:.4} vs {:.4}, RMSE {:.4} vs {:.4}",
            c.config.code, e, n.adj_r2_with, n.adj_r2_without, f.var.rmse, f.ar.rmse
        ));
    }
    verdict(7, "real-data direction", ok, &parts.join("; "));
}

#[test]
fn performance() {
    let config = synthetic_config();
    let start = Instant::now();
    let report = run_pipeline(&config, Stages::ALL, Execution::Concurrent).unwrap();
    let concurrent = start.elapsed().as_secs_f64();
    let start = Instant::now();
    run_pipeline(&config, Stages::ALL, Execution::Sequential).unwrap();
    let sequential = start.elapsed().as_secs_f64();
    let months = report.countries[0].series.unemployment.len();
    let ok = report.countries.len() == 4 && months == 120 && concurrent < 5.0 && sequential < 5.0;
    let detail = format!("4 countries x {months} months: concurrent {concurrent:.3}s, sequential {sequential:.3}s, limit 5s");
    verdict(8, "performance", ok, &detail);
}
