//! Deterministic text report and plot-data files.
//!
//! The report is `key = value` lines grouped under `[COUNTRY.section]`
//! headers, with fixed-width tables for the stationarity grid and the
//! forecast comparison. Nothing in it depends on the clock or machine.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nowcast_core::hypothesis::{Level, TestReport};

use crate::config::window_label;
use crate::error::Error;
use crate::pipeline::{CountryResult, PipelineReport, INDICATOR, TARGET};

pub const REPORT_FILE: &str = "report.txt";

/// Fixed four-decimal formatting without negative zero.
pub fn num(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".to_string()
    } else {
        s
    }
}

fn p_with_stars(t: &TestReport) -> String {
    format!("{} {}", p_text(t), t.stars()).trim_end().to_string()
}

fn p_text(t: &TestReport) -> String {
    match t.exact_p() {
        Some(p) => num(p),
        None => t.bracket().label().to_string(),
    }
}

fn spec_text(t: &TestReport) -> String {
    let terms = match (t.spec.intercept, t.spec.trend) {
        (true, true) => "intercept+trend",
        (true, false) => "intercept",
        (false, true) => "trend",
        (false, false) => "none",
    };
    match (t.spec.lags, t.spec.bandwidth) {
        (Some(l), _) => format!("{terms}, lags {l}"),
        (None, Some(b)) => format!("{terms}, bandwidth {b}"),
        (None, None) => terms.to_string(),
    }
}

pub fn render(report: &PipelineReport) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "nowcast report");
    let _ = writeln!(w, "version = {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(w, "config_fingerprint = {}", report.fingerprint);
    let codes: Vec<&str> = report.countries.iter().map(|c| c.config.code.as_str()).collect();
    let _ = writeln!(w, "countries = {}", codes.join(", "));
    let s = report.stages;
    let stages: Vec<&str> = [
        (s.stationarity, "stationarity"),
        (s.elasticity, "elasticity"),
        (s.nowcast, "nowcast"),
        (s.forecast, "forecast"),
        (s.causality, "causality"),
    ]
    .into_iter()
    .filter_map(|(on, name)| on.then_some(name))
    .collect();
    let _ = writeln!(w, "stages = {}", stages.join(", "));
    for c in &report.countries {
        country(w, c);
    }
    out
}

fn country(w: &mut String, c: &CountryResult) {
    let code = &c.config.code;
    let _ = writeln!(w, "\n[{code}.config]");
    w.push_str(&c.config.canonical());
    let _ = writeln!(w, "unemployment_sha256 = {}", c.input_digests.0);
    let _ = writeln!(w, "trends_sha256 = {}", c.input_digests.1);
    let s = &c.series;
    let _ = writeln!(w, "levels = {}..{} ({} months)", s.unemployment.start(), s.unemployment.end(), s.unemployment.len());
    let _ = writeln!(
        w,
        "differences = {}..{} ({} months)",
        s.d_unemployment.start(),
        s.d_unemployment.end(),
        s.d_unemployment.len()
    );

    if let Some(rows) = &c.stationarity {
        let _ = writeln!(w, "\n[{code}.stationarity]");
        if let Some(r) = rows.first() {
            let _ = writeln!(w, "adf_spec = {}", spec_text(&r.adf));
            let _ = writeln!(w, "kpss_spec = {}", spec_text(&r.kpss));
        }
        let _ = writeln!(
            w,
            "{:<6} {:<9} {:>4} {:>10} {:<3} {:>7} {:>10} {:<3} {:>7}",
            "series", "transform", "n", "adf", "", "adf_p", "kpss", "", "kpss_p"
        );
        for r in rows {
            let _ = writeln!(
                w,
                "{:<6} {:<9} {:>4} {:>10} {:<3} {:>7} {:>10} {:<3} {:>7}",
                r.variable,
                r.transform.label(),
                r.adf.n,
                num(r.adf.statistic),
                r.adf.stars(),
                p_text(&r.adf),
                num(r.kpss.statistic),
                r.kpss.stars(),
                p_text(&r.kpss),
            );
        }
    }

    if let Some(e) = &c.elasticity {
        let _ = writeln!(w, "\n[{code}.elasticity]");
        let _ = writeln!(w, "model = {TARGET} ~ const + {INDICATOR}");
        let _ = writeln!(w, "n = {}", e.n);
        let _ = writeln!(w, "coefficient = {}", num(e.coefficient));
        let _ = writeln!(w, "intercept = {}", num(e.intercept));
        let _ = writeln!(w, "hac_std_error = {}", num(e.hac_std_error));
        let _ = writeln!(w, "hac_p_value = {}", num(e.hac_p_value));
        let _ = writeln!(w, "hac_bandwidth = {}", e.bandwidth);
        let _ = writeln!(w, "r2 = {}", num(e.r2));
    }

    if let Some(n) = &c.nowcast {
        let f = &n.indicator_joint_f;
        let _ = writeln!(w, "\n[{code}.nowcast]");
        let _ = writeln!(
            w,
            "model = {TARGET} ~ const + {TARGET} lags {}..{} + {INDICATOR} lags 0..{}",
            n.spec.publication_lag, n.spec.max_lag, n.spec.max_lag
        );
        let _ = writeln!(w, "first_target = {}", n.first_target);
        let _ = writeln!(w, "n = {}", n.unrestricted.n);
        let _ = writeln!(w, "adj_r2_without = {}", num(n.adj_r2_without));
        let _ = writeln!(w, "adj_r2_with = {}", num(n.adj_r2_with));
        let _ = writeln!(w, "f_statistic = {}", num(f.statistic));
        if let Some((d1, d2)) = f.df {
            let _ = writeln!(w, "f_df = {d1}, {d2}");
        }
        let _ = writeln!(w, "f_p_value = {}", p_with_stars(f));
    }

    if let Some(f) = &c.forecast {
        let _ = writeln!(w, "\n[{code}.forecast]");
        let _ = writeln!(w, "lags = {}", f.lags);
        let _ = writeln!(w, "window = {}", window_label(c.config.window));
        let _ = writeln!(w, "{:<7} {:>10} {:>10} {:>10}", "month", "actual", "ar", "var");
        for (i, m) in f.ar.months.iter().enumerate() {
            let _ = writeln!(
                w,
                "{:<7} {:>10} {:>10} {:>10}",
                m.to_string(),
                num(f.ar.pairs[i].1),
                num(f.ar.pairs[i].0),
                num(f.var.pairs[i].0)
            );
        }
        let _ = writeln!(w, "{:<7} {:>10} {:>10} {:>10}", "metric", "ar", "var", "change");
        let _ = writeln!(
            w,
            "{:<7} {:>10} {:>10} {:>9}%",
            "rmse",
            num(f.ar.rmse),
            num(f.var.rmse),
            format!("{:.2}", f.rmse_change_pct())
        );
        let _ = writeln!(
            w,
            "{:<7} {:>10} {:>10} {:>9}%",
            "mae",
            num(f.ar.mae),
            num(f.var.mae),
            format!("{:.2}", f.mae_change_pct())
        );
        let _ = writeln!(w, "dm_loss = {}", f.dm.loss.label());
        let _ = writeln!(w, "dm_bandwidth = {}", f.dm.bandwidth);
        let _ = writeln!(w, "dm_small_sample = {}", f.dm.small_sample);
        let _ = writeln!(w, "dm_statistic = {}", num(f.dm.statistic));
        let _ = writeln!(w, "dm_p_one_sided = {}", num(f.dm.p_one_sided));
        let _ = writeln!(w, "dm_p_two_sided = {}", num(f.dm.p_two_sided));
    }

    if let Some(g) = &c.causality {
        let _ = writeln!(w, "\n[{code}.causality]");
        let _ = writeln!(w, "lags = {}", g.lags);
        let _ = writeln!(w, "t_eff = {}", g.t_eff);
        for (key, t) in [("indicator_to_target", &g.indicator_to_target), ("target_to_indicator", &g.target_to_indicator)] {
            let _ = writeln!(w, "{key}.test = {}", t.test_name);
            let _ = writeln!(w, "{key}.f = {}", num(t.statistic));
            if let Some((d1, d2)) = t.df {
                let _ = writeln!(w, "{key}.df = {d1}, {d2}");
            }
            let _ = writeln!(w, "{key}.p_value = {}", p_with_stars(t));
            let _ = writeln!(w, "{key}.rejects_5pct = {}", t.rejects(Level::Five));
        }
    }
}

fn plot_csv(header: &str, rows: impl Iterator<Item = (String, f64, f64)>) -> String {
    let mut s = format!("{header}\n");
    for (m, a, b) in rows {
        let _ = writeln!(s, "{m},{a},{b}");
    }
    s
}

/// Plot data in levels and in differences, one file pair per country.
pub fn plot_files(report: &PipelineReport) -> Vec<(String, String)> {
    let mut files = Vec::new();
    for c in &report.countries {
        let s = &c.series;
        let levels = (0..s.unemployment.len())
            .map(|i| (s.unemployment.month_at(i).to_string(), s.unemployment.values()[i], s.search.values()[i]));
        files.push((format!("{}_levels.csv", c.config.code), plot_csv("month,UR,GI", levels)));
        let diffs = (0..s.d_unemployment.len()).map(|i| {
            (s.d_unemployment.month_at(i).to_string(), s.d_unemployment.values()[i], s.d_log_search.values()[i])
        });
        files.push((
            format!("{}_differences.csv", c.config.code),
            plot_csv(&format!("month,{TARGET},{INDICATOR}"), diffs),
        ));
    }
    files
}

/// Writes the report and plot files into `dir`, returning the paths written.
pub fn write_outputs(report: &PipelineReport, dir: &Path) -> Result<Vec<PathBuf>, Error> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Output { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let mut written = Vec::new();
    let files = std::iter::once((REPORT_FILE.to_string(), render(report))).chain(plot_files(report));
    for (name, body) in files {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(io(&path))?;
        written.push(path);
    }
    Ok(written)
}
