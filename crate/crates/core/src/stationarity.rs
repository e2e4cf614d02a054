//! Augmented Dickey-Fuller (null: unit root) and KPSS (null: stationarity)
//! tests.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hypothesis::{bracket_from_critical, interpolate_p, Level, PValue, Tail, TestReport, TestSpec};
use crate::ols::{bartlett_weight, default_bandwidth, ols_fit, DesignMatrix};
use crate::series::MonthlySeries;

/// Deterministic terms and augmentation lags of the ADF regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdfSpec {
    pub lags: usize,
    pub intercept: bool,
    pub trend: bool,
}

impl Default for AdfSpec {
    fn default() -> Self {
        Self { lags: 3, intercept: true, trend: true }
    }
}

/// Sample sizes of the Dickey-Fuller tables.
const DF_SAMPLE_SIZES: [f64; 6] = [25.0, 50.0, 100.0, 250.0, 500.0, f64::INFINITY];

// Dickey-Fuller t-statistic critical values (Fuller 1976), rows 1%, 5%, 10%.
const DF_NONE: [[f64; 6]; 3] = [
    [-2.66, -2.62, -2.60, -2.58, -2.58, -2.58],
    [-1.95, -1.95, -1.95, -1.95, -1.95, -1.95],
    [-1.60, -1.61, -1.61, -1.62, -1.62, -1.62],
];
const DF_CONST: [[f64; 6]; 3] = [
    [-3.75, -3.58, -3.51, -3.46, -3.44, -3.43],
    [-3.00, -2.93, -2.89, -2.88, -2.87, -2.86],
    [-2.63, -2.60, -2.58, -2.57, -2.57, -2.57],
];
const DF_TREND: [[f64; 6]; 3] = [
    [-4.38, -4.15, -4.04, -3.99, -3.98, -3.96],
    [-3.60, -3.50, -3.45, -3.43, -3.42, -3.41],
    [-3.24, -3.18, -3.15, -3.13, -3.13, -3.12],
];

/// Critical values for a sample of `n` regression observations, linear in
/// `1/n` between tabulated sizes; samples below 25 use the 25 row.
pub fn adf_critical_values(n: usize, intercept: bool, trend: bool) -> Vec<(Level, f64)> {
    let table = match (intercept, trend) {
        (_, true) => &DF_TREND,
        (true, false) => &DF_CONST,
        (false, false) => &DF_NONE,
    };
    let inv = 1.0 / n as f64;
    Level::ALL
        .iter()
        .zip(table.iter())
        .map(|(&level, row)| (level, interpolate_inverse_n(inv, row)))
        .collect()
}

fn interpolate_inverse_n(inv: f64, row: &[f64; 6]) -> f64 {
    let inv_sizes: Vec<f64> = DF_SAMPLE_SIZES.iter().map(|s| 1.0 / s).collect();
    if inv >= inv_sizes[0] {
        return row[0];
    }
    for i in 0..5 {
        let (hi, lo) = (inv_sizes[i], inv_sizes[i + 1]);
        if inv <= hi && inv >= lo {
            let t = (inv - lo) / (hi - lo);
            return row[i + 1] + t * (row[i] - row[i + 1]);
        }
    }
    row[5]
}

/// ADF test on a monthly series.
pub fn adf_test(s: &MonthlySeries, spec: AdfSpec) -> Result<TestReport> {
    adf_test_values(s.values(), spec)
}

/// Regresses `Δz_t` on `z_{t-1}`, the deterministic terms and
/// `Δz_{t-1}, …, Δz_{t-p}`; the statistic is the t ratio on `z_{t-1}`.
pub fn adf_test_values(z: &[f64], spec: AdfSpec) -> Result<TestReport> {
    if spec.trend && !spec.intercept {
        return Err(Error::InvalidSpecification("ADF trend requires an intercept"));
    }
    let p = spec.lags;
    let d = usize::from(spec.intercept) + usize::from(spec.trend);
    let needed = (p + 4 + d).max(2 * p + 3 + d);
    if z.len() < needed {
        return Err(Error::SeriesTooShort { needed, got: z.len() });
    }
    if z.iter().all(|v| *v == z[0]) {
        return Err(Error::ConstantSeries);
    }
    let dz: Vec<f64> = z.windows(2).map(|w| w[1] - w[0]).collect();
    // dz[t-1] = z_t - z_{t-1}; usable t run from p+1 to n-1
    let rows: Vec<usize> = (p + 1..z.len()).collect();
    let nobs = rows.len();
    let y: Vec<f64> = rows.iter().map(|&t| dz[t - 1]).collect();

    let mut cols: Vec<(alloc::string::String, Vec<f64>)> = Vec::new();
    cols.push(("level_lag".into(), rows.iter().map(|&t| z[t - 1]).collect()));
    if spec.intercept {
        cols.push(("const".into(), alloc::vec![1.0; nobs]));
    }
    if spec.trend {
        cols.push(("trend".into(), (1..=nobs).map(|t| t as f64).collect()));
    }
    for lag in 1..=p {
        cols.push((format!("diff_lag{lag}"), rows.iter().map(|&t| dz[t - 1 - lag]).collect()));
    }
    let fit = ols_fit(&DesignMatrix::new(cols)?, &y)?;
    let statistic = fit.t_ratios()[0];

    let critical_values = adf_critical_values(nobs, spec.intercept, spec.trend);
    let bracket = bracket_from_critical(statistic, Tail::Lower, &critical_values);
    let p_interpolated = interpolate_p(statistic, &critical_values);
    Ok(TestReport {
        test_name: "ADF".into(),
        statistic,
        tail: Tail::Lower,
        critical_values,
        p_value: PValue::Bracket(bracket),
        p_interpolated,
        spec: TestSpec { intercept: spec.intercept, trend: spec.trend, lags: Some(p), bandwidth: None },
        n: nobs,
        df: None,
        degenerate: false,
    })
}

/// Deterministic specification and bandwidth of the KPSS test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KpssSpec {
    pub trend: bool,
    /// `None` selects `floor(4 (n/100)^(2/9))`.
    pub bandwidth: Option<usize>,
}

impl Default for KpssSpec {
    fn default() -> Self {
        Self { trend: true, bandwidth: None }
    }
}

pub const KPSS_LEVEL_CRITICAL: [(Level, f64); 3] = [(Level::One, 0.739), (Level::Five, 0.463), (Level::Ten, 0.347)];
pub const KPSS_TREND_CRITICAL: [(Level, f64); 3] = [(Level::One, 0.216), (Level::Five, 0.146), (Level::Ten, 0.119)];

pub fn kpss_test(s: &MonthlySeries, spec: KpssSpec) -> Result<TestReport> {
    kpss_test_values(s.values(), spec)
}

/// `Σ S_t² / (n² ω̂²)` with `S_t` the partial sums of the residuals from
/// regressing `z` on an intercept (and trend), `ω̂²` the Bartlett long-run
/// variance of those residuals.
///
/// Residuals that vanish to rounding define the statistic as 0; the
/// report is then flagged degenerate.
pub fn kpss_test_values(z: &[f64], spec: KpssSpec) -> Result<TestReport> {
    let n = z.len();
    if n < 10 {
        return Err(Error::SeriesTooShort { needed: 10, got: n });
    }
    let bandwidth = spec.bandwidth.unwrap_or_else(|| default_bandwidth(n));
    if bandwidth >= n {
        return Err(Error::BandwidthTooLarge { bandwidth, n });
    }
    let mut cols: Vec<(&str, Vec<f64>)> = alloc::vec![("const", alloc::vec![1.0; n])];
    if spec.trend {
        cols.push(("trend", (1..=n).map(|t| t as f64).collect()));
    }
    let resid = ols_fit(&DesignMatrix::new(cols)?, z)?.residuals;

    let scale = z.iter().fold(1.0_f64, |m, v| m.max(libm::fabs(*v)));
    let degenerate = resid.iter().all(|e| libm::fabs(*e) <= 1e-12 * scale);
    let statistic = if degenerate {
        0.0
    } else {
        let mut partial = 0.0;
        let eta: f64 = resid
            .iter()
            .map(|e| {
                partial += e;
                partial * partial
            })
            .sum::<f64>()
            / (n as f64 * n as f64);
        eta / long_run_variance(&resid, bandwidth)
    };

    let critical_values = if spec.trend { KPSS_TREND_CRITICAL } else { KPSS_LEVEL_CRITICAL }.to_vec();
    let bracket = bracket_from_critical(statistic, Tail::Upper, &critical_values);
    let p_interpolated = interpolate_p(statistic, &critical_values);
    Ok(TestReport {
        test_name: "KPSS".into(),
        statistic,
        tail: Tail::Upper,
        critical_values,
        p_value: PValue::Bracket(bracket),
        p_interpolated,
        spec: TestSpec { intercept: true, trend: spec.trend, lags: None, bandwidth: Some(bandwidth) },
        n,
        df: None,
        degenerate,
    })
}

/// Bartlett-weighted long-run variance of a zero-mean sequence,
/// `(Σe² + 2 Σ_j w_j Σ_t e_t e_{t-j}) / n`.
pub fn long_run_variance(e: &[f64], bandwidth: usize) -> f64 {
    let n = e.len();
    let mut s: f64 = e.iter().map(|v| v * v).sum();
    for j in 1..=bandwidth.min(n.saturating_sub(1)) {
        let cov: f64 = e[j..].iter().zip(&e[..n - j]).map(|(a, b)| a * b).sum();
        s += 2.0 * bartlett_weight(j, bandwidth) * cov;
    }
    s / n as f64
}
