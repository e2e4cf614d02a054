//! Autoregressions, vector autoregressions, the lag-restricted nowcasting
//! regression, one-step rolling forecasts and Granger causality tests.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hypothesis::TestReport;
use crate::linalg::Matrix;
use crate::ols::{joint_f_test, ols_fit, DesignMatrix, RegressionFit};
use crate::series::{MonthlySeries, YearMonth};

fn lag_name(var: &str, lag: usize) -> String {
    format!("{var}.L{lag}")
}

fn ensure_aligned(a: &MonthlySeries, b: &MonthlySeries) -> Result<()> {
    if a.start() != b.start() || a.len() != b.len() {
        return Err(Error::AlignmentError);
    }
    Ok(())
}

/// `y_t` on an intercept and `y_{t-1..t-p}`.
pub fn fit_ar(y: &MonthlySeries, p: usize) -> Result<RegressionFit> {
    fit_ar_values(y.id(), y.values(), p)
}

pub fn fit_ar_values(name: &str, y: &[f64], p: usize) -> Result<RegressionFit> {
    if p == 0 {
        return Err(Error::InvalidSpecification("lag order must be positive"));
    }
    let needed = (p + 3).max(2 * p + 2);
    if y.len() < needed {
        return Err(Error::SeriesTooShort { needed, got: y.len() });
    }
    let rows = p..y.len();
    let mut cols = vec![("const".to_string(), vec![1.0; rows.len()])];
    for lag in 1..=p {
        cols.push((lag_name(name, lag), rows.clone().map(|t| y[t - lag]).collect()));
    }
    let dep: Vec<f64> = rows.map(|t| y[t]).collect();
    ols_fit(&DesignMatrix::new(cols)?, &dep)
}

/// One-step forecast from an AR fit: intercept plus lag coefficients times
/// the most recent observations of `history` (latest last).
pub fn ar_forecast(fit: &RegressionFit, history: &[f64]) -> f64 {
    let p = fit.coefficients.len() - 1;
    assert!(history.len() >= p, "history shorter than lag order");
    let last = history.len() - 1;
    fit.coefficients[0] + (1..=p).map(|lag| fit.coefficients[lag] * history[last + 1 - lag]).sum::<f64>()
}

/// Equation-by-equation OLS estimate of a VAR(p) with intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct VarFit {
    pub variables: Vec<String>,
    pub p: usize,
    pub intercepts: Vec<f64>,
    /// `coefficients[l-1][(i, j)]`: effect of variable `j` at lag `l` in equation `i`.
    pub coefficients: Vec<Matrix>,
    /// `k × T_eff`.
    pub residuals: Matrix,
    /// Residual cross-products over `T_eff − (1 + k p)`.
    pub residual_covariance: Matrix,
    pub equations: Vec<RegressionFit>,
    pub design: DesignMatrix,
    /// Month of the first dependent observation.
    pub first_target: Option<YearMonth>,
}

impl VarFit {
    pub fn t_eff(&self) -> usize {
        self.residuals.cols()
    }

    pub fn variable_index(&self, label: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v == label)
            .ok_or_else(|| Error::UnknownVariable(label.to_string()))
    }

    /// One-step forecasts of every variable given per-variable histories
    /// (latest last).
    pub fn forecast_one_step(&self, histories: &[&[f64]]) -> Vec<f64> {
        assert_eq!(histories.len(), self.variables.len());
        (0..self.variables.len())
            .map(|i| {
                let mut f = self.intercepts[i];
                for (l, a) in self.coefficients.iter().enumerate() {
                    for (j, h) in histories.iter().enumerate() {
                        f += a[(i, j)] * h[h.len() - 1 - l];
                    }
                }
                f
            })
            .collect()
    }
}

/// Bivariate VAR(p) on two aligned series.
pub fn fit_var(ys: (&MonthlySeries, &MonthlySeries), p: usize) -> Result<VarFit> {
    ensure_aligned(ys.0, ys.1)?;
    let mut fit = fit_var_values(&[ys.0.id(), ys.1.id()], &[ys.0.values(), ys.1.values()], p)?;
    fit.first_target = Some(ys.0.month_at(p));
    Ok(fit)
}

/// VAR(p) on `k` equal-length series. Regressors are ordered
/// `const, v1.L1, …, vk.L1, v1.L2, …`.
pub fn fit_var_values(names: &[&str], data: &[&[f64]], p: usize) -> Result<VarFit> {
    let k = names.len();
    if k == 0 || data.len() != k {
        return Err(Error::DimensionMismatch("one name per series required"));
    }
    if p == 0 {
        return Err(Error::InvalidSpecification("lag order must be positive"));
    }
    if names.iter().enumerate().any(|(i, a)| names[..i].contains(a)) {
        return Err(Error::InvalidSpecification("variable labels must be distinct"));
    }
    let t = data[0].len();
    if data.iter().any(|d| d.len() != t) {
        return Err(Error::AlignmentError);
    }
    let needed = p + 2 + k * p;
    if t < needed {
        return Err(Error::SeriesTooShort { needed, got: t });
    }
    let rows = p..t;
    let mut cols = vec![("const".to_string(), vec![1.0; rows.len()])];
    for lag in 1..=p {
        for (name, d) in names.iter().zip(data) {
            cols.push((lag_name(name, lag), rows.clone().map(|r| d[r - lag]).collect()));
        }
    }
    let design = DesignMatrix::new(cols)?;
    let equations = data
        .iter()
        .map(|d| ols_fit(&design, &d[p..]))
        .collect::<Result<Vec<_>>>()?;

    let t_eff = t - p;
    let intercepts = equations.iter().map(|e| e.coefficients[0]).collect();
    let coefficients = (0..p)
        .map(|l| {
            let mut a = Matrix::zeros(k, k);
            for (i, eq) in equations.iter().enumerate() {
                for j in 0..k {
                    a[(i, j)] = eq.coefficients[1 + l * k + j];
                }
            }
            a
        })
        .collect();
    let mut residuals = Matrix::zeros(k, t_eff);
    for (i, eq) in equations.iter().enumerate() {
        for (s, e) in eq.residuals.iter().enumerate() {
            residuals[(i, s)] = *e;
        }
    }
    let mut residual_covariance = residuals.matmul(&residuals.transpose());
    residual_covariance.scale(1.0 / (t_eff - (1 + k * p)) as f64);

    Ok(VarFit {
        variables: names.iter().map(|n| n.to_string()).collect(),
        p,
        intercepts,
        coefficients,
        residuals,
        residual_covariance,
        equations,
        design,
        first_target: None,
    })
}

/// Akaike criterion `ln det Σ̂ + 2 k² p / T` over a common sample that
/// drops the first `max_p` observations; returns the minimising order.
pub fn select_var_order_aic(names: &[&str], data: &[&[f64]], max_p: usize) -> Result<usize> {
    if max_p == 0 {
        return Err(Error::InvalidSpecification("maximum lag order must be positive"));
    }
    let k = names.len() as f64;
    let mut best = (f64::INFINITY, 1);
    for p in 1..=max_p {
        let trimmed: Vec<&[f64]> = data.iter().map(|d| &d[max_p - p..]).collect();
        let fit = fit_var_values(names, &trimmed, p)?;
        let t = fit.t_eff() as f64;
        let mut ml = fit.residuals.matmul(&fit.residuals.transpose());
        ml.scale(1.0 / t);
        let det = determinant(&ml);
        if det <= 0.0 {
            continue;
        }
        let aic = libm::log(det) + 2.0 * k * k * p as f64 / t;
        if aic < best.0 {
            best = (aic, p);
        }
    }
    Ok(best.1)
}

fn determinant(m: &Matrix) -> f64 {
    let n = m.rows();
    let mut a = m.clone();
    let mut det = 1.0;
    for c in 0..n {
        let pivot = (c..n)
            .max_by(|&i, &j| libm::fabs(a[(i, c)]).total_cmp(&libm::fabs(a[(j, c)])))
            .unwrap_or(c);
        if a[(pivot, c)] == 0.0 {
            return 0.0;
        }
        if pivot != c {
            for j in 0..n {
                let tmp = a[(c, j)];
                a[(c, j)] = a[(pivot, j)];
                a[(pivot, j)] = tmp;
            }
            det = -det;
        }
        det *= a[(c, c)];
        for i in c + 1..n {
            let f = a[(i, c)] / a[(c, c)];
            for j in c..n {
                a[(i, j)] -= f * a[(c, j)];
            }
        }
    }
    det
}

/// F test that all `p` lags of `cause` are zero in the equation of
/// `effect` (null: no Granger causality). The restricted equation is
/// re-estimated on the same rows.
pub fn granger_test(fit: &VarFit, cause: &str, effect: &str) -> Result<TestReport> {
    let ci = fit.variable_index(cause)?;
    let ei = fit.variable_index(effect)?;
    if ci == ei {
        return Err(Error::InvalidSpecification("cause and effect must differ"));
    }
    let drop: Vec<String> = (1..=fit.p).map(|l| lag_name(cause, l)).collect();
    let drop: Vec<&str> = drop.iter().map(String::as_str).collect();
    let restricted_design = fit.design.without(&drop)?;
    let unrestricted = &fit.equations[ei];
    let restricted = ols_fit(&restricted_design, &unrestricted.dependent)?;
    let mut report = joint_f_test(unrestricted, &restricted, fit.p)?;
    report.test_name = format!("Granger {cause} -> {effect}");
    report.spec.lags = Some(fit.p);
    Ok(report)
}

/// Lag structure of the nowcasting regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NowcastSpec {
    /// Smallest own lag available at nowcast time.
    pub publication_lag: usize,
    pub max_lag: usize,
}

impl Default for NowcastSpec {
    fn default() -> Self {
        Self { publication_lag: 3, max_lag: 12 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NowcastFit {
    pub spec: NowcastSpec,
    /// Target on its lags `publication_lag..=max_lag` and the indicator at lags `0..=max_lag`.
    pub unrestricted: RegressionFit,
    /// Same rows without the indicator terms.
    pub restricted: RegressionFit,
    pub adj_r2_with: f64,
    pub adj_r2_without: f64,
    /// Joint F test of all indicator terms.
    pub indicator_joint_f: TestReport,
    pub first_target: YearMonth,
}

/// Nowcasting regression of `target` with own lags starting at the
/// publication lag and contemporaneous plus lagged `indicator` terms.
pub fn fit_nowcast(target: &MonthlySeries, indicator: &MonthlySeries, spec: NowcastSpec) -> Result<NowcastFit> {
    ensure_aligned(target, indicator)?;
    if spec.publication_lag == 0 || spec.publication_lag > spec.max_lag {
        return Err(Error::InvalidSpecification("need 1 <= publication_lag <= max_lag"));
    }
    let (y, x) = (target.values(), indicator.values());
    let m = spec.max_lag;
    let k = 1 + (m + 1 - spec.publication_lag) + (m + 1);
    let n_eff = y.len().saturating_sub(m);
    if n_eff <= k {
        return Err(Error::InsufficientObservations { n: n_eff, k });
    }
    let rows = m..y.len();
    let mut cols = vec![("const".to_string(), vec![1.0; rows.len()])];
    for i in spec.publication_lag..=m {
        cols.push((lag_name(target.id(), i), rows.clone().map(|t| y[t - i]).collect()));
    }
    let mut indicator_cols = Vec::new();
    for j in 0..=m {
        let name = lag_name(indicator.id(), j);
        indicator_cols.push(name.clone());
        cols.push((name, rows.clone().map(|t| x[t - j]).collect()));
    }
    let design = DesignMatrix::new(cols)?;
    let dep: Vec<f64> = rows.map(|t| y[t]).collect();
    let unrestricted = ols_fit(&design, &dep)?;
    let drop: Vec<&str> = indicator_cols.iter().map(String::as_str).collect();
    let restricted = ols_fit(&design.without(&drop)?, &dep)?;
    debug_assert_eq!(restricted.dependent, unrestricted.dependent);
    let mut indicator_joint_f = joint_f_test(&unrestricted, &restricted, m + 1)?;
    indicator_joint_f.test_name = format!("{} lags 0..{m} jointly zero", indicator.id());
    Ok(NowcastFit {
        spec,
        adj_r2_with: unrestricted.adj_r2,
        adj_r2_without: restricted.adj_r2,
        unrestricted,
        restricted,
        indicator_joint_f,
        first_target: target.month_at(m),
    })
}

/// Forecasting model for the target series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelSpec {
    /// Target on its own lags.
    Ar(usize),
    /// Bivariate VAR of target and indicator.
    Var(usize),
}

/// How the estimation sample moves with the forecast origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindowScheme {
    /// All data from the start up to the origin.
    #[default]
    Expanding,
    /// Constant length: the initial training window slides forward.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForecastRecord {
    /// Last month used for estimation.
    pub origin: YearMonth,
    pub target: YearMonth,
    pub forecast: f64,
    pub actual: f64,
}

impl ForecastRecord {
    pub fn error(&self) -> f64 {
        self.forecast - self.actual
    }
}

/// One-step-ahead forecasts of `target` for each month after `train_end`
/// up to `horizon_months`, re-estimating at every origin.
pub fn forecast_rolling(
    spec: ModelSpec,
    target: &MonthlySeries,
    indicator: &MonthlySeries,
    train_end: YearMonth,
    horizon_months: usize,
    scheme: WindowScheme,
) -> Result<Vec<ForecastRecord>> {
    ensure_aligned(target, indicator)?;
    if horizon_months == 0
        || train_end < target.start()
        || train_end.add_months(horizon_months as i64) > target.end()
    {
        return Err(Error::WindowOutOfRange);
    }
    let (y, x) = (target.values(), indicator.values());
    let train_len = target.start().months_until(train_end) as usize + 1;
    (0..horizon_months)
        .map(|h| {
            let end = train_len + h; // exclusive index of the estimation sample
            let begin = match scheme {
                WindowScheme::Expanding => 0,
                WindowScheme::Fixed => h,
            };
            let (ys, xs) = (&y[begin..end], &x[begin..end]);
            let forecast = match spec {
                ModelSpec::Ar(p) => ar_forecast(&fit_ar_values(target.id(), ys, p)?, ys),
                ModelSpec::Var(p) => {
                    let fit = fit_var_values(&[target.id(), indicator.id()], &[ys, xs], p)?;
                    fit.forecast_one_step(&[ys, xs])[0]
                }
            };
            Ok(ForecastRecord {
                origin: target.month_at(end - 1),
                target: target.month_at(end),
                forecast,
                actual: y[end],
            })
        })
        .collect()
}
