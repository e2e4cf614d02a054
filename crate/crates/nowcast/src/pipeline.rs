//! Per-country orchestration: stationarity grid, elasticity regression,
//! nowcasting regression, rolling AR/VAR forecasts and Granger tests.

use nowcast_core::forecast::{dm_test, DmResult, ForecastEvaluation};
use nowcast_core::hypothesis::TestReport;
use nowcast_core::ols::{ols_fit_hac, DesignMatrix};
use nowcast_core::series::{
    aggregate_weekly_to_monthly, first_difference, log_transform, MonthlySeries, Transform,
};
use nowcast_core::stationarity::{adf_test, kpss_test};
use nowcast_core::var::{
    fit_nowcast, fit_var, forecast_rolling, granger_test, select_var_order_aic, ModelSpec, NowcastFit,
};

use crate::config::{Config, CountryConfig};
use crate::error::{PipelineError, Stage, StageFailure};
use crate::ingest::{read_trends_csv, read_unemployment_csv};

pub const TARGET: &str = "dUR";
pub const INDICATOR: &str = "dlogGI";

/// Which analysis stages to run. Data preparation always runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stages {
    pub stationarity: bool,
    pub elasticity: bool,
    pub nowcast: bool,
    pub forecast: bool,
    pub causality: bool,
}

impl Stages {
    pub const ALL: Stages = Stages { stationarity: true, elasticity: true, nowcast: true, forecast: true, causality: true };
    pub const NONE: Stages =
        Stages { stationarity: false, elasticity: false, nowcast: false, forecast: false, causality: false };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Concurrent,
}

/// Monthly inputs on the configured sample window.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedSeries {
    pub unemployment: MonthlySeries,
    pub search: MonthlySeries,
    pub d_unemployment: MonthlySeries,
    pub d_log_search: MonthlySeries,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationarityRow {
    pub variable: &'static str,
    pub transform: Transform,
    pub adf: TestReport,
    pub kpss: TestReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Elasticity {
    pub coefficient: f64,
    pub intercept: f64,
    pub hac_std_error: f64,
    pub hac_p_value: f64,
    pub bandwidth: usize,
    pub r2: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastComparison {
    pub lags: usize,
    pub ar: ForecastEvaluation,
    pub var: ForecastEvaluation,
    /// Loss differential is AR minus VAR, so a positive statistic favours the VAR.
    pub dm: DmResult,
}

impl ForecastComparison {
    pub fn rmse_change_pct(&self) -> f64 {
        100.0 * (self.var.rmse - self.ar.rmse) / self.ar.rmse
    }

    pub fn mae_change_pct(&self) -> f64 {
        100.0 * (self.var.mae - self.ar.mae) / self.ar.mae
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Causality {
    pub lags: usize,
    pub t_eff: usize,
    pub indicator_to_target: TestReport,
    pub target_to_indicator: TestReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountryResult {
    pub config: CountryConfig,
    pub input_digests: (String, String),
    pub series: PreparedSeries,
    pub stationarity: Option<Vec<StationarityRow>>,
    pub elasticity: Option<Elasticity>,
    pub nowcast: Option<NowcastFit>,
    pub forecast: Option<ForecastComparison>,
    pub causality: Option<Causality>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineReport {
    pub fingerprint: String,
    pub config: Config,
    pub stages: Stages,
    pub countries: Vec<CountryResult>,
}

fn sha256_file(path: &std::path::Path) -> String {
    use sha2::{Digest, Sha256};
    std::fs::read(path)
        .map(|bytes| Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
        .unwrap_or_default()
}

pub fn prepare(cfg: &CountryConfig) -> Result<PreparedSeries, PipelineError> {
    let fail = |stage, e: StageFailure| PipelineError { country: cfg.code.clone(), stage, source: e };
    let ur = read_unemployment_csv(&cfg.unemployment_path).map_err(|e| fail(Stage::Ingest, e.into()))?;
    let trends = read_trends_csv(&cfg.trends_path).map_err(|e| fail(Stage::Ingest, e.into()))?;
    let prep = || -> nowcast_core::error::Result<PreparedSeries> {
        let unemployment = ur.window(cfg.sample_start, cfg.sample_end)?.with_id("UR");
        let search = aggregate_weekly_to_monthly(&trends)?.window(cfg.sample_start, cfg.sample_end)?.with_id("GI");
        let d_unemployment = first_difference(&unemployment)?.with_id(TARGET);
        let d_log_search = first_difference(&log_transform(&search)?)?.with_id(INDICATOR);
        Ok(PreparedSeries { unemployment, search, d_unemployment, d_log_search })
    };
    prep().map_err(|e| fail(Stage::Prepare, e.into()))
}

fn stationarity_grid(cfg: &CountryConfig, s: &PreparedSeries) -> nowcast_core::error::Result<Vec<StationarityRow>> {
    let search_log = log_transform(&s.search)?;
    let cases: [(&'static str, MonthlySeries); 6] = [
        ("UR", s.unemployment.clone()),
        ("UR", s.d_unemployment.clone()),
        ("GI", s.search.clone()),
        ("GI", search_log),
        ("GI", first_difference(&s.search)?),
        ("GI", s.d_log_search.clone()),
    ];
    cases
        .into_iter()
        .map(|(variable, series)| {
            Ok(StationarityRow {
                variable,
                transform: series.transform(),
                adf: adf_test(&series, cfg.adf)?,
                kpss: kpss_test(&series, cfg.kpss)?,
            })
        })
        .collect()
}

fn elasticity(cfg: &CountryConfig, s: &PreparedSeries) -> nowcast_core::error::Result<Elasticity> {
    let x = s.d_log_search.values().to_vec();
    let design = DesignMatrix::new(vec![("const", vec![1.0; x.len()]), (INDICATOR, x)])?;
    let fit = ols_fit_hac(&design, s.d_unemployment.values(), cfg.hac_bandwidth)?;
    let se = fit.hac_std_errors().expect("HAC requested");
    let p = fit.hac_p_values().expect("HAC requested");
    Ok(Elasticity {
        coefficient: fit.coefficients[1],
        intercept: fit.coefficients[0],
        hac_std_error: se[1],
        hac_p_value: p[1],
        bandwidth: fit.cov_hac.as_ref().map_or(0, |h| h.bandwidth),
        r2: fit.r2,
        n: fit.n,
    })
}

/// VAR order for forecasting and causality: fixed, or chosen by AIC on the
/// training sample up to `var_lags`.
fn var_order(cfg: &CountryConfig, s: &PreparedSeries) -> nowcast_core::error::Result<usize> {
    if !cfg.select_var_order {
        return Ok(cfg.var_lags);
    }
    let y = s.d_unemployment.window(s.d_unemployment.start(), cfg.train_end)?;
    let x = s.d_log_search.window(s.d_log_search.start(), cfg.train_end)?;
    select_var_order_aic(&[TARGET, INDICATOR], &[y.values(), x.values()], cfg.var_lags)
}

fn forecast(cfg: &CountryConfig, s: &PreparedSeries, p: usize) -> nowcast_core::error::Result<ForecastComparison> {
    let y = s.d_unemployment.window(s.d_unemployment.start(), cfg.forecast_end)?;
    let x = s.d_log_search.window(s.d_log_search.start(), cfg.forecast_end)?;
    let h = cfg.forecast_horizon();
    let ar = forecast_rolling(ModelSpec::Ar(p), &y, &x, cfg.train_end, h, cfg.window)?;
    let var = forecast_rolling(ModelSpec::Var(p), &y, &x, cfg.train_end, h, cfg.window)?;
    let ar = ForecastEvaluation::from_records(&ar)?;
    let var = ForecastEvaluation::from_records(&var)?;
    let dm = dm_test(&ar.errors(), &var.errors(), cfg.dm)?;
    Ok(ForecastComparison { lags: p, ar, var, dm })
}

fn causality(cfg: &CountryConfig, s: &PreparedSeries, p: usize) -> nowcast_core::error::Result<Causality> {
    let y = s.d_unemployment.window(s.d_unemployment.start(), cfg.train_end)?;
    let x = s.d_log_search.window(s.d_log_search.start(), cfg.train_end)?;
    let fit = fit_var((&y, &x), p)?;
    Ok(Causality {
        lags: p,
        t_eff: fit.t_eff(),
        indicator_to_target: granger_test(&fit, INDICATOR, TARGET)?,
        target_to_indicator: granger_test(&fit, TARGET, INDICATOR)?,
    })
}

pub fn run_country(cfg: &CountryConfig, stages: Stages) -> Result<CountryResult, PipelineError> {
    let series = prepare(cfg)?;
    let tag = |stage| move |e: nowcast_core::error::Error| PipelineError::new(&cfg.code, stage, e);
    let p = if stages.forecast || stages.causality {
        Some(var_order(cfg, &series).map_err(tag(Stage::Forecast))?)
    } else {
        None
    };
    let mut result = CountryResult {
        config: cfg.clone(),
        input_digests: (sha256_file(&cfg.unemployment_path), sha256_file(&cfg.trends_path)),
        stationarity: None,
        elasticity: None,
        nowcast: None,
        forecast: None,
        causality: None,
        series,
    };
    let s = &result.series;
    if stages.stationarity {
        result.stationarity = Some(stationarity_grid(cfg, s).map_err(tag(Stage::Stationarity))?);
    }
    if stages.elasticity {
        result.elasticity = Some(elasticity(cfg, s).map_err(tag(Stage::Elasticity))?);
    }
    if stages.nowcast {
        result.nowcast = Some(fit_nowcast(&s.d_unemployment, &s.d_log_search, cfg.nowcast).map_err(tag(Stage::Nowcast))?);
    }
    if let (true, Some(p)) = (stages.forecast, p) {
        result.forecast = Some(forecast(cfg, s, p).map_err(tag(Stage::Forecast))?);
    }
    if let (true, Some(p)) = (stages.causality, p) {
        result.causality = Some(causality(cfg, s, p).map_err(tag(Stage::Causality))?);
    }
    Ok(result)
}

/// Runs every configured country. Results keep config order whatever the
/// execution mode; all failures are collected.
pub fn run_pipeline(config: &Config, stages: Stages, execution: Execution) -> Result<PipelineReport, Vec<PipelineError>> {
    let outcomes: Vec<Result<CountryResult, PipelineError>> = match execution {
        Execution::Sequential => config.countries.iter().map(|c| run_country(c, stages)).collect(),
        Execution::Concurrent => std::thread::scope(|scope| {
            let handles: Vec<_> =
                config.countries.iter().map(|c| scope.spawn(move || run_country(c, stages))).collect();
            handles.into_iter().map(|h| h.join().expect("country worker panicked")).collect()
        }),
    };
    let mut countries = Vec::with_capacity(outcomes.len());
    let mut errors = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(r) => countries.push(r),
            Err(e) => errors.push(e),
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    Ok(PipelineReport { fingerprint: config.fingerprint(), config: config.clone(), stages, countries })
}
