//! Forecast accuracy: MAE, RMSE and the Diebold-Mariano test of equal
//! expected loss.

use alloc::vec::Vec;

use crate::dist;
use crate::error::{Error, Result};
use crate::ols::bartlett_weight;
use crate::series::YearMonth;
use crate::var::ForecastRecord;

/// `(1/T) Σ |f − y|` over `(forecast, actual)` pairs.
pub fn mae(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::EmptyForecastSet);
    }
    Ok(pairs.iter().map(|(f, y)| libm::fabs(f - y)).sum::<f64>() / pairs.len() as f64)
}

/// `sqrt((1/T) Σ (f − y)²)` over `(forecast, actual)` pairs.
pub fn rmse(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::EmptyForecastSet);
    }
    let mse = pairs.iter().map(|(f, y)| (f - y) * (f - y)).sum::<f64>() / pairs.len() as f64;
    Ok(libm::sqrt(mse))
}

/// Scored forecasts with per-period absolute and squared losses.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastEvaluation {
    pub months: Vec<YearMonth>,
    pub pairs: Vec<(f64, f64)>,
    pub abs_losses: Vec<f64>,
    pub sq_losses: Vec<f64>,
    pub mae: f64,
    pub rmse: f64,
}

impl ForecastEvaluation {
    pub fn from_records(records: &[ForecastRecord]) -> Result<Self> {
        let pairs: Vec<(f64, f64)> = records.iter().map(|r| (r.forecast, r.actual)).collect();
        Ok(Self {
            months: records.iter().map(|r| r.target).collect(),
            abs_losses: pairs.iter().map(|(f, y)| libm::fabs(f - y)).collect(),
            sq_losses: pairs.iter().map(|(f, y)| (f - y) * (f - y)).collect(),
            mae: mae(&pairs)?,
            rmse: rmse(&pairs)?,
            pairs,
        })
    }

    pub fn errors(&self) -> Vec<f64> {
        self.pairs.iter().map(|(f, y)| f - y).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Loss {
    #[default]
    Squared,
    Absolute,
}

impl Loss {
    pub fn apply(self, e: f64) -> f64 {
        match self {
            Loss::Squared => e * e,
            Loss::Absolute => libm::fabs(e),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Loss::Squared => "squared",
            Loss::Absolute => "absolute",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DmOptions {
    pub loss: Loss,
    /// Forecast horizon `h`; the default bandwidth is `h − 1`.
    pub horizon: usize,
    /// Overrides the Bartlett bandwidth of the long-run variance.
    pub bandwidth: Option<usize>,
    /// Harvey-Leybourne-Newbold rescaling with Student t p-values.
    pub small_sample: bool,
}

impl Default for DmOptions {
    fn default() -> Self {
        Self { loss: Loss::Squared, horizon: 1, bandwidth: None, small_sample: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmResult {
    pub statistic: f64,
    pub p_two_sided: f64,
    /// Against the alternative that the second forecast has lower expected loss.
    pub p_one_sided: f64,
    pub loss: Loss,
    pub lrv_estimate: f64,
    pub mean_differential: f64,
    pub bandwidth: usize,
    pub t: usize,
    pub small_sample: bool,
}

/// Diebold-Mariano test on two forecast error sequences, with loss
/// differential `d_t = L(e1_t) − L(e2_t)`.
pub fn dm_test(errors_1: &[f64], errors_2: &[f64], opts: DmOptions) -> Result<DmResult> {
    if errors_1.len() != errors_2.len() {
        return Err(Error::LengthMismatch { left: errors_1.len(), right: errors_2.len() });
    }
    let d: Vec<f64> = errors_1
        .iter()
        .zip(errors_2)
        .map(|(a, b)| opts.loss.apply(*a) - opts.loss.apply(*b))
        .collect();
    dm_test_differential(&d, opts)
}

/// `S = d̄ / sqrt(LRV/T)` where LRV is the Bartlett-weighted sum of the
/// sample autocovariances of `d` (divisor T). Normal p-values unless the
/// small-sample correction is requested.
pub fn dm_test_differential(d: &[f64], opts: DmOptions) -> Result<DmResult> {
    let t = d.len();
    if t < 4 {
        return Err(Error::SeriesTooShort { needed: 4, got: t });
    }
    if opts.horizon == 0 {
        return Err(Error::InvalidSpecification("forecast horizon must be at least 1"));
    }
    let mean = d.iter().sum::<f64>() / t as f64;
    let scale = d.iter().fold(0.0_f64, |m, v| m.max(libm::fabs(*v)));
    if d.iter().all(|v| libm::fabs(v - mean) <= 1e-12 * scale) {
        return Err(Error::DegenerateLossDifferential);
    }
    let bandwidth = opts.bandwidth.unwrap_or(opts.horizon - 1);
    if bandwidth >= t {
        return Err(Error::BandwidthTooLarge { bandwidth, n: t });
    }
    let autocov = |j: usize| -> f64 {
        d[j..].iter().zip(d).map(|(a, b)| (a - mean) * (b - mean)).sum::<f64>() / t as f64
    };
    let mut lrv = autocov(0);
    for j in 1..=bandwidth {
        lrv += 2.0 * bartlett_weight(j, bandwidth) * autocov(j);
    }
    if lrv <= 0.0 {
        return Err(Error::DegenerateLossDifferential);
    }
    let mut statistic = mean / libm::sqrt(lrv / t as f64);
    let (p_one_sided, p_two_sided) = if opts.small_sample {
        let (h, tf) = (opts.horizon as f64, t as f64);
        statistic *= libm::sqrt((tf + 1.0 - 2.0 * h + h * (h - 1.0) / tf) / tf);
        let df = tf - 1.0;
        (dist::t_sf(statistic, df), dist::t_two_sided(statistic, df))
    } else {
        (dist::normal_sf(statistic), 2.0 * dist::normal_sf(libm::fabs(statistic)))
    };
    Ok(DmResult {
        statistic,
        p_two_sided,
        p_one_sided,
        loss: opts.loss,
        lrv_estimate: lrv,
        mean_differential: mean,
        bandwidth,
        t,
        small_sample: opts.small_sample,
    })
}
