//! Seeded size and power simulations for the Granger, nowcast and
//! Diebold-Mariano tests.
//!
//! Replication `r` draws from ChaCha stream `r` under the study seed, so any
//! single replication can be regenerated on its own.

use nowcast_core::error::Result;
use nowcast_core::forecast::{dm_test, rmse, DmOptions};
use nowcast_core::hypothesis::Level;
use nowcast_core::series::{MonthlySeries, YearMonth};
use nowcast_core::var::{fit_nowcast, fit_var_values, forecast_rolling, granger_test, ModelSpec, NowcastSpec, WindowScheme};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub const DEFAULT_SEED: u64 = 2004;

/// Simulation design: the indicator is AR(1) with persistence 0.5 and shock
/// scale `indicator_scale`; the target is AR(1) with persistence 0.3, unit
/// shocks and `coupling` times the indicator's first lag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Design {
    pub n: usize,
    pub lags: usize,
    pub coupling: f64,
    pub indicator_scale: f64,
    pub burn_in: usize,
    /// Months held out for the rolling forecast comparison.
    pub holdout: usize,
    /// Length of the equal-accuracy error sequences in the DM size check.
    pub dm_length: usize,
}

impl Default for Design {
    fn default() -> Self {
        Self { n: 120, lags: 12, coupling: 0.0, indicator_scale: 3.0, burn_in: 100, holdout: 12, dm_length: 120 }
    }
}

pub fn stream(seed: u64, replication: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication);
    rng
}

/// Simulated `(indicator, target)` pair of length `design.n`.
pub fn simulate_pair(rng: &mut ChaCha8Rng, design: &Design) -> (Vec<f64>, Vec<f64>) {
    let total = design.n + design.burn_in;
    let mut x = vec![0.0; total];
    let mut y = vec![0.0; total];
    for t in 1..total {
        let u: f64 = rng.sample(StandardNormal);
        let e: f64 = rng.sample(StandardNormal);
        x[t] = 0.5 * x[t - 1] + design.indicator_scale * u;
        y[t] = 0.3 * y[t - 1] + design.coupling * x[t - 1] + e;
    }
    (x.split_off(design.burn_in), y.split_off(design.burn_in))
}

fn monthly(id: &str, values: Vec<f64>) -> Result<MonthlySeries> {
    MonthlySeries::unrestricted(id, YearMonth::new(2004, 1).expect("valid month"), values)
}

/// 5%-level rejection rates under no coupling and equal forecast accuracy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizeStudy {
    pub replications: usize,
    pub granger: f64,
    pub nowcast: f64,
    pub dm: f64,
}

/// Rejection and win rates under coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerStudy {
    pub replications: usize,
    pub coupling: f64,
    pub granger: f64,
    pub nowcast: f64,
    pub var_beats_ar: f64,
}

fn rate(hits: usize, reps: usize) -> f64 {
    hits as f64 / reps as f64
}

pub fn size_study(seed: u64, replications: usize, design: Design) -> Result<SizeStudy> {
    let design = Design { coupling: 0.0, ..design };
    let (mut granger, mut nowcast, mut dm) = (0, 0, 0);
    for r in 0..replications {
        let mut rng = stream(seed, r as u64);
        let (x, y) = simulate_pair(&mut rng, &design);
        let fit = fit_var_values(&["x", "y"], &[&x, &y], design.lags)?;
        granger += granger_test(&fit, "x", "y")?.rejects(Level::Five) as usize;
        let nc = fit_nowcast(&monthly("y", y)?, &monthly("x", x)?, NowcastSpec::default())?;
        nowcast += nc.indicator_joint_f.rejects(Level::Five) as usize;
        let e1: Vec<f64> = (0..design.dm_length).map(|_| rng.sample(StandardNormal)).collect();
        let e2: Vec<f64> = (0..design.dm_length).map(|_| rng.sample(StandardNormal)).collect();
        dm += (dm_test(&e1, &e2, DmOptions::default())?.p_one_sided < 0.05) as usize;
    }
    Ok(SizeStudy {
        replications,
        granger: rate(granger, replications),
        nowcast: rate(nowcast, replications),
        dm: rate(dm, replications),
    })
}

pub fn power_study(seed: u64, replications: usize, design: Design) -> Result<PowerStudy> {
    let (mut granger, mut nowcast, mut wins) = (0, 0, 0);
    for r in 0..replications {
        let mut rng = stream(seed, r as u64);
        let (x, y) = simulate_pair(&mut rng, &design);
        let fit = fit_var_values(&["x", "y"], &[&x, &y], design.lags)?;
        granger += granger_test(&fit, "x", "y")?.rejects(Level::Five) as usize;
        let (ys, xs) = (monthly("y", y)?, monthly("x", x)?);
        nowcast += fit_nowcast(&ys, &xs, NowcastSpec::default())?.indicator_joint_f.rejects(Level::Five) as usize;
        let train_end = ys.month_at(design.n - design.holdout - 1);
        let score = |spec| -> Result<f64> {
            let records = forecast_rolling(spec, &ys, &xs, train_end, design.holdout, WindowScheme::Expanding)?;
            rmse(&records.iter().map(|r| (r.forecast, r.actual)).collect::<Vec<_>>())
        };
        wins += (score(ModelSpec::Var(design.lags))? < score(ModelSpec::Ar(design.lags))?) as usize;
    }
    Ok(PowerStudy {
        replications,
        coupling: design.coupling,
        granger: rate(granger, replications),
        nowcast: rate(nowcast, replications),
        var_beats_ar: rate(wins, replications),
    })
}
