//! Ordinary least squares with conventional and Newey-West (HAC)
//! covariance, plus nested-model F tests.
//!
//! Estimation goes through a Householder QR of the design matrix. A
//! regressor is declared collinear when its diagonal entry of `R` is below
//! [`RANK_TOLERANCE`] times the largest column norm.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::dist;
use crate::error::{Error, Result};
use crate::hypothesis::{Level, PValue, TestReport, TestSpec, Tail};
use crate::linalg::{Matrix, Qr};

pub const RANK_TOLERANCE: f64 = 1e-10;

/// Named regressor columns, `n` rows by `k` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    x: Matrix,
    names: Vec<String>,
}

impl DesignMatrix {
    /// Builds from `(name, column)` pairs of equal length.
    pub fn new<S: Into<String>>(columns: Vec<(S, Vec<f64>)>) -> Result<Self> {
        let n = columns.first().map_or(0, |c| c.1.len());
        if columns.iter().any(|c| c.1.len() != n) {
            return Err(Error::DimensionMismatch("design columns differ in length"));
        }
        let (names, cols): (Vec<String>, Vec<Vec<f64>>) =
            columns.into_iter().map(|(name, c)| (name.into(), c)).unzip();
        for c in &cols {
            if let Some(index) = c.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteValue { index });
            }
        }
        Ok(Self { x: Matrix::from_columns(&cols), names })
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn k(&self) -> usize {
        self.x.cols()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn matrix(&self) -> &Matrix {
        &self.x
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// True when some column is a non-zero constant.
    pub fn has_intercept(&self) -> bool {
        (0..self.k()).any(|j| {
            let first = self.x[(0, j)];
            first != 0.0 && (0..self.n()).all(|i| self.x[(i, j)] == first)
        })
    }

    /// Drops the named columns, keeping the remaining order.
    pub fn without(&self, drop: &[&str]) -> Result<Self> {
        if let Some(missing) = drop.iter().find(|d| self.column_index(d).is_none()) {
            return Err(Error::UnknownVariable(missing.to_string()));
        }
        let keep: Vec<usize> =
            (0..self.k()).filter(|&j| !drop.contains(&self.names[j].as_str())).collect();
        let cols: Vec<Vec<f64>> = keep.iter().map(|&j| self.x.column(j)).collect();
        Ok(Self {
            x: Matrix::from_columns(&cols),
            names: keep.iter().map(|&j| self.names[j].clone()).collect(),
        })
    }

    fn validate(&self) -> Result<()> {
        let (n, k) = (self.n(), self.k());
        if k == 0 || n <= k {
            return Err(Error::InsufficientObservations { n, k });
        }
        if let Some(j) = (0..k).find(|&j| (0..n).all(|i| self.x[(i, j)] == 0.0)) {
            return Err(Error::ZeroColumn { column: self.names[j].clone() });
        }
        Ok(())
    }
}

/// HAC covariance together with the bandwidth used.
#[derive(Debug, Clone, PartialEq)]
pub struct HacCovariance {
    pub bandwidth: usize,
    pub matrix: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionFit {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Dependent variable, kept to verify nested comparisons use one sample.
    pub dependent: Vec<f64>,
    pub ssr: f64,
    pub sigma2: f64,
    pub xtx_inv: Matrix,
    pub cov_ols: Matrix,
    pub cov_hac: Option<HacCovariance>,
    pub r2: f64,
    pub adj_r2: f64,
    pub n: usize,
    pub k: usize,
    pub has_intercept: bool,
}

impl RegressionFit {
    pub fn df_resid(&self) -> usize {
        self.n - self.k
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|j| self.coefficients[j])
    }

    pub fn std_errors(&self) -> Vec<f64> {
        self.cov_ols.diagonal().into_iter().map(libm::sqrt).collect()
    }

    pub fn t_ratios(&self) -> Vec<f64> {
        self.coefficients.iter().zip(self.std_errors()).map(|(b, se)| b / se).collect()
    }

    /// Two-sided p-values from Student t with `n - k` degrees of freedom.
    pub fn p_values(&self) -> Vec<f64> {
        let df = self.df_resid() as f64;
        self.t_ratios().into_iter().map(|t| dist::t_two_sided(t, df)).collect()
    }

    pub fn hac_std_errors(&self) -> Option<Vec<f64>> {
        self.cov_hac
            .as_ref()
            .map(|h| h.matrix.diagonal().into_iter().map(|v| libm::sqrt(v.max(0.0))).collect())
    }

    /// Two-sided HAC p-values, Student t with `n - k` degrees of freedom.
    pub fn hac_p_values(&self) -> Option<Vec<f64>> {
        let df = self.df_resid() as f64;
        self.hac_std_errors().map(|se| {
            self.coefficients
                .iter()
                .zip(se)
                .map(|(b, s)| dist::t_two_sided(b / s, df))
                .collect()
        })
    }

    pub fn fitted(&self) -> Vec<f64> {
        self.dependent.iter().zip(&self.residuals).map(|(y, e)| y - e).collect()
    }
}

/// Least-squares fit of `y` on the columns of `x`.
///
/// R² uses the demeaned total sum of squares when the design contains an
/// intercept and the raw sum of squares otherwise; a zero total sum of
/// squares gives R² = 0.
pub fn ols_fit(x: &DesignMatrix, y: &[f64]) -> Result<RegressionFit> {
    if y.len() != x.n() {
        return Err(Error::DimensionMismatch("dependent variable length differs from design rows"));
    }
    if let Some(index) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue { index });
    }
    x.validate()?;
    let (n, k) = (x.n(), x.k());
    let qr = Qr::new(x.matrix(), RANK_TOLERANCE)
        .map_err(|d| Error::RankDeficient { column: x.names[d.column].clone() })?;
    let coefficients = qr.solve(y);
    let fitted = x.matrix().matvec(&coefficients);
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let ssr: f64 = residuals.iter().map(|e| e * e).sum();
    let sigma2 = ssr / (n - k) as f64;
    let xtx_inv = qr.xtx_inverse();
    let mut cov_ols = xtx_inv.clone();
    cov_ols.scale(sigma2);

    let has_intercept = x.has_intercept();
    let tss = if has_intercept {
        let mean = y.iter().sum::<f64>() / n as f64;
        y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
    } else {
        y.iter().map(|v| v * v).sum::<f64>()
    };
    let r2 = if tss > 0.0 { (1.0 - ssr / tss).clamp(0.0, 1.0) } else { 0.0 };
    let adj_r2 = adjusted_r2(r2, n, k, has_intercept);

    Ok(RegressionFit {
        names: x.names.clone(),
        coefficients,
        residuals,
        dependent: y.to_vec(),
        ssr,
        sigma2,
        xtx_inv,
        cov_ols,
        cov_hac: None,
        r2,
        adj_r2,
        n,
        k,
        has_intercept,
    })
}

/// `1 - (1 - R²)(n - 1)/(n - k)` with an intercept among the `k` regressors,
/// `1 - (1 - R²) n/(n - k)` without.
pub fn adjusted_r2(r2: f64, n: usize, k: usize, has_intercept: bool) -> f64 {
    let num = if has_intercept { n - 1 } else { n } as f64;
    1.0 - (1.0 - r2) * num / (n - k) as f64
}

/// `floor(4 (n/100)^(2/9))`.
pub fn default_bandwidth(n: usize) -> usize {
    libm::floor(4.0 * libm::pow(n as f64 / 100.0, 2.0 / 9.0)) as usize
}

/// Bartlett kernel weight `1 - j/(L+1)`.
pub fn bartlett_weight(j: usize, bandwidth: usize) -> f64 {
    1.0 - j as f64 / (bandwidth as f64 + 1.0)
}

/// Newey-West sandwich `(X'X)⁻¹ S (X'X)⁻¹` with Bartlett weights and no
/// small-sample scaling. `bandwidth = None` uses [`default_bandwidth`].
pub fn hac_covariance(fit: &RegressionFit, x: &DesignMatrix, bandwidth: Option<usize>) -> Result<HacCovariance> {
    let (n, k) = (x.n(), x.k());
    if n != fit.n || k != fit.k {
        return Err(Error::DimensionMismatch("fit was not produced from this design"));
    }
    let bandwidth = bandwidth.unwrap_or_else(|| default_bandwidth(n));
    if bandwidth >= n {
        return Err(Error::BandwidthTooLarge { bandwidth, n });
    }
    // scores u_t = e_t x_t
    let scores: Vec<Vec<f64>> = (0..n)
        .map(|t| x.matrix().row(t).iter().map(|v| v * fit.residuals[t]).collect())
        .collect();
    let mut meat = Matrix::zeros(k, k);
    for lag in 0..=bandwidth {
        let w = if lag == 0 { 1.0 } else { bartlett_weight(lag, bandwidth) };
        let mut gamma = Matrix::zeros(k, k);
        for t in lag..n {
            let (a, b) = (&scores[t], &scores[t - lag]);
            for i in 0..k {
                for j in 0..k {
                    gamma[(i, j)] += a[i] * b[j];
                }
            }
        }
        for i in 0..k {
            for j in 0..k {
                meat[(i, j)] += if lag == 0 {
                    gamma[(i, j)]
                } else {
                    w * (gamma[(i, j)] + gamma[(j, i)])
                };
            }
        }
    }
    let mut matrix = fit.xtx_inv.matmul(&meat).matmul(&fit.xtx_inv);
    // exact symmetry
    for i in 0..k {
        for j in 0..i {
            let v = 0.5 * (matrix[(i, j)] + matrix[(j, i)]);
            matrix[(i, j)] = v;
            matrix[(j, i)] = v;
        }
    }
    Ok(HacCovariance { bandwidth, matrix })
}

/// Fits and attaches the HAC covariance in one step.
pub fn ols_fit_hac(x: &DesignMatrix, y: &[f64], bandwidth: Option<usize>) -> Result<RegressionFit> {
    let mut fit = ols_fit(x, y)?;
    fit.cov_hac = Some(hac_covariance(&fit, x, bandwidth)?);
    Ok(fit)
}

/// `[(SSR_r − SSR_u)/q] / [SSR_u/(n − k_u)]`.
pub fn f_statistic(ssr_restricted: f64, ssr_unrestricted: f64, q: usize, n: usize, k_unrestricted: usize) -> f64 {
    ((ssr_restricted - ssr_unrestricted) / q as f64) / (ssr_unrestricted / (n - k_unrestricted) as f64)
}

/// F test that the `q` regressors absent from `restricted` are jointly zero.
///
/// Both fits must share the dependent variable row for row. When the
/// restriction costs nothing beyond rounding (relative to the scale of `y`)
/// the statistic is 0 and the report is flagged degenerate.
pub fn joint_f_test(unrestricted: &RegressionFit, restricted: &RegressionFit, q: usize) -> Result<TestReport> {
    if unrestricted.n != restricted.n || unrestricted.dependent != restricted.dependent {
        return Err(Error::SampleMismatch);
    }
    if q == 0 || restricted.k + q != unrestricted.k {
        return Err(Error::InvalidSpecification("q must equal the number of excluded regressors"));
    }
    let scale: f64 = unrestricted.dependent.iter().map(|v| v * v).sum();
    let tol = 1e-10 * scale;
    let gain = restricted.ssr - unrestricted.ssr;
    if gain < -tol {
        return Err(Error::NestedViolation);
    }
    let (n, k) = (unrestricted.n, unrestricted.k);
    let (d1, d2) = (q as f64, (n - k) as f64);
    let (statistic, p, degenerate) = if gain <= tol {
        (0.0, 1.0, true)
    } else if unrestricted.ssr == 0.0 {
        (f64::INFINITY, 0.0, true)
    } else {
        let f = f_statistic(restricted.ssr, unrestricted.ssr, q, n, k);
        (f, dist::f_sf(f, d1, d2), false)
    };
    Ok(f_report("F", statistic, p, n, d1, d2, degenerate))
}

pub(crate) fn f_report(name: &str, statistic: f64, p: f64, n: usize, d1: f64, d2: f64, degenerate: bool) -> TestReport {
    let critical_values = Level::ALL.iter().map(|&l| (l, dist::f_isf(l.alpha(), d1, d2))).collect();
    TestReport {
        test_name: name.to_string(),
        statistic,
        tail: Tail::Upper,
        critical_values,
        p_value: PValue::Exact(p),
        p_interpolated: None,
        spec: TestSpec::default(),
        n,
        df: Some((d1, d2)),
        degenerate,
    }
}

/// Intercept column of ones.
pub fn ones(n: usize) -> Vec<f64> {
    vec![1.0; n]
}
