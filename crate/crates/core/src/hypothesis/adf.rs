//! Augmented Dickey-Fuller unit-root test.
//!
//! Regression: `dy_t = [c] + [b t] + gamma y_{t-1} + sum_i delta_i dy_{t-i} + e_t`,
//! statistic is the OLS t-ratio of `gamma`. p-values are interpolated in the
//! Dickey-Fuller percentile tables, first in sample size and then in the
//! statistic, and clamped to the table's 1% / 99% ends.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::report::{PBound, TestName, TestReport};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdfRegression {
    None,
    #[default]
    Drift,
    Trend,
}

impl fmt::Display for AdfRegression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AdfRegression::None => "none",
            AdfRegression::Drift => "drift",
            AdfRegression::Trend => "trend",
        })
    }
}

impl FromStr for AdfRegression {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "drift" => Ok(Self::Drift),
            "trend" => Ok(Self::Trend),
            _ => Err(Error::argument(format!("unknown ADF regression {s:?}"))),
        }
    }
}

/// Augmentation lag order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdfLags {
    /// AIC choice among `0..=floor(12 (n/100)^(1/4))` lags.
    #[default]
    Auto,
    /// AIC choice among `0..=k` lags.
    MaxAic(usize),
    Fixed(usize),
}

pub fn schwert_lags(n: usize) -> usize {
    (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

const TABLE_PROBS: [f64; 8] = [0.01, 0.025, 0.05, 0.10, 0.90, 0.95, 0.975, 0.99];
const TABLE_SIZES: [f64; 6] = [25.0, 50.0, 100.0, 250.0, 500.0, 100_000.0];

// Fuller (1976), Table 8.5.2: empirical percentiles of the t-ratio under the
// unit-root null. Rows are sample sizes, columns are TABLE_PROBS.
const TAU_NONE: [[f64; 8]; 6] = [
    [-2.66, -2.26, -1.95, -1.60, 0.92, 1.33, 1.70, 2.16],
    [-2.62, -2.25, -1.95, -1.61, 0.91, 1.31, 1.66, 2.08],
    [-2.60, -2.24, -1.95, -1.61, 0.90, 1.29, 1.64, 2.03],
    [-2.58, -2.23, -1.95, -1.62, 0.89, 1.29, 1.63, 2.01],
    [-2.58, -2.23, -1.95, -1.62, 0.89, 1.28, 1.62, 2.00],
    [-2.58, -2.23, -1.95, -1.62, 0.89, 1.28, 1.62, 2.00],
];
const TAU_DRIFT: [[f64; 8]; 6] = [
    [-3.75, -3.33, -3.00, -2.63, -0.37, 0.00, 0.34, 0.72],
    [-3.58, -3.22, -2.93, -2.60, -0.40, -0.03, 0.29, 0.66],
    [-3.51, -3.17, -2.89, -2.58, -0.42, -0.05, 0.26, 0.63],
    [-3.46, -3.14, -2.88, -2.57, -0.42, -0.06, 0.24, 0.62],
    [-3.44, -3.13, -2.87, -2.57, -0.43, -0.07, 0.24, 0.61],
    [-3.43, -3.12, -2.86, -2.57, -0.44, -0.07, 0.23, 0.60],
];
const TAU_TREND: [[f64; 8]; 6] = [
    [-4.38, -3.95, -3.60, -3.24, -1.14, -0.80, -0.50, -0.15],
    [-4.15, -3.80, -3.50, -3.18, -1.19, -0.87, -0.58, -0.24],
    [-4.04, -3.73, -3.45, -3.15, -1.22, -0.90, -0.62, -0.28],
    [-3.99, -3.69, -3.43, -3.13, -1.23, -0.92, -0.64, -0.31],
    [-3.98, -3.68, -3.42, -3.13, -1.24, -0.93, -0.65, -0.32],
    [-3.96, -3.66, -3.41, -3.12, -1.25, -0.94, -0.66, -0.33],
];

fn lerp(x: f64, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Critical values at [`TABLE_PROBS`] for sample size `n`.
pub fn critical_values(regression: AdfRegression, n: usize) -> [f64; 8] {
    let table = match regression {
        AdfRegression::None => &TAU_NONE,
        AdfRegression::Drift => &TAU_DRIFT,
        AdfRegression::Trend => &TAU_TREND,
    };
    let n = (n as f64).clamp(TABLE_SIZES[0], TABLE_SIZES[5]);
    let hi = TABLE_SIZES.iter().position(|&s| s >= n).unwrap_or(5).max(1);
    let lo = hi - 1;
    let mut out = [0.0; 8];
    for (j, cv) in out.iter_mut().enumerate() {
        *cv = lerp(n, TABLE_SIZES[lo], TABLE_SIZES[hi], table[lo][j], table[hi][j]);
    }
    out
}

/// Interpolated p-value, with a bound marker when clamped.
pub fn p_value(regression: AdfRegression, n: usize, statistic: f64) -> (f64, Option<PBound>) {
    let cv = critical_values(regression, n);
    if statistic <= cv[0] {
        return (TABLE_PROBS[0], Some(PBound::LessThan));
    }
    if statistic >= cv[7] {
        return (TABLE_PROBS[7], Some(PBound::GreaterThan));
    }
    let j = cv.iter().position(|&c| c >= statistic).unwrap_or(7).max(1);
    (
        lerp(statistic, cv[j - 1], cv[j], TABLE_PROBS[j - 1], TABLE_PROBS[j]),
        None,
    )
}

struct Regression {
    statistic: f64,
    rows: usize,
    cols: usize,
    rss: f64,
}

/// OLS of `dy_t` on the deterministic terms, `y_{t-1}` and `k` lagged
/// differences, over rows `t = first..dy.len()` with `first >= k`.
fn regress(series: &[f64], dy: &[f64], regression: AdfRegression, k: usize, first: usize) -> Result<Regression> {
    let rows = dy.len() - first;
    let n_det = match regression {
        AdfRegression::None => 0,
        AdfRegression::Drift => 1,
        AdfRegression::Trend => 2,
    };
    let cols = n_det + 1 + k;
    if rows <= cols {
        return Err(Error::Length {
            needed: cols + first + 1,
            got: series.len(),
            context: "ADF regression degrees of freedom",
        });
    }
    let gamma_col = n_det;
    let x = DMatrix::from_fn(rows, cols, |r, c| {
        let t = r + first;
        match c {
            _ if c < n_det => {
                if c == 0 {
                    1.0
                } else {
                    (t + 1) as f64
                }
            }
            _ if c == gamma_col => series[t],
            _ => dy[t - (c - gamma_col)],
        }
    });
    let y = DVector::from_fn(rows, |r, _| dy[r + first]);
    let xtx = x.transpose() * &x;
    let chol = xtx
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Rank("ADF design matrix is singular".into()))?;
    let min_pivot = chol.l().diagonal().iter().fold(f64::INFINITY, |m, v| m.min(v * v));
    let max_diag = xtx.diagonal().iter().fold(0.0f64, |m, v| m.max(*v));
    if min_pivot <= max_diag * 1e-13 {
        return Err(Error::Rank("ADF design matrix is numerically singular".into()));
    }
    let beta = chol.solve(&(x.transpose() * &y));
    let resid = &y - &x * &beta;
    let rss = resid.norm_squared();
    let s2 = rss / (rows - cols) as f64;
    let inv = chol.inverse();
    let se = (s2 * inv[(gamma_col, gamma_col)]).sqrt();
    if !(se > 0.0) {
        return Err(Error::DegenerateVariance("zero residual variance in ADF regression".into()));
    }
    Ok(Regression {
        statistic: beta[gamma_col] / se,
        rows,
        cols,
        rss,
    })
}

fn gaussian_aic(r: &Regression) -> f64 {
    let n = r.rows as f64;
    n * ((2.0 * std::f64::consts::PI * r.rss / n).ln() + 1.0) + 2.0 * r.cols as f64
}

pub fn adf_test(series: &[f64], regression: AdfRegression, lags: AdfLags) -> Result<TestReport> {
    let n = series.len();
    let (k_max, rule) = match lags {
        AdfLags::Auto => (schwert_lags(n), "aic, max by schwert"),
        AdfLags::MaxAic(k) => (k, "aic"),
        AdfLags::Fixed(k) => (k, "fixed"),
    };
    if n < k_max + 10 {
        return Err(Error::Length {
            needed: k_max + 9,
            got: n,
            context: "ADF regression",
        });
    }
    let dy: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();
    let k = match lags {
        AdfLags::Fixed(k) => k,
        // every candidate on the common sample that the longest lag allows
        _ => {
            let mut best = (f64::INFINITY, 0);
            for k in 0..=k_max {
                let aic = gaussian_aic(&regress(series, &dy, regression, k, k_max)?);
                if aic < best.0 {
                    best = (aic, k);
                }
            }
            best.1
        }
    };
    let fit = regress(series, &dy, regression, k, k)?;
    let (p, bound) = p_value(regression, fit.rows, fit.statistic);
    let mut report = TestReport::new(TestName::Adf, fit.statistic, p)
        .param("regression", regression.to_string())
        .param("lags", k)
        .param("max_lag", k_max)
        .param("n_obs", fit.rows)
        .param("lag_rule", rule)
        .param("table", "Fuller (1976) Table 8.5.2");
    report.p_bound = bound;
    Ok(report)
}
