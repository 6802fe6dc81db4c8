//! Variance-stabilizing (Box-Cox) and differencing transforms, with exact
//! inverses used to bring forecasts back to the original units.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Box-Cox of a single positive value. `lambda == 0` is the natural log.
pub fn box_cox_value(y: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        y.ln()
    } else {
        (lambda * y.ln()).exp_m1() / lambda
    }
}

/// Inverse of [`box_cox_value`]. Returns NaN outside the domain.
pub fn inv_box_cox_value(z: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        z.exp()
    } else {
        let base = lambda * z;
        if base <= -1.0 {
            f64::NAN
        } else {
            (base.ln_1p() / lambda).exp()
        }
    }
}

pub fn box_cox(series: &TimeSeries, lambda: f64) -> Result<TimeSeries> {
    if !lambda.is_finite() {
        return Err(Error::argument("lambda must be finite"));
    }
    if let Some((i, y)) = series.values().iter().enumerate().find(|(_, y)| **y <= 0.0) {
        return Err(Error::Domain {
            index: i,
            message: format!("Box-Cox requires positive values, found {y}"),
        });
    }
    series.with_values(
        series
            .values()
            .iter()
            .map(|&y| box_cox_value(y, lambda))
            .collect(),
    )
}

pub fn inv_box_cox(series: &TimeSeries, lambda: f64) -> Result<TimeSeries> {
    if !lambda.is_finite() {
        return Err(Error::argument("lambda must be finite"));
    }
    let mut out = Vec::with_capacity(series.len());
    for (i, &z) in series.values().iter().enumerate() {
        if lambda != 0.0 && lambda * z + 1.0 <= 0.0 {
            return Err(Error::Domain {
                index: i,
                message: format!("lambda*z + 1 = {} is not positive", lambda * z + 1.0),
            });
        }
        out.push(inv_box_cox_value(z, lambda));
    }
    series.with_values(out)
}

/// Gaussian profile log-likelihood of the Box-Cox exponent, up to a constant:
/// `-n/2 ln(sigma^2(lambda)) + (lambda - 1) * sum(ln y)`.
pub fn profile_loglik(values: &[f64], lambda: f64) -> f64 {
    let n = values.len() as f64;
    let z: Vec<f64> = values.iter().map(|&y| box_cox_value(y, lambda)).collect();
    let mean = z.iter().sum::<f64>() / n;
    let var = z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let log_sum: f64 = values.iter().map(|y| y.ln()).sum();
    -0.5 * n * var.ln() + (lambda - 1.0) * log_sum
}

/// Grid search for the Box-Cox exponent maximizing [`profile_loglik`].
pub fn estimate_lambda(series: &TimeSeries, grid_lo: f64, grid_hi: f64, step: f64) -> Result<f64> {
    if !(grid_lo < grid_hi) || !(step > 0.0) || !step.is_finite() {
        return Err(Error::argument(format!(
            "empty lambda grid [{grid_lo}, {grid_hi}] with step {step}"
        )));
    }
    if let Some((i, y)) = series.values().iter().enumerate().find(|(_, y)| **y <= 0.0) {
        return Err(Error::Domain {
            index: i,
            message: format!("Box-Cox requires positive values, found {y}"),
        });
    }
    let steps = ((grid_hi - grid_lo) / step + 1e-9).floor() as usize;
    let mut best = (f64::NEG_INFINITY, grid_lo);
    for i in 0..=steps {
        // round away the representation error of lo + i*step so reports
        // print 1.74, not 1.7400000000000002, and the log case is exact
        let lambda = ((grid_lo + i as f64 * step) * 1e9).round() / 1e9;
        let ll = profile_loglik(series.values(), lambda);
        if ll > best.0 {
            best = (ll, lambda);
        }
    }
    if !best.0.is_finite() {
        return Err(Error::DegenerateVariance(
            "profile likelihood undefined for a constant series".into(),
        ));
    }
    Ok(best.1)
}

/// One `(1 - B^lag)^order` differencing step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffStep {
    pub lag: usize,
    pub order: usize,
}

/// Everything needed to undo a chain of transforms.
///
/// `initial_values` holds one block of `lag` values per elementary
/// `(1 - B^lag)` pass, in the order the passes were applied.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TransformRecord {
    pub lambda: Option<f64>,
    pub diffs: Vec<DiffStep>,
    pub initial_values: Vec<Vec<f64>>,
}

impl TransformRecord {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn box_cox(lambda: f64) -> Self {
        Self {
            lambda: Some(lambda),
            ..Self::default()
        }
    }

    /// Append the steps of `later`, which must have been applied after `self`.
    pub fn then(mut self, later: TransformRecord) -> Result<Self> {
        if later.lambda.is_some() && (self.lambda.is_some() || !self.diffs.is_empty()) {
            return Err(Error::Shape(
                "Box-Cox must be the first transform in a chain".into(),
            ));
        }
        self.lambda = self.lambda.or(later.lambda);
        self.diffs.extend(later.diffs);
        self.initial_values.extend(later.initial_values);
        Ok(self)
    }

    /// Total number of observations consumed by differencing.
    pub fn consumed(&self) -> usize {
        self.diffs.iter().map(|d| d.lag * d.order).sum()
    }

    fn elementary_lags(&self) -> Vec<usize> {
        self.diffs
            .iter()
            .flat_map(|d| std::iter::repeat_n(d.lag, d.order))
            .collect()
    }

    /// Coefficients of the full differencing polynomial in B, with the
    /// leading 1 at index 0.
    pub fn difference_polynomial(&self) -> Vec<f64> {
        let mut poly = vec![1.0];
        for lag in self.elementary_lags() {
            let mut next = vec![0.0; poly.len() + lag];
            for (i, &c) in poly.iter().enumerate() {
                next[i] += c;
                next[i + lag] -= c;
            }
            poly = next;
        }
        poly
    }
}

/// Apply `(1 - B^lag)^order`.
pub fn difference(series: &TimeSeries, lag: usize, order: usize) -> Result<(TimeSeries, TransformRecord)> {
    if lag == 0 || order == 0 {
        return Err(Error::argument("lag and order must be positive"));
    }
    if series.len() <= lag * order {
        return Err(Error::Length {
            needed: lag * order,
            got: series.len(),
            context: "differencing",
        });
    }
    let mut cur = series.values().to_vec();
    let mut initial_values = Vec::with_capacity(order);
    for _ in 0..order {
        initial_values.push(cur[..lag].to_vec());
        cur = (lag..cur.len()).map(|t| cur[t] - cur[t - lag]).collect();
    }
    let out = TimeSeries::new(
        series.month_at(lag * order),
        series.period(),
        cur,
    )?;
    Ok((
        out,
        TransformRecord {
            lambda: None,
            diffs: vec![DiffStep { lag, order }],
            initial_values,
        },
    ))
}

/// Apply `(1 - B)^d (1 - B^s)^D`, returning the identity record when both
/// orders are zero.
pub fn difference_seasonal(
    series: &TimeSeries,
    d: usize,
    seasonal_d: usize,
    s: usize,
) -> Result<(TimeSeries, TransformRecord)> {
    let mut cur = series.clone();
    let mut record = TransformRecord::identity();
    if d > 0 {
        let (next, rec) = difference(&cur, 1, d)?;
        cur = next;
        record = record.then(rec)?;
    }
    if seasonal_d > 0 {
        let (next, rec) = difference(&cur, s, seasonal_d)?;
        cur = next;
        record = record.then(rec)?;
    }
    Ok((cur, record))
}

/// Undo the differencing in `record` by cumulative summation seeded with
/// its initial values. Extra trailing values (e.g. forecasts) extend the
/// integrated series. The Box-Cox part of the record is not inverted.
pub fn integrate(series: &TimeSeries, record: &TransformRecord) -> Result<TimeSeries> {
    let lags = record.elementary_lags();
    if lags.len() != record.initial_values.len() {
        return Err(Error::Shape(format!(
            "record lists {} differencing passes but {} initial-value blocks",
            lags.len(),
            record.initial_values.len()
        )));
    }
    let mut cur = series.values().to_vec();
    for (lag, init) in lags.iter().zip(&record.initial_values).rev() {
        if init.len() != *lag {
            return Err(Error::Shape(format!(
                "initial-value block of length {} for lag {lag}",
                init.len()
            )));
        }
        let mut out = Vec::with_capacity(cur.len() + lag);
        out.extend_from_slice(init);
        for (t, w) in cur.iter().enumerate() {
            let prev = out[t];
            out.push(w + prev);
        }
        cur = out;
    }
    TimeSeries::new(
        series.start().add_months(-(record.consumed() as i64)),
        series.period(),
        cur,
    )
}
