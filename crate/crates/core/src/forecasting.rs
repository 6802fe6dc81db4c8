//! Point and interval forecasts, one-step holdout replay and MAPE.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypothesis::special::normal_quantile;
use crate::sarima::fit::{stationary_part, FittedModel};
use crate::sarima::kalman::{KalmanFilter, StateSpace};
use crate::sarima::poly::{expand_polynomials, multiply, power_series_divide};
use crate::series::{TimeSeries, YearMonth};
use crate::transform::{box_cox_value, inv_box_cox_value};

/// `psi_0 .. psi_{h-1}` of `ma(B) / (ar(B) delta(B))`, with `delta` the
/// differencing polynomial. `psi_0 = 1`.
pub fn psi_weights(model: &FittedModel, h: usize) -> Vec<f64> {
    let arma = expand_polynomials(&model.spec, &model.coeffs)
        .expect("fitted coefficients match their spec");
    let den = multiply(&arma.ar_polynomial(), &model.transform.difference_polynomial());
    power_series_divide(&arma.ma_polynomial(), &den, h)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastSet {
    /// Month of the first forecast.
    pub origin: YearMonth,
    pub horizon: usize,
    pub level: f64,
    /// Original units.
    pub points: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Interval half-widths on the transformed scale.
    pub half_widths: Vec<f64>,
    pub psi: Vec<f64>,
}

impl ForecastSet {
    pub fn months(&self) -> impl Iterator<Item = YearMonth> + '_ {
        (0..self.horizon).map(|i| self.origin.add_months(i as i64))
    }
}

fn back_transform(z: f64, lambda: Option<f64>) -> f64 {
    match lambda {
        None => z,
        // below the Box-Cox range the bound collapses to the limit 0
        Some(l) => {
            let y = inv_box_cox_value(z, l);
            if y.is_nan() {
                0.0
            } else {
                y
            }
        }
    }
}

/// Recursion state shared by forecasting and holdout replay: the Kalman
/// filter on the stationary series plus the working-scale history needed to
/// undo differencing.
struct Replay {
    kf: KalmanFilter,
    history: Vec<f64>,
    delta: Vec<f64>,
    mean: f64,
}

impl Replay {
    fn after_training(model: &FittedModel) -> Result<Self> {
        let ss = StateSpace::from_model(&model.spec, &model.coeffs)?;
        let mut kf = KalmanFilter::new(ss)?;
        for w in stationary_part(&model.spec, model.working.values(), model.mean) {
            kf.step(w);
        }
        Ok(Self {
            kf,
            history: model.working.values().to_vec(),
            delta: model.transform.difference_polynomial(),
            mean: model.mean.unwrap_or(0.0),
        })
    }

    fn carried(&self) -> f64 {
        let n = self.history.len();
        self.delta[1..]
            .iter()
            .enumerate()
            .map(|(i, c)| c * self.history[n - 1 - i])
            .sum()
    }

    /// Working-scale level implied by a stationary-scale value at the next
    /// time point.
    fn level(&self, w: f64) -> f64 {
        w + self.mean - self.carried()
    }

    fn predict_level(&self) -> f64 {
        self.level(self.kf.predict().0)
    }

    fn observe(&mut self, z: f64) {
        self.kf.step(z + self.carried() - self.mean);
        self.history.push(z);
    }

    fn advance_unobserved(&mut self) -> f64 {
        let z = self.predict_level();
        self.kf.skip();
        self.history.push(z);
        z
    }
}

/// `h`-step forecasts with intervals at `level` (e.g. 0.95).
pub fn forecast(model: &FittedModel, h: usize, level: f64) -> Result<ForecastSet> {
    if h == 0 {
        return Err(Error::argument("forecast horizon must be at least 1"));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::argument(format!("level must lie in (0, 1), got {level}")));
    }
    let zq = normal_quantile(0.5 * (1.0 + level))?;
    let sigma = model.coeffs.sigma2.sqrt();
    let psi = psi_weights(model, h);
    let lambda = model.transform.lambda;

    let mut replay = Replay::after_training(model)?;
    let mut points = Vec::with_capacity(h);
    let mut lower = Vec::with_capacity(h);
    let mut upper = Vec::with_capacity(h);
    let mut half_widths = Vec::with_capacity(h);
    let mut cum = 0.0;
    for psi_j in &psi {
        cum += psi_j * psi_j;
        let z = replay.advance_unobserved();
        let hw = zq * sigma * cum.sqrt();
        points.push(back_transform(z, lambda));
        lower.push(back_transform(z - hw, lambda));
        upper.push(back_transform(z + hw, lambda));
        half_widths.push(hw);
    }
    Ok(ForecastSet {
        origin: model.working.end().add_months(1),
        horizon: h,
        level,
        points,
        lower,
        upper,
        half_widths,
        psi,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoldoutRow {
    pub month: YearMonth,
    pub actual: f64,
    pub forecast: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoldoutLedger {
    pub rows: Vec<HoldoutRow>,
    /// Percent.
    pub mape: f64,
}

impl HoldoutLedger {
    /// Build from actual / forecast pairs; errors are `actual - forecast`.
    pub fn from_pairs(start: YearMonth, actual: &[f64], forecast: &[f64]) -> Result<Self> {
        if actual.len() != forecast.len() {
            return Err(Error::Shape(format!(
                "{} actuals but {} forecasts",
                actual.len(),
                forecast.len()
            )));
        }
        let rows: Vec<HoldoutRow> = actual
            .iter()
            .zip(forecast)
            .enumerate()
            .map(|(i, (&a, &f))| HoldoutRow {
                month: start.add_months(i as i64),
                actual: a,
                forecast: f,
                error: a - f,
            })
            .collect();
        let mut ledger = Self { rows, mape: 0.0 };
        ledger.mape = mape(&ledger)?;
        Ok(ledger)
    }

    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }
}

/// Mean absolute percentage error, in percent.
pub fn mape(ledger: &HoldoutLedger) -> Result<f64> {
    if ledger.rows.is_empty() {
        return Err(Error::NoData);
    }
    let mut total = 0.0;
    for (i, r) in ledger.rows.iter().enumerate() {
        if r.actual == 0.0 {
            return Err(Error::Domain {
                index: i,
                message: "MAPE is undefined for a zero actual".into(),
            });
        }
        total += (r.error / r.actual).abs();
    }
    Ok(100.0 * total / ledger.rows.len() as f64)
}

/// One-step-ahead forecasts over `test`, which must start the month after
/// the training data. Coefficients stay frozen; the filter state absorbs
/// each actual before the next forecast.
pub fn one_step_holdout(model: &FittedModel, test: &TimeSeries) -> Result<HoldoutLedger> {
    let expected = model.working.end().add_months(1);
    if test.start() != expected {
        return Err(Error::Alignment(format!(
            "test series starts {} but training ends {}; expected {expected}",
            test.start(),
            model.working.end()
        )));
    }
    let lambda = model.transform.lambda;
    let mut replay = Replay::after_training(model)?;
    let mut forecasts = Vec::with_capacity(test.len());
    for (i, &y) in test.values().iter().enumerate() {
        forecasts.push(back_transform(replay.predict_level(), lambda));
        let z = match lambda {
            Some(_) if y <= 0.0 => {
                return Err(Error::Domain {
                    index: i,
                    message: format!("Box-Cox requires positive values, found {y}"),
                })
            }
            Some(l) => box_cox_value(y, l),
            None => y,
        };
        replay.observe(z);
    }
    HoldoutLedger::from_pairs(test.start(), test.values(), &forecasts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sarima::{fit, simulate, CoefficientSet, ModelSpec};
    use crate::transform::TransformRecord;
    use approx::assert_abs_diff_eq;

    fn fitted(spec: ModelSpec, coeffs: &[f64], n: usize, seed: u64) -> FittedModel {
        let truth = CoefficientSet::from_vec(&spec, coeffs, 1.0).unwrap();
        let y = simulate(&spec, &truth, n, seed, None).unwrap();
        fit(&y, &spec, &TransformRecord::identity()).unwrap()
    }

    #[test]
    fn random_walk_forecast() {
        let m = fitted(ModelSpec::arima(0, 1, 0), &[], 120, 4);
        let f = forecast(&m, 10, 0.95).unwrap();
        let last = *m.working.values().last().unwrap();
        assert!(f.points.iter().all(|p| *p == last));
        assert!(f.psi.iter().all(|p| *p == 1.0));
        for (j, hw) in f.half_widths.iter().enumerate() {
            assert_abs_diff_eq!(hw / f.half_widths[0], ((j + 1) as f64).sqrt(), epsilon = 1e-12);
        }
        assert_eq!(f.origin, m.working.end().add_months(1));
    }

    #[test]
    fn ar1_psi_is_geometric() {
        let mut m = fitted(ModelSpec::arima(1, 0, 0), &[0.5], 100, 2);
        m.coeffs.phi[0] = 0.5;
        for (j, p) in psi_weights(&m, 12).iter().enumerate() {
            assert_abs_diff_eq!(*p, 0.5f64.powi(j as i32), epsilon = 1e-15);
        }
    }

    #[test]
    fn first_step_matches_residual_recursion() {
        let m = fitted(ModelSpec::new(1, 1, 0, 0, 0, 1, 12).unwrap(), &[0.3, 0.5], 150, 8);
        let (train, test) = m.working.split_at(149).unwrap();
        let test = test.unwrap();
        let short = fit(&train, &m.spec, &TransformRecord::identity()).unwrap();
        let f = forecast(&short, 1, 0.9).unwrap();
        let ledger = one_step_holdout(&short, &test).unwrap();
        assert_abs_diff_eq!(f.points[0], ledger.rows[0].forecast, epsilon = 1e-10);
    }

    #[test]
    fn holdout_rejects_gap() {
        let m = fitted(ModelSpec::arima(1, 0, 0), &[0.5], 60, 1);
        let test = TimeSeries::new(m.working.end().add_months(2), 12, vec![1.0, 2.0]).unwrap();
        assert!(matches!(one_step_holdout(&m, &test), Err(Error::Alignment(_))));
    }

    #[test]
    fn mape_cases() {
        let start = YearMonth::new(2017, 1).unwrap();
        let l = HoldoutLedger::from_pairs(start, &[100.0], &[90.0]).unwrap();
        assert_abs_diff_eq!(l.mape, 10.0, epsilon = 1e-12);
        let l = HoldoutLedger::from_pairs(start, &[3.0, 4.0], &[3.0, 4.0]).unwrap();
        assert_eq!(l.mape, 0.0);
        assert!(matches!(
            HoldoutLedger::from_pairs(start, &[1.0, 0.0], &[1.0, 1.0]),
            Err(Error::Domain { index: 1, .. })
        ));
    }

    #[test]
    fn invalid_level() {
        let m = fitted(ModelSpec::arima(1, 0, 0), &[0.5], 60, 1);
        for level in [0.0, 1.0, -0.5, f64::NAN] {
            assert!(matches!(forecast(&m, 3, level), Err(Error::Argument(_))));
        }
        assert!(forecast(&m, 0, 0.95).is_err());
    }
}
