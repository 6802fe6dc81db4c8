use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::poly::{check_stationary_invertible, expand_unchecked};
use super::spec::{CoefficientSet, ModelSpec};
use crate::error::{Error, Result};
use crate::series::{TimeSeries, YearMonth};

/// Gaussian sample path of the ARMA part, integrated `d` times at lag 1 and
/// `D` times at lag `s` with zero starting levels. Starts in January 2000;
/// use [`TimeSeries::with_start`] to move it.
///
/// `burn_in` defaults to ten times the longest polynomial lag.
pub fn simulate(
    spec: &ModelSpec,
    coeffs: &CoefficientSet,
    n: usize,
    seed: u64,
    burn_in: Option<usize>,
) -> Result<TimeSeries> {
    if n == 0 {
        return Err(Error::argument("simulation length must be positive"));
    }
    if !(coeffs.sigma2 > 0.0) {
        return Err(Error::argument("sigma2 must be positive"));
    }
    check_stationary_invertible(spec, coeffs)?;
    let arma = expand_unchecked(spec, coeffs);
    let burn = burn_in.unwrap_or(10 * arma.ar.len().max(arma.ma.len()));
    let total = n + burn;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, coeffs.sigma2.sqrt())
        .map_err(|e| Error::argument(e.to_string()))?;
    let eps: Vec<f64> = (0..total).map(|_| noise.sample(&mut rng)).collect();

    let mut w = vec![0.0; total];
    for t in 0..total {
        let mut v = eps[t];
        for (i, a) in arma.ar.iter().enumerate().take(t) {
            v += a * w[t - 1 - i];
        }
        for (j, m) in arma.ma.iter().enumerate().take(t) {
            v += m * eps[t - 1 - j];
        }
        w[t] = v;
    }
    let mut y = w.split_off(burn);

    let lags = std::iter::repeat_n(1, spec.d).chain(std::iter::repeat_n(spec.s, spec.seasonal_d));
    for lag in lags {
        for t in lag..y.len() {
            y[t] += y[t - lag];
        }
    }
    TimeSeries::new(YearMonth::new(2000, 1)?, spec.s.max(1), y)
}
