//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

pub const LN_2PI: f64 = 1.837_877_066_409_345_3;

/// Holdout table for Jan..Dec 2017: actual, one-step forecast, reference error.
pub const HOLDOUT_2017: [(f64, f64, f64); 12] = [
    (2168.700, 2145.530, 23.170),
    (2169.241, 2236.218, -66.977),
    (2615.216, 2457.323, 157.893),
    (2082.618, 2337.417, -254.799),
    (2309.758, 2306.372, 3.386),
    (2467.073, 2398.420, 68.653),
    (2282.731, 2237.650, 45.081),
    (2499.483, 2408.218, 91.265),
    (2186.091, 2475.588, -289.497),
    (2275.151, 2214.368, 60.783),
    (2262.313, 2289.175, -26.862),
    (2741.425, 2580.624, 160.801),
];

/// Mean of |error / actual| over the table by direct summation, in percent.
pub const HOLDOUT_2017_MAPE: f64 = 4.495_902_45;

/// Reference coefficients of the fitted SARIMA(2,1,0)x(0,0,2)_12 model,
/// ordered ar1, ar2, sma1, sma2.
pub const REFERENCE_COEFFS: [f64; 4] = [0.6877, -0.4831, 0.9972, 0.4131];

pub fn fixture_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// Gaussian log-density of `y` under the ARMA(1,1) autocovariance
/// assembled in closed form.
pub fn arma11_dense_loglik(phi: f64, theta: f64, sigma2: f64, y: &[f64]) -> f64 {
    let n = y.len();
    let g0 = sigma2 * (1.0 + 2.0 * phi * theta + theta * theta) / (1.0 - phi * phi);
    let g1 = sigma2 * (1.0 + phi * theta) * (phi + theta) / (1.0 - phi * phi);
    let mut gamma = vec![g0, g1];
    for k in 2..n.max(2) {
        gamma.push(phi * gamma[k - 1]);
    }
    let cov = DMatrix::from_fn(n, n, |i, j| gamma[i.abs_diff(j)]);
    let chol = cov.cholesky().expect("autocovariance matrix is positive definite");
    let logdet = 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
    let yv = DVector::from_column_slice(y);
    let quad = yv.dot(&chol.solve(&yv));
    -0.5 * (n as f64 * LN_2PI + logdet + quad)
}

/// Lag-`k` partial autocorrelation as the last coefficient of a least-squares
/// regression of the demeaned series on its first `k` lags, with the series
/// padded by zeros on both sides.
pub fn ols_pacf(x: &[f64], k: usize) -> f64 {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let at = |t: isize| -> f64 {
        if t >= 0 && (t as usize) < n {
            x[t as usize] - mean
        } else {
            0.0
        }
    };
    let rows = n + k;
    let design = DMatrix::from_fn(rows, k, |t, j| at(t as isize - 1 - j as isize));
    let target = DVector::from_fn(rows, |t, _| at(t as isize));
    let xtx = design.transpose() * &design;
    let xty = design.transpose() * target;
    let beta = xtx.cholesky().expect("design has full rank").solve(&xty);
    beta[k - 1]
}
