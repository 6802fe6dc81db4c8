use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::css::css_objective;
use super::kalman::{run_filter, StateSpace};
use super::params::{from_coefficients, to_coefficients};
use super::poly::check_stationary_invertible;
use super::spec::{CoefficientSet, ModelSpec};
use crate::error::{Error, Result};
use crate::hypothesis::special::normal_sf;
use crate::optim::NelderMead;
use crate::series::TimeSeries;
use crate::transform::{box_cox, difference_seasonal, TransformRecord};

/// Estimation settings. The defaults are the ones every front end uses.
#[derive(Debug, Clone)]
pub struct FitOptions {
    pub optimizer: NelderMead,
    /// Fresh-simplex restarts of the ML stage.
    pub restarts: usize,
    /// Relative step of the finite-difference Hessian.
    pub hessian_step: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            optimizer: NelderMead::default(),
            restarts: 3,
            hessian_step: 1e-4,
        }
    }
}

/// A SARIMA model estimated by exact maximum likelihood.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub spec: ModelSpec,
    /// Estimates; `sigma2` is the ML innovation variance.
    pub coeffs: CoefficientSet,
    /// `None` when the Hessian was not positive definite.
    pub std_errors: Option<Vec<f64>>,
    pub z_values: Option<Vec<f64>>,
    pub p_values: Option<Vec<f64>>,
    pub loglik: f64,
    pub aic: f64,
    /// Kalman one-step innovations on the working scale, one per training
    /// observation; the observations consumed by differencing get 0.
    pub residuals: Vec<f64>,
    /// Box-Cox step (if any) followed by the differencing of the spec.
    pub transform: TransformRecord,
    /// Training series after Box-Cox, before differencing.
    pub working: TimeSeries,
    /// Sample mean removed before estimation (only when `d + D = 0`).
    pub mean: Option<f64>,
    pub iterations: usize,
}

impl FittedModel {
    /// `k + 1` with `k = p + q + P + Q`; sigma^2 is the extra parameter.
    pub fn n_params(&self) -> usize {
        self.spec.n_coeffs() + 1
    }

    /// Number of observations entering the likelihood.
    pub fn n_effective(&self) -> usize {
        self.working.len() - self.spec.diff_span()
    }

    pub fn bic(&self) -> f64 {
        -2.0 * self.loglik + (self.n_effective() as f64).ln() * self.n_params() as f64
    }

    pub fn aicc(&self) -> f64 {
        let k = self.n_params() as f64;
        let n = self.n_effective() as f64;
        if n - k - 1.0 > 0.0 {
            self.aic + 2.0 * k * (k + 1.0) / (n - k - 1.0)
        } else {
            f64::INFINITY
        }
    }

    /// Residuals after the differencing burn-in.
    pub fn effective_residuals(&self) -> &[f64] {
        &self.residuals[self.spec.diff_span()..]
    }

    /// Differenced (and demeaned) working series the likelihood was
    /// evaluated on.
    pub fn stationary_series(&self) -> Vec<f64> {
        stationary_part(&self.spec, self.working.values(), self.mean)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: FittedModel = serde_json::from_str(text)?;
        check_stationary_invertible(&model.spec, &model.coeffs)?;
        if model.residuals.len() != model.working.len() {
            return Err(Error::Shape(format!(
                "{} residuals for a training series of length {}",
                model.residuals.len(),
                model.working.len()
            )));
        }
        Ok(model)
    }
}

/// Apply the spec's differencing polynomial and subtract `mean`.
pub(crate) fn stationary_part(spec: &ModelSpec, z: &[f64], mean: Option<f64>) -> Vec<f64> {
    let mut cur = z.to_vec();
    let lags = std::iter::repeat_n(1, spec.d).chain(std::iter::repeat_n(spec.s, spec.seasonal_d));
    for lag in lags {
        cur = (lag..cur.len()).map(|t| cur[t] - cur[t - lag]).collect();
    }
    if let Some(m) = mean {
        cur.iter_mut().for_each(|v| *v -= m);
    }
    cur
}

/// Smallest admissible training length for `spec`.
pub fn min_length(spec: &ModelSpec) -> usize {
    3 * (spec.p + spec.q + spec.seasonal_p * spec.s + spec.seasonal_q * spec.s) + spec.diff_span()
}

pub fn fit(series: &TimeSeries, spec: &ModelSpec, transform: &TransformRecord) -> Result<FittedModel> {
    fit_with(series, spec, transform, &FitOptions::default())
}

/// Fit `spec` to `series` in original units. `transform` may carry a
/// Box-Cox exponent; differencing always comes from the spec.
pub fn fit_with(
    series: &TimeSeries,
    spec: &ModelSpec,
    transform: &TransformRecord,
    options: &FitOptions,
) -> Result<FittedModel> {
    if !transform.diffs.is_empty() {
        return Err(Error::argument(
            "differencing is taken from the model spec; pass a Box-Cox-only transform",
        ));
    }
    let needed = min_length(spec);
    if series.len() <= needed {
        return Err(Error::Length {
            needed,
            got: series.len(),
            context: "model fit",
        });
    }
    let working = match transform.lambda {
        Some(l) => box_cox(series, l)?,
        None => series.clone(),
    };
    let (_, diff_record) = difference_seasonal(&working, spec.d, spec.seasonal_d, spec.s)?;
    let record = TransformRecord {
        lambda: transform.lambda,
        ..TransformRecord::identity()
    }
    .then(diff_record)?;

    let mut w = stationary_part(spec, working.values(), None);
    let mean = if spec.diff_span() == 0 {
        let m = w.iter().sum::<f64>() / w.len() as f64;
        w.iter_mut().for_each(|v| *v -= m);
        Some(m)
    } else {
        None
    };
    if w.iter().all(|v| *v == 0.0) {
        return Err(Error::DegenerateVariance(
            "differenced series is identically zero".into(),
        ));
    }

    let k = spec.n_coeffs();
    let neg_ll = |u: &[f64]| -> f64 {
        let c = to_coefficients(spec, u);
        match StateSpace::from_model(spec, &c).and_then(|ss| run_filter(ss, &w)) {
            Ok((out, _)) => -out.concentrated_loglik(),
            Err(_) => f64::INFINITY,
        }
    };

    let (u_hat, iterations) = if k == 0 {
        (vec![], 0)
    } else {
        let css = options.optimizer.minimize(
            |u| css_objective(spec, &to_coefficients(spec, u), &w).unwrap_or(f64::INFINITY),
            &vec![0.0; k],
        );
        let start = if css.value.is_finite() { css.x } else { vec![0.0; k] };
        let ml = options
            .optimizer
            .minimize_with_restarts(neg_ll, &start, options.restarts);
        if !ml.converged || !ml.value.is_finite() {
            return Err(Error::Convergence {
                iterations: ml.iterations,
                best_value: ml.value,
                best_params: to_coefficients(spec, &ml.x).to_vec(),
            });
        }
        (ml.x, css.iterations + ml.iterations)
    };

    let simplex = to_coefficients(spec, &u_hat);
    let beta = polish(spec, simplex.to_vec(), &w, options.hessian_step);
    let mut coeffs = CoefficientSet::from_vec(spec, &beta, 1.0)?;
    let (out, _) = run_filter(StateSpace::from_model(spec, &coeffs)?, &w)?;
    let loglik = out.concentrated_loglik();
    coeffs.sigma2 = out.sigma2_hat();

    let std_errors = standard_errors(spec, &beta, &w, options.hessian_step);
    let z_values = std_errors
        .as_ref()
        .map(|se| beta.iter().zip(se).map(|(b, s)| b / s).collect::<Vec<f64>>());
    let p_values = z_values
        .as_ref()
        .map(|z| z.iter().map(|v| 2.0 * normal_sf(v.abs())).collect());

    let mut residuals = vec![0.0; spec.diff_span()];
    residuals.extend(out.innovations);

    Ok(FittedModel {
        spec: *spec,
        aic: -2.0 * loglik + 2.0 * (k + 1) as f64,
        coeffs,
        std_errors,
        z_values,
        p_values,
        loglik,
        residuals,
        transform: record,
        working,
        mean,
        iterations,
    })
}

/// Negative concentrated log-likelihood in natural coefficients, or `None`
/// if the point leaves the stationary region.
pub(crate) fn neg_loglik_natural(spec: &ModelSpec, beta: &[f64], w: &[f64]) -> Option<f64> {
    let c = CoefficientSet::from_vec(spec, beta, 1.0).ok()?;
    let ss = StateSpace::from_model(spec, &c).ok()?;
    let (out, _) = run_filter(ss, w).ok()?;
    let v = -out.concentrated_loglik();
    v.is_finite().then_some(v)
}

fn inside_region(spec: &ModelSpec, beta: &[f64]) -> bool {
    CoefficientSet::from_vec(spec, beta, 1.0)
        .and_then(|c| from_coefficients(spec, &c))
        .is_ok()
}

/// Central-difference Hessian of the negative log-likelihood in natural
/// coefficients; `None` off the interior of the parameter space.
fn hessian(spec: &ModelSpec, beta: &[f64], w: &[f64], rel_step: f64) -> Option<DMatrix<f64>> {
    let k = beta.len();
    if !inside_region(spec, beta) {
        return None;
    }
    let h: Vec<f64> = beta.iter().map(|b| rel_step * b.abs().max(1.0)).collect();
    let f = |x: &[f64]| neg_loglik_natural(spec, x, w);
    let f0 = f(beta)?;
    let shifted = |moves: &[(usize, f64)]| {
        let mut x = beta.to_vec();
        for &(i, s) in moves {
            x[i] += s * h[i];
        }
        f(&x)
    };
    let mut hess = DMatrix::zeros(k, k);
    for i in 0..k {
        let fp = shifted(&[(i, 1.0)])?;
        let fm = shifted(&[(i, -1.0)])?;
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for j in 0..i {
            let fpp = shifted(&[(i, 1.0), (j, 1.0)])?;
            let fpm = shifted(&[(i, 1.0), (j, -1.0)])?;
            let fmp = shifted(&[(i, -1.0), (j, 1.0)])?;
            let fmm = shifted(&[(i, -1.0), (j, -1.0)])?;
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    Some(hess)
}

fn gradient(spec: &ModelSpec, beta: &[f64], w: &[f64]) -> Option<DVector<f64>> {
    let mut g = DVector::zeros(beta.len());
    for i in 0..beta.len() {
        let h = 1e-6 * beta[i].abs().max(1.0);
        let mut up = beta.to_vec();
        let mut dn = beta.to_vec();
        up[i] += h;
        dn[i] -= h;
        g[i] = (neg_loglik_natural(spec, &up, w)? - neg_loglik_natural(spec, &dn, w)?) / (2.0 * h);
    }
    Some(g)
}

/// Safeguarded Newton steps from the simplex solution. The simplex stops on
/// objective spread, which can leave the point ~1e-4 away from the optimum
/// on long series; a few Newton steps settle the first-order condition.
/// A step is only taken if it stays stationary/invertible and lowers the
/// objective.
fn polish(spec: &ModelSpec, mut beta: Vec<f64>, w: &[f64], rel_step: f64) -> Vec<f64> {
    let Some(mut f0) = neg_loglik_natural(spec, &beta, w) else {
        return beta;
    };
    for _ in 0..5 {
        let Some(g) = gradient(spec, &beta, w) else { break };
        if g.amax() < 1e-7 {
            break;
        }
        let Some(chol) = hessian(spec, &beta, w, rel_step).and_then(|h| h.cholesky()) else {
            break;
        };
        let step = chol.solve(&g);
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..20 {
            let trial: Vec<f64> = beta.iter().zip(step.iter()).map(|(b, s)| b - t * s).collect();
            if inside_region(spec, &trial) {
                if let Some(f1) = neg_loglik_natural(spec, &trial, w) {
                    if f1 <= f0 {
                        beta = trial;
                        f0 = f1;
                        moved = true;
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    beta
}

/// Square roots of the diagonal of the inverse central-difference Hessian.
fn standard_errors(spec: &ModelSpec, beta: &[f64], w: &[f64], rel_step: f64) -> Option<Vec<f64>> {
    if beta.is_empty() {
        return Some(vec![]);
    }
    let inv = hessian(spec, beta, w, rel_step)?.cholesky()?.inverse();
    let se: Vec<f64> = (0..beta.len()).map(|i| inv[(i, i)].sqrt()).collect();
    se.iter().all(|s| s.is_finite() && *s > 0.0).then_some(se)
}
