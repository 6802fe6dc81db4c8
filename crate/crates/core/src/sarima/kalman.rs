//! Exact Gaussian ARMA likelihood via the Harvey state-space form.
//!
//! ```text
//! alpha[t+1] = T alpha[t] + R e[t]      T: first column = AR coefficients,
//! y[t]       = alpha[t][0]                 superdiagonal of ones
//!                                       R = [1, ma_1, ..., ma_{r-1}]
//! ```
//!
//! with state dimension `r = max(ar_degree, ma_degree + 1)`. The filter runs
//! with unit innovation variance, so `P` and `F` are in units of sigma^2.
//! The initial state covariance solves `P = T P T' + R R'`.

use nalgebra::DMatrix;

use super::poly::{expand_unchecked, ExpandedArma};
use super::spec::{CoefficientSet, ModelSpec};
use crate::error::{Error, Result};

const LN_2PI: f64 = 1.837_877_066_409_345_3;
const LYAPUNOV_MAX_DOUBLINGS: usize = 64;
/// Once successive predicted covariances differ by less than this, the
/// filter keeps the gain fixed.
const STEADY_TOL: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct StateSpace {
    r: usize,
    ar: Vec<f64>,
    rvec: Vec<f64>,
}

impl StateSpace {
    pub fn new(arma: &ExpandedArma) -> Self {
        let r = arma.ar.len().max(arma.ma.len() + 1).max(1);
        let mut ar = vec![0.0; r];
        ar[..arma.ar.len()].copy_from_slice(&arma.ar);
        let mut rvec = vec![0.0; r];
        rvec[0] = 1.0;
        rvec[1..=arma.ma.len()].copy_from_slice(&arma.ma);
        Self { r, ar, rvec }
    }

    pub fn from_model(spec: &ModelSpec, coeffs: &CoefficientSet) -> Result<Self> {
        coeffs.check_dims(spec)?;
        Ok(Self::new(&expand_unchecked(spec, coeffs)))
    }

    pub fn dim(&self) -> usize {
        self.r
    }

    fn transition(&self) -> DMatrix<f64> {
        let r = self.r;
        DMatrix::from_fn(r, r, |i, j| {
            let shift = if j == i + 1 { 1.0 } else { 0.0 };
            if j == 0 {
                self.ar[i] + shift
            } else {
                shift
            }
        })
    }

    /// Stationary state covariance by the doubling iteration
    /// `P <- P + A P A'`, `A <- A^2`, which sums `T^k R R' T'^k`.
    pub fn stationary_covariance(&self) -> Result<Vec<f64>> {
        let r = self.r;
        let rv = nalgebra::DVector::from_column_slice(&self.rvec);
        let mut p = &rv * rv.transpose();
        let mut a = self.transition();
        for _ in 0..LYAPUNOV_MAX_DOUBLINGS {
            let inc = &a * &p * a.transpose();
            let inc_norm = inc.amax();
            p += &inc;
            if !p.iter().all(|v| v.is_finite()) {
                return Err(Error::Conditioning(
                    "state covariance diverged (root on or inside the unit circle)".into(),
                ));
            }
            if inc_norm <= 1e-15 * p.amax() {
                let mut out = vec![0.0; r * r];
                for i in 0..r {
                    for j in 0..r {
                        // symmetrize
                        out[i * r + j] = 0.5 * (p[(i, j)] + p[(j, i)]);
                    }
                }
                return Ok(out);
            }
            a = &a * &a;
        }
        Err(Error::Conditioning(
            "Lyapunov doubling did not converge (near-unit root)".into(),
        ))
    }
}

/// Kalman filter over the Harvey form, `O(r^2)` per step by exploiting the
/// companion structure of `T`.
#[derive(Debug, Clone)]
pub struct KalmanFilter {
    ss: StateSpace,
    a: Vec<f64>,
    p: Vec<f64>,
    prev_p: Vec<f64>,
    scratch: Vec<f64>,
    work: Vec<f64>,
    calm_steps: usize,
    steady: bool,
}

impl KalmanFilter {
    pub fn new(ss: StateSpace) -> Result<Self> {
        let p = ss.stationary_covariance()?;
        let r = ss.r;
        Ok(Self {
            a: vec![0.0; r],
            prev_p: p.clone(),
            p,
            scratch: vec![0.0; r * r],
            work: vec![0.0; r * r],
            calm_steps: 0,
            ss,
            steady: false,
        })
    }

    /// One-step prediction of the next observation and its variance factor.
    pub fn predict(&self) -> (f64, f64) {
        (self.a[0], self.p[0])
    }

    /// Assimilate `y` and advance to the next time point. Returns the
    /// innovation and its variance factor `F`.
    pub fn step(&mut self, y: f64) -> (f64, f64) {
        let r = self.ss.r;
        let v = y - self.a[0];
        let f = self.p[0];
        // measurement update: a += P[:,0] v / F ; P -= P[:,0] P[0,:] / F
        for i in 0..r {
            self.a[i] += self.p[i * r] * v / f;
        }
        if !self.steady {
            for i in 0..r {
                let pi0 = self.p[i * r] / f;
                for j in 0..r {
                    self.scratch[i * r + j] = self.p[i * r + j] - pi0 * self.p[j];
                }
            }
        }
        self.time_update();
        (v, f)
    }

    /// Advance without an observation (for multi-step forecasting).
    pub fn skip(&mut self) {
        let r = self.ss.r;
        self.scratch.copy_from_slice(&self.p);
        self.steady = false;
        self.calm_steps = 0;
        self.time_update_state();
        self.time_update_cov(r);
    }

    fn time_update(&mut self) {
        self.time_update_state();
        if !self.steady {
            let r = self.ss.r;
            self.prev_p.copy_from_slice(&self.p);
            self.time_update_cov(r);
            let diff = self
                .p
                .iter()
                .zip(&self.prev_p)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            // a full state length of negligible change rules out a pause
            // inside a seasonal cycle
            if diff < STEADY_TOL {
                self.calm_steps += 1;
                self.steady = self.calm_steps >= r;
            } else {
                self.calm_steps = 0;
            }
        }
    }

    fn time_update_state(&mut self) {
        let r = self.ss.r;
        let a0 = self.a[0];
        for i in 0..r {
            let next = if i + 1 < r { self.a[i + 1] } else { 0.0 };
            self.a[i] = self.ss.ar[i] * a0 + next;
        }
    }

    // P_next = T S T' + R R' where S = scratch (the updated covariance)
    fn time_update_cov(&mut self, r: usize) {
        let ar = &self.ss.ar;
        let rv = &self.ss.rvec;
        let s = &self.scratch;
        let m = &mut self.work;
        // M = T S: M[i][j] = ar[i] S[0][j] + S[i+1][j]
        for i in 0..r {
            for j in 0..r {
                let below = if i + 1 < r { s[(i + 1) * r + j] } else { 0.0 };
                m[i * r + j] = ar[i] * s[j] + below;
            }
        }
        // P = M T' + R R': P[i][j] = M[i][0] ar[j] + M[i][j+1] + R_i R_j
        for i in 0..r {
            for j in 0..r {
                let right = if j + 1 < r { m[i * r + j + 1] } else { 0.0 };
                self.p[i * r + j] = m[i * r] * ar[j] + right + rv[i] * rv[j];
            }
        }
    }
}

/// Innovations and variance factors from filtering a whole series.
#[derive(Debug, Clone)]
pub struct FilterOutput {
    pub innovations: Vec<f64>,
    pub variances: Vec<f64>,
    pub sum_log_f: f64,
    pub sum_sq_scaled: f64,
}

impl FilterOutput {
    /// ML estimate of sigma^2 given the filter pass.
    pub fn sigma2_hat(&self) -> f64 {
        self.sum_sq_scaled / self.innovations.len() as f64
    }

    /// Log-likelihood with sigma^2 concentrated out.
    pub fn concentrated_loglik(&self) -> f64 {
        let n = self.innovations.len() as f64;
        -0.5 * n * (LN_2PI + self.sigma2_hat().ln() + 1.0) - 0.5 * self.sum_log_f
    }

    /// Log-likelihood at a given sigma^2.
    pub fn loglik_at(&self, sigma2: f64) -> f64 {
        let n = self.innovations.len() as f64;
        -0.5 * (n * (LN_2PI + sigma2.ln()) + self.sum_log_f + self.sum_sq_scaled / sigma2)
    }
}

pub fn run_filter(ss: StateSpace, y: &[f64]) -> Result<(FilterOutput, KalmanFilter)> {
    let mut kf = KalmanFilter::new(ss)?;
    let mut innovations = Vec::with_capacity(y.len());
    let mut variances = Vec::with_capacity(y.len());
    let mut sum_log_f = 0.0;
    let mut sum_sq_scaled = 0.0;
    for &obs in y {
        let (v, f) = kf.step(obs);
        sum_log_f += f.ln();
        sum_sq_scaled += v * v / f;
        innovations.push(v);
        variances.push(f);
    }
    Ok((
        FilterOutput {
            innovations,
            variances,
            sum_log_f,
            sum_sq_scaled,
        },
        kf,
    ))
}

/// Exact Gaussian log-likelihood of a (differenced, zero-mean) series at the
/// given coefficients and `coeffs.sigma2`.
pub fn exact_loglik(spec: &ModelSpec, coeffs: &CoefficientSet, series: &[f64]) -> Result<f64> {
    if !(coeffs.sigma2 > 0.0) {
        return Err(Error::argument("sigma2 must be positive"));
    }
    let ss = StateSpace::from_model(spec, coeffs)?;
    let (out, _) = run_filter(ss, series)?;
    Ok(out.loglik_at(coeffs.sigma2))
}

/// Log-likelihood maximized over sigma^2, plus that sigma^2.
pub fn concentrated_loglik(spec: &ModelSpec, coeffs: &CoefficientSet, series: &[f64]) -> Result<(f64, f64)> {
    let ss = StateSpace::from_model(spec, coeffs)?;
    let (out, _) = run_filter(ss, series)?;
    Ok((out.concentrated_loglik(), out.sigma2_hat()))
}
