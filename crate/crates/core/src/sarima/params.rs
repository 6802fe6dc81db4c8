//! Unconstrained reparameterization of AR / MA factors through partial
//! autocorrelations (Monahan 1984): any real vector maps to a stationary AR
//! factor, and the dual map (sign flip) gives an invertible MA factor.

use super::spec::{CoefficientSet, ModelSpec};
use crate::error::{Error, Result};

/// Partial autocorrelations in (-1, 1) are clamped this far from the edge on
/// the way back to unconstrained space.
const PACF_EDGE: f64 = 1e-10;

/// Unconstrained values -> stationary AR coefficients.
pub fn unconstrained_to_ar(u: &[f64]) -> Vec<f64> {
    let mut phi: Vec<f64> = Vec::with_capacity(u.len());
    for &x in u {
        let r = x.tanh();
        let prev = phi.clone();
        for j in 0..prev.len() {
            phi[j] = prev[j] - r * prev[prev.len() - 1 - j];
        }
        phi.push(r);
    }
    phi
}

/// Stationary AR coefficients -> unconstrained values.
pub fn ar_to_unconstrained(phi: &[f64]) -> Result<Vec<f64>> {
    let mut cur = phi.to_vec();
    let mut r = vec![0.0; phi.len()];
    for k in (0..phi.len()).rev() {
        let kappa = cur[k];
        if !(kappa.abs() < 1.0) {
            return Err(Error::Validity(format!(
                "AR factor {phi:?} is not stationary"
            )));
        }
        r[k] = kappa;
        let denom = 1.0 - kappa * kappa;
        cur = (0..k).map(|j| (cur[j] + kappa * cur[k - 1 - j]) / denom).collect();
    }
    Ok(r
        .into_iter()
        .map(|x| x.clamp(-1.0 + PACF_EDGE, 1.0 - PACF_EDGE).atanh())
        .collect())
}

pub fn unconstrained_to_ma(u: &[f64]) -> Vec<f64> {
    unconstrained_to_ar(u).into_iter().map(|v| -v).collect()
}

pub fn ma_to_unconstrained(theta: &[f64]) -> Result<Vec<f64>> {
    let neg: Vec<f64> = theta.iter().map(|v| -v).collect();
    ar_to_unconstrained(&neg)
}

/// Unconstrained optimizer vector -> coefficients (sigma2 left at 1).
pub fn to_coefficients(spec: &ModelSpec, u: &[f64]) -> CoefficientSet {
    let (a, rest) = u.split_at(spec.p);
    let (b, rest) = rest.split_at(spec.q);
    let (c, d) = rest.split_at(spec.seasonal_p);
    CoefficientSet {
        phi: unconstrained_to_ar(a),
        theta: unconstrained_to_ma(b),
        seasonal_phi: unconstrained_to_ar(c),
        seasonal_theta: unconstrained_to_ma(d),
        sigma2: 1.0,
    }
}

pub fn from_coefficients(spec: &ModelSpec, coeffs: &CoefficientSet) -> Result<Vec<f64>> {
    coeffs.check_dims(spec)?;
    let mut u = ar_to_unconstrained(&coeffs.phi)?;
    u.extend(ma_to_unconstrained(&coeffs.theta)?);
    u.extend(ar_to_unconstrained(&coeffs.seasonal_phi)?);
    u.extend(ma_to_unconstrained(&coeffs.seasonal_theta)?);
    Ok(u)
}
