use super::poly::{expand_polynomials, ExpandedArma};
use super::spec::{CoefficientSet, ModelSpec};
use crate::error::Result;

/// Conditional one-step innovations with pre-sample values and innovations
/// set to zero.
pub fn css_innovations(arma: &ExpandedArma, w: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; w.len()];
    for t in 0..w.len() {
        let mut v = w[t];
        for (i, a) in arma.ar.iter().enumerate().take(t) {
            v -= a * w[t - 1 - i];
        }
        for (j, m) in arma.ma.iter().enumerate().take(t) {
            v -= m * e[t - 1 - j];
        }
        e[t] = v;
    }
    e
}

/// Conditional sum of squares of a stationary-scale (already differenced)
/// series.
pub fn css_objective(spec: &ModelSpec, coeffs: &CoefficientSet, series: &[f64]) -> Result<f64> {
    let arma = expand_polynomials(spec, coeffs)?;
    Ok(css_innovations(&arma, series).iter().map(|e| e * e).sum())
}
