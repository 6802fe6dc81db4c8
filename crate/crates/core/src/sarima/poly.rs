//! Backshift-operator polynomial algebra.

use serde::{Deserialize, Serialize};

use super::spec::{CoefficientSet, ModelSpec};
use crate::error::{Error, Result};

/// Roots must satisfy `|root| > 1 + ROOT_MARGIN`.
pub const ROOT_MARGIN: f64 = 1e-8;

/// Multiplied-out ARMA operators.
///
/// `ar[i]` is the coefficient at `B^(i+1)` in `1 - sum ar[i] B^(i+1)`;
/// `ma[j]` is the coefficient at `B^(j+1)` in `1 + sum ma[j] B^(j+1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpandedArma {
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
}

impl ExpandedArma {
    /// `[1, -ar_1, -ar_2, ...]`
    pub fn ar_polynomial(&self) -> Vec<f64> {
        std::iter::once(1.0).chain(self.ar.iter().map(|a| -a)).collect()
    }

    /// `[1, ma_1, ma_2, ...]`
    pub fn ma_polynomial(&self) -> Vec<f64> {
        std::iter::once(1.0).chain(self.ma.iter().copied()).collect()
    }
}

/// Product of two polynomials given by ascending coefficients.
pub fn multiply(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0.0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn factor(coeffs: &[f64], stride: usize, sign: f64) -> Vec<f64> {
    let mut poly = vec![0.0; coeffs.len() * stride + 1];
    poly[0] = 1.0;
    for (i, c) in coeffs.iter().enumerate() {
        poly[(i + 1) * stride] = sign * c;
    }
    poly
}

pub fn expand_polynomials(spec: &ModelSpec, coeffs: &CoefficientSet) -> Result<ExpandedArma> {
    coeffs.check_dims(spec)?;
    Ok(expand_unchecked(spec, coeffs))
}

pub(crate) fn expand_unchecked(spec: &ModelSpec, coeffs: &CoefficientSet) -> ExpandedArma {
    let ar = multiply(
        &factor(&coeffs.phi, 1, -1.0),
        &factor(&coeffs.seasonal_phi, spec.s, -1.0),
    );
    let ma = multiply(
        &factor(&coeffs.theta, 1, 1.0),
        &factor(&coeffs.seasonal_theta, spec.s, 1.0),
    );
    ExpandedArma {
        ar: ar[1..].iter().map(|c| -c).collect(),
        ma: ma[1..].to_vec(),
    }
}

/// Whether `1 - sum a_i z^i` has every root outside the circle of radius
/// `radius`, by the Schur-Cohn step-down recursion.
pub fn ar_roots_outside(a: &[f64], radius: f64) -> bool {
    let mut cur: Vec<f64> = a
        .iter()
        .enumerate()
        .map(|(i, c)| c * radius.powi(i as i32 + 1))
        .collect();
    while cur.last() == Some(&0.0) {
        cur.pop();
    }
    while let Some(&kappa) = cur.last() {
        if !(kappa.abs() < 1.0) {
            return false;
        }
        let k = cur.len();
        let denom = 1.0 - kappa * kappa;
        let prev: Vec<f64> = (0..k - 1)
            .map(|j| (cur[j] + kappa * cur[k - 2 - j]) / denom)
            .collect();
        cur = prev;
    }
    true
}

/// Stationary AR operator and invertible MA operator, each factor checked.
pub fn check_stationary_invertible(spec: &ModelSpec, coeffs: &CoefficientSet) -> Result<()> {
    coeffs.check_dims(spec)?;
    let radius = 1.0 + ROOT_MARGIN;
    let expanded = expand_unchecked(spec, coeffs);
    if !ar_roots_outside(&expanded.ar, radius) {
        return Err(Error::Validity(format!(
            "AR operator of {spec} has a root on or inside the unit circle"
        )));
    }
    let neg_ma: Vec<f64> = expanded.ma.iter().map(|m| -m).collect();
    if !ar_roots_outside(&neg_ma, radius) {
        return Err(Error::Validity(format!(
            "MA operator of {spec} has a root on or inside the unit circle"
        )));
    }
    Ok(())
}

/// First `n` coefficients of the power series `num(B) / den(B)`;
/// `den[0]` must be nonzero.
pub fn power_series_divide(num: &[f64], den: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for j in 0..n {
        let mut acc = num.get(j).copied().unwrap_or(0.0);
        for k in 1..=j.min(den.len().saturating_sub(1)) {
            acc -= den[k] * out[j - k];
        }
        out[j] = acc / den[0];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn reference_model() -> (ModelSpec, CoefficientSet) {
        let spec = ModelSpec::new(2, 1, 0, 0, 0, 2, 12).unwrap();
        let c = CoefficientSet::from_vec(&spec, &[0.6877, -0.4831, 0.9972, 0.4131], 1.0).unwrap();
        (spec, c)
    }

    #[test]
    fn reference_model_expansion() {
        let (spec, c) = reference_model();
        let e = expand_polynomials(&spec, &c).unwrap();
        assert_eq!(e.ar, vec![0.6877, -0.4831]);
        assert_eq!(e.ma.len(), 24);
        assert_abs_diff_eq!(e.ma[11], 0.9972);
        assert_abs_diff_eq!(e.ma[23], 0.4131);
        assert_eq!(e.ma.iter().filter(|m| **m != 0.0).count(), 2);
        assert!(check_stationary_invertible(&spec, &c).is_ok());
    }

    #[test]
    fn multiplicative_seasonal_ar() {
        let spec = ModelSpec::new(1, 0, 0, 1, 0, 0, 12).unwrap();
        let c = CoefficientSet::from_vec(&spec, &[0.5, 0.4], 1.0).unwrap();
        let e = expand_polynomials(&spec, &c).unwrap();
        assert_eq!(e.ar.len(), 13);
        assert_abs_diff_eq!(e.ar[0], 0.5);
        assert_abs_diff_eq!(e.ar[11], 0.4);
        assert_abs_diff_eq!(e.ar[12], -0.2, epsilon = 1e-15);
        let poly = e.ar_polynomial();
        assert_eq!(poly[0], 1.0);
        assert_eq!(poly.len() - 1, spec.ar_degree());
    }

    #[test]
    fn empty_seasonal_part_is_identity() {
        let spec = ModelSpec::arima(2, 0, 1);
        let c = CoefficientSet::from_vec(&spec, &[0.3, 0.2, -0.4], 1.0).unwrap();
        let e = expand_polynomials(&spec, &c).unwrap();
        assert_eq!(e.ar, vec![0.3, 0.2]);
        assert_eq!(e.ma, vec![-0.4]);
    }

    #[test]
    fn dimension_mismatch() {
        let spec = ModelSpec::arima(2, 0, 0);
        let c = CoefficientSet::zeros(&ModelSpec::arima(1, 0, 0));
        assert!(matches!(expand_polynomials(&spec, &c), Err(Error::Argument(_))));
    }

    #[test]
    fn root_checks() {
        assert!(ar_roots_outside(&[0.5], 1.0));
        assert!(!ar_roots_outside(&[1.0], 1.0));
        assert!(!ar_roots_outside(&[1.2, -0.1], 1.0));
        // (1 - 0.9B)(1 + 0.5B) = 1 - 0.4B - 0.45B^2
        assert!(ar_roots_outside(&[0.4, 0.45], 1.0));
        // unit root in B^12
        let mut seasonal = vec![0.0; 12];
        seasonal[11] = 1.0;
        assert!(!ar_roots_outside(&seasonal, 1.0 + ROOT_MARGIN));
        let spec = ModelSpec::arima(0, 0, 1);
        let c = CoefficientSet::from_vec(&spec, &[1.0], 1.0).unwrap();
        assert!(matches!(check_stationary_invertible(&spec, &c), Err(Error::Validity(_))));
    }

    #[test]
    fn series_division() {
        // 1 / (1 - 0.5B) = sum 0.5^j B^j
        let s = power_series_divide(&[1.0], &[1.0, -0.5], 6);
        for (j, v) in s.iter().enumerate() {
            assert_abs_diff_eq!(*v, 0.5f64.powi(j as i32), epsilon = 1e-15);
        }
    }
}
