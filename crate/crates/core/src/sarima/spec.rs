use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Orders of a SARIMA(p,d,q)x(P,D,Q)_s model.
///
/// The all-zero model (white noise around a mean) is representable so it can
/// be simulated and fitted directly, but candidate enumeration never
/// produces it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct ModelSpec {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    pub seasonal_p: usize,
    pub seasonal_d: usize,
    pub seasonal_q: usize,
    pub s: usize,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    p: usize,
    d: usize,
    q: usize,
    #[serde(rename = "P")]
    seasonal_p: usize,
    #[serde(rename = "D")]
    seasonal_d: usize,
    #[serde(rename = "Q")]
    seasonal_q: usize,
    s: usize,
}

impl TryFrom<RawSpec> for ModelSpec {
    type Error = Error;

    fn try_from(r: RawSpec) -> Result<Self> {
        ModelSpec::new(r.p, r.d, r.q, r.seasonal_p, r.seasonal_d, r.seasonal_q, r.s)
    }
}

impl From<ModelSpec> for RawSpec {
    fn from(m: ModelSpec) -> Self {
        RawSpec {
            p: m.p,
            d: m.d,
            q: m.q,
            seasonal_p: m.seasonal_p,
            seasonal_d: m.seasonal_d,
            seasonal_q: m.seasonal_q,
            s: m.s,
        }
    }
}

impl ModelSpec {
    pub fn new(
        p: usize,
        d: usize,
        q: usize,
        seasonal_p: usize,
        seasonal_d: usize,
        seasonal_q: usize,
        s: usize,
    ) -> Result<Self> {
        if s == 0 {
            return Err(Error::argument("seasonal period must be at least 1"));
        }
        if seasonal_p + seasonal_d + seasonal_q > 0 && s < 2 {
            return Err(Error::argument(
                "seasonal period must be at least 2 when seasonal orders are present",
            ));
        }
        Ok(Self {
            p,
            d,
            q,
            seasonal_p,
            seasonal_d,
            seasonal_q,
            s,
        })
    }

    /// Non-seasonal ARIMA(p,d,q).
    pub fn arima(p: usize, d: usize, q: usize) -> Self {
        Self {
            p,
            d,
            q,
            seasonal_p: 0,
            seasonal_d: 0,
            seasonal_q: 0,
            s: 1,
        }
    }

    /// Number of estimated ARMA coefficients (excluding sigma^2).
    pub fn n_coeffs(&self) -> usize {
        self.p + self.q + self.seasonal_p + self.seasonal_q
    }

    /// Degree of the expanded AR polynomial.
    pub fn ar_degree(&self) -> usize {
        self.p + self.s * self.seasonal_p
    }

    pub fn ma_degree(&self) -> usize {
        self.q + self.s * self.seasonal_q
    }

    /// Observations consumed by differencing.
    pub fn diff_span(&self) -> usize {
        self.d + self.s * self.seasonal_d
    }

    pub fn is_empty_model(&self) -> bool {
        self.n_coeffs() == 0 && self.d + self.seasonal_d == 0
    }

    /// Coefficient labels in vector order: ar, ma, sar, sma.
    pub fn coefficient_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.n_coeffs());
        names.extend((1..=self.p).map(|i| format!("ar{i}")));
        names.extend((1..=self.q).map(|i| format!("ma{i}")));
        names.extend((1..=self.seasonal_p).map(|i| format!("sar{i}")));
        names.extend((1..=self.seasonal_q).map(|i| format!("sma{i}")));
        names
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SARIMA({},{},{})", self.p, self.d, self.q)?;
        if self.seasonal_p + self.seasonal_d + self.seasonal_q > 0 || self.s > 1 {
            write!(
                f,
                "x({},{},{})[{}]",
                self.seasonal_p, self.seasonal_d, self.seasonal_q, self.s
            )?;
        }
        Ok(())
    }
}

/// Parses `p,d,q,P,D,Q,s`.
impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|v| v.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::argument(format!("spec {s:?} is not p,d,q,P,D,Q,s")))?;
        if parts.len() != 7 {
            return Err(Error::argument(format!(
                "spec {s:?} needs 7 comma-separated orders"
            )));
        }
        ModelSpec::new(parts[0], parts[1], parts[2], parts[3], parts[4], parts[5], parts[6])
    }
}

/// Coefficients under the sign conventions
/// AR: `(1 - phi_1 B - ...)(1 - Phi_1 B^s - ...)`,
/// MA: `(1 + theta_1 B + ...)(1 + Theta_1 B^s + ...)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub seasonal_phi: Vec<f64>,
    pub seasonal_theta: Vec<f64>,
    pub sigma2: f64,
}

impl CoefficientSet {
    pub fn zeros(spec: &ModelSpec) -> Self {
        Self {
            phi: vec![0.0; spec.p],
            theta: vec![0.0; spec.q],
            seasonal_phi: vec![0.0; spec.seasonal_p],
            seasonal_theta: vec![0.0; spec.seasonal_q],
            sigma2: 1.0,
        }
    }

    /// Assemble from a vector in `ar, ma, sar, sma` order.
    pub fn from_vec(spec: &ModelSpec, v: &[f64], sigma2: f64) -> Result<Self> {
        if v.len() != spec.n_coeffs() {
            return Err(Error::argument(format!(
                "{} coefficients supplied for {spec}, which has {}",
                v.len(),
                spec.n_coeffs()
            )));
        }
        let (phi, rest) = v.split_at(spec.p);
        let (theta, rest) = rest.split_at(spec.q);
        let (sphi, stheta) = rest.split_at(spec.seasonal_p);
        Ok(Self {
            phi: phi.to_vec(),
            theta: theta.to_vec(),
            seasonal_phi: sphi.to_vec(),
            seasonal_theta: stheta.to_vec(),
            sigma2,
        })
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.phi
            .iter()
            .chain(&self.theta)
            .chain(&self.seasonal_phi)
            .chain(&self.seasonal_theta)
            .copied()
            .collect()
    }

    pub fn check_dims(&self, spec: &ModelSpec) -> Result<()> {
        if self.phi.len() != spec.p
            || self.theta.len() != spec.q
            || self.seasonal_phi.len() != spec.seasonal_p
            || self.seasonal_theta.len() != spec.seasonal_q
        {
            return Err(Error::argument(format!(
                "coefficient dimensions ({},{},{},{}) do not match {spec}",
                self.phi.len(),
                self.theta.len(),
                self.seasonal_phi.len(),
                self.seasonal_theta.len()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let m: ModelSpec = "2,1,0,0,0,2,12".parse().unwrap();
        assert_eq!(m.to_string(), "SARIMA(2,1,0)x(0,0,2)[12]");
        assert_eq!(m.n_coeffs(), 4);
        assert_eq!(m.ma_degree(), 24);
        assert_eq!(m.coefficient_names(), ["ar1", "ar2", "sma1", "sma2"]);
        assert!("2,1,0".parse::<ModelSpec>().is_err());
        assert!("1,0,0,1,0,0,1".parse::<ModelSpec>().is_err());
    }

    #[test]
    fn json_uses_capital_seasonal_keys() {
        let m = ModelSpec::new(1, 1, 1, 1, 0, 0, 12).unwrap();
        let js = serde_json::to_string(&m).unwrap();
        assert_eq!(js, r#"{"p":1,"d":1,"q":1,"P":1,"D":0,"Q":0,"s":12}"#);
        assert_eq!(serde_json::from_str::<ModelSpec>(&js).unwrap(), m);
        assert!(serde_json::from_str::<ModelSpec>(r#"{"p":1,"d":1,"q":1,"P":1,"D":0,"Q":0,"s":1}"#).is_err());
    }

    #[test]
    fn vector_roundtrip() {
        let m = ModelSpec::new(2, 1, 1, 1, 0, 2, 12).unwrap();
        let v = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6];
        let c = CoefficientSet::from_vec(&m, &v, 2.0).unwrap();
        assert_eq!(c.seasonal_theta, vec![0.5, 0.6]);
        assert_eq!(c.to_vec(), v);
        assert!(CoefficientSet::from_vec(&m, &v[..5], 1.0).is_err());
    }
}
