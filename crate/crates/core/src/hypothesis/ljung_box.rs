use super::report::{TestName, TestReport};
use super::special::chi_sq_sf;
use crate::correlogram::autocorrelations;
use crate::error::{Error, Result};

/// Ljung-Box portmanteau statistic `Q = n(n+2) sum_{k<=h} r_k^2 / (n-k)`,
/// referred to chi-square with `h - fitdf` degrees of freedom.
pub fn ljung_box(residuals: &[f64], h: usize, fitdf: usize) -> Result<TestReport> {
    if h == 0 || h <= fitdf {
        return Err(Error::argument(format!(
            "lag count h = {h} must exceed fitted degrees of freedom {fitdf}"
        )));
    }
    let n = residuals.len();
    if n <= h {
        return Err(Error::Length {
            needed: h,
            got: n,
            context: "Ljung-Box",
        });
    }
    let r = autocorrelations(residuals, h)?;
    let nf = n as f64;
    let q = nf
        * (nf + 2.0)
        * r[1..]
            .iter()
            .enumerate()
            .map(|(i, rk)| rk * rk / (nf - (i + 1) as f64))
            .sum::<f64>();
    let df = (h - fitdf) as f64;
    Ok(TestReport::new(TestName::LjungBox, q, chi_sq_sf(q, df))
        .param("h", h)
        .param("fitdf", fitdf)
        .param("df", h - fitdf)
        .param("n", n))
}
