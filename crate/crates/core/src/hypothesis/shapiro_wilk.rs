//! Shapiro-Wilk W test following Royston's AS R94 (1995) approximation:
//! polynomial-corrected normal-score weights for W, and a normalizing
//! transform of `1 - W` for the p-value.

use super::report::{TestName, TestReport};
use super::special::{normal_quantile, normal_sf};
use crate::error::{Error, Result};

const SMALL: f64 = 1e-19;

const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056];
const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
const C3: [f64; 4] = [0.544, -0.39978, 0.025054, -6.714e-4];
const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];
const G: [f64; 2] = [-2.273, 0.459];

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

/// Antisymmetric weights for the upper half of the order statistics:
/// `a[i]` pairs with `x_(n-1-i)` (positive) and `x_(i)` (negative).
fn weights(n: usize) -> Result<Vec<f64>> {
    let half = n / 2;
    if n == 3 {
        return Ok(vec![std::f64::consts::FRAC_1_SQRT_2]);
    }
    let an = n as f64;
    let m: Vec<f64> = (1..=half)
        .map(|i| normal_quantile((i as f64 - 0.375) / (an + 0.25)).map(|q| -q))
        .collect::<Result<_>>()?;
    let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
    let ssumm2 = summ2.sqrt();
    let rsn = 1.0 / an.sqrt();
    let a1 = poly(&C1, rsn) + m[0] / ssumm2;
    let mut a = vec![0.0; half];
    a[0] = a1;
    let (first_scaled, fac) = if n > 5 {
        let a2 = m[1] / ssumm2 + poly(&C2, rsn);
        a[1] = a2;
        let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1])
            / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2))
            .sqrt();
        (2, fac)
    } else {
        let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
        (1, fac)
    };
    for i in first_scaled..half {
        a[i] = m[i] / fac;
    }
    Ok(a)
}

/// W statistic and p-value for `3 <= n <= 5000`.
pub fn shapiro_wilk(x: &[f64]) -> Result<TestReport> {
    let n = x.len();
    if !(3..=5000).contains(&n) {
        return Err(Error::argument(format!(
            "Shapiro-Wilk needs 3 <= n <= 5000, got {n}"
        )));
    }
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::Domain {
            index: i,
            message: "non-finite sample value".into(),
        });
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let range = sorted[n - 1] - sorted[0];
    if range < SMALL {
        return Err(Error::DegenerateVariance("sample has zero range".into()));
    }
    let a = weights(n)?;
    let half = n / 2;
    let coef = |i: usize| -> f64 {
        if i < half {
            -a[i]
        } else if i >= n - half {
            a[n - 1 - i]
        } else {
            0.0
        }
    };
    // squared correlation between the scaled sample and the weights
    let an = n as f64;
    let scaled: Vec<f64> = sorted.iter().map(|v| v / range).collect();
    let sx = scaled.iter().sum::<f64>() / an;
    let sa = (0..n).map(coef).sum::<f64>() / an;
    let (mut ssa, mut ssx, mut sax) = (0.0, 0.0, 0.0);
    for (i, xi) in scaled.iter().enumerate() {
        let asa = coef(i) - sa;
        let xsx = xi - sx;
        ssa += asa * asa;
        ssx += xsx * xsx;
        sax += asa * xsx;
    }
    // 1 - W, computed directly to avoid cancellation near W = 1
    let ssassx = (ssa * ssx).sqrt();
    let w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
    let w = 1.0 - w1;

    let p = if n == 3 {
        // exact: (6/pi) (asin(sqrt(W)) - asin(sqrt(3/4)))
        let p = 6.0 / std::f64::consts::PI * (w.sqrt().asin() - (0.75f64).sqrt().asin());
        p.max(0.0)
    } else {
        let y = w1.ln();
        let (stat, mean, sd) = if n <= 11 {
            let gamma = poly(&G, an);
            if y >= gamma {
                return Ok(report(w, 1e-99, n));
            }
            (-(gamma - y).ln(), poly(&C3, an), poly(&C4, an).exp())
        } else {
            let ln_n = an.ln();
            (y, poly(&C5, ln_n), poly(&C6, ln_n).exp())
        };
        normal_sf((stat - mean) / sd)
    };
    Ok(report(w, p, n))
}

fn report(w: f64, p: f64, n: usize) -> TestReport {
    TestReport::new(TestName::ShapiroWilk, w, p)
        .param("n", n)
        .param("method", "Royston AS R94")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn three_point_symmetric_sample() {
        // brute-force W definition: W = (sum a_i x_(i))^2 / sum (x - mean)^2,
        // with a = (-1/sqrt2, 0, 1/sqrt2) for n = 3
        let x = [-1.0, 0.0, 1.0];
        let a = [-std::f64::consts::FRAC_1_SQRT_2, 0.0, std::f64::consts::FRAC_1_SQRT_2];
        let num: f64 = a.iter().zip(&x).map(|(a, x)| a * x).sum::<f64>().powi(2);
        let den: f64 = x.iter().map(|v| v * v).sum();
        let r = shapiro_wilk(&x).unwrap();
        assert_abs_diff_eq!(r.statistic, num / den, epsilon = 1e-12);
        assert_abs_diff_eq!(r.p_value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn affine_invariance() {
        let x = [2.1, -0.3, 4.4, 0.9, 1.7, 3.3, -1.2, 0.2, 2.8, 5.9, 0.0, 1.1, 2.2];
        let base = shapiro_wilk(&x).unwrap();
        let y: Vec<f64> = x.iter().map(|v| 40.0 - 7.0 * v).collect();
        let other = shapiro_wilk(&y).unwrap();
        assert_abs_diff_eq!(base.statistic, other.statistic, epsilon = 1e-12);
        assert!(base.statistic > 0.0 && base.statistic <= 1.0);
    }

    #[test]
    fn range_errors() {
        assert!(matches!(shapiro_wilk(&[1.0, 2.0]), Err(Error::Argument(_))));
        assert!(matches!(shapiro_wilk(&vec![0.5; 5001]), Err(Error::Argument(_))));
        assert!(matches!(shapiro_wilk(&[2.0; 8]), Err(Error::DegenerateVariance(_))));
    }
}
