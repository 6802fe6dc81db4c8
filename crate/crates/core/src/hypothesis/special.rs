//! Special functions backing the test p-values, bands and intervals.

use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 10_000;

/// Lanczos coefficients for g = 7, n = 9.
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn gamma_prefactor(a: f64, x: f64) -> f64 {
    (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn lower_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * gamma_prefactor(a, x)
}

// modified Lentz evaluation of the upper continued fraction
fn upper_fraction(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    gamma_prefactor(a, x) * h
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x < a + 1.0 {
        lower_series(a, x)
    } else {
        1.0 - upper_fraction(a, x)
    }
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 - P(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x < a + 1.0 {
        1.0 - lower_series(a, x)
    } else {
        upper_fraction(a, x)
    }
}

/// Chi-square survival function `P(X > x)` with `df` degrees of freedom.
pub fn chi_sq_sf(x: f64, df: f64) -> f64 {
    gamma_q(df / 2.0, x / 2.0)
}

pub fn chi_sq_cdf(x: f64, df: f64) -> f64 {
    gamma_p(df / 2.0, x / 2.0)
}

/// Standard normal CDF, via `erfc(t) = Q(1/2, t^2)`.
pub fn normal_cdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    let tail = 0.5 * gamma_q(0.5, 0.5 * z * z);
    if z < 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

/// Standard normal upper tail `P(Z > z)`, accurate far into the tail.
pub fn normal_sf(z: f64) -> f64 {
    normal_cdf(-z)
}

pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

// Acklam's rational approximation, relative error ~1.2e-9.
const QA: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const QB: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const QC: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const QD: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];

fn acklam(p: f64) -> f64 {
    const P_LOW: f64 = 0.02425;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((QC[0] * q + QC[1]) * q + QC[2]) * q + QC[3]) * q + QC[4]) * q + QC[5])
            / ((((QD[0] * q + QD[1]) * q + QD[2]) * q + QD[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((QA[0] * r + QA[1]) * r + QA[2]) * r + QA[3]) * r + QA[4]) * r + QA[5]) * q
            / (((((QB[0] * r + QB[1]) * r + QB[2]) * r + QB[3]) * r + QB[4]) * r + 1.0)
    } else {
        -acklam(1.0 - p)
    }
}

/// Inverse standard normal CDF.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::argument(format!("quantile level {p} outside (0, 1)")));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    // work in the lower tail so the polish step keeps relative precision
    let (lower, sign) = if p < 0.5 { (p, 1.0) } else { (1.0 - p, -1.0) };
    let x = acklam(lower);
    let err = normal_cdf(x) - lower;
    let u = err / normal_pdf(x);
    // Halley-corrected Newton step
    let x = x - u / (1.0 + 0.5 * x * u);
    Ok(sign * x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ln_gamma_known_values() {
        assert_abs_diff_eq!(ln_gamma(1.0), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ln_gamma(2.0), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ln_gamma(0.5), 0.5 * std::f64::consts::PI.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(ln_gamma(11.0), (3_628_800f64).ln(), epsilon = 1e-12);
    }

    #[test]
    fn chi_sq_closed_forms() {
        for df in [1.0, 3.0, 20.0] {
            assert_eq!(chi_sq_sf(0.0, df), 1.0);
        }
        for x in [0.5, 1.0, 5.0] {
            assert_abs_diff_eq!(chi_sq_sf(x, 2.0), (-x / 2.0).exp(), epsilon = 1e-14);
        }
        // df = 4: sf = exp(-x/2)(1 + x/2)
        for x in [0.1, 3.0, 12.0, 40.0] {
            assert_abs_diff_eq!(chi_sq_sf(x, 4.0), (-x / 2.0).exp() * (1.0 + x / 2.0), epsilon = 1e-13);
        }
    }

    #[test]
    fn sf_plus_cdf_is_one() {
        for df in [1.0, 2.5, 7.0, 20.0, 60.0] {
            for x in [0.01, 0.5, 2.0, 10.0, 22.443, 80.0] {
                assert_abs_diff_eq!(chi_sq_sf(x, df) + chi_sq_cdf(x, df), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn sf_strictly_decreasing() {
        let mut prev = 1.0;
        for i in 1..400 {
            let v = chi_sq_sf(i as f64 * 0.2, 20.0);
            assert!(v < prev || v == 1.0, "x = {}", i as f64 * 0.2);
            prev = v;
        }
    }

    #[test]
    fn normal_cdf_reference_points() {
        assert_abs_diff_eq!(normal_cdf(0.0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(normal_cdf(1.959_963_984_540_054), 0.975, epsilon = 1e-13);
        assert_abs_diff_eq!(normal_cdf(-1.0), 0.158_655_253_931_457_05, epsilon = 1e-13);
        // deep tail keeps relative accuracy
        let t = normal_sf(10.0);
        assert!((t / 7.619_853_024_160_527e-24 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn quantile_symmetry_and_errors() {
        assert_eq!(normal_quantile(0.5).unwrap(), 0.0);
        for p in [0.01, 0.1, 0.3] {
            let lo = normal_quantile(p).unwrap();
            let hi = normal_quantile(1.0 - p).unwrap();
            assert_abs_diff_eq!(lo, -hi, epsilon = 1e-12);
        }
        assert!(normal_quantile(0.0).is_err());
        assert!(normal_quantile(1.0).is_err());
        assert!(normal_quantile(f64::NAN).is_err());
    }

    #[test]
    fn quantile_inverts_cdf() {
        for p in [1e-12, 1e-5, 0.001, 0.02, 0.2, 0.6, 0.9, 0.999, 1.0 - 1e-9] {
            let x = normal_quantile(p).unwrap();
            let back = normal_cdf(x);
            assert!((back - p).abs() <= 1e-12 * p.min(1.0 - p).max(1e-3), "p={p} back={back}");
        }
    }
}
