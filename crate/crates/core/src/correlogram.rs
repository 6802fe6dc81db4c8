//! Sample ACF / PACF with white-noise bands, plus CSV and SVG renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypothesis::special::normal_quantile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CorrelogramKind {
    Acf,
    Pacf,
}

/// Correlations at lags `1..=values.len()`. The ACF's lag-0 value of 1 is
/// implicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correlogram {
    pub kind: CorrelogramKind,
    pub values: Vec<f64>,
    /// Half-width of the white-noise band.
    pub band: f64,
    pub level: f64,
    pub n: usize,
    /// Set when a PACF value had to be clipped into (-1, 1).
    #[serde(default)]
    pub clipped: bool,
}

impl Correlogram {
    pub fn max_lag(&self) -> usize {
        self.values.len()
    }

    /// Lags whose value lies strictly outside the band.
    pub fn spikes(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > self.band)
            .map(|(i, _)| i + 1)
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("lag,value,band\n");
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", i + 1, v, self.band);
        }
        out
    }

    /// Self-contained stem plot: one `<line>` per lag and dashed band lines.
    pub fn to_svg(&self, title: &str) -> String {
        let (w, h) = (640.0, 320.0);
        let (left, right, top, bottom) = (48.0, 16.0, 32.0, 32.0);
        let plot_w = w - left - right;
        let plot_h = h - top - bottom;
        let k = self.values.len().max(1) as f64;
        let x_of = |lag: usize| left + plot_w * lag as f64 / (k + 1.0);
        let y_of = |v: f64| top + plot_h * (1.0 - v) / 2.0;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
        );
        let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
            w / 2.0,
            escape(title)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{left}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="1"/>"#,
            y_of(0.0),
            w - right,
            y_of(0.0)
        );
        for b in [self.band, -self.band] {
            let _ = writeln!(
                s,
                r#"<line class="band" x1="{left}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="blue" stroke-dasharray="4 3"/>"#,
                y_of(b),
                w - right,
                y_of(b)
            );
        }
        for (i, v) in self.values.iter().enumerate() {
            let x = x_of(i + 1);
            let _ = writeln!(
                s,
                r#"<line class="stem" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black" stroke-width="2"/>"#,
                y_of(0.0),
                y_of(*v)
            );
        }
        for lag in (0..=self.values.len()).step_by(6.max(self.values.len() / 8)) {
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="middle">{lag}</text>"#,
                x_of(lag),
                h - 12.0
            );
        }
        for v in [-1.0, 0.0, 1.0] {
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="end">{v}</text>"#,
                left - 6.0,
                y_of(v) + 3.0
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// `min(10 log10 n, n - 1)`, rounded down.
pub fn default_max_lag(n: usize) -> usize {
    let f = (10.0 * (n as f64).log10()).floor() as usize;
    f.min(n.saturating_sub(1)).max(1)
}

/// Band half-width `z_{(1+level)/2} / sqrt(n)`.
pub fn band(n: usize, level: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::argument("band needs n >= 2"));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::argument(format!("level {level} outside (0, 1)")));
    }
    Ok(normal_quantile((1.0 + level) / 2.0)? / (n as f64).sqrt())
}

/// Biased (denominator-n) sample autocorrelations at lags `0..=max_lag`.
pub fn autocorrelations(x: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = x.len();
    if max_lag >= n {
        return Err(Error::argument(format!(
            "max_lag {max_lag} must be below series length {n}"
        )));
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let dev: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let c0: f64 = dev.iter().map(|d| d * d).sum();
    if !(c0 > 0.0) || c0 <= f64::EPSILON * f64::EPSILON * n as f64 * mean * mean {
        return Err(Error::DegenerateVariance("series is constant".into()));
    }
    let mut out = Vec::with_capacity(max_lag + 1);
    out.push(1.0);
    for k in 1..=max_lag {
        let ck: f64 = dev[k..].iter().zip(&dev[..n - k]).map(|(a, b)| a * b).sum();
        out.push(ck / c0);
    }
    Ok(out)
}

pub fn acf(x: &[f64], max_lag: usize) -> Result<Correlogram> {
    acf_at(x, max_lag, 0.95)
}

pub fn acf_at(x: &[f64], max_lag: usize, level: f64) -> Result<Correlogram> {
    check_lag(max_lag)?;
    let r = autocorrelations(x, max_lag)?;
    Ok(Correlogram {
        kind: CorrelogramKind::Acf,
        values: r[1..].to_vec(),
        band: band(x.len(), level)?,
        level,
        n: x.len(),
        clipped: false,
    })
}

fn check_lag(max_lag: usize) -> Result<()> {
    if max_lag == 0 {
        return Err(Error::argument("max_lag must be positive"));
    }
    Ok(())
}

/// Durbin-Levinson recursion on autocorrelations `r[0..=K]`, returning
/// `phi_kk` for `k = 1..=K` and whether any value was clipped.
pub fn durbin_levinson(r: &[f64]) -> (Vec<f64>, bool) {
    let k_max = r.len() - 1;
    let mut out = Vec::with_capacity(k_max);
    let mut phi: Vec<f64> = Vec::with_capacity(k_max);
    let mut v = 1.0;
    let mut clipped = false;
    const LIMIT: f64 = 1.0 - 1e-12;
    for k in 1..=k_max {
        let num = r[k] - phi.iter().enumerate().map(|(j, p)| p * r[k - 1 - j]).sum::<f64>();
        let mut kk = num / v;
        if !(kk.abs() < 1.0) {
            kk = if kk.is_nan() { 0.0 } else { kk.clamp(-LIMIT, LIMIT) };
            clipped = true;
        }
        let prev = phi.clone();
        for j in 0..phi.len() {
            phi[j] = prev[j] - kk * prev[prev.len() - 1 - j];
        }
        phi.push(kk);
        v *= 1.0 - kk * kk;
        out.push(kk);
    }
    (out, clipped)
}

pub fn pacf(x: &[f64], max_lag: usize) -> Result<Correlogram> {
    pacf_at(x, max_lag, 0.95)
}

pub fn pacf_at(x: &[f64], max_lag: usize, level: f64) -> Result<Correlogram> {
    check_lag(max_lag)?;
    let r = autocorrelations(x, max_lag)?;
    let (values, clipped) = durbin_levinson(&r);
    Ok(Correlogram {
        kind: CorrelogramKind::Pacf,
        values,
        band: band(x.len(), level)?,
        level,
        n: x.len(),
        clipped,
    })
}
