//! Plain-text tables in the layouts of a Box-Jenkins write-up, each with a
//! CSV twin carrying the same numbers at full precision.
//!
//! Currency-like values print with 3 decimals, coefficients with 4, and
//! p-values below 0.01 as `<0.01`.

use std::fmt::Write;

use crate::forecasting::{ForecastSet, HoldoutLedger};
use crate::hypothesis::{format_p_value, TestReport};
use crate::sarima::FittedModel;
use crate::selection::Selection;

/// Sign convention line printed above every coefficient table.
pub const SIGN_CONVENTION: &str =
    "Sign convention: AR factors (1 - phi B), MA factors (1 + theta B)";

fn row(out: &mut String, cells: &[String], widths: &[usize]) {
    let line: Vec<String> = cells
        .iter()
        .zip(widths)
        .enumerate()
        .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
        .collect();
    let _ = writeln!(out, "{}", line.join("  ").trim_end());
}

fn table(header: &[&str], body: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in body {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    row(&mut out, &header.iter().map(|h| h.to_string()).collect::<Vec<_>>(), &widths);
    for r in body {
        row(&mut out, r, &widths);
    }
    out
}

/// Estimates with standard errors, z-values and p-values; one column per
/// coefficient.
pub struct CoefficientRows<'a> {
    pub names: &'a [String],
    pub estimates: &'a [f64],
    pub std_errors: Option<&'a [f64]>,
    pub z_values: Option<&'a [f64]>,
    pub p_values: Option<&'a [f64]>,
}

impl<'a> CoefficientRows<'a> {
    pub fn of(model: &'a FittedModel, names: &'a [String], estimates: &'a [f64]) -> Self {
        Self {
            names,
            estimates,
            std_errors: model.std_errors.as_deref(),
            z_values: model.z_values.as_deref(),
            p_values: model.p_values.as_deref(),
        }
    }

    pub fn to_text(&self) -> String {
        let na = || vec!["n/a".to_string(); self.names.len()];
        let fixed4 = |v: Option<&[f64]>| v.map_or_else(na, |v| v.iter().map(|x| format!("{x:.4}")).collect());
        let mut header = vec!["Coefficient"];
        header.extend(self.names.iter().map(|s| s.as_str()));
        let mut body = vec![];
        for (label, cells) in [
            ("Estimate", fixed4(Some(self.estimates))),
            ("Standard error", fixed4(self.std_errors)),
            ("z-value", fixed4(self.z_values)),
            (
                "p-value",
                self.p_values
                    .map_or_else(na, |v| v.iter().map(|p| format_p_value(*p)).collect()),
            ),
        ] {
            let mut r = vec![label.to_string()];
            r.extend(cells);
            body.push(r);
        }
        table(&header, &body)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("coefficient,estimate,std_error,z_value,p_value\n");
        let cell = |v: Option<&[f64]>, i: usize| v.map(|v| v[i].to_string()).unwrap_or_default();
        for (i, name) in self.names.iter().enumerate() {
            let _ = writeln!(
                out,
                "{name},{},{},{},{}",
                self.estimates[i],
                cell(self.std_errors, i),
                cell(self.z_values, i),
                cell(self.p_values, i)
            );
        }
        out
    }
}

pub fn coefficient_table(model: &FittedModel) -> String {
    let names = model.spec.coefficient_names();
    let est = model.coeffs.to_vec();
    let mut out = format!("{}\n{SIGN_CONVENTION}\n", model.spec);
    out.push_str(&CoefficientRows::of(model, &names, &est).to_text());
    let _ = writeln!(
        out,
        "sigma^2 = {:.6}  loglik = {:.3}  AIC = {:.2}  BIC = {:.2}  AICc = {:.2}",
        model.coeffs.sigma2,
        model.loglik,
        model.aic,
        model.bic(),
        model.aicc()
    );
    out
}

pub fn coefficient_csv(model: &FittedModel) -> String {
    let names = model.spec.coefficient_names();
    let est = model.coeffs.to_vec();
    CoefficientRows::of(model, &names, &est).to_csv()
}

/// Statistic / p-value table for one test.
pub fn test_table(report: &TestReport) -> String {
    let mut out = String::new();
    let stat = format!("{} Statistic", report.name);
    out.push_str(&table(
        &[stat.as_str(), "p-value"],
        &[vec![format!("{:.4}", report.statistic), report.p_value_display()]],
    ));
    for (k, v) in &report.params {
        let _ = writeln!(out, "{k} = {v}");
    }
    if let Some(d) = &report.decision {
        let _ = writeln!(
            out,
            "{} at alpha = {}",
            if d.reject { "reject H0" } else { "do not reject H0" },
            d.alpha
        );
    }
    out
}

pub fn test_csv(reports: &[TestReport]) -> String {
    let mut out = String::from("test,statistic,p_value\n");
    for r in reports {
        let _ = writeln!(out, "{},{},{}", r.name, r.statistic, r.p_value);
    }
    out
}

/// Month, year, actual, one-step forecast, error, then the MAPE line.
pub fn holdout_table(ledger: &HoldoutLedger) -> String {
    let body: Vec<Vec<String>> = ledger
        .rows
        .iter()
        .map(|r| {
            vec![
                r.month.month_abbrev().to_string(),
                r.month.year().to_string(),
                format!("{:.3}", r.actual),
                format!("{:.3}", r.forecast),
                format!("{:.3}", r.error),
            ]
        })
        .collect();
    let mut out = table(
        &["Month", "Year", "Actual Value", "One Step Ahead Forecast", "Forecast Error"],
        &body,
    );
    let _ = writeln!(out, "MAPE = {:.2}%", ledger.mape);
    out
}

pub fn holdout_csv(ledger: &HoldoutLedger) -> String {
    let mut out = String::from("month,actual,forecast,error\n");
    for r in &ledger.rows {
        let _ = writeln!(out, "{},{},{},{}", r.month, r.actual, r.forecast, r.error);
    }
    out
}

/// Month, year, point forecast, lower and upper bounds.
pub fn forecast_table(fs: &ForecastSet) -> String {
    let pct = (100.0 * fs.level * 1e6).round() / 1e6;
    let lower = format!("Lower {pct}% Bound");
    let upper = format!("Upper {pct}% Bound");
    let body: Vec<Vec<String>> = fs
        .months()
        .enumerate()
        .map(|(i, m)| {
            vec![
                m.month_abbrev().to_string(),
                m.year().to_string(),
                format!("{:.3}", fs.points[i]),
                format!("{:.3}", fs.lower[i]),
                format!("{:.3}", fs.upper[i]),
            ]
        })
        .collect();
    table(&["Month", "Year", "Forecast", &lower, &upper], &body)
}

pub fn forecast_csv(fs: &ForecastSet) -> String {
    let mut out = String::from("month,forecast,lower,upper,half_width_transformed\n");
    for (i, m) in fs.months().enumerate() {
        let _ = writeln!(
            out,
            "{m},{},{},{},{}",
            fs.points[i], fs.lower[i], fs.upper[i], fs.half_widths[i]
        );
    }
    out
}

/// AIC ranking with verdicts and reasons.
pub fn selection_table(sel: &Selection) -> String {
    let body: Vec<Vec<String>> = sel
        .ranking
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let aic = r.aic().map_or("n/a".to_string(), |a| format!("{a:.2}"));
            vec![
                (i + 1).to_string(),
                r.spec.to_string(),
                aic,
                r.verdict.to_string(),
                r.reasons.join("; "),
            ]
        })
        .collect();
    table(&["Rank", "Tentative Model", "AIC", "Verdict", "Reasons"], &body)
}

pub fn selection_csv(sel: &Selection) -> String {
    let mut out = String::from("rank,spec,aic,verdict,reasons\n");
    for (i, r) in sel.ranking.iter().enumerate() {
        let aic = r.aic().map(|a| a.to_string()).unwrap_or_default();
        let reasons = r.reasons.join("; ").replace('"', "'");
        let _ = writeln!(out, "{},{},{aic},{},\"{reasons}\"", i + 1, r.spec, r.verdict);
    }
    out
}
