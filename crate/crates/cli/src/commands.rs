use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::PathBuf;

use serde::Serialize;
use serde_json::json;

use sarima_core::correlogram::{acf, pacf, Correlogram};
use sarima_core::csv::{read_series, IngestReport};
use sarima_core::forecasting::{forecast, one_step_holdout};
use sarima_core::hypothesis::{adf_test, ljung_box, shapiro_wilk};
use sarima_core::report;
use sarima_core::sarima::fit;
use sarima_core::selection::run_selection;
use sarima_core::transform::{box_cox, difference_seasonal};
use sarima_core::{Error, FittedModel, TestReport, TimeSeries, TransformRecord};

use crate::config::RunConfig;

/// An error tagged with the stage that raised it.
#[derive(Debug)]
pub struct Failure {
    pub stage: &'static str,
    pub error: Error,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.stage, self.error)
    }
}

trait Stage<T> {
    fn stage(self, stage: &'static str) -> Result<T, Failure>;
}

impl<T> Stage<T> for sarima_core::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T, Failure> {
        self.map_err(|error| Failure { stage, error })
    }
}

/// Files to write (relative to the output directory unless absolute) and
/// the text echoed to stdout. A run can produce artifacts and still fail,
/// as `select` does when no candidate survives.
#[derive(Default)]
pub struct Artifacts {
    pub files: Vec<(PathBuf, String)>,
    pub stdout: String,
    pub failure: Option<Failure>,
}

impl Artifacts {
    fn file(&mut self, name: impl Into<PathBuf>, contents: impl Into<String>) {
        self.files.push((name.into(), contents.into()));
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<(), Failure> {
        let text = serde_json::to_string_pretty(value).map_err(Error::from).stage("output")?;
        self.file(name, text + "\n");
        Ok(())
    }
}

fn ingest(cfg: &RunConfig) -> Result<TimeSeries, Failure> {
    let path = cfg.input().stage("config")?;
    read_series(path, cfg.period).stage("ingest")
}

fn ingest_line(series: &TimeSeries) -> String {
    let r = IngestReport::of(series);
    format!(
        "Input: n = {}, {}..{}, min = {:.3}, max = {:.3}\n",
        r.n, r.start, r.end, r.min, r.max
    )
}

fn training(cfg: &RunConfig, series: &TimeSeries) -> Result<(TimeSeries, Option<TimeSeries>), Failure> {
    match cfg.split {
        Some(s) => s.apply(series).stage("split"),
        None => Ok((series.clone(), None)),
    }
}

fn scale_label(lambda: Option<f64>) -> String {
    match lambda {
        None => "Working scale: original units (no Box-Cox)".into(),
        Some(l) if l == 0.0 => "Working scale: natural log (Box-Cox lambda = 0)".into(),
        Some(l) => format!("Working scale: Box-Cox lambda = {l}"),
    }
}

fn load_model(cfg: &RunConfig) -> Result<FittedModel, Failure> {
    let path = cfg.model_path();
    let text = std::fs::read_to_string(&path).map_err(|e| Failure {
        stage: "model",
        error: if e.kind() == std::io::ErrorKind::NotFound {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("model file not found: {}", path.display()),
            ))
        } else {
            Error::Io(e)
        },
    })?;
    FittedModel::from_json(&text).stage("model")
}

fn correlogram_files(out: &mut Artifacts, prefix: &str, title: &str, acf: &Correlogram, pacf: &Correlogram) {
    out.file(format!("{prefix}acf.csv"), acf.to_csv());
    out.file(format!("{prefix}pacf.csv"), pacf.to_csv());
    out.file(format!("{prefix}acf.svg"), acf.to_svg(&format!("ACF of {title}")));
    out.file(format!("{prefix}pacf.svg"), pacf.to_svg(&format!("PACF of {title}")));
}

fn spikes_line(name: &str, c: &Correlogram) -> String {
    format!("{name} spikes beyond +/-{:.4} (lags 1..{}): {:?}\n", c.band, c.max_lag(), c.spikes())
}

/// Unit-root tests on the working level and on the differenced series, and
/// the correlograms of the differenced series.
pub fn identify(cfg: &RunConfig) -> Result<Artifacts, Failure> {
    let series = ingest(cfg)?;
    let (train, _) = training(cfg, &series)?;
    let lambda = cfg.lambda_for(&train).stage("transform")?;
    let working = match lambda {
        Some(l) => box_cox(&train, l).stage("transform")?,
        None => train.clone(),
    };
    let (d, sd, s) = match cfg.spec {
        Some(spec) => (spec.d, spec.seasonal_d, spec.s),
        None => (1, 0, cfg.period),
    };
    let (diffed, _) = difference_seasonal(&working, d, sd, s).stage("transform")?;
    let level_adf = adf_test(working.values(), cfg.adf_regression, cfg.adf_lags)
        .stage("adf")?
        .with_decision(0.05);
    let diff_adf = adf_test(diffed.values(), cfg.adf_regression, cfg.adf_lags)
        .stage("adf")?
        .with_decision(0.05);
    let lags = cfg.correlogram_lags(diffed.len());
    let a = acf(diffed.values(), lags).stage("correlogram")?;
    let p = pacf(diffed.values(), lags).stage("correlogram")?;

    let mut text = ingest_line(&series);
    let _ = writeln!(text, "Training: n = {}, {}..{}", train.len(), train.start(), train.end());
    let _ = writeln!(text, "{}", scale_label(lambda));
    let _ = writeln!(text, "\nAugmented Dickey-Fuller, working level");
    text.push_str(&report::test_table(&level_adf));
    let _ = writeln!(text, "\nAugmented Dickey-Fuller, differenced (d = {d}, D = {sd}, s = {s})");
    text.push_str(&report::test_table(&diff_adf));
    text.push('\n');
    text.push_str(&spikes_line("ACF", &a));
    text.push_str(&spikes_line("PACF", &p));

    let mut out = Artifacts::default();
    correlogram_files(&mut out, "", "differenced series", &a, &p);
    out.json(
        "identify.json",
        &json!({
            "ingest": IngestReport::of(&series),
            "training": IngestReport::of(&train),
            "lambda": lambda,
            "differencing": {"d": d, "D": sd, "s": s},
            "adf_level": level_adf,
            "adf_differenced": diff_adf,
            "acf": a,
            "pacf": p,
        }),
    )?;
    out.file("identify.txt", text.clone());
    out.stdout = text;
    Ok(out)
}

pub fn fit_model(cfg: &RunConfig) -> Result<Artifacts, Failure> {
    let spec = cfg.spec().stage("config")?;
    let series = ingest(cfg)?;
    let (train, _) = training(cfg, &series)?;
    let lambda = cfg.lambda_for(&train).stage("transform")?;
    let record = lambda.map_or_else(TransformRecord::identity, TransformRecord::box_cox);
    let model = fit(&train, &spec, &record).stage("fit")?;

    let mut text = ingest_line(&series);
    let _ = writeln!(text, "Training: n = {}, {}..{}", train.len(), train.start(), train.end());
    let _ = writeln!(text, "{}\n", scale_label(lambda));
    text.push_str(&report::coefficient_table(&model));
    if model.std_errors.is_none() {
        text.push_str("Standard errors unavailable: the Hessian is not positive definite at the optimum\n");
    }

    let mut out = Artifacts::default();
    out.file("coefficients.csv", report::coefficient_csv(&model));
    out.json(
        "fit.json",
        &json!({
            "spec": model.spec,
            "lambda": lambda,
            "n_train": train.len(),
            "train_start": train.start(),
            "train_end": train.end(),
            "coefficients": model.coeffs,
            "std_errors": model.std_errors,
            "z_values": model.z_values,
            "p_values": model.p_values,
            "loglik": model.loglik,
            "aic": model.aic,
            "bic": model.bic(),
            "aicc": model.aicc(),
        }),
    )?;
    out.file(cfg.model_path(), model.to_json().stage("output")? + "\n");
    out.file("coefficients.txt", text.clone());
    out.stdout = text;
    Ok(out)
}

/// Observations of `series` after the model's training window.
fn after_training(model: &FittedModel, series: &TimeSeries) -> Result<TimeSeries, Failure> {
    let first = model.working.end().add_months(1);
    let offset = series.start().months_until(first);
    if offset <= 0 {
        // starts at or after the first test month; the holdout replay
        // reports any gap
        return Ok(series.clone());
    }
    let offset = offset as usize;
    if offset >= series.len() {
        return Err(Failure {
            stage: "evaluate",
            error: Error::Alignment(format!(
                "input ends {} but the model was trained through {}; nothing to evaluate",
                series.end(),
                model.working.end()
            )),
        });
    }
    let (_, rest) = series.split_at(offset).stage("evaluate")?;
    Ok(rest.expect("offset is inside the series"))
}

/// Residual portmanteau and normality tests, plus the Shapiro-Wilk test on
/// one-step holdout errors when the input extends past the training window.
pub fn diagnose(cfg: &RunConfig) -> Result<Artifacts, Failure> {
    let model = load_model(cfg)?;
    let res = model.effective_residuals();
    let n = res.len();
    let k = model.spec.n_coeffs();
    let h = cfg.ljung_box_h.unwrap_or(2 * model.spec.s.max(cfg.period).max(1)).min(n - 1);
    let mut reports: BTreeMap<&str, TestReport> = BTreeMap::new();
    reports.insert(
        "ljung_box",
        ljung_box(res, h, k.min(h - 1)).stage("ljung-box")?.with_decision(0.05),
    );
    let squared: Vec<f64> = res.iter().map(|e| e * e).collect();
    let ml_h = model.spec.s.max(2).min(n - 1);
    reports.insert(
        "mcleod_li",
        ljung_box(&squared, ml_h, 0).stage("mcleod-li")?.with_decision(0.05),
    );
    if (3..=5000).contains(&n) {
        reports.insert(
            "shapiro_wilk_residuals",
            shapiro_wilk(res).stage("shapiro-wilk")?.with_decision(0.05),
        );
    }
    let mut holdout = None;
    if let Some(path) = &cfg.input {
        let series = read_series(path, cfg.period).stage("ingest")?;
        if series.end() > model.working.end() {
            let test = after_training(&model, &series)?;
            let ledger = one_step_holdout(&model, &test).stage("evaluate")?;
            if ledger.rows.len() >= 3 {
                reports.insert(
                    "shapiro_wilk_holdout",
                    shapiro_wilk(&ledger.errors()).stage("shapiro-wilk")?.with_decision(0.05),
                );
            }
            holdout = Some(ledger);
        }
    }
    let lags = cfg.correlogram_lags(n);
    let a = acf(res, lags).stage("correlogram")?;
    let p = pacf(res, lags).stage("correlogram")?;

    let mut text = format!("{}\n{}\n", model.spec, scale_label(model.transform.lambda));
    let titles = [
        ("ljung_box", format!("Ljung-Box on residuals (h = {h}, fitdf = {})", k.min(h - 1))),
        ("mcleod_li", format!("Ljung-Box on squared residuals (h = {ml_h})")),
        ("shapiro_wilk_residuals", "Shapiro-Wilk on residuals".to_string()),
        ("shapiro_wilk_holdout", "Shapiro-Wilk on one-step holdout errors".to_string()),
    ];
    for (key, title) in titles {
        if let Some(r) = reports.get(key) {
            let _ = writeln!(text, "\n{title}");
            text.push_str(&report::test_table(r));
        }
    }
    text.push('\n');
    text.push_str(&spikes_line("Residual ACF", &a));
    text.push_str(&spikes_line("Residual PACF", &p));

    let mut out = Artifacts::default();
    correlogram_files(&mut out, "residual_", "residuals", &a, &p);
    let all: Vec<TestReport> = reports.values().cloned().collect();
    out.file("tests.csv", report::test_csv(&all));
    out.json("diagnose.json", &json!({"spec": model.spec, "tests": reports, "holdout": holdout}))?;
    out.file("diagnose.txt", text.clone());
    out.stdout = text;
    Ok(out)
}

pub fn forecast_model(cfg: &RunConfig) -> Result<Artifacts, Failure> {
    let model = load_model(cfg)?;
    let fs = forecast(&model, cfg.horizon, cfg.level).stage("forecast")?;
    let mut text = format!("{}\n{}\n\n", model.spec, scale_label(model.transform.lambda));
    text.push_str(&report::forecast_table(&fs));
    let mut out = Artifacts::default();
    out.file("forecast.csv", report::forecast_csv(&fs));
    out.json("forecast.json", &fs)?;
    out.file("forecast.txt", text.clone());
    out.stdout = text;
    Ok(out)
}

/// One-step-ahead holdout replay over the input's observations after the
/// training window.
pub fn evaluate(cfg: &RunConfig) -> Result<Artifacts, Failure> {
    let model = load_model(cfg)?;
    let series = ingest(cfg)?;
    let test = after_training(&model, &series)?;
    let ledger = one_step_holdout(&model, &test).stage("evaluate")?;
    let mut text = format!("{}\n\n", model.spec);
    text.push_str(&report::holdout_table(&ledger));
    let normality = if ledger.rows.len() >= 3 {
        let r = shapiro_wilk(&ledger.errors()).stage("shapiro-wilk")?;
        let _ = writeln!(text, "\nShapiro-Wilk on forecast errors");
        text.push_str(&report::test_table(&r));
        Some(r)
    } else {
        None
    };
    let mut out = Artifacts::default();
    out.file("holdout.csv", report::holdout_csv(&ledger));
    out.json("holdout.json", &json!({"ledger": ledger, "shapiro_wilk": normality}))?;
    out.file("holdout.txt", text.clone());
    out.stdout = text;
    Ok(out)
}

pub fn select(cfg: &RunConfig) -> Result<Artifacts, Failure> {
    let series = ingest(cfg)?;
    let (train, _) = training(cfg, &series)?;
    let lambda = cfg.lambda_for(&train).stage("transform")?;
    let record = lambda.map_or_else(TransformRecord::identity, TransformRecord::box_cox);
    let grid = cfg.grid();
    let mut selection = run_selection(&train, &grid, &record, &cfg.gates).stage("select")?;

    let mut out = Artifacts::default();
    let mut text = ingest_line(&series);
    let _ = writeln!(text, "{}\n", scale_label(lambda));
    text.push_str(&report::selection_table(&selection));
    match selection.selected() {
        Ok(chosen) => {
            let model = chosen.fit.as_ref().expect("selected candidates carry their fit");
            let _ = writeln!(text, "\nSelected: {}\n", model.spec);
            text.push_str(&report::coefficient_table(model));
            out.file(cfg.model_path(), model.to_json().stage("output")? + "\n");
        }
        Err(e) => {
            let _ = writeln!(text, "\nNo admissible model.");
            out.failure = Some(Failure { stage: "select", error: e });
        }
    }
    // the audit trail keeps the evidence, not the fitted series
    for r in &mut selection.ranking {
        r.fit = None;
    }
    out.file("selection.csv", report::selection_csv(&selection));
    out.json("selection.json", &json!({"grid": grid, "lambda": lambda, "selection": selection}))?;
    out.file("selection.txt", text.clone());
    out.stdout = text;
    Ok(out)
}
