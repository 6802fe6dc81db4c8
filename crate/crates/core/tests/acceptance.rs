//! Acceptance checks, one line per criterion. Runs under `cargo test` with
//! its own harness; the process fails if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use common::*;
use sarima_core::correlogram::pacf;
use sarima_core::forecasting::HoldoutLedger;
use sarima_core::hypothesis::special::chi_sq_sf;
use sarima_core::hypothesis::{adf_test, shapiro_wilk, AdfLags, AdfRegression};
use sarima_core::report;
use sarima_core::sarima::{exact_loglik, fit, simulate};
use sarima_core::selection::{apply_gates, rank_by_aic, CandidateEvidence, CandidateResult, Gates, Verdict};
use sarima_core::transform::{box_cox, difference, integrate, inv_box_cox};
use sarima_core::{CoefficientSet, ModelSpec, TimeSeries, TransformRecord, YearMonth};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn holdout_ledger() -> HoldoutLedger {
    let actual: Vec<f64> = HOLDOUT_2017.iter().map(|r| r.0).collect();
    let forecast: Vec<f64> = HOLDOUT_2017.iter().map(|r| r.1).collect();
    HoldoutLedger::from_pairs(YearMonth::new(2017, 1).unwrap(), &actual, &forecast).unwrap()
}

fn shapiro_wilk_replication() -> Outcome {
    let errors: Vec<f64> = HOLDOUT_2017.iter().map(|r| r.2).collect();
    let report = shapiro_wilk(&errors).unwrap();
    let reps = 2000;
    let t0 = Instant::now();
    for _ in 0..reps {
        std::hint::black_box(shapiro_wilk(std::hint::black_box(&errors)).unwrap());
    }
    let per_call = t0.elapsed() / reps;
    let pass = (report.statistic - 0.8723).abs() <= 0.0005
        && (report.p_value - 0.0699).abs() <= 0.005
        && per_call < Duration::from_millis(1);
    outcome(
        pass,
        format!(
            "W = {:.5}, p = {:.5} (target 0.8723 / 0.0699), {:?} per call",
            report.statistic, report.p_value, per_call
        ),
    )
}

fn holdout_arithmetic() -> Outcome {
    let ledger = holdout_ledger();
    let mismatches: Vec<String> = ledger
        .rows
        .iter()
        .zip(HOLDOUT_2017)
        .filter(|(row, stated)| format!("{:.3}", row.error) != format!("{:.3}", stated.2))
        .map(|(row, stated)| format!("{}: {:.3} vs {:.3}", row.month, row.error, stated.2))
        .collect();
    let identity = ledger.rows.iter().all(|r| r.error == r.actual - r.forecast);
    // The stated 4.1% does not match the ledger rows, which sum to 4.496%.
    let pass = mismatches.is_empty() && identity && (ledger.mape - HOLDOUT_2017_MAPE).abs() <= 0.01;
    outcome(
        pass,
        format!(
            "12/12 errors to 3 dp: {}, MAPE = {:.4}% vs hand sum {HOLDOUT_2017_MAPE}% (stated 4.1% is inconsistent with the rows)",
            mismatches.is_empty(),
            ledger.mape
        ),
    )
}

fn ljung_box_consistency() -> Outcome {
    let p = chi_sq_sf(22.443, 20.0);
    outcome(
        (0.312..=0.322).contains(&p),
        format!("P(chi2_20 > 22.443) = {p:.5}, reference 0.317 (h = 24, fitdf = 4)"),
    )
}

fn likelihood_oracle() -> Outcome {
    let spec = ModelSpec::arima(1, 0, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let phi = rng.random_range(-0.95..0.95);
        let theta = rng.random_range(-0.95..0.95);
        let sigma2 = rng.random_range(0.2..3.0);
        let n = rng.random_range(2..=10);
        let y: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal) * 1.5).collect();
        let c = CoefficientSet::from_vec(&spec, &[phi, theta], sigma2).unwrap();
        let kalman = exact_loglik(&spec, &c, &y).unwrap();
        worst = worst.max((kalman - arma11_dense_loglik(phi, theta, sigma2, &y)).abs());
    }
    outcome(worst < 1e-8, format!("max |Kalman - dense| over 20 draws = {worst:.2e}"))
}

fn parameter_recovery() -> Outcome {
    let spec = ModelSpec::new(2, 1, 0, 0, 0, 2, 12).unwrap();
    // log-scale innovation sd implied by the width of the reference intervals
    let sigma2 = 0.0416f64.powi(2);
    let truth = CoefficientSet::from_vec(&spec, &REFERENCE_COEFFS, sigma2).unwrap();
    let seeds = 50;
    let t0 = Instant::now();
    let mut covered = [0usize; 4];
    let mut failures = 0;
    for seed in 0..seeds {
        let sim = simulate(&spec, &truth, 500, seed, None).unwrap();
        let shifted: Vec<f64> = sim.values().iter().map(|v| v + 2000f64.ln()).collect();
        let y = TimeSeries::monthly(YearMonth::new(1980, 1).unwrap(), shifted).unwrap();
        match fit(&y, &spec, &TransformRecord::identity()) {
            Ok(m) => {
                let est = m.coeffs.to_vec();
                if let Some(se) = &m.std_errors {
                    for i in 0..4 {
                        if (est[i] - REFERENCE_COEFFS[i]).abs() <= 3.0 * se[i] {
                            covered[i] += 1;
                        }
                    }
                }
            }
            Err(_) => failures += 1,
        }
    }
    let elapsed = t0.elapsed();
    let rates: Vec<f64> = covered.iter().map(|c| *c as f64 / seeds as f64).collect();
    let pass = rates.iter().all(|r| *r >= 0.9) && elapsed < Duration::from_secs(300);
    outcome(
        pass,
        format!(
            "within 3 SE (ar1, ar2, sma1, sma2) = {rates:?} over {seeds} seeds, {failures} failed fits, {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn adf_size_and_power() -> Outcome {
    let t0 = Instant::now();
    let rw = ModelSpec::arima(0, 1, 0);
    let ar = ModelSpec::arima(1, 0, 0);
    let ar_coeffs = CoefficientSet::from_vec(&ar, &[0.5], 1.0).unwrap();
    let mut null_ok = 0;
    let mut alt_ok = 0;
    for seed in 0..100 {
        let y = simulate(&rw, &CoefficientSet::zeros(&rw), 500, seed, None).unwrap();
        if adf_test(y.values(), AdfRegression::Drift, AdfLags::Auto).unwrap().p_value > 0.10 {
            null_ok += 1;
        }
        let y = simulate(&ar, &ar_coeffs, 200, 1000 + seed, None).unwrap();
        if adf_test(y.values(), AdfRegression::Drift, AdfLags::Auto).unwrap().p_value < 0.05 {
            alt_ok += 1;
        }
    }
    let elapsed = t0.elapsed();
    outcome(
        null_ok >= 90 && alt_ok >= 90 && elapsed < Duration::from_secs(60),
        format!(
            "random walk p > 0.10 in {null_ok}/100, AR(0.5) p < 0.05 in {alt_ok}/100, {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn pacf_oracle() -> Outcome {
    let spec = ModelSpec::arima(2, 0, 1);
    let c = CoefficientSet::from_vec(&spec, &[0.5, -0.3, 0.4], 1.0).unwrap();
    let x = simulate(&spec, &c, 200, 7, None).unwrap();
    let dl = pacf(x.values(), 20).unwrap();
    let worst = (1..=20)
        .map(|k| (dl.values[k - 1] - ols_pacf(x.values(), k)).abs())
        .fold(0.0f64, f64::max);
    outcome(worst < 1e-6, format!("max |Durbin-Levinson - OLS| over lags 1..20 = {worst:.2e}"))
}

fn roundtrips() -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    });
    // Log-uniform over 0.1..500. Beyond |lambda ln y| of about 13 the
    // transformed value sits within 1e-6 of -1/lambda and an f64 can no
    // longer carry y to 1e-10, whatever the inversion formula.
    let strategy = (
        proptest::collection::vec((0.1f64.ln()..500f64.ln()).prop_map(f64::exp), 30..120),
        -2.0f64..2.0,
        1usize..=12,
        1usize..=2,
    );
    let result = runner.run(&strategy, |(values, lambda, lag, order)| {
        let y = TimeSeries::monthly(YearMonth::new(2000, 1).unwrap(), values.clone()).unwrap();
        let back = inv_box_cox(&box_cox(&y, lambda).unwrap(), lambda).unwrap();
        for (a, b) in values.iter().zip(back.values()) {
            prop_assert!((a - b).abs() <= 1e-10 * a.abs(), "box-cox {a} -> {b} at lambda {lambda}");
        }
        let (diffed, record) = difference(&y, lag, order).unwrap();
        let restored = integrate(&diffed, &record).unwrap();
        prop_assert_eq!(restored.start(), y.start());
        for (a, b) in values.iter().zip(restored.values()) {
            prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "difference {a} -> {b}");
        }
        Ok(())
    });
    match result {
        Ok(()) => outcome(true, "1000 random positive series in [0.1, 500], lambda in [-2, 2]: Box-Cox and differencing invert to 1e-10 relative"),
        Err(e) => outcome(false, format!("counterexample: {e}")),
    }
}

/// Injected evidence reproducing the reference cascade: the AIC leader shows
/// heteroscedastic residuals, the runner-up has a non-significant term.
fn cascade_evidence() -> Vec<CandidateResult> {
    let base = |aic: f64, names: &[&str], p: &[f64]| CandidateEvidence {
        aic,
        n_params: names.len() + 1,
        coefficient_names: names.iter().map(|s| s.to_string()).collect(),
        coefficient_p_values: Some(p.to_vec()),
        ljung_box_p: Some(0.40),
        mcleod_li_p: Some(0.60),
        max_lag: 19,
        acf_spikes: vec![],
        pacf_spikes: vec![],
    };
    let mut leader = base(-327.35, &["ar1", "ar2", "sar1"], &[0.001, 0.001, 0.001]);
    leader.mcleod_li_p = Some(0.004);
    leader.acf_spikes = vec![12, 17];
    let runner_up = base(-323.07, &["ar1", "ma1", "sar1"], &[0.001, 0.31, 0.002]);
    let chosen = base(-315.01, &["ar1", "ar2", "sma1", "sma2"], &[0.001, 0.001, 0.001, 0.003]);
    let last = base(-314.86, &["ar1", "ma1", "sma1", "sma2"], &[0.001, 0.001, 0.001, 0.001]);
    [
        ("1,1,1,1,0,0,12", runner_up),
        ("2,1,0,1,0,0,12", leader),
        ("1,1,1,0,0,2,12", last),
        ("2,1,0,0,0,2,12", chosen),
    ]
    .into_iter()
    .map(|(s, e)| CandidateResult::from_evidence(s.parse().unwrap(), e))
    .collect()
}

fn selection_cascade() -> Outcome {
    let ranked = rank_by_aic(cascade_evidence()).unwrap();
    let sel = apply_gates(ranked, &Gates::default());
    let target: ModelSpec = "2,1,0,0,0,2,12".parse().unwrap();
    let order: Vec<String> = sel.ranking.iter().map(|r| r.spec.to_string()).collect();
    let first = &sel.ranking[0];
    let second = &sel.ranking[1];
    let pass = sel.selected().map(|s| s.spec).ok() == Some(target)
        && first.verdict == Verdict::RejectedDiagnostics
        && first.reasons.iter().any(|r| r.starts_with("mcleod_li"))
        && second.verdict == Verdict::RejectedInsignificant
        && second.reasons.iter().any(|r| r.starts_with("insignificant:ma1"))
        && sel.ranking[3].verdict == Verdict::RejectedAicRank;
    outcome(
        pass,
        format!(
            "order {order:?}; {} -> {:?}; {} -> {:?}",
            first.spec, first.reasons, second.spec, second.reasons
        ),
    )
}

/// The reference coefficient, holdout and forecast tables depend on the
/// withheld training series. Only their layouts are replicated.
fn declared_non_reproducible() -> Outcome {
    let names: Vec<String> = ["AR(1)", "AR(2)", "SMA(1)", "SMA(2)"].map(String::from).to_vec();
    let se = [0.0980, 0.0937, 0.1207, 0.1147];
    let z: Vec<f64> = REFERENCE_COEFFS.iter().zip(se).map(|(b, s)| b / s).collect();
    let p = [1e-12, 1e-6, 1e-15, 3e-4];
    let coeff_text = report::CoefficientRows {
        names: &names,
        estimates: &REFERENCE_COEFFS,
        std_errors: Some(&se),
        z_values: Some(&z),
        p_values: Some(&p),
    }
    .to_text();
    let cells = |text: &str, line: usize| -> Vec<String> {
        text.lines().nth(line).unwrap().split_whitespace().map(String::from).collect()
    };
    let coeff_ok = cells(&coeff_text, 1) == ["Estimate", "0.6877", "-0.4831", "0.9972", "0.4131"]
        && cells(&coeff_text, 4) == ["p-value", "<0.01", "<0.01", "<0.01", "<0.01"]
        // only magnitudes of the reference z-values are consistent with the estimates
        && (z[0].abs() - 7.0185).abs() < 0.01;

    let holdout_text = report::holdout_table(&holdout_ledger());
    let holdout_ok = cells(&holdout_text, 1) == ["Jan", "2017", "2168.700", "2145.530", "23.170"]
        && cells(&holdout_text, 9) == ["Sep", "2017", "2186.091", "2475.588", "-289.497"];

    let fs = sarima_core::forecasting::ForecastSet {
        origin: YearMonth::new(2018, 1).unwrap(),
        horizon: 1,
        level: 0.95,
        points: vec![2380.304],
        lower: vec![2193.853],
        upper: vec![2582.602],
        half_widths: vec![0.0],
        psi: vec![1.0],
    };
    let fc_text = report::forecast_table(&fs);
    let forecast_ok = cells(&fc_text, 1) == ["Jan", "2018", "2380.304", "2193.853", "2582.602"]
        && fc_text.lines().next().unwrap().contains("95% Bound");

    outcome(
        coeff_ok && holdout_ok && forecast_ok,
        "unit-root, AIC, coefficient and forecast tables need the withheld training series; layouts replicated, numbers covered by criteria 4-7",
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1 Shapiro-Wilk on holdout errors", shapiro_wilk_replication),
        ("2 holdout ledger arithmetic and MAPE", holdout_arithmetic),
        ("3 Ljung-Box chi-square tail", ljung_box_consistency),
        ("4 exact likelihood vs dense oracle", likelihood_oracle),
        ("5 parameter recovery, 50 seeds", parameter_recovery),
        ("6 ADF size and power", adf_size_and_power),
        ("7 PACF vs OLS oracle", pacf_oracle),
        ("8 transform roundtrips", roundtrips),
        ("9 selection cascade replay", selection_cascade),
        ("10 non-reproducible tables declared", declared_non_reproducible),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let o = check();
        println!("[{}] criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
