//! Box-Jenkins selection loop: enumerate a grid of specs, fit them all, rank
//! by AIC and walk the ranking until a model passes the significance and
//! residual-diagnostic gates.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlogram::{acf_at, default_max_lag, pacf_at};
use crate::error::{Error, Result};
use crate::hypothesis::ljung_box;
use crate::sarima::{fit, FittedModel, ModelSpec};
use crate::series::TimeSeries;
use crate::transform::TransformRecord;

pub const MAX_CANDIDATES: usize = 400;
pub const MAX_NONSEASONAL_ORDER: usize = 5;
pub const MAX_SEASONAL_ORDER: usize = 2;

/// Order ranges for `p, q, P, Q` with fixed differencing and period.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub p: Vec<usize>,
    pub q: Vec<usize>,
    #[serde(rename = "P")]
    pub seasonal_p: Vec<usize>,
    #[serde(rename = "Q")]
    pub seasonal_q: Vec<usize>,
    pub d: usize,
    #[serde(rename = "D")]
    pub seasonal_d: usize,
    pub s: usize,
}

/// Cartesian product of the grid without the empty model, sorted.
pub fn enumerate_candidates(grid: &Grid) -> Result<Vec<ModelSpec>> {
    let ranges = [
        ("p", &grid.p, MAX_NONSEASONAL_ORDER),
        ("q", &grid.q, MAX_NONSEASONAL_ORDER),
        ("P", &grid.seasonal_p, MAX_SEASONAL_ORDER),
        ("Q", &grid.seasonal_q, MAX_SEASONAL_ORDER),
    ];
    for (name, range, cap) in ranges {
        if range.is_empty() {
            return Err(Error::argument(format!("grid range for {name} is empty")));
        }
        if let Some(v) = range.iter().find(|v| **v > cap) {
            return Err(Error::argument(format!(
                "grid order {name} = {v} exceeds the bound {cap}"
            )));
        }
    }
    let total = grid.p.len() * grid.q.len() * grid.seasonal_p.len() * grid.seasonal_q.len();
    if total > MAX_CANDIDATES {
        return Err(Error::argument(format!(
            "grid has {total} candidates, more than the limit of {MAX_CANDIDATES}"
        )));
    }
    let mut out = Vec::with_capacity(total);
    for &p in &grid.p {
        for &q in &grid.q {
            for &sp in &grid.seasonal_p {
                for &sq in &grid.seasonal_q {
                    let spec =
                        ModelSpec::new(p, grid.d, q, sp, grid.seasonal_d, sq, grid.s)?;
                    if !spec.is_empty_model() {
                        out.push(spec);
                    }
                }
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Gate thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Gates {
    /// Coefficients need `p < alpha_sig`.
    pub alpha_sig: f64,
    pub lb_h: usize,
    /// Reject when the Ljung-Box p-value is at or below this.
    pub lb_alpha: f64,
    /// Residual correlogram lags; `None` means `10 log10 n`.
    pub max_lag: Option<usize>,
    /// Allowed spikes per correlogram as a fraction of `max_lag`, rounded up.
    pub spike_fraction: f64,
    pub band_level: f64,
    /// Ljung-Box on squared residuals at `h = s` as a heteroscedasticity
    /// gate.
    pub mcleod_li: bool,
    pub mcleod_li_alpha: f64,
}

impl Default for Gates {
    fn default() -> Self {
        Self {
            alpha_sig: 0.05,
            lb_h: 24,
            lb_alpha: 0.05,
            max_lag: None,
            spike_fraction: 0.05,
            band_level: 0.95,
            mcleod_li: true,
            mcleod_li_alpha: 0.05,
        }
    }
}

impl Gates {
    pub fn allowed_spikes(&self, max_lag: usize) -> usize {
        (self.spike_fraction * max_lag as f64 - 1e-9).ceil().max(0.0) as usize
    }
}

/// Everything the gates look at, separated from the fit so a ranking can
/// be replayed (or scripted) without refitting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateEvidence {
    pub aic: f64,
    pub n_params: usize,
    pub coefficient_names: Vec<String>,
    /// `None` when standard errors were unavailable.
    pub coefficient_p_values: Option<Vec<f64>>,
    pub ljung_box_p: Option<f64>,
    pub mcleod_li_p: Option<f64>,
    pub max_lag: usize,
    pub acf_spikes: Vec<usize>,
    pub pacf_spikes: Vec<usize>,
}

impl CandidateEvidence {
    pub fn from_fit(model: &FittedModel, gates: &Gates) -> Result<Self> {
        let res = model.effective_residuals();
        let n = res.len();
        let max_lag = gates.max_lag.unwrap_or_else(|| default_max_lag(n)).min(n - 1);
        let k = model.spec.n_coeffs();
        let lb_h = gates.lb_h.min(n - 1);
        let ljung_box_p = ljung_box(res, lb_h, k).ok().map(|r| r.p_value);
        let mcleod_li_p = if gates.mcleod_li {
            let sq: Vec<f64> = res.iter().map(|e| e * e).collect();
            ljung_box(&sq, model.spec.s.max(2).min(n - 1), 0)
                .ok()
                .map(|r| r.p_value)
        } else {
            None
        };
        Ok(Self {
            aic: model.aic,
            n_params: model.n_params(),
            coefficient_names: model.spec.coefficient_names(),
            coefficient_p_values: model.p_values.clone(),
            ljung_box_p,
            mcleod_li_p,
            max_lag,
            acf_spikes: acf_at(res, max_lag, gates.band_level)?.spikes(),
            pacf_spikes: pacf_at(res, max_lag, gates.band_level)?.spikes(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Selected,
    RejectedAicRank,
    RejectedInsignificant,
    RejectedDiagnostics,
    Failed,
    /// Not yet gated.
    Pending,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Selected => "selected",
            Verdict::RejectedAicRank => "rejected_aic_rank",
            Verdict::RejectedInsignificant => "rejected_insignificant",
            Verdict::RejectedDiagnostics => "rejected_diagnostics",
            Verdict::Failed => "failed",
            Verdict::Pending => "pending",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateResult {
    pub spec: ModelSpec,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fit: Option<FittedModel>,
    pub evidence: Option<CandidateEvidence>,
    /// Set when fitting or diagnostics failed.
    pub failure: Option<String>,
    pub verdict: Verdict,
    /// Machine-readable `kind:detail` strings.
    pub reasons: Vec<String>,
}

impl CandidateResult {
    pub fn from_evidence(spec: ModelSpec, evidence: CandidateEvidence) -> Self {
        Self {
            spec,
            fit: None,
            evidence: Some(evidence),
            failure: None,
            verdict: Verdict::Pending,
            reasons: vec![],
        }
    }

    pub fn failed(spec: ModelSpec, message: impl Into<String>) -> Self {
        let message = message.into();
        Self {
            spec,
            fit: None,
            evidence: None,
            reasons: vec![format!("fit_failed:{message}")],
            failure: Some(message),
            verdict: Verdict::Failed,
        }
    }

    pub fn aic(&self) -> Option<f64> {
        self.evidence.as_ref().map(|e| e.aic).filter(|a| a.is_finite())
    }
}

/// Ascending AIC; ties go to fewer parameters, then spec order. Failures
/// sort last in spec order.
pub fn rank_by_aic(mut results: Vec<CandidateResult>) -> Result<Vec<CandidateResult>> {
    if results.iter().all(|r| r.aic().is_none()) {
        return Err(Error::NoAdmissibleModel(no_survivor_summary(&results)));
    }
    results.sort_by(|a, b| match (a.aic(), b.aic()) {
        (Some(x), Some(y)) => x
            .total_cmp(&y)
            .then_with(|| a.spec.n_coeffs().cmp(&b.spec.n_coeffs()))
            .then_with(|| a.spec.cmp(&b.spec)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.spec.cmp(&b.spec),
    });
    for r in &mut results {
        if r.aic().is_none() && r.verdict != Verdict::Failed {
            r.verdict = Verdict::Failed;
            r.reasons.push("fit_failed:no finite AIC".into());
        }
    }
    Ok(results)
}

/// Reasons a candidate fails the gates, split into significance and
/// diagnostic failures.
fn gate_reasons(e: &CandidateEvidence, gates: &Gates) -> (Vec<String>, Vec<String>) {
    let mut sig = vec![];
    match &e.coefficient_p_values {
        None => sig.push("insignificant:standard_errors_unavailable".to_string()),
        Some(ps) => {
            for (name, p) in e.coefficient_names.iter().zip(ps) {
                if !(*p < gates.alpha_sig) {
                    sig.push(format!("insignificant:{name}:p={p:.4}"));
                }
            }
        }
    }
    let mut diag = vec![];
    if let Some(p) = e.ljung_box_p {
        if p <= gates.lb_alpha {
            diag.push(format!("ljung_box:p={p:.4}"));
        }
    }
    let allowed = gates.allowed_spikes(e.max_lag);
    for (name, spikes) in [("acf", &e.acf_spikes), ("pacf", &e.pacf_spikes)] {
        if spikes.len() > allowed {
            diag.push(format!(
                "residual_{name}_spikes:{} at lags {spikes:?}, allowed {allowed}",
                spikes.len()
            ));
        }
    }
    if gates.mcleod_li {
        if let Some(p) = e.mcleod_li_p {
            if p <= gates.mcleod_li_alpha {
                diag.push(format!("mcleod_li:p={p:.4}"));
            }
        }
    }
    (sig, diag)
}

/// Outcome of gating a ranked list: every candidate carries a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub gates: Gates,
    pub ranking: Vec<CandidateResult>,
    /// Index into `ranking`.
    pub selected: Option<usize>,
}

impl Selection {
    pub fn selected(&self) -> Result<&CandidateResult> {
        match self.selected {
            Some(i) => Ok(&self.ranking[i]),
            None => Err(Error::NoAdmissibleModel(no_survivor_summary(&self.ranking))),
        }
    }
}

fn no_survivor_summary(results: &[CandidateResult]) -> String {
    if results.is_empty() {
        return "no candidates".into();
    }
    results
        .iter()
        .map(|r| format!("{} [{}]", r.spec, r.reasons.join("; ")))
        .collect::<Vec<_>>()
        .join(" | ")
}

/// Walk `ranked` in order; the first candidate passing every gate is
/// selected, later ones are marked as outranked.
pub fn apply_gates(mut ranked: Vec<CandidateResult>, gates: &Gates) -> Selection {
    let mut selected: Option<usize> = None;
    for i in 0..ranked.len() {
        let r = &mut ranked[i];
        if r.verdict == Verdict::Failed {
            continue;
        }
        let Some(e) = r.evidence.as_ref() else {
            r.verdict = Verdict::Failed;
            r.reasons.push("fit_failed:no evidence".into());
            continue;
        };
        if selected.is_some() {
            continue;
        }
        let (sig, diag) = gate_reasons(e, gates);
        r.verdict = if !sig.is_empty() {
            Verdict::RejectedInsignificant
        } else if !diag.is_empty() {
            Verdict::RejectedDiagnostics
        } else {
            selected = Some(i);
            Verdict::Selected
        };
        r.reasons.extend(sig);
        r.reasons.extend(diag);
    }
    if let Some(s) = selected {
        let winner = ranked[s].spec;
        for r in ranked.iter_mut().skip(s + 1) {
            if r.verdict == Verdict::Pending {
                r.verdict = Verdict::RejectedAicRank;
                r.reasons.push(format!("aic_rank:outranked by {winner}"));
            }
        }
    }
    Selection {
        gates: gates.clone(),
        ranking: ranked,
        selected,
    }
}

/// Fit every candidate (in parallel), rank and gate.
pub fn run_selection(
    series: &TimeSeries,
    grid: &Grid,
    transform: &TransformRecord,
    gates: &Gates,
) -> Result<Selection> {
    let specs = enumerate_candidates(grid)?;
    let results: Vec<CandidateResult> = specs
        .par_iter()
        .map(|spec| {
            match fit(series, spec, transform)
                .and_then(|m| CandidateEvidence::from_fit(&m, gates).map(|e| (m, e)))
            {
                Ok((m, e)) => CandidateResult {
                    fit: Some(m),
                    ..CandidateResult::from_evidence(*spec, e)
                },
                Err(err) => CandidateResult::failed(*spec, err.to_string()),
            }
        })
        .collect();
    let ranked = rank_by_aic(results)?;
    Ok(apply_gates(ranked, gates))
}
