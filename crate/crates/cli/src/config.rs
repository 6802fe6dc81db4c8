//! Run configuration: a strict JSON document, overridden field by field by
//! command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use sarima_core::hypothesis::{AdfLags, AdfRegression};
use sarima_core::selection::{Gates, Grid};
use sarima_core::transform::estimate_lambda;
use sarima_core::{Error, ModelSpec, Result, TimeSeries, YearMonth};

/// Where training ends: a count of observations or the last training month.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Split {
    Count(usize),
    Through(YearMonth),
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Ok(n) = s.parse::<usize>() {
            return Ok(Split::Count(n));
        }
        s.parse::<YearMonth>()
            .map(Split::Through)
            .map_err(|_| Error::Argument(format!("split {s:?} is neither a count nor YYYY-MM")))
    }
}

impl Split {
    /// Training part and, if any, the observations after it.
    pub fn apply(self, series: &TimeSeries) -> Result<(TimeSeries, Option<TimeSeries>)> {
        let n_train = match self {
            Split::Count(n) => n,
            Split::Through(m) => {
                let k = series.start().months_until(m) + 1;
                if k < 1 || k as usize > series.len() {
                    return Err(Error::Argument(format!(
                        "split month {m} lies outside {}..{}",
                        series.start(),
                        series.end()
                    )));
                }
                k as usize
            }
        };
        series.split_at(n_train)
    }
}

/// How the Box-Cox exponent is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawPolicy", into = "RawPolicy")]
pub enum TransformPolicy {
    /// Profile likelihood over the configured grid.
    #[default]
    Auto,
    None,
    Log,
    Lambda(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawPolicy {
    Name(String),
    Lambda(f64),
}

impl TryFrom<RawPolicy> for TransformPolicy {
    type Error = Error;

    fn try_from(r: RawPolicy) -> Result<Self> {
        match r {
            RawPolicy::Name(s) => s.parse(),
            RawPolicy::Lambda(l) => Ok(TransformPolicy::Lambda(l)),
        }
    }
}

impl From<TransformPolicy> for RawPolicy {
    fn from(p: TransformPolicy) -> Self {
        match p {
            TransformPolicy::Lambda(l) => RawPolicy::Lambda(l),
            other => RawPolicy::Name(other.to_string()),
        }
    }
}

impl FromStr for TransformPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "none" => Ok(Self::None),
            "log" => Ok(Self::Log),
            _ => s
                .parse::<f64>()
                .ok()
                .filter(|l| l.is_finite())
                .map(Self::Lambda)
                .ok_or_else(|| Error::Argument(format!("lambda {s:?} is not auto, none, log or a number"))),
        }
    }
}

impl fmt::Display for TransformPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Auto => f.write_str("auto"),
            Self::None => f.write_str("none"),
            Self::Log => f.write_str("log"),
            Self::Lambda(l) => write!(f, "{l}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub period: usize,
    pub split: Option<Split>,
    pub transform: TransformPolicy,
    /// `[lo, hi, step]` for the profile-likelihood search.
    pub lambda_grid: [f64; 3],
    pub spec: Option<ModelSpec>,
    pub grid: Option<Grid>,
    pub gates: Gates,
    pub adf_regression: AdfRegression,
    pub adf_lags: AdfLags,
    /// Ljung-Box lag count for `diagnose`; `None` means two seasons.
    pub ljung_box_h: Option<usize>,
    /// Correlogram lags; `None` picks a default from the sample size.
    pub max_lag: Option<usize>,
    pub level: f64,
    pub horizon: usize,
    pub out: PathBuf,
    /// Model document; `None` means `<out>/model.json`.
    pub model: Option<PathBuf>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            period: 12,
            split: None,
            transform: TransformPolicy::Auto,
            lambda_grid: [-2.0, 2.0, 0.01],
            spec: None,
            grid: None,
            gates: Gates::default(),
            adf_regression: AdfRegression::Drift,
            adf_lags: AdfLags::Auto,
            ljung_box_h: None,
            max_lag: None,
            level: 0.95,
            horizon: 24,
            out: PathBuf::from("out"),
            model: None,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Argument(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Argument(format!("config {}: {e}", path.display())))
    }

    pub fn model_path(&self) -> PathBuf {
        self.model.clone().unwrap_or_else(|| self.out.join("model.json"))
    }

    pub fn input(&self) -> Result<&Path> {
        self.input
            .as_deref()
            .ok_or_else(|| Error::Argument("no input file (use --input or the config's \"input\")".into()))
    }

    pub fn spec(&self) -> Result<ModelSpec> {
        self.spec
            .ok_or_else(|| Error::Argument("no model spec (use --spec p,d,q,P,D,Q,s or the config's \"spec\")".into()))
    }

    /// Correlogram lags for a series of length `n`: at least two seasons of
    /// monthly data, never more than `n - 1`.
    pub fn correlogram_lags(&self, n: usize) -> usize {
        let auto = sarima_core::correlogram::default_max_lag(n);
        let lags = self.max_lag.unwrap_or(if self.period == 12 { auto.max(24) } else { auto });
        lags.min(n.saturating_sub(1)).max(1)
    }

    pub fn lambda_for(&self, train: &TimeSeries) -> Result<Option<f64>> {
        match self.transform {
            TransformPolicy::None => Ok(None),
            TransformPolicy::Log => Ok(Some(0.0)),
            TransformPolicy::Lambda(l) => Ok(Some(l)),
            TransformPolicy::Auto => {
                let [lo, hi, step] = self.lambda_grid;
                estimate_lambda(train, lo, hi, step).map(Some)
            }
        }
    }

    /// Candidate grid, defaulting to orders up to 2 with one regular
    /// difference.
    pub fn grid(&self) -> Grid {
        self.grid.clone().unwrap_or_else(|| Grid {
            p: vec![0, 1, 2],
            q: vec![0, 1, 2],
            seasonal_p: vec![0, 1],
            seasonal_q: vec![0, 1, 2],
            d: 1,
            seasonal_d: 0,
            s: self.period,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let err = serde_json::from_str::<RunConfig>(r#"{"horizon": 12, "colour": "red"}"#).unwrap_err();
        assert!(err.to_string().contains("colour"));
    }

    #[test]
    fn roundtrips_through_json() {
        let cfg = RunConfig {
            split: Some(Split::Through(YearMonth::new(2016, 12).unwrap())),
            transform: TransformPolicy::Lambda(0.25),
            spec: Some(ModelSpec::new(2, 1, 0, 0, 0, 2, 12).unwrap()),
            ..RunConfig::default()
        };
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), cfg);
        let named: RunConfig = serde_json::from_str(r#"{"transform": "log", "split": 84}"#).unwrap();
        assert_eq!(named.transform, TransformPolicy::Log);
        assert_eq!(named.split, Some(Split::Count(84)));
    }

    #[test]
    fn split_by_month() {
        let s = TimeSeries::monthly(YearMonth::new(2010, 1).unwrap(), (0..24).map(f64::from).collect()).unwrap();
        let (train, test) = "2010-12".parse::<Split>().unwrap().apply(&s).unwrap();
        assert_eq!(train.len(), 12);
        assert_eq!(test.unwrap().start(), YearMonth::new(2011, 1).unwrap());
        assert!("2012-01".parse::<Split>().unwrap().apply(&s).is_err());
        assert!("soon".parse::<Split>().is_err());
    }

    #[test]
    fn monthly_correlograms_cover_two_seasons() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.correlogram_lags(96), 24);
        assert_eq!(cfg.correlogram_lags(10), 9);
        assert_eq!(RunConfig { period: 4, ..cfg }.correlogram_lags(96), 19);
    }
}
