use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestName {
    #[serde(rename = "ADF")]
    Adf,
    LjungBox,
    ShapiroWilk,
}

impl fmt::Display for TestName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestName::Adf => "Augmented Dickey-Fuller",
            TestName::LjungBox => "Ljung-Box Q*",
            TestName::ShapiroWilk => "Shapiro-Wilk",
        })
    }
}

/// Set when a p-value was clamped to the end of a lookup table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PBound {
    LessThan,
    GreaterThan,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub alpha: f64,
    pub reject: bool,
}

/// Outcome of a formal test: statistic, p-value and every tuning choice
/// needed to re-run it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub name: TestName,
    pub statistic: f64,
    pub p_value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_bound: Option<PBound>,
    pub params: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decision: Option<Decision>,
}

impl TestReport {
    pub(crate) fn new(name: TestName, statistic: f64, p_value: f64) -> Self {
        Self {
            name,
            statistic,
            p_value: p_value.clamp(0.0, 1.0),
            p_bound: None,
            params: BTreeMap::new(),
            decision: None,
        }
    }

    pub(crate) fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    /// Whether the null is rejected at `alpha`. A clamped `p < table_min`
    /// rejects at `alpha == table_min`.
    pub fn rejects_at(&self, alpha: f64) -> bool {
        self.p_value < alpha || (self.p_bound == Some(PBound::LessThan) && self.p_value <= alpha)
    }

    pub fn with_decision(mut self, alpha: f64) -> Self {
        self.decision = Some(Decision {
            alpha,
            reject: self.rejects_at(alpha),
        });
        self
    }

    /// p-value as printed in report tables.
    pub fn p_value_display(&self) -> String {
        match self.p_bound {
            Some(PBound::GreaterThan) => format!(">{:.2}", self.p_value),
            Some(PBound::LessThan) => format!("<{:.2}", self.p_value),
            None => format_p_value(self.p_value),
        }
    }
}

/// `<0.01` below one percent, four decimals otherwise.
pub fn format_p_value(p: f64) -> String {
    if p < 0.01 {
        "<0.01".to_string()
    } else {
        format!("{p:.4}")
    }
}
