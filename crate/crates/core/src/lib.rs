//! Seasonal ARIMA toolkit: transforms, correlograms, hypothesis tests,
//! exact-likelihood estimation, forecasting and Box-Jenkins model selection.

pub mod correlogram;
pub mod csv;
pub mod forecasting;
pub mod error;
pub mod hypothesis;
pub mod optim;
pub mod report;
pub mod sarima;
pub mod selection;
pub mod series;
pub mod transform;

pub use error::{Error, ErrorCategory, Result};
pub use hypothesis::TestReport;
pub use sarima::{CoefficientSet, FittedModel, ModelSpec};
pub use series::{TimeSeries, YearMonth};
pub use transform::TransformRecord;
