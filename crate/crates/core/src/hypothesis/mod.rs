//! Unit-root, portmanteau and normality tests with a shared report type.

pub mod adf;
pub mod ljung_box;
pub mod report;
pub mod shapiro_wilk;
pub mod special;

pub use adf::{adf_test, AdfLags, AdfRegression};
pub use ljung_box::ljung_box;
pub use report::{format_p_value, Decision, PBound, TestName, TestReport};
pub use shapiro_wilk::shapiro_wilk;
