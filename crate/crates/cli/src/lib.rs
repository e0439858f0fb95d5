//! Scenario runner for `packet-entropy`.
//!
//! A JSON [`Scenario`] names a model, a squeeze grid and a time grid. It is
//! resolved into a [`Plan`], which [`run_scan`], [`run_tstar`] and
//! [`run_validate`] consume. Output does not depend on the worker count.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod presets;
pub mod scan;
pub mod scenario;
pub mod validate;

pub use error::{CliError, Result};
pub use scan::{run_scan, run_tstar, write_tstar_csv, RunOptions, ScanRow, ScanTable, TStarRow};
pub use scenario::{Plan, Scenario};
pub use validate::{run_validate, Report};
