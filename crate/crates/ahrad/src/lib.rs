//! Experiment runner for `ahrad-core`: JSON run configurations, hashed run
//! directories, CSV/JSON artifacts with manifests, and the `ahrad` command.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod data;
pub mod error;
pub mod experiments;
pub mod output;
pub mod run;

pub use config::{Experiment, RunConfig};
pub use error::{Error, Result};
pub use output::{Artifact, Check, Outcome};
pub use run::{execute, RunReport};
