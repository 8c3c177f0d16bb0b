#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fractions;
pub mod norms;
pub mod quadrature;
pub mod special;
pub mod weights;

pub use error::{Error, Result};
pub use fractions::{psi, PoleConfiguration, SimplestFraction};
pub use norms::{NormMethod, NormResult};
pub use weights::{ConvexityReport, Family, MomentCoefficients, Weight};
pub mod thompson;
pub use thompson::{BoundCheckReport, BoundedAnalyticFunction};
pub mod optimize;
pub mod report;
pub use optimize::{OptimizationResult, OptimizeOptions};
pub use report::ExperimentReport;
pub mod asymptotics;
pub use asymptotics::RateReport;
pub mod moments;
pub use moments::{AnnulusEnergy, UnimodularFamily};
pub mod experiments;
pub mod selftest;
