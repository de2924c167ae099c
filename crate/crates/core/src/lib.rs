//! Discretized ontological models of finite-dimensional quantum theory.
//!
//! The crate builds models (`models`), represents them over a finite ontic
//! space (`ontic`), and audits them (`audit`): Born-rule reproduction,
//! reciprocity and outcome-determinism, degree of epistemicity, and the
//! relation `I_ont = (1 - Omega) I_Q` between ontological and quantum
//! indeterminism for reciprocal models.

pub mod audit;
pub mod cli;
mod error;
pub mod json;
pub mod models;
pub mod ontic;
pub mod quantum;

pub use error::{Error, Result};
