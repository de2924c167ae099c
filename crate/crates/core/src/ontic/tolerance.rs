use serde::{Deserialize, Serialize};

use super::SpaceKind;
use crate::error::{Error, Result};

/// Thresholds that turn the strict set definitions (`> 0`, `= 1`) into
/// discretization-robust membership tests.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Relative density threshold for preparation supports; absolute threshold
    /// for response supports.
    pub eps_support: f64,
    /// Allowed deviation from 1 for core membership.
    pub eps_core: f64,
    /// Tolerance for residual identities and Born reproduction.
    pub eps_residual: f64,
}

impl ToleranceConfig {
    pub const fn atomic() -> Self {
        Self {
            eps_support: 1e-9,
            eps_core: 1e-9,
            eps_residual: 1e-10,
        }
    }

    /// Defaults calibrated for the Fibonacci grid at its default size.
    pub const fn grid() -> Self {
        Self {
            eps_support: 1e-7,
            eps_core: 1e-6,
            eps_residual: 5e-3,
        }
    }

    pub const fn for_kind(kind: SpaceKind) -> Self {
        match kind {
            SpaceKind::Grid => Self::grid(),
            SpaceKind::Atomic => Self::atomic(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, value: f64, upper: f64| {
            if value > 0.0 && value < upper {
                Ok(())
            } else {
                Err(Error::validation(format!(
                    "{name} must lie in (0, {upper}), got {value}"
                )))
            }
        };
        check("eps_support", self.eps_support, 1.0)?;
        check("eps_core", self.eps_core, 0.5)?;
        check("eps_residual", self.eps_residual, 0.1)
    }
}
