use std::sync::Arc;

use super::{OnticSpace, SpaceKind};
use crate::error::{Error, Result};
use crate::quantum::FAIL_LABEL;

const ATOMIC_NORMALIZATION_TOLERANCE: f64 = 1e-9;
const GRID_NORMALIZATION_TOLERANCE: f64 = 1e-3;
const RESPONSE_SUM_TOLERANCE: f64 = 1e-10;

/// Tolerance on `sum_i mu_i w_i = 1` for a space of the given kind.
pub fn normalization_tolerance(kind: SpaceKind) -> f64 {
    match kind {
        SpaceKind::Atomic => ATOMIC_NORMALIZATION_TOLERANCE,
        SpaceKind::Grid => GRID_NORMALIZATION_TOLERANCE,
    }
}

/// Distribution `mu(lambda_i | psi)` over an ontic space.
///
/// Densities are per unit measure on a grid and plain masses on an atomic space.
#[derive(Clone, Debug)]
pub struct EpistemicState {
    space: Arc<OnticSpace>,
    label: String,
    densities: Vec<f64>,
}

impl EpistemicState {
    pub fn new(
        space: Arc<OnticSpace>,
        label: impl Into<String>,
        densities: Vec<f64>,
    ) -> Result<Self> {
        let label = label.into();
        if densities.len() != space.len() {
            return Err(Error::validation(format!(
                "preparation `{label}` has {} densities for {} ontic points",
                densities.len(),
                space.len()
            )));
        }
        if densities.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::validation(format!(
                "preparation `{label}` has a negative or non-finite density"
            )));
        }
        if densities.iter().all(|&d| d == 0.0) {
            return Err(Error::validation(format!(
                "preparation `{label}` has zero density everywhere"
            )));
        }
        let total: f64 = densities
            .iter()
            .zip(space.weights())
            .map(|(d, w)| d * w)
            .sum();
        if (total - 1.0).abs() > normalization_tolerance(space.kind()) {
            return Err(Error::validation(format!(
                "preparation `{label}` integrates to {total}, not 1"
            )));
        }
        Ok(Self {
            space,
            label,
            densities,
        })
    }

    pub fn space(&self) -> &Arc<OnticSpace> {
        &self.space
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn densities(&self) -> &[f64] {
        &self.densities
    }

    /// `sum_i mu_i w_i`.
    pub fn total_mass(&self) -> f64 {
        self.densities
            .iter()
            .zip(self.space.weights())
            .map(|(d, w)| d * w)
            .sum()
    }
}

/// Response function `xi(k | lambda_i)` with one row per outcome.
#[derive(Clone, Debug)]
pub struct ResponseFunction {
    space: Arc<OnticSpace>,
    outcome_labels: Vec<String>,
    values: Vec<Vec<f64>>,
}

impl ResponseFunction {
    pub fn new(
        space: Arc<OnticSpace>,
        outcome_labels: Vec<String>,
        values: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if outcome_labels.is_empty() || outcome_labels.len() != values.len() {
            return Err(Error::validation(format!(
                "{} outcome labels for {} value rows",
                outcome_labels.len(),
                values.len()
            )));
        }
        for (label, row) in outcome_labels.iter().zip(&values) {
            if row.len() != space.len() {
                return Err(Error::validation(format!(
                    "response `{label}` has {} values for {} ontic points",
                    row.len(),
                    space.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !(**v >= 0.0 && **v <= 1.0)) {
                return Err(Error::validation(format!(
                    "response `{label}` takes value {v} outside [0, 1]"
                )));
            }
        }
        for i in 0..space.len() {
            let sum: f64 = values.iter().map(|row| row[i]).sum();
            if (sum - 1.0).abs() > RESPONSE_SUM_TOLERANCE {
                return Err(Error::validation(format!(
                    "response values at point {i} sum to {sum}, not 1"
                )));
            }
        }
        Ok(Self {
            space,
            outcome_labels,
            values,
        })
    }

    /// Two-outcome filter: `pass` on `label`, the complement on `fail`.
    pub fn filter(
        space: Arc<OnticSpace>,
        label: impl Into<String>,
        pass: Vec<f64>,
    ) -> Result<Self> {
        let fail = pass.iter().map(|p| 1.0 - p).collect();
        Self::new(
            space,
            vec![label.into(), FAIL_LABEL.to_string()],
            vec![pass, fail],
        )
    }

    pub fn space(&self) -> &Arc<OnticSpace> {
        &self.space
    }

    pub fn outcome_labels(&self) -> &[String] {
        &self.outcome_labels
    }

    /// The filter's own label (first outcome).
    pub fn label(&self) -> &str {
        &self.outcome_labels[0]
    }

    /// `xi(phi | lambda_i)` for the filter outcome.
    pub fn pass_values(&self) -> &[f64] {
        &self.values[0]
    }

    pub fn values(&self, outcome: &str) -> Option<&[f64]> {
        self.outcome_labels
            .iter()
            .position(|l| l == outcome)
            .map(|k| self.values[k].as_slice())
    }

    /// Largest `|sum_k xi(k|lambda) - 1|` over the space.
    pub fn completeness_error(&self) -> f64 {
        (0..self.space.len())
            .map(|i| (self.values.iter().map(|row| row[i]).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atoms(n: usize) -> Arc<OnticSpace> {
        Arc::new(OnticSpace::atomic((0..n).map(|i| format!("a{i}"))).unwrap())
    }

    #[test]
    fn epistemic_state_validation() {
        let space = atoms(3);
        assert!(EpistemicState::new(space.clone(), "p", vec![0.5, 0.5, 0.0]).is_ok());
        assert!(EpistemicState::new(space.clone(), "p", vec![0.0; 3]).is_err());
        assert!(EpistemicState::new(space.clone(), "p", vec![0.5, 0.6, 0.0]).is_err());
        assert!(EpistemicState::new(space.clone(), "p", vec![1.5, -0.5, 0.0]).is_err());
        assert!(EpistemicState::new(space, "p", vec![1.0]).is_err());
    }

    #[test]
    fn grid_normalization_is_looser() {
        let space = Arc::new(OnticSpace::fibonacci_sphere(100).unwrap());
        let uniform = 1.0 / (4.0 * std::f64::consts::PI);
        let ok = EpistemicState::new(space.clone(), "u", vec![uniform * 1.0005; 100]).unwrap();
        assert!((ok.total_mass() - 1.0005).abs() < 1e-12);
        assert!(EpistemicState::new(space, "u", vec![uniform * 1.01; 100]).is_err());
    }

    #[test]
    fn filter_complement_sums_to_one() {
        let space = atoms(3);
        let r = ResponseFunction::filter(space.clone(), "phi", vec![1.0, 0.3, 0.0]).unwrap();
        assert_eq!(r.label(), "phi");
        assert_eq!(r.values(FAIL_LABEL).unwrap(), &[0.0, 0.7, 1.0]);
        assert!(r.completeness_error() <= 1e-10);
        assert!(ResponseFunction::filter(space.clone(), "phi", vec![1.2, 0.0, 0.0]).is_err());
        assert!(ResponseFunction::new(
            space,
            vec!["a".into(), "b".into()],
            vec![vec![0.5; 3], vec![0.4; 3]]
        )
        .is_err());
    }
}
