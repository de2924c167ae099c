use serde::Serialize;

use super::bounds::bound_constant;
use crate::error::{Error, Result};
use crate::models::Scenario;
use crate::quantum::{
    guessing_probability, i_quantum, min_entropy_of, outcome_distribution, Outcome,
};

pub const FLOOR_LABEL: &str = "reciprocal-model indeterminism floor";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutcomeProbability {
    pub label: String,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RandomnessReport {
    pub preparation: String,
    pub dim: usize,
    pub distribution: Vec<OutcomeProbability>,
    pub guessing_probability: f64,
    pub min_entropy_bits: f64,
    /// `bound_constant(d)` times the largest indeterministic outcome probability
    /// (zero when every outcome is certain or impossible).
    pub indeterminism_floor: f64,
    pub floor_label: String,
}

/// Randomness of the scenario's designated preparation under its designated complete observable.
pub fn randomness_report(scenario: &Scenario) -> Result<RandomnessReport> {
    let preparation = scenario
        .preparation()
        .ok_or_else(|| Error::validation("scenario names no preparation"))?;
    let obs = scenario
        .observable()
        .ok_or_else(|| Error::validation("scenario names no observable"))??;
    if !obs.is_complete() {
        return Err(Error::validation(format!(
            "observable has {} eigenstates in dimension {}; a complete basis is required",
            obs.eigenstates().len(),
            obs.dim()
        )));
    }
    let psi = scenario.state(preparation)?;
    let distribution = outcome_distribution(psi, &obs)?;
    let guessing = guessing_probability(psi, &obs)?;
    let worst = obs
        .eigenstates()
        .iter()
        .map(|phi| i_quantum(psi, phi))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|q| q.indeterministic)
        .map(|q| q.value)
        .fold(0.0, f64::max);
    Ok(RandomnessReport {
        preparation: preparation.to_string(),
        dim: obs.dim(),
        distribution: distribution
            .into_iter()
            .map(|Outcome { label, probability }| OutcomeProbability { label, probability })
            .collect(),
        guessing_probability: guessing,
        min_entropy_bits: min_entropy_of(guessing),
        indeterminism_floor: bound_constant(obs.dim() as u64)? * worst,
        floor_label: FLOOR_LABEL.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::models::LabeledState;
    use crate::quantum::StateVector;

    fn basis_scenario(dim: usize, prep: StateVector) -> Scenario {
        let mut states: Vec<_> = (0..dim)
            .map(|k| LabeledState::new(format!("e{k}"), StateVector::basis(dim, k).unwrap()))
            .collect();
        states.push(LabeledState::new("psi", prep));
        Scenario::new(dim, states)
            .unwrap()
            .with_measurement("psi".into(), (0..dim).map(|k| format!("e{k}")).collect())
            .unwrap()
    }

    #[test]
    fn uniform_four_dimensional_state() {
        let psi = StateVector::new(vec![Complex64::new(0.5, 0.0); 4]).unwrap();
        let r = randomness_report(&basis_scenario(4, psi)).unwrap();
        assert_eq!(r.guessing_probability, 0.25);
        assert_eq!(r.min_entropy_bits, 2.0);
        assert!((r.indeterminism_floor - bound_constant(4).unwrap() * 0.25).abs() < 1e-16);
    }

    #[test]
    fn eigenstate_has_no_randomness() {
        let r = randomness_report(&basis_scenario(3, StateVector::basis(3, 1).unwrap())).unwrap();
        assert_eq!(r.min_entropy_bits, 0.0);
        assert_eq!(r.indeterminism_floor, 0.0);
    }

    #[test]
    fn qutrit_half_weight_floor() {
        let psi = StateVector::normalized(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ])
        .unwrap();
        let r = randomness_report(&basis_scenario(3, psi)).unwrap();
        assert!((r.indeterminism_floor - 0.05).abs() < 1e-15);
        assert!((r.min_entropy_bits - 1.0).abs() < 1e-15);
    }

    #[test]
    fn missing_or_incomplete_observable() {
        let s = Scenario::new(
            2,
            vec![LabeledState::new("a", StateVector::basis(2, 0).unwrap())],
        )
        .unwrap();
        assert!(randomness_report(&s).is_err());
        let s = s.with_measurement("a".into(), vec!["a".into()]).unwrap();
        assert!(randomness_report(&s).is_err());
    }
}
