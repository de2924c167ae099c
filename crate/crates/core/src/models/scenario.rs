use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{ProjectiveObservable, StateVector};

pub const DEFAULT_GRID_SIZE: usize = 20_000;

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledState {
    pub label: String,
    pub state: StateVector,
}

impl LabeledState {
    pub fn new(label: impl Into<String>, state: StateVector) -> Self {
        Self {
            label: label.into(),
            state,
        }
    }
}

/// A finite collection of states, each used both as a preparation and as a filter.
#[derive(Clone, Debug)]
pub struct Scenario {
    dim: usize,
    states: Vec<LabeledState>,
    grid_size: usize,
    preparation: Option<String>,
    observable: Option<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    dim: usize,
    #[serde(default = "default_grid_size")]
    grid_size: usize,
    states: Vec<StateEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    preparation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    observable: Option<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateEntry {
    label: String,
    amplitudes: Vec<[f64; 2]>,
}

fn default_grid_size() -> usize {
    DEFAULT_GRID_SIZE
}

impl Scenario {
    pub fn new(dim: usize, states: Vec<LabeledState>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::validation("scenario needs at least one state"));
        }
        for (i, s) in states.iter().enumerate() {
            if s.state.dim() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    found: s.state.dim(),
                });
            }
            if states[..i].iter().any(|t| t.label == s.label) {
                return Err(Error::validation(format!(
                    "duplicate state label `{}`",
                    s.label
                )));
            }
        }
        Ok(Self {
            dim,
            states,
            grid_size: DEFAULT_GRID_SIZE,
            preparation: None,
            observable: None,
        })
    }

    pub fn with_grid_size(mut self, grid_size: usize) -> Result<Self> {
        if grid_size == 0 {
            return Err(Error::validation("grid size must be positive"));
        }
        self.grid_size = grid_size;
        Ok(self)
    }

    /// Designates a preparation and a measurement basis by state labels.
    pub fn with_measurement(
        mut self,
        preparation: String,
        observable: Vec<String>,
    ) -> Result<Self> {
        for label in std::iter::once(&preparation).chain(&observable) {
            self.state(label)?;
        }
        self.preparation = Some(preparation);
        self.observable = Some(observable);
        Ok(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        let states = file
            .states
            .into_iter()
            .map(|e| {
                Ok(LabeledState::new(
                    e.label,
                    StateVector::from_pairs(&e.amplitudes)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut scenario = Self::new(file.dim, states)?.with_grid_size(file.grid_size)?;
        for label in file
            .preparation
            .iter()
            .chain(file.observable.iter().flatten())
        {
            scenario.state(label)?;
        }
        scenario.preparation = file.preparation;
        scenario.observable = file.observable;
        Ok(scenario)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ScenarioFile {
            dim: self.dim,
            grid_size: self.grid_size,
            states: self
                .states
                .iter()
                .map(|s| StateEntry {
                    label: s.label.clone(),
                    amplitudes: s.state.to_pairs(),
                })
                .collect(),
            preparation: self.preparation.clone(),
            observable: self.observable.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn states(&self) -> &[LabeledState] {
        &self.states
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.states.iter().map(|s| s.label.as_str())
    }

    pub fn state(&self, label: &str) -> Result<&StateVector> {
        self.states
            .iter()
            .find(|s| s.label == label)
            .map(|s| &s.state)
            .ok_or_else(|| Error::Lookup(label.to_string()))
    }

    pub fn state_map(&self) -> BTreeMap<String, StateVector> {
        self.states
            .iter()
            .map(|s| (s.label.clone(), s.state.clone()))
            .collect()
    }

    pub fn preparation(&self) -> Option<&str> {
        self.preparation.as_deref()
    }

    /// The designated measurement, if the scenario names one.
    pub fn observable(&self) -> Option<Result<ProjectiveObservable>> {
        let labels = self.observable.as_ref()?;
        let eigenstates = labels
            .iter()
            .map(|l| self.state(l).cloned())
            .collect::<Result<Vec<_>>>();
        Some(eigenstates.and_then(|e| ProjectiveObservable::new(e, labels.clone())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const QUBIT: &str = r#"{
        "dim": 2, "grid_size": 500,
        "states": [
            {"label": "zero", "amplitudes": [[1, 0], [0, 0]]},
            {"label": "one", "amplitudes": [[0, 0], [1, 0]]}
        ],
        "preparation": "zero",
        "observable": ["zero", "one"]
    }"#;

    #[test]
    fn parses_scenario_file() {
        let s = Scenario::from_json(QUBIT).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.grid_size(), 500);
        assert_eq!(s.labels().collect::<Vec<_>>(), ["zero", "one"]);
        assert_eq!(s.preparation(), Some("zero"));
        assert!(s.observable().unwrap().unwrap().is_complete());
        let again = Scenario::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(again.states(), s.states());
    }

    #[test]
    fn default_grid_size_and_errors() {
        let s = Scenario::from_json(
            r#"{"dim": 2, "states": [{"label": "a", "amplitudes": [[1,0],[0,0]]}]}"#,
        )
        .unwrap();
        assert_eq!(s.grid_size(), DEFAULT_GRID_SIZE);
        assert!(s.observable().is_none());
        assert!(Scenario::from_json(r#"{"dim": 2, "states": []}"#).is_err());
        assert!(Scenario::from_json(&QUBIT.replace("\"one\"", "\"zero\"")).is_err());
        assert!(
            Scenario::from_json(&QUBIT.replace("[[1, 0], [0, 0]]", "[[1, 0], [1, 0]]")).is_err()
        );
        assert!(Scenario::from_json(&QUBIT.replace("\"dim\": 2", "\"dim\": 3")).is_err());
    }
}
