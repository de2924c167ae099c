use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{OnticPoint, OnticSpace, OntologicalModel, SpaceKind, ToleranceConfig};
use crate::error::{Error, Result};
use crate::json::to_precise_string;
use crate::quantum::StateVector;

/// On-disk model layout. Preparations hold densities, responses hold the
/// filter's pass values; both are indexed like `points`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub kind: SpaceKind,
    pub dim: usize,
    pub points: Vec<OnticPoint>,
    pub weights: Vec<f64>,
    pub preparations: BTreeMap<String, Vec<f64>>,
    pub responses: BTreeMap<String, Vec<f64>>,
}

impl ModelFile {
    pub fn from_model(model: &OntologicalModel) -> Self {
        let space = model.space();
        Self {
            kind: space.kind(),
            dim: model.dim(),
            points: space.points().to_vec(),
            weights: space.weights().to_vec(),
            preparations: model
                .preparations()
                .iter()
                .map(|(l, p)| (l.clone(), p.densities().to_vec()))
                .collect(),
            responses: model
                .responses()
                .iter()
                .map(|(l, r)| (l.clone(), r.pass_values().to_vec()))
                .collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        to_precise_string(self)
    }

    /// Attaches the quantum states named by the file's labels and validates the model.
    ///
    /// `tolerances` defaults to the kind's standard configuration.
    pub fn into_model(
        self,
        name: impl Into<String>,
        states: &BTreeMap<String, StateVector>,
        tolerances: Option<ToleranceConfig>,
    ) -> Result<OntologicalModel> {
        let mut used = BTreeMap::new();
        for label in self.preparations.keys().chain(self.responses.keys()) {
            let state = states
                .get(label)
                .ok_or_else(|| Error::Lookup(label.clone()))?;
            if state.dim() != self.dim {
                return Err(Error::Dimension {
                    expected: self.dim,
                    found: state.dim(),
                });
            }
            used.insert(label.clone(), state.clone());
        }
        let space = OnticSpace::new(self.kind, self.points, self.weights)?;
        OntologicalModel::from_tables(
            name,
            space,
            used,
            self.preparations,
            self.responses,
            tolerances.unwrap_or(ToleranceConfig::for_kind(self.kind)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "kind": "atomic", "dim": 2,
        "points": ["a", "b"], "weights": [1, 1],
        "preparations": {"zero": [1, 0]},
        "responses": {"zero": [1, 0.5]}
    }"#;

    fn zero_state() -> BTreeMap<String, StateVector> {
        BTreeMap::from([("zero".to_string(), StateVector::basis(2, 0).unwrap())])
    }

    #[test]
    fn parses_and_roundtrips() {
        let file = ModelFile::from_json(SAMPLE).unwrap();
        let model = file.clone().into_model("m", &zero_state(), None).unwrap();
        let again = ModelFile::from_model(&model);
        assert_eq!(again, file);
        assert_eq!(
            ModelFile::from_json(&again.to_json().unwrap()).unwrap(),
            file
        );
    }

    #[test]
    fn grid_points_are_vectors() {
        let space = OnticSpace::fibonacci_sphere(4).unwrap();
        let text = serde_json::to_string(space.points()).unwrap();
        let back: Vec<OnticPoint> = serde_json::from_str(&text).unwrap();
        assert!(back.iter().all(|p| p.as_vector().is_some()));
    }

    #[test]
    fn errors() {
        assert!(matches!(
            ModelFile::from_json(SAMPLE)
                .unwrap()
                .into_model("m", &BTreeMap::new(), None),
            Err(Error::Lookup(_))
        ));
        let err = ModelFile::from_json("{\"kind\": \"grid\",\n \"dim\": }").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(ModelFile::from_json(&SAMPLE.replace("\"dim\"", "\"dims\"")).is_err());
    }
}
