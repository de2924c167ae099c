use std::collections::BTreeMap;

use super::Scenario;
use crate::error::{Error, Result};
use crate::ontic::{OnticSpace, OntologicalModel, ToleranceConfig};
use crate::quantum::born_probability;

/// Overlap above which two scenario states count as the same ray.
const SAME_RAY_TOLERANCE: f64 = 1e-9;

/// Kochen–Specker model of a qubit on a Fibonacci grid.
///
/// `mu(lambda|psi)` is proportional to `max(psi_hat . lambda, 0)` (the continuum
/// density is `1/pi` times that) and is normalized on the grid itself, so each
/// preparation carries exactly unit mass. The filter is the indicator of the
/// open hemisphere `phi_hat . lambda > 0`.
pub fn build_ks_qubit(scenario: &Scenario) -> Result<OntologicalModel> {
    if scenario.dim() != 2 {
        return Err(Error::UnsupportedDimension(scenario.dim()));
    }
    let space = OnticSpace::fibonacci_sphere(scenario.grid_size())?;
    let tolerances = ToleranceConfig::grid();
    // Density and indicator share one hemisphere edge so grid points grazing
    // the equator cannot land in Core without landing in Lambda.
    let edge = tolerances.eps_support;
    let mut preparations = BTreeMap::new();
    let mut responses = BTreeMap::new();
    for s in scenario.states() {
        let bloch = s.state.bloch_vector()?;
        let cosines: Vec<f64> = space
            .points()
            .iter()
            .map(|p| {
                let v = p.as_vector().expect("grid points are vectors");
                v[0] * bloch[0] + v[1] * bloch[1] + v[2] * bloch[2]
            })
            .collect();
        let mut density: Vec<f64> = cosines
            .iter()
            .map(|&c| if c > edge { c } else { 0.0 })
            .collect();
        let mass: f64 = density
            .iter()
            .zip(space.weights())
            .map(|(d, w)| d * w)
            .sum();
        density.iter_mut().for_each(|d| *d /= mass);
        let indicator = cosines
            .iter()
            .map(|&c| if c > edge { 1.0 } else { 0.0 })
            .collect();
        preparations.insert(s.label.clone(), density);
        responses.insert(s.label.clone(), indicator);
    }
    OntologicalModel::from_tables(
        "ks-qubit",
        space,
        scenario.state_map(),
        preparations,
        responses,
        tolerances,
    )
}

/// Beltrametti–Bugajski model: one atom per scenario state, the preparation is
/// a point mass on its own atom and the filter responds with the Born
/// probability of the atom.
pub fn build_bb_ontic(scenario: &Scenario) -> Result<OntologicalModel> {
    let states = scenario.states();
    for (j, a) in states.iter().enumerate() {
        for b in &states[..j] {
            if born_probability(&a.state, &b.state)? >= 1.0 - SAME_RAY_TOLERANCE {
                return Err(Error::validation(format!(
                    "`{}` and `{}` are the same ray",
                    b.label, a.label
                )));
            }
        }
    }
    let space = OnticSpace::atomic(scenario.labels())?;
    let mut preparations = BTreeMap::new();
    let mut responses = BTreeMap::new();
    for (k, phi) in states.iter().enumerate() {
        let mut mass = vec![0.0; states.len()];
        mass[k] = 1.0;
        preparations.insert(phi.label.clone(), mass);
        let values = states
            .iter()
            .enumerate()
            .map(|(j, atom)| {
                if j == k {
                    Ok(1.0)
                } else {
                    born_probability(&atom.state, &phi.state).map(|p| p.min(1.0))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        responses.insert(phi.label.clone(), values);
    }
    OntologicalModel::from_tables(
        "bb-ontic",
        space,
        scenario.state_map(),
        preparations,
        responses,
        ToleranceConfig::atomic(),
    )
}
