use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{EpistemicState, OnticSpace, ResponseFunction, ToleranceConfig};
use crate::error::{Error, Result};
use crate::quantum::StateVector;

/// Indices into an [`OnticSpace`].
pub type IndexSet = BTreeSet<usize>;

/// A discretized ontological model `(Lambda, mu, xi)` together with the
/// quantum states its labels stand for.
#[derive(Clone, Debug)]
pub struct OntologicalModel {
    name: String,
    dim: usize,
    space: Arc<OnticSpace>,
    states: BTreeMap<String, StateVector>,
    preparations: BTreeMap<String, EpistemicState>,
    responses: BTreeMap<String, ResponseFunction>,
    tolerances: ToleranceConfig,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertaintyReport {
    pub holds: bool,
    pub worst_deviation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InclusionReport {
    pub holds: bool,
    /// Points of `Lambda_psi` outside the core.
    pub lambda_not_in_core: Vec<usize>,
    /// Points of the core outside the support.
    pub core_not_in_support: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReciprocityReport {
    pub reciprocal: bool,
    pub extra_core_indices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeterminismReport {
    pub deterministic: bool,
    /// Support points where `0 < xi < 1`.
    pub fuzzy_indices: Vec<usize>,
}

impl OntologicalModel {
    pub fn new(
        name: impl Into<String>,
        space: Arc<OnticSpace>,
        states: BTreeMap<String, StateVector>,
        preparations: Vec<EpistemicState>,
        responses: Vec<ResponseFunction>,
        tolerances: ToleranceConfig,
    ) -> Result<Self> {
        tolerances.validate()?;
        let dim = states
            .values()
            .next()
            .map(StateVector::dim)
            .ok_or_else(|| Error::validation("model needs at least one state"))?;
        if let Some(s) = states.values().find(|s| s.dim() != dim) {
            return Err(Error::Dimension {
                expected: dim,
                found: s.dim(),
            });
        }

        let mut prep_map = BTreeMap::new();
        for prep in preparations {
            if !Arc::ptr_eq(prep.space(), &space) {
                return Err(Error::validation(format!(
                    "preparation `{}` lives on a different ontic space",
                    prep.label()
                )));
            }
            if !states.contains_key(prep.label()) {
                return Err(Error::Lookup(prep.label().to_string()));
            }
            if prep_map.insert(prep.label().to_string(), prep).is_some() {
                return Err(Error::validation("duplicate preparation label"));
            }
        }
        let mut resp_map = BTreeMap::new();
        for resp in responses {
            if !Arc::ptr_eq(resp.space(), &space) {
                return Err(Error::validation(format!(
                    "response `{}` lives on a different ontic space",
                    resp.label()
                )));
            }
            if !states.contains_key(resp.label()) {
                return Err(Error::Lookup(resp.label().to_string()));
            }
            if resp_map.insert(resp.label().to_string(), resp).is_some() {
                return Err(Error::validation("duplicate response label"));
            }
        }
        if let Some(label) = prep_map.keys().find(|l| !resp_map.contains_key(*l)) {
            return Err(Error::validation(format!(
                "preparation `{label}` has no matching filter response"
            )));
        }

        Ok(Self {
            name: name.into(),
            dim,
            space,
            states,
            preparations: prep_map,
            responses: resp_map,
            tolerances,
        })
    }

    /// Builds a model from raw density and filter-value tables.
    pub fn from_tables(
        name: impl Into<String>,
        space: OnticSpace,
        states: BTreeMap<String, StateVector>,
        preparations: BTreeMap<String, Vec<f64>>,
        responses: BTreeMap<String, Vec<f64>>,
        tolerances: ToleranceConfig,
    ) -> Result<Self> {
        let space = Arc::new(space);
        let preps = preparations
            .into_iter()
            .map(|(label, densities)| EpistemicState::new(space.clone(), label, densities))
            .collect::<Result<Vec<_>>>()?;
        let resps = responses
            .into_iter()
            .map(|(label, pass)| ResponseFunction::filter(space.clone(), label, pass))
            .collect::<Result<Vec<_>>>()?;
        Self::new(name, space, states, preps, resps, tolerances)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn space(&self) -> &OnticSpace {
        &self.space
    }

    pub fn tolerances(&self) -> &ToleranceConfig {
        &self.tolerances
    }

    /// Replaces the tolerance configuration after validating it.
    pub fn with_tolerances(mut self, tolerances: ToleranceConfig) -> Result<Self> {
        tolerances.validate()?;
        self.tolerances = tolerances;
        Ok(self)
    }

    pub fn states(&self) -> &BTreeMap<String, StateVector> {
        &self.states
    }

    pub fn preparations(&self) -> &BTreeMap<String, EpistemicState> {
        &self.preparations
    }

    pub fn responses(&self) -> &BTreeMap<String, ResponseFunction> {
        &self.responses
    }

    pub fn state(&self, label: &str) -> Result<&StateVector> {
        self.states
            .get(label)
            .ok_or_else(|| Error::Lookup(label.to_string()))
    }

    pub fn preparation(&self, label: &str) -> Result<&EpistemicState> {
        self.preparations
            .get(label)
            .ok_or_else(|| Error::Lookup(label.to_string()))
    }

    pub fn response(&self, label: &str) -> Result<&ResponseFunction> {
        self.responses
            .get(label)
            .ok_or_else(|| Error::Lookup(label.to_string()))
    }

    /// `sum_i xi(phi|lambda_i) mu(lambda_i|psi) w_i`, never clamped.
    pub fn predicted_probability(&self, psi: &str, phi: &str) -> Result<f64> {
        let mu = self.preparation(psi)?.densities();
        let xi = self.response(phi)?.pass_values();
        Ok(mu
            .iter()
            .zip(xi)
            .zip(self.space.weights())
            .map(|((m, x), w)| x * m * w)
            .sum())
    }

    /// `Lambda_psi`: points whose density exceeds `eps_support` times the peak density.
    pub fn lambda_set(&self, psi: &str) -> Result<IndexSet> {
        let mu = self.preparation(psi)?.densities();
        let peak = mu.iter().copied().fold(0.0, f64::max);
        let cut = self.tolerances.eps_support * peak;
        Ok(indices_where(mu, |m| m > cut))
    }

    /// `Supp[xi(phi|.)]`: points where the filter value exceeds `eps_support`.
    pub fn support_set(&self, phi: &str) -> Result<IndexSet> {
        let cut = self.tolerances.eps_support;
        Ok(indices_where(self.response(phi)?.pass_values(), |x| {
            x > cut
        }))
    }

    /// `Core[xi(phi|.)]`: points where the filter value is within `eps_core` of 1.
    pub fn core_set(&self, phi: &str) -> Result<IndexSet> {
        let cut = 1.0 - self.tolerances.eps_core;
        Ok(indices_where(self.response(phi)?.pass_values(), |x| {
            x >= cut
        }))
    }

    pub fn check_certainty(&self, psi: &str) -> Result<CertaintyReport> {
        let lambda = self.lambda_set(psi)?;
        let xi = self.response(psi)?.pass_values();
        let worst = lambda.iter().map(|&i| xi[i]).fold(1.0, f64::min);
        let worst_deviation = (1.0 - worst).max(0.0);
        Ok(CertaintyReport {
            holds: worst >= 1.0 - self.tolerances.eps_core,
            worst_deviation,
        })
    }

    /// Checks `Lambda_psi ⊆ Core ⊆ Supp` for the filter of the same state.
    pub fn check_inclusions(&self, psi: &str) -> Result<InclusionReport> {
        let lambda = self.lambda_set(psi)?;
        let core = self.core_set(psi)?;
        let support = self.support_set(psi)?;
        let lambda_not_in_core: Vec<_> = lambda.difference(&core).copied().collect();
        let core_not_in_support: Vec<_> = core.difference(&support).copied().collect();
        Ok(InclusionReport {
            holds: lambda_not_in_core.is_empty() && core_not_in_support.is_empty(),
            lambda_not_in_core,
            core_not_in_support,
        })
    }

    pub fn check_reciprocity(&self, psi: &str) -> Result<ReciprocityReport> {
        let lambda = self.lambda_set(psi)?;
        let core = self.core_set(psi)?;
        Ok(ReciprocityReport {
            reciprocal: lambda == core,
            extra_core_indices: core.difference(&lambda).copied().collect(),
        })
    }

    pub fn check_determinism(&self, phi: &str) -> Result<DeterminismReport> {
        let support = self.support_set(phi)?;
        let core = self.core_set(phi)?;
        let fuzzy_indices: Vec<_> = support.difference(&core).copied().collect();
        Ok(DeterminismReport {
            deterministic: fuzzy_indices.is_empty(),
            fuzzy_indices,
        })
    }

    /// `sum_{i in set} mu(lambda_i|psi) w_i`.
    pub fn mass_on(&self, psi: &str, set: &IndexSet) -> Result<f64> {
        let mu = self.preparation(psi)?.densities();
        let w = self.space.weights();
        Ok(set.iter().map(|&i| mu[i] * w[i]).sum())
    }
}

fn indices_where(values: &[f64], keep: impl Fn(f64) -> bool) -> IndexSet {
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| keep(**v))
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontic::SpaceKind;

    fn two_states() -> BTreeMap<String, StateVector> {
        BTreeMap::from([
            ("psi".to_string(), StateVector::qubit(0.0, 0.0)),
            (
                "phi".to_string(),
                StateVector::qubit(std::f64::consts::FRAC_PI_2, 0.0),
            ),
        ])
    }

    fn model(preps: &[(&str, [f64; 3])], resps: &[(&str, [f64; 3])]) -> Result<OntologicalModel> {
        OntologicalModel::from_tables(
            "hand",
            OnticSpace::atomic(["a", "b", "c"]).unwrap(),
            two_states(),
            preps
                .iter()
                .map(|(l, v)| (l.to_string(), v.to_vec()))
                .collect(),
            resps
                .iter()
                .map(|(l, v)| (l.to_string(), v.to_vec()))
                .collect(),
            ToleranceConfig::for_kind(SpaceKind::Atomic),
        )
    }

    #[test]
    fn lookup_errors() {
        let m = model(&[("psi", [1.0, 0.0, 0.0])], &[("psi", [1.0, 0.0, 0.0])]).unwrap();
        assert!(matches!(
            m.predicted_probability("psi", "nope"),
            Err(Error::Lookup(_))
        ));
        assert!(matches!(m.lambda_set("phi"), Err(Error::Lookup(_))));
        assert!(matches!(m.core_set("x"), Err(Error::Lookup(_))));
    }

    #[test]
    fn preparation_requires_matching_filter() {
        assert!(model(&[("psi", [1.0, 0.0, 0.0])], &[("phi", [1.0, 0.0, 0.0])]).is_err());
    }

    #[test]
    fn uniform_state_covers_every_point() {
        let third = 1.0 / 3.0;
        let m = model(&[("psi", [third; 3])], &[("psi", [1.0; 3])]).unwrap();
        assert_eq!(m.lambda_set("psi").unwrap(), IndexSet::from([0, 1, 2]));
    }

    #[test]
    fn empty_support_and_constant_half_core() {
        let m = model(
            &[("psi", [1.0, 0.0, 0.0])],
            &[("psi", [1.0, 0.0, 0.0]), ("phi", [0.0, 0.0, 0.0])],
        )
        .unwrap();
        assert!(m.support_set("phi").unwrap().is_empty());

        let m = model(
            &[("psi", [1.0, 0.0, 0.0])],
            &[("psi", [1.0, 0.0, 0.0]), ("phi", [0.5; 3])],
        )
        .unwrap();
        assert!(m.core_set("phi").unwrap().is_empty());
        assert_eq!(m.support_set("phi").unwrap().len(), 3);
    }

    #[test]
    fn certainty_violation_is_reported() {
        let m = model(&[("psi", [0.5, 0.5, 0.0])], &[("psi", [1.0, 0.9, 0.0])]).unwrap();
        let report = m.check_certainty("psi").unwrap();
        assert!(!report.holds);
        assert!((report.worst_deviation - 0.1).abs() < 1e-15);
        let inc = m.check_inclusions("psi").unwrap();
        assert!(!inc.holds);
        assert_eq!(inc.lambda_not_in_core, vec![1]);
    }

    #[test]
    fn larger_core_is_not_reciprocal() {
        let m = model(&[("psi", [1.0, 0.0, 0.0])], &[("psi", [1.0, 1.0, 0.0])]).unwrap();
        assert!(m.check_certainty("psi").unwrap().holds);
        assert!(m.check_inclusions("psi").unwrap().holds);
        let r = m.check_reciprocity("psi").unwrap();
        assert!(!r.reciprocal);
        assert_eq!(r.extra_core_indices, vec![1]);
    }

    #[test]
    fn constant_one_filter_is_deterministic() {
        let m = model(
            &[("psi", [1.0, 0.0, 0.0])],
            &[("psi", [1.0, 1.0, 1.0]), ("phi", [1.0, 0.4, 0.0])],
        )
        .unwrap();
        assert!(m.check_determinism("psi").unwrap().deterministic);
        let d = m.check_determinism("phi").unwrap();
        assert!(!d.deterministic);
        assert_eq!(d.fuzzy_indices, vec![1]);
    }

    #[test]
    fn predicted_probability_is_raw() {
        let m = model(
            &[("psi", [0.25, 0.75, 0.0])],
            &[("psi", [1.0, 1.0, 0.0]), ("phi", [0.2, 0.6, 1.0])],
        )
        .unwrap();
        let p = m.predicted_probability("psi", "phi").unwrap();
        assert!((p - (0.25 * 0.2 + 0.75 * 0.6)).abs() < 1e-15);
    }
}
