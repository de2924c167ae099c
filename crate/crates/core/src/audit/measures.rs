use crate::error::{Error, Result};
use crate::ontic::OntologicalModel;
use crate::quantum::born_probability;

/// Integrals over the regions a preparation/filter pair carves out of the ontic space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct PairTerms {
    pub i_q: f64,
    pub predicted: f64,
    /// Mass of `mu(.|psi)` on `Lambda_phi`.
    pub mass_on_lambda_phi: f64,
    /// Mass of `mu(.|psi)` on `Lambda_psi ∩ Core_phi`.
    pub mass_on_core: f64,
    /// `sum over Lambda_r of xi(phi|.) mu(.|psi) w`.
    pub i_ont: f64,
    pub lambda_r_size: usize,
}

impl PairTerms {
    pub fn compute(model: &OntologicalModel, psi: &str, phi: &str) -> Result<Self> {
        let i_q = born_probability(model.state(psi)?, model.state(phi)?)?;
        let predicted = model.predicted_probability(psi, phi)?;
        let lambda_psi = model.lambda_set(psi)?;
        let lambda_phi = model.lambda_set(phi)?;
        let support = model.support_set(phi)?;
        let core = model.core_set(phi)?;

        let psi_core = lambda_psi.intersection(&core).copied().collect();
        let region: Vec<usize> = lambda_psi
            .iter()
            .copied()
            .filter(|i| support.contains(i) && !core.contains(i))
            .collect();

        let mu = model.preparation(psi)?.densities();
        let xi = model.response(phi)?.pass_values();
        let w = model.space().weights();
        let i_ont = region.iter().map(|&i| xi[i] * mu[i] * w[i]).sum();

        Ok(Self {
            i_q,
            predicted,
            mass_on_lambda_phi: model.mass_on(psi, &lambda_phi)?,
            mass_on_core: model.mass_on(psi, &psi_core)?,
            i_ont,
            lambda_r_size: region.len(),
        })
    }

    /// `None` when the pair is orthogonal to within `eps_residual`.
    pub fn omega(&self, eps_residual: f64) -> Option<f64> {
        (self.i_q >= eps_residual).then(|| self.mass_on_lambda_phi / self.i_q)
    }

    pub fn born_residual(&self) -> f64 {
        (self.predicted - self.i_q).abs()
    }

    pub fn decomposition_residual(&self) -> f64 {
        (self.mass_on_core + self.i_ont - self.i_q).abs()
    }

    pub fn identity_residual(&self, omega: f64) -> f64 {
        (self.i_ont - (1.0 - omega) * self.i_q).abs()
    }
}

fn require_certainty(model: &OntologicalModel, label: &str) -> Result<()> {
    let report = model.check_certainty(label)?;
    if report.holds {
        Ok(())
    } else {
        Err(Error::CertaintyViolation {
            label: label.to_string(),
            deviation: report.worst_deviation,
        })
    }
}

/// Degree of epistemicity: the share of `|<psi|phi>|^2` carried by the mass of
/// `mu(.|psi)` on `Lambda_phi`. `None` for (numerically) orthogonal pairs.
pub fn omega(model: &OntologicalModel, psi: &str, phi: &str) -> Result<Option<f64>> {
    require_certainty(model, phi)?;
    let terms = PairTerms::compute(model, psi, phi)?;
    Ok(terms.omega(model.tolerances().eps_residual))
}

/// Ontological indeterminism: Born mass contributed by `Lambda_psi ∩ (Supp_phi \ Core_phi)`.
pub fn i_ont(model: &OntologicalModel, psi: &str, phi: &str) -> Result<f64> {
    Ok(PairTerms::compute(model, psi, phi)?.i_ont)
}

/// `|mass(Lambda_psi ∩ Core_phi) + I_ont - I_Q|`. Needs only quantum certainty.
pub fn decomposition_check(model: &OntologicalModel, psi: &str, phi: &str) -> Result<f64> {
    require_certainty(model, phi)?;
    Ok(PairTerms::compute(model, psi, phi)?.decomposition_residual())
}

/// `|I_ont - (1 - Omega) I_Q|`, asserted only for reciprocal models.
pub fn identity_check(model: &OntologicalModel, psi: &str, phi: &str) -> Result<f64> {
    for label in [psi, phi] {
        if !model.check_reciprocity(label)?.reciprocal {
            return Err(Error::NonReciprocalModel {
                psi: psi.to_string(),
                phi: phi.to_string(),
            });
        }
    }
    require_certainty(model, phi)?;
    let terms = PairTerms::compute(model, psi, phi)?;
    let omega = terms
        .omega(model.tolerances().eps_residual)
        .ok_or_else(|| Error::OrthogonalPair {
            psi: psi.to_string(),
            phi: phi.to_string(),
        })?;
    Ok(terms.identity_residual(omega))
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;
    use std::f64::consts::{FRAC_PI_2, PI};

    use super::*;
    use crate::models::{build_bb_ontic, build_ks_qubit, LabeledState, Scenario};
    use crate::ontic::{OnticSpace, ToleranceConfig};
    use crate::quantum::StateVector;

    fn qubits(states: &[(&str, f64, f64)]) -> Scenario {
        Scenario::new(
            2,
            states
                .iter()
                .map(|&(l, t, p)| LabeledState::new(l, StateVector::qubit(t, p)))
                .collect(),
        )
        .unwrap()
    }

    /// Certainty holds but `Core_phi` reaches into `Lambda_psi` beyond `Lambda_phi`.
    fn non_reciprocal() -> OntologicalModel {
        let states = BTreeMap::from([
            ("psi".to_string(), StateVector::qubit(0.0, 0.0)),
            ("phi".to_string(), StateVector::qubit(FRAC_PI_2, 0.0)),
        ]);
        OntologicalModel::from_tables(
            "hand",
            OnticSpace::atomic(["a", "b", "c"]).unwrap(),
            states,
            BTreeMap::from([
                ("psi".to_string(), vec![0.5, 0.0, 0.5]),
                ("phi".to_string(), vec![0.0, 1.0, 0.0]),
            ]),
            BTreeMap::from([
                ("psi".to_string(), vec![1.0, 0.5, 1.0]),
                ("phi".to_string(), vec![0.0, 1.0, 1.0]),
            ]),
            ToleranceConfig::atomic(),
        )
        .unwrap()
    }

    #[test]
    fn bb_pair_values_are_exact() {
        let s = qubits(&[("a", 0.4, 0.0), ("b", 1.3, 2.1)]);
        let m = build_bb_ontic(&s).unwrap();
        let i_q = born_probability(&s.states()[0].state, &s.states()[1].state).unwrap();
        assert_eq!(omega(&m, "a", "b").unwrap(), Some(0.0));
        assert_eq!(i_ont(&m, "a", "b").unwrap(), i_q);
        assert_eq!(decomposition_check(&m, "a", "b").unwrap(), 0.0);
        assert_eq!(identity_check(&m, "a", "b").unwrap(), 0.0);
        assert!((omega(&m, "a", "a").unwrap().unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ks_pair_values() {
        let s = qubits(&[
            ("zero", 0.0, 0.0),
            ("plus", FRAC_PI_2, 0.0),
            ("one", PI, 0.0),
        ]);
        let m = build_ks_qubit(&s).unwrap();
        let w = omega(&m, "zero", "plus").unwrap().unwrap();
        assert!((w - 1.0).abs() < 5e-3, "{w}");
        assert_eq!(i_ont(&m, "zero", "plus").unwrap(), 0.0);
        assert!(decomposition_check(&m, "zero", "plus").unwrap() <= 5e-3);
        assert!(identity_check(&m, "zero", "plus").unwrap() <= 5e-3);
        assert_eq!(omega(&m, "zero", "one").unwrap(), None);
        assert!(i_ont(&m, "zero", "one").unwrap().abs() <= 5e-3);
        assert!(matches!(
            identity_check(&m, "zero", "one"),
            Err(Error::OrthogonalPair { .. })
        ));
        let same = PairTerms::compute(&m, "plus", "plus").unwrap();
        assert_eq!(same.i_ont, 0.0);
        assert!(same.decomposition_residual() < 1e-12);
    }

    #[test]
    fn decomposition_without_reciprocity() {
        let m = non_reciprocal();
        assert!(!m.check_reciprocity("phi").unwrap().reciprocal);
        assert!(decomposition_check(&m, "psi", "phi").unwrap() < 1e-15);
        assert!(decomposition_check(&m, "phi", "psi").unwrap() < 1e-15);
        assert!(matches!(
            identity_check(&m, "psi", "phi"),
            Err(Error::NonReciprocalModel { .. })
        ));
        // The identity really fails here: Omega = 0 yet I_ont = 0.
        let terms = PairTerms::compute(&m, "psi", "phi").unwrap();
        assert_eq!(terms.omega(1e-10), Some(0.0));
        assert_eq!(terms.i_ont, 0.0);
        assert!((terms.identity_residual(0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn certainty_precondition() {
        let states = BTreeMap::from([("psi".to_string(), StateVector::qubit(0.0, 0.0))]);
        let m = OntologicalModel::from_tables(
            "bad",
            OnticSpace::atomic(["a", "b"]).unwrap(),
            states,
            BTreeMap::from([("psi".to_string(), vec![0.5, 0.5])]),
            BTreeMap::from([("psi".to_string(), vec![1.0, 0.9])]),
            ToleranceConfig::atomic(),
        )
        .unwrap();
        assert!(matches!(
            omega(&m, "psi", "psi"),
            Err(Error::CertaintyViolation { .. })
        ));
        assert!(matches!(omega(&m, "psi", "x"), Err(Error::Lookup(_))));
    }
}
