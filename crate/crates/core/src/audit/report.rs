use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bounds::{bound_constant, maroney_omega_bound};
use super::measures::PairTerms;
use crate::error::{Error, Result};
use crate::models::Scenario;
use crate::ontic::{OntologicalModel, ToleranceConfig};
use crate::quantum::born_probability;

const BOUND_NOTE: &str = "basis-independence violated or tolerance artifact";
const SCENARIO_MATCH_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    PsiOntic,
    MaximallyPsiEpistemic,
    NonmaximalPsiEpistemic,
    Mixed,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::PsiOntic => "psi_ontic",
            Classification::MaximallyPsiEpistemic => "maximally_psi_epistemic",
            Classification::NonmaximalPsiEpistemic => "nonmaximal_psi_epistemic",
            Classification::Mixed => "mixed",
        })
    }
}

/// Audit of one ordered preparation/filter pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairAudit {
    pub psi: String,
    pub phi: String,
    pub i_q: f64,
    pub omega: Option<f64>,
    pub i_ont: f64,
    pub born_residual: f64,
    pub decomposition_residual: f64,
    /// Only reported when both states are reciprocal and the pair is non-orthogonal.
    pub identity_residual: Option<f64>,
    pub lambda_r_size: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditFlags {
    pub certainty_all: bool,
    pub reciprocal_all: bool,
    pub deterministic_all: bool,
    /// Reciprocal and deterministic everywhere exactly when maximally psi-epistemic.
    pub classification_consistent: bool,
}

/// Pair whose measured indeterminism sits below the dimension floor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundNote {
    pub psi: String,
    pub phi: String,
    pub i_ont: f64,
    pub floor: f64,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub model: String,
    pub dim: usize,
    pub flags: AuditFlags,
    pub classification: Classification,
    pub bound_constant: f64,
    pub omega_d_bound: f64,
    pub pairs: Vec<PairAudit>,
    pub tolerances: ToleranceConfig,
    pub bound_notes: Vec<BoundNote>,
}

impl AuditReport {
    pub fn max_born_residual(&self) -> f64 {
        self.pairs
            .iter()
            .map(|p| p.born_residual)
            .fold(0.0, f64::max)
    }

    /// Writes the pair table as CSV with the same column names as the JSON fields.
    pub fn write_pairs_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        for pair in &self.pairs {
            csv.serialize(pair)?;
        }
        csv.flush()?;
        Ok(())
    }
}

/// Worst `|predicted - |<psi|phi>|^2|` over all ordered scenario pairs, diagonal included.
pub fn worst_born_residual(
    model: &OntologicalModel,
    scenario: &Scenario,
) -> Result<(String, String, f64)> {
    let mut worst = (String::new(), String::new(), -1.0);
    for psi in scenario.labels() {
        for phi in scenario.labels() {
            let predicted = model.predicted_probability(psi, phi)?;
            let residual =
                (predicted - born_probability(model.state(psi)?, model.state(phi)?)?).abs();
            if residual > worst.2 {
                worst = (psi.to_string(), phi.to_string(), residual);
            }
        }
    }
    Ok(worst)
}

fn classify_omegas(omegas: &[f64], eps: f64, reciprocal_and_deterministic: bool) -> Classification {
    if omegas.is_empty() {
        // Every rule holds vacuously; let the structural flags decide.
        return if reciprocal_and_deterministic {
            Classification::MaximallyPsiEpistemic
        } else {
            Classification::PsiOntic
        };
    }
    if omegas.iter().all(|&w| w <= eps) {
        Classification::PsiOntic
    } else if omegas.iter().all(|&w| w >= 1.0 - eps) {
        Classification::MaximallyPsiEpistemic
    } else if omegas.iter().all(|&w| w > eps && w < 1.0 - eps) {
        Classification::NonmaximalPsiEpistemic
    } else {
        Classification::Mixed
    }
}

/// Audits every ordered pair of distinct scenario states and classifies the model.
pub fn classify(model: &OntologicalModel, scenario: &Scenario) -> Result<AuditReport> {
    let labels: Vec<&str> = scenario.labels().collect();
    if labels.is_empty() {
        return Err(Error::validation("scenario has no states"));
    }
    for s in scenario.states() {
        let overlap = born_probability(&s.state, model.state(&s.label)?)?;
        if overlap < 1.0 - SCENARIO_MATCH_TOLERANCE {
            return Err(Error::validation(format!(
                "scenario state `{}` differs from the model's",
                s.label
            )));
        }
    }

    let tol = *model.tolerances();
    let (psi, phi, residual) = worst_born_residual(model, scenario)?;
    if residual > tol.eps_residual {
        return Err(Error::BornViolation { psi, phi, residual });
    }

    let mut certainty_all = true;
    let mut reciprocal_all = true;
    let mut deterministic_all = true;
    let mut reciprocal = Vec::with_capacity(labels.len());
    for label in &labels {
        certainty_all &= model.check_certainty(label)?.holds;
        let r = model.check_reciprocity(label)?.reciprocal;
        reciprocal.push(r);
        reciprocal_all &= r;
        deterministic_all &= model.check_determinism(label)?.deterministic;
    }

    let ordered: Vec<(usize, usize)> = (0..labels.len())
        .flat_map(|a| {
            (0..labels.len())
                .filter(move |&b| b != a)
                .map(move |b| (a, b))
        })
        .collect();
    let pairs = ordered
        .par_iter()
        .map(|&(a, b)| {
            let terms = PairTerms::compute(model, labels[a], labels[b])?;
            let omega = terms.omega(tol.eps_residual);
            let identity_residual = omega
                .filter(|_| reciprocal[a] && reciprocal[b])
                .map(|w| terms.identity_residual(w));
            Ok(PairAudit {
                psi: labels[a].to_string(),
                phi: labels[b].to_string(),
                i_q: terms.i_q,
                omega,
                i_ont: terms.i_ont,
                born_residual: terms.born_residual(),
                decomposition_residual: terms.decomposition_residual(),
                identity_residual,
                lambda_r_size: terms.lambda_r_size,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let dim = model.dim();
    let floor = bound_constant(dim as u64)?;
    let omegas: Vec<f64> = pairs.iter().filter_map(|p| p.omega).collect();
    let classification = classify_omegas(
        &omegas,
        tol.eps_residual,
        reciprocal_all && deterministic_all,
    );
    let classification_consistent = (reciprocal_all && deterministic_all)
        == (classification == Classification::MaximallyPsiEpistemic);

    let bound_notes = pairs
        .iter()
        .filter(|p| p.omega.is_some() && p.i_ont < floor * p.i_q)
        .map(|p| BoundNote {
            psi: p.psi.clone(),
            phi: p.phi.clone(),
            i_ont: p.i_ont,
            floor: floor * p.i_q,
            note: BOUND_NOTE.to_string(),
        })
        .collect();

    Ok(AuditReport {
        model: model.name().to_string(),
        dim,
        flags: AuditFlags {
            certainty_all,
            reciprocal_all,
            deterministic_all,
            classification_consistent,
        },
        classification,
        bound_constant: floor,
        omega_d_bound: maroney_omega_bound(dim as u64)?,
        pairs,
        tolerances: tol,
        bound_notes,
    })
}
