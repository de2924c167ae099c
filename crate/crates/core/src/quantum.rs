//! Operational layer: pure states, projective filters and Born statistics.
//!
//! Everything here is phase-invariant: states are only ever compared through
//! `|<a|b>|`, so no gauge is fixed.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Maximum deviation of `sum |a_i|^2` from one accepted at construction.
pub const NORM_TOLERANCE: f64 = 1e-12;
/// Maximum `|<a|b>|` between distinct eigenstates of an observable.
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-10;
/// Distance from {0, 1} below which an outcome counts as certain.
pub const DETERMINISM_TOLERANCE: f64 = 1e-10;
/// Label of the synthetic outcome that completes an incomplete filter.
pub const FAIL_LABEL: &str = "fail";

/// A normalized ray in a `d`-dimensional complex Hilbert space, `d >= 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Validates an already-normalized amplitude vector.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::validation(format!(
                "state dimension must be at least 2, got {}",
                amplitudes.len()
            )));
        }
        if amplitudes
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::validation("state amplitudes must be finite"));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::validation(format!(
                "state is not normalized: sum |a|^2 = {norm:.15}"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales `amplitudes` to unit norm before validating.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::validation(
                "cannot normalize a zero or non-finite vector",
            ));
        }
        Self::new(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    /// Builds a state from `[re, im]` pairs, as they appear in scenario files.
    pub fn from_pairs(pairs: &[[f64; 2]]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&[re, im]| Complex64::new(re, im))
                .collect(),
        )
    }

    /// Computational basis vector `|index>`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::validation(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self::new(amplitudes)
    }

    /// Qubit state with Bloch polar angle `theta` and azimuth `phi`.
    pub fn qubit(theta: f64, phi: f64) -> Self {
        let a = Complex64::new((theta / 2.0).cos(), 0.0);
        let b = Complex64::from_polar((theta / 2.0).sin(), phi);
        Self::normalized(vec![a, b]).expect("qubit amplitudes are always normalizable")
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.amplitudes.iter().map(|a| [a.re, a.im]).collect()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        ensure_same_dim(self.dim(), other.dim())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Multiplies every amplitude by `e^{i angle}`.
    pub fn with_global_phase(&self, angle: f64) -> Self {
        let phase = Complex64::from_polar(1.0, angle);
        Self {
            amplitudes: self.amplitudes.iter().map(|a| a * phase).collect(),
        }
    }

    /// Bloch vector `(2 Re(a* b), 2 Im(a* b), |a|^2 - |b|^2)` of a qubit.
    pub fn bloch_vector(&self) -> Result<[f64; 3]> {
        if self.dim() != 2 {
            return Err(Error::UnsupportedDimension(self.dim()));
        }
        let (a, b) = (self.amplitudes[0], self.amplitudes[1]);
        let ab = a.conj() * b;
        Ok([2.0 * ab.re, 2.0 * ab.im, a.norm_sqr() - b.norm_sqr()])
    }
}

fn ensure_same_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::Dimension { expected, found });
    }
    Ok(())
}

/// A projective measurement given by orthonormal eigenstates.
///
/// With fewer eigenstates than the dimension it acts as a filter, and the
/// remaining probability goes to an implicit [`FAIL_LABEL`] outcome.
#[derive(Clone, Debug)]
pub struct ProjectiveObservable {
    eigenstates: Vec<StateVector>,
    labels: Vec<String>,
}

impl ProjectiveObservable {
    pub fn new(eigenstates: Vec<StateVector>, labels: Vec<String>) -> Result<Self> {
        let Some(first) = eigenstates.first() else {
            return Err(Error::validation(
                "observable needs at least one eigenstate",
            ));
        };
        let dim = first.dim();
        if eigenstates.len() != labels.len() {
            return Err(Error::validation(format!(
                "{} eigenstates but {} outcome labels",
                eigenstates.len(),
                labels.len()
            )));
        }
        if eigenstates.len() > dim {
            return Err(Error::validation(format!(
                "{} eigenstates exceed dimension {dim}",
                eigenstates.len()
            )));
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::validation(format!(
                    "duplicate outcome label `{label}`"
                )));
            }
        }
        if eigenstates.len() < dim && labels.iter().any(|l| l == FAIL_LABEL) {
            return Err(Error::validation(format!(
                "label `{FAIL_LABEL}` is reserved for the complement of a filter"
            )));
        }
        for (j, a) in eigenstates.iter().enumerate() {
            ensure_same_dim(dim, a.dim())?;
            for b in &eigenstates[..j] {
                let overlap = a.inner(b)?.norm();
                if overlap > ORTHOGONALITY_TOLERANCE {
                    return Err(Error::validation(format!(
                        "eigenstates are not orthogonal (|<a|b>| = {overlap:e})"
                    )));
                }
            }
        }
        Ok(Self {
            eigenstates,
            labels,
        })
    }

    /// The single-outcome filter `|phi><phi|`.
    pub fn filter(phi: StateVector, label: impl Into<String>) -> Result<Self> {
        Self::new(vec![phi], vec![label.into()])
    }

    pub fn dim(&self) -> usize {
        self.eigenstates[0].dim()
    }

    pub fn is_complete(&self) -> bool {
        self.eigenstates.len() == self.dim()
    }

    pub fn eigenstates(&self) -> &[StateVector] {
        &self.eigenstates
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// Born probability `|<phi|psi>|^2`. Exactly symmetric in its arguments.
pub fn born_probability(psi: &StateVector, phi: &StateVector) -> Result<f64> {
    Ok(phi.inner(psi)?.norm_sqr())
}

/// Operational indeterminism of a preparation/filter pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuantumIndeterminism {
    pub value: f64,
    pub indeterministic: bool,
}

pub fn i_quantum(psi: &StateVector, phi: &StateVector) -> Result<QuantumIndeterminism> {
    let value = born_probability(psi, phi)?;
    let indeterministic =
        value.abs() > DETERMINISM_TOLERANCE && (1.0 - value).abs() > DETERMINISM_TOLERANCE;
    Ok(QuantumIndeterminism {
        value,
        indeterministic,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub label: String,
    pub probability: f64,
}

/// Full outcome distribution, including the `fail` outcome of an incomplete filter.
pub fn outcome_distribution(psi: &StateVector, obs: &ProjectiveObservable) -> Result<Vec<Outcome>> {
    ensure_same_dim(obs.dim(), psi.dim())?;
    let mut outcomes = obs
        .eigenstates
        .iter()
        .zip(&obs.labels)
        .map(|(phi, label)| {
            Ok(Outcome {
                label: label.clone(),
                probability: born_probability(psi, phi)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if !obs.is_complete() {
        let passed: f64 = outcomes.iter().map(|o| o.probability).sum();
        outcomes.push(Outcome {
            label: FAIL_LABEL.to_string(),
            probability: (1.0 - passed).max(0.0),
        });
    }
    Ok(outcomes)
}

/// `G = max_k p(k | psi, obs)`.
pub fn guessing_probability(psi: &StateVector, obs: &ProjectiveObservable) -> Result<f64> {
    Ok(outcome_distribution(psi, obs)?
        .iter()
        .map(|o| o.probability)
        .fold(0.0, f64::max))
}

/// Min-entropy `-log2 G` in bits.
pub fn min_entropy(psi: &StateVector, obs: &ProjectiveObservable) -> Result<f64> {
    Ok(min_entropy_of(guessing_probability(psi, obs)?))
}

pub(crate) fn min_entropy_of(guessing: f64) -> f64 {
    if guessing >= 1.0 {
        0.0
    } else {
        -guessing.log2()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn qubit_basis() -> ProjectiveObservable {
        ProjectiveObservable::new(
            vec![
                StateVector::basis(2, 0).unwrap(),
                StateVector::basis(2, 1).unwrap(),
            ],
            vec!["0".into(), "1".into()],
        )
        .unwrap()
    }

    #[test]
    fn rejects_unnormalized_and_short_vectors() {
        assert!(matches!(
            StateVector::new(vec![c(1.0, 0.0), c(1.0, 0.0)]),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            StateVector::new(vec![c(1.0, 0.0)]),
            Err(Error::Validation(_))
        ));
        assert!(StateVector::normalized(vec![c(0.0, 0.0), c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let a = StateVector::basis(2, 0).unwrap();
        let b = StateVector::basis(3, 0).unwrap();
        assert!(matches!(
            born_probability(&a, &b),
            Err(Error::Dimension {
                expected: 3,
                found: 2
            })
        ));
    }

    #[test]
    fn born_identity_orthogonal_and_quarter_turn() {
        let zero = StateVector::basis(2, 0).unwrap();
        let one = StateVector::basis(2, 1).unwrap();
        assert_eq!(born_probability(&zero, &zero).unwrap(), 1.0);
        assert_eq!(born_probability(&zero, &one).unwrap(), 0.0);

        // cos^2(pi/4) = 1/2, cross-checked against explicit amplitudes.
        let rotated = StateVector::qubit(FRAC_PI_2, 0.3);
        let by_hand = (FRAC_PI_2 / 2.0).cos().powi(2);
        let plus = StateVector::new(vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]).unwrap();
        assert!((born_probability(&rotated, &zero).unwrap() - by_hand).abs() < 1e-15);
        assert!((born_probability(&plus, &zero).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn quantum_indeterminism_flags() {
        let zero = StateVector::basis(2, 0).unwrap();
        let one = StateVector::basis(2, 1).unwrap();
        let half = StateVector::qubit(FRAC_PI_2, 0.0);
        let same = i_quantum(&zero, &zero).unwrap();
        assert_eq!(same.value, 1.0);
        assert!(!same.indeterministic);
        assert!(!i_quantum(&zero, &one).unwrap().indeterministic);
        let mid = i_quantum(&half, &zero).unwrap();
        assert!((mid.value - 0.5).abs() < 1e-15);
        assert!(mid.indeterministic);
    }

    #[test]
    fn distributions() {
        let obs = qubit_basis();
        let zero = StateVector::basis(2, 0).unwrap();
        let dist = outcome_distribution(&zero, &obs).unwrap();
        assert_eq!(dist[0].probability, 1.0);
        assert_eq!(dist[1].probability, 0.0);

        let equator = StateVector::qubit(FRAC_PI_2, 1.1);
        let dist = outcome_distribution(&equator, &obs).unwrap();
        assert!((dist[0].probability - 0.5).abs() < 1e-15);
        assert!((dist[1].probability - 0.5).abs() < 1e-15);

        let filter =
            ProjectiveObservable::filter(StateVector::basis(2, 1).unwrap(), "one").unwrap();
        let dist = outcome_distribution(&zero, &filter).unwrap();
        assert_eq!(dist.len(), 2);
        assert_eq!(dist[0].probability, 0.0);
        assert_eq!(dist[1].label, FAIL_LABEL);
        assert_eq!(dist[1].probability, 1.0);
    }

    #[test]
    fn guessing_and_min_entropy() {
        let obs = qubit_basis();
        let zero = StateVector::basis(2, 0).unwrap();
        assert_eq!(guessing_probability(&zero, &obs).unwrap(), 1.0);
        assert_eq!(min_entropy(&zero, &obs).unwrap(), 0.0);

        let equator = StateVector::qubit(FRAC_PI_2, 0.0);
        assert!((guessing_probability(&equator, &obs).unwrap() - 0.5).abs() < 1e-15);
        assert!((min_entropy(&equator, &obs).unwrap() - 1.0).abs() < 1e-12);

        let basis4: Vec<_> = (0..4).map(|k| StateVector::basis(4, k).unwrap()).collect();
        let obs4 =
            ProjectiveObservable::new(basis4, (0..4).map(|k| k.to_string()).collect()).unwrap();
        let uniform = StateVector::new(vec![c(0.5, 0.0); 4]).unwrap();
        assert_eq!(guessing_probability(&uniform, &obs4).unwrap(), 0.25);
        assert_eq!(min_entropy(&uniform, &obs4).unwrap(), 2.0);
    }

    #[test]
    fn observable_validation() {
        let zero = StateVector::basis(2, 0).unwrap();
        let diag = StateVector::qubit(PI / 3.0, 0.0);
        assert!(
            ProjectiveObservable::new(vec![zero.clone(), diag], vec!["a".into(), "b".into()])
                .is_err()
        );
        assert!(ProjectiveObservable::new(vec![zero.clone()], vec![FAIL_LABEL.into()]).is_err());
        assert!(ProjectiveObservable::new(vec![zero], vec![]).is_err());
    }

    #[test]
    fn bloch_vectors() {
        let zero = StateVector::basis(2, 0).unwrap();
        assert_eq!(zero.bloch_vector().unwrap(), [0.0, 0.0, 1.0]);
        let plus = StateVector::qubit(FRAC_PI_2, 0.0);
        let v = plus.bloch_vector().unwrap();
        assert!((v[0] - 1.0).abs() < 1e-15 && v[1].abs() < 1e-15 && v[2].abs() < 1e-15);
        assert!(StateVector::basis(3, 0).unwrap().bloch_vector().is_err());
    }
}
