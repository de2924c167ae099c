use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Surface measure of the unit sphere.
pub const SPHERE_MEASURE: f64 = 4.0 * PI;

const MEASURE_TOLERANCE: f64 = 1e-6;
const UNIT_NORM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    /// Quadrature nodes on the unit sphere.
    Grid,
    /// Unit point masses.
    Atomic,
}

/// Coordinates of an ontic state: a point on the sphere or an opaque label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OnticPoint {
    Vector(Vec<f64>),
    Label(String),
}

impl OnticPoint {
    pub fn as_vector(&self) -> Option<&[f64]> {
        match self {
            OnticPoint::Vector(v) => Some(v),
            OnticPoint::Label(_) => None,
        }
    }
}

/// A finite weighted discretization of the ontic state space.
#[derive(Clone, Debug, PartialEq)]
pub struct OnticSpace {
    kind: SpaceKind,
    points: Vec<OnticPoint>,
    weights: Vec<f64>,
}

impl OnticSpace {
    pub fn new(kind: SpaceKind, points: Vec<OnticPoint>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::validation("ontic space needs at least one point"));
        }
        if points.len() != weights.len() {
            return Err(Error::validation(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::validation(format!(
                "weights must be positive, found {w}"
            )));
        }
        match kind {
            SpaceKind::Grid => {
                for (i, point) in points.iter().enumerate() {
                    let v = point.as_vector().filter(|v| v.len() == 3).ok_or_else(|| {
                        Error::validation(format!("grid point {i} is not a 3-vector"))
                    })?;
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if (norm - 1.0).abs() > UNIT_NORM_TOLERANCE {
                        return Err(Error::validation(format!(
                            "grid point {i} is off the unit sphere (norm {norm})"
                        )));
                    }
                }
                let total: f64 = weights.iter().sum();
                if (total - SPHERE_MEASURE).abs() > MEASURE_TOLERANCE {
                    return Err(Error::validation(format!(
                        "grid weights sum to {total}, expected 4*pi"
                    )));
                }
            }
            SpaceKind::Atomic => {
                if weights.iter().any(|&w| w != 1.0) {
                    return Err(Error::validation("atomic weights must all be 1"));
                }
                for (i, point) in points.iter().enumerate() {
                    if points[..i].contains(point) {
                        return Err(Error::validation(format!("duplicate atom {point:?}")));
                    }
                }
            }
        }
        Ok(Self {
            kind,
            points,
            weights,
        })
    }

    /// Fibonacci lattice of `n` near-uniform nodes on the unit sphere, equal weights `4*pi/n`.
    pub fn fibonacci_sphere(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("grid size must be positive"));
        }
        let golden_angle = PI * (3.0 - 5f64.sqrt());
        let points = (0..n)
            .map(|i| {
                let z = 1.0 - (2 * i + 1) as f64 / n as f64;
                let r = (1.0 - z * z).sqrt();
                let azimuth = golden_angle * i as f64;
                OnticPoint::Vector(vec![r * azimuth.cos(), r * azimuth.sin(), z])
            })
            .collect();
        Self::new(SpaceKind::Grid, points, vec![SPHERE_MEASURE / n as f64; n])
    }

    /// Unit point masses named by `labels`.
    pub fn atomic<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let points: Vec<_> = labels
            .into_iter()
            .map(|l| OnticPoint::Label(l.into()))
            .collect();
        let weights = vec![1.0; points.len()];
        Self::new(SpaceKind::Atomic, points, weights)
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[OnticPoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Iterates `(point, weight)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (&OnticPoint, f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_nodes_cover_sphere() {
        let space = OnticSpace::fibonacci_sphere(5000).unwrap();
        assert_eq!(space.len(), 5000);
        assert!((space.total_measure() - SPHERE_MEASURE).abs() < 1e-9);
        // First moments of a near-uniform lattice vanish.
        let mut mean = [0.0; 3];
        for (p, w) in space.iter() {
            for (m, x) in mean.iter_mut().zip(p.as_vector().unwrap()) {
                *m += w * x / SPHERE_MEASURE;
            }
        }
        assert!(mean.iter().all(|m| m.abs() < 1e-3), "{mean:?}");
    }

    #[test]
    fn rejects_bad_spaces() {
        assert!(OnticSpace::atomic(Vec::<String>::new()).is_err());
        assert!(OnticSpace::atomic(["a", "a"]).is_err());
        assert!(OnticSpace::new(
            SpaceKind::Atomic,
            vec![OnticPoint::Label("a".into())],
            vec![2.0]
        )
        .is_err());
        assert!(OnticSpace::new(
            SpaceKind::Grid,
            vec![OnticPoint::Vector(vec![0.0, 0.0, 1.0])],
            vec![1.0]
        )
        .is_err());
        assert!(OnticSpace::new(
            SpaceKind::Grid,
            vec![OnticPoint::Vector(vec![0.0, 0.5, 0.5])],
            vec![SPHERE_MEASURE]
        )
        .is_err());
        assert!(OnticSpace::fibonacci_sphere(0).is_err());
    }
}
