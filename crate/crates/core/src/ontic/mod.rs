//! Discretized ontological models: ontic spaces, epistemic states, response
//! functions, and the support/core machinery used by the audits.

mod functions;
mod model;
mod serial;
mod space;
mod tolerance;

pub use functions::{normalization_tolerance, EpistemicState, ResponseFunction};
pub use model::{
    CertaintyReport, DeterminismReport, InclusionReport, IndexSet, OntologicalModel,
    ReciprocityReport,
};
pub use serial::ModelFile;
pub use space::{OnticPoint, OnticSpace, SpaceKind, SPHERE_MEASURE};
pub use tolerance::ToleranceConfig;
