//! Built-in ontological models and the linear-feasibility synthesizer.

mod builtin;
mod scenario;
mod synth;

pub use builtin::{build_bb_ontic, build_ks_qubit};
pub use scenario::{LabeledState, Scenario, DEFAULT_GRID_SIZE};
pub use synth::{
    synthesize_model, synthesize_with, Objective, SupportPattern, Synthesis, SynthesisOptions,
    DEFAULT_MAX_ITERATIONS,
};
