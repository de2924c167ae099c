//! Degree of epistemicity, ontological indeterminism, the residual identities
//! that connect them, dimension bounds, and model classification.

mod bounds;
mod measures;
mod randomness;
mod report;

pub use bounds::{
    bound_constant, bounds_table, maroney_omega_bound, BoundRow, MAX_TABLE_DIMENSION,
};
pub use measures::{decomposition_check, i_ont, identity_check, omega};
pub use randomness::{randomness_report, OutcomeProbability, RandomnessReport, FLOOR_LABEL};
pub use report::{
    classify, worst_born_residual, AuditFlags, AuditReport, BoundNote, Classification, PairAudit,
};
