//! The regularization algorithm, its face ledger, the one-step variant, the
//! minimal-face description and the feasibility-equivalence sampler.

mod driver;
mod equiv;
mod ledger;
mod minimal_face;
mod one_step;
mod state;

pub use driver::{reg_lcop, IterationRecord, RegRun, RegStatus, RegularizedProblem};
pub use equiv::{feasibility_equiv_sample, Disagreement, EquivReport};
pub use ledger::{
    compress_ledger, face_contains, face_membership, verify_ledger, CompressedLedger, EntryCheck, FaceLedgerEntry,
    LedgerReport, YGenerator,
};
pub use minimal_face::{compute_m, minimal_face, CrossCheck, MSet, MinimalFaceDescriptor};
pub use one_step::one_step_regularize;
pub use state::{
    build_y, check_disjointness_condition, kernel_residual, update_index_sets, IterationState, Record, StateUpdate,
};
