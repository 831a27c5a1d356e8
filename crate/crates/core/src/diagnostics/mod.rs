//! Two-sided checks: sampled vanishing hypotheses on special planes against
//! the closed-form flatness criteria they are equivalent to.

mod checks;
mod fuzz;
mod report;

pub use checks::{
    einstein_check, equivalence_check, flatness_norms, uniqueness_check, vanishing_report,
    EquivalenceReport, FlatnessNorms, Outcome, Role, Side, TheoremId, UniquenessKind,
};
pub use fuzz::{
    fuzz, fuzz_trial_tensor, summary_json, Family, FuzzConfig, FuzzFailure, FuzzSummary, Tally,
};
pub use report::{DiagReport, Probe, Witness};
