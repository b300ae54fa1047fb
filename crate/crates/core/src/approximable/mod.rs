//! Commutators, the double-mollification cascade, and the probes built on it.

pub mod cascade;
pub mod commutator;
pub mod probes;
pub mod stability;

pub use cascade::{
    cascade_solve, cascade_solve_field, default_sobolev_index, CascadeOptions, CascadeResult, CascadeSchedule,
    CascadeSummary, DEFAULT_GAP_THRESHOLD,
};
pub use commutator::{commutator_apply, commutator_direct, commutator_sweep, Commutator, CommutatorRow};
pub use probes::{
    beta_battery, renormalization_defect, renormalization_defect_of, smooth_noise, uniqueness_probe, Beta,
    UniquenessOptions, UniquenessReport, UniquenessRow,
};
pub use stability::{stability_experiment, PerturbationPlan, StabilityReport, StabilityVerdict};
