//! Simultaneous Diophantine approximation and recurrence searches for
//! unimodular numbers.

mod dirichlet;
mod recurrence;

pub(crate) use dirichlet::first_in_range;
pub use dirichlet::{dirichlet_pigeonhole, dirichlet_simultaneous, DirichletCertificate, SearchBudget};
pub use recurrence::{
    certified_sup_error, default_q_schedule, near_recurrence_to_identity, recurrence_exponent,
    weak_limit_subsequence, RecurrenceOptions, RecurrenceResult, SupError, WeakLimit, UNIMODULAR_TOL,
};
