//! Contexts and the derivation operators over them.
//!
//! * [`FormalContext`]: faculties × attributes, binary.
//! * [`MultiValuedContext`]: users × attributes, visit-derived counts.
//! * [`InterestMatrix`]: users × faculties, the integer product of the two.
//! * [`PreferenceContext`]: users × faculties, binary, the interest matrix cut
//!   at a minimum interest level.

mod derived;
mod formal;
mod usage;

pub use derived::{multiply, multiply_with, threshold, InterestMatrix, PreferenceContext};
pub use formal::FormalContext;
pub(crate) use formal::intersect_sorted;
pub use usage::{record_visit, MultiValuedContext, VisitLog, VisitsVector};

#[cfg(test)]
pub(crate) use crate::fixtures;

/// A faculty paired with the attributes it shares with a seed faculty.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bicluster {
    pub faculty: String,
    /// Never empty; sorted.
    pub shared_attrs: Vec<String>,
}
