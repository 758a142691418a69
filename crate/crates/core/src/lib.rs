//! Faculty recommendations from biclusters of a faculty × attribute catalog
//! and a user × attribute usage history.
//!
//! The catalog ([`FormalContext`]) says which attributes each faculty has;
//! the usage history ([`MultiValuedContext`]) counts how often each user
//! looked at each attribute, and [`VisitsVector`] how many visits that took.
//! [`recbi`] turns these into ranked recommendations for a seed faculty:
//!
//! ```
//! use bicrec::fixtures::{k3, u0_usage, u0_visits};
//! use bicrec::recbi::recbi1;
//!
//! let catalog = k3();
//! let rec = recbi1(&catalog, &u0_usage(&catalog), &u0_visits(), "u0", "f1", 5).unwrap();
//! assert_eq!(rec.to_json(), r#"{"mode":"recbi1","seed_faculty":"f1","items":[{"faculty_id":"f2","score_num":1,"score_den":3}]}"#);
//! ```

pub mod api;
pub mod context;
pub mod engine;
mod error;
pub mod eval;
pub mod exec;
pub mod fixtures;
pub mod recbi;
pub mod store;

pub use context::{
    multiply, record_visit, threshold, Bicluster, FormalContext, InterestMatrix, MultiValuedContext,
    PreferenceContext, VisitLog, VisitsVector,
};
pub use engine::{EngineConfig, EngineState};
pub use error::{Error, Result};
pub use exec::Execution;
pub use recbi::{Mode, Recommendation, Score, ScoredItem};
pub use store::Dataset;
