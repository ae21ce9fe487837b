//! Accuracy evaluation of PROSPECTOR's uncertain-inference rules.
//!
//! Small inference networks (two pieces of evidence, one conclusion) are
//! represented as 2×2×2 joint probability tables. PROSPECTOR's
//! piecewise-linear propagation and its conjunctive, disjunctive and
//! independence rules ([`engine`]) are compared against the answers of
//! minimum cross-entropy updating of the full table ([`oracle`]) over
//! randomly generated networks ([`netgen`]), and the errors are aggregated
//! per network and per evidence-relation class ([`study`]).
//!
//! ```
//! use prospector_eval::{case_study, engine, oracle::EvidenceUpdate};
//!
//! let table = case_study::case_study_one();
//! let view = table.network_view().unwrap();
//! let update = EvidenceUpdate::new(1.0, 1.0).unwrap();
//! let (estimate, _) = engine::infer(&view, engine::RuleSet::Independent, &update).unwrap();
//! let correct = prospector_eval::oracle::correct_posterior(&table, &update).unwrap();
//! assert!((correct - estimate - 0.0552).abs() < 1e-4);
//! ```

pub mod case_study;
pub mod constraints;
pub mod engine;
pub mod error;
pub mod io;
pub mod netgen;
pub mod oracle;
pub mod parallel;
pub mod study;
pub mod table;

pub use engine::{LinkParams, LogicalLinks, RuleSet};
pub use error::{Error, Result};
pub use oracle::EvidenceUpdate;
pub use table::{ConditionalProfile, EvidenceKind, JointTable, NetworkView};
