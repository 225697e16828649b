//! Learning binary classifiers under false discovery rate (FDR) and false
//! nondiscovery rate (FNDR) criteria.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: feature space, datasets, hypothesis classes and confusion counts.
//! - [`estimators`]: empirical FDR/FNDR/FPR/FNR/precision/recall with the
//!   infinite-rate convention for empty conditioning events.
//! - [`penalties`]: codelength-based confidence penalties, the Kraft sum and
//!   the penalized weighted objective.
//! - [`learners`]: the admissibility-filtered penalized rule, the constrained
//!   rules (FDR, Neyman-Pearson, precision/recall), an exact histogram solver
//!   and a brute-force oracle.
//! - [`oracle`]: piecewise-constant ground-truth distributions with closed-form
//!   rates and optima.
//! - [`harness`]: seeded, parallel Monte Carlo experiments and their reports.

pub mod error;
pub mod estimators;
pub mod harness;
pub mod learners;
pub mod model;
pub mod oracle;
pub mod penalties;
pub mod rate;

pub use error::{Error, Result};
pub use rate::ExtendedRate;
