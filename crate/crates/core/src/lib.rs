//! Fourier-analytic learning of DNFs, thresholds of parities (TOP) and
//! unions of rectangles (UBOX) over `[b]^n` under passive example-access
//! models: random walks, cyclic random walks and noise-sensitivity sampling.
//!
//! The crate is organized as:
//!
//! - [`domain`]: target-function classes, points and frequency vectors;
//! - [`fourier`]: exact spectral computations (the ground truth for tests);
//! - [`oracles`]: the example-access models as stateful seeded sessions;
//! - [`estimators`]: Hoeffding-calibrated Monte-Carlo estimators of the
//!   spectral quantities the learners need;
//! - [`learners`]: coefficient search, boosting and the end-to-end learners;
//! - [`report`]: experiment driver configuration, reports and comparison.

pub mod domain;
pub mod error;
pub mod estimators;
pub mod fourier;
pub mod learners;
pub mod oracles;
pub mod report;

pub use error::{Error, Result};
