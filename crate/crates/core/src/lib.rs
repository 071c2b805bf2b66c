//! Joint images of quadratic forms on real inner-product spaces.
//!
//! The crate samples and traces joint numerical ranges, measures how far
//! those images are from convex, searches for positive-definite combinations
//! of symmetric matrices, probes closedness through multistart attainability
//! searches, and finds and checks S-lemma and S-procedure multipliers.

pub mod certs;
pub mod cli;
pub mod error;
pub mod hull;
pub mod io;
pub mod linalg;
pub mod numrange;
pub mod pencil;
pub mod plot;
pub mod quadmap;
pub mod rng;
pub mod tls;

mod descent;

pub use error::{Error, Result};
pub use linalg::{BlockOperator, Definiteness, Spectrum, SymMatrix};
pub use numrange::{Domain, RangeSample};
pub use quadmap::QuadForm;
