//! Exact verification of generalized multi-sum Chu-Vandermonde binomial
//! identities.
//!
//! The library evaluates both sides of sixteen weighted multi-sum binomial
//! identities (eight over capped compositions of a target `n`, eight over
//! the full box) entirely in Gaussian-rational arithmetic, and checks
//! them against a brute-force enumeration oracle. It also mechanizes the
//! residue/formal-series toolkit the closed forms are built from.
//!
//! Entry points:
//! - [`instance`]: problem instances, aggregate sums, label catalogs,
//!   seeded generation
//! - [`oracle`]: enumeration cursors and brute-force left sides
//! - [`closed_form`]: literal, absorption-moment and moment-decomposition
//!   right sides, plus the mutation hooks for falsifiability testing
//! - [`residue`]: binomial-as-residue, truncated series, derivative
//!   residues
//! - [`campaign`]: seeded verification sweeps with line-delimited reports

mod batch;
pub mod campaign;
pub mod closed_form;
pub mod error;
pub mod exact;
pub mod instance;
pub mod oracle;
pub mod residue;

pub use error::EvalError;
pub use exact::{GaussianRational, Rational};
pub use instance::{IdentityLabel, ProblemInstance};
