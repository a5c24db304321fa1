//! Certification of ground-state preparations of frustration-free local
//! Hamiltonians from local energy measurements.
//!
//! The crate covers the whole pipeline at desk scale:
//!
//! - [`operators`]: local Hamiltonians, sparse assembly, spectral summaries and
//!   frustration-freeness checks.
//! - [`states`]: prepared states (pure, dense, or lazily noisy), fidelities and
//!   trace distances.
//! - [`circuit`] and [`constructions`]: gate-list programs, the Feynman–Kitaev
//!   clock compiler and the IQP encoding of degree-3 polynomials over F₂.
//! - [`sampling`]: finite-statistics measurements of local terms.
//! - [`certification`]: sample-size planning, fidelity bounds, the accept/reject
//!   rule, and a phase-estimation fidelity estimator.
//! - [`supremacy`]: the certify-or-sample procedure for IQP ground-state
//!   encodings and its ℓ₁ error budget.
//! - [`montecarlo`]: repetition harness with binomial confidence intervals.

pub mod certification;
pub mod circuit;
pub mod constructions;
pub mod eigen;
pub mod error;
pub mod linalg;
pub mod montecarlo;
pub mod operators;
pub mod rng;
pub mod sampling;
pub mod sparse;
pub mod states;
pub mod stats;
pub mod supremacy;

pub use error::{Error, Result};
pub use operators::{LocalHamiltonian, LocalTerm, SiteSystem, SpectralSummary};
pub use states::{PreparedState, PureState};
