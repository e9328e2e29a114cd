//! Minimal Gaussian quadrature rules containing prescribed nodes.
//!
//! Given a truncated moment sequence `γ = (γ₀, …, γ_D)` and a set of real
//! nodes, the solvers in [`prescribed`] decide whether a quadrature rule with
//! the minimal number of atoms (optionally including the evaluation-at-infinity
//! functional) exists that contains those nodes, and construct it. Every
//! yes/no decision is taken in exact rational arithmetic; floating point is
//! only used to extract irrational roots and to report eigenvalues.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod moments;
pub mod numerics;
pub mod polynomials;
pub mod prescribed;
pub mod tmp;
pub mod verify;

pub use error::{Error, Result};
pub use moments::{LocalizedSequence, MomentSequence};
pub use numerics::{Definiteness, Matrix, Mode, Scalar, Tolerances};
pub use polynomials::{Polynomial, RootReport};
pub use prescribed::{
    Certificate, CertificateStage, EigenReport, PrescribedProblem, QuadratureVerdict,
    SolverOutcome,
};
pub use tmp::{Atom, Measure, TmpVerdict};
pub use verify::{Comparison, InstanceSpec};
