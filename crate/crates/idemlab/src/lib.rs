//! idemlab — a numerical laboratory for idempotent operators on
//! finite-dimensional complex inner-product spaces.
//!
//! The crate is organized bottom-up:
//!
//! - [`numkernel`]: dense complex eigenvalues, rank-revealing SVD, solves;
//! - [`subspace`]: closed subspaces as orthonormal frames — projectors,
//!   gap metric, lattice operations, invariance predicates;
//! - [`idempotent`]: validated idempotents, their canonical block form,
//!   the similarity to the range projection, and the invariant-subspace
//!   characterizations that come with it;
//! - [`spectral`]: spectra, desk-scale quasinilpotency, Riesz projections
//!   by contour quadrature, and spectral identities for idempotent pairs;
//! - [`pairs`]: common invariant subspaces for idempotent pairs with
//!   quasinilpotent commutator, and the block pair built from an operator;
//! - [`essential`]: eps-idempotent classification and eps-commuting pair
//!   analysis;
//! - [`cli`]: matrix file I/O, run reports, and the command layer behind
//!   the `idemlab` binary.
//!
//! Every generator is deterministic per seed, and every tolerance has an
//! explicit default documented where it is defined.

pub mod cli;
pub mod error;
pub mod essential;
pub mod idempotent;
pub mod numkernel;
pub mod pairs;
pub mod spectral;
pub mod subspace;

pub use error::{Error, Result};
pub use idempotent::Idempotent;
pub use numkernel::CMatrix;
pub use subspace::Subspace;
