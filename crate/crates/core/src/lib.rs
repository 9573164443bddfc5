//! Exact analysis of matrix presentations of modules over aggregates, with
//! synthesis of multiplicative bases and obstruction certificates.

pub mod basis;
pub mod certificate;
pub mod classify;
pub mod gamma;
pub mod lattice;
pub mod linalg;
pub mod monomial;
pub mod poset;
pub mod pipeline;
pub mod presentation;
pub mod rescale;
pub mod scalar;
pub mod triangular;
pub mod verify;
pub mod witness;

pub use linalg::{Matrix, Subspace};
pub use monomial::{Exponent, Generator, RadMonomial, Scale};
pub use scalar::{ExactScalar, Field};
