//! Exact computations with ramified irregular connections.
//!
//! The crate is layered bottom-up:
//!
//! * [`scalars`]: cyclotomic fields with Kummer radicals, exact.
//! * [`series`]: truncated series in a ramified coordinate `w^r = z` and
//!   1-forms in the `dw` and `dz` bases.
//! * [`formal`]: truncated formal connections, the pushforward of a rank-1
//!   ramified model, Newton–Puiseux exponent extraction.
//! * [`localdata`]: the generic ramified local data (filtrations, quotient
//!   lines, link maps, exponents) with verification, the kernel of the
//!   Galois-twisted quotient map, and reconstruction of a compatible
//!   connection.
//! * [`global`]: connections on P¹ with parabolic structure, exponent-set
//!   validation, stability, determinant, dimension counts.
//! * [`cohomology`]: the tangent space as Čech hypercohomology and its
//!   symplectic pairing.
//! * [`family`]: the two-parameter degeneration between ramified,
//!   unramified and regular singular fibres.
//! * [`cli`]: the JSON front end used by the `ramified` binary.

#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod cohomology;
pub mod error;
pub mod family;
pub mod formal;
pub mod global;
pub mod linalg;
pub mod localdata;
pub mod poly;
pub mod scalars;
pub mod series;
pub mod smat;

pub use error::{Error, Result};
