//! Exact similarity invariants, brute-force orbit search and containment
//! falsification for matrix problems over prime fields.
//!
//! The crate is layered bottom-up:
//!
//! - [`algebra`]: the prime field `F_p`, `F_p[x]`, divided-difference interpolation.
//! - [`matrix`]: dense matrices, elimination kernels, enumeration of `M_n` and `GL_n`.
//! - [`invariants`]: rank, determinant, characteristic polynomial, roots in
//!   `F_p`, invariant factors via Smith normal form, rational canonical form.
//! - [`equivalence`]: finite equivalence problems, similarity deciders, orbit
//!   tables, invariant verification and step-budgeted reductions.
//! - [`wildness`]: non-commutative polynomial transforms, the pair-to-single
//!   containment falsifier, and the transducer-to-polynomial compiler.
//! - [`cli`]: text file formats and the `tamewild` command implementations.

pub mod algebra;
pub mod cli;
pub mod equivalence;
pub mod error;
pub mod invariants;
pub mod matrix;
pub mod wildness;

pub use error::{Error, Result};
