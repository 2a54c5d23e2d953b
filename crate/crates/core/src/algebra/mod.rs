//! Exact arithmetic over prime fields and their polynomial rings.

mod field;
mod interpolate;
mod poly;

pub use field::{field_inverse, FieldElement, PrimeField};
pub use interpolate::interpolate;
pub use poly::{poly_divmod, poly_eval, poly_gcd_monic, Poly};
