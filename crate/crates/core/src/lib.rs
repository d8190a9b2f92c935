//! Exact modular data: cyclotomic arithmetic, fusion rings, modular
//! invariants and NIM-reps.

pub mod constructors;
pub mod cyclotomic;
pub mod fusion_ring;
pub mod invariants;
pub mod linalg;
pub mod modp;
pub mod modular_data;
pub mod nimreps;
pub mod poly;
pub mod scalar;

pub use cyclotomic::{Cyclo, RealSign};
pub use linalg::{CycloMatrix, IntMatrix, Matrix, RatMatrix};

/// Exact rationals.
pub type Rational = num_rational::BigRational;
/// Cyclotomic numbers under the name used throughout the docs.
pub type CycloNumber = Cyclo;
