//! Exact symbolic engine for differential calculi on q-deformed algebras.
//!
//! The engine computes in the field of rational functions of the
//! deformation parameter (or with the parameter specialized at a rational
//! number), rewrites noncommutative words to a PBW normal form, builds
//! differential graded algebras over the presented algebras, extends
//! algebra maps to the forms, and runs the fibration machinery: quotient
//! complexes, comparison maps, twisted cohomology of flat connections and
//! the filtration spectral sequence, all verified by exact linear algebra.

pub mod error;
pub mod scalar;
pub mod qfield;
pub mod linalg;
pub mod ncpoly;
pub mod calculus;
pub mod homomorph;

pub use error::{Error, Result};
pub use qfield::{parse_ratfunc, q_integer, QIntBase, RatFunc};
pub use scalar::{Scalar, ScalarMode};

/// Symbolic scalars: rational functions of q.
pub type Sym = RatFunc;
/// Specialized scalars: exact rationals, with q fixed at a rational point.
pub type Num = num_rational::BigRational;
