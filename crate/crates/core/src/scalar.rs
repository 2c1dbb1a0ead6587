//! The scalar abstraction the whole engine is generic over.
//!
//! Every computation runs over an exact field: either `RatFunc` (rational
//! functions of the deformation parameter, the symbolic mode) or
//! `BigRational` (the parameter specialized at a rational number).  The
//! [`Scalar`] trait is the small field interface both satisfy.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

pub trait Scalar:
    Clone
    + PartialEq
    + Eq
    + Debug
    + Display
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Multiplicative inverse.  Panics on zero; callers guard.
    fn inv(&self) -> Self;

    fn from_int(n: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) * Self::from_int(den).inv()
    }

    fn div_by(&self, other: &Self) -> Self {
        self.clone() * other.inv()
    }

    /// Integer power, negative exponents through the inverse.
    fn pow_i(&self, k: i64) -> Self {
        let base = if k < 0 { self.inv() } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..k.unsigned_abs() {
            acc = acc * base.clone();
        }
        acc
    }
}

impl Scalar for BigRational {
    fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero rational");
        self.recip()
    }

    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
}

/// How the deformation parameter is interpreted in a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScalarMode {
    Symbolic,
    Specialized(BigRational),
}

impl ScalarMode {
    /// Specialized mode refuses 0, 1 and -1: those hit root-of-unity
    /// degeneracies the engine assumes away.
    pub fn specialized(r: BigRational) -> Result<Self> {
        let one = BigRational::one();
        if r.is_zero() || r == one || r == -one {
            return Err(Error::BadSpecialization(r.to_string()));
        }
        Ok(ScalarMode::Specialized(r))
    }

    pub fn describe(&self) -> String {
        match self {
            ScalarMode::Symbolic => "symbolic".to_string(),
            ScalarMode::Specialized(r) => format!("q={r}"),
        }
    }
}

impl Display for ScalarMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.describe())
    }
}
