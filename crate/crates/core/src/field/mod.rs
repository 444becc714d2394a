//! Exact scalar fields.
//!
//! Every algebraic routine in the crate is generic over [`Field`]. Three
//! families are provided: prime fields [`Fp`] with a compile-time modulus,
//! the rationals ([`Rational`], an arbitrary-precision reduced fraction) and
//! the Gaussian rationals [`GaussianRational`], which carry the complex
//! conjugation needed for real structures.
//!
//! Mixing kinds in one computation is ruled out by the type system; the
//! runtime [`FieldKind`] tag only matters at serialization boundaries.

mod gaussian;
mod prime;
mod rational;

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use gaussian::GaussianRational;
pub use prime::Fp;
pub use rational::Rational;

/// Runtime description of a field, as written in JSON files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldKind {
    Prime { p: u64 },
    Rational,
    Gaussian,
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::Prime { p } => write!(f, "prime:{p}"),
            FieldKind::Rational => f.write_str("rational"),
            FieldKind::Gaussian => f.write_str("gaussian"),
        }
    }
}

impl std::str::FromStr for FieldKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" => Ok(FieldKind::Rational),
            "gaussian" => Ok(FieldKind::Gaussian),
            _ => {
                let p = s
                    .strip_prefix("prime:")
                    .and_then(|p| p.parse::<u64>().ok())
                    .ok_or_else(|| Error::InvalidInput(format!("unknown field spec {s:?}")))?;
                if p < 3 || !is_prime(p) {
                    return Err(Error::InvalidInput(format!("{p} is not a prime >= 3")));
                }
                Ok(FieldKind::Prime { p })
            }
        }
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// An exact commutative field.
pub trait Field:
    Clone
    + PartialEq
    + Eq
    + Hash
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn kind() -> FieldKind;

    fn from_i64(v: i64) -> Self;

    /// Multiplicative inverse, `None` for zero.
    fn try_inv(&self) -> Option<Self>;

    /// A random element used for generic-position arguments: uniform over a
    /// prime field, a small-height integer in characteristic zero.
    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Parse the canonical string encoding (also accepts `a/b` in prime fields).
    fn parse_scalar(s: &str) -> Result<Self>;

    /// A nonzero `c` such that `c·v` has small coefficients. In characteristic
    /// zero this clears denominators and the common integer content; prime
    /// fields have nothing to gain and return one.
    fn content_scale(v: &[Self]) -> Self {
        let _ = v;
        Self::one()
    }

    /// Complex conjugation; the identity on fields without one.
    fn conj(&self) -> Self {
        self.clone()
    }

    /// Lift an element of `self`'s canonical encoding into another field.
    fn lift<G: Field>(&self) -> Result<G> {
        G::parse_scalar(&self.to_string())
    }
}

/// Check that a serialized field tag matches the type a file is read into.
pub fn expect_kind<F: Field>(found: FieldKind) -> Result<()> {
    if F::kind() == found {
        Ok(())
    } else {
        Err(Error::FieldMismatch {
            expected: F::kind().to_string(),
            found: found.to_string(),
        })
    }
}
