use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use super::{Field, FieldKind};
use crate::error::{Error, Result};

/// Arbitrary-precision rationals, always stored in lowest terms.
pub type Rational = BigRational;

impl Field for BigRational {
    fn kind() -> FieldKind {
        FieldKind::Rational
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::from_i64(rng.random_range(-100..=100))
    }

    fn parse_scalar(s: &str) -> Result<Self> {
        parse_fraction(s.trim())
    }

    fn content_scale(v: &[Self]) -> Self {
        primitive_scale(v.iter())
    }
}

/// `lcm(denominators) / gcd(scaled numerators)` over the nonzero entries.
pub(crate) fn primitive_scale<'a>(v: impl Iterator<Item = &'a BigRational> + Clone) -> BigRational {
    let nonzero = v.filter(|x| !x.is_zero());
    let lcm = nonzero
        .clone()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let gcd = nonzero.fold(BigInt::zero(), |acc, x| {
        acc.gcd(&(x.numer() * (&lcm / x.denom())))
    });
    if gcd.is_zero() {
        BigRational::one()
    } else {
        BigRational::new(lcm, gcd)
    }
}

pub(crate) fn parse_fraction(s: &str) -> Result<BigRational> {
    let bad = || Error::ParseScalar(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num.trim().parse().map_err(|_| bad())?;
    let den: BigInt = den.trim().parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    // canonical form carries the sign on the numerator
    let r = BigRational::new(num, den);
    debug_assert!(!r.denom().is_negative());
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn content_scale_makes_primitive_integers() {
        let v: Vec<Rational> = ["3/4", "-9/2", "0", "15/8"]
            .iter()
            .map(|s| Rational::parse_scalar(s).unwrap())
            .collect();
        let c = Rational::content_scale(&v);
        let scaled: Vec<String> = v.iter().map(|x| (x * &c).to_string()).collect();
        assert_eq!(scaled, ["2", "-12", "0", "5"]);
        assert_eq!(
            Rational::content_scale(&[Rational::zero()]),
            Rational::one()
        );
    }

    #[test]
    fn parse_and_reduce() {
        let r = Rational::parse_scalar("6/-4").unwrap();
        assert_eq!(r.to_string(), "-3/2");
        assert_eq!(Rational::parse_scalar("7").unwrap(), Rational::from_i64(7));
        assert!(Rational::parse_scalar("1/0").is_err());
        assert!(Rational::parse_scalar("x").is_err());
    }

    #[test]
    fn canonical_representation_unique() {
        let a = Rational::parse_scalar("2/4").unwrap();
        let b = Rational::parse_scalar("-3/-6").unwrap();
        assert_eq!(a.to_string(), b.to_string());
    }
}
