use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use super::rational::{parse_fraction, primitive_scale};
use super::{Field, FieldKind};
use crate::error::{Error, Result};

/// `re + im·i` with rational parts; the field `Q(i)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_parts(re: i64, im: i64) -> Self {
        GaussianRational::new(BigRational::from_i64(re), BigRational::from_i64(im))
    }

    pub fn i() -> Self {
        GaussianRational::from_parts(0, 1)
    }

    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}*i", self.re, self.im)
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        GaussianRational::new(BigRational::zero(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        GaussianRational::new(BigRational::one(), BigRational::zero())
    }
}

impl Add for GaussianRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        GaussianRational::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for GaussianRational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        GaussianRational::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Neg for GaussianRational {
    type Output = Self;
    fn neg(self) -> Self {
        GaussianRational::new(-self.re, -self.im)
    }
}

impl Mul for GaussianRational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let re = &self.re * &rhs.re - &self.im * &rhs.im;
        let im = &self.re * &rhs.im + &self.im * &rhs.re;
        GaussianRational::new(re, im)
    }
}

impl Div for GaussianRational {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.try_inv().expect("division by zero in Q(i)")
    }
}

impl Field for GaussianRational {
    fn kind() -> FieldKind {
        FieldKind::Gaussian
    }

    fn from_i64(v: i64) -> Self {
        GaussianRational::from_parts(v, 0)
    }

    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sq();
        Some(GaussianRational::new(&self.re / &n, -(&self.im / &n)))
    }

    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        GaussianRational::from_parts(rng.random_range(-100..=100), rng.random_range(-100..=100))
    }

    /// Accepts `re+im*i`, a bare rational, or `im*i`.
    fn parse_scalar(s: &str) -> Result<Self> {
        let s = s.trim();
        let Some(body) = s.strip_suffix("*i") else {
            return Ok(GaussianRational::new(
                parse_fraction(s)?,
                BigRational::zero(),
            ));
        };
        // the separator is the first '+' after a leading sign
        let split = body
            .char_indices()
            .skip(1)
            .find(|&(_, c)| c == '+')
            .map(|(i, _)| i);
        match split {
            Some(i) => Ok(GaussianRational::new(
                parse_fraction(&body[..i])?,
                parse_fraction(&body[i + 1..])?,
            )),
            None if !body.is_empty() => Ok(GaussianRational::new(
                BigRational::zero(),
                parse_fraction(body)?,
            )),
            None => Err(Error::ParseScalar(s.to_string())),
        }
    }

    fn content_scale(v: &[Self]) -> Self {
        let c = primitive_scale(v.iter().flat_map(|z| [&z.re, &z.im]));
        GaussianRational::new(c, BigRational::zero())
    }

    fn conj(&self) -> Self {
        GaussianRational::new(self.re.clone(), -self.im.clone())
    }
}
