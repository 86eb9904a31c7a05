//! The exploded semiring ℂ⌊e^ℚ⌋: pairs `c⌊e^a⌋` where multiplication adds
//! exponents and addition keeps the term with the smaller exponent.
//!
//! Values are stored exactly and never normalized, so `0⌊e^1⌋` and
//! `0⌊e^2⌋` are different elements.

use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, rat, serde_q, GaussianRational, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExplodedScalar {
    pub coeff: GaussianRational,
    #[serde(with = "serde_q")]
    pub exponent: Rational,
}

impl ExplodedScalar {
    pub fn new(coeff: GaussianRational, exponent: Rational) -> Self {
        Self { coeff, exponent }
    }

    /// `c⌊e^a⌋` with an integer coefficient and exponent.
    pub fn int(c: i64, a: i64) -> Self {
        Self::new(GaussianRational::from_int(c), rat(a))
    }

    pub fn real(c: Rational, a: Rational) -> Self {
        Self::new(GaussianRational::real(c), a)
    }

    /// `1⌊e^0⌋`.
    pub fn one() -> Self {
        Self::int(1, 0)
    }

    /// `⌊e^a⌋`, i.e. coefficient one.
    pub fn tropical(a: Rational) -> Self {
        Self::new(GaussianRational::one(), a)
    }

    pub fn is_unit(&self) -> bool {
        !self.coeff.is_zero()
    }

    pub fn inv(&self) -> Result<Self> {
        let c = self
            .coeff
            .inv()
            .ok_or_else(|| Error::NotInvertible(self.to_string()))?;
        Ok(Self::new(c, -self.exponent.clone()))
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        let c = self
            .coeff
            .pow(k)
            .ok_or_else(|| Error::NotInvertible(self.to_string()))?;
        Ok(Self::new(c, &self.exponent * rat(k)))
    }

    /// `⌊c⌊e^a⌋⌋ = a`.
    pub fn tropical_part(&self) -> Rational {
        self.exponent.clone()
    }

    /// `⌈c⌊e^a⌋⌉`: `c` when `a = 0`, `0` when `a > 0`, undefined below zero.
    pub fn smooth_part(&self) -> Result<GaussianRational> {
        if self.exponent.is_negative() {
            return Err(Error::NegativeExponent(format_rational(&self.exponent)));
        }
        if self.exponent.is_zero() {
            Ok(self.coeff.clone())
        } else {
            Ok(GaussianRational::zero())
        }
    }
}

impl<'a> Mul<&'a ExplodedScalar> for &'a ExplodedScalar {
    type Output = ExplodedScalar;
    fn mul(self, o: &ExplodedScalar) -> ExplodedScalar {
        ExplodedScalar::new(&self.coeff * &o.coeff, &self.exponent + &o.exponent)
    }
}

impl Mul for ExplodedScalar {
    type Output = ExplodedScalar;
    fn mul(self, o: ExplodedScalar) -> ExplodedScalar {
        &self * &o
    }
}

impl<'a> Add<&'a ExplodedScalar> for &'a ExplodedScalar {
    type Output = ExplodedScalar;
    fn add(self, o: &ExplodedScalar) -> ExplodedScalar {
        match self.exponent.cmp(&o.exponent) {
            std::cmp::Ordering::Less => self.clone(),
            std::cmp::Ordering::Greater => o.clone(),
            std::cmp::Ordering::Equal => {
                ExplodedScalar::new(&self.coeff + &o.coeff, self.exponent.clone())
            }
        }
    }
}

impl Add for ExplodedScalar {
    type Output = ExplodedScalar;
    fn add(self, o: ExplodedScalar) -> ExplodedScalar {
        &self + &o
    }
}

/// Text form `re im e a`, e.g. `1/2 0/1 e -3/1`.
impl fmt::Display for ExplodedScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} e {}", self.coeff, format_rational(&self.exponent))
    }
}

impl FromStr for ExplodedScalar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let toks: Vec<&str> = s.split_whitespace().collect();
        match toks.as_slice() {
            [re, im, "e", a] => Ok(Self::new(
                GaussianRational::new(parse_rational(re)?, parse_rational(im)?),
                parse_rational(a)?,
            )),
            _ => Err(Error::Parse(format!("expected `re im e a`, got {s:?}"))),
        }
    }
}
