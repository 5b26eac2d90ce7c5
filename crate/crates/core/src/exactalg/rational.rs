use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational in lowest terms with positive denominator.
pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Canonical text form `p/q`, used for every exact number that leaves the
/// library. Integers keep their denominator (`3/1`).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::validation("rational", format!("cannot parse {text:?}"));
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::validation("rational", format!("zero denominator in {text:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Exact square root, when the argument is the square of a rational.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (r.numer().sqrt(), r.denom().sqrt());
    let root = Rational::new(n, d);
    (&root * &root == *r).then_some(root)
}

/// A rational number `a` in `[0, 1)`.
///
/// The stored value stands for the root of unity `exp(-2πi·a)` (lower
/// convention). The upper reading `exp(2πi·u)` of the same root of unity is
/// obtained with [`RotationNumber::conjugate`], since `u = (1 - a) mod 1`.
/// For matrices with rational characteristic polynomial the multisets are
/// closed under this map, so both readings agree there.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RotationNumber(Rational);

impl RotationNumber {
    pub fn new(value: Rational) -> Result<Self> {
        if value.is_negative() || value >= Rational::one() {
            return Err(Error::validation(
                "rotation number",
                format!("{} is outside [0, 1)", format_rational(&value)),
            ));
        }
        Ok(RotationNumber(value))
    }

    /// Reduces an arbitrary rational modulo 1.
    pub fn reduce(value: Rational) -> Self {
        let fl = value.floor();
        RotationNumber(value - fl)
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        Self::reduce(rat(numer, denom))
    }

    pub fn zero() -> Self {
        RotationNumber(Rational::zero())
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// `(1 - a) mod 1`: the same root of unity read with the opposite sign.
    pub fn conjugate(&self) -> Self {
        Self::reduce(-self.0.clone())
    }

    /// Denominator of the reduced fraction, i.e. the order of the root of unity.
    pub fn order(&self) -> BigInt {
        self.0.denom().clone()
    }
}

impl fmt::Display for RotationNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_keeps_denominator() {
        assert_eq!(format_rational(&int(3)), "3/1");
        assert_eq!(format_rational(&rat(-2, 4)), "-1/2");
    }

    #[test]
    fn parse_accepts_both_forms() {
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn square_roots() {
        assert_eq!(rational_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(rational_sqrt(&int(0)), Some(int(0)));
        assert_eq!(rational_sqrt(&rat(2, 1)), None);
        assert_eq!(rational_sqrt(&int(-4)), None);
    }

    #[test]
    fn rotation_reduction() {
        assert_eq!(RotationNumber::from_ratio(5, 4).value(), &rat(1, 4));
        assert_eq!(RotationNumber::from_ratio(-1, 4).value(), &rat(3, 4));
        assert!(RotationNumber::new(int(1)).is_err());
        assert_eq!(RotationNumber::from_ratio(1, 3).conjugate().value(), &rat(2, 3));
        assert!(RotationNumber::zero().conjugate().is_zero());
    }
}
