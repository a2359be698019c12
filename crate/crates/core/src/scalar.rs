//! Exact scalars. Every coefficient in the crate is a `BigRational`; floating
//! point never enters a computation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

/// `(-1)^k` as a scalar.
pub fn sign(k: i64) -> Scalar {
    if k.rem_euclid(2) == 0 {
        one()
    } else {
        -one()
    }
}

/// Parses `"p/q"` or `"p"`.
pub fn parse(s: &str) -> Result<Scalar> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Formats as `"p"` for integers and `"p/q"` otherwise.
pub fn format(x: &Scalar) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn abs_le(x: &Scalar, bound: i64) -> bool {
    x.abs() <= int(bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse("3").unwrap(), int(3));
        assert_eq!(parse("-2/4").unwrap(), BigRational::new((-1).into(), 2.into()));
        assert_eq!(format(&parse("6/4").unwrap()), "3/2");
        assert_eq!(format(&int(-5)), "-5");
        assert!(parse("1/0").is_err());
        assert!(parse("0.5").is_err());
    }

    #[test]
    fn signs() {
        assert_eq!(sign(0), one());
        assert_eq!(sign(3), -one());
        assert_eq!(sign(-1), -one());
    }
}
