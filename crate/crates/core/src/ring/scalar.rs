//! Exact coefficient rings. Scalars are arbitrary-precision rationals kept in the
//! canonical form of their ring: integers for `ℤ`, residues in `[0, n)` for `ℤ/n`
//! and `𝔽_p`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Scalar = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RingSpec {
    Integers,
    Rationals,
    IntegersMod(u64),
    PrimeField(u64),
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn int(x: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(x))
}

impl RingSpec {
    pub fn integers_mod(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::MalformedRing(format!("Z/{n}")));
        }
        Ok(RingSpec::IntegersMod(n))
    }

    pub fn prime_field(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::MalformedRing(format!("F{p}: not prime")));
        }
        Ok(RingSpec::PrimeField(p))
    }

    pub fn is_field(&self) -> bool {
        matches!(self, RingSpec::Rationals | RingSpec::PrimeField(_))
    }

    /// Characteristic modulus for residue rings.
    pub fn modulus(&self) -> Option<u64> {
        match self {
            RingSpec::IntegersMod(n) | RingSpec::PrimeField(n) => Some(*n),
            _ => None,
        }
    }

    pub fn zero(&self) -> Scalar {
        Scalar::zero()
    }

    pub fn one(&self) -> Scalar {
        Scalar::one()
    }

    pub fn from_int(&self, x: i64) -> Scalar {
        self.normalize(int(x))
    }

    pub fn from_bigint(&self, x: BigInt) -> Scalar {
        self.normalize(BigRational::from_integer(x))
    }

    /// Brings a value into canonical form. Fractions in residue rings are resolved
    /// through the inverse of the denominator, which must exist.
    pub fn normalize(&self, x: Scalar) -> Scalar {
        match self {
            RingSpec::Rationals => x,
            RingSpec::Integers => {
                debug_assert!(x.is_integer(), "non-integer scalar over Z");
                x
            }
            RingSpec::IntegersMod(n) | RingSpec::PrimeField(n) => {
                let n = BigInt::from(*n);
                let num = x.numer().mod_floor(&n);
                if x.denom().is_one() {
                    return BigRational::from_integer(num);
                }
                let den = x.denom().mod_floor(&n);
                let inv = mod_inverse(&den, &n).expect("denominator invertible modulo n");
                BigRational::from_integer((num * inv).mod_floor(&n))
            }
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.normalize(a + b)
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.normalize(a - b)
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.normalize(a * b)
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        self.normalize(-a)
    }

    pub fn is_unit(&self, a: &Scalar) -> bool {
        match self {
            RingSpec::Rationals | RingSpec::PrimeField(_) => !a.is_zero(),
            RingSpec::Integers => a.numer().abs().is_one(),
            RingSpec::IntegersMod(n) => a.numer().gcd(&BigInt::from(*n)).is_one(),
        }
    }

    pub fn inverse(&self, a: &Scalar) -> Option<Scalar> {
        if !self.is_unit(a) {
            return None;
        }
        match self {
            RingSpec::Rationals => Some(a.recip()),
            RingSpec::Integers => Some(a.clone()),
            RingSpec::IntegersMod(n) | RingSpec::PrimeField(n) => {
                mod_inverse(a.numer(), &BigInt::from(*n)).map(BigRational::from_integer)
            }
        }
    }

    /// Parses `"17"`, `"-3"` or `"a/b"` into a canonical scalar of this ring.
    pub fn parse_scalar(&self, s: &str) -> Result<Scalar> {
        let bad = || Error::MalformedScalar(s.to_string());
        let t = s.trim();
        let value = if let Some((a, b)) = t.split_once('/') {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(bad());
            }
            BigRational::new(a, b)
        } else {
            BigRational::from_integer(t.parse::<BigInt>().map_err(|_| bad())?)
        };
        match self {
            RingSpec::Integers if !value.is_integer() => Err(bad()),
            RingSpec::IntegersMod(n) | RingSpec::PrimeField(n)
                if !value.is_integer() && !value.denom().gcd(&BigInt::from(*n)).is_one() =>
            {
                Err(bad())
            }
            _ => Ok(self.normalize(value)),
        }
    }

    /// Decimal integer or `a/b`.
    pub fn format_scalar(&self, a: &Scalar) -> String {
        format_scalar(a)
    }
}

pub fn format_scalar(a: &Scalar) -> String {
    if a.is_integer() {
        a.numer().to_string()
    } else {
        format!("{}/{}", a.numer(), a.denom())
    }
}

/// Inverse of `a` modulo `n`, if it exists.
pub fn mod_inverse(a: &BigInt, n: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(n).extended_gcd(n);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(n))
    } else {
        None
    }
}

/// Exact conversion of an integral scalar to `BigInt`.
pub fn to_bigint(a: &Scalar) -> BigInt {
    debug_assert!(a.is_integer());
    a.numer().clone()
}

pub fn to_i64(a: &Scalar) -> Option<i64> {
    if a.is_integer() {
        a.numer().to_i64()
    } else {
        None
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::Integers => write!(f, "Z"),
            RingSpec::Rationals => write!(f, "Q"),
            RingSpec::IntegersMod(n) => write!(f, "Z/{n}"),
            RingSpec::PrimeField(p) => write!(f, "F{p}"),
        }
    }
}

impl FromStr for RingSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::MalformedRing(s.to_string());
        match t.as_str() {
            "Z" => return Ok(RingSpec::Integers),
            "Q" => return Ok(RingSpec::Rationals),
            _ => {}
        }
        if let Some(n) = t.strip_prefix("Z/").or_else(|| t.strip_prefix("Z_")) {
            return RingSpec::integers_mod(n.parse().map_err(|_| bad())?);
        }
        if let Some(p) = t.strip_prefix("GF(").and_then(|r| r.strip_suffix(')')) {
            return RingSpec::prime_field(p.parse().map_err(|_| bad())?);
        }
        if let Some(p) = t.strip_prefix('F') {
            return RingSpec::prime_field(p.parse().map_err(|_| bad())?);
        }
        Err(bad())
    }
}

impl Serialize for RingSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RingSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residues() {
        let r = RingSpec::integers_mod(4).unwrap();
        assert_eq!(r.from_int(-1), int(3));
        assert!(r.is_unit(&int(3)));
        assert!(!r.is_unit(&int(2)));
        assert_eq!(r.parse_scalar("1/3").unwrap(), int(3));
        assert!(r.parse_scalar("1/2").is_err());
    }

    #[test]
    fn parse_names() {
        for s in ["Z", "Q", "Z/4", "F5"] {
            assert_eq!(s.parse::<RingSpec>().unwrap().to_string(), s);
        }
        assert!("F4".parse::<RingSpec>().is_err());
        assert!("Z/1".parse::<RingSpec>().is_err());
    }
}
