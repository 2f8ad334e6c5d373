//! Exact scalars: arbitrary-precision rationals or residues modulo a prime.
//!
//! Rational values act as universal constants: combining one with a residue
//! reduces it into that prime field. Combining residues of different moduli
//! is a programming error and panics.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// The ground field a session works over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Rational,
    Prime(u64),
}

impl Field {
    /// Validates `p` as a prime small enough for 128-bit intermediate products.
    pub fn prime(p: u64) -> Result<Self> {
        if p < 2 || p > u32::MAX as u64 || !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not a supported prime modulus")));
        }
        Ok(Field::Prime(p))
    }

    /// Brings a scalar into this field.
    pub fn embed(&self, x: &Scalar) -> Result<Scalar> {
        match (self, x) {
            (Field::Rational, Scalar::Rational(_)) => Ok(x.clone()),
            (Field::Rational, Scalar::Modular { .. }) => {
                Err(Error::InvalidField("residue cannot be lifted to a rational".into()))
            }
            (Field::Prime(p), Scalar::Rational(r)) => reduce(r, *p),
            (Field::Prime(p), Scalar::Modular { modulus, .. }) if modulus == p => Ok(x.clone()),
            (Field::Prime(_), Scalar::Modular { .. }) => {
                Err(Error::InvalidField("residue modulo a different prime".into()))
            }
        }
    }

    /// Parses an exact scalar literal such as `"3/7"` or `"-1"` into this field.
    pub fn parse(&self, s: &str) -> Result<Scalar> {
        let r: Scalar = s.parse()?;
        self.embed(&r)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "rational"),
            Field::Prime(p) => write!(f, "mod-{p}"),
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 4 {
        return p >= 2;
    }
    if p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn reduce(r: &BigRational, p: u64) -> Result<Scalar> {
    let pb = BigInt::from(p);
    let num = r.numer().mod_floor(&pb).to_u64().expect("residue fits");
    let den = r.denom().mod_floor(&pb).to_u64().expect("residue fits");
    if den == 0 {
        return Err(Error::DivisionByZero);
    }
    Ok(Scalar::Modular { value: mul_mod(num, inv_mod(den, p), p), modulus: p })
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let g = (a as i128).extended_gcd(&(p as i128));
    debug_assert_eq!(g.gcd, 1);
    g.x.rem_euclid(p as i128) as u64
}

/// An exact field element.
#[derive(Clone, Debug)]
pub enum Scalar {
    Rational(BigRational),
    Modular { value: u64, modulus: u64 },
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Rational(BigRational::from_integer(n.into()))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Rational(BigRational::new(num.into(), den.into()))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Modular { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Modular { value, .. } => *value == 1,
        }
    }

    /// Multiplicative inverse; zero is rejected.
    pub fn inverse(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            Scalar::Rational(r) => Scalar::Rational(r.recip()),
            Scalar::Modular { value, modulus } => {
                Scalar::Modular { value: inv_mod(*value, *modulus), modulus: *modulus }
            }
        })
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar> {
        Ok(self * &rhs.inverse()?)
    }

    pub fn modulus(&self) -> Option<u64> {
        match self {
            Scalar::Rational(_) => None,
            Scalar::Modular { modulus, .. } => Some(*modulus),
        }
    }

    fn coerce_pair(a: &Scalar, b: &Scalar) -> (Scalar, Scalar) {
        match (a.modulus(), b.modulus()) {
            (Some(p), Some(q)) => {
                assert_eq!(p, q, "scalars from different prime fields");
                (a.clone(), b.clone())
            }
            (Some(p), None) => (a.clone(), Field::Prime(p).embed(b).expect("denominator invertible mod p")),
            (None, Some(p)) => (Field::Prime(p).embed(a).expect("denominator invertible mod p"), b.clone()),
            (None, None) => (a.clone(), b.clone()),
        }
    }

    fn binary(
        &self,
        rhs: &Scalar,
        q: impl Fn(&BigRational, &BigRational) -> BigRational,
        m: impl Fn(u64, u64, u64) -> u64,
    ) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(q(a, b)),
            (Scalar::Modular { value: a, modulus: p }, Scalar::Modular { value: b, modulus: r }) => {
                assert_eq!(p, r, "scalars from different prime fields");
                Scalar::Modular { value: m(*a, *b, *p), modulus: *p }
            }
            _ => {
                let (a, b) = Scalar::coerce_pair(self, rhs);
                a.binary(&b, q, m)
            }
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a == b,
            _ => {
                let (a, b) = Scalar::coerce_pair(self, other);
                match (a, b) {
                    (Scalar::Modular { value: x, .. }, Scalar::Modular { value: y, .. }) => x == y,
                    _ => unreachable!(),
                }
            }
        }
    }
}

impl Eq for Scalar {}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.binary(rhs, |a, b| a + b, |a, b, p| (a + b) % p)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.binary(rhs, |a, b| a - b, |a, b, p| (a + p - b) % p)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.binary(rhs, |a, b| a * b, mul_mod)
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        if let (Scalar::Rational(a), Scalar::Rational(b)) = (&mut *self, rhs) {
            *a += b;
        } else {
            *self = &*self + rhs;
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        if let (Scalar::Rational(a), Scalar::Rational(b)) = (&mut *self, rhs) {
            *a -= b;
        } else {
            *self = &*self - rhs;
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Modular { value, modulus } => Scalar::Modular { value: (modulus - value) % modulus, modulus },
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -self.clone()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Modular { value, .. } => write!(f, "{value}"),
        }
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Parses `"n"` or `"n/d"` with optional leading minus; whitespace is not allowed.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid scalar literal {s:?}"));
        let int = |t: &str| -> Result<BigInt> {
            let digits = t.strip_prefix('-').unwrap_or(t);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            t.parse::<BigInt>().map_err(|_| bad())
        };
        let r = match s.split_once('/') {
            None => BigRational::from_integer(int(s)?),
            Some((n, d)) => {
                let d = int(d)?;
                if d.is_negative() {
                    return Err(bad());
                }
                if d.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                BigRational::new(int(n)?, d)
            }
        };
        Ok(Scalar::Rational(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_roundtrip() {
        for s in ["0", "-1", "3/7", "-22/4"] {
            let x: Scalar = s.parse().unwrap();
            let y: Scalar = x.to_string().parse().unwrap();
            assert_eq!(x, y);
        }
        assert_eq!("-22/4".parse::<Scalar>().unwrap().to_string(), "-11/2");
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("1/-2".parse::<Scalar>().is_err());
        assert!(" 1".parse::<Scalar>().is_err());
        assert!("".parse::<Scalar>().is_err());
        assert!("+3".parse::<Scalar>().is_err());
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::prime(7).unwrap();
        let half = f.parse("1/2").unwrap();
        assert_eq!(&half * &Scalar::from_int(2), Scalar::one());
        assert_eq!(f.parse("-1").unwrap(), Scalar::from_int(6));
        assert!(f.parse("1/7").is_err());
        assert!(Field::prime(8).is_err());
        assert_eq!(half.inverse().unwrap(), Scalar::from_int(2));
    }

    #[test]
    fn division_by_zero_rejected() {
        assert!(Scalar::zero().inverse().is_err());
        assert!(Scalar::one().checked_div(&Scalar::zero()).is_err());
    }
}
