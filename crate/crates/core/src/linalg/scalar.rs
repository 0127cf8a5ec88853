//! Scalars: exact rationals or 64-bit floats, never mixed.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::LinalgError;

/// Arithmetic mode shared by every entry of a matrix, vector or tensor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Float => f.write_str("float"),
        }
    }
}

/// A single entry. `BigRational` keeps itself in lowest terms with a
/// positive denominator.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn int(v: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn float(v: f64) -> Self {
        Scalar::Float(v)
    }

    pub fn zero(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::zero()),
            Mode::Float => Scalar::Float(0.0),
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => rational_to_f64(q),
            Scalar::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Float(_) => None,
        }
    }

    fn binary(
        &self,
        other: &Scalar,
        fq: impl FnOnce(&BigRational, &BigRational) -> BigRational,
        ff: impl FnOnce(f64, f64) -> f64,
    ) -> Result<Scalar, LinalgError> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(fq(a, b))),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(ff(*a, *b))),
            _ => Err(LinalgError::MixedMode),
        }
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar, LinalgError> {
        self.binary(other, |a, b| a + b, |a, b| a + b)
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar, LinalgError> {
        self.binary(other, |a, b| a - b, |a, b| a - b)
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar, LinalgError> {
        self.binary(other, |a, b| a * b, |a, b| a * b)
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar, LinalgError> {
        if other.is_zero() {
            return Err(LinalgError::DivisionByZero);
        }
        self.binary(other, |a, b| a / b, |a, b| a / b)
    }
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // huge numerator or denominator: shift both down before dividing
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift_n = (nb - 60).max(0) as usize;
    let shift_d = (db - 60).max(0) as usize;
    let n = (q.numer().abs() >> shift_n).to_f64().unwrap_or(0.0);
    let d = (q.denom() >> shift_d).to_f64().unwrap_or(1.0);
    let mag = n / d * 2f64.powi((shift_n as i64 - shift_d as i64) as i32);
    if q.is_negative() {
        -mag
    } else {
        mag
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Scalar::Float(x) => write_float(f, *x),
        }
    }
}

/// Floats always carry a decimal point so that they re-parse as floats.
fn write_float(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    let s = format!("{x:?}");
    f.write_str(&s)
}

impl FromStr for Scalar {
    type Err = LinalgError;

    /// Integers and `p/q` parse as exact rationals; anything with a decimal
    /// point or exponent parses as a float.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || LinalgError::BadLiteral(t.to_string());
        if t.is_empty() {
            return Err(bad());
        }
        if let Some((n, d)) = t.split_once('/') {
            let n: BigInt = parse_int(n).ok_or_else(bad)?;
            let d: BigInt = parse_int(d).ok_or_else(bad)?;
            if d.is_zero() {
                return Err(LinalgError::DivisionByZero);
            }
            return Ok(Scalar::Exact(BigRational::new(n, d)));
        }
        if let Some(n) = parse_int(t) {
            return Ok(Scalar::Exact(BigRational::from_integer(n)));
        }
        if t.chars().all(|c| c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E')) {
            let v: f64 = t.parse().map_err(|_| bad())?;
            if v.is_finite() {
                return Ok(Scalar::Float(v));
            }
        }
        Err(bad())
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let s = s.trim();
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    s.trim_start_matches('+').parse().ok()
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(_) => ser.serialize_str(&self.to_string()),
            Scalar::Float(x) => ser.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
        }
        match Raw::deserialize(de)? {
            Raw::Text(s) => match s.parse::<Scalar>() {
                Ok(v @ Scalar::Exact(_)) => Ok(v),
                _ => Err(serde::de::Error::custom(format!("not an exact rational: {s}"))),
            },
            Raw::Number(x) => Ok(Scalar::Float(x)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_literals() {
        assert_eq!("3".parse::<Scalar>().unwrap(), Scalar::int(3));
        assert_eq!("-6/4".parse::<Scalar>().unwrap(), Scalar::ratio(-3, 2));
        assert_eq!("+2/-4".parse::<Scalar>().unwrap(), Scalar::ratio(-1, 2));
        assert_eq!("0.5".parse::<Scalar>().unwrap(), Scalar::float(0.5));
        assert_eq!("1e3".parse::<Scalar>().unwrap(), Scalar::float(1000.0));
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("abc".parse::<Scalar>().is_err());
        assert!("inf".parse::<Scalar>().is_err());
    }

    #[test]
    fn display_round_trip() {
        for s in ["0", "-7", "22/7", "-1/3", "0.5", "-2.0", "1e-7"] {
            let v: Scalar = s.parse().unwrap();
            let back: Scalar = v.to_string().parse().unwrap();
            assert_eq!(v, back);
        }
    }

    #[test]
    fn mixing_modes_is_an_error() {
        assert_eq!(Scalar::int(1).add(&Scalar::float(1.0)), Err(LinalgError::MixedMode));
        assert_eq!(Scalar::int(1).add(&Scalar::ratio(1, 2)).unwrap(), Scalar::ratio(3, 2));
    }

    #[test]
    fn huge_rational_to_float() {
        let big = BigInt::from(3) * BigInt::from(10).pow(400);
        let q = BigRational::new(big.clone(), big * BigInt::from(4));
        assert!((rational_to_f64(&q) - 0.25).abs() < 1e-12);
    }
}
