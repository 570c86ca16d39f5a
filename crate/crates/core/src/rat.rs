//! Exact rational scalars.
//!
//! Every hyperplane coefficient, offset and derived quantity is a
//! [`Rat`]: an arbitrary-precision fraction kept in lowest terms. On the
//! wire a rational is a decimal string `"p/q"` or `"p"`; anything else
//! (decimal points, exponents, whitespace) is rejected.
//!
//! Irrational thresholds such as `n^(-0.196)` are replaced by rational
//! bounds on the safe side of the inequality they guard, see
//! [`pow_lower`] and [`pow_upper`].

use num::bigint::Sign;
use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// Relative slack applied when turning an `f64` power into a one-sided bound.
const POW_SLACK: f64 = 1.0 / (1u64 << 40) as f64;

pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rat {
    Rat::from_integer(BigInt::from(p))
}

/// Parses `"p/q"` or `"p"` with decimal integers; `q` must be non-zero.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let bad = || Error::BadRational(s.to_string());
    let is_int = |t: &str| {
        let digits = t.strip_prefix('-').unwrap_or(t);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p, q),
        None => (s, "1"),
    };
    if !is_int(num) || !den.bytes().all(|b| b.is_ascii_digit()) || den.is_empty() {
        return Err(bad());
    }
    let p: BigInt = num.parse().map_err(|_| bad())?;
    let q: BigInt = den.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(p, q))
}

pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// The exact rational value of a finite `f64`.
pub fn from_f64(x: f64) -> Result<Rat> {
    Rat::from_float(x).ok_or_else(|| Error::InvalidInput(format!("non-finite value {x}")))
}

/// A rational `r` with `r <= n^e`, within a relative error of about 2^-40.
pub fn pow_lower(n: f64, e: f64) -> Rat {
    let v = n.powf(e) * (1.0 - POW_SLACK);
    Rat::from_float(v).expect("finite power")
}

/// A rational `r` with `r >= n^e`, within a relative error of about 2^-40.
pub fn pow_upper(n: f64, e: f64) -> Rat {
    let v = n.powf(e) * (1.0 + POW_SLACK);
    Rat::from_float(v).expect("finite power")
}

/// `floor(n^e)` for integer-count thresholds such as column sparsity.
///
/// Values within 1e-9 of an integer are snapped to it, so `256^0.25`
/// counts as exactly 4.
pub fn pow_floor(n: f64, e: f64) -> u64 {
    let v = n.powf(e);
    let r = v.round();
    if (v - r).abs() < 1e-9 {
        r as u64
    } else {
        v.floor() as u64
    }
}

/// A rational `phi >= 1/sqrt(r)` with `phi^2 * r - 1 < 2^-(bits-2)` for
/// moderate `r`. Panics if `r <= 0`.
pub fn inv_sqrt_upper(r: &Rat, bits: u32) -> Rat {
    assert!(r.is_positive(), "inv_sqrt_upper needs a positive argument");
    let q = BigInt::one() << bits;
    // phi * q ~ sqrt(den * q^2 / num)
    let x = (r.denom() * &q * &q).div_floor(r.numer());
    let root = x.sqrt() + BigInt::one();
    Rat::new(root, q)
}

/// A rational `s >= sqrt(r)` for `r >= 0`.
pub fn sqrt_upper(r: &Rat, bits: u32) -> Rat {
    assert!(!r.is_negative(), "sqrt_upper needs a non-negative argument");
    if r.is_zero() {
        return Rat::zero();
    }
    let q = BigInt::one() << bits;
    let x = (r.numer() * &q * &q).div_ceil(r.denom());
    let mut root = x.sqrt();
    if &root * &root < x {
        root += 1;
    }
    Rat::new(root, q)
}

pub fn sign_of(r: &Rat) -> i8 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Least common multiple of the denominators; scales a rational vector to integers.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[Rat]) -> Rat {
    a.iter().map(|x| x * x).sum()
}

pub mod serde_rat {
    //! `#[serde(with = ...)]` adaptors that read and write rationals as `"p/q"` strings.
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    use super::{format_rat, parse_rat, Rat};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(D::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&format_rat(r))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
            let raw = Vec::<String>::deserialize(d)?;
            raw.iter()
                .map(|s| parse_rat(s).map_err(D::Error::custom))
                .collect()
        }
    }

    pub mod matrix {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(m: &[Vec<Rat>], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(m.len()))?;
            for row in m {
                let row: Vec<String> = row.iter().map(format_rat).collect();
                seq.serialize_element(&row)?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rat>>, D::Error> {
            let raw = Vec::<Vec<String>>::deserialize(d)?;
            raw.iter()
                .map(|row| {
                    row.iter()
                        .map(|s| parse_rat(s).map_err(D::Error::custom))
                        .collect()
                })
                .collect()
        }
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(r: &Option<Rat>, s: S) -> Result<S::Ok, S::Error> {
            match r {
                Some(r) => s.serialize_some(&format_rat(r)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rat>, D::Error> {
            let raw = Option::<String>::deserialize(d)?;
            raw.map(|s| parse_rat(&s).map_err(D::Error::custom))
                .transpose()
        }
    }
}
