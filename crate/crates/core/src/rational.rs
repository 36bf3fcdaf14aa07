//! Exact rational scalars and vectors, with the string encoding used in
//! every JSON input and output (`"p/q"`, or `"p"` for integers).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Column vector of rationals.
pub type QVector = Vec<Rational>;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int_vec(v: &[i64]) -> QVector {
    v.iter().map(|&x| rat(x)).collect()
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"-0.125"`, exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::parse(s, "empty rational"));
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n
            .trim()
            .parse()
            .map_err(|_| Error::parse(s, "bad numerator"))?;
        let d: BigInt = d
            .trim()
            .parse()
            .map_err(|_| Error::parse(s, "bad denominator"))?;
        if d.is_zero() {
            return Err(Error::parse(s, "zero denominator"));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        let neg = ip.starts_with('-');
        let ip = ip.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if ip.is_empty() { "0" } else { ip }, fp);
        let mut n: BigInt = digits
            .parse()
            .map_err(|_| Error::parse(s, "bad decimal"))?;
        if neg {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), fp.len());
        return Ok(Rational::new(n, d));
    }
    let n: BigInt = t.parse().map_err(|_| Error::parse(s, "bad integer"))?;
    Ok(Rational::from_integer(n))
}

pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Extreme magnitudes: fall back to a scaled quotient.
        let n = q.numer().bits() as i64;
        let d = q.denom().bits() as i64;
        let shift = n - d;
        let scaled = if shift > 0 {
            q / Rational::from_integer(BigInt::one() << (shift as usize))
        } else {
            q * Rational::from_integer(BigInt::one() << ((-shift) as usize))
        };
        scaled.to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32)
    })
}

/// Exact rational for a finite `f64` (every finite double is dyadic).
pub fn from_f64_exact(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

/// Best rational approximation with denominator at most `max_den`, by
/// continued-fraction convergents and semiconvergents.
pub fn rationalize(x: f64, max_den: u64) -> Rational {
    if !x.is_finite() {
        return Rational::zero();
    }
    let neg = x < 0.0;
    let target = from_f64_exact(x.abs());
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let mut rem = target.clone();
    let cap = BigInt::from(max_den);
    let mut best = Rational::from_integer(target.to_integer());
    for _ in 0..64 {
        let a = rem.floor().to_integer();
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        if q2 > cap {
            // semiconvergent with the largest admissible partial quotient
            let k = (&cap - &q0) / &q1;
            if k > BigInt::zero() {
                let ps = &k * &p1 + &p0;
                let qs = &k * &q1 + &q0;
                let semi = Rational::new(ps, qs);
                let conv = Rational::new(p1.clone(), q1.clone());
                best = if (&semi - &target).abs() < (&conv - &target).abs() {
                    semi
                } else {
                    conv
                };
            }
            break;
        }
        best = Rational::new(p2.clone(), q2.clone());
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let frac = &rem - Rational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        rem = frac.recip();
    }
    if neg {
        -best
    } else {
        best
    }
}

pub fn lcm_of_denominators<'a>(it: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    it.into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(v: &[Rational]) -> Rational {
    v.iter().map(|x| x * x).sum()
}

pub fn max_abs(v: &[Rational]) -> Rational {
    v.iter()
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(Rational::zero)
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn scale_vec(v: &[Rational], c: &Rational) -> QVector {
    v.iter().map(|x| x * c).collect()
}

/// Scales `v` to a primitive integer vector with positive leading entry.
pub fn primitive_direction(v: &[Rational]) -> QVector {
    let l = lcm_of_denominators(v);
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &l).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    let sign = ints
        .iter()
        .find(|x| !x.is_zero())
        .map(|x| if x.is_negative() { -BigInt::one() } else { BigInt::one() })
        .unwrap_or_else(BigInt::one);
    ints.into_iter()
        .map(|x| Rational::from_integer(x * &sign / &g))
        .collect()
}

/// Serde adapter for a single rational as a string.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        value_to_rational(&v).map_err(de::Error::custom)
    }
}

/// Serde adapter for a vector of rationals.
pub mod serde_qvector {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(format_rational).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<QVector, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        value_to_qvector(&v).map_err(de::Error::custom)
    }
}

/// Serde adapter for `Vec<QVector>` (lists of vectors).
pub mod serde_qvectors {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[QVector], s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<Vec<String>> = v
            .iter()
            .map(|row| row.iter().map(format_rational).collect())
            .collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<QVector>, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let arr = v
            .as_array()
            .ok_or_else(|| de::Error::custom("expected an array of vectors"))?;
        arr.iter()
            .map(|x| value_to_qvector(x).map_err(de::Error::custom))
            .collect()
    }
}

/// Serde adapter for an optional vector.
pub mod serde_opt_qvector {
    use super::*;

    pub fn serialize<S: Serializer>(
        v: &Option<QVector>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        v.as_ref()
            .map(|v| v.iter().map(format_rational).collect::<Vec<_>>())
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<QVector>, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        if v.is_null() {
            return Ok(None);
        }
        value_to_qvector(&v).map(Some).map_err(de::Error::custom)
    }
}

/// Serde adapter for an integer: a JSON number when it fits in `i64`,
/// otherwise a decimal string.
pub mod serde_bigint {
    use super::*;
    use num_traits::ToPrimitive;

    pub fn serialize<S: Serializer>(k: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
        match k.to_i64() {
            Some(i) => s.serialize_i64(i),
            None => s.serialize_str(&k.to_string()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let q = value_to_rational(&v).map_err(de::Error::custom)?;
        if !q.is_integer() {
            return Err(de::Error::custom("expected an integer"));
        }
        Ok(q.to_integer())
    }
}

pub fn value_to_rational(v: &serde_json::Value) -> Result<Rational> {
    match v {
        serde_json::Value::String(s) => parse_rational(s),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(rat(i))
            } else {
                parse_rational(&n.to_string())
            }
        }
        other => Err(Error::parse(other.to_string(), "expected a rational")),
    }
}

pub fn value_to_qvector(v: &serde_json::Value) -> Result<QVector> {
    v.as_array()
        .ok_or_else(|| Error::parse(v.to_string(), "expected an array of rationals"))?
        .iter()
        .map(value_to_rational)
        .collect()
}

pub fn qvector_to_value(v: &[Rational]) -> serde_json::Value {
    serde_json::Value::Array(
        v.iter()
            .map(|x| serde_json::Value::String(format_rational(x)))
            .collect(),
    )
}

/// Wrapper giving a rational its string serialization.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Exact(#[serde(with = "serde_rational")] pub Rational);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), rat(-7));
        assert_eq!(parse_rational("0.001").unwrap(), ratio(1, 1000));
        assert_eq!(parse_rational("-0.25").unwrap(), ratio(-1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn format_round_trip() {
        for q in [ratio(-3, 7), rat(5), rat(0), ratio(22, 8)] {
            assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q);
        }
        assert_eq!(format_rational(&ratio(4, 2)), "2");
    }

    #[test]
    fn rationalize_recovers_simple_fractions() {
        assert_eq!(rationalize(0.333333333333, 1000), ratio(1, 3));
        assert_eq!(rationalize(-2.5, 10), ratio(-5, 2));
        assert_eq!(rationalize(std::f64::consts::PI, 1000), ratio(355, 113));
        assert_eq!(rationalize(1e-9, 1_000_000), rat(0));
    }

    #[test]
    fn primitive_direction_clears() {
        assert_eq!(
            primitive_direction(&[ratio(-1, 2), ratio(3, 4)]),
            vec![rat(2), rat(-3)]
        );
    }
}
