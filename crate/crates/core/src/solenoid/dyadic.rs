//! Fixed-precision dyadic reals with an explicit error radius.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{serde_rational, Rational};

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 60;

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits
}

/// Nearest point of the grid `2^-bits Z` (ties rounded up).
pub fn round_to_grid(x: &Rational, bits: u32) -> Rational {
    let scale = Rational::from_integer(pow2(bits));
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    Rational::new((x * &scale + half).floor().to_integer(), pow2(bits))
}

/// The real interval `[mid − rad, mid + rad]`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "RawApprox")]
pub struct Approx {
    #[serde(with = "serde_rational")]
    pub mid: Rational,
    #[serde(with = "serde_rational")]
    pub rad: Rational,
    /// Smallest `e` with `rad ≤ 2^e`; absent when the value is exact.
    pub err_exp: Option<i64>,
}

#[derive(Deserialize)]
struct RawApprox {
    #[serde(with = "serde_rational")]
    mid: Rational,
    #[serde(with = "serde_rational")]
    rad: Rational,
}

impl From<RawApprox> for Approx {
    fn from(r: RawApprox) -> Self {
        let err_exp = err_exp(&r.rad);
        Approx { mid: r.mid, rad: r.rad, err_exp }
    }
}

fn err_exp(rad: &Rational) -> Option<i64> {
    if rad.is_zero() {
        return None;
    }
    let mut e: i64 = (rad.numer().bits() as i64) - (rad.denom().bits() as i64) - 1;
    let two = Rational::from_integer(BigInt::from(2));
    let bound = |e: i64| two.pow(e as i32);
    while bound(e) < *rad {
        e += 1;
    }
    while e > i64::MIN + 1 && bound(e - 1) >= *rad {
        e -= 1;
    }
    Some(e)
}

impl Approx {
    pub fn new(mid: Rational, rad: Rational) -> Self {
        let err_exp = err_exp(&rad);
        Approx { mid, rad, err_exp }
    }

    pub fn exact(x: Rational) -> Self {
        Approx::new(x, Rational::zero())
    }

    pub fn zero() -> Self {
        Approx::exact(Rational::zero())
    }

    /// `x` rounded to `bits` fractional bits, the rounding error absorbed
    /// into the radius.
    pub fn from_rational(x: &Rational, bits: u32) -> Self {
        Approx::exact(x.clone()).rounded(bits)
    }

    pub fn rounded(&self, bits: u32) -> Self {
        let r = round_to_grid(&self.mid, bits);
        let err = (&r - &self.mid).abs();
        Approx::new(r, &self.rad + err)
    }

    pub fn lo(&self) -> Rational {
        &self.mid - &self.rad
    }

    pub fn hi(&self) -> Rational {
        &self.mid + &self.rad
    }

    pub fn add(&self, other: &Approx) -> Approx {
        Approx::new(&self.mid + &other.mid, &self.rad + &other.rad)
    }

    pub fn sub(&self, other: &Approx) -> Approx {
        Approx::new(&self.mid - &other.mid, &self.rad + &other.rad)
    }

    pub fn neg(&self) -> Approx {
        Approx::new(-&self.mid, self.rad.clone())
    }

    /// Product with an exact rational, rounded to `bits`.
    pub fn mul_rational(&self, c: &Rational, bits: u32) -> Approx {
        Approx::new(&self.mid * c, &self.rad * c.abs()).rounded(bits)
    }

    pub fn mul_int(&self, c: &BigInt) -> Approx {
        let c = Rational::from_integer(c.clone());
        Approx::new(&self.mid * &c, &self.rad * c.abs())
    }

    /// Representative of the midpoint in `[0, 1)`; the radius is kept, read
    /// as an arc on the circle.
    pub fn frac(&self) -> Approx {
        Approx::new(&self.mid - self.mid.floor(), self.rad.clone())
    }

    /// Representative of the midpoint in `(−1/2, 1/2]`.
    pub fn unwrap_centered(&self) -> Approx {
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        let f = &self.mid - self.mid.floor();
        let m = if f > half { f - Rational::one() } else { f };
        Approx::new(m, self.rad.clone())
    }

    /// Distance of the angle to the nearest integer, `δ(θ) = min(θ, 1 − θ)`
    /// on the fractional part. `δ` is 1-Lipschitz, so the radius carries over.
    pub fn circle_abs(&self) -> Approx {
        let u = self.unwrap_centered();
        Approx::new(u.mid.abs(), u.rad)
    }

    pub fn abs(&self) -> Approx {
        Approx::new(self.mid.abs(), self.rad.clone())
    }

    /// Integers in the closed interval.
    pub fn integers(&self) -> Vec<BigInt> {
        let lo = self.lo().ceil().to_integer();
        let hi = self.hi().floor().to_integer();
        let mut out = Vec::new();
        let mut k = lo;
        while k <= hi {
            out.push(k.clone());
            k += 1;
        }
        out
    }

    /// Interval hull of the pointwise maximum.
    pub fn max(&self, other: &Approx) -> Approx {
        let lo = self.lo().max(other.lo());
        let hi = self.hi().max(other.hi());
        let two = Rational::from_integer(BigInt::from(2));
        Approx::new((&lo + &hi) / &two, (&hi - &lo) / two)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lo() <= *x && *x <= self.hi()
    }

    pub fn to_f64(&self) -> f64 {
        crate::rational::to_f64(&self.mid)
    }

    /// Midpoint written as `m*2^-e` when dyadic, otherwise as `p/q`.
    pub fn dyadic_string(&self) -> String {
        let d = self.mid.denom();
        if d.is_one() {
            return self.mid.numer().to_string();
        }
        if (d & (d - BigInt::one())).is_zero() {
            return format!("{}*2^-{}", self.mid.numer(), d.bits() - 1);
        }
        crate::rational::format_rational(&self.mid)
    }
}

impl fmt::Debug for Approx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {}", self.to_f64(), crate::rational::to_f64(&self.rad))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn rounding_tracks_error() {
        let a = Approx::from_rational(&ratio(1, 3), 10);
        assert!(a.contains(&ratio(1, 3)));
        assert!(a.rad <= ratio(1, 2048));
        assert_eq!(a.err_exp, Some(-11));
        assert_eq!(Approx::from_rational(&ratio(3, 8), 10).rad, Rational::zero());
    }

    #[test]
    fn circle_representatives() {
        let a = Approx::exact(ratio(7, 4));
        assert_eq!(a.frac().mid, ratio(3, 4));
        assert_eq!(a.unwrap_centered().mid, ratio(-1, 4));
        assert_eq!(Approx::exact(ratio(2, 5)).circle_abs().mid, ratio(2, 5));
        assert_eq!(Approx::exact(ratio(3, 4)).circle_abs().mid, ratio(1, 4));
    }

    #[test]
    fn integer_enclosure() {
        let a = Approx::new(ratio(1, 10), ratio(1, 5));
        assert_eq!(a.integers(), vec![BigInt::zero()]);
        assert!(Approx::new(ratio(1, 2), ratio(1, 10)).integers().is_empty());
        assert_eq!(Approx::new(ratio(1, 2), ratio(1, 2)).integers().len(), 2);
    }

    #[test]
    fn dyadic_strings() {
        assert_eq!(Approx::exact(ratio(3, 8)).dyadic_string(), "3*2^-3");
        assert_eq!(Approx::exact(ratio(-5, 1)).dyadic_string(), "-5");
    }
}
