//! Univariate polynomials over the rationals, lowest degree first.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::rational::{format_rational, lcm_of_denominators, rat, value_to_qvector, Rational};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QPoly {
    coeffs: Vec<Rational>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| rat(x)).collect())
    }

    pub fn from_ints(c: &[BigInt]) -> Self {
        Self::new(c.iter().cloned().map(Rational::from_integer).collect())
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c·z^k`.
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// `z - c`.
    pub fn linear_root(c: &Rational) -> Self {
        Self::new(vec![-c, Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lead(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + crate::rational::to_f64(c);
        }
        acc
    }

    pub fn eval_matrix(&self, m: &QMatrix) -> QMatrix {
        let n = m.rows();
        let mut acc = QMatrix::zeros(n, n);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * m) + &QMatrix::identity(n).scale(c);
        }
        acc
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().recip())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat(i as i64))
                .collect(),
        )
    }

    /// `z^deg · p(1/z)`.
    pub fn reverse(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c)
    }

    /// Multiplicity of the root 0.
    pub fn trailing_zeros(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// Divides out `z^trailing_zeros`.
    pub fn strip_zero_roots(&self) -> (usize, QPoly) {
        let s = self.trailing_zeros();
        (s, Self::new(self.coeffs[s.min(self.coeffs.len())..].to_vec()))
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Composition `self(other(z))`.
    pub fn compose(&self, other: &QPoly) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * other) + &Self::constant(c.clone());
        }
        acc
    }

    /// Euclidean division over Q.
    pub fn div_rem(&self, d: &QPoly) -> (QPoly, QPoly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let mut r = self.coeffs.clone();
        let dd = d.degree();
        if self.is_zero() || self.degree() < dd {
            return (Self::zero(), self.clone());
        }
        let inv = d.lead().recip();
        let mut q = vec![Rational::zero(); self.degree() - dd + 1];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] * &inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    /// Exact quotient; `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &QPoly) -> Option<QPoly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Content-free integer coefficients with positive leading coefficient.
    pub fn primitive_int(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let l = Rational::from_integer(lcm_of_denominators(&self.coeffs));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * &l).to_integer()).collect();
        zpoly::primitive(&ints)
    }

    pub fn primitive(&self) -> QPoly {
        Self::from_ints(&self.primitive_int())
    }

    /// Monic gcd over Q (subresultant PRS on integer forms). `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &QPoly) -> QPoly {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        Self::from_ints(&zpoly::gcd(&self.primitive_int(), &other.primitive_int())).monic()
    }

    /// `p / gcd(p, p')`, monic.
    pub fn squarefree_part(&self) -> QPoly {
        if self.is_constant() {
            return if self.is_zero() { Self::zero() } else { Self::one() };
        }
        let g = self.gcd(&self.derivative());
        self.exact_div(&g).expect("gcd divides").monic()
    }

    /// Yun's squarefree decomposition: monic pairwise coprime squarefree
    /// factors `(f_i, i)` with `p = lead · Π f_i^i`. Constant factors omitted.
    pub fn squarefree_decomposition(&self) -> Vec<(QPoly, usize)> {
        let mut out = Vec::new();
        if self.is_constant() {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.exact_div(&a0).expect("gcd divides");
        let mut c = df.exact_div(&a0).expect("gcd divides");
        let mut d = &c - &b.derivative();
        let mut i = 1;
        loop {
            let a = b.gcd(&d);
            if !a.is_constant() {
                out.push((a.clone(), i));
            }
            b = b.exact_div(&a).expect("gcd divides");
            if b.is_constant() {
                break;
            }
            c = d.exact_div(&a).expect("gcd divides");
            d = &c - &b.derivative();
            i += 1;
        }
        out
    }

    /// True when `rev p = ±p`.
    pub fn is_self_reciprocal(&self) -> bool {
        let r = self.reverse();
        r == *self || r == -self
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(crate::rational::to_f64).collect()
    }
}

/// Splits `p` into `g = gcd(p, rev p)` (monic) and `q = p / g`.
///
/// Every root of modulus one is a root of `g`, since `rev p` vanishes at
/// `1/conj(z) = z` whenever `p` vanishes at `z` on the circle.
pub fn reciprocal_split(p: &QPoly) -> Result<(QPoly, QPoly)> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if p.coeff(0).is_zero() {
        return Err(Error::ZeroConstantTerm);
    }
    let g = p.gcd(&p.reverse());
    let q = p.exact_div(&g).expect("gcd divides");
    Ok((g, q))
}

/// Number of distinct real roots of `p` in `(lo, hi]`.
pub fn sturm_root_count(p: &QPoly, lo: &Rational, hi: &Rational) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if lo >= hi {
        return Err(Error::InvalidArgument("sturm_root_count needs lo < hi".into()));
    }
    let seq = SturmSequence::new(p);
    Ok(seq.variations(lo) - seq.variations(hi))
}

/// Sturm sequence of the squarefree part, stored as primitive integer
/// polynomials with signs matching the classical remainder sequence.
#[derive(Clone, Debug)]
pub struct SturmSequence {
    seq: Vec<Vec<BigInt>>,
}

impl SturmSequence {
    pub fn new(p: &QPoly) -> Self {
        let sf = p.squarefree_part();
        let p0 = sf.primitive_int();
        if p0.len() <= 1 {
            return SturmSequence { seq: vec![p0] };
        }
        let p1 = zpoly::primitive(&zpoly::derivative(&p0));
        let mut seq = vec![p0, p1];
        loop {
            let n = seq.len();
            let (a, b) = (&seq[n - 2], &seq[n - 1]);
            let r = zpoly::prem(a, b);
            if r.is_empty() {
                break;
            }
            // prem = lc(b)^(δ+1) · rem; the next term is −rem up to a positive factor.
            let delta = a.len() - b.len();
            let lc_neg = b.last().unwrap().is_negative() && (delta + 1) % 2 == 1;
            let mut next = zpoly::primitive_abs(&r);
            if !lc_neg {
                next = next.into_iter().map(|x| -x).collect();
            }
            seq.push(next);
        }
        SturmSequence { seq }
    }

    /// Sign variations at `x`, zeros skipped.
    pub fn variations(&self, x: &Rational) -> usize {
        let mut last = 0i8;
        let mut count = 0;
        for f in &self.seq {
            let v = zpoly::eval(f, x);
            let s = if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                0
            };
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }
}

/// Characteristic polynomial `det(zI − M)` by Faddeev–LeVerrier.
pub fn char_poly(m: &QMatrix) -> Result<QPoly> {
    let n = m.dim()?;
    let mut c = vec![Rational::zero(); n + 1];
    c[n] = Rational::one();
    let mut mk = QMatrix::zeros(n, n);
    let id = QMatrix::identity(n);
    for k in 1..=n {
        mk = &(m * &mk) + &id.scale(&c[n + 1 - k]);
        let am = m * &mk;
        c[n - k] = -am.trace() / rat(k as i64);
    }
    Ok(QPoly::new(c))
}

/// Minimal polynomial of `m` (monic), found as the first linear dependency
/// among `I, M, M², …`.
pub fn min_poly(m: &QMatrix) -> Result<QPoly> {
    let n = m.dim()?;
    let mut powers: Vec<Vec<Rational>> = vec![QMatrix::identity(n).entries().to_vec()];
    let mut cur = QMatrix::identity(n);
    for d in 1..=n {
        cur = &cur * m;
        let target = cur.entries().to_vec();
        let cols: Vec<Vec<Rational>> = powers.clone();
        if let Some(sol) = crate::subspace::solve_in_span(&cols, &target) {
            let mut coeffs: Vec<Rational> = sol.into_iter().map(|x| -x).collect();
            coeffs.push(Rational::one());
            return Ok(QPoly::new(coeffs));
        }
        powers.push(target);
        debug_assert!(d < n || powers.len() == n + 1);
    }
    char_poly(m)
}

/// Integer polynomial helpers on coefficient vectors, lowest degree first.
pub mod zpoly {
    use super::*;

    pub fn trim(mut v: Vec<BigInt>) -> Vec<BigInt> {
        while v.last().is_some_and(Zero::is_zero) {
            v.pop();
        }
        v
    }

    pub fn content(v: &[BigInt]) -> BigInt {
        v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
    }

    /// Divides by the content, making the leading coefficient positive.
    pub fn primitive(v: &[BigInt]) -> Vec<BigInt> {
        let v = trim(v.to_vec());
        let g = content(&v);
        if g.is_zero() {
            return v;
        }
        let g = if v.last().unwrap().is_negative() { -g } else { g };
        v.into_iter().map(|x| x / &g).collect()
    }

    /// Divides by the positive content, keeping signs.
    pub fn primitive_abs(v: &[BigInt]) -> Vec<BigInt> {
        let v = trim(v.to_vec());
        let g = content(&v);
        if g.is_zero() {
            return v;
        }
        v.into_iter().map(|x| x / &g).collect()
    }

    pub fn derivative(v: &[BigInt]) -> Vec<BigInt> {
        trim(
            v.iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn eval(v: &[BigInt], x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in v.iter().rev() {
            acc = acc * x + Rational::from_integer(c.clone());
        }
        acc
    }

    /// Pseudo-remainder `lc(b)^(deg a − deg b + 1) · a mod b`.
    pub fn prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let db = b.len() - 1;
        if a.len() < b.len() {
            return a.to_vec();
        }
        let lb = b[db].clone();
        let mut r = a.to_vec();
        let mut e = a.len() - b.len() + 1;
        while r.len() >= b.len() {
            let lr = r.last().unwrap().clone();
            let shift = r.len() - b.len();
            for x in r.iter_mut() {
                *x *= &lb;
            }
            for (j, bc) in b.iter().enumerate() {
                r[shift + j] -= &lr * bc;
            }
            r = trim(r);
            e -= 1;
        }
        if e > 0 {
            let f = num_traits::pow(lb, e);
            r = r.into_iter().map(|x| x * &f).collect();
        }
        r
    }

    /// Primitive gcd via the subresultant PRS.
    pub fn gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let (mut a, mut b) = if a.len() >= b.len() {
            (primitive(a), primitive(b))
        } else {
            (primitive(b), primitive(a))
        };
        if b.is_empty() {
            return a;
        }
        let mut g = BigInt::one();
        let mut h = BigInt::one();
        loop {
            let delta = a.len() - b.len();
            let r = prem(&a, &b);
            if r.is_empty() {
                return primitive(&b);
            }
            if r.len() == 1 {
                return vec![BigInt::one()];
            }
            a = b;
            let div = &g * num_traits::pow(h.clone(), delta);
            b = r.into_iter().map(|x| x / &div).collect();
            g = a.last().unwrap().clone();
            h = if delta == 0 {
                h
            } else {
                num_traits::pow(g.clone(), delta) / num_traits::pow(h.clone(), delta - 1)
            };
        }
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_coeff = i == 0 || !a.is_one();
            if show_coeff {
                write!(f, "{}", format_rational(&a))?;
            }
            match i {
                0 => {}
                1 => write!(f, "z")?,
                _ => write!(f, "z^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QPoly({self})")
    }
}

impl<'a> Add<&'a QPoly> for &'a QPoly {
    type Output = QPoly;

    fn add(self, rhs: &'a QPoly) -> QPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        QPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<'a> Sub<&'a QPoly> for &'a QPoly {
    type Output = QPoly;

    fn sub(self, rhs: &'a QPoly) -> QPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        QPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<'a> Mul<&'a QPoly> for &'a QPoly {
    type Output = QPoly;

    fn mul(self, rhs: &'a QPoly) -> QPoly {
        if self.is_zero() || rhs.is_zero() {
            return QPoly::zero();
        }
        let mut c = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        QPoly::new(c)
    }
}

impl Neg for &QPoly {
    type Output = QPoly;

    fn neg(self) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Serialize for QPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(format_rational).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        value_to_qvector(&v)
            .map(QPoly::new)
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn p(c: &[i64]) -> QPoly {
        QPoly::from_i64(c)
    }

    #[test]
    fn char_poly_examples() {
        let m = QMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        assert_eq!(char_poly(&m).unwrap(), p(&[1, -3, 1]));
        assert_eq!(char_poly(&QMatrix::identity(2)).unwrap(), p(&[1, -2, 1]));
        let r = QMatrix::from_i64(&[&[0, -1], &[1, 0]]);
        assert_eq!(char_poly(&r).unwrap(), p(&[1, 0, 1]));
        let ns = QMatrix::zeros(2, 3);
        assert_eq!(
            char_poly(&ns),
            Err(Error::NonSquare { rows: 2, cols: 3 })
        );
    }

    #[test]
    fn sturm_examples() {
        let q = |a, b| (rat(a), rat(b));
        let (lo, hi) = q(0, 2);
        assert_eq!(sturm_root_count(&p(&[-2, 0, 1]), &lo, &hi).unwrap(), 1);
        let (lo, hi) = q(-5, 5);
        assert_eq!(sturm_root_count(&p(&[1, 0, 1]), &lo, &hi).unwrap(), 0);
        let (lo, hi) = q(0, 2);
        assert_eq!(sturm_root_count(&p(&[1, -2, 1]), &lo, &hi).unwrap(), 1);
        // endpoint conventions: (lo, hi]
        let (lo, hi) = q(1, 3);
        assert_eq!(sturm_root_count(&p(&[-1, 1]), &lo, &hi).unwrap(), 0);
        let (lo, hi) = q(0, 1);
        assert_eq!(sturm_root_count(&p(&[-1, 1]), &lo, &hi).unwrap(), 1);
        assert_eq!(
            sturm_root_count(&QPoly::zero(), &lo, &hi),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn sturm_negative_leading_and_many_roots() {
        // −(z−1)(z−2)(z−3)(z+4)
        let f = &(&(&p(&[-1, 1]) * &p(&[-2, 1])) * &p(&[-3, 1])) * &p(&[4, 1]);
        let f = -&f;
        assert_eq!(sturm_root_count(&f, &rat(-10), &rat(10)).unwrap(), 4);
        assert_eq!(sturm_root_count(&f, &ratio(3, 2), &ratio(5, 2)).unwrap(), 1);
        assert_eq!(sturm_root_count(&f, &rat(-4), &rat(1)).unwrap(), 1);
    }

    #[test]
    fn reciprocal_split_examples() {
        assert_eq!(
            reciprocal_split(&p(&[1, -3, 1])).unwrap(),
            (p(&[1, -3, 1]), QPoly::one())
        );
        assert_eq!(
            reciprocal_split(&p(&[-2, 1])).unwrap(),
            (QPoly::one(), p(&[-2, 1]))
        );
        assert_eq!(
            reciprocal_split(&p(&[-1, 0, 1])).unwrap(),
            (p(&[-1, 0, 1]), QPoly::one())
        );
        assert_eq!(reciprocal_split(&p(&[0, 1])), Err(Error::ZeroConstantTerm));
    }

    #[test]
    fn gcd_and_squarefree() {
        let a = &p(&[-1, 1]).pow(3) * &p(&[2, 0, 1]);
        let b = &p(&[-1, 1]).pow(2) * &p(&[5, 1]);
        assert_eq!(a.gcd(&b), p(&[-1, 1]).pow(2));
        let sf = a.squarefree_decomposition();
        assert_eq!(sf, vec![(p(&[2, 0, 1]), 1), (p(&[-1, 1]), 3)]);
        assert_eq!(a.squarefree_part(), &p(&[-1, 1]) * &p(&[2, 0, 1]));
    }

    #[test]
    fn min_poly_of_scalar_and_jordan() {
        assert_eq!(min_poly(&QMatrix::identity(3)).unwrap(), p(&[-1, 1]));
        let j = QMatrix::from_i64(&[&[2, 1], &[0, 2]]);
        assert_eq!(min_poly(&j).unwrap(), p(&[4, -4, 1]));
    }

    #[test]
    fn display() {
        assert_eq!(p(&[1, -3, 1]).to_string(), "z^2 - 3z + 1");
        assert_eq!(p(&[-2, 1]).to_string(), "z - 2");
        assert_eq!(QPoly::zero().to_string(), "0");
    }
}
