//! Test-only oracles, written without the library's polynomial and root
//! code: exact rational polynomial arithmetic, Durand–Kerner starts, exact
//! Newton refinement and Smith's inclusion disks.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Polynomial over Q, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct P(pub Vec<Q>);

impl P {
    pub fn from_ints(c: &[i64]) -> P {
        P(c.iter().map(|&x| q(x)).collect()).trim()
    }

    fn trim(mut self) -> P {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn deg(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn lead(&self) -> Q {
        self.0.last().cloned().unwrap_or_else(Q::zero)
    }

    fn monic(&self) -> P {
        let l = self.lead();
        P(self.0.iter().map(|c| c / &l).collect())
    }

    fn sub(&self, o: &P) -> P {
        let n = self.0.len().max(o.0.len());
        let z = Q::zero();
        P((0..n)
            .map(|i| self.0.get(i).unwrap_or(&z) - o.0.get(i).unwrap_or(&z))
            .collect())
        .trim()
    }

    fn deriv(&self) -> P {
        P(self.0.iter().enumerate().skip(1).map(|(i, c)| c * q(i as i64)).collect()).trim()
    }

    fn divrem(&self, d: &P) -> (P, P) {
        let mut r = self.0.clone();
        let dl = d.lead();
        let dd = d.deg();
        if self.0.len() < d.0.len() {
            return (P(vec![]), self.clone());
        }
        let mut quo = vec![Q::zero(); self.0.len() - dd];
        for i in (0..quo.len()).rev() {
            let c = &r[i + dd] / &dl;
            for (j, dc) in d.0.iter().enumerate() {
                r[i + j] -= &c * dc;
            }
            quo[i] = c;
        }
        r.truncate(dd);
        (P(quo).trim(), P(r).trim())
    }

    fn div(&self, d: &P) -> P {
        let (quo, r) = self.divrem(d);
        assert!(r.is_zero(), "inexact division");
        quo
    }

    fn gcd(&self, o: &P) -> P {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    fn reversed(&self) -> P {
        P(self.0.iter().rev().cloned().collect()).trim()
    }

    /// Squarefree factors with multiplicities (Yun).
    fn yun(&self) -> Vec<(P, usize)> {
        let mut out = Vec::new();
        let d = self.deriv();
        let a = self.gcd(&d);
        let mut b = self.div(&a);
        let c = d.div(&a);
        let mut dd = c.sub(&b.deriv());
        let mut i = 1;
        while b.deg() > 0 {
            let a = b.gcd(&dd);
            let c = dd.div(&a);
            b = b.div(&a);
            if a.deg() > 0 {
                out.push((a, i));
            }
            dd = c.sub(&b.deriv());
            i += 1;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
struct C {
    re: Q,
    im: Q,
}

impl C {
    fn zero() -> C {
        C { re: Q::zero(), im: Q::zero() }
    }
    fn add(&self, o: &C) -> C {
        C { re: &self.re + &o.re, im: &self.im + &o.im }
    }
    fn sub(&self, o: &C) -> C {
        C { re: &self.re - &o.re, im: &self.im - &o.im }
    }
    fn mul(&self, o: &C) -> C {
        C {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
    fn norm2(&self) -> Q {
        &self.re * &self.re + &self.im * &self.im
    }
    fn div(&self, o: &C) -> C {
        let n = o.norm2();
        let conj = C { re: o.re.clone(), im: -o.im.clone() };
        let t = self.mul(&conj);
        C { re: t.re / &n, im: t.im / n }
    }
    fn round(&self, bits: u32) -> C {
        C { re: round(&self.re, bits), im: round(&self.im, bits) }
    }
}

fn round(x: &Q, bits: u32) -> Q {
    let s = Q::from_integer(BigInt::one() << bits);
    let y = (x * &s + Q::new(BigInt::one(), BigInt::from(2))).floor();
    y / s
}

fn from_f64(x: f64) -> Q {
    Q::from_float(x).unwrap_or_else(Q::zero)
}

fn eval(p: &P, z: &C) -> C {
    p.0.iter().rev().fold(C::zero(), |acc, c| {
        acc.mul(z).add(&C { re: c.clone(), im: Q::zero() })
    })
}

fn sqrt_scaled(x: &Q, k: u32, up: bool) -> Q {
    let s = x * Q::from_integer(BigInt::one() << (2 * k));
    let n = if up { s.ceil() } else { s.floor() }.to_integer();
    let mut r = n.sqrt();
    if up && &r * &r < n {
        r += 1;
    }
    Q::new(r, BigInt::one() << k)
}

fn durand_kerner(p: &P) -> Vec<Complex64> {
    let c: Vec<f64> = p.monic().0.iter().map(|x| x.to_f64().unwrap()).collect();
    let n = p.deg();
    let bound = 1.0 + c[..n].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * bound).collect();
    let f = |x: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |a, &k| a * x + k);
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = f(z[i]) / den;
            if step.is_finite() {
                z[i] -= step;
                delta = delta.max(step.norm());
            }
        }
        if delta < 1e-15 {
            break;
        }
    }
    z
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Place {
    Inside,
    Circle,
    Outside,
    Undecided,
}

/// Places of the roots of a squarefree `f`. `self_reciprocal` marks a root
/// set closed under `z ↦ 1/z̄`, which allows an isolated root near the
/// circle to be certified on it. `None` when `bits` was not enough.
fn places(f: &P, self_reciprocal: bool, bits: u32) -> Option<Vec<Place>> {
    let n = f.deg();
    let df = f.deriv();
    let mut z: Vec<C> = durand_kerner(f)
        .into_iter()
        .map(|w| C { re: from_f64(w.re), im: from_f64(w.im) })
        .collect();
    // Newton in exact arithmetic, doubling the working grid.
    let mut b = 48;
    while b < bits {
        b = (2 * b).min(bits);
        for zi in z.iter_mut() {
            let d = eval(&df, zi);
            if d.norm2().is_zero() {
                return None;
            }
            *zi = zi.sub(&eval(f, zi).div(&d)).round(b);
        }
    }
    let k = bits + 32;
    let lead = f.lead();
    let mut rad = Vec::with_capacity(n);
    for i in 0..n {
        let mut den = lead.clone() * &lead;
        for j in 0..n {
            if i != j {
                den *= z[i].sub(&z[j]).norm2();
            }
        }
        if den.is_zero() {
            return None;
        }
        let r2 = eval(f, &z[i]).norm2() * q((n * n) as i64) / den;
        rad.push(sqrt_scaled(&r2, k, true));
    }
    for i in 0..n {
        for j in i + 1..n {
            let d = sqrt_scaled(&z[i].sub(&z[j]).norm2(), k, false);
            if d <= &rad[i] + &rad[j] {
                return None;
            }
        }
    }
    let one = Q::one();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let m2 = z[i].norm2();
        let r = &rad[i];
        let place = if r.is_zero() {
            match m2.cmp(&one) {
                std::cmp::Ordering::Less => Place::Inside,
                std::cmp::Ordering::Equal => Place::Circle,
                std::cmp::Ordering::Greater => Place::Outside,
            }
        } else if sqrt_scaled(&m2, k, true) + r < one {
            Place::Inside
        } else if sqrt_scaled(&m2, k, false) - r > one {
            Place::Outside
        } else if self_reciprocal && *r <= Q::new(1.into(), 16.into()) {
            // The inversion image of disk i lies within 10r of its centre;
            // if no other disk comes that close, the image is disk i itself.
            let reach = r * q(10);
            let isolated = (0..n).filter(|&j| j != i).all(|j| {
                sqrt_scaled(&z[i].sub(&z[j]).norm2(), k, false) > &reach + &rad[j]
            });
            if isolated {
                Place::Circle
            } else {
                Place::Undecided
            }
        } else {
            Place::Undecided
        };
        out.push(place);
    }
    Some(out)
}

fn count_squarefree(f: &P, self_reciprocal: bool) -> [usize; 3] {
    for bits in [64u32, 128, 256, 512, 1024, 2048] {
        if let Some(ps) = places(f, self_reciprocal, bits) {
            if ps.iter().all(|p| *p != Place::Undecided) {
                let c = |w: Place| ps.iter().filter(|p| **p == w).count();
                return [c(Place::Inside), c(Place::Circle), c(Place::Outside)];
            }
        }
    }
    panic!("root oracle undecided for {:?}", f);
}

/// `[at zero, inside, on circle, outside]` root counts, with multiplicity.
pub fn root_profile(coeffs: &[i64]) -> [usize; 4] {
    let p = P::from_ints(coeffs);
    assert!(!p.is_zero());
    let zeros = p.0.iter().take_while(|c| c.is_zero()).count();
    let p = P(p.0[zeros..].to_vec());
    let mut out = [zeros, 0, 0, 0];
    for (f, m) in p.yun() {
        let g = f.gcd(&f.reversed());
        let h = f.div(&g);
        for (part, recip) in [(g, true), (h, false)] {
            if part.deg() == 0 {
                continue;
            }
            let [a, b, c] = count_squarefree(&part, recip);
            out[1] += a * m;
            out[2] += b * m;
            out[3] += c * m;
        }
    }
    out
}

/// Sign of a rational as -1, 0, 1.
pub fn sign(x: &Q) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

#[test]
fn oracle_self_check() {
    // (z-2)(z-1/2)... over integers: 2z^2 - 5z + 2.
    assert_eq!(root_profile(&[2, -5, 2]), [0, 1, 0, 1]);
    // z^2 + 1, (z-1)^2, z(z^2+z+1).
    assert_eq!(root_profile(&[1, 0, 1]), [0, 0, 2, 0]);
    assert_eq!(root_profile(&[1, -2, 1]), [0, 0, 2, 0]);
    assert_eq!(root_profile(&[0, 1, 1, 1]), [1, 0, 2, 0]);
    // Lehmer's polynomial: one root outside, one inside, eight on the circle.
    assert_eq!(root_profile(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]), [0, 1, 8, 1]);
}
