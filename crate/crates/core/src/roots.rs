//! Certified complex root enclosures for squarefree rational polynomials.
//!
//! Approximations come from Aberth iteration in `f64` and are then made
//! exact: for distinct points `z_i`, the matrix `diag(z) − W·1ᵀ` with
//! Weierstrass corrections `W_i = p(z_i) / Π_{j≠i}(z_i − z_j)` has
//! characteristic polynomial `p`, so its Gerschgorin disks
//! `D(z_i − W_i, (n−1)|W_i|)` enclose the roots, one per disk once the
//! disks are pairwise disjoint.

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::QPoly;
use crate::rational::{from_f64_exact, to_f64, Rational};

pub type CRational = Complex<Rational>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDisk {
    pub center: CRational,
    pub radius: Rational,
}

/// Upper bound for `|z|`.
pub fn abs_upper(z: &CRational) -> Rational {
    sqrt_upper(&z.norm_sqr())
}

/// Rational `s ≥ √x`, within a relative error of about 1e-12.
pub fn sqrt_upper(x: &Rational) -> Rational {
    if x.is_zero() {
        return Rational::zero();
    }
    let f = to_f64(x).sqrt();
    let mut s = if f.is_finite() && f > 0.0 {
        from_f64_exact(f * (1.0 + 1e-12))
    } else {
        x.clone() + Rational::one()
    };
    while &(&s * &s) < x {
        s = &s * Rational::new(BigInt::from(1001), BigInt::from(1000)) + Rational::new(BigInt::one(), BigInt::from(1u64 << 52));
    }
    s
}

/// Rational `0 ≤ s ≤ √x`.
pub fn sqrt_lower(x: &Rational) -> Rational {
    if !x.is_positive() {
        return Rational::zero();
    }
    let f = to_f64(x).sqrt();
    let mut s = if f.is_finite() && f > 0.0 {
        from_f64_exact(f * (1.0 - 1e-12))
    } else {
        Rational::zero()
    };
    while &(&s * &s) > x {
        s = &s * Rational::new(BigInt::from(999), BigInt::from(1000));
    }
    s
}

pub fn eval_c(p: &QPoly, z: &CRational) -> CRational {
    let mut acc = CRational::zero();
    for c in p.coeffs().iter().rev() {
        acc = acc * z + CRational::new(c.clone(), Rational::zero());
    }
    acc
}

fn round_dyadic(x: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits;
    let n = (x * Rational::from_integer(scale.clone())).round().to_integer();
    Rational::new(n, scale)
}

fn round_c(z: &CRational, bits: u32) -> CRational {
    CRational::new(round_dyadic(&z.re, bits), round_dyadic(&z.im, bits))
}

/// Aberth iteration on the `f64` image of `p`.
fn aberth(p: &QPoly) -> Vec<Complex<f64>> {
    let c = p.monic().to_f64_coeffs();
    let n = p.degree();
    let eval = |z: Complex<f64>| {
        let mut v = Complex::new(0.0, 0.0);
        let mut d = Complex::new(0.0, 0.0);
        for a in c.iter().rev() {
            d = d * z + v;
            v = v * z + a;
        }
        (v, d)
    };
    // Cauchy bound for the initial circle.
    let bound = 1.0 + c[..n].iter().map(|x| x.abs()).fold(0.0, f64::max);
    let mut z: Vec<Complex<f64>> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            Complex::from_polar(0.5 * bound, t)
        })
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (v, d) = eval(z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let s: Complex<f64> = (0..n)
                .filter(|&j| j != i)
                .map(|j| Complex::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let step = ratio / (Complex::new(1.0, 0.0) - ratio * s);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn disks(p: &QPoly, z: &[CRational]) -> Option<Vec<RootDisk>> {
    let n = z.len();
    let lead = p.lead();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut denom = CRational::new(lead.clone(), Rational::zero());
        for j in 0..n {
            if j != i {
                let d = &z[i] - &z[j];
                if d.is_zero() {
                    return None;
                }
                denom = denom * d;
            }
        }
        let w = eval_c(p, &z[i]) / denom;
        let radius = abs_upper(&w) * Rational::from_integer(BigInt::from(n as u64 - 1));
        out.push(RootDisk {
            center: &z[i] - &w,
            radius,
        });
    }
    Some(out)
}

fn disjoint(d: &[RootDisk]) -> bool {
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let gap = (&d[i].center - &d[j].center).norm_sqr();
            let r = &d[i].radius + &d[j].radius;
            if gap <= &r * &r {
                return false;
            }
        }
    }
    true
}

/// Exact Newton step, rounded to `bits` fractional bits.
fn newton(p: &QPoly, dp: &QPoly, z: &CRational, bits: u32) -> CRational {
    let d = eval_c(dp, z);
    if d.is_zero() {
        return z.clone();
    }
    round_c(&(z - eval_c(p, z) / d), bits)
}

/// Isolates the roots of a squarefree polynomial of positive degree to
/// pairwise disjoint disks, each holding exactly one root.
pub fn isolate_roots(p: &QPoly) -> Result<Vec<RootDisk>> {
    refine_roots(p, 0)
}

/// Like [`isolate_roots`], with every radius additionally below `2^-min_bits`.
pub fn refine_roots(p: &QPoly, min_bits: u32) -> Result<Vec<RootDisk>> {
    if p.is_constant() {
        return Ok(Vec::new());
    }
    let n = p.degree();
    let p = p.monic();
    let dp = p.derivative();
    let mut z: Vec<CRational> = aberth(&p)
        .into_iter()
        .map(|c| CRational::new(from_f64_exact(c.re), from_f64_exact(c.im)))
        .collect();
    let target = Rational::new(BigInt::one(), BigInt::one() << min_bits);
    let mut bits = 60u32;
    for _ in 0..14 {
        if let Some(d) = disks(&p, &z) {
            if disjoint(&d) && (min_bits == 0 || d.iter().all(|x| x.radius < target)) {
                return Ok(d);
            }
        }
        bits = bits.saturating_mul(2).min(1 << 14);
        z = z.iter().map(|zi| newton(&p, &dp, zi, bits)).collect();
        // Break accidental coincidences after rounding.
        for i in 1..n {
            if z[..i].contains(&z[i]) {
                z[i].re += Rational::new(BigInt::from(i), BigInt::one() << bits);
            }
        }
    }
    Err(Error::CapExceeded("root isolation did not converge".into()))
}

/// Bound on `|f(w) − f(c)|` over `|w − c| ≤ r`, from the Taylor expansion at `c`.
pub fn taylor_radius(f: &QPoly, c: &CRational, r: &Rational) -> Rational {
    if r.is_zero() {
        return Rational::zero();
    }
    let mut g = f.clone();
    let mut fact = Rational::one();
    let mut rk = Rational::one();
    let mut total = Rational::zero();
    for k in 1..=f.degree() {
        g = g.derivative();
        fact *= Rational::from_integer(BigInt::from(k));
        rk *= r;
        let v = eval_c(&g, c);
        total += (v.re.abs() + v.im.abs()) / &fact * &rk;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn isolates_simple_roots() {
        let p = QPoly::from_i64(&[2, 0, 1]);
        let d = isolate_roots(&p).unwrap();
        assert_eq!(d.len(), 2);
        for disk in &d {
            assert!(disk.center.re.abs() < Rational::new(1.into(), 1000.into()));
            let m = abs_upper(&disk.center);
            assert!(m > Rational::new(141.into(), 100.into()) && m < Rational::new(142.into(), 100.into()));
        }
    }

    #[test]
    fn rational_root_is_exact() {
        let d = isolate_roots(&QPoly::from_i64(&[-3, 2])).unwrap();
        assert_eq!(d[0].center, CRational::new(Rational::new(3.into(), 2.into()), rat(0)));
        assert_eq!(d[0].radius, rat(0));
    }

    #[test]
    fn refinement_shrinks_radii() {
        let p = QPoly::from_i64(&[1, -1, -1, -1, 1]);
        let d = refine_roots(&p, 200).unwrap();
        let target = Rational::new(BigInt::one(), BigInt::one() << 200);
        assert!(d.iter().all(|x| x.radius < target));
    }

    #[test]
    fn clustered_roots() {
        // (z − 1)(z − 1 − 1/1000)(z² + 1)
        let a = &QPoly::new(vec![rat(-1), rat(1)]) * &QPoly::new(vec![Rational::new((-1001).into(), 1000.into()), rat(1)]);
        let p = &a * &QPoly::from_i64(&[1, 0, 1]);
        assert_eq!(isolate_roots(&p).unwrap().len(), 4);
    }
}
