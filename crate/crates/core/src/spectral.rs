//! Root counts relative to the unit circle, decided exactly.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::action::Mode;
use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::poly::{char_poly, reciprocal_split, sturm_root_count, QPoly};
use crate::rational::{rat, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiskProfile {
    pub at_zero: usize,
    pub inside: usize,
    pub on_circle: usize,
    pub outside: usize,
}

impl DiskProfile {
    pub fn degree(&self) -> usize {
        self.at_zero + self.inside + self.on_circle + self.outside
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingleVerdict {
    pub mode: Mode,
    pub expansive: bool,
    pub profile: DiskProfile,
}

/// Number of roots of modulus one, with multiplicity.
pub fn circle_root_count(p: &QPoly) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if p.coeff(0).is_zero() {
        return Err(Error::ZeroConstantTerm);
    }
    let (g, _) = reciprocal_split(p)?;
    let (a, g) = divide_out(&g, &QPoly::from_i64(&[-1, 1]));
    let (b, h) = divide_out(&g, &QPoly::from_i64(&[1, 1]));
    if h.is_constant() {
        return Ok(a + b);
    }
    let big_h = palindromic_to_w(&h);
    let (lo, hi) = (rat(-2), rat(2));
    let mut paired = 0;
    for (f, mult) in big_h.squarefree_decomposition() {
        let mut c = sturm_root_count(&f, &lo, &hi)?;
        if f.eval(&hi).is_zero() {
            c -= 1;
        }
        paired += c * mult;
    }
    Ok(a + b + 2 * paired)
}

fn divide_out(p: &QPoly, f: &QPoly) -> (usize, QPoly) {
    let mut k = 0;
    let mut cur = p.clone();
    while let Some(q) = cur.exact_div(f) {
        if cur.is_constant() {
            break;
        }
        cur = q;
        k += 1;
    }
    (k, cur)
}

/// For palindromic `h` of degree `2m`, the polynomial `H` of degree `m`
/// with `h(z) = z^m H(z + 1/z)`.
pub fn palindromic_to_w(h: &QPoly) -> QPoly {
    let m = h.degree() / 2;
    let w = QPoly::from_i64(&[0, 1]);
    let mut big_h = QPoly::constant(h.coeff(m));
    let mut prev = QPoly::from_i64(&[2]);
    let mut cur = w.clone();
    for j in 1..=m {
        big_h = &big_h + &cur.scale(&h.coeff(m + j));
        let next = &(&w * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    big_h
}

/// Partition of the roots of `p` by modulus.
pub fn unit_disk_profile(p: &QPoly) -> Result<DiskProfile> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (at_zero, p0) = p.strip_zero_roots();
    let deg = p0.degree();
    if deg == 0 {
        return Ok(DiskProfile {
            at_zero,
            inside: 0,
            on_circle: 0,
            outside: 0,
        });
    }
    let on_circle = circle_root_count(&p0)?;
    let (g, q) = reciprocal_split(&p0)?;
    // Off-circle roots of g pair up as z, 1/conj(z) with equal multiplicity.
    let inside_g = (g.degree() - on_circle) / 2;
    let inside_q = inside_count_no_circle(&q);
    let inside = inside_g + inside_q;
    let profile = DiskProfile {
        at_zero,
        inside,
        on_circle,
        outside: deg - inside - on_circle,
    };
    assert_eq!(profile.degree(), p.degree(), "profile counts must sum to the degree");
    Ok(profile)
}

/// Roots in the open unit disk (zero included) of a polynomial with no
/// roots on the circle and no pair `z, 1/conj(z)` of roots.
fn inside_count_no_circle(q: &QPoly) -> usize {
    let mut cur = q.clone();
    let mut count = 0;
    loop {
        let (s, f) = cur.strip_zero_roots();
        count += s;
        if f.is_constant() {
            return count;
        }
        let n = f.degree();
        let a0 = f.coeff(0);
        let an = f.coeff(n);
        let rev = f.reverse();
        match an.abs().cmp(&a0.abs()) {
            std::cmp::Ordering::Greater => {
                // Rouché: a_n f dominates a_0 f* on the circle; the
                // difference vanishes at 0.
                let t = &f.scale(&an) - &rev.scale(&a0);
                let (s, t) = t.strip_zero_roots();
                debug_assert!(s >= 1);
                count += s;
                cur = t;
            }
            std::cmp::Ordering::Less => {
                cur = &f.scale(&a0) - &rev.scale(&an);
            }
            std::cmp::Ordering::Equal => {
                return count + schur_cohn_inertia_inside(&f);
            }
        }
    }
}

/// Schur–Cohn matrix `J = AᵀA − BᵀB` (A, B lower-triangular Toeplitz in
/// `a_0..a_{n-1}` and `a_n..a_1`).
pub fn schur_cohn_matrix(f: &QPoly) -> QMatrix {
    let n = f.degree();
    let mut a = QMatrix::zeros(n, n);
    let mut b = QMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            a.set(i, j, f.coeff(i - j));
            b.set(i, j, f.coeff(n - (i - j)));
        }
    }
    &(&a.transpose() * &a) - &(&b.transpose() * &b)
}

/// Roots inside the disk as the number of negative eigenvalues of the
/// Schur–Cohn matrix; valid when `f` and its reverse are coprime.
fn schur_cohn_inertia_inside(f: &QPoly) -> usize {
    let j = schur_cohn_matrix(f);
    let chi = char_poly(&j).expect("square");
    assert!(!chi.coeff(0).is_zero(), "Schur–Cohn matrix must be nonsingular");
    // Negative roots of a real-rooted polynomial = sign changes of chi(−x).
    let flipped: Vec<Rational> = chi
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
        .collect();
    sign_changes(&flipped)
}

fn sign_changes(c: &[Rational]) -> usize {
    let mut last: Option<bool> = None;
    let mut n = 0;
    for x in c.iter().filter(|x| !x.is_zero()) {
        let pos = x.is_positive();
        if last.is_some_and(|l| l != pos) {
            n += 1;
        }
        last = Some(pos);
    }
    n
}

/// Expansiveness of the cyclic action generated by `t`.
pub fn single_expansive(t: &QMatrix, mode: Mode) -> Result<SingleVerdict> {
    let chi = char_poly(t)?;
    if mode == Mode::Group && chi.coeff(0).is_zero() {
        return Err(Error::NotInvertible);
    }
    let profile = unit_disk_profile(&chi)?;
    let expansive = match mode {
        Mode::Semigroup => profile.at_zero == 0 && profile.inside == 0 && profile.on_circle == 0,
        Mode::Group => profile.on_circle == 0,
    };
    Ok(SingleVerdict {
        mode,
        expansive,
        profile,
    })
}

/// Spectral radius strictly greater than one, decided exactly.
pub fn has_root_outside(p: &QPoly) -> Result<bool> {
    Ok(unit_disk_profile(p)?.outside > 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> QPoly {
        QPoly::from_i64(c)
    }

    fn prof(a: usize, b: usize, c: usize, d: usize) -> DiskProfile {
        DiskProfile {
            at_zero: a,
            inside: b,
            on_circle: c,
            outside: d,
        }
    }

    #[test]
    fn circle_counts() {
        assert_eq!(circle_root_count(&p(&[1, -3, 1])).unwrap(), 0);
        assert_eq!(circle_root_count(&p(&[-1, 0, 1])).unwrap(), 2);
        assert_eq!(circle_root_count(&p(&[1, 0, 1])).unwrap(), 2);
        assert_eq!(circle_root_count(&p(&[0, 1])), Err(Error::ZeroConstantTerm));
        // (z²+1)² (z−1)³
        let f = &p(&[1, 0, 1]).pow(2) * &p(&[-1, 1]).pow(3);
        assert_eq!(circle_root_count(&f).unwrap(), 7);
        // cyclotomic Φ_5 and a Salem-type factor z^4 − z^3 − z^2 − z + 1
        assert_eq!(circle_root_count(&p(&[1, 1, 1, 1, 1])).unwrap(), 4);
        assert_eq!(circle_root_count(&p(&[1, -1, -1, -1, 1])).unwrap(), 2);
    }

    #[test]
    fn w_transform_of_cat_map() {
        assert_eq!(palindromic_to_w(&p(&[1, -3, 1])), p(&[-3, 1]));
    }

    #[test]
    fn profiles() {
        assert_eq!(unit_disk_profile(&p(&[1, -3, 1])).unwrap(), prof(0, 1, 0, 1));
        assert_eq!(unit_disk_profile(&p(&[6, -5, 1])).unwrap(), prof(0, 0, 0, 2));
        assert_eq!(unit_disk_profile(&p(&[0, -2, 1])).unwrap(), prof(1, 0, 0, 1));
        assert_eq!(unit_disk_profile(&QPoly::zero()), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn singular_schur_step_without_reciprocal_pair() {
        // 2z² + 3z − 2 = (2z − 1)(z + 2): |a_n| = |a_0| at the first step.
        assert_eq!(unit_disk_profile(&p(&[-2, 3, 2])).unwrap(), prof(0, 1, 0, 1));
        // (3z − 1)(z − 3)(2z+1)(z−2) has reciprocal-ish but not paired roots
        let f = &(&p(&[-1, 3]) * &p(&[-3, 1])) * &(&p(&[1, 2]) * &p(&[-2, 1]));
        assert_eq!(unit_disk_profile(&f).unwrap(), prof(0, 2, 0, 2));
    }

    #[test]
    fn mixed_multiplicities() {
        // (z − 1/2)² (z − 2) (z² + 1) z
        let f = &(&p(&[-1, 2]).pow(2) * &p(&[-2, 1])) * &(&p(&[1, 0, 1]) * &p(&[0, 1]));
        assert_eq!(unit_disk_profile(&f).unwrap(), prof(1, 2, 2, 1));
    }

    #[test]
    fn single_matrix_verdicts() {
        let v = single_expansive(&QMatrix::from_i64(&[&[2]]), Mode::Semigroup).unwrap();
        assert!(v.expansive);
        let cat = QMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        assert!(single_expansive(&cat, Mode::Group).unwrap().expansive);
        assert!(!single_expansive(&cat, Mode::Semigroup).unwrap().expansive);
        for mode in [Mode::Group, Mode::Semigroup] {
            assert!(!single_expansive(&QMatrix::identity(2), mode).unwrap().expansive);
        }
        assert_eq!(
            single_expansive(&QMatrix::from_i64(&[&[1, 0], &[0, 0]]), Mode::Group),
            Err(Error::NotInvertible)
        );
    }
}
