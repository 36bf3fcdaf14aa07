//! Exact certificates that every orbit in an invariant subspace is bounded.

use std::collections::HashSet;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::action::SemigroupAction;
use crate::matrix::QMatrix;
use crate::numeric::{norm2, symmetric_eigen};
use crate::poly::char_poly;
use crate::rational::{to_f64, Exact, QVector, Rational};
use crate::subspace::{kernel, solve_in_span, Subspace};

/// Default cap on the size of an enumerated finite closure.
pub const CLOSURE_CAP: usize = 512;

/// Matrices are written in the coordinates of the subspace basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum BoundednessCertificate {
    /// A positive definite `gram` with `gram − gᵀ·gram·g` positive
    /// semidefinite for every letter `g`, so the `gram`-norm never grows.
    InvariantNorm { gram: QMatrix, slack: Exact },
    /// The semigroup generated by the letters restricted to the subspace,
    /// listed in full and closed under every letter.
    FiniteClosure { elements: Vec<QMatrix> },
}

/// Letters restricted to an invariant subspace, or `None` when it is not
/// invariant.
pub fn restricted_letters(action: &SemigroupAction, u: &Subspace) -> Option<Vec<QMatrix>> {
    action
        .letters()
        .iter()
        .map(|g| g.matrix.restrict_to(&u.basis))
        .collect()
}

/// Coordinates of `v ∈ u` in the basis of `u`.
pub fn coordinates(u: &Subspace, v: &[Rational]) -> Option<QVector> {
    solve_in_span(&u.basis, v)
}

/// Negative eigenvalue count of a symmetric matrix, exactly: the
/// characteristic polynomial is real-rooted, so Descartes' rule is exact.
fn negative_eigenvalues(m: &QMatrix) -> usize {
    if m.rows() == 0 {
        return 0;
    }
    let chi = char_poly(m).expect("square");
    let mut last: Option<bool> = None;
    let mut changes = 0;
    for (i, c) in chi.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let pos = c.is_positive() != (i % 2 == 1);
        if last.is_some_and(|l| l != pos) {
            changes += 1;
        }
        last = Some(pos);
    }
    changes
}

pub fn is_symmetric(m: &QMatrix) -> bool {
    m.is_square() && *m == m.transpose()
}

pub fn is_psd(m: &QMatrix) -> bool {
    is_symmetric(m) && negative_eigenvalues(m) == 0
}

pub fn is_pd(m: &QMatrix) -> bool {
    is_psd(m) && !m.det().map(|d| d.is_zero()).unwrap_or(true)
}

fn form_certifies(p: &QMatrix, letters: &[QMatrix]) -> bool {
    is_pd(p)
        && letters
            .iter()
            .all(|g| is_psd(&(p - &(&(&g.transpose() * p) * g))))
}

fn closure_certifies(elements: &[QMatrix], letters: &[QMatrix]) -> bool {
    let set: HashSet<&QMatrix> = elements.iter().collect();
    letters.iter().all(|g| set.contains(g))
        && elements
            .iter()
            .all(|e| letters.iter().all(|g| set.contains(&(g * e))))
}

/// Re-checks a certificate against the action, from scratch.
pub fn verify_certificate(
    action: &SemigroupAction,
    u: &Subspace,
    cert: &BoundednessCertificate,
) -> bool {
    if u.is_zero() || u.ambient_dim != action.dim() {
        return false;
    }
    let Some(letters) = restricted_letters(action, u) else {
        return false;
    };
    let k = u.dim();
    match cert {
        BoundednessCertificate::InvariantNorm { gram, slack } => {
            gram.rows() == k && slack.0.is_zero() && form_certifies(gram, &letters)
        }
        BoundednessCertificate::FiniteClosure { elements } => {
            elements.iter().all(|e| e.rows() == k && e.cols() == k)
                && closure_certifies(elements, &letters)
        }
    }
}

/// Searches for a certificate on an invariant subspace.
pub fn find_certificate(
    action: &SemigroupAction,
    u: &Subspace,
    closure_cap: usize,
) -> Option<BoundednessCertificate> {
    if u.is_zero() {
        return None;
    }
    let letters = restricted_letters(action, u)?;
    let k = u.dim();
    for p in form_candidates(&letters, k) {
        if form_certifies(&p, &letters) {
            return Some(BoundednessCertificate::InvariantNorm {
                gram: p,
                slack: Exact(Rational::zero()),
            });
        }
    }
    finite_closure(&letters, closure_cap)
        .map(|elements| BoundednessCertificate::FiniteClosure { elements })
}

/// Closure of the letters under left multiplication, if it stays within `cap`.
pub fn finite_closure(letters: &[QMatrix], cap: usize) -> Option<Vec<QMatrix>> {
    let mut seen: HashSet<QMatrix> = HashSet::new();
    let mut order = Vec::new();
    let mut queue: Vec<QMatrix> = Vec::new();
    for g in letters {
        if seen.insert(g.clone()) {
            order.push(g.clone());
            queue.push(g.clone());
        }
    }
    while let Some(e) = queue.pop() {
        for g in letters {
            let p = g * &e;
            if !seen.contains(&p) {
                if seen.len() >= cap {
                    return None;
                }
                seen.insert(p.clone());
                order.push(p.clone());
                queue.push(p);
            }
        }
    }
    Some(order)
}

fn form_candidates(letters: &[QMatrix], k: usize) -> Vec<QMatrix> {
    let mut out = vec![QMatrix::identity(k)];
    // Forms preserved exactly by every letter.
    let invariant = symmetric_solutions(k, letters, None);
    if !invariant.is_empty() {
        let mut sum = QMatrix::zeros(k, k);
        for b in &invariant {
            let b = if b.trace().is_negative() { -b } else { b.clone() };
            sum = &sum + &b;
            out.push(b);
        }
        out.push(sum);
    }
    // Discrete Lyapunov forms P − gᵀPg = I for single letters.
    let mut total = QMatrix::zeros(k, k);
    let mut all = true;
    for g in letters {
        let sol = symmetric_solutions(k, std::slice::from_ref(g), Some(&QMatrix::identity(k)));
        match sol.first() {
            Some(p) => {
                total = &total + p;
                out.push(p.clone());
            }
            None => all = false,
        }
    }
    if all && letters.len() > 1 {
        out.push(total);
    }
    out
}

fn symmetric_basis(k: usize) -> Vec<QMatrix> {
    let mut out = Vec::new();
    for a in 0..k {
        for b in a..k {
            let mut e = QMatrix::zeros(k, k);
            e.set(a, b, Rational::one());
            e.set(b, a, Rational::one());
            out.push(e);
        }
    }
    out
}

/// Symmetric `P` with `P − gᵀPg = rhs` for every `g`. With `rhs = None`
/// returns a basis of the solutions of the homogeneous system; otherwise
/// returns one particular solution when the system is uniquely solvable.
fn symmetric_solutions(k: usize, gs: &[QMatrix], rhs: Option<&QMatrix>) -> Vec<QMatrix> {
    let basis = symmetric_basis(k);
    let apply = |p: &QMatrix| -> Vec<Rational> {
        gs.iter()
            .flat_map(|g| (p - &(&(&g.transpose() * p) * g)).entries().to_vec())
            .collect()
    };
    let cols: Vec<QVector> = basis.iter().map(apply).collect();
    let combine = |x: &[Rational]| -> QMatrix {
        let mut m = QMatrix::zeros(k, k);
        for (c, b) in x.iter().zip(&basis) {
            m = &m + &b.scale(c);
        }
        m
    };
    match rhs {
        None => {
            let rows = cols.len();
            let a = QMatrix::from_columns(cols[0].len(), &cols);
            debug_assert_eq!(a.cols(), rows);
            kernel(&a).basis.iter().map(|x| combine(x)).collect()
        }
        Some(r) => {
            let target: Vec<Rational> = gs.iter().flat_map(|_| r.entries().to_vec()).collect();
            let a = QMatrix::from_columns(target.len(), &cols);
            if !kernel(&a).is_zero() {
                return Vec::new();
            }
            solve_in_span(&cols, &target).map(|x| combine(&x)).into_iter().collect()
        }
    }
}

/// Upper bound on `sup_γ ‖ρ(γ)v‖` for `v ∈ u`, in floating point.
pub fn orbit_norm_bound(u: &Subspace, cert: &BoundednessCertificate, v: &[Rational]) -> f64 {
    let Some(c) = coordinates(u, v) else {
        return f64::INFINITY;
    };
    let b = QMatrix::from_columns(u.ambient_dim, &u.basis);
    let v_norm = v.iter().map(|x| to_f64(x).powi(2)).sum::<f64>().sqrt();
    match cert {
        BoundednessCertificate::FiniteClosure { elements } => {
            let bf = b.to_f64();
            let cf = nalgebra::DVector::from_iterator(c.len(), c.iter().map(to_f64));
            elements
                .iter()
                .map(|e| (&bf * (e.to_f64() * &cf)).norm())
                .fold(v_norm, f64::max)
        }
        BoundednessCertificate::InvariantNorm { gram, .. } => {
            let pf = gram.to_f64();
            let (vals, _) = symmetric_eigen(&pf);
            let lmin = vals.first().cloned().unwrap_or(1.0).max(f64::MIN_POSITIVE);
            let cf = nalgebra::DVector::from_iterator(c.len(), c.iter().map(to_f64));
            let pnorm = (cf.transpose() * &pf * &cf)[(0, 0)].max(0.0).sqrt();
            (norm2(&b.to_f64()) * pnorm / lmin.sqrt()).max(v_norm)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::Mode;
    use crate::rational::ratio;

    #[test]
    fn rotation_is_an_isometry() {
        let r = QMatrix::from_i64(&[&[0, -1], &[1, 0]]);
        let a = SemigroupAction::single(r, Mode::Group).unwrap();
        let u = Subspace::full(2);
        let c = find_certificate(&a, &u, CLOSURE_CAP).unwrap();
        assert_eq!(
            c,
            BoundednessCertificate::InvariantNorm {
                gram: QMatrix::identity(2),
                slack: Exact(Rational::zero())
            }
        );
        assert!(verify_certificate(&a, &u, &c));
        let elements = finite_closure(&a.letter_matrices(), CLOSURE_CAP).unwrap();
        assert_eq!(elements.len(), 4);
        let closure = BoundednessCertificate::FiniteClosure { elements };
        assert!(verify_certificate(&a, &u, &closure));
    }

    #[test]
    fn order_six_element_gets_invariant_form() {
        let g = QMatrix::from_i64(&[&[0, -1], &[1, 1]]);
        let a = SemigroupAction::single(g, Mode::Group).unwrap();
        let u = Subspace::full(2);
        let c = find_certificate(&a, &u, CLOSURE_CAP).unwrap();
        assert!(matches!(c, BoundednessCertificate::InvariantNorm { .. }));
        assert!(verify_certificate(&a, &u, &c));
    }

    #[test]
    fn contraction_gets_identity_form() {
        let g = QMatrix::diag(&[ratio(1, 2), ratio(1, 3)]);
        let a = SemigroupAction::single(g, Mode::Semigroup).unwrap();
        let u = Subspace::full(2);
        let c = find_certificate(&a, &u, 8).unwrap();
        assert_eq!(
            c,
            BoundednessCertificate::InvariantNorm {
                gram: QMatrix::identity(2),
                slack: Exact(Rational::zero())
            }
        );
        assert!(verify_certificate(&a, &u, &c));
    }

    #[test]
    fn lyapunov_form_for_non_normal_contraction() {
        // Spectral radius 1/2 but operator norm above one.
        let g = QMatrix::from_rows(vec![
            vec![ratio(1, 2), crate::rational::rat(3)],
            vec![Rational::zero(), ratio(1, 2)],
        ])
        .unwrap();
        let a = SemigroupAction::single(g, Mode::Semigroup).unwrap();
        let u = Subspace::full(2);
        let c = find_certificate(&a, &u, 8).unwrap();
        assert!(matches!(c, BoundednessCertificate::InvariantNorm { .. }));
        assert!(verify_certificate(&a, &u, &c));
    }

    #[test]
    fn expanding_map_has_no_certificate() {
        let a = SemigroupAction::single(QMatrix::from_i64(&[&[2]]), Mode::Semigroup).unwrap();
        assert!(find_certificate(&a, &Subspace::full(1), 64).is_none());
    }

    #[test]
    fn psd_checks() {
        assert!(is_pd(&QMatrix::from_i64(&[&[2, 1], &[1, 2]])));
        assert!(is_psd(&QMatrix::from_i64(&[&[1, 1], &[1, 1]])));
        assert!(!is_pd(&QMatrix::from_i64(&[&[1, 1], &[1, 1]])));
        assert!(!is_psd(&QMatrix::from_i64(&[&[1, 2], &[2, 1]])));
    }
}
