//! Rational subspaces with a canonical (reduced row echelon) basis.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::rational::{is_zero_vec, QVector, Rational};

/// A subspace of `Q^ambient_dim`. The basis is kept in reduced row echelon
/// form, so equal subspaces have identical bases.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subspace {
    pub ambient_dim: usize,
    #[serde(with = "crate::rational::serde_qvectors")]
    pub basis: Vec<QVector>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self::span(ambient_dim, &unit_vectors(ambient_dim))
    }

    /// Span of arbitrary (possibly dependent) vectors.
    pub fn span(ambient_dim: usize, vecs: &[QVector]) -> Self {
        if vecs.is_empty() {
            return Self::zero(ambient_dim);
        }
        let m = QMatrix::from_rows(vecs.to_vec()).expect("vectors of equal length");
        let (r, pivots) = m.rref();
        Subspace {
            ambient_dim,
            basis: (0..pivots.len()).map(|i| r.row(i).to_vec()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient_dim
    }

    /// Rows spanning the annihilator: `v ∈ self` iff `ann · v = 0`.
    pub fn annihilator(&self) -> Vec<QVector> {
        if self.basis.is_empty() {
            return unit_vectors(self.ambient_dim);
        }
        let m = QMatrix::from_rows(self.basis.clone()).unwrap();
        kernel(&m).basis
    }

    /// Orthogonal complement for the standard dot product.
    pub fn orthogonal_complement(&self) -> Subspace {
        Subspace::span(self.ambient_dim, &self.annihilator())
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        if v.len() != self.ambient_dim {
            return false;
        }
        if self.is_full() {
            return true;
        }
        self.annihilator()
            .iter()
            .all(|a| crate::rational::dot(a, v).is_zero())
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        let ann = self.annihilator();
        other
            .basis
            .iter()
            .all(|v| ann.iter().all(|a| crate::rational::dot(a, v).is_zero()))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut v = self.basis.clone();
        v.extend(other.basis.iter().cloned());
        Subspace::span(self.ambient_dim, &v)
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        let mut rows = self.annihilator();
        rows.extend(other.annihilator());
        kernel_of_rows(self.ambient_dim, &rows)
    }

    /// `{v : M v ∈ self}`.
    pub fn preimage(&self, m: &QMatrix) -> Subspace {
        let ann = self.annihilator();
        let rows: Vec<QVector> = ann
            .iter()
            .map(|a| m.transpose().mul_vec(a))
            .collect();
        kernel_of_rows(self.ambient_dim, &rows)
    }

    pub fn image(&self, m: &QMatrix) -> Subspace {
        let v: Vec<QVector> = self.basis.iter().map(|b| m.mul_vec(b)).collect();
        Subspace::span(m.rows(), &v)
    }

    pub fn is_invariant(&self, m: &QMatrix) -> Result<bool> {
        let n = m.dim()?;
        if n != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: n,
            });
        }
        let ann = self.annihilator();
        Ok(self.basis.iter().all(|b| {
            let img = m.mul_vec(b);
            ann.iter().all(|a| crate::rational::dot(a, &img).is_zero())
        }))
    }

    /// Largest subspace of `self` invariant under every matrix in `gens`.
    pub fn invariant_core(&self, gens: &[QMatrix]) -> Subspace {
        let mut cur = self.clone();
        loop {
            let mut next = cur.clone();
            for g in gens {
                next = next.intersection(&cur.preimage(g));
            }
            if next.dim() == cur.dim() {
                return next;
            }
            cur = next;
        }
    }

    /// Smallest subspace containing `self` and invariant under `gens`.
    pub fn invariant_closure(&self, gens: &[QMatrix]) -> Subspace {
        let mut cur = self.clone();
        loop {
            let mut vecs = cur.basis.clone();
            for g in gens {
                vecs.extend(cur.basis.iter().map(|b| g.mul_vec(b)));
            }
            let next = Subspace::span(self.ambient_dim, &vecs);
            if next.dim() == cur.dim() {
                return next;
            }
            cur = next;
        }
    }

    /// Unit vectors completing `self` to a basis of the ambient space.
    pub fn complement_units(&self) -> Vec<QVector> {
        let mut pivots = Vec::new();
        for b in &self.basis {
            if let Some(p) = b.iter().position(|x| !x.is_zero()) {
                pivots.push(p);
            }
        }
        (0..self.ambient_dim)
            .filter(|i| !pivots.contains(i))
            .map(|i| unit_vector(self.ambient_dim, i))
            .collect()
    }

    /// For an invariant subspace, the actions of `m` on the subspace and on
    /// the quotient, in the basis `self.basis` and the complement units.
    pub fn split_action(&self, m: &QMatrix) -> Option<(QMatrix, QMatrix)> {
        let k = self.dim();
        let n = self.ambient_dim;
        let mut cols = self.basis.clone();
        cols.extend(self.complement_units());
        let p = QMatrix::from_columns(n, &cols);
        let pinv = p.inverse().ok()?;
        let conj = &(&pinv * m) * &p;
        for i in k..n {
            for j in 0..k {
                if !conj.get(i, j).is_zero() {
                    return None;
                }
            }
        }
        let mut restricted = QMatrix::zeros(k, k);
        let mut quotient = QMatrix::zeros(n - k, n - k);
        for i in 0..k {
            for j in 0..k {
                restricted.set(i, j, conj.get(i, j).clone());
            }
        }
        for i in k..n {
            for j in k..n {
                quotient.set(i - k, j - k, conj.get(i, j).clone());
            }
        }
        Some((restricted, quotient))
    }
}

pub fn unit_vector(n: usize, i: usize) -> QVector {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::one();
    v
}

pub fn unit_vectors(n: usize) -> Vec<QVector> {
    (0..n).map(|i| unit_vector(n, i)).collect()
}

/// Exact null space of `m`.
pub fn kernel(m: &QMatrix) -> Subspace {
    let n = m.cols();
    let (r, pivots) = m.rref();
    let mut basis = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rational::zero(); n];
        v[free] = Rational::one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = -r.get(i, free);
        }
        basis.push(v);
    }
    Subspace::span(n, &basis)
}

fn kernel_of_rows(n: usize, rows: &[QVector]) -> Subspace {
    if rows.is_empty() {
        return Subspace::full(n);
    }
    kernel(&QMatrix::from_rows(rows.to_vec()).unwrap())
}

/// Solves `Σ x_j cols[j] = target`; `None` when `target` is outside the span.
/// Free variables are set to zero.
pub fn solve_in_span(cols: &[QVector], target: &[Rational]) -> Option<QVector> {
    let k = cols.len();
    if k == 0 {
        return is_zero_vec(target).then(Vec::new);
    }
    let n = target.len();
    let mut aug = QMatrix::zeros(n, k + 1);
    for (j, c) in cols.iter().enumerate() {
        for i in 0..n {
            aug.set(i, j, c[i].clone());
        }
    }
    for i in 0..n {
        aug.set(i, k, target[i].clone());
    }
    let (r, pivots) = aug.rref();
    if pivots.last() == Some(&k) {
        return None;
    }
    let mut x = vec![Rational::zero(); k];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = r.get(i, k).clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int_vec;

    #[test]
    fn kernel_examples() {
        let k = kernel(&QMatrix::from_i64(&[&[1, 1], &[1, 1]]));
        assert_eq!(k, Subspace::span(2, &[int_vec(&[1, -1])]));
        assert!(kernel(&QMatrix::from_i64(&[&[2, 1], &[1, 1]])).is_zero());
        let z = kernel(&QMatrix::zeros(2, 2));
        assert_eq!(z.basis, vec![int_vec(&[1, 0]), int_vec(&[0, 1])]);
    }

    #[test]
    fn invariance_examples() {
        let axis = Subspace::span(2, &[int_vec(&[1, 0])]);
        assert!(axis
            .is_invariant(&QMatrix::from_i64(&[&[2, 1], &[0, 3]]))
            .unwrap());
        assert!(!axis
            .is_invariant(&QMatrix::from_i64(&[&[2, 1], &[1, 1]]))
            .unwrap());
        assert!(Subspace::full(2)
            .is_invariant(&QMatrix::from_i64(&[&[5, 7], &[-1, 3]]))
            .unwrap());
        assert_eq!(
            axis.is_invariant(&QMatrix::identity(3)),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        );
    }

    #[test]
    fn core_and_closure() {
        let g = QMatrix::from_i64(&[&[2, 1, 0], &[0, 2, 0], &[0, 0, 3]]);
        let plane = Subspace::span(3, &[int_vec(&[0, 1, 0]), int_vec(&[0, 0, 1])]);
        assert_eq!(
            plane.invariant_core(&[g.clone()]),
            Subspace::span(3, &[int_vec(&[0, 0, 1])])
        );
        let line = Subspace::span(3, &[int_vec(&[0, 1, 0])]);
        assert_eq!(
            line.invariant_closure(&[g]),
            Subspace::span(3, &[int_vec(&[1, 0, 0]), int_vec(&[0, 1, 0])])
        );
    }

    #[test]
    fn split_action_blocks() {
        let g = QMatrix::from_i64(&[&[2, 1], &[0, 3]]);
        let axis = Subspace::span(2, &[int_vec(&[1, 0])]);
        let (r, q) = axis.split_action(&g).unwrap();
        assert_eq!(r, QMatrix::from_i64(&[&[2]]));
        assert_eq!(q, QMatrix::from_i64(&[&[3]]));
    }

    #[test]
    fn solve_and_intersect() {
        let cols = vec![int_vec(&[1, 0, 1]), int_vec(&[0, 1, 1])];
        assert_eq!(
            solve_in_span(&cols, &int_vec(&[2, 3, 5])),
            Some(int_vec(&[2, 3]))
        );
        assert_eq!(solve_in_span(&cols, &int_vec(&[0, 0, 1])), None);
        let a = Subspace::span(3, &cols);
        let b = Subspace::span(3, &[int_vec(&[1, 1, 2]), int_vec(&[0, 0, 1])]);
        assert_eq!(a.intersection(&b), Subspace::span(3, &[int_vec(&[1, 1, 2])]));
    }
}
