//! Dense exact rational matrices.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{format_rational, rat, value_to_qvector, QVector, Rational};

/// Row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidArgument("ragged matrix rows".into()));
        }
        Ok(QMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor from integer rows. Panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rat(x)).collect())
                .collect(),
        )
        .expect("rectangular integer matrix")
    }

    pub fn diag(entries: &[Rational]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone();
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(dim: usize, cols: &[QVector]) -> Self {
        let mut m = Self::zeros(dim, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m.data[i * m.cols + j] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn dim(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> QVector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<QVector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn scale(&self, c: &Rational) -> Self {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i).clone())
            .sum()
    }

    pub fn is_integer(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> QVector {
        assert_eq!(v.len(), self.cols, "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Reduced row echelon form, returning the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).recip();
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i != r && !m.get(i, c).is_zero() {
                    let f = m.get(i, c).clone();
                    for j in c..m.cols {
                        let v = m.get(i, j) - &f * m.get(r, j);
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Fraction-free (Bareiss) determinant, computed on the integer matrix
    /// obtained by clearing row denominators.
    pub fn det(&self) -> Result<Rational> {
        let n = self.dim()?;
        if n == 0 {
            return Ok(Rational::one());
        }
        let mut scale = Rational::one();
        let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for i in 0..n {
            let l = crate::rational::lcm_of_denominators(self.row(i));
            scale /= Rational::from_integer(l.clone());
            a.push(
                self.row(i)
                    .iter()
                    .map(|x| (x * Rational::from_integer(l.clone())).to_integer())
                    .collect(),
            );
        }
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                    return Ok(Rational::zero());
                };
                a.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
            }
            prev = a[k][k].clone();
        }
        let d = Rational::from_integer(a[n - 1][n - 1].clone()) * scale;
        Ok(if sign < 0 { -d } else { d })
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.dim()?;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Rational::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::NotInvertible);
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Ok(inv)
    }

    /// Largest absolute entry; a cheap norm bound.
    pub fn max_abs(&self) -> Rational {
        self.data
            .iter()
            .map(|x| x.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| {
            crate::rational::to_f64(self.get(i, j))
        })
    }

    /// Restriction `R` with `self * basis = basis * R`, for an invariant
    /// subspace given by linearly independent columns. `None` when the
    /// span is not invariant.
    pub fn restrict_to(&self, basis: &[QVector]) -> Option<QMatrix> {
        let k = basis.len();
        let n = self.rows;
        if k == 0 {
            return Some(QMatrix::zeros(0, 0));
        }
        // Solve basis * r_j = self * b_j for each j.
        let mut aug = QMatrix::zeros(n, k + k);
        for (j, b) in basis.iter().enumerate() {
            for i in 0..n {
                aug.set(i, j, b[i].clone());
            }
        }
        for (j, b) in basis.iter().enumerate() {
            let img = self.mul_vec(b);
            for i in 0..n {
                aug.set(i, k + j, img[i].clone());
            }
        }
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&p| p >= k) || pivots.len() != k {
            return None;
        }
        let mut out = QMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                out.set(i, j, r.get(i, k + j).clone());
            }
        }
        Some(out)
    }
}

/// Basis of the unital algebra generated by `gens` (all `n × n`), found by
/// closing `{I}` under left multiplication.
pub fn algebra_basis(gens: &[QMatrix], n: usize) -> Vec<QMatrix> {
    let mut basis: Vec<QMatrix> = Vec::new();
    let mut flat: Vec<QVector> = Vec::new();
    let mut queue = vec![QMatrix::identity(n)];
    while let Some(m) = queue.pop() {
        let v = m.entries().to_vec();
        if crate::subspace::solve_in_span(&flat, &v).is_some() {
            continue;
        }
        flat.push(v);
        for g in gens {
            queue.push(g * &m);
        }
        basis.push(m);
    }
    basis
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(format_rational).collect();
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl<'a> Mul<&'a QMatrix> for &'a QMatrix {
    type Output = QMatrix;

    fn mul(self, rhs: &'a QMatrix) -> QMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = QMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a QMatrix> for &'a QMatrix {
    type Output = QMatrix;

    fn add(self, rhs: &'a QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a QMatrix> for &'a QMatrix {
    type Output = QMatrix;

    fn sub(self, rhs: &'a QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &QMatrix {
    type Output = QMatrix;

    fn neg(self) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }
}

impl Serialize for QMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(format_rational).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        QMatrix::from_json(&v).map_err(de::Error::custom)
    }
}

impl QMatrix {
    /// Parses an array of row arrays of rationals.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let rows = v
            .as_array()
            .ok_or_else(|| Error::parse(v.to_string(), "expected an array of rows"))?
            .iter()
            .map(value_to_qvector)
            .collect::<Result<Vec<_>>>()?;
        QMatrix::from_rows(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn det_and_inverse() {
        let m = QMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        assert_eq!(m.det().unwrap(), rat(1));
        let inv = m.inverse().unwrap();
        assert_eq!(inv, QMatrix::from_i64(&[&[1, -1], &[-1, 2]]));
        assert_eq!(&m * &inv, QMatrix::identity(2));
        let sing = QMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert_eq!(sing.det().unwrap(), rat(0));
        assert_eq!(sing.inverse(), Err(Error::NotInvertible));
    }

    #[test]
    fn det_with_fractions_and_pivoting() {
        let m = QMatrix::from_rows(vec![
            vec![rat(0), ratio(1, 2), rat(1)],
            vec![ratio(2, 3), rat(0), rat(1)],
            vec![rat(1), rat(1), rat(0)],
        ])
        .unwrap();
        // cofactor expansion by hand: 0*(0-1) - 1/2*(0-1) + 1*(2/3-0) = 1/2 + 2/3
        assert_eq!(m.det().unwrap(), ratio(7, 6));
    }

    #[test]
    fn restriction_to_invariant_line() {
        let m = QMatrix::from_i64(&[&[2, 1], &[0, 3]]);
        let r = m.restrict_to(&[vec![rat(1), rat(0)]]).unwrap();
        assert_eq!(r, QMatrix::from_i64(&[&[2]]));
        assert!(m.restrict_to(&[vec![rat(0), rat(1)]]).is_none());
    }

    #[test]
    fn json_round_trip() {
        let m = QMatrix::from_rows(vec![vec![ratio(1, 2), rat(-3)]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"[["1/2","-3"]]"#);
        let back: QMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
