use std::fmt;

use num_traits::One;

use super::scalar::{Rational, Scalar};
use crate::error::{Error, Result};

/// Dense square matrix over the Gaussian rationals, row-major.
///
/// The derived ordering compares the dimension first and then the row-major
/// entry sequence; it is the canonical ordering key for deterministic output.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    dim: usize,
    entries: Vec<Scalar>,
}

impl Matrix {
    pub fn zero(dim: usize) -> Self {
        Matrix { dim, entries: vec![Scalar::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Matrix::zero(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != dim {
                return Err(Error::NotSquare { row, len: r.len(), expected: dim });
            }
            entries.extend(r);
        }
        Ok(Matrix { dim, entries })
    }

    pub fn diag(values: &[Rational]) -> Self {
        let dim = values.len();
        let mut m = Matrix::zero(dim);
        for (i, v) in values.iter().enumerate() {
            m.entries[i * dim + i] = Scalar::real(v.clone());
        }
        m
    }

    /// Convenience for integer diagonal matrices.
    pub fn diag_int(values: &[i64]) -> Self {
        let qs: Vec<Rational> = values.iter().map(|&v| super::scalar::int(v)).collect();
        Matrix::diag(&qs)
    }

    /// `|v⟩⟨v|` (not normalised).
    pub fn outer(v: &[Scalar]) -> Self {
        let dim = v.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for a in v {
            for b in v {
                entries.push(a * &b.conj());
            }
        }
        Matrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &Scalar {
        &self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Scalar]> {
        self.entries.chunks(self.dim.max(1))
    }

    pub fn ensure_dim(&self, dim: usize) -> Result<()> {
        if self.dim != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: self.dim });
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(self.get(j, i).conj());
            }
        }
        Matrix { dim: n, entries }
    }

    /// First entry `(i, j)` at which `A ≠ A†`, scanning row-major.
    pub fn hermitian_defect(&self) -> Option<(usize, usize)> {
        let n = self.dim;
        for i in 0..n {
            for j in i..n {
                if *self.get(i, j) != self.get(j, i).conj() {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect().is_none()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim;
        (0..n).all(|i| (0..n).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn trace(&self) -> Scalar {
        let mut t = Scalar::zero();
        for i in 0..self.dim {
            t += self.get(i, i);
        }
        t
    }

    /// `tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Matrix) -> Scalar {
        let n = self.dim;
        let mut t = Scalar::zero();
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                let b = other.get(k, i);
                if b.is_zero() {
                    continue;
                }
                t += &(a * b);
            }
        }
        t
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.dim, other.dim);
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Matrix { dim: self.dim, entries }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.dim, other.dim);
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Matrix { dim: self.dim, entries }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Matrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    out.entries[i * n + j] += &(a * b);
                }
            }
        }
        out
    }

    pub fn scale(&self, k: &Rational) -> Matrix {
        Matrix { dim: self.dim, entries: self.entries.iter().map(|e| e.scale(k)).collect() }
    }

    pub fn scale_complex(&self, k: &Scalar) -> Matrix {
        Matrix { dim: self.dim, entries: self.entries.iter().map(|e| e * k).collect() }
    }

    /// `self - k·1`.
    pub fn shift(&self, k: &Rational) -> Matrix {
        let mut out = self.clone();
        let d = Scalar::real(k.clone());
        for i in 0..self.dim {
            let idx = i * self.dim + i;
            out.entries[idx] = &out.entries[idx] - &d;
        }
        out
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        let n = self.dim;
        (0..n)
            .map(|i| {
                let mut acc = Scalar::zero();
                for (j, vj) in v.iter().enumerate() {
                    acc += &(self.get(i, j) * vj);
                }
                acc
            })
            .collect()
    }

    /// `U A U†`.
    pub fn conjugate_by(&self, u: &Matrix) -> Matrix {
        u.mul(self).mul(&u.adjoint())
    }

    pub fn is_identity(&self) -> bool {
        *self == Matrix::identity(self.dim)
    }

    pub fn is_unitary(&self) -> bool {
        self.adjoint().mul(self).is_identity()
    }

    /// Real diagonal entries, if the matrix is diagonal with a real diagonal.
    pub fn real_diagonal(&self) -> Option<Vec<Rational>> {
        if !self.is_diagonal() {
            return None;
        }
        (0..self.dim)
            .map(|i| {
                let e = self.get(i, i);
                e.is_real().then(|| e.re().clone())
            })
            .collect()
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(d) = self.real_diagonal() {
            let parts: Vec<String> = d.iter().map(super::scalar::format_rational).collect();
            return write!(f, "diag({})", parts.join(","));
        }
        write!(f, "[")?;
        for (i, row) in self.rows().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            let parts: Vec<String> = row.iter().map(|s| s.to_string()).collect();
            write!(f, "{}", parts.join(","))?;
        }
        write!(f, "]")
    }
}

/// `⟨u|v⟩` with the first argument conjugated.
pub fn inner(u: &[Scalar], v: &[Scalar]) -> Scalar {
    let mut acc = Scalar::zero();
    for (a, b) in u.iter().zip(v) {
        acc += &(&a.conj() * b);
    }
    acc
}

/// Coefficients `c_0..c_n` of `det(λ·1 − A)` (Faddeev–LeVerrier), exact.
pub fn characteristic_polynomial(a: &Matrix) -> Vec<Scalar> {
    let n = a.dim();
    let mut coeffs = vec![Scalar::zero(); n + 1];
    coeffs[n] = Scalar::one();
    let mut m = Matrix::zero(n);
    for k in 1..=n {
        let mut next = a.mul(&m);
        let c = coeffs[n - k + 1].clone();
        for i in 0..n {
            let idx = i * n + i;
            next.entries[idx] = &next.entries[idx] + &c;
        }
        m = next;
        let t = a.mul(&m).trace();
        let kq = Rational::from_integer(k.into());
        coeffs[n - k] = Scalar::new(-(t.re() / &kq), -(t.im() / &kq));
    }
    coeffs
}

impl Matrix {
    pub(crate) fn one_hot(dim: usize, i: usize) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(); dim];
        v[i] = Scalar::real(Rational::one());
        v
    }
}
