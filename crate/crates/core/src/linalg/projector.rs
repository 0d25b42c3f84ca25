use std::fmt;

use num_traits::{One, ToPrimitive, Zero};

use super::matrix::{inner, Matrix};
use super::scalar::{Rational, Scalar};
use crate::error::{Error, Result};

/// An orthogonal projector: Hermitian and idempotent, checked exactly.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Projector(Matrix);

impl Projector {
    /// Validates `P = P†` and `P² = P`; errors name the first failing entry.
    pub fn new(matrix: Matrix) -> Result<Self> {
        if let Some((row, col)) = matrix.hermitian_defect() {
            return Err(Error::NotHermitian { row, col });
        }
        let sq = matrix.mul(&matrix);
        let n = matrix.dim();
        for row in 0..n {
            for col in 0..n {
                if sq.get(row, col) != matrix.get(row, col) {
                    return Err(Error::NotIdempotent { row, col });
                }
            }
        }
        Ok(Projector(matrix))
    }

    /// Caller guarantees the invariants (sums of orthogonal atoms, conjugates of projectors).
    pub(crate) fn new_unchecked(matrix: Matrix) -> Self {
        debug_assert!(matrix.is_hermitian());
        Projector(matrix)
    }

    pub fn zero(dim: usize) -> Self {
        Projector(Matrix::zero(dim))
    }

    pub fn identity(dim: usize) -> Self {
        Projector(Matrix::identity(dim))
    }

    /// Diagonal projector onto the listed coordinate axes.
    pub fn coordinate(dim: usize, axes: &[usize]) -> Self {
        let mut d = vec![Rational::zero(); dim];
        for &a in axes {
            d[a] = Rational::one();
        }
        Projector(Matrix::diag(&d))
    }

    /// `|v⟩⟨v| / ⟨v|v⟩`; `None` for the zero vector.
    pub fn onto_ray(v: &[Scalar]) -> Option<Self> {
        let n = inner(v, v);
        if n.is_zero() {
            return None;
        }
        let scale = n.re().recip();
        Some(Projector(Matrix::outer(v).scale(&scale)))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_identity()
    }

    /// Dimension of the range, `tr P`.
    pub fn rank(&self) -> usize {
        self.0.trace().re().to_integer().to_usize().unwrap_or(0)
    }

    /// `P ≤ Q`, i.e. `PQ = P`.
    ///
    /// For projectors `tr(PQ) = tr(P)` iff `‖(1−Q)P‖² = 0`, which is cheaper
    /// than forming the product.
    pub fn leq(&self, other: &Projector) -> bool {
        self.0.trace_product(&other.0) == self.0.trace()
    }

    /// `PQ = 0`, via `tr(PQ) = ‖QP‖²`.
    pub fn orthogonal_to(&self, other: &Projector) -> bool {
        self.0.trace_product(&other.0).is_zero()
    }

    pub fn complement(&self) -> Projector {
        Projector(Matrix::identity(self.dim()).sub(&self.0))
    }

    /// Sum of a projector orthogonal to `self`.
    pub(crate) fn add_orthogonal(&self, other: &Projector) -> Projector {
        debug_assert!(self.orthogonal_to(other));
        Projector(self.0.add(&other.0))
    }

    /// `U P U†`.
    pub fn conjugate_by(&self, u: &Matrix) -> Projector {
        Projector(self.0.conjugate_by(u))
    }

    pub fn ensure_dim(&self, dim: usize) -> Result<()> {
        self.0.ensure_dim(dim)
    }
}

impl fmt::Display for Projector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `P ≤ Q` in the projection lattice.
pub fn projector_leq(p: &Projector, q: &Projector) -> Result<bool> {
    q.ensure_dim(p.dim())?;
    Ok(p.leq(q))
}

/// Sum of pairwise orthogonal projectors (the lattice join in that case).
pub fn orthogonal_sum<'a>(dim: usize, parts: impl IntoIterator<Item = &'a Projector>) -> Projector {
    let mut acc = Matrix::zero(dim);
    for p in parts {
        acc = acc.add(p.matrix());
    }
    Projector::new_unchecked(acc)
}

#[cfg(test)]
mod tests {
    use super::super::scalar::{int, rational};
    use super::*;

    fn p(i: usize) -> Projector {
        Projector::coordinate(4, &[i])
    }

    #[test]
    fn validates_coordinate_atoms_and_rejects_scaled() {
        assert!(Projector::new(Matrix::diag_int(&[1, 0, 0, 0])).is_ok());
        assert!(Projector::new(Matrix::identity(4)).is_ok());
        let half = Matrix::diag(&[rational(1, 2), rational(1, 2), int(0), int(0)]);
        assert_eq!(Projector::new(half), Err(Error::NotIdempotent { row: 0, col: 0 }));
        let skew = Matrix::from_rows(vec![
            vec![Scalar::zero(), Scalar::one()],
            vec![Scalar::zero(), Scalar::zero()],
        ])
        .unwrap();
        assert_eq!(Projector::new(skew), Err(Error::NotHermitian { row: 0, col: 1 }));
    }

    #[test]
    fn lattice_order_examples() {
        let p12 = Projector::coordinate(4, &[0, 1]);
        assert!(projector_leq(&p(0), &p12).unwrap());
        assert!(!projector_leq(&p(0), &p(1)).unwrap());
        let p13 = Projector::coordinate(4, &[0, 2]);
        assert!(projector_leq(&p13, &p(1).complement()).unwrap());
        assert!(matches!(
            projector_leq(&p(0), &Projector::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn trace_test_agrees_with_product_test() {
        let v = [Scalar::from_int(1), Scalar::from_int(1), Scalar::zero(), Scalar::zero()];
        let ray = Projector::onto_ray(&v).unwrap();
        for q in [p(0), Projector::coordinate(4, &[0, 1]), Projector::identity(4), ray.clone()] {
            let by_product = ray.matrix().mul(q.matrix()) == *ray.matrix();
            assert_eq!(ray.leq(&q), by_product);
        }
    }
}
