use num_traits::{One, Signed, Zero};

use super::matrix::{inner, Matrix};
use super::projector::Projector;
use super::scalar::{format_rational, Rational, Scalar};
use crate::error::{Error, Result};

/// A pure state.
///
/// Built either from an exactly normalised vector or from a ray, in which case
/// only the rank-one projector `|v⟩⟨v|/⟨v|v⟩` is physically meaningful (the
/// normalised vector may be irrational).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StateVector {
    components: Vec<Scalar>,
    projector: Projector,
}

impl StateVector {
    pub fn new(components: Vec<Scalar>) -> Result<Self> {
        let n = inner(&components, &components);
        if !n.re().is_one() {
            return Err(Error::NotNormalized(format!("⟨ψ|ψ⟩ = {}", format_rational(n.re()))));
        }
        let projector = Projector::new_unchecked(Matrix::outer(&components));
        Ok(StateVector { components, projector })
    }

    pub fn from_ray(components: Vec<Scalar>) -> Result<Self> {
        let projector = Projector::onto_ray(&components)
            .ok_or_else(|| Error::NotNormalized("zero vector".into()))?;
        Ok(StateVector { components, projector })
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        StateVector::new(Matrix::one_hot(dim, i)).expect("unit vector")
    }

    pub fn components(&self) -> &[Scalar] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> &Projector {
        &self.projector
    }

    pub fn transform(&self, u: &Matrix) -> StateVector {
        StateVector { components: u.apply(&self.components), projector: self.projector.conjugate_by(u) }
    }
}

/// A density matrix certified positive by an explicit convex decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DensityMatrix {
    matrix: Matrix,
    decomposition: Vec<(Rational, StateVector)>,
}

impl DensityMatrix {
    /// `ρ = Σ pᵢ|ψᵢ⟩⟨ψᵢ|` with rational `pᵢ > 0`, `Σ pᵢ = 1`.
    pub fn from_decomposition(decomposition: Vec<(Rational, StateVector)>) -> Result<Self> {
        let first = decomposition
            .first()
            .ok_or_else(|| Error::InvalidDensity("empty decomposition".into()))?;
        let dim = first.1.dim();
        let mut total = Rational::zero();
        let mut matrix = Matrix::zero(dim);
        for (i, (p, psi)) in decomposition.iter().enumerate() {
            if !p.is_positive() {
                return Err(Error::InvalidDensity(format!("weight {i} is not positive")));
            }
            psi.projector().ensure_dim(dim)?;
            total += p;
            matrix = matrix.add(&psi.projector().matrix().scale(p));
        }
        if !total.is_one() {
            return Err(Error::InvalidDensity(format!(
                "weights sum to {}",
                format_rational(&total)
            )));
        }
        Ok(DensityMatrix { matrix, decomposition })
    }

    /// Decomposition plus a claimed matrix, which must agree exactly.
    pub fn certified(matrix: &Matrix, decomposition: Vec<(Rational, StateVector)>) -> Result<Self> {
        let rho = DensityMatrix::from_decomposition(decomposition)?;
        if rho.matrix != *matrix {
            return Err(Error::InvalidDensity("matrix differs from its decomposition".into()));
        }
        Ok(rho)
    }

    /// Diagonal density matrix; the diagonal itself is the certificate.
    pub fn diagonal(weights: &[Rational]) -> Result<Self> {
        let dim = weights.len();
        if weights.iter().any(Signed::is_negative) {
            return Err(Error::InvalidDensity("negative diagonal entry".into()));
        }
        let decomposition = weights
            .iter()
            .enumerate()
            .filter(|(_, w)| !w.is_zero())
            .map(|(i, w)| (w.clone(), StateVector::basis(dim, i)))
            .collect();
        DensityMatrix::from_decomposition(decomposition)
    }

    pub fn pure(psi: StateVector) -> Self {
        DensityMatrix { matrix: psi.projector().matrix().clone(), decomposition: vec![(Rational::one(), psi)] }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn decomposition(&self) -> &[(Rational, StateVector)] {
        &self.decomposition
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn transform(&self, u: &Matrix) -> DensityMatrix {
        DensityMatrix {
            matrix: self.matrix.conjugate_by(u),
            decomposition: self.decomposition.iter().map(|(p, s)| (p.clone(), s.transform(u))).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum State {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl State {
    /// `ρ`, or `|ψ⟩⟨ψ|` for a pure state.
    pub fn density(&self) -> &Matrix {
        match self {
            State::Pure(psi) => psi.projector().matrix(),
            State::Mixed(rho) => rho.matrix(),
        }
    }

    pub fn dim(&self) -> usize {
        self.density().dim()
    }

    pub fn transform(&self, u: &Matrix) -> State {
        match self {
            State::Pure(psi) => State::Pure(psi.transform(u)),
            State::Mixed(rho) => State::Mixed(rho.transform(u)),
        }
    }
}

/// `⟨ψ|A|ψ⟩` or `tr(ρA)`, which must be real.
pub fn expectation(state: &State, a: &Matrix) -> Result<Rational> {
    a.ensure_dim(state.dim())?;
    let t = state.density().trace_product(a);
    if !t.is_real() {
        return Err(Error::ComplexExpectation(t.to_string()));
    }
    Ok(t.re().clone())
}
