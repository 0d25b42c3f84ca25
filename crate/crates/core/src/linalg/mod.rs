//! Exact linear algebra over the Gaussian rationals.

mod matrix;
mod operator;
mod projector;
mod scalar;
mod spectral;
mod state;

pub use matrix::{characteristic_polynomial, inner, Matrix};
pub use operator::{Operator, OperatorKind};
pub use projector::{orthogonal_sum, projector_leq, Projector};
pub use scalar::{format_rational, int, parse_rational, rational, Rational, Scalar};
pub use spectral::{spectral_family, spectral_leq, spectral_resolution, SpectralFamily, SpectralResolution};
pub use state::{expectation, DensityMatrix, State, StateVector};
