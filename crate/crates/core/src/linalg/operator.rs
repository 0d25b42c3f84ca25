use super::matrix::Matrix;
use super::projector::Projector;
use super::scalar::Rational;
use super::spectral::{spectral_resolution, SpectralResolution};
use super::state::DensityMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OperatorKind {
    General,
    Hermitian,
    Projector,
    Density,
    RankOne,
}

/// A matrix tagged with what it has been validated to be, optionally carrying
/// its spectral resolution.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Operator {
    matrix: Matrix,
    kind: OperatorKind,
    resolution: Option<SpectralResolution>,
}

impl Operator {
    pub fn general(matrix: Matrix) -> Self {
        Operator { matrix, kind: OperatorKind::General, resolution: None }
    }

    pub fn hermitian(matrix: Matrix) -> Result<Self> {
        if let Some((row, col)) = matrix.hermitian_defect() {
            return Err(Error::NotHermitian { row, col });
        }
        Ok(Operator { matrix, kind: OperatorKind::Hermitian, resolution: None })
    }

    /// Hermitian operator with a resolution, computed or validated from `hint`.
    pub fn resolved(matrix: Matrix, hint: Option<Vec<(Rational, Projector)>>) -> Result<Self> {
        let resolution = spectral_resolution(&matrix, hint)?;
        Ok(Operator { matrix, kind: OperatorKind::Hermitian, resolution: Some(resolution) })
    }

    pub fn from_resolution(resolution: SpectralResolution) -> Self {
        Operator { matrix: resolution.reconstruct(), kind: OperatorKind::Hermitian, resolution: Some(resolution) }
    }

    pub fn projector(p: Projector) -> Self {
        let resolution = spectral_resolution(p.matrix(), None).ok();
        let kind = if p.rank() == 1 { OperatorKind::RankOne } else { OperatorKind::Projector };
        Operator { matrix: p.into_matrix(), kind, resolution }
    }

    pub fn density(rho: &DensityMatrix) -> Self {
        Operator { matrix: rho.matrix().clone(), kind: OperatorKind::Density, resolution: None }
    }

    /// Attaches a resolution, computing it when no hint is given.
    pub fn resolve(mut self, hint: Option<Vec<(Rational, Projector)>>) -> Result<Self> {
        self.resolution = Some(spectral_resolution(&self.matrix, hint)?);
        if self.kind == OperatorKind::General {
            self.kind = OperatorKind::Hermitian;
        }
        Ok(self)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn resolution(&self) -> Option<&SpectralResolution> {
        self.resolution.as_ref()
    }

    pub fn require_resolution(&self) -> Result<&SpectralResolution> {
        self.resolution.as_ref().ok_or(Error::Unresolved)
    }
}
