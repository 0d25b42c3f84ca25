use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::matrix::{characteristic_polynomial, Matrix};
use super::projector::{orthogonal_sum, Projector};
use super::scalar::{format_rational, Rational, Scalar};
use crate::error::{Error, Result};

/// Largest integer whose divisors we are willing to enumerate when hunting for
/// rational eigenvalues.
const DIVISOR_SEARCH_LIMIT: u64 = 1 << 40;

/// Finite spectral decomposition `A = Σ λᵢ Pᵢ`, eigenvalues strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpectralResolution {
    pairs: Vec<(Rational, Projector)>,
}

impl SpectralResolution {
    /// Checks the resolution invariants: nonzero pairwise orthogonal
    /// projectors summing to the identity, strictly increasing eigenvalues.
    pub fn from_pairs(dim: usize, mut pairs: Vec<(Rational, Projector)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidHint("empty resolution".into()));
        }
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        for (i, (lambda, p)) in pairs.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::InvalidHint(format!(
                    "projector for eigenvalue {} has dimension {}, expected {dim}",
                    format_rational(lambda),
                    p.dim()
                )));
            }
            if p.is_zero() {
                return Err(Error::InvalidHint(format!(
                    "zero projector for eigenvalue {}",
                    format_rational(lambda)
                )));
            }
            if i > 0 && pairs[i - 1].0 == *lambda {
                return Err(Error::InvalidHint(format!(
                    "eigenvalue {} repeated",
                    format_rational(lambda)
                )));
            }
        }
        for i in 0..pairs.len() {
            for j in i + 1..pairs.len() {
                if !pairs[i].1.orthogonal_to(&pairs[j].1) {
                    return Err(Error::InvalidHint(format!(
                        "projectors for eigenvalues {} and {} are not orthogonal",
                        format_rational(&pairs[i].0),
                        format_rational(&pairs[j].0)
                    )));
                }
            }
        }
        if !orthogonal_sum(dim, pairs.iter().map(|(_, p)| p)).is_identity() {
            return Err(Error::InvalidHint("projectors do not sum to the identity".into()));
        }
        Ok(SpectralResolution { pairs })
    }

    pub(crate) fn from_pairs_unchecked(pairs: Vec<(Rational, Projector)>) -> Self {
        debug_assert!(pairs.windows(2).all(|w| w[0].0 < w[1].0));
        SpectralResolution { pairs }
    }

    pub fn pairs(&self) -> &[(Rational, Projector)] {
        &self.pairs
    }

    pub fn dim(&self) -> usize {
        self.pairs[0].1.dim()
    }

    pub fn spectrum(&self) -> Vec<Rational> {
        self.pairs.iter().map(|(l, _)| l.clone()).collect()
    }

    pub fn min_eigenvalue(&self) -> &Rational {
        &self.pairs[0].0
    }

    pub fn max_eigenvalue(&self) -> &Rational {
        &self.pairs[self.pairs.len() - 1].0
    }

    /// `Σ λᵢ Pᵢ`.
    pub fn reconstruct(&self) -> Matrix {
        let mut acc = Matrix::zero(self.dim());
        for (l, p) in &self.pairs {
            acc = acc.add(&p.matrix().scale(l));
        }
        acc
    }

    /// Spectral projector `E[A ∈ [lo, hi]]`.
    pub fn projector_in(&self, lo: &Rational, hi: &Rational) -> Projector {
        orthogonal_sum(
            self.dim(),
            self.pairs.iter().filter(|(l, _)| l >= lo && l <= hi).map(|(_, p)| p),
        )
    }

    /// Eigenvalue on a projector lying under one eigenspace, if any.
    pub fn eigenvalue_on(&self, atom: &Projector) -> Option<&Rational> {
        self.pairs.iter().find(|(_, p)| atom.leq(p)).map(|(l, _)| l)
    }

    pub fn family(&self) -> SpectralFamily {
        spectral_family(self)
    }
}

/// Right-continuous step family: `E_λ = Σ_{λᵢ ≤ λ} Pᵢ`, one breakpoint per eigenvalue.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpectralFamily {
    breakpoints: Vec<(Rational, Projector)>,
}

impl SpectralFamily {
    pub fn breakpoints(&self) -> &[(Rational, Projector)] {
        &self.breakpoints
    }

    pub fn dim(&self) -> usize {
        self.breakpoints[0].1.dim()
    }

    pub fn at(&self, lambda: &Rational) -> Projector {
        match self.breakpoints.iter().rev().find(|(l, _)| l <= lambda) {
            Some((_, e)) => e.clone(),
            None => Projector::zero(self.dim()),
        }
    }

    /// Differences `E_k − E_{k−1}`; steps where the family does not move are dropped.
    pub fn to_resolution(&self) -> SpectralResolution {
        let dim = self.dim();
        let mut prev = Matrix::zero(dim);
        let mut pairs = Vec::new();
        for (l, e) in &self.breakpoints {
            let step = e.matrix().sub(&prev);
            if !step.is_zero() {
                pairs.push((l.clone(), Projector::new_unchecked(step)));
            }
            prev = e.matrix().clone();
        }
        SpectralResolution::from_pairs_unchecked(pairs)
    }

    /// Builds a family from monotone projectors at increasing λ; the last must be `1`.
    pub(crate) fn from_breakpoints_unchecked(breakpoints: Vec<(Rational, Projector)>) -> Self {
        debug_assert!(breakpoints.last().is_some_and(|(_, e)| e.is_identity()));
        SpectralFamily { breakpoints }
    }
}

pub fn spectral_family(r: &SpectralResolution) -> SpectralFamily {
    let dim = r.dim();
    let mut acc = Projector::zero(dim);
    let mut breakpoints = Vec::with_capacity(r.pairs.len());
    for (l, p) in &r.pairs {
        acc = acc.add_orthogonal(p);
        breakpoints.push((l.clone(), acc.clone()));
    }
    SpectralFamily { breakpoints }
}

/// `A ≤_s B` iff `E^A_λ ≥ E^B_λ` for all λ; checking the union of breakpoints suffices.
pub fn spectral_leq(a: &SpectralResolution, b: &SpectralResolution) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let fa = a.family();
    let fb = b.family();
    let mut points: Vec<&Rational> =
        a.pairs.iter().chain(&b.pairs).map(|(l, _)| l).collect();
    points.sort();
    points.dedup();
    Ok(points.into_iter().all(|l| fb.at(l).leq(&fa.at(l))))
}

/// Spectral resolution of a Hermitian matrix.
///
/// With a hint the pairs are validated and must reconstruct `a`. Without one,
/// diagonal matrices are read off directly; otherwise the eigenvalues must be
/// rational roots of the characteristic polynomial, and the eigenprojectors
/// come from Lagrange interpolation `Pᵢ = Πⱼ (A − λⱼ)/(λᵢ − λⱼ)`.
pub fn spectral_resolution(
    a: &Matrix,
    hint: Option<Vec<(Rational, Projector)>>,
) -> Result<SpectralResolution> {
    if let Some((row, col)) = a.hermitian_defect() {
        return Err(Error::NotHermitian { row, col });
    }
    let dim = a.dim();
    if let Some(pairs) = hint {
        let r = SpectralResolution::from_pairs(dim, pairs)?;
        if r.reconstruct() != *a {
            return Err(Error::InvalidHint("Σ λᵢPᵢ does not reconstruct the operator".into()));
        }
        return Ok(r);
    }
    if dim == 0 {
        return Err(Error::InvalidHint("zero-dimensional operator".into()));
    }
    if let Some(d) = a.real_diagonal() {
        let mut values = d.clone();
        values.sort();
        values.dedup();
        let pairs = values
            .into_iter()
            .map(|l| {
                let axes: Vec<usize> = (0..dim).filter(|&i| d[i] == l).collect();
                (l, Projector::coordinate(dim, &axes))
            })
            .collect();
        return Ok(SpectralResolution::from_pairs_unchecked(pairs));
    }
    let roots = rational_roots(&characteristic_polynomial(a))?;
    let mut pairs = Vec::with_capacity(roots.len());
    for (i, li) in roots.iter().enumerate() {
        let mut p = Matrix::identity(dim);
        for (j, lj) in roots.iter().enumerate() {
            if i != j {
                let factor = a.shift(lj).scale(&(li - lj).recip());
                p = p.mul(&factor);
            }
        }
        pairs.push((li.clone(), Projector::new(p).map_err(|_| Error::IrrationalSpectrum)?));
    }
    let r = SpectralResolution::from_pairs(dim, pairs).map_err(|_| Error::IrrationalSpectrum)?;
    if r.reconstruct() != *a {
        return Err(Error::IrrationalSpectrum);
    }
    Ok(r)
}

/// Distinct rational roots of a polynomial (coefficients low to high), in
/// increasing order, provided every root (with multiplicity) is rational.
fn rational_roots(coeffs: &[Scalar]) -> Result<Vec<Rational>> {
    if coeffs.iter().any(|c| !c.is_real()) {
        return Err(Error::IrrationalSpectrum);
    }
    let mut poly: Vec<Rational> = coeffs.iter().map(|c| c.re().clone()).collect();
    while poly.last().is_some_and(Zero::is_zero) {
        poly.pop();
    }
    let degree = poly.len().saturating_sub(1);
    let mut roots: Vec<Rational> = Vec::new();
    let mut found = 0usize;
    while poly.len() > 1 && poly[0].is_zero() {
        poly.remove(0);
        found += 1;
        if roots.last() != Some(&Rational::zero()) {
            roots.push(Rational::zero());
        }
    }
    if poly.len() > 1 {
        let ints = clear_denominators(&poly);
        let p_divs = divisors(&ints[0])?;
        let q_divs = divisors(&ints[ints.len() - 1])?;
        let mut candidates: Vec<Rational> = Vec::new();
        for p in &p_divs {
            for q in &q_divs {
                let c = Rational::new(p.clone(), q.clone());
                candidates.push(-c.clone());
                candidates.push(c);
            }
        }
        candidates.sort();
        candidates.dedup();
        for c in candidates {
            let mut hit = false;
            while poly.len() > 1 {
                match deflate(&poly, &c) {
                    Some(q) => {
                        poly = q;
                        found += 1;
                        hit = true;
                    }
                    None => break,
                }
            }
            if hit {
                roots.push(c);
            }
        }
    }
    if found != degree {
        return Err(Error::IrrationalSpectrum);
    }
    roots.sort();
    Ok(roots)
}

fn clear_denominators(poly: &[Rational]) -> Vec<BigInt> {
    let lcm = poly.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    poly.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect()
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let m = n.abs().to_u64().filter(|&m| m <= DIVISOR_SEARCH_LIMIT).ok_or(Error::IrrationalSpectrum)?;
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= m {
        if m % d == 0 {
            out.push(BigInt::from(d));
            if d != m / d {
                out.push(BigInt::from(m / d));
            }
        }
        d += 1;
    }
    Ok(out)
}

/// Synthetic division by `(x − c)`; `None` unless it is exact.
fn deflate(poly: &[Rational], c: &Rational) -> Option<Vec<Rational>> {
    let n = poly.len() - 1;
    let mut out = vec![Rational::zero(); n];
    let mut carry = Rational::zero();
    for k in (1..=n).rev() {
        carry = &poly[k] + &carry * c;
        out[k - 1] = carry.clone();
    }
    (&poly[0] + &carry * c).is_zero().then_some(out)
}
