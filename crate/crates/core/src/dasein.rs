//! Inner and outer daseinisation of projections and self-adjoint operators.

use num_traits::Zero;

use crate::contexts::{Context, ContextId, ContextPoset};
use crate::error::{Error, Result};
use crate::linalg::{Operator, Projector, Rational, SpectralFamily, SpectralResolution};
use crate::presheaf::{ClopenSubobject, SpectralPoint};

/// `δ^o(P)_V`: the smallest projection of `V` above `P`, the sum of atoms not orthogonal to `P`.
pub fn dasein_outer_proj(p: &Projector, v: &Context) -> Result<Projector> {
    p.ensure_dim(v.dim())?;
    Ok(v.projector_of(v.outer_mask(p)))
}

/// `δ^i(P)_V`: the largest projection of `V` below `P`, the sum of atoms under `P`.
pub fn dasein_inner_proj(p: &Projector, v: &Context) -> Result<Projector> {
    p.ensure_dim(v.dim())?;
    Ok(v.projector_of(v.inner_mask(p)))
}

/// `(δ^o(1 − P)_V, 1 − δ^i(P)_V)`; the two always agree.
pub fn dasein_negation_check(p: &Projector, v: &Context) -> Result<(Projector, Projector)> {
    Ok((dasein_outer_proj(&p.complement(), v)?, dasein_inner_proj(p, v)?.complement()))
}

/// Outer daseinisation of a projection over a whole poset, as a sub-object of Σ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DaseinisedProposition {
    source: Projector,
    subobject: ClopenSubobject,
    projectors: Vec<Projector>,
}

impl DaseinisedProposition {
    pub fn source(&self) -> &Projector {
        &self.source
    }

    pub fn subobject(&self) -> &ClopenSubobject {
        &self.subobject
    }

    /// `δ^o(P)_V`.
    pub fn at(&self, v: ContextId) -> &Projector {
        &self.projectors[v.0]
    }

    pub fn projectors(&self) -> &[Projector] {
        &self.projectors
    }

    pub fn belongs_to(&self, poset: &ContextPoset) -> bool {
        self.subobject.belongs_to(poset)
    }
}

/// `δ(P) = {S_{δ^o(P)_V}}`; compatibility holds by monotonicity and is re-validated.
pub fn dasein_proj_global(p: &Projector, poset: &ContextPoset) -> Result<DaseinisedProposition> {
    p.ensure_dim(poset.dim())?;
    let masks: Vec<u64> = poset.contexts().iter().map(|c| c.outer_mask(p)).collect();
    let projectors = poset.contexts().iter().zip(&masks).map(|(c, &m)| c.projector_of(m)).collect();
    let subobject = ClopenSubobject::new(poset, masks)?;
    Ok(DaseinisedProposition { source: p.clone(), subobject, projectors })
}

/// Per-context inner daseinisation `δ^i(P)_V` over a poset.
pub fn dasein_inner_global(p: &Projector, poset: &ContextPoset) -> Result<Vec<Projector>> {
    poset.contexts().iter().map(|c| dasein_inner_proj(p, c)).collect()
}

/// Builds the daseinised operator from per-breakpoint masks of `V`.
fn from_masks(a: &SpectralResolution, v: &Context, mask_at: impl Fn(&Projector) -> u64) -> SpectralResolution {
    let family = a.family();
    let breakpoints = family
        .breakpoints()
        .iter()
        .map(|(l, e)| (l.clone(), v.projector_of(mask_at(e))))
        .collect();
    SpectralFamily::from_breakpoints_unchecked(breakpoints).to_resolution()
}

/// `δ^o(A)_V = ∫ λ d(δ^i(E^A_λ)_V)`, the spectral-order infimum of elements of `V_sa` above `A`.
pub fn dasein_outer_sa(a: &SpectralResolution, v: &Context) -> Result<SpectralResolution> {
    if a.dim() != v.dim() {
        return Err(Error::DimensionMismatch { expected: v.dim(), found: a.dim() });
    }
    Ok(from_masks(a, v, |e| v.inner_mask(e)))
}

/// `δ^i(A)_V = ∫ λ d(⋀_{μ>λ} δ^o(E^A_μ)_V)`.
///
/// The family `E^A` is constant on `[λ_k, λ_{k+1})`, so the infimum over `μ > λ_k`
/// is attained just to the right of `λ_k` and equals `δ^o(E^A_{λ_k})_V`.
pub fn dasein_inner_sa(a: &SpectralResolution, v: &Context) -> Result<SpectralResolution> {
    if a.dim() != v.dim() {
        return Err(Error::DimensionMismatch { expected: v.dim(), found: a.dim() });
    }
    Ok(from_masks(a, v, |e| v.outer_mask(e)))
}

/// Eigenvalue of a context-diagonal resolution on each atom of `v`.
pub fn atom_values(r: &SpectralResolution, v: &Context) -> Vec<Rational> {
    v.atoms()
        .iter()
        .map(|atom| r.eigenvalue_on(atom).cloned().expect("resolution is built from atoms of the context"))
        .collect()
}

/// Daseinised operator over every context of a poset.
pub fn dasein_sa_global(a: &SpectralResolution, poset: &ContextPoset, inner: bool) -> Result<Vec<Operator>> {
    poset
        .contexts()
        .iter()
        .map(|c| {
            let r = if inner { dasein_inner_sa(a, c)? } else { dasein_outer_sa(a, c)? };
            Ok(Operator::from_resolution(r))
        })
        .collect()
}

/// Value interval `(μ, ν)` on `↓V` attached to a spectral point of `V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueInterval {
    root: ContextId,
    entries: Vec<(ContextId, Rational, Rational)>,
}

impl ValueInterval {
    pub fn root(&self) -> ContextId {
        self.root
    }

    /// `(V', μ(V'), ν(V'))` for each `V' ≤ V` in id order.
    pub fn entries(&self) -> &[(ContextId, Rational, Rational)] {
        &self.entries
    }

    pub fn at(&self, v: ContextId) -> Option<(&Rational, &Rational)> {
        self.entries.iter().find(|(w, _, _)| *w == v).map(|(_, mu, nu)| (mu, nu))
    }
}

/// `δ̆(A)_V(λ)`: at each `V' ≤ V`, `μ = λ|_{V'}(δ^i(A)_{V'})` and `ν = λ|_{V'}(δ^o(A)_{V'})`.
pub fn breve_delta(a: &SpectralResolution, poset: &ContextPoset, p: SpectralPoint) -> Result<ValueInterval> {
    let root = p.context;
    let mut entries = Vec::new();
    for w in poset.down_set(root).iter() {
        let ctx = poset.context(w);
        let atom = poset.restrict_atom(root, w, p.atom)?;
        let inner = dasein_inner_sa(a, ctx)?;
        let outer = dasein_outer_sa(a, ctx)?;
        let mu = inner.eigenvalue_on(ctx.atom(atom)).cloned().unwrap_or_else(Rational::zero);
        let nu = outer.eigenvalue_on(ctx.atom(atom)).cloned().unwrap_or_else(Rational::zero);
        entries.push((w, mu, nu));
    }
    Ok(ValueInterval { root, entries })
}

/// True when every spectral projection of `a` lies in the algebra `v`.
pub fn in_algebra(a: &SpectralResolution, v: &Context) -> bool {
    a.pairs().iter().all(|(_, p)| v.mask_of(p).is_some())
}

/// De Groote restriction `A ↦ δ^o(A)_{V'}` (or `δ^i` with `inner`) for `A ∈ V_sa`, `V' ≤ V`.
pub fn de_groote_map(
    a: &SpectralResolution,
    poset: &ContextPoset,
    sup: ContextId,
    sub: ContextId,
    inner: bool,
) -> Result<SpectralResolution> {
    poset.ensure_leq(sub, sup)?;
    if !in_algebra(a, poset.context(sup)) {
        return Err(Error::NotInAlgebra(poset.label(sup).to_string()));
    }
    let target = poset.context(sub);
    if inner {
        dasein_inner_sa(a, target)
    } else {
        dasein_outer_sa(a, target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contexts::{generate_poset, SeedBasis};
    use crate::linalg::{int, spectral_resolution, Matrix};

    fn poset() -> ContextPoset {
        let atoms = (0..4).map(|i| Projector::coordinate(4, &[i])).collect();
        generate_poset(4, &[SeedBasis::new(atoms)]).unwrap()
    }

    fn p(axes: &[usize]) -> Projector {
        Projector::coordinate(4, axes)
    }

    fn diag_of(r: &SpectralResolution) -> Vec<Rational> {
        r.reconstruct().real_diagonal().unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn projection_examples() {
        let poset = poset();
        let ctx = |l: &str| poset.context(poset.by_label(l).unwrap()).clone();
        assert_eq!(dasein_outer_proj(&p(&[0]), &ctx("V_{P2}")).unwrap(), p(&[0, 2, 3]));
        assert_eq!(dasein_outer_proj(&p(&[0]), &ctx("V")).unwrap(), p(&[0]));
        assert_eq!(dasein_outer_proj(&p(&[]), &ctx("V_{P3}")).unwrap(), p(&[]));
        assert_eq!(dasein_inner_proj(&p(&[0, 1, 2]), &ctx("V_{P2}")).unwrap(), p(&[1]));
        assert_eq!(dasein_inner_proj(&p(&[0]), &ctx("V_{P2}")).unwrap(), p(&[]));
        let (a, b) = dasein_negation_check(&p(&[0]), &ctx("V_{P2}")).unwrap();
        assert_eq!(a, b);
        assert!(a.is_identity());
    }

    #[test]
    fn spin_daseinisation() {
        let poset = poset();
        let ctx = |l: &str| poset.context(poset.by_label(l).unwrap()).clone();
        let sz = spectral_resolution(&Matrix::diag_int(&[2, 0, 0, -2]), None).unwrap();
        assert_eq!(diag_of(&dasein_outer_sa(&sz, &ctx("V_{P2P3}")).unwrap()), ints(&[2, 0, 0, 2]));
        assert_eq!(diag_of(&dasein_outer_sa(&sz, &ctx("V")).unwrap()), ints(&[2, 0, 0, -2]));
        assert_eq!(diag_of(&dasein_outer_sa(&sz, &ctx("V_{P4}")).unwrap()), ints(&[2, 2, 2, -2]));
        assert_eq!(diag_of(&dasein_inner_sa(&sz, &ctx("V_{P4}")).unwrap()), ints(&[0, 0, 0, -2]));
        assert_eq!(diag_of(&dasein_inner_sa(&sz, &ctx("V_{P1}")).unwrap()), ints(&[2, -2, -2, -2]));
    }

    #[test]
    fn value_interval_at_p4() {
        let poset = poset();
        let sz = spectral_resolution(&Matrix::diag_int(&[2, 0, 0, -2]), None).unwrap();
        let v4 = poset.by_label("V_{P4}").unwrap();
        // ψ = e1 lies under the atom P1+P2+P3.
        let atom = poset.context(v4).mask_of(&p(&[0, 1, 2])).unwrap().trailing_zeros() as usize;
        let iv = breve_delta(&sz, &poset, SpectralPoint { context: v4, atom }).unwrap();
        assert_eq!(iv.at(v4), Some((&int(0), &int(2))));
        let v = poset.by_label("V").unwrap();
        let top = breve_delta(&sz, &poset, SpectralPoint { context: v, atom: 0 }).unwrap();
        assert_eq!(top.at(v), Some((&int(2), &int(2))));
    }

    #[test]
    fn de_groote_requires_membership() {
        let poset = poset();
        let id = |l: &str| poset.by_label(l).unwrap();
        let sz = spectral_resolution(&Matrix::diag_int(&[2, 0, 0, -2]), None).unwrap();
        let direct = dasein_outer_sa(&sz, poset.context(id("V_{P1}"))).unwrap();
        let step = de_groote_map(&sz, &poset, id("V"), id("V_{P1P2}"), false).unwrap();
        let chained = de_groote_map(&step, &poset, id("V_{P1P2}"), id("V_{P1}"), false).unwrap();
        assert_eq!(chained, direct);
        assert!(matches!(
            de_groote_map(&sz, &poset, id("V_{P1P2}"), id("V_{P1}"), false),
            Err(Error::NotInAlgebra(_))
        ));
    }
}
