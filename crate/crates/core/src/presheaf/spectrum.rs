use crate::contexts::{ContextId, ContextPoset};
use crate::error::{Error, Result};
use crate::linalg::Projector;

/// A point of the Gel'fand spectrum of a context: the functional that is 1 on
/// exactly those projections lying above the chosen atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpectralPoint {
    pub context: ContextId,
    pub atom: usize,
}

/// One point per atom, in canonical atom order.
pub fn spectrum(poset: &ContextPoset, v: ContextId) -> Vec<SpectralPoint> {
    (0..poset.context(v).len()).map(|atom| SpectralPoint { context: v, atom }).collect()
}

/// `λ ↦ λ|_{V'}`: the atom of `V'` dominating the point's atom.
pub fn restrict_point(poset: &ContextPoset, p: SpectralPoint, sub: ContextId) -> Result<SpectralPoint> {
    let atom = poset.restrict_atom(p.context, sub, p.atom)?;
    Ok(SpectralPoint { context: sub, atom })
}

/// `λ(P)` for a projection `P` of the point's context.
pub fn evaluate_point(poset: &ContextPoset, p: SpectralPoint, proj: &Projector) -> Result<u8> {
    let ctx = poset.context(p.context);
    let mask = ctx.mask_of(proj).ok_or_else(|| Error::NotInAlgebra(ctx.label().to_string()))?;
    Ok((mask >> p.atom & 1) as u8)
}
