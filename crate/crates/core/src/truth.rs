//! Pseudo-states, truth objects and sieve-valued truth values.

use num_traits::{One, Signed, Zero};

use crate::contexts::{ContextId, ContextPoset, ContextSet};
use crate::dasein::{dasein_proj_global, DaseinisedProposition};
use crate::error::{Error, Result};
use crate::linalg::{format_rational, DensityMatrix, Matrix, Projector, Rational, StateVector};
use crate::presheaf::{ClopenSubobject, GlobalOmegaElement, Sieve};

/// Largest atom count for which truth objects materialise `P(V)`.
pub const MAX_TRUTH_ATOMS: usize = 6;

/// `w^ψ = δ^o(|ψ⟩⟨ψ|)`, the smallest clopen sub-object totally true in `ψ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseudoState {
    psi: StateVector,
    daseinised: DaseinisedProposition,
}

impl PseudoState {
    pub fn psi(&self) -> &StateVector {
        &self.psi
    }

    pub fn subobject(&self) -> &ClopenSubobject {
        self.daseinised.subobject()
    }

    /// `δ^o(|ψ⟩⟨ψ|)_V`.
    pub fn at(&self, v: ContextId) -> &Projector {
        self.daseinised.at(v)
    }
}

pub fn pseudo_state(psi: &StateVector, poset: &ContextPoset) -> Result<PseudoState> {
    let daseinised = dasein_proj_global(psi.projector(), poset)?;
    Ok(PseudoState { psi: psi.clone(), daseinised })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TruthKind {
    Pure(StateVector),
    Mixed { rho: DensityMatrix, r: Rational },
}

/// `T^ψ_V = {α ∈ P(V) : ⟨ψ|α|ψ⟩ = 1}` or `T^{ρ,r}_V = {α ∈ P(V) : tr(ρα) ≥ r}`,
/// with `P(V)` materialised as atom masks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthObject {
    kind: TruthKind,
    poset: u64,
    // weights[v][atom] = tr(ρ·atom)
    weights: Vec<Vec<Rational>>,
    membership: Vec<Vec<u64>>,
}

impl TruthObject {
    pub fn pure(psi: &StateVector, poset: &ContextPoset) -> Result<Self> {
        let rho = psi.projector().matrix().clone();
        TruthObject::build(TruthKind::Pure(psi.clone()), &rho, Rational::one(), poset)
    }

    pub fn mixed(rho: &DensityMatrix, r: Rational, poset: &ContextPoset) -> Result<Self> {
        if !r.is_positive() || r > Rational::one() {
            return Err(Error::BadThreshold(format_rational(&r)));
        }
        TruthObject::build(TruthKind::Mixed { rho: rho.clone(), r: r.clone() }, rho.matrix(), r, poset)
    }

    fn build(kind: TruthKind, rho: &Matrix, r: Rational, poset: &ContextPoset) -> Result<Self> {
        rho.ensure_dim(poset.dim())?;
        let mut weights = Vec::with_capacity(poset.len());
        let mut membership = Vec::with_capacity(poset.len());
        for ctx in poset.contexts() {
            if ctx.len() > MAX_TRUTH_ATOMS {
                return Err(Error::TooManyAtoms { found: ctx.len(), max: MAX_TRUTH_ATOMS });
            }
            let w: Vec<Rational> = ctx.atoms().iter().map(|a| rho.trace_product(a.matrix()).re().clone()).collect();
            let members = (0..=ctx.full_mask()).filter(|&m| mask_weight(&w, m) >= r).collect();
            weights.push(w);
            membership.push(members);
        }
        Ok(TruthObject { kind, poset: poset.fingerprint(), weights, membership })
    }

    pub fn kind(&self) -> &TruthKind {
        &self.kind
    }

    pub fn threshold(&self) -> Rational {
        match &self.kind {
            TruthKind::Pure(_) => Rational::one(),
            TruthKind::Mixed { r, .. } => r.clone(),
        }
    }

    /// Members of `T_V` as atom masks, ascending.
    pub fn membership_masks(&self, v: ContextId) -> &[u64] {
        &self.membership[v.0]
    }

    pub fn membership(&self, poset: &ContextPoset, v: ContextId) -> Vec<Projector> {
        let ctx = poset.context(v);
        self.membership[v.0].iter().map(|&m| ctx.projector_of(m)).collect()
    }

    pub fn contains_mask(&self, v: ContextId, mask: u64) -> bool {
        self.membership[v.0].binary_search(&mask).is_ok()
    }

    /// `tr(ρ·Σ selected atoms)` at `v`.
    pub fn weight(&self, v: ContextId, mask: u64) -> Rational {
        mask_weight(&self.weights[v.0], mask)
    }

    fn ensure(&self, poset: &ContextPoset) -> Result<()> {
        if self.poset != poset.fingerprint() || self.membership.len() != poset.len() {
            return Err(Error::PosetMismatch);
        }
        Ok(())
    }
}

fn mask_weight(weights: &[Rational], mask: u64) -> Rational {
    let mut total = Rational::zero();
    for (i, w) in weights.iter().enumerate() {
        if mask >> i & 1 == 1 {
            total += w;
        }
    }
    total
}

/// `{V' ≤ V : δ^o(|ψ⟩⟨ψ|)_{V'} ≤ δ^o(P)_{V'}}`.
pub fn truth_value_pseudostate(
    prop: &DaseinisedProposition,
    w: &PseudoState,
    poset: &ContextPoset,
    v: ContextId,
) -> Result<Sieve> {
    if !prop.belongs_to(poset) || !w.subobject().belongs_to(poset) {
        return Err(Error::PosetMismatch);
    }
    let members = ContextSet::from_ids(
        poset.len(),
        poset.down_set(v).iter().filter(|&u| {
            let by_order = w.subobject().mask(u) & !prop.subobject().mask(u) == 0;
            debug_assert_eq!(
                by_order,
                w.psi().projector().matrix().trace_product(prop.at(u).matrix()).re().is_one()
            );
            by_order
        }),
    );
    Sieve::new(poset, v, members)
}

/// `{V' ≤ V : δ^o(P)_{V'} ∈ T_{V'}}`.
pub fn truth_value_truthobject(
    prop: &DaseinisedProposition,
    t: &TruthObject,
    poset: &ContextPoset,
    v: ContextId,
) -> Result<Sieve> {
    if !prop.belongs_to(poset) {
        return Err(Error::PosetMismatch);
    }
    t.ensure(poset)?;
    let members = ContextSet::from_ids(
        poset.len(),
        poset.down_set(v).iter().filter(|&u| t.contains_mask(u, prop.subobject().mask(u))),
    );
    Sieve::new(poset, v, members)
}

/// The truth value at every context, checked to be a global element of Ω.
pub fn truth_value_global(
    prop: &DaseinisedProposition,
    t: &TruthObject,
    poset: &ContextPoset,
) -> Result<GlobalOmegaElement> {
    let sieves = poset.ids().map(|v| truth_value_truthobject(prop, t, poset, v)).collect::<Result<Vec<_>>>()?;
    GlobalOmegaElement::new(poset, sieves)
}

/// Both sides of the covariance law for a unitary `U`.
#[derive(Clone, Debug)]
pub struct Covariance {
    /// Poset the sieves live in when the unitary forced an extension.
    pub extended: Option<ContextPoset>,
    /// `l_U(v(δ(P) ∈ T^ψ)_V)`.
    pub transported: Sieve,
    /// `v(δ(UPU†) ∈ T^{Uψ})_{l_U(V)}`.
    pub recomputed: Sieve,
}

impl Covariance {
    pub fn holds(&self) -> bool {
        self.transported == self.recomputed
    }
}

pub fn covariance_check(
    p: &Projector,
    psi: &StateVector,
    u: &Matrix,
    poset: &ContextPoset,
    v: ContextId,
    g_label: &str,
) -> Result<Covariance> {
    let image = poset.apply_unitary(u, g_label, true)?;
    let target = image.target(poset);
    let original = truth_value_truthobject(
        &dasein_proj_global(p, poset)?,
        &TruthObject::pure(psi, poset)?,
        poset,
        v,
    )?;
    let moved_root = image.images[v.0];
    let moved = ContextSet::from_ids(target.len(), original.members().iter().map(|w| image.images[w.0]));
    let transported = Sieve::new(target, moved_root, moved)?;
    let recomputed = truth_value_truthobject(
        &dasein_proj_global(&p.conjugate_by(u), target)?,
        &TruthObject::pure(&psi.transform(u), target)?,
        target,
        moved_root,
    )?;
    Ok(Covariance { extended: image.extended, transported, recomputed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contexts::{generate_poset, SeedBasis};
    use crate::linalg::rational;

    fn poset() -> ContextPoset {
        let atoms = (0..4).map(|i| Projector::coordinate(4, &[i])).collect();
        generate_poset(4, &[SeedBasis::new(atoms)]).unwrap()
    }

    #[test]
    fn pure_truth_object_at_v_p1() {
        let poset = poset();
        let psi = StateVector::basis(4, 0);
        let t = TruthObject::pure(&psi, &poset).unwrap();
        let v1 = poset.by_label("V_{P1}").unwrap();
        assert_eq!(t.membership(&poset, v1), vec![Projector::coordinate(4, &[0]), Projector::identity(4)]);
    }

    #[test]
    fn threshold_is_checked() {
        let poset = poset();
        let rho = DensityMatrix::pure(StateVector::basis(4, 0));
        assert!(matches!(TruthObject::mixed(&rho, Rational::zero(), &poset), Err(Error::BadThreshold(_))));
        assert!(matches!(TruthObject::mixed(&rho, rational(3, 2), &poset), Err(Error::BadThreshold(_))));
    }

    #[test]
    fn covariance_under_identity() {
        let poset = poset();
        let psi = StateVector::basis(4, 0);
        let v = poset.by_label("V").unwrap();
        let c = covariance_check(&Projector::coordinate(4, &[3]), &psi, &Matrix::identity(4), &poset, v, "g").unwrap();
        assert!(c.holds());
        assert!(c.extended.is_none());
    }
}
