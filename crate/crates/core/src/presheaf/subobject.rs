use crate::contexts::{ContextId, ContextPoset};
use crate::error::{Error, Result};

/// A clopen sub-object of the spectral presheaf: for each context a set of
/// atoms (bit `i` of the mask selects atom `i`), closed under restriction.
///
/// On a finite poset every subset of a discrete spectrum is clopen, so the only
/// invariant is restriction compatibility.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClopenSubobject {
    poset: u64,
    masks: Vec<u64>,
}

impl ClopenSubobject {
    /// Validates that every restriction of a selected point is selected.
    pub fn new(poset: &ContextPoset, masks: Vec<u64>) -> Result<Self> {
        if masks.len() != poset.len() {
            return Err(Error::PosetMismatch);
        }
        for v in poset.ids() {
            let full = poset.context(v).full_mask();
            if masks[v.0] & !full != 0 {
                return Err(Error::Validation {
                    object: poset.label(v).to_string(),
                    message: "atom index out of range".into(),
                });
            }
            for w in poset.down_set(v).iter() {
                let image = poset.restrict_mask(v, w, masks[v.0]);
                if image & !masks[w.0] != 0 {
                    return Err(Error::NotCompatible {
                        from: poset.label(v).to_string(),
                        to: poset.label(w).to_string(),
                    });
                }
            }
        }
        Ok(ClopenSubobject { poset: poset.fingerprint(), masks })
    }

    /// Σ itself.
    pub fn full(poset: &ContextPoset) -> Self {
        let masks = poset.contexts().iter().map(|c| c.full_mask()).collect();
        ClopenSubobject { poset: poset.fingerprint(), masks }
    }

    pub fn empty(poset: &ContextPoset) -> Self {
        ClopenSubobject { poset: poset.fingerprint(), masks: vec![0; poset.len()] }
    }

    /// Largest sub-object contained in an arbitrary per-context selection:
    /// keep a point of `V` iff all its restrictions are selected.
    pub fn largest_contained(poset: &ContextPoset, selection: &[u64]) -> Self {
        let masks = poset
            .ids()
            .map(|v| {
                let mut keep = 0u64;
                for atom in 0..poset.context(v).len() {
                    let ok = poset.down_set(v).iter().all(|w| {
                        let a = poset.restrict_atom(v, w, atom).expect("w ≤ v");
                        selection[w.0] >> a & 1 == 1
                    });
                    if ok {
                        keep |= 1 << atom;
                    }
                }
                keep
            })
            .collect();
        ClopenSubobject { poset: poset.fingerprint(), masks }
    }

    /// Smallest sub-object containing a selection: close under restriction.
    pub fn generated_by(poset: &ContextPoset, selection: &[u64]) -> Self {
        let mut masks = selection.to_vec();
        for v in poset.ids() {
            for w in poset.down_set(v).iter() {
                masks[w.0] |= poset.restrict_mask(v, w, selection[v.0]);
            }
        }
        ClopenSubobject { poset: poset.fingerprint(), masks }
    }

    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    pub fn mask(&self, v: ContextId) -> u64 {
        self.masks[v.0]
    }

    pub fn contains(&self, v: ContextId, atom: usize) -> bool {
        self.masks[v.0] >> atom & 1 == 1
    }

    pub fn belongs_to(&self, poset: &ContextPoset) -> bool {
        self.poset == poset.fingerprint() && self.masks.len() == poset.len()
    }

    fn check(&self, other: &ClopenSubobject) -> Result<()> {
        if self.poset != other.poset || self.masks.len() != other.masks.len() {
            return Err(Error::PosetMismatch);
        }
        Ok(())
    }

    fn zip(&self, other: &ClopenSubobject, f: impl Fn(u64, u64) -> u64) -> Result<ClopenSubobject> {
        self.check(other)?;
        let masks = self.masks.iter().zip(&other.masks).map(|(&a, &b)| f(a, b)).collect();
        Ok(ClopenSubobject { poset: self.poset, masks })
    }

    pub fn meet(&self, other: &ClopenSubobject) -> Result<ClopenSubobject> {
        self.zip(other, |a, b| a & b)
    }

    pub fn join(&self, other: &ClopenSubobject) -> Result<ClopenSubobject> {
        self.zip(other, |a, b| a | b)
    }

    /// `(S ⇒ T)_V`: points all of whose restrictions lying in `S` also lie in `T`.
    pub fn implies(&self, other: &ClopenSubobject, poset: &ContextPoset) -> Result<ClopenSubobject> {
        self.check(other)?;
        if !self.belongs_to(poset) {
            return Err(Error::PosetMismatch);
        }
        let pointwise: Vec<u64> = poset
            .ids()
            .map(|v| (!self.masks[v.0] | other.masks[v.0]) & poset.context(v).full_mask())
            .collect();
        Ok(ClopenSubobject::largest_contained(poset, &pointwise))
    }

    /// `¬S = S ⇒ 0`.
    pub fn not(&self, poset: &ContextPoset) -> Result<ClopenSubobject> {
        self.implies(&ClopenSubobject::empty(poset), poset)
    }

    pub fn leq(&self, other: &ClopenSubobject) -> Result<bool> {
        self.check(other)?;
        Ok(self.masks.iter().zip(&other.masks).all(|(a, b)| a & !b == 0))
    }

    pub fn is_full(&self, poset: &ContextPoset) -> bool {
        *self == ClopenSubobject::full(poset)
    }
}
