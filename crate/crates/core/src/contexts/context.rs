use std::cmp::Reverse;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::linalg::{orthogonal_sum, Projector};

/// Largest number of atoms a context may have. Every subset of atoms is a
/// projection of the context, and several algorithms materialise them.
pub const MAX_ATOMS: usize = 8;

/// An abelian algebra given by its atoms: pairwise orthogonal nonzero
/// projectors summing to the identity.
///
/// Atoms are kept in canonical order (descending in the row-major entry order
/// of their matrices, so `diag(1,0,0,0)` precedes `diag(0,1,0,0)`). Equality and
/// hashing look only at the atoms; the label is cosmetic.
#[derive(Clone, Debug)]
pub struct Context {
    atoms: Vec<Projector>,
    label: String,
}

impl PartialEq for Context {
    fn eq(&self, other: &Self) -> bool {
        self.atoms == other.atoms
    }
}

impl Eq for Context {}

impl Hash for Context {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.atoms.hash(state);
    }
}

impl Context {
    /// Validates and canonicalises; an absent label defaults to `"V"`.
    pub fn from_atoms(atoms: Vec<Projector>, label: Option<String>) -> Result<Self> {
        let first = atoms.first().ok_or(Error::NotResolution)?;
        let dim = first.dim();
        for (i, a) in atoms.iter().enumerate() {
            a.ensure_dim(dim)?;
            if a.is_zero() {
                return Err(Error::ZeroAtom(i));
            }
        }
        if atoms.len() > MAX_ATOMS {
            return Err(Error::TooManyAtoms { found: atoms.len(), max: MAX_ATOMS });
        }
        for i in 0..atoms.len() {
            for j in i + 1..atoms.len() {
                if !atoms[i].orthogonal_to(&atoms[j]) {
                    return Err(Error::NotOrthogonal(i, j));
                }
            }
        }
        if !orthogonal_sum(dim, &atoms).is_identity() {
            return Err(Error::NotResolution);
        }
        if atoms.len() < 2 {
            return Err(Error::TrivialContext);
        }
        Ok(Context::new_unchecked(atoms, label.unwrap_or_else(|| "V".to_string())))
    }

    pub(crate) fn new_unchecked(mut atoms: Vec<Projector>, label: String) -> Self {
        atoms.sort_by(|a, b| b.cmp(a));
        Context { atoms, label }
    }

    pub fn atoms(&self) -> &[Projector] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &Projector {
        &self.atoms[i]
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].dim()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub(crate) fn set_label(&mut self, label: String) {
        self.label = label;
    }

    /// Mask with every atom selected.
    pub fn full_mask(&self) -> u64 {
        if self.atoms.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.atoms.len()) - 1
        }
    }

    /// Sum of the atoms selected by `mask`.
    pub fn projector_of(&self, mask: u64) -> Projector {
        orthogonal_sum(
            self.dim(),
            self.atoms.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, a)| a),
        )
    }

    /// Atom mask of `p` if `p` lies in the algebra (is a sum of atoms).
    ///
    /// Since the atoms resolve the identity, `p` is in the algebra exactly when
    /// each atom is either below `p` or orthogonal to it.
    pub fn mask_of(&self, p: &Projector) -> Option<u64> {
        if p.dim() != self.dim() {
            return None;
        }
        let mut mask = 0u64;
        for (i, a) in self.atoms.iter().enumerate() {
            if a.leq(p) {
                mask |= 1 << i;
            } else if !a.orthogonal_to(p) {
                return None;
            }
        }
        Some(mask)
    }

    /// Mask of atoms `a` with `aP ≠ 0`, i.e. the support of the outer approximation.
    pub fn outer_mask(&self, p: &Projector) -> u64 {
        let mut mask = 0u64;
        for (i, a) in self.atoms.iter().enumerate() {
            if !a.orthogonal_to(p) {
                mask |= 1 << i;
            }
        }
        mask
    }

    /// Mask of atoms below `p`.
    pub fn inner_mask(&self, p: &Projector) -> u64 {
        let mut mask = 0u64;
        for (i, a) in self.atoms.iter().enumerate() {
            if a.leq(p) {
                mask |= 1 << i;
            }
        }
        mask
    }

    /// For `self ≤ finer`: index of the atom of `self` above each atom of `finer`.
    pub fn coarsening_map(&self, finer: &Context) -> Option<Vec<u8>> {
        if self.dim() != finer.dim() || self.len() > finer.len() {
            return None;
        }
        finer
            .atoms
            .iter()
            .map(|fa| self.atoms.iter().position(|ca| fa.leq(ca)).map(|i| i as u8))
            .collect()
    }

    /// `U V U†`, with the label kept.
    pub fn conjugate_by(&self, u: &crate::linalg::Matrix) -> Context {
        Context::new_unchecked(self.atoms.iter().map(|a| a.conjugate_by(u)).collect(), self.label.clone())
    }

    /// Sort key: finer contexts first, then canonical atoms.
    pub(crate) fn order_key(&self) -> (Reverse<usize>, Reverse<&[Projector]>) {
        (Reverse(self.atoms.len()), Reverse(&self.atoms[..]))
    }
}

/// Context from atoms, with an auto-generated label when none is given.
pub fn context_from_atoms(atoms: Vec<Projector>) -> Result<Context> {
    Context::from_atoms(atoms, None)
}
