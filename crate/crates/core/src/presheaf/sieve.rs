use crate::contexts::{ContextId, ContextPoset, ContextSet};
use crate::error::{Error, Result};

/// A downward-closed set of contexts below a root.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sieve {
    root: ContextId,
    members: ContextSet,
}

impl Sieve {
    /// Validates `members ⊆ ↓root` and downward closure.
    pub fn new(poset: &ContextPoset, root: ContextId, members: ContextSet) -> Result<Self> {
        if members.universe() != poset.len() {
            return Err(Error::PosetMismatch);
        }
        if !members.is_subset(poset.down_set(root)) {
            return Err(Error::InvalidSieve(format!("members not below {}", poset.label(root))));
        }
        for m in members.iter() {
            if !poset.down_set(m).is_subset(&members) {
                return Err(Error::InvalidSieve(format!(
                    "not downward closed below {}",
                    poset.label(m)
                )));
            }
        }
        Ok(Sieve { root, members })
    }

    /// `↓V`, the top element of Ω_V.
    pub fn principal(poset: &ContextPoset, root: ContextId) -> Self {
        Sieve { root, members: poset.down_set(root).clone() }
    }

    pub fn empty(poset: &ContextPoset, root: ContextId) -> Self {
        Sieve { root, members: ContextSet::empty(poset.len()) }
    }

    /// Downward closure of the given contexts, which must lie below `root`.
    pub fn generated_by(poset: &ContextPoset, root: ContextId, gens: &[ContextId]) -> Result<Self> {
        let mut members = ContextSet::empty(poset.len());
        for &g in gens {
            poset.ensure_leq(g, root)?;
            members = members.union(poset.down_set(g));
        }
        Ok(Sieve { root, members })
    }

    pub fn root(&self) -> ContextId {
        self.root
    }

    pub fn members(&self) -> &ContextSet {
        &self.members
    }

    pub fn contains(&self, v: ContextId) -> bool {
        self.members.contains(v)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_principal(&self, poset: &ContextPoset) -> bool {
        self.members == *poset.down_set(self.root)
    }

    pub fn labels<'a>(&self, poset: &'a ContextPoset) -> Vec<&'a str> {
        self.members.iter().map(|v| poset.label(v)).collect()
    }

    fn check(&self, other: &Sieve, poset: &ContextPoset) -> Result<()> {
        if self.root != other.root {
            return Err(Error::RootMismatch(
                poset.label(self.root).to_string(),
                poset.label(other.root).to_string(),
            ));
        }
        Ok(())
    }

    pub fn meet(&self, other: &Sieve, poset: &ContextPoset) -> Result<Sieve> {
        self.check(other, poset)?;
        Ok(Sieve { root: self.root, members: self.members.intersection(&other.members) })
    }

    pub fn join(&self, other: &Sieve, poset: &ContextPoset) -> Result<Sieve> {
        self.check(other, poset)?;
        Ok(Sieve { root: self.root, members: self.members.union(&other.members) })
    }

    /// `{V' ≤ root | ∀V'' ≤ V', V'' ∈ a ⇒ V'' ∈ b}`.
    pub fn implies(&self, other: &Sieve, poset: &ContextPoset) -> Result<Sieve> {
        self.check(other, poset)?;
        let bad = self.members.difference(&other.members);
        let members = ContextSet::from_ids(
            poset.len(),
            poset.down_set(self.root).iter().filter(|&v| poset.down_set(v).intersection(&bad).is_empty()),
        );
        Ok(Sieve { root: self.root, members })
    }

    pub fn not(&self, poset: &ContextPoset) -> Sieve {
        self.implies(&Sieve::empty(poset, self.root), poset).expect("same root")
    }

    pub fn leq(&self, other: &Sieve, poset: &ContextPoset) -> Result<bool> {
        self.check(other, poset)?;
        Ok(self.members.is_subset(&other.members))
    }
}

/// Pullback of a sieve along `sub ≤ root`: `{V'' ≤ sub | V'' ∈ S}`.
pub fn omega_restrict(poset: &ContextPoset, s: &Sieve, sub: ContextId) -> Result<Sieve> {
    poset.ensure_leq(sub, s.root)?;
    Ok(Sieve { root: sub, members: s.members.intersection(poset.down_set(sub)) })
}

/// A global element of Ω: one sieve per context, compatible with restriction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GlobalOmegaElement {
    sieves: Vec<Sieve>,
}

impl GlobalOmegaElement {
    pub fn new(poset: &ContextPoset, sieves: Vec<Sieve>) -> Result<Self> {
        if sieves.len() != poset.len() {
            return Err(Error::PosetMismatch);
        }
        for v in poset.ids() {
            if sieves[v.0].root != v {
                return Err(Error::InvalidSieve(format!("entry for {} has the wrong root", poset.label(v))));
            }
            for w in poset.down_set(v).iter() {
                if omega_restrict(poset, &sieves[v.0], w)? != sieves[w.0] {
                    return Err(Error::NotCompatible {
                        from: poset.label(v).to_string(),
                        to: poset.label(w).to_string(),
                    });
                }
            }
        }
        Ok(GlobalOmegaElement { sieves })
    }

    pub fn at(&self, v: ContextId) -> &Sieve {
        &self.sieves[v.0]
    }

    pub fn sieves(&self) -> &[Sieve] {
        &self.sieves
    }
}
