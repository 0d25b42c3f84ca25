use rayon::prelude::*;

use super::spectrum::SpectralPoint;
use crate::contexts::{ContextId, ContextPoset};

/// A global element of Σ: one spectral point per context, commuting with restriction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GlobalSection {
    atoms: Vec<usize>,
}

impl GlobalSection {
    pub fn atom(&self, v: ContextId) -> usize {
        self.atoms[v.0]
    }

    pub fn point(&self, v: ContextId) -> SpectralPoint {
        SpectralPoint { context: v, atom: self.atoms[v.0] }
    }

    pub fn atoms(&self) -> &[usize] {
        &self.atoms
    }

    pub fn is_compatible(&self, poset: &ContextPoset) -> bool {
        poset.ids().all(|v| {
            poset.down_set(v).iter().all(|w| poset.restrict_atom(v, w, self.atoms[v.0]).ok() == Some(self.atoms[w.0]))
        })
    }
}

struct Search<'a> {
    poset: &'a ContextPoset,
    maximal: Vec<ContextId>,
    values: Vec<Option<usize>>,
    trail: Vec<ContextId>,
}

impl<'a> Search<'a> {
    fn new(poset: &'a ContextPoset) -> Self {
        Search { poset, maximal: poset.maximal(), values: vec![None; poset.len()], trail: Vec::new() }
    }

    /// Fixes atom `a` at maximal `m` and everything it forces below; false on conflict.
    fn assign(&mut self, m: ContextId, a: usize) -> bool {
        for w in self.poset.down_set(m).iter() {
            let r = self.poset.restrict_atom(m, w, a).expect("w ≤ m");
            match self.values[w.0] {
                Some(x) if x != r => return false,
                Some(_) => {}
                None => {
                    self.values[w.0] = Some(r);
                    self.trail.push(w);
                }
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let w = self.trail.pop().unwrap();
            self.values[w.0] = None;
        }
    }

    fn run(&mut self, depth: usize, limit: Option<usize>, out: &mut Vec<GlobalSection>) {
        if limit.is_some_and(|l| out.len() >= l) {
            return;
        }
        if depth == self.maximal.len() {
            let atoms = self.values.iter().map(|v| v.expect("every context lies below a maximal one")).collect();
            out.push(GlobalSection { atoms });
            return;
        }
        let m = self.maximal[depth];
        for a in 0..self.poset.context(m).len() {
            let mark = self.trail.len();
            if self.assign(m, a) {
                self.run(depth + 1, limit, out);
            }
            self.undo_to(mark);
        }
    }
}

/// Every global section, in lexicographic order of the atoms chosen at the
/// maximal contexts (taken in id order). Branches on the first maximal
/// context run in parallel; the result order does not depend on scheduling.
pub fn global_sections_sigma(poset: &ContextPoset) -> Vec<GlobalSection> {
    let maximal = poset.maximal();
    let Some(&first) = maximal.first() else { return Vec::new() };
    (0..poset.context(first).len())
        .into_par_iter()
        .map(|a| {
            let mut search = Search::new(poset);
            let mut out = Vec::new();
            if search.assign(first, a) {
                search.run(1, None, &mut out);
            }
            out
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// At most `limit` global sections, sequentially, in the same order.
pub fn global_sections_limited(poset: &ContextPoset, limit: usize) -> Vec<GlobalSection> {
    let mut search = Search::new(poset);
    let mut out = Vec::new();
    search.run(0, Some(limit), &mut out);
    out
}

pub fn has_global_section(poset: &ContextPoset) -> bool {
    !global_sections_limited(poset, 1).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contexts::{generate_poset, SeedBasis};
    use crate::linalg::Projector;

    #[test]
    fn small_posets() {
        let two = generate_poset(2, &[SeedBasis::new(vec![Projector::coordinate(2, &[0]), Projector::coordinate(2, &[1])])]).unwrap();
        assert_eq!(global_sections_sigma(&two).len(), 2);
        let atoms = (0..4).map(|i| Projector::coordinate(4, &[i])).collect();
        let four = generate_poset(4, &[SeedBasis::new(atoms)]).unwrap();
        let sections = global_sections_sigma(&four);
        assert_eq!(sections.len(), 4);
        assert!(sections.iter().all(|s| s.is_compatible(&four)));
        assert_eq!(global_sections_limited(&four, 2).len(), 2);
    }
}
