//! Kochen–Specker colourability of systems of orthogonal bases.

use std::cmp::Reverse;
use std::collections::HashMap;

use num_integer::Integer;

use crate::contexts::{generate_poset, ContextPoset, SeedBasis};
use crate::error::{Error, Result};
use crate::linalg::{Projector, Scalar};

/// Rays (integer vectors up to scale and sign) grouped into orthogonal bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisSystem {
    dim: usize,
    rays: Vec<Vec<i64>>,
    bases: Vec<Vec<usize>>,
}

/// Primitive integer representative with a positive leading nonzero entry.
pub fn canonical_ray(v: &[i64]) -> Option<Vec<i64>> {
    let g = v.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    if g == 0 {
        return None;
    }
    let lead = v.iter().find(|&&x| x != 0).copied().unwrap();
    let sign = if lead < 0 { -1 } else { 1 };
    Some(v.iter().map(|&x| sign * x / g).collect())
}

fn dot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

impl BasisSystem {
    /// Canonicalises rays, deduplicates them and checks every basis is an orthogonal basis.
    ///
    /// Rays are numbered in descending lexicographic order of their canonical
    /// form, so the numbering does not depend on how the input was written.
    pub fn new(dim: usize, bases: &[Vec<Vec<i64>>]) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidSystem("dimension must be at least 2".into()));
        }
        let mut canonical: Vec<Vec<Vec<i64>>> = Vec::with_capacity(bases.len());
        for (b, basis) in bases.iter().enumerate() {
            if basis.len() != dim {
                return Err(Error::InvalidSystem(format!("basis {} has {} vectors, expected {dim}", b + 1, basis.len())));
            }
            let mut rays = Vec::with_capacity(dim);
            for (k, v) in basis.iter().enumerate() {
                if v.len() != dim {
                    return Err(Error::InvalidSystem(format!("basis {} vector {} has length {}", b + 1, k + 1, v.len())));
                }
                rays.push(canonical_ray(v).ok_or_else(|| {
                    Error::InvalidSystem(format!("basis {} vector {} is zero", b + 1, k + 1))
                })?);
            }
            for i in 0..dim {
                for j in i + 1..dim {
                    if dot(&rays[i], &rays[j]) != 0 {
                        return Err(Error::InvalidSystem(format!(
                            "basis {}: vectors {} and {} are not orthogonal",
                            b + 1,
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
            canonical.push(rays);
        }
        let mut rays: Vec<Vec<i64>> = canonical.iter().flatten().cloned().collect();
        rays.sort_by(|a, b| b.cmp(a));
        rays.dedup();
        let index: HashMap<&Vec<i64>, usize> = rays.iter().enumerate().map(|(i, r)| (r, i)).collect();
        let bases = canonical
            .iter()
            .map(|basis| {
                let mut ids: Vec<usize> = basis.iter().map(|r| index[r]).collect();
                ids.sort();
                ids
            })
            .collect();
        Ok(BasisSystem { dim, rays, bases })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn bases(&self) -> &[Vec<usize>] {
        &self.bases
    }

    /// Number of bases each ray belongs to.
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut m = vec![0; self.rays.len()];
        for b in &self.bases {
            for &r in b {
                m[r] += 1;
            }
        }
        m
    }

    /// `multiplicity → number of rays` with that multiplicity.
    pub fn multiplicity_profile(&self) -> Vec<(usize, usize)> {
        let mut counts: HashMap<usize, usize> = HashMap::new();
        for m in self.multiplicities() {
            *counts.entry(m).or_default() += 1;
        }
        let mut out: Vec<(usize, usize)> = counts.into_iter().collect();
        out.sort();
        out
    }

    pub fn ray_projector(&self, r: usize) -> Projector {
        let v: Vec<Scalar> = self.rays[r].iter().map(|&x| Scalar::from_int(x)).collect();
        Projector::onto_ray(&v).expect("rays are nonzero")
    }

    /// Sub-system made of the selected bases, in the given order.
    pub fn subsystem(&self, bases: &[usize]) -> Result<BasisSystem> {
        let raw: Vec<Vec<Vec<i64>>> =
            bases.iter().map(|&b| self.bases[b].iter().map(|&r| self.rays[r].clone()).collect()).collect();
        BasisSystem::new(self.dim, &raw)
    }
}

/// Vectors of Kernaghan's 20-ray, 11-basis proof in dimension 4, column by column.
const KERNAGHAN: [[[i64; 4]; 4]; 11] = [
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 1], [0, 0, 1, -1]],
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 1], [0, 1, 0, -1]],
    [[1, 0, 0, 0], [0, 0, 0, 1], [0, 1, 1, 0], [0, 1, -1, 0]],
    [[-1, 1, 1, 1], [1, -1, 1, 1], [1, 1, -1, 1], [1, 1, 1, -1]],
    [[-1, 1, 1, 1], [1, 1, -1, 1], [1, 0, 1, 0], [0, 1, 0, -1]],
    [[1, -1, 1, 1], [1, 1, -1, 1], [0, 1, 1, 0], [1, 0, 0, -1]],
    [[1, 1, -1, 1], [1, 1, 1, -1], [0, 0, 1, 1], [1, -1, 0, 0]],
    [[0, 1, -1, 0], [1, 0, 0, -1], [1, 1, 1, 1], [1, -1, -1, 1]],
    [[0, 0, 1, -1], [1, -1, 0, 0], [1, 1, 1, 1], [1, 1, -1, -1]],
    [[1, 0, 1, 0], [0, 1, 0, 1], [1, 1, -1, -1], [1, -1, -1, 1]],
];

/// The built-in Kernaghan system.
pub fn kernaghan_system() -> BasisSystem {
    let bases: Vec<Vec<Vec<i64>>> = KERNAGHAN.iter().map(|b| b.iter().map(|v| v.to_vec()).collect()).collect();
    BasisSystem::new(4, &bases).expect("built-in table is orthogonal")
}

/// A {0,1} assignment to the rays of a system.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coloring {
    colors: Vec<u8>,
}

impl Coloring {
    pub fn colors(&self) -> &[u8] {
        &self.colors
    }

    /// Exactly one ray coloured 1 in every basis.
    pub fn is_valid(&self, sys: &BasisSystem) -> bool {
        self.colors.len() == sys.rays.len()
            && sys.bases.iter().all(|b| b.iter().filter(|&&r| self.colors[r] == 1).count() == 1)
    }
}

/// Proof of uncolourability by counting: an odd number of bases, each needing
/// one white ray, while every ray sits in an even number of bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityCertificate {
    pub basis_count: usize,
    pub multiplicities: Vec<usize>,
}

impl ParityCertificate {
    pub fn for_system(sys: &BasisSystem) -> Option<Self> {
        let multiplicities = sys.multiplicities();
        (sys.bases.len() % 2 == 1 && multiplicities.iter().all(|m| m % 2 == 0))
            .then_some(ParityCertificate { basis_count: sys.bases.len(), multiplicities })
    }

    /// Recomputes the counts from the system and re-derives the contradiction:
    /// a colouring would make the number of (basis, white ray) incidences both
    /// `basis_count` (odd) and `Σ mult(r)·c(r)` (even).
    pub fn verify(&self, sys: &BasisSystem) -> bool {
        self.basis_count == sys.bases.len()
            && self.multiplicities == sys.multiplicities()
            && self.multiplicities.iter().sum::<usize>() == sys.bases.len() * sys.dim
            && self.basis_count % 2 == 1
            && self.multiplicities.iter().all(|m| m % 2 == 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorabilityResult {
    /// Lexicographically least valid colouring in ray order, if any.
    pub coloring: Option<Coloring>,
    /// Present when the system is uncolourable and the parity argument applies.
    pub certificate: Option<ParityCertificate>,
}

struct Solver<'a> {
    sys: &'a BasisSystem,
    ray_bases: Vec<Vec<usize>>,
    colors: Vec<Option<u8>>,
    trail: Vec<usize>,
}

impl<'a> Solver<'a> {
    fn new(sys: &'a BasisSystem) -> Self {
        let mut ray_bases = vec![Vec::new(); sys.rays.len()];
        for (b, basis) in sys.bases.iter().enumerate() {
            for &r in basis {
                ray_bases[r].push(b);
            }
        }
        Solver { sys, ray_bases, colors: vec![None; sys.rays.len()], trail: Vec::new() }
    }

    /// Sets a colour and propagates forced values; false on contradiction.
    fn set(&mut self, ray: usize, c: u8) -> bool {
        let mut queue = vec![(ray, c)];
        while let Some((r, c)) = queue.pop() {
            match self.colors[r] {
                Some(x) if x == c => continue,
                Some(_) => return false,
                None => {
                    self.colors[r] = Some(c);
                    self.trail.push(r);
                }
            }
            for &b in &self.ray_bases[r] {
                let basis = &self.sys.bases[b];
                let ones = basis.iter().filter(|&&x| self.colors[x] == Some(1)).count();
                let open: Vec<usize> = basis.iter().copied().filter(|&x| self.colors[x].is_none()).collect();
                match (ones, open.len()) {
                    (o, _) if o > 1 => return false,
                    (1, _) => queue.extend(open.into_iter().map(|x| (x, 0))),
                    (0, 0) => return false,
                    (0, 1) => queue.push((open[0], 1)),
                    _ => {}
                }
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let r = self.trail.pop().unwrap();
            self.colors[r] = None;
        }
    }

    /// Visits solutions in lexicographic order; the visitor returns false to stop.
    fn search(&mut self, from: usize, visit: &mut dyn FnMut(&[Option<u8>]) -> bool) -> bool {
        let Some(next) = (from..self.colors.len()).find(|&r| self.colors[r].is_none()) else {
            return visit(&self.colors);
        };
        for c in [0u8, 1] {
            let mark = self.trail.len();
            if self.set(next, c) && !self.search(next + 1, visit) {
                self.undo_to(mark);
                return false;
            }
            self.undo_to(mark);
        }
        true
    }
}

/// Exhaustive backtracking with unit propagation.
pub fn ks_colorable(sys: &BasisSystem) -> ColorabilityResult {
    let mut solver = Solver::new(sys);
    let mut found = None;
    solver.search(0, &mut |colors| {
        found = Some(Coloring { colors: colors.iter().map(|c| c.unwrap()).collect() });
        false
    });
    let certificate = if found.is_none() { ParityCertificate::for_system(sys) } else { None };
    ColorabilityResult { coloring: found, certificate }
}

/// Number of valid colourings.
pub fn count_colorings(sys: &BasisSystem) -> usize {
    let mut solver = Solver::new(sys);
    let mut n = 0;
    solver.search(0, &mut |_| {
        n += 1;
        true
    });
    n
}

/// Context poset seeded by the rank-one projectors of each basis; bases are
/// named `B1..` and rays `R1..` in canonical ray order.
pub fn poset_from_system(sys: &BasisSystem) -> Result<ContextPoset> {
    let seeds: Vec<SeedBasis> = sys
        .bases
        .iter()
        .enumerate()
        .map(|(b, basis)| {
            SeedBasis::named(
                format!("B{}", b + 1),
                basis.iter().map(|&r| sys.ray_projector(r)).collect(),
                Some(basis.iter().map(|&r| format!("R{}", r + 1)).collect()),
            )
        })
        .collect();
    generate_poset(sys.dim, &seeds)
}

/// Violations of the value rules for a total valuation on rays.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FuncReport {
    /// `(basis, Σ V(P))` for bases whose values do not sum to 1.
    pub sum_rule: Vec<(usize, i64)>,
    /// Rays whose value is not 0 or 1.
    pub range: Vec<usize>,
}

impl FuncReport {
    pub fn is_empty(&self) -> bool {
        self.sum_rule.is_empty() && self.range.is_empty()
    }
}

pub fn func_check(valuation: &[i64], sys: &BasisSystem) -> Result<FuncReport> {
    if valuation.len() != sys.rays.len() {
        return Err(Error::InvalidSystem(format!(
            "valuation has {} entries for {} rays",
            valuation.len(),
            sys.rays.len()
        )));
    }
    let range = (0..valuation.len()).filter(|&r| !matches!(valuation[r], 0 | 1)).collect();
    let sum_rule = sys
        .bases
        .iter()
        .enumerate()
        .filter_map(|(b, basis)| {
            let s: i64 = basis.iter().map(|&r| valuation[r]).sum();
            (s != 1).then_some((b, s))
        })
        .collect();
    Ok(FuncReport { sum_rule, range })
}

/// Parses one basis per line, vectors written `(a,b,c,d)` and separated by
/// whitespace; `#` starts a comment.
pub fn parse_system(text: &str) -> Result<BasisSystem> {
    let mut bases: Vec<Vec<Vec<i64>>> = Vec::new();
    let mut dim = None;
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let err = |col: usize, message: String| Error::Parse { line: line_no, column: col + 1, message };
        let mut basis = Vec::new();
        let bytes = line.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            match bytes[i] {
                b' ' | b'\t' | b'\r' => i += 1,
                b'(' => {
                    let close = line[i..].find(')').ok_or_else(|| err(i, "unclosed '('".into()))? + i;
                    let mut v = Vec::new();
                    let mut offset = i + 1;
                    for part in line[i + 1..close].split(',') {
                        let t = part.trim();
                        let x = t.parse::<i64>().map_err(|_| err(offset, format!("expected integer, found '{t}'")))?;
                        v.push(x);
                        offset += part.len() + 1;
                    }
                    basis.push(v);
                    i = close + 1;
                }
                _ => return Err(err(i, format!("unexpected character '{}'", line[i..].chars().next().unwrap()))),
            }
        }
        let d = *dim.get_or_insert(basis.first().map_or(0, Vec::len));
        if basis.len() != d || basis.iter().any(|v| v.len() != d) {
            return Err(err(0, format!("expected {d} vectors of length {d}")));
        }
        bases.push(basis);
    }
    let dim = dim.ok_or(Error::Parse { line: 1, column: 1, message: "no bases given".into() })?;
    BasisSystem::new(dim, &bases)
}

/// Rays ordered by decreasing multiplicity, then index; handy for reports.
pub fn rays_by_multiplicity(sys: &BasisSystem) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = sys.multiplicities().into_iter().enumerate().collect();
    out.sort_by_key(|&(r, m)| (Reverse(m), r));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernaghan_table() {
        let sys = kernaghan_system();
        assert_eq!(sys.rays().len(), 20);
        assert_eq!(sys.bases().len(), 11);
        assert_eq!(sys.multiplicity_profile(), vec![(2, 18), (4, 2)]);
        let result = ks_colorable(&sys);
        assert!(result.coloring.is_none());
        assert!(result.certificate.unwrap().verify(&sys));
    }

    #[test]
    fn colouring_counts() {
        let e = |i: usize| (0..4).map(|k| (k == i) as i64).collect::<Vec<_>>();
        let single = BasisSystem::new(4, &[(0..4).map(e).collect()]).unwrap();
        assert_eq!(count_colorings(&single), 4);
        let h = vec![vec![1, 1, 1, 1], vec![1, 1, -1, -1], vec![1, -1, 1, -1], vec![1, -1, -1, 1]];
        let two = BasisSystem::new(4, &[(0..4).map(e).collect(), h]).unwrap();
        assert_eq!(count_colorings(&two), 16);
        let c = ks_colorable(&two).coloring.unwrap();
        assert!(c.is_valid(&two));
        assert!(func_check(&c.colors().iter().map(|&x| x as i64).collect::<Vec<_>>(), &two).unwrap().is_empty());
        let zeros = func_check(&[0; 8], &two).unwrap();
        assert_eq!(zeros.sum_rule.len(), 2);
    }

    #[test]
    fn parser_reports_positions() {
        let sys = parse_system("# two bases\n(1,0) (0,1)\n(1,1) (1,-1)\n").unwrap();
        assert_eq!(sys.rays().len(), 4);
        match parse_system("(1,0) (0,x)") {
            Err(Error::Parse { line: 1, column, .. }) => assert_eq!(column, 10),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_system("(1,0) (1,1)"), Err(Error::InvalidSystem(_))));
    }

    #[test]
    fn shared_plane_without_shared_ray() {
        // Colourings ignore the common coarsening {e1+e2, e3+e4}; sections do not.
        let e = |i: usize| (0..4).map(|k| (k == i) as i64).collect::<Vec<_>>();
        let b2 = vec![vec![1, 1, 0, 0], vec![1, -1, 0, 0], vec![0, 0, 1, 1], vec![0, 0, 1, -1]];
        let sys = BasisSystem::new(4, &[(0..4).map(e).collect(), b2]).unwrap();
        assert_eq!(count_colorings(&sys), 16);
        let poset = poset_from_system(&sys).unwrap();
        assert_eq!(crate::presheaf::global_sections_sigma(&poset).len(), 8);
    }
}
