use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};

use rayon::prelude::*;

use super::context::{Context, MAX_ATOMS};
use super::set::ContextSet;
use crate::error::{Error, Result};
use crate::linalg::{orthogonal_sum, Matrix, Projector};

/// Index of a context inside its poset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContextId(pub usize);

/// A resolution of the identity used to seed a poset, with optional names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedBasis {
    pub name: Option<String>,
    pub atoms: Vec<Projector>,
    pub atom_names: Option<Vec<String>>,
}

impl SeedBasis {
    pub fn new(atoms: Vec<Projector>) -> Self {
        SeedBasis { name: None, atoms, atom_names: None }
    }

    pub fn named(name: impl Into<String>, atoms: Vec<Projector>, atom_names: Option<Vec<String>>) -> Self {
        SeedBasis { name: Some(name.into()), atoms, atom_names }
    }
}

#[derive(Clone, Debug)]
struct Seed {
    name: String,
    atoms: Vec<Projector>,
    atom_names: Vec<String>,
    context: Context,
}

/// The finite poset of contexts generated by seed bases and closed under
/// every nontrivial coarsening. `V' ≤ V` means `V'` is a sub-algebra of `V`.
#[derive(Clone, Debug)]
pub struct ContextPoset {
    dim: usize,
    contexts: Vec<Context>,
    atom_names: Vec<Vec<String>>,
    // leq[sub * n + sup]
    leq: Vec<bool>,
    // restrict[sup * n + sub][atom of sup] = atom of sub
    restrict: Vec<Option<Vec<u8>>>,
    below: Vec<ContextSet>,
    maximal: Vec<bool>,
    seeds: Vec<Seed>,
    fingerprint: u64,
}

/// Result of transporting a poset along a unitary.
#[derive(Clone, Debug)]
pub struct UnitaryImage {
    /// The enlarged poset, when images had to be added.
    pub extended: Option<ContextPoset>,
    /// Image of each original context, as an id of the target poset.
    pub images: Vec<ContextId>,
}

impl UnitaryImage {
    pub fn target<'a>(&'a self, original: &'a ContextPoset) -> &'a ContextPoset {
        self.extended.as_ref().unwrap_or(original)
    }
}

/// All set partitions of `0..k` as block-index vectors (restricted growth strings).
pub fn set_partitions(k: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, k: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == k {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max + 1 {
            if i == 0 && b > 0 {
                break;
            }
            cur.push(b);
            go(i + 1, k, if b > max || i == 0 { b } else { max }, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k == 0 {
        return out;
    }
    go(0, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

impl ContextPoset {
    /// Builds the coarsening closure of the seeds.
    pub fn generate(dim: usize, seeds: &[SeedBasis]) -> Result<Self> {
        if seeds.is_empty() {
            return Err(Error::Validation { object: "seeds".into(), message: "at least one seed basis is required".into() });
        }
        let resolved = resolve_seeds(dim, seeds)?;
        let mut index: HashMap<Vec<Projector>, usize> = HashMap::new();
        let mut contexts: Vec<Context> = Vec::new();
        for seed in &resolved {
            let k = seed.atoms.len();
            for partition in set_partitions(k) {
                let blocks = partition.iter().max().map_or(0, |m| m + 1);
                if blocks < 2 {
                    continue;
                }
                let atoms: Vec<Projector> = (0..blocks)
                    .map(|b| {
                        orthogonal_sum(dim, seed.atoms.iter().zip(&partition).filter(|(_, &pb)| pb == b).map(|(a, _)| a))
                    })
                    .collect();
                let ctx = Context::new_unchecked(atoms, String::new());
                if !index.contains_key(ctx.atoms()) {
                    index.insert(ctx.atoms().to_vec(), contexts.len());
                    contexts.push(ctx);
                }
            }
        }
        contexts.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
        assign_labels(&mut contexts, &resolved);
        contexts.sort_by(|a, b| {
            (std::cmp::Reverse(a.len()), a.label(), a.order_key())
                .cmp(&(std::cmp::Reverse(b.len()), b.label(), b.order_key()))
        });
        let mut poset = ContextPoset::assemble(dim, contexts, resolved);
        poset.assign_atom_names();
        Ok(poset)
    }

    fn assemble(dim: usize, contexts: Vec<Context>, seeds: Vec<Seed>) -> Self {
        let n = contexts.len();
        let rows: Vec<Vec<Option<Vec<u8>>>> = (0..n)
            .into_par_iter()
            .map(|sup| {
                (0..n)
                    .map(|sub| {
                        if sub == sup {
                            Some((0..contexts[sup].len() as u8).collect())
                        } else if contexts[sub].len() < contexts[sup].len() {
                            contexts[sub].coarsening_map(&contexts[sup])
                        } else {
                            None
                        }
                    })
                    .collect()
            })
            .collect();
        let restrict: Vec<Option<Vec<u8>>> = rows.into_iter().flatten().collect();
        let mut leq = vec![false; n * n];
        for sup in 0..n {
            for sub in 0..n {
                leq[sub * n + sup] = restrict[sup * n + sub].is_some();
            }
        }
        let below = (0..n)
            .map(|v| ContextSet::from_ids(n, (0..n).filter(|&w| leq[w * n + v]).map(ContextId)))
            .collect();
        let maximal = (0..n).map(|v| (0..n).all(|w| w == v || !leq[v * n + w])).collect();
        let mut hasher = DefaultHasher::new();
        dim.hash(&mut hasher);
        for c in &contexts {
            c.atoms().hash(&mut hasher);
        }
        ContextPoset {
            dim,
            atom_names: vec![Vec::new(); n],
            contexts,
            leq,
            restrict,
            below,
            maximal,
            seeds,
            fingerprint: hasher.finish(),
        }
    }

    fn assign_atom_names(&mut self) {
        for i in 0..self.contexts.len() {
            let ctx = &self.contexts[i];
            let mut names = None;
            for seed in &self.seeds {
                if let Some(map) = ctx.coarsening_map(&seed.context) {
                    let blocks = seed_blocks(seed, &map, ctx.len());
                    names = Some(
                        blocks
                            .iter()
                            .map(|blk| blk.iter().map(|&a| seed.atom_names[a].as_str()).collect::<Vec<_>>().join("+"))
                            .collect(),
                    );
                    break;
                }
            }
            self.atom_names[i] = names.unwrap_or_else(|| (0..ctx.len()).map(|a| format!("a{}", a + 1)).collect());
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.contexts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contexts.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = ContextId> + '_ {
        (0..self.contexts.len()).map(ContextId)
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    pub fn context(&self, id: ContextId) -> &Context {
        &self.contexts[id.0]
    }

    pub fn label(&self, id: ContextId) -> &str {
        self.contexts[id.0].label()
    }

    /// Display name of an atom, as a `+`-joined list of seed atom names.
    pub fn atom_name(&self, id: ContextId, atom: usize) -> &str {
        &self.atom_names[id.0][atom]
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn same_as(&self, other: &ContextPoset) -> bool {
        self.fingerprint == other.fingerprint && self.contexts == other.contexts
    }

    pub fn ensure_same(&self, other: &ContextPoset) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::PosetMismatch)
        }
    }

    pub fn seed_names(&self) -> Vec<&str> {
        self.seeds.iter().map(|s| s.name.as_str()).collect()
    }

    pub fn seed_bases(&self) -> Vec<SeedBasis> {
        self.seeds
            .iter()
            .map(|s| SeedBasis::named(s.name.clone(), s.atoms.clone(), Some(s.atom_names.clone())))
            .collect()
    }

    /// `sub ≤ sup`.
    pub fn leq(&self, sub: ContextId, sup: ContextId) -> bool {
        self.leq[sub.0 * self.len() + sup.0]
    }

    /// For `sub ≤ sup`: the atom of `sub` above each atom of `sup`.
    pub fn restriction(&self, sup: ContextId, sub: ContextId) -> Option<&[u8]> {
        self.restrict[sup.0 * self.len() + sub.0].as_deref()
    }

    pub fn restrict_atom(&self, sup: ContextId, sub: ContextId, atom: usize) -> Result<usize> {
        self.restriction(sup, sub)
            .map(|m| m[atom] as usize)
            .ok_or_else(|| self.not_sub(sub, sup))
    }

    /// Image of an atom mask of `sup` in `sub`.
    pub fn restrict_mask(&self, sup: ContextId, sub: ContextId, mask: u64) -> u64 {
        let map = self.restriction(sup, sub).expect("restrict_mask requires sub ≤ sup");
        let mut out = 0u64;
        for (i, &j) in map.iter().enumerate() {
            if mask >> i & 1 == 1 {
                out |= 1 << j;
            }
        }
        out
    }

    /// `↓V`, including `V`.
    pub fn down_set(&self, v: ContextId) -> &ContextSet {
        &self.below[v.0]
    }

    pub fn is_maximal(&self, v: ContextId) -> bool {
        self.maximal[v.0]
    }

    pub fn maximal(&self) -> Vec<ContextId> {
        self.ids().filter(|&v| self.maximal[v.0]).collect()
    }

    pub fn find(&self, ctx: &Context) -> Option<ContextId> {
        self.contexts.iter().position(|c| c == ctx).map(ContextId)
    }

    /// Looks a context up by label; separators (`,`, spaces, hats) are ignored
    /// as a fallback so `V_{P2,P3}` finds `V_{P2P3}`.
    pub fn by_label(&self, label: &str) -> Result<ContextId> {
        if let Some(i) = self.contexts.iter().position(|c| c.label() == label) {
            return Ok(ContextId(i));
        }
        let norm = normalize_label(label);
        let hits: Vec<usize> =
            (0..self.len()).filter(|&i| normalize_label(self.contexts[i].label()) == norm).collect();
        match hits.as_slice() {
            [i] => Ok(ContextId(*i)),
            _ => Err(Error::UnknownContext(label.to_string())),
        }
    }

    pub fn down_set_of(&self, ctx: &Context) -> Result<Vec<ContextId>> {
        let v = self.find(ctx).ok_or_else(|| Error::UnknownContext(ctx.label().to_string()))?;
        Ok(self.down_set(v).iter().collect())
    }

    /// Greatest common lower bound, when one exists in the poset.
    pub fn meet(&self, a: ContextId, b: ContextId) -> Option<ContextId> {
        let common = self.down_set(a).intersection(self.down_set(b));
        let found = common.iter().find(|&c| common.iter().all(|d| self.leq(d, c)));
        found
    }

    pub(crate) fn not_sub(&self, sub: ContextId, sup: ContextId) -> Error {
        Error::NotSubcontext { sub: self.label(sub).to_string(), sup: self.label(sup).to_string() }
    }

    pub fn ensure_leq(&self, sub: ContextId, sup: ContextId) -> Result<()> {
        if self.leq(sub, sup) {
            Ok(())
        } else {
            Err(self.not_sub(sub, sup))
        }
    }

    /// Pairs `(lower, upper)` of the covering relation.
    pub fn covers(&self) -> Vec<(ContextId, ContextId)> {
        let mut out = Vec::new();
        for up in self.ids() {
            for lo in self.down_set(up).iter() {
                if lo == up {
                    continue;
                }
                let between = self.down_set(up).iter().any(|m| m != lo && m != up && self.leq(lo, m));
                if !between {
                    out.push((lo, up));
                }
            }
        }
        out
    }

    /// Hasse diagram in Graphviz DOT; `highlight` fills the given contexts.
    pub fn to_dot(&self, highlight: Option<&ContextSet>) -> String {
        let mut s = String::from("digraph contexts {\n  rankdir=BT;\n  node [shape=box];\n");
        for v in self.ids() {
            let fill = match highlight {
                Some(h) if h.contains(v) => ", style=filled, fillcolor=lightblue",
                _ => "",
            };
            let _ = writeln!(s, "  c{} [label=\"{}\"{}];", v.0, escape_dot(self.label(v)), fill);
        }
        for (lo, up) in self.covers() {
            let _ = writeln!(s, "  c{} -> c{};", lo.0, up.0);
        }
        let top: Vec<String> = self.maximal().iter().map(|v| format!("c{}", v.0)).collect();
        let _ = writeln!(s, "  {{ rank=same; {} }}", top.join("; "));
        s.push_str("}\n");
        s
    }

    /// Conjugates every context by `u`. Without `extend`, images must already be
    /// in the poset; with it, the conjugated seeds are added and the closure regenerated.
    pub fn apply_unitary(&self, u: &Matrix, g_label: &str, extend: bool) -> Result<UnitaryImage> {
        u.ensure_dim(self.dim)?;
        if !u.is_unitary() {
            return Err(Error::NotUnitary);
        }
        let images: Vec<Option<ContextId>> = self.contexts.iter().map(|c| self.find(&c.conjugate_by(u))).collect();
        if let Some(missing) = images.iter().position(Option::is_none) {
            if !extend {
                return Err(Error::ImageOutsidePoset(self.contexts[missing].label().to_string()));
            }
            let mut seeds = self.seed_bases();
            for s in &self.seeds {
                let atoms: Vec<Projector> = s.atoms.iter().map(|a| a.conjugate_by(u)).collect();
                let names = s.atom_names.iter().map(|n| format!("{g_label}{n}")).collect();
                seeds.push(SeedBasis::named(format!("{g_label}{}", s.name), atoms, Some(names)));
            }
            let extended = ContextPoset::generate(self.dim, &seeds)?;
            let images = self
                .contexts
                .iter()
                .map(|c| extended.find(&c.conjugate_by(u)).expect("conjugated seed closure contains image"))
                .collect();
            return Ok(UnitaryImage { extended: Some(extended), images });
        }
        Ok(UnitaryImage { extended: None, images: images.into_iter().map(Option::unwrap).collect() })
    }
}

/// Labels follow the seed that generates a context: a full seed keeps the
/// seed's name; a coarsening lists its blocks except the "rest" block
/// (the largest, ties going to the block holding the seed's last atom).
fn assign_labels(contexts: &mut [Context], seeds: &[Seed]) {
    let mut used: HashMap<String, usize> = HashMap::new();
    for ctx in contexts.iter_mut() {
        let mut label = String::from("V?");
        for seed in seeds {
            let Some(map) = ctx.coarsening_map(&seed.context) else { continue };
            let mut blocks = seed_blocks(seed, &map, ctx.len());
            blocks.sort();
            label = if blocks.iter().all(|b| b.len() == 1) {
                seed.name.clone()
            } else {
                let k = seed.atoms.len();
                let rest = (0..blocks.len())
                    .max_by_key(|&b| (blocks[b].len(), blocks[b].contains(&(k - 1))))
                    .unwrap();
                let listed: Vec<&Vec<usize>> =
                    blocks.iter().enumerate().filter(|&(b, _)| b != rest).map(|(_, blk)| blk).collect();
                let names: Vec<String> = listed
                    .iter()
                    .map(|blk| blk.iter().map(|&a| seed.atom_names[a].as_str()).collect::<Vec<_>>().join("+"))
                    .collect();
                let sep = if listed.iter().all(|b| b.len() == 1) { "" } else { "," };
                format!("V_{{{}}}", names.join(sep))
            };
            break;
        }
        let count = used.entry(label.clone()).or_insert(0);
        if *count > 0 {
            label.push_str(&"'".repeat(*count));
        }
        *count += 1;
        ctx.set_label(label);
    }
}

/// Blocks of seed-atom indices, one per atom of the coarser context.
fn seed_blocks(seed: &Seed, map: &[u8], blocks: usize) -> Vec<Vec<usize>> {
    // `map` is indexed by the seed context's canonical atom order; translate to seed order.
    let mut out = vec![Vec::new(); blocks];
    for (k, atom) in seed.atoms.iter().enumerate() {
        let canonical = seed.context.atoms().iter().position(|a| a == atom).unwrap();
        out[map[canonical] as usize].push(k);
    }
    out
}

fn resolve_seeds(dim: usize, seeds: &[SeedBasis]) -> Result<Vec<Seed>> {
    let mut names: Vec<(Projector, String)> = Vec::new();
    let mut counter = 0usize;
    let mut out: Vec<Seed> = Vec::new();
    for (i, s) in seeds.iter().enumerate() {
        let default_name = if seeds.len() == 1 { "V".to_string() } else { format!("V{}", i + 1) };
        let name = s.name.clone().unwrap_or(default_name);
        let object = || format!("seed {name}");
        if s.atoms.len() > MAX_ATOMS {
            return Err(Error::TooManyAtoms { found: s.atoms.len(), max: MAX_ATOMS });
        }
        for a in &s.atoms {
            a.ensure_dim(dim)?;
        }
        let context = Context::from_atoms(s.atoms.clone(), Some(name.clone()))?;
        if let Some(given) = &s.atom_names {
            if given.len() != s.atoms.len() {
                return Err(Error::Validation { object: object(), message: "atom name count differs from atom count".into() });
            }
        }
        let mut atom_names = Vec::with_capacity(s.atoms.len());
        for (k, a) in s.atoms.iter().enumerate() {
            if let Some((_, n)) = names.iter().find(|(p, _)| p == a) {
                atom_names.push(n.clone());
                continue;
            }
            let n = match &s.atom_names {
                Some(given) => given[k].clone(),
                None => loop {
                    counter += 1;
                    let candidate = format!("P{counter}");
                    if !names.iter().any(|(_, n)| *n == candidate) {
                        break candidate;
                    }
                },
            };
            names.push((a.clone(), n.clone()));
            atom_names.push(n);
        }
        if out.iter().any(|o| o.context == context) {
            continue;
        }
        out.push(Seed { name, atoms: s.atoms.clone(), atom_names, context });
    }
    Ok(out)
}

fn normalize_label(label: &str) -> String {
    label.chars().filter(|c| !matches!(c, ',' | ' ' | '^' | '\\')).collect::<String>().replace("hat", "")
}

fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Poset generated by `seeds` in dimension `dim`.
pub fn generate_poset(dim: usize, seeds: &[SeedBasis]) -> Result<ContextPoset> {
    ContextPoset::generate(dim, seeds)
}
