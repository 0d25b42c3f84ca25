//! Measures on clopen sub-objects and probabilistic truth values over
//! pairs `⟨V, r⟩` of a context and a threshold in `(0, 1]`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::contexts::{ContextId, ContextPoset};
use crate::dasein::DaseinisedProposition;
use crate::error::{Error, Result};
use crate::linalg::{format_rational, DensityMatrix, Projector, Rational};
use crate::presheaf::ClopenSubobject;

/// Element of `Γ[0,1]^⪰`: a `[0,1]`-valued function on contexts that can only
/// grow when passing to smaller contexts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrderReversingWeight {
    poset: u64,
    values: Vec<Rational>,
}

impl OrderReversingWeight {
    pub fn new(poset: &ContextPoset, values: Vec<Rational>) -> Result<Self> {
        if values.len() != poset.len() {
            return Err(Error::PosetMismatch);
        }
        for v in poset.ids() {
            let x = &values[v.0];
            if x.is_negative() || *x > Rational::one() {
                return Err(Error::Validation {
                    object: poset.label(v).to_string(),
                    message: format!("weight {} outside [0,1]", format_rational(x)),
                });
            }
            for w in poset.down_set(v).iter() {
                if values[w.0] < *x {
                    return Err(Error::Validation {
                        object: poset.label(w).to_string(),
                        message: format!("weight decreases from {}", poset.label(v)),
                    });
                }
            }
        }
        Ok(OrderReversingWeight { poset: poset.fingerprint(), values })
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn at(&self, v: ContextId) -> &Rational {
        &self.values[v.0]
    }

    fn ensure(&self, poset: &ContextPoset) -> Result<()> {
        if self.poset != poset.fingerprint() || self.values.len() != poset.len() {
            return Err(Error::PosetMismatch);
        }
        Ok(())
    }

    /// Pointwise supremum, again order reversing.
    pub fn join(&self, other: &OrderReversingWeight) -> Result<OrderReversingWeight> {
        if self.poset != other.poset {
            return Err(Error::PosetMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a.max(b).clone()).collect();
        Ok(OrderReversingWeight { poset: self.poset, values })
    }
}

/// `μ_ρ(S)(V) = tr(ρ P_{S_V})`.
pub fn measure(rho: &DensityMatrix, s: &ClopenSubobject, poset: &ContextPoset) -> Result<OrderReversingWeight> {
    if !s.belongs_to(poset) {
        return Err(Error::PosetMismatch);
    }
    rho.matrix().ensure_dim(poset.dim())?;
    let values = poset
        .ids()
        .map(|v| {
            let ctx = poset.context(v);
            let mut total = Rational::zero();
            for (i, a) in ctx.atoms().iter().enumerate() {
                if s.contains(v, i) {
                    total += rho.matrix().trace_product(a.matrix()).re();
                }
            }
            total
        })
        .collect();
    let w = OrderReversingWeight { poset: poset.fingerprint(), values };
    debug_assert!(OrderReversingWeight::new(poset, w.values.clone()).is_ok());
    Ok(w)
}

/// Outcome of checking the measure axioms on sample sub-objects.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MeasureReport {
    pub pairs_checked: usize,
    pub unit_ok: bool,
    /// Human-readable witnesses of failed axioms.
    pub failures: Vec<String>,
}

impl MeasureReport {
    pub fn passed(&self) -> bool {
        self.unit_ok && self.failures.is_empty()
    }
}

/// Checks `μ(Σ) = 1`, order reversal, and `μ(S ∨ T) + μ(S ∧ T) = μ(S) + μ(T)` on all sample pairs.
pub fn check_measure_axioms<F>(mu: F, samples: &[ClopenSubobject], poset: &ContextPoset) -> Result<MeasureReport>
where
    F: Fn(&ClopenSubobject) -> Result<OrderReversingWeight>,
{
    let mut report = MeasureReport::default();
    let unit = mu(&ClopenSubobject::full(poset))?;
    report.unit_ok = unit.values.iter().all(One::is_one);
    let values: Vec<OrderReversingWeight> = samples.iter().map(&mu).collect::<Result<_>>()?;
    for (i, w) in values.iter().enumerate() {
        if let Err(e) = OrderReversingWeight::new(poset, w.values.clone()) {
            report.failures.push(format!("sample {i}: {e}"));
        }
    }
    for i in 0..samples.len() {
        for j in i..samples.len() {
            let join = mu(&samples[i].join(&samples[j])?)?;
            let meet = mu(&samples[i].meet(&samples[j])?)?;
            report.pairs_checked += 1;
            for v in poset.ids() {
                let lhs = join.at(v) + meet.at(v);
                let rhs = values[i].at(v) + values[j].at(v);
                if lhs != rhs {
                    report.failures.push(format!(
                        "modular law fails for samples {i},{j} at {}: {} ≠ {}",
                        poset.label(v),
                        format_rational(&lhs),
                        format_rational(&rhs)
                    ));
                }
            }
        }
    }
    Ok(report)
}

/// `m(P) = μ(S_P)(V)` for every projection `P` of every context, where `S_P`
/// is the daseinisation of `P` (whose component at any `V ∋ P` is `P` itself).
///
/// Fails with `IllDefined` when two contexts containing `P` disagree or when
/// additivity over orthogonal projections of a context breaks.
pub fn extract_state_weights<F>(mu: F, poset: &ContextPoset) -> Result<Vec<(Projector, Rational)>>
where
    F: Fn(&ClopenSubobject) -> Result<OrderReversingWeight>,
{
    let mut m: BTreeMap<Projector, (Rational, String)> = BTreeMap::new();
    for v in poset.ids() {
        let ctx = poset.context(v);
        let mut atom_values = Vec::with_capacity(ctx.len());
        for mask in 0..=ctx.full_mask() {
            let p = ctx.projector_of(mask);
            let s = crate::dasein::dasein_proj_global(&p, poset)?;
            let value = mu(s.subobject())?.at(v).clone();
            if mask.count_ones() == 1 {
                atom_values.push(value.clone());
            }
            // Single-atom masks precede every mask containing them.
            let additive: Rational = (0..ctx.len()).filter(|i| mask >> i & 1 == 1).map(|i| &atom_values[i]).sum();
            if additive != value {
                return Err(Error::IllDefined(format!(
                    "m is not additive on {} at {}: {} ≠ {}",
                    p,
                    ctx.label(),
                    format_rational(&value),
                    format_rational(&additive)
                )));
            }
            match m.get(&p) {
                Some((prev, at)) if *prev != value => {
                    return Err(Error::IllDefined(format!(
                        "m({}) is {} at {} but {} at {}",
                        p,
                        format_rational(prev),
                        at,
                        format_rational(&value),
                        ctx.label()
                    )));
                }
                Some(_) => {}
                None => {
                    m.insert(p, (value, ctx.label().to_string()));
                }
            }
        }
    }
    Ok(m.into_iter().map(|(p, (v, _))| (p, v)).collect())
}

/// A sieve on `⟨V, r⟩` in the product of the context poset with `(0,1)_L`:
/// `{⟨V', r'⟩ : V' ≤ V, 0 < r' ≤ cutoff(V')}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProductSieve {
    root: ContextId,
    r: Rational,
    cutoff: Vec<(ContextId, Rational)>,
}

impl ProductSieve {
    pub fn root(&self) -> (ContextId, &Rational) {
        (self.root, &self.r)
    }

    /// `(V', cutoff(V'))` for every `V' ≤ V`, in id order.
    pub fn cutoffs(&self) -> &[(ContextId, Rational)] {
        &self.cutoff
    }

    pub fn cutoff(&self, v: ContextId) -> Option<&Rational> {
        self.cutoff.iter().find(|(w, _)| *w == v).map(|(_, c)| c)
    }

    pub fn contains(&self, v: ContextId, r: &Rational) -> bool {
        r.is_positive() && self.cutoff(v).is_some_and(|c| r <= c)
    }

    pub fn is_empty(&self) -> bool {
        self.cutoff.iter().all(|(_, c)| c.is_zero())
    }

    /// Union of sieves on the same root.
    pub fn join(&self, other: &ProductSieve) -> Result<ProductSieve> {
        if self.root != other.root || self.r != other.r {
            return Err(Error::RootMismatch(format!("{:?}", self.root), format!("{:?}", other.root)));
        }
        let cutoff = self
            .cutoff
            .iter()
            .zip(&other.cutoff)
            .map(|((v, a), (_, b))| (*v, a.max(b).clone()))
            .collect();
        Ok(ProductSieve { root: self.root, r: self.r.clone(), cutoff })
    }

    /// Pullback to a smaller stage `⟨V', r'⟩ ≤ ⟨V, r⟩`.
    pub fn restrict(&self, poset: &ContextPoset, v: ContextId, r: Rational) -> Result<ProductSieve> {
        poset.ensure_leq(v, self.root)?;
        check_threshold(&r)?;
        if r > self.r {
            return Err(Error::BadThreshold(format_rational(&r)));
        }
        let cutoff = poset
            .down_set(v)
            .iter()
            .map(|w| (w, self.cutoff(w).expect("w ≤ root").min(&r).clone()))
            .collect();
        Ok(ProductSieve { root: v, r, cutoff })
    }
}

fn check_threshold(r: &Rational) -> Result<()> {
    if !r.is_positive() || *r > Rational::one() {
        return Err(Error::BadThreshold(format_rational(r)));
    }
    Ok(())
}

/// `l(γ)(⟨V,r⟩) = {⟨V',r'⟩ ≤ ⟨V,r⟩ | γ(V') ≥ r'}`.
pub fn l_map(gamma: &OrderReversingWeight, poset: &ContextPoset, root: ContextId, r: Rational) -> Result<ProductSieve> {
    gamma.ensure(poset)?;
    check_threshold(&r)?;
    let cutoff = poset.down_set(root).iter().map(|w| (w, gamma.at(w).min(&r).clone())).collect();
    Ok(ProductSieve { root, r, cutoff })
}

/// `v(A ∈ Δ, ρ)(⟨V,r⟩) = {⟨V',r'⟩ ≤ ⟨V,r⟩ | tr(ρ δ(E[A∈Δ])_{V'}) ≥ r'}`.
///
/// Computed from the definition and checked against `l ∘ μ_ρ`.
pub fn truth_value_probabilistic(
    prop: &DaseinisedProposition,
    rho: &DensityMatrix,
    poset: &ContextPoset,
    root: ContextId,
    r: Rational,
) -> Result<ProductSieve> {
    check_threshold(&r)?;
    if !prop.belongs_to(poset) {
        return Err(Error::PosetMismatch);
    }
    let cutoff = poset
        .down_set(root)
        .iter()
        .map(|w| {
            let t = rho.matrix().trace_product(prop.at(w).matrix()).re().clone();
            (w, t.min(r.clone()))
        })
        .collect();
    let direct = ProductSieve { root, r: r.clone(), cutoff };
    let via_l = l_map(&measure(rho, prop.subobject(), poset)?, poset, root, r)?;
    if direct != via_l {
        return Err(Error::IllDefined("probabilistic truth value differs from l ∘ μ".into()));
    }
    Ok(direct)
}
