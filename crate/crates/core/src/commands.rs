//! Subcommand implementations. Each returns JSON, a plain table and, where it
//! makes sense, a DOT rendering; the binary only picks one and prints it.

use std::fmt::Write as _;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::contexts::{ContextId, ContextPoset, ContextSet};
use crate::dasein::{breve_delta, dasein_inner_global, dasein_proj_global, dasein_sa_global, DaseinisedProposition};
use crate::error::{Error, Result};
use crate::kochen::{kernaghan_system, ks_colorable, parse_system, poset_from_system, BasisSystem};
use crate::linalg::{format_rational, parse_rational, DensityMatrix, Projector, Rational, State};
use crate::presheaf::{global_sections_limited, has_global_section, SpectralPoint};
use crate::probability::{measure, truth_value_probabilistic};
use crate::scenario::{matrix_json, rational_json, Scenario};
use crate::truth::{covariance_check, pseudo_state, truth_value_pseudostate, truth_value_truthobject, TruthObject};

#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub json: Value,
    pub table: String,
    pub dot: Option<String>,
}

impl Output {
    fn new(json: Value, table: String) -> Self {
        Output { json, table, dot: None }
    }

    /// Pretty JSON with a trailing newline.
    pub fn json_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.json).expect("serialisable");
        s.push('\n');
        s
    }
}

/// Structured form of an error, as printed on stderr by the binary.
pub fn error_json(e: &Error) -> Value {
    let mut body = json!({ "kind": e.kind(), "message": e.to_string() });
    match e {
        Error::Parse { line, column, .. } => {
            body["line"] = json!(line);
            body["column"] = json!(column);
        }
        Error::Validation { object, .. } => body["object"] = json!(object),
        _ => {}
    }
    json!({ "error": body })
}

fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let line = |cells: &mut dyn Iterator<Item = &str>, out: &mut String| {
        let parts: Vec<String> = cells.zip(&widths).map(|(c, &w)| format!("{c:<w$}")).collect();
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(&mut headers.iter().copied(), &mut out);
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    line(&mut rule.iter().map(String::as_str), &mut out);
    for r in rows {
        line(&mut r.iter().map(String::as_str), &mut out);
    }
    out
}

/// `P1+P3` style name of the projector selected by `mask` in context `v`.
pub fn mask_name(poset: &ContextPoset, v: ContextId, mask: u64) -> String {
    let ctx = poset.context(v);
    if mask == 0 {
        return "0".into();
    }
    if mask == ctx.full_mask() {
        return "1".into();
    }
    (0..ctx.len()).filter(|&i| mask >> i & 1 == 1).map(|i| poset.atom_name(v, i)).collect::<Vec<_>>().join("+")
}

fn projector_name(poset: &ContextPoset, v: ContextId, p: &Projector) -> String {
    match poset.context(v).mask_of(p) {
        Some(m) => mask_name(poset, v, m),
        None => "?".into(),
    }
}

fn labels(poset: &ContextPoset, set: &ContextSet) -> Vec<String> {
    set.iter().map(|v| poset.label(v).to_string()).collect()
}

fn scope(poset: &ContextPoset, at: Option<&str>) -> Result<Vec<ContextId>> {
    match at {
        Some(l) => Ok(vec![poset.by_label(l)?]),
        None => Ok(poset.ids().collect()),
    }
}

fn parse_r(text: &str) -> Result<Rational> {
    parse_rational(text).ok_or_else(|| Error::BadThreshold(text.to_string()))
}

pub fn contexts(sc: &Scenario) -> Output {
    let poset = &sc.poset;
    let items: Vec<Value> = poset
        .ids()
        .map(|v| {
            let ctx = poset.context(v);
            json!({
                "label": poset.label(v),
                "atoms": (0..ctx.len()).map(|i| json!({
                    "name": poset.atom_name(v, i),
                    "projector": matrix_json(ctx.atom(i).matrix()),
                })).collect::<Vec<_>>(),
                "maximal": poset.is_maximal(v),
                "below": labels(poset, poset.down_set(v)),
            })
        })
        .collect();
    let covers: Vec<Value> =
        poset.covers().into_iter().map(|(a, b)| json!([poset.label(a), poset.label(b)])).collect();
    let rows: Vec<Vec<String>> = poset
        .ids()
        .map(|v| {
            let ctx = poset.context(v);
            vec![
                poset.label(v).to_string(),
                (0..ctx.len()).map(|i| poset.atom_name(v, i)).collect::<Vec<_>>().join(", "),
                if poset.is_maximal(v) { "yes".into() } else { String::new() },
            ]
        })
        .collect();
    Output {
        json: json!({ "dim": poset.dim(), "count": poset.len(), "contexts": items, "covers": covers }),
        table: table(&["context", "atoms", "maximal"], &rows),
        dot: Some(poset.to_dot(None)),
    }
}

fn proposition_entries(
    poset: &ContextPoset,
    ids: &[ContextId],
    projectors: &dyn Fn(ContextId) -> Projector,
) -> (Vec<Value>, Vec<Vec<String>>) {
    let mut items = Vec::new();
    let mut rows = Vec::new();
    for &v in ids {
        let p = projectors(v);
        let name = projector_name(poset, v, &p);
        items.push(json!({ "context": poset.label(v), "projector": matrix_json(p.matrix()), "atoms": name }));
        rows.push(vec![poset.label(v).to_string(), name, p.matrix().to_string()]);
    }
    (items, rows)
}

/// Daseinisation of a proposition/projector (`δ^o`, or `δ^i` with `inner`) or of an operator.
pub fn daseinise(sc: &Scenario, name: &str, inner: bool, at: Option<&str>) -> Result<Output> {
    let poset = &sc.poset;
    let ids = scope(poset, at)?;
    let kind = if inner { "inner" } else { "outer" };
    if let Ok(p) = sc.projector(name) {
        let (items, rows) = if inner {
            let all = dasein_inner_global(p, poset)?;
            proposition_entries(poset, &ids, &|v| all[v.0].clone())
        } else {
            let d = dasein_proj_global(p, poset)?;
            proposition_entries(poset, &ids, &|v| d.at(v).clone())
        };
        return Ok(Output::new(
            json!({ "name": name, "kind": kind, "source": matrix_json(p.matrix()), "contexts": items }),
            table(&["context", "projector", "matrix"], &rows),
        ));
    }
    let op = sc.operator(name).ok_or_else(|| Error::Validation {
        object: name.to_string(),
        message: "no proposition, projector or operator with this name".into(),
    })?;
    let res = op.require_resolution()?;
    let all = dasein_sa_global(res, poset, inner)?;
    let mut items = Vec::new();
    let mut rows = Vec::new();
    for &v in &ids {
        let d = &all[v.0];
        let spectrum: Vec<Value> = d
            .require_resolution()?
            .pairs()
            .iter()
            .map(|(l, p)| json!({ "value": rational_json(l), "projector": projector_name(poset, v, p) }))
            .collect();
        items.push(json!({ "context": poset.label(v), "operator": matrix_json(d.matrix()), "spectrum": spectrum }));
        rows.push(vec![poset.label(v).to_string(), d.matrix().to_string()]);
    }
    Ok(Output::new(
        json!({ "name": name, "kind": kind, "source": matrix_json(op.matrix()), "contexts": items }),
        table(&["context", "operator"], &rows),
    ))
}

/// Sieve `v(δ(P) ∈ T)` at one context or at all of them.
pub fn truth_value(sc: &Scenario, prop: &str, state: &str, at: Option<&str>, r: Option<&str>) -> Result<Output> {
    let poset = &sc.poset;
    let p = sc.projector(prop)?;
    let d = dasein_proj_global(p, poset)?;
    let r = r.map(parse_r).transpose()?;
    let st = sc.state(state)?;
    let t = match (st, &r) {
        (State::Pure(psi), None) => TruthObject::pure(psi, poset)?,
        (State::Pure(psi), Some(r)) => TruthObject::mixed(&DensityMatrix::pure(psi.clone()), r.clone(), poset)?,
        (State::Mixed(rho), r) => TruthObject::mixed(rho, r.clone().unwrap_or_else(Rational::one), poset)?,
    };
    let w = match (st, &r) {
        (State::Pure(psi), None) => Some(pseudo_state(psi, poset)?),
        _ => None,
    };
    let ids = scope(poset, at)?;
    let mut items = Vec::new();
    let mut rows = Vec::new();
    let mut last = None;
    for &v in &ids {
        let s = truth_value_truthobject(&d, &t, poset, v)?;
        if let Some(w) = &w {
            if truth_value_pseudostate(&d, w, poset, v)? != s {
                return Err(Error::IllDefined(format!("pseudo-state and truth-object sieves differ at {}", poset.label(v))));
            }
        }
        let members = labels(poset, s.members());
        rows.push(vec![poset.label(v).to_string(), members.join(", ")]);
        items.push(json!({ "root": poset.label(v), "members": members }));
        last = Some(s);
    }
    let threshold = r.unwrap_or_else(Rational::one);
    let json = if at.is_some() {
        let mut item = items.pop().unwrap();
        item["proposition"] = json!(prop);
        item["state"] = json!(state);
        item["r"] = rational_json(&threshold);
        item
    } else {
        json!({ "proposition": prop, "state": state, "r": rational_json(&threshold), "sieves": items })
    };
    Ok(Output {
        json,
        table: table(&["root", "members"], &rows),
        dot: if at.is_some() { last.map(|s| poset.to_dot(Some(s.members()))) } else { None },
    })
}

pub fn pseudo_state_cmd(sc: &Scenario, state: &str) -> Result<Output> {
    let poset = &sc.poset;
    let psi = match sc.state(state)? {
        State::Pure(psi) => psi,
        State::Mixed(_) => {
            return Err(Error::Validation { object: state.into(), message: "pseudo-states need a pure state".into() })
        }
    };
    let w = pseudo_state(psi, poset)?;
    let ids: Vec<ContextId> = poset.ids().collect();
    let (items, rows) = proposition_entries(poset, &ids, &|v| w.at(v).clone());
    Ok(Output::new(
        json!({ "state": state, "contexts": items }),
        table(&["context", "projector", "matrix"], &rows),
    ))
}

fn density(sc: &Scenario, name: &str) -> Result<DensityMatrix> {
    Ok(match sc.state(name)? {
        State::Pure(psi) => DensityMatrix::pure(psi.clone()),
        State::Mixed(rho) => rho.clone(),
    })
}

/// `μ_ρ(δ^o(P))` at every context.
pub fn measure_cmd(sc: &Scenario, state: &str, subobject: &str) -> Result<Output> {
    let poset = &sc.poset;
    let rho = density(sc, state)?;
    let d = dasein_proj_global(sc.projector(subobject)?, poset)?;
    let mu = measure(&rho, d.subobject(), poset)?;
    let items: Vec<Value> =
        poset.ids().map(|v| json!({ "context": poset.label(v), "value": rational_json(mu.at(v)) })).collect();
    let rows: Vec<Vec<String>> =
        poset.ids().map(|v| vec![poset.label(v).to_string(), format_rational(mu.at(v))]).collect();
    Ok(Output::new(
        json!({ "state": state, "subobject": subobject, "values": items }),
        table(&["context", "measure"], &rows),
    ))
}

/// Parses `V,p/q`; the label itself may contain commas, so split at the last one.
pub fn parse_root(poset: &ContextPoset, text: &str) -> Result<(ContextId, Rational)> {
    let (label, r) = text
        .rsplit_once(',')
        .ok_or_else(|| Error::Validation { object: text.into(), message: "expected CONTEXT,r".into() })?;
    Ok((poset.by_label(label.trim())?, parse_r(r.trim())?))
}

/// Probabilistic truth value at `⟨V, r⟩`: for each `V' ≤ V` the largest admissible `r'`.
pub fn prob_truth(sc: &Scenario, prop: &str, state: &str, root: &str) -> Result<Output> {
    let poset = &sc.poset;
    let (v, r) = parse_root(poset, root)?;
    let rho = density(sc, state)?;
    let d = dasein_proj_global(sc.projector(prop)?, poset)?;
    let sieve = truth_value_probabilistic(&d, &rho, poset, v, r.clone())?;
    let items: Vec<Value> = sieve
        .cutoffs()
        .iter()
        .map(|(w, c)| json!({ "context": poset.label(*w), "cutoff": rational_json(c), "member": *c > Rational::zero() }))
        .collect();
    let rows: Vec<Vec<String>> =
        sieve.cutoffs().iter().map(|(w, c)| vec![poset.label(*w).to_string(), format_rational(c)]).collect();
    Ok(Output::new(
        json!({ "proposition": prop, "state": state, "root": poset.label(v), "r": rational_json(&r), "cutoffs": items }),
        table(&["context", "cutoff"], &rows),
    ))
}

/// Colourability of a basis system (`kernaghan` or a file in the basis text format).
pub fn ks_check(source: &str, with_poset: bool) -> Result<Output> {
    let sys: BasisSystem = if source == "kernaghan" {
        kernaghan_system()
    } else {
        let text = std::fs::read_to_string(source).map_err(|e| Error::Io(format!("{source}: {e}")))?;
        parse_system(&text)?
    };
    ks_check_system(&sys, with_poset)
}

pub fn ks_check_system(sys: &BasisSystem, with_poset: bool) -> Result<Output> {
    let result = ks_colorable(sys);
    let profile: Vec<Value> =
        sys.multiplicity_profile().iter().map(|(m, n)| json!({ "multiplicity": m, "rays": n })).collect();
    let mut json = json!({
        "status": if result.coloring.is_some() { "colorable" } else { "uncolorable" },
        "dim": sys.dim(),
        "rays": sys.rays(),
        "bases": sys.bases().iter().map(|b| b.iter().map(|r| r + 1).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "multiplicity_profile": profile,
        "witness": result.coloring.as_ref().map(|c| c.colors().to_vec()),
        "certificate": result.certificate.as_ref().map(|c| json!({
            "kind": "parity",
            "bases": c.basis_count,
            "multiplicities": c.multiplicities,
            "valid": c.verify(sys),
        })),
    });
    let mut out = String::new();
    writeln!(out, "{}", json["status"].as_str().unwrap()).unwrap();
    writeln!(out, "rays: {}  bases: {}", sys.rays().len(), sys.bases().len()).unwrap();
    if let Some(c) = &result.coloring {
        let white: Vec<String> =
            (0..c.colors().len()).filter(|&r| c.colors()[r] == 1).map(|r| format!("R{}", r + 1)).collect();
        writeln!(out, "white rays: {}", white.join(" ")).unwrap();
    }
    if let Some(c) = &result.certificate {
        writeln!(
            out,
            "parity certificate: {} bases (odd), every ray in an even number of bases: {}",
            c.basis_count,
            if c.verify(sys) { "valid" } else { "invalid" }
        )
        .unwrap();
    }
    if with_poset {
        let poset = poset_from_system(sys)?;
        let exists = has_global_section(&poset);
        json["poset"] = json!({ "contexts": poset.len(), "global_section": exists });
        writeln!(out, "context poset: {} contexts, global section: {}", poset.len(), if exists { "yes" } else { "no" })
            .unwrap();
    }
    Ok(Output::new(json, out))
}

/// Global sections of the spectral presheaf, described by the atom picked at each maximal context.
pub fn global_sections(sc: &Scenario, limit: Option<usize>) -> Output {
    let poset = &sc.poset;
    let sections = global_sections_limited(poset, limit.unwrap_or(usize::MAX));
    let maximal = poset.maximal();
    let items: Vec<Value> = sections
        .iter()
        .map(|s| {
            let mut m = serde_json::Map::new();
            for &v in &maximal {
                m.insert(poset.label(v).to_string(), json!(poset.atom_name(v, s.atom(v))));
            }
            Value::Object(m)
        })
        .collect();
    let headers: Vec<&str> = maximal.iter().map(|&v| poset.label(v)).collect();
    let rows: Vec<Vec<String>> =
        sections.iter().map(|s| maximal.iter().map(|&v| poset.atom_name(v, s.atom(v)).to_string()).collect()).collect();
    Output::new(
        json!({ "count": sections.len(), "complete": limit.is_none_or(|l| sections.len() < l), "sections": items }),
        table(&headers, &rows),
    )
}

/// Checks `l_U(v(δP ∈ T^ψ)_V) = v(δ(UPU†) ∈ T^{Uψ})_{l_U(V)}`.
pub fn covariance(sc: &Scenario, prop: &str, state: &str, unitary: &str, at: Option<&str>) -> Result<Output> {
    let poset = &sc.poset;
    let p = sc.projector(prop)?;
    let psi = match sc.state(state)? {
        State::Pure(psi) => psi,
        State::Mixed(_) => {
            return Err(Error::Validation { object: state.into(), message: "covariance needs a pure state".into() })
        }
    };
    let u = sc.unitary(unitary)?;
    let mut items = Vec::new();
    let mut rows = Vec::new();
    let mut all = true;
    for v in scope(poset, at)? {
        let c = covariance_check(p, psi, u, poset, v, unitary)?;
        let target = c.extended.as_ref().unwrap_or(poset);
        let transported = labels(target, c.transported.members());
        all &= c.holds();
        rows.push(vec![
            poset.label(v).to_string(),
            target.label(c.transported.root()).to_string(),
            if c.holds() { "ok".into() } else { "FAIL".into() },
        ]);
        items.push(json!({
            "context": poset.label(v),
            "image": target.label(c.transported.root()),
            "extended": c.extended.is_some(),
            "transported": transported,
            "recomputed": labels(target, c.recomputed.members()),
            "holds": c.holds(),
        }));
    }
    Ok(Output::new(
        json!({ "proposition": prop, "state": state, "unitary": unitary, "holds": all, "contexts": items }),
        table(&["context", "image", "covariance"], &rows),
    ))
}

/// Parses `CONTEXT:ATOM` where the atom is a name such as `P1` or a 1-based index.
pub fn parse_point(poset: &ContextPoset, text: &str) -> Result<SpectralPoint> {
    let (label, atom) = text
        .rsplit_once(':')
        .ok_or_else(|| Error::Validation { object: text.into(), message: "expected CONTEXT:ATOM".into() })?;
    let v = poset.by_label(label.trim())?;
    let atom = atom.trim();
    let n = poset.context(v).len();
    let index = (0..n)
        .find(|&i| poset.atom_name(v, i) == atom)
        .or_else(|| atom.parse::<usize>().ok().filter(|&k| k >= 1 && k <= n).map(|k| k - 1))
        .ok_or_else(|| Error::Validation { object: text.into(), message: format!("no atom '{atom}' in {label}") })?;
    Ok(SpectralPoint { context: v, atom: index })
}

/// `δ̆(A)` at a spectral point: the pair `(μ, ν)` at every context below the point's context.
pub fn value_interval(sc: &Scenario, op: &str, point: &str) -> Result<Output> {
    let poset = &sc.poset;
    let a = sc
        .operator(op)
        .ok_or_else(|| Error::Validation { object: op.into(), message: "no operator with this name".into() })?
        .require_resolution()?;
    let p = parse_point(poset, point)?;
    let iv = breve_delta(a, poset, p)?;
    let items: Vec<Value> = iv
        .entries()
        .iter()
        .map(|(w, mu, nu)| json!({ "context": poset.label(*w), "lower": rational_json(mu), "upper": rational_json(nu) }))
        .collect();
    let rows: Vec<Vec<String>> = iv
        .entries()
        .iter()
        .map(|(w, mu, nu)| vec![poset.label(*w).to_string(), format_rational(mu), format_rational(nu)])
        .collect();
    Ok(Output::new(
        json!({ "operator": op, "point": { "context": poset.label(p.context), "atom": poset.atom_name(p.context, p.atom) }, "intervals": items }),
        table(&["context", "lower", "upper"], &rows),
    ))
}

fn daseinised(sc: &Scenario) -> Result<Vec<(String, DaseinisedProposition)>> {
    sc.propositions
        .iter()
        .map(|(n, p)| Ok((n.clone(), dasein_proj_global(&p.projector, &sc.poset)?)))
        .collect()
}

/// Everything the scenario defines, in one document.
pub fn report(sc: &Scenario) -> Result<Output> {
    let mut doc = serde_json::Map::new();
    doc.insert("contexts".into(), contexts(sc).json);
    let mut dasein = Vec::new();
    for name in sc.propositions.iter().map(|e| &e.0).chain(sc.operators.iter().map(|e| &e.0)) {
        for inner in [false, true] {
            dasein.push(daseinise(sc, name, inner, None)?.json);
        }
    }
    doc.insert("daseinisation".into(), Value::Array(dasein));
    let mut truth = Vec::new();
    let mut measures = Vec::new();
    for (prop, _) in daseinised(sc)? {
        for (state, _) in &sc.states {
            truth.push(truth_value(sc, &prop, state, None, None)?.json);
            measures.push(measure_cmd(sc, state, &prop)?.json);
            if let Some(r) = &sc.r {
                let root = format!("{},{}", sc.poset.label(ContextId(0)), format_rational(r));
                truth.push(truth_value(sc, &prop, state, None, Some(&format_rational(r)))?.json);
                measures.push(prob_truth(sc, &prop, state, &root)?.json);
            }
            for (u, _) in &sc.unitaries {
                if matches!(sc.state(state)?, State::Pure(_)) {
                    truth.push(covariance(sc, &prop, state, u, None)?.json);
                }
            }
        }
    }
    doc.insert("truth_values".into(), Value::Array(truth));
    doc.insert("measures".into(), Value::Array(measures));
    let pseudo = sc
        .states
        .iter()
        .filter(|(_, s)| matches!(s, State::Pure(_)))
        .map(|(n, _)| Ok(pseudo_state_cmd(sc, n)?.json))
        .collect::<Result<Vec<_>>>()?;
    doc.insert("pseudo_states".into(), Value::Array(pseudo));
    let mut intervals = Vec::new();
    for (op, _) in &sc.operators {
        for v in sc.poset.maximal() {
            for atom in 0..sc.poset.context(v).len() {
                let point = format!("{}:{}", sc.poset.label(v), atom + 1);
                intervals.push(value_interval(sc, op, &point)?.json);
            }
        }
    }
    doc.insert("value_intervals".into(), Value::Array(intervals));
    doc.insert("global_sections".into(), global_sections(sc, None).json);
    let summary = format!(
        "contexts: {}\npropositions: {}\nstates: {}\nglobal sections: {}\n",
        sc.poset.len(),
        sc.propositions.len(),
        sc.states.len(),
        doc["global_sections"]["count"]
    );
    Ok(Output::new(Value::Object(doc), summary))
}
