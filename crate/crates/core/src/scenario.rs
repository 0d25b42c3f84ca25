//! JSON scenario files: operators, states, seed bases and propositions over one Hilbert space.

use std::collections::HashSet;
use std::fmt;
use std::marker::PhantomData;
use std::path::Path;

use serde::de::{Deserializer, MapAccess, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::{json, Value};

use crate::contexts::{generate_poset, ContextPoset, SeedBasis};
use crate::error::{Error, Result};
use crate::linalg::{
    format_rational, orthogonal_sum, parse_rational, DensityMatrix, Matrix, Operator, Projector, Rational, Scalar,
    SpectralResolution, State, StateVector,
};

/// Map that keeps file order and rejects repeated keys.
#[derive(Clone, Debug, PartialEq)]
pub struct Named<T>(pub Vec<(String, T)>);

impl<T> Default for Named<T> {
    fn default() -> Self {
        Named(Vec::new())
    }
}

impl<T: Serialize> Serialize for Named<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_map(self.0.iter().map(|(k, v)| (k, v)))
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Named<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V<T>(PhantomData<T>);
        impl<'de, T: Deserialize<'de>> Visitor<'de> for V<T> {
            type Value = Named<T>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object of named entries")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<Named<T>, A::Error> {
                let mut out: Vec<(String, T)> = Vec::new();
                while let Some(key) = map.next_key::<String>()? {
                    if out.iter().any(|(k, _)| *k == key) {
                        return Err(serde::de::Error::custom(format!("duplicate name '{key}'")));
                    }
                    let value = map.next_value()?;
                    out.push((key, value));
                }
                Ok(Named(out))
            }
        }
        d.deserialize_map(V(PhantomData))
    }
}

/// `3`, `"p/q"` or `"1.25"`.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum RawReal {
    Int(i64),
    Text(String),
}

/// A real entry or `{"re": .., "im": ..}`.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum RawScalar {
    Real(RawReal),
    Complex { re: RawReal, im: RawReal },
}

/// Matrix given by full rows, a diagonal, one ray or several orthogonal rays.
#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawMatrix {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<RawScalar>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diag: Option<Vec<RawReal>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray: Option<Vec<RawScalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rays: Option<Vec<Vec<RawScalar>>>,
}

/// A projector by name or by literal.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum RawProjectorRef {
    Name(String),
    Literal(RawMatrix),
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawEigenpair {
    pub value: RawReal,
    pub projector: RawProjectorRef,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawOperator {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<RawScalar>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diag: Option<Vec<RawReal>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<Vec<RawEigenpair>>,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawComponent {
    pub weight: RawReal,
    pub state: RawStateRef,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum RawStateRef {
    Name(String),
    Literal(RawState),
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawState {
    /// Exactly normalised vector.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<RawScalar>>,
    /// Any nonzero vector; the state is its normalised ray.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray: Option<Vec<RawScalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixture: Option<Vec<RawComponent>>,
    /// Diagonal density matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diag: Option<Vec<RawReal>>,
    /// Density matrix, certified against `mixture`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<RawScalar>>>,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawSeed {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub atoms: Vec<RawProjectorRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atom_names: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawProposition {
    pub operator: String,
    pub interval: [RawReal; 2],
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<RawReal>,
}

/// The file as written.
#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawScenario {
    pub dim: usize,
    pub field: String,
    #[serde(default)]
    pub operators: Named<RawOperator>,
    #[serde(default)]
    pub projectors: Named<RawMatrix>,
    #[serde(default)]
    pub states: Named<RawState>,
    pub seeds: Vec<RawSeed>,
    #[serde(default)]
    pub propositions: Named<RawProposition>,
    #[serde(default)]
    pub unitaries: Named<RawMatrix>,
    #[serde(default)]
    pub options: RawOptions,
}

/// `Ê[A ∈ [lo, hi]]` for a named operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proposition {
    pub operator: String,
    pub lo: Rational,
    pub hi: Rational,
    pub projector: Projector,
}

/// A validated scenario together with its context poset.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub dim: usize,
    pub operators: Vec<(String, Operator)>,
    pub projectors: Vec<(String, Projector)>,
    pub states: Vec<(String, State)>,
    pub propositions: Vec<(String, Proposition)>,
    pub unitaries: Vec<(String, Matrix)>,
    pub r: Option<Rational>,
    pub poset: ContextPoset,
}

fn invalid(object: &str, message: impl Into<String>) -> Error {
    Error::Validation { object: object.to_string(), message: message.into() }
}

fn real(obj: &str, r: &RawReal) -> Result<Rational> {
    match r {
        RawReal::Int(n) => Ok(Rational::from_integer((*n).into())),
        RawReal::Text(s) => parse_rational(s).ok_or_else(|| invalid(obj, format!("'{s}' is not a rational number"))),
    }
}

fn scalar(obj: &str, s: &RawScalar) -> Result<Scalar> {
    match s {
        RawScalar::Real(r) => Ok(Scalar::real(real(obj, r)?)),
        RawScalar::Complex { re, im } => Ok(Scalar::new(real(obj, re)?, real(obj, im)?)),
    }
}

fn vector(obj: &str, dim: usize, v: &[RawScalar]) -> Result<Vec<Scalar>> {
    if v.len() != dim {
        return Err(invalid(obj, format!("vector has {} components, expected {dim}", v.len())));
    }
    v.iter().map(|s| scalar(obj, s)).collect()
}

fn rows(obj: &str, dim: usize, rows: &[Vec<RawScalar>]) -> Result<Matrix> {
    if rows.len() != dim {
        return Err(invalid(obj, format!("matrix has {} rows, expected {dim}", rows.len())));
    }
    let parsed = rows.iter().map(|r| r.iter().map(|s| scalar(obj, s)).collect()).collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(parsed).map_err(|e| invalid(obj, e.to_string()))
}

fn diag(obj: &str, dim: usize, d: &[RawReal]) -> Result<Matrix> {
    if d.len() != dim {
        return Err(invalid(obj, format!("diagonal has {} entries, expected {dim}", d.len())));
    }
    Ok(Matrix::diag(&d.iter().map(|x| real(obj, x)).collect::<Result<Vec<_>>>()?))
}

fn exactly_one(obj: &str, present: &[(&str, bool)]) -> Result<()> {
    let given: Vec<&str> = present.iter().filter(|(_, p)| *p).map(|(n, _)| *n).collect();
    if given.len() != 1 {
        let names: Vec<&str> = present.iter().map(|(n, _)| *n).collect();
        return Err(invalid(obj, format!("expected exactly one of {}, found {}", names.join("/"), given.len())));
    }
    Ok(())
}

fn raw_matrix(obj: &str, dim: usize, m: &RawMatrix) -> Result<Matrix> {
    exactly_one(
        obj,
        &[("matrix", m.matrix.is_some()), ("diag", m.diag.is_some()), ("ray", m.ray.is_some()), ("rays", m.rays.is_some())],
    )?;
    if let Some(r) = &m.matrix {
        return rows(obj, dim, r);
    }
    if let Some(d) = &m.diag {
        return diag(obj, dim, d);
    }
    let rays: Vec<&Vec<RawScalar>> = m.ray.iter().chain(m.rays.iter().flatten()).collect();
    let mut parts = Vec::with_capacity(rays.len());
    for r in rays {
        let v = vector(obj, dim, r)?;
        parts.push(Projector::onto_ray(&v).ok_or_else(|| invalid(obj, "zero ray"))?);
    }
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            if !parts[i].orthogonal_to(&parts[j]) {
                return Err(invalid(obj, format!("rays {} and {} are not orthogonal", i + 1, j + 1)));
            }
        }
    }
    Ok(orthogonal_sum(dim, &parts).into_matrix())
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Scenario::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Scenario> {
        let raw: RawScenario = serde_json::from_str(text)
            .map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
        Scenario::from_raw(&raw)
    }

    pub fn from_raw(raw: &RawScenario) -> Result<Scenario> {
        let dim = raw.dim;
        if dim == 0 {
            return Err(invalid("dim", "must be positive"));
        }
        if raw.field != "rational" {
            return Err(invalid("field", format!("unsupported number field '{}'", raw.field)));
        }
        let mut names = HashSet::new();
        let all_names = raw
            .operators
            .0
            .iter()
            .map(|e| &e.0)
            .chain(raw.projectors.0.iter().map(|e| &e.0))
            .chain(raw.states.0.iter().map(|e| &e.0))
            .chain(raw.propositions.0.iter().map(|e| &e.0))
            .chain(raw.unitaries.0.iter().map(|e| &e.0));
        for n in all_names {
            if !names.insert(n.as_str()) {
                return Err(invalid(n, "name is defined more than once"));
            }
        }

        let mut projectors = Vec::new();
        for (name, m) in &raw.projectors.0 {
            let p = Projector::new(raw_matrix(name, dim, m)?).map_err(|e| invalid(name, e.to_string()))?;
            projectors.push((name.clone(), p));
        }
        let lookup_projector = |obj: &str, r: &RawProjectorRef| -> Result<Projector> {
            match r {
                RawProjectorRef::Name(n) => projectors
                    .iter()
                    .find(|(k, _)| k == n)
                    .map(|(_, p)| p.clone())
                    .ok_or_else(|| invalid(obj, format!("unknown projector '{n}'"))),
                RawProjectorRef::Literal(m) => {
                    Projector::new(raw_matrix(obj, dim, m)?).map_err(|e| invalid(obj, e.to_string()))
                }
            }
        };

        let mut operators = Vec::new();
        for (name, o) in &raw.operators.0 {
            exactly_one(
                name,
                &[("matrix", o.matrix.is_some()), ("diag", o.diag.is_some()), ("resolution", o.resolution.is_some())],
            )?;
            let op = if let Some(pairs) = &o.resolution {
                let pairs = pairs
                    .iter()
                    .map(|e| Ok((real(name, &e.value)?, lookup_projector(name, &e.projector)?)))
                    .collect::<Result<Vec<_>>>()?;
                Operator::from_resolution(SpectralResolution::from_pairs(dim, pairs).map_err(|e| invalid(name, e.to_string()))?)
            } else {
                let m = match (&o.matrix, &o.diag) {
                    (Some(r), _) => rows(name, dim, r)?,
                    (_, Some(d)) => diag(name, dim, d)?,
                    _ => unreachable!(),
                };
                Operator::resolved(m, None).map_err(|e| invalid(name, e.to_string()))?
            };
            operators.push((name.clone(), op));
        }

        let mut states: Vec<(String, State)> = Vec::new();
        for (name, s) in &raw.states.0 {
            let state = build_state(name, dim, s, &states)?;
            states.push((name.clone(), state));
        }

        let mut seeds = Vec::new();
        for (i, seed) in raw.seeds.iter().enumerate() {
            let obj = seed.name.clone().unwrap_or_else(|| format!("seeds[{i}]"));
            let atoms = seed.atoms.iter().map(|a| lookup_projector(&obj, a)).collect::<Result<Vec<_>>>()?;
            let atom_names = match &seed.atom_names {
                Some(n) if n.len() != atoms.len() => {
                    return Err(invalid(&obj, format!("{} atom names for {} atoms", n.len(), atoms.len())))
                }
                Some(n) => Some(n.clone()),
                None => seed.atoms.iter().map(|a| match a {
                    RawProjectorRef::Name(n) => Some(n.clone()),
                    RawProjectorRef::Literal(_) => None,
                }).collect(),
            };
            seeds.push(match &seed.name {
                Some(n) => SeedBasis::named(n.clone(), atoms, atom_names),
                None => SeedBasis { name: None, atoms, atom_names },
            });
        }
        if seeds.is_empty() {
            return Err(invalid("seeds", "at least one seed basis is required"));
        }
        let poset = generate_poset(dim, &seeds).map_err(|e| invalid("seeds", e.to_string()))?;

        let mut propositions = Vec::new();
        for (name, p) in &raw.propositions.0 {
            let op = operators
                .iter()
                .find(|(k, _)| *k == p.operator)
                .map(|(_, o)| o)
                .ok_or_else(|| invalid(name, format!("unknown operator '{}'", p.operator)))?;
            let lo = real(name, &p.interval[0])?;
            let hi = real(name, &p.interval[1])?;
            if lo > hi {
                return Err(invalid(name, "interval is empty (lower end above upper end)"));
            }
            let projector = op.require_resolution()?.projector_in(&lo, &hi);
            propositions.push((name.clone(), Proposition { operator: p.operator.clone(), lo, hi, projector }));
        }

        let mut unitaries = Vec::new();
        for (name, m) in &raw.unitaries.0 {
            let u = raw_matrix(name, dim, m)?;
            if !u.is_unitary() {
                return Err(invalid(name, "matrix is not unitary"));
            }
            unitaries.push((name.clone(), u));
        }

        let r = raw.options.r.as_ref().map(|r| real("options.r", r)).transpose()?;
        if let Some(r) = &r {
            if *r <= Rational::from_integer(0.into()) || *r > Rational::from_integer(1.into()) {
                return Err(invalid("options.r", "threshold must lie in (0, 1]"));
            }
        }
        Ok(Scenario { dim, operators, projectors, states, propositions, unitaries, r, poset })
    }

    pub fn operator(&self, name: &str) -> Option<&Operator> {
        self.operators.iter().find(|(k, _)| k == name).map(|(_, o)| o)
    }

    pub fn state(&self, name: &str) -> Result<&State> {
        self.states
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, s)| s)
            .ok_or_else(|| invalid(name, "no state with this name"))
    }

    pub fn unitary(&self, name: &str) -> Result<&Matrix> {
        self.unitaries
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, u)| u)
            .ok_or_else(|| invalid(name, "no unitary with this name"))
    }

    /// A proposition's spectral projector, or a named projector.
    pub fn projector(&self, name: &str) -> Result<&Projector> {
        if let Some((_, p)) = self.propositions.iter().find(|(k, _)| k == name) {
            return Ok(&p.projector);
        }
        self.projectors
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, p)| p)
            .ok_or_else(|| invalid(name, "no proposition or projector with this name"))
    }
}

fn build_state(name: &str, dim: usize, s: &RawState, known: &[(String, State)]) -> Result<State> {
    exactly_one(
        name,
        &[
            ("vector", s.vector.is_some()),
            ("ray", s.ray.is_some()),
            ("mixture", s.mixture.is_some()),
            ("diag", s.diag.is_some()),
        ],
    )?;
    if s.matrix.is_some() && s.mixture.is_none() {
        return Err(invalid(name, "a density matrix needs a certifying mixture"));
    }
    let wrap = |e: Error| invalid(name, e.to_string());
    if let Some(v) = &s.vector {
        return StateVector::new(vector(name, dim, v)?).map(State::Pure).map_err(wrap);
    }
    if let Some(v) = &s.ray {
        return StateVector::from_ray(vector(name, dim, v)?).map(State::Pure).map_err(wrap);
    }
    if let Some(d) = &s.diag {
        if d.len() != dim {
            return Err(invalid(name, format!("diagonal has {} entries, expected {dim}", d.len())));
        }
        let w = d.iter().map(|x| real(name, x)).collect::<Result<Vec<_>>>()?;
        return DensityMatrix::diagonal(&w).map(State::Mixed).map_err(wrap);
    }
    let mut decomposition = Vec::new();
    for (k, c) in s.mixture.as_ref().unwrap().iter().enumerate() {
        let obj = format!("{name}.mixture[{k}]");
        let psi = match &c.state {
            RawStateRef::Name(n) => match known.iter().find(|(k, _)| k == n) {
                Some((_, State::Pure(psi))) => psi.clone(),
                Some(_) => return Err(invalid(&obj, format!("'{n}' is not a pure state"))),
                None => return Err(invalid(&obj, format!("unknown state '{n}'"))),
            },
            RawStateRef::Literal(inner) => match build_state(&obj, dim, inner, known)? {
                State::Pure(psi) => psi,
                State::Mixed(_) => return Err(invalid(&obj, "mixture components must be pure")),
            },
        };
        decomposition.push((real(&obj, &c.weight)?, psi));
    }
    match &s.matrix {
        Some(m) => DensityMatrix::certified(&rows(name, dim, m)?, decomposition),
        None => DensityMatrix::from_decomposition(decomposition),
    }
    .map(State::Mixed)
    .map_err(wrap)
}

/// Rational as used in scenario files.
pub fn rational_json(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

pub fn scalar_json(s: &Scalar) -> Value {
    if s.is_real() {
        rational_json(s.re())
    } else {
        json!({ "re": format_rational(s.re()), "im": format_rational(s.im()) })
    }
}

/// Matrix literal in the scenario syntax: `{"diag": ..}` when diagonal, else `{"matrix": ..}`.
pub fn matrix_json(m: &Matrix) -> Value {
    match m.real_diagonal() {
        Some(d) if m.is_diagonal() => json!({ "diag": d.iter().map(rational_json).collect::<Vec<_>>() }),
        _ => json!({ "matrix": m.rows().map(|r| r.iter().map(scalar_json).collect::<Vec<_>>()).collect::<Vec<_>>() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational;

    const SPIN: &str = r#"{
        "dim": 4, "field": "rational",
        "operators": { "Sz": { "diag": [2, 0, 0, -2] } },
        "states": { "psi": { "vector": [1, 0, 0, 0] } },
        "seeds": [ { "atoms": [ {"diag": [1,0,0,0]}, {"diag": [0,1,0,0]}, {"diag": [0,0,1,0]}, {"diag": [0,0,0,1]} ] } ],
        "propositions": {
            "high": { "operator": "Sz", "interval": ["13/10", "23/10"] },
            "low": { "operator": "Sz", "interval": [-3, -1] },
            "none": { "operator": "Sz", "interval": ["1/2", "3/2"] }
        }
    }"#;

    #[test]
    fn propositions_resolve_to_spectral_projectors() {
        let sc = Scenario::from_json(SPIN).unwrap();
        assert_eq!(sc.projector("high").unwrap(), &Projector::coordinate(4, &[0]));
        assert_eq!(sc.projector("low").unwrap(), &Projector::coordinate(4, &[3]));
        assert!(sc.projector("none").unwrap().is_zero());
        assert_eq!(sc.poset.len(), 14);
        assert_eq!(sc.propositions[0].1.lo, rational(13, 10));
    }

    #[test]
    fn errors_carry_positions_and_names() {
        match Scenario::from_json("{\n  \"dim\": 4,\n  \"field\": \"rational\",\n  \"seeds\": [ }") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        let dup = SPIN.replace("\"psi\": { \"vector\": [1, 0, 0, 0] }", "\"Sz\": { \"vector\": [1, 0, 0, 0] }");
        assert!(matches!(Scenario::from_json(&dup), Err(Error::Validation { object, .. }) if object == "Sz"));
        let bad = SPIN.replace("[1, 0, 0, 0] }", "[1, 1, 0, 0] }");
        assert!(matches!(Scenario::from_json(&bad), Err(Error::Validation { object, .. }) if object == "psi"));
        let twice = SPIN.replace("\"states\"", "\"operators\": {}, \"states\"");
        assert!(matches!(Scenario::from_json(&twice), Err(Error::Parse { .. })));
    }
}
