use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::pbw::{partitions, Pbw};
use crate::error::{Error, Result};
use crate::exactla::{format_rational, parse_rational, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModuleKind {
    Vacuum,
    Verma,
    DualVerma,
}

impl ModuleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModuleKind::Vacuum => "Vacuum",
            ModuleKind::Verma => "Verma",
            ModuleKind::DualVerma => "DualVerma",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "vacuum" => Ok(ModuleKind::Vacuum),
            "verma" => Ok(ModuleKind::Verma),
            "dualverma" | "dual-verma" | "dual" => Ok(ModuleKind::DualVerma),
            other => Err(Error::Parse(format!("unknown module kind {other:?}"))),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModuleId {
    kind: ModuleKind,
    c: Rational,
    h: Rational,
}

impl ModuleId {
    pub fn vacuum(c: Rational) -> Self {
        ModuleId { kind: ModuleKind::Vacuum, c, h: Rational::zero() }
    }

    pub fn verma(c: Rational, h: Rational) -> Self {
        ModuleId { kind: ModuleKind::Verma, c, h }
    }

    pub fn dual_verma(c: Rational, h: Rational) -> Self {
        ModuleId { kind: ModuleKind::DualVerma, c, h }
    }

    pub fn new(kind: ModuleKind, c: Rational, h: Rational) -> Result<Self> {
        match kind {
            ModuleKind::Vacuum if !h.is_zero() => {
                Err(Error::ModuleMismatch("vacuum module must have h = 0".into()))
            }
            _ => Ok(ModuleId { kind, c, h }),
        }
    }

    pub fn kind(&self) -> ModuleKind {
        self.kind
    }

    pub fn c(&self) -> &Rational {
        &self.c
    }

    pub fn h(&self) -> &Rational {
        &self.h
    }

    /// The Verma module underlying a dual (or the module itself otherwise).
    pub fn underlying_verma(&self) -> ModuleId {
        ModuleId::verma(self.c.clone(), self.h.clone())
    }

    pub fn is_legal(&self, m: &Pbw) -> bool {
        self.kind != ModuleKind::Vacuum || !m.has_part_one()
    }

    pub fn basis_at_degree(&self, d: u32) -> Vec<Pbw> {
        let min = if self.kind == ModuleKind::Vacuum { 2 } else { 1 };
        partitions(d, min)
    }

    pub fn to_json(&self) -> Value {
        json!({"kind": self.kind.as_str(), "c": format_rational(&self.c), "h": format_rational(&self.h)})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let kind = v
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("module.kind missing".into()))
            .and_then(ModuleKind::parse)?;
        let c = rational_field(v, "c")?.ok_or_else(|| Error::Parse("module.c missing".into()))?;
        let h = rational_field(v, "h")?.unwrap_or_else(Rational::zero);
        ModuleId::new(kind, c, h)
    }
}

impl fmt::Debug for ModuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(c={}, h={})", self.kind.as_str(), format_rational(&self.c), format_rational(&self.h))
    }
}

fn rational_field(v: &Value, key: &str) -> Result<Option<Rational>> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => parse_rational(s).map(Some),
        Some(Value::Number(n)) => parse_rational(&n.to_string()).map(Some),
        Some(other) => Err(Error::Parse(format!("{key}: expected rational, got {other}"))),
    }
}

pub(crate) type Terms = BTreeMap<Pbw, Rational>;

pub(crate) fn add_term(terms: &mut Terms, m: Pbw, x: Rational) {
    if x.is_zero() {
        return;
    }
    match terms.entry(m) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(x);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += x;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

pub(crate) fn add_scaled(terms: &mut Terms, other: &Terms, s: &Rational) {
    if s.is_zero() {
        return;
    }
    for (m, x) in other {
        add_term(terms, m.clone(), x * s);
    }
}

/// A finite linear combination of PBW monomials in a fixed module.
#[derive(Clone, PartialEq, Eq)]
pub struct ModuleElement {
    module: ModuleId,
    terms: Terms,
}

impl ModuleElement {
    pub fn zero(module: &ModuleId) -> Self {
        ModuleElement { module: module.clone(), terms: Terms::new() }
    }

    /// The lowest-weight vector (vacuum, `v_h`, or the dual of `v_h`).
    pub fn lowest(module: &ModuleId) -> Self {
        Self::monomial(module, Pbw::empty())
    }

    pub fn monomial(module: &ModuleId, m: Pbw) -> Self {
        let mut terms = Terms::new();
        terms.insert(m, Rational::one());
        ModuleElement { module: module.clone(), terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Pbw, Rational)>>(module: &ModuleId, terms: I) -> Result<Self> {
        let mut out = Terms::new();
        for (m, x) in terms {
            if !module.is_legal(&m) {
                return Err(Error::IllegalMonomial(m.parts().to_vec(), format!("{module:?}")));
            }
            add_term(&mut out, m, x);
        }
        Ok(ModuleElement { module: module.clone(), terms: out })
    }

    /// Convenience constructor from `(parts, coefficient)` pairs.
    pub fn from_parts(module: &ModuleId, terms: &[(&[u32], Rational)]) -> Result<Self> {
        let mut v = Vec::with_capacity(terms.len());
        for (p, x) in terms {
            v.push((Pbw::new(p.to_vec())?, x.clone()));
        }
        Self::from_terms(module, v)
    }

    pub(crate) fn from_raw(module: &ModuleId, terms: Terms) -> Self {
        ModuleElement { module: module.clone(), terms }
    }

    pub fn module(&self) -> &ModuleId {
        &self.module
    }

    pub fn terms(&self) -> &BTreeMap<Pbw, Rational> {
        &self.terms
    }

    pub fn coeff(&self, m: &Pbw) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Distinct degrees present, ascending.
    pub fn degrees(&self) -> Vec<u32> {
        let mut d: Vec<u32> = self.terms.keys().map(Pbw::degree).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// The single degree of a homogeneous nonzero element; zero counts as degree 0.
    pub fn homogeneous_degree(&self) -> Result<u32> {
        match self.degrees().as_slice() {
            [] => Ok(0),
            [d] => Ok(*d),
            ds => Err(Error::NotHomogeneous(ds.to_vec())),
        }
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(Pbw::degree).max().unwrap_or(0)
    }

    pub fn component(&self, d: u32) -> Self {
        let terms = self.terms.iter().filter(|(m, _)| m.degree() == d).map(|(m, x)| (m.clone(), x.clone())).collect();
        ModuleElement { module: self.module.clone(), terms }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut out = Terms::new();
        add_scaled(&mut out, &self.terms, s);
        ModuleElement { module: self.module.clone(), terms: out }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.terms.clone();
        add_scaled(&mut out, &other.terms, &Rational::one());
        Ok(ModuleElement { module: self.module.clone(), terms: out })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.terms.clone();
        add_scaled(&mut out, &other.terms, &-Rational::one());
        Ok(ModuleElement { module: self.module.clone(), terms: out })
    }

    pub fn add_scaled(&mut self, other: &Self, s: &Rational) -> Result<()> {
        self.check_same(other)?;
        add_scaled(&mut self.terms, &other.terms, s);
        Ok(())
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.module != other.module {
            return Err(Error::ModuleMismatch(format!("{:?} vs {:?}", self.module, other.module)));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .rev()
            .map(|(m, x)| json!({"parts": m.parts(), "coeff": format_rational(x)}))
            .collect();
        json!({"module": self.module.to_json(), "terms": terms})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let module = ModuleId::from_json(v.get("module").ok_or_else(|| Error::Parse("element.module missing".into()))?)?;
        Self::terms_from_json(&module, v.get("terms").unwrap_or(&Value::Null))
    }

    /// Parses a `terms` array for an already known module.
    pub fn terms_from_json(module: &ModuleId, terms: &Value) -> Result<Self> {
        let arr = terms.as_array().ok_or_else(|| Error::Parse("terms must be an array".into()))?;
        let mut out = Vec::with_capacity(arr.len());
        for t in arr {
            let parts = t
                .get("parts")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse("term.parts missing".into()))?
                .iter()
                .map(|p| {
                    p.as_u64()
                        .and_then(|n| u32::try_from(n).ok())
                        .ok_or_else(|| Error::Parse(format!("bad part {p}")))
                })
                .collect::<Result<Vec<u32>>>()?;
            let coeff = rational_field(t, "coeff")?.unwrap_or_else(Rational::one);
            out.push((Pbw::new(parts)?, coeff));
        }
        Self::from_terms(module, out)
    }
}

impl fmt::Debug for ModuleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.terms.iter().rev().map(|(m, x)| format!("{}*{}", format_rational(x), m)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A functional on a Verma module, stored against the canonical PBW basis:
/// `(degree, index into basis_at_degree)` to value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualElement {
    module: ModuleId,
    coords: BTreeMap<(u32, usize), Rational>,
}

impl DualElement {
    pub fn new(c: Rational, h: Rational, coords: BTreeMap<(u32, usize), Rational>) -> Self {
        let coords = coords.into_iter().filter(|(_, x)| !x.is_zero()).collect();
        DualElement { module: ModuleId::dual_verma(c, h), coords }
    }

    pub fn module(&self) -> &ModuleId {
        &self.module
    }

    pub fn coords(&self) -> &BTreeMap<(u32, usize), Rational> {
        &self.coords
    }

    /// Same functional, keyed by the PBW monomial whose dual basis vector it weights.
    pub fn to_element(&self) -> Result<ModuleElement> {
        let mut terms = Terms::new();
        let mut bases: BTreeMap<u32, Vec<Pbw>> = BTreeMap::new();
        for ((d, i), x) in &self.coords {
            let basis = bases.entry(*d).or_insert_with(|| self.module.basis_at_degree(*d));
            let m = basis
                .get(*i)
                .ok_or_else(|| Error::Dimension(format!("basis index {i} out of range at degree {d}")))?;
            add_term(&mut terms, m.clone(), x.clone());
        }
        Ok(ModuleElement::from_raw(&self.module, terms))
    }

    pub fn from_element(u: &ModuleElement) -> Result<Self> {
        if u.module().kind() != ModuleKind::DualVerma {
            return Err(Error::ModuleMismatch("expected a dual Verma element".into()));
        }
        let mut coords = BTreeMap::new();
        let mut bases: BTreeMap<u32, Vec<Pbw>> = BTreeMap::new();
        for (m, x) in u.terms() {
            let d = m.degree();
            let basis = bases.entry(d).or_insert_with(|| u.module().basis_at_degree(d));
            let i = basis.iter().position(|b| b == m).expect("PBW monomial is in its degree basis");
            coords.insert((d, i), x.clone());
        }
        Ok(DualElement { module: u.module().clone(), coords })
    }
}
