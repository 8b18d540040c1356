use std::collections::HashMap;
use std::sync::Arc;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactla::{format_rational, parse_rational, Matrix, Rational};
use crate::virasoro::{ModuleElement, ModuleId, Pbw};

/// Central charge and the three lowest weights of an intertwining problem.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Params {
    pub c: Rational,
    pub h1: Rational,
    pub h2: Rational,
    pub h3: Rational,
}

impl Params {
    pub fn new(c: Rational, h1: Rational, h2: Rational, h3: Rational) -> Self {
        Params { c, h1, h2, h3 }
    }

    pub fn first(&self) -> ModuleId {
        ModuleId::verma(self.c.clone(), self.h1.clone())
    }

    pub fn second(&self) -> ModuleId {
        ModuleId::verma(self.c.clone(), self.h2.clone())
    }

    /// Target module: the restricted dual of the Verma module of weight `h3`.
    pub fn target(&self) -> ModuleId {
        ModuleId::dual_verma(self.c.clone(), self.h3.clone())
    }

    pub fn vacuum(&self) -> ModuleId {
        ModuleId::vacuum(self.c.clone())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "c": format_rational(&self.c),
            "h1": format_rational(&self.h1),
            "h2": format_rational(&self.h2),
            "h3": format_rational(&self.h3),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let field = |k: &str| -> Result<Rational> {
            match v.get(k) {
                Some(Value::String(s)) => parse_rational(s),
                Some(Value::Number(n)) => parse_rational(&n.to_string()),
                _ => Err(Error::Parse(format!("params.{k} missing"))),
            }
        };
        Ok(Params::new(field("c")?, field("h1")?, field("h2")?, field("h3")?))
    }
}

/// Graded PBW bases of a module up to a degree, with reverse lookup.
#[derive(Debug)]
pub(crate) struct GradedBasis {
    by_degree: Vec<Vec<Pbw>>,
    index: HashMap<Pbw, usize>,
}

impl GradedBasis {
    fn new(m: &ModuleId, depth: u32) -> Self {
        let by_degree: Vec<Vec<Pbw>> = (0..=depth).map(|d| m.basis_at_degree(d)).collect();
        let index = by_degree.iter().flat_map(|b| b.iter().cloned().enumerate().map(|(i, p)| (p, i))).collect();
        GradedBasis { by_degree, index }
    }

    pub(crate) fn at(&self, d: u32) -> &[Pbw] {
        &self.by_degree[d as usize]
    }

    pub(crate) fn dim(&self, d: u32) -> usize {
        self.by_degree[d as usize].len()
    }

    pub(crate) fn position(&self, p: &Pbw) -> usize {
        self.index[p]
    }

    pub(crate) fn all(&self) -> impl Iterator<Item = &Pbw> {
        self.by_degree.iter().flatten()
    }
}

/// Placement of every in-window mode-block entry in one flat unknown vector.
///
/// For `u` in the first module of degree `i`, `v` in the second of degree
/// `j` and a target degree `s`, the block of `Phi(u; i + j - s - 1)` is a
/// `dim W3(s) x dim W2(j)` matrix stored row-major from its offset.
#[derive(Debug)]
pub struct Layout {
    params: Params,
    depth: u32,
    pub(crate) w1: GradedBasis,
    pub(crate) w2: GradedBasis,
    pub(crate) w3: GradedBasis,
    offsets: HashMap<(Pbw, u32, u32), usize>,
    order: Vec<(Pbw, u32, u32)>,
    total: usize,
}

impl Layout {
    pub fn new(params: &Params, depth: u32) -> Self {
        let w1 = GradedBasis::new(&params.first(), depth);
        let w2 = GradedBasis::new(&params.second(), depth);
        let w3 = GradedBasis::new(&params.target(), depth);
        let mut offsets = HashMap::new();
        let mut order = Vec::new();
        let mut total = 0;
        for u in w1.all() {
            for j in 0..=depth {
                for s in 0..=depth {
                    offsets.insert((u.clone(), j, s), total);
                    order.push((u.clone(), j, s));
                    total += w3.dim(s) * w2.dim(j);
                }
            }
        }
        Layout { params: params.clone(), depth, w1, w2, w3, offsets, order, total }
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn unknowns(&self) -> usize {
        self.total
    }

    /// Column of the coefficient of target basis vector `tau` in `Phi(u; k) v`,
    /// or `None` when the block lies outside the window.
    pub fn column(&self, u: &Pbw, v: &Pbw, tau: &Pbw) -> Option<usize> {
        let (j, s) = (v.degree(), tau.degree());
        let off = self.offsets.get(&(u.clone(), j, s))?;
        Some(off + self.w3.position(tau) * self.w2.dim(j) + self.w2.position(v))
    }

    pub(crate) fn in_window(&self, d: i64) -> bool {
        (0..=self.depth as i64).contains(&d)
    }

    /// Blocks in storage order: `(u, j, s)`.
    pub fn blocks(&self) -> &[(Pbw, u32, u32)] {
        &self.order
    }

    pub(crate) fn block_range(&self, u: &Pbw, j: u32, s: u32) -> Option<(usize, usize, usize)> {
        let off = *self.offsets.get(&(u.clone(), j, s))?;
        Some((off, self.w3.dim(s), self.w2.dim(j)))
    }
}

/// Mode family truncated to the window: every in-window block entry of
/// `Phi(u; k)` for basis `u` of degree at most the depth.
#[derive(Clone, Debug)]
pub struct TruncatedModeFamily {
    layout: Arc<Layout>,
    values: Vec<Rational>,
}

impl PartialEq for TruncatedModeFamily {
    fn eq(&self, other: &Self) -> bool {
        self.layout.params == other.layout.params
            && self.layout.depth == other.layout.depth
            && self.values == other.values
    }
}

impl TruncatedModeFamily {
    pub fn zero(layout: Arc<Layout>) -> Self {
        let values = vec![Rational::zero(); layout.unknowns()];
        TruncatedModeFamily { layout, values }
    }

    pub fn from_values(layout: Arc<Layout>, values: Vec<Rational>) -> Result<Self> {
        if values.len() != layout.unknowns() {
            return Err(Error::Dimension(format!("{} values for {} unknowns", values.len(), layout.unknowns())));
        }
        Ok(TruncatedModeFamily { layout, values })
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Rational] {
        &mut self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        TruncatedModeFamily { layout: Arc::clone(&self.layout), values: self.values.iter().map(|x| x * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.layout.params != other.layout.params || self.layout.depth != other.layout.depth {
            return Err(Error::Dimension("families over different windows".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(TruncatedModeFamily { layout: Arc::clone(&self.layout), values })
    }

    /// Matrix of `Phi(u; k)` from `W2(j)` to `W3(deg u + j - k - 1)`.
    pub fn block(&self, u: &Pbw, k: i64, j: u32) -> Option<Matrix> {
        let s = u.degree() as i64 + j as i64 - k - 1;
        if !self.layout.in_window(s) {
            return None;
        }
        let (off, rows, cols) = self.layout.block_range(u, j, s as u32)?;
        let data: Vec<Vec<Rational>> =
            (0..rows).map(|r| self.values[off + r * cols..off + (r + 1) * cols].to_vec()).collect();
        Some(Matrix::from_rows(data).unwrap_or_else(|_| Matrix::zeros(rows, cols)))
    }

    /// `Phi(u; k) v`. Zero when the target degree is negative; a
    /// `NotInterior` error when any input or output degree leaves the window.
    pub fn apply(&self, u: &ModuleElement, k: i64, v: &ModuleElement) -> Result<ModuleElement> {
        let p = &self.layout.params;
        if *u.module() != p.first() || *v.module() != p.second() {
            return Err(Error::ModuleMismatch("mode family applied to foreign elements".into()));
        }
        let target = p.target();
        let mut out: Vec<(Pbw, Rational)> = Vec::new();
        for (um, ux) in u.terms() {
            for (vm, vx) in v.terms() {
                let (i, j) = (um.degree() as i64, vm.degree() as i64);
                let s = i + j - k - 1;
                if s < 0 {
                    continue;
                }
                if !self.layout.in_window(i) || !self.layout.in_window(j) || !self.layout.in_window(s) {
                    return Err(Error::NotInterior(format!("block ({um:?}, {k}) on {vm:?} leaves the window")));
                }
                let coeff = ux * vx;
                for tau in self.layout.w3.at(s as u32) {
                    let col = self.layout.column(um, vm, tau).expect("in-window block");
                    let x = &self.values[col];
                    if !x.is_zero() {
                        out.push((tau.clone(), x * &coeff));
                    }
                }
            }
        }
        ModuleElement::from_terms(&target, out)
    }

    /// Replaces entry `(row, col)` of block `Phi(u; k)` on `W2(j)`.
    pub fn set_entry(&mut self, u: &Pbw, k: i64, j: u32, row: usize, col: usize, x: Rational) -> Result<()> {
        let s = u.degree() as i64 + j as i64 - k - 1;
        let (off, rows, cols) = (self.layout.in_window(s))
            .then(|| self.layout.block_range(u, j, s as u32))
            .flatten()
            .ok_or_else(|| Error::NotInterior("block outside the window".into()))?;
        if row >= rows || col >= cols {
            return Err(Error::Dimension("block entry out of range".into()));
        }
        self.values[off + row * cols + col] = x;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let blocks: Vec<Value> = self
            .layout
            .blocks()
            .iter()
            .filter_map(|(u, j, s)| {
                let k = u.degree() as i64 + *j as i64 - *s as i64 - 1;
                let m = self.block(u, k, *j)?;
                if m.is_zero() {
                    return None;
                }
                let rows: Vec<Vec<String>> =
                    m.to_rows().iter().map(|r| r.iter().map(format_rational).collect()).collect();
                Some(json!({"u": u.parts(), "k": k, "j": j, "matrix": rows}))
            })
            .collect();
        json!({"params": self.layout.params.to_json(), "depth": self.layout.depth, "blocks": blocks})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let params = Params::from_json(v.get("params").ok_or_else(|| Error::Parse("family.params missing".into()))?)?;
        let depth = v
            .get("depth")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("family.depth missing".into()))? as u32;
        let mut fam = TruncatedModeFamily::zero(Arc::new(Layout::new(&params, depth)));
        let blocks = v.get("blocks").and_then(Value::as_array).cloned().unwrap_or_default();
        for b in blocks {
            let parts: Vec<u32> = b
                .get("u")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse("block.u missing".into()))?
                .iter()
                .map(|x| x.as_u64().map(|n| n as u32).ok_or_else(|| Error::Parse("bad part".into())))
                .collect::<Result<_>>()?;
            let u = Pbw::new(parts)?;
            let k = b.get("k").and_then(Value::as_i64).ok_or_else(|| Error::Parse("block.k missing".into()))?;
            let j = b.get("j").and_then(Value::as_u64).ok_or_else(|| Error::Parse("block.j missing".into()))? as u32;
            let rows = b.get("matrix").and_then(Value::as_array).ok_or_else(|| Error::Parse("block.matrix".into()))?;
            for (r, row) in rows.iter().enumerate() {
                let row = row.as_array().ok_or_else(|| Error::Parse("matrix row".into()))?;
                for (c, x) in row.iter().enumerate() {
                    let x = parse_rational(x.as_str().ok_or_else(|| Error::Parse("matrix entry".into()))?)?;
                    fam.set_entry(&u, k, j, r, c, x)?;
                }
            }
        }
        Ok(fam)
    }
}

/// Degree-zero datum of a mode family: `Phi(v_h1; -1)` from `W2(0)` to `W3(0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomData {
    pub matrix: Matrix,
}
