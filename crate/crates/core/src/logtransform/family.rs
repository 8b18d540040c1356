use std::collections::BTreeMap;

use num_traits::Zero;
use serde_json::{json, Value};

use super::graded::GradedOperatorData;
use crate::error::{Error, Result};
use crate::exactla::{factorial, format_rational, int, Matrix, Rational};
use crate::intertwine::TruncatedModeFamily;

/// Position of one block: basis vector `p` of `W1(i)`, mapping `W2(j)` to
/// `W3(s)`. The mode index is `i + j - s - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockKey {
    pub i: u32,
    pub p: usize,
    pub j: u32,
    pub s: u32,
}

impl BlockKey {
    pub fn mode(&self) -> i64 {
        self.i as i64 + self.j as i64 - self.s as i64 - 1
    }
}

/// Graded dimensions of the three spaces, all truncated at the same depth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    pub third: Vec<usize>,
}

impl Shape {
    pub fn new(first: Vec<usize>, second: Vec<usize>, third: Vec<usize>) -> Result<Self> {
        if first.is_empty() || first.len() != second.len() || first.len() != third.len() {
            return Err(Error::Dimension("the three gradings must share a nonempty depth".into()));
        }
        Ok(Shape { first, second, third })
    }

    pub fn depth(&self) -> u32 {
        (self.first.len() - 1) as u32
    }

    pub fn keys(&self) -> impl Iterator<Item = BlockKey> + '_ {
        let top = self.depth();
        (0..=top).flat_map(move |i| {
            (0..self.first[i as usize])
                .flat_map(move |p| (0..=top).flat_map(move |j| (0..=top).map(move |s| BlockKey { i, p, j, s })))
        })
    }

    fn block_shape(&self, key: &BlockKey) -> (usize, usize) {
        (self.third[key.s as usize], self.second[key.j as usize])
    }

    fn contains(&self, key: &BlockKey) -> bool {
        key.i <= self.depth()
            && key.j <= self.depth()
            && key.s <= self.depth()
            && key.p < self.first[key.i as usize]
    }
}

/// Truncated integer-graded mode data: every `Phi(e_p; k)` restricted to
/// `W2(j) -> W3(s)` inside the window. Missing blocks are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedBlocks {
    shape: Shape,
    blocks: BTreeMap<BlockKey, Matrix>,
}

impl GradedBlocks {
    pub fn zero(shape: Shape) -> Self {
        GradedBlocks { shape, blocks: BTreeMap::new() }
    }

    /// Copies the blocks of a solved Virasoro mode family.
    pub fn from_mode_family(phi: &TruncatedModeFamily) -> Result<Self> {
        let layout = phi.layout();
        let p = layout.params();
        let depth = layout.depth();
        let dims = |m: &crate::virasoro::ModuleId| (0..=depth).map(|d| m.basis_at_degree(d).len()).collect::<Vec<_>>();
        let shape = Shape::new(dims(&p.first()), dims(&p.second()), dims(&p.target()))?;
        let mut out = GradedBlocks::zero(shape);
        let first = p.first();
        for i in 0..=depth {
            for (pos, u) in first.basis_at_degree(i).into_iter().enumerate() {
                for j in 0..=depth {
                    for s in 0..=depth {
                        let key = BlockKey { i, p: pos, j, s };
                        if let Some(m) = phi.block(&u, key.mode(), j) {
                            out.set(key, m)?;
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn get(&self, key: &BlockKey) -> Matrix {
        self.blocks.get(key).cloned().unwrap_or_else(|| {
            let (r, c) = self.shape.block_shape(key);
            Matrix::zeros(r, c)
        })
    }

    pub fn set(&mut self, key: BlockKey, m: Matrix) -> Result<()> {
        if !self.shape.contains(&key) {
            return Err(Error::Dimension(format!("block {key:?} is outside the window")));
        }
        if (m.rows(), m.cols()) != self.shape.block_shape(&key) {
            return Err(Error::Dimension(format!("block {key:?} has shape {}x{}", m.rows(), m.cols())));
        }
        if m.is_zero() {
            self.blocks.remove(&key);
        } else {
            self.blocks.insert(key, m);
        }
        Ok(())
    }

    fn accumulate(&mut self, key: BlockKey, m: &Matrix) {
        let sum = &self.get(&key) + m;
        self.set(key, sum).expect("key and shape come from this family");
    }

    /// `Phi(u; i + j - s - 1)` from `W2(j)` to `W3(s)` for a coordinate vector `u` of `W1(i)`.
    pub fn operator(&self, i: u32, u: &[Rational], j: u32, s: u32) -> Matrix {
        let (r, c) = self.shape.block_shape(&BlockKey { i, p: 0, j, s });
        let mut out = Matrix::zeros(r, c);
        for (p, x) in u.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            out = &out + &self.get(&BlockKey { i, p, j, s }).scale(x);
        }
        out
    }

    pub fn scale(&self, x: &Rational) -> Self {
        let mut out = GradedBlocks::zero(self.shape.clone());
        for (k, m) in &self.blocks {
            out.set(*k, m.scale(x)).expect("same shape");
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::Dimension("families of different shapes".into()));
        }
        let mut out = self.clone();
        for (k, m) in &other.blocks {
            out.accumulate(*k, m);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        let blocks: Vec<Value> = self
            .blocks
            .iter()
            .map(|(k, m)| json!({"i": k.i, "p": k.p, "j": k.j, "s": k.s, "matrix": m.to_json()}))
            .collect();
        json!({"first": self.shape.first, "second": self.shape.second, "third": self.shape.third, "blocks": blocks})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let dims = |name: &str| -> Result<Vec<usize>> {
            v.get(name)
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse(format!("family needs \"{name}\"")))?
                .iter()
                .map(|x| x.as_u64().map(|n| n as usize).ok_or_else(|| Error::Parse(format!("bad dimension in {name}"))))
                .collect()
        };
        let mut out = GradedBlocks::zero(Shape::new(dims("first")?, dims("second")?, dims("third")?)?);
        for b in v.get("blocks").and_then(Value::as_array).cloned().unwrap_or_default() {
            let field = |name: &str| {
                b.get(name).and_then(Value::as_u64).ok_or_else(|| Error::Parse(format!("block needs \"{name}\"")))
            };
            let key = BlockKey { i: field("i")? as u32, p: field("p")? as usize, j: field("j")? as u32, s: field("s")? as u32 };
            let m = Matrix::from_json(b.get("matrix").ok_or_else(|| Error::Parse("block needs \"matrix\"".into()))?)?;
            let m = if m.rows() == 0 { Matrix::zeros(out.shape.block_shape(&key).0, out.shape.block_shape(&key).1) } else { m };
            out.set(key, m)?;
        }
        Ok(out)
    }
}

/// Logarithmic mode data `J^{(n)}`, one block family per power of `log x`.
/// The block at `key` is the coefficient of `x^{shift - k - 1} (log x)^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogModeFamily {
    shift: Rational,
    shape: Shape,
    components: Vec<GradedBlocks>,
}

impl LogModeFamily {
    pub fn new(shift: Rational, shape: Shape, components: Vec<GradedBlocks>) -> Result<Self> {
        if components.iter().any(|c| c.shape != shape) {
            return Err(Error::Dimension("component shapes differ".into()));
        }
        let mut out = LogModeFamily { shift, shape, components };
        out.trim();
        Ok(out)
    }

    fn trim(&mut self) {
        while self.components.last().is_some_and(GradedBlocks::is_zero) {
            self.components.pop();
        }
    }

    /// Exponent offset `lowest3 - lowest1 - lowest2`.
    pub fn shift(&self) -> &Rational {
        &self.shift
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn component(&self, n: usize) -> GradedBlocks {
        self.components.get(n).cloned().unwrap_or_else(|| GradedBlocks::zero(self.shape.clone()))
    }

    /// Number of log powers carried; the highest nonzero power plus one.
    pub fn log_length(&self) -> usize {
        self.components.len()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "shift": format_rational(&self.shift),
            "components": self.components.iter().map(GradedBlocks::to_json).collect::<Vec<_>>(),
        })
    }

    /// `J(u, x) v` restricted to `W3(s)`, as a series in `x` and `log x`.
    pub fn evaluate(&self, i: u32, u: &[Rational], j: u32, v: &[Rational], s: u32) -> Result<super::LogSeries> {
        if u.len() != self.shape.first[i as usize] || v.len() != self.shape.second[j as usize] {
            return Err(Error::Dimension("argument vectors do not match the grading".into()));
        }
        let k = i as i64 + j as i64 - s as i64 - 1;
        let exponent = &self.shift - int(k + 1);
        let mut out = super::LogSeries::zero(self.shape.third[s as usize]);
        for (n, c) in self.components.iter().enumerate() {
            out.add_term(exponent.clone(), n as u32, &c.operator(i, u, j, s).mul_vec(v))?;
        }
        Ok(out)
    }
}

fn check_shape(phi: &GradedBlocks, g: [&GradedOperatorData; 3]) -> Result<()> {
    let dims = [&phi.shape.first, &phi.shape.second, &phi.shape.third];
    for (k, (gk, dk)) in g.iter().zip(dims).enumerate() {
        if &gk.dims() != dk {
            return Err(Error::Dimension(format!("operator data {} does not match the family grading", k + 1)));
        }
    }
    Ok(())
}

// N3 Phi(u) - Phi(N1 u) - Phi(u) N2, blockwise
pub(crate) fn nilpotent_derivation(phi: &GradedBlocks, g1: &GradedOperatorData, g2: &GradedOperatorData, g3: &GradedOperatorData) -> GradedBlocks {
    let mut out = GradedBlocks::zero(phi.shape.clone());
    for (key, m) in &phi.blocks {
        out.accumulate(*key, &(g3.nilpotent(key.s) * m));
        out.accumulate(*key, &(m * g2.nilpotent(key.j)).scale(&int(-1)));
        // Phi(N1 e_q) = sum_p N1[p][q] Phi(e_p), so e_p contributes to every q
        let n1 = g1.nilpotent(key.i);
        for q in 0..n1.cols() {
            let x = n1.get(key.p, q);
            if !x.is_zero() {
                out.accumulate(BlockKey { p: q, ..*key }, &m.scale(&-x));
            }
        }
    }
    out
}

/// The logarithmic family `x^{L(0)} Phi(x^{-L(0)} u; k) x^{-L(0)} v`, summed
/// over `k`, split by powers of `log x`.
pub fn from_z_graded(
    phi: &GradedBlocks,
    g1: &GradedOperatorData,
    g2: &GradedOperatorData,
    g3: &GradedOperatorData,
) -> Result<LogModeFamily> {
    check_shape(phi, [g1, g2, g3])?;
    let shift = g3.lowest() - g1.lowest() - g2.lowest();
    let mut components = Vec::new();
    let mut current = phi.clone();
    let mut n = 0u64;
    while !current.is_zero() {
        let inv = Rational::from_integer(factorial(n)).recip();
        components.push(current.scale(&inv));
        current = nilpotent_derivation(&current, g1, g2, g3);
        n += 1;
    }
    LogModeFamily::new(shift, phi.shape.clone(), components)
}

/// The log-free part, which is the integer-graded family.
pub fn to_z_graded(j: &LogModeFamily) -> GradedBlocks {
    j.component(0)
}

/// Checks `J^{(n)}(L(-1)u; k+1) = (shift - k - 1) J^{(n)}(u; k) + (n+1) J^{(n+1)}(u; k)`
/// for every block whose raised argument stays in the window. `raise[i]` is
/// `L(-1)` from `W1(i)` to `W1(i+1)`.
pub fn l1_recursion(j: &LogModeFamily, raise: &[Matrix]) -> Result<bool> {
    let depth = j.shape.depth();
    for i in 0..depth {
        let r = raise
            .get(i as usize)
            .ok_or_else(|| Error::Dimension(format!("no L(-1) data at degree {i}")))?;
        if r.cols() != j.shape.first[i as usize] || r.rows() != j.shape.first[i as usize + 1] {
            return Err(Error::Dimension(format!("L(-1) at degree {i} has the wrong shape")));
        }
    }
    for n in 0..j.log_length() {
        let here = j.component(n);
        let next = j.component(n + 1);
        for key in j.shape.keys().filter(|k| k.i < depth) {
            let image: Vec<Rational> = (0..raise[key.i as usize].rows()).map(|q| raise[key.i as usize].get(q, key.p).clone()).collect();
            let lhs = here.operator(key.i + 1, &image, key.j, key.s);
            let factor = &j.shift - int(key.mode() + 1);
            let rhs = &here.get(&key).scale(&factor) + &next.get(&key).scale(&int(n as i64 + 1));
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
