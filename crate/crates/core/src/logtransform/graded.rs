use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactla::{factorial, format_rational, int, parse_rational, Matrix, Rational};
use crate::virasoro::{apply_virasoro, ModuleElement, ModuleId};

/// `L(0)` on a graded space `M = sum_d M(d)` whose degree-`d` piece is the
/// generalized eigenspace for `lowest + d`, split into semisimple and
/// nilpotent parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedOperatorData {
    lowest: Rational,
    l0: Vec<Matrix>,
    semisimple: Vec<Matrix>,
    nilpotent: Vec<Matrix>,
}

/// Splits per-degree `L(0)` matrices, checking that degree `d` carries the
/// single eigenvalue `lowest + d`.
pub fn jordan_split(lowest: Rational, l0: Vec<Matrix>) -> Result<GradedOperatorData> {
    let mut semisimple = Vec::with_capacity(l0.len());
    let mut nilpotent = Vec::with_capacity(l0.len());
    for (d, m) in l0.iter().enumerate() {
        if !m.is_square() {
            return Err(Error::Dimension(format!("L(0) at degree {d} is not square")));
        }
        let eig = &lowest + int(d as i64);
        let s = Matrix::scalar(m.rows(), &eig);
        let n = m - &s;
        if n.nilpotency_index().is_none() {
            return Err(Error::Spectrum(format!("L(0) at degree {d} has an eigenvalue other than {}", format_rational(&eig))));
        }
        semisimple.push(s);
        nilpotent.push(n);
    }
    Ok(GradedOperatorData { lowest, l0, semisimple, nilpotent })
}

impl GradedOperatorData {
    /// `L(0)` on the degrees `0..=depth` of a Virasoro module.
    pub fn from_module(module: &ModuleId, depth: u32) -> Result<Self> {
        let l0 = (0..=depth).map(|d| action_matrix(module, 0, d)).collect();
        jordan_split(module.h().clone(), l0)
    }

    pub fn lowest(&self) -> &Rational {
        &self.lowest
    }

    pub fn depth(&self) -> u32 {
        self.l0.len().saturating_sub(1) as u32
    }

    pub fn dims(&self) -> Vec<usize> {
        self.l0.iter().map(Matrix::rows).collect()
    }

    pub fn dim(&self, d: u32) -> usize {
        self.l0.get(d as usize).map_or(0, Matrix::rows)
    }

    pub fn l0(&self, d: u32) -> &Matrix {
        &self.l0[d as usize]
    }

    pub fn semisimple(&self, d: u32) -> &Matrix {
        &self.semisimple[d as usize]
    }

    pub fn nilpotent(&self, d: u32) -> &Matrix {
        &self.nilpotent[d as usize]
    }

    /// Largest nilpotency index over all degrees, at least one.
    pub fn nilpotency_index(&self) -> u32 {
        self.nilpotent.iter().filter_map(Matrix::nilpotency_index).max().unwrap_or(0).max(1)
    }

    pub fn to_json(&self) -> Value {
        json!({"lowest": format_rational(&self.lowest), "l0": self.l0.iter().map(Matrix::to_json).collect::<Vec<_>>()})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let lowest = v
            .get("lowest")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("operator data needs \"lowest\"".into()))
            .and_then(parse_rational)?;
        let l0 = v
            .get("l0")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("operator data needs \"l0\"".into()))?
            .iter()
            .map(Matrix::from_json)
            .collect::<Result<Vec<_>>>()?;
        jordan_split(lowest, l0)
    }
}

/// Matrix of `L(n)` from degree `d` to degree `d - n` in the PBW bases.
pub fn action_matrix(module: &ModuleId, n: i64, d: u32) -> Matrix {
    let src = module.basis_at_degree(d);
    let target = d as i64 - n;
    let dst = if target < 0 { Vec::new() } else { module.basis_at_degree(target as u32) };
    let mut m = Matrix::zeros(dst.len(), src.len());
    for (c, b) in src.into_iter().enumerate() {
        let image = apply_virasoro(n, &ModuleElement::monomial(module, b));
        for (r, t) in dst.iter().enumerate() {
            m.set(r, c, image.coeff(t));
        }
    }
    m
}

/// Finite sum of `x^e (log x)^n w` with rational exponents and vectors of a
/// fixed dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogSeries {
    dim: usize,
    terms: BTreeMap<(Rational, u32), Vec<Rational>>,
}

impl LogSeries {
    pub fn zero(dim: usize) -> Self {
        LogSeries { dim, terms: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &BTreeMap<(Rational, u32), Vec<Rational>> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_log_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(_, n)| *n).max()
    }

    pub fn add_term(&mut self, exponent: Rational, log_degree: u32, w: &[Rational]) -> Result<()> {
        if w.len() != self.dim {
            return Err(Error::Dimension(format!("vector of length {} in a series of dimension {}", w.len(), self.dim)));
        }
        let key = (exponent, log_degree);
        let slot = self.terms.entry(key.clone()).or_insert_with(|| vec![Rational::zero(); w.len()]);
        slot.iter_mut().zip(w).for_each(|(a, b)| *a += b);
        if slot.iter().all(Zero::is_zero) {
            self.terms.remove(&key);
        }
        Ok(())
    }

    /// `x d/dx` applied term by term.
    pub fn x_d_dx(&self) -> Self {
        let mut out = LogSeries::zero(self.dim);
        for ((e, n), w) in &self.terms {
            let scaled: Vec<Rational> = w.iter().map(|x| x * e).collect();
            out.add_term(e.clone(), *n, &scaled).expect("same dimension");
            if *n > 0 {
                let scaled: Vec<Rational> = w.iter().map(|x| x * int(*n as i64)).collect();
                out.add_term(e.clone(), n - 1, &scaled).expect("same dimension");
            }
        }
        out
    }

    /// Applies a matrix to every coefficient vector.
    pub fn map(&self, m: &Matrix) -> Result<Self> {
        if m.cols() != self.dim {
            return Err(Error::Dimension("matrix does not act on the series".into()));
        }
        let mut out = LogSeries::zero(m.rows());
        for ((e, n), w) in &self.terms {
            out.add_term(e.clone(), *n, &m.mul_vec(w))?;
        }
        Ok(out)
    }
}

/// Sign of the exponent in `x^{+-L(0)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Plus,
    Minus,
}

impl Direction {
    pub fn factor(self) -> Rational {
        match self {
            Direction::Plus => Rational::one(),
            Direction::Minus => -Rational::one(),
        }
    }
}

/// `x^{+-L(0)} v` for `v` of degree `d`: `x^{+-(lowest + d)} sum_i (+-N)^i (log x)^i / i! v`.
pub fn x_pow_l0(g: &GradedOperatorData, dir: Direction, d: u32, v: &[Rational]) -> Result<LogSeries> {
    let dim = g.dim(d);
    if v.len() != dim || d > g.depth() {
        return Err(Error::Dimension(format!("vector of length {} at degree {d}", v.len())));
    }
    let s = dir.factor();
    let exponent = &s * (g.lowest() + int(d as i64));
    let n = g.nilpotent(d).scale(&s);
    let mut out = LogSeries::zero(dim);
    let mut w = v.to_vec();
    for i in 0u32.. {
        if w.iter().all(Zero::is_zero) {
            break;
        }
        let inv = Rational::from_integer(factorial(i as u64)).recip();
        let scaled: Vec<Rational> = w.iter().map(|x| x * &inv).collect();
        out.add_term(exponent.clone(), i, &scaled)?;
        w = n.mul_vec(&w);
    }
    Ok(out)
}

/// Checks `x d/dx (x^{+-L(0)} v) = x^{+-L(0)} (+-L(0) v)` at degree `d`.
pub fn derivation_consistent(g: &GradedOperatorData, dir: Direction, d: u32, v: &[Rational]) -> Result<bool> {
    let lhs = x_pow_l0(g, dir, d, v)?.x_d_dx();
    let lv: Vec<Rational> = g.l0(d).mul_vec(v).iter().map(|x| x * dir.factor()).collect();
    Ok(lhs == x_pow_l0(g, dir, d, &lv)?)
}
