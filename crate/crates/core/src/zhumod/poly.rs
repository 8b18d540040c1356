use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactla::{format_rational, parse_rational, Matrix, Rational};

fn insert_nonzero<K: Ord>(map: &mut BTreeMap<K, Rational>, k: K, x: Rational) {
    if x.is_zero() {
        return;
    }
    match map.entry(k) {
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

/// Univariate polynomial `sum c_m t^m`.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Poly(BTreeMap<u32, Rational>);

impl Poly {
    pub fn zero() -> Self {
        Poly(BTreeMap::new())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(m: u32, c: Rational) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn var() -> Self {
        Self::monomial(1, Rational::one())
    }

    pub fn from_coeffs<I: IntoIterator<Item = (u32, Rational)>>(it: I) -> Self {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: u32, c: Rational) {
        insert_nonzero(&mut self.0, m, c);
    }

    pub fn coeff(&self, m: u32) -> Rational {
        self.0.get(&m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, Rational> {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.0.keys().next_back().copied()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Poly::zero();
        for (a, x) in &self.0 {
            for (b, y) in &other.0 {
                out.add_term(a + b, x * y);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.0 {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Poly::from_coeffs(self.0.iter().map(|(m, c)| (*m, c * s)))
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.0.iter().fold(Rational::zero(), |acc, (m, c)| acc + c * num_traits::pow(t.clone(), *m as usize))
    }

    /// `p(T)` for a square matrix `T`.
    pub fn eval_matrix(&self, t: &Matrix) -> Result<Matrix> {
        if !t.is_square() {
            return Err(Error::Dimension("polynomial evaluated at a non-square matrix".into()));
        }
        let n = t.rows();
        let mut acc = Matrix::zeros(n, n);
        // Horner from the top degree down
        let top = self.degree().unwrap_or(0);
        for m in (0..=top).rev() {
            acc = &(&acc * t) + &Matrix::scalar(n, &self.coeff(m));
        }
        Ok(acc)
    }

    /// The same polynomial read in `t1` (`first = true`) or `t2`.
    pub fn in_variable(&self, first: bool) -> Poly2 {
        Poly2::from_coeffs(self.0.iter().map(|(m, c)| (if first { (*m, 0) } else { (0, *m) }, c.clone())))
    }

    pub fn to_json(&self) -> Value {
        json!(self.0.iter().map(|(m, c)| json!([m, format_rational(c)])).collect::<Vec<_>>())
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let arr = v.as_array().ok_or_else(|| Error::Parse("poly must be an array".into()))?;
        let mut p = Poly::zero();
        for t in arr {
            let (m, c) = match t.as_array().map(Vec::as_slice) {
                Some([m, c]) => (m, c),
                _ => return Err(Error::Parse(format!("bad poly term {t}"))),
            };
            let m = m.as_u64().ok_or_else(|| Error::Parse(format!("bad exponent {m}")))? as u32;
            p.add_term(m, parse_rational(c.as_str().ok_or_else(|| Error::Parse(format!("bad coeff {c}")))?)?);
        }
        Ok(p)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self.0.iter().rev().map(|(m, c)| format!("{}*t^{m}", format_rational(c))).collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Bivariate polynomial `sum c_{mn} t1^m t2^n`.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Poly2(BTreeMap<(u32, u32), Rational>);

impl Poly2 {
    pub fn zero() -> Self {
        Poly2(BTreeMap::new())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn monomial(m: u32, n: u32, c: Rational) -> Self {
        let mut p = Poly2::zero();
        p.add_term(m, n, c);
        p
    }

    pub fn from_coeffs<I: IntoIterator<Item = ((u32, u32), Rational)>>(it: I) -> Self {
        let mut p = Poly2::zero();
        for ((m, n), c) in it {
            p.add_term(m, n, c);
        }
        p
    }

    pub fn add_term(&mut self, m: u32, n: u32, c: Rational) {
        insert_nonzero(&mut self.0, (m, n), c);
    }

    pub fn coeff(&self, m: u32, n: u32) -> Rational {
        self.0.get(&(m, n)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &BTreeMap<(u32, u32), Rational> {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Poly2::zero();
        for ((a, b), x) in &self.0 {
            for ((c, d), y) in &other.0 {
                out.add_term(a + c, b + d, x * y);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((m, n), c) in &other.0 {
            out.add_term(*m, *n, c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Poly2::from_coeffs(self.0.iter().map(|(k, c)| (*k, c * s)))
    }

    pub fn to_json(&self) -> Value {
        json!(self.0.iter().map(|((m, n), c)| json!([m, n, format_rational(c)])).collect::<Vec<_>>())
    }
}

impl fmt::Debug for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> =
            self.0.iter().rev().map(|((m, n), c)| format!("{}*t1^{m}*t2^{n}", format_rational(c))).collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Class of an element in the quotient by `O(M)`, as a polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormalForm {
    VacuumPoly(Poly),
    VermaPoly(Poly2),
}

impl NormalForm {
    pub fn to_json(&self) -> Value {
        match self {
            NormalForm::VacuumPoly(p) => json!({"poly": p.to_json()}),
            NormalForm::VermaPoly(p) => json!({"poly2": p.to_json()}),
        }
    }
}

/// A finite-dimensional module over the polynomial ring, given by the action of `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AVModule {
    t_action: Matrix,
}

impl AVModule {
    pub fn new(t_action: Matrix) -> Result<Self> {
        if !t_action.is_square() || t_action.rows() == 0 {
            return Err(Error::Dimension("t action must be a nonempty square matrix".into()));
        }
        Ok(AVModule { t_action })
    }

    /// One-dimensional module on which `t` acts by `h`.
    pub fn scalar(h: Rational) -> Self {
        AVModule { t_action: Matrix::scalar(1, &h) }
    }

    pub fn dimension(&self) -> usize {
        self.t_action.rows()
    }

    pub fn t_action(&self) -> &Matrix {
        &self.t_action
    }
}
