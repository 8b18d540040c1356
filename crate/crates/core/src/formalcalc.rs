//! Formal Laurent polynomials, residues, and the three two-variable expansion
//! maps of `x^j y^k (x - y)^l`.
//!
//! Infinite expansions are carried as [`BivariateSeries`] values holding an
//! explicit rectangular exponent window. Every coefficient whose exponents lie
//! in the window is present; nothing outside is stored. Arithmetic between
//! series only proceeds when windows and expansion directions agree.

use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactla::{binomial, int, sign, Rational};

/// Finite Laurent polynomial in a single tagged variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    var: String,
    terms: BTreeMap<i64, Rational>,
}

impl LaurentPoly {
    pub fn zero(var: &str) -> Self {
        LaurentPoly { var: var.to_string(), terms: BTreeMap::new() }
    }

    pub fn monomial(var: &str, exp: i64, coeff: Rational) -> Self {
        let mut p = Self::zero(var);
        p.add_term(exp, coeff);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, Rational)>>(var: &str, terms: I) -> Self {
        let mut p = Self::zero(var);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// `(1 + x)^n` for `n >= 0`.
    pub fn one_plus_var_pow(var: &str, n: u32) -> Self {
        Self::from_terms(var, (0..=n as i64).map(|i| (i, binomial(n as i64, i as u64))))
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn add_term(&mut self, exp: i64, coeff: Rational) {
        let e = self.terms.entry(exp).or_insert_with(Rational::zero);
        *e += coeff;
        if e.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn coeff(&self, exp: i64) -> Rational {
        self.terms.get(&exp).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::from_terms(&self.var, self.terms.iter().map(|(e, c)| (*e, c * s)))
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.terms.iter().map(|(e, c)| json!([e, c.numer().to_string(), c.denom().to_string()])).collect())
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.var, rhs.var, "variable mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.var, rhs.var, "variable mismatch");
        let mut out = LaurentPoly::zero(&self.var);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

/// Coefficient of `x^{-1}`.
pub fn res(f: &LaurentPoly) -> Rational {
    f.coeff(-1)
}

/// Exponents of `x^j y^k (x - y)^l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonomialJKL {
    pub j: i64,
    pub k: i64,
    pub l: i64,
}

impl MonomialJKL {
    pub fn new(j: i64, k: i64, l: i64) -> Self {
        MonomialJKL { j, k, l }
    }
}

impl Mul for MonomialJKL {
    type Output = MonomialJKL;
    fn mul(self, rhs: MonomialJKL) -> MonomialJKL {
        MonomialJKL::new(self.j + rhs.j, self.k + rhs.k, self.l + rhs.l)
    }
}

/// Which expansion map to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    /// `|y| < |x|`: series in nonnegative powers of `y`. Variables `(x, y)`.
    XThenY,
    /// `|x| < |y|`: series in nonnegative powers of `x`. Variables `(x, y)`.
    YThenX,
    /// Expansion around `y = x`. Variables `(x, y - x)`.
    XThenYMinusX,
}

/// Inclusive exponent bounds for both variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub first: (i64, i64),
    pub second: (i64, i64),
}

impl Window {
    pub fn new(first: (i64, i64), second: (i64, i64)) -> Self {
        Window { first, second }
    }

    pub fn square(lo: i64, hi: i64) -> Self {
        Window { first: (lo, hi), second: (lo, hi) }
    }

    pub fn contains(&self, e1: i64, e2: i64) -> bool {
        (self.first.0..=self.first.1).contains(&e1) && (self.second.0..=self.second.1).contains(&e2)
    }

    fn check(&self) -> Result<()> {
        if self.first.0 > self.first.1 || self.second.0 > self.second.1 {
            return Err(Error::Truncation(format!("empty window {self:?}")));
        }
        Ok(())
    }
}

/// Truncated two-variable series `sum c_{ab} v1^a v2^b` restricted to a window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivariateSeries {
    direction: Direction,
    window: Window,
    terms: BTreeMap<(i64, i64), Rational>,
}

impl BivariateSeries {
    pub fn zero(direction: Direction, window: Window) -> Self {
        BivariateSeries { direction, window, terms: BTreeMap::new() }
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn terms(&self) -> &BTreeMap<(i64, i64), Rational> {
        &self.terms
    }

    pub fn coeff(&self, e1: i64, e2: i64) -> Rational {
        self.terms.get(&(e1, e2)).cloned().unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, e1: i64, e2: i64, c: Rational) {
        if !self.window.contains(e1, e2) {
            return;
        }
        let e = self.terms.entry((e1, e2)).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(e1, e2));
        }
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.window != other.window || self.direction != other.direction {
            return Err(Error::IncompatibleWindows(format!(
                "{:?}/{:?} vs {:?}/{:?}",
                self.direction, self.window, other.direction, other.window
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut out = self.clone();
        for ((a, b), c) in &other.terms {
            out.add_term(*a, *b, c.clone());
        }
        Ok(out)
    }

    /// Product restricted to the common window.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut out = Self::zero(self.direction, self.window);
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &other.terms {
                out.add_term(a1 + a2, b1 + b2, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Rewrites an `(x, y - x)` series with nonnegative second exponents back
    /// into `(x, y)` exponents. Only meaningful for finite expansions.
    pub fn substitute_difference(&self) -> Result<BTreeMap<(i64, i64), Rational>> {
        if self.direction != Direction::XThenYMinusX {
            return Ok(self.terms.clone());
        }
        let mut out: BTreeMap<(i64, i64), Rational> = BTreeMap::new();
        for ((a, b), c) in &self.terms {
            if *b < 0 {
                return Err(Error::Truncation(format!("negative power of (y - x): {b}")));
            }
            // (y - x)^b = sum_s binom(b, s) y^s (-x)^{b-s}
            for s in 0..=*b {
                let coeff = c * binomial(*b, s as u64) * int(sign(b - s));
                let e = out.entry((a + b - s, s)).or_insert_with(Rational::zero);
                *e += coeff;
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|((a, b), c)| json!([[a, b], c.numer().to_string(), c.denom().to_string()]))
                .collect(),
        )
    }
}

/// Expansion of `x^j y^k (x - y)^l` in the requested direction, keeping every
/// term whose exponents fall inside `window`.
pub fn iota_expand(m: MonomialJKL, direction: Direction, window: Window) -> Result<BivariateSeries> {
    window.check()?;
    let MonomialJKL { j, k, l } = m;
    let mut out = BivariateSeries::zero(direction, window);
    // Exponent pair of the i-th term and the binomial top that bounds the sum.
    let (top, term): (i64, Box<dyn Fn(i64) -> (i64, i64, Rational)>) = match direction {
        Direction::XThenY => (l, Box::new(move |i| (j + l - i, k + i, binomial(l, i as u64) * int(sign(i))))),
        Direction::YThenX => (l, Box::new(move |i| (j + i, k + l - i, binomial(l, i as u64) * int(sign(l - i))))),
        Direction::XThenYMinusX => {
            (k, Box::new(move |i| (j + k - i, l + i, binomial(k, i as u64) * int(sign(l)))))
        }
    };
    // The first exponent moves by -1 (or +1 for YThenX) and the second by +1
    // (or -1) per step, so the window bounds the number of steps.
    let max_steps = match direction {
        Direction::XThenY => (window.second.1 - k).min(j + l - window.first.0),
        Direction::YThenX => (window.first.1 - j).min(k + l - window.second.0),
        Direction::XThenYMinusX => (window.second.1 - l).min(j + k - window.first.0),
    };
    let last = if top >= 0 { max_steps.min(top) } else { max_steps };
    for i in 0..=last.max(-1) {
        let (a, b, c) = term(i);
        out.add_term(a, b, c);
    }
    Ok(out)
}

impl Mul for &BivariateSeries {
    type Output = BivariateSeries;
    fn mul(self, rhs: &BivariateSeries) -> BivariateSeries {
        self.try_mul(rhs).expect("incompatible series")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::int;

    /// Long division of `x^a y^b` by `(x - y)` in ascending powers of `y`.
    fn divide_ascending_y(steps: usize) -> BTreeMap<(i64, i64), Rational> {
        // remainder is a single monomial c x^a y^b; quotient term c x^{a-1} y^b,
        // new remainder c x^{a-1} y^{b+1}.
        let mut out = BTreeMap::new();
        let (mut a, mut b, c) = (0i64, 0i64, int(1));
        for _ in 0..steps {
            out.insert((a - 1, b), c.clone());
            a -= 1;
            b += 1;
        }
        out
    }

    #[test]
    fn residues() {
        assert_eq!(res(&LaurentPoly::monomial("x", -1, int(1))), int(1));
        assert_eq!(res(&LaurentPoly::monomial("x", 2, int(1))), int(0));
        let p = &LaurentPoly::one_plus_var_pow("x", 2) * &LaurentPoly::monomial("x", -2, int(1));
        assert_eq!(res(&p), int(2));
    }

    #[test]
    fn inverse_difference_x_then_y() {
        let w = Window::new((-30, 30), (0, 9));
        let s = iota_expand(MonomialJKL::new(0, 0, -1), Direction::XThenY, w).unwrap();
        assert_eq!(s.terms(), &divide_ascending_y(10));
    }

    #[test]
    fn inverse_difference_y_then_x() {
        let w = Window::new((0, 5), (-30, 30));
        let s = iota_expand(MonomialJKL::new(0, 0, -1), Direction::YThenX, w).unwrap();
        for i in 0..=5 {
            assert_eq!(s.coeff(i, -1 - i), int(-1));
        }
        assert_eq!(s.terms().len(), 6);
    }

    #[test]
    fn polynomial_case() {
        let w = Window::square(-5, 5);
        let m = MonomialJKL::new(0, 0, 2);
        let a = iota_expand(m, Direction::XThenY, w).unwrap();
        let b = iota_expand(m, Direction::YThenX, w).unwrap();
        assert_eq!(a.terms(), b.terms());
        assert_eq!(a.coeff(2, 0), int(1));
        assert_eq!(a.coeff(1, 1), int(-2));
        assert_eq!(a.coeff(0, 2), int(1));
        let c = iota_expand(m, Direction::XThenYMinusX, w).unwrap();
        assert_eq!(&c.substitute_difference().unwrap(), a.terms());
    }

    #[test]
    fn empty_window_is_an_error() {
        let w = Window::new((1, 0), (0, 3));
        assert!(matches!(
            iota_expand(MonomialJKL::new(0, 0, -1), Direction::XThenY, w),
            Err(Error::Truncation(_))
        ));
    }

    #[test]
    fn mixing_windows_is_refused() {
        let m = MonomialJKL::new(0, 0, -1);
        let a = iota_expand(m, Direction::XThenY, Window::square(-4, 4)).unwrap();
        let b = iota_expand(m, Direction::XThenY, Window::square(-5, 5)).unwrap();
        let c = iota_expand(m, Direction::YThenX, Window::square(-4, 4)).unwrap();
        assert!(a.try_mul(&b).is_err());
        assert!(a.try_add(&c).is_err());
    }
}
