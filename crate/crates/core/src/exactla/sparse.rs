use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use super::rational::{height, Rational};
use crate::error::{Error, Result};

/// Sparse vector: strictly increasing column indices, no stored zeros.
pub type SparseVec = Vec<(usize, Rational)>;

pub fn to_dense(v: &SparseVec, len: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); len];
    for (c, x) in v {
        out[*c] = x.clone();
    }
    out
}

pub fn from_dense(v: &[Rational]) -> SparseVec {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(c, x)| (c, x.clone())).collect()
}

/// Builds a sparse vector from unordered, possibly repeated entries.
pub fn collect_sparse<I: IntoIterator<Item = (usize, Rational)>>(entries: I) -> SparseVec {
    let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
    for (c, x) in entries {
        *acc.entry(c).or_insert_with(Rational::zero) += x;
    }
    acc.into_iter().filter(|(_, x)| !x.is_zero()).collect()
}

fn lookup(v: &SparseVec, col: usize) -> Option<&Rational> {
    v.binary_search_by_key(&col, |(c, _)| *c).ok().map(|i| &v[i].1)
}

/// `a - s * b`, merged.
fn sub_scaled(a: &SparseVec, s: &Rational, b: &SparseVec) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, -(s * &b[j].1)));
            j += 1;
        } else {
            let x = &a[i].1 - s * &b[j].1;
            if !x.is_zero() {
                out.push((a[i].0, x));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Sparse rational matrix keyed by `(row, col)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Rational>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn from_dense(rows: &[Vec<Rational>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = SparseMatrix::new(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (c, x) in row.iter().enumerate() {
                m.set(r, c, x.clone());
            }
        }
        m
    }

    pub fn from_sparse_rows(cols: usize, rows: &[SparseVec]) -> Self {
        let mut m = SparseMatrix::new(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            for (c, x) in row {
                m.set(r, *c, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn set(&mut self, r: usize, c: usize, x: Rational) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        if x.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), x);
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.entries.get(&(r, c)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn row_vectors(&self) -> Vec<SparseVec> {
        let mut out = vec![Vec::new(); self.rows];
        for ((r, c), x) in &self.entries {
            out[*r].push((*c, x.clone()));
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![Rational::zero(); self.rows];
        for ((r, c), x) in &self.entries {
            if !v[*c].is_zero() {
                out[*r] += x * &v[*c];
            }
        }
        out
    }

    fn echelon(&self) -> Echelon {
        let mut ech = Echelon::new(self.cols);
        for row in self.row_vectors() {
            ech.insert(row);
        }
        ech
    }

    pub fn rank(&self) -> usize {
        self.echelon().rank()
    }

    /// Basis of the right null space, as dense vectors.
    pub fn kernel_basis(&self) -> Vec<Vec<Rational>> {
        self.echelon().kernel_basis().iter().map(|v| to_dense(v, self.cols)).collect()
    }
}

/// Incrementally maintained reduced row echelon form.
///
/// How `Echelon::insert` chooses the pivot among the surviving entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Entry of smallest numerator-plus-denominator bit length, ties to the lowest column.
    #[default]
    SmallestHeight,
    /// Highest column index.
    LastColumn,
}

/// Every stored row has a pivot entry equal to one, and no stored row has a
/// nonzero entry in another row's pivot column. Pivots are restricted to
/// columns below `pivot_limit`; columns at or beyond it act as augmented
/// right-hand sides.
#[derive(Clone, Debug)]
pub struct Echelon {
    cols: usize,
    pivot_limit: usize,
    rows: Vec<SparseVec>,
    pivots: Vec<usize>,
    pivot_row: HashMap<usize, usize>,
    inconsistent: bool,
    rule: PivotRule,
}

impl Echelon {
    pub fn new(cols: usize) -> Self {
        Self::with_pivot_limit(cols, cols)
    }

    pub fn with_pivot_limit(cols: usize, pivot_limit: usize) -> Self {
        Echelon { cols, pivot_limit, rows: Vec::new(), pivots: Vec::new(), pivot_row: HashMap::new(), inconsistent: false, rule: PivotRule::default() }
    }

    pub fn with_rule(mut self, rule: PivotRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_row.contains_key(&col)
    }

    /// True once a row reduced to something supported only beyond the pivot limit.
    pub fn is_inconsistent(&self) -> bool {
        self.inconsistent
    }

    pub fn rows(&self) -> impl Iterator<Item = (usize, &SparseVec)> {
        self.pivots.iter().copied().zip(self.rows.iter())
    }

    /// Remainder of `v` modulo the row space: all pivot columns are cleared.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let hits: Vec<(usize, Rational)> =
            v.iter().filter_map(|(c, x)| self.pivot_row.get(c).map(|&r| (r, x.clone()))).collect();
        if hits.is_empty() {
            return v.clone();
        }
        if hits.len() == 1 {
            let (r, s) = &hits[0];
            return sub_scaled(v, s, &self.rows[*r]);
        }
        let mut acc: BTreeMap<usize, Rational> = v.iter().cloned().collect();
        for (r, s) in &hits {
            for (c, x) in &self.rows[*r] {
                let e = acc.entry(*c).or_insert_with(Rational::zero);
                *e -= s * x;
            }
        }
        acc.into_iter().filter(|(_, x)| !x.is_zero()).collect()
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v` to the row space. Returns the new pivot column if the rank grew.
    pub fn insert(&mut self, v: SparseVec) -> Option<usize> {
        debug_assert!(v.iter().all(|(c, _)| *c < self.cols));
        let r = self.reduce(&v);
        if r.is_empty() {
            return None;
        }
        let mut candidates = r.iter().filter(|(c, _)| *c < self.pivot_limit);
        let pivot = match self.rule {
            PivotRule::SmallestHeight => candidates.min_by_key(|(c, x)| (height(x), *c)),
            PivotRule::LastColumn => candidates.next_back(),
        }
        .map(|(c, x)| (*c, x.clone()));
        let Some((pc, px)) = pivot else {
            self.inconsistent = true;
            return None;
        };
        let inv = px.recip();
        let r: SparseVec = r.into_iter().map(|(c, x)| (c, x * &inv)).collect();
        for row in self.rows.iter_mut() {
            if let Some(s) = lookup(row, pc).cloned() {
                *row = sub_scaled(row, &s, &r);
            }
        }
        self.pivot_row.insert(pc, self.rows.len());
        self.pivots.push(pc);
        self.rows.push(r);
        Some(pc)
    }

    /// Basis of `{x : row . x = 0 for all rows}` restricted to the pivotable columns.
    pub fn kernel_basis(&self) -> Vec<SparseVec> {
        let mut by_free: HashMap<usize, Vec<(usize, Rational)>> = HashMap::new();
        for (pc, row) in self.rows() {
            for (c, x) in row {
                if *c != pc && *c < self.pivot_limit {
                    by_free.entry(*c).or_default().push((pc, -x.clone()));
                }
            }
        }
        (0..self.pivot_limit)
            .filter(|c| !self.is_pivot(*c))
            .map(|f| {
                let mut v = by_free.remove(&f).unwrap_or_default();
                v.push((f, Rational::one()));
                v.sort_by_key(|(c, _)| *c);
                v
            })
            .collect()
    }

    /// Particular solution with free variables set to zero, reading column
    /// `rhs_col` (beyond the pivot limit) as the right-hand side.
    pub fn particular_solution(&self, rhs_col: usize) -> Option<SparseVec> {
        if self.inconsistent {
            return None;
        }
        let mut out: SparseVec = self
            .rows()
            .filter_map(|(pc, row)| lookup(row, rhs_col).map(|x| (pc, x.clone())))
            .collect();
        out.sort_by_key(|(c, _)| *c);
        Some(out)
    }
}

/// Basis of the right null space of `m`.
pub fn kernel_basis(m: &SparseMatrix) -> Vec<Vec<Rational>> {
    m.kernel_basis()
}

/// Coefficients `c` with `sum c_i gens_i = v`, or `None` if `v` is not in the span.
pub fn span_membership(v: &[Rational], gens: &[Vec<Rational>]) -> Result<Option<Vec<Rational>>> {
    if let Some(g) = gens.iter().find(|g| g.len() != v.len()) {
        return Err(Error::Dimension(format!("generator length {} vs vector length {}", g.len(), v.len())));
    }
    let n = gens.len();
    let mut ech = Echelon::with_pivot_limit(n + 1, n);
    for row in 0..v.len() {
        let mut r: SparseVec =
            gens.iter().enumerate().filter(|(_, g)| !g[row].is_zero()).map(|(j, g)| (j, g[row].clone())).collect();
        if !v[row].is_zero() {
            r.push((n, v[row].clone()));
        }
        ech.insert(r);
        if ech.is_inconsistent() {
            return Ok(None);
        }
    }
    Ok(ech.particular_solution(n).map(|s| to_dense(&s, n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{frac, int};

    fn dense(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn kernel_of_zero_matrix() {
        let m = SparseMatrix::new(2, 2);
        assert_eq!(m.kernel_basis().len(), 2);
    }

    #[test]
    fn kernel_of_rank_one() {
        let m = SparseMatrix::from_dense(&dense(&[&[1, 1], &[0, 0]]));
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        assert_eq!(&k[0][0] + &k[0][1], int(0));
        assert!(!k[0][0].is_zero());
    }

    #[test]
    fn span_membership_examples() {
        let g = dense(&[&[1, 0, 2], &[0, 1, 1]]);
        let v = vec![int(1), int(1), int(3)];
        assert_eq!(span_membership(&v, &g).unwrap(), Some(vec![int(1), int(1)]));
        let g = dense(&[&[1, 0]]);
        assert_eq!(span_membership(&[int(0), int(1)], &g).unwrap(), None);
        assert!(span_membership(&[int(0)], &g).is_err());
    }

    #[test]
    fn echelon_reduce_clears_pivots() {
        let mut e = Echelon::new(3);
        e.insert(vec![(0, int(2)), (1, int(4))]);
        e.insert(vec![(1, frac(1, 3)), (2, int(1))]);
        let r = e.reduce(&vec![(0, int(1)), (1, int(1)), (2, int(1))]);
        for (c, _) in &r {
            assert!(!e.is_pivot(*c));
        }
        assert_eq!(e.rank(), 2);
        assert!(e.contains(&vec![(0, int(2)), (1, int(4))]));
    }
}
