use std::fmt;

use crate::error::{Error, Result};

/// `L(-n_1) ... L(-n_k)` applied to the lowest-weight vector, `n_1 >= ... >= n_k >= 1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Pbw(Vec<u32>);

impl Pbw {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.iter().any(|&p| p == 0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::IllegalMonomial(parts, "PBW order (weakly decreasing, positive)".into()));
        }
        Ok(Pbw(parts))
    }

    pub(crate) fn from_sorted(parts: Vec<u32>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        Pbw(parts)
    }

    /// The lowest-weight vector itself.
    pub fn empty() -> Self {
        Pbw(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn has_part_one(&self) -> bool {
        self.0.last() == Some(&1)
    }

    pub(crate) fn prepend(&self, n: u32) -> Self {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(n);
        v.extend_from_slice(&self.0);
        Pbw(v)
    }

    pub(crate) fn tail(&self) -> Self {
        Pbw(self.0[1..].to_vec())
    }
}

impl fmt::Debug for Pbw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for Pbw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "v");
        }
        for p in &self.0 {
            write!(f, "L(-{p})")?;
        }
        write!(f, "v")
    }
}

/// Partitions of `d` with every part at least `min_part`, in descending
/// lexicographic order (`[4], [3,1], [2,2], ...`).
pub fn partitions(d: u32, min_part: u32) -> Vec<Pbw> {
    fn rec(rem: u32, max: u32, min: u32, cur: &mut Vec<u32>, out: &mut Vec<Pbw>) {
        if rem == 0 {
            out.push(Pbw(cur.clone()));
            return;
        }
        let top = rem.min(max);
        for p in (min..=top).rev() {
            cur.push(p);
            rec(rem - p, p, min, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, d, min_part.max(1), &mut Vec::new(), &mut out);
    out
}
