use crate::error::{Error, Result};
use crate::exactla::{Echelon, Matrix, Rational, SparseVec};
use crate::zhumod::AVModule;

use super::family::HomData;
use num_traits::One;

/// Dimension and basis of the module maps out of the induced module
/// `C[t1, t2] (x)_{C[t2]} U2` into `U3`, where `t1` acts through `U3` and
/// `t2` through `U2`. Each map is determined by its restriction to `1 (x) U2`.
pub fn fusion_dim_hom(second: &AVModule, third: &AVModule) -> (usize, Vec<HomData>) {
    let (d2, d3) = (second.dimension(), third.dimension());
    let mut basis = Vec::with_capacity(d2 * d3);
    for r in 0..d3 {
        for c in 0..d2 {
            let mut m = Matrix::zeros(d3, d2);
            m.set(r, c, Rational::one());
            basis.push(HomData { matrix: m });
        }
    }
    (basis.len(), basis)
}

/// Extends a degree-zero map to `t1^m t2^n (x) w -> T3^m f0 T2^n w`.
pub fn extend_hom(f0: &HomData, second: &AVModule, third: &AVModule, m: u32, n: u32) -> Matrix {
    let left = third.t_action().pow(m);
    let right = second.t_action().pow(n);
    &(&left * &f0.matrix) * &right
}

/// Solves the linearity conditions for maps `f_{mn}` on `t1^m t2^n (x) U2`,
/// `m + n <= degree`, directly: `f_{m+1,n} = T3 f_{mn}` and
/// `f_{m,n+1} = f_{mn} T2`. Returns the solution dimension.
pub fn brute_force_hom_dimension(second: &AVModule, third: &AVModule, degree: u32) -> Result<usize> {
    let (d2, d3) = (second.dimension(), third.dimension());
    if d2 == 0 || d3 == 0 {
        return Err(Error::Dimension("modules must be nonzero".into()));
    }
    let monomials: Vec<(u32, u32)> =
        (0..=degree).flat_map(|s| (0..=s).map(move |m| (m, s - m))).collect();
    let block = d2 * d3;
    let pos = |m: u32, n: u32| monomials.iter().position(|&k| k == (m, n)).expect("monomial in range") * block;
    let var = |m: u32, n: u32, r: usize, c: usize| pos(m, n) + r * d2 + c;
    let (t2, t3) = (second.t_action(), third.t_action());
    let mut ech = Echelon::new(monomials.len() * block);
    for &(m, n) in &monomials {
        if m + n + 1 > degree {
            continue;
        }
        for r in 0..d3 {
            for c in 0..d2 {
                // f_{m+1,n}[r,c] - sum_k T3[r,k] f_{mn}[k,c]
                let mut row: Vec<(usize, Rational)> = vec![(var(m + 1, n, r, c), Rational::one())];
                for k in 0..d3 {
                    row.push((var(m, n, k, c), -t3.get(r, k).clone()));
                }
                ech.insert(crate::exactla::collect_sparse(row));
                // f_{m,n+1}[r,c] - sum_k f_{mn}[r,k] T2[k,c]
                let mut row: SparseVec = vec![(var(m, n + 1, r, c), Rational::one())];
                for k in 0..d2 {
                    row.push((var(m, n, r, k), -t2.get(k, c).clone()));
                }
                ech.insert(crate::exactla::collect_sparse(row));
            }
        }
    }
    Ok(ech.cols() - ech.rank())
}
