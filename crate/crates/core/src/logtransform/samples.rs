//! Random graded data for exercising the transforms.

use rand::Rng;

use super::family::{nilpotent_derivation, BlockKey, GradedBlocks, Shape};
use super::graded::{jordan_split, GradedOperatorData};
use crate::error::Result;
use crate::exactla::{int, Matrix, Rational};

fn small<R: Rng>(rng: &mut R) -> Rational {
    int(rng.gen_range(-3..=3))
}

fn nonzero<R: Rng>(rng: &mut R) -> Rational {
    let x = rng.gen_range(1..=3);
    int(if rng.gen_bool(0.5) { x } else { -x })
}

/// Nilpotent matrix made of Jordan-type blocks of size at most `max_block`,
/// with random nonzero superdiagonal entries.
pub fn random_nilpotent<R: Rng>(rng: &mut R, dim: usize, max_block: usize) -> Matrix {
    let mut m = Matrix::zeros(dim, dim);
    let mut start = 0;
    while start < dim {
        let size = rng.gen_range(1..=max_block.max(1)).min(dim - start);
        for r in start..start + size - 1 {
            m.set(r, r + 1, nonzero(rng));
        }
        start += size;
    }
    m
}

/// `L(0) = (lowest + d) + N_d` with random nilpotent parts.
pub fn random_operator_data<R: Rng>(rng: &mut R, lowest: Rational, dims: &[usize], max_block: usize) -> Result<GradedOperatorData> {
    let l0 = dims
        .iter()
        .enumerate()
        .map(|(d, &n)| &Matrix::scalar(n, &(&lowest + int(d as i64))) + &random_nilpotent(rng, n, max_block))
        .collect();
    jordan_split(lowest, l0)
}

/// Same nilpotent part in every degree, for a first space whose `L(-1)` is the identity between degrees.
pub fn constant_operator_data<R: Rng>(rng: &mut R, lowest: Rational, dim: usize, depth: u32, max_block: usize) -> Result<GradedOperatorData> {
    let n = random_nilpotent(rng, dim, max_block);
    let l0 = (0..=depth).map(|d| &Matrix::scalar(dim, &(&lowest + int(d as i64))) + &n).collect();
    jordan_split(lowest, l0)
}

pub fn random_blocks<R: Rng>(rng: &mut R, shape: &Shape) -> GradedBlocks {
    let mut out = GradedBlocks::zero(shape.clone());
    let keys: Vec<BlockKey> = shape.keys().collect();
    for key in keys {
        let (r, c) = (shape.third[key.s as usize], shape.second[key.j as usize]);
        let mut m = Matrix::zeros(r, c);
        for a in 0..r {
            for b in 0..c {
                m.set(a, b, small(rng));
            }
        }
        out.set(key, m).expect("shape from the same family");
    }
    out
}

/// A family obeying `Phi(L(-1)u; k+1) = L(0)Phi(u;k) - Phi(L(0)u;k) - Phi(u;k)L(0)`
/// when `L(-1)` is the identity from `W1(i)` to `W1(i+1)`: random on degree
/// zero of the first space and extended upward by the relation. `g1` must
/// have the same nilpotent part in every degree.
pub fn derivative_compatible<R: Rng>(
    rng: &mut R,
    g1: &GradedOperatorData,
    g2: &GradedOperatorData,
    g3: &GradedOperatorData,
) -> Result<(GradedBlocks, Vec<Matrix>)> {
    let shape = Shape::new(g1.dims(), g2.dims(), g3.dims())?;
    let depth = shape.depth();
    let shift = g3.lowest() - g1.lowest() - g2.lowest();
    let mut phi = GradedBlocks::zero(shape.clone());
    for key in shape.keys().filter(|k| k.i == 0).collect::<Vec<_>>() {
        let (r, c) = (shape.third[key.s as usize], shape.second[key.j as usize]);
        let mut m = Matrix::zeros(r, c);
        for a in 0..r {
            for b in 0..c {
                m.set(a, b, small(rng));
            }
        }
        phi.set(key, m)?;
    }
    for i in 0..depth {
        let d = nilpotent_derivation(&phi, g1, g2, g3);
        for key in shape.keys().filter(|k| k.i == i).collect::<Vec<_>>() {
            let factor = &shift - int(key.mode() + 1);
            let next = &phi.get(&key).scale(&factor) + &d.get(&key);
            phi.set(BlockKey { i: i + 1, ..key }, next)?;
        }
    }
    let raise = (0..depth).map(|i| Matrix::identity(shape.first[i as usize])).collect();
    Ok((phi, raise))
}
