use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::samples::*;
use super::*;
use crate::exactla::{frac, int, Matrix, Rational};
use crate::intertwine::{build_constraints, solve_mode_families, Params};

fn m(rows: &[&[i64]]) -> Matrix {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()).unwrap()
}

fn unit(n: usize, k: usize) -> Vec<Rational> {
    (0..n).map(|i| if i == k { int(1) } else { int(0) }).collect()
}

fn random_vec<R: Rng>(rng: &mut R, n: usize) -> Vec<Rational> {
    (0..n).map(|_| int(rng.gen_range(-4..=4))).collect()
}

#[test]
fn jordan_split_examples() {
    let g = jordan_split(frac(1, 2), vec![Matrix::scalar(2, &frac(1, 2)), Matrix::scalar(1, &frac(3, 2))]).unwrap();
    assert!(g.nilpotent(0).is_zero() && g.nilpotent(1).is_zero());
    assert_eq!(g.nilpotency_index(), 1);

    let l = int(3);
    let g = jordan_split(int(2), vec![Matrix::zeros(0, 0), &Matrix::scalar(2, &l) + &m(&[&[0, 1], &[0, 0]])]).unwrap();
    assert_eq!(g.nilpotent(1), &m(&[&[0, 1], &[0, 0]]));
    assert_eq!(g.semisimple(1), &Matrix::scalar(2, &l));
    assert!(g.nilpotent(1).pow(2).is_zero());

    let n3 = m(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
    let g = jordan_split(int(0), vec![n3.clone()]).unwrap();
    assert_eq!(g.nilpotency_index(), 3);
    assert!(!n3.pow(2).is_zero() && n3.pow(3).is_zero());

    let bad = jordan_split(int(0), vec![Matrix::scalar(1, &int(1))]);
    assert!(matches!(bad, Err(crate::Error::Spectrum(_))));
    let bad = jordan_split(int(0), vec![m(&[&[0, 1], &[1, 0]])]);
    assert!(matches!(bad, Err(crate::Error::Spectrum(_))));
}

#[test]
fn x_power_examples() {
    let lam = frac(1, 3);
    let g = jordan_split(lam.clone(), vec![Matrix::scalar(1, &lam), &Matrix::scalar(2, &(&lam + int(1))) + &m(&[&[0, 1], &[0, 0]])]).unwrap();
    let s = x_pow_l0(&g, Direction::Minus, 0, &[int(5)]).unwrap();
    assert_eq!(s.terms().len(), 1);
    assert_eq!(s.terms().get(&(-lam.clone(), 0)), Some(&vec![int(5)]));

    let e = &lam + int(1);
    let s = x_pow_l0(&g, Direction::Plus, 1, &unit(2, 1)).unwrap();
    let mut expected = LogSeries::zero(2);
    expected.add_term(e.clone(), 0, &unit(2, 1)).unwrap();
    expected.add_term(e.clone(), 1, &unit(2, 0)).unwrap();
    assert_eq!(s, expected);
    assert_eq!(s.max_log_degree(), Some(1));
}

#[test]
fn derivation_rule_holds() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let lowest = frac(rng.gen_range(-5..5), 7);
        let g = random_operator_data(&mut rng, lowest, &[1, 3, 4], 3).unwrap();
        for d in 0..=2 {
            let v = random_vec(&mut rng, g.dim(d));
            assert!(derivation_consistent(&g, Direction::Plus, d, &v).unwrap());
            assert!(derivation_consistent(&g, Direction::Minus, d, &v).unwrap());
        }
    }
}

// x^{L(0)} Phi(x^{-L(0)} u; k) x^{-L(0)} v expanded directly from the series
fn expand_directly(
    phi: &GradedBlocks,
    g: [&GradedOperatorData; 3],
    i: u32,
    u: &[Rational],
    j: u32,
    v: &[Rational],
    s: u32,
) -> LogSeries {
    let su = x_pow_l0(g[0], Direction::Minus, i, u).unwrap();
    let sv = x_pow_l0(g[1], Direction::Minus, j, v).unwrap();
    let mut out = LogSeries::zero(g[2].dim(s));
    for ((eu, a), uu) in su.terms() {
        for ((ev, b), vv) in sv.terms() {
            let w = phi.operator(i, uu, j, s).mul_vec(vv);
            for ((ew, c), ww) in x_pow_l0(g[2], Direction::Plus, s, &w).unwrap().terms() {
                out.add_term(eu + ev + ew, a + b + c, ww).unwrap();
            }
        }
    }
    out
}

#[test]
fn transform_matches_direct_expansion() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..6 {
        let g1 = random_operator_data(&mut rng, frac(1, 2), &[2, 2, 3], 2).unwrap();
        let g2 = random_operator_data(&mut rng, frac(-1, 3), &[1, 2, 2], 3).unwrap();
        let g3 = random_operator_data(&mut rng, frac(2, 5), &[2, 1, 3], 3).unwrap();
        let shape = Shape::new(g1.dims(), g2.dims(), g3.dims()).unwrap();
        let phi = random_blocks(&mut rng, &shape);
        let j = from_z_graded(&phi, &g1, &g2, &g3).unwrap();
        for i in 0..=2 {
            for jj in 0..=2 {
                for s in 0..=2 {
                    let u = random_vec(&mut rng, g1.dim(i));
                    let v = random_vec(&mut rng, g2.dim(jj));
                    assert_eq!(j.evaluate(i, &u, jj, &v, s).unwrap(), expand_directly(&phi, [&g1, &g2, &g3], i, &u, jj, &v, s));
                }
            }
        }
    }
}

#[test]
fn ordinary_modules_give_no_logs() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g1 = random_operator_data(&mut rng, int(1), &[1, 2], 1).unwrap();
    let g2 = random_operator_data(&mut rng, int(0), &[2, 1], 1).unwrap();
    let g3 = random_operator_data(&mut rng, frac(1, 2), &[1, 1], 1).unwrap();
    let phi = random_blocks(&mut rng, &Shape::new(g1.dims(), g2.dims(), g3.dims()).unwrap());
    let j = from_z_graded(&phi, &g1, &g2, &g3).unwrap();
    assert_eq!(j.log_length(), 1);
    assert_eq!(j.component(0), phi);
    assert!(j.component(1).is_zero());
    assert_eq!(j.shift(), &frac(-1, 2));
}

#[test]
fn single_jordan_block_in_target() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let plain = |lowest: Rational, dims: &[usize]| {
        jordan_split(lowest.clone(), dims.iter().enumerate().map(|(d, &n)| Matrix::scalar(n, &(&lowest + int(d as i64)))).collect()).unwrap()
    };
    let g1 = plain(int(0), &[1, 1, 2]);
    let g2 = plain(int(0), &[1, 2, 2]);
    let n3 = m(&[&[0, 1], &[0, 0]]);
    let g3 = jordan_split(int(0), vec![Matrix::scalar(1, &int(0)), &Matrix::scalar(2, &int(1)) + &n3, Matrix::scalar(1, &int(2))]).unwrap();
    let shape = Shape::new(g1.dims(), g2.dims(), g3.dims()).unwrap();
    let phi = random_blocks(&mut rng, &shape);
    let j = from_z_graded(&phi, &g1, &g2, &g3).unwrap();
    assert_eq!(j.log_length(), 2);
    let first = j.component(1);
    for key in shape.keys() {
        let expected = if key.s == 1 { &n3 * &phi.get(&key) } else { Matrix::zeros(shape.third[key.s as usize], shape.second[key.j as usize]) };
        assert_eq!(first.get(&key), expected, "{key:?}");
    }
}

#[test]
fn round_trip_and_log_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..15 {
        let dims = |rng: &mut ChaCha8Rng| (0..3).map(|_| rng.gen_range(1..=3)).collect::<Vec<_>>();
        let (d1, d2, d3) = (dims(&mut rng), dims(&mut rng), dims(&mut rng));
        let g1 = random_operator_data(&mut rng, frac(1, 4), &d1, 3).unwrap();
        let g2 = random_operator_data(&mut rng, frac(2, 3), &d2, 3).unwrap();
        let g3 = random_operator_data(&mut rng, int(1), &d3, 3).unwrap();
        let phi = random_blocks(&mut rng, &Shape::new(d1, d2, d3).unwrap());
        let j = from_z_graded(&phi, &g1, &g2, &g3).unwrap();
        assert_eq!(to_z_graded(&j), phi);
        let bound = g1.nilpotency_index() + g2.nilpotency_index() + g3.nilpotency_index() - 2;
        assert!(j.log_length() as u32 <= bound);
    }
}

#[test]
fn log_degree_can_exceed_each_single_index() {
    let n = m(&[&[0, 1], &[0, 0]]);
    let g = jordan_split(int(0), vec![n.clone()]).unwrap();
    let g3 = jordan_split(int(0), vec![Matrix::zeros(1, 1)]).unwrap();
    let mut phi = GradedBlocks::zero(Shape::new(vec![2], vec![2], vec![1]).unwrap());
    phi.set(BlockKey { i: 0, p: 0, j: 0, s: 0 }, m(&[&[1, 0]])).unwrap();
    let j = from_z_graded(&phi, &g, &g, &g3).unwrap();
    assert_eq!(j.log_length(), 3);
    assert_eq!(j.component(2).get(&BlockKey { i: 0, p: 1, j: 0, s: 0 }), m(&[&[0, 1]]));
    assert_eq!(g.nilpotency_index(), 2);
}

#[test]
fn extraction_ignores_log_terms() {
    let shape = Shape::new(vec![1, 1], vec![1, 1], vec![1, 1]).unwrap();
    let mut one = GradedBlocks::zero(shape.clone());
    one.set(BlockKey { i: 0, p: 0, j: 1, s: 0 }, m(&[&[3]])).unwrap();
    let j = LogModeFamily::new(int(0), shape.clone(), vec![GradedBlocks::zero(shape.clone()), one]).unwrap();
    assert!(to_z_graded(&j).is_zero());
    let zero = LogModeFamily::new(int(0), shape.clone(), vec![]).unwrap();
    assert!(to_z_graded(&zero).is_zero());
    assert!(l1_recursion(&zero, &[Matrix::identity(1)]).unwrap());
}

#[test]
fn recursion_on_derivative_compatible_families() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..8 {
        let g1 = constant_operator_data(&mut rng, frac(1, 3), 3, 2, 3).unwrap();
        let g2 = random_operator_data(&mut rng, frac(1, 5), &[2, 2, 3], 3).unwrap();
        let g3 = random_operator_data(&mut rng, frac(-2, 7), &[2, 3, 2], 2).unwrap();
        let (phi, raise) = derivative_compatible(&mut rng, &g1, &g2, &g3).unwrap();
        let j = from_z_graded(&phi, &g1, &g2, &g3).unwrap();
        assert!(j.log_length() > 1);
        assert!(l1_recursion(&j, &raise).unwrap());

        let mut bad = phi.clone();
        let key = BlockKey { i: 1, p: 0, j: 0, s: 0 };
        let mut b = bad.get(&key);
        b.add_at(0, 0, &int(1));
        bad.set(key, b).unwrap();
        let jb = from_z_graded(&bad, &g1, &g2, &g3).unwrap();
        assert!(!l1_recursion(&jb, &raise).unwrap());
    }
}

#[test]
fn recursion_on_solved_virasoro_family() {
    let p = Params::new(int(1), frac(1, 2), frac(1, 3), frac(1, 5));
    let depth = 2;
    let sol = solve_mode_families(&build_constraints(&p, depth, 4));
    let phi = GradedBlocks::from_mode_family(&sol.basis[0]).unwrap();
    let g1 = GradedOperatorData::from_module(&p.first(), depth).unwrap();
    let g2 = GradedOperatorData::from_module(&p.second(), depth).unwrap();
    let g3 = GradedOperatorData::from_module(&p.target(), depth).unwrap();
    let j = from_z_graded(&phi, &g1, &g2, &g3).unwrap();
    assert_eq!(j.log_length(), 1);
    assert_eq!(j.shift(), &(frac(1, 5) - frac(1, 2) - frac(1, 3)));
    let raise: Vec<Matrix> = (0..depth).map(|d| action_matrix(&p.first(), -1, d)).collect();
    assert!(l1_recursion(&j, &raise).unwrap());
    assert_eq!(GradedBlocks::from_json(&phi.to_json()).unwrap(), phi);
    let mut bad = phi.clone();
    let key = BlockKey { i: 1, p: 0, j: 0, s: 0 };
    let mut b = bad.get(&key);
    b.add_at(0, 0, &int(1));
    bad.set(key, b).unwrap();
    assert!(!l1_recursion(&from_z_graded(&bad, &g1, &g2, &g3).unwrap(), &raise).unwrap());
}
