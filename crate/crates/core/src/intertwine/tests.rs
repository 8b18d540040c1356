use std::sync::Arc;

use super::*;
use crate::exactla::{frac, int, Matrix, Rational};
use crate::virasoro::{ModuleElement, Pbw};
use crate::zhumod::AVModule;

fn generic() -> Params {
    Params::new(int(1), frac(1, 2), frac(1, 3), frac(1, 5))
}

fn solved(p: &Params, depth: u32) -> (ConstraintSystem, TruncatedModeFamily) {
    let sys = build_constraints(p, depth, 4);
    let sol = solve_mode_families(&sys);
    assert_eq!(sol.dimension, 1);
    let phi = sol.basis[0].clone();
    (sys, phi)
}

#[test]
fn verma_truncation_dimensions() {
    let m = generalized_verma(&frac(1, 2), &int(1), 0).unwrap();
    assert_eq!(m.graded_dimensions, vec![1]);
    let m = generalized_verma(&frac(1, 2), &int(1), 4).unwrap();
    assert_eq!(m.graded_dimensions, vec![1, 1, 2, 3, 5]);
}

#[test]
fn vacuum_state_gives_no_rows() {
    let sys = build_constraints(&generic(), 2, 3);
    assert_eq!(sys.rows_for_state(&Pbw::empty()), 0);
    assert!(sys.rows_for_state(&Pbw::new(vec![2]).unwrap()) > 0);
}

#[test]
fn rows_grow_with_depth() {
    let rows: Vec<usize> = (1..=3).map(|d| build_constraints(&generic(), d, 3).rows()).collect();
    assert!(rows.windows(2).all(|w| w[0] < w[1]), "{rows:?}");
}

#[test]
fn generic_solution_is_one_dimensional() {
    for d in 0..=3 {
        let p = generic();
        let mut sys = build_constraints(&p, d, 4);
        assert_eq!(solve_mode_families(&sys).dimension, 1, "depth {d}");
        assert_eq!(sys.rank() + 1, sys.unknowns());
        sys.pin_degree_zero_blocks();
        assert_eq!(solve_mode_families(&sys).dimension, 0, "depth {d}");
    }
    let profile = dimension_profile(&Params::new(frac(1, 2), frac(1, 16), frac(1, 2), frac(1, 7)), &[1, 2], 3, false);
    assert_eq!(profile, vec![(1, 1), (2, 1)]);
}

#[test]
fn residual_holds_on_solution() {
    let p = generic();
    let (sys, phi) = solved(&p, 2);
    let zero = TruncatedModeFamily::zero(Arc::clone(sys.layout()));
    let mut checked = 0;
    for inst in candidate_instances(sys.layout(), 3) {
        if instance_rows(sys.layout(), &inst).is_none() {
            continue;
        }
        assert!(check_borcherds_residual(&phi, &inst).unwrap(), "{inst:?}");
        assert!(check_borcherds_residual(&zero, &inst).unwrap());
        checked += 1;
    }
    assert!(checked > 100);
}

#[test]
fn perturbed_family_fails_residual() {
    let p = generic();
    let (sys, phi) = solved(&p, 2);
    let mut bad = phi.clone();
    let u = Pbw::new(vec![1]).unwrap();
    let k = 0;
    let old = bad.block(&u, k, 0).unwrap().get(0, 0).clone();
    bad.set_entry(&u, k, 0, 0, 0, old + int(1)).unwrap();
    let failing = candidate_instances(sys.layout(), 3)
        .into_iter()
        .filter(|i| instance_rows(sys.layout(), i).is_some())
        .any(|i| !check_borcherds_residual(&bad, &i).unwrap());
    assert!(failing);
}

#[test]
fn out_of_window_instance_is_rejected() {
    let (_, phi) = solved(&generic(), 1);
    let inst = Instance { a: Pbw::new(vec![2]).unwrap(), u: Pbw::empty(), v: Pbw::empty(), l: -5, m: 0, n: 0 };
    assert!(matches!(check_borcherds_residual(&phi, &inst), Err(crate::Error::NotInterior(_))));
    let u = ModuleElement::lowest(&generic().first());
    let v = ModuleElement::lowest(&generic().second());
    assert!(matches!(phi.apply(&u, -4, &v), Err(crate::Error::NotInterior(_))));
    assert!(phi.apply(&u, 3, &v).unwrap().is_zero());
}

#[test]
fn lowest_data_is_normalized_and_linear() {
    let (_, phi) = solved(&generic(), 2);
    assert_eq!(extract_hom(&phi).matrix, Matrix::scalar(1, &int(1)));
    let s = frac(-3, 4);
    let combo = phi.scale(&s).add(&phi).unwrap();
    assert_eq!(extract_hom(&combo).matrix, Matrix::scalar(1, &(s + int(1))));
}

#[test]
fn derivative_and_factorization() {
    for p in [generic(), Params::new(frac(1, 2), frac(1, 16), frac(1, 2), frac(1, 7))] {
        let (_, phi) = solved(&p, 3);
        assert!(check_derivative_relation(&phi).unwrap() > 0);
        assert_eq!(check_zero_mode_factorization(&phi).unwrap(), 1 + 1 + 2 + 3);
    }
}

fn jordan(dim: usize, eig: Rational) -> AVModule {
    let rows = (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { eig.clone() } else if j == i + 1 { int(1) } else { int(0) }).collect())
        .collect();
    AVModule::new(Matrix::from_rows(rows).unwrap()).unwrap()
}

#[test]
fn fusion_dimension_matches_brute_force() {
    for a in 1..=3 {
        for b in 1..=3 {
            let second = jordan(a, frac(1, 3));
            let third = jordan(b, frac(2, 5));
            let (dim, basis) = fusion_dim_hom(&second, &third);
            assert_eq!(dim, a * b);
            assert_eq!(basis.len(), dim);
            assert_eq!(brute_force_hom_dimension(&second, &third, 4).unwrap(), dim);
            let ext = extend_hom(&basis[0], &second, &third, 1, 0);
            assert_eq!(ext, third.t_action() * &basis[0].matrix);
        }
    }
}

#[test]
fn family_json_roundtrip() {
    let (_, phi) = solved(&generic(), 2);
    let back = TruncatedModeFamily::from_json(&phi.to_json()).unwrap();
    assert_eq!(back, phi);
    let p = generic();
    assert_eq!(Params::from_json(&p.to_json()).unwrap(), p);
}
