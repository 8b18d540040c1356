use super::*;
use crate::exactla::{frac, int, Matrix, Rational};
use crate::virasoro::{omega, vacuum_vector, word, ModuleElement, ModuleId};

fn t_poly(c: &[(u32, i64)]) -> Poly {
    Poly::from_coeffs(c.iter().map(|&(m, x)| (m, int(x))))
}

fn vacuum_basis(c: &Rational, top: u32) -> Vec<ModuleElement> {
    let vac = ModuleId::vacuum(c.clone());
    (0..=top).flat_map(|d| vac.basis_at_degree(d)).map(|p| ModuleElement::monomial(&vac, p)).collect()
}

fn verma_basis(v: &ModuleId, top: u32) -> Vec<ModuleElement> {
    (0..=top).flat_map(|d| v.basis_at_degree(d)).map(|p| ModuleElement::monomial(v, p)).collect()
}

#[test]
fn vacuum_worked_examples() {
    let c = frac(1, 2);
    let vac = ModuleId::vacuum(c.clone());
    assert_eq!(vacuum_poly(&vacuum_vector(&c)).unwrap(), t_poly(&[(0, 1)]));
    assert_eq!(vacuum_poly(&omega(&c)).unwrap(), t_poly(&[(1, 1)]));
    let sq = word(&vac, &[-2, -2]);
    assert_eq!(vacuum_poly(&sq).unwrap(), t_poly(&[(2, 1), (1, 2)]));
    let ww = star(&omega(&c), &omega(&c), Side::Left).unwrap();
    assert_eq!(vacuum_poly(&ww).unwrap(), t_poly(&[(2, 1)]));
    assert_eq!(
        reduce_vacuum(&sq).unwrap().to_json(),
        serde_json::json!({"poly": [[1, "2"], [2, "1"]]})
    );
}

#[test]
fn rewriting_agrees_with_oracle() {
    let c = frac(26, 27);
    for u in vacuum_basis(&c, 6) {
        let a = reduce_vacuum_rewriting(&u).unwrap();
        let b = reduce_vacuum_oracle(&u, &ReduceConfig::default()).unwrap();
        assert_eq!(a, b, "{u:?}");
    }
}

#[test]
fn vacuum_product_is_multiplicative() {
    let c = int(1);
    let basis = vacuum_basis(&c, 6);
    for a in &basis {
        for b in &basis {
            if a.max_degree() + b.max_degree() > 6 {
                continue;
            }
            let lhs = vacuum_poly(&star(a, b, Side::Left).unwrap()).unwrap();
            let rhs = vacuum_poly(a).unwrap().mul(&vacuum_poly(b).unwrap());
            assert_eq!(lhs, rhs, "a={a:?} b={b:?}");
        }
    }
}

#[test]
fn generators_vanish_in_quotient() {
    let c = frac(1, 2);
    let vac = ModuleId::vacuum(c.clone());
    for g in o_span_generators(&vac, 3) {
        assert!(vacuum_poly(&g).unwrap().is_zero(), "{g:?}");
    }
    let v = ModuleId::verma(c, frac(1, 16));
    for g in o_span_generators(&v, 2) {
        assert!(verma_poly(&g).unwrap().is_zero(), "{g:?}");
    }
}

#[test]
fn verma_worked_examples() {
    for (c, h) in [(frac(1, 2), frac(1, 16)), (int(1), frac(1, 3)), (frac(26, 27), frac(5, 7))] {
        let v = ModuleId::verma(c, h.clone());
        let vh = ModuleElement::lowest(&v);
        assert_eq!(verma_poly(&vh).unwrap(), Poly2::constant(int(1)));
        let mut first = word(&v, &[-2]);
        first.add_scaled(&word(&v, &[-1]), &int(2)).unwrap();
        first.add_scaled(&vh, &h).unwrap();
        assert_eq!(verma_poly(&first).unwrap(), Poly2::monomial(1, 0, int(1)));
        let second = word(&v, &[-2]).try_add(&word(&v, &[-1])).unwrap();
        assert_eq!(verma_poly(&second).unwrap(), Poly2::monomial(0, 1, int(1)));
        let mut expected = Poly2::monomial(1, 0, int(1));
        expected.add_term(0, 1, int(-1));
        expected.add_term(0, 0, -h);
        assert_eq!(verma_poly(&word(&v, &[-1])).unwrap(), expected);
    }
}

#[test]
fn verma_answer_is_window_independent() {
    let v = ModuleId::verma(int(1), frac(1, 3));
    for u in verma_basis(&v, 3) {
        let small = verma_poly(&u).unwrap();
        let cfg = ReduceConfig { window: Some(2 * u.max_degree() + 2), general_cap: 3 };
        assert_eq!(verma_poly_with(&u, &cfg).unwrap(), small, "{u:?}");
    }
}

#[test]
fn window_too_small_is_reported() {
    let v = ModuleId::verma(int(1), frac(1, 3));
    let u = word(&v, &[-3, -2]);
    let cfg = ReduceConfig { window: Some(3), general_cap: 1 };
    assert!(matches!(verma_poly_with(&u, &cfg), Err(crate::Error::Truncation(_))));
}

#[test]
fn bimodule_compatibility_low_degree() {
    let c = frac(1, 2);
    let v = ModuleId::verma(c.clone(), frac(1, 16));
    for a in vacuum_basis(&c, 3) {
        let pa = vacuum_poly(&a).unwrap();
        for u in verma_basis(&v, 2) {
            let pu = verma_poly(&u).unwrap();
            let left = verma_poly(&star(&a, &u, Side::Left).unwrap()).unwrap();
            assert_eq!(left, pa.in_variable(true).mul(&pu), "a={a:?} u={u:?}");
            let right = verma_poly(&star(&a, &u, Side::Right).unwrap()).unwrap();
            assert_eq!(right, pu.mul(&pa.in_variable(false)), "a={a:?} u={u:?}");
        }
    }
}

#[test]
fn conformal_relations_lie_in_span() {
    let v = ModuleId::verma(frac(26, 27), frac(5, 7));
    let oracle = QuotientOracle::shared(&v, 8, 2);
    for u in verma_basis(&v, 3) {
        for k in -4..=-2 {
            let g = conformal_relation(&u, k);
            assert!(oracle.contains(&g).unwrap());
            assert!(verma_poly(&g).unwrap().is_zero());
        }
    }
    // truncated quotient has one class per L(-2)^a L(-1)^b v_h with 2a + b <= 8
    assert_eq!(oracle.quotient_dimension(), (0..=4).map(|a| 9 - 2 * a).sum::<usize>());
}

#[test]
fn o_matrix_examples() {
    let c = int(1);
    let u = AVModule::new(Matrix::from_rows(vec![vec![int(1), int(1)], vec![int(0), int(1)]]).unwrap()).unwrap();
    assert_eq!(o_matrix(&vacuum_vector(&c), &u).unwrap(), Matrix::identity(2));
    let h = frac(3, 5);
    assert_eq!(o_matrix(&omega(&c), &AVModule::scalar(h.clone())).unwrap(), Matrix::scalar(1, &h));
    let sq = word(&ModuleId::vacuum(c), &[-2, -2]);
    assert_eq!(o_matrix(&sq, &AVModule::scalar(int(3))).unwrap(), Matrix::scalar(1, &int(15)));
}

#[test]
fn module_kind_is_checked() {
    let v = ModuleId::verma(int(1), frac(1, 3));
    assert!(reduce_vacuum(&ModuleElement::lowest(&v)).is_err());
    assert!(reduce_verma(&vacuum_vector(&int(1))).is_err());
}
