//! Virasoro action on Verma modules, the vacuum module and restricted duals,
//! plus modes of arbitrary vacuum states.

mod element;
mod engine;
mod pbw;

pub use element::{DualElement, ModuleElement, ModuleId, ModuleKind};
pub use engine::{apply_virasoro, basis_at_degree, pair_elements, pairing, state_mode, VirasoroModule};
pub use pbw::{partitions, Pbw};

pub(crate) use engine::check_vacuum_state;

use crate::exactla::Rational;

/// The conformal vector `L(-2)1` of the vacuum module.
pub fn omega(c: &Rational) -> ModuleElement {
    ModuleElement::monomial(&ModuleId::vacuum(c.clone()), Pbw::from_sorted(vec![2]))
}

pub fn vacuum_vector(c: &Rational) -> ModuleElement {
    ModuleElement::lowest(&ModuleId::vacuum(c.clone()))
}

/// `L(-n_1)...L(-n_k)` applied to the lowest vector, in any order of modes;
/// the product is straightened.
pub fn word(module: &ModuleId, modes: &[i64]) -> ModuleElement {
    let mut u = ModuleElement::lowest(module);
    for &n in modes.iter().rev() {
        u = apply_virasoro(n, &u);
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{binomial, frac, int, sign};
    use num_traits::Zero;
    use proptest::prelude::*;

    fn verma() -> ModuleId {
        ModuleId::verma(frac(1, 2), frac(1, 16))
    }

    fn count_partitions(d: u32, min: u32) -> usize {
        // p(d, parts >= min) by the standard table recurrence
        let d = d as usize;
        let mut table = vec![0usize; d + 1];
        table[0] = 1;
        for part in (min as usize).max(1)..=d {
            for n in part..=d {
                table[n] += table[n - part];
            }
        }
        table[d]
    }

    #[test]
    fn basis_examples() {
        let v = verma();
        assert_eq!(
            basis_at_degree(&v, 2),
            vec![Pbw::new(vec![2]).unwrap(), Pbw::new(vec![1, 1]).unwrap()]
        );
        let vac = ModuleId::vacuum(int(1));
        assert_eq!(basis_at_degree(&vac, 4), vec![Pbw::new(vec![4]).unwrap(), Pbw::new(vec![2, 2]).unwrap()]);
        assert_eq!(basis_at_degree(&v, 5).len(), 7);
    }

    #[test]
    fn dimensions_match_partition_counts() {
        let expected = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42];
        for d in 0..=10u32 {
            assert_eq!(basis_at_degree(&verma(), d).len(), expected[d as usize]);
            assert_eq!(basis_at_degree(&ModuleId::vacuum(int(1)), d).len(), count_partitions(d, 2));
        }
    }

    #[test]
    fn lowest_weight_commutators() {
        let v = verma();
        let (c, h) = (v.c().clone(), v.h().clone());
        let vh = ModuleElement::lowest(&v);
        let a = apply_virasoro(1, &apply_virasoro(-1, &vh));
        assert_eq!(a, vh.scale(&(int(2) * &h)));
        let b = apply_virasoro(2, &apply_virasoro(-2, &vh));
        assert_eq!(b, vh.scale(&(int(4) * &h + c / int(2))));
    }

    #[test]
    fn grading_by_l0() {
        let v = verma();
        for d in 0..=5 {
            for m in basis_at_degree(&v, d) {
                let u = ModuleElement::monomial(&v, m);
                assert_eq!(apply_virasoro(0, &u), u.scale(&(v.h() + int(d as i64))));
            }
        }
    }

    #[test]
    fn vacuum_kills_l_minus_one() {
        let vac = ModuleId::vacuum(int(3));
        assert!(apply_virasoro(-1, &ModuleElement::lowest(&vac)).is_zero());
        // L(-1) L(-2) 1 = L(-3) 1 in the vacuum module
        let u = word(&vac, &[-1, -2]);
        assert_eq!(u, ModuleElement::from_parts(&vac, &[(&[3], int(1))]).unwrap());
        assert!(ModuleElement::from_parts(&vac, &[(&[2, 1], int(1))]).is_err());
    }

    #[test]
    fn omega_and_vacuum_modes() {
        let v = verma();
        let vh = ModuleElement::lowest(&v);
        let w = omega(v.c());
        assert_eq!(state_mode(&w, 1, &vh).unwrap(), vh.scale(v.h()));
        let one = vacuum_vector(v.c());
        let u = word(&v, &[-2, -1]);
        for k in -3..3 {
            let r = state_mode(&one, k, &u).unwrap();
            if k == -1 {
                assert_eq!(r, u);
            } else {
                assert!(r.is_zero());
            }
        }
    }

    #[test]
    fn non_homogeneous_state_rejected() {
        let vac = ModuleId::vacuum(frac(1, 2));
        let a = ModuleElement::from_parts(&vac, &[(&[2], int(1)), (&[], int(1))]).unwrap();
        let vh = ModuleElement::lowest(&verma());
        assert!(matches!(state_mode(&a, 0, &vh), Err(crate::Error::NotHomogeneous(_))));
    }

    // (w_{-1} w)_k = sum_{j<=-1} w_j w_{k-1-j} + sum_{j>=0} w_{k-1-j} w_j
    fn normal_ordered_square(k: i64, u: &ModuleElement) -> ModuleElement {
        let deg = u.max_degree() as i64;
        let wmode = |j: i64, x: &ModuleElement| apply_virasoro(j - 1, x);
        let mut out = ModuleElement::zero(u.module());
        for j in (k - 2 - deg)..=-1 {
            out = out.try_add(&wmode(j, &wmode(k - 1 - j, u))).unwrap();
        }
        for j in 0..=(deg + 1) {
            out = out.try_add(&wmode(k - 1 - j, &wmode(j, u))).unwrap();
        }
        out
    }

    #[test]
    fn composite_mode_matches_normal_ordering() {
        let v = verma();
        let a = ModuleElement::from_parts(&ModuleId::vacuum(v.c().clone()), &[(&[2, 2], int(1))]).unwrap();
        let vh = ModuleElement::lowest(&v);
        let h = v.h().clone();
        let expected = vh.scale(&(&h * &h + int(2) * &h));
        assert_eq!(state_mode(&a, 3, &vh).unwrap(), expected);
        for d in 0..=4 {
            for m in basis_at_degree(&v, d) {
                let u = ModuleElement::monomial(&v, m);
                for k in -2..=(4 + d as i64) {
                    assert_eq!(state_mode(&a, k, &u).unwrap(), normal_ordered_square(k, &u), "k={k} u={u:?}");
                }
            }
        }
    }

    #[test]
    fn pairing_examples() {
        let v = verma();
        let dual = ModuleId::dual_verma(v.c().clone(), v.h().clone());
        let f = ModuleElement::lowest(&dual);
        assert_eq!(pair_elements(&f, &ModuleElement::lowest(&v)).unwrap(), int(1));
        let f1 = ModuleElement::from_parts(&dual, &[(&[1], int(1))]).unwrap();
        assert!(pair_elements(&f1, &word(&v, &[-2])).unwrap().is_zero());
        let other = ModuleElement::lowest(&ModuleId::verma(int(1), int(0)));
        assert!(pair_elements(&f, &other).is_err());
        let df = DualElement::from_element(&f1).unwrap();
        assert_eq!(df.coords().keys().copied().collect::<Vec<_>>(), vec![(1, 0)]);
        assert_eq!(pairing(&df, &word(&v, &[-1])).unwrap(), int(1));
    }

    fn truncated_borcherds(a: &ModuleElement, b: &ModuleElement, u: &ModuleElement, l: i64, m: i64, n: i64) {
        let wa = a.homogeneous_degree().unwrap() as i64;
        let wb = b.homogeneous_degree().unwrap() as i64;
        let du = u.max_degree() as i64;
        let mut lhs = ModuleElement::zero(u.module());
        for i in 0..=(wa + wb - l).max(0) {
            let ab = state_mode(a, l + i, b).unwrap();
            if ab.is_zero() {
                continue;
            }
            let t = state_mode(&ab, m + n - i, u).unwrap();
            lhs.add_scaled(&t, &binomial(m, i as u64)).unwrap();
        }
        let mut rhs = ModuleElement::zero(u.module());
        for i in 0..=(wb + du - n).max(0) {
            let t = state_mode(a, l + m - i, &state_mode(b, n + i, u).unwrap()).unwrap();
            rhs.add_scaled(&t, &(binomial(l, i as u64) * int(sign(i)))).unwrap();
        }
        for i in 0..=(wa + du - m).max(0) {
            let t = state_mode(b, l + n - i, &state_mode(a, m + i, u).unwrap()).unwrap();
            rhs.add_scaled(&t, &(binomial(l, i as u64) * int(-sign(i) * sign(l)))).unwrap();
        }
        assert_eq!(lhs, rhs, "l={l} m={m} n={n} a={a:?} b={b:?} u={u:?}");
    }

    fn vacuum_monomial(c: &Rational, max_wt: u32, pick: usize) -> ModuleElement {
        let vac = ModuleId::vacuum(c.clone());
        let all: Vec<Pbw> = (0..=max_wt).flat_map(|d| basis_at_degree(&vac, d)).collect();
        ModuleElement::monomial(&vac, all[pick % all.len()].clone())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn borcherds_identity(ai in 0usize..20, bi in 0usize..20, ui in 0usize..20,
                              l in -2i64..=2, m in -1i64..=2, n in -1i64..=2) {
            let v = verma();
            let a = vacuum_monomial(v.c(), 4, ai);
            let b = vacuum_monomial(v.c(), 4, bi);
            let basis: Vec<Pbw> = (0..=3).flat_map(|d| basis_at_degree(&v, d)).collect();
            let u = ModuleElement::monomial(&v, basis[ui % basis.len()].clone());
            truncated_borcherds(&a, &b, &u, l, m, n);
        }

        #[test]
        fn commutator_relation(m in -3i64..=3, n in -3i64..=3, ui in 0usize..12, cn in -5i64..5, hn in -5i64..5) {
            let v = ModuleId::verma(frac(cn, 3), frac(hn, 7));
            let basis: Vec<Pbw> = (0..=4).flat_map(|d| basis_at_degree(&v, d)).collect();
            let u = ModuleElement::monomial(&v, basis[ui % basis.len()].clone());
            let lhs = apply_virasoro(m, &apply_virasoro(n, &u))
                .try_sub(&apply_virasoro(n, &apply_virasoro(m, &u))).unwrap();
            let mut rhs = apply_virasoro(m + n, &u).scale(&int(m - n));
            if m + n == 0 {
                rhs = rhs.try_add(&u.scale(&(frac(m * m * m - m, 12) * v.c()))).unwrap();
            }
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn dual_action_is_adjoint(n in -3i64..=3, fi in 0usize..12, ui in 0usize..12) {
            let v = ModuleId::verma(frac(26, 27), frac(5, 7));
            let dual = ModuleId::dual_verma(v.c().clone(), v.h().clone());
            let basis: Vec<Pbw> = (0..=4).flat_map(|d| basis_at_degree(&v, d)).collect();
            let f = ModuleElement::monomial(&dual, basis[fi % basis.len()].clone());
            let u = ModuleElement::monomial(&v, basis[ui % basis.len()].clone());
            let lhs = pair_elements(&apply_virasoro(n, &f), &u).unwrap();
            let rhs = pair_elements(&f, &apply_virasoro(-n, &u)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn modes_truncate(ai in 0usize..20, ui in 0usize..20, extra in 0i64..3) {
            let v = verma();
            let a = vacuum_monomial(v.c(), 5, ai);
            let basis: Vec<Pbw> = (0..=4).flat_map(|d| basis_at_degree(&v, d)).collect();
            let u = ModuleElement::monomial(&v, basis[ui % basis.len()].clone());
            let k = a.homogeneous_degree().unwrap() as i64 + u.max_degree() as i64 + extra;
            prop_assert!(state_mode(&a, k, &u).unwrap().is_zero());
            let k2 = k - extra - 1;
            let r = state_mode(&a, k2, &u).unwrap();
            prop_assert!(r.degrees().iter().all(|&d| d == 0));
        }
    }

    #[test]
    fn json_roundtrip() {
        let v = verma();
        let u = word(&v, &[-2, -1, -1]);
        let back = ModuleElement::from_json(&u.to_json()).unwrap();
        assert_eq!(back, u);
        assert!(Rational::zero() < int(1));
    }
}
